/* tslint:disable */
/* eslint-disable */

export class Explorer {
    free(): void;
    [Symbol.dispose](): void;
    coherentDensity(phi: number, nx: number, ny: number): Float32Array;
    constructor(p: number);
    nuCount(): number;
    /**
     * Row-major `ny x nx` density of partner state `index`, y ascending.
     */
    nuDensity(index: number, nx: number, ny: number): Float32Array;
    /**
     * `[n, m]` of the partner state at `index`.
     */
    nuPair(index: number): Uint32Array;
    /**
     * Scaled energies of the separable basis followed by the partner basis;
     * the split is at `55` for p = 3π, i.e. `(k+1)(k+2)/2`.
     */
    scaledSpectrum(): Float64Array;
    setBox(x0: number, x1: number, y0: number, y1: number): void;
    /**
     * `[varQ, varP, product]` of the coherent state at real `phi`.
     */
    uncertainty(phi: number): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_explorer_free: (a: number, b: number) => void;
    readonly explorer_coherentDensity: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly explorer_new: (a: number) => [number, number, number];
    readonly explorer_nuCount: (a: number) => number;
    readonly explorer_nuDensity: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly explorer_nuPair: (a: number, b: number) => [number, number];
    readonly explorer_scaledSpectrum: (a: number) => [number, number, number, number];
    readonly explorer_setBox: (a: number, b: number, c: number, d: number, e: number) => void;
    readonly explorer_uncertainty: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
