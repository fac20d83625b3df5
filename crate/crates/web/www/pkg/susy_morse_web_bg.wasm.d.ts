/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_explorer_free: (a: number, b: number) => void;
export const explorer_coherentDensity: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const explorer_new: (a: number) => [number, number, number];
export const explorer_nuCount: (a: number) => number;
export const explorer_nuDensity: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const explorer_nuPair: (a: number, b: number) => [number, number];
export const explorer_scaledSpectrum: (a: number) => [number, number, number, number];
export const explorer_setBox: (a: number, b: number, c: number, d: number, e: number) => void;
export const explorer_uncertainty: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
