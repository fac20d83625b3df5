//! wasm-bindgen wrapper behind `www/index.html`: partner-state and
//! coherent-state densities plus the uncertainty readout for one `p`.

use num_complex::Complex64;
use susy_morse::{
    build_mu_basis, build_nu_basis, coherent_state, density_grid, BasisMatrices, MorseParams, NuState,
    QuadratureGrid, QuadratureOptions, ScalarField2D,
};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct Explorer {
    params: MorseParams,
    nu: Vec<NuState>,
    bounds: [f64; 4],
    // built on the first uncertainty query; the quadrature dominates start-up otherwise
    matrices: Option<BasisMatrices>,
}

fn js(e: susy_morse::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Explorer {
    #[wasm_bindgen(constructor)]
    pub fn new(p: f64) -> Result<Explorer, JsError> {
        let params = MorseParams::new(p).map_err(js)?;
        let nu = build_nu_basis(&params).map_err(js)?;
        Ok(Explorer {
            params,
            nu,
            bounds: [-4.0, 25.0, -4.0, 25.0],
            matrices: None,
        })
    }

    #[wasm_bindgen(js_name = setBox)]
    pub fn set_box(&mut self, x0: f64, x1: f64, y0: f64, y1: f64) {
        self.bounds = [x0, x1, y0, y1];
    }

    #[wasm_bindgen(js_name = nuCount)]
    pub fn nu_count(&self) -> usize {
        self.nu.len()
    }

    /// `[n, m]` of the partner state at `index`.
    #[wasm_bindgen(js_name = nuPair)]
    pub fn nu_pair(&self, index: usize) -> Vec<u32> {
        self.nu.get(index).map_or(Vec::new(), |s| vec![s.pair.n as u32, s.pair.m as u32])
    }

    /// Scaled energies of the separable basis followed by the partner basis;
    /// the split is at `55` for p = 3π, i.e. `(k+1)(k+2)/2`.
    #[wasm_bindgen(js_name = scaledSpectrum)]
    pub fn scaled_spectrum(&self) -> Result<Vec<f64>, JsError> {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let table = build_mu_basis(&self.params, Complex64::new(a, 0.0), Complex64::new(-a, 0.0)).map_err(js)?;
        let mu = table.mu.iter().map(|s| susy_morse::scaled_spectrum(&self.params, s.pair));
        Ok(mu.chain(self.nu.iter().map(|s| s.scaled_energy)).collect())
    }

    /// Row-major `ny x nx` density of partner state `index`, y ascending.
    #[wasm_bindgen(js_name = nuDensity)]
    pub fn nu_density(&self, index: usize, nx: usize, ny: usize) -> Result<Vec<f32>, JsError> {
        let state = self
            .nu
            .get(index)
            .ok_or_else(|| JsError::new(&format!("index {index} out of range 0..{}", self.nu.len())))?;
        self.density(&state.field, nx, ny)
    }

    #[wasm_bindgen(js_name = coherentDensity)]
    pub fn coherent_density(&self, phi: f64, nx: usize, ny: usize) -> Result<Vec<f32>, JsError> {
        let cs = coherent_state(&self.nu, Complex64::new(phi, 0.0)).map_err(js)?;
        self.density(&cs.field, nx, ny)
    }

    /// `[varQ, varP, product]` of the coherent state at real `phi`.
    pub fn uncertainty(&mut self, phi: f64) -> Result<Vec<f64>, JsError> {
        let cs = coherent_state(&self.nu, Complex64::new(phi, 0.0)).map_err(js)?;
        let nu = &self.nu;
        let params = &self.params;
        let mats = self.matrices.get_or_insert_with(|| {
            let grid = QuadratureGrid::for_params(params, QuadratureOptions::default());
            let fields: Vec<ScalarField2D> = nu.iter().map(|s| s.field.clone()).collect();
            BasisMatrices::new(&fields, &grid)
        });
        let v = mats.moments(&cs.amplitudes).map_err(js)?.variances();
        Ok(vec![v.var_q, v.var_p, v.product()])
    }
}

impl Explorer {
    fn density(&self, field: &ScalarField2D, nx: usize, ny: usize) -> Result<Vec<f32>, JsError> {
        let grid = density_grid(field, self.bounds, nx, ny).map_err(js)?;
        Ok(grid.density.iter().map(|&d| d as f32).collect())
    }
}
