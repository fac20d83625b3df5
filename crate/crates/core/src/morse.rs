//! Bound states of the 1D and separable 2D Morse oscillator in units
//! `hbar = beta = m = 1`.
//!
//! With `z = nu exp(-x)` the 1D eigenfunctions are
//! `psi_n(x) = N_n exp(-z/2) z^(p-n) L_n^(2(p-n))(z)` with energy
//! `-(p-n)^2 / 2`, where `nu = 2p + 1` and `V(x) = (nu^2/8)(exp(-2x) - 2exp(-x))`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldEval, SampledGrid, ScalarField2D};
use crate::specfun::{laguerre_deriv_unchecked, laguerre_unchecked, log_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub p: f64,
    pub nu: f64,
    pub k: usize,
    pub eps: f64,
}

impl MorseParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must be positive and finite, got {p}")));
        }
        let k = p.floor();
        Ok(Self {
            p,
            nu: 2.0 * p + 1.0,
            k: k as usize,
            eps: p - k,
        })
    }

    /// Well depth `V0 = nu^2 / 8`.
    pub fn depth(&self) -> f64 {
        self.nu * self.nu / 8.0
    }

    pub fn potential(&self, x: f64) -> f64 {
        let e = (-x).exp();
        self.depth() * (e * e - 2.0 * e)
    }

    pub fn potential_dx(&self, x: f64) -> f64 {
        let e = (-x).exp();
        self.depth() * (2.0 * e - 2.0 * e * e)
    }

    /// 1D level `-(p-n)^2 / 2`.
    pub fn level(&self, n: usize) -> f64 {
        let s = self.p - n as f64;
        -0.5 * s * s
    }

    /// Number of bound 1D levels, `k + 1`.
    pub fn levels(&self) -> usize {
        self.k + 1
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.k {
            Err(Error::Index { index: n, k: self.k })
        } else {
            Ok(())
        }
    }

    /// `ln N_n` with `N_n^2 = (nu - 2n - 1) Gamma(n+1) / Gamma(nu - n)`.
    pub fn log_norm(&self, n: usize) -> f64 {
        let nf = n as f64;
        let weight = self.nu - 2.0 * nf - 1.0;
        if weight <= 0.0 {
            // threshold state (eps = 0, n = k) is not normalisable
            return f64::NEG_INFINITY;
        }
        let lg_num = log_gamma(nf + 1.0).expect("n + 1 > 0");
        let lg_den = log_gamma(self.nu - nf).expect("nu - n > 0 for n <= k");
        0.5 * (weight.ln() + lg_num - lg_den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantumPair {
    pub n: usize,
    pub m: usize,
}

impl QuantumPair {
    pub const fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn swapped(self) -> Self {
        Self { n: self.m, m: self.n }
    }

    pub fn validate(self, params: &MorseParams) -> Result<Self> {
        params.check_index(self.n)?;
        params.check_index(self.m)?;
        Ok(self)
    }
}

impl std::fmt::Display for QuantumPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Value and first three x-derivatives of `psi_n` at one point.
///
/// The second and third derivatives come from the eigenvalue equation
/// `psi'' = 2 (V - e_n) psi`, so only `psi` and `psi'` touch the Laguerre
/// polynomials.
pub type Jet = [f64; 4];

pub(crate) fn jet_unchecked(params: &MorseParams, log_norm: f64, n: usize, x: f64) -> Jet {
    let z = params.nu * (-x).exp();
    let s = params.p - n as f64;
    let alpha = 2.0 * s;
    let envelope = (log_norm - 0.5 * z + s * z.ln()).exp();
    if envelope == 0.0 {
        return [0.0; 4];
    }
    let l = laguerre_unchecked(n, alpha, z);
    let dl = laguerre_deriv_unchecked(n, alpha, z);
    let psi = envelope * l;
    let dpsi = -envelope * ((s - 0.5 * z) * l + z * dl);
    let w = 2.0 * (params.potential(x) - params.level(n));
    let d2 = w * psi;
    let d3 = 2.0 * params.potential_dx(x) * psi + w * dpsi;
    [psi, dpsi, d2, d3]
}

/// `psi_n` and its derivatives at every node, for a fixed set of levels.
#[derive(Debug, Clone)]
pub struct AxisTable {
    levels: Vec<usize>,
    jets: Vec<Jet>,
}

impl AxisTable {
    pub fn new(params: &MorseParams, levels: &[usize], nodes: &[f64]) -> Self {
        let norms: Vec<f64> = levels.iter().map(|&n| params.log_norm(n)).collect();
        let mut jets = Vec::with_capacity(levels.len() * nodes.len());
        for &x in nodes {
            for (&n, &ln) in levels.iter().zip(&norms) {
                jets.push(jet_unchecked(params, ln, n, x));
            }
        }
        Self {
            levels: levels.to_vec(),
            jets,
        }
    }

    /// Jet of the `slot`-th requested level at node `i`.
    #[inline]
    pub fn jet(&self, i: usize, slot: usize) -> &Jet {
        &self.jets[i * self.levels.len() + slot]
    }
}

pub fn psi1d(params: &MorseParams, n: usize, x: f64) -> Result<f64> {
    params.check_index(n)?;
    Ok(jet_unchecked(params, params.log_norm(n), n, x)[0])
}

/// Analytic `d psi_n / dx`.
pub fn psi1d_dx(params: &MorseParams, n: usize, x: f64) -> Result<f64> {
    params.check_index(n)?;
    Ok(jet_unchecked(params, params.log_norm(n), n, x)[1])
}

/// Full jet `[psi, psi', psi'', psi''']` of `psi_n` at `x`.
pub fn psi1d_jet(params: &MorseParams, n: usize, x: f64) -> Result<Jet> {
    params.check_index(n)?;
    Ok(jet_unchecked(params, params.log_norm(n), n, x))
}

/// Physical energy `E_{n,m} = -((p-n)^2 + (p-m)^2) / 2`.
pub fn energy(params: &MorseParams, pair: QuantumPair) -> f64 {
    params.level(pair.n) + params.level(pair.m)
}

/// Scaled energy `eps_{n,m} = -((p-n)^2 + (p-m)^2) = 2 E_{n,m}`.
pub fn scaled_energy(params: &MorseParams, pair: QuantumPair) -> f64 {
    2.0 * energy(params, pair)
}

/// Superposition `sum_t c_t psi_{n_t}(x) psi_{m_t}(y)` of separable eigenstates.
#[derive(Debug, Clone)]
pub struct ProductStates {
    params: MorseParams,
    levels: Vec<usize>,
    norms: Vec<f64>,
    // (coefficient, slot of n, slot of m)
    terms: Vec<(Complex64, usize, usize)>,
}

impl ProductStates {
    pub fn new(params: &MorseParams, terms: &[(Complex64, QuantumPair)]) -> Result<Self> {
        let mut levels: Vec<usize> = Vec::new();
        let slot = |n: usize, levels: &mut Vec<usize>| -> usize {
            match levels.iter().position(|&l| l == n) {
                Some(s) => s,
                None => {
                    levels.push(n);
                    levels.len() - 1
                }
            }
        };
        let mut out = Vec::with_capacity(terms.len());
        for &(c, pair) in terms {
            pair.validate(params)?;
            let a = slot(pair.n, &mut levels);
            let b = slot(pair.m, &mut levels);
            out.push((c, a, b));
        }
        let norms = levels.iter().map(|&n| params.log_norm(n)).collect();
        Ok(Self {
            params: *params,
            levels,
            norms,
            terms: out,
        })
    }

    fn jets(&self, x: f64) -> Vec<Jet> {
        self.levels
            .iter()
            .zip(&self.norms)
            .map(|(&n, &ln)| jet_unchecked(&self.params, ln, n, x))
            .collect()
    }

    #[inline]
    fn combine(&self, jx: &dyn Fn(usize) -> Jet, jy: &dyn Fn(usize) -> Jet) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for &(c, a, b) in &self.terms {
            let (xa, yb) = (jx(a), jy(b));
            v += c * (xa[0] * yb[0]);
            d += c * (xa[1] * yb[0]);
        }
        (v, d)
    }
}

impl FieldEval for ProductStates {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        let (jx, jy) = (self.jets(x), self.jets(y));
        self.combine(&|s| jx[s], &|s| jy[s]).0
    }

    fn dx(&self, x: f64, y: f64) -> Complex64 {
        let (jx, jy) = (self.jets(x), self.jets(y));
        self.combine(&|s| jx[s], &|s| jy[s]).1
    }

    fn tabulate(&self, xs: &[f64], ys: &[f64], with_dx: bool) -> SampledGrid {
        let tx = AxisTable::new(&self.params, &self.levels, xs);
        let ty = AxisTable::new(&self.params, &self.levels, ys);
        SampledGrid::build(xs, ys, with_dx, |i, j| {
            self.combine(&|s| *tx.jet(i, s), &|s| *ty.jet(j, s))
        })
    }
}

/// Separable eigenstate `psi_n(x) psi_m(y)`.
pub fn psi2d(params: &MorseParams, pair: QuantumPair) -> Result<ScalarField2D> {
    let states = ProductStates::new(params, &[(Complex64::new(1.0, 0.0), pair)])?;
    Ok(ScalarField2D::new(Arc::new(states)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn p3pi() -> MorseParams {
        MorseParams::new(3.0 * PI).unwrap()
    }

    /// Composite Simpson on a fine uniform grid; independent of the
    /// Gauss-Legendre machinery in `quadrature`.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn params_derived_fields() {
        let mp = p3pi();
        assert_eq!(mp.k, 9);
        assert_relative_eq!(mp.nu, 6.0 * PI + 1.0);
        assert_relative_eq!(mp.eps, 3.0 * PI - 9.0);
        assert!(MorseParams::new(0.0).is_err());
        assert!(MorseParams::new(-1.0).is_err());
        assert!(MorseParams::new(f64::NAN).is_err());
    }

    #[test]
    fn index_errors() {
        let mp = p3pi();
        assert_eq!(psi1d(&mp, 10, 0.0), Err(Error::Index { index: 10, k: 9 }));
        assert!(psi2d(&mp, QuantumPair::new(3, 10)).is_err());
    }

    #[test]
    fn one_dimensional_orthonormality() {
        let mp = p3pi();
        for n in 0..=mp.k {
            for m in 0..=n {
                let v = simpson(
                    |x| psi1d(&mp, n, x).unwrap() * psi1d(&mp, m, x).unwrap(),
                    -4.0,
                    90.0,
                    400_000,
                );
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-8, "<{n}|{m}> = {v}");
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mp = p3pi();
        let (x, h) = (0.7, 1e-5);
        let fd = (psi1d(&mp, 3, x + h).unwrap() - psi1d(&mp, 3, x - h).unwrap()) / (2.0 * h);
        assert_relative_eq!(psi1d_dx(&mp, 3, x).unwrap(), fd, max_relative = 1e-6);
    }

    #[test]
    fn higher_derivatives_match_finite_differences() {
        let mp = p3pi();
        let h = 1e-4;
        for n in [0, 4, 9] {
            for x in [-1.2, 0.3, 2.5] {
                let j = psi1d_jet(&mp, n, x).unwrap();
                let jp = psi1d_jet(&mp, n, x + h).unwrap();
                let jm = psi1d_jet(&mp, n, x - h).unwrap();
                let scale = j.iter().map(|v| v.abs()).fold(1e-3, f64::max);
                for order in 1..4 {
                    let fd = (jp[order - 1] - jm[order - 1]) / (2.0 * h);
                    assert!(
                        (fd - j[order]).abs() < 1e-5 * scale * 100.0,
                        "n={n} x={x} order={order}: {fd} vs {}",
                        j[order]
                    );
                }
            }
        }
    }

    #[test]
    fn derivative_moments() {
        let mp = p3pi();
        for n in [0, 5, 9] {
            let cross = simpson(
                |x| psi1d(&mp, n, x).unwrap() * psi1d_dx(&mp, n, x).unwrap(),
                -4.0,
                90.0,
                400_000,
            );
            assert!(cross.abs() < 1e-8, "n={n}: {cross}");
            let p2 = simpson(|x| psi1d_dx(&mp, n, x).unwrap().powi(2), -4.0, 90.0, 400_000);
            assert!(p2 > 0.0);
        }
    }

    #[test]
    fn energy_values() {
        let mp = p3pi();
        let e00 = energy(&mp, QuantumPair::new(0, 0));
        assert_relative_eq!(e00, -(3.0 * PI).powi(2), max_relative = 1e-15);
        assert_relative_eq!(e00, -88.826_439_609_804_22, max_relative = 1e-12);
        for n in 0..=mp.k {
            for m in 0..=mp.k {
                let a = energy(&mp, QuantumPair::new(n, m));
                assert_eq!(a, energy(&mp, QuantumPair::new(m, n)));
                assert_eq!(scaled_energy(&mp, QuantumPair::new(n, m)), 2.0 * a);
            }
        }
    }

    #[test]
    fn product_symmetry() {
        let mp = p3pi();
        let a = psi2d(&mp, QuantumPair::new(4, 1)).unwrap();
        let b = psi2d(&mp, QuantumPair::new(1, 4)).unwrap();
        for &(x, y) in &[(0.1, 0.9), (-1.0, 2.0), (3.3, -0.4)] {
            assert_eq!(a.value(x, y), b.value(y, x));
        }
    }

    #[test]
    fn decays_at_default_quadrature_edges() {
        let mp = p3pi();
        let axis = crate::quadrature::AxisLayout::for_params(&mp);
        for n in 0..=mp.k {
            let left = psi1d(&mp, n, axis.x_min).unwrap().abs();
            let right = psi1d(&mp, n, axis.x_max).unwrap().abs();
            assert!(left < 1e-12 && right < 1e-12, "n={n}: {left:e} {right:e}");
        }
    }
}
