//! Generalized coherent states on the partner basis.
//!
//! The ladder strengths are the scaled partner energies relative to the
//! ground partner state, `f(i) = e~_i - e~_0`, and
//! `|Phi> ∝ sum_n Phi^n / sqrt([x_n]!) |nu_n>` with `[x_n]! = f(1)...f(n)`.
//! On a finite basis the lowering operator `B-` maps the expansion onto
//! `Phi` times itself except for the top term, so `|Phi>` is only an
//! approximate eigenstate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarField2D, Superposition};
use crate::susy::NuState;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    f: Vec<f64>,
    log_factorials: Vec<f64>,
}

impl LadderSpec {
    /// From an increasing list of scaled energies.
    pub fn from_scaled_energies(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Domain("ladder needs at least one level".into()));
        }
        if let Some(w) = energies.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!(
                "ladder energies must increase strictly, got {} then {}",
                w[0], w[1]
            )));
        }
        let f: Vec<f64> = energies.iter().map(|e| e - energies[0]).collect();
        let mut log_factorials = Vec::with_capacity(f.len());
        let mut acc = 0.0;
        log_factorials.push(acc);
        for fi in &f[1..] {
            acc += fi.ln();
            log_factorials.push(acc);
        }
        Ok(Self { f, log_factorials })
    }

    pub fn from_basis(basis: &[NuState]) -> Result<Self> {
        let e: Vec<f64> = basis.iter().map(|s| s.scaled_energy).collect();
        Self::from_scaled_energies(&e)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn f(&self, i: usize) -> f64 {
        self.f[i]
    }

    /// `ln [x_n]!`
    pub fn log_factorial(&self, n: usize) -> f64 {
        self.log_factorials[n]
    }
}

/// Scalar type the lowering operator can act on.
pub trait LadderScalar: Clone {
    fn zero() -> Self;
    /// `self * sqrt(w)`, with the square root taken at the scalar's precision.
    fn mul_sqrt(&self, w: f64) -> Self;
}

impl LadderScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn mul_sqrt(&self, w: f64) -> Self {
        self * w.sqrt()
    }
}

impl LadderScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn mul_sqrt(&self, w: f64) -> Self {
        self * w.sqrt()
    }
}

/// `B- |nu_i> = sqrt(f(i)) |nu_{i-1}>`, applied to a coefficient vector.
/// Nothing flows into the top slot.
pub fn ladder_lower<T: LadderScalar>(spec: &LadderSpec, coeffs: &[T]) -> Vec<T> {
    assert_eq!(coeffs.len(), spec.len(), "coefficient vector must span the ladder");
    let mut out = vec![T::zero(); coeffs.len()];
    for i in 1..coeffs.len() {
        out[i - 1] = coeffs[i].mul_sqrt(spec.f(i));
    }
    out
}

#[derive(Debug, Clone)]
pub struct CoherentState {
    pub phi: Complex64,
    /// Normalised expansion coefficients `c_n / sqrt(N(Phi))`.
    pub amplitudes: Vec<Complex64>,
    /// `ln N(Phi)` with `N(Phi) = sum_n |Phi|^2n / [x_n]!`.
    pub log_norm: f64,
    pub spec: LadderSpec,
    pub field: ScalarField2D,
}

impl CoherentState {
    /// Unnormalised `c_n = Phi^n / sqrt([x_n]!)`.
    pub fn coefficient(&self, n: usize) -> Complex64 {
        self.amplitudes[n] * (0.5 * self.log_norm).exp()
    }

    /// `N(Phi)`.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    /// `|Phi|^(n_max+1) / sqrt(N(Phi) [x_n_max]!)`, the norm of
    /// `B-|Phi> - Phi|Phi>` for the normalised state.
    pub fn closed_form_defect(&self) -> f64 {
        let r = self.phi.norm();
        if r == 0.0 {
            return 0.0;
        }
        let n = self.n_max();
        ((n as f64 + 1.0) * r.ln() - 0.5 * (self.log_norm + self.spec.log_factorial(n))).exp()
    }

    /// `|| B-|Phi> - Phi|Phi> ||` by direct vector arithmetic in double
    /// precision. Rounding limits this to about `1e-16 |Phi|`.
    pub fn measured_defect(&self) -> f64 {
        let lowered = ladder_lower(&self.spec, &self.amplitudes);
        lowered
            .iter()
            .zip(&self.amplitudes)
            .map(|(l, a)| (l - self.phi * a).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `|Phi> = sum_n c_n |nu_n> / sqrt(N(Phi))` over the whole partner basis.
///
/// Coefficients are built in log space: `[x_35]!` alone is about `1e65`.
pub fn coherent_state(basis: &[NuState], phi: Complex64) -> Result<CoherentState> {
    let spec = LadderSpec::from_basis(basis)?;
    let n = spec.len();
    let r = phi.norm();
    let log_c: Vec<f64> = (0..n)
        .map(|i| match (i, r) {
            (0, _) => 0.0,
            (_, r) if r == 0.0 => f64::NEG_INFINITY,
            _ => i as f64 * r.ln() - 0.5 * spec.log_factorial(i),
        })
        .collect();
    let peak = log_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled_sum: f64 = log_c.iter().map(|l| (2.0 * (l - peak)).exp()).sum();
    let log_norm = 2.0 * peak + scaled_sum.ln();
    let arg = phi.arg();
    let amplitudes: Vec<Complex64> = log_c
        .iter()
        .enumerate()
        .map(|(i, l)| Complex64::from_polar((l - 0.5 * log_norm).exp(), i as f64 * arg))
        .collect();
    let terms = amplitudes
        .iter()
        .zip(basis)
        .filter(|(a, _)| a.norm() > 0.0)
        .map(|(a, s)| (*a, s.field.clone()))
        .collect();
    Ok(CoherentState {
        phi,
        amplitudes,
        log_norm,
        spec,
        field: ScalarField2D::from(Superposition::new(terms)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::MorseParams;
    use crate::susy::build_nu_basis;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn basis() -> Vec<NuState> {
        build_nu_basis(&MorseParams::new(3.0 * PI).unwrap()).unwrap()
    }

    #[test]
    fn ladder_strengths() {
        let spec = LadderSpec::from_basis(&basis()).unwrap();
        assert_eq!(spec.len(), 36);
        assert_eq!(spec.f(0), 0.0);
        // e~(3,0) - e~(2,0) = 13 + 2 eps
        assert_relative_eq!(spec.f(1), 13.0 + 2.0 * (3.0 * PI - 9.0), max_relative = 1e-12);
        assert_relative_eq!(spec.f(1), 13.849_555_921_538_759, max_relative = 1e-12);
        for i in 1..36 {
            assert!(spec.f(i) > spec.f(i - 1));
            assert_relative_eq!(
                spec.log_factorial(i),
                spec.log_factorial(i - 1) + spec.f(i).ln(),
                max_relative = 1e-14
            );
        }
        // mpmath: prod f(1..35) = 1.156...e65
        assert_relative_eq!(spec.log_factorial(35) / 10f64.ln(), 65.0629, epsilon = 1e-3);
    }

    #[test]
    fn lowering_unit_vectors() {
        let spec = LadderSpec::from_basis(&basis()).unwrap();
        let unit = |i: usize| {
            let mut v = vec![Complex64::new(0.0, 0.0); 36];
            v[i] = Complex64::new(1.0, 0.0);
            v
        };
        assert!(ladder_lower(&spec, &unit(0)).iter().all(|c| c.norm() == 0.0));
        let l1 = ladder_lower(&spec, &unit(1));
        assert_eq!(l1[0], Complex64::new(spec.f(1).sqrt(), 0.0));
        assert!(l1[1..].iter().all(|c| c.norm() == 0.0));
        // nothing wraps into the top slot
        assert_eq!(ladder_lower(&spec, &unit(35))[35], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_non_increasing_ladder() {
        assert!(LadderSpec::from_scaled_energies(&[0.0, 1.0, 1.0]).is_err());
        assert!(LadderSpec::from_scaled_energies(&[]).is_err());
    }

    #[test]
    fn zero_phi_is_the_ground_partner_state() {
        let b = basis();
        let cs = coherent_state(&b, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(cs.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(cs.amplitudes[1..].iter().all(|a| *a == Complex64::new(0.0, 0.0)));
        assert_eq!(cs.closed_form_defect(), 0.0);
        for &(x, y) in &[(0.3, 1.2), (1.0, -0.4)] {
            assert_eq!(cs.field.value(x, y), b[0].field.value(x, y));
        }
    }

    #[test]
    fn coefficients_normalised_and_positive() {
        let b = basis();
        for phi in [0.001, 0.5, 1.0, 2.0, 5.0, 6.0] {
            let cs = coherent_state(&b, Complex64::new(phi, 0.0)).unwrap();
            let s: f64 = cs.amplitudes.iter().map(|a| a.norm_sqr()).sum();
            assert!((s - 1.0).abs() < 1e-12, "{phi}: {s}");
            assert!(cs.amplitudes.iter().all(|a| a.re > 0.0 && a.im == 0.0), "{phi}");
            let c1 = cs.coefficient(1).re;
            assert_relative_eq!(c1, phi / cs.spec.f(1).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn small_phi_concentrates_on_ground_state() {
        let cs = coherent_state(&basis(), Complex64::new(0.001, 0.0)).unwrap();
        assert!(cs.amplitudes[0].norm_sqr() > 0.999);
    }

    #[test]
    fn complex_phi_carries_phases() {
        let phi = Complex64::from_polar(1.5, 0.7);
        let cs = coherent_state(&basis(), phi).unwrap();
        for n in 0..5 {
            assert_relative_eq!(cs.amplitudes[n].arg(), (n as f64 * 0.7 + PI).rem_euclid(2.0 * PI) - PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_defect_values_and_monotonicity() {
        let b = basis();
        // mpmath, 50 digits
        for (phi, expected) in [(0.5, 4.24e-44), (1.0, 2.84e-33), (2.0, 1.75e-22), (5.0, 1.503e-8)] {
            let d = coherent_state(&b, Complex64::new(phi, 0.0)).unwrap().closed_form_defect();
            assert_relative_eq!(d, expected, max_relative = 5e-3);
        }
        let mut prev = 0.0;
        for i in 1..=100 {
            let d = coherent_state(&b, Complex64::new(i as f64 / 100.0, 0.0)).unwrap().closed_form_defect();
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn measured_defect_at_large_phi() {
        // at |Phi| = 6 the defect is large enough to resolve in double precision
        let cs = coherent_state(&basis(), Complex64::new(6.0, 0.0)).unwrap();
        assert_relative_eq!(cs.measured_defect(), cs.closed_form_defect(), max_relative = 1e-6);
    }
}
