//! Partner states obtained by applying the second-order supercharge
//!
//! `Q+ = -H_x + H_y + 1/2 coth((x-y)/2) - 1/2 [(d_x - d_y) + coth((x-y)/2)(d_x + d_y)]`
//!
//! to antisymmetric combinations `(|n,m> - |m,n>)/sqrt(2)`. The operator is
//! only ever applied to eigenfunction products, so `H_x` and `H_y` reduce
//! to the 1D levels and every derivative is a closed-form jet of `psi_n`.
//! The squared norm of the image is the eigenvalue of `R = Q- Q+` on the
//! source state. For the operators above that eigenvalue is `r_{n,m} / 2`,
//! with `r_{n,m}` the closed form in [`r_eigenvalue`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldEval, SampledGrid, ScalarField2D};
use crate::morse::{energy, jet_unchecked, AxisTable, Jet, MorseParams, QuantumPair};
use crate::spectrum::{admissible_partner_pairs, scaled_spectrum};

/// Below this `|x - y|` the `coth` term of the value uses its limit.
const VALUE_SERIES_BAND: f64 = 1e-6;
/// Below this `|x - y|` the x-derivative of the `coth` term is interpolated
/// in `x - y` from nodes at `±h, ±2h`.
const DERIV_INTERP_BAND: f64 = 1e-3;

/// `r_{n,m} = ((m-n)^2 - 1)((2p - m - n)^2 - 1) / 2`.
pub fn r_eigenvalue(params: &MorseParams, pair: QuantumPair) -> f64 {
    let d = pair.m as f64 - pair.n as f64;
    let s = 2.0 * params.p - pair.m as f64 - pair.n as f64;
    0.5 * (d * d - 1.0) * (s * s - 1.0)
}

/// `||Q+ (|n,m> - |m,n>)/sqrt(2)||^2`, which is `r_{n,m} / 2` for the
/// supercharge in this module (checked against `Q- Q+` applied pointwise in
/// extended precision and against 2D quadrature).
pub fn qplus_norm_sq(params: &MorseParams, pair: QuantumPair) -> f64 {
    0.5 * r_eigenvalue(params, pair)
}

/// `scale * Q+ [(|n,m> - |m,n>)/sqrt(2)]` for `n > m`.
#[derive(Debug, Clone)]
pub struct QPlusImage {
    params: MorseParams,
    pair: QuantumPair,
    log_norms: [f64; 2],
    level_gap: f64,
    scale: f64,
}

struct Parts {
    value: f64,
    dx: f64,
}

impl QPlusImage {
    pub fn new(params: &MorseParams, pair: QuantumPair, scale: f64) -> Result<Self> {
        pair.validate(params)?;
        if pair.n <= pair.m {
            return Err(Error::Domain(format!(
                "antisymmetric combination needs n > m, got {pair}"
            )));
        }
        Ok(Self {
            params: *params,
            pair,
            log_norms: [params.log_norm(pair.n), params.log_norm(pair.m)],
            level_gap: params.level(pair.m) - params.level(pair.n),
            scale,
        })
    }

    pub fn pair(&self) -> QuantumPair {
        self.pair
    }

    fn jets(&self, x: f64) -> [Jet; 2] {
        [
            jet_unchecked(&self.params, self.log_norms[0], self.pair.n, x),
            jet_unchecked(&self.params, self.log_norms[1], self.pair.m, x),
        ]
    }

    /// The `coth((x-y)/2) G` derivative, with `G = A - A_x - A_y`.
    fn coth_term_dx(u: f64, g: f64, gx: f64) -> f64 {
        let sh = (0.5 * u).sinh();
        -0.5 * g / (sh * sh) + gx / (0.5 * u).tanh()
    }

    fn combine(&self, x: f64, y: f64, jx: &[Jet; 2], jy: &[Jet; 2], with_dx: bool) -> Parts {
        let ([a0, a1, a2, _], [b0, b1, b2, _]) = (jx[0], jx[1]);
        let ([c0, c1, c2, _], [d0, d1, d2, _]) = (jy[0], jy[1]);
        // a = psi_n(x), b = psi_m(x), c = psi_n(y), d = psi_m(y)
        let r = FRAC_1_SQRT_2;
        let anti = (a0 * d0 - b0 * c0) * r;
        let sym = (a0 * d0 + b0 * c0) * r;
        let ax = (a1 * d0 - b1 * c0) * r;
        let ay = (a0 * d1 - b0 * c1) * r;
        let axx = (a2 * d0 - b2 * c0) * r;
        let axy = (a1 * d1 - b1 * c1) * r;
        let ayy = (a0 * d2 - b0 * c2) * r;
        let g = anti - ax - ay;
        let gx = ax - axx - axy;
        let gy = ay - axy - ayy;

        let u = x - y;
        let coth_term = if u.abs() < VALUE_SERIES_BAND {
            gx - gy
        } else {
            g / (0.5 * u).tanh()
        };
        let value = self.level_gap * sym + 0.5 * coth_term - 0.5 * (ax - ay);

        let dx = if with_dx {
            let sym_x = (a1 * d0 + b1 * c0) * r;
            let coth_dx = if u.abs() < DERIV_INTERP_BAND {
                self.interpolated_coth_dx(x, y)
            } else {
                Self::coth_term_dx(u, g, gx)
            };
            self.level_gap * sym_x + 0.5 * coth_dx - 0.5 * (axx - axy)
        } else {
            0.0
        };
        Parts {
            value: self.scale * value,
            dx: self.scale * dx,
        }
    }

    /// Cubic Lagrange interpolation of the smooth `d_x [coth(u/2) G]` across
    /// the diagonal, along fixed `x + y`.
    fn interpolated_coth_dx(&self, x: f64, y: f64) -> f64 {
        let h = DERIV_INTERP_BAND;
        let (u, v) = (x - y, x + y);
        let nodes = [-2.0 * h, -h, h, 2.0 * h];
        let mut acc = 0.0;
        for (a, &ua) in nodes.iter().enumerate() {
            let (xa, ya) = (0.5 * (v + ua), 0.5 * (v - ua));
            let [[a0, a1, a2, _], [b0, b1, b2, _]] = self.jets(xa);
            let [[c0, c1, _, _], [d0, d1, _, _]] = self.jets(ya);
            let r = FRAC_1_SQRT_2;
            let anti = (a0 * d0 - b0 * c0) * r;
            let ax = (a1 * d0 - b1 * c0) * r;
            let ay = (a0 * d1 - b0 * c1) * r;
            let axx = (a2 * d0 - b2 * c0) * r;
            let axy = (a1 * d1 - b1 * c1) * r;
            let g = anti - ax - ay;
            let gx = ax - axx - axy;
            let fa = Self::coth_term_dx(xa - ya, g, gx);
            let mut w = 1.0;
            for (b, &ub) in nodes.iter().enumerate() {
                if a != b {
                    w *= (u - ub) / (ua - ub);
                }
            }
            acc += w * fa;
        }
        acc
    }

    /// Value and x-derivative at `(x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let p = self.combine(x, y, &self.jets(x), &self.jets(y), true);
        (p.value, p.dx)
    }
}

impl FieldEval for QPlusImage {
    fn value(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(self.combine(x, y, &self.jets(x), &self.jets(y), false).value, 0.0)
    }

    fn dx(&self, x: f64, y: f64) -> Complex64 {
        Complex64::new(self.combine(x, y, &self.jets(x), &self.jets(y), true).dx, 0.0)
    }

    fn tabulate(&self, xs: &[f64], ys: &[f64], with_dx: bool) -> SampledGrid {
        let levels = [self.pair.n, self.pair.m];
        let tx = AxisTable::new(&self.params, &levels, xs);
        let ty = AxisTable::new(&self.params, &levels, ys);
        SampledGrid::build(xs, ys, with_dx, |i, j| {
            let jx = [*tx.jet(i, 0), *tx.jet(i, 1)];
            let jy = [*ty.jet(j, 0), *ty.jet(j, 1)];
            let p = self.combine(xs[i], ys[j], &jx, &jy, with_dx);
            (Complex64::new(p.value, 0.0), Complex64::new(p.dx, 0.0))
        })
    }
}

/// Unnormalised `Q+ [(|n,m> - |m,n>)/sqrt(2)]`, `n > m`.
pub fn apply_qplus(params: &MorseParams, pair: QuantumPair) -> Result<ScalarField2D> {
    Ok(ScalarField2D::new(Arc::new(QPlusImage::new(params, pair, 1.0)?)))
}

#[derive(Debug, Clone)]
pub struct NuState {
    pub index: usize,
    pub pair: QuantumPair,
    /// Physical energy, equal to `E_{n,m}` of the source pair.
    pub energy: f64,
    /// `-[(k-n)^2 + (k-m)^2 + 2 eps (2k-n-m)]`
    pub scaled_energy: f64,
    /// `r_{n,m}` of the source pair.
    pub r_value: f64,
    /// Squared norm of the unnormalised image, see [`qplus_norm_sq`].
    pub norm_sq: f64,
    pub image: Arc<QPlusImage>,
    pub field: ScalarField2D,
}

/// Normalised partner basis in increasing energy.
pub fn build_nu_basis(params: &MorseParams) -> Result<Vec<NuState>> {
    if params.k < 2 {
        return Err(Error::EmptyBasis { k: params.k });
    }
    admissible_partner_pairs(params)
        .into_iter()
        .enumerate()
        .map(|(index, pair)| {
            let norm_sq = qplus_norm_sq(params, pair);
            let image = Arc::new(QPlusImage::new(params, pair, 1.0 / norm_sq.sqrt())?);
            Ok(NuState {
                index,
                pair,
                energy: energy(params, pair),
                scaled_energy: scaled_spectrum(params, pair),
                r_value: r_eigenvalue(params, pair),
                norm_sq,
                field: ScalarField2D::new(image.clone()),
                image,
            })
        })
        .collect()
}
