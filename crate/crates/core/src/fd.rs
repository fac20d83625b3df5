//! Finite-difference Hamiltonian residuals on uniform grids.
//!
//! Used only as an independent check: the states are built analytically and
//! the residual `||(H - E) psi|| / ||psi||` measures how well a grid
//! discretisation of `H` agrees with that construction.

use crate::error::{Error, Result};
use crate::field::ScalarField2D;
use crate::morse::MorseParams;

/// One-sided weights `w_1..w_r` of the central second-derivative stencil
/// of the given order; the centre weight is `-2 sum w_i`.
fn stencil(order: usize) -> Result<&'static [f64]> {
    Ok(match order {
        2 => &[1.0],
        4 => &[4.0 / 3.0, -1.0 / 12.0],
        6 => &[3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
        8 => &[8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0],
        _ => return Err(Error::Domain(format!("stencil order must be 2, 4, 6 or 8, got {order}"))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// `||(H - E) psi|| / ||psi||` over the included points.
    pub relative: f64,
    /// `<psi|H psi> / <psi|psi>` with the discrete `H`.
    pub rayleigh: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub bounds: [f64; 4],
    /// Nodes per axis, endpoints included.
    pub n: usize,
    pub order: usize,
    /// Points with `|x - y|` below this are skipped.
    pub exclude_band: f64,
}

/// Residual of `-1/2 Laplacian + potential - energy` applied to `field`.
///
/// Only points whose full stencil lies inside the grid are used.
pub fn hamiltonian_residual(
    field: &ScalarField2D,
    potential: impl Fn(f64, f64) -> f64,
    energy: f64,
    spec: ResidualGrid,
) -> Result<Residual> {
    let w = stencil(spec.order)?;
    let r = w.len();
    let [x0, x1, y0, y1] = spec.bounds;
    if spec.n < 2 * r + 1 {
        return Err(Error::Domain(format!("grid of {} points is too small for order {}", spec.n, spec.order)));
    }
    let n = spec.n;
    let (hx, hy) = ((x1 - x0) / (n - 1) as f64, (y1 - y0) / (n - 1) as f64);
    let xs: Vec<f64> = (0..n).map(|i| x0 + i as f64 * hx).collect();
    let ys: Vec<f64> = (0..n).map(|j| y0 + j as f64 * hy).collect();
    let g = field.tabulate(&xs, &ys, false);
    let centre = -2.0 * w.iter().sum::<f64>();

    let (mut res2, mut norm2, mut quad, mut points) = (0.0, 0.0, 0.0, 0);
    for j in r..n - r {
        for i in r..n - r {
            let (x, y) = (xs[i], ys[j]);
            if (x - y).abs() < spec.exclude_band {
                continue;
            }
            let psi = g.at(i, j);
            let mut dxx = psi * centre;
            let mut dyy = psi * centre;
            for (s, ws) in w.iter().enumerate().map(|(s, ws)| (s + 1, ws)) {
                dxx += (g.at(i + s, j) + g.at(i - s, j)) * *ws;
                dyy += (g.at(i, j + s) + g.at(i, j - s)) * *ws;
            }
            let h_psi = -0.5 * (dxx / (hx * hx) + dyy / (hy * hy)) + psi * potential(x, y);
            res2 += (h_psi - psi * energy).norm_sqr();
            norm2 += psi.norm_sqr();
            quad += (psi.conj() * h_psi).re;
            points += 1;
        }
    }
    Ok(Residual {
        relative: (res2 / norm2).sqrt(),
        rayleigh: quad / norm2,
        points,
    })
}

/// `V(x) + V(y)`.
pub fn morse_potential_2d(params: &MorseParams) -> impl Fn(f64, f64) -> f64 + '_ {
    move |x, y| params.potential(x) + params.potential(y)
}

/// `V(x) + V(y) + 1 / (2 sinh^2((x - y)/2))`.
pub fn partner_potential(params: &MorseParams) -> impl Fn(f64, f64) -> f64 + '_ {
    move |x, y| {
        let s = (0.5 * (x - y)).sinh();
        params.potential(x) + params.potential(y) + 0.5 / (s * s)
    }
}

/// Second-order finite-difference eigenvalue of the 1D Morse Hamiltonian
/// nearest to `guess`, by inverse iteration on the tridiagonal matrix.
pub fn morse_level_1d(params: &MorseParams, bounds: [f64; 2], n: usize, guess: f64) -> f64 {
    let h = (bounds[1] - bounds[0]) / (n + 1) as f64;
    let off = -0.5 / (h * h);
    let diag: Vec<f64> = (1..=n)
        .map(|i| 1.0 / (h * h) + params.potential(bounds[0] + i as f64 * h) - guess)
        .collect();
    let solve = |rhs: &[f64]| -> Vec<f64> {
        // Thomas algorithm for (H - guess) u = rhs
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        c[0] = off / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..n {
            let m = diag[i] - off * c[i - 1];
            c[i] = off / m;
            d[i] = (rhs[i] - off * d[i - 1]) / m;
        }
        let mut u = vec![0.0; n];
        u[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            u[i] = d[i] - c[i] * u[i + 1];
        }
        u
    };
    let mut v = vec![1.0; n];
    let mut mu = 0.0;
    for _ in 0..50 {
        let u = solve(&v);
        let num: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        let den: f64 = u.iter().map(|a| a * a).sum();
        let next = guess + num / den;
        let norm = den.sqrt();
        v = u.iter().map(|a| a / norm).collect();
        if (next - mu).abs() < 1e-14 * next.abs() {
            return next;
        }
        mu = next;
    }
    mu
}
