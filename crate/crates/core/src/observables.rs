//! Overlaps, position/momentum moments, densities and peak finding.
//!
//! Every integral is a tensor-product Gauss-Legendre sum. Fields are sampled
//! one y-panel at a time; panels are evaluated in parallel and their partial
//! sums are added in panel order, so results do not depend on thread count.

use ndarray::{s, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SampledGrid, ScalarField2D};
use crate::morse::MorseParams;
use crate::par;
use crate::quadrature::QuadratureGrid;

/// States whose quadrature norm is further than this from one are rejected
/// by the moment routines.
pub const NORM_TOLERANCE: f64 = 1e-4;

struct Block {
    ys: Vec<f64>,
    /// `w_x[i] * w_y[j]`, row-major like the samples.
    weights: Vec<f64>,
    samples: Vec<SampledGrid>,
}

fn per_panel<T, F>(grid: &QuadratureGrid, fields: &[&ScalarField2D], with_dx: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&Block) -> T + Sync + Send,
{
    let xs = &grid.x.nodes;
    par::map_indexed(grid.y.panels.len(), |panel| {
        let range = grid.y.panels[panel].clone();
        let ys = grid.y.nodes[range.clone()].to_vec();
        let weights = grid.y.weights[range]
            .iter()
            .flat_map(|wy| grid.x.weights.iter().map(move |wx| wx * wy))
            .collect();
        let samples = fields.iter().map(|fld| fld.tabulate(xs, &ys, with_dx)).collect();
        f(&Block { ys, weights, samples })
    })
}

/// `<a|b>`.
pub fn overlap(a: &ScalarField2D, b: &ScalarField2D, grid: &QuadratureGrid) -> Complex64 {
    per_panel(grid, &[a, b], false, |blk| {
        let (va, vb) = (&blk.samples[0].values, &blk.samples[1].values);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((w, a), b) in blk.weights.iter().zip(va).zip(vb) {
            acc += a.conj() * b * w;
        }
        acc
    })
    .into_iter()
    .sum()
}

/// Matrix of all pairwise overlaps `G[i][j] = <f_i|f_j>`.
pub fn gram(fields: &[ScalarField2D], grid: &QuadratureGrid) -> Array2<Complex64> {
    let refs: Vec<&ScalarField2D> = fields.iter().collect();
    let nf = fields.len();
    per_panel(grid, &refs, false, |blk| {
        let a = weighted_columns(blk, |s| &s.values);
        a.t().mapv(|z| z.conj()).dot(&a)
    })
    .into_iter()
    .fold(Array2::zeros((nf, nf)), |acc, g| acc + g)
}

/// Columns `sqrt(w) * f_k` over the nodes of one block.
fn weighted_columns(blk: &Block, pick: impl Fn(&SampledGrid) -> &Vec<Complex64>) -> Array2<Complex64> {
    let mut a = Array2::zeros((blk.weights.len(), blk.samples.len()));
    for (k, s) in blk.samples.iter().enumerate() {
        for (row, (v, w)) in pick(s).iter().zip(&blk.weights).enumerate() {
            a[[row, k]] = v * w.sqrt();
        }
    }
    a
}

/// Position and momentum moments along x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub norm: f64,
    pub mean_q: f64,
    pub mean_q2: f64,
    /// `-i <psi|d_x psi>`; the imaginary part is a quadrature error.
    pub mean_p: Complex64,
    pub mean_p2: f64,
}

impl Moments {
    pub fn var_q(&self) -> f64 {
        self.mean_q2 - self.mean_q * self.mean_q
    }

    pub fn var_p(&self) -> f64 {
        self.mean_p2 - self.mean_p.re * self.mean_p.re
    }

    pub fn variances(&self) -> Variances {
        Variances {
            var_q: self.var_q(),
            var_p: self.var_p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variances {
    pub var_q: f64,
    pub var_p: f64,
}

impl Variances {
    pub fn product(&self) -> f64 {
        self.var_q * self.var_p
    }
}

/// One row of an uncertainty sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub phi: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub product: f64,
}

impl UncertaintyReport {
    pub fn new(phi: f64, v: Variances) -> Self {
        Self {
            phi,
            var_q: v.var_q,
            var_p: v.var_p,
            product: v.product(),
        }
    }
}

fn check_norm(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        Err(Error::Normalization {
            norm,
            tolerance: NORM_TOLERANCE,
        })
    } else {
        Ok(())
    }
}

/// `<x>`, `<x^2>`, `<P_x>` and `<P_x^2> = int |d_x psi|^2`, each divided by
/// the quadrature norm.
pub fn moments_x(state: &ScalarField2D, grid: &QuadratureGrid) -> Result<Moments> {
    let xs = &grid.x.nodes;
    let parts = per_panel(grid, &[state], true, |blk| {
        let s = &blk.samples[0];
        let dx = s.dx.as_ref().expect("sampled with derivative");
        let mut acc = [0.0f64; 4];
        let mut p = Complex64::new(0.0, 0.0);
        for (idx, (v, w)) in s.values.iter().zip(&blk.weights).enumerate() {
            let x = xs[idx % xs.len()];
            let rho = v.norm_sqr() * w;
            acc[0] += rho;
            acc[1] += rho * x;
            acc[2] += rho * x * x;
            acc[3] += dx[idx].norm_sqr() * w;
            p += v.conj() * dx[idx] * w;
        }
        (acc, p)
    });
    let mut acc = [0.0f64; 4];
    let mut p = Complex64::new(0.0, 0.0);
    for (a, q) in parts {
        for (t, v) in acc.iter_mut().zip(a) {
            *t += v;
        }
        p += q;
    }
    let norm = acc[0];
    check_norm(norm)?;
    Ok(Moments {
        norm,
        mean_q: acc[1] / norm,
        mean_q2: acc[2] / norm,
        mean_p: Complex64::new(0.0, -1.0) * p / norm,
        mean_p2: acc[3] / norm,
    })
}

pub fn variance_product(state: &ScalarField2D, grid: &QuadratureGrid) -> Result<Variances> {
    Ok(moments_x(state, grid)?.variances())
}

/// `<f|H~|f> / <f|f>` for a field symmetric under `x <-> y`.
///
/// The y kinetic term equals the x one by symmetry, and the singular
/// potential `1/(2 sinh^2((x-y)/2))` is integrable because the partner
/// states vanish quadratically on the diagonal.
pub fn partner_energy_symmetric(field: &ScalarField2D, params: &MorseParams, grid: &QuadratureGrid) -> f64 {
    let xs = &grid.x.nodes;
    let vx: Vec<f64> = xs.iter().map(|&x| params.potential(x)).collect();
    let (norm, h) = per_panel(grid, &[field], true, |blk| {
        let s = &blk.samples[0];
        let dx = s.dx.as_ref().expect("sampled with derivative");
        let (mut norm, mut h) = (0.0, 0.0);
        for (idx, (v, w)) in s.values.iter().zip(&blk.weights).enumerate() {
            let (i, j) = (idx % xs.len(), idx / xs.len());
            let y = blk.ys[j];
            let sh = (0.5 * (xs[i] - y)).sinh();
            let pot = vx[i] + params.potential(y) + 0.5 / (sh * sh);
            let rho = v.norm_sqr();
            norm += w * rho;
            h += w * (dx[idx].norm_sqr() + pot * rho);
        }
        (norm, h)
    })
    .into_iter()
    .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    h / norm
}

/// Matrix elements of `1`, `x`, `x^2`, `d_x` and `d_x^T d_x` in a real basis.
///
/// With these, moments of any superposition `sum_k c_k f_k` cost a few small
/// matrix-vector products instead of a fresh 2D quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrices {
    pub gram: Array2<f64>,
    pub x: Array2<f64>,
    pub x2: Array2<f64>,
    /// `<f_i|d_x f_j>`
    pub d: Array2<f64>,
    /// `<d_x f_i|d_x f_j>`
    pub dd: Array2<f64>,
}

impl BasisMatrices {
    /// Fields must be real-valued; imaginary parts are ignored.
    pub fn new(fields: &[ScalarField2D], grid: &QuadratureGrid) -> Self {
        let refs: Vec<&ScalarField2D> = fields.iter().collect();
        let nf = fields.len();
        let xs = &grid.x.nodes;
        let zero = || Array2::<f64>::zeros((nf, nf));
        let blocks = per_panel(grid, &refs, true, |blk| {
            let npts = blk.weights.len();
            let mut a = Array2::<f64>::zeros((npts, nf));
            let mut ax = Array2::<f64>::zeros((npts, nf));
            let mut b = Array2::<f64>::zeros((npts, nf));
            for (k, smp) in blk.samples.iter().enumerate() {
                let dx = smp.dx.as_ref().expect("sampled with derivative");
                for row in 0..npts {
                    let sw = blk.weights[row].sqrt();
                    let x = xs[row % xs.len()];
                    a[[row, k]] = smp.values[row].re * sw;
                    ax[[row, k]] = smp.values[row].re * sw * x;
                    b[[row, k]] = dx[row].re * sw;
                }
            }
            [a.t().dot(&a), a.t().dot(&ax), ax.t().dot(&ax), a.t().dot(&b), b.t().dot(&b)]
        });
        let mut out = [zero(), zero(), zero(), zero(), zero()];
        for blk in blocks {
            for (acc, m) in out.iter_mut().zip(blk) {
                *acc += &m;
            }
        }
        let [gram, x, x2, d, dd] = out;
        Self { gram, x, x2, d, dd }
    }

    pub fn len(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Moments of `sum_k c_k f_k`; `c` may be shorter than the basis.
    pub fn moments(&self, c: &[Complex64]) -> Result<Moments> {
        let n = c.len().min(self.len());
        let form = |m: &Array2<f64>| -> Complex64 {
            let m = m.slice(s![..n, ..n]);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    acc += c[i].conj() * c[j] * m[[i, j]];
                }
            }
            acc
        };
        let norm = form(&self.gram).re;
        check_norm(norm)?;
        Ok(Moments {
            norm,
            mean_q: form(&self.x).re / norm,
            mean_q2: form(&self.x2).re / norm,
            mean_p: Complex64::new(0.0, -1.0) * form(&self.d) / norm,
            mean_p2: form(&self.dd).re / norm,
        })
    }
}

/// `|psi|^2` at cell centres of a rectangular box, rows indexed by y.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub density: Vec<f64>,
    pub cell_area: f64,
}

impl DensityGrid {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.density[j * self.xs.len() + i]
    }

    /// Riemann sum of the density over the box.
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.cell_area
    }

    pub fn max(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }
}

/// Samples `|state|^2` at cell centres of `[x0, x1] x [y0, y1]`.
///
/// When an x centre coincides with a y centre the y centres move by a
/// quarter cell, so no sample sits on the line `y = x`.
pub fn density_grid(state: &ScalarField2D, bounds: [f64; 4], nx: usize, ny: usize) -> Result<DensityGrid> {
    let [x0, x1, y0, y1] = bounds;
    if nx < 2 || ny < 2 {
        return Err(Error::Domain(format!("density grid needs at least 2x2 samples, got {nx}x{ny}")));
    }
    if !(x1 > x0 && y1 > y0) || bounds.iter().any(|b| !b.is_finite()) {
        return Err(Error::Domain(format!("box must be finite and ordered, got {bounds:?}")));
    }
    let (hx, hy) = ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64);
    let xs: Vec<f64> = (0..nx).map(|i| x0 + (i as f64 + 0.5) * hx).collect();
    let mut ys: Vec<f64> = (0..ny).map(|j| y0 + (j as f64 + 0.5) * hy).collect();
    let hits_diagonal = |ys: &[f64]| ys.iter().any(|y| xs.iter().any(|x| (x - y).abs() < 1e-12 * (1.0 + y.abs())));
    if hits_diagonal(&ys) {
        for y in &mut ys {
            *y += 0.25 * hy;
        }
    }
    let grid = state.tabulate(&xs, &ys, false);
    Ok(DensityGrid {
        density: grid.values.iter().map(|v| v.norm_sqr()).collect(),
        xs,
        ys,
        cell_area: hx * hy,
    })
}

/// Largest `|state(t, t)|^2` over `samples` points of `[t0, t1]`.
pub fn diagonal_max_density(state: &ScalarField2D, t0: f64, t1: f64, samples: usize) -> f64 {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
            state.value(t, t).norm_sqr()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    pub density: f64,
}

/// Maximise `|state|^2` from `(x, y)` by compass search.
fn refine_peak(state: &ScalarField2D, x: f64, y: f64, step: f64) -> Peak {
    let rho = |x: f64, y: f64| state.value(x, y).norm_sqr();
    let (mut x, mut y, mut best, mut h) = (x, y, rho(x, y), step);
    while h > 1e-10 {
        let mut moved = false;
        for (dx, dy) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            let v = rho(x + dx, y + dy);
            if v > best {
                (x, y, best, moved) = (x + dx, y + dy, v, true);
                break;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    Peak { x, y, density: best }
}

/// Global maxima of `|state|^2`: grid local maxima above half the grid
/// maximum are refined, merged, and kept if within `rel_tol` of the best.
pub fn global_maxima(state: &ScalarField2D, grid: &DensityGrid, rel_tol: f64) -> Vec<Peak> {
    let (nx, ny) = (grid.xs.len(), grid.ys.len());
    let cut = 0.5 * grid.max();
    let step = (grid.xs[1] - grid.xs[0]).max(grid.ys[1] - grid.ys[0]);
    let mut peaks: Vec<Peak> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let v = grid.at(i, j);
            if v < cut {
                continue;
            }
            let is_max = (j.saturating_sub(1)..(j + 2).min(ny))
                .flat_map(|jj| (i.saturating_sub(1)..(i + 2).min(nx)).map(move |ii| (ii, jj)))
                .all(|(ii, jj)| (ii, jj) == (i, j) || grid.at(ii, jj) <= v);
            if !is_max {
                continue;
            }
            let p = refine_peak(state, grid.xs[i], grid.ys[j], step);
            if !peaks.iter().any(|q| (q.x - p.x).hypot(q.y - p.y) < 1e-6) {
                peaks.push(p);
            }
        }
    }
    let best = peaks.iter().map(|p| p.density).fold(0.0, f64::max);
    peaks.retain(|p| p.density >= (1.0 - rel_tol) * best);
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::{psi1d, psi1d_dx, psi2d, QuantumPair};
    use crate::quadrature::QuadratureOptions;
    use crate::susy::build_nu_basis;
    use std::f64::consts::PI;

    fn setup() -> (MorseParams, QuadratureGrid) {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let grid = QuadratureGrid::for_params(&mp, QuadratureOptions::default());
        (mp, grid)
    }

    #[test]
    fn ground_state_overlap_is_one() {
        let (mp, grid) = setup();
        let psi = psi2d(&mp, QuantumPair::new(0, 0)).unwrap();
        let o = overlap(&psi, &psi, &grid);
        assert!((o.re - 1.0).abs() < 1e-10 && o.im == 0.0, "{o}");
    }

    #[test]
    fn ground_state_uncertainty_matches_1d_oracle() {
        let (mp, grid) = setup();
        let psi = psi2d(&mp, QuantumPair::new(0, 0)).unwrap();
        let m = moments_x(&psi, &grid).unwrap();
        // 1D trapezoid oracle on a fine uniform grid
        let (a, b, n) = (-4.0, 40.0, 200_000);
        let h = (b - a) / n as f64;
        let (mut q, mut q2, mut p2) = (0.0, 0.0, 0.0);
        for i in 0..=n {
            let x = a + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            let f = psi1d(&mp, 0, x).unwrap();
            let d = psi1d_dx(&mp, 0, x).unwrap();
            q += w * x * f * f;
            q2 += w * x * x * f * f;
            p2 += w * d * d;
        }
        let oracle = (q2 - q * q) * p2;
        let v = m.variances();
        assert!((v.product() - oracle).abs() < 1e-8 * oracle, "{} vs {oracle}", v.product());
        assert!(v.product() > 0.25);
        assert!(m.mean_p.norm() < 1e-8);
    }

    #[test]
    fn unnormalised_state_is_rejected() {
        let (mp, grid) = setup();
        let img = crate::susy::apply_qplus(&mp, QuantumPair::new(3, 0)).unwrap();
        assert!(matches!(moments_x(&img, &grid), Err(Error::Normalization { .. })));
    }

    #[test]
    fn basis_matrices_agree_with_direct_moments() {
        let (mp, grid) = setup();
        let basis = build_nu_basis(&mp).unwrap();
        let fields: Vec<_> = basis[..4].iter().map(|b| b.field.clone()).collect();
        let mats = BasisMatrices::new(&fields, &grid);
        let c = [0.6, 0.48, 0.0, 0.64].map(|v| Complex64::new(v, 0.0));
        let sup = ScalarField2D::from(crate::field::Superposition::new(
            c.iter().zip(&fields).map(|(c, f)| (*c, f.clone())).collect(),
        ));
        let direct = moments_x(&sup, &grid).unwrap();
        let via = mats.moments(&c).unwrap();
        for (a, b) in [
            (direct.norm, via.norm),
            (direct.mean_q, via.mean_q),
            (direct.mean_q2, via.mean_q2),
            (direct.mean_p2, via.mean_p2),
        ] {
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{a} vs {b}");
        }
        assert!((direct.mean_p - via.mean_p).norm() < 1e-9);
    }

    #[test]
    fn partner_energy_equals_source_energy() {
        let (mp, grid) = setup();
        let basis = build_nu_basis(&mp).unwrap();
        for nu in [&basis[0], &basis[20]] {
            let e = partner_energy_symmetric(&nu.field, &mp, &grid);
            assert!((e - nu.energy).abs() < 1e-8 * nu.energy.abs(), "{}: {e} vs {}", nu.pair, nu.energy);
        }
    }

    #[test]
    fn density_grid_avoids_diagonal_and_captures_mass() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let psi = psi2d(&mp, QuantumPair::new(0, 0)).unwrap();
        let g = density_grid(&psi, [-4.0, 25.0, -4.0, 25.0], 400, 400).unwrap();
        assert!(g.xs.iter().all(|x| g.ys.iter().all(|y| x != y)));
        assert!((g.mass() - 1.0).abs() < 1e-3, "{}", g.mass());
        let peaks = global_maxima(&psi, &g, 1e-9);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].x - peaks[0].y).abs() < 1e-6);
        assert!(density_grid(&psi, [1.0, 0.0, 0.0, 1.0], 10, 10).is_err());
        assert!(density_grid(&psi, [0.0, 1.0, 0.0, 1.0], 1, 10).is_err());
    }
}
