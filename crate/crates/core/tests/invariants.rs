//! Cross-module invariants at p = 3π, checked by quadrature and finite
//! differences against the analytic constructions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use susy_morse::coherent::coherent_state;
use susy_morse::fd::{hamiltonian_residual, morse_potential_2d, ResidualGrid};
use susy_morse::observables::{density_grid, gram, moments_x, overlap, BasisMatrices};
use susy_morse::quadrature::{QuadratureGrid, QuadratureOptions};
use susy_morse::susy::{apply_qplus, build_nu_basis, qplus_norm_sq, NuState};
use susy_morse::{energy, psi2d, MorseParams, QuantumPair, ScalarField2D};

struct Setup {
    params: MorseParams,
    grid: QuadratureGrid,
    nu: Vec<NuState>,
    mats: BasisMatrices,
}

fn setup() -> &'static Setup {
    static SETUP: OnceLock<Setup> = OnceLock::new();
    SETUP.get_or_init(|| {
        let params = MorseParams::new(3.0 * PI).unwrap();
        let grid = QuadratureGrid::for_params(&params, QuadratureOptions::default());
        let nu = build_nu_basis(&params).unwrap();
        let fields: Vec<ScalarField2D> = nu.iter().map(|s| s.field.clone()).collect();
        let mats = BasisMatrices::new(&fields, &grid);
        Setup { params, grid, nu, mats }
    })
}

fn all_pairs(k: usize) -> Vec<QuantumPair> {
    (0..=k).flat_map(|n| (0..=k).map(move |m| QuantumPair::new(n, m))).collect()
}

#[test]
fn separable_states_are_orthonormal() {
    let s = setup();
    let fields: Vec<ScalarField2D> = all_pairs(s.params.k).into_iter().map(|q| psi2d(&s.params, q).unwrap()).collect();
    let g = gram(&fields, &s.grid);
    for ((i, j), v) in g.indexed_iter() {
        let target = if i == j { 1.0 } else { 0.0 };
        assert!((v - target).norm() < 1e-8, "G[{i}][{j}] = {v}");
    }
}

#[test]
fn separable_states_satisfy_the_discrete_eigenproblem() {
    let s = setup();
    let spec = ResidualGrid {
        bounds: [-4.0, 25.0, -4.0, 25.0],
        n: 512,
        order: 8,
        exclude_band: 0.0,
    };
    for q in all_pairs(s.params.k) {
        let psi = psi2d(&s.params, q).unwrap();
        let r = hamiltonian_residual(&psi, morse_potential_2d(&s.params), energy(&s.params, q), spec).unwrap();
        assert!(r.relative <= 1e-4, "{q}: {}", r.relative);
    }
}

#[test]
fn second_order_residual_converges_quadratically() {
    let s = setup();
    let q = QuantumPair::new(9, 7);
    let psi = psi2d(&s.params, q).unwrap();
    let run = |n| {
        let spec = ResidualGrid {
            bounds: [-4.0, 25.0, -4.0, 25.0],
            n,
            order: 2,
            exclude_band: 0.0,
        };
        hamiltonian_residual(&psi, morse_potential_2d(&s.params), energy(&s.params, q), spec)
            .unwrap()
            .relative
    };
    let (a, b) = (run(1024), run(2047));
    assert!((a / b - 4.0).abs() < 0.2, "{a} {b}");
}

#[test]
fn partner_norms_match_the_operator_norm() {
    let s = setup();
    for nu in &s.nu {
        let img = apply_qplus(&s.params, nu.pair).unwrap();
        let n2 = overlap(&img, &img, &s.grid).re;
        let expected = qplus_norm_sq(&s.params, nu.pair);
        assert!((n2 - expected).abs() <= 1e-5 * expected, "{}: {n2} vs {expected}", nu.pair);
        assert_eq!(nu.norm_sq, expected);
    }
    for m in 0..s.params.k {
        let img = apply_qplus(&s.params, QuantumPair::new(m + 1, m)).unwrap();
        assert!(overlap(&img, &img, &s.grid).re.sqrt() < 1e-6);
    }
}

#[test]
fn overlaps_are_stable_under_panel_doubling() {
    let s = setup();
    let fine = QuadratureGrid::for_params(&s.params, QuadratureOptions { nodes_per_panel: 16, refine: 2 });
    let fields: Vec<ScalarField2D> = s.nu.iter().map(|n| n.field.clone()).collect();
    let (a, b) = (gram(&fields, &s.grid), gram(&fields, &fine));
    let worst = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn every_partner_state_exceeds_the_heisenberg_bound() {
    let s = setup();
    for (j, nu) in s.nu.iter().enumerate() {
        let mut c = vec![Complex64::new(0.0, 0.0); s.nu.len()];
        c[j] = Complex64::new(1.0, 0.0);
        let m = s.mats.moments(&c).unwrap();
        assert!(m.variances().product() > 0.25, "{}: {}", nu.pair, m.variances().product());
        assert!(m.mean_p.norm() < 1e-8);
    }
}

#[test]
fn coherent_states_by_direct_quadrature() {
    let s = setup();
    for phi in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let cs = coherent_state(&s.nu, Complex64::new(phi, 0.0)).unwrap();
        let norm = overlap(&cs.field, &cs.field, &s.grid).re;
        assert!((norm - 1.0).abs() < 1e-8, "Phi={phi}: {norm}");
        let direct = moments_x(&cs.field, &s.grid).unwrap();
        let via = s.mats.moments(&cs.amplitudes).unwrap();
        assert!(direct.mean_p.im.abs() < 1e-10, "Phi={phi}: {}", direct.mean_p);
        assert!(direct.variances().product() > 0.25);
        assert!((direct.var_q() - via.var_q()).abs() < 1e-10);
        assert!((direct.var_p() - via.var_p()).abs() < 1e-8);
    }
}

#[test]
fn zero_phi_row_equals_ground_partner_moments() {
    let s = setup();
    let cs = coherent_state(&s.nu, Complex64::new(0.0, 0.0)).unwrap();
    let a = moments_x(&cs.field, &s.grid).unwrap();
    let b = moments_x(&s.nu[0].field, &s.grid).unwrap();
    assert_eq!(a, b);
}

// Sub-shot-noise position variance holds for small and moderate Phi only;
// by Phi = 5 the weight has moved to wide excited states and varQ ~ 0.77.
#[test]
fn position_squeezing_window() {
    let s = setup();
    let var_q = |phi: f64| {
        let cs = coherent_state(&s.nu, Complex64::new(phi, 0.0)).unwrap();
        s.mats.moments(&cs.amplitudes).unwrap().variances()
    };
    for phi in [0.0, 1.0, 2.0, 4.0] {
        let v = var_q(phi);
        assert!(v.var_q < 0.5 && v.var_p > 0.5, "Phi={phi}: {v:?}");
    }
    let v = var_q(5.0);
    assert!(v.var_q > 0.5 && v.var_q < 1.0, "{v:?}");
}

#[test]
fn y_variance_equals_x_variance_for_symmetric_states() {
    let s = setup();
    let cs = coherent_state(&s.nu, Complex64::new(2.0, 0.0)).unwrap();
    for field in [&s.nu[7].field, &cs.field] {
        let g = field.tabulate(&s.grid.x.nodes, &s.grid.y.nodes, false);
        let (mut n, mut mx, mut mx2, mut my, mut my2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (j, (y, wy)) in s.grid.y.nodes.iter().zip(&s.grid.y.weights).enumerate() {
            for (i, (x, wx)) in s.grid.x.nodes.iter().zip(&s.grid.x.weights).enumerate() {
                let rho = g.at(i, j).norm_sqr() * wx * wy;
                n += rho;
                mx += rho * x;
                mx2 += rho * x * x;
                my += rho * y;
                my2 += rho * y * y;
            }
        }
        let vx = mx2 / n - (mx / n).powi(2);
        let vy = my2 / n - (my / n).powi(2);
        assert!((vx - vy).abs() < 1e-9 * vx, "{vx} {vy}");
    }
}

#[test]
fn coherent_field_is_symmetric_and_vanishes_on_the_diagonal() {
    let s = setup();
    let cs = coherent_state(&s.nu, Complex64::new(5.0, 0.0)).unwrap();
    for &(x, y) in &[(0.2, 1.3), (-0.7, 0.4), (2.2, 0.9)] {
        let (a, b) = (cs.field.value(x, y), cs.field.value(y, x));
        assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
    }
    for t in [-1.0, 0.0, 0.5, 1.5, 4.0] {
        assert!(cs.field.value(t, t).norm_sqr() < 1e-20);
    }
}

#[test]
fn density_grids_capture_the_state() {
    let s = setup();
    let cs = coherent_state(&s.nu, Complex64::new(5.0, 0.0)).unwrap();
    for field in [&s.nu[15].field, &cs.field] {
        let g = density_grid(field, [-4.0, 25.0, -4.0, 25.0], 400, 400).unwrap();
        assert!((g.mass() - 1.0).abs() < 1e-3, "{}", g.mass());
        assert!(g.xs.iter().all(|x| !g.ys.contains(x)));
    }
}
