use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;
use susy_morse::fd::{hamiltonian_residual, morse_potential_2d, partner_potential, ResidualGrid};
use susy_morse::{
    build_mu_basis, build_nu_basis, coherent_state, density_grid, energy, gram, overlap, psi2d, qplus_norm_sq,
    r_eigenvalue, scaled_spectrum, BasisMatrices, LadderSpec, MorseParams, NuState, QuadratureGrid,
    QuadratureOptions, QuantumPair, ScalarField2D, SpectrumTable, UncertaintyReport,
};

use crate::config::{Basis, Format, RunConfig};
use crate::error::CliError;
use crate::output::{sci, sidecar_path, CsvWriter, Field, Manifest, FORMAT_VERSION};

fn antisymmetric() -> (Complex64, Complex64) {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    (Complex64::new(a, 0.0), Complex64::new(-a, 0.0))
}

fn mu_table(params: &MorseParams) -> Result<SpectrumTable, CliError> {
    let (g1, g2) = antisymmetric();
    Ok(build_mu_basis(params, g1, g2)?)
}

fn warn_if_no_partner(params: &MorseParams) -> bool {
    if params.eps == 0.0 {
        eprintln!("warning: p = {} is an integer; level n = k has zero energy and is not a bound state", params.p);
    }
    if params.k < 2 {
        eprintln!(
            "warning: p = {} gives k = {}; the partner Hamiltonian has no bound states (needs k >= 2)",
            params.p, params.k
        );
        return true;
    }
    false
}

/// ν basis, empty (with a warning) when `k < 2`.
fn nu_basis(params: &MorseParams) -> Result<Vec<NuState>, CliError> {
    if warn_if_no_partner(params) {
        return Ok(Vec::new());
    }
    Ok(build_nu_basis(params)?)
}

fn quadrature(cfg: &RunConfig, params: &MorseParams) -> QuadratureGrid {
    let options = QuadratureOptions {
        nodes_per_panel: cfg.nodes,
        refine: cfg.panel_split,
    };
    QuadratureGrid::for_params(params, options)
}

fn open_out(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Runtime(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(cfg: &RunConfig, value: &serde_json::Value) -> Result<(), CliError> {
    let mut out = open_out(cfg)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let params = MorseParams::new(cfg.p)?;
    let table = mu_table(&params)?;
    warn_if_no_partner(&params);
    let nu = &table.partner_pairs;
    match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(open_out(cfg)?, &["basis", "index", "n", "m", "energy", "scaled_energy"])?;
            for s in &table.mu {
                w.row(&[
                    Field::Text("mu"),
                    Field::Int(s.index),
                    Field::Int(s.pair.n),
                    Field::Int(s.pair.m),
                    Field::Real(s.energy),
                    Field::Real(scaled_spectrum(&params, s.pair)),
                ])?;
            }
            for (j, &pair) in nu.iter().enumerate() {
                w.row(&[
                    Field::Text("nu"),
                    Field::Int(j),
                    Field::Int(pair.n),
                    Field::Int(pair.m),
                    Field::Real(energy(&params, pair)),
                    Field::Real(scaled_spectrum(&params, pair)),
                ])?;
            }
            w.finish()?;
        }
        Format::Json => {
            let mu: Vec<_> = table
                .mu
                .iter()
                .map(|s| {
                    json!({"index": s.index, "n": s.pair.n, "m": s.pair.m, "kind": s.kind.as_str(),
                           "energy": s.energy, "scaled_energy": scaled_spectrum(&params, s.pair)})
                })
                .collect();
            let nu: Vec<_> = nu
                .iter()
                .enumerate()
                .map(|(j, &q)| {
                    json!({"index": j, "n": q.n, "m": q.m, "energy": energy(&params, q),
                           "scaled_energy": scaled_spectrum(&params, q)})
                })
                .collect();
            let c = table.counts;
            write_json(
                cfg,
                &json!({"p": params.p, "k": params.k, "eps": params.eps,
                        "counts": {"mu": c.initial, "nu": c.partner, "missing": c.missing},
                        "mu": mu, "nu": nu, "format_version": FORMAT_VERSION}),
            )?;
        }
    }
    Ok(())
}

pub fn states(cfg: &RunConfig, basis: Basis) -> Result<(), CliError> {
    let params = MorseParams::new(cfg.p)?;
    match basis {
        Basis::Mu => {
            let table = mu_table(&params)?;
            let header = ["index", "n", "m", "kind", "gamma1_re", "gamma1_im", "gamma2_re", "gamma2_im", "energy", "scaled_energy"];
            let rows: Vec<serde_json::Value> = table
                .mu
                .iter()
                .map(|s| {
                    let (g1, g2) = match s.kind {
                        susy_morse::MuKind::Diagonal => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
                        susy_morse::MuKind::Mixed => (s.gamma1, s.gamma2),
                    };
                    json!([s.index, s.pair.n, s.pair.m, s.kind.as_str(), g1.re, g1.im, g2.re, g2.im,
                           s.energy, scaled_spectrum(&params, s.pair)])
                })
                .collect();
            write_table(cfg, &header, &rows)
        }
        Basis::Nu => {
            let nu = nu_basis(&params)?;
            let ladder = if nu.is_empty() { None } else { Some(LadderSpec::from_basis(&nu)?) };
            let header = ["index", "n", "m", "energy", "scaled_energy", "r", "norm_sq", "ladder_f"];
            let rows: Vec<serde_json::Value> = nu
                .iter()
                .map(|s| {
                    let f = ladder.as_ref().map_or(0.0, |l| l.f(s.index));
                    json!([s.index, s.pair.n, s.pair.m, s.energy, s.scaled_energy, s.r_value, s.norm_sq, f])
                })
                .collect();
            write_table(cfg, &header, &rows)
        }
        Basis::Coherent => Err(CliError::Config("states lists the mu or nu basis".into())),
    }
}

/// Rows given as JSON arrays; CSV prints numbers through `sci`, JSON keys
/// each row by the header.
fn write_table(cfg: &RunConfig, header: &[&str], rows: &[serde_json::Value]) -> Result<(), CliError> {
    match cfg.format {
        Format::Csv => {
            let mut w = CsvWriter::new(open_out(cfg)?, header)?;
            for row in rows {
                let cells = row.as_array().expect("rows are arrays");
                let fields: Vec<Field> = cells
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => Field::Text(s),
                        v if v.is_u64() => Field::Int(v.as_u64().unwrap() as usize),
                        v => Field::Real(v.as_f64().unwrap_or(f64::NAN)),
                    })
                    .collect();
                w.row(&fields)?;
            }
            w.finish()?;
            Ok(())
        }
        Format::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let map = header
                        .iter()
                        .zip(row.as_array().expect("rows are arrays"))
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect();
                    serde_json::Value::Object(map)
                })
                .collect();
            write_json(cfg, &serde_json::Value::Array(objects))
        }
    }
}

pub fn density(cfg: &RunConfig, basis: Option<Basis>, target: Option<&str>) -> Result<(), CliError> {
    if cfg.format == Format::Json {
        return Err(CliError::Config("density grids are written as CSV; the manifest is the JSON part".into()));
    }
    let basis = basis
        .or(cfg.basis)
        .ok_or_else(|| CliError::Config("density needs a basis: mu, nu or coherent".into()))?;
    let params = MorseParams::new(cfg.p)?;
    let (index, phi) = match basis {
        Basis::Mu | Basis::Nu => {
            let index = match target {
                Some(t) => t
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("{basis} index must be a non-negative integer, got {t:?}")))?,
                None => cfg.index.ok_or_else(|| CliError::Config(format!("density {basis} needs an index")))?,
            };
            (Some(index), None)
        }
        Basis::Coherent => {
            let phi = match target {
                Some(t) => t
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Config(format!("Phi must be a finite real, got {t:?}")))?,
                None => cfg.phi.ok_or_else(|| CliError::Config("density coherent needs Phi".into()))?,
            };
            (None, Some(phi))
        }
    };
    let field: ScalarField2D = match (basis, index, phi) {
        (Basis::Mu, Some(i), _) => {
            let table = mu_table(&params)?;
            let len = table.mu.len();
            table
                .mu
                .get(i)
                .ok_or_else(|| CliError::Index(format!("mu index {i}, basis has {len} states")))?
                .field(&params)
        }
        (Basis::Nu, Some(i), _) => {
            let len = susy_morse::admissible_partner_pairs(&params).len();
            if i >= len {
                return Err(CliError::Index(format!("nu index {i}, basis has {len} states")));
            }
            build_nu_basis(&params)?.swap_remove(i).field
        }
        (Basis::Coherent, _, Some(phi)) => {
            let nu = nu_basis(&params)?;
            if nu.is_empty() {
                return Err(CliError::Index("coherent states need a non-empty nu basis".into()));
            }
            coherent_state(&nu, Complex64::new(phi, 0.0))?.field
        }
        _ => unreachable!("target resolved above"),
    };
    let grid = density_grid(&field, cfg.bounds, cfg.nx, cfg.ny)?;

    let mut w = CsvWriter::new(open_out(cfg)?, &["x", "y", "density"])?;
    for (j, &y) in grid.ys.iter().enumerate() {
        for (i, &x) in grid.xs.iter().enumerate() {
            w.row(&[Field::Real(x), Field::Real(y), Field::Real(grid.at(i, j))])?;
        }
    }
    w.finish()?;

    let manifest = Manifest {
        p: cfg.p,
        basis: basis.to_string(),
        index,
        phi,
        bounds: cfg.bounds,
        nx: cfg.nx,
        ny: cfg.ny,
        normalization: grid.mass(),
        format_version: FORMAT_VERSION,
    };
    match &cfg.out {
        Some(out) => std::fs::write(sidecar_path(out), manifest.to_json())?,
        None => eprint!("{}", manifest.to_json()),
    }
    Ok(())
}

pub fn coherent(cfg: &RunConfig, phi: Option<f64>) -> Result<(), CliError> {
    let phi = phi
        .or(cfg.phi)
        .ok_or_else(|| CliError::Config("coherent needs Phi".into()))?;
    if !phi.is_finite() {
        return Err(CliError::Config(format!("Phi must be finite, got {phi}")));
    }
    let params = MorseParams::new(cfg.p)?;
    let nu = nu_basis(&params)?;
    if nu.is_empty() {
        return Err(CliError::Index("coherent states need a non-empty nu basis".into()));
    }
    let cs = coherent_state(&nu, Complex64::new(phi, 0.0))?;
    eprintln!(
        "Phi = {}: {} terms, ln N = {}, closed-form |B- Phi - Phi Phi| = {}",
        sci(phi),
        nu.len(),
        sci(cs.log_norm),
        sci(cs.closed_form_defect())
    );
    let header = ["index", "n", "m", "re", "im", "probability"];
    let rows: Vec<serde_json::Value> = nu
        .iter()
        .zip(&cs.amplitudes)
        .map(|(s, c)| json!([s.index, s.pair.n, s.pair.m, c.re, c.im, c.norm_sqr()]))
        .collect();
    write_table(cfg, &header, &rows)
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
pub fn phi_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite()) || min > max || steps < 1 {
        return Err(CliError::Config(format!(
            "need finite phi_min <= phi_max and steps >= 1, got {min} {max} {steps}"
        )));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { max } else { min + i as f64 * h }).collect())
}

pub fn uncertainty(cfg: &RunConfig, min: f64, max: f64, steps: usize) -> Result<(), CliError> {
    let phis = phi_grid(min, max, steps)?;
    let params = MorseParams::new(cfg.p)?;
    let nu = nu_basis(&params)?;
    if nu.is_empty() {
        return Err(CliError::Index("uncertainty sweeps need a non-empty nu basis".into()));
    }
    let grid = quadrature(cfg, &params);
    let fields: Vec<ScalarField2D> = nu.iter().map(|s| s.field.clone()).collect();
    let mats = BasisMatrices::new(&fields, &grid);
    let mut reports = Vec::with_capacity(phis.len());
    for &phi in &phis {
        let cs = coherent_state(&nu, Complex64::new(phi, 0.0))?;
        reports.push(UncertaintyReport::new(phi, mats.moments(&cs.amplitudes)?.variances()));
    }
    let header = ["phi", "varQ", "varP", "product"];
    let rows: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| json!([r.phi, r.var_q, r.var_p, r.product]))
        .collect();
    write_table(cfg, &header, &rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Counting,
    Orthonormality,
    Norms,
    Isospectral,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "counting" => Suite::Counting,
            "orthonormality" => Suite::Orthonormality,
            "norms" => Suite::Norms,
            "isospectral" => Suite::Isospectral,
            "all" => Suite::All,
            _ => return Err(format!("suite must be counting, orthonormality, norms, isospectral or all, got {s:?}")),
        })
    }
}

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, pass: bool, name: &str, detail: String) {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failures += 1;
        }
    }
}

fn max_identity_deviation<'a>(entries: impl Iterator<Item = ((usize, usize), &'a Complex64)>) -> f64 {
    entries
        .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max)
}

pub fn verify(cfg: &RunConfig, suite: Suite) -> Result<(), CliError> {
    let params = MorseParams::new(cfg.p)?;
    let runs = |s: Suite| suite == Suite::All || suite == s;
    let mut report = Report { failures: 0 };
    let k = params.k;

    if runs(Suite::Counting) {
        let c = mu_table(&params)?.counts;
        let expected = ((k + 1) * (k + 2) / 2, k * k.saturating_sub(1) / 2, 2 * k + 1);
        report.check(
            (c.initial, c.partner, c.missing) == expected,
            "counting",
            format!(
                "k = {k}: |S| = {}, |S~| = {}, missing = {} (expected {}/{}/{})",
                c.initial, c.partner, c.missing, expected.0, expected.1, expected.2
            ),
        );
    }

    let needs_quadrature = runs(Suite::Orthonormality) || runs(Suite::Norms);
    let grid = needs_quadrature.then(|| quadrature(cfg, &params));
    let needs_nu = needs_quadrature || runs(Suite::Isospectral);
    let nu = if needs_nu { nu_basis(&params)? } else { Vec::new() };

    if runs(Suite::Orthonormality) {
        let grid = grid.as_ref().expect("built above");
        let t0 = Instant::now();
        let pairs: Vec<QuantumPair> = (0..=k).flat_map(|n| (0..=k).map(move |m| QuantumPair::new(n, m))).collect();
        let products: Vec<ScalarField2D> = pairs.iter().map(|&q| psi2d(&params, q)).collect::<Result<_, _>>()?;
        let dev = max_identity_deviation(gram(&products, grid).indexed_iter());
        report.check(dev <= 1e-8, "orthonormality/products", format!("{} states, max |G - I| = {}", pairs.len(), sci(dev)));
        let mu: Vec<ScalarField2D> = mu_table(&params)?.mu.iter().map(|s| s.field(&params)).collect();
        let dev = max_identity_deviation(gram(&mu, grid).indexed_iter());
        report.check(dev <= 1e-8, "orthonormality/mu", format!("{} states, max |G - I| = {}", mu.len(), sci(dev)));
        let fields: Vec<ScalarField2D> = nu.iter().map(|s| s.field.clone()).collect();
        let dev = max_identity_deviation(gram(&fields, grid).indexed_iter());
        report.check(
            dev <= 1e-8,
            "orthonormality/nu",
            format!("{} states, max |G - I| = {}; {:.1} s", nu.len(), sci(dev), t0.elapsed().as_secs_f64()),
        );
    }

    if runs(Suite::Norms) {
        let grid = grid.as_ref().expect("built above");
        let (mut worst, mut ratio_lo, mut ratio_hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
        for s in &nu {
            let image = susy_morse::apply_qplus(&params, s.pair)?;
            let measured = overlap(&image, &image, grid).re;
            let expected = qplus_norm_sq(&params, s.pair);
            let rel = (measured - expected).abs() / expected;
            worst = worst.max(rel);
            let ratio = measured / r_eigenvalue(&params, s.pair);
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
            println!(
                "  {}: |Q+ mu|^2 = {}, expected {}, r = {}",
                s.pair,
                sci(measured),
                sci(expected),
                sci(r_eigenvalue(&params, s.pair))
            );
        }
        report.check(
            worst <= 1e-5,
            "norms",
            format!(
                "{} pairs, max relative deviation from r/2 = {}; measured/r in [{:.12}, {:.12}]",
                nu.len(),
                sci(worst),
                ratio_lo,
                ratio_hi
            ),
        );
    }

    if runs(Suite::Isospectral) {
        let t0 = Instant::now();
        let morse = ResidualGrid {
            bounds: cfg.bounds,
            n: 512,
            order: 8,
            exclude_band: 0.0,
        };
        let mut worst = 0.0f64;
        for n in 0..=k {
            for m in 0..=k {
                let q = QuantumPair::new(n, m);
                let r = hamiltonian_residual(&psi2d(&params, q)?, morse_potential_2d(&params), energy(&params, q), morse)?;
                worst = worst.max(r.relative);
            }
        }
        report.check(worst <= 1e-4, "isospectral/morse", format!("max FD residual {}", sci(worst)));
        let partner = ResidualGrid {
            exclude_band: 0.1,
            ..morse
        };
        let (mut worst, mut worst_e) = (0.0f64, 0.0f64);
        for s in &nu {
            let r = hamiltonian_residual(&s.field, partner_potential(&params), s.energy, partner)?;
            worst = worst.max(r.relative);
            worst_e = worst_e.max(((r.rayleigh - s.energy) / s.energy).abs());
        }
        report.check(
            worst <= 5e-3 && worst_e <= 1e-4,
            "isospectral/partner",
            format!(
                "{} states, max FD residual {}, max |<H~> - E|/|E| {}; {:.1} s",
                nu.len(),
                sci(worst),
                sci(worst_e),
                t0.elapsed().as_secs_f64()
            ),
        );
    }

    match report.failures {
        0 => Ok(()),
        n => Err(CliError::Verify(n)),
    }
}
