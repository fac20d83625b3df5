//! Command-line front end: spectra, state tables, density grids, coherent
//! coefficients, uncertainty sweeps and the verification suite, written as
//! CSV (or JSON) with fixed `%.12e` float formatting.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Suite;
use crate::config::{parse_box, Basis, Format, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "susy-morse", version, about, allow_negative_numbers = true)]
pub struct Cli {
    /// Morse parameter p (default 3π); needs k = floor(p) >= 2 for partner states
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// `key = value` file or a density manifest; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Density window x0,x1,y0,y1 (default -4,25,-4,25)
    #[arg(long = "box", global = true, value_parser = parse_box, allow_hyphen_values = true)]
    pub bounds: Option<[f64; 4]>,
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    /// Gauss-Legendre nodes per quadrature panel (default 16)
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Split every quadrature panel into this many parts (default 1)
    #[arg(long, global = true)]
    pub panel_split: Option<usize>,
    /// Output file (default stdout); density also writes a `.json` manifest beside it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or json
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordered energies of the separable (mu) and partner (nu) bases
    Spectrum,
    /// Detailed table of one basis: mixing coefficients, or r and norms
    States { basis: Basis },
    /// Probability density on an nx x ny grid of cell centres
    Density {
        /// mu, nu or coherent (or from --config)
        basis: Option<Basis>,
        /// Basis index, or Phi for coherent states
        target: Option<String>,
    },
    /// Expansion coefficients of the coherent state on the nu basis
    Coherent { phi: Option<f64> },
    /// Position/momentum variances over an evenly spaced Phi sweep of `steps` points
    Uncertainty { phi_min: f64, phi_max: f64, steps: usize },
    /// Numerical checks with measured values; exits 1 if any fails
    Verify {
        #[arg(default_value = "all")]
        suite: Suite,
    },
}

fn config_for(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(path) => Overrides::from_file(path)?,
        None => Overrides::default(),
    };
    let flags = Overrides {
        p: cli.p,
        bounds: cli.bounds,
        nx: cli.nx,
        ny: cli.ny,
        nodes: cli.nodes,
        panel_split: cli.panel_split,
        out: cli.out.clone(),
        format: cli.format,
        basis: None,
        index: None,
        phi: None,
    };
    RunConfig::resolve(file.overlay(flags))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = config_for(&cli)?;
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::States { basis } => commands::states(&cfg, basis),
        Command::Density { basis, target } => commands::density(&cfg, basis, target.as_deref()),
        Command::Coherent { phi } => commands::coherent(&cfg, phi),
        Command::Uncertainty { phi_min, phi_max, steps } => commands::uncertainty(&cfg, phi_min, phi_max, steps),
        Command::Verify { suite } => commands::verify(&cfg, suite),
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("susy-morse: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn global_flags_after_the_subcommand() {
        let cli = Cli::try_parse_from(["susy-morse", "density", "nu", "3", "--box", "-3,20,-3,20", "--p", "7.5"]).unwrap();
        assert_eq!(cli.bounds, Some([-3.0, 20.0, -3.0, 20.0]));
        assert_eq!(cli.p, Some(7.5));
    }

    #[test]
    fn phi_grid_endpoints() {
        let g = commands::phi_grid(0.0, 6.0, 61).unwrap();
        assert_eq!((g.len(), g[0], g[60]), (61, 0.0, 6.0));
        assert!((g[10] - 1.0).abs() < 1e-15);
        assert_eq!(commands::phi_grid(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(commands::phi_grid(1.0, 0.0, 5).is_err());
        assert!(commands::phi_grid(0.0, 1.0, 0).is_err());
    }
}
