//! Run configuration: built-in defaults, overlaid by a config file
//! (`key = value` lines or a JSON manifest), overlaid by command-line flags.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::CliError;
use crate::output::FORMAT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Mu,
    Nu,
    Coherent,
}

impl Basis {
    pub fn as_str(self) -> &'static str {
        match self {
            Basis::Mu => "mu",
            Basis::Nu => "nu",
            Basis::Coherent => "coherent",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mu" => Ok(Basis::Mu),
            "nu" => Ok(Basis::Nu),
            "coherent" => Ok(Basis::Coherent),
            _ => Err(format!("basis must be mu, nu or coherent, got {s:?}")),
        }
    }
}

/// Every setting optional; layers are merged field by field.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub p: Option<f64>,
    #[serde(rename = "box")]
    pub bounds: Option<[f64; 4]>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub nodes: Option<usize>,
    pub panel_split: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Option<Format>,
    #[serde(skip)]
    pub basis: Option<Basis>,
    pub index: Option<usize>,
    pub phi: Option<f64>,
}

impl Overrides {
    /// Fields set in `top` win.
    pub fn overlay(self, top: Overrides) -> Overrides {
        Overrides {
            p: top.p.or(self.p),
            bounds: top.bounds.or(self.bounds),
            nx: top.nx.or(self.nx),
            ny: top.ny.or(self.ny),
            nodes: top.nodes.or(self.nodes),
            panel_split: top.panel_split.or(self.panel_split),
            out: top.out.or(self.out),
            format: top.format.or(self.format),
            basis: top.basis.or(self.basis),
            index: top.index.or(self.index),
            phi: top.phi.or(self.phi),
        }
    }

    pub fn from_file(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if text.trim_start().starts_with('{') {
            Self::from_manifest(&text)
        } else {
            Self::from_key_values(&text)
        }
    }

    /// A density manifest written by this tool. `normalization` is an output
    /// and is ignored; `format_version` must match.
    pub fn from_manifest(text: &str) -> Result<Overrides, CliError> {
        #[derive(Deserialize)]
        struct Raw {
            format_version: Option<u32>,
            basis: Option<String>,
            #[allow(dead_code)]
            normalization: Option<f64>,
            #[serde(flatten)]
            rest: serde_json::Map<String, serde_json::Value>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad JSON config: {e}")))?;
        if let Some(v) = raw.format_version {
            if v != FORMAT_VERSION {
                return Err(CliError::Config(format!(
                    "manifest format_version {v} is not supported (expected {FORMAT_VERSION})"
                )));
            }
        }
        let mut o: Overrides = serde_json::from_value(serde_json::Value::Object(raw.rest))
            .map_err(|e| CliError::Config(format!("bad JSON config: {e}")))?;
        o.basis = raw.basis.map(|b| b.parse()).transpose().map_err(CliError::Config)?;
        Ok(o)
    }

    pub fn from_key_values(text: &str) -> Result<Overrides, CliError> {
        let mut o = Overrides::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Config(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "p" => o.p = Some(parse(value).map_err(bad)?),
                "box" => o.bounds = Some(parse_box(value).map_err(bad)?),
                "nx" => o.nx = Some(parse(value).map_err(bad)?),
                "ny" => o.ny = Some(parse(value).map_err(bad)?),
                "nodes" => o.nodes = Some(parse(value).map_err(bad)?),
                "panel_split" => o.panel_split = Some(parse(value).map_err(bad)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.format = Some(value.parse().map_err(bad)?),
                "basis" => o.basis = Some(value.parse().map_err(bad)?),
                "index" => o.index = Some(parse(value).map_err(bad)?),
                "phi" => o.phi = Some(parse(value).map_err(bad)?),
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        Ok(o)
    }
}

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse().map_err(|e| format!("cannot parse {s:?}: {e}"))
}

/// `x0,x1,y0,y1`, optionally bracketed.
pub fn parse_box(s: &str) -> Result<[f64; 4], String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let v: Vec<f64> = inner.split(',').map(|t| parse(t.trim())).collect::<Result<_, _>>()?;
    <[f64; 4]>::try_from(v).map_err(|v| format!("box needs 4 numbers, got {}", v.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: f64,
    pub bounds: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    pub nodes: usize,
    pub panel_split: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub basis: Option<Basis>,
    pub index: Option<usize>,
    pub phi: Option<f64>,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<RunConfig, CliError> {
        let c = RunConfig {
            p: o.p.unwrap_or(3.0 * PI),
            bounds: o.bounds.unwrap_or([-4.0, 25.0, -4.0, 25.0]),
            nx: o.nx.unwrap_or(400),
            ny: o.ny.unwrap_or(400),
            nodes: o.nodes.unwrap_or(16),
            panel_split: o.panel_split.unwrap_or(1),
            out: o.out,
            format: o.format.unwrap_or(Format::Csv),
            basis: o.basis,
            index: o.index,
            phi: o.phi,
        };
        if !(c.p.is_finite() && c.p > 0.0) {
            return Err(CliError::Config(format!("p must be positive and finite, got {}", c.p)));
        }
        if c.nx < 2 || c.ny < 2 {
            return Err(CliError::Config(format!("nx and ny must be at least 2, got {} and {}", c.nx, c.ny)));
        }
        let [x0, x1, y0, y1] = c.bounds;
        if !(c.bounds.iter().all(|b| b.is_finite()) && x1 > x0 && y1 > y0) {
            return Err(CliError::Config(format!("box must be finite and ordered, got {:?}", c.bounds)));
        }
        if c.nodes < 2 || c.panel_split < 1 {
            return Err(CliError::Config("nodes must be >= 2 and panel_split >= 1".into()));
        }
        if c.phi.is_some_and(|phi| !phi.is_finite()) {
            return Err(CliError::Config("phi must be finite".into()));
        }
        Ok(c)
    }
}
