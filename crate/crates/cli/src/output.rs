//! Deterministic text output: C-style `%.12e` floats, CSV rows and the
//! density manifest.

use std::io::{self, Write};
use std::path::PathBuf;

use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

/// `x` as printf's `%.12e` would print it, e.g. `-1.234500000000e-05`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub struct CsvWriter<W: Write> {
    inner: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut inner: W, header: &[&str]) -> io::Result<Self> {
        writeln!(inner, "{}", header.join(","))?;
        Ok(CsvWriter { inner })
    }

    pub fn row(&mut self, fields: &[Field]) -> io::Result<()> {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.inner.write_all(b",")?;
            }
            match f {
                Field::Int(v) => write!(self.inner, "{v}")?,
                Field::Real(v) => self.inner.write_all(sci(*v).as_bytes())?,
                Field::Text(v) => self.inner.write_all(v.as_bytes())?,
            }
        }
        self.inner.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub enum Field<'a> {
    Int(usize),
    Real(f64),
    Text(&'a str),
}

/// Sidecar for a density grid. Feeding it back through `--config`
/// reproduces the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub p: f64,
    pub basis: String,
    pub index: Option<usize>,
    pub phi: Option<f64>,
    #[serde(rename = "box")]
    pub bounds: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    /// Riemann sum of the density over the box.
    pub normalization: f64,
    pub format_version: u32,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Where the manifest for a CSV at `out` goes.
pub fn sidecar_path(out: &std::path::Path) -> PathBuf {
    out.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(sci(0.0), "0.000000000000e+00");
        assert_eq!(sci(1.0), "1.000000000000e+00");
        assert_eq!(sci(-12.345), "-1.234500000000e+01");
        assert_eq!(sci(6.02214076e23), "6.022140760000e+23");
        assert_eq!(sci(1.5e-300), "1.500000000000e-300");
        assert_eq!(sci(-2.5e-5), "-2.500000000000e-05");
        assert_eq!(sci(f64::NAN), "nan");
    }

    #[test]
    fn csv_rows() {
        let mut w = CsvWriter::new(Vec::new(), &["a", "b", "c"]).unwrap();
        w.row(&[Field::Text("mu"), Field::Int(3), Field::Real(0.5)]).unwrap();
        let bytes = w.finish().unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b,c\nmu,3,5.000000000000e-01\n");
    }
}
