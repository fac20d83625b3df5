//! Generalized Laguerre polynomials and the log-Gamma function.
//!
//! Degrees needed by the Morse states are small (n <= k, with k around ten),
//! so the forward three-term recurrence is accurate without asymptotic
//! branches.

use crate::error::{Error, Result};

/// `L_n^alpha(z)` by the forward three-term recurrence
/// `(j+1) L_{j+1} = (2j + 1 + alpha - z) L_j - (j + alpha) L_{j-1}`.
pub fn laguerre(n: i64, alpha: f64, z: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Domain(format!("Laguerre degree must be >= 0, got {n}")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("Laguerre argument must be >= 0, got {z}")));
    }
    Ok(laguerre_unchecked(n as usize, alpha, z))
}

/// Derivative `d/dz L_n^alpha(z) = -L_{n-1}^{alpha+1}(z)`, zero for `n = 0`.
pub fn laguerre_deriv(n: i64, alpha: f64, z: f64) -> Result<f64> {
    if n < 0 {
        return Err(Error::Domain(format!("Laguerre degree must be >= 0, got {n}")));
    }
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("Laguerre argument must be >= 0, got {z}")));
    }
    Ok(laguerre_deriv_unchecked(n as usize, alpha, z))
}

#[inline]
pub(crate) fn laguerre_unchecked(n: usize, alpha: f64, z: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - z;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - z) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

#[inline]
pub(crate) fn laguerre_deriv_unchecked(n: usize, alpha: f64, z: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        -laguerre_unchecked(n - 1, alpha + 1.0, z)
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(libm::lgamma(x))
}
