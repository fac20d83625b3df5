use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quantum number {index} exceeds the bound-state limit k = {k}")]
    Index { index: usize, k: usize },

    #[error("pairs ({a_n},{a_m}) and ({b_n},{b_m}) are degenerate within {gap:e}; p is too close to a rational with small denominator")]
    DegeneracyCollision {
        a_n: usize,
        a_m: usize,
        b_n: usize,
        b_m: usize,
        gap: f64,
    },

    #[error("the partner Hamiltonian has no bound states for k = {k} (need k >= 2)")]
    EmptyBasis { k: usize },

    #[error("state norm {norm} deviates from 1 by more than {tolerance:e}")]
    Normalization { norm: f64, tolerance: f64 },

    #[error("mixing coefficients must satisfy |g1|^2 + |g2|^2 = 1, got {0}")]
    Mixing(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
