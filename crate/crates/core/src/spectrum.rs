//! Non-degenerate ordering of the separable spectrum and the admissible
//! partner pairs.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField2D;
use crate::morse::{energy, scaled_energy, MorseParams, ProductStates, QuantumPair};

/// Energies closer than this are treated as an accidental degeneracy.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuKind {
    /// `|n,n>`
    Diagonal,
    /// `g1 |n,m> + g2 |m,n>` with `n > m`
    Mixed,
}

impl MuKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MuKind::Diagonal => "diagonal",
            MuKind::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuState {
    pub index: usize,
    pub kind: MuKind,
    /// Canonical form, `n >= m`.
    pub pair: QuantumPair,
    pub gamma1: Complex64,
    pub gamma2: Complex64,
    pub energy: f64,
}

impl MuState {
    /// Coefficients on `|n,m>` and `|m,n>`; diagonal states carry all weight on `|n,n>`.
    pub fn terms(&self) -> Vec<(Complex64, QuantumPair)> {
        match self.kind {
            MuKind::Diagonal => vec![(Complex64::new(1.0, 0.0), self.pair)],
            MuKind::Mixed => vec![(self.gamma1, self.pair), (self.gamma2, self.pair.swapped())],
        }
    }

    pub fn field(&self, params: &MorseParams) -> ScalarField2D {
        let states = ProductStates::new(params, &self.terms()).expect("pair validated at construction");
        ScalarField2D::new(Arc::new(states))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub initial: usize,
    pub partner: usize,
    pub missing: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub params: MorseParams,
    pub mu: Vec<MuState>,
    pub partner_pairs: Vec<QuantumPair>,
    pub counts: Counts,
}

fn sort_by_energy(params: &MorseParams, pairs: &mut [QuantumPair]) {
    pairs.sort_by(|a, b| {
        scaled_energy(params, *a)
            .total_cmp(&scaled_energy(params, *b))
            .then(a.cmp(b))
    });
}

/// Unordered pairs `0 <= m <= n <= k`, in increasing energy.
fn canonical_pairs(params: &MorseParams) -> Vec<QuantumPair> {
    let mut pairs: Vec<QuantumPair> = (0..=params.k)
        .flat_map(|n| (0..=n).map(move |m| QuantumPair::new(n, m)))
        .collect();
    sort_by_energy(params, &mut pairs);
    pairs
}

pub fn build_mu_basis(params: &MorseParams, gamma1: Complex64, gamma2: Complex64) -> Result<SpectrumTable> {
    let weight = gamma1.norm_sqr() + gamma2.norm_sqr();
    if (weight - 1.0).abs() > 1e-12 {
        return Err(Error::Mixing(weight));
    }
    let pairs = canonical_pairs(params);
    for w in pairs.windows(2) {
        let gap = scaled_energy(params, w[1]) - scaled_energy(params, w[0]);
        if gap < TIE_TOLERANCE {
            return Err(Error::DegeneracyCollision {
                a_n: w[0].n,
                a_m: w[0].m,
                b_n: w[1].n,
                b_m: w[1].m,
                gap,
            });
        }
    }
    let mu: Vec<MuState> = pairs
        .iter()
        .enumerate()
        .map(|(index, &pair)| MuState {
            index,
            kind: if pair.n == pair.m { MuKind::Diagonal } else { MuKind::Mixed },
            pair,
            gamma1,
            gamma2,
            energy: energy(params, pair),
        })
        .collect();
    let partner_pairs = admissible_partner_pairs(params);
    let counts = Counts {
        initial: mu.len(),
        partner: partner_pairs.len(),
        missing: mu.len() - partner_pairs.len(),
    };
    Ok(SpectrumTable {
        params: *params,
        mu,
        partner_pairs,
        counts,
    })
}

/// Pairs with `n > m + 1`, `n <= k`, in increasing energy. Empty for `k < 2`.
pub fn admissible_partner_pairs(params: &MorseParams) -> Vec<QuantumPair> {
    let mut pairs: Vec<QuantumPair> = (0..=params.k)
        .flat_map(|n| (0..n.saturating_sub(1)).map(move |m| QuantumPair::new(n, m)))
        .collect();
    sort_by_energy(params, &mut pairs);
    pairs
}

/// Energy with the factor and the constant `-2 eps^2` removed:
/// `-[(k-n)^2 + (k-m)^2 + 2 eps (2k - n - m)]`.
pub fn scaled_spectrum(params: &MorseParams, pair: QuantumPair) -> f64 {
    let k = params.k as f64;
    let (n, m) = (pair.n as f64, pair.m as f64);
    -((k - n).powi(2) + (k - m).powi(2) + 2.0 * params.eps * (2.0 * k - n - m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn antisym() -> (Complex64, Complex64) {
        (Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0))
    }

    #[test]
    fn p3pi_counts_and_heads() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let (g1, g2) = antisym();
        let t = build_mu_basis(&mp, g1, g2).unwrap();
        assert_eq!(t.counts, Counts { initial: 55, partner: 36, missing: 19 });
        let head: Vec<_> = t.mu[..4].iter().map(|s| (s.pair.n, s.pair.m)).collect();
        assert_eq!(head, vec![(0, 0), (1, 0), (2, 0), (1, 1)]);
        assert_eq!(t.mu[0].kind, MuKind::Diagonal);
        assert_eq!(t.mu[1].kind, MuKind::Mixed);
        assert_eq!(t.mu[54].pair, QuantumPair::new(9, 9));
        let nu: Vec<_> = t.partner_pairs.iter().map(|q| (q.n, q.m)).collect();
        assert_eq!(&nu[..4], &[(2, 0), (3, 0), (4, 0), (3, 1)]);
        assert_eq!(nu[35], (9, 7));
        for w in t.mu.windows(2) {
            assert!(w[1].energy > w[0].energy);
        }
    }

    #[test]
    fn small_k() {
        let mp = MorseParams::new(2.5 + 0.012_345_678_9).unwrap();
        let (g1, g2) = antisym();
        assert_eq!(build_mu_basis(&mp, g1, g2).unwrap().counts.initial, 6);
        assert!(admissible_partner_pairs(&MorseParams::new(1.7).unwrap()).is_empty());
    }

    #[test]
    fn counting_identities_sweep() {
        for k in 0..=12usize {
            let mp = MorseParams::new(k as f64 + 0.424_777_960_769_379_7).unwrap();
            let (g1, g2) = antisym();
            let t = build_mu_basis(&mp, g1, g2).unwrap();
            assert_eq!(t.counts.initial, (k + 1) * (k + 2) / 2);
            assert_eq!(t.counts.partner, k * k.saturating_sub(1) / 2);
            assert_eq!(t.counts.missing, 1 + 2 * k);
        }
    }

    #[test]
    fn admissible_list_equals_brute_force_filter() {
        for k in 0..=12usize {
            let mp = MorseParams::new(k as f64 + 0.424_777_960_769_379_7).unwrap();
            let (g1, g2) = antisym();
            let t = build_mu_basis(&mp, g1, g2).unwrap();
            let filtered: Vec<QuantumPair> = t
                .mu
                .iter()
                .map(|s| s.pair)
                .filter(|q| q.n.abs_diff(q.m) > 1)
                .collect();
            assert_eq!(filtered, admissible_partner_pairs(&mp));
        }
    }

    #[test]
    fn minimum_gap_p3pi() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let (g1, g2) = antisym();
        let t = build_mu_basis(&mp, g1, g2).unwrap();
        let min_gap = t
            .mu
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::INFINITY, f64::min);
        assert!(min_gap > 1e-9, "{min_gap}");
    }

    #[test]
    fn rational_p_collides() {
        // 25 = 5^2 + 0^2 = 4^2 + 3^2
        let mp = MorseParams::new(6.0).unwrap();
        let (g1, g2) = antisym();
        assert!(matches!(
            build_mu_basis(&mp, g1, g2),
            Err(Error::DegeneracyCollision { .. })
        ));
    }

    #[test]
    fn mixing_condition_enforced() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let r = build_mu_basis(&mp, Complex64::new(0.9, 0.0), Complex64::new(0.1, 0.0));
        assert!(matches!(r, Err(Error::Mixing(_))));
        let ok = build_mu_basis(&mp, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        assert!(ok.is_ok());
    }

    #[test]
    fn scaled_spectrum_values() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let v = scaled_spectrum(&mp, QuantumPair::new(2, 0));
        // with the rounded 0.42478: -(49 + 81 + 16 * 0.84956) = -143.59296
        assert!((v + 143.59296).abs() < 1e-4, "{v}");
        assert_eq!(scaled_spectrum(&mp, QuantumPair::new(9, 9)), 0.0);
        let pairs: Vec<_> = (0..=9).flat_map(|n| (0..=9).map(move |m| QuantumPair::new(n, m))).collect();
        let base = QuantumPair::new(0, 0);
        for &q in &pairs {
            let lhs = scaled_spectrum(&mp, q) - scaled_spectrum(&mp, base);
            let rhs = scaled_energy(&mp, q) - scaled_energy(&mp, base);
            assert!((lhs - rhs).abs() < 1e-11, "{q}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn swapping_gammas_swaps_pairs() {
        let mp = MorseParams::new(3.0 * PI).unwrap();
        let (g1, g2) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let a = build_mu_basis(&mp, g1, g2).unwrap();
        let b = build_mu_basis(&mp, g2, g1).unwrap();
        for (sa, sb) in a.mu.iter().zip(&b.mu).filter(|(s, _)| s.kind == MuKind::Mixed) {
            let ta = sa.terms();
            let tb = sb.terms();
            // coefficient on |n,m> after the swap equals the old one on |m,n>
            assert_eq!(tb[0].0, ta[1].0);
            assert_eq!(tb[1].0, ta[0].0);
            let (fa, fb) = (sa.field(&mp), sb.field(&mp));
            for &(x, y) in &[(0.2, 1.1), (-0.5, 0.4)] {
                assert_eq!(fb.value(x, y), fa.value(y, x));
            }
        }
    }
}
