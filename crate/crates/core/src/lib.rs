//! Bound states of the two-dimensional Morse Hamiltonian, the eigenstates of
//! its singular supersymmetric partner, and generalized coherent states built
//! on the partner spectrum.
//!
//! Units are `hbar = beta = m = 1` throughout. The potential depth is fixed by
//! the single parameter `p`: `V0 = (2p + 1)^2 / 8`.

pub mod coherent;
pub mod error;
pub mod fd;
pub mod field;
pub mod morse;
pub mod observables;
mod par;
pub mod quadrature;
pub mod specfun;
pub mod spectrum;
pub mod susy;

pub use coherent::{coherent_state, ladder_lower, CoherentState, LadderScalar, LadderSpec};
pub use error::{Error, Result};
pub use field::{FieldEval, SampledGrid, ScalarField2D, Superposition};
pub use morse::{energy, psi1d, psi1d_dx, psi2d, MorseParams, QuantumPair};
pub use observables::{
    density_grid, gram, moments_x, overlap, variance_product, BasisMatrices, DensityGrid, Moments, UncertaintyReport,
    Variances,
};
pub use quadrature::{QuadratureGrid, QuadratureOptions};
pub use spectrum::{admissible_partner_pairs, build_mu_basis, scaled_spectrum, MuKind, MuState, SpectrumTable};
pub use susy::{apply_qplus, build_nu_basis, qplus_norm_sq, r_eigenvalue, NuState};
