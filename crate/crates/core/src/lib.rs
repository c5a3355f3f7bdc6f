//! Collective decay of a 1D qubit chain coupled through a waveguide, and
//! storage of single excitations in its subradiant modes.
//!
//! The coupling matrix `J_jl = exp(iθ|j−l|)` drives `α̇ = −(γ₀/2) J α`.
//! `spectral` diagonalizes it and sorts modes by mirror parity, `dynamics`
//! propagates states, and `storage` compares preparation strategies.

pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod spectral;
pub mod storage;

pub use coupling::{
    build_coupling_matrix, build_mirror_matrix, ChainConfig, CouplingMatrix, MirrorMatrix,
};
pub use dynamics::{evolve_eigen, evolve_ode, storage_time, EvolutionTrace, QubitState};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use spectral::{decompose, decompose_config, DecayMode, SpectralDecomposition, Symmetry};
pub use storage::{
    compare_strategies, named_state, optimal_storage_state, symmetry_protected_best, NamedState,
    StrategyReport,
};
