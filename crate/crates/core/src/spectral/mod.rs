//! Joint spectral radius estimation and frequency-domain objects.
//!
//! Frequencies live in dual-lattice coordinates throughout: the pairing
//! `k·ω` between a lattice translation and a frequency is the plain dot
//! product, dual lattice shifts are integer vectors, and the adjoint
//! dilation acts as `Aᵀ`.

mod jsr;
mod symbol;
mod trig;

pub use jsr::{
    jsr_estimate, norm_bound_check, power_norm_estimate, spectral_radius, JsrEstimate, JsrOrder,
    MatrixSet, NormBoundReport,
};
pub use symbol::{
    modulation_matrix, polyphase, polyphase_reconstruction_defect, symbol_from_mask,
    symbol_from_scalar_sigma, unitarity_defect_modulation, unitarity_defect_polyphase,
    UnitarityReport,
};
pub use trig::{FrequencyGrid, TrigMatrixPolynomial};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix set must be nonempty with uniform square dimensions")]
    BadMatrixSet,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Unsupported(String),
}
