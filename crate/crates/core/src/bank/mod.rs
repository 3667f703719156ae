//! Filter banks over a crystal triple: the scaling mask plus `m − 1`
//! wavelet masks, their orthonormality conditions, Haar-type construction
//! from self-affine tiles, constant-polyphase unitary completion, and the
//! perfect-reconstruction transform on lattice-indexed vector data.

mod checks;
mod completion;
mod filter_bank;
mod tile;
mod transform;

pub use checks::{
    check_condition_d, check_density_condition, check_mra, check_orthonormal_translates,
    ConditionDReport, DensityReport, MraParams, MraReport, OrthonormalityReport,
};
pub use completion::complete_constant_polyphase;
pub use filter_bank::FilterBank;
pub use tile::{haar_from_tile, tile_fractions, TileDecomposition, TileReport};
pub use transform::{
    analyze_one_level, inverse_transform_multilevel, synthesize_one_level, transform_multilevel,
    Pyramid, VectorSequence,
};

use thiserror::Error;

use crate::group::GroupError;
use crate::refine::RefineError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum BankError {
    #[error("bank must hold exactly m = {expected} masks, got {got}")]
    WrongMaskCount { expected: usize, got: usize },
    #[error("scaling mask is not constant-polyphase: {0}")]
    NotConstantPolyphase(String),
    #[error("completion failed: only {achieved} of {needed} orthonormal rows found")]
    CompletionFailed { achieved: usize, needed: usize },
    #[error("piece count {got} does not match m = {expected}")]
    PieceCountMismatch { expected: usize, got: usize },
    #[error("pieces do not decompose the tile: defect {defect:e}")]
    NotATileDecomposition { defect: f64 },
    #[error("grid too coarse: estimated quadrature error {estimate:e} exceeds tolerance")]
    GridTooCoarse { estimate: f64 },
    #[error("coarse box underflows before the requested number of levels")]
    BoxUnderflow,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
