//! Refinement equations `f(x) = Σ_γ d_γ f(γ⁻¹(Ax))` and their matrix
//! form `F(x) = Σ_k c̃_k F(Ax − k)`.
//!
//! [`ScalarMask`] holds the coefficients `d_γ` indexed by group elements;
//! [`MatrixMask`] holds the lifted `r×r` matrices `c̃_k` indexed by lattice
//! translations. [`lift_mask`] / [`extract_scalar`] convert between the
//! two, and the symmetry check recognizes exactly the matrix masks that
//! arise from scalar ones.
//!
//! Sampled vector functions are cell averages on the dyadic-type grids
//! `A^{-n}(j + [0,1)^d)`; see [`SampledVectorFunction`] for why averages
//! rather than point values.

mod attractor;
mod grid;
mod mask;
mod transfer;

pub use attractor::{attractor_bbox, attractor_estimate, AttractorEstimate};
pub use grid::{GridBox, SampledVectorFunction};
pub use mask::{
    check_contraction, check_gamma_a_symmetry, cm_haar_mask, extract_scalar, lift_mask,
    ContractionReport, MatrixMask, ScalarMask, SymmetryReport,
};
pub use transfer::{
    apply_transfer, cascade_solve, cell_digits, cell_map, coarsen, component_cell_map,
    intertwined_from_channel, intertwining_defect, is_signed_permutation, transfer_residual,
    CascadeInit, CascadeParams, CascadeResult,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("triple has no dilation attached")]
    NoDilation,
    #[error("matrix mask is not (Γ,a)-symmetric: violation {violation:e} at k={witness:?}")]
    NotSymmetric { violation: f64, witness: Vec<i64> },
    #[error("grid too small: needs box {required:?}")]
    GridTooSmall { required: (Vec<i64>, Vec<i64>) },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Unsupported(String),
}
