//! Crystallographic multiresolution analyses and multiwavelet filter banks.
//!
//! The building blocks, bottom up:
//!
//! * [`group`] — exact integer arithmetic for splitting crystal triples
//!   `(Γ, G, Λ)`: lattice bases, finite point groups acting on the lattice,
//!   affine group elements `γ(x) = g(x + k)`, admissible expanding dilations
//!   and their digit sets.
//! * [`refine`] — refinement masks for the equation
//!   `f(x) = Σ_γ d_γ f(γ⁻¹(Ax))`, the scalar ↔ matrix mask lift, the
//!   transfer operator on sampled vector functions, cascade iteration and
//!   self-affine attractor estimates.
//! * [`spectral`] — joint spectral radius estimation and frequency-domain
//!   objects: matrix trigonometric polynomials, symbols, polyphase
//!   components, modulation matrices and unitarity defects.
//! * [`bank`] — filter banks: orthonormality and completeness checks,
//!   Haar-type construction from self-affine tiles, constant-polyphase
//!   unitary completion, and the perfect-reconstruction transform on
//!   lattice-indexed vector data.
//! * [`io`] — JSON/CSV/PGM/raw file formats shared by the library and the
//!   command-line front end.

pub mod bank;
pub mod group;
pub mod io;
pub mod linalg;
pub mod refine;
pub mod spectral;

pub use bank::{
    analyze_one_level, check_condition_d, check_density_condition, check_mra,
    check_orthonormal_translates, complete_constant_polyphase, haar_from_tile,
    inverse_transform_multilevel, synthesize_one_level, tile_fractions, transform_multilevel,
    BankError, ConditionDReport, DensityReport, FilterBank, MraParams, MraReport,
    OrthonormalityReport, Pyramid, TileDecomposition, TileReport, VectorSequence,
};
pub use group::{
    check_admissible, digit_representatives, load_group_spec, perms, preset, preset_names,
    save_group_spec, Dilation, GroupElement, GroupError, GroupSpec, LatticeBasis, Perms,
    PointGroup, SplittingCrystalTriple,
};
pub use linalg::{CMat, CVec, IMat, IVec};
pub use refine::{
    apply_transfer, attractor_estimate, cascade_solve, check_contraction,
    check_gamma_a_symmetry, extract_scalar, intertwining_defect, lift_mask, transfer_residual,
    AttractorEstimate, CascadeInit, CascadeParams, CascadeResult, ContractionReport, GridBox,
    MatrixMask, RefineError, SampledVectorFunction, ScalarMask, SymmetryReport,
};
pub use spectral::{
    jsr_estimate, modulation_matrix, norm_bound_check, polyphase, spectral_radius,
    symbol_from_mask, symbol_from_scalar_sigma, unitarity_defect_modulation,
    unitarity_defect_polyphase, FrequencyGrid, JsrEstimate, JsrOrder, MatrixSet, NormBoundReport,
    SpectralError, TrigMatrixPolynomial, UnitarityReport,
};

