//! Splitting crystal triples `(Γ, G, Λ)` in lattice coordinates.
//!
//! Everything here is exact: the lattice is identified with `Z^d`, point
//! group elements are integer matrices preserving the Gram form of the
//! lattice basis, and group elements are pairs `(g, k)` acting by
//! `γ(x) = g(x + k)`. Dilations are integer expanding matrices `A` that
//! normalize the group, together with digit sets for `Z^d / A Z^d`.

mod dilation;
mod element;
mod lattice;
mod point_group;
mod presets;
mod spec_io;
mod triple;

pub use dilation::{check_admissible, digit_representatives, perms, solve_int, Dilation, Perms};
pub use element::GroupElement;
pub use lattice::LatticeBasis;
pub use point_group::PointGroup;
pub use presets::{preset, preset_names};
pub use spec_io::{load_group_spec, save_group_spec, GroupSpec};
pub use triple::SplittingCrystalTriple;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("lattice basis is singular (|det B| = {det:e})")]
    SingularBasis { det: f64 },
    #[error("point group: {0}")]
    BadPointGroup(String),
    #[error("dilation is not expanding: eigenvalue modulus {min_modulus} <= 1")]
    NotExpanding { min_modulus: f64 },
    #[error("dilation does not normalize the point group: A g_{index} A^-1 is not in G")]
    NotNormalizing { index: usize },
    #[error("digit search failed: no complete residue system in box of radius {radius}")]
    DigitSearchFailed { radius: i64 },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
}
