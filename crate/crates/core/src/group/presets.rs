use crate::linalg::IMat;

use super::{LatticeBasis, PointGroup, SplittingCrystalTriple};

/// Built-in example triples, all over the standard lattice. Dilations are
/// attached separately (`2I` is admissible for every one of these).
pub fn preset(name: &str) -> Option<SplittingCrystalTriple> {
    let (d, mats): (usize, Vec<IMat>) = match name {
        // trivial group on the line
        "z1" | "trivial-1d" => (1, vec![IMat::identity(1, 1)]),
        // translations only
        "p1" => (2, vec![IMat::identity(2, 2)]),
        // reflection across the diagonal y = x
        "cm-diag" => (
            2,
            vec![IMat::identity(2, 2), IMat::from_row_slice(2, 2, &[0, 1, 1, 0])],
        ),
        // reflection across the x-axis
        "pm" => (
            2,
            vec![IMat::identity(2, 2), IMat::from_row_slice(2, 2, &[1, 0, 0, -1])],
        ),
        // four-fold rotations
        "p4" => (
            2,
            vec![
                IMat::identity(2, 2),
                IMat::from_row_slice(2, 2, &[0, -1, 1, 0]),
                IMat::from_row_slice(2, 2, &[-1, 0, 0, -1]),
                IMat::from_row_slice(2, 2, &[0, 1, -1, 0]),
            ],
        ),
        _ => return None,
    };
    let lattice = LatticeBasis::standard(d);
    let group = PointGroup::new(mats, &lattice).expect("preset groups are valid");
    Some(SplittingCrystalTriple::new(lattice, group).named(name))
}

pub fn preset_names() -> &'static [&'static str] {
    &["z1", "p1", "cm-diag", "pm", "p4"]
}
