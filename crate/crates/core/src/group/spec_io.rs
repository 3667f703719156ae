use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::IMat;

use super::{preset, GroupError, LatticeBasis, PointGroup, SplittingCrystalTriple};

/// JSON description of a crystal triple.
///
/// `basis` and the point group matrices are row-major nested lists; the
/// point group must be listed in full, identity first. `dilation` is
/// optional and validated on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: usize,
    pub basis: Vec<Vec<f64>>,
    pub point_group: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dilation: Option<Vec<Vec<i64>>>,
}

impl GroupSpec {
    pub fn from_triple(t: &SplittingCrystalTriple) -> Self {
        let d = t.dimension();
        let basis = (0..d)
            .map(|i| (0..d).map(|j| t.lattice.basis()[(i, j)]).collect())
            .collect();
        let point_group = t
            .group
            .elements()
            .iter()
            .map(|g| (0..d).map(|i| (0..d).map(|j| g[(i, j)]).collect()).collect())
            .collect();
        let dilation = t.dilation.as_ref().map(|dil| {
            (0..d)
                .map(|i| (0..d).map(|j| dil.matrix()[(i, j)]).collect())
                .collect()
        });
        Self {
            name: t.name.clone(),
            dimension: d,
            basis,
            point_group,
            dilation,
        }
    }

    /// Build the triple, reporting the first violated invariant.
    pub fn build(&self) -> Result<SplittingCrystalTriple, GroupError> {
        let d = self.dimension;
        if d == 0 {
            return Err(GroupError::InvalidSpec("dimension must be positive".into()));
        }
        let basis = nested_to_matrix_f64(&self.basis, d, "basis")?;
        let lattice = LatticeBasis::new(basis)?;
        let mut mats = Vec::with_capacity(self.point_group.len());
        for (i, rows) in self.point_group.iter().enumerate() {
            mats.push(nested_to_matrix_i64(rows, d, &format!("point_group[{i}]"))?);
        }
        let group = PointGroup::new(mats, &lattice)?;
        let mut triple = SplittingCrystalTriple::new(lattice, group);
        if let Some(name) = &self.name {
            triple = triple.named(name.clone());
        }
        if let Some(rows) = &self.dilation {
            let a = nested_to_matrix_i64(rows, d, "dilation")?;
            triple = triple.with_dilation(a)?;
        }
        Ok(triple)
    }
}

fn nested_to_matrix_f64(
    rows: &[Vec<f64>],
    d: usize,
    what: &str,
) -> Result<DMatrix<f64>, GroupError> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(GroupError::InvalidSpec(format!(
            "{what}: expected {d}x{d} row-major matrix"
        )));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn nested_to_matrix_i64(rows: &[Vec<i64>], d: usize, what: &str) -> Result<IMat, GroupError> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(GroupError::InvalidSpec(format!(
            "{what}: expected {d}x{d} row-major matrix"
        )));
    }
    Ok(IMat::from_fn(d, d, |i, j| rows[i][j]))
}

/// Load a triple from a JSON file or a built-in preset name.
pub fn load_group_spec(path_or_name: &str) -> Result<SplittingCrystalTriple, GroupError> {
    if let Some(t) = preset(path_or_name) {
        return Ok(t);
    }
    let path = Path::new(path_or_name);
    let text = std::fs::read_to_string(path).map_err(|e| {
        GroupError::InvalidSpec(format!("cannot read {}: {e}", path.display()))
    })?;
    let spec: GroupSpec = serde_json::from_str(&text).map_err(|e| {
        GroupError::InvalidSpec(format!("{}: {e}", path.display()))
    })?;
    spec.build()
}

pub fn save_group_spec(t: &SplittingCrystalTriple, path: &Path) -> std::io::Result<()> {
    let spec = GroupSpec::from_triple(t);
    std::fs::write(path, serde_json::to_string_pretty(&spec).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_through_json() {
        let t = preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap();
        let spec = GroupSpec::from_triple(&t);
        let text = serde_json::to_string(&spec).unwrap();
        let spec2: GroupSpec = serde_json::from_str(&text).unwrap();
        let t2 = spec2.build().unwrap();
        assert_eq!(t2.order(), 2);
        assert_eq!(t2.dilation().unwrap().m(), 4);
        assert_eq!(t2.name.as_deref(), Some("cm-diag"));
    }

    #[test]
    fn first_violation_is_reported() {
        // non-identity first element
        let spec = GroupSpec {
            name: None,
            dimension: 2,
            basis: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            point_group: vec![vec![vec![0, 1], vec![1, 0]]],
            dilation: None,
        };
        let err = spec.build().unwrap_err();
        assert!(err.to_string().contains("identity"));
    }
}
