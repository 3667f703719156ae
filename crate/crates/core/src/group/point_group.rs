use nalgebra::DMatrix;

use crate::linalg::{int_det, IMat};

use super::{GroupError, LatticeBasis};

/// A finite group of integer matrices preserving the lattice Gram form.
///
/// The element list fixes an indexing `g_0 = Id, g_1, ..., g_{r-1}` which
/// the rest of the crate relies on; `cayley[i][j]` is the index of
/// `g_i * g_j` and `inverse[i]` the index of `g_i^{-1}`.
#[derive(Debug, Clone)]
pub struct PointGroup {
    elements: Vec<IMat>,
    cayley: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl PointGroup {
    pub fn new(elements: Vec<IMat>, lattice: &LatticeBasis) -> Result<Self, GroupError> {
        if elements.is_empty() {
            return Err(GroupError::BadPointGroup("empty element list".into()));
        }
        let d = lattice.dimension();
        for (i, g) in elements.iter().enumerate() {
            if g.nrows() != d || g.ncols() != d {
                return Err(GroupError::BadPointGroup(format!(
                    "element {i} is {}x{}, expected {d}x{d}",
                    g.nrows(),
                    g.ncols()
                )));
            }
        }
        if elements[0] != IMat::identity(d, d) {
            return Err(GroupError::BadPointGroup(
                "first element must be the identity".into(),
            ));
        }
        for (i, g) in elements.iter().enumerate() {
            let det = int_det(g);
            if det != 1 && det != -1 {
                return Err(GroupError::BadPointGroup(format!(
                    "element {i} has determinant {det}, not ±1"
                )));
            }
            if !preserves_gram(g, lattice.gram()) {
                return Err(GroupError::BadPointGroup(format!(
                    "element {i} does not preserve the Gram form"
                )));
            }
        }
        // Distinctness, closure and inverses.
        let r = elements.len();
        for i in 0..r {
            for j in i + 1..r {
                if elements[i] == elements[j] {
                    return Err(GroupError::BadPointGroup(format!(
                        "elements {i} and {j} are equal"
                    )));
                }
            }
        }
        let find = |m: &IMat| elements.iter().position(|g| g == m);
        let mut cayley = vec![vec![0usize; r]; r];
        for i in 0..r {
            for j in 0..r {
                let prod = &elements[i] * &elements[j];
                cayley[i][j] = find(&prod).ok_or_else(|| {
                    GroupError::BadPointGroup(format!(
                        "not closed: g_{i} * g_{j} is not in the element list"
                    ))
                })?;
            }
        }
        let mut inverse = vec![0usize; r];
        for i in 0..r {
            inverse[i] = (0..r).find(|&j| cayley[i][j] == 0).ok_or_else(|| {
                GroupError::BadPointGroup(format!("element {i} has no inverse in the list"))
            })?;
        }
        Ok(Self {
            elements,
            cayley,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &IMat {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[IMat] {
        &self.elements
    }

    /// Index of `g_i * g_j`.
    pub fn compose_index(&self, i: usize, j: usize) -> usize {
        self.cayley[i][j]
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn find(&self, m: &IMat) -> Option<usize> {
        self.elements.iter().position(|g| g == m)
    }
}

/// `g^T Q g = Q`, checked exactly when `Q` has integer entries and within
/// 1e-9 otherwise.
fn preserves_gram(g: &IMat, gram: &DMatrix<f64>) -> bool {
    let d = g.nrows();
    let integral = gram.iter().all(|q| q.fract() == 0.0 && q.abs() < 2e18);
    if integral {
        let qi =
            DMatrix::<i128>::from_fn(d, d, |i, j| gram[(i, j)] as i128);
        let gi = DMatrix::<i128>::from_fn(d, d, |i, j| g[(i, j)] as i128);
        let lhs = gi.transpose() * &qi * &gi;
        lhs == qi
    } else {
        let gf = g.map(|e| e as f64);
        let lhs = gf.transpose() * gram * &gf;
        let scale = 1.0 + gram.amax();
        (lhs - gram).amax() <= 1e-9 * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap2() -> IMat {
        IMat::from_row_slice(2, 2, &[0, 1, 1, 0])
    }

    #[test]
    fn two_element_group() {
        let lat = LatticeBasis::standard(2);
        let g = PointGroup::new(vec![IMat::identity(2, 2), swap2()], &lat).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.compose_index(1, 1), 0);
        assert_eq!(g.inverse_index(1), 1);
    }

    #[test]
    fn rejects_non_closed_set() {
        let lat = LatticeBasis::standard(2);
        let r90 = IMat::from_row_slice(2, 2, &[0, -1, 1, 0]);
        let err = PointGroup::new(vec![IMat::identity(2, 2), r90], &lat);
        assert!(matches!(err, Err(GroupError::BadPointGroup(_))));
    }

    #[test]
    fn rejects_gram_violation() {
        // diag(2,1) lattice: the swap does not preserve Q = diag(4,1)
        let lat =
            LatticeBasis::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap();
        let err = PointGroup::new(vec![IMat::identity(2, 2), swap2()], &lat);
        assert!(matches!(err, Err(GroupError::BadPointGroup(_))));
    }

    #[test]
    fn cayley_is_latin_square() {
        let lat = LatticeBasis::standard(2);
        let r90 = IMat::from_row_slice(2, 2, &[0, -1, 1, 0]);
        let r180 = IMat::from_row_slice(2, 2, &[-1, 0, 0, -1]);
        let r270 = IMat::from_row_slice(2, 2, &[0, 1, -1, 0]);
        let g =
            PointGroup::new(vec![IMat::identity(2, 2), r90, r180, r270], &lat).unwrap();
        for i in 0..4 {
            let mut row: Vec<usize> = (0..4).map(|j| g.compose_index(i, j)).collect();
            let mut col: Vec<usize> = (0..4).map(|j| g.compose_index(j, i)).collect();
            row.sort_unstable();
            col.sort_unstable();
            assert_eq!(row, vec![0, 1, 2, 3]);
            assert_eq!(col, vec![0, 1, 2, 3]);
        }
    }
}
