use crate::linalg::IVec;

/// An element `γ = (g_i, k)` of a splitting crystal group, acting by
/// `γ(x) = g_i(x + k)` in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    /// Index of the point part into the triple's [`super::PointGroup`].
    pub point: usize,
    /// Integer translation applied before the point part.
    pub translation: Vec<i64>,
}

impl GroupElement {
    pub fn new(point: usize, translation: Vec<i64>) -> Self {
        Self { point, translation }
    }

    pub fn identity(dimension: usize) -> Self {
        Self {
            point: 0,
            translation: vec![0; dimension],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.point == 0 && self.translation.iter().all(|&t| t == 0)
    }

    pub fn dimension(&self) -> usize {
        self.translation.len()
    }

    pub fn translation_vec(&self) -> IVec {
        IVec::from_vec(self.translation.clone())
    }
}
