use nalgebra::DVector;

use crate::linalg::{int_to_f64, ivec_to_f64, IVec};

use super::{Dilation, GroupElement, GroupError, LatticeBasis, PointGroup};

/// A splitting crystal triple `(Γ, G, Λ)`, optionally carrying an
/// admissible dilation. All operations are pure; the type is immutable
/// after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct SplittingCrystalTriple {
    pub lattice: LatticeBasis,
    pub group: PointGroup,
    pub dilation: Option<Dilation>,
    pub name: Option<String>,
}

impl SplittingCrystalTriple {
    pub fn new(lattice: LatticeBasis, group: PointGroup) -> Self {
        Self {
            lattice,
            group,
            dilation: None,
            name: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dimension(&self) -> usize {
        self.lattice.dimension()
    }

    /// Point group order `r`.
    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn dilation(&self) -> Result<&Dilation, GroupError> {
        self.dilation
            .as_ref()
            .ok_or_else(|| GroupError::InvalidSpec("no dilation attached".into()))
    }

    /// Attach an admissible dilation, validating it first.
    pub fn with_dilation(mut self, a: crate::linalg::IMat) -> Result<Self, GroupError> {
        let dil = super::check_admissible(&a, &self)?;
        self.dilation = Some(dil);
        Ok(self)
    }

    /// Group law: `left ∘ right` as affine maps. With `left = (g_j, l)`
    /// and `right = (g_i, k)` this is `(g_j g_i, k + g_i^{-1}(l))`.
    pub fn compose(&self, left: &GroupElement, right: &GroupElement) -> GroupElement {
        let point = self.group.compose_index(left.point, right.point);
        let gi_inv = self.group.element(self.group.inverse_index(right.point));
        let l = left.translation_vec();
        let k = right.translation_vec();
        let t = k + gi_inv * l;
        GroupElement::new(point, t.iter().copied().collect())
    }

    /// Inverse element: `(g_i, k)^{-1} = (g_i^{-1}, -g_i(k))`.
    pub fn invert(&self, el: &GroupElement) -> GroupElement {
        let point = self.group.inverse_index(el.point);
        let g = self.group.element(el.point);
        let t = -(g * el.translation_vec());
        GroupElement::new(point, t.iter().copied().collect())
    }

    /// Action `γ(x) = g_i(x + k)` on a point in lattice coordinates.
    pub fn act(&self, el: &GroupElement, x: &DVector<f64>) -> DVector<f64> {
        let g = int_to_f64(self.group.element(el.point));
        g * (x + ivec_to_f64(&el.translation_vec()))
    }

    /// Same action expressed in ambient coordinates.
    pub fn act_ambient(&self, el: &GroupElement, y: &DVector<f64>) -> DVector<f64> {
        let x = self.lattice.from_ambient(y);
        self.lattice.to_ambient(&self.act(el, &x))
    }

    /// Exact action on an integer lattice point.
    pub fn act_int(&self, el: &GroupElement, x: &IVec) -> IVec {
        self.group.element(el.point) * (x + el.translation_vec())
    }
}
