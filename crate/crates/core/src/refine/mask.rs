use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::group::{perms, GroupElement, SplittingCrystalTriple};
use crate::linalg::{CMat, IVec};

use super::RefineError;

const ZERO_TOL: f64 = 0.0;

/// Finitely supported coefficients `d_γ` of a scalar refinement equation,
/// keyed by `(point index, translation)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMask {
    dimension: usize,
    entries: BTreeMap<(usize, Vec<i64>), Complex64>,
}

impl ScalarMask {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(
        dimension: usize,
        entries: impl IntoIterator<Item = (GroupElement, Complex64)>,
    ) -> Self {
        let mut mask = Self::new(dimension);
        for (el, v) in entries {
            mask.add(&el, v);
        }
        mask
    }

    /// Indicator-style mask: coefficient 1 at each listed element.
    pub fn indicator(dimension: usize, elements: &[GroupElement]) -> Self {
        Self::from_entries(
            dimension,
            elements
                .iter()
                .map(|el| (el.clone(), Complex64::new(1.0, 0.0))),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn add(&mut self, el: &GroupElement, value: Complex64) {
        assert_eq!(el.dimension(), self.dimension, "translation dimension");
        let key = (el.point, el.translation.clone());
        let slot = self.entries.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *slot += value;
        if slot.norm() <= ZERO_TOL {
            self.entries.remove(&(el.point, el.translation.clone()));
        }
    }

    pub fn get(&self, point: usize, k: &[i64]) -> Complex64 {
        self.entries
            .get(&(point, k.to_vec()))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (GroupElement, Complex64)> + '_ {
        self.entries
            .iter()
            .map(|((p, k), v)| (GroupElement::new(*p, k.clone()), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum_sq(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(_, v)| (*v * factor).norm() > ZERO_TOL)
            .map(|(k, v)| (k.clone(), v * factor))
            .collect();
        Self {
            dimension: self.dimension,
            entries,
        }
    }
}

/// Finitely supported `r×r` matrix coefficients `c̃_k` of a vector
/// refinement equation, keyed by the lattice translation `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMask {
    dimension: usize,
    size: usize,
    entries: BTreeMap<Vec<i64>, CMat>,
}

impl MatrixMask {
    pub fn new(dimension: usize, size: usize) -> Self {
        Self {
            dimension,
            size,
            entries: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Matrix block size `r`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, k: Vec<i64>, matrix: CMat) {
        assert_eq!(k.len(), self.dimension);
        assert_eq!(matrix.nrows(), self.size);
        assert_eq!(matrix.ncols(), self.size);
        if matrix.iter().all(|z| z.norm() <= ZERO_TOL) {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, matrix);
        }
    }

    pub fn get(&self, k: &[i64]) -> Option<&CMat> {
        self.entries.get(k)
    }

    pub fn entry(&self, k: &[i64], i: usize, j: usize) -> Complex64 {
        self.entries
            .get(k)
            .map(|m| m[(i, j)])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Support `Λ'`: translations with a nonzero matrix.
    pub fn support(&self) -> Vec<IVec> {
        self.entries
            .keys()
            .map(|k| IVec::from_vec(k.clone()))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &CMat)> + '_ {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coefficient_count(&self) -> usize {
        self.entries
            .values()
            .map(|m| m.iter().filter(|z| z.norm() > ZERO_TOL).count())
            .sum()
    }
}

/// Lift scalar coefficients to matrix coefficients:
/// `c̃_k[i][j] = d` at the element `(g_{h_i}^{-1} g_j, g_j^{-1}(k))`.
/// The result is (Γ,a)-symmetric by construction.
pub fn lift_mask(
    d: &ScalarMask,
    triple: &SplittingCrystalTriple,
) -> Result<MatrixMask, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let r = triple.order();
    let dim = triple.dimension();
    let p = perms(dil, &triple.group);

    // candidate support: k = g_j(t) over scalar translations t and all j
    let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
    for (el, _) in d.iter() {
        for j in 0..r {
            let k = triple.group.element(j) * el.translation_vec();
            candidates.insert(k.iter().copied().collect());
        }
    }

    let mut out = MatrixMask::new(dim, r);
    for k in candidates {
        let kv = IVec::from_vec(k.clone());
        let mat = CMat::from_fn(r, r, |i, j| {
            let gj_inv = triple.group.element(triple.group.inverse_index(j));
            let t = gj_inv * &kv;
            d.get(p.rho[i][j], t.as_slice())
        });
        out.insert(k, mat);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub ok: bool,
    pub max_violation: f64,
    /// Worst `(i, j, k)` when a violation was found.
    pub witness: Option<(usize, usize, Vec<i64>)>,
}

/// Check the (Γ,a)-symmetry identity
/// `c^k_{i,j} = c^{g_{h_i}^{-1}(k)}_{1, ρ_i(j)}` over the support and its
/// images under every `g_{h_i}^{-1}`.
pub fn check_gamma_a_symmetry(
    c: &MatrixMask,
    triple: &SplittingCrystalTriple,
    tol: f64,
) -> Result<SymmetryReport, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let r = triple.order();
    if c.size() != r {
        return Err(RefineError::DimensionMismatch(format!(
            "mask blocks are {}x{}, point group has order {r}",
            c.size(),
            c.size()
        )));
    }
    let p = perms(dil, &triple.group);

    let mut ks: BTreeSet<Vec<i64>> = c.iter().map(|(k, _)| k.clone()).collect();
    for i in 0..r {
        let hi_inv = triple.group.element(triple.group.inverse_index(p.h[i]));
        for (k, _) in c.iter() {
            let img = hi_inv * IVec::from_vec(k.clone());
            ks.insert(img.iter().copied().collect());
        }
    }

    let mut max_violation = 0.0f64;
    let mut witness = None;
    for k in &ks {
        let kv = IVec::from_vec(k.clone());
        for i in 0..r {
            let hi_inv = triple.group.element(triple.group.inverse_index(p.h[i]));
            let hk = hi_inv * &kv;
            for j in 0..r {
                let lhs = c.entry(k, i, j);
                let rhs = c.entry(hk.as_slice(), 0, p.rho[i][j]);
                let v = (lhs - rhs).norm();
                if v > max_violation {
                    max_violation = v;
                    witness = Some((i, j, k.clone()));
                }
            }
        }
    }
    Ok(SymmetryReport {
        ok: max_violation <= tol,
        max_violation,
        witness: if max_violation > tol { witness } else { None },
    })
}

/// Recover the scalar mask from a symmetric matrix mask through its first
/// row: `d_{(g_i, l)} = c̃^{g_i(l)}[1][i]`. Inverse of [`lift_mask`].
pub fn extract_scalar(
    c: &MatrixMask,
    triple: &SplittingCrystalTriple,
    tol: f64,
) -> Result<ScalarMask, RefineError> {
    let report = check_gamma_a_symmetry(c, triple, tol)?;
    if !report.ok {
        let (_, _, k) = report.witness.unwrap();
        return Err(RefineError::NotSymmetric {
            violation: report.max_violation,
            witness: k,
        });
    }
    let r = triple.order();
    let mut out = ScalarMask::new(c.dimension());
    for (k, mat) in c.iter() {
        let kv = IVec::from_vec(k.clone());
        for i in 0..r {
            let v = mat[(0, i)];
            if v.norm() > ZERO_TOL {
                let gi_inv = triple.group.element(triple.group.inverse_index(i));
                let l = gi_inv * &kv;
                let el = GroupElement::new(i, l.iter().copied().collect());
                // first-row entries of different k never collide: l and i
                // determine k = g_i(l)
                out.add(&el, v);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub sum_sq: f64,
    pub m: usize,
    /// `Σ|d_γ|² < m`, the sufficient condition for a unique compactly
    /// supported solution.
    pub strict: bool,
}

pub fn check_contraction(
    d: &ScalarMask,
    triple: &SplittingCrystalTriple,
) -> Result<ContractionReport, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let sum_sq = d.sum_sq();
    Ok(ContractionReport {
        sum_sq,
        m: dil.m(),
        strict: sum_sq < dil.m() as f64,
    })
}

/// The Haar-type mask of the diagonal-reflection example: coefficient 1 at
/// `(I,(0,0)), (I,(1,0)), (I,(1,1)), (s,(0,1))` for the `cm-diag` preset
/// with dilation `2I`. Used all over the test suites.
pub fn cm_haar_mask() -> ScalarMask {
    ScalarMask::indicator(
        2,
        &[
            GroupElement::new(0, vec![0, 0]),
            GroupElement::new(0, vec![1, 0]),
            GroupElement::new(0, vec![1, 1]),
            GroupElement::new(1, vec![0, 1]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::preset;
    use crate::linalg::IMat;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn cm_with_dilation() -> SplittingCrystalTriple {
        preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap()
    }

    #[test]
    fn lift_of_cm_haar_matches_hand_computation() {
        // Hand evaluation with h = id and entries d_{(g_i^{-1} g_j, g_j^{-1}(k))}.
        let t = cm_with_dilation();
        let c = lift_mask(&cm_haar_mask(), &t).unwrap();
        let id2 = CMat::identity(2, 2);
        assert_eq!(c.get(&[0, 0]).unwrap(), &id2);
        assert_eq!(c.get(&[1, 1]).unwrap(), &id2);
        let m10 = CMat::from_fn(2, 2, |i, j| {
            if i == 0 && (j == 0 || j == 1) { one() } else { Complex64::new(0.0, 0.0) }
        });
        assert_eq!(c.get(&[1, 0]).unwrap(), &m10);
        let m01 = CMat::from_fn(2, 2, |i, j| {
            if i == 1 && (j == 0 || j == 1) { one() } else { Complex64::new(0.0, 0.0) }
        });
        assert_eq!(c.get(&[0, 1]).unwrap(), &m01);
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn trivial_group_lift_is_reindexing() {
        let t = preset("z1")
            .unwrap()
            .with_dilation(IMat::from_row_slice(1, 1, &[2]))
            .unwrap();
        let mut d = ScalarMask::new(1);
        d.add(&GroupElement::new(0, vec![0]), Complex64::new(0.25, -1.0));
        d.add(&GroupElement::new(0, vec![3]), Complex64::new(2.0, 0.5));
        let c = lift_mask(&d, &t).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.entry(&[0], 0, 0), Complex64::new(0.25, -1.0));
        assert_eq!(c.entry(&[3], 0, 0), Complex64::new(2.0, 0.5));
    }

    #[test]
    fn zero_mask_lifts_to_empty() {
        let t = cm_with_dilation();
        let c = lift_mask(&ScalarMask::new(2), &t).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn lifted_masks_are_exactly_symmetric() {
        let t = cm_with_dilation();
        let c = lift_mask(&cm_haar_mask(), &t).unwrap();
        let rep = check_gamma_a_symmetry(&c, &t, 0.0).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.max_violation, 0.0);
    }

    #[test]
    fn symmetry_violation_detected() {
        // single entry [[1,0],[0,0]] at k = 0: row 2 is not the ρ_2-image of row 1
        let t = cm_with_dilation();
        let mut c = MatrixMask::new(2, 2);
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = one();
        c.insert(vec![0, 0], m);
        let rep = check_gamma_a_symmetry(&c, &t, 1e-12).unwrap();
        assert!(!rep.ok);
        // c^0_{2,2} must equal c^0_{1,ρ_2(2)} = c^0_{1,1} = 1, but is 0
        assert!((rep.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn r1_groups_are_always_symmetric() {
        let t = preset("z1")
            .unwrap()
            .with_dilation(IMat::from_row_slice(1, 1, &[2]))
            .unwrap();
        let mut c = MatrixMask::new(1, 1);
        c.insert(vec![5], CMat::from_element(1, 1, Complex64::new(1.5, 2.0)));
        let rep = check_gamma_a_symmetry(&c, &t, 0.0).unwrap();
        assert!(rep.ok);
    }

    #[test]
    fn extract_is_inverse_of_lift() {
        let t = cm_with_dilation();
        let d = cm_haar_mask();
        let c = lift_mask(&d, &t).unwrap();
        let back = extract_scalar(&c, &t, 1e-12).unwrap();
        assert_eq!(back, d);
        // and lift ∘ extract = id on symmetric masks
        let c2 = lift_mask(&back, &t).unwrap();
        assert_eq!(c2, c);
    }

    #[test]
    fn extract_zero_mask() {
        let t = cm_with_dilation();
        let c = MatrixMask::new(2, 2);
        let d = extract_scalar(&c, &t, 1e-12).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn extract_rejects_asymmetric() {
        let t = cm_with_dilation();
        let mut c = MatrixMask::new(2, 2);
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = one();
        c.insert(vec![0, 0], m);
        assert!(matches!(
            extract_scalar(&c, &t, 1e-12),
            Err(RefineError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn contraction_reports() {
        let t = cm_with_dilation();
        let d = cm_haar_mask();
        let rep = check_contraction(&d, &t).unwrap();
        assert_eq!(rep.m, 4);
        assert!((rep.sum_sq - 4.0).abs() < 1e-15);
        assert!(!rep.strict); // boundary case

        let scaled = d.scaled(Complex64::new(0.9, 0.0));
        let rep = check_contraction(&scaled, &t).unwrap();
        assert!((rep.sum_sq - 3.24).abs() < 1e-12);
        assert!(rep.strict);

        let rep = check_contraction(&ScalarMask::new(2), &t).unwrap();
        assert_eq!(rep.sum_sq, 0.0);
        assert!(rep.strict);
    }
}
