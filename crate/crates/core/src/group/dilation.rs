use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::linalg::{adjugate, int_det, int_to_f64, op_norm_real, IMat, IVec};

use super::{GroupError, SplittingCrystalTriple};

/// An admissible dilation for a crystal triple: an expanding integer
/// matrix `A` with `A G A^{-1} = G`, together with digit sets for the
/// quotients `Z^d / A Z^d` and `Z^d / A^T Z^d`.
#[derive(Debug, Clone)]
pub struct Dilation {
    matrix: IMat,
    m: usize,
    h_perm: Vec<usize>,
    digits: Vec<IVec>,
    dual_digits: Vec<IVec>,
}

impl Dilation {
    pub fn matrix(&self) -> &IMat {
        &self.matrix
    }

    /// Subsampling factor `m = |det A|`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Permutation `h` with `g_{h(i)} = A g_i A^{-1}`.
    pub fn h_perm(&self) -> &[usize] {
        &self.h_perm
    }

    /// Coset representatives of `Z^d / A Z^d`.
    pub fn digits(&self) -> &[IVec] {
        &self.digits
    }

    /// Coset representatives of `Z^d / A^T Z^d`.
    pub fn dual_digits(&self) -> &[IVec] {
        &self.dual_digits
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// `A^{-1}` as a float matrix.
    pub fn inverse_f64(&self) -> DMatrix<f64> {
        int_to_f64(&self.matrix)
            .try_inverse()
            .expect("dilation is expanding, hence invertible")
    }

    /// Index of the digit congruent to `k` modulo `A Z^d`, with the
    /// integer quotient `w` such that `k = digit + A w`.
    pub fn coset_of(&self, k: &IVec) -> (usize, IVec) {
        let key = coset_key(&self.matrix, k);
        let idx = self
            .digits
            .iter()
            .position(|d| coset_key(&self.matrix, d) == key)
            .expect("digit set is a complete residue system");
        let diff = k - &self.digits[idx];
        let w = solve_int(&self.matrix, &diff).expect("difference lies in A Z^d");
        (idx, w)
    }
}

/// Exact coset invariant of `k` in `Z^d / M Z^d`: `adj(M) k mod |det M|`
/// componentwise. Two vectors collide exactly when they are congruent.
fn coset_key(m: &IMat, k: &IVec) -> Vec<i64> {
    let adj = adjugate(m);
    let d = m.nrows();
    let det = int_det(m).unsigned_abs() as i128;
    (0..d)
        .map(|i| {
            let s: i128 = (0..d).map(|j| adj[(i, j)] * k[j] as i128).sum();
            (s.rem_euclid(det)) as i64
        })
        .collect()
}

/// Solve `M w = v` exactly over the integers; `None` if not solvable.
pub fn solve_int(m: &IMat, v: &IVec) -> Option<IVec> {
    let adj = adjugate(m);
    let det = int_det(m);
    let d = m.nrows();
    let mut w = Vec::with_capacity(d);
    for i in 0..d {
        let s: i128 = (0..d).map(|j| adj[(i, j)] * v[j] as i128).sum();
        if s % det != 0 {
            return None;
        }
        w.push((s / det) as i64);
    }
    Some(IVec::from_vec(w))
}

/// Deterministic digit set for `Z^d / A Z^d`.
///
/// Scans the non-negative box `[0, R]^d` in lexicographic order first and
/// then the rest of the centered box `[-R, R]^d`, keeping the first vector
/// seen in each coset; `R = m * max |A_ij|`. The non-negative-first order
/// makes the standard choices come out for diagonal dilations
/// (`{0,1}^d` for `2I`, `{0,..,m-1}` in one dimension).
pub fn digit_representatives(a: &IMat) -> Result<Vec<IVec>, GroupError> {
    let det = int_det(a);
    let m = det.unsigned_abs() as usize;
    if m < 2 {
        return Err(GroupError::InvalidSpec(format!(
            "dilation must have |det A| >= 2, got {m}"
        )));
    }
    let d = a.nrows();
    let max_entry = a.iter().map(|e| e.abs()).max().unwrap_or(0);
    let radius = (m as i64) * max_entry;
    let mut found: BTreeMap<Vec<i64>, IVec> = BTreeMap::new();
    let mut order: Vec<Vec<i64>> = Vec::new();

    let scan = |lo: i64, hi: i64, found: &mut BTreeMap<Vec<i64>, IVec>, order: &mut Vec<Vec<i64>>| {
        let mut k = vec![lo; d];
        loop {
            let kv = IVec::from_vec(k.clone());
            let key = coset_key(a, &kv);
            if !found.contains_key(&key) {
                found.insert(key.clone(), kv);
                order.push(key);
                if found.len() == m {
                    return true;
                }
            }
            // lexicographic increment
            let mut axis = d;
            while axis > 0 {
                axis -= 1;
                if k[axis] < hi {
                    k[axis] += 1;
                    for t in k.iter_mut().skip(axis + 1) {
                        *t = lo;
                    }
                    break;
                }
                if axis == 0 {
                    return false;
                }
            }
        }
    };

    if !scan(0, radius, &mut found, &mut order) {
        scan(-radius, radius, &mut found, &mut order);
    }
    if found.len() != m {
        return Err(GroupError::DigitSearchFailed { radius });
    }
    Ok(order.into_iter().map(|key| found.remove(&key).unwrap()).collect())
}

/// Validate a candidate dilation for a triple: expanding, normalizes the
/// point group, and admits digit sets. Returns the populated [`Dilation`].
pub fn check_admissible(
    a: &IMat,
    triple: &SplittingCrystalTriple,
) -> Result<Dilation, GroupError> {
    let d = triple.dimension();
    assert_eq!(a.nrows(), d, "dilation dimension mismatch");
    assert_eq!(a.ncols(), d, "dilation dimension mismatch");

    // Expanding: eigenvalue moduli > 1 (tolerance 1e-9), cross-checked by
    // decay of ||A^{-n}|| to guard borderline eigenvalue estimates.
    let af = int_to_f64(a);
    let moduli = crate::linalg::eigen_moduli_real(&af);
    let min_modulus = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_modulus <= 1.0 + 1e-9 {
        return Err(GroupError::NotExpanding { min_modulus });
    }
    let a_inv = af
        .clone()
        .try_inverse()
        .ok_or(GroupError::NotExpanding { min_modulus: 0.0 })?;
    let mut pow = DMatrix::<f64>::identity(d, d);
    let mut decayed = false;
    for _ in 0..64 {
        pow = &pow * &a_inv;
        if op_norm_real(&pow) < 1.0 - 1e-9 {
            decayed = true;
            break;
        }
    }
    if !decayed {
        return Err(GroupError::NotExpanding { min_modulus });
    }

    let det = int_det(a);
    let m = det.unsigned_abs() as usize;

    // Conjugation A g A^{-1} must send the group to itself. Exact
    // arithmetic: A g adj(A) must be divisible by det entrywise.
    let adj = adjugate(a);
    let r = triple.order();
    let mut h_perm = Vec::with_capacity(r);
    for i in 0..r {
        let g = triple.group.element(i);
        let num = DMatrix::<i128>::from_fn(d, d, |p, q| {
            (0..d)
                .map(|s| {
                    (0..d)
                        .map(|t| a[(p, s)] as i128 * g[(s, t)] as i128 * adj[(t, q)])
                        .sum::<i128>()
                })
                .sum()
        });
        if num.iter().any(|e| e % det != 0) {
            return Err(GroupError::NotNormalizing { index: i });
        }
        let conj = IMat::from_fn(d, d, |p, q| (num[(p, q)] / det) as i64);
        match triple.group.find(&conj) {
            Some(idx) => h_perm.push(idx),
            None => return Err(GroupError::NotNormalizing { index: i }),
        }
    }

    let digits = digit_representatives(a)?;
    let dual_digits = digit_representatives(&a.transpose())?;

    Ok(Dilation {
        matrix: a.clone(),
        m,
        h_perm,
        digits,
        dual_digits,
    })
}

/// The permutations induced by a dilation on the point group indices.
#[derive(Debug, Clone)]
pub struct Perms {
    /// `g_{h(i)} = A g_i A^{-1}`
    pub h: Vec<usize>,
    /// `g_{rho[i][j]} = g_{h(i)}^{-1} g_j`
    pub rho: Vec<Vec<usize>>,
    /// `g_{sigma[i][j]} = g_i g_j`
    pub sigma: Vec<Vec<usize>>,
    /// `g_{s[i][j]} = g_{h(i)} g_j`; inverse permutation of `rho[i]`
    pub s: Vec<Vec<usize>>,
}

pub fn perms(dilation: &Dilation, group: &super::PointGroup) -> Perms {
    let r = group.order();
    let h = dilation.h_perm().to_vec();
    let mut rho = vec![vec![0usize; r]; r];
    let mut sigma = vec![vec![0usize; r]; r];
    let mut s = vec![vec![0usize; r]; r];
    for i in 0..r {
        let hi_inv = group.inverse_index(h[i]);
        for j in 0..r {
            rho[i][j] = group.compose_index(hi_inv, j);
            sigma[i][j] = group.compose_index(i, j);
            s[i][j] = group.compose_index(h[i], j);
        }
    }
    Perms { h, rho, sigma, s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{preset, GroupElement};

    #[test]
    fn two_i_on_cm() {
        let t = preset("cm-diag").unwrap();
        let a = IMat::from_row_slice(2, 2, &[2, 0, 0, 2]);
        let dil = check_admissible(&a, &t).unwrap();
        assert_eq!(dil.m(), 4);
        // A commutes with every g, so h is the identity permutation.
        assert_eq!(dil.h_perm(), &[0, 1]);
        let expected: Vec<Vec<i64>> =
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]];
        let mut got: Vec<Vec<i64>> = dil
            .digits()
            .iter()
            .map(|v| v.iter().copied().collect())
            .collect();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn quincunx_fails_to_normalize_pm() {
        let t = preset("pm").unwrap();
        let a = IMat::from_row_slice(2, 2, &[1, 1, -1, 1]);
        // A s A^{-1} = [[0,-1],[-1,0]] which is not in {I, diag(1,-1)}.
        match check_admissible(&a, &t) {
            Err(GroupError::NotNormalizing { index }) => assert_eq!(index, 1),
            other => panic!("expected NotNormalizing, got {other:?}"),
        }
    }

    #[test]
    fn identity_is_not_expanding() {
        let t = preset("p1").unwrap();
        let a = IMat::identity(2, 2);
        assert!(matches!(
            check_admissible(&a, &t),
            Err(GroupError::NotExpanding { .. })
        ));
    }

    #[test]
    fn digits_for_standard_dilations() {
        // a = 3 in one dimension
        let a1 = IMat::from_row_slice(1, 1, &[3]);
        let d1: Vec<i64> = digit_representatives(&a1)
            .unwrap()
            .iter()
            .map(|v| v[0])
            .collect();
        assert_eq!(d1, vec![0, 1, 2]);
        // quincunx: two representatives, pairwise incongruent
        let q = IMat::from_row_slice(2, 2, &[1, 1, -1, 1]);
        let dq = digit_representatives(&q).unwrap();
        assert_eq!(dq.len(), 2);
        // oracle: brute-force congruence check over the box [-2,2]^2
        let key0 = coset_key(&q, &dq[0]);
        let key1 = coset_key(&q, &dq[1]);
        assert_ne!(key0, key1);
        let mut seen = std::collections::BTreeSet::new();
        for x in -2..=2i64 {
            for y in -2..=2i64 {
                seen.insert(coset_key(&q, &IVec::from_vec(vec![x, y])));
            }
        }
        assert_eq!(seen.len(), 2);
        assert!(seen.contains(&key0) && seen.contains(&key1));
    }

    #[test]
    fn digit_coset_map_is_exact_partition() {
        // (digit, lattice point) -> digit + A point is injective and covers
        // a finite test box exactly.
        let a = IMat::from_row_slice(2, 2, &[2, 0, 0, 2]);
        let digits = digit_representatives(&a).unwrap();
        let mut hit = std::collections::BTreeSet::new();
        for dg in &digits {
            for x in -4..=4i64 {
                for y in -4..=4i64 {
                    let p = dg + &a * IVec::from_vec(vec![x, y]);
                    let key: Vec<i64> = p.iter().copied().collect();
                    assert!(hit.insert(key), "coset decomposition not injective");
                }
            }
        }
        // every point of the inner box is covered
        for x in -3..=3i64 {
            for y in -3..=3i64 {
                assert!(hit.contains(&vec![x, y]));
            }
        }
    }

    #[test]
    fn perm_tables_on_cm() {
        let t = preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap();
        let p = perms(t.dilation().unwrap(), &t.group);
        assert_eq!(p.h, vec![0, 1]);
        assert_eq!(p.rho[0], vec![0, 1]);
        // g_{h_2}^{-1} g_j = s g_j enumerated by hand: rho_2 = (1 2)
        assert_eq!(p.rho[1], vec![1, 0]);
        // sigma_1 = id always
        assert_eq!(p.sigma[0], vec![0, 1]);
        // rho_i ∘ s_i = id
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(p.rho[i][p.s[i][j]], j);
                assert_eq!(p.s[i][p.rho[i][j]], j);
            }
        }
    }

    #[test]
    fn h_is_group_automorphism_on_indices() {
        let t = preset("p4")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap();
        let dil = t.dilation().unwrap();
        let h = dil.h_perm();
        let g = &t.group;
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    g.compose_index(h[i], h[j]),
                    h[g.compose_index(i, j)]
                );
            }
        }
    }

    #[test]
    fn coset_of_roundtrip() {
        let t = preset("cm-diag")
            .unwrap()
            .with_dilation(IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap();
        let dil = t.dilation().unwrap();
        let k = IVec::from_vec(vec![5, -3]);
        let (idx, w) = dil.coset_of(&k);
        let rebuilt = &dil.digits()[idx] + dil.matrix() * w;
        assert_eq!(rebuilt, k);
        let _ = GroupElement::identity(2);
    }
}
