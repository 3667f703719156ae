use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use crate::group::Dilation;
use crate::linalg::{int_pow, int_to_f64, ivec_to_f64, op_norm_real, IVec};

/// Depth-`n` approximation of the attractor of the iterated function
/// system `w_k(x) = A^{-1}(x + k)`, `k ∈ Λ'`.
///
/// The depth-`n` image of the origin is
/// `K_n = { Σ_{t=1..n} A^{-t} k_t : k_t ∈ Λ' } = A^{-n} S_n`
/// with the integer cell set `S_n` built by `S_{t+1} = A S_t + Λ'`.
#[derive(Debug, Clone)]
pub struct AttractorEstimate {
    pub depth: u32,
    /// The integer set `S_n`; points of `K_n` are `A^{-n}` times these.
    pub cells: Vec<Vec<i64>>,
    /// Analytic bound: `max ‖k‖₂ · Σ_{t≥1} ‖A^{-t}‖₂` contains the attractor.
    pub support_radius: f64,
    /// Fraction of a fundamental-domain test box covered a number of times
    /// different from one by lattice translates of `K_n`; only computed
    /// when `Λ'` is a complete set of coset representatives.
    pub tiling_defect: Option<f64>,
}

impl AttractorEstimate {
    /// Points of `K_n` in lattice coordinates.
    pub fn points(&self, a: &crate::linalg::IMat) -> Vec<DVector<f64>> {
        let a_inv_n = int_to_f64(&int_pow(a, self.depth))
            .try_inverse()
            .expect("expanding matrix is invertible");
        self.cells
            .iter()
            .map(|c| &a_inv_n * ivec_to_f64(&IVec::from_vec(c.clone())))
            .collect()
    }
}

/// `Σ_{t≥1} ‖A^{-t}‖₂`, summed until the terms are negligible.
fn inverse_norm_series(a_inv: &DMatrix<f64>) -> f64 {
    let mut total = 0.0;
    let mut pow = a_inv.clone();
    for _ in 0..512 {
        let term = op_norm_real(&pow);
        total += term;
        if term < 1e-16 * (1.0 + total) {
            break;
        }
        pow = &pow * a_inv;
    }
    total
}

/// Outer bounding box of the attractor, found by iterating the box map
/// `X -> hull(∪_k A^{-1}(X + k))` on axis-aligned boxes until it settles.
pub fn attractor_bbox(a: &crate::linalg::IMat, support: &[IVec]) -> (Vec<f64>, Vec<f64>) {
    let d = a.nrows();
    let a_inv = int_to_f64(a).try_inverse().expect("expanding");
    let radius = support
        .iter()
        .map(|k| ivec_to_f64(k).norm())
        .fold(0.0f64, f64::max)
        * inverse_norm_series(&a_inv);
    let mut lo = vec![-radius; d];
    let mut hi = vec![radius; d];
    for _ in 0..200 {
        let mut new_lo = vec![f64::INFINITY; d];
        let mut new_hi = vec![f64::NEG_INFINITY; d];
        // image of each box corner under each map; the image of a box
        // under the affine map is the hull of its corner images
        for k in support {
            let kf = ivec_to_f64(k);
            for corner in 0..(1usize << d) {
                let x = DVector::from_fn(d, |i, _| {
                    if corner >> i & 1 == 1 { hi[i] } else { lo[i] }
                });
                let y = &a_inv * (x + &kf);
                for i in 0..d {
                    new_lo[i] = new_lo[i].min(y[i]);
                    new_hi[i] = new_hi[i].max(y[i]);
                }
            }
        }
        let moved: f64 = (0..d)
            .map(|i| (new_lo[i] - lo[i]).abs() + (new_hi[i] - hi[i]).abs())
            .sum();
        lo = new_lo;
        hi = new_hi;
        if moved < 1e-13 {
            break;
        }
    }
    (lo, hi)
}

/// Compute the depth-`n` attractor estimate for the IFS of a dilation and
/// a finite support set.
pub fn attractor_estimate(
    dilation: &Dilation,
    support: &[IVec],
    depth: u32,
) -> AttractorEstimate {
    assert!(!support.is_empty(), "attractor of an empty support");
    let a = dilation.matrix();
    let d = a.nrows();
    let a_inv = int_to_f64(a).try_inverse().expect("expanding");
    let support_radius = support
        .iter()
        .map(|k| ivec_to_f64(k).norm())
        .fold(0.0f64, f64::max)
        * inverse_norm_series(&a_inv);

    let mut cells: HashSet<Vec<i64>> = HashSet::new();
    cells.insert(vec![0; d]);
    for _ in 0..depth {
        let mut next = HashSet::with_capacity(cells.len() * support.len());
        for c in &cells {
            let cv = IVec::from_vec(c.clone());
            let base = a * cv;
            for k in support {
                let p = &base + k;
                next.insert(p.iter().copied().collect());
            }
        }
        cells = next;
    }
    let mut cells: Vec<Vec<i64>> = cells.into_iter().collect();
    cells.sort();

    let tiling_defect = is_digit_like(dilation, support)
        .then(|| tiling_defect(dilation, &cells, depth));

    AttractorEstimate {
        depth,
        cells,
        support_radius,
        tiling_defect,
    }
}

/// A candidate digit set is any support with exactly `m` elements; the
/// tiling defect is the diagnostic that tells good candidates from bad
/// ones (wrong-coset sets simply score a large defect).
fn is_digit_like(dilation: &Dilation, support: &[IVec]) -> bool {
    support.len() == dilation.m()
}

/// Fraction of the level-`n` cells of one lattice fundamental cube covered
/// a number of times ≠ 1 by `Λ`-translates of the cell set.
fn tiling_defect(dilation: &Dilation, cells: &[Vec<i64>], depth: u32) -> f64 {
    let a = dilation.matrix();
    let d = a.nrows();
    let an = int_pow(a, depth);
    let an_f = int_to_f64(&an);
    let an_inv = an_f.clone().try_inverse().expect("expanding");
    let cell_set: HashSet<&[i64]> = cells.iter().map(|c| c.as_slice()).collect();

    // test cells: level-n cells inside [0,1)^d, i.e. j with A^{-n} j in [0,1)^d
    let mut tb_lo = vec![i64::MAX; d];
    let mut tb_hi = vec![i64::MIN; d];
    for corner in 0..(1usize << d) {
        let x = DVector::from_fn(d, |i, _| if corner >> i & 1 == 1 { 1.0 } else { 0.0 });
        let y = &an_f * x;
        for i in 0..d {
            tb_lo[i] = tb_lo[i].min(y[i].floor() as i64 - 1);
            tb_hi[i] = tb_hi[i].max(y[i].ceil() as i64 + 1);
        }
    }

    // lattice translates that can reach the test cube from the cell bbox
    let mut c_lo = vec![i64::MAX; d];
    let mut c_hi = vec![i64::MIN; d];
    for c in cells {
        for i in 0..d {
            c_lo[i] = c_lo[i].min(c[i]);
            c_hi[i] = c_hi[i].max(c[i]);
        }
    }
    let mut l_lo = vec![i64::MAX; d];
    let mut l_hi = vec![i64::MIN; d];
    for corner in 0..(1usize << (2 * d)) {
        let x = DVector::from_fn(d, |i, _| {
            let t = if corner >> i & 1 == 1 { tb_hi[i] } else { tb_lo[i] } as f64;
            let c = if corner >> (d + i) & 1 == 1 { c_hi[i] } else { c_lo[i] } as f64;
            t - c
        });
        let y = &an_inv * x;
        for i in 0..d {
            l_lo[i] = l_lo[i].min(y[i].floor() as i64 - 1);
            l_hi[i] = l_hi[i].max(y[i].ceil() as i64 + 1);
        }
    }
    let shifts: Vec<IVec> = super::GridBox::new(l_lo, l_hi)
        .iter()
        .map(|lam| &an * IVec::from_vec(lam))
        .collect();

    let mut tested = 0usize;
    let mut bad = 0usize;
    for j in super::GridBox::new(tb_lo.clone(), tb_hi.clone()).iter() {
        let jv = ivec_to_f64(&IVec::from_vec(j.clone()));
        let x = &an_inv * jv;
        if x.iter().any(|&v| !(0.0..1.0).contains(&v)) {
            continue;
        }
        tested += 1;
        let mut count = 0usize;
        for shift in &shifts {
            let shifted: Vec<i64> = (0..d).map(|i| j[i] - shift[i]).collect();
            if cell_set.contains(shifted.as_slice()) {
                count += 1;
            }
        }
        if count != 1 {
            bad += 1;
        }
    }
    if tested == 0 {
        return 0.0;
    }
    bad as f64 / tested as f64
}
