//! Shared fixtures for the benchmark targets.

use num_complex::Complex64;

use crystal_wavelets::*;

pub fn cm_triple() -> SplittingCrystalTriple {
    preset("cm-diag")
        .unwrap()
        .with_dilation(IMat::identity(2, 2) * 2)
        .unwrap()
}

pub fn cm_haar_bank(t: &SplittingCrystalTriple) -> FilterBank {
    let c = lift_mask(&refine::cm_haar_mask(), t).unwrap();
    complete_constant_polyphase(&c, t).unwrap()
}

/// Deterministic pseudo-random two-channel data on a square box.
pub fn random_data(side: i64, seed: u64) -> VectorSequence {
    let grid = GridBox::new(vec![0, 0], vec![side - 1, side - 1]);
    let mut s = VectorSequence::zeros(grid.clone(), 2);
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for idx in grid.iter() {
        for ch in 0..2 {
            s.set(&idx, ch, Complex64::new(next(), next()));
        }
    }
    s
}

/// The golden-ratio pair of unitriangular matrices.
pub fn golden_pair() -> MatrixSet {
    let m1 = CMat::from_fn(2, 2, |i, j| {
        Complex64::new(if i == 0 || j == 1 { 1.0 } else { 0.0 }, 0.0)
    });
    let m2 = CMat::from_fn(2, 2, |i, j| {
        Complex64::new(if i == 1 || j == 0 { 1.0 } else { 0.0 }, 0.0)
    });
    MatrixSet::new(vec![m1, m2]).unwrap()
}
