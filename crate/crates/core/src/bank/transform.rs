use num_complex::Complex64;

use crate::group::SplittingCrystalTriple;
use crate::linalg::{int_to_f64, IVec};
use crate::refine::GridBox;

use super::{BankError, FilterBank};

/// An `r`-channel complex sequence on a box of lattice indices. Reads
/// outside the box are zero; the transform treats data as zero-padded.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    grid: GridBox,
    channels: usize,
    values: Vec<Complex64>,
}

impl VectorSequence {
    pub fn zeros(grid: GridBox, channels: usize) -> Self {
        let n = grid.cells() * channels;
        Self {
            grid,
            channels,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &GridBox {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, idx: &[i64], channel: usize) -> Complex64 {
        match self.grid.offset(idx) {
            Some(off) => self.values[off * self.channels + channel],
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn set(&mut self, idx: &[i64], channel: usize, value: Complex64) {
        let off = self.grid.offset(idx).expect("index in box");
        self.values[off * self.channels + channel] = value;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Plain ℓ² energy.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_difference_on(&self, other: &VectorSequence, grid: &GridBox) -> f64 {
        let mut worst = 0.0f64;
        for idx in grid.iter() {
            for ch in 0..self.channels {
                worst = worst.max((self.get(&idx, ch) - other.get(&idx, ch)).norm());
            }
        }
        worst
    }
}

/// Bounding box of `A^{-1}(box − supp)` over the mask support, i.e. all
/// output indices the analysis step can touch.
fn analysis_box(
    triple: &SplittingCrystalTriple,
    input: &GridBox,
    support: &[IVec],
) -> Result<GridBox, BankError> {
    let dil = triple.dilation()?;
    let a_inv = int_to_f64(dil.matrix()).try_inverse().expect("expanding");
    let d = input.dimension();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for k in support {
        for corner in 0..(1usize << d) {
            let x = nalgebra::DVector::from_fn(d, |t, _| {
                (if corner >> t & 1 == 1 { input.hi[t] } else { input.lo[t] }) as f64
                    - k[t] as f64
            });
            let y = &a_inv * x;
            for t in 0..d {
                lo[t] = lo[t].min(y[t].ceil() as i64 - 1);
                hi[t] = hi[t].max(y[t].floor() as i64 + 1);
            }
        }
    }
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Err(BankError::BoxUnderflow);
    }
    Ok(GridBox::new(lo, hi))
}

/// One analysis step: channel `i` of `w_l[v]` is the conjugated row `i`
/// of `c̃_{l,k−Av}` against `s[k]`, summed over `k` and scaled by
/// `m^{-1/2}`. Rows are the atoms here: the wavelet functions are built
/// from mask rows, so the quadrature identity of the bank makes exactly
/// this contraction orthonormal. One output sequence per mask, index 0
/// the scaling channel.
pub fn analyze_one_level(
    bank: &FilterBank,
    s: &VectorSequence,
    triple: &SplittingCrystalTriple,
) -> Result<Vec<VectorSequence>, BankError> {
    let dil = triple.dilation()?;
    let r = triple.order();
    if s.channels() != r {
        return Err(BankError::DimensionMismatch(format!(
            "input has {} channels, group order is {r}",
            s.channels()
        )));
    }
    let a = dil.matrix();
    let scale = Complex64::new(1.0 / (dil.m() as f64).sqrt(), 0.0);
    let d = triple.dimension();

    let mut out = Vec::with_capacity(bank.m());
    for l in 0..bank.m() {
        let c = bank.mask(l);
        let support = c.support();
        let grid = analysis_box(triple, s.grid(), &support)?;
        let mut w = VectorSequence::zeros(grid.clone(), r);
        for v in grid.iter() {
            let av = a * IVec::from_vec(v.clone());
            for (k, mat) in c.iter() {
                let src: Vec<i64> = (0..d).map(|t| k[t] + av[t]).collect();
                if !s.grid().contains(&src) {
                    continue;
                }
                for i in 0..r {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t in 0..r {
                        acc += mat[(i, t)].conj() * s.get(&src, t);
                    }
                    if acc.norm() != 0.0 {
                        let cur = w.get(&v, i);
                        w.set(&v, i, cur + scale * acc);
                    }
                }
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// One synthesis step, the adjoint of [`analyze_one_level`]: each output
/// channel `t` collects `Σ_l Σ_v Σ_i c̃_{l,k−Av}[i][t] w_l[v][i]`, scaled
/// by `m^{-1/2}` (the transposed mask acting on the coefficients).
pub fn synthesize_one_level(
    bank: &FilterBank,
    ws: &[VectorSequence],
    triple: &SplittingCrystalTriple,
) -> Result<VectorSequence, BankError> {
    let dil = triple.dilation()?;
    let r = triple.order();
    if ws.len() != bank.m() {
        return Err(BankError::WrongMaskCount {
            expected: bank.m(),
            got: ws.len(),
        });
    }
    let a = dil.matrix();
    let d = triple.dimension();
    let scale = Complex64::new(1.0 / (dil.m() as f64).sqrt(), 0.0);

    // output box: union over l of A·w_box + supp_l
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for (l, w) in ws.iter().enumerate() {
        let support = bank.mask(l).support();
        for corner in 0..(1usize << d) {
            let v = IVec::from_fn(d, |t, _| {
                if corner >> t & 1 == 1 { w.grid().hi[t] } else { w.grid().lo[t] }
            });
            let av = a * v;
            for k in &support {
                for t in 0..d {
                    lo[t] = lo[t].min(av[t] + k[t]);
                    hi[t] = hi[t].max(av[t] + k[t]);
                }
            }
        }
    }
    let mut s = VectorSequence::zeros(GridBox::new(lo, hi), r);
    for (l, w) in ws.iter().enumerate() {
        let c = bank.mask(l);
        for v in w.grid().iter() {
            let av = a * IVec::from_vec(v.clone());
            for (k, mat) in c.iter() {
                let dst: Vec<i64> = (0..d).map(|t| k[t] + av[t]).collect();
                for t in 0..r {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..r {
                        acc += mat[(i, t)] * w.get(&v, i);
                    }
                    if acc.norm() != 0.0 {
                        let cur = s.get(&dst, t);
                        s.set(&dst, t, cur + scale * acc);
                    }
                }
            }
        }
    }
    Ok(s)
}

/// A multilevel decomposition: `details[j]` holds the `m − 1` wavelet
/// channels produced at level `j`, `coarse` the final scaling channel.
#[derive(Debug, Clone)]
pub struct Pyramid {
    pub details: Vec<Vec<VectorSequence>>,
    pub coarse: VectorSequence,
}

/// Iterate the analysis step `levels` times on the scaling channel.
pub fn transform_multilevel(
    bank: &FilterBank,
    s: &VectorSequence,
    levels: usize,
    triple: &SplittingCrystalTriple,
) -> Result<Pyramid, BankError> {
    assert!(levels >= 1, "at least one level");
    let mut details = Vec::with_capacity(levels);
    let mut coarse = s.clone();
    for _ in 0..levels {
        let mut ws = analyze_one_level(bank, &coarse, triple)?;
        let next = ws.remove(0);
        details.push(ws);
        coarse = next;
    }
    Ok(Pyramid { details, coarse })
}

/// Invert [`transform_multilevel`].
pub fn inverse_transform_multilevel(
    bank: &FilterBank,
    pyramid: &Pyramid,
    triple: &SplittingCrystalTriple,
) -> Result<VectorSequence, BankError> {
    let mut coarse = pyramid.coarse.clone();
    for ws in pyramid.details.iter().rev() {
        let mut all = Vec::with_capacity(bank.m());
        all.push(coarse);
        all.extend(ws.iter().cloned());
        coarse = synthesize_one_level(bank, &all, triple)?;
    }
    Ok(coarse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{preset, GroupElement};
    use crate::refine::{cm_haar_mask, lift_mask, ScalarMask};

    fn z1() -> SplittingCrystalTriple {
        preset("z1")
            .unwrap()
            .with_dilation(crate::linalg::IMat::from_row_slice(1, 1, &[2]))
            .unwrap()
    }

    fn cm() -> SplittingCrystalTriple {
        preset("cm-diag")
            .unwrap()
            .with_dilation(crate::linalg::IMat::from_row_slice(2, 2, &[2, 0, 0, 2]))
            .unwrap()
    }

    fn classical_bank(t: &SplittingCrystalTriple) -> FilterBank {
        let scaling = ScalarMask::indicator(
            1,
            &[GroupElement::new(0, vec![0]), GroupElement::new(0, vec![1])],
        );
        let c = lift_mask(&scaling, t).unwrap();
        super::super::complete_constant_polyphase(&c, t).unwrap()
    }

    fn cm_bank(t: &SplittingCrystalTriple) -> FilterBank {
        let c = lift_mask(&cm_haar_mask(), t).unwrap();
        super::super::complete_constant_polyphase(&c, t).unwrap()
    }

    /// Deterministic pseudo-random complex data.
    fn random_sequence(grid: GridBox, channels: usize, seed: u64) -> VectorSequence {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut s = VectorSequence::zeros(grid.clone(), channels);
        for idx in grid.iter() {
            for ch in 0..channels {
                s.set(&idx, ch, Complex64::new(next(), next()));
            }
        }
        s
    }

    #[test]
    fn classical_haar_analysis_values() {
        // s = (1,1,0,0): w0 = (√2, 0), w1 = (0, 0) in this normalization
        let t = z1();
        let bank = classical_bank(&t);
        let mut s = VectorSequence::zeros(GridBox::new(vec![0], vec![3]), 1);
        s.set(&[0], 0, Complex64::new(1.0, 0.0));
        s.set(&[1], 0, Complex64::new(1.0, 0.0));
        let ws = analyze_one_level(&bank, &s, &t).unwrap();
        let sqrt2 = 2.0f64.sqrt();
        assert!((ws[0].get(&[0], 0) - Complex64::new(sqrt2, 0.0)).norm() < 1e-12);
        assert!(ws[0].get(&[1], 0).norm() < 1e-12);
        for v in ws[1].grid().iter() {
            assert!(ws[1].get(&v, 0).norm() < 1e-12);
        }
        // synthesize back
        let back = synthesize_one_level(&bank, &ws, &t).unwrap();
        assert!(back.max_difference_on(&s, s.grid()) < 1e-12);
    }

    #[test]
    fn zero_in_zero_out() {
        let t = z1();
        let bank = classical_bank(&t);
        let s = VectorSequence::zeros(GridBox::new(vec![0], vec![7]), 1);
        let ws = analyze_one_level(&bank, &s, &t).unwrap();
        for w in &ws {
            assert!(w.energy() == 0.0);
        }
        let back = synthesize_one_level(&bank, &ws, &t).unwrap();
        assert!(back.energy() == 0.0);
    }

    #[test]
    fn parseval_and_reconstruction_cm() {
        let t = cm();
        let bank = cm_bank(&t);
        let s = random_sequence(GridBox::new(vec![0, 0], vec![15, 15]), 2, 7);
        let ws = analyze_one_level(&bank, &s, &t).unwrap();
        let energy: f64 = ws.iter().map(|w| w.energy()).sum();
        assert!(
            (energy - s.energy()).abs() <= 1e-10,
            "energy {energy} vs {}",
            s.energy()
        );
        let back = synthesize_one_level(&bank, &ws, &t).unwrap();
        assert!(back.max_difference_on(&s, s.grid()) <= 1e-12);
        // reconstruction is exact outside the original box as well
        assert!(back.max_difference_on(&s, back.grid()) <= 1e-12);
    }

    #[test]
    fn multilevel_round_trip() {
        let t = cm();
        let bank = cm_bank(&t);
        let s = random_sequence(GridBox::new(vec![0, 0], vec![15, 15]), 2, 99);
        let pyramid = transform_multilevel(&bank, &s, 3, &t).unwrap();
        assert_eq!(pyramid.details.len(), 3);
        assert_eq!(pyramid.details[0].len(), 3);
        let back = inverse_transform_multilevel(&bank, &pyramid, &t).unwrap();
        assert!(back.max_difference_on(&s, back.grid()) <= 1e-9);
    }

    #[test]
    fn constant_input_kills_wavelet_channels() {
        let t = z1();
        let bank = classical_bank(&t);
        let mut s = VectorSequence::zeros(GridBox::new(vec![0], vec![31]), 1);
        for j in 0..32 {
            s.set(&[j], 0, Complex64::new(1.0, 0.0));
        }
        let pyramid = transform_multilevel(&bank, &s, 2, &t).unwrap();
        for (level, ws) in pyramid.details.iter().enumerate() {
            for w in ws {
                // interior coefficients vanish; the boundary sees the cutoff
                let interior = GridBox::new(
                    vec![w.grid().lo[0] + 1],
                    vec![w.grid().hi[0] - 1],
                );
                for v in interior.iter() {
                    assert!(
                        w.get(&v, 0).norm() < 1e-12,
                        "level {level} v {v:?}"
                    );
                }
            }
        }
    }
}
