use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::group::{Dilation, SplittingCrystalTriple};
use crate::linalg::{int_to_f64, ivec_to_f64, max_abs_entry, CMat, IVec};
use crate::refine::{MatrixMask, RefineError, ScalarMask};

use super::{FrequencyGrid, SpectralError, TrigMatrixPolynomial};

/// Symbol of a matrix mask: `M(ω) = (1/m) Σ_k c̃_k e^{-2πi k·ω}`, the
/// unique trigonometric polynomial with `Φ̂(Aᵀω) = M(ω) Φ̂(ω)` for the
/// refinable limit.
pub fn symbol_from_mask(c: &MatrixMask, m: usize) -> TrigMatrixPolynomial {
    let r = c.size();
    let mut p = TrigMatrixPolynomial::new(c.dimension(), r, r, 1.0 / m as f64);
    for (k, mat) in c.iter() {
        p.insert(k.clone(), mat.clone());
    }
    p
}

/// Alternative symbol construction indexing the scalar coefficients with
/// the composition permutations `σ` instead of the conjugation
/// permutations: `c̃0_k[i][j] = d` at `(g_{σ_i^{-1}(j)}, g_j^{-1}(k))`.
/// Exposed for cross-validation against [`symbol_from_mask`]; the two
/// agree whenever the dilation commutes with the point group.
pub fn symbol_from_scalar_sigma(
    d: &ScalarMask,
    triple: &SplittingCrystalTriple,
) -> Result<TrigMatrixPolynomial, RefineError> {
    let dil = triple.dilation.as_ref().ok_or(RefineError::NoDilation)?;
    let r = triple.order();
    let dim = triple.dimension();
    // candidate support: k = g_j(t)
    let mut candidates = std::collections::BTreeSet::new();
    for (el, _) in d.iter() {
        for j in 0..r {
            let k = triple.group.element(j) * el.translation_vec();
            candidates.insert(k.iter().copied().collect::<Vec<i64>>());
        }
    }
    let mut p = TrigMatrixPolynomial::new(dim, r, r, 1.0 / dil.m() as f64);
    for k in candidates {
        let kv = IVec::from_vec(k.clone());
        let mat = CMat::from_fn(r, r, |i, j| {
            // σ_i^{-1}(j) is the index of g_i^{-1} g_j
            let si = triple
                .group
                .compose_index(triple.group.inverse_index(i), j);
            let gj_inv = triple.group.element(triple.group.inverse_index(j));
            let t = gj_inv * &kv;
            d.get(si, t.as_slice())
        });
        p.insert(k, mat);
    }
    Ok(p)
}

/// Polyphase components of a mask:
/// `u_h(ω) = (1/√m) Σ_κ c̃_{Aκ + d_h} e^{-2πi κ·ω}`, one per digit.
pub fn polyphase(c: &MatrixMask, dilation: &Dilation) -> Vec<TrigMatrixPolynomial> {
    let m = dilation.m();
    let r = c.size();
    let dim = c.dimension();
    let norm = 1.0 / (m as f64).sqrt();
    let mut us: Vec<TrigMatrixPolynomial> = (0..m)
        .map(|_| TrigMatrixPolynomial::new(dim, r, r, norm))
        .collect();
    for (k, mat) in c.iter() {
        let kv = IVec::from_vec(k.clone());
        let (h, kappa) = dilation.coset_of(&kv);
        us[h].insert(kappa.iter().copied().collect(), mat.clone());
    }
    us
}

/// Largest deviation, over a frequency grid, of
/// `M(ω)` from `Σ_h m^{-1/2} e^{-2πi d_h·ω} u_h(Aᵀω)`.
pub fn polyphase_reconstruction_defect(
    symbol: &TrigMatrixPolynomial,
    us: &[TrigMatrixPolynomial],
    dilation: &Dilation,
    grid: &FrequencyGrid,
) -> f64 {
    let at = int_to_f64(&dilation.matrix().transpose());
    let m_half = (dilation.m() as f64).sqrt();
    let mut worst = 0.0f64;
    for omega in grid.points() {
        let direct = symbol.eval(&omega);
        let aw: Vec<f64> = {
            let w = nalgebra::DVector::from_vec(omega.clone());
            (&at * w).iter().copied().collect()
        };
        let mut acc = CMat::zeros(direct.nrows(), direct.ncols());
        for (h, u) in us.iter().enumerate() {
            let dh = ivec_to_f64(&dilation.digits()[h]);
            let phase: f64 = dh
                .iter()
                .zip(&omega)
                .map(|(d, w)| d * w)
                .sum();
            let z = Complex64::from_polar(1.0 / m_half, -TAU * phase);
            acc += u.eval(&aw) * z;
        }
        worst = worst.max(max_abs_entry(&(direct - acc)));
    }
    worst
}

/// The block modulation matrix
/// `𝓜(ω) = [ M_i(ω + (Aᵀ)^{-1} ϱ_j) ]_{i,j}` with one block row per
/// symbol and one block column per dual digit.
pub fn modulation_matrix(
    symbols: &[TrigMatrixPolynomial],
    omega: &[f64],
    dilation: &Dilation,
) -> Result<CMat, SpectralError> {
    if symbols.is_empty() {
        return Err(SpectralError::DimensionMismatch("no symbols".into()));
    }
    let (r, rc) = symbols[0].shape();
    if r != rc || symbols.iter().any(|s| s.shape() != (r, r)) {
        return Err(SpectralError::DimensionMismatch(
            "symbols must be square blocks of one size".into(),
        ));
    }
    let m = dilation.m();
    let at_inv = int_to_f64(&dilation.matrix().transpose())
        .try_inverse()
        .expect("expanding dilation");
    let rows = symbols.len();
    let mut out = CMat::zeros(rows * r, m * r);
    for (j, rho) in dilation.dual_digits().iter().enumerate() {
        let shift = &at_inv * ivec_to_f64(rho);
        let w: Vec<f64> = omega
            .iter()
            .zip(shift.iter())
            .map(|(a, b)| a + b)
            .collect();
        for (i, sym) in symbols.iter().enumerate() {
            let block = sym.eval(&w);
            for a in 0..r {
                for b in 0..r {
                    out[(i * r + a, j * r + b)] = block[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct UnitarityReport {
    /// Max over the grid of `‖X(ω) X(ω)* − I‖` (largest absolute entry).
    /// For rectangular `X` this measures row-orthonormality.
    pub max_defect: f64,
    pub argmax: Vec<f64>,
}

fn row_orthonormality_defect(x: &CMat) -> f64 {
    let gram = x * x.adjoint();
    let id = CMat::identity(gram.nrows(), gram.ncols());
    max_abs_entry(&(gram - id))
}

/// Unitarity defect of the modulation matrix over a frequency grid.
/// With all `m` symbols present this tests genuine unitarity; with fewer
/// block rows (e.g. the scaling symbol alone) it tests row-orthonormality.
pub fn unitarity_defect_modulation(
    symbols: &[TrigMatrixPolynomial],
    dilation: &Dilation,
    grid: &FrequencyGrid,
) -> Result<UnitarityReport, SpectralError> {
    let mut worst = 0.0f64;
    let mut argmax = vec![0.0; grid.dimension()];
    for omega in grid.points() {
        let m = modulation_matrix(symbols, &omega, dilation)?;
        let defect = row_orthonormality_defect(&m);
        if defect > worst {
            worst = defect;
            argmax = omega;
        }
    }
    Ok(UnitarityReport {
        max_defect: worst,
        argmax,
    })
}

/// Unitarity defect of the polyphase matrix `𝓤(ω) = [u_{lh}(ω)]` over a
/// grid; `us[l][h]` is the `h`-th polyphase component of mask `l`.
pub fn unitarity_defect_polyphase(
    us: &[Vec<TrigMatrixPolynomial>],
    grid: &FrequencyGrid,
) -> Result<UnitarityReport, SpectralError> {
    if us.is_empty() || us[0].is_empty() {
        return Err(SpectralError::DimensionMismatch("no polyphase rows".into()));
    }
    let (r, rc) = us[0][0].shape();
    if r != rc {
        return Err(SpectralError::DimensionMismatch(
            "polyphase blocks must be square".into(),
        ));
    }
    let cols = us[0].len();
    if us.iter().any(|row| row.len() != cols) {
        return Err(SpectralError::DimensionMismatch(
            "ragged polyphase rows".into(),
        ));
    }
    let mut worst = 0.0f64;
    let mut argmax = vec![0.0; grid.dimension()];
    for omega in grid.points() {
        let mut x = CMat::zeros(us.len() * r, cols * r);
        for (l, row) in us.iter().enumerate() {
            for (h, u) in row.iter().enumerate() {
                let block = u.eval(&omega);
                for a in 0..r {
                    for b in 0..r {
                        x[(l * r + a, h * r + b)] = block[(a, b)];
                    }
                }
            }
        }
        let defect = row_orthonormality_defect(&x);
        if defect > worst {
            worst = defect;
            argmax = omega;
        }
    }
    Ok(UnitarityReport {
        max_defect: worst,
        argmax,
    })
}
