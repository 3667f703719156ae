use num_complex::Complex64;

use crate::group::{GroupElement, SplittingCrystalTriple};
use crate::linalg::{int_pow, int_to_f64, max_abs_entry, CMat, IVec};
use crate::refine::{
    cascade_solve, check_contraction, check_gamma_a_symmetry, lift_mask, transfer_residual,
    CascadeParams, ContractionReport, GridBox, SampledVectorFunction, ScalarMask, SymmetryReport,
};

use super::{BankError, FilterBank};

#[derive(Debug, Clone)]
pub struct ConditionDReport {
    pub ok: bool,
    /// Largest entry violation of
    /// `(1/m) Σ_k c̃_{i,k} c̃*_{j,k−Av} = δ_{0,v} δ_{i,j} I`.
    pub max_violation: f64,
    /// Worst `(i, j, v)` triple.
    pub witness: Option<(usize, usize, Vec<i64>)>,
    /// Largest (Γ,a)-symmetry violation across the masks.
    pub symmetry_violation: f64,
}

/// The discrete orthonormality conditions of a filter bank: every pair of
/// masks must satisfy the shifted quadrature identity, and every mask must
/// be (Γ,a)-symmetric.
pub fn check_condition_d(
    bank: &FilterBank,
    triple: &SplittingCrystalTriple,
    tol: f64,
) -> Result<ConditionDReport, BankError> {
    let dil = triple.dilation()?;
    let r = triple.order();
    let m = dil.m() as f64;
    let a = dil.matrix();

    let mut max_violation = 0.0f64;
    let mut witness = None;
    for i in 0..bank.m() {
        for j in 0..bank.m() {
            let ci = bank.mask(i);
            let cj = bank.mask(j);
            // candidate shifts: v = 0 plus every exact solution of A v = k - k'
            let mut vs: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
            vs.insert(vec![0; triple.dimension()]);
            for (k, _) in ci.iter() {
                for (kp, _) in cj.iter() {
                    let diff = IVec::from_vec(k.clone()) - IVec::from_vec(kp.clone());
                    if let Some(v) = crate::group::solve_int(a, &diff) {
                        vs.insert(v.iter().copied().collect());
                    }
                }
            }
            for v in vs {
                let av = a * IVec::from_vec(v.clone());
                let mut acc = CMat::zeros(r, r);
                for (k, mat) in ci.iter() {
                    let shifted: Vec<i64> = (0..k.len()).map(|t| k[t] - av[t]).collect();
                    if let Some(other) = cj.get(&shifted) {
                        acc += mat * other.adjoint();
                    }
                }
                acc /= Complex64::new(m, 0.0);
                let is_zero_v = v.iter().all(|&t| t == 0);
                if is_zero_v && i == j {
                    acc -= CMat::identity(r, r);
                }
                let violation = max_abs_entry(&acc);
                if violation > max_violation {
                    max_violation = violation;
                    witness = Some((i, j, v.clone()));
                }
            }
        }
    }

    let mut symmetry_violation = 0.0f64;
    for c in bank.masks() {
        let rep: SymmetryReport = check_gamma_a_symmetry(c, triple, tol)?;
        symmetry_violation = symmetry_violation.max(rep.max_violation);
    }

    Ok(ConditionDReport {
        ok: max_violation <= tol && symmetry_violation <= tol,
        max_violation,
        witness: (max_violation > tol).then_some(witness).flatten(),
        symmetry_violation,
    })
}

#[derive(Debug, Clone)]
pub struct OrthonormalityReport {
    /// Max deviation of `⟨D_γ φ, φ⟩` from `δ_{γ,id}` over overlapping `γ`.
    pub defect: f64,
    pub worst: Option<GroupElement>,
    /// `‖φ‖²` under the Riemann sum.
    pub norm_sq: f64,
    /// Crude quadrature error estimate from the total variation of the
    /// samples (boundary-layer volume).
    pub quadrature_estimate: f64,
}

/// Inner products of `φ` (channel 0) against its Γ-translates, reduced by
/// group invariance to pairs `(γ, identity)`.
pub fn check_orthonormal_translates(
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
    tol: f64,
) -> Result<OrthonormalityReport, BankError> {
    let dil = triple.dilation()?;
    let r = triple.order();
    let d = triple.dimension();
    let n = f.level();
    let an = int_pow(dil.matrix(), n);
    let cell_volume = f.cell_volume();

    // quadrature estimate: cells where φ jumps across a face contribute
    // O(cell) each
    let mut jump_cells = 0usize;
    let mut max_val = 0.0f64;
    for j in f.grid().iter() {
        let v = f.get(&j, 0);
        max_val = max_val.max(v.norm());
        for axis in 0..d {
            let mut jn = j.clone();
            jn[axis] += 1;
            if (f.get(&jn, 0) - v).norm() > 1e-12 {
                jump_cells += 1;
                break;
            }
        }
    }
    let quadrature_estimate = jump_cells as f64 * cell_volume * max_val * max_val;
    if quadrature_estimate > tol {
        return Err(BankError::GridTooCoarse {
            estimate: quadrature_estimate,
        });
    }

    let supp = f
        .nonzero_box(0.0)
        .unwrap_or_else(|| GridBox::new(vec![0; d], vec![0; d]));

    let norm_sq: f64 = f
        .grid()
        .iter()
        .map(|j| f.get(&j, 0).norm_sqr())
        .sum::<f64>()
        * cell_volume;

    let mut defect = (norm_sq - 1.0).abs();
    let mut worst = None;

    let an_inv = int_to_f64(&an).try_inverse().expect("expanding");
    for i in 0..r {
        // conjugated point matrix at level n for D_γ reads
        let mut conj_idx = triple.group.inverse_index(i);
        for _ in 0..n {
            conj_idx = dil.h_perm()[conj_idx];
        }
        let gp = triple.group.element(conj_idx);
        // k range: γ^{-1}(supp) must overlap supp
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for corner in 0..(1usize << (2 * d)) {
            let x = nalgebra::DVector::from_fn(d, |t, _| {
                let s = if corner >> t & 1 == 1 { supp.hi[t] } else { supp.lo[t] } as f64;
                let u = if corner >> (d + t) & 1 == 1 { supp.hi[t] } else { supp.lo[t] } as f64;
                let gs: f64 = (0..d).map(|q| gp[(t, q)] as f64 * s).sum();
                gs - u
            });
            let y = &an_inv * x;
            for t in 0..d {
                lo[t] = lo[t].min(y[t].floor() as i64 - 1);
                hi[t] = hi[t].max(y[t].ceil() as i64 + 1);
            }
        }
        for k in GridBox::new(lo, hi).iter() {
            let el = GroupElement::new(i, k.clone());
            if el.is_identity() {
                continue;
            }
            // D_γφ at cell j = φ at cell g'(j) - A^n k
            let ank = &an * el.translation_vec();
            let mut acc = Complex64::new(0.0, 0.0);
            for j in supp.iter() {
                let jm = crate::refine::cell_map(gp, &IVec::from_vec(j.clone()));
                let src: Vec<i64> = (0..d).map(|t| jm[t] - ank[t]).collect();
                let a_val = f.get(&src, 0);
                if a_val.norm() != 0.0 {
                    acc += a_val * f.get(&j, 0).conj();
                }
            }
            let val = (acc * cell_volume).norm();
            if val > defect {
                defect = val;
                worst = Some(el);
            }
        }
    }

    Ok(OrthonormalityReport {
        defect,
        worst,
        norm_sq,
        quadrature_estimate,
    })
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    /// `|φ̂(0)|²` from the Riemann sum of channel 0.
    pub lhs: f64,
    /// `|L| / r`.
    pub rhs: f64,
    pub ok: bool,
}

/// The density condition `|φ̂(0)|² = |L|/r`.
pub fn check_density_condition(
    f: &SampledVectorFunction,
    triple: &SplittingCrystalTriple,
    tol: f64,
) -> DensityReport {
    let lhs = f.integral(0).norm_sqr();
    let rhs = triple.lattice.covolume() / triple.order() as f64;
    DensityReport {
        lhs,
        rhs,
        ok: (lhs - rhs).abs() <= tol,
    }
}

#[derive(Debug, Clone)]
pub struct MraParams {
    pub level: u32,
    pub max_iterations: usize,
    /// Tolerance for the density check.
    pub density_tol: f64,
    /// Tolerance for the refinability residual.
    pub residual_tol: f64,
    /// Tolerance for the orthonormality defect; quadrature-limited checks
    /// compare against `max(tol, quadrature estimate)`.
    pub orthonormality_tol: f64,
    pub symmetry_tol: f64,
}

impl Default for MraParams {
    fn default() -> Self {
        Self {
            level: 6,
            max_iterations: 80,
            density_tol: 1e-6,
            residual_tol: 1e-9,
            orthonormality_tol: 1e-6,
            symmetry_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MraReport {
    pub orthonormality: OrthonormalityReport,
    pub orthonormality_ok: bool,
    /// `‖F − SF‖` at the working level.
    pub refinability_residual: f64,
    pub refinable: bool,
    pub density: DensityReport,
    pub contraction: ContractionReport,
    pub symmetry: SymmetryReport,
    pub cascade_converged: bool,
    /// All checks passed.
    pub ok: bool,
}

/// For a mask with all coefficients 1 and one entry per digit coset, the
/// natural cascade start is the normalized indicator of its own tile
/// attractor.
fn haar_tile_init(
    d: &ScalarMask,
    triple: &SplittingCrystalTriple,
    level: u32,
) -> Option<SampledVectorFunction> {
    let dil = triple.dilation.as_ref()?;
    if d.len() != dil.m() {
        return None;
    }
    let one = Complex64::new(1.0, 0.0);
    if d.iter().any(|(_, v)| (v - one).norm() > 1e-12) {
        return None;
    }
    let pieces: Vec<GroupElement> = d.iter().map(|(el, _)| el).collect();
    let fractions = super::tile_fractions(triple, &pieces, level).ok()?;
    let measure = fractions.integral(0).re;
    if measure <= 0.0 {
        return None;
    }
    let height = Complex64::new(1.0 / measure.sqrt(), 0.0);
    crate::refine::intertwined_from_channel(
        triple,
        level,
        fractions.grid().clone(),
        fractions.cell_volume(),
        |j| fractions.get(j, 0) * height,
    )
    .ok()
}

/// Aggregate multiresolution-analysis checks for a scalar mask: cascade
/// to the requested level, then verify orthonormal translates,
/// refinability, symmetry of the lifted mask, the density condition and
/// the contraction bound.
pub fn check_mra(
    d: &ScalarMask,
    triple: &SplittingCrystalTriple,
    params: &MraParams,
) -> Result<MraReport, BankError> {
    let c = lift_mask(d, triple)?;
    let symmetry = check_gamma_a_symmetry(&c, triple, params.symmetry_tol)?;
    let contraction = check_contraction(d, triple)?;
    if c.is_empty() {
        // zero mask: no cascade; report a zero function on a token grid
        let dim = triple.dimension();
        let f = SampledVectorFunction::zeros(
            params.level,
            triple.order(),
            GridBox::new(vec![0; dim], vec![0; dim]),
            1.0,
        );
        let density = check_density_condition(&f, triple, params.density_tol);
        return Ok(MraReport {
            orthonormality: OrthonormalityReport {
                defect: 1.0,
                worst: None,
                norm_sq: 0.0,
                quadrature_estimate: 0.0,
            },
            orthonormality_ok: false,
            refinability_residual: 0.0,
            refinable: true,
            density,
            contraction,
            symmetry,
            cascade_converged: true,
            ok: false,
        });
    }

    let mut cascade_params = CascadeParams::new(params.level);
    cascade_params.max_iterations = params.max_iterations;
    // indicator masks sit on the contraction boundary, where the cascade
    // limit is not unique; seed those with their own tile attractor
    if let Some(init) = haar_tile_init(d, triple, params.level) {
        cascade_params.init = crate::refine::CascadeInit::Given(init);
    }
    let cascade = cascade_solve(&c, triple, &cascade_params)?;
    let f = &cascade.function;

    let refinability_residual = transfer_residual(&c, f, triple)?;
    let orthonormality = check_orthonormal_translates(f, triple, f64::INFINITY)
        .expect("infinite tolerance cannot trip the quadrature guard");
    let density = check_density_condition(f, triple, params.density_tol);

    let ortho_tol = params
        .orthonormality_tol
        .max(orthonormality.quadrature_estimate);
    let orthonormality_ok = orthonormality.defect <= ortho_tol;
    let refinable = refinability_residual <= params.residual_tol;
    let ok = orthonormality_ok && refinable && density.ok && symmetry.ok;
    Ok(MraReport {
        orthonormality,
        orthonormality_ok,
        refinability_residual,
        refinable,
        density,
        contraction,
        symmetry,
        cascade_converged: cascade.converged,
        ok,
    })
}
