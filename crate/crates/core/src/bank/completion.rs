use num_complex::Complex64;

use crate::group::{perms, GroupElement, SplittingCrystalTriple};
use crate::linalg::{hermitian_inv_sqrt, CMat, CVec, IVec};
use crate::refine::{extract_scalar, MatrixMask, ScalarMask};

use super::{check_condition_d, BankError, FilterBank};

/// Slot layout of the scalar parameter space: slot `(p, h)` holds the
/// coefficient of the group element `(g_p, g_p^{-1}(k_h))`, where `k_h`
/// runs over the scaling mask's support. Symmetric masks supported on one
/// lattice point per coset are exactly the lifts of these `r·m`-vectors.
struct ParameterSpace {
    r: usize,
    m: usize,
    /// support points in a fixed order: `support[h] = k_h`
    support: Vec<IVec>,
    /// permutation action on slots: `perm[i][slot]` = image slot of the
    /// `i`-th symmetry
    perm: Vec<Vec<usize>>,
}

impl ParameterSpace {
    fn slot(&self, p: usize, h: usize) -> usize {
        p * self.m + h
    }

    fn build(
        triple: &SplittingCrystalTriple,
        support: Vec<IVec>,
    ) -> Result<Self, BankError> {
        let dil = triple.dilation()?;
        let r = triple.order();
        let m = dil.m();
        let p = perms(dil, &triple.group);

        // closure of the support under every g_{h_i}^{-1}
        let mut digit_image = vec![vec![0usize; m]; r];
        for (i, row) in digit_image.iter_mut().enumerate() {
            let hi_inv = triple.group.element(triple.group.inverse_index(p.h[i]));
            for (h, k) in support.iter().enumerate() {
                let img = hi_inv * k;
                match support.iter().position(|k| *k == img) {
                    Some(idx) => row[h] = idx,
                    None => {
                        return Err(BankError::NotConstantPolyphase(format!(
                            "support is not closed under the point group: g^-1(k_{h}) = {:?} \
                             is not a support point",
                            img.iter().collect::<Vec<_>>()
                        )))
                    }
                }
            }
        }

        // slot permutations (p, h) -> (rho_i(p), digit_image[i][h]); they
        // form a group of unitaries on the parameter space
        let mut perm = vec![vec![0usize; r * m]; r];
        for i in 0..r {
            for pp in 0..r {
                for h in 0..m {
                    perm[i][pp * m + h] = p.rho[i][pp] * m + digit_image[i][h];
                }
            }
        }

        Ok(Self { r, m, support, perm })
    }

    /// `(Π_i v)[slot] = v[perm[i][slot]]`; these unitaries satisfy
    /// `Π_a Π_b = Π_{comp[a][b]}`.
    fn apply(&self, i: usize, v: &CVec) -> CVec {
        CVec::from_fn(v.len(), |s, _| v[self.perm[i][s]])
    }

    fn scalar_mask(&self, triple: &SplittingCrystalTriple, v: &CVec) -> ScalarMask {
        let mut d = ScalarMask::new(triple.dimension());
        for p in 0..self.r {
            let gp_inv = triple.group.element(triple.group.inverse_index(p));
            for h in 0..self.m {
                let value = v[self.slot(p, h)];
                if value.norm() > 0.0 {
                    let t = gp_inv * &self.support[h];
                    d.add(
                        &GroupElement::new(p, t.iter().copied().collect()),
                        value,
                    );
                }
            }
        }
        d
    }

    fn parameter_vector(&self, d: &ScalarMask, triple: &SplittingCrystalTriple) -> CVec {
        let mut v = CVec::zeros(self.r * self.m);
        for p in 0..self.r {
            let gp_inv = triple.group.element(triple.group.inverse_index(p));
            for h in 0..self.m {
                let t = gp_inv * &self.support[h];
                v[self.slot(p, h)] = d.get(p, t.as_slice());
            }
        }
        v
    }
}

fn inner(x: &CVec, y: &CVec) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b.conj()).sum()
}

/// Complete a constant-polyphase scaling mask to a full orthonormal
/// filter bank of `m` masks.
///
/// The scaling mask must be (Γ,a)-symmetric, supported on exactly one
/// lattice point per coset of `A Z^d`, and its own block row must be
/// orthonormal. Candidate wavelets are scalar parameter vectors over the
/// same support: seeds are standard basis vectors taken in slot order,
/// projected against the symmetry orbits of everything accepted so far
/// and then normalized inside their own orbit through the inverse square
/// root of the orbit Gram matrix (a plain norm division would not make
/// the different rows of the lifted block orthonormal when `r > 1`).
/// Dependent seeds are skipped. The result is deterministic.
pub fn complete_constant_polyphase(
    scaling: &MatrixMask,
    triple: &SplittingCrystalTriple,
) -> Result<FilterBank, BankError> {
    let dil = triple.dilation()?;
    let m = dil.m();
    let r = triple.order();

    // one support point per coset, all cosets present
    let support = scaling.support();
    if support.len() != m {
        return Err(BankError::NotConstantPolyphase(format!(
            "support has {} points, expected one per coset ({m})",
            support.len()
        )));
    }
    let mut seen = vec![false; m];
    for k in &support {
        let (idx, _) = dil.coset_of(k);
        if seen[idx] {
            return Err(BankError::NotConstantPolyphase(format!(
                "two support points in the coset of digit {idx}"
            )));
        }
        seen[idx] = true;
    }

    let d0 = extract_scalar(scaling, triple, 1e-10)
        .map_err(BankError::Refine)?;
    let space = ParameterSpace::build(triple, support)?;
    let v0 = space.parameter_vector(&d0, triple);

    // scaling row must itself be orthonormal: <Π_a v0, Π_b v0> = m δ_ab
    let orbit0: Vec<CVec> = (0..r).map(|i| space.apply(i, &v0)).collect();
    for a in 0..r {
        for b in 0..r {
            let g = inner(&orbit0[a], &orbit0[b]);
            let target = if a == b { m as f64 } else { 0.0 };
            if (g - Complex64::new(target, 0.0)).norm() > 1e-8 {
                return Err(BankError::NotConstantPolyphase(format!(
                    "scaling row is not orthonormal: orbit Gram entry ({a},{b}) = {g}"
                )));
            }
        }
    }

    let sqrt_m = (m as f64).sqrt();
    let mut basis: Vec<CVec> = orbit0
        .iter()
        .map(|o| o / Complex64::new(sqrt_m, 0.0))
        .collect();
    let mut accepted: Vec<CVec> = vec![v0];

    for seed_slot in 0..r * m {
        if accepted.len() == m {
            break;
        }
        let mut u = CVec::zeros(r * m);
        u[seed_slot] = Complex64::new(1.0, 0.0);
        for b in &basis {
            let coeff = inner(&u, b);
            u -= b * coeff;
        }
        if u.norm() < 1e-8 {
            continue;
        }
        // orbit Gram matrix of the residual
        let orbit: Vec<CVec> = (0..r).map(|i| space.apply(i, &u)).collect();
        let gram = CMat::from_fn(r, r, |a, b| inner(&orbit[a], &orbit[b]));
        let inv_sqrt = match hermitian_inv_sqrt(&gram, 1e-10) {
            Some(s) => s * Complex64::new(sqrt_m, 0.0),
            None => continue, // degenerate orbit, skip the seed
        };
        // w = Σ_b q_b Π_b u with q the identity row of √m Γ^{-1/2}
        let mut w = CVec::zeros(r * m);
        for b in 0..r {
            w += &orbit[b] * inv_sqrt[(0, b)];
        }
        let w_orbit: Vec<CVec> = (0..r).map(|i| space.apply(i, &w)).collect();
        // sanity: the orbit must now be orthonormal at scale √m
        let mut ok = true;
        for a in 0..r {
            for b in 0..r {
                let g = inner(&w_orbit[a], &w_orbit[b]);
                let target = if a == b { m as f64 } else { 0.0 };
                if (g - Complex64::new(target, 0.0)).norm() > 1e-8 {
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }
        for o in &w_orbit {
            basis.push(o / Complex64::new(sqrt_m, 0.0));
        }
        accepted.push(w);
    }

    if accepted.len() < m {
        return Err(BankError::CompletionFailed {
            achieved: accepted.len(),
            needed: m,
        });
    }

    let scalar_masks: Vec<ScalarMask> = accepted
        .iter()
        .map(|v| space.scalar_mask(triple, v))
        .collect();
    let bank = FilterBank::from_scalar_masks(scalar_masks, triple)?;
    debug_assert!(
        check_condition_d(&bank, triple, 1e-10)?.ok,
        "completion must produce an orthonormal bank"
    );
    Ok(bank)
}
