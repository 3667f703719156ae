use crate::group::SplittingCrystalTriple;
use crate::refine::{check_gamma_a_symmetry, lift_mask, MatrixMask, ScalarMask};
use crate::spectral::{polyphase, TrigMatrixPolynomial};

use super::BankError;

/// A multiwavelet filter bank: `m` masks, index 0 the scaling mask and
/// 1..m the wavelets, kept in both scalar and lifted matrix form.
#[derive(Debug, Clone)]
pub struct FilterBank {
    scalar_masks: Vec<ScalarMask>,
    masks: Vec<MatrixMask>,
}

impl FilterBank {
    /// Build from scalar masks, lifting each one. Checks the mask count
    /// against `m = |det A|` and the (Γ,a)-symmetry of every lift.
    pub fn from_scalar_masks(
        scalar_masks: Vec<ScalarMask>,
        triple: &SplittingCrystalTriple,
    ) -> Result<Self, BankError> {
        let dil = triple.dilation()?;
        if scalar_masks.len() != dil.m() {
            return Err(BankError::WrongMaskCount {
                expected: dil.m(),
                got: scalar_masks.len(),
            });
        }
        let mut masks = Vec::with_capacity(scalar_masks.len());
        for d in &scalar_masks {
            let c = lift_mask(d, triple)?;
            debug_assert!(check_gamma_a_symmetry(&c, triple, 1e-12)?.ok);
            masks.push(c);
        }
        Ok(Self {
            scalar_masks,
            masks,
        })
    }

    pub fn m(&self) -> usize {
        self.masks.len()
    }

    pub fn scaling(&self) -> &MatrixMask {
        &self.masks[0]
    }

    pub fn mask(&self, l: usize) -> &MatrixMask {
        &self.masks[l]
    }

    pub fn masks(&self) -> &[MatrixMask] {
        &self.masks
    }

    pub fn scalar_mask(&self, l: usize) -> &ScalarMask {
        &self.scalar_masks[l]
    }

    pub fn scalar_masks(&self) -> &[ScalarMask] {
        &self.scalar_masks
    }

    /// Symbols `M_l(ω) = (1/m) Σ_k c̃_{l,k} e^{-2πik·ω}`.
    pub fn symbols(&self, triple: &SplittingCrystalTriple) -> Result<Vec<TrigMatrixPolynomial>, BankError> {
        let m = triple.dilation()?.m();
        Ok(self
            .masks
            .iter()
            .map(|c| crate::spectral::symbol_from_mask(c, m))
            .collect())
    }

    /// Polyphase components `u_{lh}`, one row per mask.
    pub fn polyphase_rows(
        &self,
        triple: &SplittingCrystalTriple,
    ) -> Result<Vec<Vec<TrigMatrixPolynomial>>, BankError> {
        let dil = triple.dilation()?;
        Ok(self.masks.iter().map(|c| polyphase(c, dil)).collect())
    }
}
