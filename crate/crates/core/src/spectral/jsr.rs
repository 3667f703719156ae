use crate::linalg::{eigen_moduli, frobenius, op_norm, CMat};

use super::SpectralError;

/// A finite collection of square complex matrices of one size.
#[derive(Debug, Clone)]
pub struct MatrixSet {
    matrices: Vec<CMat>,
}

impl MatrixSet {
    pub fn new(matrices: Vec<CMat>) -> Result<Self, SpectralError> {
        if matrices.is_empty() {
            return Err(SpectralError::BadMatrixSet);
        }
        let s = matrices[0].nrows();
        if matrices
            .iter()
            .any(|m| m.nrows() != s || m.ncols() != s)
        {
            return Err(SpectralError::BadMatrixSet);
        }
        Ok(Self { matrices })
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }
}

/// Spectral radius: largest eigenvalue modulus.
pub fn spectral_radius(m: &CMat) -> f64 {
    assert_eq!(m.nrows(), m.ncols(), "spectral radius of a square matrix");
    eigen_moduli(m).into_iter().fold(0.0, f64::max)
}

/// `‖M^l‖^{1/l}` with the operator 2-norm, computed with running
/// renormalization so that large powers neither overflow nor underflow.
/// Converges to the spectral radius as `l` grows (slowly for defective
/// matrices).
pub fn power_norm_estimate(m: &CMat, l: u32) -> f64 {
    assert!(l >= 1);
    let mut acc = m.clone();
    let mut log_scale = 0.0f64;
    for _ in 1..l {
        let s = frobenius(&acc);
        if s == 0.0 {
            return 0.0;
        }
        acc /= num_complex::Complex64::new(s, 0.0);
        log_scale += s.ln();
        acc = &acc * m;
    }
    let last = op_norm(&acc);
    if last == 0.0 {
        return 0.0;
    }
    ((last.ln() + log_scale) / l as f64).exp()
}

/// Which `p`-joint spectral radius to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JsrOrder {
    Finite(f64),
    Infinity,
}

impl JsrOrder {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "inf" | "infinity" | "oo" => Some(JsrOrder::Infinity),
            _ => {
                let p: f64 = s.parse().ok()?;
                (p >= 1.0).then_some(JsrOrder::Finite(p))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct JsrEstimate {
    /// Certified lower bound: largest sampled `ρ(Π)^{1/l}`.
    pub lower: f64,
    /// Certified upper bound: smallest per-length value (each one bounds
    /// the limit from above by submultiplicativity).
    pub upper: f64,
    /// `(Σ_{Π ∈ P_l} ‖Π‖^p)^{1/(pl)}` (or the max for `p = ∞`) per length.
    pub per_length: Vec<f64>,
    /// True when the product budget cut the enumeration short.
    pub truncated: bool,
}

/// Estimate the `p`-joint spectral radius by exhaustive product
/// enumeration up to `max_length`, with at most `budget` product matrices
/// per length (exceeding it returns the lengths computed so far with the
/// `truncated` flag set).
pub fn jsr_estimate(
    set: &MatrixSet,
    order: JsrOrder,
    max_length: usize,
    budget: usize,
) -> JsrEstimate {
    assert!(max_length >= 1);
    let q = set.len();
    let mut per_length = Vec::new();
    let mut lower = 0.0f64;
    let mut upper = f64::INFINITY;
    let mut truncated = false;

    let mut products: Vec<CMat> = vec![CMat::identity(set.dim(), set.dim())];
    for l in 1..=max_length {
        if products.len() * q > budget {
            truncated = true;
            break;
        }
        let mut next = Vec::with_capacity(products.len() * q);
        for p in &products {
            for m in set.matrices() {
                next.push(p * m);
            }
        }
        products = next;

        let norms: Vec<f64> = products.iter().map(op_norm).collect();
        let value = match order {
            JsrOrder::Infinity => norms
                .iter()
                .cloned()
                .fold(0.0f64, f64::max)
                .powf(1.0 / l as f64),
            JsrOrder::Finite(p) => norms
                .iter()
                .map(|n| n.powf(p))
                .sum::<f64>()
                .powf(1.0 / (p * l as f64)),
        };
        per_length.push(value);
        upper = upper.min(value);
        for prod in &products {
            let rho = spectral_radius(prod).powf(1.0 / l as f64);
            lower = lower.max(rho);
        }
    }
    JsrEstimate {
        lower,
        upper,
        per_length,
        truncated,
    }
}

#[derive(Debug, Clone)]
pub struct NormBoundReport {
    /// `(Σ_j ‖M_j‖^p)^{1/p} ≤ δ` (max norm for `p = ∞`); when true this
    /// certifies that the `p`-joint spectral radius is at most `δ`.
    pub holds: bool,
    pub value: f64,
    pub delta: f64,
}

pub fn norm_bound_check(set: &MatrixSet, order: JsrOrder, delta: f64) -> NormBoundReport {
    let norms: Vec<f64> = set.matrices().iter().map(op_norm).collect();
    let value = match order {
        JsrOrder::Infinity => norms.iter().cloned().fold(0.0f64, f64::max),
        JsrOrder::Finite(p) => norms.iter().map(|n| n.powf(p)).sum::<f64>().powf(1.0 / p),
    };
    NormBoundReport {
        holds: value <= delta,
        value,
        delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn rm2(vals: [f64; 4]) -> CMat {
        CMat::from_fn(2, 2, |i, j| Complex64::new(vals[2 * i + j], 0.0))
    }

    #[test]
    fn spectral_radius_basics() {
        assert!((spectral_radius(&CMat::identity(3, 3)) - 1.0).abs() < 1e-12);
        let d = rm2([2.0, 0.0, 0.0, 0.5]);
        assert!((spectral_radius(&d) - 2.0).abs() < 1e-12);
        // [[0,1],[1,1]] has the golden ratio as dominant eigenvalue
        let fib = rm2([0.0, 1.0, 1.0, 1.0]);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((spectral_radius(&fib) - phi).abs() < 1e-10);
    }

    #[test]
    fn power_norm_crosses_spectral_radius() {
        let fib = rm2([0.0, 1.0, 1.0, 1.0]);
        let rho = spectral_radius(&fib);
        let est = power_norm_estimate(&fib, 64);
        assert!((est - rho).abs() / rho < 0.05, "est {est} vs rho {rho}");
    }

    #[test]
    fn single_matrix_jsr_recovers_rho() {
        let fib = rm2([0.0, 1.0, 1.0, 1.0]);
        let set = MatrixSet::new(vec![fib.clone()]).unwrap();
        let est = jsr_estimate(&set, JsrOrder::Infinity, 20, 1_000_000);
        let rho = spectral_radius(&fib);
        assert!(!est.truncated);
        // sampled products are exactly the powers, so the lower bound is ρ
        assert!((est.lower - rho).abs() / rho < 1e-10);
        assert!(est.lower <= est.upper + 1e-12);
        assert!((est.upper - rho) / rho < 0.02);
    }

    #[test]
    fn golden_pair_lower_bound() {
        // ρ(M₁ M₂)^{1/2} = golden ratio for the two unitriangular matrices
        let m1 = rm2([1.0, 1.0, 0.0, 1.0]);
        let m2 = rm2([1.0, 0.0, 1.0, 1.0]);
        let set = MatrixSet::new(vec![m1, m2]).unwrap();
        let est = jsr_estimate(&set, JsrOrder::Infinity, 12, 1_000_000);
        assert!(est.lower >= 1.61, "lower {}", est.lower);
        assert!(est.upper >= est.lower - 1e-12);
        assert!(!est.truncated);
    }

    #[test]
    fn monotone_in_p() {
        let m1 = rm2([1.0, 1.0, 0.0, 1.0]);
        let m2 = rm2([0.3, 0.0, 0.2, 0.4]);
        let set = MatrixSet::new(vec![m1, m2]).unwrap();
        let l = 8;
        let e1 = jsr_estimate(&set, JsrOrder::Finite(1.0), l, 1 << 20);
        let e2 = jsr_estimate(&set, JsrOrder::Finite(2.0), l, 1 << 20);
        let einf = jsr_estimate(&set, JsrOrder::Infinity, l, 1 << 20);
        for i in 0..l {
            assert!(e1.per_length[i] >= e2.per_length[i] - 1e-12);
            assert!(e2.per_length[i] >= einf.per_length[i] - 1e-12);
        }
        assert!(e1.upper >= e2.upper - 1e-12);
        assert!(e2.upper >= einf.upper - 1e-12);
    }

    #[test]
    fn budget_truncates_with_flag() {
        let m1 = rm2([1.0, 1.0, 0.0, 1.0]);
        let m2 = rm2([1.0, 0.0, 1.0, 1.0]);
        let set = MatrixSet::new(vec![m1, m2]).unwrap();
        let est = jsr_estimate(&set, JsrOrder::Infinity, 30, 64);
        assert!(est.truncated);
        assert!(est.per_length.len() < 30);
        assert!(est.per_length.len() >= 5); // 2^6 = 64 products at length 6
    }

    #[test]
    fn norm_bound_examples() {
        let half = rm2([0.4, 0.0, 0.0, 0.4]);
        let set = MatrixSet::new(vec![half.clone(), half]).unwrap();
        let rep = norm_bound_check(&set, JsrOrder::Finite(2.0), 0.6);
        assert!(rep.holds);
        assert!((rep.value - (2.0f64 * 0.16).sqrt()).abs() < 1e-12);

        let id = MatrixSet::new(vec![CMat::identity(2, 2)]).unwrap();
        assert!(!norm_bound_check(&id, JsrOrder::Infinity, 0.5).holds);

        let zero = MatrixSet::new(vec![CMat::zeros(2, 2)]).unwrap();
        assert!(norm_bound_check(&zero, JsrOrder::Infinity, 0.1).holds);
    }
}
