use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::linalg::CMat;

/// A finite Fourier series with matrix coefficients,
/// `P(ω) = ν · Σ_k C_k e^{-2πi k·ω}`, frequencies in dual-lattice
/// coordinates so that periodicity under integer shifts is structural.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigMatrixPolynomial {
    dimension: usize,
    rows: usize,
    cols: usize,
    normalization: f64,
    coeffs: BTreeMap<Vec<i64>, CMat>,
}

impl TrigMatrixPolynomial {
    pub fn new(dimension: usize, rows: usize, cols: usize, normalization: f64) -> Self {
        Self {
            dimension,
            rows,
            cols,
            normalization,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn insert(&mut self, k: Vec<i64>, coeff: CMat) {
        assert_eq!(k.len(), self.dimension);
        assert_eq!(coeff.nrows(), self.rows);
        assert_eq!(coeff.ncols(), self.cols);
        if coeff.iter().all(|z| z.norm() == 0.0) {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, coeff);
        }
    }

    pub fn add_to(&mut self, k: &[i64], coeff: &CMat) {
        let cur = self
            .coeffs
            .entry(k.to_vec())
            .or_insert_with(|| CMat::zeros(self.rows, self.cols));
        *cur += coeff;
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<i64>, &CMat)> {
        self.coeffs.iter()
    }

    pub fn coefficient_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluate at `ω`. Components are reduced modulo 1 first, which keeps
    /// evaluation exactly periodic under integer (dual lattice) shifts of
    /// exactly-representable frequencies.
    pub fn eval(&self, omega: &[f64]) -> CMat {
        assert_eq!(omega.len(), self.dimension);
        let reduced: Vec<f64> = omega.iter().map(|w| w - w.floor()).collect();
        let mut acc = CMat::zeros(self.rows, self.cols);
        for (k, coeff) in &self.coeffs {
            let mut phase = 0.0f64;
            for (ki, wi) in k.iter().zip(&reduced) {
                phase += *ki as f64 * wi;
            }
            let z = Complex64::from_polar(1.0, -TAU * phase);
            acc += coeff * z;
        }
        acc * Complex64::new(self.normalization, 0.0)
    }
}

/// A uniform grid over the dual fundamental domain `[0,1)^d` in
/// dual-lattice coordinates.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    dimension: usize,
    resolution: Vec<usize>,
}

impl FrequencyGrid {
    /// Same resolution along every axis (at least 2).
    pub fn uniform(dimension: usize, resolution: usize) -> Self {
        assert!(resolution >= 2, "frequency resolution must be at least 2");
        Self {
            dimension,
            resolution: vec![resolution; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![vec![]];
        for axis in 0..self.dimension {
            let res = self.resolution[axis];
            let mut next = Vec::with_capacity(points.len() * res);
            for p in &points {
                for i in 0..res {
                    let mut q = p.clone();
                    q.push(i as f64 / res as f64);
                    next.push(q);
                }
            }
            points = next;
        }
        points
    }
}
