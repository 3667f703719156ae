use nalgebra::DMatrix;

use super::GroupError;

/// A full-rank lattice, stored through a basis whose columns generate it.
///
/// Group and mask arithmetic all happens in lattice coordinates (the
/// lattice is `Z^d` there); the basis only enters through its Gram form
/// `Q = B^T B`, the covolume `|det B|`, and ambient-coordinate conversion.
#[derive(Debug, Clone)]
pub struct LatticeBasis {
    dimension: usize,
    basis: DMatrix<f64>,
    gram: DMatrix<f64>,
    covolume: f64,
}

impl LatticeBasis {
    pub fn new(basis: DMatrix<f64>) -> Result<Self, GroupError> {
        assert_eq!(basis.nrows(), basis.ncols(), "lattice basis must be square");
        let dimension = basis.nrows();
        let det = basis.determinant();
        if det.abs() < 1e-12 {
            return Err(GroupError::SingularBasis { det });
        }
        let gram = basis.transpose() * &basis;
        Ok(Self {
            dimension,
            basis,
            gram,
            covolume: det.abs(),
        })
    }

    /// The standard cubic lattice `Z^d`.
    pub fn standard(dimension: usize) -> Self {
        Self::new(DMatrix::identity(dimension, dimension)).unwrap()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Measure of the fundamental domain, `|det B|`.
    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    /// Basis of the dual lattice, `B^{-T}`.
    pub fn dual_basis(&self) -> DMatrix<f64> {
        self.basis
            .transpose()
            .try_inverse()
            .expect("basis checked invertible at construction")
    }

    /// Covolume of the dual lattice, `1 / |det B|`.
    pub fn dual_covolume(&self) -> f64 {
        1.0 / self.covolume
    }

    /// Ambient coordinates of a lattice-coordinate point.
    pub fn to_ambient(&self, x: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        &self.basis * x
    }

    /// Lattice coordinates of an ambient point.
    pub fn from_ambient(&self, y: &nalgebra::DVector<f64>) -> nalgebra::DVector<f64> {
        self.basis
            .clone()
            .lu()
            .solve(y)
            .expect("basis checked invertible at construction")
    }
}
