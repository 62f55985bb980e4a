//! Positive-definite quadratic forms on ℤⁿ and the flat tori they define.

mod covering;
mod enumerate;
mod equivalence;
mod jacobi;
mod lll;
mod torus;

pub use covering::{
    covering_radius, covering_radius_sampled, covering_radius_sq, CoveringBounds, CoveringRadiusSq,
    DEFAULT_BUDGET,
};
pub use enumerate::{closest_vector_distance_sq, short_vectors, shortest_vector};
pub use equivalence::{is_equivalent, is_equivalent_tol, is_homothetic, Homothety};
pub use jacobi::{jacobi_decompose, JacobiDecomposition};
pub use lll::{lll_reduce, lll_reduce_matrix, LllResult};
pub use torus::{join_path, product, rescale_to_diameter_one, CertifiedDiameter, FlatTorus, LimitSpace};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Symmetry tolerance for float forms, relative to the largest entry.
const FLOAT_SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric positive-definite Gram matrix on ℤⁿ.
///
/// Construction checks symmetry and every leading principal minor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<T> {
    gram: Matrix<T>,
}

impl<T: Scalar> QuadraticForm<T> {
    pub fn new(gram: Matrix<T>) -> Result<Self> {
        let tol = if T::EXACT {
            0.0
        } else {
            FLOAT_SYMMETRY_TOL * gram.max_abs().max(1.0)
        };
        gram.check_symmetric(tol)?;
        if !T::EXACT {
            // Average the two triangles so downstream code sees exact symmetry.
            let n = gram.rows();
            let sym = Matrix::from_fn(n, n, |r, c| {
                (gram[(r, c)].clone() + gram[(c, r)].clone()) * T::half()
            });
            jacobi_decompose(&sym)?;
            return Ok(QuadraticForm { gram: sym });
        }
        jacobi_decompose(&gram)?;
        Ok(QuadraticForm { gram })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn diagonal(d: &[T]) -> Result<Self> {
        Self::new(Matrix::diagonal(d))
    }

    pub fn identity(n: usize) -> Self {
        QuadraticForm {
            gram: Matrix::identity(n),
        }
    }

    /// Caller guarantees symmetry and positive definiteness.
    pub(crate) fn from_trusted(gram: Matrix<T>) -> Self {
        QuadraticForm { gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn into_gram(self) -> Matrix<T> {
        self.gram
    }

    pub fn det(&self) -> T {
        self.gram.det()
    }

    /// `c·F`; `c` must be positive.
    pub fn scaled(&self, c: &T) -> Result<Self> {
        if *c <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        Ok(QuadraticForm {
            gram: self.gram.scale(c),
        })
    }

    /// `UᵀFU` for an invertible integer matrix `U`.
    pub fn transformed(&self, u: &Matrix<i64>) -> Result<Self> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.rows(),
            });
        }
        Self::new(u.cast::<T>().congruence(&self.gram))
    }

    pub fn evaluate(&self, v: &[i64]) -> T {
        let v: Vec<T> = v.iter().map(|&x| T::from_i64(x)).collect();
        self.gram.bilinear(&v, &v)
    }

    pub fn to_f64(&self) -> QuadraticForm<f64> {
        QuadraticForm {
            gram: self.gram.to_f64(),
        }
    }

    pub fn jacobi(&self) -> JacobiDecomposition<T> {
        jacobi_decompose(&self.gram).expect("validated on construction")
    }
}
