use super::{covering_radius_sq, CoveringRadiusSq, QuadraticForm, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A diameter known to lie within `value ± tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedDiameter {
    pub value: f64,
    pub tol: f64,
}

/// `ℝⁿ/ℤⁿ` with the flat metric given by a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatTorus<T> {
    pub gram: QuadraticForm<T>,
    pub scale_certified_diameter: Option<CertifiedDiameter>,
}

impl<T: Scalar> FlatTorus<T> {
    pub fn new(gram: QuadraticForm<T>) -> Self {
        FlatTorus {
            gram,
            scale_certified_diameter: None,
        }
    }

    /// Circle of the given circumference.
    pub fn circle(circumference: T) -> Result<Self> {
        Ok(FlatTorus::new(QuadraticForm::diagonal(&[
            circumference.clone() * circumference,
        ])?))
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn diameter_sq(&self, tol: f64) -> Result<CoveringRadiusSq<T>> {
        covering_radius_sq(&self.gram, tol, DEFAULT_BUDGET)
    }

    /// Uses the cached certificate when present.
    pub fn diameter(&self, tol: f64) -> Result<f64> {
        if let Some(c) = self.scale_certified_diameter {
            return Ok(c.value);
        }
        Ok(self.diameter_sq(tol)?.estimate().sqrt())
    }
}

/// `(∏ S¹(cᵢ)) × ℝ^rank × torus`, with the product metric.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSpace<T> {
    pub circle_circumferences: Vec<T>,
    pub euclidean_rank: usize,
    pub torus_part: Option<FlatTorus<T>>,
}

/// Divides the Gram matrix by the squared covering radius.
///
/// Exact whenever the squared radius is; otherwise the factor is the
/// geometric mean of the certified bounds and the output records how far its
/// diameter may be from 1.
pub fn rescale_to_diameter_one<T: Scalar>(torus: &FlatTorus<T>, tol: f64) -> Result<FlatTorus<T>> {
    if torus.dim() == 0 {
        return Err(Error::InvalidParameter(
            "a point cannot be rescaled to diameter 1".into(),
        ));
    }
    let (gram, certificate) = match torus.diameter_sq(tol)? {
        CoveringRadiusSq::Exact(m) => (
            torus.gram.gram().scale(&(T::one() / m)),
            CertifiedDiameter {
                value: 1.0,
                tol: 0.0,
            },
        ),
        CoveringRadiusSq::Bounded { lower, upper } => {
            let est = (lower * upper).sqrt();
            let lo = (lower / est).sqrt();
            let hi = (upper / est).sqrt();
            (
                torus.gram.gram().scale(&T::approximate(1.0 / est)),
                CertifiedDiameter {
                    value: 1.0,
                    tol: (1.0 - lo).max(hi - 1.0),
                },
            )
        }
    };
    Ok(FlatTorus {
        gram: QuadraticForm::from_trusted(gram),
        scale_certified_diameter: Some(certificate),
    })
}

/// Orthogonal product: block-diagonal Gram matrix.
pub fn product<T: Scalar>(t1: &FlatTorus<T>, t2: &FlatTorus<T>) -> FlatTorus<T> {
    FlatTorus::new(QuadraticForm::from_trusted(Matrix::block_diag(
        t1.gram.gram(),
        t2.gram.gram(),
    )))
}

/// The diameter-1 rescale of `X` with distances scaled by `1 − t`, times a
/// circle of circumference `t`.
///
/// At `t = 0` the circle is dropped; at `t = 1` only the circle survives.
pub fn join_path<T: Scalar>(x: &FlatTorus<T>, t: &T, tol: f64) -> Result<FlatTorus<T>> {
    if *t < T::zero() || *t > T::one() {
        return Err(Error::InvalidParameter(format!("join parameter {t} outside [0, 1]")));
    }
    if t.is_one() {
        return FlatTorus::circle(T::from_i64(2));
    }
    if t.is_zero() {
        return rescale_to_diameter_one(x, tol);
    }
    let s = T::one() - t.clone();
    let shrunk = FlatTorus::new(QuadraticForm::from_trusted(x.gram.gram().scale(&(s.clone() * s))));
    let circle = FlatTorus::circle(t.clone())?;
    rescale_to_diameter_one(&product(&shrunk, &circle), tol)
}
