//! Parameter storage: a flat vector part plus an optional symmetric matrix
//! block, tagged with its coordinate system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::families::Family;

/// Raw parameter (or sufficient-statistic) value.
///
/// Families with a composite inner product (multivariate Gaussians) carry the
/// matrix block separately; all others leave `matrix` empty.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub vector: DVector<f64>,
    pub matrix: Option<DMatrix<f64>>,
}

/// Shape metadata used to check that two values can be combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub vector_len: usize,
    pub matrix_dim: Option<usize>,
}

impl ParamVector {
    pub fn from_vec(values: Vec<f64>) -> Self {
        ParamVector {
            vector: DVector::from_vec(values),
            matrix: None,
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self::from_vec(vec![value])
    }

    pub fn composite(vector: DVector<f64>, matrix: DMatrix<f64>) -> Self {
        ParamVector {
            vector,
            matrix: Some(matrix),
        }
    }

    pub fn shape(&self) -> Shape {
        Shape {
            vector_len: self.vector.len(),
            matrix_dim: self.matrix.as_ref().map(|m| m.nrows()),
        }
    }

    /// First vector coordinate; the natural parameter of order-1 families.
    pub fn first(&self) -> f64 {
        self.vector[0]
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        let (a, b) = (self.shape(), other.shape());
        let square = |m: &Option<DMatrix<f64>>| m.as_ref().is_none_or(|m| m.is_square());
        if a != b || !square(&self.matrix) || !square(&other.matrix) {
            return Err(Error::Dimension(format!("{a:?} vs {b:?}")));
        }
        Ok(())
    }

    /// Composite inner product: `a₁ᵀb₁ + tr(a₂ᵀb₂)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        let mut acc = self.vector.dot(&other.vector);
        if let (Some(a), Some(b)) = (&self.matrix, &other.matrix) {
            acc += a.dot(b);
        }
        Ok(acc)
    }

    /// Linear combination `a·x + b·y`, entrywise.
    pub fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Result<Self> {
        x.check_shape(y)?;
        let vector = x.vector.zip_map(&y.vector, |u, v| a * u + b * v);
        let matrix = match (&x.matrix, &y.matrix) {
            (Some(m), Some(n)) => Some(m.zip_map(n, |u, v| a * u + b * v)),
            _ => None,
        };
        Ok(ParamVector { vector, matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(1.0, self, -1.0, other)
    }

    pub fn scale(&self, s: f64) -> Self {
        ParamVector {
            vector: &self.vector * s,
            matrix: self.matrix.as_ref().map(|m| m * s),
        }
    }

    /// All entries, vector part first, then the matrix block in column-major order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.vector.iter().copied().collect();
        if let Some(m) = &self.matrix {
            out.extend(m.iter().copied());
        }
        out
    }

    /// Inverse of [`ParamVector::flatten`].
    pub fn from_flat(shape: Shape, flat: &[f64]) -> Result<Self> {
        let d = shape.matrix_dim.unwrap_or(0);
        if flat.len() != shape.vector_len + d * d {
            return Err(Error::Dimension(format!(
                "expected {} entries, got {}",
                shape.vector_len + d * d,
                flat.len()
            )));
        }
        let vector = DVector::from_column_slice(&flat[..shape.vector_len]);
        let matrix = shape
            .matrix_dim
            .map(|d| DMatrix::from_column_slice(d, d, &flat[shape.vector_len..]));
        Ok(ParamVector { vector, matrix })
    }

    pub fn max_abs(&self) -> f64 {
        self.flatten().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.flatten().iter().all(|v| v.is_finite())
    }
}

/// Coordinate system of a [`ParamPoint`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinates {
    Natural,
    Expectation,
}

/// A distribution of a given family, expressed in natural (θ) or expectation
/// (η) coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    family: Family,
    system: Coordinates,
    params: ParamVector,
}

impl ParamPoint {
    /// Natural-coordinate point; fails unless `params` lies strictly inside Θ.
    pub fn natural(family: Family, params: ParamVector) -> Result<Self> {
        family.check_shape(&params)?;
        if !family.contains(&params) {
            return Err(Error::Domain(format!(
                "{} natural parameter {:?}",
                family.name(),
                params.flatten()
            )));
        }
        Ok(ParamPoint {
            family,
            system: Coordinates::Natural,
            params,
        })
    }

    /// Expectation-coordinate point. Only the shape is checked here; whether
    /// `params` lies in the image of ∇F is verified on conversion.
    pub fn expectation(family: Family, params: ParamVector) -> Result<Self> {
        family.check_shape(&params)?;
        Ok(ParamPoint {
            family,
            system: Coordinates::Expectation,
            params,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn system(&self) -> Coordinates {
        self.system
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn into_params(self) -> ParamVector {
        self.params
    }

    /// Fails with a domain error unless the point is in natural coordinates.
    pub(crate) fn expect_natural(&self) -> Result<&ParamVector> {
        match self.system {
            Coordinates::Natural => Ok(&self.params),
            Coordinates::Expectation => Err(Error::Domain(
                "operation requires natural coordinates".to_string(),
            )),
        }
    }
}

/// Fails unless both points are natural-coordinate members of the same family.
pub(crate) fn same_family<'a>(
    p: &'a ParamPoint,
    q: &'a ParamPoint,
) -> Result<(Family, &'a ParamVector, &'a ParamVector)> {
    if p.family() != q.family() {
        return Err(Error::Dimension(format!(
            "points belong to different families ({} vs {})",
            p.family().name(),
            q.family().name()
        )));
    }
    Ok((p.family(), p.expect_natural()?, q.expect_natural()?))
}
