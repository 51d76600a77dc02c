use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Planted ground truth, present only for synthetic data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth<F> {
    pub true_mean: Vec<F>,
    pub inlier_mask: Vec<bool>,
}

/// `n` points in R^d stored point-major, with the nominal inlier fraction.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<F> {
    dim: usize,
    points: Vec<F>,
    alpha: f64,
    truth: Option<GroundTruth<F>>,
}

/// Expected number of inliers `round(alpha * n)`.
pub fn inlier_count(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).round() as usize
}

impl<F: Scalar> Dataset<F> {
    pub fn new(dim: usize, points: Vec<F>, alpha: f64, truth: Option<GroundTruth<F>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive".into()));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::DimMismatch { expected: dim, actual: points.len() % dim });
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParam(format!("alpha = {alpha} not in (0, 1]")));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset points"));
        }
        let n = points.len() / dim;
        if let Some(t) = &truth {
            if t.true_mean.len() != dim {
                return Err(Error::DimMismatch { expected: dim, actual: t.true_mean.len() });
            }
            if t.inlier_mask.len() != n {
                return Err(Error::DimMismatch { expected: n, actual: t.inlier_mask.len() });
            }
            let pop = t.inlier_mask.iter().filter(|&&b| b).count();
            if pop != inlier_count(alpha, n) {
                return Err(Error::InvalidParam(format!(
                    "inlier mask has {pop} inliers, expected round(alpha n) = {}",
                    inlier_count(alpha, n)
                )));
            }
        }
        Ok(Self { dim, points, alpha, truth })
    }

    /// Builds from a list of points.
    pub fn from_points(points: &[Vec<F>], alpha: f64) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidParam("ragged point list".into()));
        }
        Self::new(dim, points.concat(), alpha, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn point(&self, i: usize) -> &[F] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[F] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &[F]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn truth(&self) -> Option<&GroundTruth<F>> {
        self.truth.as_ref()
    }

    /// Replaces the assumed inlier fraction; planted ground truth is kept unchanged.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParam(format!("alpha = {alpha} not in (0, 1]")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    /// Same data translated by `-center`.
    pub fn recentered(&self, center: &[F]) -> Result<Self> {
        if center.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, actual: center.len() });
        }
        let points = self
            .points
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(center).map(|(&x, &c)| x - c))
            .collect();
        let truth = self.truth.as_ref().map(|t| GroundTruth {
            true_mean: t.true_mean.iter().zip(center).map(|(&m, &c)| m - c).collect(),
            inlier_mask: t.inlier_mask.clone(),
        });
        Ok(Self { dim: self.dim, points, alpha: self.alpha, truth })
    }

    /// Coordinates `Bᵀ(x - center)` in an orthonormal basis `B`.
    pub fn project(&self, center: &[F], basis: &[Vec<F>]) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidParam("projection onto an empty basis".into()));
        }
        let k = basis.len();
        let mut points = Vec::with_capacity(self.len() * k);
        let mut shifted = vec![F::zero(); self.dim];
        for p in self.iter() {
            shifted.iter_mut().zip(p.iter().zip(center)).for_each(|(s, (&x, &c))| *s = x - c);
            points.extend(basis.iter().map(|b| crate::scalar::dot(b, &shifted)));
        }
        let truth = self.truth.as_ref().map(|t| {
            let m: Vec<F> = t.true_mean.iter().zip(center).map(|(&a, &c)| a - c).collect();
            GroundTruth {
                true_mean: basis.iter().map(|b| crate::scalar::dot(b, &m)).collect(),
                inlier_mask: t.inlier_mask.clone(),
            }
        });
        Ok(Self { dim: k, points, alpha: self.alpha, truth })
    }

    pub fn subset(&self, indices: &[usize]) -> Vec<&[F]> {
        indices.iter().map(|&i| self.point(i)).collect()
    }
}
