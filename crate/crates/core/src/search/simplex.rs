use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Soft inclusion weights `w ∈ [0,1]^n` with `Σ w = budget`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights<F> {
    pub w: Vec<F>,
}

impl<F: Scalar> Weights<F> {
    pub fn uniform(n: usize, value: F) -> Self {
        Self { w: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn sum(&self) -> F {
        self.w.iter().copied().sum()
    }

    /// Box constraints exactly, budget to `1e-8` relative.
    pub fn is_valid(&self, budget: f64) -> bool {
        self.w.iter().all(|&x| x >= F::zero() && x <= F::one())
            && (self.sum().as_f64() - budget).abs() <= 1e-8 * budget.max(1.0)
    }
}

/// `(Σ clamp(v − θ, 0, 1), Σ_{free} v, #free, #upper)` at `θ`.
fn segment<F: Scalar>(v: &[F], theta: F) -> (F, F, usize, usize) {
    let (mut s, mut free_sum, mut free, mut upper) = (F::zero(), F::zero(), 0usize, 0usize);
    for &x in v {
        let y = x - theta;
        if y >= F::one() {
            s += F::one();
            upper += 1;
        } else if y > F::zero() {
            s += y;
            free_sum += x;
            free += 1;
        }
    }
    (s, free_sum, free, upper)
}

/// Euclidean projection of `v` onto `{w ∈ [0,1]^n : Σ w = budget}`.
///
/// The projection is `clamp(v − θ, 0, 1)` with `θ` the root of the
/// non-increasing piecewise-linear map `θ ↦ Σ clamp(v_i − θ, 0, 1)`. The root
/// is bracketed and found by bisection, taking the exact solve on the current
/// linear piece whenever it lands inside the bracket.
pub fn project_capped_simplex<F: Scalar>(v: &[F], budget: F) -> Result<Weights<F>> {
    let n = v.len();
    let b = budget.as_f64();
    if !(b >= 0.0 && b <= n as f64) || !budget.is_finite() {
        return Err(Error::InfeasibleBudget { budget: b, n });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input"));
    }
    if b == n as f64 {
        return Ok(Weights { w: vec![F::one(); n] });
    }
    if b == 0.0 {
        return Ok(Weights { w: vec![F::zero(); n] });
    }
    let (mut lo, mut hi) = v.iter().fold((F::infinity(), F::neg_infinity()), |(a, c), &x| (a.min(x), c.max(x)));
    lo -= F::one();
    let tol = F::lit(1e-12) * budget.max(F::one());
    let mut theta = (v.iter().copied().sum::<F>() - budget) / F::from_usize_lossy(n);
    if !(theta > lo && theta < hi) {
        theta = (lo + hi) * F::lit(0.5);
    }
    for _ in 0..200 {
        let (s, free_sum, free, upper) = segment(v, theta);
        if (s - budget).abs() <= tol {
            break;
        }
        if s > budget {
            lo = theta;
        } else {
            hi = theta;
        }
        let mid = (lo + hi) * F::lit(0.5);
        let next = if free > 0 {
            let t = (free_sum + F::from_usize_lossy(upper) - budget) / F::from_usize_lossy(free);
            if t > lo && t < hi { t } else { mid }
        } else {
            mid
        };
        if next == theta || mid == lo || mid == hi {
            theta = next;
            break;
        }
        theta = next;
    }
    let w = v.iter().map(|&x| (x - theta).max(F::zero()).min(F::one())).collect();
    Ok(Weights { w })
}

/// Largest violation of the projection optimality conditions: `w` must equal
/// `clamp(v - θ, 0, 1)` for a common `θ` and sum to `budget`.
pub fn capped_simplex_kkt_residual(v: &[f64], w: &[f64], budget: f64) -> f64 {
    let sum_err = (w.iter().sum::<f64>() - budget).abs();
    let box_err = w.iter().map(|&x| (-x).max(x - 1.0).max(0.0)).fold(0.0, f64::max);
    let eps = 1e-12;
    let free: Vec<f64> = v
        .iter()
        .zip(w)
        .filter(|(_, &x)| x > eps && x < 1.0 - eps)
        .map(|(&a, &x)| a - x)
        .collect();
    // θ bounds implied by the clamped coordinates.
    let lower = v.iter().zip(w).filter(|(_, &x)| x <= eps).map(|(&a, _)| a).fold(f64::NEG_INFINITY, f64::max);
    let upper = v
        .iter()
        .zip(w)
        .filter(|(_, &x)| x >= 1.0 - eps)
        .map(|(&a, _)| a - 1.0)
        .fold(f64::INFINITY, f64::min);
    let stationarity = if free.is_empty() {
        (lower - upper).max(0.0)
    } else {
        let theta = free.iter().sum::<f64>() / free.len() as f64;
        let spread = free.iter().map(|t| (t - theta).abs()).fold(0.0, f64::max);
        spread.max(lower - theta).max(theta - upper).max(0.0)
    };
    sum_err.max(box_err).max(stationarity)
}
