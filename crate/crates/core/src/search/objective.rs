use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};
use crate::tensor::{entry_count, gaussian_moment_tensor, SymmetricTensor, DEFAULT_ENTRY_CAP};

use super::simplex::Weights;

/// `Σ_{k≤k*} ‖(1/αn) Σ w_i (X_i − μ')^{⊗k} − E[Z^{⊗k}]‖_F²`, built from dense tensors.
pub fn moment_objective<F: Scalar>(mu_prime: &[F], w: &Weights<F>, data: &Dataset<F>, k_star: usize) -> Result<f64> {
    Ok(order_gaps(mu_prime, w, data, k_star)?.iter().map(|g| g * g).sum())
}

/// Per-order Frobenius gaps `‖M_k(w) − E[Z^{⊗k}]‖_F` for `k = 1..=k*`.
pub fn order_gaps<F: Scalar>(mu_prime: &[F], w: &Weights<F>, data: &Dataset<F>, k_star: usize) -> Result<Vec<f64>> {
    let d = data.dim();
    if mu_prime.len() != d {
        return Err(Error::DimMismatch { expected: d, actual: mu_prime.len() });
    }
    if w.len() != data.len() {
        return Err(Error::DimMismatch { expected: data.len(), actual: w.len() });
    }
    let budget = F::lit(data.alpha() * data.len() as f64);
    let mut gaps = Vec::with_capacity(k_star);
    let mut y = vec![F::zero(); d];
    for k in 1..=k_star {
        entry_count(d, k, DEFAULT_ENTRY_CAP)?;
        let mut acc = SymmetricTensor::zeros(k, d)?;
        for (p, &wi) in data.iter().zip(&w.w) {
            if wi == F::zero() {
                continue;
            }
            y.iter_mut().zip(p.iter().zip(mu_prime)).for_each(|(s, (&x, &m))| *s = x - m);
            let mut t = SymmetricTensor::power(&y, k)?;
            t.scale(wi / budget);
            acc.add_assign(&t)?;
        }
        acc.sub_assign(&gaussian_moment_tensor(k, d)?)?;
        gaps.push(acc.norm().as_f64());
    }
    Ok(gaps)
}

fn sorted_tuples(dim: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..dim {
            cur.push(j);
            rec(dim, k, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

fn double_factorial_odd(c: usize) -> f64 {
    // (c-1)!! for even c.
    (1..c).step_by(2).map(|x| x as f64).product()
}

/// Packed design for the objective: `f(w) = ‖A w − b‖²` where column `i` of
/// `A` stacks `√mult(c) · y_i^c / (αn)` over sorted multi-indices `c` of every
/// order, and `b` stacks the matching Gaussian moments.
#[derive(Clone, Debug)]
pub struct MomentDesign<F> {
    rows: usize,
    cols: usize,
    /// Column-major: `cols` blocks of length `rows`.
    a: Vec<F>,
    b: Vec<F>,
    /// Row ranges belonging to each order.
    order_ranges: Vec<std::ops::Range<usize>>,
}

impl<F: Scalar> MomentDesign<F> {
    pub fn new(mu_prime: &[F], data: &Dataset<F>, alpha: f64, k_star: usize) -> Result<Self> {
        let d = data.dim();
        if mu_prime.len() != d {
            return Err(Error::DimMismatch { expected: d, actual: mu_prime.len() });
        }
        if k_star == 0 {
            return Err(Error::InvalidParam("k_star must be at least 1".into()));
        }
        let mut tuples = Vec::new();
        let mut scales = Vec::new();
        let mut b = Vec::new();
        let mut order_ranges = Vec::new();
        for k in 1..=k_star {
            entry_count(d, k, DEFAULT_ENTRY_CAP)?;
            let kf: f64 = factorial(k).ok_or(Error::FactorialRange(k))?;
            let start = tuples.len();
            for t in sorted_tuples(d, k) {
                let mut counts = vec![0usize; d];
                t.iter().for_each(|&j| counts[j] += 1);
                let mult = counts.iter().fold(kf, |acc, &c| acc / factorial::<f64>(c).unwrap());
                let target = if counts.iter().all(|c| c % 2 == 0) {
                    counts.iter().map(|&c| double_factorial_odd(c)).product()
                } else {
                    0.0
                };
                scales.push(mult.sqrt());
                b.push(F::lit(mult.sqrt() * target));
                tuples.push(t);
            }
            order_ranges.push(start..tuples.len());
        }
        let rows = tuples.len();
        let cols = data.len();
        if rows.saturating_mul(cols) > DEFAULT_ENTRY_CAP * 10 {
            return Err(Error::TensorTooLarge { order: k_star, dim: d, cap: DEFAULT_ENTRY_CAP * 10 });
        }
        let inv_budget = 1.0 / (alpha * cols as f64);
        let mut a = Vec::with_capacity(rows * cols);
        let mut y = vec![F::zero(); d];
        for p in data.iter() {
            y.iter_mut().zip(p.iter().zip(mu_prime)).for_each(|(s, (&x, &m))| *s = x - m);
            for (t, &s) in tuples.iter().zip(&scales) {
                let mono = t.iter().fold(F::one(), |acc, &j| acc * y[j]);
                a.push(mono * F::lit(s * inv_budget));
            }
        }
        Ok(Self { rows, cols, a, b, order_ranges })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, i: usize) -> &[F] {
        &self.a[i * self.rows..(i + 1) * self.rows]
    }

    pub fn target(&self) -> &[F] {
        &self.b
    }

    /// Residual `A w − b`.
    pub fn residual(&self, w: &[F]) -> Vec<F> {
        let mut r: Vec<F> = self.b.iter().map(|&x| -x).collect();
        for (i, &wi) in w.iter().enumerate() {
            if wi != F::zero() {
                r.iter_mut().zip(self.column(i)).for_each(|(ri, &aij)| *ri += wi * aij);
            }
        }
        r
    }

    /// `Aᵀ r`.
    pub fn adjoint(&self, r: &[F]) -> Vec<F> {
        (0..self.cols).map(|i| crate::scalar::dot(self.column(i), r)).collect()
    }

    pub fn objective(&self, w: &[F]) -> f64 {
        self.residual(w).iter().map(|x| x.as_f64() * x.as_f64()).sum()
    }

    /// Per-order gap norms read off a residual.
    pub fn gaps_from_residual(&self, r: &[F]) -> Vec<f64> {
        self.order_ranges
            .iter()
            .map(|rg| r[rg.clone()].iter().map(|x| x.as_f64() * x.as_f64()).sum::<f64>().sqrt())
            .collect()
    }

    /// Largest eigenvalue of `AᵀA` by power iteration on the `rows × rows` Gram `AAᵀ`.
    pub fn lipschitz_estimate(&self, iters: usize) -> f64 {
        let m = self.rows;
        let mut g = vec![0.0f64; m * m];
        for i in 0..self.cols {
            let c = self.column(i);
            for p in 0..m {
                let cp = c[p].as_f64();
                if cp == 0.0 {
                    continue;
                }
                for q in p..m {
                    g[p * m + q] += cp * c[q].as_f64();
                }
            }
        }
        for p in 0..m {
            for q in 0..p {
                g[p * m + q] = g[q * m + p];
            }
        }
        let mut v = vec![1.0 / (m as f64).sqrt(); m];
        let mut lambda = 0.0;
        for _ in 0..iters {
            let u: Vec<f64> = (0..m).map(|p| (0..m).map(|q| g[p * m + q] * v[q]).sum()).collect();
            let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nu == 0.0 {
                return 0.0;
            }
            lambda = v.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
            v = u.into_iter().map(|x| x / nu).collect();
        }
        // Rayleigh quotients approach λ_max from below; the trace bounds it from above.
        let trace: f64 = (0..m).map(|p| g[p * m + p]).sum();
        lambda.max(trace / m as f64).min(trace)
    }
}
