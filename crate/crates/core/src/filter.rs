//! Hermite-moment filtering followed by spectral subspace extraction.
//!
//! The filter repeatedly picks an order `t` whose empirical moment vector
//! `M_t(T) = mean_{i∈T} H_t(X_i)` is too large, scores every surviving point
//! by `max(0, ⟨H_t(X_i), M_t⟩ + γ⁻² t! (C √log(1/α))^t ‖M_t‖)` and removes
//! one point at random in proportion to its score. Once every order is
//! under its threshold, the top left singular vectors of each flattened
//! `M_t` span the returned subspace.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{rng_for, tag};
use crate::scalar::{dot, factorial, Scalar};
use crate::tensor::{
    entry_count, flatten, hermite_kernel, hermite_table, hermite_tensor_factored, orthonormalize,
    top_left_singular_vectors, PackedLayout, SymmetricTensor, DEFAULT_ENTRY_CAP, MAX_ORDER,
};

/// How a point is chosen once scores are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalRule {
    /// Sample `i ∝ τ_i` from the seeded stream.
    #[default]
    Sampled,
    /// Remove `argmax τ_i` (deterministic, for debugging).
    Argmax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    /// Moments run over `t = 1..=2k`.
    pub k: usize,
    pub gamma: f64,
    pub lambda: f64,
    /// The constant `C` in `(C √log(1/α))^t`.
    pub c_norm: f64,
    /// Cap on singular vectors kept per order.
    pub s_cap: usize,
    /// Defaults to `n - 1`.
    pub max_removals: Option<usize>,
    pub seed: u64,
    pub removal: RemovalRule,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            k: 2,
            gamma: 0.25,
            lambda: 0.5,
            c_norm: 3.0,
            s_cap: 4,
            max_removals: None,
            seed: 0,
            removal: RemovalRule::Sampled,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParam(m.to_string()));
        if self.k == 0 || 2 * self.k > MAX_ORDER {
            return bad("filter k must satisfy 1 <= 2k <= 8");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return bad("lambda must lie in (0, 1)");
        }
        if !(self.c_norm >= 1.0) {
            return bad("c_norm must be at least 1");
        }
        if self.s_cap == 0 {
            return bad("s_cap must be positive");
        }
        Ok(())
    }

    pub fn max_order(&self) -> usize {
        2 * self.k
    }
}

fn log_base(params: &FilterParams, alpha: f64) -> f64 {
    params.c_norm * (1.0 / alpha).ln().max(0.0).sqrt()
}

/// `γ⁻³ t! (C √log(1/α))^t`.
pub fn norm_threshold(t: usize, params: &FilterParams, alpha: f64) -> f64 {
    let tf: f64 = factorial(t).unwrap_or(f64::INFINITY);
    params.gamma.powi(-3) * tf * log_base(params, alpha).powi(t as i32)
}

/// Additive score term `γ⁻² t! (C √log(1/α))^t`, multiplied by `‖M_t‖` in the score.
pub fn score_offset(t: usize, params: &FilterParams, alpha: f64) -> f64 {
    let tf: f64 = factorial(t).unwrap_or(f64::INFINITY);
    params.gamma.powi(-2) * tf * log_base(params, alpha).powi(t as i32)
}

/// `min(s_cap, γ⁻⁶ (t!)² (C √log(1/α))^{2t} / λ²)`, at least one.
pub fn spectral_count(t: usize, params: &FilterParams, alpha: f64) -> usize {
    let tf: f64 = factorial(t).unwrap_or(f64::INFINITY);
    let s = params.gamma.powi(-6) * tf * tf * log_base(params, alpha).powi(2 * t as i32)
        / (params.lambda * params.lambda);
    if !s.is_finite() || s >= params.s_cap as f64 {
        params.s_cap
    } else {
        (s.floor() as usize).clamp(1, params.s_cap)
    }
}

/// `M_t(T)`, the mean of `H_t(X_i)` over `indices`.
pub fn moment_vector<F: Scalar>(t: usize, indices: &[usize], data: &Dataset<F>) -> Result<SymmetricTensor<F>> {
    if indices.is_empty() {
        return Err(Error::EmptySet);
    }
    let layout = PackedLayout::new(data.dim(), t);
    let mut acc = vec![F::zero(); layout.len()];
    let inv = F::one() / F::from_usize_lossy(indices.len());
    for &i in indices {
        layout.accumulate(&hermite_table(data.point(i), t), inv, &mut acc);
    }
    layout.to_dense(&acc)
}

/// Filter scores for order `t` on the index set `indices` (zero outside it).
pub fn filter_scores<F: Scalar>(
    t: usize,
    indices: &[usize],
    data: &Dataset<F>,
    params: &FilterParams,
) -> Result<Vec<F>> {
    let m = moment_vector(t, indices, data)?;
    let offset = F::lit(score_offset(t, params, data.alpha())) * m.norm();
    let mut tau = vec![F::zero(); data.len()];
    for &i in indices {
        let h = hermite_tensor_factored(t, data.point(i))?;
        tau[i] = (h.inner(&m)? + offset).max(F::zero());
    }
    Ok(tau)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovalEvent {
    pub step: usize,
    pub index: usize,
    /// Order whose guard was violated.
    pub order: usize,
    /// `‖M_t‖ / threshold_t` before the removal.
    pub relative_violation: f64,
    /// All scores were zero and the argmax of `⟨H_t(X_i), M_t⟩` was removed.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub seed: u64,
    pub initial_count: usize,
    pub removals: Vec<RemovalEvent>,
    /// Indexed by `t - 1`.
    pub thresholds: Vec<f64>,
    pub final_norms: Vec<f64>,
    pub fallbacks: usize,
}

impl FilterReport {
    pub fn removal_count(&self) -> usize {
        self.removals.len()
    }

    /// `max_t ‖M_t(T)‖ / threshold_t` at termination.
    pub fn max_relative_norm(&self) -> f64 {
        self.final_norms
            .iter()
            .zip(&self.thresholds)
            .map(|(n, t)| n / t)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug)]
pub struct FilterRun {
    pub survivors: Vec<usize>,
    pub report: FilterReport,
}

/// Incremental state: running sums `Σ_{i∈T} H_t(X_i)` and, once the guard
/// first trips, per-point inner products `⟨H_t(X_i), Σ_{j∈T} H_t(X_j)⟩`
/// kept current through the closed-form Hermite kernel.
struct Engine<'a, F> {
    data: &'a Dataset<F>,
    max_t: usize,
    alive: Vec<bool>,
    count: usize,
    layouts: Vec<PackedLayout>,
    sums: Vec<Vec<F>>,
    tables: Vec<F>,
    inner: Option<Vec<Vec<F>>>,
}

impl<'a, F: Scalar> Engine<'a, F> {
    fn new(data: &'a Dataset<F>, max_t: usize) -> Result<Self> {
        let n = data.len();
        let d = data.dim();
        entry_count(d, max_t, DEFAULT_ENTRY_CAP)?;
        let mut tables = Vec::with_capacity(n * (max_t + 1) * d);
        for p in data.iter() {
            tables.extend(hermite_table(p, max_t));
        }
        let mut engine = Self {
            data,
            max_t,
            alive: vec![true; n],
            count: n,
            layouts: (1..=max_t).map(|t| PackedLayout::new(d, t)).collect(),
            sums: Vec::new(),
            tables,
            inner: None,
        };
        engine.resync()?;
        Ok(engine)
    }

    fn table(&self, i: usize) -> &[F] {
        let w = (self.max_t + 1) * self.data.dim();
        &self.tables[i * w..(i + 1) * w]
    }

    fn survivors(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&i| self.alive[i]).collect()
    }

    /// Recomputes the running sums from scratch and drops cached inner products.
    fn resync(&mut self) -> Result<()> {
        let mut sums = Vec::with_capacity(self.max_t);
        for layout in &self.layouts {
            let mut s = vec![F::zero(); layout.len()];
            for i in 0..self.alive.len() {
                if self.alive[i] {
                    layout.accumulate(self.table(i), F::one(), &mut s);
                }
            }
            sums.push(s);
        }
        self.sums = sums;
        self.inner = None;
        Ok(())
    }

    fn ensure_inner(&mut self) -> Result<()> {
        if self.inner.is_some() {
            return Ok(());
        }
        let n = self.alive.len();
        let mut inner = vec![vec![F::zero(); n]; self.max_t];
        for i in 0..n {
            if !self.alive[i] {
                continue;
            }
            for (t, layout) in self.layouts.iter().enumerate() {
                inner[t][i] = layout.dot_table(self.table(i), &self.sums[t]);
            }
        }
        self.inner = Some(inner);
        Ok(())
    }

    fn norms(&self) -> Vec<F> {
        let c = F::from_usize_lossy(self.count);
        self.layouts.iter().zip(&self.sums).map(|(l, s)| l.norm(s) / c).collect()
    }

    fn remove(&mut self, j: usize) -> Result<()> {
        self.alive[j] = false;
        self.count -= 1;
        let tj = self.table(j).to_vec();
        for (layout, s) in self.layouts.iter().zip(self.sums.iter_mut()) {
            layout.accumulate(&tj, -F::one(), s);
        }
        if let Some(inner) = self.inner.as_mut() {
            let d = self.data.dim();
            let max_t = self.max_t;
            let w = (max_t + 1) * d;
            let mut k = vec![F::zero(); max_t + 1];
            for (i, table) in self.tables.chunks_exact(w).enumerate() {
                if !self.alive[i] {
                    continue;
                }
                hermite_kernel(table, &tj, d, max_t, &mut k);
                for t in 1..=max_t {
                    inner[t - 1][i] -= k[t];
                }
            }
        }
        Ok(())
    }
}

/// Runs the removal loop until every `‖M_t(T)‖₂` is within its threshold.
pub fn run_filter<F: Scalar>(data: &Dataset<F>, params: &FilterParams) -> Result<FilterRun> {
    params.validate()?;
    let n = data.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let alpha = data.alpha();
    let max_t = params.max_order();
    let thresholds: Vec<f64> = (1..=max_t).map(|t| norm_threshold(t, params, alpha)).collect();
    let offsets: Vec<f64> = (1..=max_t).map(|t| score_offset(t, params, alpha)).collect();
    let max_removals = params.max_removals.unwrap_or(n - 1).min(n - 1);
    let mut rng = rng_for(params.seed, &[tag::FILTER]);
    let mut engine = Engine::new(data, max_t)?;
    let mut removals = Vec::new();
    let mut fallbacks = 0;

    let relative = |norms: &[F]| -> Vec<f64> {
        norms.iter().zip(&thresholds).map(|(m, thr)| m.as_f64() / thr).collect()
    };

    'outer: loop {
        loop {
            let norms = engine.norms();
            let rel = relative(&norms);
            // Largest relative violation, ties to the smallest order.
            let (t_idx, worst) = rel
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
            if !(worst > 1.0) {
                break;
            }
            if removals.len() >= max_removals {
                let violating = (1..=max_t).filter(|&t| rel[t - 1] > 1.0).collect();
                return Err(Error::Exhausted { removals: removals.len(), violating });
            }
            engine.ensure_inner()?;
            let inner = &engine.inner.as_ref().expect("initialised")[t_idx];
            let count = F::from_usize_lossy(engine.count);
            let offset = F::lit(offsets[t_idx]) * norms[t_idx];
            let mut total = 0.0f64;
            let mut best = None::<(usize, f64)>;
            let mut tau = vec![0.0f64; n];
            for i in 0..n {
                if !engine.alive[i] {
                    continue;
                }
                let s = (inner[i] / count + offset).max(F::zero()).as_f64();
                tau[i] = s;
                total += s;
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            debug_assert!(
                total >= engine.count as f64 * norms[t_idx].as_f64().powi(2) * (1.0 - 1e-9) - 1e-9,
                "score mass below |T| ‖M_t‖²"
            );
            let (index, fallback) = if total > 0.0 {
                let pick = match params.removal {
                    RemovalRule::Argmax => best.expect("non-empty").0,
                    RemovalRule::Sampled => {
                        let target = rng.random::<f64>() * total;
                        let mut acc = 0.0;
                        let mut chosen = best.expect("non-empty").0;
                        for (i, &s) in tau.iter().enumerate() {
                            if s <= 0.0 {
                                continue;
                            }
                            acc += s;
                            if acc > target {
                                chosen = i;
                                break;
                            }
                        }
                        chosen
                    }
                };
                (pick, false)
            } else {
                fallbacks += 1;
                let pick = (0..n)
                    .filter(|&i| engine.alive[i])
                    .max_by(|&a, &b| inner[a].partial_cmp(&inner[b]).unwrap().then(b.cmp(&a)))
                    .expect("non-empty");
                (pick, true)
            };
            removals.push(RemovalEvent {
                step: removals.len(),
                index,
                order: t_idx + 1,
                relative_violation: worst,
                fallback,
            });
            engine.remove(index)?;
        }
        // Confirm against freshly summed moments; continue if drift hid a violation.
        engine.resync()?;
        let rel = relative(&engine.norms());
        if rel.iter().all(|&r| r <= 1.0) {
            break 'outer;
        }
    }

    let final_norms = engine.norms().iter().map(|v| v.as_f64()).collect();
    Ok(FilterRun {
        survivors: engine.survivors(),
        report: FilterReport {
            seed: params.seed,
            initial_count: n,
            removals,
            thresholds,
            final_norms,
            fallbacks,
        },
    })
}

/// Orthonormal basis of a subspace of R^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace<F> {
    dim: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Scalar> Subspace<F> {
    pub fn empty(dim: usize) -> Self {
        Self { dim, basis: Vec::new() }
    }

    /// Orthonormalises `vectors`, discarding dependent ones.
    pub fn span(dim: usize, vectors: &[Vec<F>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimMismatch { expected: dim, actual: v.len() });
        }
        Ok(Self { dim, basis: orthonormalize(vectors, F::lit(1e-8)) })
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn coords(&self, v: &[F]) -> Vec<F> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    pub fn lift(&self, coords: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        for (b, &c) in self.basis.iter().zip(coords) {
            out.iter_mut().zip(b).for_each(|(o, &x)| *o += c * x);
        }
        out
    }

    /// `v - Π_V v`.
    pub fn residual(&self, v: &[F]) -> Vec<F> {
        let p = self.lift(&self.coords(v));
        v.iter().zip(p).map(|(&a, b)| a - b).collect()
    }

    pub fn residual_norm(&self, v: &[F]) -> F {
        crate::scalar::norm(&self.residual(v))
    }

    /// Dense `d × d` projector `Σ b bᵀ`.
    pub fn projector(&self) -> Vec<F> {
        let d = self.dim;
        let mut p = vec![F::zero(); d * d];
        for b in &self.basis {
            for i in 0..d {
                for j in 0..d {
                    p[i * d + j] += b[i] * b[j];
                }
            }
        }
        p
    }

    pub fn is_orthonormal(&self, tol: F) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| {
            self.basis.iter().enumerate().all(|(j, b)| {
                let want = if i == j { F::one() } else { F::zero() };
                (dot(a, b) - want).abs() <= tol
            })
        })
    }

    /// This subspace with `v` appended (if independent).
    pub fn augmented(&self, v: &[F]) -> Result<Self> {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        Self::span(self.dim, &all)
    }
}

/// Spans the top left singular vectors of every flattened `M_t(T)`.
pub fn extract_subspace<F: Scalar>(
    survivors: &[usize],
    data: &Dataset<F>,
    params: &FilterParams,
    alpha: f64,
) -> Result<Subspace<F>> {
    params.validate()?;
    let mut vectors = Vec::new();
    for t in 1..=params.max_order() {
        let m = moment_vector(t, survivors, data)?;
        let s = spectral_count(t, params, alpha);
        vectors.extend(top_left_singular_vectors(&flatten(&m)?, s)?.vectors);
    }
    Subspace::span(data.dim(), &vectors)
}

/// Filter, then extract.
pub fn learn_subspace<F: Scalar>(data: &Dataset<F>, params: &FilterParams) -> Result<(Subspace<F>, FilterReport)> {
    let run = run_filter(data, params)?;
    let v = extract_subspace(&run.survivors, data, params, data.alpha())?;
    Ok((v, run.report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_points(rng: &mut ChaCha8Rng, n: usize, mean: &[f64]) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| mean.iter().map(|&m| m + { let z: f64 = StandardNormal.sample(rng); z }).collect::<Vec<f64>>())
            .collect()
    }

    #[test]
    fn threshold_examples() {
        let e_inv = (-1.0f64).exp();
        let p = FilterParams { gamma: 0.5, c_norm: 2.0, ..FilterParams::default() };
        assert!((norm_threshold(2, &p, e_inv) - 64.0).abs() < 1e-9);
        // gamma = 1 sits outside the validated range but the formula is total.
        let p1 = FilterParams { gamma: 1.0, c_norm: 1.0, ..FilterParams::default() };
        assert!((norm_threshold(1, &p1, e_inv) - 1.0).abs() < 1e-12);
        let p = FilterParams::default();
        let mut last = 0.0;
        for t in 1..=10 {
            let thr = norm_threshold(t, &p, 0.3);
            assert!(thr > last);
            last = thr;
        }
    }

    #[test]
    fn params_validation() {
        assert!(FilterParams::default().validate().is_ok());
        assert!(FilterParams { gamma: 1.0, ..Default::default() }.validate().is_err());
        assert!(FilterParams { lambda: 0.0, ..Default::default() }.validate().is_err());
        assert!(FilterParams { s_cap: 0, ..Default::default() }.validate().is_err());
        assert!(FilterParams { k: 5, ..Default::default() }.validate().is_err());
        assert!(FilterParams { c_norm: 0.5, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn moment_vector_basics() {
        let data = Dataset::from_points(&[vec![1.0, 2.0], vec![3.0, -2.0]], 1.0).unwrap();
        let m1 = moment_vector(1, &[0, 1], &data).unwrap();
        assert_eq!(m1.data(), &[2.0, 0.0]);
        let single = moment_vector(3, &[1], &data).unwrap();
        let h = crate::tensor::hermite_tensor(3, data.point(1)).unwrap();
        assert!(single.max_abs_diff(&h).unwrap() < 1e-12);
        assert_eq!(moment_vector(1, &[], &data), Err(Error::EmptySet));
    }

    #[test]
    fn scores_single_outlier_is_largest() {
        let pts = vec![vec![0.5], vec![-0.5], vec![20.0]];
        let data = Dataset::from_points(&pts, 0.5).unwrap();
        let p = FilterParams { k: 1, ..Default::default() };
        let tau = filter_scores(1, &[0, 1, 2], &data, &p).unwrap();
        assert!(tau[2] > tau[0] && tau[2] > tau[1]);
        let tau = filter_scores(1, &[0, 1], &data, &p).unwrap();
        assert_eq!(tau[2], 0.0);
    }

    #[test]
    fn score_mass_bound_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = gaussian_points(&mut rng, 200, &[1.0, -0.5, 0.0]);
        let data = Dataset::from_points(&pts, 0.3).unwrap();
        let idx: Vec<usize> = (0..150).collect();
        for t in 1..=4 {
            let tau = filter_scores(t, &idx, &data, &FilterParams::default()).unwrap();
            let m = moment_vector(t, &idx, &data).unwrap().norm();
            let total: f64 = idx.iter().map(|&i| tau[i]).sum();
            assert!(total >= idx.len() as f64 * m * m * (1.0 - 1e-12));
        }
    }

    #[test]
    fn identical_points_keep_everything() {
        let data = Dataset::from_points(&vec![vec![0.0, 0.0]; 30], 0.5).unwrap();
        let run = run_filter(&data, &FilterParams::default()).unwrap();
        assert_eq!(run.survivors.len(), 30);
        assert!(run.report.removals.is_empty());
    }

    #[test]
    fn incremental_scores_match_dense_recomputation() {
        // Strict thresholds force removals; replay the log and compare each
        // step's chosen order against a from-scratch evaluation.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut pts = gaussian_points(&mut rng, 120, &[0.0, 0.0, 0.0]);
        pts.extend(gaussian_points(&mut rng, 80, &[6.0, 0.0, -3.0]));
        let data = Dataset::from_points(&pts, 0.6).unwrap();
        let p = FilterParams { k: 1, gamma: 0.9, c_norm: 1.0, removal: RemovalRule::Argmax, ..Default::default() };
        let run = run_filter(&data, &p).unwrap();
        assert!(!run.report.removals.is_empty());
        let mut alive: Vec<usize> = (0..200).collect();
        for ev in &run.report.removals {
            let tau = filter_scores(ev.order, &alive, &data, &p).unwrap();
            let best = alive
                .iter()
                .copied()
                .max_by(|&a, &b| tau[a].partial_cmp(&tau[b]).unwrap().then(b.cmp(&a)))
                .unwrap();
            assert!((tau[best] - tau[ev.index]).abs() <= 1e-9 * tau[best].abs().max(1.0));
            alive.retain(|&i| i != ev.index);
        }
        assert_eq!(alive, run.survivors);
        assert!(run.report.max_relative_norm() <= 1.0);
    }

    #[test]
    fn exhausted_when_budget_too_small() {
        let mut pts = vec![vec![0.0]; 10];
        pts.extend(vec![vec![100.0]; 10]);
        let data = Dataset::from_points(&pts, 0.5).unwrap();
        let p = FilterParams { k: 1, max_removals: Some(2), ..Default::default() };
        assert!(matches!(run_filter(&data, &p), Err(Error::Exhausted { removals: 2, .. })));
    }

    #[test]
    fn extract_from_point_mass() {
        let p = vec![3.0, 4.0];
        let data = Dataset::from_points(&vec![p.clone(); 5], 1.0).unwrap();
        let params = FilterParams { k: 1, s_cap: 1, ..Default::default() };
        let v = extract_subspace(&[0, 1, 2, 3, 4], &data, &params, 1.0).unwrap();
        assert!(v.residual_norm(&p) < 1e-9);
        let zeros = Dataset::from_points(&vec![vec![0.0, 0.0]; 3], 1.0).unwrap();
        // H_1(0) = 0 but H_2(0) = -I, so only t = 1 contributes nothing.
        let params = FilterParams { k: 1, s_cap: 2, ..Default::default() };
        let v = extract_subspace(&[0, 1, 2], &zeros, &params, 0.5).unwrap();
        assert_eq!(v.rank(), 2);
    }

    #[test]
    fn subspace_projector_idempotent() {
        let v = Subspace::span(3, &[vec![1.0f64, 1.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
        assert!(v.is_orthonormal(1e-12));
        let p = v.projector();
        let mut pp = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                pp[i * 3 + j] = (0..3).map(|k| p[i * 3 + k] * p[k * 3 + j]).sum();
            }
        }
        assert!(p.iter().zip(&pp).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
