//! Gaussian sampling, densities and Monte-Carlo verifiers for the
//! identifiability geometry.

mod lower_bound;

use std::f64::consts::{PI, SQRT_2};

use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::rng::{rng_for, tag, Rng};

pub use lower_bound::{LowerBoundInstance, LowerBoundParams};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal upper tail `1 − Φ(x)`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `Φ^{-1}(p)` for `p ∈ (0, 1)`: the inverse-erfc guess polished by Newton
/// steps on the tail that is more accurate.
pub fn normal_quantile(p: f64) -> f64 {
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..3 {
        let dens = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if dens == 0.0 {
            break;
        }
        let err = if p < 0.5 { normal_cdf(x) - p } else { (1.0 - p) - normal_sf(x) };
        x -= err / dens;
    }
    x
}

pub fn log_density_gaussian(x: &[f64], mu: &[f64]) -> f64 {
    let d = x.len() as f64;
    let r2: f64 = x.iter().zip(mu).map(|(a, b)| (a - b) * (a - b)).sum();
    -0.5 * d * (2.0 * PI).ln() - 0.5 * r2
}

pub fn density_gaussian(x: &[f64], mu: &[f64]) -> f64 {
    log_density_gaussian(x, mu).exp()
}

pub(crate) fn fill_normal(rng: &mut Rng, out: &mut [f64]) {
    out.iter_mut().for_each(|z| *z = rng.sample(StandardNormal));
}

/// `count` draws from `N(μ, I)`.
pub fn sample_gaussian(mu: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_for(seed, &[tag::MONTE_CARLO]);
    sample_gaussian_with(mu, count, &mut rng)
}

pub fn sample_gaussian_with(mu: &[f64], count: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| mu.iter().map(|&m| m + rng.sample::<f64, _>(StandardNormal)).collect())
        .collect()
}

/// Monte-Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Wald interval for a proportion.
    pub fn proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self { value: p, stderr: (p * (1.0 - p) / n as f64).sqrt(), samples: n }
    }

    pub fn mean(sum: f64, sum_sq: f64, n: usize) -> Self {
        let m = sum / n as f64;
        let var = (sum_sq / n as f64 - m * m).max(0.0);
        Self { value: m, stderr: (var / n as f64).sqrt(), samples: n }
    }
}

const BATCH: usize = 1 << 15;

/// Runs `f(rng, count)` over fixed-size batches with per-batch streams and
/// sums the `(sum, sum_sq)` results in batch order.
fn batched(n: usize, seed: u64, op: u64, f: impl Fn(&mut Rng, usize) -> (f64, f64) + Sync) -> (f64, f64) {
    let batches = n.div_ceil(BATCH);
    let parts: Vec<(f64, f64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, &[tag::MONTE_CARLO, op, b as u64]);
            f(&mut rng, BATCH.min(n - b * BATCH))
        })
        .collect();
    parts.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y))
}

/// Candidate centers with a claimed pairwise separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterConfig {
    centers: Vec<Vec<f64>>,
    beta: f64,
}

impl CenterConfig {
    pub fn new(centers: Vec<Vec<f64>>, beta: f64) -> Result<Self> {
        let Some(d) = centers.first().map(Vec::len) else {
            return Err(Error::EmptySet);
        };
        if centers.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidParam("centers have mixed dimensions".into()));
        }
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                let dist = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                if dist < beta {
                    return Err(Error::InvalidParam(format!("centers {dist} apart, below beta = {beta}")));
                }
            }
        }
        Ok(Self { centers, beta })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::InvalidParam(format!("center index {i} out of range")));
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Pr_{x~N(μ_i,I)}[x strictly nearest to μ_i]`.
pub fn voronoi_mass(i: usize, cfg: &CenterConfig, n: usize, seed: u64) -> Result<Estimate> {
    cfg.check_index(i)?;
    if n == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let c = cfg.centers();
    let (hits, _) = batched(n, seed, 0x766f_726f ^ i as u64, |rng, count| {
        let mut x = vec![0.0; cfg.dim()];
        let mut hits = 0usize;
        for _ in 0..count {
            fill_normal(rng, &mut x);
            x.iter_mut().zip(&c[i]).for_each(|(z, m)| *z += m);
            let own = sq_dist(&x, &c[i]);
            if c.iter().enumerate().all(|(j, m)| j == i || own < sq_dist(&x, m)) {
                hits += 1;
            }
        }
        (hits as f64, 0.0)
    });
    Ok(Estimate::proportion(hits as usize, n))
}

/// `Pr_{x~N(0,I)}[⟨x,μ_i⟩ > ⟨x,μ_j⟩ for all j ≠ i]`.
pub fn argmax_prob(i: usize, cfg: &CenterConfig, n: usize, seed: u64) -> Result<Estimate> {
    cfg.check_index(i)?;
    if n == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let c = cfg.centers();
    let (hits, _) = batched(n, seed, 0x6172_676d ^ i as u64, |rng, count| {
        let mut x = vec![0.0; cfg.dim()];
        let mut hits = 0usize;
        for _ in 0..count {
            fill_normal(rng, &mut x);
            let own = dot(&x, &c[i]);
            if c.iter().enumerate().all(|(j, m)| j == i || own > dot(&x, m)) {
                hits += 1;
            }
        }
        (hits as f64, 0.0)
    });
    Ok(Estimate::proportion(hits as usize, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FatteningResult {
    pub trials: usize,
    pub violations: usize,
    /// Trials skipped because no point of `A_i` was found by rejection.
    pub rejection_failures: usize,
}

/// Checks that `y = x + h` with `x ∈ A_i`, `‖h‖ ≤ β/2` satisfies
/// `‖y‖² < ‖y − μ_j + μ_i‖²` for every `j ≠ i`.
pub fn fattening_containment_test(cfg: &CenterConfig, trials: usize, seed: u64) -> FatteningResult {
    fattening_with_radius(cfg, trials, seed, cfg.beta() / 2.0)
}

/// As [`fattening_containment_test`] with perturbations up to `radius`.
pub fn fattening_with_radius(cfg: &CenterConfig, trials: usize, seed: u64, radius: f64) -> FatteningResult {
    const MAX_ATTEMPTS: usize = 100_000;
    let c = cfg.centers();
    let d = cfg.dim();
    let mut rng = rng_for(seed, &[tag::MONTE_CARLO, 0x6661_7474]);
    let mut out = FatteningResult { trials, violations: 0, rejection_failures: 0 };
    let mut x = vec![0.0; d];
    let mut h = vec![0.0; d];
    for t in 0..trials {
        let i = t % c.len();
        let found = (0..MAX_ATTEMPTS).any(|_| {
            fill_normal(&mut rng, &mut x);
            let own = dot(&x, &c[i]);
            c.iter().enumerate().all(|(j, m)| j == i || own > dot(&x, m))
        });
        if !found {
            out.rejection_failures += 1;
            continue;
        }
        fill_normal(&mut rng, &mut h);
        let hn = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u: f64 = rng.random();
        let scale = radius * u.powf(1.0 / d as f64) / hn;
        let y: Vec<f64> = x.iter().zip(&h).map(|(a, b)| a + b * scale).collect();
        let yy = dot(&y, &y);
        let ok = c.iter().enumerate().all(|(j, m)| {
            j == i || {
                let shifted: Vec<f64> = y.iter().zip(m.iter().zip(&c[i])).map(|(a, (mj, mi))| a - mj + mi).collect();
                yy < dot(&shifted, &shifted)
            }
        });
        if !ok {
            out.violations += 1;
        }
    }
    out
}

/// The `x` with `∫_x^∞ φ = p`.
pub fn halfspace_threshold(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 0.5) {
        return Err(Error::InvalidParam(format!("p must lie in (0, 1/2], got {p}")));
    }
    Ok(-normal_quantile(p))
}

/// Gaussian mass of the `ε`-fattening of a halfspace of mass `p`:
/// `1 − Φ(Φ^{-1}(1−p) − ε)`.
pub fn halfspace_isoperimetry(p: f64, eps: f64) -> Result<f64> {
    let x = halfspace_threshold(p)?;
    Ok(normal_sf(x - eps))
}

/// `min_x D(x) − α·N(μ,I)(x)` over the test points.
pub fn alpha_consistency_check(density: impl Fn(&[f64]) -> f64, mu: &[f64], alpha: f64, points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|x| density(x) - alpha * density_gaussian(x, mu))
        .fold(f64::INFINITY, f64::min)
}

/// `E_{x~N(0,I)}[max_i ⟨x, μ_i⟩]`.
pub fn sup_process_estimate(centers: &[Vec<f64>], n: usize, seed: u64) -> Result<Estimate> {
    let Some(d) = centers.first().map(Vec::len) else {
        return Err(Error::EmptySet);
    };
    if n == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let (s, s2) = batched(n, seed, 0x7375_7072, |rng, count| {
        let mut x = vec![0.0; d];
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            fill_normal(rng, &mut x);
            let m = centers.iter().map(|c| dot(&x, c)).fold(f64::NEG_INFINITY, f64::max);
            s += m;
            s2 += m * m;
        }
        (s, s2)
    });
    Ok(Estimate::mean(s, s2, n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub q_hat: Vec<Estimate>,
    pub p_hat: Vec<Estimate>,
    pub containment_violations: usize,
    pub rejection_failures: usize,
    /// `min_x D(x) − α N(μ_i,I)(x)` per center when a density is supplied.
    pub consistency_margins: Option<Vec<f64>>,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Voronoi masses, argmax probabilities and the fattening check for `cfg`.
pub fn verify_centers(cfg: &CenterConfig, n: usize, seed: u64, fattening_trials: usize) -> Result<VerificationReport> {
    let q_hat = (0..cfg.len()).map(|i| voronoi_mass(i, cfg, n, seed)).collect::<Result<Vec<_>>>()?;
    let p_hat = (0..cfg.len()).map(|i| argmax_prob(i, cfg, n, seed)).collect::<Result<Vec<_>>>()?;
    let fat = fattening_containment_test(cfg, fattening_trials, seed);
    Ok(VerificationReport {
        seed,
        samples: n,
        q_hat,
        p_hat,
        containment_violations: fat.violations,
        rejection_failures: fat.rejection_failures,
        consistency_margins: None,
    })
}
