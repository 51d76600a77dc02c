use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{batched, density_gaussian, normal_sf, Estimate};
use crate::error::{Error, Result};
use crate::rng::{rng_for, tag, Rng};

/// Everything needed to rebuild a [`LowerBoundInstance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub alpha: f64,
    pub eps: f64,
    pub d_planted: usize,
    /// Ambient dimension, at least `d_planted`.
    pub dim: usize,
    pub seed: u64,
    #[serde(default = "default_mass_samples")]
    pub mass_samples: usize,
}

fn default_mass_samples() -> usize {
    1_000_000
}

impl LowerBoundParams {
    pub fn new(alpha: f64, eps: f64, d_planted: usize, seed: u64) -> Self {
        Self { alpha, eps, d_planted, dim: d_planted, seed, mass_samples: default_mass_samples() }
    }

    fn log_inv(&self) -> f64 {
        (1.0 / (2.0 * self.alpha)).ln()
    }

    /// `max(1, ⌊e^{log²(1/2α)/(8ε²)}/2⌋)`.
    pub fn planted_cap(&self) -> usize {
        let l = self.log_inv();
        let v = ((l * l / (8.0 * self.eps * self.eps)).exp() / 2.0).floor();
        if v >= usize::MAX as f64 {
            usize::MAX
        } else {
            (v as usize).max(1)
        }
    }

    /// `e^{−log²(1/2α)/(8ε²)}`.
    pub fn mass_bound(&self) -> f64 {
        let l = self.log_inv();
        (-l * l / (8.0 * self.eps * self.eps)).exp()
    }
}

/// `D = ½N(0,I) + Σ_i D_i + m_rem N(0,I)` with
/// `D_i = max(0, α N(2ε e_i, I) − ½ N(0,I))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundInstance {
    pub params: LowerBoundParams,
    pub m0: f64,
    pub masses: Vec<Estimate>,
    pub m_rem: f64,
}

impl LowerBoundInstance {
    pub fn new(params: LowerBoundParams) -> Result<Self> {
        let (a, e) = (params.alpha, params.eps);
        if !(a > 0.0 && a < 1.0 / 3.0) {
            return Err(Error::Hypothesis(format!("alpha must lie in (0, 1/3), got {a}")));
        }
        if !(e > 0.0 && e < params.log_inv().sqrt() / 2.0) {
            return Err(Error::Hypothesis(format!("eps must lie in (0, sqrt(log(1/2α))/2), got {e}")));
        }
        if params.d_planted == 0 || params.d_planted > params.planted_cap() {
            return Err(Error::Hypothesis(format!(
                "d_planted = {} outside [1, {}]",
                params.d_planted,
                params.planted_cap()
            )));
        }
        if params.dim < params.d_planted || params.mass_samples == 0 {
            return Err(Error::InvalidParam("dim must be at least d_planted and mass_samples positive".into()));
        }
        // D_i depends on x_i alone, so importance sampling from N(2ε e_i, I)
        // reduces to the i-th coordinate.
        let masses: Vec<Estimate> = (0..params.d_planted)
            .map(|i| {
                let (s, s2) = batched(params.mass_samples, params.seed, tag::LOWER_BOUND ^ i as u64, |rng, count| {
                    let (mut s, mut s2) = (0.0, 0.0);
                    for _ in 0..count {
                        let z: f64 = rng.sample(StandardNormal);
                        let v = (a - 0.5 * (-2.0 * e * (2.0 * e + z) + 2.0 * e * e).exp()).max(0.0);
                        s += v;
                        s2 += v * v;
                    }
                    (s, s2)
                });
                Estimate::mean(s, s2, params.mass_samples)
            })
            .collect();
        let cap = 1.0 / (2.0 * params.d_planted as f64);
        if let Some(m) = masses.iter().find(|m| m.value > cap) {
            return Err(Error::Hypothesis(format!("component mass {} exceeds 1/(2d) = {cap}", m.value)));
        }
        let m_rem = 0.5 - masses.iter().map(|m| m.value).sum::<f64>();
        Ok(Self { params, m0: 0.5, masses, m_rem })
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn d_planted(&self) -> usize {
        self.params.d_planted
    }

    /// `D_i(x) > 0 ⟺ x_i > ε + log(1/2α)/(2ε)`.
    pub fn nonzero_threshold(&self) -> f64 {
        let e = self.params.eps;
        e + self.params.log_inv() / (2.0 * e)
    }

    /// Closed form of `∫ D_i`: `α Φ̄(t − 2ε) − ½ Φ̄(t)` at the threshold `t`.
    pub fn exact_component_mass(&self) -> f64 {
        let t = self.nonzero_threshold();
        self.params.alpha * normal_sf(t - 2.0 * self.params.eps) - 0.5 * normal_sf(t)
    }

    pub fn planted_mean(&self, i: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        m[i] = 2.0 * self.params.eps;
        m
    }

    pub fn planted_means(&self) -> Vec<Vec<f64>> {
        (0..self.d_planted()).map(|i| self.planted_mean(i)).collect()
    }

    /// Ratio `α N(2ε e_i)(x) / N(0)(x)`.
    fn ratio(&self, x: &[f64], i: usize) -> f64 {
        let e = self.params.eps;
        self.params.alpha * (2.0 * e * x[i] - 2.0 * e * e).exp()
    }

    pub fn component_density(&self, i: usize, x: &[f64]) -> f64 {
        let n0 = density_gaussian(x, &vec![0.0; x.len()]);
        n0 * (self.ratio(x, i) - 0.5).max(0.0)
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let n0 = density_gaussian(x, &vec![0.0; x.len()]);
        let extra: f64 = (0..self.d_planted()).map(|i| (self.ratio(x, i) - 0.5).max(0.0)).sum();
        n0 * (self.m0 + self.m_rem + extra)
    }

    /// Importance estimate of `∫ D` under `N(0, I)`.
    pub fn total_mass_estimate(&self, n: usize, seed: u64) -> Estimate {
        let d = self.dim();
        let (s, s2) = batched(n, seed, tag::LOWER_BOUND ^ 0x746f_7461, |rng, count| {
            let mut x = vec![0.0; d];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                super::fill_normal(rng, &mut x);
                let v = self.m0
                    + self.m_rem
                    + (0..self.d_planted()).map(|i| (self.ratio(&x, i) - 0.5).max(0.0)).sum::<f64>();
                s += v;
                s2 += v * v;
            }
            (s, s2)
        });
        Estimate::mean(s, s2, n)
    }

    fn sample_one(&self, rng: &mut Rng) -> Vec<f64> {
        let d = self.dim();
        let u: f64 = rng.random();
        let mut acc = self.m0 + self.m_rem;
        let mut comp = None;
        if u >= acc {
            for (i, m) in self.masses.iter().enumerate() {
                acc += m.value;
                if u < acc {
                    comp = Some(i);
                    break;
                }
            }
        }
        let mut x = vec![0.0; d];
        match comp {
            None => super::fill_normal(rng, &mut x),
            Some(i) => {
                let e = self.params.eps;
                loop {
                    super::fill_normal(rng, &mut x);
                    x[i] += 2.0 * e;
                    // Accept with D_i(x) / (α N_i(x)).
                    let accept = (1.0 - 0.5 / self.ratio(&x, i)).max(0.0);
                    if rng.random::<f64>() < accept {
                        break;
                    }
                }
            }
        }
        x
    }

    pub fn sample(&self, count: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Draws from `(D − α N(μ_i, I)) / (1 − α)`.
    pub fn sample_without_planted(&self, i: usize, count: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
        let mu = self.planted_mean(i);
        let a = self.params.alpha;
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let x = self.sample_one(rng);
            let keep = (1.0 - a * density_gaussian(&x, &mu) / self.density(&x)).max(0.0);
            if rng.random::<f64>() < keep {
                out.push(x);
            }
        }
        out
    }

    pub fn rng(&self) -> Rng {
        rng_for(self.params.seed, &[tag::LOWER_BOUND])
    }
}
