//! Exhaustive cover search for candidate means whose reweighted, recentred
//! moments match the standard Gaussian ones.

mod cover;
mod fit;
mod objective;
mod simplex;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::filter::Subspace;
use crate::scalar::{dist, Scalar};

pub use cover::{build_cover, build_cover_with_cap, DEFAULT_COVER_CAP};
pub use fit::{fit_weights, SolverParams, Termination};
pub use objective::{moment_objective, order_gaps, MomentDesign};
pub use simplex::{capped_simplex_kkt_residual, project_capped_simplex, Weights};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchParams {
    pub r: f64,
    pub eps: f64,
    /// Grid resolution; `None` uses [`SearchParams::default_eps_prime`].
    pub eps_prime: Option<f64>,
    pub k_star: usize,
    pub delta: f64,
    pub alpha: f64,
    pub solver: SolverParams,
    pub candidate_cap: usize,
    pub cover_cap: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            eps: 0.5,
            eps_prime: None,
            k_star: 2,
            delta: 0.5,
            alpha: 0.5,
            solver: SolverParams::default(),
            candidate_cap: 4096,
            cover_cap: DEFAULT_COVER_CAP,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= self.r) {
            return Err(Error::InvalidParam(format!("need 0 < eps <= r, got eps={} r={}", self.eps, self.r)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParam(format!("delta must be positive, got {}", self.delta)));
        }
        if self.k_star == 0 {
            return Err(Error::InvalidParam("k_star must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParam(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if let Some(e) = self.eps_prime {
            if !(e > 0.0) {
                return Err(Error::InvalidParam(format!("eps_prime must be positive, got {e}")));
            }
        }
        if self.candidate_cap == 0 {
            return Err(Error::InvalidParam("candidate_cap must be at least 1".into()));
        }
        Ok(())
    }

    /// `min(ε/2, Δ / (2√k* (4 d k*)^{k*/2}))` for a search in `d` dimensions.
    pub fn default_eps_prime(&self, d: usize) -> f64 {
        let k = self.k_star as f64;
        let fine = self.delta / (2.0 * k.sqrt() * (4.0 * d.max(1) as f64 * k).powf(k / 2.0));
        (self.eps / 2.0).min(fine)
    }

    pub fn effective_eps_prime(&self, d: usize) -> f64 {
        self.eps_prime.unwrap_or_else(|| self.default_eps_prime(d))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate<F> {
    pub mu: Vec<F>,
    pub weights: Weights<F>,
    /// Summed squared gaps over orders `1..=k*`.
    pub objective: f64,
    /// Per-order gaps `‖M_k(w) − E[Z^{⊗k}]‖_F`.
    pub order_gaps: Vec<f64>,
    pub accepted: bool,
    /// Certified lower bound on the optimum over all weights.
    pub lower_bound: f64,
    pub iterations: usize,
    pub termination: Termination,
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl<F: Scalar> Candidate<F> {
    /// Every per-order gap is at most `Δ`.
    pub fn per_order_ok(&self, delta: f64) -> bool {
        self.order_gaps.iter().all(|&g| g <= delta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateList<F> {
    pub entries: Vec<Candidate<F>>,
    /// `candidate_cap` was reached before the cover was exhausted.
    pub truncated: bool,
    pub cover_size: usize,
    pub evaluated: usize,
}

impl<F: Scalar> CandidateList<F> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn means(&self) -> Vec<Vec<F>> {
        self.entries.iter().map(|c| c.mu.clone()).collect()
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                best = best.min(dist(&a.mu, &b.mu).as_f64());
            }
        }
        best
    }

    /// `[{mu, objective, weights_digest: {sum, min, max, hash}}]`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|c| {
                let w: Vec<f64> = c.weights.w.iter().map(|x| x.as_f64()).collect();
                serde_json::json!({
                    "mu": c.mu.iter().map(|x| x.as_f64()).collect::<Vec<_>>(),
                    "objective": c.objective,
                    "weights_digest": {
                        "sum": w.iter().sum::<f64>(),
                        "min": w.iter().copied().fold(f64::INFINITY, f64::min),
                        "max": w.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                        "hash": weights_hash(&w),
                    },
                })
            })
            .collect();
        serde_json::Value::Array(entries)
    }

    /// All weight vectors back to back as little-endian f64.
    pub fn write_weights_sidecar(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        for c in &self.entries {
            for x in &c.weights.w {
                buf.extend_from_slice(&x.as_f64().to_le_bytes());
            }
        }
        crate::harness::io::write_atomic(path, &buf)
    }
}

/// Hex SHA-256 of the little-endian f64 encoding.
pub fn weights_hash(w: &[f64]) -> String {
    let mut h = Sha256::new();
    for x in w {
        h.update(x.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

const CHUNK: usize = 64;

/// Fits every cover point around `center` (optionally inside `subspace`) and
/// greedily keeps accepted candidates at least `ε/2` from those already kept.
pub fn search<F: Scalar>(
    data: &Dataset<F>,
    params: &SearchParams,
    center: &[F],
    subspace: Option<&Subspace<F>>,
) -> Result<CandidateList<F>> {
    params.validate()?;
    if center.len() != data.dim() {
        return Err(Error::DimMismatch { expected: data.dim(), actual: center.len() });
    }
    let work = match subspace {
        Some(s) if s.ambient_dim() != data.dim() => {
            return Err(Error::DimMismatch { expected: data.dim(), actual: s.ambient_dim() })
        }
        Some(s) => data.project(center, s.basis())?,
        None => data.recentered(center)?,
    };
    let dim = work.dim();
    let cover: Vec<Vec<F>> =
        build_cover_with_cap(params.r, params.effective_eps_prime(dim), dim, params.cover_cap)?;
    let lift = |p: &[F]| -> Vec<F> {
        let offset = match subspace {
            Some(s) => s.lift(p),
            None => p.to_vec(),
        };
        center.iter().zip(offset).map(|(&c, o)| c + o).collect()
    };

    let half = params.eps / 2.0;
    let mut kept: Vec<Candidate<F>> = Vec::new();
    let mut evaluated = 0;
    let mut truncated = false;
    'outer: for chunk in cover.chunks(CHUNK) {
        let fitted: Vec<Result<Candidate<F>>> = chunk
            .par_iter()
            .map(|p| {
                let mut c = fit_weights(p, &work, params)?;
                c.mu = lift(p);
                Ok(c)
            })
            .collect();
        for c in fitted {
            let c = c?;
            evaluated += 1;
            if !c.accepted {
                continue;
            }
            if kept.iter().all(|k| dist(&k.mu, &c.mu).as_f64() >= half) {
                if kept.len() == params.candidate_cap {
                    truncated = true;
                    break 'outer;
                }
                kept.push(c);
            }
        }
    }
    Ok(CandidateList { entries: kept, truncated, cover_size: cover.len(), evaluated })
}
