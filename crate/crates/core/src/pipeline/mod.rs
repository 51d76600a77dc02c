//! End-to-end list estimation and trusted-sample selection.

mod coarse;
mod tournament;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::filter::{learn_subspace, FilterParams, Subspace};
use crate::rng::{stream_for, tag};
use crate::scalar::dist;
use crate::search::{search, Candidate, CandidateList, SearchParams};

pub use coarse::{coarse_list, CoarseParams};
pub use tournament::{tournament, trusted_sample_size, TournamentInput, TournamentOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub alpha: f64,
    pub eps: f64,
    pub filter: FilterParams,
    /// `alpha` and `eps` are taken from the enclosing config.
    pub search: SearchParams,
    pub coarse: CoarseParams,
    pub seed: u64,
}

impl Default for PipelineConfig {
    /// Settings that run at desk scale (`d ≲ 16`, `n ≲ 10^4`).
    fn default() -> Self {
        Self {
            alpha: 0.3,
            eps: 0.5,
            filter: FilterParams { k: 1, gamma: 0.9, c_norm: 1.0, s_cap: 1, ..FilterParams::default() },
            search: SearchParams {
                r: 0.5,
                eps: 0.5,
                eps_prime: Some(0.25),
                k_star: 2,
                delta: 0.35,
                ..SearchParams::default()
            },
            coarse: CoarseParams { separation_mult: 2.0, ..CoarseParams::default() },
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParam(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParam(format!("eps must be positive, got {}", self.eps)));
        }
        self.filter.validate()?;
        self.search_params().validate()
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams { alpha: self.alpha, eps: self.eps, ..self.search.clone() }
    }

    fn filter_params(&self, center: usize) -> FilterParams {
        FilterParams { seed: stream_for(&[self.seed, tag::CENTER, center as u64, tag::FILTER]), ..self.filter.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub center: Vec<f64>,
    pub subspace_rank: usize,
    pub filter_removals: usize,
    pub accepted: usize,
    pub cover_size: usize,
    pub truncated: bool,
    /// Why the center was skipped, if it was.
    pub skipped: Option<String>,
    pub filter_ms: f64,
    pub search_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub list: CandidateList<f64>,
    pub centers: Vec<CenterReport>,
    pub coarse_ms: f64,
}

impl Estimate {
    pub fn filter_removals(&self) -> usize {
        self.centers.iter().map(|c| c.filter_removals).sum()
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn run_center(
    data: &Dataset<f64>,
    config: &PipelineConfig,
    index: usize,
    center: &[f64],
) -> Result<(Vec<Candidate<f64>>, CenterReport)> {
    let mut report = CenterReport {
        center: center.to_vec(),
        subspace_rank: 0,
        filter_removals: 0,
        accepted: 0,
        cover_size: 0,
        truncated: false,
        skipped: None,
        filter_ms: 0.0,
        search_ms: 0.0,
    };
    let start = Instant::now();
    let recentered = data.recentered(center)?.with_alpha(config.alpha)?;
    let (v, filter_report) = match learn_subspace(&recentered, &config.filter_params(index)) {
        Ok(x) => x,
        Err(e @ Error::Exhausted { .. }) => {
            report.skipped = Some(e.to_string());
            report.filter_ms = ms(start);
            return Ok((Vec::new(), report));
        }
        Err(e) => return Err(e),
    };
    report.filter_removals = filter_report.removal_count();
    report.filter_ms = ms(start);
    let norm = center.iter().map(|x| x * x).sum::<f64>().sqrt();
    let space = if norm > 0.0 {
        v.augmented(&center.iter().map(|x| x / norm).collect::<Vec<_>>())?
    } else {
        v
    };
    let space = if space.rank() == 0 { Subspace::span(data.dim(), &[unit(data.dim())])? } else { space };
    report.subspace_rank = space.rank();
    let start = Instant::now();
    let found = search(data, &config.search_params(), center, Some(&space))?;
    report.search_ms = ms(start);
    report.accepted = found.len();
    report.cover_size = found.cover_size;
    report.truncated = found.truncated;
    Ok((found.entries, report))
}

fn unit(d: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[0] = 1.0;
    e
}

/// Coarse centers, then per center: recenter, learn a subspace, search inside
/// it; the per-center lists are merged by ascending objective and pruned to
/// `ε/2` separation.
pub fn estimate(data: &Dataset<f64>, config: &PipelineConfig) -> Result<Estimate> {
    config.validate()?;
    if data.is_empty() {
        return Err(Error::EmptySet);
    }
    let start = Instant::now();
    let centers = coarse_list(data, &config.coarse, config.alpha);
    let coarse_ms = ms(start);
    let results: Vec<Result<(Vec<Candidate<f64>>, CenterReport)>> =
        centers.par_iter().enumerate().map(|(i, c)| run_center(data, config, i, c)).collect();
    let mut pool = Vec::new();
    let mut reports = Vec::new();
    for r in results {
        let (cands, rep) = r?;
        pool.extend(cands);
        reports.push(rep);
    }
    // Stable sort keeps center and cover order among equal objectives.
    pool.sort_by(|a, b| a.objective.total_cmp(&b.objective));
    let half = config.eps / 2.0;
    let cap = config.search.candidate_cap;
    let mut kept: Vec<Candidate<f64>> = Vec::new();
    let mut truncated = reports.iter().any(|r| r.truncated);
    let evaluated = reports.iter().map(|r| r.cover_size).sum();
    for c in pool {
        if kept.iter().all(|k| dist(&k.mu, &c.mu) >= half) {
            if kept.len() == cap {
                truncated = true;
                break;
            }
            kept.push(c);
        }
    }
    let list = CandidateList { entries: kept, truncated, cover_size: evaluated, evaluated };
    Ok(Estimate { list, centers: reports, coarse_ms })
}
