//! Experiment drivers behind the command-line subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::io::{read_dataset, read_json, read_points, write_atomic, write_json};
use super::{generate, AdversaryStrategy};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::oracle::{sample_gaussian, verify_centers, CenterConfig, VerificationReport};
use crate::pipeline::{estimate, tournament, trusted_sample_size, Estimate, PipelineConfig, TournamentInput};
use crate::rng::{stream_for, tag};
use crate::scalar::dist;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "LISTMEAN_THREADS";

/// Sizes the global thread pool from `LISTMEAN_THREADS`; returns the cap if one was set.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(Error::InvalidParam(format!("{THREADS_ENV} must be positive")));
    }
    // A pool built earlier in the process keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

/// Hex SHA-256 of the compact JSON encoding.
pub fn config_digest<T: Serialize>(config: &T) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub coarse_ms: f64,
    pub filter_ms: f64,
    pub search_ms: f64,
    pub tournament_ms: Option<f64>,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config_digest: String,
    pub seed: u64,
    pub list_size: usize,
    /// `min_i ‖μ_i − μ‖`; absent without ground truth or with an empty list.
    pub min_error: Option<f64>,
    pub runtime_ms: StageTimes,
    pub filter_removals: usize,
    pub truncated: bool,
    pub tournament_error: Option<f64>,
}

fn min_error(list: &[Vec<f64>], truth: Option<&[f64]>) -> Option<f64> {
    let mu = truth?;
    list.iter().map(|m| dist(m, mu)).min_by(f64::total_cmp)
}

/// Runs the pipeline on an in-memory dataset.
pub fn run_pipeline(data: &Dataset<f64>, config: &PipelineConfig) -> Result<(Estimate, ExperimentResult)> {
    let start = Instant::now();
    let est = estimate(data, config)?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let means = est.list.means();
    let result = ExperimentResult {
        config_digest: config_digest(config)?,
        seed: config.seed,
        list_size: means.len(),
        min_error: min_error(&means, data.truth().map(|t| t.true_mean.as_slice())),
        runtime_ms: StageTimes {
            coarse_ms: est.coarse_ms,
            filter_ms: est.centers.iter().map(|c| c.filter_ms).sum(),
            search_ms: est.centers.iter().map(|c| c.search_ms).sum(),
            tournament_ms: None,
            total_ms,
        },
        filter_removals: est.filter_removals(),
        truncated: est.list.truncated,
        tournament_error: None,
    };
    Ok((est, result))
}

/// Sibling path for the experiment summary of an estimate written to `out`.
pub fn result_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".result.json");
    out.with_file_name(name)
}

/// Loads a pipeline config; `alpha` defaults to the dataset header value when the file omits it.
pub fn load_config(path: Option<&Path>, data_alpha: f64) -> Result<PipelineConfig> {
    let Some(path) = path else {
        return Ok(PipelineConfig { alpha: data_alpha, ..PipelineConfig::default() });
    };
    let raw: serde_json::Value = read_json(path)?;
    let has_alpha = raw.get("alpha").is_some();
    let mut config: PipelineConfig =
        serde_json::from_value(raw).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    if !has_alpha {
        config.alpha = data_alpha;
    }
    Ok(config)
}

/// Writes the candidate list to `out` and the [`ExperimentResult`] next to it.
pub fn run_estimate(
    dataset: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    out: &Path,
) -> Result<ExperimentResult> {
    let data = read_dataset(dataset)?;
    let mut config = load_config(config, data.alpha())?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let (est, result) = run_pipeline(&data, &config)?;
    write_json(out, &est.list.to_json_value())?;
    write_json(&result_path(out), &result)?;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentersFile {
    pub centers: Vec<Vec<f64>>,
    /// Claimed separation; the smallest pairwise distance when absent.
    #[serde(default)]
    pub beta: Option<f64>,
}

pub fn run_verify(centers: &Path, samples: usize, seed: u64, out: &Path) -> Result<VerificationReport> {
    let file: CentersFile = read_json(centers)?;
    let beta = match file.beta {
        Some(b) => b,
        None => {
            let mut m = f64::INFINITY;
            for (i, a) in file.centers.iter().enumerate() {
                for b in &file.centers[i + 1..] {
                    m = m.min(dist(a, b));
                }
            }
            if m.is_finite() { m } else { 0.0 }
        }
    };
    let cfg = CenterConfig::new(file.centers, beta)?;
    let report = verify_centers(&cfg, samples, seed, samples.min(10_000))?;
    write_json(out, &report)?;
    Ok(report)
}

pub fn run_tournament(
    list: &Path,
    trusted: &Path,
    eps: f64,
    delta: f64,
    seed: u64,
    out: &Path,
) -> Result<crate::pipeline::TournamentOutcome> {
    let input = TournamentInput { list: read_points(list)?, trusted: read_points(trusted)?, eps, delta };
    let outcome = tournament(&input, seed)?;
    write_json(out, &outcome)?;
    Ok(outcome)
}

/// Synthetic data for one bench configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub alpha: f64,
    pub n: usize,
    pub d: usize,
    /// Zero when absent.
    #[serde(default)]
    pub true_mean: Option<Vec<f64>>,
    #[serde(default)]
    pub adversary: AdversaryStrategy,
}

impl DataSpec {
    pub fn mean(&self) -> Vec<f64> {
        self.true_mean.clone().unwrap_or_else(|| vec![0.0; self.d])
    }

    pub fn generate(&self, seed: u64) -> Result<Dataset<f64>> {
        generate(self.alpha, self.n, self.d, &self.mean(), &self.adversary, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub name: String,
    pub data: DataSpec,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    /// Runs the trusted-sample tournament with this failure probability.
    #[serde(default)]
    pub tournament_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchMatrix {
    pub configs: Vec<BenchConfig>,
    pub seeds: Vec<u64>,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub config: String,
    pub config_digest: String,
    pub seed: u64,
    pub adversary: String,
    pub list_size: usize,
    pub min_error: Option<f64>,
    pub tournament_error: Option<f64>,
    pub filter_removals: usize,
    pub truncated: bool,
    pub coarse_ms: f64,
    pub filter_ms: f64,
    pub search_ms: f64,
    pub tournament_ms: Option<f64>,
    pub total_ms: f64,
}

/// Generates data and runs the pipeline (and optionally the tournament) for one seed.
pub fn run_trial(cfg: &BenchConfig, seed: u64) -> Result<ExperimentResult> {
    let data = cfg.data.generate(seed)?;
    let mut pipeline = cfg.pipeline.clone();
    pipeline.alpha = cfg.data.alpha;
    pipeline.seed = seed;
    let start = Instant::now();
    let (est, mut result) = run_pipeline(&data, &pipeline)?;
    result.config_digest = config_digest(cfg)?;
    if let (Some(delta), false) = (cfg.tournament_delta, est.list.is_empty()) {
        let t0 = Instant::now();
        let list = est.list.means();
        let m = trusted_sample_size(list.len(), pipeline.eps, delta);
        let mu = cfg.data.mean();
        let trusted = sample_gaussian(&mu, m, stream_for(&[seed, tag::TOURNAMENT]));
        let input = TournamentInput { list, trusted, eps: pipeline.eps, delta };
        let outcome = tournament(&input, seed)?;
        result.tournament_error = Some(dist(&outcome.winner, &mu));
        result.runtime_ms.tournament_ms = Some(t0.elapsed().as_secs_f64() * 1e3);
    }
    result.runtime_ms.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(result)
}

/// Runs every `(config, seed)` pair in parallel and returns rows in matrix order.
pub fn bench_rows(matrix: &BenchMatrix) -> Result<Vec<BenchRow>> {
    let jobs: Vec<(&BenchConfig, u64)> =
        matrix.configs.iter().flat_map(|c| matrix.seeds.iter().map(move |&s| (c, s))).collect();
    jobs.par_iter()
        .map(|&(cfg, seed)| {
            let r = run_trial(cfg, seed)?;
            Ok(BenchRow {
                config: cfg.name.clone(),
                config_digest: r.config_digest,
                seed,
                adversary: cfg.data.adversary.name().to_string(),
                list_size: r.list_size,
                min_error: r.min_error,
                tournament_error: r.tournament_error,
                filter_removals: r.filter_removals,
                truncated: r.truncated,
                coarse_ms: r.runtime_ms.coarse_ms,
                filter_ms: r.runtime_ms.filter_ms,
                search_ms: r.runtime_ms.search_ms,
                tournament_ms: r.runtime_ms.tournament_ms,
                total_ms: r.runtime_ms.total_ms,
            })
        })
        .collect()
}

pub fn write_bench_csv(rows: &[BenchRow], out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write_atomic(out, &bytes)
}

pub fn bench(matrix_file: &Path, out_csv: &Path) -> Result<Vec<BenchRow>> {
    let matrix: BenchMatrix = read_json(matrix_file)?;
    if matrix.configs.is_empty() || matrix.seeds.is_empty() {
        return Err(Error::InvalidParam("bench matrix needs at least one config and one seed".into()));
    }
    let rows = bench_rows(&matrix)?;
    write_bench_csv(&rows, out_csv)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_tracks_config() {
        let a = PipelineConfig::default();
        let b = PipelineConfig { seed: 1, ..a.clone() };
        assert_eq!(config_digest(&a).unwrap(), config_digest(&a.clone()).unwrap());
        assert_ne!(config_digest(&a).unwrap(), config_digest(&b).unwrap());
        assert_eq!(config_digest(&a).unwrap().len(), 64);
    }

    #[test]
    fn result_path_sits_beside_output() {
        assert_eq!(result_path(Path::new("/tmp/x/list.json")), Path::new("/tmp/x/list.result.json"));
        assert_eq!(result_path(Path::new("out")), Path::new("out.result.json"));
    }

    #[test]
    fn min_error_needs_truth() {
        let l = vec![vec![3.0, 4.0], vec![1.0, 0.0]];
        assert_eq!(min_error(&l, Some(&[0.0, 0.0])), Some(1.0));
        assert_eq!(min_error(&l, None), None);
        assert_eq!(min_error(&[], Some(&[0.0])), None);
    }
}
