use serde::{Deserialize, Serialize};

use crate::data::Dataset;

/// Parameters of the dense-ball heuristic that seeds the per-center search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoarseParams {
    /// Count radius is `√(2d) + ball_radius_mult · √log(1/α)`.
    pub ball_radius_mult: f64,
    /// Keep points whose ball holds at least `min_count_frac · αn` samples.
    pub min_count_frac: f64,
    pub max_centers: usize,
    /// Kept centers are `separation_mult · √log(1/α)` apart (never less than `√d`).
    pub separation_mult: f64,
    /// Mean-shift steps over a radius-`√d` ball applied to every kept point.
    pub refine_iters: usize,
    /// At most this many evenly strided points are scored.
    pub max_scored: usize,
}

impl Default for CoarseParams {
    fn default() -> Self {
        Self {
            ball_radius_mult: 1.0,
            min_count_frac: 0.5,
            max_centers: 8,
            separation_mult: 10.0,
            refine_iters: 5,
            max_scored: 2000,
        }
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn log_root(alpha: f64) -> f64 {
    (1.0 / alpha).ln().max(0.0).sqrt()
}

/// Sample points sitting in dense balls, refined by mean shift and pruned to
/// a separated set. Not a certified low-accuracy list learner.
pub fn coarse_list(data: &Dataset<f64>, params: &CoarseParams, alpha: f64) -> Vec<Vec<f64>> {
    let n = data.len();
    if n == 0 || params.max_centers == 0 {
        return Vec::new();
    }
    let d = data.dim() as f64;
    let radius = (2.0 * d).sqrt() + params.ball_radius_mult * log_root(alpha);
    let r2 = radius * radius;
    let need = params.min_count_frac * alpha * n as f64;
    let stride = n.div_ceil(params.max_scored.max(1)).max(1);
    let mut scored: Vec<(usize, usize)> = (0..n)
        .step_by(stride)
        .map(|i| {
            let p = data.point(i);
            (i, data.iter().filter(|q| sq_dist(p, q) <= r2).count())
        })
        .filter(|&(_, c)| c as f64 >= need)
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let sep = (params.separation_mult * log_root(alpha)).max(d.sqrt());
    let sep2 = sep * sep;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for &(i, _) in &scored {
        let p = data.point(i);
        if seeds.iter().all(|s| sq_dist(s, p) >= sep2) {
            seeds.push(p.to_vec());
        }
    }

    let shift2 = d;
    let mut centers: Vec<Vec<f64>> = Vec::new();
    for mut c in seeds {
        for _ in 0..params.refine_iters {
            let mut acc = vec![0.0; data.dim()];
            let mut count = 0usize;
            for q in data.iter().filter(|q| sq_dist(&c, q) <= shift2) {
                acc.iter_mut().zip(q).for_each(|(a, x)| *a += x);
                count += 1;
            }
            if count == 0 {
                break;
            }
            c = acc.into_iter().map(|a| a / count as f64).collect();
        }
        if centers.iter().all(|s| sq_dist(s, &c) >= sep2) {
            centers.push(c);
            if centers.len() == params.max_centers {
                break;
            }
        }
    }
    centers
}
