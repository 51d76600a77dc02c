use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{inlier_count, Dataset, GroundTruth};
use crate::error::{Error, Result};
use crate::oracle::{sample_gaussian_with, LowerBoundInstance, LowerBoundParams};
use crate::rng::{rng_for, tag, Rng};

/// How the `(1 − α)n` outliers are produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryStrategy {
    /// Outliers drawn from `N(μ + offset, I)`.
    FarCluster { offset: Vec<f64> },
    /// Outliers drawn from `N(2c − μ, I)`, the reflection of the inliers through `c`
    /// (the origin when absent).
    Mirror {
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// Outliers uniform on the sphere of radius `radius` around `μ`.
    UniformShell { radius: f64 },
    /// Copies of random inliers translated by `shift`.
    DuplicateShift { shift: Vec<f64> },
    /// Outliers from the lower-bound mixture with its first planted component
    /// removed; the planted mean `2ε e_1` is translated onto `μ`.
    LbConstruction {
        eps: f64,
        d_planted: usize,
        #[serde(default = "default_lb_samples")]
        mass_samples: usize,
    },
    /// Outliers from `N(0, I)`.
    #[default]
    None,
}

fn default_lb_samples() -> usize {
    100_000
}

impl AdversaryStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FarCluster { .. } => "far_cluster",
            Self::Mirror { .. } => "mirror",
            Self::UniformShell { .. } => "uniform_shell",
            Self::DuplicateShift { .. } => "duplicate_shift",
            Self::LbConstruction { .. } => "lb_construction",
            Self::None => "none",
        }
    }

    fn check_vec(v: &[f64], d: usize) -> Result<()> {
        if v.len() != d {
            return Err(Error::DimMismatch { expected: d, actual: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("adversary parameter"));
        }
        Ok(())
    }

    fn outliers(&self, count: usize, mu: &[f64], inliers: &[Vec<f64>], alpha: f64, seed: u64, rng: &mut Rng) -> Result<Vec<Vec<f64>>> {
        let d = mu.len();
        if count == 0 {
            return Ok(Vec::new());
        }
        Ok(match self {
            Self::FarCluster { offset } => {
                Self::check_vec(offset, d)?;
                let c: Vec<f64> = mu.iter().zip(offset).map(|(a, b)| a + b).collect();
                sample_gaussian_with(&c, count, rng)
            }
            Self::Mirror { center } => {
                let c = center.clone().unwrap_or_else(|| vec![0.0; d]);
                Self::check_vec(&c, d)?;
                let m: Vec<f64> = mu.iter().zip(&c).map(|(a, b)| 2.0 * b - a).collect();
                sample_gaussian_with(&m, count, rng)
            }
            Self::UniformShell { radius } => {
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(Error::InvalidParam(format!("shell radius must be finite and >= 0, got {radius}")));
                }
                (0..count)
                    .map(|_| {
                        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                        g.iter().zip(mu).map(|(x, m)| m + radius * x / n).collect()
                    })
                    .collect()
            }
            Self::DuplicateShift { shift } => {
                Self::check_vec(shift, d)?;
                (0..count)
                    .map(|_| {
                        let src = &inliers[rng.random_range(0..inliers.len())];
                        src.iter().zip(shift).map(|(a, b)| a + b).collect()
                    })
                    .collect()
            }
            Self::LbConstruction { eps, d_planted, mass_samples } => {
                let mut p = LowerBoundParams::new(alpha, *eps, *d_planted, seed);
                p.dim = d;
                p.mass_samples = *mass_samples;
                let inst = LowerBoundInstance::new(p)?;
                let mut shift = inst.planted_mean(0);
                shift.iter_mut().zip(mu).for_each(|(s, m)| *s = m - *s);
                inst.sample_without_planted(0, count, rng)
                    .into_iter()
                    .map(|x| x.iter().zip(&shift).map(|(a, b)| a + b).collect())
                    .collect()
            }
            Self::None => sample_gaussian_with(&vec![0.0; d], count, rng),
        })
    }
}

/// `round(αn)` draws from `N(μ, I)` plus adversarial outliers, shuffled.
pub fn generate(
    alpha: f64,
    n: usize,
    d: usize,
    true_mean: &[f64],
    adversary: &AdversaryStrategy,
    seed: u64,
) -> Result<Dataset<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParam(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if true_mean.len() != d {
        return Err(Error::DimMismatch { expected: d, actual: true_mean.len() });
    }
    let n_in = inlier_count(alpha, n);
    if n_in == 0 {
        return Err(Error::InvalidParam(format!("round(alpha n) = 0 for alpha = {alpha}, n = {n}")));
    }
    let mut rng = rng_for(seed, &[tag::GENERATE]);
    let inliers = sample_gaussian_with(true_mean, n_in, &mut rng);
    let mut adv_rng = rng_for(seed, &[tag::ADVERSARY]);
    let outliers = adversary.outliers(n - n_in, true_mean, &inliers, alpha, seed, &mut adv_rng)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(seed, &[tag::SHUFFLE]));
    let mut points = Vec::with_capacity(n * d);
    let mut mask = Vec::with_capacity(n);
    for &k in &order {
        if k < n_in {
            points.extend_from_slice(&inliers[k]);
            mask.push(true);
        } else {
            points.extend_from_slice(&outliers[k - n_in]);
            mask.push(false);
        }
    }
    let truth = GroundTruth { true_mean: true_mean.to_vec(), inlier_mask: mask };
    Dataset::new(d, points, alpha, Some(truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_sample_at_alpha_one() {
        let data = generate(1.0, 50, 3, &[1.0, 2.0, 3.0], &AdversaryStrategy::None, 1).unwrap();
        assert_eq!(data.len(), 50);
        assert!(data.truth().unwrap().inlier_mask.iter().all(|&m| m));
    }

    #[test]
    fn far_cluster_placement() {
        let mut offset = vec![0.0; 4];
        offset[0] = 50.0;
        let adv = AdversaryStrategy::FarCluster { offset: offset.clone() };
        let data = generate(0.3, 1000, 4, &[0.0; 4], &adv, 5).unwrap();
        let near = data
            .iter()
            .filter(|p| p.iter().zip(&offset).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= 5.0)
            .count();
        assert_eq!(near, 700);
        let mask = &data.truth().unwrap().inlier_mask;
        assert_eq!(mask.iter().filter(|&&m| m).count(), 300);
    }

    #[test]
    fn seeds_reproduce() {
        let adv = AdversaryStrategy::UniformShell { radius: 6.0 };
        let a = generate(0.4, 200, 2, &[0.5, 0.5], &adv, 9).unwrap();
        let b = generate(0.4, 200, 2, &[0.5, 0.5], &adv, 9).unwrap();
        assert_eq!(a.points(), b.points());
    }

    #[test]
    fn lower_bound_outliers() {
        let adv = AdversaryStrategy::LbConstruction { eps: 0.5, d_planted: 1, mass_samples: 20_000 };
        let data = generate(0.1, 300, 3, &[0.0; 3], &adv, 4).unwrap();
        assert_eq!(data.len(), 300);
        assert!(data.points().iter().all(|x| x.is_finite()));
    }
}
