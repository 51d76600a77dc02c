use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default bound on the number of cover points.
pub const DEFAULT_COVER_CAP: usize = 10_000_000;

/// Grid points `h·z` (`h = ε'/√d`, `z ∈ Z^d`) with `|h z_j| ≤ r` lying in the
/// radius-`r` ball, in lexicographic order.
pub fn build_cover<F: Scalar>(r: f64, eps_prime: f64, d: usize) -> Result<Vec<Vec<F>>> {
    build_cover_with_cap(r, eps_prime, d, DEFAULT_COVER_CAP)
}

pub fn build_cover_with_cap<F: Scalar>(r: f64, eps_prime: f64, d: usize, cap: usize) -> Result<Vec<Vec<F>>> {
    if !(eps_prime > 0.0) || !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParam(format!("cover needs eps_prime > 0 and r >= 0, got {eps_prime}, {r}")));
    }
    if d == 0 {
        return Ok(vec![Vec::new()]);
    }
    let h = eps_prime / (d as f64).sqrt();
    let steps = (r / h + 1e-9).floor() as i64;
    let r2 = r * r * (1.0 + 1e-12);
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn rec<F: Scalar>(
        d: usize,
        h: f64,
        steps: i64,
        r2: f64,
        used: f64,
        cur: &mut Vec<i64>,
        out: &mut Vec<Vec<F>>,
        cap: usize,
    ) -> Result<()> {
        if cur.len() == d {
            if out.len() == cap {
                return Err(Error::CoverTooLarge { size: cap + 1, cap });
            }
            out.push(cur.iter().map(|&z| F::lit(z as f64 * h)).collect());
            return Ok(());
        }
        for z in -steps..=steps {
            let x = z as f64 * h;
            let u = used + x * x;
            if u > r2 {
                continue;
            }
            cur.push(z);
            rec(d, h, steps, r2, u, cur, out, cap)?;
            cur.pop();
        }
        Ok(())
    }
    rec(d, h, steps, r2, 0.0, &mut cur, &mut out, cap)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn small_examples() {
        let c: Vec<Vec<f64>> = build_cover(1.0, 1.0, 1).unwrap();
        assert_eq!(c, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        let c: Vec<Vec<f64>> = build_cover(0.0, 0.3, 2).unwrap();
        assert_eq!(c, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn lexicographic_and_inside_ball() {
        let c: Vec<Vec<f64>> = build_cover(1.3, 0.4, 3).unwrap();
        assert!(c.windows(2).all(|w| w[0].partial_cmp(&w[1]) == Some(std::cmp::Ordering::Less)));
        assert!(c.iter().all(|p| p.iter().map(|x| x * x).sum::<f64>() <= 1.3 * 1.3 + 1e-9));
    }

    #[test]
    fn covers_random_ball_points() {
        let (r, eps, d) = (1.0, 0.5, 2);
        let cover: Vec<Vec<f64>> = build_cover(r, eps, d).unwrap();
        let mut rng = crate::rng::rng_for(7, &[crate::rng::tag::MONTE_CARLO]);
        let mut checked = 0;
        while checked < 10_000 {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let u: f64 = rng.random();
            let nrm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let p: Vec<f64> = g.iter().map(|x| x / nrm * r * u.sqrt()).collect();
            let best = cover
                .iter()
                .map(|c| c.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(best <= eps + 1e-12, "{p:?} at {best}");
            checked += 1;
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            build_cover_with_cap::<f64>(2.0, 0.1, 3, 1000),
            Err(Error::CoverTooLarge { cap: 1000, .. })
        ));
    }
}
