use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::objective::MomentDesign;
use super::simplex::{project_capped_simplex, Weights};
use super::{Candidate, SearchParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub max_iters: usize,
    /// Fixed step; `None` uses `1/L` from power iteration.
    pub step_size: Option<f64>,
    pub tol_grad: f64,
    pub tol_obj: f64,
    /// Stop early once the objective is certified on either side of `Δ²`.
    pub certify: bool,
    /// Monotone Nesterov momentum on top of the projected step.
    pub accelerate: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { max_iters: 400, step_size: None, tol_grad: 1e-7, tol_obj: 1e-12, certify: true, accelerate: true }
    }
}

/// Why the solver stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Objective fell below `Δ²`.
    Accepted,
    /// A certified lower bound exceeded `Δ²`.
    Rejected,
    Converged,
    /// Gradient tolerance unmet at `max_iters`.
    NonConvergence,
}

/// Sum of `c` over the cheapest fractional selection of total mass `budget`.
fn min_linear<F: Scalar>(c: &[F], budget: f64, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(c.iter().map(|x| x.as_f64()));
    let whole = (budget.floor() as usize).min(scratch.len());
    let frac = budget - whole as f64;
    if whole == scratch.len() {
        return scratch.iter().sum();
    }
    let (left, nth, _) = scratch.select_nth_unstable_by(whole, |a, b| a.partial_cmp(b).unwrap());
    left.iter().sum::<f64>() + frac * *nth
}

/// Projected gradient descent on the moment objective over the capped simplex.
pub fn fit_weights<F: Scalar>(mu_prime: &[F], data: &Dataset<F>, params: &SearchParams) -> Result<Candidate<F>> {
    let design = MomentDesign::new(mu_prime, data, params.alpha, params.k_star)?;
    fit_with_design(mu_prime, &design, params)
}

pub(crate) fn fit_with_design<F: Scalar>(
    mu_prime: &[F],
    design: &MomentDesign<F>,
    params: &SearchParams,
) -> Result<Candidate<F>> {
    let n = design.cols();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let budget = params.alpha * n as f64;
    let delta2 = params.delta * params.delta;
    let solver = &params.solver;
    let mut lip = match solver.step_size {
        Some(s) if s > 0.0 => 1.0 / s,
        Some(s) => return Err(Error::InvalidParam(format!("step_size must be positive, got {s}"))),
        None => 2.0 * design.lipschitz_estimate(20) * 1.01,
    };
    if !(lip > 0.0) {
        lip = 1.0;
    }

    let mut w = Weights::uniform(n, F::lit(params.alpha));
    let mut r = design.residual(&w.w);
    let mut f = sq(&r);
    let mut trace = vec![f];
    let mut scratch = Vec::with_capacity(n);
    let mut lower = 0.0f64;
    let mut termination = Termination::NonConvergence;
    let mut iterations = 0;
    // Extrapolated point and its residual (the residual map is affine).
    let mut y = w.w.clone();
    let mut r_y = r.clone();
    let mut t = 1.0f64;

    for it in 0..=solver.max_iters {
        if solver.certify && f <= delta2 {
            termination = Termination::Accepted;
            break;
        }
        let f_y = sq(&r_y);
        let g_y = design.adjoint(&r_y);
        if solver.certify {
            // Separating hyperplane along the residual at y: for unit u,
            // f* >= (min_v <u, Av - b>)_+^2.
            let rn = f_y.sqrt();
            if rn > 0.0 {
                let rb = dot(&r_y, design.target()) / rn;
                let sep = (min_linear(&g_y, budget, &mut scratch) / rn - rb).max(0.0);
                lower = lower.max(sep * sep);
            }
            // Frank-Wolfe gap at the feasible iterate.
            if it % 5 == 0 {
                let g_w = if solver.accelerate { design.adjoint(&r) } else { g_y.clone() };
                let gw: f64 = dot(&g_w, &w.w);
                lower = lower.max(f + 2.0 * (min_linear(&g_w, budget, &mut scratch) - gw));
            }
            if lower > delta2 {
                termination = Termination::Rejected;
                break;
            }
        }
        if it == solver.max_iters {
            break;
        }
        iterations = it + 1;

        // Projected gradient step from y with backtracking on the quadratic model.
        let mut found = None;
        for _ in 0..60 {
            let eta = F::lit(2.0 / lip);
            let v: Vec<F> = y.iter().zip(&g_y).map(|(&x, &g)| x - eta * g).collect();
            let z = project_capped_simplex(&v, F::lit(budget))?;
            let r_z = design.residual(&z.w);
            let f_z = sq(&r_z);
            let (lin, dist2) = z.w.iter().zip(&y).zip(&g_y).fold((0.0, 0.0), |(l, d2), ((&a, &b), &g)| {
                let step = a.as_f64() - b.as_f64();
                (l + 2.0 * g.as_f64() * step, d2 + step * step)
            });
            if f_z <= f_y + lin + 0.5 * lip * dist2 + 1e-12 * f_y.max(1e-300) {
                found = Some((z, r_z, f_z, dist2.sqrt() * lip));
                break;
            }
            lip *= 2.0;
        }
        let Some((z, r_z, f_z, grad_map)) = found else {
            termination = Termination::Converged;
            break;
        };
        // Far points dominate the initial curvature estimate and usually leave
        // the support early, so let the step grow again; backtracking guards it.
        if solver.step_size.is_none() {
            lip *= 0.9;
        }
        let improved = f_z <= f;
        let decrease = f - f_z;
        let prev = w.w.clone();
        let r_prev = r.clone();
        if improved {
            w = z.clone();
            r = r_z.clone();
            f = f_z;
        }
        trace.push(f);
        if solver.accelerate {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let (a, c) = (t / t_next, (t - 1.0) / t_next);
            // y = w + a (z - w) + c (w - prev), applied to points and residuals alike.
            let combine = |wv: &[F], zv: &[F], pv: &[F]| -> Vec<F> {
                wv.iter()
                    .zip(zv)
                    .zip(pv)
                    .map(|((&wi, &zi), &pi)| wi + F::lit(a) * (zi - wi) + F::lit(c) * (wi - pi))
                    .collect()
            };
            y = combine(&w.w, &z.w, &prev);
            r_y = combine(&r, &r_z, &r_prev);
            // Restart the momentum when the step failed to improve.
            t = if improved { t_next } else { 1.0 };
        } else {
            y = w.w.clone();
            r_y = r.clone();
        }
        if grad_map <= solver.tol_grad || (improved && !solver.accelerate && decrease <= solver.tol_obj * f.max(f64::MIN_POSITIVE))
        {
            termination = Termination::Converged;
            break;
        }
    }

    let order_gaps = design.gaps_from_residual(&r);
    Ok(Candidate {
        mu: mu_prime.to_vec(),
        weights: w,
        objective: f,
        order_gaps,
        accepted: f <= delta2,
        lower_bound: lower.min(f),
        iterations,
        termination,
        trace,
    })
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.as_f64() * y.as_f64()).sum()
}

fn sq<F: Scalar>(r: &[F]) -> f64 {
    r.iter().map(|x| x.as_f64() * x.as_f64()).sum()
}
