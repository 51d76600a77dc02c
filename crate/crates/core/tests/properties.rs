use proptest::prelude::*;

use listmean::data::Dataset;
use listmean::filter::Subspace;
use listmean::harness::io::{decode_dataset, encode_dataset};
use listmean::oracle::{density_gaussian, halfspace_isoperimetry, LowerBoundInstance, LowerBoundParams};
use listmean::pipeline::{tournament, TournamentInput};
use listmean::search::{
    build_cover, capped_simplex_kkt_residual, fit_weights, moment_objective, project_capped_simplex, SearchParams,
    SolverParams, Weights,
};
use listmean::tensor::{
    gaussian_moment_tensor, hermite_scalar, hermite_tensor, hermite_tensor_factored, hermite_tensor_partition,
    sym_outer,
};

fn vec_in(d: usize, r: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-r..r, d)
}

fn point_set(max_n: usize, d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(vec_in(d, 4.0), 2..max_n)
}

proptest! {
    #[test]
    fn tensors_are_symmetric(d in 1usize..=3, k in 0usize..=4, x in vec_in(3, 3.0), y in vec_in(3, 3.0), j in 0usize..=2) {
        let (x, y) = (&x[..d], &y[..d]);
        prop_assert!(hermite_tensor(k, x).unwrap().is_symmetric(1e-12));
        let a = hermite_tensor(k, x).unwrap();
        let b = hermite_tensor(j, y).unwrap();
        prop_assert!(sym_outer(&a, &b).unwrap().is_symmetric(1e-9));
        prop_assert!(gaussian_moment_tensor::<f64>(k, d).unwrap().is_symmetric(0.0));
    }

    #[test]
    fn contraction_identity(k in 0usize..=6, x in vec_in(4, 3.0), v in vec_in(4, 1.0)) {
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let v: Vec<f64> = v.iter().map(|a| a / n).collect();
        let want = hermite_scalar(k, x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>());
        for h in [hermite_tensor(k, &x).unwrap(), hermite_tensor_factored(k, &x).unwrap()] {
            let got = h.contract_power(&v).unwrap();
            prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn recursion_matches_partitions(k in 0usize..=5, d in 1usize..=4, x in vec_in(4, 2.0)) {
        let x = &x[..d];
        let diff = hermite_tensor(k, x).unwrap().max_abs_diff(&hermite_tensor_partition(k, x).unwrap()).unwrap();
        prop_assert!(diff <= 1e-9, "diff {diff}");
    }

    #[test]
    fn projection_kkt(v in prop::collection::vec(-5.0f64..5.0, 1..40), frac in 0.0f64..=1.0, shift in -3.0f64..3.0) {
        let n = v.len();
        let budget = frac * n as f64;
        let w = project_capped_simplex(&v, budget).unwrap();
        prop_assert!(w.is_valid(budget));
        prop_assert!(capped_simplex_kkt_residual(&v, &w.w, budget) <= 1e-8);
        // Idempotent, and blind to a common shift of the input.
        let again = project_capped_simplex(&w.w, budget).unwrap();
        prop_assert!(again.w.iter().zip(&w.w).all(|(a, b)| (a - b).abs() <= 1e-9));
        let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let ws = project_capped_simplex(&shifted, budget).unwrap();
        prop_assert!(ws.w.iter().zip(&w.w).all(|(a, b)| (a - b).abs() <= 1e-8));
    }

    #[test]
    fn projection_integer_budgets(v in prop::collection::vec(-20.0f64..20.0, 1..40), m in 0usize..40) {
        let budget = m.min(v.len()) as f64;
        let w = project_capped_simplex(&v, budget).unwrap();
        prop_assert!(capped_simplex_kkt_residual(&v, &w.w, budget) <= 1e-8);
    }

    #[test]
    fn objective_is_convex(
        pts in point_set(30, 2),
        a in prop::collection::vec(0.0f64..1.0, 30),
        b in prop::collection::vec(0.0f64..1.0, 30),
        lambda in 0.0f64..=1.0,
        mu in vec_in(2, 1.0),
        k_star in 1usize..=3,
    ) {
        let n = pts.len();
        let data = Dataset::from_points(&pts, 0.5).unwrap();
        let w1 = Weights { w: a[..n].to_vec() };
        let w2 = Weights { w: b[..n].to_vec() };
        let mix = Weights { w: w1.w.iter().zip(&w2.w).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect() };
        let f = |w: &Weights<f64>| moment_objective(&mu, w, &data, k_star).unwrap();
        let (f1, f2, fm) = (f(&w1), f(&w2), f(&mix));
        prop_assert!(fm <= lambda * f1 + (1.0 - lambda) * f2 + 1e-9 * (1.0 + f1.abs() + f2.abs()));
    }

    #[test]
    fn halfspace_isoperimetry_grows(p in 0.001f64..=0.5, eps in 0.0f64..3.0) {
        prop_assert!(halfspace_isoperimetry(p, eps).unwrap() >= p - 1e-15);
        prop_assert!((halfspace_isoperimetry(p, 0.0).unwrap() - p).abs() <= 1e-12);
    }

    #[test]
    fn subspace_is_orthonormal(vs in prop::collection::vec(vec_in(5, 2.0), 1..5), x in vec_in(5, 3.0)) {
        let s = Subspace::span(5, &vs).unwrap();
        prop_assert!(s.is_orthonormal(1e-10));
        let p = s.projector();
        let mut pp = [0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                pp[i * 5 + j] = (0..5).map(|k| p[i * 5 + k] * p[k * 5 + j]).sum();
            }
        }
        prop_assert!(pp.iter().zip(&p).all(|(a, b)| (a - b).abs() <= 1e-10));
        // Residual is orthogonal to the span.
        let r = s.residual(&x);
        prop_assert!(s.coords(&r).iter().all(|c| c.abs() <= 1e-9));
    }

    #[test]
    fn dataset_encoding_round_trips(pts in point_set(20, 3), alpha in 0.01f64..=1.0) {
        let data = Dataset::from_points(&pts, alpha).unwrap();
        let text = encode_dataset(&data).unwrap();
        let back = decode_dataset(&text).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert_eq!(encode_dataset(&back).unwrap(), text);
    }

    #[test]
    fn cover_is_a_net(r in 0.1f64..2.0, eps in 0.2f64..1.0, x in vec_in(2, 1.0)) {
        let cover: Vec<Vec<f64>> = build_cover(r, eps, 2).unwrap();
        let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let x: Vec<f64> = if n > 1.0 { x.iter().map(|a| a / n).collect() } else { x };
        let x: Vec<f64> = x.iter().map(|a| a * r).collect();
        let best = cover
            .iter()
            .map(|c| c.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(best <= eps + 1e-12);
    }

    #[test]
    fn tournament_winner_is_listed(
        list in prop::collection::vec(vec_in(2, 6.0), 1..6),
        trusted in prop::collection::vec(vec_in(2, 2.0), 1..30),
        seed in any::<u64>(),
    ) {
        let input = TournamentInput { list: list.clone(), trusted, eps: 0.5, delta: 0.05 };
        let a = tournament(&input, seed).unwrap();
        prop_assert_eq!(&list[a.index], &a.winner);
        prop_assert_eq!(a, tournament(&input, seed).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_trace_never_increases(pts in point_set(40, 2), mu in vec_in(2, 1.5), accelerate in any::<bool>()) {
        let data = Dataset::from_points(&pts, 0.4).unwrap();
        let params = SearchParams {
            alpha: 0.4,
            k_star: 2,
            solver: SolverParams { certify: false, accelerate, max_iters: 60, ..SolverParams::default() },
            ..SearchParams::default()
        };
        let c = fit_weights(&mu, &data, &params).unwrap();
        prop_assert!(c.trace.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(c.weights.is_valid(0.4 * pts.len() as f64));
    }

    #[test]
    fn lower_bound_density_dominates(x in vec_in(3, 4.0), seed in 0u64..4) {
        let mut p = LowerBoundParams::new(0.1, 0.25, 3, seed);
        p.mass_samples = 20_000;
        let inst = LowerBoundInstance::new(p).unwrap();
        for mu in inst.planted_means() {
            prop_assert!(inst.density(&x) >= 0.1 * density_gaussian(&x, &mu) * (1.0 - 1e-12));
        }
    }
}
