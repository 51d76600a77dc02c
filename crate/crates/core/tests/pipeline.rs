use listmean::harness::{generate, run_trial, AdversaryStrategy, BenchConfig, DataSpec};
use listmean::oracle::{voronoi_mass, CenterConfig, LowerBoundInstance, LowerBoundParams};
use listmean::pipeline::{estimate, PipelineConfig};

#[test]
fn outputs_are_accepted_and_separated() {
    let mu = [1.0, -2.0, 0.5, 0.0];
    let data = generate(0.3, 3000, 4, &mu, &AdversaryStrategy::DuplicateShift { shift: vec![0.0, 4.0, 0.0, 0.0] }, 5)
        .unwrap();
    let cfg = PipelineConfig { seed: 5, ..PipelineConfig::default() };
    let est = estimate(&data, &cfg).unwrap();
    assert!(!est.list.is_empty());
    assert!(est.list.len() <= cfg.search.candidate_cap);
    assert!(est.list.min_separation() >= cfg.eps / 2.0);
    let delta = cfg.search.delta;
    for c in &est.list.entries {
        assert!(c.accepted && c.objective <= delta * delta && c.per_order_ok(delta));
    }
    // Same seed, same list.
    assert_eq!(estimate(&data, &cfg).unwrap().list, est.list);
}

#[test]
fn lower_bound_instance_in_bench() {
    let cfg = BenchConfig {
        name: "lb".into(),
        data: DataSpec {
            alpha: 0.1,
            n: 3000,
            d: 2,
            true_mean: Some(vec![1.0, 1.0]),
            adversary: AdversaryStrategy::LbConstruction { eps: 0.25, d_planted: 2, mass_samples: 20_000 },
        },
        pipeline: PipelineConfig::default(),
        tournament_delta: Some(0.05),
    };
    let r = run_trial(&cfg, 1).unwrap();
    assert_eq!(r.seed, 1);
    assert!(r.min_error.is_none_or(|e| e >= 0.0));
}

#[test]
fn consistent_centers_share_unit_mass() {
    // Every planted mean is α-consistent with D, so Σ α q_i ≤ 1.
    let inst = LowerBoundInstance::new(LowerBoundParams::new(0.1, 0.25, 6, 2)).unwrap();
    let means = inst.planted_means();
    let beta = 2.0 * 0.25 * 2f64.sqrt();
    let cfg = CenterConfig::new(means, beta - 1e-12).unwrap();
    let (mut total, mut var) = (0.0, 0.0);
    for i in 0..cfg.len() {
        let q = voronoi_mass(i, &cfg, 200_000, 3).unwrap();
        total += 0.1 * q.value;
        var += (0.1 * q.stderr).powi(2);
    }
    assert!(total <= 1.0 + 5.0 * var.sqrt(), "{total}");
}
