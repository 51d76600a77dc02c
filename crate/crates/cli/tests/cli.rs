use std::path::Path;
use std::process::{Command, Output};

use listmean::data::Dataset;
use listmean::harness::io;
use listmean::oracle::{normal_cdf, sample_gaussian};

fn listmean(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listmean")).args(args).current_dir(dir).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) {
    std::fs::write(dir.join(name), body).unwrap();
}

#[test]
fn generate_pure_sample_has_no_outliers() {
    let dir = tempfile::tempdir().unwrap();
    let o = listmean(&["generate", "--alpha", "1", "--n", "50", "--d", "3", "--seed", "4", "--out", "p.lmd"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let data = io::read_dataset(&dir.path().join("p.lmd")).unwrap();
    assert_eq!(data.len(), 50);
    assert!(data.truth().unwrap().inlier_mask.iter().all(|&b| b));
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g.json", r#"{"alpha":0.3,"n":300,"d":2,"adversary":{"kind":"uniform_shell","radius":7}}"#);
    for (seed, out) in [("5", "a.lmd"), ("5", "b.lmd"), ("6", "c.lmd")] {
        assert_eq!(code(&listmean(&["generate", "--config", "g.json", "--seed", seed, "--out", out], dir.path())), 0);
    }
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.lmd"), read("b.lmd"));
    assert_ne!(read("a.lmd"), read("c.lmd"));
}

#[test]
fn estimate_planted_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "g.json",
        r#"{"alpha":0.3,"n":3000,"d":4,"true_mean":[2,-1,0,0],"adversary":{"kind":"far_cluster","offset":[0,15,0,0]}}"#,
    );
    assert_eq!(code(&listmean(&["generate", "--config", "g.json", "--seed", "2", "--out", "d.lmd"], dir.path())), 0);
    let o = listmean(&["estimate", "d.lmd", "--seed", "2", "--out", "list.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let result: serde_json::Value = io::read_json(&dir.path().join("list.result.json")).unwrap();
    assert_eq!(result["seed"], 2);
    assert_eq!(result["config_digest"].as_str().unwrap().len(), 64);
    assert!(result["min_error"].as_f64().unwrap() <= 0.5, "{result}");
    let list: Vec<serde_json::Value> = io::read_json(&dir.path().join("list.json")).unwrap();
    assert_eq!(list.len() as u64, result["list_size"].as_u64().unwrap());
    assert!(list[0]["weights_digest"]["hash"].is_string());
}

#[test]
fn estimate_missing_file_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = listmean(&["estimate", "nope.lmd", "--out", "l.json"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.lmd"));
    assert!(!dir.path().join("l.json").exists());
}

#[test]
fn estimate_on_noise_never_panics() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..3u64 {
        let pts: Vec<Vec<f64>> = sample_gaussian(&[0.0; 3], 1500, seed)
            .into_iter()
            .map(|p| p.into_iter().map(|x| 8.0 * x.powi(3)).collect())
            .collect();
        let data = Dataset::from_points(&pts, 0.3).unwrap();
        io::write_dataset(&dir.path().join("n.lmd"), &data).unwrap();
        let o = listmean(&["estimate", "n.lmd", "--seed", &seed.to_string(), "--out", "l.json"], dir.path());
        assert!(matches!(code(&o), 0 | 2), "seed {seed}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.lmd", "{\"d\":2,\"n\":3,\"alpha\":0.5}\nAAAA\n");
    assert_eq!(code(&listmean(&["estimate", "bad.lmd", "--out", "l.json"], dir.path())), 1);
    write(dir.path(), "cfg.json", "{\"eps\": -1}");
    assert_eq!(code(&listmean(&["generate", "--alpha", "0.5", "--n", "10", "--d", "2", "--out", "d.lmd"], dir.path())), 0);
    assert_eq!(code(&listmean(&["estimate", "d.lmd", "--config", "cfg.json", "--out", "l.json"], dir.path())), 1);
    assert_eq!(code(&listmean(&["generate", "--alpha", "1.5", "--n", "10", "--d", "2", "--out", "x.lmd"], dir.path())), 1);
    assert_eq!(code(&listmean(&["frobnicate"], dir.path())), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_listmean"))
        .args(["generate", "--alpha", "1", "--n", "5", "--d", "1", "--out", "t.lmd"])
        .env("LISTMEAN_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_two_centers_gives_phi_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.json", r#"{"centers": [[1.0, 0.0], [-1.0, 0.0]]}"#);
    let o = listmean(&["verify", "c.json", "--samples", "200000", "--seed", "1", "--out", "v.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = io::read_json(&dir.path().join("v.json")).unwrap();
    for q in v["q_hat"].as_array().unwrap() {
        let (val, se) = (q["value"].as_f64().unwrap(), q["stderr"].as_f64().unwrap());
        assert!((val - normal_cdf(1.0)).abs() <= 5.0 * se, "{val}");
    }
    assert_eq!(v["containment_violations"], 0);
}

#[test]
fn tournament_singleton_returns_it() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "l.json", "[[4.0, 4.0]]");
    write(dir.path(), "t.json", "[[0.0, 0.1], [0.2, -0.3]]");
    let o = listmean(&["tournament", "l.json", "t.json", "--eps", "0.5", "--out", "w.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let w: serde_json::Value = io::read_json(&dir.path().join("w.json")).unwrap();
    assert_eq!(w["winner"], serde_json::json!([4.0, 4.0]));
    assert_eq!(w["index"], 0);
}

#[test]
fn bench_writes_one_row_per_trial() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "m.json",
        r#"{"seeds": [0, 1, 2], "configs": [
            {"name": "none", "data": {"alpha": 0.4, "n": 800, "d": 2, "true_mean": [1, 1]}},
            {"name": "mirror", "data": {"alpha": 0.4, "n": 800, "d": 2, "true_mean": [3, 0],
              "adversary": {"kind": "mirror"}}, "tournament_delta": 0.05}
        ]}"#,
    );
    let o = listmean(&["bench", "--config", "m.json", "--out", "b.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("b.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "min_error"));
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    let seeds: Vec<&str> = rows.iter().map(|r| &r[2]).collect();
    assert_eq!(seeds, ["0", "1", "2", "0", "1", "2"]);
    assert!(rows[3..].iter().all(|r| !r[6].is_empty()));
}
