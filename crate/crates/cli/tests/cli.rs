//! End-to-end tests of the `cri` binary: exit codes, manifest contents,
//! byte-identical reruns, and the ordering visible in its outputs.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cri(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cri"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn unknown_config_key_exits_1_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "jitter = 5\n").unwrap();
    let out = cri(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "moments",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown key"), "stderr: {err}");
}

#[test]
fn missing_config_file_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = cri(&[
        "--config",
        dir.path().join("absent.cfg").to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
        "moments",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_flag_exits_1() {
    let out = cri(&["--frobnicate", "moments"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn moments_run_writes_manifest_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = cri(&["--out", out_dir.to_str().unwrap(), "moments"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&out_dir, "manifest.txt");
    assert!(manifest.contains("subcommand = moments"));
    assert!(manifest.contains("master_seed = 20260810"));
    let csv = read(&out_dir, "moments.csv");
    assert!(csv.starts_with("# schema: moments v1\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out_dir in [&a, &b] {
        let out = cri(&[
            "--out",
            out_dir.to_str().unwrap(),
            "--replications",
            "300",
            "access-compare",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["manifest.txt", "access_compare.csv"] {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs");
    }
}

#[test]
fn seed_override_is_recorded_and_changes_samples() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out_dir, seed) in [(&a, "1"), (&b, "2")] {
        let out = cri(&[
            "--out",
            out_dir.to_str().unwrap(),
            "--replications",
            "200",
            "--master-seed",
            seed,
            "access-compare",
        ]);
        assert!(out.status.success());
    }
    assert!(read(&a, "manifest.txt").contains("master_seed = 1"));
    assert!(read(&b, "manifest.txt").contains("master_seed = 2"));
    assert_ne!(read(&a, "access_compare.csv"), read(&b, "access_compare.csv"));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out_dir, workers) in [(&a, "1"), (&b, "4")] {
        let out = cri(&[
            "--out",
            out_dir.to_str().unwrap(),
            "--replications",
            "300",
            "--workers",
            workers,
            "access-compare",
        ]);
        assert!(out.status.success());
    }
    assert_eq!(read(&a, "access_compare.csv"), read(&b, "access_compare.csv"));
}

/// Mean pct_admitted per scheme from access_compare.csv rows at a density.
fn scheme_means(csv: &str, density: &str) -> HashMap<String, f64> {
    let mut sums: HashMap<String, (f64, u64)> = HashMap::new();
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[0] == density {
            let entry = sums.entry(cols[1].to_string()).or_default();
            entry.0 += cols[5].parse::<f64>().unwrap();
            entry.1 += 1;
        }
    }
    sums.into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect()
}

#[test]
fn access_compare_ordering_in_dense_urban_shadowing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("urban.cfg");
    fs::write(&cfg, "sigma_dB = 12\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = cri(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--replications",
        "500",
        "access-compare",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let means = scheme_means(&read(&out_dir, "access_compare.csv"), "10000");
    let cen = means["rem-centralized"];
    let dec = means["rem-decentralized"];
    let pez = means["pez"];
    assert!(
        cen > dec && dec > pez,
        "ordering violated: {cen} vs {dec} vs {pez}"
    );
}

#[test]
fn pez_rc_sweep_radius_grows_with_cr_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = cri(&[
        "--out",
        out_dir.to_str().unwrap(),
        "--replications",
        "300",
        "pez",
        "--rc-ratios",
        "1,2,5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&out_dir, "pez.csv");
    assert!(csv.starts_with("# schema: pez-sweep v1\n"));
    // Group radii by target SINR; larger CR cells must push the zone out.
    let mut by_target: HashMap<String, Vec<(f64, f64)>> = HashMap::new();
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let rc: f64 = cols[3].parse().unwrap();
        let re: f64 = cols[5].parse().unwrap();
        by_target.entry(cols[4].to_string()).or_default().push((rc, re));
    }
    assert_eq!(by_target.len(), 6);
    for (target, mut rows) in by_target {
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for pair in rows.windows(2) {
            assert!(
                pair[1].1 >= pair[0].1,
                "target {target}: radius fell from {} to {} as Rc grew",
                pair[0].1,
                pair[1].1
            );
        }
    }
}

#[test]
fn cdf_compare_emits_curves_for_the_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let out = cri(&[
        "--out",
        out_dir.to_str().unwrap(),
        "--replications",
        "2000",
        "cdf",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(&out_dir, "cdf_compare.csv");
    // 12 grid points, 201 curve rows each, plus schema and header lines.
    assert_eq!(csv.lines().count(), 2 + 12 * 201);
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let f_analytic: f64 = cols[3].parse().unwrap();
        let f_empirical: f64 = cols[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&f_analytic));
        assert!((0.0..=1.0).contains(&f_empirical));
    }
}
