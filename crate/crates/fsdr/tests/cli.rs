//! End-to-end CLI tests against the built binary: exit-code contract,
//! byte-determinism of re-runs under a fixed seed, and the gen -> select ->
//! bench -> sweep pipeline on real files. Wall-time fields are the only
//! parts excluded from the byte comparisons.

use std::path::Path;
use std::process::{Command, Output};

fn fsdr_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fsdr"))
}

fn run(args: &[&str]) -> Output {
    fsdr_bin().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn gen_small(dir: &Path, name: &str, n: usize, d: usize, planted: &str, seed: u64) -> String {
    let out = dir.join(name);
    let res = run(&[
        "gen",
        "--n",
        &n.to_string(),
        "--d",
        &d.to_string(),
        "--planted",
        planted,
        "--smoothness",
        "2",
        "--noise-std",
        "0.05",
        "--seed",
        &seed.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "gen failed: {}", stderr_of(&res));
    out.to_str().unwrap().to_string()
}

#[test]
fn help_lists_subcommands_and_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["gen", "select", "bench", "sweep"] {
        assert!(text.contains(sub), "missing {sub} in help");
    }
    let select_help = run(&["select", "--help"]);
    let text = String::from_utf8_lossy(&select_help.stdout);
    for (flag, default) in [
        ("--epochs", "200"),
        ("--batch-size", "64"),
        ("--network-lr", "1e-3"),
        ("--index-lr", "1e-3"),
        ("--bins", "16"),
    ] {
        assert!(
            text.contains(flag) && text.contains(default),
            "select help missing {flag} default {default}"
        );
    }
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen_small(dir.path(), "a.csv", 40, 16, "4,8,12", 7);
    let b = gen_small(dir.path(), "b.csv", 40, 16, "4,8,12", 7);
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "CSV outputs differ"
    );
    let truth_a = std::fs::read(Path::new(&a).with_extension("truth.json")).unwrap();
    let truth_b = std::fs::read(Path::new(&b).with_extension("truth.json")).unwrap();
    assert_eq!(truth_a, truth_b, "ground-truth sidecars differ");
    let truth: serde_json::Value = serde_json::from_slice(&truth_a).unwrap();
    assert_eq!(truth["planted_bands"], serde_json::json!([4, 8, 12]));
    assert_eq!(truth["seed"], 7);
}

#[test]
fn gen_rejects_out_of_range_band_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let res = run(&[
        "gen",
        "--n",
        "10",
        "--d",
        "512",
        "--planted",
        "999",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr_of(&res).contains("999"), "{}", stderr_of(&res));
}

#[test]
fn select_validates_and_reports_config_errors_with_exit_2() {
    let res = run(&["select", "--method", "mi", "--data", "/no/such/file.csv"]);
    assert_eq!(res.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 30, 12, "3,9", 1);
    let res = run(&["select", "--method", "fsdr", "--t", "0", "--data", &data]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["select", "--method", "pca", "--data", &data]);
    assert_eq!(res.status.code(), Some(2));
    let res = run(&["select", "--method", "mi", "--t", "99", "--data", &data]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn select_emits_contractual_json_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 50, 16, "4,11", 3);
    let args = [
        "select", "--method", "mi", "--t", "3", "--data", &data, "--seed", "5",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr_of(&a));
    let b = run(&args);
    let mut ja: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut jb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    let sel = ja["selected"].as_array().unwrap().clone();
    assert!(sel.len() <= 3);
    let as_usize: Vec<u64> = sel.iter().map(|v| v.as_u64().unwrap()).collect();
    assert!(as_usize.windows(2).all(|w| w[0] < w[1]));
    assert!(as_usize.iter().all(|&i| (1..=16).contains(&i)));
    assert_eq!(ja["t_prime"].as_u64().unwrap() as usize, sel.len());
    assert!(ja["initial"].is_null());
    assert!(ja["loss_trace"].is_null());
    // Wall time is the one field allowed to differ between runs.
    ja["wall_time_s"] = serde_json::Value::Null;
    jb["wall_time_s"] = serde_json::Value::Null;
    assert_eq!(ja, jb);
}

#[test]
fn select_fsdr_end_to_end_writes_result_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 60, 16, "4,11", 2);
    let out = dir.path().join("sel.json");
    let res = run(&[
        "select",
        "--method",
        "fsdr",
        "--t",
        "2",
        "--epochs",
        "20",
        "--batch-size",
        "32",
        "--data",
        &data,
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr_of(&res));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(json["initial"].is_array());
    assert_eq!(json["loss_trace"].as_array().unwrap().len(), 20);
}

/// Strip the wall-time column from a benchmark CSV for comparisons.
fn mask_time_column(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let mut cells: Vec<&str> = line.split(',').collect();
            if cells.len() > 4 && cells[4] != "time_s" {
                cells[4] = "-";
            }
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn bench_grid_reports_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 60, 16, "4,11,14", 9);
    let out_a = dir.path().join("report_a");
    let out_b = dir.path().join("report_b");
    for out in [&out_a, &out_b] {
        let res = run(&[
            "bench",
            "--data",
            &data,
            "--methods",
            "mi,lasso",
            "--sizes",
            "2,3",
            "--seeds",
            "1,2",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(0), "{}", stderr_of(&res));
    }
    let csv_a = std::fs::read_to_string(out_a.with_extension("csv")).unwrap();
    let csv_b = std::fs::read_to_string(out_b.with_extension("csv")).unwrap();
    assert!(csv_a.starts_with("dataset,selector,t,t_prime,time_s,r2,rmse,indices,seed,error"));
    assert_eq!(
        csv_a.lines().count(),
        1 + 2 * 2 * 2,
        "one row per combination"
    );
    assert_eq!(mask_time_column(&csv_a), mask_time_column(&csv_b));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_a.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 8);
    assert!(json["metadata"]["config_hash"].is_string());
}

#[test]
fn bench_defaults_to_table1_target_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 50, 8, "3,6", 4);
    let out = dir.path().join("report");
    let res = run(&[
        "bench",
        "--data",
        &data,
        "--methods",
        "mi",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr_of(&res));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let ts: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap())
        .collect();
    assert_eq!(ts, vec!["2", "5", "10", "15", "20"]);
    // t > D rows are recorded as errors rather than aborting the run.
    let errors = csv.lines().skip(1).filter(|l| !l.ends_with(',')).count();
    assert_eq!(errors, 3, "t=10,15,20 exceed D=8:\n{csv}");
}

#[test]
fn bench_with_all_failures_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.csv");
    std::fs::write(&data, "a,b,response\n1,2,5\n3,4,5\n").unwrap();
    let out = dir.path().join("report");
    let res = run(&[
        "bench",
        "--data",
        data.to_str().unwrap(),
        "--methods",
        "mi",
        "--sizes",
        "2",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1), "{}", stderr_of(&res));
}

#[test]
fn sweep_guard_suggests_downsampling_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "wide.csv", 20, 200, "50,150", 1);
    let res = run(&["sweep", "--data", &data, "--seed", "1"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(
        stderr_of(&res).to_lowercase().contains("downsampl"),
        "{}",
        stderr_of(&res)
    );
}

#[test]
fn sweep_emits_rectangular_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 60, 10, "3,7", 6);
    let out = dir.path().join("grid.csv");
    let res = run(&[
        "sweep",
        "--data",
        &data,
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{}", stderr_of(&res));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 11, "header + one row per band");
    for line in &lines {
        assert_eq!(line.split(',').count(), 11, "D+1 columns: {line}");
    }
    assert!(lines[0].starts_with("band,1,2,"));
    // Upper triangle filled, diagonal and lower triangle empty.
    let row1: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row1[1], "");
    assert!(!row1[2].is_empty());
    let last: Vec<&str> = lines[10].split(',').collect();
    assert!(last[1..].iter().all(|c| c.is_empty()));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let data = gen_small(dir.path(), "d.csv", 40, 12, "4,9", 8);
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        format!(r#"{{"method":"mi","t":2,"data":"{data}","seed":3}}"#),
    )
    .unwrap();
    let from_file = run(&["select", "--config", config.to_str().unwrap()]);
    assert_eq!(
        from_file.status.code(),
        Some(0),
        "{}",
        stderr_of(&from_file)
    );
    let j: serde_json::Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(j["selected"].as_array().unwrap().len(), 2);

    // A flag wins over the file value.
    let overridden = run(&["select", "--config", config.to_str().unwrap(), "--t", "4"]);
    let j: serde_json::Value = serde_json::from_slice(&overridden.stdout).unwrap();
    assert_eq!(j["selected"].as_array().unwrap().len(), 4);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"no_such_field": 1}"#).unwrap();
    let res = run(&["select", "--config", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
}
