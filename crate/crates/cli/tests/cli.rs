//! End-to-end tests of the binary: file formats, determinism, exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_meancore"));
    c.env_remove("MEANCORE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        String::from_utf8_lossy(&out.stderr),
        String::from_utf8_lossy(&out.stdout)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen_points(dir: &Path, name: &str, n: usize, d: usize, seed: u64) -> PathBuf {
    let out = dir.join(name);
    let st = run(&[
        "gen", "--dist", "gaussian", "--n", &n.to_string(), "--d", &d.to_string(), "--seed",
        &seed.to_string(), "--out", path_str(&out),
    ]);
    assert_ok(&st);
    out
}

#[test]
fn gen_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen_points(dir.path(), "a.csv", 4, 1, 7);
    let b = gen_points(dir.path(), "b.csv", 4, 1, 7);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let c = gen_points(dir.path(), "c.csv", 4, 1, 8);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn gen_clustered_has_the_requested_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    assert_ok(&run(&[
        "gen", "--dist", "clustered", "--clusters", "3", "--n", "50", "--d", "4", "--seed", "1",
        "--out", path_str(&out),
    ]));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r.split(',').count() == 4));
}

#[test]
fn gen_student_t_reports_finite_variance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let stdout = assert_ok(&run(&[
        "gen", "--dist", "student-t", "--nu", "3", "--n", "5000", "--d", "2", "--seed", "3",
        "--out", path_str(&out),
    ]));
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    let var = v["variance"].as_f64().unwrap();
    assert!(var.is_finite() && var > 0.0);
}

#[test]
fn build_cara_on_ten_line_points_is_small() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("line.csv");
    let rows: String = (0..10).map(|i| format!("{i}\n")).collect();
    fs::write(&pts, rows).unwrap();
    let out = dir.path().join("cara.csv");
    let stdout = assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "cara", "--out", path_str(&out),
    ]));
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert!(v["nnz"].as_u64().unwrap() <= 4);
    let entries = fs::read_to_string(&out).unwrap().lines().count();
    assert!(entries <= 4);
    // An accurate coreset verifies at roundoff scale.
    let stdout = assert_ok(&run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&out), "--checks",
        "worst,empirical", "--queries", "1000", "--seed", "2",
    ]));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["worst_case"].as_f64().unwrap() <= 1e-7);
    assert!(v["empirical"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn build_stats_writes_the_three_moments() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.csv");
    fs::write(&pts, "-1,0\n1,0\n").unwrap();
    let out = dir.path().join("s.csv");
    assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "stats", "--out", path_str(&out),
    ]));
    assert_eq!(fs::read_to_string(&out).unwrap(), "2,0,0,2\n");
}

#[test]
fn build_mom_group_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 50_000, 2, 5);
    let out = dir.path().join("mom.csv");
    let delta = format!("{}", std::f64::consts::E.recip());
    let stdout = assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "mom", "--eps", "0.5", "--delta", &delta,
        "--seed", "2", "--out", path_str(&out),
    ]));
    // 4 groups of 8 draws; the kept group has 8 entries barring collisions.
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(v["nnz"].as_u64().unwrap(), 8);
}

#[test]
fn identical_flags_and_seed_give_identical_coresets() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 500, 3, 9);
    let out1 = dir.path().join("u1.csv");
    let out2 = dir.path().join("u2.csv");
    for out in [&out1, &out2] {
        assert_ok(&run(&[
            "build", "--input", path_str(&pts), "--algo", "sens", "--eps", "0.4", "--delta",
            "0.2", "--seed", "77", "--out", path_str(out),
        ]));
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn verify_identity_coreset_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 100, 2, 4);
    let ident = dir.path().join("ident.csv");
    let rows: String = (1..=100).map(|i| format!("{i},1\n")).collect();
    fs::write(&ident, rows).unwrap();
    let stdout = assert_ok(&run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&ident), "--queries", "200",
        "--seed", "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["worst_case"].as_f64().unwrap() <= 1e-12);
    assert!(v["empirical"].as_f64().unwrap() <= 1e-12);
    assert!(v["weak_cost_ratio"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_fw_strong_respects_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 1500, 4, 6);
    let u = dir.path().join("fw.csv");
    assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "fw", "--eps", "0.4", "--mode", "strong",
        "--out", path_str(&u),
    ]));
    let out = run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&u), "--checks", "worst",
        "--strict", "--eps", "0.4",
    ]);
    let stdout = assert_ok(&out);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["worst_case"].as_f64().unwrap() <= 0.4);
}

#[test]
fn strict_verify_flags_a_bad_coreset_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 100, 2, 4);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,1\n").unwrap(); // one point of a hundred
    let out = run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&bad), "--checks", "worst",
        "--strict", "--eps", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corrupt_coreset_index_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 10, 2, 4);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "11,1\n").unwrap();
    let out = run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&bad),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let bad_parse = dir.path().join("bad2.csv");
    fs::write(&bad_parse, "1;1\n").unwrap();
    let out = run(&[
        "verify", "--input", path_str(&pts), "--coreset", path_str(&bad_parse),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["build", "--input", "x.csv", "--algo", "fw", "--out", "y.csv"]);
    assert_eq!(out.status.code(), Some(1), "fw without --eps is a usage error");
    let out = run(&["nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn weighted_and_header_flags_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("w.csv");
    fs::write(&pts, "# comment\nx,y,w\n0,0,1\n2,0,3\n").unwrap();
    let u = dir.path().join("u.csv");
    let stdout = assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "signed", "--weighted", "--header",
        "--out", path_str(&u),
    ]));
    let v: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(v["nnz"].as_u64().unwrap(), 2);
    // Weight column preserved: total mass 4 split over both points.
    let text = fs::read_to_string(&u).unwrap();
    let total: f64 = text
        .lines()
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((total - 4.0).abs() <= 1e-12);
}

#[test]
fn env_seed_is_the_default_and_the_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 400, 2, 3);
    let run_with = |seed_flag: Option<&str>, env: Option<&str>, name: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let mut c = bin();
        c.args([
            "build", "--input", path_str(&pts), "--algo", "uniform", "--eps", "0.1", "--delta",
            "0.5", "--out", path_str(&out),
        ]);
        if let Some(s) = seed_flag {
            c.args(["--seed", s]);
        }
        if let Some(e) = env {
            c.env("MEANCORE_SEED", e);
        }
        let st = c.output().unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        fs::read(&out).unwrap()
    };
    let from_env = run_with(None, Some("123"), "a.csv");
    let from_flag = run_with(Some("123"), None, "b.csv");
    let override_env = run_with(Some("123"), Some("999"), "c.csv");
    let default0 = run_with(None, None, "d.csv");
    let seed0 = run_with(Some("0"), None, "e.csv");
    assert_eq!(from_env, from_flag);
    assert_eq!(from_flag, override_env);
    assert_eq!(default0, seed0);
    assert_ne!(from_flag, seed0);
}

#[test]
fn stream_single_chunk_matches_build() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 300, 3, 12);
    let direct = dir.path().join("direct.csv");
    assert_ok(&run(&[
        "build", "--input", path_str(&pts), "--algo", "cara", "--out", path_str(&direct),
    ]));
    let streamed = dir.path().join("streamed.csv");
    let stdout = assert_ok(&run(&[
        "stream", "--input", path_str(&pts), "--chunk", "1000", "--algo", "cara", "--out",
        path_str(&streamed),
    ]));
    assert_eq!(fs::read(&direct).unwrap(), fs::read(&streamed).unwrap());
    let log: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(log["depth"].as_u64().unwrap(), 1);
    assert_eq!(log["chunks"].as_u64().unwrap(), 1);
}

#[test]
fn stream_fw_logs_depth_and_error_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let pts = gen_points(dir.path(), "p.csv", 1000, 3, 13);
    let out = dir.path().join("s.csv");
    let stdout = assert_ok(&run(&[
        "stream", "--input", path_str(&pts), "--chunk", "250", "--algo", "fw", "--eps", "0.1",
        "--out", path_str(&out),
    ]));
    let log: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(log["chunks"].as_u64().unwrap(), 4);
    assert_eq!(log["depth"].as_u64().unwrap(), 2);
    let err = log["worst_error"].as_f64().unwrap();
    let bound = log["error_bound"].as_f64().unwrap();
    assert!((bound - 0.21).abs() < 1e-12);
    assert!(err <= bound + 1e-9);
}

#[test]
fn bench_deterministic_algos_never_fail_and_strict_passes() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("rep");
    let out = run(&[
        "bench", "--dist", "gaussian", "--n", "500", "--d", "3", "--algo", "stats,cara,signed,fw",
        "--eps", "0.4", "--trials", "4", "--queries", "200", "--seed", "21", "--strict", "--out",
        path_str(&prefix),
    ]);
    assert_ok(&out);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    for cell in json["cells"].as_array().unwrap() {
        assert_eq!(
            cell["success_count"].as_u64(),
            cell["trials"].as_u64(),
            "deterministic cell failed: {cell}"
        );
    }
    let csv = fs::read_to_string(dir.path().join("rep.csv")).unwrap();
    assert!(csv.lines().count() == 1 + 3 + 1); // header + 3 accurate + 1 fw cell
}

#[test]
fn bench_fw_nnz_stays_under_the_formula_bound() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("rep");
    assert_ok(&run(&[
        "bench", "--dist", "gaussian", "--n", "3000", "--d", "4", "--algo", "fw", "--eps",
        "0.5,0.25", "--trials", "2", "--seed", "31", "--out", path_str(&prefix),
    ]));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    for cell in json["cells"].as_array().unwrap() {
        let eps = cell["target_eps"].as_f64().unwrap();
        let nnz = cell["nnz_max"].as_u64().unwrap() as f64;
        assert!(nnz <= 128.0 / (eps * eps));
        assert!(cell["worst_error_max"].as_f64().unwrap() <= eps);
    }
}

#[test]
fn bench_reports_cell_errors_but_continues() {
    let dir = tempfile::tempdir().unwrap();
    // Non-uniform weights violate the sensitivity-sampling assumption.
    let pts = dir.path().join("w.csv");
    fs::write(&pts, "0,0,1\n1,0,2\n2,1,1\n3,5,4\n1,1,1\n2,2,2\n").unwrap();
    let prefix = dir.path().join("rep");
    let out = run(&[
        "bench", "--input", path_str(&pts), "--weighted", "--algo", "sens,signed", "--eps",
        "0.5", "--trials", "2", "--seed", "1", "--out", path_str(&prefix),
    ]);
    assert_ok(&out);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rep.json")).unwrap()).unwrap();
    let cells = json["cells"].as_array().unwrap();
    let sens = cells.iter().find(|c| c["algo"] == "sens").unwrap();
    assert!(sens["error"].as_str().unwrap().contains("uniform weights"));
    let signed = cells.iter().find(|c| c["algo"] == "signed").unwrap();
    assert_eq!(signed["success_count"], signed["trials"]);
}
