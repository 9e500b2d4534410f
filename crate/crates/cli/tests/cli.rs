use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn legkit(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_legkit"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn summary(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn mobility_defaults_print_the_worked_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let out = legkit(&["mobility"], None, tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let ws: Vec<&str> = stdout.lines().skip(1).map(|l| l.split_whitespace().rev().nth(2).unwrap()).collect();
    assert_eq!(ws, ["3", "6", "6", "8"]);
    let csv = fs::read_to_string(tmp.path().join("mobility.csv")).unwrap();
    assert!(csv.starts_with("# legkit mobility config-sha256="));
}

#[test]
fn configuration_errors_exit_with_1() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_config(tmp.path(), "u.json", r#"{"budget": 4, "colour": "red"}"#);
    assert_eq!(legkit(&["synth"], Some(&unknown), &tmp.path().join("a")).status.code(), Some(1));
    let malformed = write_config(tmp.path(), "m.json", "{ budget: ");
    assert_eq!(legkit(&["synth"], Some(&malformed), &tmp.path().join("b")).status.code(), Some(1));
    let missing = tmp.path().join("nowhere.json");
    assert_eq!(legkit(&["slam"], Some(&missing), &tmp.path().join("c")).status.code(), Some(1));
    let bad_ga = write_config(tmp.path(), "g.json", r#"{"ga": {"population": 3}}"#);
    assert_eq!(legkit(&["pareto"], Some(&bad_ga), &tmp.path().join("d")).status.code(), Some(1));
    let bad_box = write_config(tmp.path(), "x.json", r#"{"bounds": {"lower": [0.1,0.4,0.4,0,3.2], "upper": [0.05,2.5,2.5,6,5]}}"#);
    assert_eq!(legkit(&["synth"], Some(&bad_box), &tmp.path().join("e")).status.code(), Some(1));
    let bad_graph = write_config(
        tmp.path(),
        "k.json",
        r#"{"mechanisms": [{"label": "x", "space": "planar", "moving_links": 2, "joints": {"p3": 1}}]}"#,
    );
    assert_eq!(legkit(&["mobility"], Some(&bad_graph), &tmp.path().join("f")).status.code(), Some(1));
    let flag = Command::new(env!("CARGO_BIN_EXE_legkit")).args(["synth", "--bogus"]).output().unwrap();
    assert_eq!(flag.status.code(), Some(1));
}

#[test]
fn impossible_requirements_exit_with_2_and_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"budget": 64, "requirements": {"min_transmission_deg": 89.0}}"#);
    let out = legkit(&["synth"], Some(&cfg), tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let s = summary(tmp.path(), "summary.json");
    assert_eq!(s["meeting_requirements"], 0);
    assert_eq!(s["budget"], 64);
    assert!(s["best"].is_null());
    assert!(String::from_utf8(out.stderr).unwrap().contains("sweep_failures"));
}

#[test]
fn budget_of_one_gives_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"budget": 1, "requirements": {"min_transmission_deg": 0, "min_step_cycle_ratio": 0}}"#);
    assert_eq!(legkit(&["synth"], Some(&cfg), tmp.path()).status.code(), Some(0));
    let table = fs::read_to_string(tmp.path().join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 3, "comment, header and one row");
}

#[test]
fn synth_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"budget": 512}"#);
    let run = |name: &str, threads: &str| {
        let dir = tmp.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_legkit"))
            .args(["synth", "--threads", threads, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        (fs::read(dir.join("table.csv")).unwrap(), fs::read(dir.join("pareto.csv")).unwrap())
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "4"));
    assert_eq!(a, run("d", "0"));
}

#[test]
fn pareto_seeded_rerun_is_identical_and_hash_follows_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"ga": {"population": 20, "generations": 15}}"#);
    let front = |name: &str, seed: &str| {
        let dir = tmp.path().join(name);
        let out = legkit(&["pareto", "--seed", seed], Some(&cfg), &dir);
        assert_eq!(out.status.code(), Some(0));
        fs::read_to_string(dir.join("front.csv")).unwrap()
    };
    let a = front("a", "7");
    assert_eq!(a, front("b", "7"));
    let c = front("c", "8");
    assert_ne!(a.lines().next(), c.lines().next(), "header hash reflects the seed");
}

#[test]
fn pareto_compares_against_a_sampling_table() {
    let tmp = tempfile::tempdir().unwrap();
    let synth_cfg = write_config(tmp.path(), "s.json", r#"{"budget": 256}"#);
    assert_eq!(legkit(&["synth"], Some(&synth_cfg), &tmp.path().join("scan")).status.code(), Some(0));
    let cfg = write_config(
        tmp.path(),
        "p.json",
        r#"{"ga": {"population": 20, "generations": 10}, "sampling_table": "scan/table.csv"}"#,
    );
    assert_eq!(legkit(&["pareto"], Some(&cfg), &tmp.path().join("ga")).status.code(), Some(0));
    let s = summary(&tmp.path().join("ga"), "summary.json");
    assert!(s["overlap"]["b_len"].as_u64().unwrap() > 0);
    assert!(s["overlap"]["distance_a_to_b"].as_f64().unwrap().is_finite());
    let svg = fs::read_to_string(tmp.path().join("ga/front.svg")).unwrap();
    assert!(svg.contains("sampling-table front"));
}

#[test]
fn isotropy_family_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"tripod": {"family": {"alpha1": 0.4, "gamma1": 1.0471975511965976, "beta": 1.2}}}"#,
    );
    assert_eq!(legkit(&["isotropy"], Some(&cfg), tmp.path()).status.code(), Some(0));
    let s = summary(tmp.path(), "isotropy.json");
    for r in s["residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap().abs() <= 1e-10);
    }
    assert!((s["condition"].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert!(fs::read_to_string(tmp.path().join("layout.svg")).unwrap().contains("config-sha256"));
}

#[test]
fn isotropy_singularities_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    // sin(α₁ + β − γ₁) = 0 leaves the family undefined.
    let cfg = write_config(tmp.path(), "c.json", r#"{"tripod": {"family": {"alpha1": 0.5, "gamma1": 1.5, "beta": 1.0}}}"#);
    let out = legkit(&["isotropy"], Some(&cfg), tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(summary(tmp.path(), "isotropy.json")["error"].is_string());
    let bad = write_config(tmp.path(), "b.json", r#"{"tripod": {"family": {"alpha1": 0.5, "gamma1": 1.0, "beta": 4.0}}}"#);
    assert_eq!(legkit(&["isotropy"], Some(&bad), &tmp.path().join("b")).status.code(), Some(1));
}

#[test]
fn noise_free_slam_summary_reports_converged_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{
            "sim": {
                "initial_error": [0.1, -0.1, 0.05],
                "initial_sigma": [0.2, 0.2, 0.1],
                "prior_map": true,
                "odometry": {"sigma_v": 0, "sigma_omega": 0},
                "sensor": {"range_sigma": 0, "bearing_sigma": 0},
                "filter": {"sigma_v": 0, "sigma_omega": 0, "range_sigma": 0, "bearing_sigma": 0}
            }
        }"#,
    );
    assert_eq!(legkit(&["slam"], Some(&cfg), tmp.path()).status.code(), Some(0));
    let s = summary(tmp.path(), "summary.json");
    assert!(s["final_error"].as_f64().unwrap() <= 1e-6);
    for name in ["run_log.csv", "path.csv"] {
        assert!(fs::read_to_string(tmp.path().join(name)).unwrap().starts_with("# legkit slam config-sha256="));
    }
    let pgm = fs::read_to_string(tmp.path().join("grid.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n# legkit slam"));
    assert!(fs::read_to_string(tmp.path().join("slam.svg")).unwrap().contains("<polyline"));
}

#[test]
fn slam_world_file_and_unreachable_goal() {
    let tmp = tempfile::tempdir().unwrap();
    let world = r#"{"landmarks": [{"id": 1, "x": 1.0, "y": 1.0}, {"id": 2, "x": -1.0, "y": 1.0}],
                    "obstacles": [[[-4,-4],[4,-4],[4,4],[-4,4]]],
                    "grid": {"resolution": 0.2, "origin": [-5, -5], "width": 50, "height": 50}}"#;
    write_config(tmp.path(), "world.json", world);
    let short = r#""controls": [{"v": 0.5, "omega": 0.2, "dt": 0.1, "steps": 30}], "start": {"x": 0, "y": 0, "heading": 0}"#;
    let ok = write_config(tmp.path(), "ok.json", &format!(r#"{{"world": "world.json", "goal": [1.5, -1.5], "sim": {{{short}}}}}"#));
    assert_eq!(legkit(&["slam"], Some(&ok), &tmp.path().join("ok")).status.code(), Some(0));
    let s = summary(&tmp.path().join("ok"), "summary.json");
    assert_eq!(s["landmarks"], 2);
    let off = write_config(tmp.path(), "off.json", &format!(r#"{{"world": "world.json", "goal": [9.0, 9.0], "sim": {{{short}}}}}"#));
    let out = legkit(&["slam"], Some(&off), &tmp.path().join("off"));
    assert_eq!(out.status.code(), Some(2));
    assert!(summary(&tmp.path().join("off"), "summary.json")["plan_error"].is_string());
}

#[test]
fn single_generation_front_is_the_initial_rank_zero_set() {
    use legkit_core::dominance::dominates;
    use legkit_core::nsga2::{evolve, GaConfig, LegProblem};

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"ga": {"population": 40, "generations": 1, "seed": 3}}"#);
    assert_eq!(legkit(&["pareto"], Some(&cfg), tmp.path()).status.code(), Some(0));
    let front = fs::read_to_string(tmp.path().join("front.csv")).unwrap();
    let mut got: Vec<f64> = front.lines().skip(2).map(|l| l.split(',').nth(5).unwrap().parse().unwrap()).collect();

    let defaults = legkit_cli::commands::pareto::ParetoConfig::default();
    let problem = LegProblem::new(&defaults.bounds, defaults.sweep, defaults.branch, defaults.metric);
    let result = evolve(&problem, &GaConfig { population: 40, generations: 1, seed: 3, ..Default::default() }).unwrap();
    let feasible: Vec<&Vec<f64>> =
        result.population.iter().filter(|i| i.violation <= 0.0).map(|i| &i.objectives).collect();
    let mut want: Vec<f64> = feasible
        .iter()
        .filter(|a| !feasible.iter().any(|b| dominates(b, a)))
        .map(|a| a[0])
        .collect();
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    assert!(!want.is_empty());
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()));
    }
}
