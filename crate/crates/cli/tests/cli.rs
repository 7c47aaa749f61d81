use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn proxkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("PROXKIT_SEED")
        .env_remove("PROXKIT_TOL")
        .env_remove("PROXKIT_MAX_ITER")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_json(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn gen_lasso(dir: &Path) {
    let out = proxkit(
        dir,
        &[
            "gen",
            "lasso",
            "--n",
            "50",
            "--m",
            "30",
            "--alpha",
            "0.5",
            "--seed",
            "7",
            "--out",
            "lasso.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn gen_writes_requested_instance() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    let out = proxkit(
        dir.path(),
        &[
            "gen",
            "lasso",
            "--n",
            "50",
            "--m",
            "30",
            "--alpha",
            "0.5",
            "--seed",
            "7",
            "--out",
            "again.json",
        ],
    );
    assert!(stdout(&out).contains("n = 50, m = 30"));
    assert!(stdout(&out).contains("condition estimate"));

    let spec = read_json(&dir.path().join("lasso.json"));
    assert_eq!(spec["kind"], "lasso");
    assert_eq!(spec["alpha"], 0.5);
    assert_eq!(spec["seed"], 7);
    let a = spec["a"].as_array().unwrap();
    assert_eq!(a.len(), 30);
    assert!(a.iter().all(|row| row.as_array().unwrap().len() == 50));
    assert_eq!(spec["b"].as_array().unwrap().len(), 30);

    let first = fs::read(dir.path().join("lasso.json")).unwrap();
    assert_eq!(first, fs::read(dir.path().join("again.json")).unwrap());
}

#[test]
fn gen_seed_from_environment_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let flag = proxkit(dir.path(), &["gen", "box_qp", "--n", "5", "--seed", "11"]);
    let env = Command::new(env!("CARGO_BIN_EXE_proxkit"))
        .args(["gen", "box_qp", "--n", "5"])
        .env("PROXKIT_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&flag), 0);
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["gen", "lasso", "--alpha", "-1"][..],
        &["gen", "lasso", "--n", "0"],
        &["gen", "huber", "--gamma", "0"],
        &["gen", "control", "--lower", "1", "--upper", "-1"],
        &["gen", "sudoku"],
    ] {
        assert_eq!(code(&proxkit(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn solve_writes_trace_solution_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    let out = proxkit(
        dir.path(),
        &["solve", "--problem", "lasso.json", "--solver", "fista", "--out", "run"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let run = dir.path().join("run");
    let csv = fs::read_to_string(run.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "iter,objective,residual,gap,step,ms");
    let solution = read_json(&run.join("solution.json"));
    assert_eq!(solution["status"], "converged");
    assert_eq!(solution["x"].as_array().unwrap().len(), 50);
    let manifest = read_json(&run.join("manifest.json"));
    assert_eq!(manifest["solver"], "fista");
    assert_eq!(manifest["problem"], "lasso.json");
    // nothing but the finished directory is left next to it
    let entries: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(entries.len(), 2, "{entries:?}");
}

#[test]
fn traces_are_reproducible_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    for run in ["r1", "r2"] {
        let out = proxkit(
            dir.path(),
            &["solve", "--problem", "lasso.json", "--solver", "pdhg", "--out", run],
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let strip = |run: &str| -> Vec<String> {
        fs::read_to_string(dir.path().join(run).join("trace.csv"))
            .unwrap()
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.remove(5);
                cols.join(",")
            })
            .collect()
    };
    assert_eq!(strip("r1"), strip("r2"));
}

#[test]
fn existing_output_directory_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    fs::create_dir(dir.path().join("run")).unwrap();
    fs::write(dir.path().join("run").join("keep.txt"), "x").unwrap();
    let args = [
        "solve",
        "--problem",
        "lasso.json",
        "--solver",
        "prox_gradient",
        "--out",
        "run",
    ];
    assert_eq!(code(&proxkit(dir.path(), &args)), 2);
    assert!(dir.path().join("run").join("keep.txt").exists());
    let forced: Vec<&str> = args.iter().copied().chain(["--force"]).collect();
    assert_eq!(code(&proxkit(dir.path(), &forced)), 0);
    assert!(!dir.path().join("run").join("keep.txt").exists());
    assert!(dir.path().join("run").join("trace.csv").exists());
}

#[test]
fn pdhg_step_rule_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // ‖A‖ = 2, so στ‖A‖² = 0.36 · 4 = 1.44
    write_json(
        dir.path(),
        "diag.json",
        &json!({"kind": "lasso", "a": [[2.0, 0.0], [0.0, 1.0]], "b": [1.0, 1.0], "alpha": 0.5}),
    );
    let out = proxkit(
        dir.path(),
        &[
            "solve",
            "--problem",
            "diag.json",
            "--solver",
            "pdhg",
            "--tau",
            "0.6",
            "--sigma",
            "0.6",
            "--out",
            "run",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("1.44"), "{}", stderr(&out));
    assert!(!dir.path().join("run").exists());

    let ok = proxkit(
        dir.path(),
        &[
            "solve",
            "--problem",
            "diag.json",
            "--solver",
            "pdhg",
            "--tau",
            "0.4",
            "--sigma",
            "0.4",
        ],
    );
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
}

#[test]
fn ssn_solves_the_canonical_lasso() {
    // A = I, b = (3, 1/2), α = 1: soft thresholding gives (2, 0)
    let dir = tempfile::tempdir().unwrap();
    write_json(
        dir.path(),
        "canon.json",
        &json!({"kind": "lasso", "a": [[1.0, 0.0], [0.0, 1.0]], "b": [3.0, 0.5], "alpha": 1.0}),
    );
    let out = proxkit(dir.path(), &["solve", "--problem", "canon.json", "--solver", "ssn"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let solution: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let x: Vec<f64> = solution["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(x, vec![2.0, 0.0]);
    assert!(solution["kkt_residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn every_lasso_solver_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = proxkit(
        dir.path(),
        &[
            "gen", "lasso", "--n", "8", "--m", "16", "--alpha", "0.5", "--seed", "2", "--out", "p.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let mut objectives = Vec::new();
    for solver in ["prox_gradient", "fista", "dr", "pdhg", "ssn", "my_ssn"] {
        let out = proxkit(
            dir.path(),
            &[
                "solve",
                "--problem",
                "p.json",
                "--solver",
                solver,
                "--tol",
                "1e-10",
                "--max-iter",
                "200000",
            ],
        );
        assert_eq!(code(&out), 0, "{solver}: {}", stderr(&out));
        let solution: Value = serde_json::from_str(&stdout(&out)).unwrap();
        objectives.push((solver, solution["objective"].as_f64().unwrap()));
    }
    let best = objectives.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    for (solver, j) in objectives {
        // continuation stops at γ = 2⁻¹⁰ and keeps an O(γ) bias
        let tol = if solver == "my_ssn" { 1e-2 } else { 1e-8 };
        assert!(j - best <= tol, "{solver}: {j} vs {best}");
    }
}

#[test]
fn unknown_names_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    let out = proxkit(
        dir.path(),
        &[
            "solve",
            "--problem",
            "lasso.json",
            "--solver",
            "newton_raphson",
            "--out",
            "run",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("run").exists());
    assert_eq!(code(&proxkit(dir.path(), &["check", "sorcery"])), 2);
    assert_eq!(code(&proxkit(dir.path(), &["frobnicate"])), 2);
    // a solver that does not fit the problem kind is rejected too
    assert_eq!(
        code(&proxkit(dir.path(), &["gen", "box_qp", "--n", "4", "--out", "qp.json"])),
        0
    );
    assert_eq!(
        code(&proxkit(
            dir.path(),
            &["solve", "--problem", "qp.json", "--solver", "pdhg"]
        )),
        2
    );
    assert_eq!(
        code(&proxkit(
            dir.path(),
            &["solve", "--problem", "missing.json", "--solver", "fista"]
        )),
        2
    );
}

#[test]
fn iteration_cap_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    let out = proxkit(
        dir.path(),
        &[
            "solve",
            "--problem",
            "lasso.json",
            "--solver",
            "prox_gradient",
            "--max-iter",
            "3",
            "--out",
            "run",
        ],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let solution = read_json(&dir.path().join("run").join("solution.json"));
    assert_eq!(solution["status"], "max_iterations");
    assert_eq!(
        fs::read_to_string(dir.path().join("run").join("trace.csv"))
            .unwrap()
            .lines()
            .count(),
        5
    );

    let env = Command::new(env!("CARGO_BIN_EXE_proxkit"))
        .args(["solve", "--problem", "lasso.json", "--solver", "fista"])
        .current_dir(dir.path())
        .env("PROXKIT_MAX_ITER", "2")
        .output()
        .unwrap();
    assert_eq!(code(&env), 3);
    assert_eq!(
        code(&proxkit(
            dir.path(),
            &["solve", "--problem", "lasso.json", "--solver", "fista", "--tol", "0"]
        )),
        2
    );
}

#[test]
fn catalog_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = proxkit(dir.path(), &["check", "moreau", "--trials", "100", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = stdout(&out);
    assert!(
        report.lines().filter(|l| l.starts_with("PASS")).count() >= 3,
        "{report}"
    );
    assert!(report.contains("worst"));
    for suite in ["envelope", "nonexpansive", "identification"] {
        let out = proxkit(dir.path(), &["check", suite, "--trials", "30", "--seed", "4"]);
        assert_eq!(code(&out), 0, "{suite}: {}", stdout(&out));
    }
}

fn worst_of(report: &str, prefix: &str) -> f64 {
    let line = report
        .lines()
        .find(|l| l.contains(prefix))
        .unwrap_or_else(|| panic!("{report}"));
    let after = line.split("worst ").nth(1).unwrap();
    after.split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn problem_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    gen_lasso(dir.path());
    let out = proxkit(dir.path(), &["check", "rate", "--problem", "lasso.json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let ratio = worst_of(&stdout(&out), "max_k k(J(x^k) - J*)");
    assert!((0.0..=1.0).contains(&ratio), "{ratio}");

    let out = proxkit(dir.path(), &["check", "superlinear", "--problem", "lasso.json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(worst_of(&stdout(&out), "last usable error ratio") <= 0.1);

    let out = proxkit(
        dir.path(),
        &["check", "fejer", "--problem", "lasso.json", "--out", "fejer.txt"],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(fs::read_to_string(dir.path().join("fejer.txt")).unwrap(), stdout(&out));

    assert_eq!(code(&proxkit(dir.path(), &["check", "rate"])), 2);
    assert_eq!(
        code(&proxkit(dir.path(), &["check", "moreau", "--problem", "lasso.json"])),
        2
    );
}

#[test]
fn bench_lists_applicable_solvers() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&proxkit(
            dir.path(),
            &["gen", "lasso", "--n", "10", "--m", "20", "--out", "p.json"]
        )),
        0
    );
    let out = proxkit(
        dir.path(),
        &["bench", "--problem", "p.json", "--repeat", "1", "--out", "bench.csv"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "solver,status,iterations,objective,kkt_residual,median_ms"
    );
    assert_eq!(csv.lines().count(), 7);

    assert_eq!(
        code(&proxkit(dir.path(), &["gen", "huber", "--n", "10", "--out", "h.json"])),
        0
    );
    let out = proxkit(
        dir.path(),
        &[
            "bench",
            "--problem",
            "h.json",
            "--solvers",
            "fista,ssn",
            "--repeat",
            "1",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("ssn"));
    assert_eq!(
        code(&proxkit(
            dir.path(),
            &["bench", "--problem", "h.json", "--solvers", "dr"]
        )),
        2
    );
}
