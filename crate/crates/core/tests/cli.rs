//! End-to-end tests of the command-line interface: output formats, the
//! exit-code contract, and seeded reproducibility.

use std::process::{Command, Output};

use pdextremal::bounds::{bound_report, BoundReport};
use pdextremal::rational::{rat, Rational};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdextremal"))
        .args(args)
        .env_remove("PDEXTREMAL_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn bounds_json_round_trips_exactly() {
    let out = run(&["bounds", "--ell", "2"]);
    assert!(out.status.success());
    let parsed: BoundReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed, bound_report(&rat(2, 1)).unwrap());
    assert_eq!(parsed.upper, Some(rat(5, 1)));
}

#[test]
fn bounds_fractional_half_length() {
    let out = run(&["bounds", "--ell", "3/2"]);
    let parsed: BoundReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(parsed.lower_g, rat(3, 1));
    assert_eq!(parsed.upper, Some(rat(4, 1)));

    // Exact decimal strings parse via powers of ten.
    let out = run(&["bounds", "--ell", "1.5"]);
    let decimal: BoundReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(decimal, parsed);
}

#[test]
fn bounds_domain_error_exits_2() {
    let out = run(&["bounds", "--ell", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["bounds", "--ell", "abc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_contract() {
    let out = run(&[
        "sweep", "--from", "1", "--to", "5", "--step", "1/4", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), BoundReport::CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17);

    // Bound columns are non-decreasing down the sweep.
    let mut prev_upper: Option<Rational> = None;
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        let upper = Rational::parse(fields[3]).unwrap();
        if let Some(p) = &prev_upper {
            assert!(p <= &upper, "upper bound decreased: {row}");
        }
        prev_upper = Some(upper);
    }

    // The row at ell = 2 matches the single-shot command byte for byte.
    let row2 = rows.iter().find(|r| r.starts_with("2,")).unwrap();
    let single = run(&["bounds", "--ell", "2", "--format", "csv"]);
    let single_text = stdout(&single);
    assert_eq!(single_text.lines().nth(1).unwrap(), *row2);

    // Half-integer rows collapse upper to upper_simple exactly.
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        let ell = Rational::parse(fields[0]).unwrap();
        if (&ell * &Rational::integer(2)).is_integer() {
            assert_eq!(fields[3], fields[4], "no collapse at {row}");
        }
    }
}

#[test]
fn sweep_unwritable_path_exits_3() {
    let out = run(&[
        "sweep",
        "--from",
        "1",
        "--to",
        "2",
        "--step",
        "1/2",
        "--out",
        "/nonexistent-dir/rows.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn witness_infeasible_params_exit_4() {
    let out = run(&["witness", "comb", "--k", "1", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(4));
    // A hopeless concentration budget also reports infeasibility.
    let out = run(&[
        "witness", "comb", "--k", "1", "--eps", "1/10", "--tol", "1e-9", "--power-cap", "64",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn witness_majorization_json() {
    let out = run(&["witness", "majorization", "--ell", "2", "--a", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["holds"], serde_json::Value::Bool(true));
    assert_eq!(v["band"][0], "1");
    assert_eq!(v["band"][1], "5");
    assert_eq!(v["k"], 4);
    assert_eq!(v["p"], "1");

    // The emitted certificate re-parses into the originating type and can
    // be re-verified from its own breakpoint data alone.
    use pdextremal::piecewise::PiecewiseLinearFn;
    use pdextremal::witness::MajorizationCertificate;
    let cert: MajorizationCertificate = serde_json::from_str(&text).unwrap();
    assert!(PiecewiseLinearFn::le(&cert.lhs, &cert.rhs).holds);
    assert_eq!(cert.band, (rat(1, 1), rat(5, 1)));
}

#[test]
fn witness_counterexample_reports_exact_gap() {
    let out = run(&["witness", "counterexample"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["success"], serde_json::Value::Bool(true));
    let gap = Rational::parse(v["gap"].as_str().unwrap()).unwrap();
    assert!(gap.is_positive());

    // Round trip and independent re-derivation of the gap from the emitted
    // density.
    use pdextremal::witness::CounterexampleReport;
    let report: CounterexampleReport = serde_json::from_str(&text).unwrap();
    let central = report
        .density
        .integral_over(Some(&rat(-1, 1)), Some(&rat(1, 1)))
        .unwrap();
    let window = report
        .density
        .integral_over(
            Some(&(&report.shift - &Rational::one())),
            Some(&(&report.shift + &Rational::one())),
        )
        .unwrap();
    assert_eq!(&window - &central, report.gap);
}

#[test]
fn solve_gamma_dual_bound() {
    let out = run(&["solve", "gamma", "--ell", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let bound = Rational::parse(v["bound"].as_str().unwrap()).unwrap();
    assert!(bound <= rat(5, 1));
    assert!(bound >= rat(2, 1));
    assert_eq!(v["result"]["independent_check"], serde_json::Value::Bool(true));
    assert_eq!(v["closed_form_upper"], "5");
}

#[test]
fn solve_sigma_unreachable_window_exits_5() {
    let out = run(&[
        "solve",
        "sigma",
        "--ell",
        "2",
        "--a-grid",
        "50:50:1",
        "--construction-shifts",
        "false",
        "--shift-count",
        "1",
        "--dilation-count",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn solve_iteration_limit_exits_6() {
    let out = run(&[
        "solve",
        "gamma",
        "--ell",
        "2",
        "--max-iterations",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn primal_seeded_runs_are_byte_identical() {
    let args = [
        "solve", "primal", "--ell", "3/2", "--harmonics", "6", "--period", "12",
        "--starts", "4", "--seed", "99",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    // The environment variable is an equivalent seed source.
    let c = Command::new(env!("CARGO_BIN_EXE_pdextremal"))
        .args([
            "solve", "primal", "--ell", "3/2", "--harmonics", "6", "--period", "12",
            "--starts", "4",
        ])
        .env("PDEXTREMAL_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn certify_builtins() {
    let out = run(&["certify", "--function", "triangle"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["pd"]["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["report"]["nonneg"]["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["construction"]["method"], "construction");

    let out = run(&[
        "certify", "--function", "indicator:-1:1", "--step", "0.3", "--lags", "64",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["pd"]["passed"], serde_json::Value::Bool(false));

    let out = run(&["certify", "--function", "train:1:4:1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["pd"]["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["report"]["nonneg"]["passed"], serde_json::Value::Bool(false));
}

#[test]
fn certify_sample_table() {
    let dir = std::env::temp_dir().join("pdextremal-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gaussian.csv");
    let mut rows = String::from("x,value\n");
    let mut x: f64 = -6.0;
    while x <= 6.0 {
        rows.push_str(&format!("{x},{}\n", (-x * x).exp()));
        x += 0.05;
    }
    std::fs::write(&path, rows).unwrap();
    let out = run(&["certify", "--samples", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["pd"]["passed"], serde_json::Value::Bool(true));
    assert_eq!(v["report"]["nonneg"]["passed"], serde_json::Value::Bool(true));
}

#[test]
fn output_file_writing() {
    let dir = std::env::temp_dir().join("pdextremal-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bounds.json");
    let out = run(&["bounds", "--ell", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: BoundReport = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.upper, Some(rat(5, 1)));
}
