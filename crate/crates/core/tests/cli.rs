use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dispatchkit"))
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/reference_fleet.toml")
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("DISPATCHKIT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fx() -> String {
    fixture().display().to_string()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn check_reports_each_regime_with_distinct_codes() {
    let o = run(&["check", &fx()]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("regime: Deficit"), "{out}");
    assert!(out.contains("T*sum(p_max) < demand"), "{out}");
    assert!(out.contains("capacity_max_kwh: 500.000000"), "{out}");

    let o = run(&["check", &fx(), "--demand", "500"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("regime: EqualityFeasible"));

    let o = run(&["check", &fx(), "--demand", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("regime: BelowMinimum"));
}

#[test]
fn parse_errors_exit_one_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(fixture())
        .unwrap()
        .replace("p_max_kw = 85.0", "p_max_kw = 20.0");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("customers[3] (PC4)"), "{err}");

    let unknown = dir.path().join("unknown.toml");
    std::fs::write(
        &unknown,
        format!(
            "voltage = 3\n{}",
            std::fs::read_to_string(fixture()).unwrap()
        ),
    )
    .unwrap();
    let o = run(&["check", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("voltage"));
}

#[test]
fn solve_multi_full_cost_weight() {
    let o = run(&["solve", &fx(), "--mode", "multi", "--lambda", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with(
        "PC1_kwh,PC2_kwh,PC3_kwh,PC4_kwh,PC5_kwh,total_energy_kwh,total_cost,coupling_multiplier\n"
    ));
    let row = &data_rows(&out)[0];
    assert_eq!(&row[..5], &[30.0; 5]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("kkt_residual"));
    assert!(err.contains("status PC1: AtLower"));
}

#[test]
fn solve_resilience_in_deficit() {
    let o = run(&["solve", &fx(), "--mode", "resilience"]);
    assert!(o.status.success());
    assert_eq!(data_rows(&stdout(&o))[0][5], 500.0);
}

#[test]
fn solve_cost_matches_grid_oracle_golden() {
    let o = run(&["solve", &fx(), "--mode", "cost", "--demand", "300"]);
    assert!(o.status.success());
    let row = &data_rows(&stdout(&o))[0];
    // Oracle optimum on the 0.25 kWh grid.
    let golden = [60.0, 63.75, 62.75, 55.25, 58.25];
    for (e, g) in row[..5].iter().zip(golden) {
        assert!((e - g).abs() <= 0.25, "{e} vs {g}");
    }
    assert_eq!(row[5], 300.0);
}

#[test]
fn solve_infeasible_exits_two() {
    let o = run(&["solve", &fx(), "--mode", "cost"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("T*sum(p_max)"));
}

#[test]
fn solve_output_is_byte_identical() {
    let a = run(&["solve", &fx(), "--mode", "cost", "--demand", "333.3"]);
    let b = run(&["solve", &fx(), "--mode", "cost", "--demand", "333.3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_env_var_is_validated() {
    let o = bin()
        .args(["solve", &fx(), "--mode", "multi"])
        .env("DISPATCHKIT_TOL", "abc")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin()
        .args(["solve", &fx(), "--mode", "multi"])
        .env("DISPATCHKIT_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn lambda_sweep_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lambda.csv");
    let plot = dir.path().join("lambda.svg");
    let o = run(&[
        "sweep",
        &fx(),
        "--param",
        "lambda",
        "--start",
        "0",
        "--stop",
        "1",
        "--step",
        "0.001",
        "--out",
        out.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("lambda,PC1_kwh,"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1001);
    let first_all_min = rows
        .iter()
        .find(|r| r[1..6].iter().all(|&e| e == 30.0))
        .unwrap()[0];
    assert!((0.085..=0.095).contains(&first_all_min), "{first_all_min}");
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(svg.matches(r#"class="series""#).count(), 5);
    for id in ["PC1", "PC2", "PC3", "PC4", "PC5"] {
        assert!(svg.contains(&format!(r#"data-name="{id}""#)));
    }
    assert!(svg.contains("kWh"));
}

#[test]
fn demand_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demand.csv");
    let o = run(&[
        "sweep",
        &fx(),
        "--param",
        "demand",
        "--start",
        "150",
        "--stop",
        "500",
        "--step",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = data_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 36);
    assert_eq!(&rows[0][1..6], &[30.0; 5]);
    assert_eq!(&rows[35][1..6], &[60.0, 100.0, 125.0, 85.0, 130.0]);
}

#[test]
fn demand_sweep_out_of_range_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("demand.csv");
    let o = run(&[
        "sweep",
        &fx(),
        "--param",
        "demand",
        "--start",
        "100",
        "--stop",
        "200",
        "--step",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_exits_nonzero() {
    let o = run(&[
        "sweep",
        &fx(),
        "--param",
        "lambda",
        "--step",
        "0.1",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn pareto_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pareto.csv");
    let plot = dir.path().join("pareto.svg");
    let o = run(&[
        "pareto",
        &fx(),
        "--grid-size",
        "101",
        "--out",
        out.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("lambda,lambda_end,total_cost,total_energy_kwh\n"));
    let rows = data_rows(&csv);
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert_eq!((first[0], first[3]), (0.0, 500.0));
    assert_eq!((last[1], last[3]), (1.0, 150.0));
    for a in &rows {
        for b in &rows {
            assert!(!(a[2] < b[2] && a[3] > b[3]), "{a:?} dominates {b:?}");
        }
    }
    // Plateau edges, one 0.01 grid step either side of the closed-form thresholds.
    assert!((first[1] - 0.048).abs() <= 0.01, "{}", first[1]);
    assert!((last[0] - 0.091).abs() <= 0.01, "{}", last[0]);
    assert!(std::fs::read_to_string(&plot)
        .unwrap()
        .contains("<polyline"));

    let o = run(&[
        "pareto",
        &fx(),
        "--grid-size",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}
