//! End-to-end tests that drive the `pixvlc` binary: output shapes, bundled
//! fixtures, determinism, and the exit-code contract (0 success, 1
//! usage/validation, 2 I/O or parse).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pixvlc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn required_snr_reproduces_thresholds() {
    let out = run(&["required-snr"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("order,required_snr_db,throughput_bps\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    let expected = [(2, 9.80, 200.0), (4, 19.10, 400.0), (8, 26.23, 600.0)];
    for (row, (order, snr, bps)) in rows.iter().zip(expected) {
        assert_eq!(row[0], order.to_string());
        let got: f64 = row[1].parse().unwrap();
        assert!((got - snr).abs() <= 0.05, "M={order}: {got} vs {snr}");
        assert_eq!(row[2].parse::<f64>().unwrap(), bps);
    }
}

#[test]
fn required_snr_single_order_and_bad_target() {
    let out = run(&["required-snr", "--orders", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout_of(&out)).len(), 1);

    let out = run(&["required-snr", "--target-ber", "0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("out of range"));
}

#[test]
fn adapt_reproduces_rate_adaptation() {
    let calibration = data_dir().join("table3_distance_snr.csv");
    let out = run(&[
        "adapt",
        "--calibration",
        calibration.to_str().unwrap(),
        "--distances",
        "2,3,4,5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    let orders: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    let throughputs: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(orders, ["8", "4", "2", "2"]);
    assert_eq!(throughputs, ["600", "400", "200", "200"]);
}

#[test]
fn adapt_csv_output_round_trips_as_calibration() {
    let calibration = data_dir().join("table3_distance_snr.csv");
    let first = run(&[
        "adapt",
        "--calibration",
        calibration.to_str().unwrap(),
        "--distances",
        "2,2.5,3,4,5",
    ]);
    assert_eq!(first.status.code(), Some(0));
    let first_text = stdout_of(&first);

    // rebuild a calibration file from the printed distance/snr columns
    let dir = tempfile::tempdir().unwrap();
    let rebuilt = dir.path().join("rebuilt.csv");
    let mut content = String::from("distance_m,snr_db\n");
    for row in csv_rows(&first_text) {
        content.push_str(&format!("{},{}\n", row[0], row[1]));
    }
    std::fs::write(&rebuilt, content).unwrap();

    let second = run(&[
        "adapt",
        "--calibration",
        rebuilt.to_str().unwrap(),
        "--distances",
        "2,2.5,3,4,5",
    ]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first_text, stdout_of(&second), "reloaded CSV must reproduce identical output");
}

#[test]
fn adapt_rejects_extrapolation_without_power_law() {
    let calibration = data_dir().join("table3_distance_snr.csv");
    let out = run(&[
        "adapt",
        "--calibration",
        calibration.to_str().unwrap(),
        "--distances",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--power-law"));
}

#[test]
fn adapt_power_law_extrapolates_and_prints_fit() {
    let calibration = data_dir().join("table3_distance_snr.csv");
    let out = run(&[
        "adapt",
        "--calibration",
        calibration.to_str().unwrap(),
        "--distances",
        "7",
        "--power-law",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let err = stderr_of(&out);
    assert!(err.contains("power-law fit"));
    assert!(err.contains("residual at 2 m"));
    let rows = csv_rows(&stdout_of(&out));
    // fitted model at 7 m: ~11.3 dB, enough for OOK only
    assert_eq!(rows[0][2], "2");
}

#[test]
fn adapt_io_errors_exit_2() {
    let out = run(&["adapt", "--calibration", "no_such.csv", "--distances", "2"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "distance_m,snr_db\n2,26.55\nthree,21.15\n").unwrap();
    let out = run(&["adapt", "--calibration", bad.to_str().unwrap(), "--distances", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("line 3"));
}

#[test]
fn budget_verdicts() {
    let out = run(&["budget"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    let harvested: f64 = rows[0][0].parse().unwrap();
    assert!((harvested - 292.0).abs() <= 0.1);
    assert_eq!(rows[0][3], "true");

    let out = run(&["budget", "--clock", "dco"]);
    assert_eq!(out.status.code(), Some(0), "infeasible is data, not an error");
    assert_eq!(csv_rows(&stdout_of(&out))[0][3], "false");

    let out = run(&["budget", "--lux", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][3], "false");
}

#[test]
fn budget_flag_validation() {
    let out = run(&["budget", "--efficiency", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["budget", "--mod-freq", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("outside the measured range"));
}

#[test]
fn budget_accepts_external_current_table() {
    let table = data_dir().join("table2_vlo.csv");
    let out = run(&["budget", "--current-table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    let consumed: f64 = rows[0][1].parse().unwrap();
    assert!((consumed - 207.1).abs() <= 0.5);
}

#[test]
fn pixels_reproduces_measured_build() {
    let out = run(&["pixels", "--clusters", "2", "--diameter", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let rows = csv_rows(&text);
    let d1: f64 = rows[0][2].parse().unwrap();
    let d2: f64 = rows[1][2].parse().unwrap();
    assert!((d1 - 11.55).abs() <= 0.01);
    assert!((d2 - 16.33).abs() <= 0.01);
    assert!(text.lines().last().unwrap().starts_with("# total_area_mm2="));

    let out = run(&["pixels", "--clusters", "1", "--diameter", "20"]);
    assert_eq!(csv_rows(&stdout_of(&out))[0][2], "20");

    let out = run(&["pixels", "--clusters", "0", "--diameter", "20"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_bundled_scenario() {
    let config = data_dir().join("paper_2m_8pam.json");
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows[0][6], "600", "bundled scenario delivers 600 bps");
    assert_eq!(rows[0][2], "26.55");
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let config = data_dir().join("paper_2m_8pam.json");
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out_file in [&out_a, &out_b] {
        let out = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_file.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout_of(&out).is_empty());
    }
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap(),
        "same config and seed must produce identical bytes"
    );
}

#[test]
fn simulate_sweep_covers_grid() {
    let config = data_dir().join("paper_sweep.json");
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 12, "4 distances × 3 orders");
    // every cell at 2 m is feasible; 8-PAM beyond 3 m is flagged
    assert!(rows
        .iter()
        .filter(|r| r[0] == "2")
        .all(|r| r[7] == "ok"));
    assert!(rows
        .iter()
        .filter(|r| r[0] == "5" && r[1] == "8")
        .all(|r| r[7] == "above_target"));
}

#[test]
fn simulate_validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("too_coarse.json");
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "array": { "structure": "binary_weighted", "clusters": 1, "total_diameter_mm": 20.0 },
  "modulation": { "order": 8 },
  "channel": { "power_law": { "c0_db": 34.93, "gamma": 2.8 } },
  "distance_m": 2.0,
  "n_bits": 120,
  "seed": 1
}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("levels_available(2) < 8"));
}

#[test]
fn simulate_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("typo.json");
    std::fs::write(
        &config,
        r#"{
  "schema_version": 1,
  "array": { "structure": "binary_weighted", "clusters": 3, "total_diameter_mm": 20.0 },
  "modulation": { "order": 8 },
  "channel": { "power_law": { "c0_db": 34.93, "gamma": 2.8 } },
  "distance_m": 2.0,
  "n_bits": 120,
  "seed": 1,
  "n_bitts": 240
}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("n_bitts"));
}

#[test]
fn simulate_io_errors_exit_2() {
    let out = run(&["simulate", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.json");
    std::fs::write(&config, "{ not json").unwrap();
    let out = run(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ber_curve_single_point_and_monotonicity() {
    let out = run(&["ber-curve", "--order", "2", "--snr-min", "9.8", "--snr-max", "9.8"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 1);
    let ber: f64 = rows[0][1].parse().unwrap();
    assert!((ber - 1e-3).abs() / 1e-3 <= 0.02);

    let out = run(&[
        "ber-curve", "--order", "4", "--snr-min", "5", "--snr-max", "25", "--step", "0.5",
    ]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 41);
    let bers: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(bers.windows(2).all(|w| w[1] < w[0]), "BER column must strictly decrease");
}

#[test]
fn ber_curve_monte_carlo_columns() {
    let args = [
        "ber-curve", "--order", "4", "--snr-min", "19.1", "--snr-max", "19.1",
        "--monte-carlo", "1000000", "--seed", "7",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.starts_with("snr_db,analytic_ber,mc_ber,ci95\n"));
    let rows = csv_rows(&text);
    let mc: f64 = rows[0][2].parse().unwrap();
    assert!((mc - 1e-3).abs() / 1e-3 <= 0.10, "MC {mc} within 10% of 1e-3");
    // seeded: identical bytes on repeat
    assert_eq!(text, stdout_of(&run(&args)));
}

#[test]
fn ber_curve_flag_validation() {
    let out = run(&["ber-curve", "--order", "3", "--snr-min", "0", "--snr-max", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["ber-curve", "--order", "2", "--snr-min", "5", "--snr-max", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "ber-curve", "--order", "2", "--snr-min", "0", "--snr-max", "1", "--step", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_format_is_valid_json() {
    let out = run(&["required-snr", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value.as_array().unwrap().len(), 3);

    let config = data_dir().join("paper_sweep.json");
    let out = run(&["simulate", "--config", config.to_str().unwrap(), "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["cells"].as_array().unwrap().len(), 12);
}

#[test]
fn help_and_bad_usage_exit_codes() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["required-snr", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
}

fn data_path_exists(name: &str) -> bool {
    Path::new(&data_dir()).join(name).exists()
}

#[test]
fn bundled_fixtures_present() {
    for name in [
        "table3_distance_snr.csv",
        "table1_dco.csv",
        "table2_vlo.csv",
        "paper_2m_8pam.json",
        "paper_sweep.json",
    ] {
        assert!(data_path_exists(name), "missing bundled fixture {name}");
    }
}
