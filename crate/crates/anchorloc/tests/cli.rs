//! End-to-end checks of the command-line surface and the scenario library.

use std::path::{Path, PathBuf};
use std::process::Command;

use anchorloc::cli::{self, CliError, CrlbArgs, RunArgs};
use anchorloc::config::{self, ConfigError};
use anchorloc::report;

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

const ALL_SCENARIOS: [&str; 7] = [
    "semicircle_fixed.toml",
    "semilinear_fixed.toml",
    "arbitrary_hetero_6_3.toml",
    "arbitrary_hetero_4_2.toml",
    "corner_regions_homog.toml",
    "corner_regions_hetero_5_1.toml",
    "semicircle_regions_hetero_4_1.toml",
];

/// A six-anchor ring with near-zero position noise, used for bound queries.
fn write_ring_scenario(dir: &Path) -> PathBuf {
    let path = dir.join("ring.toml");
    let r = 10.0f64;
    let c = 17.0f64;
    let mut anchors = String::new();
    for k in 0..6 {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / 6.0;
        anchors.push_str(&format!(
            "  [{:.12}, {:.12}],\n",
            c + r * ang.cos(),
            c + r * ang.sin()
        ));
    }
    let text = format!(
        "id = \"ring\"\n\n[anchors]\nfixed = [\n{anchors}]\n\n\
         [blind]\ntruth = [17.0, 17.0]\ninit = [34.0, 34.0]\n\n\
         [noise]\nsigma_a = 1e-6\nsigma_p = 2.0\n\n\
         [estimator]\nstep_size = 0.05\n"
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn every_shipped_scenario_loads_and_validates() {
    for name in ALL_SCENARIOS {
        let loaded =
            config::load(&scenario_dir().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(loaded.scenario.anchor_count() >= 3);
        assert_eq!(
            loaded.sigma_p_sweep.as_deref(),
            Some(&[1.0, 2.0, 3.0, 4.0, 5.0][..])
        );
        // scenario ids match file stems so CSV rows are traceable
        assert_eq!(format!("{}.toml", loaded.scenario.id), name);
    }
}

#[test]
fn shipped_scenario_roundtrips_through_serialization() {
    for name in ["semicircle_fixed.toml", "corner_regions_hetero_5_1.toml"] {
        let loaded = config::load(&scenario_dir().join(name)).unwrap();
        let text = config::to_toml_string(&config::scenario_to_file(
            &loaded.scenario,
            loaded.sigma_p_sweep.clone(),
        ))
        .unwrap();
        let reparsed: config::ScenarioFile = toml::from_str(&text).unwrap();
        let reloaded = reparsed.into_scenario("ignored").unwrap();
        assert_eq!(reloaded.scenario, loaded.scenario);
        assert_eq!(reloaded.sigma_p_sweep, loaded.sigma_p_sweep);
    }
}

#[test]
fn run_writes_the_documented_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let hist = dir.path().join("hist");
    let args = RunArgs {
        scenario: scenario_dir().join("semicircle_fixed.toml"),
        trials: 25,
        seed: 5,
        out: Some(out.clone()),
        histograms: Some(hist.clone()),
    };
    cli::cmd_run(&args, Some(&[2.0, 4.0])).unwrap();

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(report::CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4, "two cells x two algorithms");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 9);
        assert_eq!(fields[0], "semicircle_fixed");
        assert!(fields[1] == "anchor_aware" || fields[1] == "rssi_only");
        assert_eq!(fields[3], "25");
        assert_eq!(fields[8], "5");
        // every float field is rendered with six significant digits:
        // re-rendering the parsed value reproduces the text exactly
        for idx in [2usize, 4, 5, 6, 7] {
            let s = fields[idx];
            if s.is_empty() {
                continue; // crlb_m may be undefined
            }
            let v: f64 = s.parse().unwrap_or_else(|_| panic!("field {idx} = {s}"));
            assert_eq!(report::format_significant(v, 6), s, "field {idx}");
        }
    }

    let mut hist_files: Vec<PathBuf> = std::fs::read_dir(&hist)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    hist_files.sort();
    assert_eq!(hist_files.len(), 4);
    for f in hist_files {
        let text = std::fs::read_to_string(f).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(report::HISTOGRAM_HEADER));
        let counts: u64 = lines
            .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(counts, 25, "histogram mass equals the trial count");
    }
}

#[test]
fn single_zero_noise_trial_reports_sub_millimeter_rmse() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("noiseless.toml");
    // weights sit on the 1e-9 floor without noise, hence the tiny step size
    std::fs::write(
        &scenario,
        "[anchors]\nfixed = [[3.0,3.0],[32.0,4.0],[30.0,31.0],[4.0,29.0],[17.0,2.0],[16.0,33.0]]\n\n\
         [blind]\ntruth = [14.0, 15.0]\ninit = [33.0, 33.0]\n\n\
         [estimator]\nstep_size = 5e-11\nmax_iters = 5000\nstop_tol = 1e-8\n",
    )
    .unwrap();
    let out = dir.path().join("results.csv");
    let args = RunArgs {
        scenario,
        trials: 1,
        seed: 1,
        out: Some(out.clone()),
        histograms: None,
    };
    cli::cmd_run(&args, None).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let rmse: f64 = fields[4].parse().unwrap();
        assert!(rmse < 1e-3, "rmse {rmse}");
        assert_eq!(fields[7], "", "no bound is defined at zero noise");
    }
}

#[test]
fn heterogeneous_run_favors_the_anchor_aware_estimator_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");
    let args = RunArgs {
        scenario: scenario_dir().join("arbitrary_hetero_6_3.toml"),
        trials: 1000,
        seed: 42,
        out: Some(out.clone()),
        histograms: None,
    };
    // no override: the file's sweep section supplies sigma_p 1..5
    cli::cmd_run(&args, None).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 10);
    for pair in rows.chunks(2) {
        let (aware, rssi) = (&pair[0], &pair[1]);
        assert_eq!(aware[1], "anchor_aware");
        assert_eq!(rssi[1], "rssi_only");
        assert_eq!(aware[2], rssi[2], "cells are paired by sigma_p");
        let aware_rmse: f64 = aware[4].parse().unwrap();
        let rssi_rmse: f64 = rssi[4].parse().unwrap();
        assert!(
            aware_rmse < rssi_rmse,
            "sigma_p {}: {aware_rmse} !< {rssi_rmse}",
            aware[2]
        );
    }
}

#[test]
fn crlb_ring_value_and_monotone_column() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_ring_scenario(dir.path());
    let out = dir.path().join("bounds.csv");
    let args = CrlbArgs {
        scenario,
        sigma_p: Some(vec![1.0, 2.0, 4.0]),
        per_trial: false,
        trials: 1000,
        seed: 1,
        out: Some(out.clone()),
    };
    cli::cmd_crlb(&args).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sigma_p_dbm,crlb_m"));
    let bounds: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(bounds.len(), 3);
    assert!(
        (bounds[1] - 1.0541).abs() < 1e-3,
        "ring bound {}",
        bounds[1]
    );
    assert!(bounds[0] < bounds[1] && bounds[1] < bounds[2]);
}

#[test]
fn crlb_rejects_zero_noise_with_an_explanation() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_ring_scenario(dir.path());
    let args = CrlbArgs {
        scenario,
        sigma_p: Some(vec![0.0]),
        per_trial: false,
        trials: 10,
        seed: 1,
        out: None,
    };
    match cli::cmd_crlb(&args) {
        Err(CliError::InvalidRequest { message }) => {
            assert!(message.contains("sigma_p"), "{message}");
        }
        other => panic!("expected an invalid-request error, got {other:?}"),
    }
}

#[test]
fn crlb_on_random_scenarios_requires_per_trial() {
    let args = CrlbArgs {
        scenario: scenario_dir().join("corner_regions_homog.toml"),
        sigma_p: Some(vec![2.0]),
        per_trial: false,
        trials: 10,
        seed: 1,
        out: None,
    };
    match cli::cmd_crlb(&args) {
        Err(CliError::InvalidRequest { message }) => {
            assert!(message.contains("--per-trial"), "{message}");
        }
        other => panic!("expected an invalid-request error, got {other:?}"),
    }

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds.csv");
    let args = CrlbArgs {
        scenario: scenario_dir().join("corner_regions_homog.toml"),
        sigma_p: Some(vec![2.0]),
        per_trial: true,
        trials: 50,
        seed: 1,
        out: Some(out.clone()),
    };
    cli::cmd_crlb(&args).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let bound: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(bound > 0.0 && bound < 20.0, "averaged bound {bound}");
}

#[test]
fn loader_errors_name_the_problem() {
    match config::load(Path::new("/nonexistent/scenario.toml")) {
        Err(ConfigError::Io { .. }) => {}
        other => panic!("expected io error, got {other:?}"),
    }

    let dir = tempfile::tempdir().unwrap();
    let bad_syntax = dir.path().join("bad.toml");
    std::fs::write(&bad_syntax, "[anchors\nfixed = [").unwrap();
    match config::load(&bad_syntax) {
        Err(ConfigError::Parse { message, .. }) => {
            assert!(message.contains("line"), "{message}");
        }
        other => panic!("expected parse error, got {other:?}"),
    }

    let bad_eta = dir.path().join("bad_eta.toml");
    std::fs::write(
        &bad_eta,
        "[pathloss]\neta = -1.0\n\n[anchors]\nfixed = [[1.0,1.0],[2.0,2.0],[3.0,3.0]]\n\n\
         [blind]\ntruth = [5.0,5.0]\ninit = [30.0,30.0]\n\n[estimator]\nstep_size = 0.1\n",
    )
    .unwrap();
    match config::load(&bad_eta) {
        Err(ConfigError::Validation { field, .. }) => assert_eq!(field, "pathloss"),
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn binary_reports_success_and_failure_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_anchorloc");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results.csv");

    let ok = Command::new(exe)
        .args([
            "run",
            "--scenario",
            scenario_dir()
                .join("semicircle_fixed.toml")
                .to_str()
                .unwrap(),
            "--trials",
            "5",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(out.exists());

    let missing = Command::new(exe)
        .args(["run", "--scenario", "/nonexistent/file.toml"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&missing.stderr);
    assert!(stderr.contains("\"status\":\"error\""), "stderr: {stderr}");
}
