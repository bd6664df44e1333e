use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use qhmc_cli::config::ExperimentConfig;
use qhmc_cli::sweep::{sweep_points, Execution, SWEEP_HEADER};
use qhmc_core::potentials::PotentialRegistry;

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn qhmc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qhmc")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) {
    let out = qhmc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn select_columns(csv_text: &str, keep: &[usize]) -> String {
    csv_text
        .lines()
        .map(|l| {
            let cells: Vec<&str> = l.split(',').collect();
            keep.iter().map(|&i| cells[i]).collect::<Vec<_>>().join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn force_table_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["force-table", "--config", golden("force_table.toml").to_str().unwrap(), "--out", out]);
    let got = fs::read_to_string(dir.path().join("force_table.csv")).unwrap();
    assert_eq!(got, fs::read_to_string(golden("force_table.csv")).unwrap());
}

#[test]
fn sweep_csv_schema_and_values_match_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["sweep", "--config", golden("sweep.toml").to_str().unwrap(), "--out", out]);
    let got = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(got.lines().next().unwrap(), SWEEP_HEADER.join(","));
    assert_eq!(got.lines().next().unwrap(), "q,time_s,accept_rate,ess,iat,ess_per_time");
    // wall-clock columns excluded
    let expected = fs::read_to_string(golden("sweep_deterministic_columns.csv")).unwrap();
    assert_eq!(select_columns(&got, &[0, 2, 3, 4]), expected.trim_end());
    let degenerate = got.lines().nth(1).unwrap();
    assert!(degenerate.ends_with(",nan,N/A,nan"), "{degenerate}");
    for k in 0..4 {
        for kind in ["trace", "acf", "hist"] {
            assert!(dir.path().join(format!("q{k:02}_{kind}.csv")).exists());
        }
    }
}

#[test]
fn chain_replays_bit_identically_from_metadata() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/gaussian_chain.toml");
    run_ok(&["chain", "--config", config.to_str().unwrap(), "--seed", "99", "--out", first.path().to_str().unwrap()]);
    let meta = first.path().join("metadata.json");
    run_ok(&["chain", "--config", meta.to_str().unwrap(), "--out", second.path().to_str().unwrap()]);
    let a = fs::read(first.path().join("samples.csv")).unwrap();
    let b = fs::read(second.path().join("samples.csv")).unwrap();
    assert_eq!(a, b);
    let replayed = ExperimentConfig::load(&meta).unwrap();
    assert_eq!(replayed.sampler.seed, 99);
}

#[test]
fn sweep_is_independent_of_execution_mode() {
    let cfg = ExperimentConfig::load(&golden("sweep.toml")).unwrap();
    let registry = PotentialRegistry::builtin();
    let seq = sweep_points(&cfg, &registry, Execution::Sequential).unwrap();
    let par = sweep_points(&cfg, &registry, Execution::Parallel).unwrap();
    assert_eq!(seq.len(), par.len());
    for (s, p) in seq.iter().zip(&par) {
        assert_eq!(s.q, p.q);
        assert_eq!(s.seed, cfg.sampler.seed ^ s.index as u64);
        assert_eq!(s.chain.samples, p.chain.samples);
        assert_eq!(s.report.ess, p.report.ess);
    }
}

#[test]
fn minimal_chain_request_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("tiny.toml");
    fs::write(
        &cfg_path,
        "[target]\nname = \"double_well\"\n[sampler]\nq_values = [0.9]\nn_samples = 6\nburn_in = 5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    run_ok(&["sweep", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().ends_with(",nan,N/A,nan"));
}

#[test]
fn config_errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[target]\nname = \"no_such_target\"\n").unwrap();
    let out = qhmc(&["chain", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("double_well") && stderr.contains("octic"), "{stderr}");

    fs::write(&bad, "[target]\nname = \"octic\"\n[sampler]\ndt = -1.0\n").unwrap();
    assert_eq!(qhmc(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(2));

    let out = qhmc(&["inverse", "--config", bad.to_str().unwrap().replace("bad", "missing").as_str()]);
    assert!(!out.status.success());

    fs::write(&bad, "[target]\nname = \"heat\"\n").unwrap();
    let out = qhmc(&["inverse", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diffusion, gravity"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = qhmc(&[
        "force-table",
        "--config",
        golden("force_table.toml").to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inverse_runs_write_expected_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("g.toml");
    fs::write(
        &cfg_path,
        "[target]\nname = \"gravity\"\n[sampler]\nq = 0.9999\ndt = 0.00025\nsteps = 100\nn_samples = 60\nburn_in = 10\nseed = 3\n",
    )
    .unwrap();
    let out = dir.path().join("g");
    run_ok(&["inverse", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    for f in ["samples.csv", "potential_trace.csv", "summary.csv", "histogram.csv", "data.csv", "metadata.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    fs::write(
        &cfg_path,
        "[target]\nname = \"diffusion\"\n[sampler]\nq = 0.9999\ndt = 0.15\nsteps = 5\nn_samples = 30\nburn_in = 10\nseed = 3\ntrack_jacobian = false\n[diffusion]\ngrid_n = 40\nn_obs = 20\n",
    )
    .unwrap();
    let out = dir.path().join("d");
    run_ok(&["inverse", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    for f in ["reconstruction.csv", "synthetic_data.json", "summary.csv", "metadata.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    // reload the written data instead of synthesising
    let reload = format!(
        "[target]\nname = \"diffusion\"\n[sampler]\nq = 0.9999\ndt = 0.15\nsteps = 5\nn_samples = 30\nburn_in = 10\nseed = 4\ntrack_jacobian = false\n[diffusion]\ndata_file = {:?}\n",
        out.join("synthetic_data.json").to_str().unwrap()
    );
    fs::write(&cfg_path, reload).unwrap();
    let out2 = dir.path().join("d2");
    run_ok(&["inverse", "--config", cfg_path.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert_eq!(fs::read(out.join("synthetic_data.json")).unwrap(), fs::read(out2.join("synthetic_data.json")).unwrap());
}
