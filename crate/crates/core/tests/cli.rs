//! End-to-end runs of the `vibro` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use vibro::cli::spectrum_csv;
use vibro::gaussian::{GaussianCircuit, UnitaryMatrix};
use vibro::spectra::{parseval_bound, spectrum_gaussian, SpectralGrid, WeightVector};
use vibro::C64;

const SQUEEZER: &str = r#"{
    "mode": "gaussian-exact",
    "circuit": {"raw": {"unitary": [[1, 0]], "r0": [0.5]}},
    "weights": [1],
    "omega_max": 31
}"#;

const TWO_MODE: &str = r#"{
    "mode": "gaussian-exact",
    "circuit": {"raw": {
        "unitary": [[0.6, 0.0], [0.0, 0.8], [0.0, 0.8], [0.6, 0.0]],
        "r0": [0.3, 0.5],
        "alpha": [[0.2, 0.1], [0.0, -0.3]]
    }},
    "weights": [1, 2],
    "omega_max": 40
}"#;

const FOCK: &str = r#"{
    "mode": "fock-estimate",
    "circuit": {"raw": {
        "unitary": [[0.6, 0.0], [0.0, 0.8], [0.0, 0.8], [0.6, 0.0]],
        "r0": [0.0, 0.0]
    }},
    "weights": [1, 3],
    "omega_max": 12,
    "input_fock": [2, 1],
    "estimator": {"epsilon": 0.1, "confidence": 0.95}
}"#;

fn vibro(args: &[&str], env_seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vibro"));
    cmd.args(args).env_remove("VIBRO_SEED");
    if let Some(s) = env_seed {
        cmd.env("VIBRO_SEED", s);
    }
    cmd.output().unwrap()
}

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("problem.json");
    std::fs::write(&p, text).unwrap();
    p
}

fn run_ok(spec: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec!["run", spec.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = vibro(&args, None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn squeezer_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SQUEEZER);
    run_ok(&spec, &dir.path().join("out"), &[]);
    let circ = GaussianCircuit::new(UnitaryMatrix::identity(1), vec![0.5], vec![C64::new(0.0, 0.0)]).unwrap();
    let lib = spectrum_gaussian(&circ, &WeightVector::new(vec![1]).unwrap(), &SpectralGrid::new(31)).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(csv, spectrum_csv(&lib));
    // Odd photon numbers never occur for squeezed vacuum.
    assert!(lib.values[1].abs() < 1e-12 && lib.values[2] > 0.0);
}

#[test]
fn negative_weight_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), &SQUEEZER.replace("\"weights\": [1]", "\"weights\": [-1]"));
    let o = vibro(&["run", spec.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["field"], "weights[0]");
    assert_eq!(err["error"]["kind"], "validation");
    assert!(!dir.path().join("o").exists());
}

#[test]
fn missing_spec_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = vibro(&["run", dir.path().join("nope.json").to_str().unwrap(), "--out", "x"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn guard_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // Twelve photons exceed the Fock oracle's photon guard.
    let text = FOCK.replace("[2, 1]", "[6, 6]").replace("\"omega_max\": 12", "\"omega_max\": 40");
    let spec = write_spec(dir.path(), &text);
    let o = vibro(&["run", spec.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap(), "--route", "oracle"], None);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "guard");
}

#[test]
fn oracle_comparison_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), TWO_MODE);
    let out = dir.path().join("out");
    run_ok(&spec, &out, &["--compare-oracle"]);
    let r = report(&out);
    assert!(r["comparison"]["max_abs_diff"].as_f64().unwrap() <= 1e-6);
    assert!(r["comparison"]["mass_deficit"].as_f64().unwrap() <= 1e-8);
    let overlay = std::fs::read_to_string(out.join("plot_overlay.dat")).unwrap();
    assert_eq!(overlay.split("\n\n\n").count(), 2);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), FOCK);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_ok(&spec, &a, &["--seed", "7", "--emit-fourier"]);
    run_ok(&spec, &b, &["--seed", "7", "--emit-fourier"]);
    for f in ["spectrum.csv", "fourier.csv", "report.json", "plot.dat"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    run_ok(&spec, &c, &["--seed", "8", "--emit-fourier"]);
    assert_ne!(std::fs::read(a.join("spectrum.csv")).unwrap(), std::fs::read(c.join("spectrum.csv")).unwrap());
}

#[test]
fn env_seed_used_when_no_flag() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), FOCK);
    let out = dir.path().join("o");
    let o = vibro(&["run", spec.to_str().unwrap(), "--out", out.to_str().unwrap()], Some("41"));
    assert!(o.status.success());
    assert_eq!(report(&out)["seed"], 41);
    let bad = vibro(&["run", spec.to_str().unwrap(), "--out", out.to_str().unwrap()], Some("minus one"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn estimator_report_carries_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), FOCK);
    let out = dir.path().join("o");
    run_ok(&spec, &out, &["--emit-fourier", "--compare-oracle"]);
    let r = report(&out);
    let comps = r["diagnostics"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 7);
    let worst = comps.iter().map(|c| c["analytic_bound"].as_f64().unwrap()).fold(0.0, f64::max);
    assert!(comps.iter().all(|c| c["stderr"].as_f64().is_some()));
    let bound = r["diagnostics"]["error_bound"].as_f64().unwrap();
    assert_eq!(bound, parseval_bound(worst, &SpectralGrid::new(12)));
    assert!(r["comparison"]["max_abs_diff"].as_f64().unwrap() <= bound);
    let fourier = std::fs::read_to_string(out.join("fourier.csv")).unwrap();
    assert_eq!(fourier.lines().count(), 14);
}

#[test]
fn resolution_scales_energy_axis() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), SQUEEZER);
    let out = dir.path().join("o");
    run_ok(&spec, &out, &["--resolution", "200"]);
    let plot = std::fs::read_to_string(out.join("plot.dat")).unwrap();
    let xs: Vec<f64> = plot
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(xs.len(), 32);
    assert_eq!(xs[0], 0.0);
    assert_eq!(xs[3], 600.0);
    assert_eq!(xs[31], 6200.0);
    let bad = vibro(&["run", spec.to_str().unwrap(), "--out", out.to_str().unwrap(), "--resolution", "0"], None);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn finite_temperature_and_peaks_routes() {
    let dir = tempfile::tempdir().unwrap();
    let thermal = r#"{
        "mode": "finite-temperature",
        "circuit": {"raw": {"unitary": [[1, 0]], "r0": [0.4]}},
        "weights": [2],
        "omega_max": 40,
        "temperature": {"two_mode_squeezing": [0.3], "initial_weights": [1], "thermal_cutoff": 20}
    }"#;
    let spec = write_spec(dir.path(), thermal);
    let out = dir.path().join("t");
    run_ok(&spec, &out, &["--compare-oracle"]);
    let r = report(&out);
    assert!(r["comparison"]["max_abs_diff"].as_f64().unwrap() <= 1e-6);
    assert_eq!(r["grid"]["offset"], 20);

    let peaks = FOCK
        .replace("fock-estimate", "peaks")
        .replace(",\n    \"estimator\": {\"epsilon\": 0.1, \"confidence\": 0.95}", ",\n    \"peaks\": {\"t\": 4, \"tolerance\": 1e-3}");
    let spec = write_spec(dir.path(), &peaks);
    let out = dir.path().join("p");
    run_ok(&spec, &out, &["--compare-oracle"]);
    let r = report(&out);
    assert!(r["diagnostics"]["peaks"].as_array().unwrap().len() <= 4);
    let truth = r["comparison"]["spectrum"].as_array().unwrap();
    for p in r["diagnostics"]["peaks"].as_array().unwrap() {
        let (bin, v) = (p[0].as_u64().unwrap() as usize, p[1].as_f64().unwrap());
        assert!((truth[bin].as_f64().unwrap() - v).abs() < 1e-6);
    }
}
