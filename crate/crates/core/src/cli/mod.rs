//! `vibro run`: read a JSON problem, run one route, write spectra and a report.
//!
//! Output files in `--out`:
//!
//! * `spectrum.csv`: `bin,energy,value`
//! * `fourier.csv` (with `--emit-fourier`): `k,re,im,stderr,analytic_bound`
//! * `report.json`: spectrum, route diagnostics, optional oracle comparison
//! * `plot.dat`, and `plot_overlay.dat` when the oracle also ran
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure or size guard.
//! Errors are written to stderr as one JSON object.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::estimators::{fourier_series_fock, fourier_series_fock_squeezed, EstimateWithBound, Sampling};
use crate::oracle::{enumerate_spectrum_fock, enumerate_spectrum_gaussian, enumerate_spectrum_gaussian_auto,
    enumerate_spectrum_thermal, EnumerationConfig};
use crate::sparse::{peaks_fock_pipeline, PipelineEstimator, SparseRecoveryConfig};
use crate::spectra::{finite_temperature_lift, forward_dft, fourier_series_gaussian, inverse_dft, parseval_bound,
    FourierSeries, SpectralGrid, Spectrum, ThermalWindow, WeightVector};
use crate::gaussian::GaussianCircuit;

pub mod spec;

pub use spec::{CircuitSpec, EstimatorSpec, Mode, PeaksSpec, ProblemSpec, SpecError, TemperatureSpec};

pub const SEED_ENV: &str = "VIBRO_SEED";

/// Mass deficit targeted when the oracle picks its own cutoff.
const AUTO_DEFICIT: f64 = 1e-8;

#[derive(Debug, clap::Parser)]
#[command(name = "vibro", version, about = "Vibronic spectra from Fourier components")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Subcommand)]
pub enum Command {
    /// Compute the spectrum described by a JSON problem file.
    Run(RunArgs),
}

#[derive(Clone, Debug, clap::Args)]
pub struct RunArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Override the mode given in the problem file.
    #[arg(long, value_enum)]
    pub route: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub emit_fourier: bool,
    /// Also enumerate the spectrum by brute force and report the difference.
    #[arg(long)]
    pub compare_oracle: bool,
    /// Width of one bin on the plot axis (e.g. cm⁻¹ per bin).
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    /// Record wall-clock runtime in the report (makes it nondeterministic).
    #[arg(long)]
    pub timing: bool,
}

/// Failure of a run, mapped to an exit code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl CliError {
    fn validation(message: impl Into<String>, field: Option<String>) -> Self {
        CliError { kind: "validation", exit_code: 2, message: message.into(), field }
    }

    fn io(path: &Path, err: std::io::Error, exit_code: i32) -> Self {
        CliError { kind: "io", exit_code, message: format!("{}: {err}", path.display()), field: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match e {
            Error::Domain(_) | Error::Dimension { .. } => ("validation", 2),
            Error::Numeric(_) | Error::Inconsistent { .. } => ("numeric", 3),
            Error::SizeGuard { .. } | Error::Cutoff { .. } | Error::RecoveryIncomplete { .. } => ("guard", 3),
        };
        CliError { kind, exit_code, message: e.to_string(), field: None }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::validation(e.message, e.field)
    }
}

/// Per-component error budget of an estimator route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentError {
    pub k: u64,
    pub stderr: f64,
    pub analytic_bound: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_per_component: Option<usize>,
    /// Per-bin spectrum error implied by the worst per-component bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentError>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_deficit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photon_cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_calls: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peaks: Option<Vec<(u64, f64)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub route: String,
    pub spectrum: Vec<f64>,
    pub max_abs_diff: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_deficit: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub mode: Mode,
    pub seed: u64,
    pub grid: SpectralGrid,
    pub spectrum: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fourier: Option<Vec<[f64; 2]>>,
    pub diagnostics: RouteDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

/// Result of one route before it is written out.
pub struct RouteOutput {
    pub spectrum: Spectrum,
    pub fourier: Option<FourierSeries>,
    pub estimates: Option<Vec<EstimateWithBound>>,
    pub diagnostics: RouteDiagnostics,
}

/// Seed precedence: flag, then problem file, then `VIBRO_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, spec: &ProblemSpec, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(spec.seed) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::validation(format!("{SEED_ENV}={v:?} is not an unsigned integer"), Some(SEED_ENV.into()))),
        None => Ok(0),
    }
}

/// Run `mode` on a parsed problem.
pub fn execute_route(spec: &ProblemSpec, mode: Mode, seed: u64) -> Result<RouteOutput, CliError> {
    let circuit = spec.circuit()?;
    let w = spec.weight_vector()?;
    let grid = spec.grid();
    let n = spec.fock_input();
    match mode {
        Mode::GaussianExact => {
            if n.total() != 0 {
                return Err(CliError::validation(
                    "gaussian-exact needs vacuum input; use fock-squeezed-estimate for Fock inputs",
                    Some("input_fock".into()),
                ));
            }
            let f = fourier_series_gaussian(&circuit, &w, &grid)?;
            Ok(RouteOutput { spectrum: inverse_dft(&f)?, fourier: Some(f), estimates: None, diagnostics: Default::default() })
        }
        Mode::FockEstimate | Mode::FockSqueezedEstimate => {
            let sampling = spec.sampling(seed)?;
            let (f, est) = if mode == Mode::FockEstimate {
                require_passive(&circuit, mode)?;
                fourier_series_fock(circuit.unitary(), &w, &grid, &n, sampling)?
            } else {
                fourier_series_fock_squeezed(&circuit, &w, &grid, &n, sampling)?
            };
            let spectrum = inverse_dft(&f)?;
            let diagnostics = estimator_diagnostics(&est, sampling);
            Ok(RouteOutput { spectrum, fourier: Some(f), estimates: Some(est), diagnostics })
        }
        Mode::Oracle => oracle_route(spec, &circuit, &w, &grid),
        Mode::Peaks => {
            require_passive(&circuit, mode)?;
            let p = spec
                .peaks
                .as_ref()
                .ok_or_else(|| CliError::validation("peaks mode needs a \"peaks\" block", Some("peaks".into())))?;
            let padded = grid.d().next_power_of_two();
            let mut cfg = SparseRecoveryConfig::for_sparsity(padded, p.t, seed, p.tolerance);
            cfg.buckets = p.buckets.unwrap_or(cfg.buckets);
            cfg.n_rounds = p.rounds.unwrap_or(cfg.n_rounds);
            let estimator = match (p.confidence, spec.sampling(seed)?) {
                (Some(confidence), _) => PipelineEstimator::Budgeted { confidence },
                (None, Sampling::Exhaustive) => PipelineEstimator::Exhaustive,
                (None, Sampling::MonteCarlo { n_samples, .. }) => PipelineEstimator::Fixed { n_samples },
            };
            let peaks = peaks_fock_pipeline(circuit.unitary(), &w, &grid, &n, &cfg, estimator)?;
            let mut spectrum = Spectrum::zeros(grid);
            for &(bin, v) in &peaks.entries {
                if let Some(slot) = spectrum.values.get_mut(bin as usize) {
                    *slot = v;
                }
            }
            let diagnostics = RouteDiagnostics {
                error_bound: Some(p.tolerance),
                oracle_calls: Some(peaks.oracle_calls),
                peaks: Some(peaks.entries),
                ..Default::default()
            };
            Ok(RouteOutput { spectrum, fourier: None, estimates: None, diagnostics })
        }
        Mode::FiniteTemperature => {
            let (t, wi, window) = thermal_setup(spec, &w)?;
            let lift = finite_temperature_lift(&circuit, &t.two_mode_squeezing, &wi, &w, window)?;
            let f = fourier_series_gaussian(&lift.circuit, &lift.weights, &lift.grid)?;
            Ok(RouteOutput { spectrum: inverse_dft(&f)?, fourier: Some(f), estimates: None, diagnostics: Default::default() })
        }
    }
}

fn require_passive(circuit: &GaussianCircuit, mode: Mode) -> Result<(), CliError> {
    if circuit.is_passive() {
        Ok(())
    } else {
        Err(CliError::validation(
            format!("{} needs a passive circuit (r0 = 0, alpha = 0)", mode.name()),
            Some("circuit".into()),
        ))
    }
}

fn thermal_setup(spec: &ProblemSpec, w: &WeightVector) -> Result<(TemperatureSpec, WeightVector, ThermalWindow), CliError> {
    let t = spec.temperature.clone().ok_or_else(|| {
        CliError::validation("finite-temperature mode needs a \"temperature\" block", Some("temperature".into()))
    })?;
    let wi = match &t.initial_weights {
        Some(v) => WeightVector::new(v.clone())?,
        None => w.clone(),
    };
    let window = ThermalWindow { thermal_cutoff: t.thermal_cutoff, omega_max_final: spec.omega_max };
    Ok((t, wi, window))
}

fn estimator_diagnostics(est: &[EstimateWithBound], sampling: Sampling) -> RouteDiagnostics {
    let worst_bound = est
        .iter()
        .map(|e| e.analytic_bound)
        .try_fold(0.0f64, |m, b| b.map(|b| m.max(b)));
    let worst_stderr = est.iter().fold(0.0f64, |m, e| m.max(e.stderr));
    let components = est
        .iter()
        .enumerate()
        .map(|(k, e)| ComponentError { k: k as u64, stderr: e.stderr, analytic_bound: e.analytic_bound })
        .collect();
    RouteDiagnostics {
        samples_per_component: match sampling {
            Sampling::Exhaustive => None,
            Sampling::MonteCarlo { n_samples, .. } => Some(n_samples),
        },
        error_bound: worst_bound.map(|b| parseval_bound(b, &SpectralGrid::new(0))),
        stderr_bound: Some(parseval_bound(worst_stderr, &SpectralGrid::new(0))),
        components: Some(components),
        ..Default::default()
    }
}

fn oracle_route(spec: &ProblemSpec, circuit: &GaussianCircuit, w: &WeightVector, grid: &SpectralGrid) -> Result<RouteOutput, CliError> {
    let n = spec.fock_input();
    // An explicit cutoff reports whatever mass it leaves out.
    let fixed_cfg = |cutoff| EnumerationConfig::new(cutoff, 1.0 - f64::EPSILON);
    if spec.temperature.is_some() {
        let (t, wi, window) = thermal_setup(spec, w)?;
        let lift_grid = SpectralGrid::with_offset(
            window.omega_max_final + window.thermal_cutoff * wi.max(),
            window.thermal_cutoff * wi.max(),
        );
        let cfg = fixed_cfg(spec.cutoff.unwrap_or(16))?;
        let e = enumerate_spectrum_thermal(circuit, &t.two_mode_squeezing, &wi, w, &lift_grid, t.thermal_cutoff as usize, cfg)?;
        return Ok(enumeration_output(e.spectrum, e.mass_deficit, e.photon_cutoff));
    }
    if circuit.is_passive() {
        let s = enumerate_spectrum_fock(circuit.unitary(), &n, w, grid)?;
        let deficit = 1.0 - s.total();
        return Ok(enumeration_output(s, deficit, n.total()));
    }
    let e = match spec.cutoff {
        Some(cutoff) => enumerate_spectrum_gaussian(circuit, &n, w, grid, fixed_cfg(cutoff)?)?,
        None => enumerate_spectrum_gaussian_auto(circuit, &n, w, grid, AUTO_DEFICIT)?,
    };
    Ok(enumeration_output(e.spectrum, e.mass_deficit, e.photon_cutoff))
}

fn enumeration_output(spectrum: Spectrum, deficit: f64, cutoff: usize) -> RouteOutput {
    RouteOutput {
        spectrum,
        fourier: None,
        estimates: None,
        diagnostics: RouteDiagnostics { mass_deficit: Some(deficit), photon_cutoff: Some(cutoff), ..Default::default() },
    }
}

/// Run a parsed problem and assemble the report.
pub fn build_report(spec: &ProblemSpec, args: &RunArgs, seed: u64) -> Result<(SpectrumReport, RouteOutput), CliError> {
    let start = Instant::now();
    let mode = args.route.unwrap_or(spec.mode);
    let out = execute_route(spec, mode, seed)?;
    let comparison = if args.compare_oracle && mode != Mode::Oracle {
        let o = execute_route(spec, Mode::Oracle, seed)?;
        Some(Comparison {
            route: Mode::Oracle.name().into(),
            max_abs_diff: out.spectrum.max_abs_diff(&o.spectrum),
            spectrum: o.spectrum.values,
            mass_deficit: o.diagnostics.mass_deficit,
        })
    } else {
        None
    };
    let fourier = args.emit_fourier.then(|| fourier_of(&out).values.iter().map(|z| [z.re, z.im]).collect());
    let report = SpectrumReport {
        mode,
        seed,
        grid: out.spectrum.grid,
        spectrum: out.spectrum.values.clone(),
        fourier,
        diagnostics: out.diagnostics.clone(),
        comparison,
        runtime_seconds: args.timing.then(|| start.elapsed().as_secs_f64()),
    };
    Ok((report, out))
}

fn fourier_of(out: &RouteOutput) -> FourierSeries {
    out.fourier.clone().unwrap_or_else(|| forward_dft(&out.spectrum))
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Signed energy of each bin on the report's grid.
fn energy(grid: &SpectralGrid, bin: usize) -> i64 {
    bin as i64 - grid.offset as i64
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from("bin,energy,value\n");
    for (b, v) in s.values.iter().enumerate() {
        let _ = writeln!(out, "{b},{},{}", energy(&s.grid, b), fmt_value(*v));
    }
    out
}

pub fn fourier_csv(out: &RouteOutput) -> String {
    let f = fourier_of(out);
    let d = f.values.len();
    let mut text = String::from("k,re,im,stderr,analytic_bound\n");
    for (k, z) in f.values.iter().enumerate() {
        let (stderr, bound) = match &out.estimates {
            Some(est) => {
                let e = &est[if k < est.len() { k } else { d - k }];
                (e.stderr, e.analytic_bound.map(fmt_value).unwrap_or_default())
            }
            None => (0.0, fmt_value(0.0)),
        };
        let _ = writeln!(text, "{k},{},{},{},{bound}", fmt_value(z.re), fmt_value(z.im), fmt_value(stderr));
    }
    text
}

/// Gnuplot data: `(energy·resolution, G)`; with an oracle comparison, a second
/// file holding both spectra as two blocks on the same axis.
pub fn emit_plot_data(report: &SpectrumReport, resolution: f64) -> (String, Option<String>) {
    let block = |values: &[f64], title: &str| {
        let mut s = format!("# {title}\n# omega G\n");
        for (b, v) in values.iter().enumerate() {
            let _ = writeln!(s, "{} {}", energy(&report.grid, b) as f64 * resolution, fmt_value(*v));
        }
        s
    };
    let main = block(&report.spectrum, report.mode.name());
    let overlay = report
        .comparison
        .as_ref()
        .map(|c| format!("{main}\n\n{}", block(&c.spectrum, &c.route)));
    (main, overlay)
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e, 3))
}

/// Full `vibro run`; returns the process exit code.
pub fn run(args: &RunArgs) -> i32 {
    match try_run(args, std::env::var(SEED_ENV).ok().as_deref()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code
        }
    }
}

pub fn try_run(args: &RunArgs, env_seed: Option<&str>) -> Result<(), CliError> {
    if !(args.resolution > 0.0 && args.resolution.is_finite()) {
        return Err(CliError::validation("resolution must be positive", Some("--resolution".into())));
    }
    let text = std::fs::read_to_string(&args.spec).map_err(|e| CliError::io(&args.spec, e, 2))?;
    let spec = ProblemSpec::from_json(&text)?;
    let seed = resolve_seed(args.seed, &spec, env_seed)?;
    let (report, out) = build_report(&spec, args, seed)?;

    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e, 3))?;
    write(args.out.join("spectrum.csv"), &spectrum_csv(&out.spectrum))?;
    if args.emit_fourier {
        write(args.out.join("fourier.csv"), &fourier_csv(&out))?;
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError {
        kind: "numeric",
        exit_code: 3,
        message: e.to_string(),
        field: None,
    })?;
    write(args.out.join("report.json"), &(json + "\n"))?;
    let (plot, overlay) = emit_plot_data(&report, args.resolution);
    write(args.out.join("plot.dat"), &plot)?;
    if let Some(o) = overlay {
        write(args.out.join("plot_overlay.dat"), &o)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ProblemSpec {
        ProblemSpec::from_json(
            r#"{"mode": "gaussian-exact", "circuit": {"raw": {"unitary": [[1, 0]], "r0": [0.5]}},
                "weights": [1], "omega_max": 15}"#,
        )
        .unwrap()
    }

    #[test]
    fn seed_precedence() {
        let mut s = spec();
        assert_eq!(resolve_seed(None, &s, None).unwrap(), 0);
        assert_eq!(resolve_seed(None, &s, Some("9")).unwrap(), 9);
        s.seed = Some(4);
        assert_eq!(resolve_seed(None, &s, Some("9")).unwrap(), 4);
        assert_eq!(resolve_seed(Some(1), &s, Some("9")).unwrap(), 1);
        assert!(resolve_seed(None, &spec(), Some("x")).is_err());
    }

    #[test]
    fn plot_blocks_share_axis() {
        let grid = SpectralGrid::with_offset(3, 1);
        let report = SpectrumReport {
            mode: Mode::GaussianExact,
            seed: 0,
            grid,
            spectrum: vec![0.1, 0.2, 0.3, 0.4],
            fourier: None,
            diagnostics: Default::default(),
            comparison: Some(Comparison { route: "oracle".into(), spectrum: vec![0.4; 4], max_abs_diff: 0.3, mass_deficit: None }),
            runtime_seconds: None,
        };
        let (main, overlay) = emit_plot_data(&report, 200.0);
        assert!(main.lines().nth(2).unwrap().starts_with("-200 "));
        let overlay = overlay.unwrap();
        let blocks: Vec<&str> = overlay.split("\n\n\n").collect();
        assert_eq!(blocks.len(), 2);
        let axis = |b: &str| b.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(' ').next().unwrap().to_string()).collect::<Vec<_>>();
        assert_eq!(axis(blocks[0]), axis(blocks[1]));
    }

    #[test]
    fn error_kinds_map_to_exit_codes() {
        assert_eq!(CliError::from(Error::domain("x")).exit_code, 2);
        assert_eq!(CliError::from(Error::numeric("x")).exit_code, 3);
        assert_eq!(CliError::from(Error::SizeGuard { what: "x", limit: 1, got: 2 }).exit_code, 3);
    }
}
