//! Recovery of the few dominant bins of a spectrum from Fourier evaluations.
//!
//! Each round permutes the spectrum with a random odd multiplier `σ`,
//! filters it into `B` buckets with a flat-top window, and locates the single
//! dominant bin in each bucket from the phases of shifted evaluations:
//! shifting the Fourier index by `D/2^{j+1}` multiplies a bucket holding bin
//! `Ω` by `e^{−iπΩ/2^j}`, which reveals bit `j` of `Ω` as a phase flip of π.
//! Found peaks are subtracted analytically before later rounds, which also
//! refine their values.
//!
//! This is a plain permute–filter–locate–subtract scheme. It has none of the
//! near-optimal runtime guarantees of the published sparse FFT algorithms;
//! the oracle-call count is `rounds · (1 + log₂ D) · w` with window length
//! `w ≈ 27 B`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{fourier_fock, plan_samples, FockVector, Sampling};
use crate::gaussian::UnitaryMatrix;
use crate::linalg::{c, C64};
use crate::spectra::{SpectralGrid, WeightVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseRecoveryConfig {
    /// Grid size; must be a power of two.
    pub d: u64,
    /// Number of peaks reported.
    pub t: usize,
    /// Buckets per round; a power of two with `B ≥ 4t`.
    pub buckets: usize,
    pub n_rounds: usize,
    pub seed: u64,
    /// Peaks below this value are dropped; also the consistency tolerance
    /// used to detect bucket collisions.
    pub estimation_tol: f64,
}

impl SparseRecoveryConfig {
    /// Defaults for sparsity `t`: `B = max(16, 8t)` rounded up to a power of
    /// two, capped at `d`.
    pub fn for_sparsity(d: u64, t: usize, seed: u64, estimation_tol: f64) -> Self {
        let buckets = (8 * t).max(16).next_power_of_two() as u64;
        SparseRecoveryConfig {
            d,
            t,
            buckets: buckets.min(d.max(1)) as usize,
            n_rounds: 4,
            seed,
            estimation_tol,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.d.is_power_of_two() {
            return Err(Error::domain(format!("grid size {} must be a power of two (pad the grid)", self.d)));
        }
        if !self.buckets.is_power_of_two() || self.buckets < 4 * self.t.max(1) {
            return Err(Error::domain(format!("buckets {} must be a power of two ≥ 4t", self.buckets)));
        }
        if (self.buckets as u64) > self.d {
            return Err(Error::domain("more buckets than grid bins"));
        }
        if self.n_rounds == 0 {
            return Err(Error::domain("at least one round is required"));
        }
        if !(self.estimation_tol > 0.0) {
            return Err(Error::domain("estimation tolerance must be positive"));
        }
        Ok(())
    }

    /// Window length `w` for this bucket count.
    pub fn window_len(&self) -> usize {
        Window::new(self.buckets, self.d).taps.len()
    }

    /// Oracle calls spent by a run that uses every round.
    pub fn max_oracle_calls(&self) -> usize {
        self.n_rounds * (1 + self.d.trailing_zeros() as usize) * self.window_len()
    }
}

/// Recovered bins, sorted by descending value (ties: lower bin first).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakList {
    pub entries: Vec<(u64, f64)>,
    pub oracle_calls: usize,
}

/// Sinc pulse under a Gaussian taper: in the spectral domain a box of one
/// bucket width blurred by a Gaussian of a twelfth of that width.
struct Window {
    d: u64,
    half: i64,
    taps: Vec<f64>,
}

impl Window {
    fn new(buckets: usize, d: u64) -> Self {
        let b = buckets as f64;
        let s_t = 6.0 * b / PI;
        let half = (7.0 * s_t).ceil() as i64;
        let raw: Vec<f64> = (-half..=half)
            .map(|i| {
                let x = PI * i as f64 / b;
                let sinc = if i == 0 { 1.0 } else { x.sin() / x };
                sinc * (-(i as f64).powi(2) / (2.0 * s_t * s_t)).exp() / b
            })
            .collect();
        let mut w = Window { d, half, taps: raw };
        let g0 = w.response(0.0);
        for t in &mut w.taps {
            *t /= g0;
        }
        w
    }

    /// `ĝ(x) = Σ_i g_i cos(2π i x / D)` for a spectral offset `x`.
    fn response(&self, x: f64) -> f64 {
        let step = 2.0 * PI * x / self.d as f64;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, g)| g * (step * (n as i64 - self.half) as f64).cos())
            .sum()
    }

    /// `‖g‖₂`, the noise gain from oracle values to bucket values.
    fn l2(&self) -> f64 {
        self.taps.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

struct Round {
    sigma: u64,
    tau: u64,
    /// Shifts: 0 then `D/2^{j+1}` for `j = 0..L`.
    shifts: Vec<u64>,
}

impl Round {
    /// Window gain of bin `Ω` in bucket `b`.
    fn gain(&self, win: &Window, buckets: usize, omega: u64, b: usize) -> f64 {
        let width = win.d / buckets as u64;
        win.response(centered(b as u64 * width, mul_mod(self.sigma, omega, win.d), win.d))
    }

    /// Phase of bin `Ω` at every shift.
    fn phases(&self, omega: u64, d: u64) -> Vec<C64> {
        self.shifts.iter().map(|&s| phase((self.tau + s) % d, omega, d)).collect()
    }

    /// Bucket `b`'s response to a unit peak at `Ω`, for every shift.
    fn response(&self, win: &Window, buckets: usize, omega: u64, b: usize) -> Vec<C64> {
        let g = self.gain(win, buckets, omega, b);
        self.phases(omega, win.d).into_iter().map(|p| p * g).collect()
    }
}

fn mul_mod(a: u64, b: u64, d: u64) -> u64 {
    ((a as u128 * b as u128) % d as u128) as u64
}

/// `a − b` as a signed offset in `(−D/2, D/2]`.
fn centered(a: u64, b: u64, d: u64) -> f64 {
    let diff = (a + d - b) % d;
    if diff > d / 2 {
        diff as f64 - d as f64
    } else {
        diff as f64
    }
}

/// `e^{−2πi k Ω / D}`.
fn phase(k: u64, omega: u64, d: u64) -> C64 {
    C64::from_polar(1.0, -2.0 * PI * mul_mod(k, omega, d) as f64 / d as f64)
}

/// Bucket values `Z[j][b]` for every shift.
fn bucketize<F>(oracle: &F, round: &Round, win: &Window, buckets: usize) -> Result<Vec<Vec<C64>>>
where
    F: Fn(u64) -> Result<C64> + Sync,
{
    let d = win.d;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(buckets);
    round
        .shifts
        .iter()
        .map(|&shift| {
            let base = (round.tau + shift) % d;
            let vals: Result<Vec<C64>> = (-win.half..=win.half)
                .into_par_iter()
                .map(|i| {
                    let k = (base as i128 + round.sigma as i128 * i as i128).rem_euclid(d as i128) as u64;
                    oracle(k)
                })
                .collect();
            let mut folded = vec![c(0.0, 0.0); buckets];
            for (n, v) in vals?.into_iter().enumerate() {
                let i = n as i64 - win.half;
                folded[i.rem_euclid(buckets as i64) as usize] += v * win.taps[n];
            }
            fft.process(&mut folded);
            Ok(folded)
        })
        .collect()
}

struct Found {
    omega: u64,
    value: f64,
}

/// Reconstruct the largest bins of a spectrum from its Fourier components
/// `k ↦ G̃(k) = Σ_Ω G(Ω) e^{−2πikΩ/d}`.
pub fn recover_peaks<F>(fourier_oracle: F, cfg: &SparseRecoveryConfig) -> Result<PeakList>
where
    F: Fn(u64) -> Result<C64> + Sync,
{
    cfg.validate()?;
    let d = cfg.d;
    let buckets = cfg.buckets;
    let levels = d.trailing_zeros() as usize;
    let width = d / buckets as u64;
    let win = Window::new(buckets, d);
    let tol = cfg.estimation_tol;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut found: Vec<Found> = Vec::new();
    let mut calls = 0usize;
    let mut unresolved = 0usize;

    for round_idx in 0..cfg.n_rounds {
        let round = Round {
            sigma: rng.random_range(0..(d / 2).max(1)) * 2 + 1,
            tau: rng.random_range(0..d),
            shifts: std::iter::once(0).chain((0..levels).map(|j| d >> (j + 1))).collect(),
        };
        let z = bucketize(&fourier_oracle, &round, &win, buckets)?;
        calls += round.shifts.len() * win.taps.len();

        let residual = |found: &[Found]| -> Vec<Vec<C64>> {
            let mut r = z.clone();
            for p in found {
                let ph = round.phases(p.omega, d);
                for b in nearby_buckets(&round, p.omega, width, buckets, d) {
                    let g = round.gain(&win, buckets, p.omega, b) * p.value;
                    for (row, ph) in r.iter_mut().zip(&ph) {
                        row[b] -= ph * g;
                    }
                }
            }
            r
        };

        // Locate new peaks in buckets with significant residual.
        let r = residual(&found);
        let mut new_peaks = 0;
        for b in 0..buckets {
            let z0 = r[0][b];
            if z0.norm() < tol {
                continue;
            }
            let mut omega = 0u64;
            for j in 0..levels {
                let ratio = r[j + 1][b] * z0.conj();
                let expect0 = C64::from_polar(1.0, -2.0 * PI * omega as f64 / (1u64 << (j + 1)) as f64);
                if (ratio * expect0.conj()).re < 0.0 {
                    omega |= 1 << j;
                }
            }
            if round.gain(&win, buckets, omega, b).abs() < 0.25 {
                continue;
            }
            let fits = round.response(&win, buckets, omega, b);
            let value: C64 = (0..=levels).map(|j| r[j][b] / fits[j]).sum::<C64>() / (levels + 1) as f64;
            let misfit = (0..=levels).fold(0.0f64, |m, j| m.max((r[j][b] - fits[j] * value).norm()));
            if misfit > 0.5 * tol || value.im.abs() > 0.5 * tol {
                continue;
            }
            match found.iter_mut().find(|p| p.omega == omega) {
                Some(p) => p.value += value.re,
                None => {
                    found.push(Found { omega, value: value.re });
                    new_peaks += 1;
                }
            }
        }

        // Refine every known peak from a bucket where it sits alone.
        let r = residual(&found);
        let mut updates = Vec::new();
        for (idx, p) in found.iter().enumerate() {
            let pos = mul_mod(round.sigma, p.omega, d);
            let b = (((pos + width / 2) / width) % buckets as u64) as usize;
            if round.gain(&win, buckets, p.omega, b).abs() < 0.5 {
                continue;
            }
            let crowded = found.iter().enumerate().any(|(o, q)| {
                o != idx && round.gain(&win, buckets, q.omega, b).abs() > 1e-3
            });
            if crowded {
                continue;
            }
            let fits = round.response(&win, buckets, p.omega, b);
            let delta: C64 = (0..=levels).map(|j| r[j][b] / fits[j]).sum::<C64>() / (levels + 1) as f64;
            let misfit = (0..=levels).fold(0.0f64, |m, j| m.max((r[j][b] - fits[j] * delta).norm()));
            if misfit <= 0.5 * tol {
                updates.push((idx, delta.re));
            }
        }
        for (idx, delta) in updates {
            found[idx].value += delta;
        }
        found.retain(|p| p.value.abs() >= 0.5 * tol);

        let r = residual(&found);
        unresolved = (0..buckets)
            .filter(|&b| (0..=levels).any(|j| r[j][b].norm() >= tol))
            .count();
        if unresolved == 0 && new_peaks == 0 && round_idx >= 1 {
            break;
        }
    }

    let mut entries: Vec<(u64, f64)> = found
        .into_iter()
        .filter(|p| p.value >= tol)
        .map(|p| (p.omega, p.value))
        .collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.truncate(cfg.t);
    let list = PeakList { entries, oracle_calls: calls };
    if unresolved > buckets / 4 {
        return Err(Error::RecoveryIncomplete { recovered: list, unresolved });
    }
    Ok(list)
}

/// Buckets where bin `Ω` has non-negligible window gain.
fn nearby_buckets(round: &Round, omega: u64, width: u64, buckets: usize, d: u64) -> Vec<usize> {
    let pos = mul_mod(round.sigma, omega, d);
    let centre = ((pos + width / 2) / width) % buckets as u64;
    let mut out = vec![centre as usize];
    for off in [1, buckets as u64 - 1, 2, buckets as u64 - 2] {
        let b = ((centre + off) % buckets as u64) as usize;
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

/// How [`peaks_fock_pipeline`] estimates each Fourier component.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineEstimator {
    Exhaustive,
    /// Samples per component chosen so that every bucket value stays within
    /// half the estimation tolerance with probability `confidence`.
    Budgeted { confidence: f64 },
    Fixed { n_samples: usize },
}

/// Per-call sample count for a budgeted pipeline run.
///
/// A bucket value is a `g`-weighted sum of independent estimates, so its
/// error has sub-Gaussian scale `‖g‖₂/√N`; a union bound over every bucket
/// value of the run fixes `N`.
pub fn pipeline_samples(cfg: &SparseRecoveryConfig, confidence: f64) -> Result<usize> {
    let win = Window::new(cfg.buckets, cfg.d);
    let bucket_values = cfg.n_rounds * (1 + cfg.d.trailing_zeros() as usize) * cfg.buckets;
    let conf = 1.0 - (1.0 - confidence) / bucket_values as f64;
    plan_samples(0.5 * cfg.estimation_tol / win.l2(), conf)
}

/// Peaks of the spectrum of Fock input `n` through `u`, with Gurvits
/// estimates as the Fourier oracle.
///
/// The grid is padded to a power of two; `cfg.d` is replaced by the padded size.
pub fn peaks_fock_pipeline(
    u: &UnitaryMatrix,
    w: &WeightVector,
    grid: &SpectralGrid,
    n: &FockVector,
    cfg: &SparseRecoveryConfig,
    estimator: PipelineEstimator,
) -> Result<PeakList> {
    let padded = grid.d().next_power_of_two();
    let pgrid = SpectralGrid::with_offset(padded - 1, grid.offset);
    let cfg = SparseRecoveryConfig { d: padded, ..*cfg };
    let sampling = match estimator {
        PipelineEstimator::Exhaustive => Sampling::Exhaustive,
        PipelineEstimator::Budgeted { confidence } => Sampling::monte_carlo(pipeline_samples(&cfg, confidence)?, cfg.seed),
        PipelineEstimator::Fixed { n_samples } => Sampling::monte_carlo(n_samples, cfg.seed),
    };
    let oracle = |k: u64| fourier_fock(u, w, &pgrid, k, n, sampling.derive(k)).map(|e| e.value);
    recover_peaks(oracle, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(peaks: &[(u64, f64)], d: u64) -> impl Fn(u64) -> Result<C64> + Sync + '_ {
        move |k| Ok(peaks.iter().map(|&(o, v)| phase(k, o, d) * v).sum())
    }

    #[test]
    fn window_is_flat_and_selective() {
        let win = Window::new(16, 1 << 12);
        let width = (1 << 12) as f64 / 16.0;
        assert!((win.response(0.0) - 1.0).abs() < 1e-12);
        assert!((win.response(width / 8.0) - 1.0).abs() < 1e-4);
        assert!(win.response(0.9 * width).abs() < 1e-6);
    }

    #[test]
    fn single_peak() {
        let d = 1u64 << 20;
        let peaks = [(123_457u64, 1.0)];
        let cfg = SparseRecoveryConfig { d, t: 1, buckets: 4, n_rounds: 2, seed: 1, estimation_tol: 1e-3 };
        let got = recover_peaks(planted(&peaks, d), &cfg).unwrap();
        assert_eq!(got.entries.len(), 1);
        assert_eq!(got.entries[0].0, 123_457);
        assert!((got.entries[0].1 - 1.0).abs() < 1e-9);
        assert!(got.oracle_calls <= 10_000);
    }

    #[test]
    fn three_peaks_noiseless() {
        let d = 1u64 << 20;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let peaks: Vec<(u64, f64)> = [0.5, 0.3, 0.2].iter().map(|&v| (rng.random_range(0..d), v)).collect();
        let cfg = SparseRecoveryConfig::for_sparsity(d, 3, 7, 1e-3);
        let got = recover_peaks(planted(&peaks, d), &cfg).unwrap();
        assert_eq!(got.entries.len(), 3);
        for (o, v) in &peaks {
            let hit = got.entries.iter().find(|e| e.0 == *o).expect("peak missing");
            assert!((hit.1 - v).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        let cfg = SparseRecoveryConfig::for_sparsity(1000, 2, 0, 1e-3);
        assert!(recover_peaks(|_| Ok(c(1.0, 0.0)), &cfg).is_err());
    }
}
