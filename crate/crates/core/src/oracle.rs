//! Ground-truth spectra by enumerating Fock outcomes, and an emulated boson
//! sampler drawing from a known spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{build_sigma_system, FockVector, SigmaSystem};
use crate::gaussian::{BlochMessiahForm, GaussianCircuit, UnitaryMatrix};
use crate::hafnian::{factorial, permanent_exact, GaussianMoments};
use crate::linalg::{CMat, CVec};
use crate::spectra::{SpectralGrid, Spectrum, WeightVector};

pub const FOCK_MAX_PHOTONS: usize = 8;
pub const FOCK_MAX_MODES: usize = 8;
pub const MAX_OUTCOMES: usize = 1_000_000;

/// All `m` with `Σm = total` over `modes` modes, in colexicographic order.
pub fn fock_outcomes(modes: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == 0 {
            cur[0] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos - 1, left - v, cur, out);
        }
    }
    if modes == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(modes - 1, total, &mut vec![0; modes], &mut out);
    out
}

/// Spectrum of Fock input `n_in` through the passive circuit `u`:
/// `p(m) = |Per U_{m,n}|² / (m! n!)`, binned at `ω·m`.
pub fn enumerate_spectrum_fock(u: &UnitaryMatrix, n_in: &FockVector, w: &WeightVector, grid: &SpectralGrid) -> Result<Spectrum> {
    let m = u.dim();
    Error::check_len("input photons", m, n_in.len())?;
    Error::check_len("weight vector", m, w.len())?;
    if m > FOCK_MAX_MODES {
        return Err(Error::SizeGuard { what: "Fock enumeration modes", limit: FOCK_MAX_MODES, got: m });
    }
    let total = n_in.total();
    if total > FOCK_MAX_PHOTONS {
        return Err(Error::SizeGuard { what: "Fock enumeration photons", limit: FOCK_MAX_PHOTONS, got: total });
    }
    let outcomes = fock_outcomes(m, total);
    let cols: Vec<usize> = crate::hafnian::repeated_indices(&n_in.0);
    let um = u.matrix();
    let nfact = n_in.factorial();
    let probs: Result<Vec<f64>> = outcomes
        .par_iter()
        .map(|out| {
            let rows = crate::hafnian::repeated_indices(out);
            let sub = CMat::from_fn(total, total, |i, j| um[(rows[i], cols[j])]);
            let mfact: f64 = out.iter().map(|&k| factorial(k)).product();
            Ok(permanent_exact(&sub)?.norm_sqr() / (mfact * nfact))
        })
        .collect();
    let mut spec = Spectrum::zeros(*grid);
    for (out, p) in outcomes.iter().zip(probs?) {
        spec.values[grid.bin(w.energy(out))] += p;
    }
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConfig {
    /// Largest total output photon number enumerated.
    pub photon_cutoff: usize,
    /// Largest acceptable `1 − enumerated mass`.
    pub mass_deficit_tol: f64,
}

impl EnumerationConfig {
    pub fn new(photon_cutoff: usize, mass_deficit_tol: f64) -> Result<Self> {
        if !(mass_deficit_tol > 0.0 && mass_deficit_tol < 1.0) {
            return Err(Error::domain(format!("mass deficit tolerance must lie in (0, 1), got {mass_deficit_tol}")));
        }
        Ok(EnumerationConfig { photon_cutoff, mass_deficit_tol })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianEnumeration {
    pub spectrum: Spectrum,
    pub mass_deficit: f64,
    pub photon_cutoff: usize,
    pub outcomes: usize,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    (0..k).try_fold(1usize, |acc, i| acc.checked_mul(n - i).map(|x| x / (i + 1)))
}

/// Calls `visit(m, |⟨m|Ŵ|n_in⟩|²)` for every `m` with `|m| ≤ cutoff`.
fn visit_output_distribution(
    sys: &SigmaSystem,
    n_in: &[usize],
    cutoff: usize,
    mut visit: impl FnMut(&[usize], f64),
) -> Result<usize> {
    let m = sys.modes();
    let count = binomial(cutoff + m, m).filter(|&c| c <= MAX_OUTCOMES).ok_or(Error::SizeGuard {
        what: "enumerated outcomes",
        limit: MAX_OUTCOMES,
        got: binomial(cutoff + m, m).unwrap_or(usize::MAX),
    })?;
    // Only the variables with nonzero exponent range enter the table.
    let bounds: Vec<usize> = std::iter::repeat_n(cutoff, m).chain(n_in.iter().copied()).collect();
    let active: Vec<usize> = (0..2 * m).filter(|&i| bounds[i] > 0).collect();
    let s = CMat::from_fn(active.len(), active.len(), |i, j| sys.sigma[(active[i], active[j])]);
    let mu = CVec::from_iterator(active.len(), active.iter().map(|&i| sys.zeta[i]));
    let b: Vec<usize> = active.iter().map(|&i| bounds[i]).collect();
    let n_total: usize = n_in.iter().sum();
    let table = GaussianMoments::new(&s, &mu, &b, cutoff + n_total)?;
    let vac = sys.vacuum_amplitude();
    let nfact_sqrt = n_in.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
    let mut alpha = vec![0usize; active.len()];
    for total in 0..=cutoff {
        for out in fock_outcomes(m, total) {
            for (slot, &i) in alpha.iter_mut().zip(&active) {
                *slot = if i < m { out[i] } else { n_in[i - m] };
            }
            let mfact_sqrt = out.iter().map(|&k| factorial(k)).product::<f64>().sqrt();
            let amp = vac * table.coefficient(&alpha) * (mfact_sqrt * nfact_sqrt);
            visit(&out, amp.norm_sqr());
        }
    }
    Ok(count)
}

/// Spectrum of `Û D(α) S(r0)|n_in⟩` by enumerating outputs up to the cutoff.
///
/// Amplitudes are loop hafnians of the repeated `Σ` matrix, evaluated
/// exactly through Taylor coefficients of the Gaussian generating function.
pub fn enumerate_spectrum_gaussian(
    circuit: &GaussianCircuit,
    n_in: &FockVector,
    w: &WeightVector,
    grid: &SpectralGrid,
    cfg: EnumerationConfig,
) -> Result<GaussianEnumeration> {
    let m = circuit.modes();
    Error::check_len("input photons", m, n_in.len())?;
    Error::check_len("weight vector", m, w.len())?;
    let sys = build_sigma_system(&BlochMessiahForm::from_circuit(circuit));
    let mut spec = Spectrum::zeros(*grid);
    let mut mass = 0.0;
    let outcomes = visit_output_distribution(&sys, &n_in.0, cfg.photon_cutoff, |out, p| {
        spec.values[grid.bin(w.energy(out))] += p;
        mass += p;
    })?;
    let deficit = 1.0 - mass;
    if deficit > cfg.mass_deficit_tol {
        return Err(Error::Cutoff { cutoff: cfg.photon_cutoff, deficit, tol: cfg.mass_deficit_tol });
    }
    Ok(GaussianEnumeration { spectrum: spec, mass_deficit: deficit, photon_cutoff: cfg.photon_cutoff, outcomes })
}

/// [`enumerate_spectrum_gaussian`] with the cutoff raised until the mass
/// deficit falls below `tol`.
pub fn enumerate_spectrum_gaussian_auto(
    circuit: &GaussianCircuit,
    n_in: &FockVector,
    w: &WeightVector,
    grid: &SpectralGrid,
    tol: f64,
) -> Result<GaussianEnumeration> {
    let mut cutoff = 16 + 2 * n_in.total();
    loop {
        match enumerate_spectrum_gaussian(circuit, n_in, w, grid, EnumerationConfig::new(cutoff, tol)?) {
            Err(Error::Cutoff { .. }) => cutoff += cutoff / 2,
            other => return other,
        }
    }
}

/// Finite-temperature spectrum by direct enumeration: thermal occupations
/// `n ≤ thermal_cutoff` per mode with probability `Π tanh^{2n} s / cosh² s`,
/// each propagated as the Fock input `Û D(α) S(r0)|n⟩` and binned at
/// `ω_final·m − ω_initial·n` on the offset grid.
pub fn enumerate_spectrum_thermal(
    circuit: &GaussianCircuit,
    tm_squeezing: &[f64],
    w_initial: &WeightVector,
    w_final: &WeightVector,
    grid: &SpectralGrid,
    thermal_cutoff: usize,
    cfg: EnumerationConfig,
) -> Result<GaussianEnumeration> {
    let m = circuit.modes();
    Error::check_len("two-mode squeezing", m, tm_squeezing.len())?;
    Error::check_len("initial weights", m, w_initial.len())?;
    Error::check_len("final weights", m, w_final.len())?;
    let sys = build_sigma_system(&BlochMessiahForm::from_circuit(circuit));
    let d = grid.d() as i128;
    let mut spec = Spectrum::zeros(*grid);
    let mut mass = 0.0;
    let mut outcomes = 0;
    let mut n_in = vec![0usize; m];
    loop {
        let p_thermal: f64 = (0..m)
            .map(|i| {
                let s = tm_squeezing[i];
                s.tanh().powi(2 * n_in[i] as i32) / s.cosh().powi(2)
            })
            .product();
        if p_thermal > 0.0 {
            let e_init = w_initial.energy(&n_in) as i128;
            outcomes += visit_output_distribution(&sys, &n_in, cfg.photon_cutoff, |out, p| {
                let e = w_final.energy(out) as i128 - e_init + grid.offset as i128;
                spec.values[e.rem_euclid(d) as usize] += p_thermal * p;
                mass += p_thermal * p;
            })?;
        }
        // Odometer over thermal occupations.
        let mut i = 0;
        while i < m && n_in[i] == thermal_cutoff {
            n_in[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
        n_in[i] += 1;
    }
    let deficit = 1.0 - mass;
    if deficit > cfg.mass_deficit_tol {
        return Err(Error::Cutoff { cutoff: cfg.photon_cutoff, deficit, tol: cfg.mass_deficit_tol });
    }
    Ok(GaussianEnumeration { spectrum: spec, mass_deficit: deficit, photon_cutoff: cfg.photon_cutoff, outcomes })
}

/// Bins drawn by the emulated sampler.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub bins: Vec<usize>,
    pub seed: u64,
    /// `1 − Σ G` of the source spectrum before renormalization.
    pub mass_deficit: f64,
}

/// Draw `n_samples` bins i.i.d. from `spectrum` and return the histogram.
pub fn emulate_sampler(spectrum: &Spectrum, n_samples: usize, seed: u64) -> Result<(SampleSet, Spectrum)> {
    let clamped: Vec<f64> = spectrum.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("cannot sample from an empty spectrum"));
    }
    let deficit = 1.0 - spectrum.total();
    if deficit.abs() > 1e-6 {
        return Err(Error::domain(format!("spectrum mass {} is not normalized", spectrum.total())));
    }
    let mut cdf = Vec::with_capacity(clamped.len());
    let mut acc = 0.0;
    for v in &clamped {
        acc += v / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = cdf.len() - 1;
    let bins: Vec<usize> = (0..n_samples)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect();
    let mut counts = vec![0.0; clamped.len()];
    for &b in &bins {
        counts[b] += 1.0;
    }
    let empirical = Spectrum::new(spectrum.grid, counts.into_iter().map(|c| c / n_samples as f64).collect())?;
    Ok((SampleSet { bins, seed, mass_deficit: deficit }, empirical))
}
