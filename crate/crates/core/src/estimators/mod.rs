//! Randomized estimators of Fourier components for Fock-state inputs.
//!
//! Every estimator runs either exhaustively over its finite sample space
//! (exact up to rounding) or by Monte Carlo with an explicit seed. Real and
//! imaginary parts are averaged over independent sample streams, and each
//! result carries its empirical standard error together with the worst-case
//! Hoeffding envelope.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

mod gurvits;
mod kan;
mod sigma;

pub use gurvits::{fourier_fock, fourier_series_fock, gurvits_generalized, passive_phase_matrix};
pub use kan::{kan_hafnian_estimate, kan_hafnian_repeated, kan_loop_hafnian_estimate};
pub use sigma::{build_sigma_system, fourier_fock_squeezed, fourier_series_fock_squeezed, SigmaSystem};

/// Photon numbers per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockVector(pub Vec<usize>);

impl FockVector {
    pub fn new(n: Vec<usize>) -> Self {
        FockVector(n)
    }

    pub fn vacuum(m: usize) -> Self {
        FockVector(vec![0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `Π n_i!`.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| crate::hafnian::factorial(k)).product()
    }
}

/// How an estimator draws from its sample space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Sum over the whole sample space: the exact value.
    Exhaustive,
    MonteCarlo { n_samples: usize, seed: u64, confidence: f64 },
}

impl Sampling {
    pub fn monte_carlo(n_samples: usize, seed: u64) -> Self {
        Sampling::MonteCarlo { n_samples, seed, confidence: DEFAULT_CONFIDENCE }
    }

    /// Same sampling with an independent seed for sub-problem `index`.
    pub fn derive(&self, index: u64) -> Self {
        match *self {
            Sampling::Exhaustive => Sampling::Exhaustive,
            Sampling::MonteCarlo { n_samples, seed, confidence } => Sampling::MonteCarlo {
                n_samples,
                seed: derive_seed(seed, index),
                confidence,
            },
        }
    }
}

pub const DEFAULT_CONFIDENCE: f64 = 0.99;

/// Monte Carlo mean with its error budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithBound {
    pub value: C64,
    pub stderr: f64,
    pub n_samples: usize,
    /// Worst-case half-width at `confidence`; `None` when the integrand is
    /// unbounded.
    pub analytic_bound: Option<f64>,
    pub confidence: f64,
}

impl EstimateWithBound {
    pub(crate) fn exact(value: C64, space: usize) -> Self {
        EstimateWithBound { value, stderr: 0.0, n_samples: space.max(1), analytic_bound: Some(0.0), confidence: 1.0 }
    }

    /// Multiply value and error measures by `factor`.
    pub(crate) fn scaled(self, factor: C64) -> Self {
        let a = factor.norm();
        EstimateWithBound {
            value: self.value * factor,
            stderr: self.stderr * a,
            analytic_bound: self.analytic_bound.map(|b| b * a),
            ..self
        }
    }
}

/// Half-width `ε` such that a mean of `n` samples bounded by one lies within
/// `ε` of its expectation with probability `confidence`, per real part.
pub fn hoeffding_epsilon(n_samples: usize, confidence: f64) -> f64 {
    (2.0 * (2.0 / (1.0 - confidence)).ln() / n_samples as f64).sqrt()
}

/// Samples needed for half-width `epsilon` at `confidence`.
pub fn plan_samples(epsilon: f64, confidence: f64) -> Result<usize> {
    if !(epsilon > 0.0) || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!(
            "plan_samples needs epsilon > 0 and confidence in (0, 1), got {epsilon}, {confidence}"
        )));
    }
    let n = (2.0 * (2.0 / (1.0 - confidence)).ln() / (epsilon * epsilon)).ceil();
    Ok((n as usize).max(1))
}

/// SplitMix64 finalizer applied to `seed + index`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Samples per RNG stream; blocks are reduced in index order.
const BLOCK: usize = 2048;

/// Running moments of one block.
#[derive(Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * o.n / n,
            m2: self.m2 + o.m2 + delta * delta * self.n * o.n / n,
        }
    }
}

/// Stream of the RNG used for block `block` of component `part`.
pub(crate) fn block_rng(seed: u64, part: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((part << 48) | block);
    rng
}

/// Mean and standard error of `draw`, real and imaginary parts taken from
/// independent streams.
pub(crate) fn monte_carlo_mean<F>(n_samples: usize, seed: u64, draw: F) -> (C64, f64)
where
    F: Fn(&mut ChaCha8Rng) -> C64 + Sync,
{
    let blocks = n_samples.div_ceil(BLOCK);
    let part = |which: u64| -> Moments {
        let per_block: Vec<Moments> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = block_rng(seed, which, b as u64);
                let count = BLOCK.min(n_samples - b * BLOCK);
                let mut m = Moments { n: 0.0, mean: 0.0, m2: 0.0 };
                for _ in 0..count {
                    let z = draw(&mut rng);
                    let x = if which == 0 { z.re } else { z.im };
                    m.n += 1.0;
                    let delta = x - m.mean;
                    m.mean += delta / m.n;
                    m.m2 += delta * (x - m.mean);
                }
                m
            })
            .collect();
        per_block.into_iter().fold(Moments { n: 0.0, mean: 0.0, m2: 0.0 }, Moments::merge)
    };
    let (re, im) = (part(0), part(1));
    let var = |m: &Moments| if m.n > 1.0 { m.m2 / (m.n - 1.0) } else { 0.0 };
    let stderr = ((var(&re) + var(&im)) / n_samples as f64).sqrt();
    (c(re.mean, im.mean), stderr)
}

/// `Σ_{i<count} term(i)` with a fixed reduction order.
pub(crate) fn exhaustive_sum<F>(count: usize, term: F) -> C64
where
    F: Fn(usize) -> C64 + Sync,
{
    let chunks = count.div_ceil(BLOCK);
    let sums: Vec<C64> = (0..chunks)
        .into_par_iter()
        .map(|ch| {
            let end = ((ch + 1) * BLOCK).min(count);
            (ch * BLOCK..end).map(&term).sum()
        })
        .collect();
    sums.into_iter().sum()
}

/// Largest sample space enumerated exhaustively.
pub const EXHAUSTIVE_MAX: usize = 1 << 28;

pub(crate) fn check_space(what: &'static str, space: Option<usize>) -> Result<usize> {
    match space {
        Some(s) if s <= EXHAUSTIVE_MAX => Ok(s),
        _ => Err(Error::SizeGuard { what, limit: EXHAUSTIVE_MAX, got: space.unwrap_or(usize::MAX) }),
    }
}

pub(crate) fn check_samples(n_samples: usize, confidence: f64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be at least 1"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain(format!("confidence must lie in (0, 1), got {confidence}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn plan_samples_formula() {
        assert_eq!(plan_samples(0.05, 0.99).unwrap(), 4239);
        assert!(plan_samples(1.0, 0.5000001).unwrap() >= 1);
        // ⌈2 ln(2·10⁶)/10⁻⁴⌉ evaluated in 50-digit arithmetic.
        assert_eq!(plan_samples(0.01, 1.0 - 1e-6).unwrap(), 290_174);
        let n1 = plan_samples(0.02, 0.9).unwrap() as f64;
        let n2 = plan_samples(0.01, 0.9).unwrap() as f64;
        assert!((n2 / n1 - 4.0).abs() < 1e-3);
        assert!(plan_samples(0.0, 0.9).is_err());
        assert!(plan_samples(0.1, 1.0).is_err());
    }

    #[test]
    fn monte_carlo_mean_is_deterministic_and_correct() {
        let draw = |rng: &mut ChaCha8Rng| c(rng.random::<f64>(), 2.0 * rng.random::<f64>());
        let (a, ea) = monte_carlo_mean(100_000, 9, draw);
        let (b, eb) = monte_carlo_mean(100_000, 9, draw);
        assert_eq!((a, ea), (b, eb));
        assert!((a - c(0.5, 1.0)).norm() < 5.0 * ea);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let (s, es) = pool.install(|| monte_carlo_mean(100_000, 9, draw));
        assert_eq!((a, ea), (s, es));
    }

    #[test]
    fn constant_draw_has_zero_stderr() {
        let (m, e) = monte_carlo_mean(5000, 1, |_| c(1.0, 0.0));
        assert_eq!(m, c(1.0, 0.0));
        assert_eq!(e, 0.0);
    }
}
