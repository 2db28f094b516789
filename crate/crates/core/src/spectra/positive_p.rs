//! Positive-P sampling of Fourier components for squeezed-vacuum inputs.
//!
//! A squeezed vacuum with `γ = e^{2r} − 1` has a positive P-function that is
//! a bivariate Gaussian in real `(x, y)` with `E[x²] = E[y²] = sinh r cosh r`
//! and `E[xy] = sinh² r`. Normal-ordered moments become plain averages, and
//! `e^{iφ n̂} = :exp((e^{iφ} − 1) a†a):` turns the Fourier component into the
//! mean of `exp(Σ_j (e^{iφ_j} − 1) x'_j y'_j)` with `x' = Ux`, `y' = Ū y`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{SpectralGrid, WeightVector};
use crate::error::{Error, Result};
use crate::estimators::{check_samples, monte_carlo_mean, EstimateWithBound};
use crate::gaussian::GaussianCircuit;
use crate::linalg::{c, CVec, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct PositivePSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PositivePSample {
    /// One draw for squeezing `r`.
    ///
    /// Along `x ± y` the distribution factorizes with variances `γ` and
    /// `γ/(1+γ)`.
    pub fn draw<R: Rng + ?Sized>(r: &[f64], rng: &mut R) -> Self {
        let mut x = Vec::with_capacity(r.len());
        let mut y = Vec::with_capacity(r.len());
        for &ri in r {
            let g = (2.0 * ri).exp_m1();
            let zu: f64 = rng.sample(StandardNormal);
            let zv: f64 = rng.sample(StandardNormal);
            let u = zu * (g / 2.0).sqrt();
            let v = zv * (g / (2.0 * (1.0 + g))).sqrt();
            x.push((u + v) / std::f64::consts::SQRT_2);
            y.push((u - v) / std::f64::consts::SQRT_2);
        }
        PositivePSample { x, y }
    }
}

/// Monte Carlo estimate of `G̃(k)` for `U S(r0)|0⟩`.
///
/// The integrand is unbounded, so no worst-case bound is reported; its
/// variance is finite only for moderate squeezing.
pub fn montecarlo_fourier_positive_p(
    circuit: &GaussianCircuit,
    w: &WeightVector,
    grid: &SpectralGrid,
    k: u64,
    n_samples: usize,
    seed: u64,
) -> Result<EstimateWithBound> {
    let m = circuit.modes();
    Error::check_len("weight vector", m, w.len())?;
    grid.check_k(k)?;
    check_samples(n_samples, 0.5)?;
    if circuit.squeezing().iter().any(|&r| r <= 0.0) {
        return Err(Error::domain("positive-P sampling needs every squeezing > 0; use the exact route"));
    }
    if circuit.displacement().iter().any(|a| a.norm() != 0.0) {
        return Err(Error::domain("positive-P sampling covers undisplaced inputs only; use the exact route"));
    }
    let u = circuit.unitary().matrix();
    let ubar = u.conjugate();
    let coef: Vec<C64> = w.phases(grid, k).into_iter().map(|p| C64::from_polar(1.0, p) - 1.0).collect();
    let r = circuit.squeezing().to_vec();
    let (value, stderr) = monte_carlo_mean(n_samples, seed, |rng: &mut ChaCha8Rng| {
        let s = PositivePSample::draw(&r, rng);
        let xp = u * CVec::from_iterator(m, s.x.iter().map(|&v| c(v, 0.0)));
        let yp = &ubar * CVec::from_iterator(m, s.y.iter().map(|&v| c(v, 0.0)));
        let expo: C64 = (0..m).map(|j| coef[j] * xp[j] * yp[j]).sum();
        expo.exp()
    });
    let phase = grid.offset_phase(k);
    Ok(EstimateWithBound {
        value: value * phase,
        stderr,
        n_samples,
        analytic_bound: None,
        confidence: 0.5,
    })
}
