//! Gurvits-type estimator for permanents with repeated rows and columns.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    check_samples, check_space, exhaustive_sum, hoeffding_epsilon, monte_carlo_mean, EstimateWithBound, FockVector,
    Sampling,
};
use crate::error::{Error, Result};
use crate::gaussian::UnitaryMatrix;
use crate::linalg::{c, spectral_norm, CMat, CVec, C64};
use crate::spectra::{FourierSeries, SpectralGrid, WeightVector};

/// `(n+1)`-th roots of unity scaled by `√n`, indexed by distinct `n`.
struct RootTable {
    scaled: Vec<Vec<C64>>,
}

impl RootTable {
    fn new(n: &[usize]) -> Self {
        let max = n.iter().copied().max().unwrap_or(0);
        let scaled = (0..=max)
            .map(|k| {
                let s = (k as f64).sqrt();
                (0..=k)
                    .map(|j| C64::from_polar(s, 2.0 * std::f64::consts::PI * j as f64 / (k + 1) as f64))
                    .collect()
            })
            .collect();
        RootTable { scaled }
    }
}

/// Estimator of `Per(B_{n,n})/n!`, where `B_{n,n}` repeats row and column
/// `i` of `B` `n_i` times.
///
/// With `y_i = √n_i x_i` and `x_i` a uniform `(n_i+1)`-th root of unity, the
/// expectation of `Π_i (ȳ_i (By)_i / n_i)^{n_i}` picks out exactly the
/// monomials of the permanent; its modulus is at most `‖B‖^{Σn}`.
pub fn gurvits_generalized(b: &CMat, n: &FockVector, sampling: Sampling) -> Result<EstimateWithBound> {
    Error::check_len("Gurvits matrix columns", b.nrows(), b.ncols())?;
    Error::check_len("Gurvits photon vector", b.nrows(), n.len())?;
    if n.total() == 0 {
        return Err(Error::domain("photon vector must contain at least one photon"));
    }
    let active: Vec<usize> = (0..n.len()).filter(|&i| n.0[i] > 0).collect();
    let k = active.len();
    let sub = CMat::from_fn(k, k, |i, j| b[(active[i], active[j])]);
    let reps: Vec<usize> = active.iter().map(|&i| n.0[i]).collect();
    let roots = RootTable::new(&reps);

    let term = |idx: &[usize]| -> C64 {
        let y = CVec::from_iterator(k, (0..k).map(|i| roots.scaled[reps[i]][idx[i]]));
        let by = &sub * &y;
        (0..k)
            .map(|i| (y[i].conj() * by[i] / reps[i] as f64).powu(reps[i] as u32))
            .product()
    };

    match sampling {
        Sampling::Exhaustive => {
            let space = check_space(
                "Gurvits sample space",
                reps.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r + 1)),
            )?;
            let total = exhaustive_sum(space, |mut lin| {
                let mut idx = vec![0usize; k];
                for (i, slot) in idx.iter_mut().enumerate() {
                    *slot = lin % (reps[i] + 1);
                    lin /= reps[i] + 1;
                }
                term(&idx)
            });
            Ok(EstimateWithBound::exact(total / space as f64, space))
        }
        Sampling::MonteCarlo { n_samples, seed, confidence } => {
            check_samples(n_samples, confidence)?;
            let (value, stderr) = monte_carlo_mean(n_samples, seed, |rng: &mut ChaCha8Rng| {
                let idx: Vec<usize> = reps.iter().map(|&r| rng.random_range(0..=r)).collect();
                term(&idx)
            });
            let norm_pow = spectral_norm(&sub).powi(n.total() as i32);
            Ok(EstimateWithBound {
                value,
                stderr,
                n_samples,
                analytic_bound: Some(hoeffding_epsilon(n_samples, confidence) * norm_pow),
                confidence,
            })
        }
    }
}

/// `V = U† diag(e^{−ikθω}) U`, the single-photon transfer matrix of the
/// Fourier-component operator.
pub fn passive_phase_matrix(u: &UnitaryMatrix, w: &WeightVector, grid: &SpectralGrid, k: u64) -> Result<CMat> {
    Error::check_len("weight vector", u.dim(), w.len())?;
    grid.check_k(k)?;
    let d: Vec<C64> = w.phases(grid, k).into_iter().map(|p| C64::from_polar(1.0, p)).collect();
    let um = u.matrix();
    Ok(um.adjoint() * CMat::from_diagonal(&CVec::from_column_slice(&d)) * um)
}

/// `G̃(k) = Per(V_{n,n})/n!` for Fock input `n` through the passive circuit `U`.
pub fn fourier_fock(
    u: &UnitaryMatrix,
    w: &WeightVector,
    grid: &SpectralGrid,
    k: u64,
    n: &FockVector,
    sampling: Sampling,
) -> Result<EstimateWithBound> {
    Error::check_len("photon vector", u.dim(), n.len())?;
    let v = passive_phase_matrix(u, w, grid, k)?;
    let phase = grid.offset_phase(k);
    if n.total() == 0 {
        // The vacuum is invariant under passive circuits.
        return Ok(EstimateWithBound::exact(phase, 1));
    }
    let mut est = gurvits_generalized(&v, n, sampling)?;
    // ‖V‖ = 1 for unitary V; report the bound without rounding noise.
    if let (Sampling::MonteCarlo { n_samples, confidence, .. }, Some(_)) = (sampling, est.analytic_bound) {
        est.analytic_bound = Some(hoeffding_epsilon(n_samples, confidence));
    }
    Ok(est.scaled(phase))
}

/// Estimates for `k = 0..=d/2`, with the remaining components filled by
/// conjugate symmetry so the spectrum comes out real.
///
/// Each `k` uses the seed derived from `(seed, k)`.
pub fn fourier_series_fock(
    u: &UnitaryMatrix,
    w: &WeightVector,
    grid: &SpectralGrid,
    n: &FockVector,
    sampling: Sampling,
) -> Result<(FourierSeries, Vec<EstimateWithBound>)> {
    let half = grid.d() / 2;
    let est: Result<Vec<EstimateWithBound>> = (0..=half)
        .into_par_iter()
        .map(|k| fourier_fock(u, w, grid, k, n, sampling.derive(k)))
        .collect();
    let est = est?;
    Ok((symmetric_series(grid, &est), est))
}

pub(crate) fn symmetric_series(grid: &SpectralGrid, half: &[EstimateWithBound]) -> FourierSeries {
    let d = grid.d() as usize;
    let mut values = vec![c(0.0, 0.0); d];
    for (k, e) in half.iter().enumerate() {
        values[k] = e.value;
        if k > 0 {
            values[d - k] = e.value.conj();
        }
    }
    // k = 0 and, for even d, k = d/2 are their own mirror images and must be real.
    values[0] = c(values[0].re, 0.0);
    if d % 2 == 0 {
        values[d / 2] = c(values[d / 2].re, 0.0);
    }
    FourierSeries { grid: *grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hafnian::{permanent_exact, repeat_rows_cols};
    use rand::SeedableRng;

    #[test]
    fn identity_two_photons() {
        let e = gurvits_generalized(&CMat::identity(2, 2), &FockVector::new(vec![1, 1]), Sampling::Exhaustive).unwrap();
        assert!((e.value - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn single_mode_two_photons() {
        let b = CMat::from_element(1, 1, c(1.0, 0.0));
        let e = gurvits_generalized(&b, &FockVector::new(vec![2]), Sampling::Exhaustive).unwrap();
        assert!((e.value - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn repeated_permanent_three_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = crate::linalg::haar_unitary(3, &mut rng);
        let n = FockVector::new(vec![2, 1, 1]);
        let e = gurvits_generalized(&u, &n, Sampling::Exhaustive).unwrap();
        let per = permanent_exact(&repeat_rows_cols(&u, &n.0).unwrap()).unwrap() / n.factorial();
        assert!((e.value - per).norm() < 1e-10);
    }

    #[test]
    fn zero_photons_is_rejected() {
        assert!(gurvits_generalized(&CMat::identity(2, 2), &FockVector::vacuum(2), Sampling::Exhaustive).is_err());
    }

    #[test]
    fn beamsplitter_components() {
        let u = UnitaryMatrix::balanced_beamsplitter();
        let w = WeightVector::new(vec![1, 2]).unwrap();
        let grid = SpectralGrid::new(7);
        let n = FockVector::new(vec![1, 0]);
        for k in 0..8 {
            let e = fourier_fock(&u, &w, &grid, k, &n, Sampling::Exhaustive).unwrap();
            let th = grid.theta() * k as f64;
            let expect = (C64::from_polar(1.0, -th) + C64::from_polar(1.0, -2.0 * th)) * 0.5;
            assert!((e.value - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn k_zero_sampled_is_exactly_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = UnitaryMatrix::haar(3, &mut rng);
        let w = WeightVector::new(vec![1, 2, 3]).unwrap();
        let e = fourier_fock(&u, &w, &SpectralGrid::new(20), 0, &FockVector::new(vec![1, 1, 0]), Sampling::monte_carlo(1000, 3)).unwrap();
        assert!((e.value - c(1.0, 0.0)).norm() < 1e-12);
        assert!(e.stderr < 1e-12);
    }

    #[test]
    fn transfer_matrix_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = UnitaryMatrix::haar(5, &mut rng);
        let w = WeightVector::new(vec![1, 4, 2, 7, 3]).unwrap();
        let grid = SpectralGrid::new(50);
        for k in 0..=50 {
            let v = passive_phase_matrix(&u, &w, &grid, k).unwrap();
            assert!(spectral_norm(&v) <= 1.0 + 1e-10);
        }
    }
}
