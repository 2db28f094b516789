//! Hafnian and loop-hafnian estimators from Kan's moment formula.
//!
//! `haf(Σ) = (1/(n/2)!) Σ_{v∈{0,1}ⁿ} (−1)^{|v|} (hᵀΣh/2)^{n/2}`, `h = ½ − v`.
//! The diagonal of `Σ` drops out of the signed sum.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{
    check_samples, check_space, exhaustive_sum, hoeffding_epsilon, monte_carlo_mean, EstimateWithBound, FockVector,
    Sampling,
};
use crate::error::{Error, Result};
use crate::hafnian::factorial;
use crate::linalg::{c, max_abs, spectral_norm, CMat, CVec, C64};

fn check_symmetric_square(sigma: &CMat) -> Result<usize> {
    Error::check_len("Kan matrix columns", sigma.nrows(), sigma.ncols())?;
    let asym = max_abs(&(sigma - sigma.transpose()));
    if asym > 1e-10 {
        return Err(Error::domain(format!("Kan estimator needs a symmetric matrix (asymmetry {asym:.3e})")));
    }
    Ok(sigma.nrows())
}

fn quad_form(sigma: &CMat, h: &[f64]) -> C64 {
    let n = h.len();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        if h[i] == 0.0 {
            continue;
        }
        let mut row = c(0.0, 0.0);
        for j in 0..n {
            row += sigma[(i, j)] * h[j];
        }
        acc += row * h[i];
    }
    acc
}

fn exact_zero() -> EstimateWithBound {
    EstimateWithBound::exact(c(0.0, 0.0), 1)
}

fn sign(v_total: usize) -> f64 {
    if v_total % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `haf(Σ)` of an `n×n` symmetric matrix.
pub fn kan_hafnian_estimate(sigma: &CMat, sampling: Sampling) -> Result<EstimateWithBound> {
    let n = check_symmetric_square(sigma)?;
    if n % 2 == 1 {
        return Ok(exact_zero());
    }
    let half = n / 2;
    let pref = 2f64.powi(half as i32) / factorial(half);
    let term = |bits: u64| -> C64 {
        let h: Vec<f64> = (0..n).map(|i| if bits >> i & 1 == 1 { -0.5 } else { 0.5 }).collect();
        quad_form(sigma, &h).powu(half as u32) * (pref * sign(bits.count_ones() as usize))
    };
    match sampling {
        Sampling::Exhaustive => {
            let space = check_space("Kan sample space", 1usize.checked_shl(n as u32))?;
            let total = exhaustive_sum(space, |b| term(b as u64));
            Ok(EstimateWithBound::exact(total / space as f64, space))
        }
        Sampling::MonteCarlo { n_samples, seed, confidence } => {
            check_samples(n_samples, confidence)?;
            if n > 63 {
                return Err(Error::SizeGuard { what: "Kan hafnian size", limit: 63, got: n });
            }
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let (value, stderr) = monte_carlo_mean(n_samples, seed, |rng: &mut ChaCha8Rng| term(rng.random::<u64>() & mask));
            let scale = (n as f64 * spectral_norm(sigma)).powi(half as i32) / (factorial(half) * 2f64.powi(half as i32));
            Ok(EstimateWithBound {
                value,
                stderr,
                n_samples,
                analytic_bound: Some(hoeffding_epsilon(n_samples, confidence) * scale),
                confidence,
            })
        }
    }
}

/// `haf(Σ_n)` where `Σ_n` repeats row and column `i` of `Σ` `n_i` times.
///
/// Grouping the `2^{Σn}` sign vectors by how many copies of each index are
/// flipped gives `(1/(N/2)!) Σ_v Π_i C(n_i, v_i) (−1)^{|v|} (hᵀΣh/2)^{N/2}`
/// with `h = n/2 − v`. Sampling draws `v_i ~ Binomial(n_i, ½)`.
pub fn kan_hafnian_repeated(sigma: &CMat, n: &FockVector, sampling: Sampling) -> Result<EstimateWithBound> {
    let m = check_symmetric_square(sigma)?;
    Error::check_len("Kan repetition vector", m, n.len())?;
    let total = n.total();
    if total % 2 == 1 {
        return Ok(exact_zero());
    }
    let half = total / 2;
    let inv_half_fact = 1.0 / factorial(half);
    let hvec = |v: &[usize]| -> Vec<f64> { (0..m).map(|i| n.0[i] as f64 / 2.0 - v[i] as f64).collect() };
    match sampling {
        Sampling::Exhaustive => {
            let space = check_space(
                "Kan repeated sample space",
                n.0.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r + 1)),
            )?;
            let binoms: Vec<Vec<f64>> = n.0.iter().map(|&k| binomial_row(k)).collect();
            let sum = exhaustive_sum(space, |mut lin| {
                let mut v = vec![0usize; m];
                let mut weight = 1.0;
                for i in 0..m {
                    v[i] = lin % (n.0[i] + 1);
                    lin /= n.0[i] + 1;
                    weight *= binoms[i][v[i]];
                }
                let q = quad_form(sigma, &hvec(&v)) * 0.5;
                q.powu(half as u32) * (weight * sign(v.iter().sum()))
            });
            Ok(EstimateWithBound::exact(sum * inv_half_fact, space))
        }
        Sampling::MonteCarlo { n_samples, seed, confidence } => {
            check_samples(n_samples, confidence)?;
            let dists: Vec<Option<Binomial>> = n.0.iter().map(|&k| (k > 0).then(|| Binomial::new(k as u64, 0.5).unwrap())).collect();
            let weight = 2f64.powi(total as i32) * inv_half_fact;
            let (value, stderr) = monte_carlo_mean(n_samples, seed, |rng: &mut ChaCha8Rng| {
                let v: Vec<usize> = dists.iter().map(|d| d.as_ref().map_or(0, |d| d.sample(rng) as usize)).collect();
                let q = quad_form(sigma, &hvec(&v)) * 0.5;
                q.powu(half as u32) * (weight * sign(v.iter().sum()))
            });
            let h2: f64 = n.0.iter().map(|&k| (k * k) as f64 / 4.0).sum();
            let scale = weight * (spectral_norm(sigma) * h2 / 2.0).powi(half as i32);
            Ok(EstimateWithBound {
                value,
                stderr,
                n_samples,
                analytic_bound: Some(hoeffding_epsilon(n_samples, confidence) * scale),
                confidence,
            })
        }
    }
}

fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for j in 1..=k {
        row[j] = row[j - 1] * (k + 1 - j) as f64 / j as f64;
    }
    row
}

/// `lhaf` of `Σ` with loop weights `μ` (the diagonal of `Σ` is ignored).
///
/// Kan's formula for a nonzero mean expands into
/// `Σ_v (−1)^{|v|} Σ_r (hᵀΣh/2)^r (h·μ)^{n−2r} / (r!(n−2r)!)`.
/// Sampling draws `v` and `r` uniformly, which weights each term by
/// `2ⁿ(⌊n/2⌋+1)`.
pub fn kan_loop_hafnian_estimate(sigma: &CMat, mu: &CVec, sampling: Sampling) -> Result<EstimateWithBound> {
    let n = check_symmetric_square(sigma)?;
    Error::check_len("loop weights", n, mu.len())?;
    let rmax = n / 2;
    let inv_fact: Vec<f64> = (0..=n).map(|k| 1.0 / factorial(k)).collect();
    let parts = |bits: u64| -> (C64, C64) {
        let h: Vec<f64> = (0..n).map(|i| if bits >> i & 1 == 1 { -0.5 } else { 0.5 }).collect();
        let q = quad_form(sigma, &h) * 0.5;
        let lin: C64 = (0..n).map(|i| mu[i] * h[i]).sum();
        (q, lin)
    };
    let r_term = |q: C64, lin: C64, r: usize| q.powu(r as u32) * lin.powu((n - 2 * r) as u32) * (inv_fact[r] * inv_fact[n - 2 * r]);
    match sampling {
        Sampling::Exhaustive => {
            let space = check_space("Kan loop sample space", 1usize.checked_shl(n as u32))?;
            let total = exhaustive_sum(space, |b| {
                let (q, lin) = parts(b as u64);
                let s: C64 = (0..=rmax).map(|r| r_term(q, lin, r)).sum();
                s * sign((b as u64).count_ones() as usize)
            });
            Ok(EstimateWithBound::exact(total, space * (rmax + 1)))
        }
        Sampling::MonteCarlo { n_samples, seed, confidence } => {
            check_samples(n_samples, confidence)?;
            if n > 63 {
                return Err(Error::SizeGuard { what: "Kan loop hafnian size", limit: 63, got: n });
            }
            let mask = (1u64 << n) - 1;
            let weight = 2f64.powi(n as i32) * (rmax + 1) as f64;
            let (value, stderr) = monte_carlo_mean(n_samples, seed, |rng: &mut ChaCha8Rng| {
                let bits = rng.random::<u64>() & mask;
                let r = rng.random_range(0..=rmax);
                let (q, lin) = parts(bits);
                r_term(q, lin, r) * (weight * sign(bits.count_ones() as usize))
            });
            let norm_s = spectral_norm(sigma);
            let norm_mu = mu.norm();
            let nn = (n as f64).powf(n as f64 / 2.0);
            let scale = (0..=rmax)
                .map(|r| {
                    (rmax + 1) as f64 * nn * norm_s.powi(r as i32) * norm_mu.powi((n - 2 * r) as i32) * inv_fact[r]
                        * inv_fact[n - 2 * r]
                        / 2f64.powi(r as i32)
                })
                .fold(0.0, f64::max);
            Ok(EstimateWithBound {
                value,
                stderr,
                n_samples,
                analytic_bound: Some(hoeffding_epsilon(n_samples, confidence) * scale),
                confidence,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hafnian::{hafnian_exact, loop_hafnian_exact, repeat_rows_cols};
    use crate::linalg::random_symmetric;
    use rand::SeedableRng;

    #[test]
    fn two_by_two_is_off_diagonal() {
        let s = CMat::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.4, -0.2), c(0.4, -0.2), c(-1.0, 2.0)]);
        let e = kan_hafnian_estimate(&s, Sampling::Exhaustive).unwrap();
        assert!((e.value - c(0.4, -0.2)).norm() < 1e-14);
    }

    #[test]
    fn all_ones_four() {
        let e = kan_hafnian_estimate(&CMat::from_element(4, 4, c(1.0, 0.0)), Sampling::Exhaustive).unwrap();
        assert!((e.value - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn odd_size_is_zero() {
        let e = kan_hafnian_estimate(&CMat::from_element(3, 3, c(1.0, 0.0)), Sampling::monte_carlo(10, 1)).unwrap();
        assert_eq!(e.value, c(0.0, 0.0));
    }

    #[test]
    fn rejects_asymmetric() {
        let mut s = CMat::identity(2, 2);
        s[(0, 1)] = c(1.0, 0.0);
        assert!(kan_hafnian_estimate(&s, Sampling::Exhaustive).is_err());
    }

    #[test]
    fn matches_matching_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2, 4, 6, 8] {
            let s = random_symmetric(n, &mut rng);
            let e = kan_hafnian_estimate(&s, Sampling::Exhaustive).unwrap();
            let h = hafnian_exact(&s).unwrap();
            assert!((e.value - h).norm() < 1e-10 * h.norm().max(1.0));
        }
    }

    #[test]
    fn repeated_matches_oracle() {
        let s = CMat::from_element(1, 1, c(0.7, 0.2));
        let e = kan_hafnian_repeated(&s, &FockVector::new(vec![2]), Sampling::Exhaustive).unwrap();
        assert!((e.value - c(0.7, 0.2)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for reps in [vec![1, 1], vec![2, 2], vec![3, 1, 2], vec![0, 4, 2]] {
            let s = random_symmetric(reps.len(), &mut rng);
            let n = FockVector::new(reps);
            let e = kan_hafnian_repeated(&s, &n, Sampling::Exhaustive).unwrap();
            let h = hafnian_exact(&repeat_rows_cols(&s, &n.0).unwrap()).unwrap();
            assert!((e.value - h).norm() < 1e-10 * h.norm().max(1.0), "{:?}", n);
        }
    }

    #[test]
    fn loop_examples() {
        let s = CMat::from_row_slice(2, 2, &[c(9.0, 0.0), c(0.3, 0.0), c(0.3, 0.0), c(9.0, 0.0)]);
        let mu = CVec::from_vec(vec![c(0.5, 0.1), c(-0.2, 0.4)]);
        let e = kan_loop_hafnian_estimate(&s, &mu, Sampling::Exhaustive).unwrap();
        assert!((e.value - (c(0.3, 0.0) + mu[0] * mu[1])).norm() < 1e-14);

        let ones = CMat::from_element(3, 3, c(1.0, 0.0));
        let e = kan_loop_hafnian_estimate(&ones, &CVec::from_element(3, c(1.0, 0.0)), Sampling::Exhaustive).unwrap();
        assert!((e.value - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn loop_matches_oracle_and_zero_mean_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            let s = random_symmetric(n, &mut rng);
            let mu = CVec::from_iterator(n, (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            let mut tilde = s.clone();
            for i in 0..n {
                tilde[(i, i)] = mu[i];
            }
            let e = kan_loop_hafnian_estimate(&s, &mu, Sampling::Exhaustive).unwrap();
            let l = loop_hafnian_exact(&tilde).unwrap();
            assert!((e.value - l).norm() < 1e-10 * l.norm().max(1.0));

            let z = kan_loop_hafnian_estimate(&s, &CVec::zeros(n), Sampling::Exhaustive).unwrap();
            let h = kan_hafnian_estimate(&s, Sampling::Exhaustive).unwrap();
            assert!((z.value - h.value).norm() < 1e-10 * h.value.norm().max(1.0));
        }
    }
}
