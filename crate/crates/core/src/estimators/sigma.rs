//! Loop-hafnian representation of Fock matrix elements of a Gaussian unitary.
//!
//! For `Ŵ = D(ξ) Û₂ S(r) Û₁`,
//! `⟨m|Ŵ|n⟩ = ⟨0|Ŵ|0⟩ · lhaf(Σ̃_{m,n}) / √(m! n!)`, where `Σ̃_{m,n}` repeats
//! the rows and columns of the `2M×2M` matrix `Σ` by `(m, n)` and carries the
//! repeated loop vector `ζ` on its diagonal.

use rayon::prelude::*;

use super::gurvits::symmetric_series;
use super::{kan_hafnian_repeated, kan_loop_hafnian_estimate, EstimateWithBound, FockVector, Sampling};
use crate::error::{Error, Result};
use crate::gaussian::{BlochMessiahForm, GaussianCircuit};
use crate::hafnian::{repeat_rows_cols, repeated_indices, GaussianMoments};
use crate::linalg::{c, diag_real, max_abs_vec, CMat, CVec, C64};
use crate::spectra::{exact_fourier_gaussian, phase_operator_form, FourierSeries, SpectralGrid, WeightVector};

#[derive(Clone, Debug)]
pub struct SigmaSystem {
    /// Symmetric `2M×2M`; the first block indexes outputs, the second inputs.
    pub sigma: CMat,
    pub zeta: CVec,
    /// `Z = 1/⟨0|Ŵ|0⟩` for the canonical operator `D(ξ) Û₂ S(r) Û₁` whose
    /// passive factors fix the vacuum. A transform determines its operator
    /// only up to a global phase, so other products with the same transform
    /// may differ from this by a phase.
    pub z_norm: C64,
}

impl SigmaSystem {
    pub fn modes(&self) -> usize {
        self.zeta.len() / 2
    }

    pub fn vacuum_amplitude(&self) -> C64 {
        1.0 / self.z_norm
    }

    /// `⟨m|Ŵ|n⟩`.
    pub fn amplitude(&self, m: &[usize], n: &[usize]) -> Result<C64> {
        let reps: Vec<usize> = m.iter().chain(n).copied().collect();
        Error::check_len("amplitude photon vectors", 2 * self.modes(), reps.len())?;
        let lhaf = GaussianMoments::new(&self.sigma, &self.zeta, &reps, reps.iter().sum())?.loop_hafnian(&reps);
        let norm: f64 = reps.iter().map(|&k| crate::hafnian::factorial(k)).product::<f64>().sqrt();
        Ok(self.vacuum_amplitude() * lhaf / norm)
    }

    /// `Σ̃` for outputs `m` and inputs `n`: rows and columns repeated,
    /// diagonal replaced by the repeated `ζ`.
    pub fn repeated(&self, m: &[usize], n: &[usize]) -> Result<(CMat, CVec)> {
        let reps: Vec<usize> = m.iter().chain(n).copied().collect();
        let s = repeat_rows_cols(&self.sigma, &reps)?;
        let idx = repeated_indices(&reps);
        Ok((s, CVec::from_iterator(idx.len(), idx.iter().map(|&i| self.zeta[i]))))
    }
}

/// `Σ`, `ζ` and `Z` of a decomposed Gaussian unitary.
///
/// The vacuum amplitude is `exp(−½|ξ|² + ½ ξ*ᵀ U₂ tanh(r) U₂ᵀ ξ*)/√Π cosh r`.
pub fn build_sigma_system(form: &BlochMessiahForm) -> SigmaSystem {
    let m = form.modes();
    let u2 = form.u_lin2.matrix();
    let u1 = form.u_lin1.matrix();
    let tanh: Vec<f64> = form.r.iter().map(|r| r.tanh()).collect();
    let sech: Vec<f64> = form.r.iter().map(|r| 1.0 / r.cosh()).collect();
    let t = u2 * diag_real(&tanh) * u2.transpose();
    let cross = u2 * diag_real(&sech) * u1;
    let lower = -(u1.transpose() * diag_real(&tanh) * u1);
    let mut sigma = CMat::zeros(2 * m, 2 * m);
    sigma.view_mut((0, 0), (m, m)).copy_from(&t);
    sigma.view_mut((0, m), (m, m)).copy_from(&cross);
    sigma.view_mut((m, 0), (m, m)).copy_from(&cross.transpose());
    sigma.view_mut((m, m), (m, m)).copy_from(&lower);

    let xi = &form.xi;
    let xic = xi.conjugate();
    let mut zeta = CVec::zeros(2 * m);
    zeta.rows_mut(0, m).copy_from(&(xi - &t * &xic));
    zeta.rows_mut(m, m).copy_from(&(-(cross.transpose() * &xic)));

    let log_cosh: f64 = form.r.iter().map(|r| r.cosh().ln()).sum();
    let quad = (xic.transpose() * &t * &xic)[(0, 0)];
    let log_vac = c(-0.5 * xi.norm_squared() - 0.5 * log_cosh, 0.0) + 0.5 * quad;
    SigmaSystem { sigma, zeta, z_norm: (-log_vac).exp() }
}

/// `G̃(k) = ⟨n|Ŵ|n⟩` for the input `Û D(α) S(r0)|n⟩`, estimated by Kan's
/// formula on the repeated matrix.
pub fn fourier_fock_squeezed(
    circuit: &GaussianCircuit,
    w: &WeightVector,
    grid: &SpectralGrid,
    k: u64,
    n: &FockVector,
    sampling: Sampling,
) -> Result<EstimateWithBound> {
    Error::check_len("weight vector", circuit.modes(), w.len())?;
    Error::check_len("photon vector", circuit.modes(), n.len())?;
    grid.check_k(k)?;
    let form = phase_operator_form(circuit, &w.phases(grid, k))?;
    let sys = build_sigma_system(&form);
    // The decomposition fixes Ŵ only up to a global phase; the closed-form
    // vacuum component carries the true one.
    let scale = exact_fourier_gaussian(circuit, w, grid, k)? / n.factorial();
    if n.total() == 0 {
        return Ok(EstimateWithBound::exact(scale, 1));
    }
    let reps: Vec<usize> = n.0.iter().chain(&n.0).copied().collect();
    let est = if max_abs_vec(&sys.zeta) <= 1e-14 {
        kan_hafnian_repeated(&sys.sigma, &FockVector::new(reps), sampling)?
    } else {
        let (s, mu) = sys.repeated(&n.0, &n.0)?;
        kan_loop_hafnian_estimate(&s, &mu, sampling)?
    };
    Ok(est.scaled(scale))
}

/// Estimates for `k = 0..=d/2`, mirrored by conjugate symmetry.
pub fn fourier_series_fock_squeezed(
    circuit: &GaussianCircuit,
    w: &WeightVector,
    grid: &SpectralGrid,
    n: &FockVector,
    sampling: Sampling,
) -> Result<(FourierSeries, Vec<EstimateWithBound>)> {
    let half = grid.d() / 2;
    let est: Result<Vec<EstimateWithBound>> = (0..=half)
        .into_par_iter()
        .map(|k| fourier_fock_squeezed(circuit, w, grid, k, n, sampling.derive(k)))
        .collect();
    let est = est?;
    Ok((symmetric_series(grid, &est), est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{bloch_messiah, compose, BogoliubovTransform, UnitaryMatrix};
    use crate::linalg::{max_abs, spectral_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unsqueezed_undisplaced_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let form = BlochMessiahForm {
            u_lin2: UnitaryMatrix::haar(3, &mut rng),
            r: vec![0.0; 3],
            u_lin1: UnitaryMatrix::haar(3, &mut rng),
            xi: CVec::zeros(3),
        };
        let sys = build_sigma_system(&form);
        let prod = form.u_lin2.matrix() * form.u_lin1.matrix();
        assert!(max_abs(&(sys.sigma.view((0, 3), (3, 3)).clone_owned() - &prod)) < 1e-14);
        assert!(max_abs(&sys.sigma.view((0, 0), (3, 3)).clone_owned()) < 1e-15);
        assert!(max_abs_vec(&sys.zeta) == 0.0);
        assert!((sys.z_norm - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_mode_squeezer_system() {
        let s: f64 = 0.8;
        let form = bloch_messiah(&BogoliubovTransform::squeezer(&[s])).unwrap();
        let sys = build_sigma_system(&form);
        let expect = CMat::from_row_slice(2, 2, &[c(s.tanh(), 0.0), c(1.0 / s.cosh(), 0.0), c(1.0 / s.cosh(), 0.0), c(-s.tanh(), 0.0)]);
        assert!(max_abs(&(sys.sigma - expect)) < 1e-14);
        assert!((sys.z_norm - c(s.cosh().sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn norm_one_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let m = rng.random_range(1..=5);
            let r: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..2.0)).collect();
            let t = compose(&BogoliubovTransform::passive(&UnitaryMatrix::haar(m, &mut rng)), &BogoliubovTransform::squeezer(&r)).unwrap();
            let t = compose(&t, &BogoliubovTransform::passive(&UnitaryMatrix::haar(m, &mut rng))).unwrap();
            let sys = build_sigma_system(&bloch_messiah(&t).unwrap());
            assert!(max_abs(&(&sys.sigma - sys.sigma.transpose())) < 1e-10);
            assert!((spectral_norm(&sys.sigma) - 1.0).abs() < 1e-8);
        }
    }
}
