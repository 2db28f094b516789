//! Spectral grid, Fourier components of Gaussian spectra, and the discrete
//! transforms linking a spectrum to its Fourier series.

use std::f64::consts::PI;

use nalgebra::Schur;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{BlochMessiahForm, BogoliubovTransform, GaussianCircuit};
use crate::linalg::{c, CMat, CVec, C64};

pub mod positive_p;
pub mod thermal;

pub use positive_p::{montecarlo_fourier_positive_p, PositivePSample};
pub use thermal::{finite_temperature_lift, ThermalLift, ThermalWindow};

/// Per-mode integer frequencies; outcome `m` lands in bin `ω·m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(omega: Vec<u64>) -> Result<Self> {
        if !omega.iter().any(|&w| w > 0) {
            return Err(Error::domain("weight vector needs at least one positive entry"));
        }
        Ok(WeightVector(omega))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `ω·m`.
    pub fn energy(&self, m: &[usize]) -> u64 {
        self.0.iter().zip(m).map(|(&w, &k)| w * k as u64).sum()
    }

    /// Phases `−kθω_j` of the Fourier-component operator.
    pub fn phases(&self, grid: &SpectralGrid, k: u64) -> Vec<f64> {
        self.0.iter().map(|&w| -grid.angle(k, w)).collect()
    }
}

impl TryFrom<Vec<u64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<u64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// `d = Ω_max + 1` bins; bin of energy `E` is `(E + offset) mod d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub omega_max: u64,
    pub offset: u64,
}

impl SpectralGrid {
    pub fn new(omega_max: u64) -> Self {
        SpectralGrid { omega_max, offset: 0 }
    }

    pub fn with_offset(omega_max: u64, offset: u64) -> Self {
        SpectralGrid { omega_max, offset }
    }

    pub fn len(&self) -> usize {
        (self.omega_max + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn d(&self) -> u64 {
        self.omega_max + 1
    }

    pub fn theta(&self) -> f64 {
        2.0 * PI / self.d() as f64
    }

    pub fn bin(&self, energy: u64) -> usize {
        ((energy as u128 + self.offset as u128) % self.d() as u128) as usize
    }

    /// `kθE` reduced mod 2π before scaling, exact for large products.
    pub fn angle(&self, k: u64, energy: u64) -> f64 {
        let d = self.d() as u128;
        let red = (k as u128 * energy as u128) % d;
        2.0 * PI * (red as f64) / (d as f64)
    }

    /// `e^{−ikθ·offset}`, the Fourier factor of the grid shift.
    pub fn offset_phase(&self, k: u64) -> C64 {
        C64::from_polar(1.0, -self.angle(k, self.offset))
    }

    pub fn check_k(&self, k: u64) -> Result<()> {
        if k > self.omega_max {
            return Err(Error::domain(format!("Fourier index {k} outside 0..={}", self.omega_max)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    pub grid: SpectralGrid,
    pub values: Vec<C64>,
}

impl FourierSeries {
    pub fn new(grid: SpectralGrid, values: Vec<C64>) -> Result<Self> {
        Error::check_len("Fourier series", grid.len(), values.len())?;
        Ok(FourierSeries { grid, values })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: SpectralGrid,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: SpectralGrid, values: Vec<f64>) -> Result<Self> {
        Error::check_len("spectrum", grid.len(), values.len())?;
        Ok(Spectrum { grid, values })
    }

    pub fn zeros(grid: SpectralGrid) -> Self {
        Spectrum { grid, values: vec![0.0; grid.len()] }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Spectrum) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Fourier component `G̃(k)` of the spectrum of `U D(α) S(r0)|0⟩` in closed form.
///
/// The overlap reduces to a Gaussian integral over `2M` variables with
/// quadratic form `Q = diag(2/γ) + K`, `γ = e^{2r} − 1`. Rescaling the
/// variables by `√γ` gives `Q_s = 2I + √γ K √γ`, which stays regular as
/// `r → 0`. Its square root determinant takes the branch of the principal
/// square roots of the eigenvalues, which lie in the right half plane because
/// `Re Q_s` is positive definite.
pub fn exact_fourier_gaussian(circuit: &GaussianCircuit, w: &WeightVector, grid: &SpectralGrid, k: u64) -> Result<C64> {
    let m = circuit.modes();
    Error::check_len("weight vector", m, w.len())?;
    grid.check_k(k)?;
    if k == 0 {
        return Ok(c(1.0, 0.0));
    }
    let u = circuit.unitary().matrix();
    let phase: Vec<C64> = w.phases(grid, k).into_iter().map(|p| C64::from_polar(1.0, p)).collect();
    let gamma: Vec<f64> = circuit.squeezing().iter().map(|&r| (2.0 * r).exp_m1()).collect();
    let sg: Vec<f64> = gamma.iter().chain(&gamma).map(|g| g.sqrt()).collect();

    let dphase = CMat::from_diagonal(&CVec::from_column_slice(&phase));
    let lower = -(u.adjoint() * &dphase * u);
    let mut kmat = CMat::identity(2 * m, 2 * m);
    kmat.view_mut((m, 0), (m, m)).copy_from(&lower);
    kmat.view_mut((0, m), (m, m)).copy_from(&lower.transpose());
    let q = CMat::from_fn(2 * m, 2 * m, |i, j| {
        let two = if i == j { 2.0 } else { 0.0 };
        c(two, 0.0) + kmat[(i, j)] * (sg[i] * sg[j])
    });

    // x0 = δ/√2 is the displacement after the passive stage.
    let x0 = circuit.final_displacement();
    let phi_minus_one = CVec::from_iterator(m, phase.iter().map(|p| p - 1.0));
    let phi_x0 = x0.component_mul(&phi_minus_one);
    let phi_y0 = x0.conjugate().component_mul(&phi_minus_one);
    let a = u.transpose() * &phi_y0;
    let b = u.adjoint() * &phi_x0;
    let c0 = x0.transpose() * &phi_y0;
    let mut cvec = CVec::zeros(2 * m);
    cvec.rows_mut(0, m).copy_from(&a);
    cvec.rows_mut(m, m).copy_from(&b);
    for (ci, s) in cvec.iter_mut().zip(&sg) {
        *ci *= *s;
    }

    let lu = q.clone().lu();
    let sol = lu
        .solve(&cvec)
        .ok_or_else(|| Error::numeric(format!("singular Q matrix at k = {k}")))?;
    let quad = (cvec.transpose() * sol)[(0, 0)];

    let log_half_det = half_log_det(&q, lu.determinant())?;
    let log_norm: f64 = gamma.iter().map(|&g| 0.5 * g.ln_1p() + std::f64::consts::LN_2).sum();
    let log_val = c(log_norm, 0.0) - log_half_det + 0.5 * quad + c0[(0, 0)];
    let val = log_val.exp() * grid.offset_phase(k);
    if !val.re.is_finite() || !val.im.is_finite() {
        return Err(Error::numeric(format!("non-finite Fourier component at k = {k}")));
    }
    Ok(val)
}

/// `½ log det Q` on the branch `Π √λ_i` (principal roots).
///
/// The LU determinant is accurate but only fixes the argument mod 2π; the sum
/// of eigenvalue arguments picks the turn.
fn half_log_det(q: &CMat, det: C64) -> Result<C64> {
    if det.norm() == 0.0 || !det.norm().is_finite() {
        return Err(Error::numeric(format!("degenerate Q determinant {det}")));
    }
    let eig = Schur::new(q.clone())
        .eigenvalues()
        .ok_or_else(|| Error::numeric("eigenvalues of Q unavailable"))?;
    if eig.iter().any(|l| l.re <= 0.0) {
        return Err(Error::numeric("Q has an eigenvalue outside the right half plane"));
    }
    let arg_sum: f64 = eig.iter().map(|l| l.arg()).sum();
    let base = det.arg();
    let turns = ((arg_sum - base) / (2.0 * PI)).round();
    Ok(c(0.5 * det.norm().ln(), 0.5 * (base + 2.0 * PI * turns)))
}

/// Every Fourier component of a Gaussian spectrum.
pub fn fourier_series_gaussian(circuit: &GaussianCircuit, w: &WeightVector, grid: &SpectralGrid) -> Result<FourierSeries> {
    let values: Result<Vec<C64>> = (0..grid.d())
        .into_par_iter()
        .map(|k| exact_fourier_gaussian(circuit, w, grid, k))
        .collect();
    FourierSeries::new(*grid, values?)
}

/// Exact spectrum via the closed form and an inverse transform.
pub fn spectrum_gaussian(circuit: &GaussianCircuit, w: &WeightVector, grid: &SpectralGrid) -> Result<Spectrum> {
    inverse_dft(&fourier_series_gaussian(circuit, w, grid)?)
}

pub const IMAG_RESIDUE_ERROR: f64 = 1e-6;

/// `G(Ω) = (1/d) Σ_k G̃(k) e^{ikθΩ}`.
pub fn inverse_dft(f: &FourierSeries) -> Result<Spectrum> {
    let d = f.values.len();
    let mut buf = f.values.clone();
    FftPlanner::new().plan_fft_inverse(d).process(&mut buf);
    let scale = 1.0 / d as f64;
    let residue = buf.iter().fold(0.0f64, |m, z| m.max((z.im * scale).abs()));
    if residue > IMAG_RESIDUE_ERROR {
        return Err(Error::Inconsistent { residue, limit: IMAG_RESIDUE_ERROR });
    }
    Spectrum::new(f.grid, buf.iter().map(|z| z.re * scale).collect())
}

/// `G̃(k) = Σ_Ω G(Ω) e^{−ikθΩ}`.
pub fn forward_dft(s: &Spectrum) -> FourierSeries {
    let mut buf: Vec<C64> = s.values.iter().map(|&x| c(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    FourierSeries { grid: s.grid, values: buf }
}

/// Spectrum error guaranteed when every Fourier component is within `ε`.
///
/// By Parseval, `Σ_Ω |ΔG|² = (1/d) Σ_k |ΔG̃|² ≤ ε²`, which bounds every bin.
pub fn parseval_bound(per_component_error: f64, _grid: &SpectralGrid) -> f64 {
    per_component_error
}

/// Bloch-Messiah form of the Fourier-component operator for phases `φ`.
pub(crate) fn phase_operator_form(circuit: &GaussianCircuit, phases: &[f64]) -> Result<BlochMessiahForm> {
    let w: BogoliubovTransform = crate::gaussian::conjugated_phase_shift(circuit, phases)?;
    crate::gaussian::bloch_messiah(&w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::UnitaryMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_geometry() {
        let g = SpectralGrid::new(63);
        assert!((g.theta() * 64.0 - 2.0 * PI).abs() < 1e-12);
        assert_eq!(g.bin(70), 6);
        assert_eq!(SpectralGrid::with_offset(9, 3).bin(8), 1);
    }

    #[test]
    fn weight_vector_needs_positive_entry() {
        assert!(WeightVector::new(vec![0, 0]).is_err());
        assert!(WeightVector::new(vec![0, 2]).is_ok());
    }

    #[test]
    fn k_zero_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = UnitaryMatrix::haar(2, &mut rng);
        let circ = GaussianCircuit::new(u, vec![0.3, 0.7], vec![c(0.2, 0.1), c(0.0, -0.3)]).unwrap();
        let w = WeightVector::new(vec![1, 2]).unwrap();
        let v = exact_fourier_gaussian(&circ, &w, &SpectralGrid::new(31), 0).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        assert!(exact_fourier_gaussian(&circ, &w, &SpectralGrid::new(31), 32).is_err());
    }

    #[test]
    fn single_mode_squeezed_vacuum() {
        // p(2n) = tanh^{2n} r (2n)! / (4^n n!² cosh r)
        let r: f64 = 1.0;
        let circ = GaussianCircuit::new(UnitaryMatrix::identity(1), vec![r], vec![c(0.0, 0.0)]).unwrap();
        let grid = SpectralGrid::new(63);
        let w = WeightVector::new(vec![1]).unwrap();
        let k = 1;
        let mut expect = c(0.0, 0.0);
        let mut p = 1.0 / r.cosh();
        for n in 0..400 {
            expect += C64::from_polar(p, -grid.theta() * k as f64 * (2 * n) as f64);
            p *= r.tanh().powi(2) * ((2 * n + 1) * (2 * n + 2)) as f64 / (4.0 * ((n + 1) * (n + 1)) as f64);
        }
        let got = exact_fourier_gaussian(&circ, &w, &grid, k).unwrap();
        assert!((got - expect).norm() < 1e-10, "{got} vs {expect}");
    }

    #[test]
    fn hermitian_symmetry_of_exact_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = UnitaryMatrix::haar(3, &mut rng);
        let circ = GaussianCircuit::new(u, vec![0.4, 0.1, 0.9], vec![c(0.3, -0.2), c(0.1, 0.0), c(0.0, 0.4)]).unwrap();
        let w = WeightVector::new(vec![1, 3, 2]).unwrap();
        let grid = SpectralGrid::new(40);
        for k in 1..grid.d() {
            let a = exact_fourier_gaussian(&circ, &w, &grid, k).unwrap();
            let b = exact_fourier_gaussian(&circ, &w, &grid, grid.d() - k).unwrap();
            assert!((a - b.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn dft_examples() {
        let grid = SpectralGrid::new(15);
        let ones = FourierSeries::new(grid, vec![c(1.0, 0.0); 16]).unwrap();
        let s = inverse_dft(&ones).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-15 && s.values[1..].iter().all(|v| v.abs() < 1e-15));

        let shift: Vec<C64> = (0..16).map(|k| C64::from_polar(1.0, -grid.theta() * 5.0 * k as f64)).collect();
        let s = inverse_dft(&FourierSeries::new(grid, shift).unwrap()).unwrap();
        assert!((s.values[5] - 1.0).abs() < 1e-14);

        let uniform = Spectrum::new(grid, vec![1.0 / 16.0; 16]).unwrap();
        let f = forward_dft(&uniform);
        assert!((f.values[0] - c(1.0, 0.0)).norm() < 1e-15 && f.values[1..].iter().all(|v| v.norm() < 1e-15));

        let bad = FourierSeries::new(grid, vec![c(0.0, 1.0); 16]).unwrap();
        assert!(matches!(inverse_dft(&bad), Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn dft_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1usize, 7, 64, 1000, 4096] {
            let grid = SpectralGrid::new(d as u64 - 1);
            let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let s = Spectrum::new(grid, v).unwrap();
            let back = inverse_dft(&forward_dft(&s)).unwrap();
            assert!(back.max_abs_diff(&s) < 1e-12);
        }
    }

    #[test]
    fn parseval_examples() {
        let g = SpectralGrid::new(10);
        assert_eq!(parseval_bound(0.0, &g), 0.0);
        assert_eq!(parseval_bound(0.01, &g), 0.01);
    }
}
