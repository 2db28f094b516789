//! Finite-temperature spectra by mode doubling.
//!
//! A thermal initial state is the reduced state of two-mode squeezed vacuum.
//! Detecting the auxiliary partner modes reveals the initial vibrational
//! quanta `n`, whose energy is subtracted from the final energy: the joint
//! outcome `(m, n)` lands at `ω'·m − ω·n`. Negative energies are folded onto
//! a nonnegative grid by weighting auxiliary modes with `d − ω` and shifting
//! bins by a fixed offset.

use super::{SpectralGrid, WeightVector};
use crate::error::{Error, Result};
use crate::gaussian::{bloch_messiah, compose, BogoliubovTransform, GaussianCircuit};

/// Energy window of the lifted spectrum: `[−thermal_cutoff·max ω, omega_max_final]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThermalWindow {
    /// Largest number of thermal quanta per mode whose energy must fit below zero.
    pub thermal_cutoff: u64,
    pub omega_max_final: u64,
}

#[derive(Clone, Debug)]
pub struct ThermalLift {
    /// `2M` modes: the original ones followed by the auxiliary partners.
    pub circuit: GaussianCircuit,
    pub weights: WeightVector,
    /// Bin `Ω_shift + E` holds energy `E`; `grid.offset = Ω_shift`.
    pub grid: SpectralGrid,
}

/// Lift a thermal problem with two-mode squeezing `s` (thermal occupation
/// `sinh² s`) to a zero-temperature problem on `2M` modes.
pub fn finite_temperature_lift(
    circuit: &GaussianCircuit,
    tm_squeezing: &[f64],
    w_initial: &WeightVector,
    w_final: &WeightVector,
    window: ThermalWindow,
) -> Result<ThermalLift> {
    let m = circuit.modes();
    Error::check_len("two-mode squeezing", m, tm_squeezing.len())?;
    Error::check_len("initial weights", m, w_initial.len())?;
    Error::check_len("final weights", m, w_final.len())?;
    if tm_squeezing.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::domain("two-mode squeezing must be finite and ≥ 0"));
    }
    let shift = window
        .thermal_cutoff
        .checked_mul(w_initial.max())
        .ok_or_else(|| Error::domain("thermal window overflows"))?;
    let omega_max = window
        .omega_max_final
        .checked_add(shift)
        .ok_or_else(|| Error::domain("thermal window overflows"))?;
    let grid = SpectralGrid::with_offset(omega_max, shift);
    let d = grid.d();
    let weights: Vec<u64> = w_final
        .as_slice()
        .iter()
        .copied()
        .chain(w_initial.as_slice().iter().map(|&w| (d - w % d) % d))
        .collect();

    let prep = circuit.to_transform().extend(m);
    let total = compose(&prep, &BogoliubovTransform::two_mode_squeezer(tm_squeezing))?;
    let lifted = bloch_messiah(&total)?.vacuum_circuit();
    Ok(ThermalLift { circuit: lifted, weights: WeightVector::new(weights)?, grid })
}
