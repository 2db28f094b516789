//! Hot-band structure: a thermal initial state, handled by doubling the modes,
//! fills bins at negative energies.

use vibro::gaussian::{GaussianCircuit, UnitaryMatrix};
use vibro::oracle::{enumerate_spectrum_thermal, EnumerationConfig};
use vibro::spectra::{finite_temperature_lift, spectrum_gaussian, ThermalWindow, WeightVector};
use vibro::C64;

fn main() -> vibro::Result<()> {
    let circuit = GaussianCircuit::new(UnitaryMatrix::identity(1), vec![0.5], vec![C64::new(0.6, 0.0)])?;
    let w_initial = WeightVector::new(vec![3])?;
    let w_final = WeightVector::new(vec![2])?;
    // Mean thermal occupation sinh²(0.4) ≈ 0.17.
    let s = [0.4];
    let window = ThermalWindow { thermal_cutoff: 20, omega_max_final: 40 };
    let lift = finite_temperature_lift(&circuit, &s, &w_initial, &w_final, window)?;
    let lifted = spectrum_gaussian(&lift.circuit, &lift.weights, &lift.grid)?;
    let direct =
        enumerate_spectrum_thermal(&circuit, &s, &w_initial, &w_final, &lift.grid, 20, EnumerationConfig::new(60, 1e-9)?)?;
    for (b, v) in lifted.values.iter().enumerate().filter(|(_, v)| **v > 1e-4) {
        println!("E = {:>4}  {v:.6}", b as i64 - lift.grid.offset as i64);
    }
    println!("lift vs thermal enumeration: {:.2e}", lifted.max_abs_diff(&direct.spectrum));
    Ok(())
}
