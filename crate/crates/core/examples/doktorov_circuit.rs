//! Franck-Condon profile of a two-mode molecule: frequency change, Duschinsky
//! mixing and a displacement of the equilibrium geometry.

use vibro::gaussian::{doktorov_to_circuit, DoktorovSpec, UnitaryMatrix};
use vibro::linalg::c;
use vibro::spectra::{spectrum_gaussian, SpectralGrid, WeightVector};
use vibro::CMat;

fn main() -> vibro::Result<()> {
    let angle: f64 = 0.3;
    let rot = CMat::from_row_slice(
        2,
        2,
        &[c(angle.cos(), 0.0), c(-angle.sin(), 0.0), c(angle.sin(), 0.0), c(angle.cos(), 0.0)],
    );
    let spec = DoktorovSpec::new(vec![1.0, 1.6], vec![0.8, 1.5], UnitaryMatrix::new(rot)?, vec![0.9, -0.4])?;
    let circuit = doktorov_to_circuit(&spec)?;
    println!("squeezing {:?}", circuit.squeezing());
    println!("displacement {:?}", circuit.displacement());

    // Final-state frequencies 0.8 and 1.5 in units of 0.1.
    let w = WeightVector::new(vec![8, 15])?;
    let grid = SpectralGrid::new(120);
    let s = spectrum_gaussian(&circuit, &w, &grid)?;
    let peak = s.values.iter().copied().fold(0.0, f64::max);
    for (b, v) in s.values.iter().enumerate().filter(|(_, v)| **v > 1e-3) {
        println!("{:>5.1} {v:.5} {}", b as f64 / 10.0, "#".repeat((60.0 * v / peak) as usize));
    }
    println!("captured mass {:.6}", s.total());
    Ok(())
}
