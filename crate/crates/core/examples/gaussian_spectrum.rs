//! Zero-temperature spectrum of a displaced two-mode squeezed state, by the
//! closed form and by brute-force enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::estimators::FockVector;
use vibro::gaussian::{GaussianCircuit, UnitaryMatrix};
use vibro::oracle::enumerate_spectrum_gaussian_auto;
use vibro::spectra::{spectrum_gaussian, SpectralGrid, WeightVector};
use vibro::C64;

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let circuit = GaussianCircuit::new(
        UnitaryMatrix::haar(2, &mut rng),
        vec![0.3, 0.7],
        vec![C64::new(0.2, 0.1), C64::new(0.0, -0.3)],
    )?;
    let w = WeightVector::new(vec![1, 2])?;
    let grid = SpectralGrid::new(24);

    let exact = spectrum_gaussian(&circuit, &w, &grid)?;
    let oracle = enumerate_spectrum_gaussian_auto(&circuit, &FockVector::vacuum(2), &w, &grid, 1e-10)?;

    println!("{:>4} {:>14} {:>14}", "bin", "closed form", "enumeration");
    for (b, (x, y)) in exact.values.iter().zip(&oracle.spectrum.values).enumerate() {
        println!("{b:>4} {x:>14.10} {y:>14.10}");
    }
    println!(
        "max diff {:.2e} (oracle cutoff {}, {} outcomes)",
        exact.max_abs_diff(&oracle.spectrum),
        oracle.photon_cutoff,
        oracle.outcomes
    );
    Ok(())
}
