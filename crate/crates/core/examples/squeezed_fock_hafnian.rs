//! Single photons on top of squeezed and displaced modes: the Fourier
//! components are loop hafnians, estimated with Kan's formula.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::estimators::{fourier_fock_squeezed, FockVector, Sampling};
use vibro::gaussian::{GaussianCircuit, UnitaryMatrix};
use vibro::spectra::{SpectralGrid, WeightVector};
use vibro::C64;

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let circuit = GaussianCircuit::new(
        UnitaryMatrix::haar(3, &mut rng),
        vec![0.4, 0.2, 0.6],
        vec![C64::new(0.3, 0.0), C64::new(0.0, 0.0), C64::new(-0.1, 0.2)],
    )?;
    let w = WeightVector::new(vec![1, 2, 4])?;
    let grid = SpectralGrid::new(30);
    let n = FockVector::new(vec![1, 0, 2]);
    for k in [1, 5, 12] {
        let exact = fourier_fock_squeezed(&circuit, &w, &grid, k, &n, Sampling::Exhaustive)?.value;
        let est = fourier_fock_squeezed(&circuit, &w, &grid, k, &n, Sampling::monte_carlo(200_000, k))?;
        println!("k = {k:>2}: exact {exact:.6}  estimate {:.6} ± {:.1e}", est.value, est.stderr);
    }
    Ok(())
}
