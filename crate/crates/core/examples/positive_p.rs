//! Monte Carlo over the positive P-function of squeezed vacuum, compared with
//! the closed form.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::gaussian::{GaussianCircuit, UnitaryMatrix};
use vibro::spectra::{exact_fourier_gaussian, montecarlo_fourier_positive_p, SpectralGrid, WeightVector};
use vibro::C64;

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let circuit = GaussianCircuit::new(UnitaryMatrix::haar(2, &mut rng), vec![0.3, 0.45], vec![C64::new(0.0, 0.0); 2])?;
    let w = WeightVector::new(vec![1, 3])?;
    let grid = SpectralGrid::new(20);
    for k in [1, 4, 9] {
        let exact = exact_fourier_gaussian(&circuit, &w, &grid, k)?;
        let est = montecarlo_fourier_positive_p(&circuit, &w, &grid, k, 1_000_000, k)?;
        let z = (est.value - exact).norm() / est.stderr;
        println!("k = {k}: exact {exact:.5}  P-sampling {:.5}  ({z:.2} stderr)", est.value);
    }
    Ok(())
}
