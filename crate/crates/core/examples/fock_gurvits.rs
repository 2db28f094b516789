//! Fourier components of a three-photon Fock input through a random
//! interferometer: randomized permanent estimates against the exact sum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::estimators::{fourier_fock, plan_samples, FockVector, Sampling};
use vibro::gaussian::UnitaryMatrix;
use vibro::spectra::{SpectralGrid, WeightVector};

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = UnitaryMatrix::haar(4, &mut rng);
    let w = WeightVector::new(vec![1, 2, 3, 5])?;
    let grid = SpectralGrid::new(15);
    let n = FockVector::new(vec![1, 1, 0, 1]);
    let n_samples = plan_samples(0.02, 0.99)?;
    println!("{n_samples} samples per component");
    println!("{:>3} {:>24} {:>24} {:>9} {:>9}", "k", "exact", "estimate", "stderr", "bound");
    for k in 0..grid.d() {
        let exact = fourier_fock(&u, &w, &grid, k, &n, Sampling::Exhaustive)?.value;
        let est = fourier_fock(&u, &w, &grid, k, &n, Sampling::monte_carlo(n_samples, k))?;
        println!(
            "{k:>3} {:>24} {:>24} {:>9.2e} {:>9.2e}",
            format!("{:.5}", exact),
            format!("{:.5}", est.value),
            est.stderr,
            est.analytic_bound.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
