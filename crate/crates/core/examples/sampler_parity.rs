//! Spectrum error of the randomized estimator against an emulated boson
//! sampler drawing the same number of samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::estimators::{fourier_series_fock, plan_samples, FockVector, Sampling};
use vibro::gaussian::UnitaryMatrix;
use vibro::oracle::{emulate_sampler, enumerate_spectrum_fock};
use vibro::spectra::{inverse_dft, SpectralGrid, WeightVector};

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let u = UnitaryMatrix::haar(3, &mut rng);
    let w = WeightVector::new(vec![1, 2, 3])?;
    let n = FockVector::new(vec![1, 1, 0]);
    let grid = SpectralGrid::new(6);
    let truth = enumerate_spectrum_fock(&u, &n, &w, &grid)?;
    let n_samples = plan_samples(0.05, 0.99)?;
    println!("N = {n_samples}");
    println!("{:>5} {:>12} {:>12}", "seed", "estimator", "sampler");
    for seed in 0..10 {
        let (series, _) = fourier_series_fock(&u, &w, &grid, &n, Sampling::monte_carlo(n_samples, seed))?;
        let est = inverse_dft(&series)?.max_abs_diff(&truth);
        let (_, hist) = emulate_sampler(&truth, n_samples, seed)?;
        println!("{seed:>5} {est:>12.3e} {:>12.3e}", hist.max_abs_diff(&truth));
    }
    Ok(())
}
