//! Peaks of a spectrum on a 2^17-bin grid from a few thousand Fourier
//! components, without a dense transform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::estimators::FockVector;
use vibro::gaussian::UnitaryMatrix;
use vibro::oracle::enumerate_spectrum_fock;
use vibro::sparse::{peaks_fock_pipeline, PipelineEstimator, SparseRecoveryConfig};
use vibro::spectra::{SpectralGrid, WeightVector};

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let u = UnitaryMatrix::haar(3, &mut rng);
    let w = WeightVector::new(vec![1, 1 << 15, 1 << 16])?;
    let grid = SpectralGrid::new(1 << 17);
    let n = FockVector::new(vec![1, 1, 0]);

    let cfg = SparseRecoveryConfig::for_sparsity(grid.d().next_power_of_two(), 6, 1, 1e-3);
    let peaks = peaks_fock_pipeline(&u, &w, &grid, &n, &cfg, PipelineEstimator::Exhaustive)?;
    let dense = enumerate_spectrum_fock(&u, &n, &w, &grid)?;
    println!("{} oracle calls on a grid of {} bins", peaks.oracle_calls, grid.d());
    for (bin, v) in &peaks.entries {
        println!("bin {bin:>6}: {v:.6} (enumeration {:.6})", dense.values[*bin as usize]);
    }
    Ok(())
}
