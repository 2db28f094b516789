//! Loop hafnian of a rank-2 matrix in polynomial time, checked against
//! matching enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::hafnian::{loop_hafnian_exact, loop_hafnian_low_rank, low_rank_factor, IntegerPartitionSet};
use vibro::linalg::{c, random_complex};
use vibro::CVec;

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 12;
    let g = random_complex(n, 2, &mut rng) * c(0.4, 0.0);
    let sigma = &g * g.transpose();
    let mu = CVec::from_iterator(n, (0..n).map(|i| c(0.1 * i as f64, -0.05)));

    let f = low_rank_factor(&sigma, &mu)?;
    println!("numerical rank {}", f.rank());
    let fast = loop_hafnian_low_rank(&f)?;
    let slow = loop_hafnian_exact(&f.to_matrix())?;
    println!("low-rank  {fast:.10}");
    println!("matchings {slow:.10}");
    println!("tuples for n = {n}: all {}, even {}", IntegerPartitionSet::all(n, 2).len(), IntegerPartitionSet::even(n, 2).len());
    Ok(())
}
