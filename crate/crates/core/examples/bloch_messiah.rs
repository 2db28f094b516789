//! Decompose a Gaussian unitary into passive · squeezers · passive and put it
//! back together.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibro::gaussian::{bloch_messiah, compose, BogoliubovTransform, UnitaryMatrix};
use vibro::C64;

fn main() -> vibro::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u1 = UnitaryMatrix::haar(4, &mut rng);
    let u2 = UnitaryMatrix::haar(4, &mut rng);
    let t = compose(
        &BogoliubovTransform::passive(&u2),
        &compose(&BogoliubovTransform::squeezer(&[0.2, 0.9, 0.5, 0.0]), &BogoliubovTransform::passive(&u1))?,
    )?;
    let t = compose(&BogoliubovTransform::displacement(&[C64::new(0.5, 0.0); 4]), &t)?;
    let form = bloch_messiah(&t)?;
    println!("squeezing (sorted) {:?}", form.r);
    println!("recomposition error {:.2e}", form.recompose().distance(&t));
    let (d1, d2) = t.symplectic_defect();
    println!("symplectic defects {d1:.1e} {d2:.1e}");
    Ok(())
}
