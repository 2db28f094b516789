//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0, |acc: f64, &s| acc.max(s))
}

pub fn diag_real(d: &[f64]) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(d.len(), d.iter().map(|&x| c(x, 0.0))))
}

pub fn diag_complex(d: &[C64]) -> CMat {
    CMat::from_diagonal(&CVec::from_column_slice(d))
}

/// `‖M†M − I‖_max`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMat::identity(n, n)))
}

/// Unitary factor of the polar decomposition, `M = P·H`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// the R diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) / std::f64::consts::SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random complex matrix with standard-normal real and imaginary parts.
pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Random complex symmetric matrix.
pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let a = random_complex(n, n, rng);
    (&a + a.transpose()) * c(0.5, 0.0)
}

/// Factor `X` with `X·Xᵀ = Y` for a complex symmetric unitary `Y`, `X` unitary.
///
/// Real and imaginary parts of a symmetric unitary commute, so one real
/// orthogonal basis diagonalises both; a generic real combination of the two
/// finds it.
pub(crate) fn symmetric_unitary_sqrt(y: &CMat) -> CMat {
    let n = y.nrows();
    if n == 1 {
        return CMat::from_element(1, 1, y[(0, 0)].sqrt());
    }
    let ys = (y + y.transpose()) * c(0.5, 0.0);
    let p = ys.map(|z| z.re);
    let q = ys.map(|z| z.im);
    // Two distinct phases can share a projection onto any one direction, so
    // try a few irrational mixing weights and keep the most diagonal result.
    let mut best: Option<(f64, CMat)> = None;
    for kappa in [0.577_215_664_901_532_9, -std::f64::consts::SQRT_2, std::f64::consts::E] {
        let eig = nalgebra::SymmetricEigen::new(&p + &q * kappa);
        let o = eig.eigenvectors.map(|x| c(x, 0.0));
        let d = o.transpose() * &ys * &o;
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        let sqrt_d =
            CMat::from_diagonal(&CVec::from_iterator(n, (0..n).map(|i| d[(i, i)].sqrt())));
        let x = o * sqrt_d;
        if best.as_ref().is_none_or(|(b, _)| off < *b) {
            best = Some((off, x));
        }
        if off < 1e-12 {
            break;
        }
    }
    best.unwrap().1
}
