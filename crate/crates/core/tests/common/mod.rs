//! Brute-force reference: states in a truncated Fock space, evolved by
//! exponentiating the generators of each Gaussian operation.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;
use rand::Rng;

pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Occupations with total photon number at most `cutoff`.
pub struct FockSpace {
    pub modes: usize,
    pub cutoff: usize,
    pub basis: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl FockSpace {
    pub fn new(modes: usize, cutoff: usize) -> Self {
        let mut basis = vec![vec![]];
        for _ in 0..modes {
            basis = basis
                .into_iter()
                .flat_map(|b: Vec<usize>| {
                    let used: usize = b.iter().sum();
                    (0..=cutoff - used).map(move |k| {
                        let mut nb = b.clone();
                        nb.push(k);
                        nb
                    })
                })
                .collect();
        }
        let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        FockSpace { modes, cutoff, basis, index }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    pub fn basis_state(&self, occ: &[usize]) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[self.index_of(occ).expect("state outside truncation")] = cx(1.0, 0.0);
        v
    }

    /// Matrix of a product of ladder operators; `ops` is applied right to
    /// left, `(j, true)` raising mode `j`.
    pub fn ladder(&self, ops: &[(usize, bool)]) -> Mat {
        let mut out = Mat::zeros(self.dim(), self.dim());
        for (col, occ) in self.basis.iter().enumerate() {
            let mut o = occ.clone();
            let mut coef = 1.0;
            for &(j, raise) in ops.iter().rev() {
                if raise {
                    o[j] += 1;
                    coef *= (o[j] as f64).sqrt();
                } else {
                    if o[j] == 0 {
                        coef = 0.0;
                        break;
                    }
                    coef *= (o[j] as f64).sqrt();
                    o[j] -= 1;
                }
            }
            if coef != 0.0 {
                if let Some(row) = self.index_of(&o) {
                    out[(row, col)] = cx(coef, 0.0);
                }
            }
        }
        out
    }

    pub fn squeeze_generator(&self, r: &[f64]) -> Mat {
        let mut g = Mat::zeros(self.dim(), self.dim());
        for (j, &rj) in r.iter().enumerate() {
            g += (self.ladder(&[(j, true), (j, true)]) - self.ladder(&[(j, false), (j, false)])) * cx(0.5 * rj, 0.0);
        }
        g
    }

    pub fn displacement_generator(&self, alpha: &[C64]) -> Mat {
        let mut g = Mat::zeros(self.dim(), self.dim());
        for (j, &aj) in alpha.iter().enumerate() {
            g += self.ladder(&[(j, true)]) * aj - self.ladder(&[(j, false)]) * aj.conj();
        }
        g
    }

    /// `i Σ h_jl a_j† a_l`; exponentiates to the passive operator of `exp(i h)`.
    pub fn passive_generator(&self, h: &Mat) -> Mat {
        let mut g = Mat::zeros(self.dim(), self.dim());
        for j in 0..self.modes {
            for l in 0..self.modes {
                g += self.ladder(&[(j, true), (l, false)]) * (cx(0.0, 1.0) * h[(j, l)]);
            }
        }
        g
    }

    /// `e^{i Σ φ_j n_j}` applied to `v`.
    pub fn apply_phases(&self, phases: &[f64], v: &Vector) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.basis.iter().zip(v.iter()).map(|(occ, &x)| {
                let ph: f64 = occ.iter().zip(phases).map(|(&n, &p)| n as f64 * p).sum();
                x * C64::from_polar(1.0, ph)
            }),
        )
    }
}

/// `exp(g) v` by a Taylor series on steps with `‖g‖∞ ≤ 1/2`.
pub fn expm_apply(g: &Mat, v: &Vector) -> Vector {
    let n = g.nrows();
    let entries: Vec<(usize, usize, C64)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| g[(i, j)].norm() != 0.0)
        .map(|(i, j)| (i, j, g[(i, j)]))
        .collect();
    let mut rows = vec![0.0f64; n];
    for &(i, _, z) in &entries {
        rows[i] += z.norm();
    }
    let norm = rows.iter().copied().fold(0.0, f64::max);
    let steps = (2.0 * norm).ceil().max(1.0) as usize;
    let scale = 1.0 / steps as f64;
    let apply = |x: &Vector| {
        let mut y = Vector::zeros(n);
        for &(i, j, z) in &entries {
            y[i] += z * x[j];
        }
        y * cx(scale, 0.0)
    };
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..60 {
            term = apply(&term) / cx(k as f64, 0.0);
            acc += &term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}

/// Probability within `margin` photons of the truncation edge.
pub fn edge_mass(space: &FockSpace, psi: &Vector, margin: usize) -> f64 {
    space
        .basis
        .iter()
        .zip(psi.iter())
        .filter(|(occ, _)| occ.iter().sum::<usize>() + margin > space.cutoff)
        .map(|(_, x)| x.norm_sqr())
        .sum()
}

pub fn random_hermitian<R: Rng>(m: usize, rng: &mut R) -> Mat {
    let x = Mat::from_fn(m, m, |_, _| cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&x + x.adjoint()) * cx(0.5, 0.0)
}

/// `exp(i h)` by eigendecomposition.
pub fn unitary_from_hermitian(h: &Mat) -> Mat {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let d = Mat::from_diagonal(&Vector::from_iterator(h.nrows(), eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, l))));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `exp(i a†ha) D(α) S(r) |n⟩` in a space truncated at `cutoff` photons.
pub fn prepared_state(space: &FockSpace, h: &Mat, r: &[f64], alpha: &[C64], n: &[usize]) -> Vector {
    let v = space.basis_state(n);
    let v = expm_apply(&space.squeeze_generator(r), &v);
    let v = expm_apply(&space.displacement_generator(alpha), &v);
    expm_apply(&space.passive_generator(h), &v)
}

/// `⟨ψ| e^{i Σ φ_j n_j} |ψ⟩`.
pub fn phase_expectation(space: &FockSpace, psi: &Vector, phases: &[f64]) -> C64 {
    psi.dotc(&space.apply_phases(phases, psi))
}

/// Spectrum of `|ψ⟩` binned at `(ω·m + offset) mod d`.
pub fn spectrum_of(space: &FockSpace, psi: &Vector, w: &[u64], d: u64, offset: u64) -> Vec<f64> {
    let mut s = vec![0.0; d as usize];
    for (occ, x) in space.basis.iter().zip(psi.iter()) {
        let e: u64 = occ.iter().zip(w).map(|(&n, &wj)| n as u64 * wj).sum();
        s[((e + offset) % d) as usize] += x.norm_sqr();
    }
    s
}

/// Permanent by direct expansion over permutations.
pub fn permanent_naive(a: &Mat) -> C64 {
    fn rec(a: &Mat, row: usize, used: &mut Vec<bool>) -> C64 {
        if row == a.nrows() {
            return cx(1.0, 0.0);
        }
        let mut acc = cx(0.0, 0.0);
        for col in 0..a.ncols() {
            if !used[col] {
                used[col] = true;
                acc += a[(row, col)] * rec(a, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    rec(a, 0, &mut vec![false; a.ncols()])
}

/// Loop hafnian by recursion over the first index: it either takes its loop
/// or pairs with some later index.
pub fn loop_hafnian_naive(a: &Mat) -> C64 {
    fn rec(a: &Mat, idx: &[usize]) -> C64 {
        match idx.split_first() {
            None => cx(1.0, 0.0),
            Some((&i, rest)) => {
                let mut acc = a[(i, i)] * rec(a, rest);
                for (p, &j) in rest.iter().enumerate() {
                    let mut others = rest.to_vec();
                    others.remove(p);
                    acc += a[(i, j)] * rec(a, &others);
                }
                acc
            }
        }
    }
    rec(a, &(0..a.nrows()).collect::<Vec<_>>())
}

/// Hafnian: loop hafnian with the diagonal removed.
pub fn hafnian_naive(a: &Mat) -> C64 {
    let mut b = a.clone();
    b.fill_diagonal(cx(0.0, 0.0));
    loop_hafnian_naive(&b)
}
