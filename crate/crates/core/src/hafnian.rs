//! Exact permanents, hafnians and loop hafnians.
//!
//! The enumeration routines are exponential and guarded by size limits; they
//! serve as oracles for the estimators. [`GaussianMoments`] computes loop
//! hafnians of matrices with repeated rows and columns through Taylor
//! coefficients of a Gaussian generating function, and
//! [`loop_hafnian_low_rank`] handles low-rank matrices by polynomial
//! expansion.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{c, max_abs, CMat, CVec, C64};

pub const PERMANENT_MAX: usize = 20;
pub const HAFNIAN_MAX: usize = 16;
pub const LOOP_HAFNIAN_MAX: usize = 14;
pub const LOW_RANK_MAX: usize = 6;

fn check_square(a: &CMat, what: &'static str) -> Result<usize> {
    Error::check_len(what, a.nrows(), a.ncols())?;
    Ok(a.nrows())
}

fn check_symmetric(a: &CMat, what: &str) -> Result<()> {
    let d = max_abs(&(a - a.transpose()));
    if d > 1e-10 * max_abs(a).max(1.0) {
        return Err(Error::domain(format!("{what} must be symmetric (asymmetry {d:.3e})")));
    }
    Ok(())
}

/// Glynn's formula with Gray-code updates, `O(2ⁿ n)`.
pub fn permanent_exact(a: &CMat) -> Result<C64> {
    let n = check_square(a, "permanent (columns)")?;
    if n > PERMANENT_MAX {
        return Err(Error::SizeGuard { what: "permanent", limit: PERMANENT_MAX, got: n });
    }
    if n == 0 {
        return Ok(c(1.0, 0.0));
    }
    // Row sums with every sign +1 initially.
    let mut sums: Vec<C64> = (0..n).map(|j| (0..n).map(|i| a[(i, j)]).sum()).collect();
    let mut signs = vec![1.0f64; n];
    let mut parity = 1.0;
    let mut total: C64 = sums.iter().product();
    let flips = 1u64 << (n - 1);
    for g in 1..flips {
        // Row whose sign changes: lowest set bit of g, offset by one because
        // row 0 keeps a fixed sign.
        let row = g.trailing_zeros() as usize + 1;
        signs[row] = -signs[row];
        let f = 2.0 * signs[row];
        for (j, s) in sums.iter_mut().enumerate() {
            *s += a[(row, j)] * f;
        }
        parity = -parity;
        total += sums.iter().product::<C64>() * parity;
    }
    Ok(total / flips as f64)
}

/// Sum over perfect matchings.
pub fn hafnian_exact(sigma: &CMat) -> Result<C64> {
    let n = check_square(sigma, "hafnian (columns)")?;
    if n > HAFNIAN_MAX {
        return Err(Error::SizeGuard { what: "hafnian", limit: HAFNIAN_MAX, got: n });
    }
    if n % 2 == 1 {
        return Ok(c(0.0, 0.0));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(matchings(sigma, &idx, false))
}

/// Sum over matchings in which unmatched vertices take their diagonal weight.
pub fn loop_hafnian_exact(sigma_tilde: &CMat) -> Result<C64> {
    let n = check_square(sigma_tilde, "loop hafnian (columns)")?;
    if n > LOOP_HAFNIAN_MAX {
        return Err(Error::SizeGuard { what: "loop hafnian", limit: LOOP_HAFNIAN_MAX, got: n });
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(matchings(sigma_tilde, &idx, true))
}

fn matchings(s: &CMat, idx: &[usize], loops: bool) -> C64 {
    let Some((&first, rest)) = idx.split_first() else {
        return c(1.0, 0.0);
    };
    let mut total = c(0.0, 0.0);
    if loops {
        let w = s[(first, first)];
        if w != c(0.0, 0.0) {
            total += w * matchings(s, rest, loops);
        }
    }
    let mut remaining: Vec<usize> = Vec::with_capacity(rest.len().saturating_sub(1));
    for (pos, &j) in rest.iter().enumerate() {
        let w = s[(first, j)];
        if w == c(0.0, 0.0) {
            continue;
        }
        remaining.clear();
        remaining.extend_from_slice(&rest[..pos]);
        remaining.extend_from_slice(&rest[pos + 1..]);
        total += w * matchings(s, &remaining, loops);
    }
    total
}

/// Indices `0..len` with index `i` repeated `reps[i]` times.
pub fn repeated_indices(reps: &[usize]) -> Vec<usize> {
    reps.iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i, k))
        .collect()
}

/// Repeat row and column `i` of `b` `reps[i]` times.
///
/// For a two-block matrix pass the concatenated repetition vector `(n, n)`.
pub fn repeat_rows_cols(b: &CMat, reps: &[usize]) -> Result<CMat> {
    let n = check_square(b, "repeat_rows_cols (columns)")?;
    Error::check_len("repetition vector", n, reps.len())?;
    let idx = repeated_indices(reps);
    Ok(CMat::from_fn(idx.len(), idx.len(), |i, j| b[(idx[i], idx[j])]))
}

/// Taylor coefficients of `exp(½ xᵀ S x + μᵀ x)` inside a box of exponents.
///
/// The coefficient of `x^α` equals `lhaf(S̃_α)/α!`, where `S̃_α` repeats row
/// and column `i` of `S` `α_i` times and carries `μ` (repeated) on its
/// diagonal. The table is filled by the recurrence obtained from
/// `∂_j F = (μ_j + (S x)_j) F`.
#[derive(Clone, Debug)]
pub struct GaussianMoments {
    bounds: Vec<usize>,
    strides: Vec<usize>,
    coeffs: Vec<C64>,
}

impl GaussianMoments {
    /// Coefficients for every `α ≤ bounds` with `|α| ≤ max_total`.
    pub fn new(s: &CMat, mu: &CVec, bounds: &[usize], max_total: usize) -> Result<Self> {
        let dim = check_square(s, "moment matrix (columns)")?;
        Error::check_len("moment mean", dim, mu.len())?;
        Error::check_len("moment bounds", dim, bounds.len())?;
        let mut strides = vec![1usize; dim];
        let mut size: usize = 1;
        for i in 0..dim {
            strides[i] = size;
            size = size
                .checked_mul(bounds[i] + 1)
                .filter(|&s| s <= 50_000_000)
                .ok_or(Error::SizeGuard { what: "moment table", limit: 50_000_000, got: usize::MAX })?;
        }
        let mut coeffs = vec![c(0.0, 0.0); size];
        coeffs[0] = c(1.0, 0.0);
        let mut alpha = vec![0usize; dim];
        let mut total = 0usize;
        for lin in 1..size {
            // Odometer increment of alpha in stride order.
            let mut i = 0;
            loop {
                if alpha[i] < bounds[i] {
                    alpha[i] += 1;
                    total += 1;
                    break;
                }
                total -= alpha[i];
                alpha[i] = 0;
                i += 1;
            }
            if total > max_total {
                continue;
            }
            let j = alpha.iter().position(|&a| a > 0).unwrap();
            let base = lin - strides[j];
            let mut acc = mu[j] * coeffs[base];
            for l in 0..dim {
                if alpha[l] > usize::from(l == j) {
                    acc += s[(j, l)] * coeffs[base - strides[l]];
                }
            }
            coeffs[lin] = acc / alpha[j] as f64;
        }
        Ok(GaussianMoments { bounds: bounds.to_vec(), strides, coeffs })
    }

    /// Taylor coefficient of `x^α`.
    pub fn coefficient(&self, alpha: &[usize]) -> C64 {
        debug_assert!(alpha.iter().zip(&self.bounds).all(|(a, b)| a <= b));
        let lin: usize = alpha.iter().zip(&self.strides).map(|(a, s)| a * s).sum();
        self.coeffs[lin]
    }

    /// `lhaf(S̃_α)`.
    pub fn loop_hafnian(&self, alpha: &[usize]) -> C64 {
        self.coefficient(alpha) * alpha.iter().map(|&a| factorial(a)).product::<f64>()
    }
}

/// Loop hafnian of `S` with row/column `i` repeated `reps[i]` times and
/// `μ_i` on the repeated diagonal.
pub fn loop_hafnian_repeated(s: &CMat, mu: &CVec, reps: &[usize]) -> Result<C64> {
    let total = reps.iter().sum();
    Ok(GaussianMoments::new(s, mu, reps, total)?.loop_hafnian(reps))
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn double_factorial(a: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = a;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `Σ = G Gᵀ` with loop weights `μ`.
#[derive(Clone, Debug)]
pub struct LowRankFactor {
    pub g: CMat,
    pub mu: CVec,
}

impl LowRankFactor {
    pub fn new(g: CMat, mu: CVec) -> Result<Self> {
        Error::check_len("loop weights", g.nrows(), mu.len())?;
        Ok(LowRankFactor { g, mu })
    }

    pub fn rank(&self) -> usize {
        self.g.ncols()
    }

    pub fn size(&self) -> usize {
        self.g.nrows()
    }

    /// `G Gᵀ` with `μ` on the diagonal.
    pub fn to_matrix(&self) -> CMat {
        let mut s = &self.g * self.g.transpose();
        for i in 0..self.size() {
            s[(i, i)] = self.mu[i];
        }
        s
    }
}

/// Singular values below this fraction of the largest are dropped.
const RANK_TOL: f64 = 1e-10;

/// Takagi-style factorization `Σ = G Gᵀ` truncated to the numerical rank.
pub fn low_rank_factor(sigma: &CMat, mu: &CVec) -> Result<LowRankFactor> {
    let n = check_square(sigma, "low-rank source (columns)")?;
    Error::check_len("loop weights", n, mu.len())?;
    check_symmetric(sigma, "low-rank source")?;
    let svd = sigma.clone().svd(true, true);
    let (w0, vh0) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let smax = order.first().map_or(0.0, |&i| svd.singular_values[i]);
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| svd.singular_values[i] > RANK_TOL * smax.max(1.0))
        .collect();
    let r = kept.len();
    let w = CMat::from_fn(n, r, |i, j| w0[(i, kept[j])]);
    let vh = CMat::from_fn(r, n, |i, j| vh0[(kept[i], j)]);
    let s: Vec<f64> = kept.iter().map(|&i| svd.singular_values[i]).collect();
    // Σ = W S Vh and Σ = Σᵀ give Vhᵀ = W Z with Z block-diagonal symmetric
    // unitary over equal singular values, hence Σ = W (S Zᵀ) Wᵀ.
    let z = w.adjoint() * vh.transpose();
    let mut x = CMat::zeros(r, r);
    let mut start = 0;
    for i in 1..=r {
        if i == r || s[i - 1] - s[i] > 1e-9 * s[start] {
            let len = i - start;
            let block = z.view((start, start), (len, len)).transpose();
            let root = crate::linalg::symmetric_unitary_sqrt(&block);
            let scaled = root * c(s[start].sqrt(), 0.0);
            x.view_mut((start, start), (len, len)).copy_from(&scaled);
            start = i;
        }
    }
    let g = w * x;
    let residual = max_abs(&(&g * g.transpose() - sigma));
    if residual > 1e-8 * smax.max(1.0) {
        return Err(Error::numeric(format!("Takagi factorization residual {residual:.3e}")));
    }
    LowRankFactor::new(g, mu.clone())
}

/// Loop hafnian of `G Gᵀ` with loop weights `μ` by expanding
/// `Π_i (Σ_j g_ij x_j + μ_i)` and pairing even powers through Gaussian moments.
pub fn loop_hafnian_low_rank(f: &LowRankFactor) -> Result<C64> {
    let r = f.rank();
    if r > LOW_RANK_MAX {
        return Err(Error::SizeGuard { what: "low-rank loop hafnian rank", limit: LOW_RANK_MAX, got: r });
    }
    type Key = [u16; LOW_RANK_MAX];
    let mut poly: HashMap<Key, C64> = HashMap::from([([0u16; LOW_RANK_MAX], c(1.0, 0.0))]);
    for i in 0..f.size() {
        let mut next: HashMap<Key, C64> = HashMap::with_capacity(poly.len() * (r + 1));
        for (key, &coef) in &poly {
            if f.mu[i] != c(0.0, 0.0) {
                *next.entry(*key).or_default() += coef * f.mu[i];
            }
            for j in 0..r {
                let g = f.g[(i, j)];
                if g == c(0.0, 0.0) {
                    continue;
                }
                let mut k = *key;
                k[j] += 1;
                *next.entry(k).or_default() += coef * g;
            }
        }
        poly = next;
    }
    let mut total = c(0.0, 0.0);
    let mut terms: Vec<(&Key, &C64)> = poly.iter().filter(|(k, _)| k.iter().all(|e| e % 2 == 0)).collect();
    // Fixed summation order keeps the result independent of hash seeds.
    terms.sort_by(|a, b| a.0.cmp(b.0));
    for (key, coef) in terms {
        let moment: f64 = key[..r].iter().map(|&e| double_factorial(e as i64 - 1)).product();
        total += coef * moment;
    }
    Ok(total)
}

/// Nonnegative integer `r`-tuples summing to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerPartitionSet {
    pub target: usize,
    pub parts: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl IntegerPartitionSet {
    pub fn all(target: usize, parts: usize) -> Self {
        let mut tuples = Vec::new();
        let mut cur = vec![0; parts];
        fill_partitions(target, 0, &mut cur, &mut tuples, 1);
        IntegerPartitionSet { target, parts, tuples }
    }

    /// The subset whose entries are all even.
    pub fn even(target: usize, parts: usize) -> Self {
        let mut tuples = Vec::new();
        if target % 2 == 0 {
            let mut cur = vec![0; parts];
            fill_partitions(target, 0, &mut cur, &mut tuples, 2);
        }
        IntegerPartitionSet { target, parts, tuples }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

fn fill_partitions(left: usize, pos: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, step: usize) {
    if pos + 1 == cur.len() {
        if left % step == 0 {
            cur[pos] = left;
            out.push(cur.clone());
        }
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    let mut v = 0;
    while v <= left {
        cur[pos] = v;
        fill_partitions(left - v, pos + 1, cur, out, step);
        v += step;
    }
}
