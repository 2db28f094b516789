//! Gaussian unitaries in the complex (a, a†) representation.
//!
//! A transform `Ŵ` acts on the annihilation operators as
//! `Ŵ† a Ŵ = A a + B a† + ξ`. Passive circuits have `B = 0`, the squeezer
//! `S(r) = exp(½ r (a†² − a²))` has `A = cosh r`, `B = sinh r`, and the
//! displacement `D(α)` has `ξ = α`.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{
    c, diag_complex, diag_real, max_abs, max_abs_vec, polar_unitary, symmetric_unitary_sqrt,
    unitarity_defect, CMat, CVec, C64,
};

pub const UNITARY_TOL: f64 = 1e-10;
pub const SYMPLECTIC_TOL: f64 = 1e-8;

/// Square matrix checked for unitarity at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMat);

impl UnitaryMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                what: "unitary (columns)",
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if !crate::linalg::is_finite(&m) {
            return Err(Error::numeric("unitary has non-finite entries"));
        }
        let defect = unitarity_defect(&m);
        if defect > UNITARY_TOL {
            return Err(Error::numeric(format!(
                "matrix is not unitary: ‖U†U − I‖ = {defect:.3e}"
            )));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(CMat::identity(n, n))
    }

    /// Balanced two-mode beam splitter `[[1, 1], [1, −1]]/√2`.
    pub fn balanced_beamsplitter() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryMatrix(CMat::from_row_slice(
            2,
            2,
            &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)],
        ))
    }

    pub fn haar<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        UnitaryMatrix(crate::linalg::haar_unitary(n, rng))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.0
    }

    pub fn into_matrix(self) -> CMat {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Result<Self> {
        Error::check_len("unitary product", self.dim(), other.dim())?;
        UnitaryMatrix::new(&self.0 * &other.0)
    }
}

/// State preparation `Û D(α) S(r0)` applied to a Fock input.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianCircuit {
    unitary: UnitaryMatrix,
    squeezing: Vec<f64>,
    displacement: Vec<C64>,
}

impl GaussianCircuit {
    pub fn new(unitary: UnitaryMatrix, squeezing: Vec<f64>, displacement: Vec<C64>) -> Result<Self> {
        let m = unitary.dim();
        Error::check_len("circuit squeezing", m, squeezing.len())?;
        Error::check_len("circuit displacement", m, displacement.len())?;
        if let Some(r) = squeezing.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
            return Err(Error::domain(format!("squeezing must be finite and ≥ 0, got {r}")));
        }
        if displacement.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("displacement must be finite"));
        }
        Ok(GaussianCircuit {
            unitary,
            squeezing,
            displacement,
        })
    }

    /// Passive circuit with no squeezing or displacement.
    pub fn passive(unitary: UnitaryMatrix) -> Self {
        let m = unitary.dim();
        GaussianCircuit {
            unitary,
            squeezing: vec![0.0; m],
            displacement: vec![C64::new(0.0, 0.0); m],
        }
    }

    pub fn modes(&self) -> usize {
        self.unitary.dim()
    }

    pub fn unitary(&self) -> &UnitaryMatrix {
        &self.unitary
    }

    pub fn squeezing(&self) -> &[f64] {
        &self.squeezing
    }

    pub fn displacement(&self) -> &[C64] {
        &self.displacement
    }

    pub fn is_passive(&self) -> bool {
        self.squeezing.iter().all(|&r| r == 0.0) && self.displacement.iter().all(|z| z.norm() == 0.0)
    }

    /// Displacement after the passive stage, `U α`.
    pub fn final_displacement(&self) -> CVec {
        self.unitary.matrix() * CVec::from_column_slice(&self.displacement)
    }

    /// The preparation as a single transform.
    pub fn to_transform(&self) -> BogoliubovTransform {
        let p = BogoliubovTransform::passive(&self.unitary);
        let d = BogoliubovTransform::displacement(&self.displacement);
        let s = BogoliubovTransform::squeezer(&self.squeezing);
        compose_unchecked(&p, &compose_unchecked(&d, &s))
    }
}

/// Harmonic-model description of an electronic transition.
#[derive(Clone, Debug, PartialEq)]
pub struct DoktorovSpec {
    pub omega_initial: Vec<f64>,
    pub omega_final: Vec<f64>,
    pub duschinsky: UnitaryMatrix,
    /// Dimensionless normal-coordinate displacement.
    pub delta: Vec<f64>,
}

impl DoktorovSpec {
    pub fn new(
        omega_initial: Vec<f64>,
        omega_final: Vec<f64>,
        duschinsky: UnitaryMatrix,
        delta: Vec<f64>,
    ) -> Result<Self> {
        let spec = DoktorovSpec {
            omega_initial,
            omega_final,
            duschinsky,
            delta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn modes(&self) -> usize {
        self.omega_initial.len()
    }

    fn validate(&self) -> Result<&UnitaryMatrix> {
        let u = &self.duschinsky;
        let m = self.modes();
        Error::check_len("final frequencies", m, self.omega_final.len())?;
        Error::check_len("Duschinsky rotation", m, u.dim())?;
        Error::check_len("Doktorov displacement", m, self.delta.len())?;
        for w in self.omega_initial.iter().chain(&self.omega_final) {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::domain(format!("frequencies must be positive, got {w}")));
            }
        }
        if self.delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::domain("displacement must be finite"));
        }
        Ok(u)
    }
}

/// `Ŵ† a Ŵ = A a + B a† + ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovTransform {
    a: CMat,
    b: CMat,
    xi: CVec,
}

impl BogoliubovTransform {
    pub fn new(a: CMat, b: CMat, xi: CVec) -> Result<Self> {
        let m = a.nrows();
        Error::check_len("A block columns", m, a.ncols())?;
        Error::check_len("B block rows", m, b.nrows())?;
        Error::check_len("B block columns", m, b.ncols())?;
        Error::check_len("transform displacement", m, xi.len())?;
        let t = BogoliubovTransform { a, b, xi };
        let (d1, d2) = t.symplectic_defect();
        if !(d1 <= SYMPLECTIC_TOL && d2 <= SYMPLECTIC_TOL) {
            return Err(Error::numeric(format!(
                "transform is not symplectic: ‖AA†−BB†−I‖ = {d1:.3e}, ‖ABᵀ−BAᵀ‖ = {d2:.3e}"
            )));
        }
        Ok(t)
    }

    pub fn identity(m: usize) -> Self {
        BogoliubovTransform {
            a: CMat::identity(m, m),
            b: CMat::zeros(m, m),
            xi: CVec::zeros(m),
        }
    }

    pub fn passive(u: &UnitaryMatrix) -> Self {
        let m = u.dim();
        BogoliubovTransform {
            a: u.matrix().clone(),
            b: CMat::zeros(m, m),
            xi: CVec::zeros(m),
        }
    }

    pub fn squeezer(r: &[f64]) -> Self {
        let ch: Vec<f64> = r.iter().map(|x| x.cosh()).collect();
        let sh: Vec<f64> = r.iter().map(|x| x.sinh()).collect();
        BogoliubovTransform {
            a: diag_real(&ch),
            b: diag_real(&sh),
            xi: CVec::zeros(r.len()),
        }
    }

    pub fn displacement(alpha: &[C64]) -> Self {
        let m = alpha.len();
        BogoliubovTransform {
            a: CMat::identity(m, m),
            b: CMat::zeros(m, m),
            xi: CVec::from_column_slice(alpha),
        }
    }

    /// `exp(i Σ φ_j n_j)`.
    pub fn phase_shift(phi: &[f64]) -> Self {
        let d: Vec<C64> = phi.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let m = phi.len();
        BogoliubovTransform {
            a: diag_complex(&d),
            b: CMat::zeros(m, m),
            xi: CVec::zeros(m),
        }
    }

    /// Two-mode squeezers coupling mode `i` with mode `M + i`, `M = s.len()`.
    pub fn two_mode_squeezer(s: &[f64]) -> Self {
        let m = s.len();
        let mut a = CMat::identity(2 * m, 2 * m);
        let mut b = CMat::zeros(2 * m, 2 * m);
        for (i, &si) in s.iter().enumerate() {
            a[(i, i)] = c(si.cosh(), 0.0);
            a[(m + i, m + i)] = c(si.cosh(), 0.0);
            b[(i, m + i)] = c(si.sinh(), 0.0);
            b[(m + i, i)] = c(si.sinh(), 0.0);
        }
        BogoliubovTransform {
            a,
            b,
            xi: CVec::zeros(2 * m),
        }
    }

    /// Direct sum with the identity on `extra` further modes.
    pub fn extend(&self, extra: usize) -> Self {
        let m = self.modes();
        let n = m + extra;
        let mut a = CMat::identity(n, n);
        let mut b = CMat::zeros(n, n);
        a.view_mut((0, 0), (m, m)).copy_from(&self.a);
        b.view_mut((0, 0), (m, m)).copy_from(&self.b);
        let mut xi = CVec::zeros(n);
        xi.rows_mut(0, m).copy_from(&self.xi);
        BogoliubovTransform { a, b, xi }
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn xi(&self) -> &CVec {
        &self.xi
    }

    /// `(‖AA† − BB† − I‖_max, ‖ABᵀ − BAᵀ‖_max)`.
    pub fn symplectic_defect(&self) -> (f64, f64) {
        let m = self.modes();
        let d1 = max_abs(&(&self.a * self.a.adjoint() - &self.b * self.b.adjoint() - CMat::identity(m, m)));
        let d2 = max_abs(&(&self.a * self.b.transpose() - &self.b * self.a.transpose()));
        (d1, d2)
    }

    /// Max-norm distance between blocks and displacements.
    pub fn distance(&self, other: &BogoliubovTransform) -> f64 {
        max_abs(&(&self.a - &other.a))
            .max(max_abs(&(&self.b - &other.b)))
            .max(max_abs_vec(&(&self.xi - &other.xi)))
    }

    pub fn inverse(&self) -> Self {
        let a = self.a.adjoint();
        let b = -self.b.transpose();
        let xi = -(&a * &self.xi + &b * self.xi.conjugate());
        BogoliubovTransform { a, b, xi }
    }
}

fn compose_unchecked(t1: &BogoliubovTransform, t2: &BogoliubovTransform) -> BogoliubovTransform {
    let a = &t1.a * &t2.a + &t1.b * t2.b.conjugate();
    let b = &t1.a * &t2.b + &t1.b * t2.a.conjugate();
    let xi = &t1.a * &t2.xi + &t1.b * t2.xi.conjugate() + &t1.xi;
    BogoliubovTransform { a, b, xi }
}

/// Operator product `Ŵ₁Ŵ₂`: `t2` acts on the state first.
pub fn compose(t1: &BogoliubovTransform, t2: &BogoliubovTransform) -> Result<BogoliubovTransform> {
    Error::check_len("compose", t1.modes(), t2.modes())?;
    let t = compose_unchecked(t1, t2);
    BogoliubovTransform::new(t.a, t.b, t.xi)
}

/// `Ŵ = S†D†Û† e^{iφ·n̂} Û D S` for the circuit's preparation.
pub fn conjugated_phase_shift(circuit: &GaussianCircuit, phases: &[f64]) -> Result<BogoliubovTransform> {
    Error::check_len("phases", circuit.modes(), phases.len())?;
    let prep = circuit.to_transform();
    let rot = BogoliubovTransform::phase_shift(phases);
    compose(&prep.inverse(), &compose(&rot, &prep)?)
}

/// `Ŵ = D(ξ) Û₂ S(r) Û₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochMessiahForm {
    pub u_lin2: UnitaryMatrix,
    pub r: Vec<f64>,
    pub u_lin1: UnitaryMatrix,
    pub xi: CVec,
}

impl BlochMessiahForm {
    /// Reads the preparation `Û D(α) S(r0) = D(Uα) Û S(r0)` directly, with the
    /// squeezers reordered descending.
    pub fn from_circuit(circuit: &GaussianCircuit) -> Self {
        let m = circuit.modes();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| circuit.squeezing[j].total_cmp(&circuit.squeezing[i]).then(i.cmp(&j)));
        let mut perm = CMat::zeros(m, m);
        for (new, &old) in order.iter().enumerate() {
            perm[(old, new)] = c(1.0, 0.0);
        }
        BlochMessiahForm {
            u_lin2: UnitaryMatrix(circuit.unitary.matrix() * &perm),
            r: order.iter().map(|&i| circuit.squeezing[i]).collect(),
            u_lin1: UnitaryMatrix(perm.transpose()),
            xi: circuit.final_displacement(),
        }
    }

    pub fn modes(&self) -> usize {
        self.r.len()
    }

    pub fn recompose(&self) -> BogoliubovTransform {
        let ch: Vec<f64> = self.r.iter().map(|x| x.cosh()).collect();
        let sh: Vec<f64> = self.r.iter().map(|x| x.sinh()).collect();
        let u2 = self.u_lin2.matrix();
        let u1 = self.u_lin1.matrix();
        BogoliubovTransform {
            a: u2 * diag_real(&ch) * u1,
            b: u2 * diag_real(&sh) * u1.conjugate(),
            xi: self.xi.clone(),
        }
    }

    /// The circuit `Û₂ D(Û₂†ξ) S(r)` producing the same state from vacuum.
    pub fn vacuum_circuit(&self) -> GaussianCircuit {
        let alpha = self.u_lin2.matrix().adjoint() * &self.xi;
        GaussianCircuit {
            unitary: self.u_lin2.clone(),
            squeezing: self.r.clone(),
            displacement: alpha.iter().copied().collect(),
        }
    }
}

/// Relative width used to group equal singular values of the A block.
const DEGENERACY_TOL: f64 = 1e-9;

pub fn bloch_messiah(t: &BogoliubovTransform) -> Result<BlochMessiahForm> {
    let (d1, d2) = t.symplectic_defect();
    if !(d1 <= SYMPLECTIC_TOL && d2 <= SYMPLECTIC_TOL) {
        return Err(Error::numeric(format!(
            "cannot decompose a non-symplectic transform (defects {d1:.3e}, {d2:.3e})"
        )));
    }
    let m = t.modes();
    // SVD of A through the eigenvectors of A A†: the singular values are
    // cosh r ≥ 1, so V† = cosh(r)⁻¹ W† A is well conditioned, and this is
    // markedly more accurate than a direct complex SVD.
    let eig = SymmetricEigen::new(&t.a * t.a.adjoint());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let w = CMat::from_fn(m, m, |i, j| eig.eigenvectors[(i, order[j])]);
    let cosh_vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(1.0).sqrt()).collect();
    let inv = CVec::from_iterator(m, cosh_vals.iter().map(|s| c(1.0 / s, 0.0)));
    let vh = CMat::from_diagonal(&inv) * w.adjoint() * &t.a;

    // Y = X sinh(r) Xᵀ with X block-diagonal over equal singular values.
    let y = w.adjoint() * &t.b * vh.transpose();

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=m {
        if i == m || cosh_vals[i - 1] - cosh_vals[i] > DEGENERACY_TOL * cosh_vals[start].max(1.0) {
            groups.push((start, i - start));
            start = i;
        }
    }

    let mut x = CMat::zeros(m, m);
    let mut r = vec![0.0; m];
    let mut zero_groups = Vec::new();
    for &(g0, len) in &groups {
        let block = y.view((g0, g0), (len, len)).clone_owned();
        let s = block.norm() / (len as f64).sqrt();
        if s < 1e-14 {
            zero_groups.push((g0, len));
            continue;
        }
        let root = symmetric_unitary_sqrt(&(block / c(s, 0.0)));
        x.view_mut((g0, g0), (len, len)).copy_from(&root);
        for ri in r.iter_mut().skip(g0).take(len) {
            *ri = s.asinh();
        }
    }
    // Unsqueezed groups: any unitary X works; pick the one bringing the
    // columns of U₂ closest to standard basis vectors.
    for &(g0, len) in &zero_groups {
        let wg = w.columns(g0, len);
        let mut rows: Vec<usize> = (0..m).collect();
        let weight = |i: usize| wg.row(i).norm_squared();
        rows.sort_by(|&i, &j| weight(j).total_cmp(&weight(i)).then(i.cmp(&j)));
        let mut chosen: Vec<usize> = rows[..len].to_vec();
        chosen.sort_unstable();
        let target = CMat::from_fn(m, len, |i, j| if i == chosen[j] { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let xg = polar_unitary(&(wg.adjoint() * target));
        x.view_mut((g0, g0), (len, len)).copy_from(&xg);
    }

    let mut u2 = &w * &x;
    let mut u1 = x.adjoint() * &vh;
    // Sign convention: the largest entry of each squeezed column of U₂ has
    // nonnegative real part. Flipping both factors leaves A and B unchanged.
    for j in 0..m {
        let col = u2.column(j);
        let mut best = 0;
        for i in 1..m {
            if col[i].norm() > col[best].norm() + 1e-12 {
                best = i;
            }
        }
        if col[best].re < 0.0 {
            u2.column_mut(j).neg_mut();
            u1.row_mut(j).neg_mut();
        }
    }

    let form = BlochMessiahForm {
        u_lin2: UnitaryMatrix::new(u2)?,
        r,
        u_lin1: UnitaryMatrix::new(u1)?,
        xi: t.xi.clone(),
    };
    let err = form.recompose().distance(t);
    let scale = max_abs(&t.a).max(1.0);
    if err > SYMPLECTIC_TOL * scale {
        return Err(Error::numeric(format!("Bloch-Messiah recomposition error {err:.3e}")));
    }
    Ok(form)
}

/// Preparation circuit for the Doktorov operator acting on vacuum.
///
/// Frequency ratios enter through squeezers `S(−½ ln ω)`, which scale the
/// position variance of a mode by `1/ω`.
pub fn doktorov_transform(spec: &DoktorovSpec) -> Result<BogoliubovTransform> {
    let u = spec.validate()?;
    let r_initial: Vec<f64> = spec.omega_initial.iter().map(|w| -0.5 * w.ln()).collect();
    let r_final: Vec<f64> = spec.omega_final.iter().map(|w| 0.5 * w.ln()).collect();
    let alpha: Vec<C64> = spec
        .delta
        .iter()
        .map(|d| c(d / std::f64::consts::SQRT_2, 0.0))
        .collect();
    let inner = compose(&BogoliubovTransform::passive(u), &BogoliubovTransform::squeezer(&r_initial))?;
    let mid = compose(&BogoliubovTransform::squeezer(&r_final), &inner)?;
    compose(&BogoliubovTransform::displacement(&alpha), &mid)
}

pub fn doktorov_to_circuit(spec: &DoktorovSpec) -> Result<GaussianCircuit> {
    Ok(bloch_messiah(&doktorov_transform(spec)?)?.vacuum_circuit())
}
