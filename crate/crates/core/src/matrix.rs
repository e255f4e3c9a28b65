//! Square matrices over `Λ_δ`, their unitary groups, and the real
//! representation `ι_δ : M(n; Λ_δ) → M(2n; R)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{canonical_delta, idempotents, same_delta, AlgScalar};

/// Real matrices are plain `nalgebra` matrices.
pub type RealMatrix = DMatrix<f64>;

/// An `n × n` matrix with entries in `Λ_δ`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct AlgMatrix {
    n: usize,
    delta: f64,
    entries: Vec<AlgScalar>,
}

/// Wire format: `{n, delta, entries: [[[re, im], ...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    delta: f64,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixRepr> for AlgMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.n || repr.entries.iter().any(|r| r.len() != repr.n) {
            return Err(Error::ShapeMismatch(format!(
                "expected {0}x{0} entries",
                repr.n
            )));
        }
        let delta = repr.delta;
        Ok(AlgMatrix::from_fn(repr.n, delta, |i, j| {
            let [re, im] = repr.entries[i][j];
            AlgScalar::new(re, im, delta)
        }))
    }
}

impl From<AlgMatrix> for MatrixRepr {
    fn from(m: AlgMatrix) -> Self {
        MatrixRepr {
            n: m.n,
            delta: m.delta,
            entries: (0..m.n)
                .map(|i| (0..m.n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for AlgMatrix {
    type Output = AlgScalar;

    fn index(&self, (i, j): (usize, usize)) -> &AlgScalar {
        &self.entries[i * self.n + j]
    }
}

impl AlgMatrix {
    pub fn from_fn(n: usize, delta: f64, mut f: impl FnMut(usize, usize) -> AlgScalar) -> Self {
        let delta = canonical_delta(delta);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let s = f(i, j);
                entries.push(AlgScalar {
                    re: s.re,
                    im: s.im,
                    delta,
                });
            }
        }
        Self { n, delta, entries }
    }

    /// Builds a matrix from entries that must all share `delta`.
    pub fn from_entries(n: usize, delta: f64, entries: Vec<AlgScalar>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !same_delta(e.delta, delta)) {
            return Err(Error::DeltaMismatch {
                left: delta,
                right: bad.delta,
            });
        }
        Ok(Self {
            n,
            delta: canonical_delta(delta),
            entries,
        })
    }

    /// `re + λ·im` from the two real coefficient grids.
    pub fn from_parts(re: &RealMatrix, im: &RealMatrix, delta: f64) -> Result<Self> {
        if !re.is_square() || re.shape() != im.shape() {
            return Err(Error::ShapeMismatch(format!(
                "coefficient grids {:?} and {:?}",
                re.shape(),
                im.shape()
            )));
        }
        Ok(Self::from_fn(re.nrows(), delta, |i, j| {
            AlgScalar::new(re[(i, j)], im[(i, j)], delta)
        }))
    }

    pub fn from_real(re: &RealMatrix, delta: f64) -> Result<Self> {
        Self::from_parts(re, &RealMatrix::zeros(re.nrows(), re.ncols()), delta)
    }

    pub fn identity(n: usize, delta: f64) -> Self {
        Self::from_fn(n, delta, |i, j| {
            AlgScalar::real(if i == j { 1.0 } else { 0.0 }, delta)
        })
    }

    pub fn zeros(n: usize, delta: f64) -> Self {
        Self::from_fn(n, delta, |_, _| AlgScalar::zero(delta))
    }

    pub fn diagonal(diag: &[AlgScalar]) -> Result<Self> {
        let delta = diag.first().map_or(0.0, |d| d.delta);
        let n = diag.len();
        let mut entries = vec![AlgScalar::zero(delta); n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        Self::from_entries(n, delta, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn entries(&self) -> &[AlgScalar] {
        &self.entries
    }

    pub fn set(&mut self, i: usize, j: usize, value: AlgScalar) -> Result<()> {
        if !same_delta(value.delta, self.delta) {
            return Err(Error::DeltaMismatch {
                left: self.delta,
                right: value.delta,
            });
        }
        self.entries[i * self.n + j] = value;
        Ok(())
    }

    /// Real coefficient grid (the `1` part).
    pub fn re_part(&self) -> RealMatrix {
        RealMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].re)
    }

    /// Real coefficient grid (the `λ` part).
    pub fn im_part(&self) -> RealMatrix {
        RealMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].im)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !same_delta(self.delta, other.delta) {
            return Err(Error::DeltaMismatch {
                left: self.delta,
                right: other.delta,
            });
        }
        if self.n != other.n {
            return Err(Error::ShapeMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, AlgScalar::add_same))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, AlgScalar::sub_same))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_same(other))
    }

    fn zip(&self, other: &Self, f: impl Fn(AlgScalar, AlgScalar) -> AlgScalar) -> Self {
        Self {
            n: self.n,
            delta: self.delta,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub(crate) fn mul_same(&self, other: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, self.delta, |i, j| {
            (0..n).fold(AlgScalar::zero(self.delta), |acc, k| {
                acc.add_same(self[(i, k)].mul_same(other[(k, j)]))
            })
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            delta: self.delta,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    /// Multiplies every entry by the scalar `s` of the same algebra.
    pub fn scale_by(&self, s: AlgScalar) -> Result<Self> {
        if !same_delta(s.delta, self.delta) {
            return Err(Error::DeltaMismatch {
                left: self.delta,
                right: s.delta,
            });
        }
        Ok(Self {
            n: self.n,
            delta: self.delta,
            entries: self.entries.iter().map(|e| e.mul_same(s)).collect(),
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, self.delta, |i, j| self[(j, i)])
    }

    /// The involution-transpose `A† = σ(A)ᵀ`.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.n, self.delta, |i, j| self[(j, i)].conj())
    }

    /// Largest absolute value among all real coefficients.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.max_abs()))
    }

    /// Euclidean norm of the full coefficient grid.
    pub fn coefficient_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.re * e.re + e.im * e.im)
            .sum::<f64>()
            .sqrt()
    }

    /// Determinant in `Λ_δ` (the algebra is commutative, so the usual
    /// formula applies).
    pub fn det(&self) -> AlgScalar {
        if self.n <= 4 {
            laplace_det(self.n, self.delta, &self.entries)
        } else {
            bareiss_det(self)
                .unwrap_or_else(|| laplace_det(self.n, self.delta, &self.entries))
        }
    }

    /// Inverse over `Λ_δ`; fails when the determinant is a zero divisor.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let det = self.det();
        let det_inv = det.inv().map_err(|_| Error::Singular)?;
        if n <= 3 {
            // adjugate / det
            let mut out = Self::zeros(n, self.delta);
            for i in 0..n {
                for j in 0..n {
                    let minor = minor_entries(n, &self.entries, j, i);
                    let c = laplace_det(n - 1, self.delta, &minor);
                    let c = if (i + j) % 2 == 1 { c.neg() } else { c };
                    out.entries[i * n + j] = c.mul_same(det_inv);
                }
            }
            Ok(out)
        } else {
            let real_inv = iota_delta(self)
                .try_inverse()
                .ok_or(Error::Singular)?;
            Ok(from_iota(&real_inv, self.delta))
        }
    }

    /// Infinity norm of the real representation; used to scale the series.
    pub fn iota_norm(&self) -> f64 {
        let r = iota_delta(self);
        (0..r.nrows())
            .map(|i| r.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn minor_entries(n: usize, entries: &[AlgScalar], row: usize, col: usize) -> Vec<AlgScalar> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in (0..n).filter(|&i| i != row) {
        for j in (0..n).filter(|&j| j != col) {
            out.push(entries[i * n + j]);
        }
    }
    out
}

fn laplace_det(n: usize, delta: f64, entries: &[AlgScalar]) -> AlgScalar {
    match n {
        0 => AlgScalar::one(delta),
        1 => entries[0],
        2 => entries[0]
            .mul_same(entries[3])
            .sub_same(entries[1].mul_same(entries[2])),
        _ => {
            let mut acc = AlgScalar::zero(delta);
            for j in 0..n {
                if entries[j].re == 0.0 && entries[j].im == 0.0 {
                    continue;
                }
                let c = entries[j].mul_same(laplace_det(n - 1, delta, &minor_entries(n, entries, 0, j)));
                acc = if j % 2 == 0 { acc.add_same(c) } else { acc.sub_same(c) };
            }
            acc
        }
    }
}

/// Fraction-free elimination; the exact divisions by previous pivots require
/// those pivots to be units, so `None` is returned when no unit pivot exists.
fn bareiss_det(a: &AlgMatrix) -> Option<AlgScalar> {
    let n = a.n;
    let delta = a.delta;
    let mut m = a.entries.clone();
    let mut sign = 1.0;
    let mut prev = AlgScalar::one(delta);
    for k in 0..n - 1 {
        let pivot = (k..n)
            .filter(|&r| m[r * n + k].is_unit())
            .max_by(|&r, &s| {
                m[r * n + k]
                    .norm()
                    .abs()
                    .total_cmp(&m[s * n + k].norm().abs())
            })?;
        if pivot != k {
            for j in 0..n {
                m.swap(k * n + j, pivot * n + j);
            }
            sign = -sign;
        }
        let prev_inv = prev.inv().ok()?;
        let pkk = m[k * n + k];
        for i in k + 1..n {
            let pik = m[i * n + k];
            for j in k + 1..n {
                let v = pkk
                    .mul_same(m[i * n + j])
                    .sub_same(pik.mul_same(m[k * n + j]));
                m[i * n + j] = v.mul_same(prev_inv);
            }
            m[i * n + k] = AlgScalar::zero(delta);
        }
        prev = pkk;
    }
    Some(m[n * n - 1].scale(sign))
}

/// The real representation `a + λb ↦ [[a, δb], [b, a]]`, applied blockwise.
pub fn iota_delta(a: &AlgMatrix) -> RealMatrix {
    let n = a.n;
    let d = a.delta;
    let mut out = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let e = a[(i, j)];
            out[(2 * i, 2 * j)] = e.re;
            out[(2 * i, 2 * j + 1)] = d * e.im;
            out[(2 * i + 1, 2 * j)] = e.im;
            out[(2 * i + 1, 2 * j + 1)] = e.re;
        }
    }
    out
}

/// Reads the coefficients back out of a matrix in the image of `ι_δ`.
fn from_iota(r: &RealMatrix, delta: f64) -> AlgMatrix {
    let n = r.nrows() / 2;
    AlgMatrix::from_fn(n, delta, |i, j| {
        AlgScalar::new(r[(2 * i, 2 * j)], r[(2 * i + 1, 2 * j)], delta)
    })
}

/// Matrix exponential with `Λ_δ` multiplication, by scaling and squaring.
pub fn exp_delta(x: &AlgMatrix) -> AlgMatrix {
    const TERMS: usize = 20;
    let norm = x.iota_norm();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let y = x.scale(1.0 / 2f64.powi(squarings as i32));
    let mut sum = AlgMatrix::identity(x.n, x.delta);
    let mut term = sum.clone();
    for k in 1..=TERMS {
        term = term.mul_same(&y).scale(1.0 / k as f64);
        let size = term.max_abs();
        sum = sum.zip(&term, AlgScalar::add_same);
        if size <= 1e-16 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul_same(&sum);
    }
    sum
}

/// A self-adjoint matrix `Q = Q†` defining a hermitian form over `Λ_δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianForm {
    q: AlgMatrix,
}

impl HermitianForm {
    pub fn new(q: AlgMatrix) -> Result<Self> {
        let residual = q.sub(&q.dagger())?.max_abs();
        if residual > 1e-12 {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { q })
    }

    /// `diag(I_n, −1)`, an `(n+1) × (n+1)` form.
    pub fn standard(n: usize, delta: f64) -> Self {
        let mut q = AlgMatrix::identity(n + 1, delta);
        q.entries[(n + 1) * (n + 1) - 1] = AlgScalar::real(-1.0, delta);
        Self { q }
    }

    /// The positive definite form `I_n`.
    pub fn identity(n: usize, delta: f64) -> Self {
        Self {
            q: AlgMatrix::identity(n, delta),
        }
    }

    pub fn matrix(&self) -> &AlgMatrix {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.q.n
    }

    /// Max-coefficient residual of `A†QA − Q`.
    pub fn residual(&self, a: &AlgMatrix) -> Result<f64> {
        let aq = a.dagger().mul(&self.q)?;
        Ok(aq.mul_same(a).sub(&self.q)?.max_abs())
    }

    /// Inverse of a `Q`-unitary matrix: `A⁻¹ = Q⁻¹A†Q`.
    pub fn unitary_inverse(&self, a: &AlgMatrix) -> Result<AlgMatrix> {
        let q_inv = self.q.inverse()?;
        q_inv.mul(&a.dagger())?.mul(&self.q)
    }
}

pub fn is_unitary(a: &AlgMatrix, q: &HermitianForm, tol: f64) -> Result<bool> {
    if a.n != q.n() {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {0}x{0}, form is {1}x{1}",
            a.n,
            q.n()
        )));
    }
    Ok(q.residual(a)? <= tol)
}

/// Whether a `Q`-unitary matrix fixes the last basis line `[e_{n+1}]`: its
/// last row and column vanish off the diagonal and the corner is a unit.
pub fn is_stabilizer(a: &AlgMatrix, q: &HermitianForm, tol: f64) -> Result<bool> {
    if !is_unitary(a, q, tol)? {
        return Err(Error::NotUnitary {
            residual: q.residual(a)?,
        });
    }
    let last = a.n - 1;
    let off = (0..last)
        .map(|k| a[(k, last)].max_abs().max(a[(last, k)].max_abs()))
        .fold(0.0, f64::max);
    Ok(off <= tol && (a[(last, last)].norm() - 1.0).abs() <= tol)
}

/// A basis of `u(n,1; Λ_δ) = {X : X†Q + QX = 0}` for `Q = diag(I_n, −1)`.
///
/// Writing `X = A + λB`, the condition splits into `AᵀQ + QA = 0` and
/// `QB` symmetric, neither of which involves `δ`; the coefficient grids
/// returned are therefore the same for every `δ`.
pub fn u_lie_basis(n: usize, delta: f64) -> Vec<AlgMatrix> {
    let m = n + 1;
    let sign = |i: usize| if i == n { -1.0 } else { 1.0 };
    let zero = RealMatrix::zeros(m, m);
    let mut basis = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in i + 1..m {
            // Q_jj e_ij − Q_ii e_ji
            let mut a = zero.clone();
            a[(i, j)] = sign(j);
            a[(j, i)] = -sign(i);
            basis.push(AlgMatrix::from_parts(&a, &zero, delta).expect("square"));
        }
    }
    for i in 0..m {
        for j in i..m {
            // B = Q S with S a symmetric elementary matrix
            let mut b = zero.clone();
            b[(i, j)] = sign(i);
            b[(j, i)] = sign(j);
            basis.push(AlgMatrix::from_parts(&zero, &b, delta).expect("square"));
        }
    }
    basis
}

/// `X ↦ X e₊ + X^{−T} e₋`, identifying `GL(n; R)` with the unitary group of
/// the standard positive form over `R ⊕ R` (`δ = 1`).
pub fn rr_to_unitary(x: &RealMatrix) -> Result<AlgMatrix> {
    if !x.is_square() {
        return Err(Error::ShapeMismatch(format!("{:?}", x.shape())));
    }
    if x.determinant().abs() <= 1e-12 {
        return Err(Error::Singular);
    }
    let inv_t = x.clone().try_inverse().ok_or(Error::Singular)?.transpose();
    let (ep, em) = idempotents(1.0)?;
    Ok(AlgMatrix::from_fn(x.nrows(), 1.0, |i, j| {
        ep.scale(x[(i, j)]).add_same(em.scale(inv_t[(i, j)]))
    }))
}

/// Splitting of a matrix over the dual numbers as `X + εY`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsDecomposition {
    pub x: RealMatrix,
    pub y: RealMatrix,
    pub member: bool,
}

/// Decides membership of `M = X + εY` in `U(Q; R_ε)`: `X` must preserve the
/// real form and `XᵀQY = YᵀQX`.
pub fn reps_eps_decompose(m: &AlgMatrix, q: &HermitianForm, tol: f64) -> Result<EpsDecomposition> {
    if m.delta != 0.0 {
        return Err(Error::DeltaMismatch {
            left: 0.0,
            right: m.delta,
        });
    }
    if m.n != q.n() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", m.n, q.n())));
    }
    let x = m.re_part();
    let y = m.im_part();
    let qr = q.matrix().re_part();
    let form = (x.transpose() * &qr * &x - &qr).amax();
    let cross = (x.transpose() * &qr * &y - y.transpose() * &qr * &x).amax();
    let member = form <= tol && cross <= tol;
    Ok(EpsDecomposition { x, y, member })
}

/// Completes a pair `(φ, v)` with `φ(v) = 1` to an invertible `X` whose first
/// column is `v` and whose inverse has first row `φ`.
pub fn point_hyperplane_complete(phi: &[f64], v: &[f64]) -> Result<RealMatrix> {
    let n = v.len();
    if phi.len() != n || n == 0 {
        return Err(Error::ShapeMismatch(format!("{} vs {}", phi.len(), n)));
    }
    let pairing: f64 = phi.iter().zip(v).map(|(a, b)| a * b).sum();
    if (pairing - 1.0).abs() > 1e-10 {
        return Err(Error::PairingNotOne(pairing));
    }
    // extend v by the standard vectors other than the one v leans on most
    let lean = (0..n)
        .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
        .expect("nonempty");
    let mut q = RealMatrix::zeros(n, n);
    for i in 0..n {
        q[(i, 0)] = v[i];
    }
    for (col, k) in (1..).zip((0..n).filter(|&k| k != lean)) {
        q[(k, col)] = 1.0;
    }
    // coordinates of φ in the row basis of Q⁻¹; the first is φ(v) = 1
    let phi_row = RealMatrix::from_row_slice(1, n, phi);
    let a = &phi_row * &q;
    let mut a_inv = RealMatrix::identity(n, n);
    for j in 1..n {
        a_inv[(0, j)] = -a[(0, j)];
    }
    Ok(q * a_inv)
}

/// Real coordinates `(φ, v)` of a vector over `R ⊕ R` in the idempotent
/// basis: `φᵢ = xᵢ + yᵢ`, `vᵢ = xᵢ − yᵢ`, so `φᵢvᵢ = ‖zᵢ‖`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingCoords {
    pub phi: Vec<f64>,
    pub v: Vec<f64>,
}

impl PairingCoords {
    pub fn pairing(&self) -> f64 {
        self.phi.iter().zip(&self.v).map(|(a, b)| a * b).sum()
    }
}

fn check_split_unit(z: &[AlgScalar]) -> Result<()> {
    match z.iter().find(|s| !same_delta(s.delta, 1.0)) {
        Some(s) => Err(Error::DeltaMismatch {
            left: 1.0,
            right: s.delta,
        }),
        None => Ok(()),
    }
}

/// The plain change of coordinates; its pairing is `Σ ‖zᵢ‖`, the form
/// `I_n`.
pub fn pairing_coordinate_change(z: &[AlgScalar]) -> Result<PairingCoords> {
    check_split_unit(z)?;
    Ok(PairingCoords {
        phi: z.iter().map(|s| s.re + s.im).collect(),
        v: z.iter().map(|s| s.re - s.im).collect(),
    })
}

/// Variant for the form `diag(I_n, −1)`: the functional is negated on all
/// but the last coordinate, so that `φ(v) = −q(z, z)` and the sphere
/// `q(z, z) = −1` lands on the level set `φ(v) = 1`.
pub fn pairing_coordinate_change_signed(z: &[AlgScalar]) -> Result<PairingCoords> {
    let mut c = pairing_coordinate_change(z)?;
    let last = c.phi.len().saturating_sub(1);
    for p in c.phi.iter_mut().take(last) {
        *p = -*p;
    }
    Ok(c)
}

/// Inverse of [`pairing_coordinate_change`].
pub fn pairing_coordinate_inverse(c: &PairingCoords) -> Vec<AlgScalar> {
    c.phi
        .iter()
        .zip(&c.v)
        .map(|(p, v)| AlgScalar::new(0.5 * (p + v), 0.5 * (p - v), 1.0))
        .collect()
}

/// Real dimension of the hermitian matrices `{H : H† = H}` in `M(n; Λ_δ)`,
/// found as the nullity of `H ↦ H† − H` over the `2n²` real coordinates.
pub fn hermitian_dimension(n: usize, delta: f64) -> usize {
    let dim = 2 * n * n;
    let mut map = RealMatrix::zeros(dim, dim);
    for k in 0..dim {
        let h = coordinate_matrix(n, delta, k);
        let image = h.dagger().sub(&h).expect("same algebra");
        map.set_column(k, &flatten(&image));
    }
    dim - numerical_rank(&map, 1e-9)
}

fn coordinate_matrix(n: usize, delta: f64, k: usize) -> AlgMatrix {
    let mut h = AlgMatrix::zeros(n, delta);
    let (cell, part) = (k / 2, k % 2);
    h.entries[cell] = if part == 0 {
        AlgScalar::real(1.0, delta)
    } else {
        AlgScalar::lambda(delta)
    };
    h
}

fn flatten(a: &AlgMatrix) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(
        2 * a.n * a.n,
        a.entries.iter().flat_map(|e| [e.re, e.im]),
    )
}

fn numerical_rank(m: &RealMatrix, threshold: f64) -> usize {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// Checks by central differences that `X ↦ X†QX` is a submersion onto the
/// hermitian matrices at `A`.
pub fn submersion_rank_check(a: &AlgMatrix, q: &HermitianForm, h: f64) -> Result<bool> {
    let n = a.n;
    if n != q.n() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", n, q.n())));
    }
    if h <= 0.0 || !h.is_finite() {
        return Ok(false);
    }
    let f = |x: &AlgMatrix| x.dagger().mul_same(q.matrix()).mul_same(x);
    let dim = 2 * n * n;
    let mut jac = RealMatrix::zeros(dim, dim);
    for k in 0..dim {
        let step = coordinate_matrix(n, a.delta, k).scale(h);
        let plus = f(&a.add(&step)?);
        let minus = f(&a.sub(&step)?);
        let diff = plus.sub(&minus)?.scale(0.5 / h);
        jac.set_column(k, &flatten(&diff));
    }
    Ok(numerical_rank(&jac, 1e-6) == hermitian_dimension(n, a.delta))
}

/// Block-diagonal `diag(1, √(δ/μ))` blocks, conjugating `ι_δ(Λ_δ)` onto
/// `ι_μ(Λ_μ)`: `C ι_δ(A) C⁻¹ = ι_μ(rescale_lambda(A, μ))`.
pub fn conjugator_c(delta: f64, mu: f64, n: usize) -> Result<RealMatrix> {
    if delta == 0.0 || mu == 0.0 || delta.signum() != mu.signum() {
        return Err(Error::SignMismatch { delta, mu });
    }
    let s = (delta / mu).sqrt();
    let mut c = RealMatrix::identity(2 * n, 2 * n);
    for i in 0..n {
        c[(2 * i + 1, 2 * i + 1)] = s;
    }
    Ok(c)
}

/// The algebra isomorphism `Λ_δ → Λ_μ`, `a + λb ↦ a + λ·b√(δ/μ)`.
pub fn rescale_lambda(a: &AlgMatrix, mu: f64) -> Result<AlgMatrix> {
    let delta = a.delta;
    if delta == 0.0 || mu == 0.0 || delta.signum() != mu.signum() {
        return Err(Error::SignMismatch { delta, mu });
    }
    let s = (delta / mu).sqrt();
    Ok(AlgMatrix::from_fn(a.n, mu, |i, j| {
        AlgScalar::new(a[(i, j)].re, a[(i, j)].im * s, mu)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize, delta: f64) -> AlgMatrix {
        AlgMatrix::from_fn(n, delta, |_, _| {
            AlgScalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), delta)
        })
    }

    fn random_real(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
        RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn dagger_basics() {
        assert_eq!(AlgMatrix::identity(3, -1.0).dagger(), AlgMatrix::identity(3, -1.0));
        let a = AlgMatrix::from_entries(1, -1.0, vec![AlgScalar::new(0.0, 1.0, -1.0)]).unwrap();
        assert_eq!(a.dagger()[(0, 0)], AlgScalar::new(0.0, -1.0, -1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for delta in [-1.0, 0.0, 2.0] {
            let a = random_matrix(&mut rng, 3, delta);
            let b = random_matrix(&mut rng, 3, delta);
            let lhs = a.mul(&b).unwrap().dagger();
            let rhs = b.dagger().mul(&a.dagger()).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn determinants() {
        assert_eq!(AlgMatrix::identity(5, 0.3).det(), AlgScalar::one(0.3));
        let d = [
            AlgScalar::new(1.0, 2.0, -1.0),
            AlgScalar::new(0.5, -1.0, -1.0),
            AlgScalar::new(2.0, 0.0, -1.0),
        ];
        let prod = d[0].mul(d[1]).unwrap().mul(d[2]).unwrap();
        assert_eq!(AlgMatrix::diagonal(&d).unwrap().det(), prod);
    }

    #[test]
    fn determinant_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=6 {
            for delta in [-1.5, 0.0, 1.0] {
                let a = random_matrix(&mut rng, n, delta);
                let b = random_matrix(&mut rng, n, delta);
                let lhs = a.mul(&b).unwrap().det();
                let rhs = a.det().mul(b.det()).unwrap();
                assert!((lhs.re - rhs.re).abs() < 1e-10 && (lhs.im - rhs.im).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn elimination_agrees_with_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for delta in [-1.0, 0.0, 1.0, 3.0] {
            let a = random_matrix(&mut rng, 6, delta);
            let fast = bareiss_det(&a).unwrap();
            let slow = laplace_det(6, delta, &a.entries);
            assert!((fast.re - slow.re).abs() < 1e-11 && (fast.im - slow.im).abs() < 1e-11);
        }
    }

    #[test]
    fn determinant_splits_over_idempotents() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (ep, em) = idempotents(1.0).unwrap();
        for n in 1..=5 {
            let x = random_real(&mut rng, n);
            let y = random_real(&mut rng, n);
            let m = AlgMatrix::from_fn(n, 1.0, |i, j| {
                ep.scale(x[(i, j)]).add_same(em.scale(y[(i, j)]))
            });
            let expect = ep.scale(x.determinant()).add_same(em.scale(y.determinant()));
            let got = m.det();
            assert!((got.re - expect.re).abs() < 1e-12 && (got.im - expect.im).abs() < 1e-12);
        }
    }

    #[test]
    fn exponentials_of_lambda() {
        let t = 0.9;
        let l = |d: f64| AlgMatrix::from_entries(1, d, vec![AlgScalar::new(0.0, t, d)]).unwrap();
        let c = exp_delta(&l(-1.0))[(0, 0)];
        assert!((c.re - t.cos()).abs() < 1e-15 && (c.im - t.sin()).abs() < 1e-15);
        let h = exp_delta(&l(1.0))[(0, 0)];
        assert!((h.re - t.cosh()).abs() < 1e-15 && (h.im - t.sinh()).abs() < 1e-15);
        let d = exp_delta(&l(0.0))[(0, 0)];
        assert!((d.re - 1.0).abs() < 1e-15 && (d.im - t).abs() < 1e-15);
    }

    #[test]
    fn iota_values() {
        let i = AlgMatrix::from_entries(1, -1.0, vec![AlgScalar::lambda(-1.0)]).unwrap();
        assert_eq!(iota_delta(&i), RealMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(iota_delta(&AlgMatrix::identity(3, 2.0)), RealMatrix::identity(6, 6));
        let (ep, _) = idempotents(1.0).unwrap();
        let e = AlgMatrix::from_entries(1, 1.0, vec![ep]).unwrap();
        assert_eq!(iota_delta(&e), RealMatrix::from_element(2, 2, 0.5));
    }

    #[test]
    fn iota_is_an_injective_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for delta in [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0] {
            let a = random_matrix(&mut rng, 4, delta);
            let b = random_matrix(&mut rng, 4, delta);
            let prod = iota_delta(&a.mul(&b).unwrap()) - iota_delta(&a) * iota_delta(&b);
            assert!(prod.amax() <= 1e-10);
            let sum = iota_delta(&a.add(&b).unwrap()) - iota_delta(&a) - iota_delta(&b);
            assert!(sum.amax() <= 1e-15);
            assert_eq!(from_iota(&iota_delta(&a), delta), a);
        }
    }

    #[test]
    fn conjugator_identity() {
        assert_eq!(conjugator_c(2.0, 2.0, 3).unwrap(), RealMatrix::identity(6, 6));
        let c = conjugator_c(-1.0, -4.0, 1).unwrap();
        assert_eq!(c, RealMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]));
        let i = iota_delta(&AlgMatrix::from_entries(1, -1.0, vec![AlgScalar::lambda(-1.0)]).unwrap());
        let conj = &c * i * c.clone().try_inverse().unwrap();
        // C ι_{-1}(λ) C⁻¹ = ι_{-4}(λ/2)
        assert_eq!(conj, RealMatrix::from_row_slice(2, 2, &[0.0, -2.0, 0.5, 0.0]));
        let target = AlgMatrix::from_entries(1, -4.0, vec![AlgScalar::new(0.0, 0.5, -4.0)]).unwrap();
        assert_eq!(conj, iota_delta(&target));

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = conjugator_c(1.0, 4.0, 2).unwrap();
        let c_inv = c.clone().try_inverse().unwrap();
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 2, 1.0);
            let lhs = &c * iota_delta(&a) * &c_inv;
            let rhs = iota_delta(&rescale_lambda(&a, 4.0).unwrap());
            assert!((lhs - rhs).amax() <= 1e-12);
        }
        assert!(matches!(conjugator_c(1.0, -1.0, 1), Err(Error::SignMismatch { .. })));
        assert!(conjugator_c(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn unitary_checks() {
        let q = HermitianForm::standard(2, -1.0);
        assert!(is_unitary(&AlgMatrix::identity(3, -1.0), &q, 1e-12).unwrap());
        let u = AlgScalar::new(0.6, 0.8, -1.0);
        let d = AlgMatrix::diagonal(&[u, u, u]).unwrap();
        assert!(is_unitary(&d, &q, 1e-12).unwrap());

        let q1 = HermitianForm::new(
            AlgMatrix::diagonal(&[AlgScalar::real(1.0, 1.0), AlgScalar::real(-1.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let swap = AlgMatrix::from_fn(2, 1.0, |i, j| AlgScalar::real(if i != j { 1.0 } else { 0.0 }, 1.0));
        assert!(!is_unitary(&swap, &q1, 1e-12).unwrap());
        let image = swap.dagger().mul(q1.matrix()).unwrap().mul(&swap).unwrap();
        assert_eq!(image.re_part(), RealMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
        assert!(is_unitary(&AlgMatrix::identity(2, -1.0), &q, 1e-12).is_err());
    }

    #[test]
    fn stabilizers() {
        let q = HermitianForm::standard(2, -1.0);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let r = RealMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let a = AlgMatrix::from_real(&r, -1.0).unwrap();
        assert!(is_stabilizer(&a, &q, 1e-12).unwrap());

        let u = AlgScalar::new(0.8, -0.6, -1.0);
        let mut b = AlgMatrix::identity(3, -1.0);
        b.set(2, 2, u).unwrap();
        assert!(is_stabilizer(&b, &q, 1e-12).unwrap());

        // a boost mixes the last coordinate with the first
        let mut gen = RealMatrix::zeros(3, 3);
        gen[(0, 2)] = 0.7;
        gen[(2, 0)] = 0.7;
        let boost = exp_delta(&AlgMatrix::from_real(&gen, -1.0).unwrap());
        assert!(is_unitary(&boost, &q, 1e-12).unwrap());
        assert!(!is_stabilizer(&boost, &q, 1e-12).unwrap());

        let not_unitary = AlgMatrix::identity(3, -1.0).scale(2.0);
        assert!(matches!(is_stabilizer(&not_unitary, &q, 1e-12), Err(Error::NotUnitary { .. })));
    }

    fn solve_lie_condition_dim(n: usize, delta: f64) -> usize {
        // brute force nullity of X ↦ X†Q + QX over all real coordinates
        let q = HermitianForm::standard(n, delta);
        let m = n + 1;
        let dim = 2 * m * m;
        let mut map = RealMatrix::zeros(dim, dim);
        for k in 0..dim {
            let x = coordinate_matrix(m, delta, k);
            let image = x
                .dagger()
                .mul(q.matrix())
                .unwrap()
                .add(&q.matrix().mul(&x).unwrap())
                .unwrap();
            map.set_column(k, &flatten(&image));
        }
        dim - numerical_rank(&map, 1e-9)
    }

    #[test]
    fn unitary_lie_algebra_dimension() {
        for n in 1..=3 {
            for delta in [-1.0, 0.0, 1.0] {
                let basis = u_lie_basis(n, delta);
                assert_eq!(basis.len(), (n + 1) * (n + 1));
                assert_eq!(solve_lie_condition_dim(n, delta), basis.len());
                let q = HermitianForm::standard(n, delta);
                for x in &basis {
                    let lhs = x.dagger().mul(q.matrix()).unwrap().add(&q.matrix().mul(x).unwrap()).unwrap();
                    assert_eq!(lhs.max_abs(), 0.0);
                }
                // linear independence
                let mut cols = RealMatrix::zeros(2 * (n + 1) * (n + 1), basis.len());
                for (k, x) in basis.iter().enumerate() {
                    cols.set_column(k, &flatten(x));
                }
                assert_eq!(numerical_rank(&cols, 1e-9), basis.len());
            }
        }
    }

    #[test]
    fn unitary_lie_algebra_is_constant_in_delta() {
        for n in 1..=3 {
            let a = u_lie_basis(n, -1.0);
            let b = u_lie_basis(n, 1.0);
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x.re_part(), y.re_part());
                assert_eq!(x.im_part(), y.im_part());
            }
        }
    }

    #[test]
    fn split_unitary_isomorphism() {
        assert_eq!(
            rr_to_unitary(&RealMatrix::identity(3, 3)).unwrap(),
            AlgMatrix::identity(3, 1.0)
        );
        let two = rr_to_unitary(&RealMatrix::from_element(1, 1, 2.0)).unwrap();
        assert_eq!(two[(0, 0)], AlgScalar::new(1.25, 0.75, 1.0));
        assert_eq!(two[(0, 0)].norm(), 1.0);
        assert_eq!(rr_to_unitary(&RealMatrix::zeros(2, 2)), Err(Error::Singular));
    }

    #[test]
    fn dual_number_unitaries() {
        let q = HermitianForm::standard(1, 0.0);
        let s = RealMatrix::from_row_slice(2, 2, &[0.3, -0.2, -0.2, 1.1]);
        let qs = q.matrix().re_part() * &s;
        let m = AlgMatrix::from_parts(&RealMatrix::identity(2, 2), &qs, 0.0).unwrap();
        assert!(reps_eps_decompose(&m, &q, 1e-12).unwrap().member);

        let boost = RealMatrix::from_row_slice(2, 2, &[2f64.cosh(), 2f64.sinh(), 2f64.sinh(), 2f64.cosh()]);
        let m = AlgMatrix::from_real(&boost, 0.0).unwrap();
        assert!(reps_eps_decompose(&m, &q, 1e-12).unwrap().member);

        let mut e12 = RealMatrix::zeros(2, 2);
        e12[(0, 1)] = 1.0;
        let m = AlgMatrix::from_parts(&RealMatrix::identity(2, 2), &e12, 0.0).unwrap();
        let d = reps_eps_decompose(&m, &q, 1e-12).unwrap();
        assert!(!d.member);
        assert_eq!(d.y, e12);

        let wrong = AlgMatrix::identity(2, 1.0);
        assert!(reps_eps_decompose(&wrong, &HermitianForm::standard(1, 1.0), 1e-8).is_err());
    }

    fn check_completion(phi: &[f64], v: &[f64]) {
        let x = point_hyperplane_complete(phi, v).unwrap();
        let inv = x.clone().try_inverse().expect("invertible");
        for i in 0..v.len() {
            assert!((x[(i, 0)] - v[i]).abs() < 1e-12);
            assert!((inv[(0, i)] - phi[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn point_hyperplane_completion() {
        let e1 = [1.0, 0.0, 0.0];
        assert_eq!(point_hyperplane_complete(&e1, &e1).unwrap(), RealMatrix::identity(3, 3));
        check_completion(&[1.0, 1.0, 0.0], &e1);
        check_completion(&[0.25, 0.125, -1.0], &[2.0, 4.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut phi: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p: f64 = phi.iter().zip(&v).map(|(a, b)| a * b).sum();
            let k = (0..4).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap();
            phi[k] += (1.0 - p) / v[k];
            check_completion(&phi, &v);
        }
        assert!(matches!(
            point_hyperplane_complete(&[0.0, 1.0], &[1.0, 0.0]),
            Err(Error::PairingNotOne(_))
        ));
    }

    #[test]
    fn pairing_coordinates() {
        let z = [AlgScalar::zero(1.0), AlgScalar::zero(1.0), AlgScalar::one(1.0)];
        // q(z, z) = -1 for q = diag(1, 1, -1)
        let q = HermitianForm::standard(2, 1.0);
        let zcol = AlgMatrix::diagonal(&z).unwrap();
        let qz = zcol.dagger().mul(q.matrix()).unwrap().mul(&zcol).unwrap();
        assert_eq!(qz[(2, 2)].re, -1.0);
        assert_eq!(pairing_coordinate_change_signed(&z).unwrap().pairing(), 1.0);

        let x = [1.5, -2.0, 0.5];
        let z: Vec<_> = x.iter().map(|&a| AlgScalar::real(a, 1.0)).collect();
        let c = pairing_coordinate_change(&z).unwrap();
        assert_eq!(c.phi, x.to_vec());
        assert_eq!(c.v, x.to_vec());
        assert_eq!(c.pairing(), x.iter().map(|a| a * a).sum::<f64>());

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let z: Vec<_> = (0..4)
                .map(|_| AlgScalar::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), 1.0))
                .collect();
            let c = pairing_coordinate_change(&z).unwrap();
            let norms: f64 = z.iter().map(|s| s.norm()).sum();
            assert!((c.pairing() - norms).abs() < 1e-12);
            let back = pairing_coordinate_inverse(&c);
            for (a, b) in back.iter().zip(&z) {
                assert!((a.re - b.re).abs() <= 1e-14 * 4.0 && (a.im - b.im).abs() <= 1e-14 * 4.0);
            }
        }
        assert!(pairing_coordinate_change(&[AlgScalar::one(-1.0)]).is_err());
    }

    #[test]
    fn submersions() {
        for delta in [-1.0, 0.0, 1.0] {
            let q = HermitianForm::standard(1, delta);
            assert!(submersion_rank_check(&AlgMatrix::identity(2, delta), &q, 1e-3).unwrap());
            assert!(!submersion_rank_check(&AlgMatrix::identity(2, delta), &q, 0.0).unwrap());
        }
        assert_eq!(hermitian_dimension(2, -1.0), 4);
        assert_eq!(hermitian_dimension(3, 0.0), 9);
        let mut gen = RealMatrix::zeros(3, 3);
        gen[(1, 2)] = 0.4;
        gen[(2, 1)] = 0.4;
        let a = exp_delta(&AlgMatrix::from_real(&gen, 1.0).unwrap());
        assert!(submersion_rank_check(&a, &HermitianForm::standard(2, 1.0), 1e-4).unwrap());
    }

    #[test]
    fn inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in 1..=5 {
            for delta in [-1.0, 0.0, 1.0] {
                let a = random_matrix(&mut rng, n, delta);
                let inv = a.inverse().unwrap();
                let err = a.mul(&inv).unwrap().sub(&AlgMatrix::identity(n, delta)).unwrap().max_abs();
                assert!(err < 1e-9, "n={n} delta={delta} err={err}");
            }
        }
        // a zero-divisor determinant over R ⊕ R
        let (ep, _) = idempotents(1.0).unwrap();
        let m = AlgMatrix::diagonal(&[ep, AlgScalar::one(1.0)]).unwrap();
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn json_wire_format() {
        let a = AlgMatrix::from_entries(
            2,
            0.5,
            vec![
                AlgScalar::new(1.0, 2.0, 0.5),
                AlgScalar::new(0.0, -1.0, 0.5),
                AlgScalar::new(3.0, 0.0, 0.5),
                AlgScalar::new(0.25, 0.5, 0.5),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"delta":0.5,"entries":[[[1.0,2.0],[0.0,-1.0]],[[3.0,0.0],[0.25,0.5]]]}"#
        );
        let back: AlgMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<AlgMatrix>(r#"{"n":2,"delta":0,"entries":[[[1,0]]]}"#).is_err());
    }
}
