//! Exact conjugacy limits of diagonal orthogonal Lie algebras.
//!
//! A diagonal form `J = diag(λᵢ)` is sent by `Ψ` to the tuple of projective
//! points `[λᵢ : λⱼ]`, and its Lie algebra is recovered from that tuple by
//! `η`. Along a monomial path the limit of `Ψ` is computed exactly from the
//! exponents, so the limit Lie algebra is `η(lim Ψ)`.

mod grassmann;
mod monomial;
mod partition;
mod rp1;
mod signature;

use nalgebra::DMatrix;
use serde::Serialize;

pub use grassmann::{orthonormalize, principal_angles, principal_sines, subspace_distance};
pub use monomial::{conjugacy_to_form_path, Monomial, MonomialDiagonal};
pub use partition::{decode_partition, encode_partition, psi_limit, Component, LimitPoint, OrderedPartition};
pub use rp1::Rp1Point;
pub use signature::{
    all_signatures, classify_limit_group_3d, flag_signature, is_limit_of, limit_poset, FlagSignature, LimitGroup3,
    LimitPoset,
};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use partition::pairs;

const RANK_TOL: f64 = 1e-12;

/// A linear subspace of `gl(n; R)` with a Frobenius-orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieSubspace {
    n: usize,
    basis: Vec<RealMatrix>,
}

fn flatten(m: &RealMatrix) -> Vec<f64> {
    // row-major, so that flat index i*n + j is entry (i, j)
    m.transpose().as_slice().to_vec()
}

impl LieSubspace {
    /// Span of the given `n × n` matrices.
    pub fn span(n: usize, generators: &[RealMatrix]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.shape() != (n, n)) {
            return Err(Error::ShapeMismatch(format!("{:?} generator in gl({n})", g.shape())));
        }
        let cols: Vec<Vec<f64>> = generators.iter().map(flatten).collect();
        let q = if cols.is_empty() {
            DMatrix::zeros(n * n, 0)
        } else {
            orthonormalize(&cols, RANK_TOL)
        };
        let basis = (0..q.ncols())
            .map(|k| RealMatrix::from_row_slice(n, n, q.column(k).as_slice()))
            .collect();
        Ok(Self { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RealMatrix] {
        &self.basis
    }

    /// The basis as the columns of an `n² × dim` matrix.
    pub fn frame(&self) -> DMatrix<f64> {
        let nn = self.n * self.n;
        DMatrix::from_fn(nn, self.dim(), |r, k| self.basis[k][(r / self.n, r % self.n)])
    }

    /// Frobenius norm of the component of `m` orthogonal to the subspace.
    pub fn residual(&self, m: &RealMatrix) -> f64 {
        let mut r = m.clone();
        for b in &self.basis {
            let c = b.dot(m);
            r -= b * c;
        }
        r.norm()
    }

    pub fn contains(&self, m: &RealMatrix, tol: f64) -> bool {
        self.residual(m) <= tol * (1.0 + m.norm())
    }

    /// Largest residual of a commutator of two basis elements.
    pub fn bracket_closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (k, a) in self.basis.iter().enumerate() {
            for b in &self.basis[k + 1..] {
                let c = a * b - b * a;
                worst = worst.max(self.residual(&c));
            }
        }
        worst
    }

    /// Largest principal angle to another subspace of `gl(n)`.
    pub fn distance(&self, other: &LieSubspace) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("gl({}) vs gl({})", self.n, other.n)));
        }
        Ok(subspace_distance(&self.frame(), &other.frame()))
    }

    /// Whether every basis element is strictly upper triangular.
    pub fn is_strictly_upper_triangular(&self, tol: f64) -> bool {
        self.basis
            .iter()
            .all(|b| (0..self.n).all(|i| (0..=i).all(|j| b[(i, j)].abs() <= tol)))
    }
}

fn unit(n: usize, i: usize, j: usize) -> RealMatrix {
    let mut m = RealMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// The line `span{y·e_ij − x·e_ji}` attached to the projective point `[x : y]`.
fn eta_line(n: usize, i: usize, j: usize, p: Rp1Point) -> RealMatrix {
    unit(n, i, j) * p.v() - unit(n, j, i) * p.u()
}

/// `so(J) = span{λⱼ e_ij − λᵢ e_ji}` for a diagonal `J` without zero
/// entries.
pub fn so_basis(j: &[f64]) -> Result<LieSubspace> {
    if let Some(index) = j.iter().position(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::ZeroEigenvalue { index });
    }
    let n = j.len();
    let gens: Vec<RealMatrix> = pairs(n)
        .map(|(a, b)| unit(n, a, b) * j[b] - unit(n, b, a) * j[a])
        .collect();
    LieSubspace::span(n, &gens)
}

/// `so` of a monomial form path evaluated at a finite `t`.
pub fn so_at(path: &MonomialDiagonal, t: f64) -> Result<LieSubspace> {
    so_basis(&path.eval(t))
}

/// Reconstructs the Lie algebra from a point of `(RP¹)^{C(n,2)}` as the
/// direct sum of the lines `η_ij`.
pub fn eta(l: &LimitPoint) -> Result<LieSubspace> {
    decode_partition(l).map_err(|e| Error::Undecodable(e.to_string()))?;
    let n = l.n();
    let gens: Vec<RealMatrix> = pairs(n).map(|(i, j)| eta_line(n, i, j, l.get(i, j))).collect();
    let s = LieSubspace::span(n, &gens)?;
    debug_assert_eq!(s.dim(), n * (n - 1) / 2);
    Ok(s)
}

/// The limit `lim so(P(t))` as `t → +∞` for a monomial form path.
pub fn limit_lie_algebra(form_path: &MonomialDiagonal) -> Result<LieSubspace> {
    eta(&psi_limit(form_path))
}

/// Strictly upper triangular `n × n` matrices.
pub fn heis_algebra(n: usize) -> LieSubspace {
    let gens: Vec<RealMatrix> = pairs(n).map(|(i, j)| unit(n, i, j)).collect();
    LieSubspace::span(n, &gens).expect("square generators")
}

/// `euc(n−1)`: skew-symmetric upper-left block plus the last column.
pub fn euc_algebra(n: usize) -> LieSubspace {
    let gens: Vec<RealMatrix> = pairs(n)
        .map(|(i, j)| {
            if j == n - 1 {
                unit(n, i, j)
            } else {
                unit(n, i, j) - unit(n, j, i)
            }
        })
        .collect();
    LieSubspace::span(n, &gens).expect("square generators")
}
