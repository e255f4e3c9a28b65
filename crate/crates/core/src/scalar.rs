//! The two-dimensional real algebras `Λ_δ = R[λ]/(λ² = δ)`.
//!
//! Depending on the sign of `δ` the algebra is isomorphic to the complex
//! numbers, the dual numbers or the split-complex numbers `R ⊕ R`. Every
//! scalar carries its own `δ` so that a single computation may sweep the
//! parameter; combining scalars from different algebras is an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Isomorphism type of `Λ_δ`, determined by the sign of `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    Complex,
    Dual,
    Split,
}

impl AlgebraKind {
    pub fn of(delta: f64) -> Self {
        if delta < 0.0 {
            AlgebraKind::Complex
        } else if delta > 0.0 {
            AlgebraKind::Split
        } else {
            AlgebraKind::Dual
        }
    }
}

/// An element `re + λ·im` of `Λ_δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgScalar {
    pub re: f64,
    pub im: f64,
    pub delta: f64,
}

/// Canonical form of a delta value: `-0.0` is folded into `0.0`.
#[inline]
pub(crate) fn canonical_delta(delta: f64) -> f64 {
    delta + 0.0
}

#[inline]
pub(crate) fn same_delta(a: f64, b: f64) -> bool {
    canonical_delta(a).to_bits() == canonical_delta(b).to_bits()
}

// add, sub and mul are fallible on mismatched deltas, so they are not the
// operator traits
#[allow(clippy::should_implement_trait)]
impl AlgScalar {
    pub fn new(re: f64, im: f64, delta: f64) -> Self {
        Self {
            re,
            im,
            delta: canonical_delta(delta),
        }
    }

    pub fn real(re: f64, delta: f64) -> Self {
        Self::new(re, 0.0, delta)
    }

    pub fn one(delta: f64) -> Self {
        Self::new(1.0, 0.0, delta)
    }

    pub fn zero(delta: f64) -> Self {
        Self::new(0.0, 0.0, delta)
    }

    /// The generator `λ`, with `λ² = δ`.
    pub fn lambda(delta: f64) -> Self {
        Self::new(0.0, 1.0, delta)
    }

    pub fn kind(&self) -> AlgebraKind {
        AlgebraKind::of(self.delta)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_delta(self.delta, other.delta) {
            Ok(())
        } else {
            Err(Error::DeltaMismatch {
                left: self.delta,
                right: other.delta,
            })
        }
    }

    pub fn add(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.add_same(other))
    }

    pub fn sub(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.sub_same(other))
    }

    /// `(a + λb)(c + λd) = (ac + δbd) + λ(ad + bc)`.
    pub fn mul(self, other: Self) -> Result<Self> {
        self.check(&other)?;
        Ok(self.mul_same(other))
    }

    // The `*_same` variants skip the delta check; callers guarantee it.
    #[inline]
    pub(crate) fn add_same(self, other: Self) -> Self {
        debug_assert!(same_delta(self.delta, other.delta));
        Self {
            re: self.re + other.re,
            im: self.im + other.im,
            delta: self.delta,
        }
    }

    #[inline]
    pub(crate) fn sub_same(self, other: Self) -> Self {
        debug_assert!(same_delta(self.delta, other.delta));
        Self {
            re: self.re - other.re,
            im: self.im - other.im,
            delta: self.delta,
        }
    }

    #[inline]
    pub(crate) fn mul_same(self, other: Self) -> Self {
        debug_assert!(same_delta(self.delta, other.delta));
        Self {
            re: self.re * other.re + self.delta * self.im * other.im,
            im: self.re * other.im + self.im * other.re,
            delta: self.delta,
        }
    }

    pub fn scale(self, s: f64) -> Self {
        Self {
            re: self.re * s,
            im: self.im * s,
            delta: self.delta,
        }
    }

    pub fn neg(self) -> Self {
        self.scale(-1.0)
    }

    /// The involution `a + λb ↦ a − λb`.
    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
            delta: self.delta,
        }
    }

    /// `‖a + λb‖ = a² − δb²`, equal to `x·conj(x)`.
    pub fn norm(self) -> f64 {
        self.re * self.re - self.delta * self.im * self.im
    }

    /// Zero-divisor tolerance for this element.
    pub fn zero_tolerance(&self) -> f64 {
        1e-12 * (1.0 + self.re.abs() + self.im.abs())
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs() > self.zero_tolerance()
    }

    pub fn inv(self) -> Result<Self> {
        let norm = self.norm();
        if norm.abs() <= self.zero_tolerance() {
            return Err(Error::ZeroDivisor { norm });
        }
        Ok(self.conj().scale(1.0 / norm))
    }

    pub fn max_abs(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

/// The principal idempotents `e± = ½(1 ± λ/√δ)` of the split algebra.
///
/// For `δ = 1` these are the familiar `½(1 ± λ)`; for other positive `δ`
/// the normalised root `λ/√δ` squares to one.
pub fn idempotents(delta: f64) -> Result<(AlgScalar, AlgScalar)> {
    if delta <= 0.0 || delta.is_nan() {
        return Err(Error::NotSplit(delta));
    }
    let b = 0.5 / delta.sqrt();
    Ok((
        AlgScalar::new(0.5, b, delta),
        AlgScalar::new(0.5, -b, delta),
    ))
}
