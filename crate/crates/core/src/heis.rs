//! Representations of `Z²` into the Heisenberg group and the developing maps
//! of Heisenberg tori.
//!
//! A representation is stored in Lie algebra coordinates `(x⃗, y⃗, z⃗)`:
//! `log ρ(eᵢ) = [[0, xᵢ, zᵢ], [0, 0, yᵢ], [0, 0, 0]]`, acting on the affine
//! patch by `(u, v) ↦ (u + a v + c, v + b)`.

use nalgebra::{Matrix2x3, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO_TOL: f64 = 1e-12;
const BRACKET_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-10;

/// An element `[[±1, a, c], [0, ±1, b], [0, 0, 1]]` of `Heis`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisElement(Matrix3<f64>);

impl HeisElement {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let lower = [m[(1, 0)], m[(2, 0)], m[(2, 1)]];
        let diag_ok = [m[(0, 0)], m[(1, 1)]].iter().all(|d| d.abs() == 1.0) && m[(2, 2)] == 1.0;
        if lower.iter().any(|&x| x != 0.0) || !diag_ok {
            return Err(Error::ShapeMismatch("not a Heisenberg matrix".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Action on the affine patch.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let w = self.0 * Vector3::new(p[0], p[1], 1.0);
        [w[0], w[1]]
    }

    fn in_identity_component(&self) -> bool {
        self.0[(0, 0)] == 1.0 && self.0[(1, 1)] == 1.0
    }
}

/// `exp` of the nilpotent matrix with shear `x`, vertical part `y` and
/// corner `z`.
pub fn heis_exp(x: f64, y: f64, z: f64) -> HeisElement {
    HeisElement(Matrix3::new(1.0, x, z + x * y / 2.0, 0.0, 1.0, y, 0.0, 0.0, 1.0))
}

/// Inverse of [`heis_exp`] on the identity component.
pub fn heis_log(g: &HeisElement) -> Result<(f64, f64, f64)> {
    if !g.in_identity_component() {
        return Err(Error::NotIdentityComponent);
    }
    let m = g.matrix();
    let (x, y) = (m[(0, 1)], m[(1, 2)]);
    Ok((x, y, m[(0, 2)] - x * y / 2.0))
}

/// Lie algebra coordinates of a representation `Z² → Heis₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisRep {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

impl HeisRep {
    pub fn new(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> Self {
        Self { x, y, z }
    }

    /// `x₁y₂ − x₂y₁`, the corner of `[log ρ(e₁), log ρ(e₂)]`.
    pub fn bracket(&self) -> f64 {
        self.x[0] * self.y[1] - self.x[1] * self.y[0]
    }

    /// Image of the generator `eᵢ` (`i = 0, 1`).
    pub fn generator(&self, i: usize) -> HeisElement {
        heis_exp(self.x[i], self.y[i], self.z[i])
    }

    /// `ρ(e₁)^u ρ(e₂)^v` for real exponents.
    pub fn real_power(&self, u: f64, v: f64) -> HeisElement {
        heis_exp(u * self.x[0], u * self.y[0], u * self.z[0]).mul(&heis_exp(
            v * self.x[1],
            v * self.y[1],
            v * self.z[1],
        ))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let m = |v: [f64; 2]| [s * v[0], s * v[1]];
        Self::new(m(self.x), m(self.y), m(self.z))
    }

    fn xy_norm(&self) -> f64 {
        (dot2(self.x, self.x) + dot2(self.y, self.y)).sqrt()
    }

    fn is_central(&self) -> bool {
        let full = (self.xy_norm().powi(2) + dot2(self.z, self.z)).sqrt();
        self.xy_norm() <= ZERO_TOL * full
    }

    /// Residuals of the four equations cutting out `U★`.
    pub fn u_star_residual(&self) -> f64 {
        [
            self.xy_norm().powi(2) - 1.0,
            self.bracket(),
            dot2(self.z, self.x),
            dot2(self.z, self.y),
        ]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

pub fn is_representation(r: &HeisRep, tol: f64) -> bool {
    r.bracket().abs() <= tol
}

/// Conjugation by `[[1, g, k], [0, 1, h], [0, 0, 1]]`.
pub fn conjugate_rep(r: &HeisRep, g: f64, h: f64) -> HeisRep {
    let z = [
        r.z[0] + g * r.y[0] - h * r.x[0],
        r.z[1] + g * r.y[1] - h * r.x[1],
    ];
    HeisRep::new(r.x, r.y, z)
}

/// Conjugation by `diag(−1, −1, 1)`, the generator of `Heis₊ / Heis₀`.
pub fn outer_flip(r: &HeisRep) -> HeisRep {
    HeisRep::new(r.x, [-r.y[0], -r.y[1]], [-r.z[0], -r.z[1]])
}

/// Representative in `U★`: rescaled so that `‖x‖² + ‖y‖² = 1`, then
/// conjugated so that `z` is orthogonal to the line spanned by `x` and `y`.
pub fn normalize(r: &HeisRep) -> Result<HeisRep> {
    if r.is_central() {
        return Err(Error::CentralRep);
    }
    let s = r.scaled(1.0 / r.xy_norm());
    let lead = if norm2(s.x) >= norm2(s.y) { s.x } else { s.y };
    let d = [lead[0] / norm2(lead), lead[1] / norm2(lead)];
    let c = dot2(s.z, d);
    Ok(HeisRep::new(s.x, s.y, [s.z[0] - c * d[0], s.z[1] - c * d[1]]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolonomyKind {
    Translation,
    Shear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "kind")]
pub enum RepClass {
    Central,
    NotFaithful,
    FaithfulNotFree,
    Holonomy(HolonomyKind),
}

impl RepClass {
    pub fn is_holonomy(&self) -> bool {
        matches!(self, RepClass::Holonomy(_))
    }
}

/// Classifies a representation as in the description of the holonomies of
/// Heisenberg tori.
pub fn classify(r: &HeisRep) -> Result<RepClass> {
    let b = r.bracket();
    if b.abs() > BRACKET_TOL * norm2(r.x) * norm2(r.y) {
        return Err(Error::NotARepresentation(b));
    }
    if r.is_central() {
        return Ok(RepClass::Central);
    }
    let rows = Matrix2x3::new(r.x[0], r.y[0], r.z[0], r.x[1], r.y[1], r.z[1]);
    let sv = rows.singular_values();
    let (s1, s2) = (sv[0].max(sv[1]), sv[0].min(sv[1]));
    if s2 <= RANK_TOL * (s1 + 1.0) {
        return Ok(RepClass::NotFaithful);
    }
    let scale = r.xy_norm();
    if norm2(r.y) <= ZERO_TOL * scale {
        return Ok(RepClass::FaithfulNotFree);
    }
    let kind = if norm2(r.x) <= ZERO_TOL * scale {
        HolonomyKind::Translation
    } else {
        HolonomyKind::Shear
    };
    Ok(RepClass::Holonomy(kind))
}

fn require_holonomy(r: &HeisRep) -> Result<()> {
    if classify(r)?.is_holonomy() {
        Ok(())
    } else {
        Err(Error::NotHolonomy)
    }
}

/// `f(u, v) = ρ(e₁)^u ρ(e₂)^v · 0`.
pub fn developing_map(r: &HeisRep, u: f64, v: f64) -> Result<[f64; 2]> {
    require_holonomy(r)?;
    Ok(r.real_power(u, v).apply([0.0, 0.0]))
}

/// Canonical point of Teichmüller space: the `U★` representative whose `y`
/// is lexicographically non-negative.
pub fn teichmuller_coords(r: &HeisRep) -> Result<HeisRep> {
    require_holonomy(r)?;
    let n = normalize(r)?;
    let negative = n.y[0] < 0.0 || (n.y[0] == 0.0 && n.y[1] < 0.0);
    Ok(if negative { outer_flip(&n) } else { n })
}

/// Image of the boundary of the unit square under the developing map, as a
/// closed polyline with `per_side` segments per side.
pub fn unit_square_image(r: &HeisRep, per_side: usize) -> Result<Vec<[f64; 2]>> {
    let k = per_side.max(1);
    let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
    let mut out = Vec::with_capacity(4 * k + 1);
    for w in corners.windows(2) {
        for s in 0..k {
            let t = s as f64 / k as f64;
            let u = w[0][0] + t * (w[1][0] - w[0][0]);
            let v = w[0][1] + t * (w[1][1] - w[0][1]);
            out.push(developing_map(r, u, v)?);
        }
    }
    out.push(out[0]);
    Ok(out)
}

/// A standalone SVG document drawing the given closed polyline.
pub fn polyline_svg(points: &[[f64; 2]], size: f64) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let pad = 0.05 * size;
    let scale = (size - 2.0 * pad) / span;
    let coords: Vec<String> = points
        .iter()
        .map(|p| {
            format!(
                "{:.4},{:.4}",
                pad + (p[0] - lo[0]) * scale,
                size - pad - (p[1] - lo[1]) * scale
            )
        })
        .collect();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>\n</svg>\n",
        coords.join(" ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn translation() -> HeisRep {
        HeisRep::new([0.0, 0.0], [1.0, 0.0], [0.0, 1.0])
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(*heis_exp(0.0, 0.0, 0.0).matrix(), Matrix3::identity());
        assert_eq!(
            *heis_exp(1.0, 0.0, 0.0).matrix(),
            Matrix3::new(1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        );
        let (x, y, z) = heis_log(&heis_exp(0.3, -1.2, 2.5)).unwrap();
        assert!((x - 0.3).abs() < 1e-15 && (y + 1.2).abs() < 1e-15 && (z - 2.5).abs() < 1e-15);
        let flip = HeisElement::new(Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0))).unwrap();
        assert_eq!(heis_log(&flip), Err(Error::NotIdentityComponent));
    }

    #[test]
    fn representations() {
        assert!(is_representation(&HeisRep::new([1.0, 0.0], [0.0, 0.0], [5.0, -2.0]), 1e-12));
        assert!(!is_representation(&HeisRep::new([1.0, 0.0], [0.0, 1.0], [0.0, 0.0]), 1e-12));
        assert!(is_representation(&HeisRep::new([0.0; 2], [0.0; 2], [1.0, 2.0]), 0.0));
    }

    #[test]
    fn conjugation_and_flip() {
        let r = HeisRep::new([0.0, 0.0], [1.0, 0.0], [0.0, 0.0]);
        assert_eq!(conjugate_rep(&r, 0.0, 0.0), r);
        assert_eq!(conjugate_rep(&r, 2.0, 0.0).z, [2.0, 0.0]);
        let r = HeisRep::new([1.0, 2.0], [3.0, 6.0], [1.0, 1.0]);
        assert_eq!(conjugate_rep(&r, 1.0, 1.0).z, [3.0, 5.0]);
        assert_eq!(outer_flip(&r), HeisRep::new([1.0, 2.0], [-3.0, -6.0], [-1.0, -1.0]));
        // the flip is conjugation by diag(-1,-1,1)
        let d = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        let f = outer_flip(&r);
        for i in 0..2 {
            let conj = d * r.generator(i).matrix() * d;
            assert!((conj - f.generator(i).matrix()).amax() < 1e-15);
        }
    }

    #[test]
    fn conjugation_matches_matrices() {
        let r = HeisRep::new([1.0, 2.0], [0.5, 1.0], [0.3, -0.7]);
        let (g, h, k) = (0.4, -1.3, 2.0);
        let c = Matrix3::new(1.0, g, k, 0.0, 1.0, h, 0.0, 0.0, 1.0);
        let ci = c.try_inverse().unwrap();
        let conj = conjugate_rep(&r, g, h);
        for i in 0..2 {
            let m = c * r.generator(i).matrix() * ci;
            assert!((m - conj.generator(i).matrix()).amax() < 1e-14);
        }
    }

    #[test]
    fn normalization() {
        let r = HeisRep::new([0.0, 0.0], [2.0, 0.0], [3.0, 0.0]);
        assert_eq!(normalize(&r).unwrap(), HeisRep::new([0.0, 0.0], [1.0, 0.0], [0.0, 0.0]));
        let n = HeisRep::new([0.6, 0.0], [0.8, 0.0], [0.0, 2.0]);
        assert_eq!(normalize(&n).unwrap(), n);
        let r = HeisRep::new([1.0, -2.0], [0.5, -1.0], [3.0, 1.0]);
        assert!(normalize(&r).unwrap().u_star_residual() < 1e-15);
        assert_eq!(normalize(&HeisRep::new([0.0; 2], [0.0; 2], [1.0, 0.0])), Err(Error::CentralRep));
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&translation()).unwrap(), RepClass::Holonomy(HolonomyKind::Translation));
        assert_eq!(
            classify(&HeisRep::new([1.0, 0.0], [1.0, 0.0], [0.0, 1.0])).unwrap(),
            RepClass::Holonomy(HolonomyKind::Shear)
        );
        assert_eq!(
            classify(&HeisRep::new([0.6, 0.0], [0.8, 0.0], [0.0, 0.0])).unwrap(),
            RepClass::NotFaithful
        );
        assert_eq!(
            classify(&HeisRep::new([1.0, 0.0], [0.0, 0.0], [0.0, 1.0])).unwrap(),
            RepClass::FaithfulNotFree
        );
        assert_eq!(classify(&HeisRep::new([0.0; 2], [0.0; 2], [1.0, 1.0])).unwrap(), RepClass::Central);
        assert!(matches!(
            classify(&HeisRep::new([1.0, 0.0], [0.0, 1.0], [0.0, 0.0])),
            Err(Error::NotARepresentation(_))
        ));
    }

    #[test]
    fn developing_translation_torus() {
        let r = translation();
        assert_eq!(developing_map(&r, 0.0, 0.0).unwrap(), [0.0, 0.0]);
        assert_eq!(developing_map(&r, 0.3, 0.7).unwrap(), [0.7, 0.3]);
        let area = {
            let a = developing_map(&r, 1.0, 0.0).unwrap();
            let b = developing_map(&r, 0.0, 1.0).unwrap();
            (a[0] * b[1] - a[1] * b[0]).abs()
        };
        assert!((area - (r.y[0] * r.z[1] - r.y[1] * r.z[0]).abs()).abs() < 1e-15);
        assert_eq!(
            developing_map(&HeisRep::new([0.0; 2], [1.0, 0.0], [0.0; 2]), 0.0, 0.0),
            Err(Error::NotHolonomy)
        );
    }

    #[test]
    fn developing_equivariance_for_shears() {
        let r = HeisRep::new([0.5, 1.0], [1.0, 2.0], [0.0, 1.0]);
        assert_eq!(classify(&r).unwrap(), RepClass::Holonomy(HolonomyKind::Shear));
        for &(u, v) in &[(0.2, 0.9), (-1.5, 2.0), (3.0, 0.1)] {
            let f = developing_map(&r, u + 1.0, v).unwrap();
            let g = r.generator(0).apply(developing_map(&r, u, v).unwrap());
            assert!((f[0] - g[0]).abs() < 1e-12 && (f[1] - g[1]).abs() < 1e-12);
            let f = developing_map(&r, u, v + 1.0).unwrap();
            let g = r.generator(1).apply(developing_map(&r, u, v).unwrap());
            assert!((f[0] - g[0]).abs() < 1e-12 && (f[1] - g[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn teichmuller_representatives() {
        let r = HeisRep::new([0.0, 0.0], [-1.0, 0.0], [0.0, 1.0]);
        let t = teichmuller_coords(&r).unwrap();
        assert_eq!(t, HeisRep::new([0.0, 0.0], [1.0, 0.0], [0.0, -1.0]));
        assert_eq!(teichmuller_coords(&t).unwrap(), t);
        let s = HeisRep::new([0.5, 1.0], [1.0, 2.0], [0.0, 1.0]);
        assert_eq!(teichmuller_coords(&s).unwrap(), teichmuller_coords(&outer_flip(&s)).unwrap());
    }

    #[test]
    fn square_image_and_svg() {
        let pts = unit_square_image(&translation(), 4).unwrap();
        assert_eq!(pts.len(), 17);
        assert_eq!(pts[0], pts[16]);
        assert_eq!(pts[4], [0.0, 1.0]);
        let svg = polyline_svg(&pts, 200.0);
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}
