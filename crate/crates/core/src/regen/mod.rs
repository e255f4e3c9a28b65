//! Cone tori in conjugated constant-curvature models `X_t = D_t·X` and their
//! regeneration from Heisenberg translation tori.
//!
//! `X` is the Klein model of `H²`, the gnomonic model of `S²` or the
//! Euclidean plane, all on the affine patch `z = 1`. A point `p` of the
//! conjugated model corresponds to `D⁻¹p` in the fixed model.

mod bounds;
mod pairing;

pub use bounds::{
    area_distortion_check, area_distortion_for_triangles, midpoint_bound_check, midpoint_k, AreaCheck, MidpointCheck,
};
pub use pairing::{
    form_residual, midline_residual, regenerate_trace, richardson, side_pairing, SidePairing, TraceSample,
    RegenTrace,
};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Sphere,
    Hyperbolic,
    Euclidean,
}

impl ModelKind {
    /// Sign `∓1` in the last entry of the form `diag(1, 1, ∓1)`.
    pub(crate) fn form_sign(self) -> f64 {
        match self {
            ModelKind::Hyperbolic => -1.0,
            ModelKind::Sphere | ModelKind::Euclidean => 1.0,
        }
    }
}

/// A model `D·X` with `D = diag(d₀, d₁, 1)`, `d₀, d₁ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParam {
    pub kind: ModelKind,
    pub d: [f64; 2],
}

impl ModelParam {
    pub fn new(kind: ModelKind, d: [f64; 2]) -> Result<Self> {
        if !d.iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::Parse(format!("conjugator entries must be positive, got {d:?}")));
        }
        Ok(Self { kind, d })
    }

    pub fn fixed(kind: ModelKind) -> Self {
        Self { kind, d: [1.0, 1.0] }
    }

    pub fn conjugator(&self) -> Matrix3<f64> {
        Matrix3::new(self.d[0], 0.0, 0.0, 0.0, self.d[1], 0.0, 0.0, 0.0, 1.0)
    }

    /// `Q_m = D⁻ᵀ·diag(1, 1, ∓1)·D⁻¹`.
    pub fn form(&self) -> Matrix3<f64> {
        Matrix3::new(
            1.0 / (self.d[0] * self.d[0]),
            0.0,
            0.0,
            0.0,
            1.0 / (self.d[1] * self.d[1]),
            0.0,
            0.0,
            0.0,
            self.kind.form_sign(),
        )
    }

    /// The point of the fixed model corresponding to `p`.
    pub fn pull_back(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] / self.d[0], p[1] / self.d[1]]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self.kind {
            ModelKind::Hyperbolic => {
                let a = self.pull_back(p);
                a[0] * a[0] + a[1] * a[1] < 1.0
            }
            _ => p.iter().all(|x| x.is_finite()),
        }
    }

    fn check(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        if self.contains(p) {
            Ok(self.pull_back(p))
        } else {
            Err(Error::OutsideDomain)
        }
    }
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

/// Distance between two points of the fixed model.
pub(crate) fn fixed_distance(kind: ModelKind, a: [f64; 2], b: [f64; 2]) -> f64 {
    let w = sub(b, a);
    let c = cross(a, w);
    match kind {
        // tanh d = √(|a−b|² − (a×b)²) / (1 − a·b)
        ModelKind::Hyperbolic => ((dot(w, w) - c * c).max(0.0).sqrt() / (1.0 - dot(a, b))).atanh(),
        // angle between (a, 1) and (b, 1)
        ModelKind::Sphere => (dot(w, w) + c * c).sqrt().atan2(1.0 + dot(a, b)),
        ModelKind::Euclidean => dot(w, w).sqrt(),
    }
}

/// Distance in the model `D·X`.
pub fn model_distance(m: &ModelParam, p: [f64; 2], q: [f64; 2]) -> Result<f64> {
    let (a, b) = (m.check(p)?, m.check(q)?);
    Ok(fixed_distance(m.kind, a, b))
}

/// Midpoint of the geodesic segment `pq`, found by bisection in the affine
/// parameter of the segment.
pub fn geodesic_midpoint(m: &ModelParam, p: [f64; 2], q: [f64; 2]) -> Result<[f64; 2]> {
    let (a, b) = (m.check(p)?, m.check(q)?);
    let at = |s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let x = at(mid);
        if fixed_distance(m.kind, a, x) < fixed_distance(m.kind, x, b) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    Ok([p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])])
}

/// A parallelogram in the affine patch, centred at the origin, with
/// vertices in cyclic order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 4]", into = "[[f64; 2]; 4]")]
pub struct Parallelogram {
    v: [[f64; 2]; 4],
}

impl Parallelogram {
    pub fn new(v: [[f64; 2]; 4]) -> Result<Self> {
        let scale = v.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        let bad = |msg: &str| Err(Error::InvalidParallelogram(msg.into()));
        if !(scale > 0.0 && scale.is_finite()) {
            return bad("vertices must be finite and not all at the origin");
        }
        let centroid = [
            v.iter().map(|p| p[0]).sum::<f64>() / 4.0,
            v.iter().map(|p| p[1]).sum::<f64>() / 4.0,
        ];
        if centroid[0].hypot(centroid[1]) > 1e-12 * scale.max(1.0) {
            return bad("centroid is not at the origin");
        }
        for k in 0..2 {
            let s = [v[k][0] + v[k + 2][0], v[k][1] + v[k + 2][1]];
            if s[0].hypot(s[1]) > 1e-12 * scale.max(1.0) {
                return bad("opposite vertices are not exchanged by the half turn");
            }
        }
        let area = cross(sub(v[1], v[0]), sub(v[3], v[0]));
        if area.abs() <= 1e-12 * scale * scale {
            return bad("vertices are collinear");
        }
        Ok(Self { v })
    }

    /// Axis-parallel square of the given side.
    pub fn square(side: f64) -> Result<Self> {
        let h = side / 2.0;
        Self::new([[-h, -h], [h, -h], [h, h], [-h, h]])
    }

    pub fn vertices(&self) -> &[[f64; 2]; 4] {
        &self.v
    }

    /// Sides `(v₁v₂), (v₂v₃), (v₃v₄), (v₄v₁)`.
    pub fn sides(&self) -> [([f64; 2], [f64; 2]); 4] {
        let v = self.v;
        [(v[0], v[1]), (v[1], v[2]), (v[2], v[3]), (v[3], v[0])]
    }

    /// Whether the half turn `diag(−1, −1, 1)` maps the vertex set to itself.
    pub fn is_half_turn_symmetric(&self, tol: f64) -> bool {
        self.v.iter().all(|p| {
            self.v
                .iter()
                .any(|q| (p[0] + q[0]).abs() <= tol && (p[1] + q[1]).abs() <= tol)
        })
    }
}

impl TryFrom<[[f64; 2]; 4]> for Parallelogram {
    type Error = Error;

    fn try_from(v: [[f64; 2]; 4]) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Parallelogram> for [[f64; 2]; 4] {
    fn from(p: Parallelogram) -> Self {
        p.v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn hyperbolic_distance_from_origin() {
        let m = ModelParam::fixed(ModelKind::Hyperbolic);
        for r in [1e-9, 0.1, 0.5, 0.9] {
            let d = model_distance(&m, [0.0, 0.0], [r, 0.0]).unwrap();
            assert!((d - f64::atanh(r)).abs() < 1e-15 * (1.0 + d));
        }
        assert_eq!(model_distance(&m, [0.3, 0.2], [0.3, 0.2]).unwrap(), 0.0);
        assert_eq!(model_distance(&m, [0.0, 0.0], [1.0, 0.0]), Err(Error::OutsideDomain));
    }

    #[test]
    fn hyperbolic_distance_matches_cross_ratio() {
        let m = ModelParam::fixed(ModelKind::Hyperbolic);
        let (p, q) = ([0.1, 0.3], [-0.4, 0.2]);
        // chord endpoints on the unit circle
        let w = sub(q, p);
        let (a, b, c) = (dot(w, w), 2.0 * dot(p, w), dot(p, p) - 1.0);
        let disc = (b * b - 4.0 * a * c).sqrt();
        let (s0, s1) = ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a));
        let klein = 0.5 * ((1.0 - s0) * s1 / ((0.0 - s0) * (s1 - 1.0))).ln();
        assert!((model_distance(&m, p, q).unwrap() - klein).abs() < 1e-14);
    }

    #[test]
    fn sphere_distance() {
        let m = ModelParam::fixed(ModelKind::Sphere);
        let d = model_distance(&m, [1.0, 0.0], [-1.0, 0.0]).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        let d = model_distance(&m, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert!((d - FRAC_PI_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn conjugated_distances() {
        let m = ModelParam::new(ModelKind::Hyperbolic, [4.0, 2.0]).unwrap();
        let d = model_distance(&m, [0.0, 0.0], [2.0, 0.0]).unwrap();
        assert!((d - f64::atanh(0.5)).abs() < 1e-15);
        let e = ModelParam::new(ModelKind::Euclidean, [2.0, 1.0]).unwrap();
        assert_eq!(model_distance(&e, [0.0, 0.0], [2.0, 1.0]).unwrap(), 2f64.sqrt());
        assert!(ModelParam::new(ModelKind::Sphere, [0.0, 1.0]).is_err());
    }

    #[test]
    fn midpoints() {
        let e = ModelParam::fixed(ModelKind::Euclidean);
        let mid = geodesic_midpoint(&e, [0.0, 1.0], [2.0, 3.0]).unwrap();
        assert!((mid[0] - 1.0).abs() < 1e-12 && (mid[1] - 2.0).abs() < 1e-12);
        let h = ModelParam::fixed(ModelKind::Hyperbolic);
        let mid = geodesic_midpoint(&h, [-0.6, 0.0], [0.6, 0.0]).unwrap();
        assert!(mid[0].abs() < 1e-12);
        let r: f64 = 0.8;
        let mid = geodesic_midpoint(&h, [0.0, 0.0], [r, 0.0]).unwrap();
        assert!((mid[0] - (r.atanh() / 2.0).tanh()).abs() < 1e-12);
    }

    #[test]
    fn parallelogram_validation() {
        let sq = Parallelogram::square(0.2).unwrap();
        assert!(sq.is_half_turn_symmetric(1e-15));
        assert!(Parallelogram::new([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [-3.0, 0.0]]).is_err());
        assert!(Parallelogram::new([[-1.0, 0.0], [0.0, -1.0], [1.0, 0.0], [0.0, 1.0]]).is_ok());
        assert!(Parallelogram::new([[-1.0, 0.0], [0.0, -1.0], [1.0, 0.1], [0.0, 0.9]]).is_err());
        assert!(Parallelogram::new([[-1.0, 0.0], [-0.5, 0.0], [1.0, 0.0], [0.5, 0.0]]).is_err());
    }
}
