use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{cross, model_distance, sub, ModelKind, ModelParam};
use crate::error::{Error, Result};

/// Constant `K_ε ≥ 1` bounding the distortion of lengths of segments in the
/// Euclidean ball `B(0, ε)` of the fixed model: `1/√(1−4ε²)` for `H²` and
/// `1 + ε²` for `S²`.
pub fn midpoint_k(kind: ModelKind, eps: f64) -> f64 {
    match kind {
        ModelKind::Hyperbolic => 1.0 / (1.0 - 4.0 * eps * eps).sqrt(),
        ModelKind::Sphere => 1.0 + eps * eps,
        ModelKind::Euclidean => 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidpointCheck {
    /// `d(p, m)/d(m, q)` for the Euclidean midpoint `m`.
    pub ratio: f64,
    pub k_eps: f64,
    pub pass: bool,
}

/// Compares the model lengths of the two halves of a segment, cut at its
/// Euclidean midpoint, against `[1/K_ε, K_ε]`. The pulled-back segment must
/// lie in `B(0, ε)`.
pub fn midpoint_bound_check(m: &ModelParam, p: [f64; 2], q: [f64; 2], eps: f64) -> Result<MidpointCheck> {
    let inside = |x: [f64; 2]| {
        let a = m.pull_back(x);
        a[0].hypot(a[1]) <= eps
    };
    if !(inside(p) && inside(q)) || (m.kind == ModelKind::Hyperbolic && eps >= 0.5) {
        return Err(Error::OutsideDomain);
    }
    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
    let ratio = model_distance(m, p, mid)? / model_distance(m, mid, q)?;
    let k_eps = midpoint_k(m.kind, eps);
    Ok(MidpointCheck {
        ratio,
        k_eps,
        pass: 1.0 / k_eps <= ratio && ratio <= k_eps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub lower: f64,
    pub upper: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
    /// First triangle whose area ratio falls outside the bounds.
    pub witness: Option<[[f64; 2]; 3]>,
}

/// Isometry with translation length `τ` along the geodesic through the
/// origin in direction `φ`: a boost of `H²` or a rotation of `S²` about an
/// axis that is ideal for the affine patch.
pub fn axis_isometry(kind: ModelKind, tau: f64, phi: f64) -> Matrix3<f64> {
    let (c, s) = match kind {
        ModelKind::Hyperbolic => (tau.cosh(), tau.sinh()),
        ModelKind::Sphere => (tau.cos(), tau.sin()),
        ModelKind::Euclidean => (1.0, 0.0),
    };
    let sign = kind.form_sign();
    let along = Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -sign * s, 0.0, c);
    let (cp, sp) = (phi.cos(), phi.sin());
    let rot = Matrix3::new(cp, -sp, 0.0, sp, cp, 0.0, 0.0, 0.0, 1.0);
    rot * along * rot.transpose()
}

fn area(t: &[[f64; 2]; 3]) -> f64 {
    cross(sub(t[1], t[0]), sub(t[2], t[0])).abs() / 2.0
}

fn image(m: &Matrix3<f64>, p: [f64; 2]) -> [f64; 2] {
    let w = m * nalgebra::Vector3::new(p[0], p[1], 1.0);
    [w[0] / w[2], w[1] / w[2]]
}

/// The area bounds `1/(c(τ) ± ε s(τ))³` tested on given triangles, with the
/// axis in direction `φ`.
pub fn area_distortion_for_triangles(
    kind: ModelKind,
    tau: f64,
    eps: f64,
    phi: f64,
    triangles: &[[[f64; 2]; 3]],
) -> AreaCheck {
    let (c, s) = match kind {
        ModelKind::Hyperbolic => (tau.cosh(), tau.sinh().abs()),
        ModelKind::Sphere => (tau.cos(), tau.sin().abs()),
        ModelKind::Euclidean => (1.0, 0.0),
    };
    let lower = 1.0 / (c + eps * s).powi(3);
    let upper = 1.0 / (c - eps * s).powi(3);
    let m = axis_isometry(kind, tau, phi);
    let slack = 1e-12;
    let mut out = AreaCheck {
        lower,
        upper,
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        pass: true,
        witness: None,
    };
    for t in triangles {
        let img = [image(&m, t[0]), image(&m, t[1]), image(&m, t[2])];
        let r = area(&img) / area(t);
        out.min_ratio = out.min_ratio.min(r);
        out.max_ratio = out.max_ratio.max(r);
        if !(r >= lower * (1.0 - slack) && r <= upper * (1.0 + slack)) {
            out.pass = false;
            out.witness.get_or_insert(*t);
        }
    }
    out
}

/// The area bounds on `samples` random triangles in `B(0, ε)` with random
/// axis directions, reproducible from `seed`.
pub fn area_distortion_check(kind: ModelKind, tau: f64, eps: f64, samples: usize, seed: u64) -> AreaCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| loop {
        let p = [rng.random_range(-eps..=eps), rng.random_range(-eps..=eps)];
        if p[0].hypot(p[1]) <= eps {
            return p;
        }
    };
    let mut merged: Option<AreaCheck> = None;
    for _ in 0..samples {
        let tri = loop {
            let t = [point(&mut rng), point(&mut rng), point(&mut rng)];
            if area(&t) > 1e-6 * eps * eps {
                break t;
            }
        };
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let one = area_distortion_for_triangles(kind, tau, eps, phi, &[tri]);
        merged = Some(match merged {
            None => one,
            Some(mut acc) => {
                acc.min_ratio = acc.min_ratio.min(one.min_ratio);
                acc.max_ratio = acc.max_ratio.max(one.max_ratio);
                acc.pass &= one.pass;
                acc.witness = acc.witness.or(one.witness);
                acc
            }
        });
    }
    merged.unwrap_or_else(|| area_distortion_for_triangles(kind, tau, eps, 0.0, &[]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_segment_has_ratio_one() {
        for kind in [ModelKind::Hyperbolic, ModelKind::Sphere] {
            let m = ModelParam::fixed(kind);
            let c = midpoint_bound_check(&m, [-0.2, 0.1], [0.2, -0.1], 0.3).unwrap();
            assert!((c.ratio - 1.0).abs() < 1e-12 && c.pass);
        }
    }

    #[test]
    fn asymmetric_segments_pass() {
        let m = ModelParam::fixed(ModelKind::Hyperbolic);
        let c = midpoint_bound_check(&m, [0.0, 0.0], [0.29, 0.0], 0.3).unwrap();
        assert!(c.ratio < 1.0 && c.pass);
        let s = ModelParam::fixed(ModelKind::Sphere);
        let c = midpoint_bound_check(&s, [0.0, 0.0], [0.29, 0.0], 0.3).unwrap();
        assert!(c.ratio > 1.0 && c.pass);
        assert!(midpoint_bound_check(&m, [0.0, 0.0], [0.5, 0.0], 0.3).is_err());
    }

    #[test]
    fn axis_isometries_preserve_forms() {
        for kind in [ModelKind::Hyperbolic, ModelKind::Sphere] {
            let m = axis_isometry(kind, 0.4, 1.1);
            let j = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, kind.form_sign()));
            assert!((m.transpose() * j * m - j).amax() < 1e-14);
        }
    }

    #[test]
    fn identity_isometry_keeps_areas() {
        let c = area_distortion_check(ModelKind::Hyperbolic, 0.0, 0.2, 10, 1);
        assert!(c.pass && (c.lower - 1.0).abs() < 1e-15 && (c.upper - 1.0).abs() < 1e-15);
        assert!((c.max_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_triangles_pass() {
        for kind in [ModelKind::Hyperbolic, ModelKind::Sphere] {
            let c = area_distortion_check(kind, 0.1, 0.2, 50, 7);
            assert!(c.pass, "{c:?}");
            assert!(c.witness.is_none());
        }
    }

    #[test]
    fn triangles_outside_the_ball_are_caught() {
        let far = [[0.6, 0.0], [0.7, 0.05], [0.65, -0.05]];
        let c = area_distortion_for_triangles(ModelKind::Hyperbolic, 0.5, 0.05, 0.0, &[far]);
        assert!(!c.pass);
        assert_eq!(c.witness, Some(far));
    }
}
