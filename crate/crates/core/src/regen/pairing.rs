use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{cross, dot, geodesic_midpoint, model_distance, ModelKind, ModelParam, Parallelogram};
use crate::error::{Error, Result};
use crate::limits::MonomialDiagonal;

/// Matrices close to the identity are carried as their deviation `M − I`:
/// conjugation by `D_t` multiplies some entries by `t²`, so the small
/// entries must keep their relative precision.
#[derive(Debug, Clone, Copy)]
struct NearId(Matrix3<f64>);

impl NearId {
    fn then(self, other: NearId) -> NearId {
        // (I + a)(I + b) = I + a + b + ab, applied as self ∘ other
        NearId(self.0 + other.0 + self.0 * other.0)
    }
}

/// The isometry of the fixed model moving the origin to `a` along the
/// geodesic through both (a boost, a rotation of the sphere or a
/// translation).
fn transvection(kind: ModelKind, a: [f64; 2]) -> NearId {
    let r2 = dot(a, a);
    let m = match kind {
        ModelKind::Euclidean => Matrix3::new(0.0, 0.0, a[0], 0.0, 0.0, a[1], 0.0, 0.0, 0.0),
        ModelKind::Hyperbolic | ModelKind::Sphere => {
            let sign = kind.form_sign();
            // unit lift (p, p₀) of (a, 1) for the form diag(1, 1, ∓1)
            let n = (1.0 + sign * r2).sqrt();
            let p = [a[0] / n, a[1] / n];
            let p0 = 1.0 / n;
            let pp = dot(p, p);
            let k = -sign / (1.0 + p0);
            Matrix3::new(
                k * p[0] * p[0],
                k * p[0] * p[1],
                p[0],
                k * p[1] * p[0],
                k * p[1] * p[1],
                p[1],
                -sign * p[0],
                -sign * p[1],
                -sign * pp / (1.0 + p0),
            )
        }
    };
    NearId(m)
}

fn rotation(from: [f64; 2], to: [f64; 2]) -> NearId {
    let (nf, nt) = (dot(from, from).sqrt(), dot(to, to).sqrt());
    let s = cross(from, to) / (nf * nt);
    let c = dot(from, to) / (nf * nt);
    let cm1 = -s * s / (1.0 + c);
    NearId(Matrix3::new(cm1, -s, 0.0, s, cm1, 0.0, 0.0, 0.0, 0.0))
}

/// Spatial part of `(I + m)·(x, 1)`; its direction is the direction of the
/// affine image of `x` seen from the origin.
fn spatial_image(m: &NearId, x: [f64; 2]) -> [f64; 2] {
    let v = m.0 * nalgebra::Vector3::new(x[0], x[1], 1.0);
    [x[0] + v[0], x[1] + v[1]]
}

/// The orientation-preserving isometry of the fixed model sending the
/// segment `a₁a₂` onto `b₁b₂` (of equal length), endpoint to endpoint.
fn fixed_pairing(kind: ModelKind, a: ([f64; 2], [f64; 2]), b: ([f64; 2], [f64; 2])) -> NearId {
    let ta_inv = transvection(kind, [-a.0[0], -a.0[1]]);
    let tb_inv = transvection(kind, [-b.0[0], -b.0[1]]);
    let r = rotation(spatial_image(&ta_inv, a.1), spatial_image(&tb_inv, b.1));
    transvection(kind, b.0).then(r).then(ta_inv)
}

fn conjugate(m: &ModelParam, n: NearId) -> Matrix3<f64> {
    let d = m.conjugator();
    let di = Matrix3::new(1.0 / m.d[0], 0.0, 0.0, 0.0, 1.0 / m.d[1], 0.0, 0.0, 0.0, 1.0);
    Matrix3::identity() + d * n.0 * di
}

/// Side pairings of a parallelogram in `D·X`: `a` maps `(v₁v₂)` onto
/// `(v₄v₃)` and `b` maps `(v₂v₃)` onto `(v₁v₄)`, endpoint to endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidePairing {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
}

const LENGTH_TOL: f64 = 1e-9;

pub fn side_pairing(m: &ModelParam, q: &Parallelogram) -> Result<SidePairing> {
    let v = q.vertices();
    for p in v {
        if !m.contains(*p) {
            return Err(Error::OutsideDomain);
        }
    }
    let pairs = [((v[0], v[1]), (v[3], v[2])), ((v[1], v[2]), (v[0], v[3]))];
    let mut out = [Matrix3::identity(); 2];
    for (k, (from, to)) in pairs.iter().enumerate() {
        let (lf, lt) = (model_distance(m, from.0, from.1)?, model_distance(m, to.0, to.1)?);
        if (lf - lt).abs() > LENGTH_TOL * lf.max(lt) {
            return Err(Error::SideLengthMismatch(lf - lt));
        }
        let pb = |p: [f64; 2]| m.pull_back(p);
        let n = fixed_pairing(m.kind, (pb(from.0), pb(from.1)), (pb(to.0), pb(to.1)));
        out[k] = conjugate(m, n);
    }
    Ok(SidePairing { a: out[0], b: out[1] })
}

/// Failure of `A` to preserve the model's geometry, measured in the fixed
/// model: `‖MᵀJM − J‖` for `M = D⁻¹AD` and `J = diag(1, 1, ∓1)`, which is
/// `Dᵀ(AᵀQ_mA − Q_m)D`. For the Euclidean model, the failure of the linear
/// part of `M` to be orthogonal and of its last row to be `(0, 0, 1)`.
pub fn form_residual(m: &ModelParam, a: &Matrix3<f64>) -> f64 {
    let d = m.conjugator();
    let di = Matrix3::new(1.0 / m.d[0], 0.0, 0.0, 0.0, 1.0 / m.d[1], 0.0, 0.0, 0.0, 1.0);
    let dev = di * (a - Matrix3::identity()) * d;
    match m.kind {
        ModelKind::Euclidean => {
            let lin = dev.fixed_view::<2, 2>(0, 0).into_owned();
            let orth = lin + lin.transpose() + lin.transpose() * lin;
            let row = dev.fixed_view::<1, 3>(2, 0).amax();
            orth.amax().max(row)
        }
        _ => {
            let j = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, m.kind.form_sign()));
            (dev.transpose() * j + j * dev + dev.transpose() * j * dev).amax()
        }
    }
}

/// How far `A` is from preserving the projective line through the midpoints
/// `m₁` and `m₂`: the largest sine of the angle between that line and the
/// images `A m₁`, `A m₂` seen from `m₁`.
pub fn midline_residual(a: &Matrix3<f64>, m1: [f64; 2], m2: [f64; 2]) -> f64 {
    let apply = |p: [f64; 2]| {
        let w = a * nalgebra::Vector3::new(p[0], p[1], 1.0);
        [w[0] / w[2], w[1] / w[2]]
    };
    let dir = [m2[0] - m1[0], m2[1] - m1[1]];
    let len = dot(dir, dir).sqrt();
    [apply(m1), apply(m2)]
        .iter()
        .map(|p| {
            let w = [p[0] - m1[0], p[1] - m1[1]];
            cross(dir, w).abs() / (len * len.max(dot(w, w).sqrt()))
        })
        .fold(0.0, f64::max)
}

fn normalized(a: &Matrix3<f64>) -> Matrix3<f64> {
    if a[(2, 2)].abs() > 1e-8 {
        a / a[(2, 2)]
    } else {
        a / a.amax()
    }
}

fn commutator_residual(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let (ai, bi) = (a.try_inverse(), b.try_inverse());
    match (ai, bi) {
        (Some(ai), Some(bi)) => (normalized(&(a * b * ai * bi)) - Matrix3::identity()).amax(),
        _ => f64::INFINITY,
    }
}

/// One sample of a regeneration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub t: f64,
    pub d: [f64; 2],
    /// Side pairings normalised to bottom-right entry 1, if defined.
    pub a: Option<Matrix3<f64>>,
    pub b: Option<Matrix3<f64>>,
    pub commutator_residual: Option<f64>,
    pub form_residual: Option<f64>,
    /// Model midpoints of the sides `(v₁v₂), (v₂v₃), (v₃v₄), (v₄v₁)`.
    pub midpoints: Option<[[f64; 2]; 4]>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegenTrace {
    pub kind: ModelKind,
    pub samples: Vec<TraceSample>,
    pub a_inf: Option<Matrix3<f64>>,
    pub b_inf: Option<Matrix3<f64>>,
    /// Largest deviation of `A_∞, B_∞` from unipotent upper triangular.
    pub heis_residual: Option<f64>,
    pub in_heis: bool,
}

fn heis_deviation(a: &Matrix3<f64>) -> f64 {
    let lower = [a[(1, 0)], a[(2, 0)], a[(2, 1)]];
    let diag = [a[(0, 0)] - 1.0, a[(1, 1)] - 1.0, a[(2, 2)] - 1.0];
    lower.iter().chain(&diag).fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Value at `h = 0` of the polynomial through the points `(hᵢ, yᵢ)`.
pub fn richardson(points: &[(f64, Matrix3<f64>)]) -> Matrix3<f64> {
    let mut out = Matrix3::zeros();
    for (i, (hi, yi)) in points.iter().enumerate() {
        let w: f64 = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (hj, _))| hj / (hj - hi))
            .product();
        out += yi * w;
    }
    out
}

fn sample(kind: ModelKind, path: &MonomialDiagonal, q: &Parallelogram, t: f64) -> TraceSample {
    let d = path.eval(t);
    let d = [d[0], d[1]];
    let mut s = TraceSample {
        t,
        d,
        a: None,
        b: None,
        commutator_residual: None,
        form_residual: None,
        midpoints: None,
        error: None,
    };
    let run = || -> Result<(SidePairing, [[f64; 2]; 4], ModelParam)> {
        let m = ModelParam::new(kind, d)?;
        let sp = side_pairing(&m, q)?;
        let mut mids = [[0.0; 2]; 4];
        for (k, (p0, p1)) in q.sides().iter().enumerate() {
            mids[k] = geodesic_midpoint(&m, *p0, *p1)?;
        }
        Ok((sp, mids, m))
    };
    match run() {
        Ok((sp, mids, m)) => {
            s.form_residual = Some(form_residual(&m, &sp.a).max(form_residual(&m, &sp.b)));
            s.commutator_residual = Some(commutator_residual(&sp.a, &sp.b));
            s.a = Some(normalized(&sp.a));
            s.b = Some(normalized(&sp.b));
            s.midpoints = Some(mids);
        }
        Err(e) => s.error = Some(e.to_string()),
    }
    s
}

/// Side pairings of `Q` in the models `D_t·X` along a grid of `t`, with the
/// limits `A_∞, B_∞` extrapolated in `1/t` from the last three valid samples.
pub fn regenerate_trace(
    kind: ModelKind,
    path: &MonomialDiagonal,
    q: &Parallelogram,
    t_grid: &[f64],
) -> Result<RegenTrace> {
    let e = path.entries();
    if e.len() != 3 || e[2].coeff != 1.0 || e[2].exponent != 0.into() {
        return Err(Error::DimensionMismatch(
            "conjugator paths must have three entries, the last equal to 1".into(),
        ));
    }
    if e.iter().any(|m| m.coeff <= 0.0) {
        return Err(Error::Parse("conjugator coefficients must be positive".into()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::Parse("the t grid must be nonempty and positive".into()));
    }

    #[cfg(feature = "parallel")]
    let samples: Vec<TraceSample> = {
        use rayon::prelude::*;
        t_grid.par_iter().map(|&t| sample(kind, path, q, t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<TraceSample> = t_grid.iter().map(|&t| sample(kind, path, q, t)).collect();

    let mut valid: Vec<&TraceSample> = samples.iter().filter(|s| s.a.is_some()).collect();
    valid.sort_by(|x, y| x.t.total_cmp(&y.t));
    let tail = &valid[valid.len().saturating_sub(3)..];
    let (a_inf, b_inf) = if tail.is_empty() {
        (None, None)
    } else {
        let pts = |f: fn(&TraceSample) -> Matrix3<f64>| -> Vec<(f64, Matrix3<f64>)> {
            tail.iter().map(|s| (1.0 / s.t, f(s))).collect()
        };
        (
            Some(richardson(&pts(|s| s.a.unwrap()))),
            Some(richardson(&pts(|s| s.b.unwrap()))),
        )
    };
    let heis_residual = a_inf.zip(b_inf).map(|(a, b)| heis_deviation(&a).max(heis_deviation(&b)));
    Ok(RegenTrace {
        kind,
        samples,
        a_inf,
        b_inf,
        heis_residual,
        in_heis: heis_residual.is_some_and(|r| r <= 1e-4),
    })
}
