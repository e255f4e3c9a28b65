use std::fmt::Write as _;

use limitgeom::cells::{cell_label, cells_to_dot, closure_cell_counts, enumerate_cells, euler_characteristic};
use limitgeom::heis::{classify, developing_map, normalize, polyline_svg, teichmuller_coords, unit_square_image, HeisRep};
use limitgeom::limits::{
    classify_limit_group_3d, conjugacy_to_form_path, decode_partition, flag_signature, limit_lie_algebra, limit_poset,
    psi_limit, MonomialDiagonal,
};
use limitgeom::matrix::{exp_delta, hermitian_dimension, iota_delta, u_lie_basis, AlgMatrix};
use limitgeom::regen::{regenerate_trace, ModelKind, Parallelogram, RegenTrace};
use limitgeom::scalar::{idempotents, AlgScalar, AlgebraKind};
use limitgeom::RealMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{Format, Grid};

/// A validation failure, reported on stderr as JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub error: String,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            error: "InvalidInput".into(),
            message: message.into(),
        }
    }
}

impl From<limitgeom::Error> for CliError {
    fn from(e: limitgeom::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error");
        Self {
            error: kind.to_string(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::input(format!("malformed JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn pretty(v: &impl Serialize) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    // adding 0.0 turns -0.0 into 0.0 so that output is stable
    m.row_iter().map(|r| r.iter().map(|x| x + 0.0).collect()).collect()
}

fn rows3<M: std::ops::Index<(usize, usize), Output = f64>>(m: &M) -> Vec<Vec<f64>> {
    (0..3).map(|i| (0..3).map(|j| m[(i, j)] + 0.0).collect()).collect()
}

fn parse_floats(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::input(format!("'{x}' is not a number"))))
        .collect()
}

pub fn limit(form: Option<&str>, conj: Option<&str>, path: Option<&str>) -> CliResult<String> {
    let form_path: MonomialDiagonal = match (conj, path) {
        (Some(c), None) => {
            let conj: MonomialDiagonal = c.parse()?;
            let form = match form {
                Some(f) => parse_floats(f)?,
                None => vec![1.0; conj.len()],
            };
            conjugacy_to_form_path(&conj, &form)?
        }
        (None, Some(p)) if form.is_none() => p.parse()?,
        (None, Some(_)) => return Err(CliError::input("--form applies to --conj, not to --path")),
        _ => return Err(CliError::input("exactly one of --conj and --path is required")),
    };
    let point = psi_limit(&form_path);
    let partition = decode_partition(&point)?;
    let signature = flag_signature(&partition);
    let algebra = limit_lie_algebra(&form_path)?;
    let class_3d = if form_path.len() == 3 {
        classify_limit_group_3d(&signature).ok().map(|g| g.name())
    } else {
        None
    };
    let basis: Vec<Vec<Vec<f64>>> = algebra.basis().iter().map(rows).collect();
    pretty(&json!({
        "path": form_path.to_string(),
        "limit_point": point.labelled(),
        "partition": partition,
        "flag_signature": signature.to_string(),
        "lie_basis": basis,
        "dim": algebra.dim(),
        "class_3d": class_3d,
    }))
}

pub fn poset(p: usize, q: usize, format: Format) -> CliResult<String> {
    if p + q == 0 {
        return Err(CliError::input("the form must have positive dimension"));
    }
    let poset = limit_poset(p, q);
    match format {
        Format::Dot => Ok(poset.to_dot(&format!("O({p},{q})"))),
        Format::Json => pretty(&json!({
            "nodes": poset.nodes.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "edges": poset.edges,
            "root": poset.root(),
        })),
        f => Err(CliError::input(format!("poset output cannot be {f}"))),
    }
}

pub fn cells(n: usize, format: Format) -> CliResult<String> {
    if n == 0 || n > 8 {
        return Err(CliError::input("cells are enumerated for 1 ≤ n ≤ 8"));
    }
    match format {
        Format::Dot => Ok(cells_to_dot(n)),
        Format::Json => {
            let cells: Vec<Value> = enumerate_cells(n)
                .iter()
                .map(|c| {
                    json!({
                        "label": cell_label(c),
                        "blocks": c.blocks(),
                        "signs": c.signs(),
                        "dim": c.dim(),
                        "flag_signature": c.flag_signature().to_string(),
                        "class_3d": c.class_3d().map(|g| g.name()),
                    })
                })
                .collect();
            pretty(&json!({
                "n": n,
                "counts": closure_cell_counts(n),
                "euler_characteristic": euler_characteristic(n),
                "cells": cells,
            }))
        }
        f => Err(CliError::input(format!("cell output cannot be {f}"))),
    }
}

fn read_rep(input: &str) -> CliResult<HeisRep> {
    Ok(serde_json::from_str(input)?)
}

pub fn heis_classify(input: &str) -> CliResult<String> {
    let r = read_rep(input)?;
    let class = classify(&r)?;
    let normalized = normalize(&r).ok();
    let teichmuller = if class.is_holonomy() {
        Some(teichmuller_coords(&r)?)
    } else {
        None
    };
    pretty(&json!({
        "input": r,
        "bracket": r.bracket(),
        "classification": class,
        "normalized": normalized,
        "teichmuller": teichmuller,
    }))
}

pub struct DevOutput {
    pub csv: String,
    pub svg: Option<String>,
}

pub fn heis_dev(input: &str, grid: Grid, svg: bool) -> CliResult<DevOutput> {
    let r = read_rep(input)?;
    let values = grid.linear();
    let mut csv = String::from("u,v,x,y\n");
    for &u in &values {
        for &v in &values {
            let p = developing_map(&r, u, v)?;
            writeln!(csv, "{u},{v},{},{}", p[0] + 0.0, p[1] + 0.0).expect("string write");
        }
    }
    let svg = if svg {
        Some(polyline_svg(&unit_square_image(&r, 32)?, 400.0))
    } else {
        None
    };
    Ok(DevOutput { csv, svg })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PathSpec {
    Text(String),
    Monomials(MonomialDiagonal),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RegenInput {
    kind: String,
    #[serde(rename = "D_path")]
    d_path: PathSpec,
    vertices: [[f64; 2]; 4],
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

pub struct RegenOutput {
    pub trace: RegenTrace,
    pub csv: String,
    pub summary: Value,
}

pub fn regen(input: &str, grid: Option<Grid>, tol: f64) -> CliResult<RegenOutput> {
    let spec: RegenInput = serde_json::from_str(input)?;
    let kind = match spec.kind.to_ascii_lowercase().as_str() {
        "hyperbolic" => ModelKind::Hyperbolic,
        "sphere" | "spherical" => ModelKind::Sphere,
        other => return Err(CliError::input(format!("regeneration needs a curved model, got '{other}'"))),
    };
    let path = match spec.d_path {
        PathSpec::Text(s) => s.parse()?,
        PathSpec::Monomials(m) => m,
    };
    let q = Parallelogram::new(spec.vertices)?;
    let t_grid = match (grid, spec.t_grid) {
        (Some(g), _) => g.log().map_err(CliError::input)?,
        (None, Some(t)) if !t.is_empty() => t,
        _ => return Err(CliError::input("a t grid is required (t_grid or --grid)")),
    };
    if t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(CliError::input("t values must be positive"));
    }
    let trace = regenerate_trace(kind, &path, &q, &t_grid)?;
    let mut csv = String::from("t");
    for m in ["a", "b"] {
        for i in 1..=3 {
            for j in 1..=3 {
                write!(csv, ",{m}{i}{j}").expect("string write");
            }
        }
    }
    csv.push_str(",commutator_residual,form_residual,error\n");
    for s in &trace.samples {
        write!(csv, "{}", s.t).expect("string write");
        for m in [s.a, s.b] {
            for i in 0..3 {
                for j in 0..3 {
                    match m {
                        Some(m) => write!(csv, ",{:e}", m[(i, j)] + 0.0),
                        None => write!(csv, ","),
                    }
                    .expect("string write");
                }
            }
        }
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(
            csv,
            ",{},{},{}",
            num(s.commutator_residual),
            num(s.form_residual),
            s.error.as_deref().unwrap_or("")
        )
        .expect("string write");
    }
    let residuals: Vec<Option<f64>> = trace.samples.iter().map(|s| s.commutator_residual).collect();
    let valid: Vec<f64> = residuals.iter().flatten().copied().collect();
    let decreasing = valid.len() >= 2 && valid.windows(2).all(|w| w[1] < w[0]);
    let summary = json!({
        "kind": spec.kind.to_ascii_lowercase(),
        "D_path": path.to_string(),
        "t_grid": t_grid,
        "commutator_residuals": residuals,
        "commutator_decreasing": decreasing,
        "max_form_residual": trace.samples.iter().filter_map(|s| s.form_residual).fold(0.0, f64::max),
        "A_inf": trace.a_inf.as_ref().map(rows3),
        "B_inf": trace.b_inf.as_ref().map(rows3),
        "heis_residual": trace.heis_residual,
        "in_heis": trace.heis_residual.is_some_and(|r| r <= tol),
        "tolerance": tol,
    });
    Ok(RegenOutput { trace, csv, summary })
}

fn sample_matrix(n: usize, delta: f64) -> AlgMatrix {
    // fixed, deterministic probe of norm below 2
    AlgMatrix::from_fn(n, delta, |i, j| {
        let k = (i * n + j) as f64;
        AlgScalar::new(0.3 * (k * 1.7).sin(), 0.3 * (k * 0.9 + 0.4).cos(), delta)
    })
}

fn kind_name(k: AlgebraKind) -> &'static str {
    match k {
        AlgebraKind::Complex => "complex",
        AlgebraKind::Dual => "dual",
        AlgebraKind::Split => "split",
    }
}

pub fn algebra(n: usize, grid: Grid, format: Format) -> CliResult<String> {
    if n == 0 || n > 6 {
        return Err(CliError::input("matrix size must be between 1 and 6"));
    }
    let rows: Vec<Value> = grid
        .linear()
        .into_iter()
        .map(|delta| {
            let lambda = AlgScalar::lambda(delta);
            let square = lambda.mul(lambda).expect("same algebra");
            let x = sample_matrix(n, delta);
            let residual = (iota_delta(&exp_delta(&x)) - iota_delta(&x).exp()).amax();
            json!({
                "delta": delta,
                "kind": kind_name(AlgebraKind::of(delta)),
                "lambda_squared": square.re,
                "idempotents": idempotents(delta).ok().map(|(e, f)| [[e.re, e.im], [f.re, f.im]]),
                "u_dim": u_lie_basis(n, delta).len(),
                "hermitian_dim": hermitian_dimension(n, delta),
                "exp_residual": residual,
            })
        })
        .collect();
    match format {
        Format::Json => pretty(&rows),
        Format::Csv => {
            let mut s = String::from("delta,kind,lambda_squared,u_dim,hermitian_dim,exp_residual\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{:e}",
                    r["delta"], r["kind"].as_str().unwrap_or(""), r["lambda_squared"], r["u_dim"], r["hermitian_dim"],
                    r["exp_residual"].as_f64().unwrap_or(f64::NAN)
                )
                .expect("string write");
            }
            Ok(s)
        }
        f => Err(CliError::input(format!("algebra output cannot be {f}"))),
    }
}
