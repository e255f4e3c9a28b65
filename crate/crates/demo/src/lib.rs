//! Browser bindings: limits of orthogonal Lie algebras, the cells of `D̄_n`
//! and developed Heisenberg tori.

use limitgeom::cells::{closure_cell_counts, enumerate_cells, euler_characteristic};
use limitgeom::heis::{classify, polyline_svg, teichmuller_coords, unit_square_image, HeisRep, RepClass};
use limitgeom::limits::{
    classify_limit_group_3d, conjugacy_to_form_path, decode_partition, flag_signature, limit_lie_algebra, psi_limit,
    MonomialDiagonal,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_form(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("'{}' is not a number", x.trim())))
        .collect()
}

/// Limit algebra as JSON; the basis is given as a list of labelled entries.
pub fn limit_report(form: &str, conj: &str) -> Result<String, String> {
    let conj: MonomialDiagonal = conj.parse().map_err(|e| format!("{e}"))?;
    let form = parse_form(form)?;
    let path = conjugacy_to_form_path(&conj, &form).map_err(|e| format!("{e}"))?;
    let algebra = limit_lie_algebra(&path).map_err(|e| format!("{e}"))?;
    let signature = flag_signature(&decode_partition(&psi_limit(&path)).map_err(|e| format!("{e}"))?);
    let n = path.len();
    let basis: Vec<String> = algebra
        .basis()
        .iter()
        .map(|m| {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let c = m[(i, j)];
                    if c.abs() > 1e-12 {
                        terms.push(format!("{c:+.3}·e{}{}", i + 1, j + 1));
                    }
                }
            }
            terms.join(" ")
        })
        .collect();
    let class = if n == 3 {
        classify_limit_group_3d(&signature).ok().map(|g| g.name())
    } else {
        None
    };
    Ok(json!({
        "form_path": path.to_string(),
        "flag_signature": signature.to_string(),
        "dim": algebra.dim(),
        "class_3d": class,
        "basis": basis,
    })
    .to_string())
}

/// Cell counts and the labelled cells of `D̄_n` as JSON.
pub fn cells_report(n: usize) -> Result<String, String> {
    if !(1..=6).contains(&n) {
        return Err("choose 1 ≤ n ≤ 6".into());
    }
    let cells: Vec<_> = enumerate_cells(n)
        .iter()
        .map(|c| {
            json!({
                "label": limitgeom::cells::cell_label(c),
                "dim": c.dim(),
                "signature": c.flag_signature().to_string(),
                "class_3d": c.class_3d().map(|g| g.name()),
            })
        })
        .collect();
    Ok(json!({
        "counts": closure_cell_counts(n),
        "euler_characteristic": euler_characteristic(n),
        "cells": cells,
    })
    .to_string())
}

/// SVG of the developed unit square for the representation with Lie
/// coordinates `x, y, z`, followed by its classification.
pub fn heis_report(x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> Result<String, String> {
    let r = HeisRep::new(x, y, z);
    let class = classify(&r).map_err(|e| format!("{e}"))?;
    let svg = match class {
        RepClass::Holonomy(_) => Some(polyline_svg(&unit_square_image(&r, 48).map_err(|e| format!("{e}"))?, 320.0)),
        _ => None,
    };
    let canonical = teichmuller_coords(&r).ok();
    Ok(json!({ "class": class, "canonical": canonical, "svg": svg }).to_string())
}

#[wasm_bindgen]
pub fn limit(form: &str, conj: &str) -> Result<String, JsValue> {
    limit_report(form, conj).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cells(n: usize) -> Result<String, JsValue> {
    cells_report(n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn heis(x1: f64, x2: f64, y1: f64, y2: f64, z1: f64, z2: f64) -> Result<String, JsValue> {
    heis_report([x1, x2], [y1, y2], [z1, z2]).map_err(|e| JsValue::from_str(&e))
}
