//! JSON encodings of factors, elements, oracle specifications and reports.
//!
//! Complex scalars are `[re, im]` pairs, matrices are row-major nested
//! arrays, and an element is `{"factor": {...}, "data": [...]}`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use triplekit_core::grids::GridReport;
use triplekit_core::linalg::{CMatrix, CVector, C64};
use triplekit_core::linear_map::RealLinearMap;
use triplekit_core::reconstruction::{make_oracle, PreservationReport, ReconstructionReport, Recipe, TripotentOracle};
use triplekit_core::tripotent::{Classification, Tolerance, TripotentKind};
use triplekit_core::{Element, Factor};

/// Malformed or inconsistent input.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<triplekit_core::Error> for InputError {
    fn from(e: triplekit_core::Error) -> Self {
        InputError(e.to_string())
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError(format!("malformed JSON: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, InputError>;

fn bad(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorSpec {
    Rect { m: usize, n: usize },
    Skew { n: usize },
    Herm { n: usize },
    Spin { dim: usize },
    Sum { components: Vec<FactorSpec> },
}

impl FactorSpec {
    pub fn to_factor(&self) -> Result<Factor> {
        Ok(match self {
            FactorSpec::Rect { m, n } => Factor::rect(*m, *n)?,
            FactorSpec::Skew { n } => Factor::skew(*n)?,
            FactorSpec::Herm { n } => Factor::herm(*n)?,
            FactorSpec::Spin { dim } => Factor::spin(*dim)?,
            FactorSpec::Sum { components } => {
                Factor::sum(components.iter().map(|c| c.to_factor()).collect::<Result<_>>()?)?
            }
        })
    }
}

impl From<&Factor> for FactorSpec {
    fn from(f: &Factor) -> Self {
        match f {
            Factor::Rect { m, n } => FactorSpec::Rect { m: *m, n: *n },
            Factor::Skew { n } => FactorSpec::Skew { n: *n },
            Factor::Herm { n } => FactorSpec::Herm { n: *n },
            Factor::Spin { d } => FactorSpec::Spin { dim: *d },
            Factor::Sum(parts) => FactorSpec::Sum { components: parts.iter().map(FactorSpec::from).collect() },
        }
    }
}

pub fn factor_to_value(f: &Factor) -> Value {
    serde_json::to_value(FactorSpec::from(f)).expect("factor specs serialize")
}

pub fn factor_from_value(v: &Value) -> Result<Factor> {
    let spec: FactorSpec = serde_json::from_value(v.clone()).map_err(|e| bad(format!("bad factor spec: {e}")))?;
    spec.to_factor()
}

/// Reads `arg` as inline JSON when it starts with `{` or `[`, else as a file path.
pub fn load(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    let text = std::fs::read_to_string(Path::new(arg)).map_err(|e| bad(format!("cannot read {arg}: {e}")))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn complex_to_value(z: C64) -> Value {
    json!([z.re, z.im])
}

/// `[re, im]`, or a bare number for a real scalar.
pub fn complex_from_value(v: &Value) -> Result<C64> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().ok_or_else(|| bad("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| bad(format!("bad complex scalar {v}")))?;
            let im = a[1].as_f64().ok_or_else(|| bad(format!("bad complex scalar {v}")))?;
            Ok(C64::new(re, im))
        }
        _ => Err(bad(format!("expected [re, im], got {v}"))),
    }
}

pub fn matrix_to_value(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_value(m[(i, j)])).collect()))
            .collect(),
    )
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))
}

fn matrix_from_value(v: &Value, rows: usize, cols: usize) -> Result<CMatrix> {
    let r = array(v, "matrix data")?;
    if r.len() != rows {
        return Err(bad(format!("expected {rows} rows, got {}", r.len())));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (i, row) in r.iter().enumerate() {
        let row = array(row, "matrix row")?;
        if row.len() != cols {
            return Err(bad(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = complex_from_value(z)?;
        }
    }
    Ok(m)
}

fn data_to_value(x: &Element) -> Value {
    if let Some(m) = x.matrix() {
        matrix_to_value(m)
    } else if let Some(v) = x.vector() {
        Value::Array(v.iter().map(|z| complex_to_value(*z)).collect())
    } else {
        Value::Array(x.components().iter().map(data_to_value).collect())
    }
}

fn data_from_value(factor: &Factor, v: &Value) -> Result<Element> {
    match factor {
        Factor::Spin { d } => {
            let a = array(v, "spin data")?;
            if a.len() != *d {
                return Err(bad(format!("{factor} needs {d} coordinates, got {}", a.len())));
            }
            let z = a.iter().map(complex_from_value).collect::<Result<Vec<_>>>()?;
            Ok(Element::from_vector(factor.clone(), CVector::from_vec(z))?)
        }
        Factor::Sum(parts) => {
            let a = array(v, "sum data")?;
            if a.len() != parts.len() {
                return Err(bad(format!("{factor} has {} components, got {}", parts.len(), a.len())));
            }
            let comps = parts.iter().zip(a).map(|(p, d)| data_from_value(p, d)).collect::<Result<Vec<_>>>()?;
            Ok(Element::from_components(factor.clone(), comps)?)
        }
        _ => {
            let (r, c) = factor.matrix_shape().expect("matrix kind");
            Ok(Element::from_matrix(factor.clone(), matrix_from_value(v, r, c)?)?)
        }
    }
}

pub fn element_to_value(x: &Element) -> Value {
    json!({ "factor": factor_to_value(x.factor()), "data": data_to_value(x) })
}

pub fn element_from_value(v: &Value) -> Result<Element> {
    let f = v.get("factor").ok_or_else(|| bad("element is missing \"factor\""))?;
    let d = v.get("data").ok_or_else(|| bad("element is missing \"data\""))?;
    data_from_value(&factor_from_value(f)?, d)
}

/// Entries of an oracle table: a list of `{"in": element, "out": element}`.
pub fn table_entries(v: &Value) -> Result<Vec<(Element, Element)>> {
    array(v, "oracle table")?
        .iter()
        .map(|e| {
            let i = e.get("in").ok_or_else(|| bad("table entry is missing \"in\""))?;
            let o = e.get("out").ok_or_else(|| bad("table entry is missing \"out\""))?;
            Ok((element_from_value(i)?, element_from_value(o)?))
        })
        .collect()
}

pub fn table_to_value(entries: &[(Element, Element)]) -> Value {
    Value::Array(
        entries.iter().map(|(i, o)| json!({ "in": element_to_value(i), "out": element_to_value(o) })).collect(),
    )
}

fn flag(v: &Value, key: &str) -> Result<bool> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(x) => Err(bad(format!("\"{key}\" must be a boolean, got {x}"))),
    }
}

fn seed(v: &Value, key: &str) -> Result<Option<u64>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x.as_u64().map(Some).ok_or_else(|| bad(format!("\"{key}\" must be a non-negative integer"))),
    }
}

/// Parses a generation recipe:
///
/// ```text
/// {"recipe": "identity"} | {"recipe": "conjugation"}
/// {"recipe": "spin", "lambda0": [re, im] | "phase": θ, "rotation_seed": 11, "antilinear": false}
/// {"recipe": "rect", "seed": 5 | null, "transpose": false, "antilinear": false}
/// {"recipe": "sum", "components": [recipe, ...], "sigma": [2, 0, 1]}
/// ```
pub fn recipe_from_value(v: &Value) -> Result<Recipe> {
    let name = v.get("recipe").and_then(Value::as_str).ok_or_else(|| bad("oracle spec needs a \"recipe\" name"))?;
    Ok(match name {
        "identity" => Recipe::Identity,
        "conjugation" => Recipe::Conjugation,
        "spin" => {
            let lambda0 = match (v.get("lambda0"), v.get("phase")) {
                (Some(l), None) => complex_from_value(l)?,
                (None, Some(p)) => {
                    let t = p.as_f64().ok_or_else(|| bad("\"phase\" must be a number"))?;
                    C64::from_polar(1.0, t)
                }
                (None, None) => C64::new(1.0, 0.0),
                (Some(_), Some(_)) => return Err(bad("give either \"lambda0\" or \"phase\", not both")),
            };
            let n = lambda0.norm();
            if (n - 1.0).abs() > 1e-6 {
                return Err(bad(format!("λ0 must be unimodular, |λ0| = {n}")));
            }
            Recipe::Spin {
                lambda0: lambda0 / n,
                rotation_seed: seed(v, "rotation_seed")?.unwrap_or(0),
                antilinear: flag(v, "antilinear")?,
            }
        }
        "rect" => Recipe::Rect {
            seed: seed(v, "seed")?,
            transpose: flag(v, "transpose")?,
            antilinear: flag(v, "antilinear")?,
        },
        "sum" => {
            let components = array(v.get("components").unwrap_or(&Value::Null), "\"components\"")?
                .iter()
                .map(recipe_from_value)
                .collect::<Result<Vec<_>>>()?;
            let sigma = match v.get("sigma") {
                None => (0..components.len()).collect(),
                Some(s) => array(s, "\"sigma\"")?
                    .iter()
                    .map(|k| k.as_u64().map(|k| k as usize).ok_or_else(|| bad("\"sigma\" entries must be indices")))
                    .collect::<Result<Vec<_>>>()?,
            };
            Recipe::Sum { components, sigma }
        }
        other => return Err(bad(format!("unknown recipe \"{other}\""))),
    })
}

/// Builds an oracle on `factor` from a recipe object or a table, given as a
/// bare list or as `{"table": [...]}`.
pub fn oracle_from_value(factor: &Factor, v: &Value, tol: Tolerance) -> Result<TripotentOracle> {
    let table = match v {
        Value::Array(_) => Some(v),
        Value::Object(o) => o.get("table"),
        _ => return Err(bad("oracle spec must be an object or a table")),
    };
    let Some(table) = table else {
        return Ok(make_oracle(factor, &recipe_from_value(v)?)?.with_tolerance(tol));
    };
    let entries = table_entries(table)?;
    let Some((first_in, first_out)) = entries.first() else {
        return Err(bad("oracle table is empty"));
    };
    if first_in.factor() != factor {
        return Err(bad(format!("table domain {} does not match factor {factor}", first_in.factor())));
    }
    let target = first_out.factor().clone();
    Ok(TripotentOracle::table(factor.clone(), target, entries, tol)?)
}

pub fn map_to_value(t: &RealLinearMap) -> Value {
    json!({
        "domain": factor_to_value(t.domain()),
        "target": factor_to_value(t.target()),
        "linear": t.linear_part().map(matrix_to_value),
        "antilinear": t.antilinear_part().map(matrix_to_value),
    })
}

fn branch_name(r: &ReconstructionReport) -> &'static str {
    r.branch().map_or("mixed", |b| b.name())
}

/// The reconstruction report with its pass verdict against `threshold`.
pub fn report_to_value(r: &ReconstructionReport, threshold: f64) -> Value {
    let blocks: Vec<Value> = r
        .blocks
        .iter()
        .map(|b| {
            json!({
                "source": b.source,
                "dest": b.dest,
                "lambda0": complex_to_value(b.lambda0),
                "branch": b.branch.name(),
                "form": b.form.as_ref().map(|f| f.form),
                "residual": b.residual,
            })
        })
        .collect();
    let form = r.blocks.first().and_then(|b| b.form.as_ref()).map(|f| f.form);
    json!({
        "domain": factor_to_value(r.map.domain()),
        "target": factor_to_value(r.map.target()),
        "lambda0": complex_to_value(r.lambda0()),
        "branch": branch_name(r),
        "sigma": r.sigma,
        "form": form,
        "blocks": blocks,
        "map": map_to_value(&r.map),
        "residuals": {
            "max": r.verification.max_residual,
            "triple": r.verification.triple_residual,
            "isometry": r.verification.isometry_residual,
        },
        "n_samples": r.verification.n_samples,
        "n_triples": r.verification.n_triples,
        "threshold": threshold,
        "pass": r.max_residual() <= threshold,
    })
}

pub fn kind_name(k: TripotentKind) -> &'static str {
    match k {
        TripotentKind::Zero => "zero",
        TripotentKind::Minimal => "minimal",
        TripotentKind::Complete => "complete",
        TripotentKind::Unitary => "unitary",
        TripotentKind::Intermediate => "intermediate",
    }
}

pub fn classification_to_value(c: &Classification) -> Value {
    json!({
        "kind": kind_name(c.kind),
        "rank": c.rank,
        "minimal": c.minimal,
        "complete": c.complete,
        "unitary": c.unitary,
        "peirce_dims": [c.dims.0, c.dims.1, c.dims.2],
    })
}

/// Violations carry 1-based `(row, column)` cells.
pub fn grid_report_to_value(r: &GridReport) -> Value {
    json!({
        "ok": r.ok,
        "checks": r.checks,
        "violations": r.violations.iter().map(|v| json!({
            "axiom": v.axiom.label(),
            "cells": v.cells.iter().map(|(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
            "residual": v.residual,
        })).collect::<Vec<_>>(),
    })
}

pub fn preservation_to_value(r: &PreservationReport) -> Value {
    json!({
        "ok": r.ok(),
        "pairs": r.pairs,
        "order_confirmed": r.order_confirmed,
        "orthogonality_forward_confirmed": r.orthogonality_forward_confirmed,
        "orthogonality_backward_confirmed": r.orthogonality_backward_confirmed,
        "additivity_confirmed": r.additivity_confirmed,
        "zero_confirmed": r.zero_confirmed,
        "violations": r.violations.iter().map(|v| json!({
            "class": v.class.name(),
            "indices": v.indices,
            "detail": v.detail,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_round_trip() {
        let f = Factor::sum(vec![Factor::spin(3).unwrap(), Factor::rect(2, 2).unwrap()]).unwrap();
        assert_eq!(factor_from_value(&factor_to_value(&f)).unwrap(), f);
        let v: Value = serde_json::from_str(r#"{"kind":"spin","dim":4}"#).unwrap();
        assert_eq!(factor_from_value(&v).unwrap(), Factor::spin(4).unwrap());
        assert!(factor_from_value(&json!({"kind": "rect", "m": 0, "n": 2})).is_err());
        assert!(factor_from_value(&json!({"kind": "octonion"})).is_err());
    }

    #[test]
    fn element_round_trip() {
        for f in [
            Factor::rect(2, 3).unwrap(),
            Factor::skew(4).unwrap(),
            Factor::herm(3).unwrap(),
            Factor::spin(5).unwrap(),
            Factor::sum(vec![Factor::spin(3).unwrap(), Factor::herm(2).unwrap()]).unwrap(),
        ] {
            let x = triplekit_core::random_element(&f, 3).unwrap();
            let text = serde_json::to_string(&element_to_value(&x)).unwrap();
            let y = element_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn rejects_shape_errors() {
        let v = json!({"factor": {"kind": "rect", "m": 2, "n": 2}, "data": [[[1, 0], [0, 0]]]});
        assert!(element_from_value(&v).is_err());
        let v = json!({"factor": {"kind": "spin", "dim": 3}, "data": [[1, 0], [0, 0], [0, 0, 1]]});
        assert!(element_from_value(&v).is_err());
    }

    #[test]
    fn recipes() {
        let r = recipe_from_value(&json!({"recipe": "spin", "phase": 0.5, "rotation_seed": 11})).unwrap();
        match r {
            Recipe::Spin { lambda0, rotation_seed, antilinear } => {
                assert!((lambda0 - C64::from_polar(1.0, 0.5)).norm() < 1e-15);
                assert_eq!(rotation_seed, 11);
                assert!(!antilinear);
            }
            _ => panic!("wrong recipe"),
        }
        let r = recipe_from_value(&json!({"recipe": "sum", "components": [{"recipe": "identity"}, {"recipe": "conjugation"}], "sigma": [1, 0]})).unwrap();
        assert_eq!(r, Recipe::Sum { components: vec![Recipe::Identity, Recipe::Conjugation], sigma: vec![1, 0] });
        assert!(recipe_from_value(&json!({"recipe": "spin", "lambda0": [2, 0]})).is_err());
        assert!(recipe_from_value(&json!({"recipe": "shear"})).is_err());
    }
}
