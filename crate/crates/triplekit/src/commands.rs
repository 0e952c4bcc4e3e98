//! Command implementations behind the `triplekit` binary. Each returns an
//! exit code (0 pass, 1 fail, 2 input error) with its text and JSON output.

use std::fmt::Write as _;

use serde_json::{json, Value};
use triplekit_core::linalg::{max_abs, CMatrix, C64};
use triplekit_core::reconstruction::{reconstruct as run_reconstruction, Config};
use triplekit_core::spin::{lorentz_boost, matrix_rep, polar_tripotent_part, spin_determinant, spin_state, Axis};
use triplekit_core::tripotent::{
    classify, is_orthogonal, is_quadrangle, is_trangle, is_tripotent, leq, tripotent_residual, Tolerance,
};
use triplekit_core::{Element, Error};

use crate::json::{self, InputError};
use crate::suites::{self, RunConfig};

pub const PASS: i32 = 0;
pub const FAIL: i32 = 1;
pub const INPUT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub report: Value,
}

impl Outcome {
    fn input_error(e: InputError) -> Self {
        Outcome { code: INPUT_ERROR, text: format!("error: {e}"), report: json!({ "pass": false, "error": e.0 }) }
    }

    fn from_report(pass: bool, report: Value) -> Self {
        let text = serde_json::to_string_pretty(&report).expect("reports serialize");
        Outcome { code: if pass { PASS } else { FAIL }, text, report }
    }
}

/// Errors that mean the inputs failed a hypothesis rather than being malformed.
fn is_failure(e: &Error) -> bool {
    !matches!(
        e,
        Error::FactorMismatch(_) | Error::InvalidFactor(_) | Error::InvalidElement(_) | Error::Precondition(_)
    )
}

fn core_outcome(e: Error, base: Value) -> Outcome {
    if !is_failure(&e) {
        return Outcome::input_error(e.into());
    }
    let mut report = base;
    report["pass"] = json!(false);
    report["error"] = json!(e.to_string());
    Outcome { code: FAIL, text: format!("{}\nerror: {e}", serde_json::to_string_pretty(&report).unwrap()), report }
}

pub fn factor_info(spec: &str) -> Outcome {
    let factor = match json::load(spec).and_then(|v| json::factor_from_value(&v)) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(e),
    };
    let unitary = factor.has_unitary();
    let text = format!(
        "factor: {factor}\ndimension: {}\nrank: {}\nunitary tripotent: {}",
        factor.dim(),
        factor.rank(),
        if unitary { "yes" } else { "no" }
    );
    let report = json!({
        "factor": json::factor_to_value(&factor),
        "dimension": factor.dim(),
        "rank": factor.rank(),
        "unitary": unitary,
    });
    Outcome { code: PASS, text, report }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    IsTripotent,
    IsOrthogonal,
    Leq,
    Classify,
    IsQuadrangle,
    IsTrangle,
}

impl Predicate {
    pub fn arity(self) -> usize {
        match self {
            Predicate::IsTripotent | Predicate::Classify => 1,
            Predicate::IsOrthogonal | Predicate::Leq => 2,
            Predicate::IsTrangle => 3,
            Predicate::IsQuadrangle => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Predicate::IsTripotent => "is_tripotent",
            Predicate::IsOrthogonal => "is_orthogonal",
            Predicate::Leq => "leq",
            Predicate::Classify => "classify",
            Predicate::IsQuadrangle => "is_quadrangle",
            Predicate::IsTrangle => "is_trangle",
        }
    }
}

pub fn check(predicate: Predicate, files: &[String], tol: Tolerance) -> Outcome {
    if files.len() != predicate.arity() {
        return Outcome::input_error(InputError(format!(
            "{} takes {} element(s), got {}",
            predicate.name(),
            predicate.arity(),
            files.len()
        )));
    }
    let xs: Vec<Element> = match files.iter().map(|f| json::load(f).and_then(|v| json::element_from_value(&v))).collect() {
        Ok(xs) => xs,
        Err(e) => return Outcome::input_error(e),
    };
    let base = json!({ "predicate": predicate.name() });
    let res = match predicate {
        Predicate::IsTripotent => {
            let r = tripotent_residual(&xs[0]);
            let pass = is_tripotent(&xs[0], tol);
            return Outcome::from_report(pass, json!({ "predicate": predicate.name(), "pass": pass, "residual": r }));
        }
        Predicate::Classify => classify(&xs[0], tol).map(|c| (true, Some(json::classification_to_value(&c)))),
        Predicate::IsOrthogonal => is_orthogonal(&xs[0], &xs[1], tol).map(|b| (b, None)),
        Predicate::Leq => leq(&xs[0], &xs[1], tol).map(|b| (b, None)),
        Predicate::IsTrangle => is_trangle(&xs[0], &xs[1], &xs[2], tol).map(|b| (b, None)),
        Predicate::IsQuadrangle => is_quadrangle(&xs[0], &xs[1], &xs[2], &xs[3], tol).map(|b| (b, None)),
    };
    match res {
        Ok((pass, detail)) => {
            let mut report = base;
            report["pass"] = json!(pass);
            if let Some(d) = detail {
                report["classification"] = d;
            }
            Outcome::from_report(pass, report)
        }
        Err(e) => core_outcome(e, base),
    }
}

/// Residual limit for `reconstruct`: `1e-8` at the default tolerance.
pub fn reconstruction_threshold(run: &RunConfig) -> f64 {
    1e-8 * run.scale()
}

pub fn reconstruct(factor: &str, oracle: &str, run: &RunConfig) -> Outcome {
    let tol = match run.tolerance() {
        Ok(t) => t,
        Err(e) => return Outcome::input_error(e.into()),
    };
    let parsed = json::load(factor).and_then(|v| json::factor_from_value(&v)).and_then(|f| {
        if !f.supports_reconstruction() {
            return Err(InputError(format!(
                "{f} is not supported: components must be spin factors or rectangular factors of rank at least 2"
            )));
        }
        let phi = json::oracle_from_value(&f, &json::load(oracle)?, tol)?;
        Ok((f, phi))
    });
    let (f, phi) = match parsed {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e),
    };
    let cfg = Config { tol, samples: run.samples, seed: run.seed };
    let threshold = reconstruction_threshold(run);
    match run_reconstruction(&phi, &cfg) {
        Ok(r) => {
            let report = json::report_to_value(&r, threshold);
            Outcome::from_report(r.max_residual() <= threshold, report)
        }
        Err(e) => core_outcome(e, json!({ "domain": json::factor_to_value(&f), "threshold": threshold })),
    }
}

fn fmt_c(z: C64) -> String {
    let z = C64::new(if z.re == 0.0 { 0.0 } else { z.re }, if z.im == 0.0 { 0.0 } else { z.im });
    if z.im >= 0.0 {
        format!("{:.6}+{:.6}i", z.re, z.im)
    } else {
        format!("{:.6}-{:.6}i", z.re, -z.im)
    }
}

fn fmt_matrix(m: &CMatrix) -> String {
    (0..m.nrows())
        .map(|i| format!("[{}]", (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect::<Vec<_>>().join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn hermitian_idempotent(m: &CMatrix, tol: Tolerance) -> bool {
    tol.accepts(max_abs(&(m - m.adjoint())), 1.0) && tol.accepts(max_abs(&(m * m - m)), 1.0)
}

pub fn parse_axis(s: &str) -> Result<Axis, InputError> {
    match s.to_ascii_lowercase().as_str() {
        "x" | "1" => Ok(Axis::X),
        "y" | "2" => Ok(Axis::Y),
        "z" | "3" => Ok(Axis::Z),
        _ => Err(InputError(format!("axis must be x, y, z or 1, 2, 3; got \"{s}\""))),
    }
}

fn describe(out: &mut String, title: &str, x: &Element, tol: Tolerance) -> triplekit_core::Result<Value> {
    let m = matrix_rep(x)?;
    let det = spin_determinant(x)?;
    let trip = is_tripotent(x, tol);
    let herm = hermitian_idempotent(&m, tol);
    let coords: Vec<String> = x.vector().expect("spin element").iter().map(|z| fmt_c(*z)).collect();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "  coordinates: ({})", coords.join(", "));
    let _ = writeln!(out, "  matrix: {}", fmt_matrix(&m));
    let _ = writeln!(out, "  determinant: {}", fmt_c(det));
    let _ = writeln!(out, "  is_tripotent: {trip}");
    let _ = writeln!(out, "  hermitian idempotent: {herm}");
    Ok(json!({
        "element": json::element_to_value(x),
        "matrix": json::matrix_to_value(&m),
        "determinant": json::complex_to_value(det),
        "is_tripotent": trip,
        "hermitian_idempotent": herm,
    }))
}

/// Boosts the spin state along `direction` and reports what survives.
pub fn demo_lorentz(rapidity: f64, axis: &str, direction: &[f64], tol: Tolerance) -> Outcome {
    let axis = match parse_axis(axis) {
        Ok(a) => a,
        Err(e) => return Outcome::input_error(e),
    };
    if direction.len() != 3 || !rapidity.is_finite() || direction.iter().any(|b| !b.is_finite()) {
        return Outcome::input_error(InputError("direction needs three finite components b1,b2,b3".into()));
    }
    let b = [direction[0], direction[1], direction[2]];
    let mut text = String::new();
    let mut run = || -> triplekit_core::Result<Value> {
        let x = spin_state(b, tol)?;
        let y = lorentz_boost(&x, rapidity, axis)?;
        let p = polar_tripotent_part(&y, tol)?;
        let name = ["x", "y", "z"][axis.index() - 1];
        let input = describe(&mut text, &format!("spin state b = ({}, {}, {})", b[0], b[1], b[2]), &x, tol)?;
        let boosted = describe(&mut text, &format!("boosted, rapidity {rapidity} along {name}"), &y, tol)?;
        let polar = describe(&mut text, "polar part", &p, tol)?;
        let det_before = spin_determinant(&x)?;
        let det_after = spin_determinant(&y)?;
        let _ = write!(text, "determinant change: {:.3e}", (det_after - det_before).norm());
        Ok(json!({
            "rapidity": rapidity,
            "axis": name,
            "direction": b,
            "input": input,
            "boosted": boosted,
            "polar": polar,
            "determinant_change": (det_after - det_before).norm(),
        }))
    };
    match run() {
        Ok(report) => Outcome { code: PASS, text, report },
        Err(e) => Outcome::input_error(e.into()),
    }
}

/// Runs the suites in `only`, or all of them when it is empty.
pub fn selftest(run: &RunConfig, only: &[usize]) -> Outcome {
    if let Err(e) = run.tolerance() {
        return Outcome::input_error(e.into());
    }
    let results: Vec<_> = suites::SUITES
        .iter()
        .filter(|s| only.is_empty() || only.contains(&s.0))
        .map(|s| suites::run_timed(s.0, run))
        .collect();
    let mut text = String::new();
    for (o, _) in &results {
        let _ = writeln!(text, "[{}] {} {}", if o.pass() { "pass" } else { "FAIL" }, o.id, o.name);
        for c in &o.checks {
            let _ = writeln!(text, "    {}", c.line());
        }
        if let Some(e) = &o.error {
            let _ = writeln!(text, "    error: {e}");
        }
    }
    let outcomes: Vec<_> = results.iter().map(|(o, _)| o.clone()).collect();
    let passed = outcomes.iter().filter(|o| o.pass()).count();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass()).map(|o| o.name).collect();
    let _ = writeln!(text, "{passed}/{} suites passed", outcomes.len());
    if !failed.is_empty() {
        let _ = writeln!(text, "failed: {}", failed.join(", "));
    }
    let _ = writeln!(text, "timings:");
    for (o, t) in &results {
        let budget = suites::budget(o.id).map_or(String::new(), |b| format!(" (budget {} s)", b.as_secs()));
        let _ = writeln!(text, "  {} {}: {:.3} s{budget}", o.id, o.name, t.as_secs_f64());
    }
    let report = suites::summary_value(run, &outcomes);
    Outcome { code: if failed.is_empty() { PASS } else { FAIL }, text: text.trim_end().to_string(), report }
}
