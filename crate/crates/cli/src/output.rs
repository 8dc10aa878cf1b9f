//! JSON rendering. Computed numbers carry 12 significant digits; kernels and
//! graphs are written at full precision so they re-parse to equal values.

use graphonlab::cutdist::DistanceBracket;
use graphonlab::cutnorm::{CutWitness, InequalityCheck, Selectors};
use graphonlab::io::{kernel_to_value, multigraph_to_value};
use graphonlab::structure::{Distinction, Equivalence};
use serde_json::{json, Value};

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // avoid emitting -0.0
    json!(if r == 0.0 { 0.0 } else { r })
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn matrix(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| nums(r)).collect())
}

pub fn witness(w: &CutWitness<f64>) -> Value {
    let (row, col) = match &w.selectors {
        Selectors::Real { row, col } => (nums(row), nums(col)),
        Selectors::Complex { row, col } => {
            let pairs = |v: &[num_complex::Complex<f64>]| {
                Value::Array(v.iter().map(|z| json!([num(z.re), num(z.im)])).collect())
            };
            (pairs(row), pairs(col))
        }
        Selectors::Hilbert { row, col } => (matrix(row), matrix(col)),
    };
    json!({
        "variant": w.variant.to_string(),
        "value": num(w.value),
        "exact": w.exact,
        "rowSelector": row,
        "colSelector": col,
        "warning": w.warning.map(|c| c.code()),
    })
}

pub fn bracket(b: &DistanceBracket<f64>, coupling: &[Vec<f64>]) -> Value {
    json!({
        "lower": num(b.lower),
        "upper": num(b.upper),
        "m": b.m,
        "permutation": b.permutation,
        "coupling": matrix(coupling),
        "equalize_errors": [num(b.equalize_errors.0), num(b.equalize_errors.1)],
        "lower_probe": b.lower_probe.as_ref().map(multigraph_to_value),
        "exhaustive": b.exhaustive,
    })
}

pub fn checks(cs: &[InequalityCheck<f64>]) -> Value {
    Value::Array(
        cs.iter()
            .map(|c| json!({"name": c.name, "lhs": num(c.lhs), "rhs": num(c.rhs), "pass": c.pass}))
            .collect(),
    )
}

pub fn equivalence(e: &Equivalence<f64>) -> Value {
    match e {
        Equivalence::Equivalent { bijection } => json!({
            "equivalent": true,
            "certificate": {"kind": "bijection", "bijection": bijection},
        }),
        Equivalence::Distinct(d) => {
            let cert = match d {
                Distinction::Moment { k, first, second } => {
                    json!({"kind": "moment", "k": k, "first": num(*first), "second": num(*second)})
                }
                Distinction::Weights { first, second } => {
                    json!({"kind": "weights", "first": nums(first), "second": nums(second)})
                }
                Distinction::NoBijection => json!({"kind": "no-bijection"}),
            };
            json!({"equivalent": false, "certificate": cert})
        }
        Equivalence::Undecided { parts } => json!({
            "equivalent": "undecided",
            "certificate": {"kind": "too-many-parts", "parts": [parts.0, parts.1]},
        }),
    }
}

pub fn kernel(k: &graphonlab::StepKernel) -> Value {
    kernel_to_value(k)
}
