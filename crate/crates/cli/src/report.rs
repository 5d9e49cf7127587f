//! JSON encoding of numerical results.

use cyclic_thomae::linalg::CMat;
use cyclic_thomae::{Curve, Rational};
use num_complex::Complex64;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complexes(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| complex(*z)).collect())
}

pub fn matrix(m: &CMat<f64>) -> Value {
    Value::Array((0..m.rows).map(|i| complexes(m.row(i))).collect())
}

pub fn rational(q: Rational) -> Value {
    Value::String(format!("{}/{}", q.numer(), q.denom()))
}

pub fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|q| rational(*q)).collect())
}

pub fn rational_matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| rationals(r)).collect())
}

pub fn curve(spec: &Curve) -> Value {
    json!({
        "N": spec.n,
        "R": spec.r,
        "lambda": complexes(&spec.lambda),
        "base_x": complex(spec.base_x),
    })
}

/// Top-level envelope shared by every subcommand.
pub fn envelope(command: &str, spec: &Curve, status: bool, body: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": if status { "PASS" } else { "FAIL" },
        "curve": curve(spec),
        "result": body,
    })
}
