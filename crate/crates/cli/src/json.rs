//! JSON helpers for reports: floats serialize as numbers only when finite,
//! otherwise as the explicit string `"overflow"`.

use matjulia::wordmap::ExactMatrix;
use matjulia::CMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn jf(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("overflow")
    }
}

pub fn jc(z: Complex64) -> Value {
    json!([jf(z.re), jf(z.im)])
}

pub fn jmat(m: &CMatrix) -> Value {
    let n = m.dim();
    let entries: Vec<Vec<Value>> = (0..n)
        .map(|i| (0..n).map(|j| jc(m[(i, j)])).collect())
        .collect();
    json!({ "n": n, "entries": entries })
}

pub fn jexact(m: &ExactMatrix) -> Value {
    m.to_json()
}

pub fn jcomplex_list(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| jc(z)).collect())
}
