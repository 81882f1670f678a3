//! JSON rendering with 12-significant-digit numbers.

use serde_json::{json, Map, Value};
use whcap::choi::SpectralBranch;
use whcap::sweep::{round_g12, Quantity, SweepRow};
use whcap::{ChannelParams, ComplexMatrix};

fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(round_g12(v))
    } else {
        Value::Null
    }
}

pub fn params_json(p: &ChannelParams) -> Value {
    json!({ "d": p.d(), "x": num(p.x()), "y": num(p.y()) })
}

/// One report object holding the requested quantities.
pub fn row_json(row: &SweepRow, quantities: &[Quantity]) -> Value {
    let r = &row.report;
    let want = |q| quantities.contains(&q);
    let mut m = Map::new();
    m.insert("params".into(), params_json(&r.params));
    if want(Quantity::Holevo) {
        m.insert("holevo".into(), num(r.holevo));
        m.insert("holevo_region".into(), json!(r.holevo_region.as_str()));
    }
    if want(Quantity::ClassicalUpper) {
        m.insert("classical_upper".into(), num(r.classical_upper));
        m.insert("classical_branch".into(), json!(r.classical_branch));
    }
    if want(Quantity::Ea) {
        m.insert("ea".into(), num(r.ea));
        m.insert("xi".into(), num(r.xi));
    }
    if want(Quantity::QLower) {
        m.insert("q_lower_raw".into(), num(r.q_lower_raw));
        m.insert("q_lower".into(), num(r.q_lower));
    }
    if want(Quantity::QGamma) {
        m.insert("q_gamma".into(), r.q_gamma.map_or(Value::Null, num));
        m.insert("sdp_status".into(), json!(r.sdp_status));
    }
    if want(Quantity::Ppt) || want(Quantity::Omega) {
        let mut flags = Map::new();
        if want(Quantity::Ppt) {
            flags.insert("ppt".into(), json!(r.flags.ppt));
        }
        if want(Quantity::Omega) {
            flags.insert("in_omega".into(), json!(r.flags.in_omega));
        }
        flags.insert(
            "qubit_antidegradable".into(),
            json!(r.flags.qubit_antidegradable),
        );
        m.insert("flags".into(), Value::Object(flags));
    }
    if let Some((sp, sm)) = row.map_spectrum {
        m.insert(
            "map_spectrum".into(),
            json!({ "s_plus": num(sp), "s_minus": num(sm) }),
        );
    }
    Value::Object(m)
}

pub fn real_matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| num(m[(r, c)].re)).collect()))
            .collect(),
    )
}

/// Entries as `[re, im]` pairs.
pub fn complex_matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| {
                Value::Array(
                    (0..m.ncols())
                        .map(|c| json!([num(m[(r, c)].re), num(m[(r, c)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn branches_json(branches: &[SpectralBranch]) -> Value {
    Value::Array(
        branches
            .iter()
            .map(|b| json!({ "label": b.label, "value": num(b.value), "multiplicity": b.multiplicity }))
            .collect(),
    )
}
