use cantordiff::interval::{Interval, IntervalSet};
use cantordiff::Scalar;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;

pub const SCHEMA: &str = "cantordiff/1";
const APPROX_BITS: u32 = 64;

pub fn scalar(x: &Scalar) -> Value {
    json!({ "exact": x.render(), "approx": x.enclosure(APPROX_BITS) })
}

pub fn interval(iv: &Interval) -> Value {
    json!([scalar(iv.lo()), scalar(iv.hi())])
}

pub fn interval_set(set: &IntervalSet) -> Value {
    Value::Array(set.intervals().iter().map(interval).collect())
}

pub fn scalars<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> Value {
    Value::Array(xs.into_iter().map(scalar).collect())
}

/// Wraps a command body with the schema tag and the pair it ran on.
pub fn envelope(command: &str, cfg: &RunConfig, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), SCHEMA.into());
    out.insert("command".into(), command.into());
    out.insert(
        "pair".into(),
        json!({ "field": cfg.source.field, "alpha": cfg.source.alpha, "beta": cfg.source.beta }),
    );
    if let Value::Object(fields) = body {
        out.extend(fields);
    }
    Value::Object(out)
}
