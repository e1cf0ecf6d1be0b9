//! Instance JSON:
//!
//! ```json
//! {"n": 3, "A": [[1, 0, 0], [0, 2, 0], [0, 0, 3]], "b": [0, 0, 0], "c": 0,
//!  "cone": "nonneg_orthant"}
//! ```
//!
//! `cone` may also be `{"generators": [[...], ...]}`. `A` is given in full and
//! symmetrized on load. An optional `meta` object carries generator metadata.
//! Floats are written in shortest round-trip form, so reloading is bit-exact.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Map, Value};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::generators::GeneratorMeta;
use crate::instance::QuadraticInstance;

pub const ORTHANT_TAG: &str = "nonneg_orthant";

#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub instance: QuadraticInstance,
    pub cone: Cone,
    pub meta: Option<GeneratorMeta>,
}

fn number(v: &Value, field: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| Error::field(field, format!("expected a number, found {v}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::field(field, "number is not finite"))
    }
}

fn vector(v: &Value, field: &str, len: Option<usize>) -> Result<Vec<f64>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::field(field, "expected an array of numbers"))?;
    if let Some(len) = len {
        if items.len() != len {
            return Err(Error::field(field, format!("expected {len} entries, found {}", items.len())));
        }
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{field}[{i}]")))
        .collect()
}

fn require<'a>(obj: &'a Map<String, Value>, field: &str) -> Result<&'a Value> {
    obj.get(field).ok_or_else(|| Error::field(field, "missing"))
}

fn parse_cone(v: &Value, n: usize) -> Result<Cone> {
    match v {
        Value::String(s) if s == ORTHANT_TAG => Ok(Cone::orthant(n)),
        Value::Object(obj) => {
            let gens = require(obj, "generators").map_err(|_| Error::field("cone.generators", "missing"))?;
            let rows = gens
                .as_array()
                .ok_or_else(|| Error::field("cone.generators", "expected an array of vectors"))?;
            let generators = rows
                .iter()
                .enumerate()
                .map(|(k, g)| vector(g, &format!("cone.generators[{k}]"), Some(n)).map(DVector::from_vec))
                .collect::<Result<Vec<_>>>()?;
            Cone::generated(generators).map_err(|e| Error::field("cone", e.to_string()))
        }
        _ => Err(Error::field(
            "cone",
            format!("expected \"{ORTHANT_TAG}\" or {{\"generators\": [...]}}, found {v}"),
        )),
    }
}

pub fn parse_instance_value(value: &Value) -> Result<InstanceFile> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::field("<root>", "expected a JSON object"))?;
    let n_value = require(obj, "n")?;
    let n = n_value
        .as_u64()
        .ok_or_else(|| Error::field("n", format!("expected a nonnegative integer, found {n_value}")))?
        as usize;
    if n < 3 {
        return Err(Error::field("n", Error::DimensionTooSmall(n).to_string()));
    }
    let rows = require(obj, "A")?
        .as_array()
        .ok_or_else(|| Error::field("A", "expected an array of rows"))?;
    if rows.len() != n {
        return Err(Error::field("A", format!("expected {n} rows, found {}", rows.len())));
    }
    let mut a = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in vector(row, &format!("A[{i}]"), Some(n))?.into_iter().enumerate() {
            a[(i, j)] = x;
        }
    }
    let b = vector(require(obj, "b")?, "b", Some(n))?;
    let c = number(require(obj, "c")?, "c")?;
    let cone = parse_cone(require(obj, "cone")?, n)?;
    let meta = match obj.get("meta") {
        None | Some(Value::Null) => None,
        Some(m) => Some(serde_json::from_value(m.clone()).map_err(|e| Error::field("meta", e.to_string()))?),
    };
    let instance = QuadraticInstance::new(a, DVector::from_vec(b), c)?;
    Ok(InstanceFile { instance, cone, meta })
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::field("<root>", e.to_string()))?;
    parse_instance_value(&value)
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn cone_to_value(cone: &Cone) -> Value {
    match cone {
        Cone::NonnegOrthant { .. } => json!(ORTHANT_TAG),
        Cone::Generated { generators } => {
            let gens: Vec<Vec<f64>> = generators.iter().map(|g| g.iter().copied().collect()).collect();
            json!({ "generators": gens })
        }
    }
}

pub fn instance_to_value(inst: &QuadraticInstance, cone: &Cone, meta: Option<&GeneratorMeta>) -> Value {
    let a = inst.a();
    let rows: Vec<Vec<f64>> = (0..inst.n()).map(|i| a.row(i).iter().copied().collect()).collect();
    let b: Vec<f64> = inst.b().iter().copied().collect();
    let mut value = json!({
        "n": inst.n(),
        "A": rows,
        "b": b,
        "c": inst.c(),
        "cone": cone_to_value(cone),
    });
    if let Some(meta) = meta {
        value["meta"] = serde_json::to_value(meta).expect("metadata serializes");
    }
    value
}

pub fn write_instance(path: &Path, inst: &QuadraticInstance, cone: &Cone, meta: Option<&GeneratorMeta>) -> Result<()> {
    let text = serde_json::to_string_pretty(&instance_to_value(inst, cone, meta))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
