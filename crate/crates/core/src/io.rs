//! JSON (de)serialization of instances and allocations.
//!
//! Instance schema:
//! ```json
//! {
//!   "weights": ["1", "2/3", 3],
//!   "m": 4,
//!   "profile": {
//!     "kind": "additive" | "identical" | "two_valuable",
//!     "matrix": [[...]],            // additive: n rows of m values
//!     "values": [...],              // identical: m values
//!     "tables": [                   // two_valuable: one entry per agent
//!       {"goods": [0, 2], "values": [1, 4, 5]}
//!     ]
//!   }
//! }
//! ```
//! Rationals are accepted as "p/q" strings, decimal strings, or JSON
//! numbers; serialization writes integers as numbers and everything else as
//! "p/q" strings, so parse -> serialize is the identity on canonical
//! documents. The top-level "m" is required for two_valuable profiles
//! (goods outside every table are otherwise invisible) and optional, but
//! checked, elsewhere.

use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::instance::{Instance, Profile, TwoTable};
use crate::rat::{format_rational, Rat};

pub fn parse_instance(text: &str) -> Result<Instance> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected a JSON object"))?;

    let weights_value = obj
        .get("weights")
        .ok_or_else(|| Error::parse("weights", "missing field"))?;
    let weights = parse_rational_array(weights_value, "weights")?;

    let declared_m = match obj.get("m") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| Error::parse("m", "expected a nonnegative integer"))?
                as usize,
        ),
    };

    let profile_value = obj
        .get("profile")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::parse("profile", "missing object field"))?;
    let kind = profile_value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::parse("profile.kind", "missing string field"))?;

    let profile = match kind {
        "additive" => {
            let matrix_value = profile_value
                .get("matrix")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("profile.matrix", "missing array field"))?;
            let mut matrix = Vec::with_capacity(matrix_value.len());
            for (i, row) in matrix_value.iter().enumerate() {
                matrix.push(parse_rational_array(row, &format!("profile.matrix[{i}]"))?);
            }
            Profile::Additive(matrix)
        }
        "identical" => {
            let values = profile_value
                .get("values")
                .ok_or_else(|| Error::parse("profile.values", "missing field"))?;
            Profile::Identical(parse_rational_array(values, "profile.values")?)
        }
        "two_valuable" => {
            let tables_value = profile_value
                .get("tables")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse("profile.tables", "missing array field"))?;
            let mut tables = Vec::with_capacity(tables_value.len());
            for (i, t) in tables_value.iter().enumerate() {
                tables.push(parse_table(t, &format!("profile.tables[{i}]"))?);
            }
            let goods = declared_m.ok_or_else(|| {
                Error::parse("m", "two_valuable instances must declare the good count")
            })?;
            Profile::TwoValuable { tables, goods }
        }
        other => {
            return Err(Error::parse(
                "profile.kind",
                format!("unknown kind '{other}' (expected additive, identical or two_valuable)"),
            ))
        }
    };

    let instance = Instance::new(weights, profile)?;
    if let Some(m) = declared_m {
        if m != instance.good_count() {
            return Err(Error::parse(
                "m",
                format!(
                    "declared {m} goods but the profile defines {}",
                    instance.good_count()
                ),
            ));
        }
    }
    Ok(instance)
}

fn parse_table(value: &Value, path: &str) -> Result<TwoTable> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::parse(path, "expected an object"))?;
    let goods_value = obj
        .get("goods")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{path}.goods"), "missing array field"))?;
    let mut goods = Vec::with_capacity(goods_value.len());
    for (k, g) in goods_value.iter().enumerate() {
        goods.push(
            g.as_u64()
                .ok_or_else(|| Error::parse(format!("{path}.goods[{k}]"), "expected a good id"))?
                as usize,
        );
    }
    let values = parse_rational_array(
        obj.get("values")
            .ok_or_else(|| Error::parse(format!("{path}.values"), "missing field"))?,
        &format!("{path}.values"),
    )?;
    TwoTable::new(goods, values).map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(path, message),
        other => other,
    })
}

fn parse_rational_array(value: &Value, path: &str) -> Result<Vec<Rat>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::parse(path, "expected an array"))?;
    let mut out = Vec::with_capacity(arr.len());
    for (k, v) in arr.iter().enumerate() {
        out.push(parse_rational_value(v, &format!("{path}[{k}]"))?);
    }
    Ok(out)
}

fn parse_rational_value(value: &Value, path: &str) -> Result<Rat> {
    match value {
        Value::String(s) => crate::rat::parse_rational(s)
            .ok_or_else(|| Error::parse(path, format!("cannot parse rational '{s}'"))),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(crate::rat::rat_int(i))
            } else if let Some(u) = n.as_u64() {
                Ok(Rat::from_integer(u.into()))
            } else if let Some(f) = n.as_f64() {
                Rat::from_float(f)
                    .ok_or_else(|| Error::parse(path, "non-finite number"))
            } else {
                Err(Error::parse(path, "unrepresentable number"))
            }
        }
        _ => Err(Error::parse(path, "expected a number or rational string")),
    }
}

fn rational_to_json(value: &Rat) -> Value {
    if value.is_integer() {
        if let Some(i) = value.numer().to_i64() {
            return json!(i);
        }
    }
    json!(format_rational(value))
}

pub fn serialize_instance(instance: &Instance) -> String {
    let weights: Vec<Value> = instance.weights().iter().map(rational_to_json).collect();
    let profile = match instance.profile() {
        Profile::Additive(matrix) => json!({
            "kind": "additive",
            "matrix": matrix
                .iter()
                .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
                .collect::<Vec<_>>(),
        }),
        Profile::Identical(values) => json!({
            "kind": "identical",
            "values": values.iter().map(rational_to_json).collect::<Vec<_>>(),
        }),
        Profile::TwoValuable { tables, .. } => json!({
            "kind": "two_valuable",
            "tables": tables
                .iter()
                .map(|t| {
                    json!({
                        "goods": t.goods,
                        "values": t.values.iter().map(rational_to_json).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        }),
    };
    let mut doc = Map::new();
    doc.insert("weights".to_string(), Value::Array(weights));
    doc.insert("m".to_string(), json!(instance.good_count()));
    doc.insert("profile".to_string(), profile);
    serde_json::to_string_pretty(&Value::Object(doc)).expect("instance serializes")
}

pub fn parse_allocation(text: &str) -> Result<Allocation> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))?;
    let bundles_value = root
        .get("bundles")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("bundles", "missing array field"))?;
    let mut bundles = Vec::with_capacity(bundles_value.len());
    for (i, b) in bundles_value.iter().enumerate() {
        let arr = b
            .as_array()
            .ok_or_else(|| Error::parse(format!("bundles[{i}]"), "expected an array"))?;
        let mut bundle = Vec::with_capacity(arr.len());
        for (k, g) in arr.iter().enumerate() {
            bundle.push(
                g.as_u64()
                    .ok_or_else(|| Error::parse(format!("bundles[{i}][{k}]"), "expected a good id"))?
                    as usize,
            );
        }
        bundles.push(bundle);
    }
    Ok(Allocation::new(bundles))
}

pub fn serialize_allocation(allocation: &Allocation) -> String {
    serde_json::to_string_pretty(&json!({ "bundles": allocation.bundles() }))
        .expect("allocation serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_frac, rat_int};

    #[test]
    fn minimal_additive_document() {
        let inst = parse_instance(r#"{"weights": [1], "profile": {"kind": "additive", "matrix": [[2]]}}"#)
            .unwrap();
        assert_eq!(inst.agent_count(), 1);
        assert_eq!(inst.good_count(), 1);
        assert_eq!(inst.good_value(0, 0), rat_int(2));
    }

    #[test]
    fn zero_weight_is_rejected_with_field_path() {
        let err = parse_instance(r#"{"weights": [0], "profile": {"kind": "identical", "values": [1]}}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("weights"), "{msg}");
        assert!(msg.contains("positive"), "{msg}");
    }

    #[test]
    fn rational_strings_parse() {
        let inst = parse_instance(
            r#"{"weights": ["1/2", "3"], "profile": {"kind": "identical", "values": ["2/3", 1.5]}}"#,
        )
        .unwrap();
        assert_eq!(inst.weights()[0], rat_frac(1, 2));
        assert_eq!(inst.good_value(0, 0), rat_frac(2, 3));
        assert_eq!(inst.good_value(0, 1), rat_frac(3, 2));
    }

    #[test]
    fn two_valuable_requires_declared_m() {
        let text = r#"{"weights": [1], "profile": {"kind": "two_valuable", "tables": [{"goods": [0], "values": [1]}]}}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("declare the good count"));
    }

    #[test]
    fn oversized_table_is_rejected() {
        let text = r#"{"weights": [1], "m": 3, "profile": {"kind": "two_valuable",
            "tables": [{"goods": [0, 1, 2], "values": [1, 1, 1]}]}}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("at most 2"));
    }

    #[test]
    fn serialize_then_parse_is_identity() {
        let text = r#"{"weights": ["1/2", 3], "m": 2, "profile": {"kind": "identical", "values": [4, "2/3"]}}"#;
        let inst = parse_instance(text).unwrap();
        let emitted = serialize_instance(&inst);
        let reparsed = parse_instance(&emitted).unwrap();
        assert_eq!(inst, reparsed);
        // canonical documents survive a second round byte-identically
        assert_eq!(emitted, serialize_instance(&reparsed));
    }

    #[test]
    fn allocation_round_trip() {
        let alloc = parse_allocation(r#"{"bundles": [[2, 0], [1]]}"#).unwrap();
        assert_eq!(alloc.bundle(0), &[0, 2]);
        let text = serialize_allocation(&alloc);
        assert_eq!(parse_allocation(&text).unwrap(), alloc);
    }
}
