//! JSON documents for groups, endomorphisms and semidirect products.
//!
//! Integers up to `2^53` in magnitude are written as JSON numbers, larger
//! ones as decimal strings; both forms are accepted on input.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serializer;
use serde_json::{json, Map, Value};

use crate::autom::Endomorphism;
use crate::constructions::SemidirectSpec;
use crate::error::{Error, Result};
use crate::group::{GroupSpec, Malcev, MalcevVector, Polycyclic, WordExpr};

pub const CONVENTION: &str = "left-collected";

const SAFE: i64 = 1 << 53;

pub fn bigint_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) if x.abs() <= SAFE => Value::from(x),
        _ => Value::String(v.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("not an integer: \"{s}\""))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

pub fn serialize_bigints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&bigint_to_json(x))?;
    }
    seq.end()
}

pub fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_some(&bigint_to_json(v))
}

pub fn malcev_to_json(g: &Malcev) -> Value {
    Value::Array(g.0.iter().map(bigint_to_json).collect())
}

pub fn malcev_from_json(v: &Value) -> Result<Malcev> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected an integer array, got {v}")))?;
    arr.iter().map(bigint_from_json).collect::<Result<Vec<_>>>().map(MalcevVector)
}

fn usize_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("missing or invalid field `{key}`")))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

pub fn group_to_json(spec: &GroupSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("rank".into(), json!(spec.rank()));
    obj.insert("class".into(), json!(spec.class()));
    obj.insert("convention".into(), json!(CONVENTION));
    if let Some(rel) = spec.relations() {
        let mut per_weight: BTreeMap<usize, Vec<Value>> = BTreeMap::new();
        for (row, &p) in rel.rows().iter().zip(rel.pivots()) {
            per_weight
                .entry(spec.basis().weight(p))
                .or_default()
                .push(malcev_to_json(row));
        }
        let m: Map<String, Value> = per_weight
            .into_iter()
            .map(|(w, rows)| (w.to_string(), Value::Array(rows)))
            .collect();
        obj.insert("relations".into(), Value::Object(m));
    }
    if !spec.has_default_generators() {
        obj.insert(
            "generating_set".into(),
            Value::Array(spec.generating_set().iter().map(malcev_to_json).collect()),
        );
    }
    Value::Object(obj)
}

/// Parses a group document. `relations` is either an object mapping weights
/// to matrices of relator rows, or a flat list of rows.
pub fn group_from_json(v: &Value) -> Result<GroupSpec> {
    let obj = as_object(v, "group")?;
    if let Some(c) = obj.get("convention") {
        if c.as_str() != Some(CONVENTION) {
            return Err(Error::Parse(format!(
                "unsupported convention {c}; expected \"{CONVENTION}\""
            )));
        }
    }
    let rank = usize_field(obj, "rank")?;
    let class = usize_field(obj, "class")?;
    let mut spec = GroupSpec::free(rank, class)?;
    if let Some(rel) = obj.get("relations") {
        let rows: Vec<&Value> = match rel {
            Value::Object(m) => {
                let mut out = Vec::new();
                for (w, matrix) in m {
                    let weight: usize = w
                        .parse()
                        .map_err(|_| Error::Parse(format!("relation weight `{w}` is not an integer")))?;
                    if weight == 0 || weight > class {
                        return Err(Error::Parse(format!("relation weight {weight} outside [1, {class}]")));
                    }
                    let matrix = matrix
                        .as_array()
                        .ok_or_else(|| Error::Parse("relation matrices must be arrays of rows".into()))?;
                    out.extend(matrix.iter());
                }
                out
            }
            Value::Array(rows) => rows.iter().collect(),
            _ => return Err(Error::Parse("`relations` must be an object or an array".into())),
        };
        let rows = rows
            .into_iter()
            .map(malcev_from_json)
            .collect::<Result<Vec<_>>>()?;
        if !rows.is_empty() {
            spec = spec.with_relators(&rows)?;
        }
    }
    if let Some(gens) = obj.get("generating_set") {
        let gens = gens
            .as_array()
            .ok_or_else(|| Error::Parse("`generating_set` must be an array".into()))?
            .iter()
            .map(malcev_from_json)
            .collect::<Result<Vec<_>>>()?;
        spec = spec.with_generating_set(gens)?;
    }
    Ok(spec)
}

pub fn endomorphism_to_json(phi: &Endomorphism) -> Value {
    json!({
        "group": group_to_json(phi.spec()),
        "images": phi.images().iter().map(malcev_to_json).collect::<Vec<_>>(),
    })
}

/// Parses an endomorphism document. `group` is an inline group document or
/// a path, resolved against `base_dir`. Images are coordinate arrays or
/// words in the generators (`"x1 x2"`).
pub fn endomorphism_from_json(v: &Value, base_dir: Option<&Path>) -> Result<Endomorphism> {
    let obj = as_object(v, "endomorphism")?;
    let group = obj
        .get("group")
        .ok_or_else(|| Error::Parse("missing field `group`".into()))?;
    let spec = match group {
        Value::String(path) => {
            let p = match base_dir {
                Some(d) => d.join(path),
                None => path.into(),
            };
            read_group(&p)?
        }
        other => group_from_json(other)?,
    };
    let images = obj
        .get("images")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing or invalid field `images`".into()))?;
    let images = images
        .iter()
        .map(|img| match img {
            Value::String(w) => spec.eval_basis_word(&w.parse::<WordExpr>()?),
            other => malcev_from_json(other),
        })
        .collect::<Result<Vec<_>>>()?;
    Endomorphism::new(&spec, images)
}

pub fn semidirect_to_json(s: &SemidirectSpec) -> Value {
    json!({
        "base": group_to_json(s.base()),
        "monodromy": s.monodromy().images().iter().map(malcev_to_json).collect::<Vec<_>>(),
        "class": s.class(),
        "hirsch_length": s.hirsch_length(),
    })
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_group(path: &Path) -> Result<GroupSpec> {
    group_from_json(&read_json(path)?)
}

pub fn read_endomorphism(path: &Path) -> Result<Endomorphism> {
    endomorphism_from_json(&read_json(path)?, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_values_become_strings() {
        assert_eq!(bigint_to_json(&BigInt::from(5)), json!(5));
        let big = BigInt::from(1u64 << 60);
        assert_eq!(bigint_to_json(&big), json!("1152921504606846976"));
        assert_eq!(bigint_from_json(&json!("1152921504606846976")).unwrap(), big);
        assert!(bigint_from_json(&json!(1.5)).is_err());
        assert!(bigint_from_json(&json!([1])).is_err());
    }

    #[test]
    fn group_round_trip() {
        let h = GroupSpec::free(2, 2).unwrap();
        let v = group_to_json(&h);
        assert_eq!(v, json!({"rank": 2, "class": 2, "convention": "left-collected"}));
        let back = group_from_json(&v).unwrap();
        assert_eq!(back.len(), 3);
        assert!(back.is_free());
    }

    #[test]
    fn relations_round_trip() {
        let h = GroupSpec::free(2, 2).unwrap();
        let q = h.with_relators(&[Malcev::from_i64s(&[0, 0, 1])]).unwrap();
        let v = group_to_json(&q);
        assert_eq!(v["relations"], json!({"2": [[0, 0, 1]]}));
        let back = group_from_json(&v).unwrap();
        assert_eq!(back.graded_ranks(), vec![2, 0]);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(group_from_json(&json!({"rank": 2})).is_err());
        assert!(group_from_json(&json!({"rank": 2, "class": 2, "convention": "right"})).is_err());
        assert!(group_from_json(&json!([1, 2])).is_err());
    }

    #[test]
    fn endomorphism_with_words() {
        let v = json!({"group": {"rank": 2, "class": 2}, "images": ["x1 x2", [1, 0, 0]]});
        let phi = endomorphism_from_json(&v, None).unwrap();
        assert_eq!(phi.images()[0], Malcev::from_i64s(&[1, 1, 0]));
        let back = endomorphism_from_json(&endomorphism_to_json(&phi), None).unwrap();
        assert_eq!(back.images(), phi.images());
    }
}
