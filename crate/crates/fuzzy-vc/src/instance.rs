//! Instance files: the JSON schemas consumed and produced by the CLI.
//!
//! Rationals travel as `"numerator/denominator"` strings in lowest terms
//! with positive denominators; index lists are strictly ascending. The
//! canonical rendering (sorted keys, no whitespace) is what digests are
//! computed over, and parsing a canonical file re-serializes to the same
//! bytes.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::measure::DiscreteMeasure;
use crate::rat;
use crate::system::{FuzzyRelation, FuzzySet, FuzzySetSystem, Mark, SetSystem};
use crate::FunctionClass;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceFile {
    FuzzySystem(FuzzySetSystem),
    SetSystem(SetSystem),
    FunctionClass(FunctionClass),
    FuzzyRelation(FuzzyRelation),
    Measure(DiscreteMeasure),
}

impl InstanceFile {
    pub fn type_tag(&self) -> &'static str {
        match self {
            InstanceFile::FuzzySystem(_) => "fuzzy_system",
            InstanceFile::SetSystem(_) => "set_system",
            InstanceFile::FunctionClass(_) => "function_class",
            InstanceFile::FuzzyRelation(_) => "fuzzy_relation",
            InstanceFile::Measure(_) => "measure",
        }
    }
}

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), message: message.into() }
}

fn as_object<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn as_array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| err(path, "expected a nonnegative integer"))
}

fn as_str<'v>(v: &'v Value, path: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| err(path, "expected a string"))
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value> {
    obj.get(key)
        .ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(err(path, format!("unknown field \"{key}\"")));
        }
    }
    Ok(())
}

/// Strictly ascending index list.
fn parse_indices(v: &Value, ground: usize, path: &str) -> Result<Vec<usize>> {
    let arr = as_array(v, path)?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, item) in arr.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let idx = as_usize(item, &p)?;
        if idx >= ground {
            return Err(err(&p, format!("index {idx} outside ground 0..{ground}")));
        }
        if let Some(&prev) = out.last() {
            if idx <= prev {
                return Err(err(&p, "indices must be strictly ascending"));
            }
        }
        out.push(idx);
    }
    Ok(out)
}

/// Parses instance bytes, validating the schema and every type invariant.
pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile> {
    let text = std::str::from_utf8(bytes).map_err(|_| err("$", "file is not utf-8"))?;
    let value: Value =
        serde_json::from_str(text).map_err(|e| err("$", format!("invalid json: {e}")))?;
    let obj = as_object(&value, "$")?;
    let tag = as_str(field(obj, "type", "$")?, "$.type")?;
    match tag {
        "fuzzy_system" => {
            reject_unknown(obj, &["type", "ground_size", "sets"], "$")?;
            let ground = as_usize(field(obj, "ground_size", "$")?, "$.ground_size")?;
            let sets_v = as_array(field(obj, "sets", "$")?, "$.sets")?;
            let mut sets = Vec::with_capacity(sets_v.len());
            for (i, sv) in sets_v.iter().enumerate() {
                let path = format!("$.sets[{i}]");
                let so = as_object(sv, &path)?;
                reject_unknown(so, &["plus", "minus"], &path)?;
                let plus =
                    parse_indices(field(so, "plus", &path)?, ground, &format!("{path}.plus"))?;
                let minus =
                    parse_indices(field(so, "minus", &path)?, ground, &format!("{path}.minus"))?;
                if let Some(x) = plus.iter().find(|x| minus.binary_search(x).is_ok()) {
                    return Err(err(
                        &format!("{path}.minus"),
                        format!("point {x} appears in both plus and minus"),
                    ));
                }
                sets.push(
                    FuzzySet::new(plus, minus)
                        .map_err(|e| err(&path, e.to_string()))?,
                );
            }
            let system =
                FuzzySetSystem::new(ground, sets).map_err(|e| err("$.sets", e.to_string()))?;
            Ok(InstanceFile::FuzzySystem(system))
        }
        "set_system" => {
            reject_unknown(obj, &["type", "ground_size", "sets"], "$")?;
            let ground = as_usize(field(obj, "ground_size", "$")?, "$.ground_size")?;
            let sets_v = as_array(field(obj, "sets", "$")?, "$.sets")?;
            let mut sets = Vec::with_capacity(sets_v.len());
            for (i, sv) in sets_v.iter().enumerate() {
                sets.push(parse_indices(sv, ground, &format!("$.sets[{i}]"))?);
            }
            let system =
                SetSystem::new(ground, sets).map_err(|e| err("$.sets", e.to_string()))?;
            Ok(InstanceFile::SetSystem(system))
        }
        "function_class" => {
            reject_unknown(obj, &["type", "points", "values"], "$")?;
            let points = as_usize(field(obj, "points", "$")?, "$.points")?;
            let rows_v = as_array(field(obj, "values", "$")?, "$.values")?;
            let mut rows = Vec::with_capacity(rows_v.len());
            for (i, rv) in rows_v.iter().enumerate() {
                let path = format!("$.values[{i}]");
                let row_v = as_array(rv, &path)?;
                if row_v.len() != points {
                    return Err(err(&path, format!("expected {points} values")));
                }
                let mut row = Vec::with_capacity(points);
                for (j, vv) in row_v.iter().enumerate() {
                    let p = format!("{path}[{j}]");
                    let v = rat::parse_rat(as_str(vv, &p)?, &p)?;
                    if !rat::in_unit_interval(&v) {
                        return Err(err(&p, "value outside [0,1]"));
                    }
                    row.push(v);
                }
                rows.push(row);
            }
            let class =
                FunctionClass::new(points, rows).map_err(|e| err("$.values", e.to_string()))?;
            Ok(InstanceFile::FunctionClass(class))
        }
        "fuzzy_relation" => {
            reject_unknown(obj, &["type", "rows", "cols", "entries"], "$")?;
            let rows = as_usize(field(obj, "rows", "$")?, "$.rows")?;
            let cols = as_usize(field(obj, "cols", "$")?, "$.cols")?;
            let entries_v = as_array(field(obj, "entries", "$")?, "$.entries")?;
            if entries_v.len() != rows {
                return Err(err("$.entries", format!("expected {rows} rows")));
            }
            let mut entries = Vec::with_capacity(rows);
            for (i, rv) in entries_v.iter().enumerate() {
                let path = format!("$.entries[{i}]");
                let row_v = as_array(rv, &path)?;
                if row_v.len() != cols {
                    return Err(err(&path, format!("expected {cols} entries")));
                }
                let mut row = Vec::with_capacity(cols);
                for (j, mv) in row_v.iter().enumerate() {
                    let p = format!("{path}[{j}]");
                    let mark = match as_str(mv, &p)? {
                        "+" => Mark::Plus,
                        "-" => Mark::Minus,
                        "*" => Mark::Star,
                        other => {
                            return Err(err(&p, format!("expected \"+\", \"-\" or \"*\", got {other:?}")))
                        }
                    };
                    row.push(mark);
                }
                entries.push(row);
            }
            let relation = FuzzyRelation::new(rows, cols, entries)
                .map_err(|e| err("$.entries", e.to_string()))?;
            Ok(InstanceFile::FuzzyRelation(relation))
        }
        "measure" => {
            reject_unknown(obj, &["type", "weights"], "$")?;
            let weights_v = as_array(field(obj, "weights", "$")?, "$.weights")?;
            let mut weights = Vec::with_capacity(weights_v.len());
            for (i, wv) in weights_v.iter().enumerate() {
                let p = format!("$.weights[{i}]");
                weights.push(rat::parse_rat(as_str(wv, &p)?, &p)?);
            }
            let measure =
                DiscreteMeasure::new(weights).map_err(|e| err("$.weights", e.to_string()))?;
            Ok(InstanceFile::Measure(measure))
        }
        other => Err(err("$.type", format!("unknown instance type {other:?}"))),
    }
}

/// The instance as a JSON value; object keys sort alphabetically under
/// the default `serde_json` map, which is what canonical output relies on.
pub fn to_value(instance: &InstanceFile) -> Value {
    match instance {
        InstanceFile::FuzzySystem(f) => json!({
            "type": "fuzzy_system",
            "ground_size": f.ground_size(),
            "sets": f
                .sets()
                .iter()
                .map(|s| json!({ "plus": s.plus(), "minus": s.minus() }))
                .collect::<Vec<_>>(),
        }),
        InstanceFile::SetSystem(s) => json!({
            "type": "set_system",
            "ground_size": s.ground_size(),
            "sets": s.sets(),
        }),
        InstanceFile::FunctionClass(q) => json!({
            "type": "function_class",
            "points": q.point_count(),
            "values": q
                .rows()
                .iter()
                .map(|row| row.iter().map(rat::format_rat).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        InstanceFile::FuzzyRelation(r) => json!({
            "type": "fuzzy_relation",
            "rows": r.x_size(),
            "cols": r.y_size(),
            "entries": r
                .entries()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|m| match m {
                            Mark::Plus => "+",
                            Mark::Minus => "-",
                            Mark::Star => "*",
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        }),
        InstanceFile::Measure(m) => json!({
            "type": "measure",
            "weights": m.weights().iter().map(rat::format_rat).collect::<Vec<_>>(),
        }),
    }
}

/// Canonical bytes: sorted keys, no whitespace.
pub fn canonical_json(instance: &InstanceFile) -> String {
    to_value(instance).to_string()
}

/// SHA-256 of the canonical bytes, hex-encoded.
pub fn digest(instance: &InstanceFile) -> String {
    digest_bytes(canonical_json(instance).as_bytes())
}

/// SHA-256 of arbitrary bytes, hex-encoded.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex_encode(&hasher.finalize())
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_fuzzy_system_example() {
        let text = r#"{"type":"fuzzy_system","ground_size":2,"sets":[{"plus":[0],"minus":[1]}]}"#;
        let inst = parse_instance(text.as_bytes()).unwrap();
        match &inst {
            InstanceFile::FuzzySystem(f) => {
                assert_eq!(f.ground_size(), 2);
                assert_eq!(f.sets()[0].plus(), &[0]);
                assert_eq!(f.sets()[0].minus(), &[1]);
            }
            other => panic!("wrong variant: {other:?}"),
        }
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let examples = [
            r#"{"type":"fuzzy_system","ground_size":2,"sets":[{"plus":[0],"minus":[1]}]}"#,
            r#"{"type":"set_system","ground_size":3,"sets":[[0,1],[2]]}"#,
            r#"{"type":"function_class","points":2,"values":[["0/1","1/2"]]}"#,
            r#"{"type":"fuzzy_relation","rows":2,"cols":2,"entries":[["+","-"],["*","+"]]}"#,
            r#"{"type":"measure","weights":["1/2","1/2"]}"#,
        ];
        for text in examples {
            let inst = parse_instance(text.as_bytes()).unwrap();
            let canonical = canonical_json(&inst);
            let reparsed = parse_instance(canonical.as_bytes()).unwrap();
            assert_eq!(canonical_json(&reparsed), canonical);
            // Parsing is insensitive to whitespace, digests are not.
            let spaced = text.replace(",", ", ");
            assert_eq!(parse_instance(spaced.as_bytes()).unwrap(), inst);
        }
    }

    #[test]
    fn measure_sum_validation() {
        let text = r#"{"type":"measure","weights":["1/2","1/3"]}"#;
        let e = parse_instance(text.as_bytes()).unwrap_err();
        match e {
            Error::Parse { path, message } => {
                assert_eq!(path, "$.weights");
                assert!(message.contains("sum"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn disjointness_validation_names_the_field() {
        let text = r#"{"type":"fuzzy_system","ground_size":1,"sets":[{"plus":[0],"minus":[0]}]}"#;
        let e = parse_instance(text.as_bytes()).unwrap_err();
        match e {
            Error::Parse { path, .. } => assert_eq!(path, "$.sets[0].minus"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unsorted_indices_and_bad_rationals() {
        let unsorted = r#"{"type":"set_system","ground_size":3,"sets":[[1,0]]}"#;
        assert!(parse_instance(unsorted.as_bytes()).is_err());
        let dup = r#"{"type":"set_system","ground_size":3,"sets":[[1,1]]}"#;
        assert!(parse_instance(dup.as_bytes()).is_err());
        let not_reduced = r#"{"type":"measure","weights":["2/4","1/2"]}"#;
        assert!(parse_instance(not_reduced.as_bytes()).is_err());
        let out_of_range = r#"{"type":"function_class","points":1,"values":[["3/2"]]}"#;
        assert!(parse_instance(out_of_range.as_bytes()).is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_types() {
        let extra = r#"{"type":"measure","weights":["1/1"],"note":"hi"}"#;
        assert!(parse_instance(extra.as_bytes()).is_err());
        let unknown = r#"{"type":"mystery"}"#;
        assert!(parse_instance(unknown.as_bytes()).is_err());
    }

    #[test]
    fn digest_depends_on_content() {
        let a = parse_instance(br#"{"type":"measure","weights":["1/1"]}"#).unwrap();
        let b = parse_instance(br#"{"type":"measure","weights":["1/2","1/2"]}"#).unwrap();
        assert_ne!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
    }
}
