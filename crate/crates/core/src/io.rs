//! JSON formats for tree specs and functions.
//!
//! A tree spec file is `{"kind": ..., "params": {...}, "leafless": bool}`.
//! `kind` is `homogeneous`, `level_sequence`, `explicit`, `gallery` (with a
//! `name` param) or any gallery family name. A function file is a list of
//! entries, each either a point `{level, index, ...}` or a segment
//! `{level, start, len, ...}`, with the value given as `num`/`den`, as a
//! string `value` like `"-3/4"`, or as `re`/`im`.

use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::function::{Segment, TreeFunction};
use crate::gallery::{self, Params};
use crate::scalar::{parse_rational, rational_to_f64};
use crate::tree::{SequenceTail, TreeSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leafless: Option<bool>,
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn param_u64(params: &Map<String, Value>, key: &str) -> Result<u64> {
    match params.get(key) {
        Some(Value::Number(n)) => n.as_u64(),
        Some(Value::String(s)) => s.trim().parse().ok(),
        _ => None,
    }
    .ok_or_else(|| fmt_err(format!("param `{key}` must be a nonnegative integer")))
}

fn u64_list(v: &Value, what: &str) -> Result<Vec<u64>> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(|x| {
                x.as_u64()
                    .ok_or_else(|| fmt_err(format!("`{what}` entries must be nonnegative integers")))
            })
            .collect(),
        Value::String(s) => s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| fmt_err(format!("bad `{what}` entry `{x}`")))
            })
            .collect(),
        _ => Err(fmt_err(format!("`{what}` must be a list"))),
    }
}

fn param_string(v: &Value) -> Result<String> {
    Ok(match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Array(_) => u64_list(v, "list")?
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
        other => return Err(fmt_err(format!("unsupported param value {other}"))),
    })
}

fn gallery_params(params: &Map<String, Value>, skip: &str) -> Result<Params> {
    params
        .iter()
        .filter(|(k, _)| k.as_str() != skip)
        .map(|(k, v)| Ok((k.clone(), param_string(v)?)))
        .collect()
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<TreeSpec> {
        let p = &self.params;
        let spec = match self.kind.as_str() {
            "homogeneous" if p.is_empty() || p.keys().all(|k| k == "q") => {
                gallery::build("homogeneous", &gallery_params(p, "")?)?.spec
            }
            "level_sequence" if p.contains_key("s") => {
                let s = u64_list(&p["s"], "s")?;
                let tail = match p.get("tail") {
                    None => SequenceTail::Cycle,
                    Some(t) => serde_json::from_value(t.clone()).map_err(|e| fmt_err(format!("tail: {e}")))?,
                };
                TreeSpec::level_sequence(s, tail)?
            }
            "explicit" => {
                let levels = match p.get("levels") {
                    Some(Value::Array(ls)) => ls.iter().map(|l| u64_list(l, "levels")).collect::<Result<Vec<_>>>()?,
                    _ => return Err(fmt_err("explicit specs need `levels`: a list of degree lists")),
                };
                TreeSpec::explicit(levels, param_u64(p, "tail")?)
            }
            "gallery" => {
                let name = p
                    .get("name")
                    .and_then(Value::as_str)
                    .ok_or_else(|| fmt_err("gallery specs need a `name` param"))?;
                gallery::build(name, &gallery_params(p, "name")?)?.spec
            }
            name => gallery::build(name, &gallery_params(p, "")?)?.spec,
        };
        Ok(match self.leafless {
            Some(claim) => spec.with_leafless_claim(claim),
            None => spec,
        })
    }
}

pub fn parse_spec_json(text: &str) -> Result<TreeSpec> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| fmt_err(format!("tree spec: {e}")))?;
    file.to_spec()
}

/// Resolves `gallery:<name>?<params>` or a path to a spec file.
pub fn resolve_tree_arg(arg: &str) -> Result<TreeSpec> {
    if let Some(inline) = arg.strip_prefix("gallery:") {
        return Ok(gallery::build_inline(inline)?.spec);
    }
    let text =
        fs::read_to_string(Path::new(arg)).map_err(|e| fmt_err(format!("cannot read tree spec `{arg}`: {e}")))?;
    parse_spec_json(&text)
}

/// Values read from a function file.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionData {
    Rational(TreeFunction<BigRational>),
    Complex(TreeFunction<Complex64>),
}

fn big_field(o: &Map<String, Value>, key: &str) -> Result<Option<BigUint>> {
    match o.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(|v| Some(BigUint::from(v)))
            .ok_or_else(|| fmt_err(format!("`{key}` must be a nonnegative integer"))),
        Some(Value::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| fmt_err(format!("`{key}` = `{s}` is not a nonnegative integer"))),
        Some(other) => Err(fmt_err(format!("`{key}` has unsupported value {other}"))),
    }
}

fn int_field(o: &Map<String, Value>, key: &str) -> Result<Option<String>> {
    Ok(match o.get(key) {
        None => None,
        Some(Value::Number(n)) if n.is_i64() || n.is_u64() => Some(n.to_string()),
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => return Err(fmt_err(format!("`{key}` must be an integer, got {other}"))),
    })
}

enum Entry {
    Rational(BigRational),
    Complex(Complex64),
}

fn entry_value(o: &Map<String, Value>) -> Result<Entry> {
    if o.contains_key("re") || o.contains_key("im") {
        let get = |k| o.get(k).map_or(Some(0.0), Value::as_f64);
        let (re, im) = (get("re"), get("im"));
        return match (re, im) {
            (Some(re), Some(im)) => Ok(Entry::Complex(Complex64::new(re, im))),
            _ => Err(fmt_err("`re` and `im` must be numbers")),
        };
    }
    if let Some(v) = o.get("value") {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            other => return Err(fmt_err(format!("`value` must be a string or number, got {other}"))),
        };
        return Ok(Entry::Rational(parse_rational(&s)?));
    }
    let num = int_field(o, "num")?.ok_or_else(|| fmt_err("each entry needs num/den, value, or re/im"))?;
    let den = int_field(o, "den")?.unwrap_or_else(|| "1".into());
    Ok(Entry::Rational(parse_rational(&format!("{num}/{den}"))?))
}

/// Parses a function file; values are complex as soon as one entry is.
pub fn parse_function_json(text: &str) -> Result<FunctionData> {
    let root: Value = serde_json::from_str(text).map_err(|e| fmt_err(format!("function file: {e}")))?;
    let items = match &root {
        Value::Array(items) => items,
        Value::Object(o) => match o.get("entries").or_else(|| o.get("segments")) {
            Some(Value::Array(items)) => items,
            _ => return Err(fmt_err("function file must be a list of entries")),
        },
        _ => return Err(fmt_err("function file must be a list of entries")),
    };
    let mut parsed = Vec::with_capacity(items.len());
    for item in items {
        let o = item
            .as_object()
            .ok_or_else(|| fmt_err("function entries must be objects"))?;
        let level = o
            .get("level")
            .and_then(Value::as_u64)
            .ok_or_else(|| fmt_err("each entry needs a `level`"))? as usize;
        let (start, len) = match (big_field(o, "index")?, big_field(o, "start")?) {
            (Some(i), None) => (i, BigUint::from(1u32)),
            (None, Some(s)) => (s, big_field(o, "len")?.unwrap_or_else(|| BigUint::from(1u32))),
            _ => return Err(fmt_err("each entry needs exactly one of `index` or `start`")),
        };
        parsed.push((level, start, len, entry_value(o)?));
    }
    let complex = parsed.iter().any(|(.., v)| matches!(v, Entry::Complex(_)));
    let top = parsed.iter().map(|(l, ..)| *l + 1).max().unwrap_or(0);
    if complex {
        let mut levels = vec![Vec::new(); top];
        for (l, start, len, v) in parsed {
            let z = match v {
                Entry::Complex(z) => z,
                Entry::Rational(r) => Complex64::new(rational_to_f64(&r), 0.0),
            };
            levels[l].push(Segment { start, len, value: z });
        }
        Ok(FunctionData::Complex(TreeFunction::from_level_segments(levels)))
    } else {
        let mut levels = vec![Vec::new(); top];
        for (l, start, len, v) in parsed {
            if let Entry::Rational(r) = v {
                levels[l].push(Segment { start, len, value: r });
            }
        }
        Ok(FunctionData::Rational(TreeFunction::from_level_segments(levels)))
    }
}

pub fn read_function(path: &Path) -> Result<FunctionData> {
    let text = fs::read_to_string(path).map_err(|e| fmt_err(format!("cannot read `{}`: {e}", path.display())))?;
    parse_function_json(&text)
}

fn big_value(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

fn location(level: usize, s: &Segment<impl Clone>) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("level".into(), Value::from(level));
    if s.len == BigUint::from(1u32) {
        o.insert("index".into(), big_value(&s.start));
    } else {
        o.insert("start".into(), big_value(&s.start));
        o.insert("len".into(), big_value(&s.len));
    }
    o
}

fn int_value(n: &num_bigint::BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

/// Serializes as a list of segment entries (the format [`parse_function_json`] reads).
pub fn rational_function_json(f: &TreeFunction<BigRational>) -> Value {
    let mut out = Vec::new();
    for (level, segs) in f.levels().iter().enumerate() {
        for s in segs {
            let mut o = location(level, s);
            o.insert("num".into(), int_value(s.value.numer()));
            o.insert("den".into(), int_value(s.value.denom()));
            out.push(Value::Object(o));
        }
    }
    Value::Array(out)
}

pub fn complex_function_json(f: &TreeFunction<Complex64>) -> Value {
    let mut out = Vec::new();
    for (level, segs) in f.levels().iter().enumerate() {
        for s in segs {
            let mut o = location(level, s);
            o.insert("re".into(), Value::from(s.value.re));
            o.insert("im".into(), Value::from(s.value.im));
            out.push(Value::Object(o));
        }
    }
    Value::Array(out)
}

impl FunctionData {
    pub fn to_json(&self) -> Value {
        match self {
            FunctionData::Rational(f) => rational_function_json(f),
            FunctionData::Complex(f) => complex_function_json(f),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{materialize, VertexId};

    #[test]
    fn spec_files() {
        let t = |s: &str| materialize(&parse_spec_json(s).unwrap(), 4).unwrap().level_sizes();
        let n = |v: &[u32]| v.iter().map(|&x| BigUint::from(x)).collect::<Vec<_>>();
        assert_eq!(t(r#"{"kind":"homogeneous","params":{"q":2}}"#), n(&[1, 2, 4, 8, 16]));
        assert_eq!(t(r#"{"kind":"k_tree","params":{"k":3}}"#), n(&[1, 3, 5, 7, 9]));
        assert_eq!(
            t(r#"{"kind":"gallery","params":{"name":"periodic","q":[2,3]}}"#),
            n(&[1, 2, 6, 12, 36])
        );
        assert_eq!(
            t(r#"{"kind":"level_sequence","params":{"s":[1,2],"tail":"last"}}"#),
            n(&[1, 1, 2, 4, 8])
        );
        assert_eq!(
            t(r#"{"kind":"explicit","params":{"levels":[[2],[0,3]],"tail":1},"leafless":false}"#),
            n(&[1, 2, 3, 3, 3])
        );
        let claim =
            parse_spec_json(r#"{"kind":"explicit","params":{"levels":[[2],[0,3]],"tail":1},"leafless":true}"#).unwrap();
        assert!(matches!(
            materialize(&claim, 3),
            Err(Error::LeaflessContradiction { .. })
        ));
        assert!(parse_spec_json(r#"{"kind":"nope"}"#).is_err());
        assert!(resolve_tree_arg("gallery:k_tree?k=5").is_ok());
    }

    #[test]
    fn function_round_trip() {
        let text = r#"[{"level":0,"index":0,"num":3,"den":2},
                       {"level":2,"start":1,"len":2,"value":"-1/4"},
                       {"level":2,"index":"2","num":-1}]"#;
        let FunctionData::Rational(f) = parse_function_json(text).unwrap() else {
            panic!("rational expected")
        };
        assert_eq!(f.get(&VertexId::new(2, 2u32)), BigRational::new((-5).into(), 4.into()));
        let back = parse_function_json(&rational_function_json(&f).to_string()).unwrap();
        assert_eq!(back, FunctionData::Rational(f));
        let FunctionData::Complex(z) =
            parse_function_json(r#"[{"level":1,"index":0,"re":0.5,"im":-1}, {"level":0,"index":0,"num":1}]"#).unwrap()
        else {
            panic!("complex expected")
        };
        assert_eq!(z.get(&VertexId::root()), Complex64::new(1.0, 0.0));
        assert!(parse_function_json(r#"[{"level":0}]"#).is_err());
    }
}
