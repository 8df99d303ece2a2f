//! The JSON instance format.
//!
//! Rationals travel as strings (`"3"`, `"-2/5"`). Parsing is strict:
//! unknown fields are rejected and row lengths are validated against the
//! declared dimensions. Serialization is canonical: keys sorted, rationals
//! in lowest terms, compact separators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error as CoreError;
use crate::function::{Affine, MaxAffineFn};
use crate::harness::{CheckDoc, Instance, Param, TheoremId};
use crate::mapping::SVMap;
use crate::polyhedron::{HPoly, Row};
use crate::rational::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IneqDoc {
    pub a: Vec<Rat>,
    pub b: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqDoc {
    pub c: Vec<Rat>,
    pub d: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HPolyBody {
    pub dim: usize,
    #[serde(default)]
    pub ineq: Vec<IneqDoc>,
    #[serde(default)]
    pub eq: Vec<EqDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxAffineBody {
    pub n: usize,
    pub pieces: Vec<IneqDoc>,
    /// Omitted means all of `ℝⁿ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dom: Option<HPolyBody>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SVMapBody {
    pub n: usize,
    pub m: usize,
    pub graph: HPolyBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBody {
    pub theorem: TheoremId,
    pub instances: Vec<InstanceDoc>,
    #[serde(default)]
    pub points: Vec<Vec<Rat>>,
    #[serde(default)]
    pub params: BTreeMap<String, Param>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InstanceDoc {
    Hpoly(HPolyBody),
    Maxaffine(MaxAffineBody),
    Svmap(SVMapBody),
    Check(CheckBody),
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid field `{field}`: {message}")]
    Semantic { field: String, message: String },
}

impl DocError {
    fn semantic(field: impl Into<String>, message: impl Into<String>) -> DocError {
        DocError::Semantic { field: field.into(), message: message.into() }
    }
}

pub fn parse(text: &str) -> Result<InstanceDoc, DocError> {
    // Syntax first so that malformed JSON reports a position.
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| DocError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let doc = from_value(value, "")?;
    validate(&doc, "")?;
    Ok(doc)
}

// The tagged enum would buffer its content and lose field paths, so the
// tag is dispatched by hand.
fn from_value(mut value: serde_json::Value, at: &str) -> Result<InstanceDoc, DocError> {
    fn body<T: serde::de::DeserializeOwned>(v: serde_json::Value, at: &str) -> Result<T, DocError> {
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { at.trim_end_matches('.').to_string() } else { format!("{at}{path}") };
            let field = if field.is_empty() { ".".to_string() } else { field };
            DocError::semantic(field, e.into_inner().to_string())
        })
    }
    let Some(obj) = value.as_object_mut() else {
        return Err(DocError::semantic(if at.is_empty() { "." } else { at.trim_end_matches('.') }, "expected an object"));
    };
    let tag = match obj.remove("type") {
        Some(serde_json::Value::String(t)) => t,
        Some(_) => return Err(DocError::semantic(format!("{at}type"), "expected a string")),
        None => return Err(DocError::semantic(format!("{at}type"), "missing field `type`")),
    };
    Ok(match tag.as_str() {
        "hpoly" => InstanceDoc::Hpoly(body(value, at)?),
        "maxaffine" => InstanceDoc::Maxaffine(body(value, at)?),
        "svmap" => InstanceDoc::Svmap(body(value, at)?),
        "check" => {
            let items = match obj_take(&mut value, "instances") {
                Some(serde_json::Value::Array(items)) => items,
                Some(_) => return Err(DocError::semantic(format!("{at}instances"), "expected an array")),
                None => return Err(DocError::semantic(format!("{at}instances"), "missing field `instances`")),
            };
            if let Some(o) = value.as_object_mut() {
                o.insert("instances".into(), serde_json::Value::Array(Vec::new()));
            }
            let mut check: CheckBody = body(value, at)?;
            check.instances = items
                .into_iter()
                .enumerate()
                .map(|(i, v)| from_value(v, &format!("{at}instances[{i}].")))
                .collect::<Result<_, _>>()?;
            InstanceDoc::Check(check)
        }
        other => {
            return Err(DocError::semantic(
                format!("{at}type"),
                format!("unknown variant `{other}`, expected one of `hpoly`, `maxaffine`, `svmap`, `check`"),
            ))
        }
    })
}

fn obj_take(v: &mut serde_json::Value, key: &str) -> Option<serde_json::Value> {
    v.as_object_mut().and_then(|o| o.remove(key))
}

/// Canonical compact JSON: sorted keys, normalized rationals.
pub fn serialize(doc: &InstanceDoc) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    serde_json::to_string(&value).expect("values serialize")
}

/// Canonical JSON with indentation, for human consumption.
pub fn serialize_pretty<T: Serialize>(doc: &T) -> String {
    let value = serde_json::to_value(doc).expect("documents serialize");
    serde_json::to_string_pretty(&value).expect("values serialize")
}

fn validate(doc: &InstanceDoc, at: &str) -> Result<(), DocError> {
    match doc {
        InstanceDoc::Hpoly(b) => validate_hpoly(b, at),
        InstanceDoc::Maxaffine(b) => {
            for (i, p) in b.pieces.iter().enumerate() {
                check_len(&format!("{at}pieces[{i}].a"), b.n, p.a.len())?;
            }
            if b.pieces.is_empty() {
                return Err(DocError::semantic(format!("{at}pieces"), "at least one piece is required"));
            }
            if let Some(d) = &b.dom {
                check_len(&format!("{at}dom.dim"), b.n, d.dim)?;
                validate_hpoly(d, &format!("{at}dom."))?;
            }
            Ok(())
        }
        InstanceDoc::Svmap(b) => {
            check_len(&format!("{at}graph.dim"), b.n + b.m, b.graph.dim)?;
            validate_hpoly(&b.graph, &format!("{at}graph."))
        }
        InstanceDoc::Check(b) => {
            for (i, inst) in b.instances.iter().enumerate() {
                if matches!(inst, InstanceDoc::Check(_)) {
                    return Err(DocError::semantic(format!("{at}instances[{i}]"), "check documents do not nest"));
                }
                validate(inst, &format!("{at}instances[{i}]."))?;
            }
            Ok(())
        }
    }
}

fn validate_hpoly(b: &HPolyBody, at: &str) -> Result<(), DocError> {
    for (i, r) in b.ineq.iter().enumerate() {
        check_len(&format!("{at}ineq[{i}].a"), b.dim, r.a.len())?;
    }
    for (i, r) in b.eq.iter().enumerate() {
        check_len(&format!("{at}eq[{i}].c"), b.dim, r.c.len())?;
    }
    Ok(())
}

fn check_len(field: &str, expected: usize, found: usize) -> Result<(), DocError> {
    if expected == found {
        Ok(())
    } else {
        Err(DocError::semantic(field, format!("expected {expected} entries, found {found}")))
    }
}

impl From<&HPoly> for HPolyBody {
    fn from(p: &HPoly) -> HPolyBody {
        HPolyBody {
            dim: p.dim(),
            ineq: p.ineqs().iter().map(|r| IneqDoc { a: r.coeffs.clone(), b: r.rhs.clone() }).collect(),
            eq: p.eqs().iter().map(|r| EqDoc { c: r.coeffs.clone(), d: r.rhs.clone() }).collect(),
        }
    }
}

impl HPolyBody {
    pub fn to_poly(&self) -> Result<HPoly, CoreError> {
        HPoly::new(
            self.dim,
            self.ineq.iter().map(|r| Row::new(r.a.clone(), r.b.clone())).collect(),
            self.eq.iter().map(|r| Row::new(r.c.clone(), r.d.clone())).collect(),
        )
    }
}

impl From<&MaxAffineFn> for MaxAffineBody {
    fn from(f: &MaxAffineFn) -> MaxAffineBody {
        MaxAffineBody {
            n: f.n(),
            pieces: f.pieces().iter().map(|p| IneqDoc { a: p.a.clone(), b: p.b.clone() }).collect(),
            dom: Some(f.dom().into()),
        }
    }
}

impl MaxAffineBody {
    pub fn to_fn(&self) -> Result<MaxAffineFn, CoreError> {
        let dom = match &self.dom {
            Some(d) => d.to_poly()?,
            None => HPoly::universe(self.n),
        };
        MaxAffineFn::new(self.n, self.pieces.iter().map(|p| Affine::new(p.a.clone(), p.b.clone())).collect(), dom)
    }
}

impl From<&SVMap> for SVMapBody {
    fn from(f: &SVMap) -> SVMapBody {
        SVMapBody { n: f.n(), m: f.m(), graph: f.graph().into() }
    }
}

impl SVMapBody {
    pub fn to_map(&self) -> Result<SVMap, CoreError> {
        SVMap::new(self.n, self.m, self.graph.to_poly()?)
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(i: &Instance) -> InstanceDoc {
        match i {
            Instance::Poly(p) => InstanceDoc::Hpoly(p.into()),
            Instance::Fn(f) => InstanceDoc::Maxaffine(f.into()),
            Instance::Map(m) => InstanceDoc::Svmap(m.into()),
        }
    }
}

impl From<&CheckDoc> for InstanceDoc {
    fn from(c: &CheckDoc) -> InstanceDoc {
        InstanceDoc::Check(CheckBody {
            theorem: c.theorem,
            instances: c.instances.iter().map(InstanceDoc::from).collect(),
            points: c.points.clone(),
            params: c.params.clone(),
        })
    }
}

impl InstanceDoc {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceDoc::Hpoly(_) => "hpoly",
            InstanceDoc::Maxaffine(_) => "maxaffine",
            InstanceDoc::Svmap(_) => "svmap",
            InstanceDoc::Check(_) => "check",
        }
    }

    pub fn to_instance(&self) -> Result<Instance, CoreError> {
        match self {
            InstanceDoc::Hpoly(b) => Ok(Instance::Poly(b.to_poly()?)),
            InstanceDoc::Maxaffine(b) => Ok(Instance::Fn(b.to_fn()?)),
            InstanceDoc::Svmap(b) => Ok(Instance::Map(b.to_map()?)),
            InstanceDoc::Check(_) => Err(CoreError::MalformedInstance("expected a set, function or mapping".into())),
        }
    }

    pub fn to_check(&self) -> Result<CheckDoc, CoreError> {
        match self {
            InstanceDoc::Check(b) => Ok(CheckDoc {
                theorem: b.theorem,
                instances: b.instances.iter().map(InstanceDoc::to_instance).collect::<Result<_, _>>()?,
                points: b.points.clone(),
                params: b.params.clone(),
            }),
            other => Err(CoreError::MalformedInstance(format!("expected a check document, found {}", other.kind()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    #[test]
    fn halfline_parses() {
        let d = parse(r#"{"type":"hpoly","dim":1,"ineq":[{"a":["1"],"b":"1"}],"eq":[]}"#).unwrap();
        let InstanceDoc::Hpoly(b) = &d else { panic!("wrong kind") };
        let p = b.to_poly().unwrap();
        assert!(p.contains_point(&ints(&[1])).unwrap());
        assert!(!p.contains_point(&ints(&[2])).unwrap());
    }

    #[test]
    fn rationals_are_normalized() {
        let d = parse(r#"{"type":"hpoly","dim":1,"ineq":[{"a":["2/4"],"b":"-6/3"}]}"#).unwrap();
        assert_eq!(serialize(&d), r#"{"dim":1,"eq":[],"ineq":[{"a":["1/2"],"b":"-2"}],"type":"hpoly"}"#);
    }

    #[test]
    fn zero_denominator_is_semantic() {
        let e = parse(r#"{"type":"hpoly","dim":1,"ineq":[{"a":["1"],"b":"1/0"}]}"#).unwrap_err();
        match e {
            DocError::Semantic { field, .. } => assert_eq!(field, "ineq[0].b"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse("{\n  \"type\": \"hpoly\",\n  \"dim\": 1,,\n}").unwrap_err();
        assert!(matches!(e, DocError::Syntax { line: 3, .. }), "{e}");
    }

    #[test]
    fn unknown_fields_and_bad_lengths_are_rejected() {
        assert!(parse(r#"{"type":"hpoly","dim":1,"colour":"red"}"#).is_err());
        let e = parse(r#"{"type":"svmap","n":1,"m":1,"graph":{"dim":2,"ineq":[{"a":["1"],"b":"0"}]}}"#).unwrap_err();
        assert!(e.to_string().contains("graph.ineq[0].a"), "{e}");
        assert!(parse(r#"{"type":"polygon"}"#).is_err());
    }

    #[test]
    fn numbers_are_not_rationals() {
        assert!(parse(r#"{"type":"hpoly","dim":1,"ineq":[{"a":[1],"b":"1"}]}"#).is_err());
    }
}
