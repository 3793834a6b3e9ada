//! JSON algebra descriptions with named rational parameters.
//!
//! ```json
//! {"name": "g3d2", "dim": 3,
//!  "brackets": [{"i": 1, "j": 3, "out": {"1": "1"}},
//!               {"i": 2, "j": 3, "out": {"2": "alpha"}}],
//!  "params": ["alpha"],
//!  "constraints": [{"param": "alpha", "nonzero": true}]}
//! ```
//!
//! A coefficient is a rational string (`"p/q"` or `"p"`), a parameter name,
//! a negated parameter name (`"-alpha"`), an object `{"coef": "-1", "param":
//! "alpha"}`, or an array of such terms that are summed.

use std::collections::BTreeMap;

use num::Zero;
use serde_json::{json, Map, Value};

use super::{check_jacobi, parse_rational, Bindings, Rational, StructureConstants};
use crate::error::{Error, Result};

/// A coefficient expression linear in at most one parameter per term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefExpr {
    Const(Rational),
    Param { coef: Rational, param: String },
    Sum(Vec<CoefExpr>),
}

impl CoefExpr {
    pub fn param(name: &str) -> Self {
        CoefExpr::Param {
            coef: Rational::from_integer(1.into()),
            param: name.to_string(),
        }
    }

    pub fn scaled_param(coef: Rational, name: &str) -> Self {
        CoefExpr::Param {
            coef,
            param: name.to_string(),
        }
    }

    pub fn evaluate(&self, bindings: &Bindings) -> Result<Rational> {
        match self {
            CoefExpr::Const(c) => Ok(c.clone()),
            CoefExpr::Param { coef, param } => bindings
                .get(param)
                .map(|v| coef * v)
                .ok_or_else(|| Error::UnboundParameter(param.clone())),
            CoefExpr::Sum(terms) => terms
                .iter()
                .try_fold(Rational::zero(), |acc, t| Ok(acc + t.evaluate(bindings)?)),
        }
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CoefExpr::Const(_) => {}
            CoefExpr::Param { param, .. } => out.push(param),
            CoefExpr::Sum(terms) => terms.iter().for_each(|t| t.collect_params(out)),
        }
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => {
                let s = s.trim();
                if let Ok(c) = parse_rational(s) {
                    return Ok(CoefExpr::Const(c));
                }
                let (coef, name) = match s.strip_prefix('-') {
                    Some(rest) => (Rational::from_integer((-1).into()), rest.trim()),
                    None => (Rational::from_integer(1.into()), s),
                };
                if !is_identifier(name) {
                    return Err(Error::Parse(format!("invalid coefficient `{s}`")));
                }
                Ok(CoefExpr::Param {
                    coef,
                    param: name.to_string(),
                })
            }
            Value::Number(n) => n
                .as_i64()
                .map(|v| CoefExpr::Const(Rational::from_integer(v.into())))
                .ok_or_else(|| Error::Parse(format!("non-integer numeric coefficient {n}"))),
            Value::Object(obj) => {
                let coef = match obj.get("coef") {
                    None => Rational::from_integer(1.into()),
                    Some(Value::String(s)) => parse_rational(s)?,
                    Some(Value::Number(n)) => n
                        .as_i64()
                        .map(|v| Rational::from_integer(v.into()))
                        .ok_or_else(|| Error::Parse(format!("non-integer coef {n}")))?,
                    Some(other) => return Err(Error::Parse(format!("invalid coef {other}"))),
                };
                match obj.get("param") {
                    Some(Value::String(p)) if is_identifier(p) => Ok(CoefExpr::Param {
                        coef,
                        param: p.clone(),
                    }),
                    None => Ok(CoefExpr::Const(coef)),
                    Some(other) => Err(Error::Parse(format!("invalid param {other}"))),
                }
            }
            Value::Array(items) => Ok(CoefExpr::Sum(
                items.iter().map(CoefExpr::from_json).collect::<Result<_>>()?,
            )),
            other => Err(Error::Parse(format!("invalid coefficient {other}"))),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CoefExpr::Const(c) => Value::String(c.to_string()),
            CoefExpr::Param { coef, param } => json!({"coef": coef.to_string(), "param": param}),
            CoefExpr::Sum(terms) => Value::Array(terms.iter().map(CoefExpr::to_json).collect()),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// `[z_i, z_j] = sum_k out[k] z_k` with `i < j`, 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketSpec {
    pub i: usize,
    pub j: usize,
    pub out: BTreeMap<usize, CoefExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub param: String,
    pub nonzero: bool,
}

/// A parametrised algebra description; [`AlgebraSpec::instantiate`] binds it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSpec {
    pub name: String,
    pub dim: usize,
    pub brackets: Vec<BracketSpec>,
    pub params: Vec<String>,
    pub constraints: Vec<Constraint>,
}

impl AlgebraSpec {
    /// Describes fixed structure constants (no parameters).
    pub fn from_constants(name: &str, sc: &StructureConstants) -> Self {
        let brackets = sc
            .entries()
            .into_iter()
            .map(|((i, j), out)| BracketSpec {
                i,
                j,
                out: out
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k + 1, CoefExpr::Const(c)))
                    .collect(),
            })
            .collect();
        AlgebraSpec {
            name: name.to_string(),
            dim: sc.dim(),
            brackets,
            params: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text)?;
        let obj = root
            .as_object()
            .ok_or_else(|| Error::Parse("algebra document must be a JSON object".into()))?;
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing string field `name`".into()))?
            .to_string();
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field `dim`".into()))?
            as usize;
        if dim == 0 {
            return Err(Error::Parse("`dim` must be at least 1".into()));
        }

        let mut brackets = Vec::new();
        for item in array_field(obj, "brackets")? {
            let b = item
                .as_object()
                .ok_or_else(|| Error::Parse("bracket entry must be an object".into()))?;
            let index = |key: &str| {
                b.get(key)
                    .and_then(Value::as_u64)
                    .map(|v| v as usize)
                    .ok_or_else(|| Error::Parse(format!("bracket entry missing integer `{key}`")))
            };
            let (i, j) = (index("i")?, index("j")?);
            let out_obj = b
                .get("out")
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse(format!("bracket ({i},{j}) missing object `out`")))?;
            let mut out = BTreeMap::new();
            for (k, v) in out_obj {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("output index `{k}` is not an integer")))?;
                out.insert(k, CoefExpr::from_json(v)?);
            }
            brackets.push(BracketSpec { i, j, out });
        }

        let params = array_field(obj, "params")?
            .iter()
            .map(|p| {
                p.as_str()
                    .filter(|s| is_identifier(s))
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse(format!("invalid parameter name {p}")))
            })
            .collect::<Result<Vec<_>>>()?;

        let constraints = array_field(obj, "constraints")?
            .iter()
            .map(|c| {
                let param = c
                    .get("param")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("constraint missing `param`".into()))?;
                let nonzero = c.get("nonzero").and_then(Value::as_bool).unwrap_or(false);
                Ok(Constraint {
                    param: param.to_string(),
                    nonzero,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(AlgebraSpec {
            name,
            dim,
            brackets,
            params,
            constraints,
        })
    }

    pub fn to_json(&self) -> String {
        let brackets: Vec<Value> = self
            .brackets
            .iter()
            .map(|b| {
                let out: Map<String, Value> =
                    b.out.iter().map(|(k, c)| (k.to_string(), c.to_json())).collect();
                json!({"i": b.i, "j": b.j, "out": out})
            })
            .collect();
        let constraints: Vec<Value> = self
            .constraints
            .iter()
            .map(|c| json!({"param": c.param, "nonzero": c.nonzero}))
            .collect();
        let doc = json!({
            "name": self.name,
            "dim": self.dim,
            "brackets": brackets,
            "params": self.params,
            "constraints": constraints,
        });
        serde_json::to_string_pretty(&doc).expect("serializing a JSON value cannot fail")
    }

    /// Substitutes parameters, validates indices and constraints, and checks Jacobi.
    pub fn instantiate(&self, bindings: &Bindings) -> Result<StructureConstants> {
        for name in bindings.keys() {
            if !self.params.iter().any(|p| p == name) {
                return Err(Error::UnknownParameter {
                    algebra: self.name.clone(),
                    name: name.clone(),
                });
            }
        }
        let mut referenced = Vec::new();
        for b in &self.brackets {
            b.out.values().for_each(|c| c.collect_params(&mut referenced));
        }
        for p in self.params.iter().map(String::as_str).chain(referenced) {
            if !bindings.contains_key(p) {
                return Err(Error::UnboundParameter(p.to_string()));
            }
        }
        for c in &self.constraints {
            let value = bindings
                .get(&c.param)
                .ok_or_else(|| Error::UnboundParameter(c.param.clone()))?;
            if c.nonzero && value.is_zero() {
                return Err(Error::ConstraintViolated {
                    param: c.param.clone(),
                    value: value.clone(),
                    constraint: format!("{} != 0", c.param),
                });
            }
        }

        let n = self.dim;
        let mut sc = StructureConstants::zero(n);
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.brackets {
            if !seen.insert((b.i, b.j)) {
                return Err(Error::Parse(format!("bracket ({}, {}) given twice", b.i, b.j)));
            }
            let mut out = vec![Rational::zero(); n];
            for (&k, expr) in &b.out {
                if !(1..=n).contains(&k) {
                    return Err(Error::IndexOutOfRange(format!(
                        "output index {k} of bracket ({}, {}) not in 1..={n}",
                        b.i, b.j
                    )));
                }
                out[k - 1] = expr.evaluate(bindings)?;
            }
            sc.set(b.i, b.j, out)?;
        }
        let violations = check_jacobi(&sc);
        if !violations.is_empty() {
            return Err(Error::Jacobi(violations));
        }
        Ok(sc)
    }
}

fn array_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a [Value]> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(&[]),
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(Error::Parse(format!("`{key}` must be an array"))),
    }
}

/// Parses an algebra document and binds its parameters.
pub fn load_algebra(source: &str, bindings: &Bindings) -> Result<StructureConstants> {
    AlgebraSpec::from_json(source)?.instantiate(bindings)
}

/// Serializes constants to the algebra document format; [`load_algebra`] inverts it.
pub fn serialize_algebra(name: &str, sc: &StructureConstants) -> String {
    AlgebraSpec::from_constants(name, sc).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{frac, int};

    const G3D2: &str = r#"{
        "name": "g3d2", "dim": 3,
        "brackets": [{"i": 1, "j": 3, "out": {"1": "1"}},
                     {"i": 2, "j": 3, "out": {"2": "alpha"}}],
        "params": ["alpha"],
        "constraints": [{"param": "alpha", "nonzero": true}]
    }"#;

    fn bind(pairs: &[(&str, Rational)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn loads_parametrised_document() {
        let sc = load_algebra(G3D2, &bind(&[("alpha", int(-1))])).unwrap();
        assert_eq!(sc.bracket(1, 3), vec![int(1), int(0), int(0)]);
        assert_eq!(sc.bracket(2, 3), vec![int(0), int(-1), int(0)]);
        assert_eq!(sc.bracket(1, 2), vec![int(0); 3]);
    }

    #[test]
    fn unbound_and_unknown_parameters() {
        assert!(matches!(
            load_algebra(G3D2, &Bindings::new()),
            Err(Error::UnboundParameter(p)) if p == "alpha"
        ));
        assert!(matches!(
            load_algebra(G3D2, &bind(&[("alpha", int(1)), ("gamma", int(2))])),
            Err(Error::UnknownParameter { .. })
        ));
        assert!(matches!(
            load_algebra(G3D2, &bind(&[("alpha", int(0))])),
            Err(Error::ConstraintViolated { .. })
        ));
    }

    #[test]
    fn coefficient_forms() {
        let doc = r#"{"name": "x", "dim": 3, "params": ["a"], "brackets": [
            {"i": 1, "j": 2, "out": {"1": "-a", "2": {"coef": "3/2", "param": "a"},
                                     "3": ["1", "a", {"coef": -2, "param": "a"}]}}]}"#;
        let spec = AlgebraSpec::from_json(doc).unwrap();
        let out = &spec.brackets[0].out;
        let b = bind(&[("a", frac(1, 3))]);
        assert_eq!(out[&1].evaluate(&b).unwrap(), frac(-1, 3));
        assert_eq!(out[&2].evaluate(&b).unwrap(), frac(1, 2));
        assert_eq!(out[&3].evaluate(&b).unwrap(), frac(2, 3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(AlgebraSpec::from_json("{"), Err(Error::Json(_))));
        assert!(AlgebraSpec::from_json(r#"{"name": "x"}"#).is_err());
        assert!(AlgebraSpec::from_json(r#"{"name": "x", "dim": 2, "brackets": [{"i": 1, "j": 2, "out": {"1": "1.5"}}]}"#).is_err());
        let bad_index = r#"{"name": "x", "dim": 2, "brackets": [{"i": 1, "j": 2, "out": {"3": "1"}}]}"#;
        assert!(load_algebra(bad_index, &Bindings::new()).is_err());
        let reversed = r#"{"name": "x", "dim": 2, "brackets": [{"i": 2, "j": 1, "out": {"1": "1"}}]}"#;
        assert!(load_algebra(reversed, &Bindings::new()).is_err());
    }

    #[test]
    fn jacobi_violation_is_reported() {
        let doc = r#"{"name": "bad", "dim": 3, "brackets": [
            {"i": 1, "j": 2, "out": {"3": "1"}}, {"i": 1, "j": 3, "out": {"1": "1"}}]}"#;
        match load_algebra(doc, &Bindings::new()) {
            Err(Error::Jacobi(v)) => {
                assert_eq!(v[0].triple, (1, 2, 3));
                assert_eq!(v[0].residual, vec![int(0), int(0), int(-1)]);
            }
            other => panic!("expected Jacobi error, got {other:?}"),
        }
    }

    #[test]
    fn serialization_round_trips() {
        let sc = load_algebra(G3D2, &bind(&[("alpha", frac(-7, 3))])).unwrap();
        let text = serialize_algebra("g3d2", &sc);
        assert_eq!(load_algebra(&text, &Bindings::new()).unwrap(), sc);
    }
}
