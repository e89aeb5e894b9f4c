//! JSON rendering of simplified trees:
//! `{"operator": CODE, "children": [...]}` for aggregators and
//! `{"feature": NAME, "weight": W}` for leaves. Weights are rounded to two
//! decimals; non-root operators also carry their `"weight"`.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::logic::AndnessCode;
use crate::scalar::Scalar;

use super::SimplifiedTree;

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

impl<T: Scalar> SimplifiedTree<T> {
    pub fn to_json_value(&self) -> Value {
        self.value(true)
    }

    fn value(&self, root: bool) -> Value {
        let mut obj = Map::new();
        match self {
            SimplifiedTree::Leaf { feature, weight } => {
                obj.insert("feature".into(), Value::from(feature.as_str()));
                obj.insert("weight".into(), Value::from(round2(weight.to_f64_lossy())));
            }
            SimplifiedTree::Operator { code, weight, children, .. } => {
                obj.insert("operator".into(), Value::from(code.symbol()));
                if !root {
                    obj.insert("weight".into(), Value::from(round2(weight.to_f64_lossy())));
                }
                obj.insert("children".into(), Value::Array(children.iter().map(|c| c.value(false)).collect()));
            }
        }
        Value::Object(obj)
    }

    /// Pretty-printed JSON document with four-space indentation.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let fmt = serde_json::ser::PrettyFormatter::with_indent(b"    ");
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        serde::Serialize::serialize(&self.to_json_value(), &mut ser).expect("serializing a Value cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// Parses the JSON form back. Operator andness is restored as the code's
    /// representative value, so only structure, codes and rounded weights
    /// survive a round trip.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        Self::from_value(&v, true)
    }

    fn from_value(v: &Value, root: bool) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("tree node must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "operator" | "children" | "feature" | "weight") {
                return Err(Error::Parse(format!("unexpected key `{key}` in tree node")));
            }
        }
        let weight = match obj.get("weight") {
            Some(w) => T::of(w.as_f64().ok_or_else(|| Error::Parse("weight must be a number".into()))?),
            None if root => T::one(),
            None if obj.contains_key("operator") => T::one(),
            None => return Err(Error::Parse("leaf is missing `weight`".into())),
        };
        match (obj.get("feature"), obj.get("operator")) {
            (Some(f), None) => {
                let feature = f.as_str().ok_or_else(|| Error::Parse("feature must be a string".into()))?;
                Ok(SimplifiedTree::Leaf { feature: feature.to_string(), weight })
            }
            (None, Some(op)) => {
                let code: AndnessCode =
                    op.as_str().ok_or_else(|| Error::Parse("operator must be a string".into()))?.parse()?;
                let children = obj
                    .get("children")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("operator node needs a `children` array".into()))?
                    .iter()
                    .map(|c| Self::from_value(c, false))
                    .collect::<Result<Vec<_>>>()?;
                if children.len() < 2 {
                    return Err(Error::Parse("operator node needs at least two children".into()));
                }
                Ok(SimplifiedTree::Operator {
                    code,
                    andness: T::of(code.anchor().representative()),
                    weight,
                    children,
                })
            }
            _ => Err(Error::Parse("tree node needs exactly one of `feature` or `operator`".into())),
        }
    }
}
