//! Certificate documents.
//!
//! ```json
//! {"type": "cycle", "vertices": [[0,0], [1,0], ...]}
//! {"type": "path",  "vertices": [...]}
//! {"type": "cut",   "cut": [[0,0], ...], "components": 7}
//! ```
//!
//! Vertices are coordinate arrays: group elements, or `[i, j]` for grids.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::weighted::WalkKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Certificate {
    Cycle { vertices: Vec<Vec<u64>> },
    Path { vertices: Vec<Vec<u64>> },
    Cut { cut: Vec<Vec<u64>>, components: usize },
}

impl Certificate {
    pub fn walk(kind: WalkKind, vertices: Vec<Vec<u64>>) -> Self {
        match kind {
            WalkKind::Path => Certificate::Path { vertices },
            WalkKind::Cycle => Certificate::Cycle { vertices },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Certificate::Cycle { .. } => "cycle",
            Certificate::Path { .. } => "path",
            Certificate::Cut { .. } => "cut",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Strict parse: unknown keys, missing keys and wrong types are
    /// rejected with the JSON path of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::schema("$", e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::schema("$", "expected an object"))?;
        let kind = obj
            .get("type")
            .ok_or_else(|| Error::schema("$.type", "missing"))?
            .as_str()
            .ok_or_else(|| Error::schema("$.type", "expected a string"))?;
        let allowed: &[&str] = match kind {
            "cycle" | "path" => &["type", "vertices"],
            "cut" => &["type", "cut", "components"],
            other => {
                return Err(Error::schema(
                    "$.type",
                    format!("expected \"cycle\", \"path\" or \"cut\", found {other:?}"),
                ))
            }
        };
        if let Some(extra) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::schema(format!("$.{extra}"), "unexpected key"));
        }
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| Error::schema(format!("$.{name}"), "missing"))
        };
        Ok(match kind {
            "cycle" => Certificate::Cycle {
                vertices: vertex_list(field("vertices")?, "$.vertices")?,
            },
            "path" => Certificate::Path {
                vertices: vertex_list(field("vertices")?, "$.vertices")?,
            },
            _ => Certificate::Cut {
                cut: vertex_list(field("cut")?, "$.cut")?,
                components: field("components")?
                    .as_u64()
                    .ok_or_else(|| Error::schema("$.components", "expected a nonnegative integer"))?
                    as usize,
            },
        })
    }
}

fn vertex_list(v: &Value, path: &str) -> Result<Vec<Vec<u64>>> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, item)| {
            let here = format!("{path}[{i}]");
            item.as_array()
                .ok_or_else(|| Error::schema(&here, "expected a coordinate array"))?
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    c.as_u64()
                        .ok_or_else(|| Error::schema(format!("{here}[{k}]"), "expected a nonnegative integer"))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Certificate::Cycle {
            vertices: vec![vec![0, 0], vec![1, 0]],
        };
        assert_eq!(Certificate::from_json(&c.to_json()).unwrap(), c);
        let cut = Certificate::Cut {
            cut: vec![vec![0]],
            components: 3,
        };
        assert_eq!(Certificate::from_json(&cut.to_json()).unwrap(), cut);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = |s: &str| match Certificate::from_json(s) {
            Err(Error::Schema { path, .. }) => path,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(err(r#"{"type":"cycle","vertices":[[0],[1,"x"]]}"#), "$.vertices[1][1]");
        assert_eq!(err(r#"{"type":"loop","vertices":[]}"#), "$.type");
        assert_eq!(err(r#"{"type":"cut","cut":[]}"#), "$.components");
        assert_eq!(err(r#"{"type":"path","vertices":[],"extra":1}"#), "$.extra");
        assert_eq!(err("[1,2]"), "$");
        assert_eq!(err("{"), "$");
    }
}
