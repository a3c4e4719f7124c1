//! Construction traces: a base `P3` followed by operation records.
//!
//! Text form, one record per line (`;` is accepted as a separator too):
//!
//! ```text
//! BASE_P3
//! O1 1
//! O3 1 2 1
//! O4 3 2,2
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Vertex;

/// One operation applied to the current tree. Vertex arguments refer to the
/// labels of the tree the operation is applied to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum Operation {
    /// Attach a leaf at a support vertex.
    O1 { support: Vertex },
    /// Attach a `P3` by its center at a support vertex.
    O2 { support: Vertex },
    /// Attach `k` disjoint edges, each by one end, at the leaf `leaf_v` of
    /// the support vertex `support_w`.
    O3 {
        support_w: Vertex,
        leaf_v: Vertex,
        k: usize,
    },
    /// Attach subdivided stars `SS_{k_i}` by their centers at `w`.
    O4 { w: Vertex, star_sizes: Vec<usize> },
}

impl Operation {
    /// Number of vertices the operation adds.
    pub fn added_vertices(&self) -> usize {
        match self {
            Operation::O1 { .. } => 1,
            Operation::O2 { .. } => 3,
            Operation::O3 { k, .. } => 2 * k,
            Operation::O4 { star_sizes, .. } => star_sizes.iter().map(|k| 2 * k + 1).sum(),
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::O1 { support } => write!(f, "O1 {support}"),
            Operation::O2 { support } => write!(f, "O2 {support}"),
            Operation::O3 {
                support_w,
                leaf_v,
                k,
            } => write!(f, "O3 {support_w} {leaf_v} {k}"),
            Operation::O4 { w, star_sizes } => {
                let sizes: Vec<String> = star_sizes.iter().map(usize::to_string).collect();
                write!(f, "O4 {w} {}", sizes.join(","))
            }
        }
    }
}

/// Base marker of every trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Base {
    #[default]
    P3,
}

/// Replayable certificate of membership in the family: start from `P3`
/// labeled `0-1-2`, then apply `steps` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub base: Base,
    pub steps: Vec<Operation>,
}

impl ConstructionTrace {
    pub fn new(steps: Vec<Operation>) -> Self {
        ConstructionTrace {
            base: Base::P3,
            steps,
        }
    }

    /// Records joined by `"; "` on one line.
    pub fn to_inline(&self) -> String {
        self.lines().collect::<Vec<_>>().join("; ")
    }

    fn lines(&self) -> impl Iterator<Item = String> + '_ {
        std::iter::once("BASE_P3".to_string()).chain(self.steps.iter().map(|s| s.to_string()))
    }
}

impl fmt::Display for ConstructionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace record {record}: {message}")]
pub struct TraceParseError {
    pub record: usize,
    pub message: String,
}

impl FromStr for ConstructionTrace {
    type Err = TraceParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let records = s
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|r| !r.is_empty() && !r.starts_with('#'));
        let mut steps = Vec::new();
        let mut saw_base = false;
        for (idx, record) in records.enumerate() {
            let err = |message: String| TraceParseError {
                record: idx,
                message,
            };
            if idx == 0 {
                if record != "BASE_P3" {
                    return Err(err(format!("expected BASE_P3, got `{record}`")));
                }
                saw_base = true;
                continue;
            }
            let tokens: Vec<&str> = record.split_whitespace().collect();
            let num = |t: &str| {
                t.parse::<usize>()
                    .map_err(|_| err(format!("invalid number `{t}`")))
            };
            let arity = |want: usize| {
                if tokens.len() == want + 1 {
                    Ok(())
                } else {
                    Err(err(format!("`{}` takes {want} arguments", tokens[0])))
                }
            };
            let op = match tokens[0] {
                "O1" => {
                    arity(1)?;
                    Operation::O1 {
                        support: num(tokens[1])?,
                    }
                }
                "O2" => {
                    arity(1)?;
                    Operation::O2 {
                        support: num(tokens[1])?,
                    }
                }
                "O3" => {
                    arity(3)?;
                    Operation::O3 {
                        support_w: num(tokens[1])?,
                        leaf_v: num(tokens[2])?,
                        k: num(tokens[3])?,
                    }
                }
                "O4" => {
                    arity(2)?;
                    let star_sizes = tokens[2]
                        .split(',')
                        .map(|t| num(t.trim()))
                        .collect::<Result<_, _>>()?;
                    Operation::O4 {
                        w: num(tokens[1])?,
                        star_sizes,
                    }
                }
                other => return Err(err(format!("unknown record `{other}`"))),
            };
            steps.push(op);
        }
        if !saw_base {
            return Err(TraceParseError {
                record: 0,
                message: "empty trace".into(),
            });
        }
        Ok(ConstructionTrace::new(steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_forms() {
        let trace = ConstructionTrace::new(vec![
            Operation::O1 { support: 1 },
            Operation::O3 {
                support_w: 1,
                leaf_v: 2,
                k: 1,
            },
            Operation::O4 {
                w: 3,
                star_sizes: vec![2, 3],
            },
        ]);
        assert_eq!(trace.to_string(), "BASE_P3\nO1 1\nO3 1 2 1\nO4 3 2,3\n");
        assert_eq!(trace.to_inline(), "BASE_P3; O1 1; O3 1 2 1; O4 3 2,3");
        assert_eq!(
            trace.to_inline().parse::<ConstructionTrace>().unwrap(),
            trace
        );
        assert_eq!(
            "BASE_P3".parse::<ConstructionTrace>().unwrap(),
            ConstructionTrace::default()
        );
    }

    #[test]
    fn rejects_bad_records() {
        assert!("O1 1".parse::<ConstructionTrace>().is_err());
        assert!("".parse::<ConstructionTrace>().is_err());
        assert!("BASE_P3; O5 1".parse::<ConstructionTrace>().is_err());
        assert!("BASE_P3; O3 1 2".parse::<ConstructionTrace>().is_err());
        assert!("BASE_P3; O1 x".parse::<ConstructionTrace>().is_err());
    }

    #[test]
    fn json_form() {
        let trace = ConstructionTrace::new(vec![Operation::O2 { support: 1 }]);
        let json = serde_json::to_string(&trace).unwrap();
        assert_eq!(json, r#"{"base":"P3","steps":[{"op":"O2","support":1}]}"#);
        assert_eq!(
            serde_json::from_str::<ConstructionTrace>(&json).unwrap(),
            trace
        );
    }

    fn operation() -> impl Strategy<Value = Operation> {
        prop_oneof![
            (0usize..50).prop_map(|support| Operation::O1 { support }),
            (0usize..50).prop_map(|support| Operation::O2 { support }),
            (0usize..50, 0usize..50, 1usize..5).prop_map(|(support_w, leaf_v, k)| Operation::O3 {
                support_w,
                leaf_v,
                k
            }),
            (0usize..50, prop::collection::vec(2usize..5, 1..4))
                .prop_map(|(w, star_sizes)| Operation::O4 { w, star_sizes }),
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip(steps in prop::collection::vec(operation(), 0..8)) {
            let trace = ConstructionTrace::new(steps);
            prop_assert_eq!(trace.to_string().parse::<ConstructionTrace>().unwrap(), trace.clone());
            prop_assert_eq!(trace.to_inline().parse::<ConstructionTrace>().unwrap(), trace);
        }
    }
}
