//! Text format for graphs:
//!
//! ```json
//! {"nodes": [[0.1, 0.2], [0.3, 0.4]],
//!  "edges": [{"s": 0, "r": 1, "v": [1, 0, 0, 0.2, 0, 0, 0]},
//!            {"s": 1, "r": 0, "v": [0, 0, 0, 0.2, 0, 0, 0]}]}
//! ```
//!
//! `edges` is empty for node-only graphs. Floats are written in shortest
//! round-trip form, so a write/read cycle is exact.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ObjectGraph, RelationVector, NUM_RELATIONS};

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    s: usize,
    r: usize,
    v: [f64; NUM_RELATIONS],
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    nodes: Vec<Vec<f64>>,
    #[serde(default)]
    edges: Vec<EdgeRepr>,
}

impl Serialize for ObjectGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            nodes: self.nodes.clone(),
            edges: self
                .edges()
                .map(|((s, r), v)| EdgeRepr { s, r, v: *v.values() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ObjectGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        let graph = if repr.edges.is_empty() {
            ObjectGraph::nodes_only(repr.nodes)
        } else {
            let edges = repr
                .edges
                .into_iter()
                .map(|e| RelationVector::new(e.v).map(|v| ((e.s, e.r), v)))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(serde::de::Error::custom)?;
            ObjectGraph::new(repr.nodes, edges)
        };
        graph.map_err(serde::de::Error::custom)
    }
}
