use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{GraphError, MetricGraph, Multigraph};

/// Serialized graph: `{"vertices": [...], "edges": [{"id", "ends", "length"}]}`.
/// `length` may be omitted for purely combinatorial graphs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<GraphJsonEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJsonEdge {
    pub id: String,
    pub ends: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

impl GraphJson {
    pub fn to_multigraph(&self) -> Result<Multigraph, GraphError> {
        let index = |id: &str| {
            self.vertices.iter().position(|v| v == id).ok_or_else(|| GraphError::UnknownVertex(id.to_string()))
        };
        let edges = self
            .edges
            .iter()
            .map(|e| Ok((e.id.clone(), index(&e.ends[0])?, index(&e.ends[1])?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Multigraph::new(self.vertices.clone(), edges)
    }

    pub fn to_metric_graph(&self) -> Result<MetricGraph, GraphError> {
        let graph = self.to_multigraph()?;
        let lengths = self
            .edges
            .iter()
            .map(|e| e.length.ok_or_else(|| GraphError::Json(format!("edge `{}` has no length", e.id))))
            .collect::<Result<Vec<_>, _>>()?;
        MetricGraph::new(graph, lengths)
    }

    pub fn from_multigraph(g: &Multigraph, lengths: Option<&[f64]>) -> Self {
        let ids = g.vertex_ids();
        Self {
            vertices: ids.to_vec(),
            edges: g
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| GraphJsonEdge {
                    id: e.id.clone(),
                    ends: [ids[e.u].clone(), ids[e.v].clone()],
                    length: lengths.map(|l| l[i]),
                })
                .collect(),
        }
    }
}

impl MetricGraph {
    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let raw: GraphJson = serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))?;
        raw.to_metric_graph()
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson::from_multigraph(self.graph(), Some(self.lengths()))
    }

    /// Graphviz rendering with lengths as edge labels.
    pub fn to_dot(&self) -> String {
        let g = self.graph();
        let ids = g.vertex_ids();
        let mut out = String::from("graph G {\n");
        for v in ids {
            let _ = writeln!(out, "  \"{v}\";");
        }
        for (e, l) in g.edges().iter().zip(self.lengths()) {
            let _ = writeln!(out, "  \"{}\" -- \"{}\" [label=\"{}: {:.6}\"];", ids[e.u], ids[e.v], e.id, l);
        }
        out.push_str("}\n");
        out
    }
}
