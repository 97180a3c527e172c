//! Reading input files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;
use tropi_core::gh_metric::Space;
use tropi_core::{FlatTorus, MetricGraph, PointSpace};

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// A graph (`vertices`/`edges`), a torus (`gram`), or the point
/// (`{"kind": "point"}`).
pub fn space(path: &Path) -> Result<Space> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("{} is not JSON", path.display()))?;
    let ctx = || format!("invalid space in {}", path.display());
    if value.get("gram").is_some() {
        return Ok(Space::Torus(FlatTorus::from_json_str(&text).with_context(ctx)?));
    }
    if value.get("edges").is_some() {
        return Ok(Space::Graph(MetricGraph::from_json_str(&text).with_context(ctx)?));
    }
    if value.get("kind").and_then(Value::as_str) == Some("point") {
        return Ok(Space::Point(PointSpace));
    }
    bail!("{} is neither a graph, a torus nor a point", path.display())
}

pub fn graph(path: &Path) -> Result<MetricGraph> {
    let text = read(path)?;
    MetricGraph::from_json_str(&text).with_context(|| format!("invalid graph in {}", path.display()))
}
