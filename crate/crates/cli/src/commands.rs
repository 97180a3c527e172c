//! Subcommand implementations. Each returns the full text to emit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use tropi_core::curve_collapse::{collapse_curve, GhLimit, ScheduleJson};
use tropi_core::gh_metric::{gh_interval, Space};
use tropi_core::graph_moduli::{cell_complex, census};
use tropi_core::homotopy_joins::{phi, psi};
use tropi_core::lattice_torus::TorusNormalization;
use tropi_core::metric_graph::GraphJson;
use tropi_core::siegel_av::{semi_reduce, PeriodPoint, SiegelFamily};
use tropi_core::tropical_jacobian::{jacobian, noninjectivity_witness, torelli};
use tropi_core::{FlatTorus, MetricGraph};

use crate::{input, Command, Format, GhArgs, Rescale};

/// Serializes through `Value`, whose maps keep keys sorted.
fn emit<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v)?;
    Ok(format!("{}\n", serde_json::to_string(&value)?))
}

fn torus_value(t: &FlatTorus) -> Value {
    serde_json::to_value(t.to_json()).expect("plain data")
}

fn graph_value(g: &MetricGraph) -> Value {
    serde_json::to_value(g.to_json()).expect("plain data")
}

pub fn run(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Census { genus, format } => run_census(*genus, *format),
        Command::Homology { genus, max_degree } => {
            let complex = cell_complex(*genus)?;
            let top = complex.max_dim();
            let max_degree = max_degree.unwrap_or(top);
            let mut cells = vec![0usize; top + 1];
            for c in &complex.cells {
                cells[c.dim] += 1;
            }
            emit(&json!({
                "genus": genus,
                "betti": complex.betti(max_degree),
                "cells_by_dim": cells,
                "boundary_squared_zero": complex.boundary_squared_is_zero(),
            }))
        }
        Command::CollapseCurve { input, format } => {
            let text = input::read(input)?;
            let (dual, schedule) =
                ScheduleJson::parse(&text).with_context(|| format!("invalid schedule in {}", input.display()))?;
            let out = collapse_curve(&dual, &schedule)?;
            if *format == Format::Dot {
                let GhLimit::Graph(g) = &out.gh_limit else {
                    bail!("nothing pinches: the limit is a smooth curve, not a graph");
                };
                return Ok(g.to_dot());
            }
            let graph = &out.dm_limit.dual.graph;
            let weights: BTreeMap<&str, usize> =
                graph.vertex_ids().iter().map(String::as_str).zip(out.dm_limit.dual.weights.iter().copied()).collect();
            let pinched: Vec<&str> = out.dm_limit.pinched.iter().map(|&e| graph.edge(e).id.as_str()).collect();
            let gh = match &out.gh_limit {
                GhLimit::Graph(g) => graph_value(g),
                GhLimit::Smooth => json!({ "kind": "smooth" }),
            };
            emit(&json!({
                "dm_limit": {
                    "genus": out.dm_limit.dual.genus,
                    "graph": GraphJson::from_multigraph(graph, None),
                    "weights": weights,
                    "pinched": pinched,
                },
                "gh_limit": gh,
            }))
        }
        Command::CollapseAv { input, rescale } => {
            let family = family(input)?;
            match rescale {
                Rescale::Diameter => emit(&torus_value(&family.diameter_fixed_limit()?.limit)),
                Rescale::Volume => {
                    let v = family.volume_fixed_limit()?;
                    emit(&json!({
                        "r": v.r,
                        "flat_dim": v.flat_dim,
                        "torus_factor": v.torus_factor.as_ref().map(torus_value),
                    }))
                }
                Rescale::Injrad => {
                    let l = family.injrad_fixed_limit()?;
                    emit(&json!({ "r": l.r, "flat_dim": l.flat_dim, "circle_radii": l.circle_radii }))
                }
            }
        }
        Command::Jacobian { input } => emit(&torus_value(&jacobian(&input::graph(input)?)?)),
        Command::Torelli { input, witness } => {
            if *witness {
                let w = noninjectivity_witness();
                return emit(&json!({
                    "first": graph_value(&w.first),
                    "second": graph_value(&w.second),
                    "image": torus_value(&w.image),
                }));
            }
            let path = input.as_ref().expect("clap requires --input without --witness");
            emit(&torus_value(&torelli(&input::graph(path)?)?))
        }
        Command::Ghdist { a, b, gh } => {
            let (sa, sb) = (input::space(a)?, input::space(b)?);
            let iv = interval(&sa, &sb, gh)?;
            emit(&iv)
        }
        Command::Reduce { input, u, max_iter } => {
            let text = input::read(input)?;
            let z = PeriodPoint::from_json_str(&text)
                .with_context(|| format!("invalid period point in {}", input.display()))?;
            let r = semi_reduce(&z, *u, *max_iter)?;
            let gamma: Vec<Vec<i64>> = (0..r.gamma.nrows()).map(|i| r.gamma.row(i).iter().copied().collect()).collect();
            let p = r.point.to_json();
            emit(&json!({
                "X": p.x,
                "Y": p.y,
                "gamma": gamma,
                "certified": r.certified,
                "iterations": r.iterations,
            }))
        }
        Command::Homotopy { input, t, format } => match input::space(input)? {
            Space::Graph(g) => {
                let out = phi(&g, *t)?;
                if *format == Format::Dot {
                    Ok(out.to_dot())
                } else {
                    emit(&graph_value(&out))
                }
            }
            Space::Torus(x) => emit(&torus_value(&psi(&x, *t)?)),
            Space::Point(_) => bail!("the point is not a boundary point of either join"),
        },
        Command::PlotConvergence { input, i, gh } => {
            let family = family(input)?;
            let limit = Space::Torus(family.diameter_fixed_limit()?.limit);
            let mut indices = i.clone();
            if indices.iter().any(|&x| !(x.is_finite() && x >= 1.0)) {
                bail!("member indices must be at least 1");
            }
            indices.sort_by(f64::total_cmp);
            indices.dedup();
            let mut out = String::from("i,lb,ub\n");
            for idx in indices {
                let member = family.member(idx).torus().rescale(TorusNormalization::Diameter)?;
                let iv = interval(&Space::Torus(member), &limit, gh)?;
                writeln!(out, "{idx},{},{}", iv.lb, iv.ub)?;
            }
            Ok(out)
        }
    }
}

fn family(path: &std::path::Path) -> Result<SiegelFamily> {
    let text = input::read(path)?;
    SiegelFamily::from_json_str(&text).with_context(|| format!("invalid family in {}", path.display()))
}

fn interval(a: &Space, b: &Space, gh: &GhArgs) -> Result<tropi_core::GhInterval> {
    if !(gh.mesh > 0.0 && gh.mesh.is_finite()) {
        bail!("--mesh must be positive");
    }
    if gh.budget == 0 {
        bail!("--budget must be positive");
    }
    Ok(gh_interval(a, b, gh.mesh, gh.budget, gh.seed)?)
}

fn run_census(genus: usize, format: Format) -> Result<String> {
    let types = census(genus)?;
    match format {
        Format::Table => {
            let width = types.iter().map(|t| t.name.len()).max().unwrap_or(0);
            let mut out = String::new();
            for t in &types {
                writeln!(
                    out,
                    "{:<width$}  {:>2}  {:>2}  {:>2}  {:>2}  {:>2}",
                    t.name,
                    t.vertex_count(),
                    t.edge_count(),
                    t.dim(),
                    t.v1,
                    t.b1
                )?;
            }
            Ok(out)
        }
        Format::Json => {
            let list: Vec<Value> = types
                .iter()
                .map(|t| {
                    json!({
                        "name": t.name,
                        "graph": GraphJson::from_multigraph(&t.graph, None),
                        "vertices": t.vertex_count(),
                        "edges": t.edge_count(),
                        "dim": t.dim(),
                        "v1": t.v1,
                        "b1": t.b1,
                    })
                })
                .collect();
            emit(&json!({ "genus": genus, "count": types.len(), "types": list }))
        }
        Format::Dot | Format::Csv => bail!("census supports --format json or table"),
    }
}
