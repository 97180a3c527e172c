//! Degenerations of curves modeled by pinching rates on the stable dual
//! graph: the stable (nodal) limit and the rescaled metric-graph limit.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ISO_MAX_EDGES;
use crate::lattice_torus::{FlatTorus, TorusError, TorusNormalization};
use crate::metric_graph::{GraphError, GraphJson, GraphNormalization, MetricGraph, Multigraph};
use crate::siegel_av::{PeriodPoint, SiegelError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    GenusMismatch { expected: usize, got: usize },
    UnstableVertex { vertex: String, degree: usize, weight: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GenusMismatch { expected, got } => {
                write!(f, "genus {expected} but weights plus b1 give {got}")
            }
            Violation::UnstableVertex { vertex, degree, weight } => {
                write!(f, "vertex {vertex} of degree {degree} and weight {weight} is unstable")
            }
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("unstable dual graph: {}", join(.0))]
    Unstable(Vec<Violation>),
    #[error("expected {expected} vertex weights, got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("edge {0} has no pinching rate")]
    UncoveredEdge(String),
    #[error("rate for edge {0} is invalid: need c > 0 and p >= 0")]
    BadRate(String),
    #[error("target graph is not a contraction of the dual graph")]
    NotAContraction,
    #[error("parameters must satisfy a >= 1 and k >= 1")]
    BadParameter,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Dual graph of a stable curve: components as weighted vertices, nodes as
/// edges.
#[derive(Debug, Clone, PartialEq)]
pub struct StableDualGraph {
    pub graph: Multigraph,
    pub weights: Vec<usize>,
    pub genus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StableCheck {
    /// One vertex and no edges: the curve is smooth.
    pub smooth: bool,
}

impl StableDualGraph {
    pub fn new(graph: Multigraph, weights: Vec<usize>, genus: usize) -> Result<Self, CurveError> {
        if weights.len() != graph.vertex_count() {
            return Err(CurveError::WeightCount { expected: graph.vertex_count(), got: weights.len() });
        }
        Ok(Self { graph, weights, genus })
    }

    /// Unweighted dual graph of genus `b1`.
    pub fn unweighted(graph: Multigraph) -> Self {
        let genus = graph.b1();
        let weights = vec![0; graph.vertex_count()];
        Self { graph, weights, genus }
    }

    /// Lists every violated stability condition.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let got = self.weights.iter().sum::<usize>() + self.graph.b1();
        if got != self.genus {
            out.push(Violation::GenusMismatch { expected: self.genus, got });
        }
        let degrees = self.graph.degrees();
        for (x, (&degree, &weight)) in degrees.iter().zip(&self.weights).enumerate() {
            if weight == 0 && degree < 3 {
                out.push(Violation::UnstableVertex { vertex: self.graph.vertex_ids()[x].clone(), degree, weight });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<StableCheck, CurveError> {
        let v = self.violations();
        if !v.is_empty() {
            return Err(CurveError::Unstable(v));
        }
        Ok(StableCheck { smooth: self.graph.edge_count() == 0 })
    }
}

/// Geodesic length `l(i) = c·i^{-p}` of the curve around one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub c: f64,
    pub p: f64,
}

impl Rate {
    pub fn length_at(&self, i: f64) -> f64 {
        self.c * i.powf(-self.p)
    }

    pub fn pinches(&self) -> bool {
        self.p > 0.0
    }
}

/// One rate per edge of the dual graph, in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchingSchedule {
    pub rates: Vec<Rate>,
}

impl PinchingSchedule {
    pub fn from_exponents(p: &[f64]) -> Self {
        Self { rates: p.iter().map(|&p| Rate { c: 1.0, p }).collect() }
    }

    pub fn exponents(&self) -> Vec<f64> {
        self.rates.iter().map(|r| r.p).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleJson {
    pub graph: GraphJson,
    #[serde(default)]
    pub weights: BTreeMap<String, usize>,
    pub genus: usize,
    #[serde(default)]
    pub rates: BTreeMap<String, Rate>,
}

impl ScheduleJson {
    /// Parses the dual graph and its schedule. Missing weights default to 0.
    pub fn parse(s: &str) -> Result<(StableDualGraph, PinchingSchedule), CurveError> {
        let raw: ScheduleJson = serde_json::from_str(s).map_err(|e| CurveError::Json(e.to_string()))?;
        let graph = raw.graph.to_multigraph()?;
        for v in raw.weights.keys() {
            if graph.vertex_index(v).is_none() {
                return Err(GraphError::UnknownVertex(v.clone()).into());
            }
        }
        for e in raw.rates.keys() {
            if graph.edge_index(e).is_none() {
                return Err(GraphError::UnknownEdge(e.clone()).into());
            }
        }
        let weights = graph.vertex_ids().iter().map(|v| raw.weights.get(v).copied().unwrap_or(0)).collect();
        let mut rates = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            let r = *raw.rates.get(&e.id).ok_or_else(|| CurveError::UncoveredEdge(e.id.clone()))?;
            if !(r.c > 0.0 && r.c.is_finite() && r.p >= 0.0 && r.p.is_finite()) {
                return Err(CurveError::BadRate(e.id.clone()));
            }
            rates.push(r);
        }
        Ok((StableDualGraph::new(graph, weights, raw.genus)?, PinchingSchedule { rates }))
    }
}

/// The stable limit: the dual graph with the nodes that form.
#[derive(Debug, Clone, PartialEq)]
pub struct DmLimit {
    pub dual: StableDualGraph,
    pub pinched: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GhLimit {
    Graph(MetricGraph),
    /// Nothing pinches; the limit is a smooth curve of the same genus.
    Smooth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveLimit {
    pub dm_limit: DmLimit,
    pub gh_limit: GhLimit,
}

/// Both limits of the family described by `schedule`.
///
/// Edge `j` gets length `p_j / max p`; edges that do not pinch are
/// contracted, 2-valent vertices suppressed, and the result rescaled to
/// diameter 1.
pub fn collapse_curve(g: &StableDualGraph, schedule: &PinchingSchedule) -> Result<CurveLimit, CurveError> {
    g.validate()?;
    let m = g.graph.edge_count();
    if schedule.rates.len() < m {
        return Err(CurveError::UncoveredEdge(g.graph.edge(schedule.rates.len()).id.clone()));
    }
    let pinched: Vec<usize> = (0..m).filter(|&j| schedule.rates[j].pinches()).collect();
    let dm_limit = DmLimit { dual: g.clone(), pinched: pinched.clone() };
    let max_p = schedule.rates[..m].iter().map(|r| r.p).fold(0.0, f64::max);
    if pinched.is_empty() {
        return Ok(CurveLimit { dm_limit, gh_limit: GhLimit::Smooth });
    }
    let contract: Vec<bool> = (0..m).map(|j| !schedule.rates[j].pinches()).collect();
    let c = g.graph.contract(&contract).expect("a pinched edge survives");
    let lengths = c.kept.iter().map(|&j| schedule.rates[j].p / max_p).collect();
    let metric = MetricGraph::new(c.graph, lengths)?.suppress().rescale(GraphNormalization::Diameter);
    Ok(CurveLimit { dm_limit, gh_limit: GhLimit::Graph(metric) })
}

/// A schedule whose metric limit is `target` (after diameter normalization).
///
/// Tries survivor sets in increasing bitmask order; the first whose
/// contraction suppresses to the target's graph wins. Each suppressed chain
/// splits its target length evenly.
pub fn schedule_for_target(g: &StableDualGraph, target: &MetricGraph) -> Result<PinchingSchedule, CurveError> {
    let m = g.graph.edge_count();
    if m > ISO_MAX_EDGES {
        return Err(GraphError::TooLarge { edges: m, max: ISO_MAX_EDGES }.into());
    }
    if target.graph().edge_count() > m {
        return Err(CurveError::NotAContraction);
    }
    let want_b1 = target.graph().b1();
    for mask in 1u32..(1u32 << m) {
        let contract: Vec<bool> = (0..m).map(|j| mask & (1 << j) == 0).collect();
        let Some(c) = g.graph.contract(&contract) else { continue };
        if c.graph.b1() != want_b1 {
            continue;
        }
        let s = c.graph.suppress();
        if s.graph.edge_count() != target.graph().edge_count() {
            continue;
        }
        let Some(iso) = crate::metric_graph::iso::find_isomorphism(&s.graph, target.graph(), None) else {
            continue;
        };
        let mut p = vec![0.0; m];
        for (k, chain) in s.chains.iter().enumerate() {
            let share = target.length(iso.edge_map[k]) / chain.len() as f64;
            for &i in chain {
                p[c.kept[i]] = share;
            }
        }
        return Ok(PinchingSchedule::from_exponents(&p));
    }
    Err(CurveError::NotAContraction)
}

/// Diameter-1 rescale of the flat torus of the elliptic curve `τ = i·a·k`.
pub fn elliptic_collapse(a: f64, k: u64) -> Result<FlatTorus, CurveError> {
    if !(a >= 1.0 && a.is_finite()) || k == 0 {
        return Err(CurveError::BadParameter);
    }
    let p = PeriodPoint::from_tau(0.0, a * k as f64)?;
    Ok(p.torus().rescale(TorusNormalization::Diameter)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn theta() -> StableDualGraph {
        StableDualGraph::unweighted(Multigraph::from_pairs(2, &[(0, 1), (0, 1), (0, 1)]).unwrap())
    }

    #[test]
    fn stability_examples() {
        assert!(!theta().validate().unwrap().smooth);
        let seg = StableDualGraph::new(Multigraph::from_pairs(2, &[(0, 1)]).unwrap(), vec![1, 1], 2).unwrap();
        seg.validate().unwrap();
        let point = StableDualGraph::new(Multigraph::from_pairs(1, &[]).unwrap(), vec![3], 3).unwrap();
        assert!(point.validate().unwrap().smooth);

        let bad = StableDualGraph::new(Multigraph::from_pairs(2, &[(0, 1)]).unwrap(), vec![0, 1], 2).unwrap();
        let v = bad.violations();
        assert_eq!(v.len(), 2);
        assert!(matches!(v[0], Violation::GenusMismatch { expected: 2, got: 1 }));
        assert!(matches!(&v[1], Violation::UnstableVertex { degree: 1, weight: 0, .. }));
    }

    #[test]
    fn collapse_examples() {
        let out = collapse_curve(&theta(), &PinchingSchedule::from_exponents(&[1.0, 1.0, 1.0])).unwrap();
        let GhLimit::Graph(g) = out.gh_limit else { panic!("expected a graph") };
        assert!(g.isomorphic(&MetricGraph::theta(1.0, 1.0, 1.0).unwrap(), true, 1e-12).unwrap());

        let out = collapse_curve(&theta(), &PinchingSchedule::from_exponents(&[1.0, 1.0, 0.0])).unwrap();
        assert_eq!(out.dm_limit.pinched, vec![0, 1]);
        let GhLimit::Graph(g) = out.gh_limit else { panic!("expected a graph") };
        assert!(g.isomorphic(&MetricGraph::figure_eight(1.0, 1.0).unwrap(), true, 1e-12).unwrap());

        let out = collapse_curve(&theta(), &PinchingSchedule::from_exponents(&[0.0; 3])).unwrap();
        assert_eq!(out.gh_limit, GhLimit::Smooth);
    }

    #[test]
    fn target_examples() {
        let s = schedule_for_target(&theta(), &MetricGraph::theta(1.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(s.exponents(), vec![1.0, 1.0, 1.0]);

        let dumbbell = MetricGraph::dumbbell(1.0, 1.0, 1.0).unwrap();
        let dual = StableDualGraph::unweighted(dumbbell.graph().clone());
        let target = MetricGraph::circle(2.0).unwrap();
        let s = schedule_for_target(&dual, &target).unwrap();
        assert_eq!(s.exponents().iter().filter(|&&p| p > 0.0).count(), 1);
        let out = collapse_curve(&dual, &s).unwrap();
        let GhLimit::Graph(g) = out.gh_limit else { panic!("expected a graph") };
        assert!(g.isomorphic(&target, true, 1e-12).unwrap());

        assert!(matches!(
            schedule_for_target(&theta(), &MetricGraph::segment(1.0).unwrap()),
            Err(CurveError::NotAContraction)
        ));
    }

    #[test]
    fn elliptic_examples() {
        let t = elliptic_collapse(2.0, 1).unwrap();
        let want = FlatTorus::diagonal(&[0.5, 2.0]).unwrap().rescale(TorusNormalization::Diameter).unwrap();
        assert!(t.isometric(&want, 1e-8).unwrap());
        let d = t.diameter(1e-9).unwrap();
        assert_abs_diff_eq!(d.mid(), 1.0, epsilon = 1e-8);
        assert!(elliptic_collapse(0.5, 1).is_err());
    }

    #[test]
    fn schedule_json() {
        let s = r#"{"graph":{"vertices":["a","b"],"edges":[
            {"id":"e1","ends":["a","b"]},{"id":"e2","ends":["a","b"]},{"id":"e3","ends":["a","b"]}]},
            "genus":2,"rates":{"e1":{"c":1,"p":1},"e2":{"c":2,"p":1},"e3":{"c":1,"p":0}}}"#;
        let (g, sched) = ScheduleJson::parse(s).unwrap();
        assert_eq!(g.weights, vec![0, 0]);
        assert_eq!(sched.exponents(), vec![1.0, 1.0, 0.0]);
        let missing = s.replace(r#","e3":{"c":1,"p":0}"#, "");
        assert!(matches!(ScheduleJson::parse(&missing), Err(CurveError::UncoveredEdge(e)) if e == "e3"));
    }
}
