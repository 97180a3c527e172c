//! Finite nets of metric graphs and flat tori.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GhError;
use crate::config::{dim_caps, NET_MAX_POINTS};
use crate::lattice_torus::reduce::{lll, unimodular_inverse, QuadForm};
use crate::lattice_torus::{FlatTorus, TorusError};
use crate::metric_graph::{EdgePoint, MetricGraph};

#[derive(Debug, Clone, PartialEq)]
enum Distances {
    Dense {
        n: usize,
        d: Vec<f64>,
    },
    /// Grid on a torus: the distance depends only on the coordinate
    /// difference modulo the grid, so one row suffices.
    Cyclic {
        counts: Vec<usize>,
        strides: Vec<usize>,
        coords: Vec<u32>,
        table: Vec<f64>,
    },
}

/// Where a net point sits in its ambient space: a cell key (a graph edge or
/// vertex, or the torus) and coordinates in `[0, 1]` within that cell.
/// Nets of spaces built on the same cells can be matched point by point.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Anchor {
    pub key: String,
    pub pos: Vec<f64>,
}

/// A finite metric space sampled from an ambient space, with the mesh: every
/// ambient point lies within `mesh` of some net point.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteNet {
    labels: Vec<String>,
    dist: Distances,
    mesh: f64,
    anchors: Vec<Anchor>,
    /// Whether anchor coordinates wrap around (torus grids).
    cyclic: bool,
}

/// Debug export: `{"points": [...], "dist": [[...]], "mesh": m}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    pub mesh: f64,
}

impl FiniteNet {
    pub fn from_dense(labels: Vec<String>, dist: Vec<Vec<f64>>, mesh: f64) -> Result<Self, GhError> {
        let n = labels.len();
        if n == 0 {
            return Err(GhError::EmptyNet);
        }
        if !(mesh >= 0.0 && mesh.is_finite()) {
            return Err(GhError::BadParameter("mesh must be finite and nonnegative"));
        }
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(GhError::BadDistances("matrix shape does not match the points"));
        }
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(GhError::BadDistances("diagonal must be zero"));
            }
            for j in 0..n {
                let v = dist[i][j];
                if !(v >= 0.0 && v.is_finite()) || v != dist[j][i] {
                    return Err(GhError::BadDistances("entries must be finite, nonnegative and symmetric"));
                }
            }
        }
        Ok(Self {
            labels,
            dist: Distances::Dense { n, d: dist.into_iter().flatten().collect() },
            mesh,
            anchors: Vec::new(),
            cyclic: false,
        })
    }

    pub fn from_json(raw: NetJson) -> Result<Self, GhError> {
        Self::from_dense(raw.points, raw.dist, raw.mesh)
    }

    pub fn point() -> Self {
        Self {
            labels: vec!["pt".into()],
            dist: Distances::Dense { n: 1, d: vec![0.0] },
            mesh: 0.0,
            anchors: Vec::new(),
            cyclic: false,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        match &self.dist {
            Distances::Dense { n, d } => d[i * n + j],
            Distances::Cyclic { counts, strides, coords, table } => {
                let k = counts.len();
                let (ci, cj) = (&coords[i * k..(i + 1) * k], &coords[j * k..(j + 1) * k]);
                let mut off = 0;
                for a in 0..k {
                    let n = counts[a];
                    let diff = (cj[a] as usize + n - ci[a] as usize) % n;
                    off += diff * strides[a];
                }
                table[off]
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.dist {
            Distances::Dense { d, .. } => d.iter().copied().fold(0.0, f64::max),
            Distances::Cyclic { table, .. } => table.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Largest violation of the triangle inequality.
    pub fn triangle_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.d(i, k) - self.d(i, j) - self.d(j, k));
                }
            }
        }
        worst
    }

    pub fn to_json(&self) -> NetJson {
        let n = self.len();
        NetJson {
            points: self.labels.clone(),
            dist: (0..n).map(|i| (0..n).map(|j| self.d(i, j)).collect()).collect(),
            mesh: self.mesh,
        }
    }

    pub(crate) fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub(crate) fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Dense copy of the distances among `idx`.
    pub(crate) fn submatrix(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter().map(|&i| idx.iter().map(|&j| self.d(i, j)).collect()).collect()
    }
}

fn check_spacing(spacing: f64) -> Result<(), GhError> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(GhError::BadParameter("spacing must be positive and finite"));
    }
    Ok(())
}

/// Vertices plus evenly spaced interior points on every edge, at most
/// `spacing` apart. Distances are exact. The spacing is widened if the net
/// would exceed [`NET_MAX_POINTS`].
pub fn net_of_graph(g: &MetricGraph, spacing: f64) -> Result<FiniteNet, GhError> {
    check_spacing(spacing)?;
    let pieces = |s: f64| -> Vec<usize> { g.lengths().iter().map(|l| (l / s).ceil().max(1.0) as usize).collect() };
    let mut s = spacing;
    let mut k = pieces(s);
    let count = |k: &[usize]| g.graph().vertex_count() + k.iter().map(|p| p - 1).sum::<usize>();
    while count(&k) > NET_MAX_POINTS {
        s *= (count(&k) as f64 / NET_MAX_POINTS as f64).max(1.05);
        k = pieces(s);
    }
    let graph = g.graph();
    let incidence = graph.incidence();
    let mut labels = Vec::new();
    let mut points = Vec::new();
    let mut anchors = Vec::new();
    for (x, id) in graph.vertex_ids().iter().enumerate() {
        let e = incidence[x][0];
        let s = if graph.edge(e).u == x { 0.0 } else { g.length(e) };
        labels.push(format!("v:{id}"));
        points.push(EdgePoint { edge: e, s });
        anchors.push(Anchor { key: format!("v:{id}"), pos: Vec::new() });
    }
    let mut mesh: f64 = 0.0;
    for (e, &pieces) in k.iter().enumerate() {
        let step = g.length(e) / pieces as f64;
        mesh = mesh.max(step / 2.0);
        let id = &graph.edge(e).id;
        for j in 1..pieces {
            labels.push(format!("e:{id}:{j}"));
            points.push(EdgePoint { edge: e, s: step * j as f64 });
            anchors.push(Anchor { key: format!("e:{id}"), pos: vec![j as f64 / pieces as f64] });
        }
    }
    let vd = g.vertex_distances();
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { g.point_distance(&vd, points[i], points[j]) }).collect())
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // symmetrize the two evaluation orders
            d[i * n + j] = rows[i][j].min(rows[j][i]);
        }
    }
    Ok(FiniteNet { labels, dist: Distances::Dense { n, d }, mesh, anchors, cyclic: false })
}

fn box_radius(g: &DMatrix<f64>, half: &[f64]) -> f64 {
    let n = half.len();
    let mut best: f64 = 0.0;
    for mask in 0..(1usize << n.saturating_sub(1)) {
        let x: Vec<f64> =
            (0..n).map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { -half[i] } else { half[i] }).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += x[i] * g[(i, j)] * x[j];
            }
        }
        best = best.max(q);
    }
    best.sqrt()
}

/// Uniform grid on `[0, 1)ⁿ` with `⌈√G_jj / spacing⌉` points along axis `j`.
/// The spacing is widened if the grid would exceed [`NET_MAX_POINTS`].
pub fn net_of_torus(t: &FlatTorus, spacing: f64) -> Result<FiniteNet, GhError> {
    check_spacing(spacing)?;
    let dim = t.dim();
    let max = dim_caps().covering;
    if dim > max {
        return Err(TorusError::TooLarge { dim, max }.into());
    }
    let gram = t.gram();
    let counts_for =
        |s: f64| -> Vec<usize> { (0..dim).map(|j| (gram[(j, j)].sqrt() / s).ceil().max(1.0) as usize).collect() };
    let mut s = spacing;
    let mut counts = counts_for(s);
    loop {
        let total: f64 = counts.iter().map(|&c| c as f64).product();
        if total <= NET_MAX_POINTS as f64 {
            break;
        }
        s *= (total / NET_MAX_POINTS as f64).powf(1.0 / dim as f64).max(1.01);
        counts = counts_for(s);
    }
    let total: usize = counts.iter().product();
    let mut strides = vec![1usize; dim];
    for a in (0..dim.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * counts[a + 1];
    }
    let mut coords = Vec::with_capacity(total * dim);
    let mut labels = Vec::with_capacity(total);
    let mut anchors = Vec::with_capacity(total);
    let key = format!("torus:{dim}");
    for idx in 0..total {
        let c: Vec<u32> = (0..dim).map(|a| ((idx / strides[a]) % counts[a]) as u32).collect();
        labels.push(format!("t:{}", c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")));
        anchors.push(Anchor { key: key.clone(), pos: (0..dim).map(|a| c[a] as f64 / counts[a] as f64).collect() });
        coords.extend_from_slice(&c);
    }
    let red = lll(gram, 0.99);
    let form = QuadForm::new(&red.gram).ok_or(TorusError::NotPositiveDefinite)?;
    let inv = unimodular_inverse(&red.basis).expect("LLL basis change is unimodular");
    let table: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let x: Vec<f64> = (0..dim).map(|a| ((idx / strides[a]) % counts[a]) as f64 / counts[a] as f64).collect();
            let y: Vec<f64> = (0..dim).map(|i| (0..dim).map(|j| inv[(i, j)] as f64 * x[j]).sum()).collect();
            form.closest(&y).0.max(0.0).sqrt()
        })
        .collect();
    let half: Vec<f64> = counts.iter().map(|&c| 0.5 / c as f64).collect();
    let mesh = box_radius(gram, &half);
    Ok(FiniteNet { labels, dist: Distances::Cyclic { counts, strides, coords, table }, mesh, anchors, cyclic: true })
}

/// Farthest-point ordering from a far point: the first `k` points of the
/// order and the largest distance from any point to them.
pub(crate) fn farthest_points(net: &FiniteNet, k: usize) -> (Vec<usize>, f64) {
    let n = net.len();
    let k = k.min(n).max(1);
    let start = (0..n).max_by(|&a, &b| net.d(0, a).total_cmp(&net.d(0, b))).unwrap_or(0);
    let mut chosen = vec![start];
    let mut near: Vec<f64> = (0..n).map(|i| net.d(start, i)).collect();
    while chosen.len() < k {
        let (far, &r) = near.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty");
        if r == 0.0 {
            break;
        }
        chosen.push(far);
        for i in 0..n {
            near[i] = near[i].min(net.d(far, i));
        }
    }
    let radius = near.iter().copied().fold(0.0, f64::max);
    (chosen, radius)
}
