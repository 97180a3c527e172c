//! Lower bounds for the Gromov–Hausdorff distance.
//!
//! Packing argument: if `d_GH(A, B) < t`, a correspondence of distortion
//! below `2t` sends a `δ`-separated set of `A` injectively to a set of `B`
//! whose points are more than `δ - 2t` apart, and a cluster of `B` of
//! diameter at most `δ - 2t` holds at most one of them. So a separated set
//! in `A` larger than some cluster cover of `B` at scale `δ - 2t` proves
//! `d_GH ≥ t`. Both the separated sets and the covers are greedy; any
//! genuine instance yields a valid bound.

use super::net::{farthest_points, FiniteNet};
use crate::config::PACKING_MAX_POINTS;

const DELTA_SAMPLES: usize = 128;
const SCALE_SAMPLES: usize = 256;

struct Sample {
    d: Vec<Vec<f64>>,
    orders: Vec<Vec<usize>>,
}

impl Sample {
    fn new(net: &FiniteNet) -> (Self, f64) {
        let (idx, radius) = farthest_points(net, PACKING_MAX_POINTS);
        let d = net.submatrix(&idx);
        let k = idx.len();
        // farthest-point order is the sample order itself; the original
        // index order follows the geometry of graph nets
        let mut by_index: Vec<usize> = (0..k).collect();
        by_index.sort_by_key(|&i| idx[i]);
        let orders = vec![(0..k).collect(), by_index];
        (Self { d, orders }, radius)
    }

    /// Size of a large set with pairwise distances `≥ delta`.
    fn packing(&self, delta: f64) -> usize {
        self.orders
            .iter()
            .map(|order| {
                let mut set: Vec<usize> = Vec::new();
                for &i in order {
                    if set.iter().all(|&j| self.d[i][j] >= delta) {
                        set.push(i);
                    }
                }
                set.len()
            })
            .max()
            .unwrap_or(0)
    }

    /// Number of clusters of diameter `≤ scale` covering every point.
    fn cover(&self, scale: f64) -> usize {
        self.orders
            .iter()
            .map(|order| {
                let mut clusters: Vec<Vec<usize>> = Vec::new();
                for &i in order {
                    match clusters.iter_mut().find(|c| c.iter().all(|&j| self.d[i][j] <= scale)) {
                        Some(c) => c.push(i),
                        None => clusters.push(vec![i]),
                    }
                }
                clusters.len()
            })
            .min()
            .unwrap_or(0)
    }

    fn distances(&self, samples: usize) -> Vec<f64> {
        let mut all: Vec<f64> = Vec::new();
        for (i, row) in self.d.iter().enumerate() {
            all.extend_from_slice(&row[i + 1..]);
        }
        all.push(0.0);
        all.sort_by(f64::total_cmp);
        all.dedup();
        if all.len() <= samples {
            return all;
        }
        let last = all.len() - 1;
        let mut picks: Vec<f64> = (0..samples).map(|k| all[k * last / (samples - 1)]).collect();
        picks.dedup();
        picks
    }
}

fn one_way(a: &Sample, b: &Sample) -> f64 {
    let scales = b.distances(SCALE_SAMPLES);
    let covers: Vec<usize> = scales.iter().map(|&s| b.cover(s)).collect();
    let mut best: f64 = 0.0;
    for delta in a.distances(DELTA_SAMPLES) {
        if delta <= 2.0 * best {
            continue;
        }
        let n = a.packing(delta);
        if let Some(k) = covers.iter().position(|&c| c < n) {
            best = best.max((delta - scales[k]) / 2.0);
        }
    }
    best
}

/// Packing bound for the nets themselves. Both nets are first reduced to
/// farthest-point samples; the sampling radii are subtracted.
pub(crate) fn packing_bound(a: &FiniteNet, b: &FiniteNet) -> f64 {
    let (sa, ra) = Sample::new(a);
    let (sb, rb) = Sample::new(b);
    let t = one_way(&sa, &sb).max(one_way(&sb, &sa));
    (t - ra - rb).max(0.0)
}

/// Lower bound for the ambient spaces behind two nets.
pub fn gh_lower(a: &FiniteNet, b: &FiniteNet) -> f64 {
    let diam = 0.5 * (a.diameter() - b.diameter()).abs();
    let net = diam.max(packing_bound(a, b));
    (net - a.mesh() - b.mesh()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gh_metric::net::net_of_graph;
    use crate::metric_graph::MetricGraph;

    #[test]
    fn circle_segment_packing() {
        let c = net_of_graph(&MetricGraph::circle(2.0).unwrap(), 0.05).unwrap();
        let s = net_of_graph(&MetricGraph::segment(1.0).unwrap(), 0.05).unwrap();
        let lb = gh_lower(&c, &s);
        assert!(lb >= 1.0 / 12.0 - c.mesh() - s.mesh(), "lb = {lb}");
        assert_eq!(lb, gh_lower(&s, &c));
    }

    #[test]
    fn identical_nets() {
        let c = net_of_graph(&MetricGraph::theta(1.0, 1.0, 1.0).unwrap(), 0.1).unwrap();
        assert_eq!(gh_lower(&c, &c), 0.0);
        assert_eq!(packing_bound(&c, &c), 0.0);
    }

    #[test]
    fn point_bound() {
        let s = net_of_graph(&MetricGraph::segment(1.0).unwrap(), 0.05).unwrap();
        let lb = gh_lower(&FiniteNet::point(), &s);
        assert!(lb >= 0.5 - s.mesh() - 1e-12);
    }
}
