//! Upper bounds for the Gromov–Hausdorff distance by correspondence search.
//!
//! A correspondence is stored as a map `A → B` together with a map `B → A`;
//! its distortion is the largest `|d_A(a, a') - d_B(b, b')|` over all pairs.
//! Searches start from landmark matchings (and, for nets built on the same
//! cells, from the anchor matching) and improve the worst pair by
//! single-point reassignments.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::net::{farthest_points, Anchor, FiniteNet};

const LANDMARKS: usize = 8;
const CANDIDATES: usize = 6;
const MAX_FAILURES: usize = 40;
const MAX_RESTARTS: usize = 8;

struct Search<'a> {
    a: &'a FiniteNet,
    b: &'a FiniteNet,
    /// Pairs `(a, b)`: the first `|A|` have fixed `a = index`, the rest have
    /// fixed `b = index - |A|`.
    pa: Vec<usize>,
    pb: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(a: &'a FiniteNet, b: &'a FiniteNet, f: Vec<usize>, g: Vec<usize>) -> Self {
        let (na, nb) = (a.len(), b.len());
        let mut pa: Vec<usize> = (0..na).collect();
        pa.extend(g);
        let mut pb = f;
        pb.extend(0..nb);
        Self { a, b, pa, pb }
    }

    fn len(&self) -> usize {
        self.pa.len()
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        (self.a.d(self.pa[i], self.pa[j]) - self.b.d(self.pb[i], self.pb[j])).abs()
    }

    /// Row maximum for pair `i` replaced by `(x, y)`; stops early once it
    /// reaches `cap`.
    fn row_with(&self, i: usize, x: usize, y: usize, cap: f64) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.len() {
            if j == i {
                continue;
            }
            let v = (self.a.d(x, self.pa[j]) - self.b.d(y, self.pb[j])).abs();
            if v > m {
                m = v;
                if m >= cap {
                    return m;
                }
            }
        }
        m
    }

    fn row(&self, i: usize) -> f64 {
        self.row_with(i, self.pa[i], self.pb[i], f64::INFINITY)
    }

    fn distortion(&self) -> f64 {
        let n = self.len();
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                m = m.max(self.entry(i, j));
            }
        }
        m
    }

    /// Improves the worst pairs until `iterations` moves are spent or no
    /// move helps repeatedly. Returns the exact final distortion.
    fn improve(&mut self, iterations: usize, rng: &mut ChaCha8Rng) -> f64 {
        let n = self.len();
        let na = self.a.len();
        if self.a.len() == 1 || self.b.len() == 1 {
            return self.distortion();
        }
        // row maxima, kept as upper bounds between exact refreshes
        let mut rows: Vec<f64> = (0..n).map(|i| self.row(i)).collect();
        let mut stale = vec![false; n];
        let mut failures = 0;
        for _ in 0..iterations {
            let (i, &worst) = rows.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty");
            if stale[i] {
                rows[i] = self.row(i);
                stale[i] = false;
                continue;
            }
            let fixed_a = i < na;
            let mut best: Option<(usize, f64)> = None;
            for _ in 0..CANDIDATES {
                let c = if fixed_a { rng.random_range(0..self.b.len()) } else { rng.random_range(0..na) };
                let (x, y) = if fixed_a { (self.pa[i], c) } else { (c, self.pb[i]) };
                let cap = best.map_or(worst, |b| b.1);
                let v = self.row_with(i, x, y, cap);
                if v < cap {
                    best = Some((c, v));
                }
            }
            let Some((c, v)) = best else {
                failures += 1;
                if failures >= MAX_FAILURES {
                    break;
                }
                // give the partner of the worst entry a turn next time
                let partner = (0..n)
                    .filter(|&j| j != i)
                    .max_by(|&x, &y| self.entry(i, x).total_cmp(&self.entry(i, y)))
                    .expect("at least two pairs");
                rows[i] = worst * (1.0 - 1e-12);
                rows[partner] = rows[partner].max(worst);
                continue;
            };
            failures = 0;
            if fixed_a {
                self.pb[i] = c;
            } else {
                self.pa[i] = c;
            }
            rows[i] = v;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let e = self.entry(i, j);
                if e > rows[j] {
                    rows[j] = e;
                } else {
                    stale[j] = true;
                }
            }
        }
        self.distortion()
    }
}

/// Landmark matching: `k` farthest points of `A` are matched one by one to
/// points of `B` with the most consistent distances, starting from `a0 ↦ b0`;
/// every other point then goes to its most consistent partner.
fn landmark_seed(a: &FiniteNet, b: &FiniteNet, a_marks: &[usize], b0: usize) -> (Vec<usize>, Vec<usize>) {
    let mut b_marks = vec![b0];
    for &am in &a_marks[1..] {
        let k = b_marks.len();
        let best = (0..b.len())
            .min_by(|&x, &y| {
                let cost =
                    |z: usize| (0..k).map(|j| (a.d(am, a_marks[j]) - b.d(z, b_marks[j])).abs()).fold(0.0, f64::max);
                cost(x).total_cmp(&cost(y))
            })
            .expect("nonempty");
        b_marks.push(best);
    }
    let k = a_marks.len();
    let pa: Vec<Vec<f64>> = (0..a.len()).map(|x| a_marks.iter().map(|&m| a.d(x, m)).collect()).collect();
    let pb: Vec<Vec<f64>> = (0..b.len()).map(|y| b_marks.iter().map(|&m| b.d(y, m)).collect()).collect();
    let cost = |x: usize, y: usize| (0..k).map(|j| (pa[x][j] - pb[y][j]).abs()).fold(0.0, f64::max);
    let f = (0..a.len())
        .map(|x| (0..b.len()).min_by(|&y, &z| cost(x, y).total_cmp(&cost(x, z))).expect("nonempty"))
        .collect();
    let g = (0..b.len())
        .map(|y| (0..a.len()).min_by(|&x, &z| cost(x, y).total_cmp(&cost(z, y))).expect("nonempty"))
        .collect();
    (f, g)
}

fn group(anchors: &[Anchor]) -> HashMap<&str, Vec<usize>> {
    let mut m: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, x) in anchors.iter().enumerate() {
        m.entry(x.key.as_str()).or_default().push(i);
    }
    m
}

/// Matches points with the same anchor key by nearest position, for nets of
/// spaces built on the same cells (a graph and a reparametrization of it,
/// two tori of one dimension). Points without a partner keep `fallback`.
/// `None` when the nets carry no anchors in common.
fn anchor_seed(a: &FiniteNet, b: &FiniteNet, fallback: (Vec<usize>, Vec<usize>)) -> Option<(Vec<usize>, Vec<usize>)> {
    let (aa, ab) = (a.anchors(), b.anchors());
    if aa.is_empty() || ab.is_empty() || a.is_cyclic() != b.is_cyclic() {
        return None;
    }
    let cyclic = a.is_cyclic();
    let gap = |p: &[f64], q: &[f64]| {
        p.iter()
            .zip(q)
            .map(|(x, y)| {
                let d = (x - y).abs();
                if cyclic {
                    d.min(1.0 - d)
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    };
    let (ga, gb) = (group(aa), group(ab));
    if !ga.keys().any(|k| gb.contains_key(k)) {
        return None;
    }
    let matched =
        |from: &[Anchor], to: &[Anchor], groups: &HashMap<&str, Vec<usize>>, base: Vec<usize>| -> Vec<usize> {
            base.into_iter()
                .enumerate()
                .map(|(i, fb)| match groups.get(from[i].key.as_str()) {
                    Some(cands) => *cands
                        .iter()
                        .min_by(|&&x, &&y| gap(&from[i].pos, &to[x].pos).total_cmp(&gap(&from[i].pos, &to[y].pos)))
                        .expect("groups are nonempty"),
                    None => fb,
                })
                .collect()
        };
    let (f0, g0) = fallback;
    Some((matched(aa, ab, &gb, f0), matched(ab, aa, &ga, g0)))
}

/// Half the best distortion found, plus both meshes: an upper bound for the
/// ambient spaces. Deterministic for a given `seed`.
pub fn gh_upper(a: &FiniteNet, b: &FiniteNet, budget: usize, seed: u64) -> f64 {
    let budget = budget.max(1);
    let restarts = (budget / 100).clamp(1, MAX_RESTARTS);
    let per = (budget / restarts).max(1);
    let (a_marks, _) = farthest_points(a, LANDMARKS);
    let (b_far, _) = farthest_points(b, 1);
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
            let b0 = if r == 0 { b_far[0] } else { rng.random_range(0..b.len()) };
            let (f, g) = landmark_seed(a, b, &a_marks, b0);
            let mut s = Search::new(a, b, f, g);
            let mut d = s.improve(per, &mut rng);
            if r == 0 {
                if a.len() == b.len() {
                    let id: Vec<usize> = (0..a.len()).collect();
                    let mut s = Search::new(a, b, id.clone(), id);
                    d = d.min(s.improve(per, &mut rng));
                }
                if let Some((f, g)) = anchor_seed(a, b, landmark_seed(a, b, &a_marks, b_far[0])) {
                    let mut s = Search::new(a, b, f, g);
                    d = d.min(s.improve(per, &mut rng));
                }
            }
            d
        })
        .reduce(|| f64::INFINITY, f64::min);
    0.5 * best + a.mesh() + b.mesh()
}
