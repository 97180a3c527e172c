//! Certified covering radius by branch and bound over the fundamental cell.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;

use super::reduce::{lll, QuadForm};
use super::{CertifiedValue, TorusError};

/// Box budget before giving up.
const MAX_BOXES: usize = 4_000_000;

/// Lattice points tried per box in [`box_upper`].
const NEAR_POINTS: usize = 32;

struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    ub: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.ub == other.ub
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// Largest `|x|_G` over the corners of the box `[-h, h]`.
fn box_radius(g: &DMatrix<f64>, half: &[f64]) -> f64 {
    let n = half.len();
    let mut best: f64 = 0.0;
    // corner x and -x have equal norm; fix the sign of the first coordinate
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

/// Upper bound for the distance to the lattice over a box: for any lattice
/// point `v`, every point of the box is within `max_corner |corner - v|` of
/// `v`, and that maximum of a convex function sits at a corner. Taking the
/// best `v` near the center is never worse than the Lipschitz bound
/// `dist(center) + radius`, and is much sharper in thin directions.
fn box_upper(form: &QuadForm, g: &DMatrix<f64>, center: &[f64], half: &[f64], d: f64, radius: f64) -> f64 {
    let n = center.len();
    let reach = d + radius;
    // the nearest few points suffice: any lattice point gives a valid bound
    let mut near: Vec<(f64, Vec<i64>)> = Vec::new();
    let full = reach * reach * (1.0 + 1e-12);
    form.enumerate(center, full, &mut |x, q| {
        near.push((q, x.to_vec()));
        if near.len() > NEAR_POINTS {
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            near.truncate(NEAR_POINTS);
        }
        if near.len() == NEAR_POINTS {
            near[NEAR_POINTS - 1].0
        } else {
            full
        }
    });
    let mut best = reach;
    let mut y = vec![0.0; n];
    for (_, v) in &near {
        let mut worst: f64 = 0.0;
        for mask in 0..(1usize << n) {
            for i in 0..n {
                let s = if mask & (1 << i) != 0 { half[i] } else { -half[i] };
                y[i] = center[i] + s - v[i] as f64;
            }
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    q += y[i] * g[(i, j)] * y[j];
                }
            }
            worst = worst.max(q);
            if worst.sqrt() >= best {
                break;
            }
        }
        best = best.min(worst.sqrt());
    }
    best
}

/// Index sets of the orthogonal blocks of `g` (components of its nonzero
/// pattern).
fn blocks(g: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = g.nrows();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..n {
                if !seen[j] && g[(i, j)] != 0.0 {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Covering radius of `Zⁿ` under the Gram matrix `g`, bracketed within `tol`.
///
/// An orthogonal sum has squared covering radius the sum of the squares, so
/// blocks are handled separately.
pub fn covering_radius(g: &DMatrix<f64>, tol: f64) -> Result<CertifiedValue, TorusError> {
    let parts = blocks(g);
    if parts.len() == 1 {
        return covering_radius_block(g, tol);
    }
    // sqrt(Σhi²) - sqrt(Σlo²) ≤ 2·sqrt(k)·max tol_i
    let sub_tol = tol / (2.0 * (parts.len() as f64).sqrt());
    let (mut lo2, mut hi2) = (0.0, 0.0);
    for idx in &parts {
        let sub = g.select_rows(idx).select_columns(idx);
        let c = covering_radius_block(&sub, sub_tol)?;
        lo2 += c.lo * c.lo;
        hi2 += c.hi * c.hi;
    }
    Ok(CertifiedValue { lo: lo2.sqrt(), hi: hi2.sqrt() })
}

/// Branch and bound for a single block.
///
/// Boxes of the fundamental cell are refined in order of their upper bound
/// (see [`box_upper`]) until the best upper bound is within `tol` of the
/// largest distance observed at a box center.
fn covering_radius_block(g: &DMatrix<f64>, tol: f64) -> Result<CertifiedValue, TorusError> {
    let n = g.nrows();
    if n == 1 {
        let r = g[(0, 0)].sqrt() / 2.0;
        return Ok(CertifiedValue { lo: r, hi: r });
    }
    let reduced = lll(g, 0.99).gram;
    let form = QuadForm::new(&reduced).ok_or(TorusError::NotPositiveDefinite)?;
    let dist = |c: &[f64]| form.closest(c).0.sqrt();
    let axis_len: Vec<f64> = (0..n).map(|i| reduced[(i, i)].sqrt()).collect();

    let center = vec![0.5; n];
    let half = vec![0.5; n];
    let d0 = dist(&center);
    let mut lo = d0;
    let mut dropped: f64 = 0.0;
    let mut heap = BinaryHeap::new();
    let ub = box_upper(&form, &reduced, &center, &half, d0, box_radius(&reduced, &half));
    heap.push(Cell { ub, center, half });
    let mut processed = 0usize;
    while let Some(top) = heap.peek() {
        let hi = top.ub.max(dropped);
        if hi - lo <= tol {
            return Ok(CertifiedValue { lo, hi });
        }
        processed += 1;
        if processed > MAX_BOXES {
            return Err(TorusError::NoConvergence { iterations: processed });
        }
        let cell = heap.pop().expect("peeked");
        let axis = (0..n)
            .max_by(|&a, &b| (cell.half[a] * axis_len[a]).total_cmp(&(cell.half[b] * axis_len[b])))
            .expect("n >= 1");
        let mut half = cell.half.clone();
        half[axis] /= 2.0;
        let radius = box_radius(&reduced, &half);
        for sign in [-1.0, 1.0] {
            let mut c = cell.center.clone();
            c[axis] += sign * half[axis];
            let d = dist(&c);
            lo = lo.max(d);
            let ub = box_upper(&form, &reduced, &c, &half, d, radius);
            if ub <= lo + tol {
                dropped = dropped.max(ub);
            } else {
                heap.push(Cell { center: c, half: half.clone(), ub });
            }
        }
    }
    Ok(CertifiedValue { lo, hi: dropped.max(lo) })
}
