//! Gram-matrix lattice algorithms: Jacobi (`BᵀDB`) decomposition, LLL
//! reduction and Fincke–Pohst enumeration.

use nalgebra::{DMatrix, DVector};

/// Decomposes a symmetric matrix as `G = Bᵀ·diag(d)·B` with `B` unit upper
/// triangular. Returns `None` unless every pivot is positive, i.e. unless `G`
/// is positive definite.
pub fn jacobi(g: &DMatrix<f64>) -> Option<(DMatrix<f64>, Vec<f64>)> {
    let n = g.nrows();
    let mut b = DMatrix::<f64>::identity(n, n);
    let mut d = vec![0.0; n];
    for i in 0..n {
        let mut di = g[(i, i)];
        for k in 0..i {
            di -= d[k] * b[(k, i)] * b[(k, i)];
        }
        if !(di.is_finite() && di > 0.0) {
            return None;
        }
        d[i] = di;
        for j in i + 1..n {
            let mut s = g[(i, j)];
            for k in 0..i {
                s -= d[k] * b[(k, i)] * b[(k, j)];
            }
            b[(i, j)] = s / di;
        }
    }
    Some((b, d))
}

/// Result of LLL reduction: the reduced Gram matrix `Uᵀ·G·U` and the
/// unimodular change of basis `U`.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub gram: DMatrix<f64>,
    pub basis: DMatrix<i64>,
}

/// LLL reduction (parameter `delta`) acting on a positive-definite Gram matrix.
pub fn lll(g: &DMatrix<f64>, delta: f64) -> Reduced {
    let n = g.nrows();
    let mut gram = g.clone();
    let mut u = DMatrix::<i64>::identity(n, n);
    if n < 2 {
        return Reduced { gram, basis: u };
    }
    let mut k = 1;
    let mut steps = 0usize;
    let max_steps = 10_000 * n * n;
    while k < n && steps < max_steps {
        steps += 1;
        for j in (0..k).rev() {
            let Some((b, _)) = jacobi(&gram) else { break };
            let q = b[(j, k)].round();
            if q != 0.0 {
                subtract_column(&mut gram, &mut u, k, j, q as i64);
            }
        }
        let Some((b, d)) = jacobi(&gram) else { break };
        let mu = b[(k - 1, k)];
        if d[k] >= (delta - mu * mu) * d[k - 1] {
            k += 1;
        } else {
            gram.swap_rows(k, k - 1);
            gram.swap_columns(k, k - 1);
            u.swap_columns(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Reduced { gram, basis: u }
}

/// Basis change `b_k <- b_k - q·b_j` applied to a Gram matrix and the
/// accumulated basis.
fn subtract_column(gram: &mut DMatrix<f64>, u: &mut DMatrix<i64>, k: usize, j: usize, q: i64) {
    let qf = q as f64;
    let n = gram.nrows();
    for i in 0..n {
        let v = gram[(j, i)];
        gram[(k, i)] -= qf * v;
    }
    for i in 0..n {
        let v = gram[(i, j)];
        gram[(i, k)] -= qf * v;
    }
    for i in 0..n {
        let v = u[(i, j)];
        u[(i, k)] -= q * v;
    }
}

/// Quadratic form in Fincke–Pohst shape: `Q(x) = Σ d_i (x_i + Σ_{j>i} b_ij x_j)²`.
#[derive(Debug, Clone)]
pub struct QuadForm {
    b: DMatrix<f64>,
    d: Vec<f64>,
}

impl QuadForm {
    pub fn new(g: &DMatrix<f64>) -> Option<Self> {
        jacobi(g).map(|(b, d)| Self { b, d })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Visits every integer `x` with `Q(x - center) <= bound`. The visitor
    /// may shrink the bound by returning a smaller value.
    pub fn enumerate(&self, center: &[f64], bound: f64, visit: &mut dyn FnMut(&[i64], f64) -> f64) {
        let n = self.dim();
        if n == 0 {
            return;
        }
        let mut x = vec![0i64; n];
        let mut bound = bound;
        self.level(n - 1, center, 0.0, &mut x, &mut bound, visit);
    }

    fn level(
        &self,
        i: usize,
        center: &[f64],
        partial: f64,
        x: &mut [i64],
        bound: &mut f64,
        visit: &mut dyn FnMut(&[i64], f64) -> f64,
    ) {
        let n = self.dim();
        let mut shift = 0.0;
        for j in i + 1..n {
            shift += self.b[(i, j)] * (x[j] as f64 - center[j]);
        }
        let c = center[i] - shift;
        let room = *bound - partial;
        if room < 0.0 {
            return;
        }
        // visit candidates nearest first so the bound shrinks early; once
        // both sides leave the ellipsoid every further step does too
        let start = c.round();
        if !start.is_finite() {
            return;
        }
        let start = start as i64;
        let mut step = 0i64;
        loop {
            let mut inside = false;
            let pair = if step == 0 { [Some(start), None] } else { [Some(start + step), Some(start - step)] };
            for xi in pair.into_iter().flatten() {
                let t = xi as f64 - c;
                let p = partial + self.d[i] * t * t;
                if p > *bound {
                    continue;
                }
                inside = true;
                x[i] = xi;
                if i == 0 {
                    *bound = visit(x, p);
                } else {
                    self.level(i - 1, center, p, x, bound, visit);
                }
            }
            if !inside {
                break;
            }
            step += 1;
        }
    }

    /// Squared distance from `t` to the nearest lattice point, with that point.
    pub fn closest(&self, t: &[f64]) -> (f64, Vec<i64>) {
        let n = self.dim();
        // Babai-style start: the rounded point gives a valid bound
        let rounded: Vec<i64> = t.iter().map(|v| v.round() as i64).collect();
        let diff: Vec<f64> = (0..n).map(|i| rounded[i] as f64 - t[i]).collect();
        let mut best = self.eval(&diff);
        let mut arg = rounded;
        let slack = 1.0 + 1e-12;
        self.enumerate(t, best * slack, &mut |x, q| {
            if q < best {
                best = q;
                arg = x.to_vec();
            }
            best * slack
        });
        (best, arg)
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let s = y[i] + (i + 1..n).map(|j| self.b[(i, j)] * y[j]).sum::<f64>();
                self.d[i] * s * s
            })
            .sum()
    }
}

/// All nonzero integer vectors with `xᵀGx <= bound`, paired with their norms.
pub fn short_vectors(form: &QuadForm, bound: f64) -> Vec<(Vec<i64>, f64)> {
    let center = vec![0.0; form.dim()];
    let mut out = Vec::new();
    form.enumerate(&center, bound, &mut |x, q| {
        if x.iter().any(|&v| v != 0) {
            out.push((x.to_vec(), q));
        }
        bound
    });
    out
}

pub fn apply(u: &DMatrix<i64>, x: &[i64]) -> Vec<i64> {
    let n = u.nrows();
    (0..n).map(|i| (0..x.len()).map(|j| u[(i, j)] * x[j]).sum()).collect()
}

pub fn to_f64(u: &DMatrix<i64>) -> DMatrix<f64> {
    u.map(|v| v as f64)
}

pub fn quad(g: &DMatrix<f64>, x: &[i64]) -> f64 {
    let v = DVector::from_iterator(x.len(), x.iter().map(|&t| t as f64));
    (v.transpose() * g * &v)[(0, 0)]
}

/// Exact determinant of a small integer matrix (Bareiss).
pub fn int_det(m: &DMatrix<i64>) -> i128 {
    let n = m.nrows();
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Inverse of a unimodular integer matrix, computed exactly by Gauss–Jordan
/// elimination over the integers with unit pivots found by Euclid steps.
pub fn unimodular_inverse(m: &DMatrix<i64>) -> Option<DMatrix<i64>> {
    let n = m.nrows();
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] as i128).collect()).collect();
    let mut inv: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    for c in 0..n {
        // Euclid on column c among rows c..n until a single nonzero remains
        loop {
            let nz: Vec<usize> = (c..n).filter(|&i| a[i][c] != 0).collect();
            if nz.is_empty() {
                return None;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).expect("nonempty");
            a.swap(c, p);
            inv.swap(c, p);
            let mut done = true;
            for i in c + 1..n {
                if a[i][c] != 0 {
                    let q = a[i][c].div_euclid(a[c][c]);
                    for j in 0..n {
                        a[i][j] -= q * a[c][j];
                        inv[i][j] -= q * inv[c][j];
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[c][c].abs() != 1 {
            return None;
        }
        if a[c][c] < 0 {
            for j in 0..n {
                a[c][j] = -a[c][j];
                inv[c][j] = -inv[c][j];
            }
        }
    }
    for c in (0..n).rev() {
        for i in 0..c {
            let q = a[i][c];
            if q != 0 {
                for j in 0..n {
                    a[i][j] -= q * a[c][j];
                    inv[i][j] -= q * inv[c][j];
                }
            }
        }
    }
    let out = DMatrix::from_fn(n, n, |i, j| inv[i][j] as i64);
    Some(out)
}
