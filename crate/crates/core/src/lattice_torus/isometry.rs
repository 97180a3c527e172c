//! Isometry testing of flat tori: search for `U ∈ GL(n, Z)` with
//! `Uᵀ·A·U = B`.

use nalgebra::DMatrix;

use super::reduce::{int_det, lll, short_vectors, unimodular_inverse, QuadForm};
use super::TorusError;

/// `|x - y| ≤ tol·(1 + |y|)`, widened by `slack` for rounding already
/// present in `x` and `y`.
fn close(x: f64, y: f64, tol: f64, slack: f64) -> bool {
    (x - y).abs() <= tol * (1.0 + y.abs()) + slack
}

/// `xᵀ·a·y` and a bound on its floating-point error. Integral changes of
/// basis cancel large entries against each other, so the error is relative
/// to `|x|ᵀ·|a|·|y|`, not to the result.
fn inner(a: &DMatrix<f64>, x: &[i64], y: &[i64]) -> (f64, f64) {
    let n = x.len();
    let (mut s, mut mag) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let t = x[i] as f64 * a[(i, j)] * y[j] as f64;
            s += t;
            mag += t.abs();
        }
    }
    (s, (n * n + 4) as f64 * f64::EPSILON * mag)
}

fn column(m: &DMatrix<i64>, j: usize) -> Vec<i64> {
    m.column(j).iter().copied().collect()
}

/// Finds a unimodular `U` with `Uᵀ·a·U ≈ b`, entrywise within
/// `tol·(1 + |b_ij|)` plus the rounding error of the products.
pub fn find_isometry(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> Result<Option<DMatrix<i64>>, TorusError> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(TorusError::DimensionMismatch { a: n, b: b.nrows() });
    }
    if (0..n).all(|i| (0..n).all(|j| close(a[(i, j)], b[(i, j)], tol, 0.0))) {
        return Ok(Some(DMatrix::identity(n, n)));
    }
    // Work against a reduced form of b: b' = Vᵀ b V has short diagonal entries,
    // so the candidate lists below stay small. b' is recomputed from b with
    // the integral V, together with its rounding error.
    let v = lll(b, 0.99).basis;
    let cols: Vec<Vec<i64>> = (0..n).map(|j| column(&v, j)).collect();
    let entries: Vec<Vec<(f64, f64)>> =
        (0..n).map(|i| (0..n).map(|j| inner(b, &cols[i], &cols[j])).collect()).collect();
    let form = QuadForm::new(a).ok_or(TorusError::NotPositiveDefinite)?;
    let mut candidates: Vec<Vec<Vec<i64>>> = Vec::with_capacity(n);
    for (i, row) in entries.iter().enumerate() {
        let (want, err) = row[i];
        let bound = want + tol * (1.0 + want.abs()) + 2.0 * err;
        let list: Vec<Vec<i64>> = short_vectors(&form, bound)
            .into_iter()
            .filter(|(x, _)| {
                let (q, e) = inner(a, x, x);
                close(q, want, tol, e + err)
            })
            .map(|(x, _)| x)
            .collect();
        if list.is_empty() {
            return Ok(None);
        }
        candidates.push(list);
    }
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    let found = search(a, &entries, tol, &candidates, &mut chosen);
    let Some(w) = found else { return Ok(None) };
    let v_inv = unimodular_inverse(&v).expect("LLL basis change is unimodular");
    let u = w * v_inv;
    let ucols: Vec<Vec<i64>> = (0..n).map(|j| column(&u, j)).collect();
    let ok = (0..n).all(|i| {
        (0..n).all(|j| {
            let (x, e) = inner(a, &ucols[i], &ucols[j]);
            close(x, b[(i, j)], tol, e)
        })
    });
    Ok(ok.then_some(u))
}

fn search(
    a: &DMatrix<f64>,
    target: &[Vec<(f64, f64)>],
    tol: f64,
    candidates: &[Vec<Vec<i64>>],
    chosen: &mut Vec<Vec<i64>>,
) -> Option<DMatrix<i64>> {
    let n = candidates.len();
    let k = chosen.len();
    if k == n {
        let w = DMatrix::from_fn(n, n, |i, j| chosen[j][i]);
        return (int_det(&w).abs() == 1).then_some(w);
    }
    for x in &candidates[k] {
        let fits = (0..k).all(|j| {
            let (q, e) = inner(a, &chosen[j], x);
            let (want, err) = target[j][k];
            close(q, want, tol, e + err)
        });
        if fits {
            chosen.push(x.clone());
            if let Some(w) = search(a, target, tol, candidates, chosen) {
                return Some(w);
            }
            chosen.pop();
        }
    }
    None
}
