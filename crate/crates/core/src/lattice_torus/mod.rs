//! Flat tori `Rⁿ/Zⁿ` described by positive-definite Gram matrices.
//!
//! The lattice is always `Zⁿ`; the metric varies. `GL(n, Z)` acts on Gram
//! matrices by `G ↦ UᵀGU`, and two tori are isometric iff their Gram matrices
//! lie in one orbit.

mod covering;
mod isometry;
pub mod reduce;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::dim_caps;
use reduce::{apply, lll, short_vectors, QuadForm};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("Gram matrix must be square and nonempty")]
    NotSquare,
    #[error("Gram matrix has a non-finite entry")]
    NonFinite,
    #[error("Gram matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension {dim} exceeds the supported bound {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("no convergence after {iterations} refinement steps")]
    NoConvergence { iterations: usize },
    #[error("dimension mismatch: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("tolerance must be positive and finite")]
    BadTolerance,
    #[error("invalid torus JSON: {0}")]
    Json(String),
}

/// A value known to lie in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedValue {
    pub lo: f64,
    pub hi: f64,
}

impl CertifiedValue {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusNormalization {
    Diameter,
    Volume,
}

/// Relative tolerance used when rescaling to diameter one.
pub const RESCALE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FlatTorus {
    gram: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TorusJson {
    pub dim: usize,
    pub gram: Vec<Vec<f64>>,
}

impl FlatTorus {
    /// Validates and symmetrizes a Gram matrix.
    pub fn new(gram: DMatrix<f64>) -> Result<Self, TorusError> {
        let n = gram.nrows();
        if n == 0 || gram.ncols() != n {
            return Err(TorusError::NotSquare);
        }
        if gram.iter().any(|v| !v.is_finite()) {
            return Err(TorusError::NonFinite);
        }
        let scale = gram.amax().max(1.0);
        for i in 0..n {
            for j in i + 1..n {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale {
                    return Err(TorusError::NotSymmetric { i, j });
                }
            }
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        if reduce::jacobi(&gram).is_none() {
            return Err(TorusError::NotPositiveDefinite);
        }
        Ok(Self { gram })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, TorusError> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(TorusError::NotSquare);
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self, TorusError> {
        let n = entries.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { 0.0 }))
    }

    /// The circle of the given circumference.
    pub fn circle(circumference: f64) -> Result<Self, TorusError> {
        Self::diagonal(&[circumference * circumference])
    }

    pub fn from_json_str(s: &str) -> Result<Self, TorusError> {
        let raw: TorusJson = serde_json::from_str(s).map_err(|e| TorusError::Json(e.to_string()))?;
        if raw.gram.len() != raw.dim {
            return Err(TorusError::Json(format!("dim {} but {} rows", raw.dim, raw.gram.len())));
        }
        Self::from_rows(&raw.gram)
    }

    pub fn to_json(&self) -> TorusJson {
        TorusJson { dim: self.dim(), gram: self.rows() }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|i| self.gram.row(i).iter().copied().collect()).collect()
    }

    /// Multiplies all lengths by `s` (the Gram matrix by `s²`).
    pub fn scaled(&self, s: f64) -> Self {
        Self { gram: &self.gram * (s * s) }
    }

    pub fn volume(&self) -> f64 {
        let (_, d) = reduce::jacobi(&self.gram).expect("validated");
        d.iter().product::<f64>().sqrt()
    }

    fn check_cap(&self, max: usize) -> Result<(), TorusError> {
        if self.dim() > max {
            return Err(TorusError::TooLarge { dim: self.dim(), max });
        }
        Ok(())
    }

    /// Length of a shortest nonzero lattice vector and one such vector,
    /// normalized so its first nonzero entry is positive; ties go to the
    /// lexicographically largest vector.
    pub fn shortest_vector(&self) -> Result<(f64, Vec<i64>), TorusError> {
        self.check_cap(dim_caps().svp)?;
        let red = lll(&self.gram, 0.99);
        let n = self.dim();
        let bound = (0..n).map(|i| red.gram[(i, i)]).fold(f64::INFINITY, f64::min);
        let form = QuadForm::new(&red.gram).ok_or(TorusError::NotPositiveDefinite)?;
        let list = short_vectors(&form, bound * (1.0 + 1e-9));
        let min = list.iter().map(|(_, q)| *q).fold(f64::INFINITY, f64::min);
        let mut best: Option<Vec<i64>> = None;
        for (x, q) in &list {
            if *q > min * (1.0 + 1e-10) {
                continue;
            }
            let mut v = apply(&red.basis, x);
            if v.iter().find(|&&t| t != 0).is_some_and(|&t| t < 0) {
                v.iter_mut().for_each(|t| *t = -*t);
            }
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        let v = best.expect("a nonzero lattice vector exists");
        Ok((reduce::quad(&self.gram, &v).sqrt(), v))
    }

    /// Number of lattice vectors attaining the minimum norm (counting `±v`).
    pub fn kissing_number(&self) -> Result<usize, TorusError> {
        self.check_cap(dim_caps().svp)?;
        let (len, _) = self.shortest_vector()?;
        let red = lll(&self.gram, 0.99);
        let form = QuadForm::new(&red.gram).ok_or(TorusError::NotPositiveDefinite)?;
        Ok(short_vectors(&form, len * len * (1.0 + 1e-9)).len())
    }

    pub fn injectivity_radius(&self) -> Result<f64, TorusError> {
        Ok(self.shortest_vector()?.0 / 2.0)
    }

    /// Covering radius (equivalently, the diameter of the torus).
    pub fn covering_radius(&self, tol: f64) -> Result<CertifiedValue, TorusError> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(TorusError::BadTolerance);
        }
        self.check_cap(dim_caps().covering)?;
        covering::covering_radius(&self.gram, tol)
    }

    pub fn diameter(&self, tol: f64) -> Result<CertifiedValue, TorusError> {
        self.covering_radius(tol)
    }

    /// Rescales to diameter one (using the certificate midpoint, relative
    /// tolerance [`RESCALE_TOL`]) or to volume one.
    pub fn rescale(&self, mode: TorusNormalization) -> Result<Self, TorusError> {
        match mode {
            TorusNormalization::Volume => Ok(self.scaled(self.volume().powf(-1.0 / self.dim() as f64))),
            TorusNormalization::Diameter => {
                // a rough estimate first so the tolerance can be relative
                let rough = self.covering_radius(self.gram.amax().sqrt() * 0.05)?;
                let d = self.covering_radius(rough.lo.max(1e-300) * RESCALE_TOL)?;
                Ok(self.scaled(1.0 / d.mid()))
            }
        }
    }

    /// A unimodular `U` with `Uᵀ·self·U = other` within `tol·(1 + |entry|)`.
    pub fn isometry_to(&self, other: &Self, tol: f64) -> Result<Option<DMatrix<i64>>, TorusError> {
        if self.dim() != other.dim() {
            return Err(TorusError::DimensionMismatch { a: self.dim(), b: other.dim() });
        }
        self.check_cap(dim_caps().covering)?;
        isometry::find_isometry(&self.gram, &other.gram, tol)
    }

    pub fn isometric(&self, other: &Self, tol: f64) -> Result<bool, TorusError> {
        Ok(self.isometry_to(other, tol)?.is_some())
    }

    /// Orthogonal product `self × other`.
    pub fn product(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let mut g = DMatrix::zeros(n + m, n + m);
        g.view_mut((0, 0), (n, n)).copy_from(&self.gram);
        g.view_mut((n, n), (m, m)).copy_from(&other.gram);
        Self { gram: g }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hex() -> FlatTorus {
        FlatTorus::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap()
    }

    #[test]
    fn shortest_vectors() {
        let (l, v) = FlatTorus::diagonal(&[1.0, 1.0]).unwrap().shortest_vector().unwrap();
        assert_abs_diff_eq!(l, 1.0);
        assert_eq!(v, vec![1, 0]);
        let (l, v) = FlatTorus::diagonal(&[0.25, 4.0]).unwrap().shortest_vector().unwrap();
        assert_abs_diff_eq!(l, 0.5);
        assert_eq!(v, vec![1, 0]);
        assert_abs_diff_eq!(hex().shortest_vector().unwrap().0, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn covering_radii() {
        let c = FlatTorus::diagonal(&[1.0]).unwrap().covering_radius(1e-3).unwrap();
        assert!(c.contains(0.5));
        let c = FlatTorus::diagonal(&[1.0, 1.0]).unwrap().covering_radius(1e-3).unwrap();
        assert!(c.lo <= 0.5f64.sqrt() + 1e-12 && 0.5f64.sqrt() <= c.hi + 1e-12);
        assert!(c.width() <= 1e-3);
        let c = FlatTorus::diagonal(&[1.0, 4.0]).unwrap().covering_radius(1e-3).unwrap();
        assert!(c.lo <= 1.25f64.sqrt() + 1e-12 && 1.25f64.sqrt() <= c.hi + 1e-12);
        // hexagonal deep hole at distance 1/sqrt(3)
        let c = hex().covering_radius(1e-6).unwrap();
        assert!((c.mid() - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn volume_and_injectivity() {
        let t = FlatTorus::diagonal(&[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(t.volume(), 1.0);
        assert_abs_diff_eq!(t.injectivity_radius().unwrap(), 0.5);
        let c = FlatTorus::diagonal(&[4.0]).unwrap().diameter(1e-9).unwrap();
        assert_abs_diff_eq!(c.mid(), 1.0);
        let t = FlatTorus::diagonal(&[1.0 / 200.0, 200.0]).unwrap();
        assert_abs_diff_eq!(t.volume(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rescaling() {
        let c = FlatTorus::diagonal(&[1.0]).unwrap().rescale(TorusNormalization::Diameter).unwrap();
        assert_abs_diff_eq!(c.gram()[(0, 0)], 4.0, epsilon = 1e-9);
        let v = FlatTorus::diagonal(&[2.0, 2.0]).unwrap().rescale(TorusNormalization::Volume).unwrap();
        assert!((v.gram() - DMatrix::identity(2, 2)).amax() < 1e-12);
        let h = hex().rescale(TorusNormalization::Diameter).unwrap();
        assert!((h.diameter(1e-8).unwrap().mid() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn isometries() {
        let id = FlatTorus::diagonal(&[1.0, 1.0]).unwrap();
        assert_eq!(id.isometry_to(&id, 1e-9).unwrap(), Some(DMatrix::identity(2, 2)));
        let skew = FlatTorus::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let u = id.isometry_to(&skew, 1e-9).unwrap().unwrap();
        let uf = u.map(|x| x as f64);
        assert!((uf.transpose() * id.gram() * &uf - skew.gram()).amax() < 1e-9);
        assert!(!id.isometric(&hex(), 1e-9).unwrap());
        assert_eq!(id.kissing_number().unwrap(), 4);
        assert_eq!(hex().kissing_number().unwrap(), 6);
    }

    #[test]
    fn validation() {
        assert_eq!(FlatTorus::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]), Err(TorusError::NotPositiveDefinite));
        assert!(matches!(
            FlatTorus::from_rows(&[vec![1.0, 0.1], vec![0.0, 1.0]]),
            Err(TorusError::NotSymmetric { .. })
        ));
    }
}
