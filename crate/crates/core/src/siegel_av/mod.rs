//! Period points `Z = X + iY` in the Siegel upper half space, their flat
//! tori, Siegel sets, reduction, and the collapse limits of degenerating
//! families.

mod family;
mod reduction;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice_torus::reduce::jacobi;
use crate::lattice_torus::{FlatTorus, TorusError};

pub use family::{CollapseResult, GrowthLaw, InjradLimit, SiegelFamily, VolumeLimit};
pub use reduction::{reduce_g1, semi_reduce, Reduction, SL2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SiegelError {
    #[error("matrix has the wrong shape: expected {expected}x{expected}")]
    Shape { expected: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("{which} is not symmetric")]
    NotSymmetric { which: &'static str },
    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,
    #[error("point is not in the upper half plane")]
    NotUpperHalfPlane,
    #[error("B must be unit upper triangular")]
    NotUnitUpperTriangular,
    #[error("growth law {index} is invalid: need c > 0 and p >= 0")]
    BadLaw { index: usize },
    #[error("Siegel parameter u must exceed 1, got {0}")]
    BadU(f64),
    #[error("genus {g} exceeds the supported bound {max}")]
    TooLarge { g: usize, max: usize },
    #[error("diagonal ordering fails eventually at index {index}")]
    InadmissibleOrdering { index: usize },
    #[error("family does not degenerate")]
    NotDegenerate,
    #[error("bounded diagonal entries must come first (index {index} grows)")]
    MixedGrowth { index: usize },
    #[error("family is not of the model form X = 0, B = I, p in {{0, 1}}")]
    NotModelForm,
    #[error("reduction did not terminate within {0} steps")]
    NoConvergence(usize),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Largest genus accepted by [`semi_reduce`].
pub const REDUCE_MAX_GENUS: usize = 4;

pub(crate) fn check_symmetric(m: &DMatrix<f64>, which: &'static str) -> Result<(), SiegelError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(SiegelError::NonFinite);
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in i + 1..m.nrows() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(SiegelError::NotSymmetric { which });
            }
        }
    }
    Ok(())
}

/// `Z = X + iY` with `X` symmetric and `Y` symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPoint {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodPointJson {
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>, SiegelError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(SiegelError::Shape { expected: n });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl PeriodPoint {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self, SiegelError> {
        let g = y.nrows();
        if g == 0 || y.ncols() != g || x.nrows() != g || x.ncols() != g {
            return Err(SiegelError::Shape { expected: g.max(1) });
        }
        check_symmetric(&x, "X")?;
        check_symmetric(&y, "Y")?;
        let x = (&x + x.transpose()) * 0.5;
        let y = (&y + y.transpose()) * 0.5;
        if jacobi(&y).is_none() {
            return Err(SiegelError::NotPositiveDefinite);
        }
        Ok(Self { x, y })
    }

    /// Genus one point `τ = re + i·im`.
    pub fn from_tau(re: f64, im: f64) -> Result<Self, SiegelError> {
        if !(im > 0.0) {
            return Err(SiegelError::NotUpperHalfPlane);
        }
        Self::new(DMatrix::from_element(1, 1, re), DMatrix::from_element(1, 1, im))
    }

    pub fn from_complex(z: &DMatrix<Complex<f64>>) -> Result<Self, SiegelError> {
        Self::new(z.map(|c| c.re), z.map(|c| c.im))
    }

    pub fn from_json_str(s: &str) -> Result<Self, SiegelError> {
        let raw: PeriodPointJson = serde_json::from_str(s).map_err(|e| SiegelError::Json(e.to_string()))?;
        let g = raw.y.len();
        Self::new(matrix_from_rows(&raw.x, g)?, matrix_from_rows(&raw.y, g)?)
    }

    pub fn to_json(&self) -> PeriodPointJson {
        PeriodPointJson { x: matrix_rows(&self.x), y: matrix_rows(&self.y) }
    }

    pub fn genus(&self) -> usize {
        self.y.nrows()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn z(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.genus(), self.genus(), |i, j| Complex::new(self.x[(i, j)], self.y[(i, j)]))
    }

    pub fn jacobi(&self) -> JacobiDecomposition {
        jacobi_decompose(&self.y).expect("validated positive definite")
    }

    /// Gram matrix `[[Y⁻¹, Y⁻¹X], [XY⁻¹, XY⁻¹X + Y]]` of the torus on
    /// `R^{2g}/Z^{2g}`.
    pub fn torus(&self) -> FlatTorus {
        FlatTorus::new(torus_gram(&self.x, &self.y)).expect("the period torus Gram is positive definite")
    }

    /// Siegel-set membership: `|x_ij| < u`, `|1 - b_ij| < u` for `i < j`,
    /// `1 < u·d_1` and `d_i < u·d_{i+1}`.
    pub fn in_siegel_set(&self, u: f64) -> bool {
        let g = self.genus();
        let jd = self.jacobi();
        let x_ok = self.x.iter().all(|v| v.abs() < u);
        let b_ok = (0..g).all(|i| (i + 1..g).all(|j| (1.0 - jd.b[(i, j)]).abs() < u));
        let d_ok = 1.0 < u * jd.d[0] && (0..g - 1).all(|i| jd.d[i] < u * jd.d[i + 1]);
        x_ok && b_ok && d_ok
    }

    /// The symplectic action `(AZ + B)(CZ + D)⁻¹` of an integral matrix
    /// `[[A, B], [C, D]]`.
    pub fn act(&self, gamma: &DMatrix<i64>) -> Result<Self, SiegelError> {
        let g = self.genus();
        if gamma.nrows() != 2 * g || gamma.ncols() != 2 * g {
            return Err(SiegelError::Shape { expected: 2 * g });
        }
        let c = |i0: usize, j0: usize| DMatrix::from_fn(g, g, |i, j| Complex::new(gamma[(i0 + i, j0 + j)] as f64, 0.0));
        let z = self.z();
        let num = c(0, 0) * &z + c(0, g);
        let den = c(g, 0) * &z + c(g, g);
        let inv = den.try_inverse().ok_or(SiegelError::NotPositiveDefinite)?;
        let w = num * inv;
        // the result is symmetric in exact arithmetic; symmetrize the rounding
        let w = (&w + w.transpose()) * Complex::new(0.5, 0.0);
        Self::from_complex(&w)
    }
}

pub(crate) fn torus_gram(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let g = y.nrows();
    let yi = y.clone().try_inverse().expect("positive definite");
    let yi = (&yi + yi.transpose()) * 0.5;
    let top_right = &yi * x;
    let bottom = x * &yi * x + y;
    let mut m = DMatrix::zeros(2 * g, 2 * g);
    m.view_mut((0, 0), (g, g)).copy_from(&yi);
    m.view_mut((0, g), (g, g)).copy_from(&top_right);
    m.view_mut((g, 0), (g, g)).copy_from(&top_right.transpose());
    m.view_mut((g, g), (g, g)).copy_from(&((&bottom + bottom.transpose()) * 0.5));
    m
}

/// `Y = Bᵀ·diag(d)·B` with `B` unit upper triangular.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiDecomposition {
    pub b: DMatrix<f64>,
    pub d: Vec<f64>,
}

impl JacobiDecomposition {
    pub fn recompose(&self) -> DMatrix<f64> {
        let n = self.d.len();
        let dm = DMatrix::from_fn(n, n, |i, j| if i == j { self.d[i] } else { 0.0 });
        self.b.transpose() * dm * &self.b
    }
}

pub fn jacobi_decompose(y: &DMatrix<f64>) -> Result<JacobiDecomposition, SiegelError> {
    jacobi(y).map(|(b, d)| JacobiDecomposition { b, d }).ok_or(SiegelError::NotPositiveDefinite)
}

/// Whether an integral `2g × 2g` matrix preserves the standard symplectic
/// form `J = [[0, I], [-I, 0]]`.
pub fn is_symplectic(gamma: &DMatrix<i64>) -> bool {
    let n = gamma.nrows();
    if !n.is_multiple_of(2) || gamma.ncols() != n {
        return false;
    }
    let g = n / 2;
    let j = DMatrix::from_fn(n, n, |r, c| {
        if c == r + g {
            1
        } else if r == c + g {
            -1
        } else {
            0
        }
    });
    gamma.transpose() * &j * gamma == j
}
