//! Degenerating families `Z_i = X + i·Y_i` with `Y_i = Bᵀ·diag(c_j·i^{p_j})·B`
//! and their rescaled limits.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_symmetric, matrix_from_rows, matrix_rows, torus_gram, PeriodPoint, SiegelError};
use crate::lattice_torus::{FlatTorus, TorusNormalization};

/// Diagonal growth `d_j(i) = c·i^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthLaw {
    pub c: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FamilyJson {
    g: usize,
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    x: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    laws: Vec<GrowthLaw>,
    #[serde(default = "default_u")]
    u: f64,
}

fn default_u() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiegelFamily {
    g: usize,
    x: DMatrix<f64>,
    b: DMatrix<f64>,
    laws: Vec<GrowthLaw>,
    u: f64,
}

/// Diameter-normalized limit: the surviving `(g - r)`-torus.
#[derive(Debug, Clone)]
pub struct CollapseResult {
    pub r: usize,
    /// `a_{r+1}, …, a_g` with `a_g = 1`.
    pub a: Vec<f64>,
    pub limit: FlatTorus,
}

/// Volume-normalized limit `(R^{2r}/Z^{2r}) × R^{g-r}`.
#[derive(Debug, Clone)]
pub struct VolumeLimit {
    pub r: usize,
    /// `None` when `r = 0`.
    pub torus_factor: Option<FlatTorus>,
    pub flat_dim: usize,
}

/// Injectivity-radius-normalized limit: a product of circles and a flat
/// factor.
#[derive(Debug, Clone, PartialEq)]
pub struct InjradLimit {
    pub r: usize,
    pub circle_radii: Vec<f64>,
    pub flat_dim: usize,
}

impl SiegelFamily {
    pub fn new(x: DMatrix<f64>, b: DMatrix<f64>, laws: Vec<GrowthLaw>, u: f64) -> Result<Self, SiegelError> {
        let g = laws.len();
        if g == 0 || x.nrows() != g || x.ncols() != g || b.nrows() != g || b.ncols() != g {
            return Err(SiegelError::Shape { expected: g.max(1) });
        }
        check_symmetric(&x, "X")?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(SiegelError::NonFinite);
        }
        for i in 0..g {
            if b[(i, i)] != 1.0 || (0..i).any(|j| b[(i, j)] != 0.0) {
                return Err(SiegelError::NotUnitUpperTriangular);
            }
        }
        for (index, law) in laws.iter().enumerate() {
            if !(law.c > 0.0 && law.c.is_finite() && law.p >= 0.0 && law.p.is_finite()) {
                return Err(SiegelError::BadLaw { index: index + 1 });
            }
        }
        if !(u > 1.0 && u.is_finite()) {
            return Err(SiegelError::BadU(u));
        }
        Ok(Self { g, x, b, laws, u })
    }

    /// `X = 0`, `B = I`, `u = 3`.
    pub fn diagonal(laws: Vec<GrowthLaw>) -> Result<Self, SiegelError> {
        let g = laws.len();
        Self::new(DMatrix::zeros(g, g), DMatrix::identity(g, g), laws, default_u())
    }

    pub fn from_json_str(s: &str) -> Result<Self, SiegelError> {
        let raw: FamilyJson = serde_json::from_str(s).map_err(|e| SiegelError::Json(e.to_string()))?;
        let g = raw.g;
        if raw.laws.len() != g {
            return Err(SiegelError::Shape { expected: g });
        }
        let x = match &raw.x {
            Some(rows) => matrix_from_rows(rows, g)?,
            None => DMatrix::zeros(g, g),
        };
        let b = match &raw.b {
            Some(rows) => matrix_from_rows(rows, g)?,
            None => DMatrix::identity(g, g),
        };
        Self::new(x, b, raw.laws, raw.u)
    }

    pub fn to_json_string(&self) -> String {
        let raw = FamilyJson {
            g: self.g,
            x: Some(matrix_rows(&self.x)),
            b: Some(matrix_rows(&self.b)),
            laws: self.laws.clone(),
            u: self.u,
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn laws(&self) -> &[GrowthLaw] {
        &self.laws
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn diagonal_at(&self, i: f64) -> Vec<f64> {
        self.laws.iter().map(|l| l.c * i.powf(l.p)).collect()
    }

    /// The period point `Z_i`.
    pub fn member(&self, i: f64) -> PeriodPoint {
        let d = self.diagonal_at(i);
        let dm = DMatrix::from_fn(self.g, self.g, |r, c| if r == c { d[r] } else { 0.0 });
        let y = self.b.transpose() * dm * &self.b;
        PeriodPoint::new(self.x.clone(), y).expect("family members are valid period points")
    }

    /// Torus of `Z_i` rescaled by `1/√d_g(i)`.
    pub fn scaled_member_torus(&self, i: f64) -> FlatTorus {
        let z = self.member(i);
        let dg = self.diagonal_at(i)[self.g - 1];
        FlatTorus::new(torus_gram(z.x(), z.y()) / dg).expect("positive definite")
    }

    fn check_ordering(&self) -> Result<(), SiegelError> {
        for j in 0..self.g - 1 {
            let (a, b) = (self.laws[j], self.laws[j + 1]);
            let ok = a.p < b.p || (a.p == b.p && a.c < self.u * b.c);
            if !ok {
                return Err(SiegelError::InadmissibleOrdering { index: j + 1 });
            }
        }
        Ok(())
    }

    /// `(r, degenerate)` where `r` counts the diagonal entries that are
    /// eventually negligible against `d_g`.
    pub fn detect_rank(&self) -> Result<(usize, bool), SiegelError> {
        self.check_ordering()?;
        let pg = self.laws[self.g - 1].p;
        let r = self.laws.iter().rposition(|l| l.p < pg).map_or(0, |j| j + 1);
        Ok((r, pg > 0.0))
    }

    pub fn diameter_fixed_limit(&self) -> Result<CollapseResult, SiegelError> {
        let (r, degenerate) = self.detect_rank()?;
        if !degenerate {
            return Err(SiegelError::NotDegenerate);
        }
        let cg = self.laws[self.g - 1].c;
        let a: Vec<f64> = self.laws[r..].iter().map(|l| l.c / cg).collect();
        let k = self.g - r;
        let b2 = self.b.view((r, r), (k, k)).into_owned();
        let dm = DMatrix::from_fn(k, k, |i, j| if i == j { a[i] } else { 0.0 });
        let gram = b2.transpose() * dm * &b2;
        let limit = FlatTorus::new(gram)?.rescale(TorusNormalization::Diameter)?;
        Ok(CollapseResult { r, a, limit })
    }

    pub fn volume_fixed_limit(&self) -> Result<VolumeLimit, SiegelError> {
        let r = self.laws.iter().take_while(|l| l.p == 0.0).count();
        if let Some(j) = self.laws[r..].iter().position(|l| l.p == 0.0) {
            return Err(SiegelError::MixedGrowth { index: r + j + 1 });
        }
        let torus_factor = if r == 0 {
            None
        } else {
            let b1 = self.b.view((0, 0), (r, r)).into_owned();
            let x1 = self.x.view((0, 0), (r, r)).into_owned();
            let dm = DMatrix::from_fn(r, r, |i, j| if i == j { self.laws[i].c } else { 0.0 });
            let y1 = b1.transpose() * dm * &b1;
            Some(FlatTorus::new(torus_gram(&x1, &y1))?)
        };
        Ok(VolumeLimit { r, torus_factor, flat_dim: self.g - r })
    }

    pub fn injrad_fixed_limit(&self) -> Result<InjradLimit, SiegelError> {
        let g = self.g;
        let model = self.x.iter().all(|&v| v == 0.0)
            && self.b == DMatrix::identity(g, g)
            && self.laws.iter().all(|l| l.p == 0.0 || l.p == 1.0)
            && self.laws.windows(2).all(|w| w[0].p <= w[1].p);
        if !model {
            return Err(SiegelError::NotModelForm);
        }
        let r = self.laws.iter().filter(|l| l.p == 0.0).count();
        let a1 = self.laws[0].c;
        // a_{g-j+1} for j = 1..g-r, i.e. a_g down to a_{r+1}
        let circle_radii = (1..=g - r).map(|j| self.laws[g - j].c / (2.0 * std::f64::consts::PI * a1)).collect();
        Ok(InjradLimit { r, circle_radii, flat_dim: g + r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn law(c: f64, p: f64) -> GrowthLaw {
        GrowthLaw { c, p }
    }

    fn fam(laws: &[(f64, f64)]) -> SiegelFamily {
        SiegelFamily::diagonal(laws.iter().map(|&(c, p)| law(c, p)).collect()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(fam(&[(1.0, 0.0), (1.0, 1.0)]).detect_rank().unwrap(), (1, true));
        assert_eq!(fam(&[(1.0, 1.0), (2.0, 1.0)]).detect_rank().unwrap(), (0, true));
        assert_eq!(fam(&[(1.0, 0.0), (2.0, 0.0)]).detect_rank().unwrap(), (0, false));
        assert!(matches!(
            fam(&[(7.0, 1.0), (1.0, 1.0)]).detect_rank(),
            Err(SiegelError::InadmissibleOrdering { index: 1 })
        ));
    }

    #[test]
    fn diameter_limit_examples() {
        let res = fam(&[(1.0, 1.0)]).diameter_fixed_limit().unwrap();
        assert_eq!(res.r, 0);
        assert_abs_diff_eq!(res.limit.gram()[(0, 0)], 4.0, epsilon = 1e-8);

        let res = fam(&[(1.0, 0.0), (1.0, 1.0)]).diameter_fixed_limit().unwrap();
        assert_eq!(res.r, 1);
        assert_eq!(res.a, vec![1.0]);
        assert_abs_diff_eq!(res.limit.gram()[(0, 0)], 4.0, epsilon = 1e-8);

        let res = fam(&[(1.0, 1.0), (2.0, 1.0)]).diameter_fixed_limit().unwrap();
        assert_eq!(res.a, vec![0.5, 1.0]);
        let want = FlatTorus::diagonal(&[0.5, 1.0]).unwrap().rescale(TorusNormalization::Diameter).unwrap();
        assert!(res.limit.isometric(&want, 1e-8).unwrap());

        assert!(matches!(fam(&[(1.0, 0.0), (2.0, 0.0)]).diameter_fixed_limit(), Err(SiegelError::NotDegenerate)));
    }

    #[test]
    fn volume_limit_examples() {
        let f = SiegelFamily::new(DMatrix::from_element(1, 1, 0.4), DMatrix::identity(1, 1), vec![law(2.0, 0.0)], 3.0)
            .unwrap();
        let v = f.volume_fixed_limit().unwrap();
        assert_eq!(v.flat_dim, 0);
        let gram = v.torus_factor.unwrap().gram().clone();
        let want = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.2, 0.08 + 2.0]);
        assert!((gram - want).amax() < 1e-14);

        let v = fam(&[(1.0, 1.0)]).volume_fixed_limit().unwrap();
        assert!(v.torus_factor.is_none());
        assert_eq!(v.flat_dim, 1);

        let v = fam(&[(2.5, 0.0), (1.0, 1.0)]).volume_fixed_limit().unwrap();
        assert_eq!(v.flat_dim, 1);
        let want = DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 2.5]);
        assert!((v.torus_factor.unwrap().gram() - want).amax() < 1e-14);

        assert!(matches!(
            fam(&[(1.0, 1.0), (1.0, 0.0)]).volume_fixed_limit(),
            Err(SiegelError::MixedGrowth { index: 2 })
        ));
    }

    #[test]
    fn injrad_limit_examples() {
        let tau = std::f64::consts::TAU;
        let l = fam(&[(3.7, 1.0)]).injrad_fixed_limit().unwrap();
        assert_abs_diff_eq!(l.circle_radii[0], 1.0 / tau, epsilon = 1e-15);
        assert_eq!(l.flat_dim, 1);

        let l = fam(&[(1.0, 1.0), (2.0, 1.0)]).injrad_fixed_limit().unwrap();
        assert_eq!(l.circle_radii.len(), 2);
        assert_abs_diff_eq!(l.circle_radii[0], 2.0 / tau, epsilon = 1e-15);
        assert_abs_diff_eq!(l.circle_radii[1], 1.0 / tau, epsilon = 1e-15);
        assert_eq!(l.flat_dim, 2);

        let f = SiegelFamily::new(
            DMatrix::zeros(2, 2),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]),
            vec![law(1.0, 0.0), law(1.0, 1.0)],
            3.0,
        )
        .unwrap();
        assert!(matches!(f.injrad_fixed_limit(), Err(SiegelError::NotModelForm)));
        assert!(matches!(fam(&[(1.0, 2.0)]).injrad_fixed_limit(), Err(SiegelError::NotModelForm)));
    }

    #[test]
    fn json_defaults() {
        let f = SiegelFamily::from_json_str(r#"{"g":2,"laws":[{"c":1,"p":0},{"c":1,"p":1}]}"#).unwrap();
        assert_eq!(f, fam(&[(1.0, 0.0), (1.0, 1.0)]));
        let back = SiegelFamily::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(back, f);
        assert!(SiegelFamily::from_json_str(r#"{"g":1,"laws":[{"c":-1,"p":0}]}"#).is_err());
    }
}
