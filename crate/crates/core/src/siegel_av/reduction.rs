//! Gauss reduction in genus one and best-effort Siegel reduction in higher
//! genus.

use nalgebra::{Complex, DMatrix};

use super::{PeriodPoint, SiegelError, REDUCE_MAX_GENUS};
use crate::lattice_torus::reduce::{lll, unimodular_inverse};

/// `[[a, b], [c, d]]` with `ad - bc = 1`, acting by `τ ↦ (aτ + b)/(cτ + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SL2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2 {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1 };

    /// `self · other`.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn apply(&self, tau: Complex<f64>) -> Complex<f64> {
        let num = tau * self.a as f64 + self.b as f64;
        let den = tau * self.c as f64 + self.d as f64;
        num / den
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn max_entry(&self) -> i64 {
        [self.a, self.b, self.c, self.d].iter().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn to_matrix(&self) -> DMatrix<i64> {
        DMatrix::from_row_slice(2, 2, &[self.a, self.b, self.c, self.d])
    }
}

const G1_MAX_STEPS: usize = 10_000;

/// Moves `τ` into `{|Re τ| ≤ 1, |τ| ≥ 1}` by alternating translations and
/// the inversion `τ ↦ -1/τ`. The translation step already lands in
/// `|Re τ| ≤ 1/2`. Returns the reduced point and the `γ` with `γ·τ = τ'`.
pub fn reduce_g1(tau: Complex<f64>, tol: f64) -> Result<(Complex<f64>, SL2), SiegelError> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(SiegelError::NotUpperHalfPlane);
    }
    let mut t = tau;
    let mut gamma = SL2::IDENTITY;
    for _ in 0..G1_MAX_STEPS {
        let n = t.re.round();
        if n != 0.0 {
            t.re -= n;
            let shift = SL2 { a: 1, b: -(n as i64), c: 0, d: 1 };
            gamma = shift.compose(&gamma);
        }
        if t.norm_sqr() < 1.0 - tol {
            t = -t.inv();
            gamma = SL2 { a: 0, b: -1, c: 1, d: 0 }.compose(&gamma);
        } else {
            return Ok((t, gamma));
        }
    }
    Err(SiegelError::NoConvergence(G1_MAX_STEPS))
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub point: PeriodPoint,
    /// `2g × 2g` integral symplectic matrix with `γ·z = point`.
    pub gamma: DMatrix<i64>,
    pub certified: bool,
    pub iterations: usize,
}

fn block(g: usize, a: &DMatrix<i64>, b: &DMatrix<i64>, c: &DMatrix<i64>, d: &DMatrix<i64>) -> DMatrix<i64> {
    let mut m = DMatrix::zeros(2 * g, 2 * g);
    m.view_mut((0, 0), (g, g)).copy_from(a);
    m.view_mut((0, g), (g, g)).copy_from(b);
    m.view_mut((g, 0), (g, g)).copy_from(c);
    m.view_mut((g, g), (g, g)).copy_from(d);
    m
}

/// Best-effort reduction into the Siegel set `𝔉_g(u)`.
///
/// Each round improves the basis of `Y` by LLL (`Z ↦ UᵀZU`), translates `X`
/// to its fractional part, and inverts the first coordinate when
/// `u·d_1 ≤ 1`. Stops as soon as the point lies in the Siegel set or after
/// `max_iter` rounds.
pub fn semi_reduce(z: &PeriodPoint, u: f64, max_iter: usize) -> Result<Reduction, SiegelError> {
    let g = z.genus();
    if g > REDUCE_MAX_GENUS {
        return Err(SiegelError::TooLarge { g, max: REDUCE_MAX_GENUS });
    }
    if !(u > 1.0) {
        return Err(SiegelError::BadU(u));
    }
    let id = DMatrix::<i64>::identity(g, g);
    let zero = DMatrix::<i64>::zeros(g, g);
    let mut point = z.clone();
    let mut gamma = DMatrix::<i64>::identity(2 * g, 2 * g);
    let mut iterations = 0;
    while iterations < max_iter && !point.in_siegel_set(u) {
        iterations += 1;

        let red = lll(point.y(), 0.99);
        if red.basis != id {
            let ut = red.basis.transpose();
            let inv = unimodular_inverse(&red.basis).expect("LLL basis change is unimodular");
            let step = block(g, &ut, &zero, &zero, &inv);
            let uf = red.basis.map(|v| v as f64);
            let x = uf.transpose() * point.x() * &uf;
            point = PeriodPoint::new(x, red.gram)?;
            gamma = step * gamma;
        }

        let n = point.x().map(|v| v.round() as i64);
        if n != zero {
            let step = block(g, &id, &(-&n), &zero, &id);
            point = PeriodPoint::new(point.x() - n.map(|v| v as f64), point.y().clone())?;
            gamma = step * gamma;
        }

        if u * point.jacobi().d[0] <= 1.0 {
            let mut a = id.clone();
            a[(0, 0)] = 0;
            let mut b = zero.clone();
            b[(0, 0)] = -1;
            let mut c = zero.clone();
            c[(0, 0)] = 1;
            let step = block(g, &a, &b, &c, &a);
            point = point.act(&step)?;
            gamma = step * gamma;
        }
    }
    let certified = point.in_siegel_set(u);
    Ok(Reduction { point, gamma, certified, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel_av::is_symplectic;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn g1_examples() {
        let (t, g) = reduce_g1(c(5.0, 1.0), 1e-12).unwrap();
        assert!((t - c(0.0, 1.0)).norm() < 1e-12);
        assert!((g.apply(c(5.0, 1.0)) - t).norm() < 1e-12);

        let (t, g) = reduce_g1(c(0.0, 0.25), 1e-12).unwrap();
        assert!((t - c(0.0, 4.0)).norm() < 1e-12);
        assert_eq!(g.det(), 1);

        let tau = c(0.3, 0.9);
        let (t, g) = reduce_g1(tau, 1e-12).unwrap();
        assert!(t.re.abs() <= 1.0 && t.norm() >= 1.0 - 1e-12);
        assert!(g.max_entry() <= 10);
        assert!((g.apply(tau) - t).norm() < 1e-12);
        assert!(reduce_g1(c(0.0, -1.0), 1e-12).is_err());
    }

    #[test]
    fn already_reduced_is_identity() {
        let p = PeriodPoint::from_tau(0.1, 2.0).unwrap();
        let r = semi_reduce(&p, 3.0, 50).unwrap();
        assert!(r.certified);
        assert_eq!(r.point, p);
        assert_eq!(r.gamma, DMatrix::identity(2, 2));
    }

    #[test]
    fn translation_only() {
        let x = DMatrix::from_row_slice(2, 2, &[3.2, 3.7, 3.7, 3.9]);
        let y = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 5.0]);
        let p = PeriodPoint::new(x, y.clone()).unwrap();
        let r = semi_reduce(&p, 3.0, 50).unwrap();
        assert!(r.certified);
        assert!(r.point.x().iter().all(|v| v.abs() <= 0.5));
        assert_eq!(r.point.y(), &y);
        assert!(is_symplectic(&r.gamma));
        let back = p.act(&r.gamma).unwrap();
        assert!((back.x() - r.point.x()).amax() < 1e-12);
    }

    #[test]
    fn small_imaginary_part_gets_inverted() {
        let p = PeriodPoint::from_tau(0.2, 0.01).unwrap();
        let r = semi_reduce(&p, 3.0, 100).unwrap();
        assert!(r.certified);
        assert!(is_symplectic(&r.gamma));
        let back = p.act(&r.gamma).unwrap();
        assert!((back.y() - r.point.y()).amax() < 1e-9);
    }

    #[test]
    fn genus_cap() {
        let p = PeriodPoint::new(DMatrix::zeros(5, 5), DMatrix::identity(5, 5)).unwrap();
        assert!(matches!(semi_reduce(&p, 3.0, 10), Err(SiegelError::TooLarge { .. })));
    }
}
