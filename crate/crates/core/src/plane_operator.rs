//! The plane quantity
//!
//! ```text
//! T(X,Y) = (⟨SX,X⟩⟨SY,Y⟩ - ⟨SX,Y⟩²) / (‖X‖²‖Y‖² - ⟨X,Y⟩²)
//! ```
//!
//! of a symmetric operator `S` restricted to the plane `span{X, Y}`, its
//! eigenvalue bounds `λ² ≤ T ≤ μ²` for positive semi-definite `S`, and the
//! explicit orthogonal basis of the plane that is also `S`-orthogonal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

/// Relative Gram-determinant threshold below which a plane is degenerate.
pub const GRAM_THRESHOLD: f64 = 1e-12;

/// Slack allowed on the smallest eigenvalue of a PSD operator.
pub const PSD_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    entries: DMatrix<f64>,
}

impl SymmetricOperator {
    /// Requires an exactly symmetric square matrix of size at least 2.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(GeometryError::InvalidParameter("operator must be square".into()));
        }
        if entries.nrows() < 2 {
            return Err(GeometryError::Dimension(entries.nrows(), 2));
        }
        if entries != entries.transpose() {
            return Err(GeometryError::NotSymmetric);
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(GeometryError::InvalidParameter("operator rows must form a square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// `(M + Mᵀ)/2`, symmetric to the last bit.
    pub fn symmetrize(m: &DMatrix<f64>) -> Result<Self> {
        Self::new((m + m.transpose()) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Extreme eigenvalues `(λ, μ)` from a symmetric eigensolver.
    pub fn eigen_extremes(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.entries.clone());
        let lambda = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let mu = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lambda, mu)
    }

    fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.entries * v
    }

    fn norm(&self) -> f64 {
        self.entries.norm()
    }
}

/// Two linearly independent vectors spanning a plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane2 {
    x: DVector<f64>,
    y: DVector<f64>,
}

impl Plane2 {
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(GeometryError::InvalidParameter("plane vectors differ in length".into()));
        }
        let gram = gram_determinant(&x, &y);
        if !(gram > GRAM_THRESHOLD * x.norm_squared() * y.norm_squared()) {
            return Err(GeometryError::DegeneratePlane { gram });
        }
        Ok(Self { x, y })
    }

    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(x), DVector::from_column_slice(y))
    }

    /// Plane spanned by coordinate axes `i` and `j` of `ℝⁿ`.
    pub fn coordinate(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut x = DVector::zeros(n);
        let mut y = DVector::zeros(n);
        x[i] = 1.0;
        y[j] = 1.0;
        Self::new(x, y)
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Orthonormal basis `(e₁, e₂)` with `e₁ ∥ X`.
    pub fn orthonormal_basis(&self) -> (DVector<f64>, DVector<f64>) {
        let e1 = self.x.normalize();
        let mut e2 = &self.y - &e1 * e1.dot(&self.y);
        e2 -= &e1 * e1.dot(&e2);
        (e1, e2.normalize())
    }
}

fn gram_determinant(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let xy = x.dot(y);
    x.norm_squared() * y.norm_squared() - xy * xy
}

fn check_dims(s: &SymmetricOperator, p: &Plane2) -> Result<()> {
    if s.dim() != p.dim() {
        return Err(GeometryError::InvalidParameter(format!(
            "operator is {}-dimensional but plane lives in dimension {}",
            s.dim(),
            p.dim()
        )));
    }
    Ok(())
}

/// `T(X, Y) = (⟨SX,X⟩⟨SY,Y⟩ - ⟨SX,Y⟩²) / (|X|²|Y|² - ⟨X,Y⟩²)`; defined for
/// any symmetric `S`.
///
/// The quotient does not depend on the basis of the plane, so it is
/// evaluated in an orthonormal one where the denominator is 1. Dividing by
/// the raw Gram determinant would amplify the numerator's rounding error for
/// nearly parallel `X, Y`.
pub fn plane_value(s: &SymmetricOperator, p: &Plane2) -> Result<f64> {
    check_dims(s, p)?;
    let gram = gram_determinant(&p.x, &p.y);
    if !(gram > GRAM_THRESHOLD * p.x.norm_squared() * p.y.norm_squared()) {
        return Err(GeometryError::DegeneratePlane { gram });
    }
    let (e1, e2) = p.orthonormal_basis();
    let se1 = s.apply(&e1);
    let se2 = s.apply(&e2);
    let a12 = 0.5 * (se1.dot(&e2) + se2.dot(&e1));
    Ok(se1.dot(&e1) * se2.dot(&e2) - a12 * a12)
}

/// Orthogonal `v, w` spanning the plane with `⟨Sv, w⟩ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizingPair {
    pub v: DVector<f64>,
    pub w: DVector<f64>,
    /// Coefficients in `v = e₁ + c e₂`, `w = e₁ + d e₂`; `None` when the
    /// orthonormal basis already diagonalises `S`.
    pub c: Option<f64>,
    pub d: Option<f64>,
}

/// Builds `v = e₁ + c e₂` and `w = e₁ + d e₂` with `cd = -1`, where `c`
/// solves `c² + ((a₁₁ - a₂₂)/a₁₂) c - 1 = 0` in an orthonormal basis of the
/// plane. The root of larger magnitude is taken, from the cancellation-free
/// form of the quadratic formula.
pub fn diagonalizing_pair(s: &SymmetricOperator, p: &Plane2) -> Result<DiagonalizingPair> {
    check_dims(s, p)?;
    let (e1, e2) = p.orthonormal_basis();
    let se1 = s.apply(&e1);
    let se2 = s.apply(&e2);
    let a11 = se1.dot(&e1);
    let a22 = se2.dot(&e2);
    let a12 = 0.5 * (se1.dot(&e2) + se2.dot(&e1));
    if a12 == 0.0 {
        return Ok(DiagonalizingPair {
            v: e1,
            w: e2,
            c: None,
            d: None,
        });
    }
    let b = (a11 - a22) / a12;
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let c = if b.abs() > 1e150 {
        -b
    } else {
        -0.5 * (b + sign * (b * b + 4.0).sqrt())
    };
    let d = -1.0 / c;
    let v = &e1 + &e2 * c;
    let w = &e1 + &e2 * d;
    Ok(DiagonalizingPair {
        v,
        w,
        c: Some(c),
        d: Some(d),
    })
}

/// Outcome of testing `λ² ≤ T ≤ μ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenBounds {
    pub t: f64,
    pub lambda: f64,
    pub mu: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Tests the eigenvalue bounds on `T`. A non-PSD operator is reported as an
/// unmet hypothesis rather than a failed bound.
pub fn eigen_bounds_check(s: &SymmetricOperator, p: &Plane2) -> Result<EigenBounds> {
    let (lambda, mu) = s.eigen_extremes();
    if lambda < -PSD_SLACK * s.norm().max(1.0) {
        return Err(GeometryError::HypothesisUnmet(format!(
            "operator is not positive semi-definite (smallest eigenvalue {lambda:e})"
        )));
    }
    let t = plane_value(s, p)?;
    let lambda = lambda.max(0.0);
    let tol = 1e-9 * (1.0 + mu * mu);
    Ok(EigenBounds {
        t,
        lambda,
        mu,
        tol,
        pass: lambda * lambda - tol <= t && t <= mu * mu + tol,
    })
}

/// Residuals of a diagonalising pair, normalised as
/// `|⟨v,w⟩|/(‖v‖‖w‖)` and `|⟨Sv,w⟩|/(‖S‖‖v‖‖w‖)`.
pub fn pair_residuals(s: &SymmetricOperator, pair: &DiagonalizingPair) -> (f64, f64) {
    let nv = pair.v.norm();
    let nw = pair.w.norm();
    let ortho = pair.v.dot(&pair.w).abs() / (nv * nw);
    let s_ortho = s.apply(&pair.v).dot(&pair.w).abs() / (s.norm().max(f64::MIN_POSITIVE) * nv * nw);
    (ortho, s_ortho)
}

/// Aggregate of a randomized run over PSD operators and planes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub trials: usize,
    pub seed: u64,
    pub bound_violations: usize,
    pub pair_violations: usize,
    pub hypothesis_failures: usize,
    /// Smallest distance of `T` into the band `[λ² - tol, μ² + tol]`, scaled
    /// by `1 + μ²`; negative means a violation.
    pub worst_bound_margin: f64,
    pub worst_pair_residual: f64,
}

/// Random PSD operator `A Aᵀ` with `A` an `n × k` Gaussian matrix,
/// `k ∈ [1, n]` so rank-deficient operators appear.
pub fn random_psd(rng: &mut impl Rng, n: usize) -> SymmetricOperator {
    let k = rng.gen_range(1..=n);
    let a = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    SymmetricOperator::symmetrize(&((&a * a.transpose()) * scale)).expect("square")
}

pub fn random_plane(rng: &mut impl Rng, n: usize) -> Plane2 {
    loop {
        let x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(p) = Plane2::new(x, y) {
            return p;
        }
    }
}

/// Runs `trials` random operator/plane pairs with `n` cycling through
/// `2..=n_max`, driven by ChaCha8 seeded with `seed`.
pub fn fuzz_eigen_bounds(n_max: usize, trials: usize, seed: u64) -> Result<FuzzSummary> {
    if n_max < 2 {
        return Err(GeometryError::Dimension(n_max, 2));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = FuzzSummary {
        trials,
        seed,
        bound_violations: 0,
        pair_violations: 0,
        hypothesis_failures: 0,
        worst_bound_margin: f64::INFINITY,
        worst_pair_residual: 0.0,
    };
    for trial in 0..trials {
        let n = 2 + trial % (n_max - 1);
        let s = random_psd(&mut rng, n);
        let p = random_plane(&mut rng, n);
        match eigen_bounds_check(&s, &p) {
            Ok(b) => {
                let margin = (b.t - (b.lambda * b.lambda - b.tol)).min(b.mu * b.mu + b.tol - b.t) / (1.0 + b.mu * b.mu);
                summary.worst_bound_margin = summary.worst_bound_margin.min(margin);
                if !b.pass {
                    summary.bound_violations += 1;
                }
            }
            Err(GeometryError::HypothesisUnmet(_)) => summary.hypothesis_failures += 1,
            Err(e) => return Err(e),
        }
        let pair = diagonalizing_pair(&s, &p)?;
        let (o, so) = pair_residuals(&s, &pair);
        let worst = o.max(so);
        summary.worst_pair_residual = summary.worst_pair_residual.max(worst);
        if worst > 1e-10 {
            summary.pair_violations += 1;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn plane_value_examples() {
        let s = SymmetricOperator::diagonal(&[2.0, 3.0]).unwrap();
        let p = Plane2::coordinate(2, 0, 1).unwrap();
        assert_eq!(plane_value(&s, &p).unwrap(), 6.0);

        let id = SymmetricOperator::new(DMatrix::identity(5, 5)).unwrap();
        let p = Plane2::from_slices(&[1.0, 2.0, 0.0, -1.0, 0.5], &[0.0, 1.0, 3.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(plane_value(&id, &p).unwrap(), 1.0, max_relative = 1e-14);

        let s = SymmetricOperator::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let p = Plane2::coordinate(2, 0, 1).unwrap();
        assert_eq!(plane_value(&s, &p).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_and_asymmetric_inputs() {
        assert!(matches!(
            Plane2::from_slices(&[1.0, 2.0], &[2.0, 4.0]),
            Err(GeometryError::DegeneratePlane { .. })
        ));
        assert!(matches!(
            SymmetricOperator::from_rows(&[vec![1.0, 2.0], vec![2.0000001, 1.0]]),
            Err(GeometryError::NotSymmetric)
        ));
        assert!(SymmetricOperator::from_rows(&[vec![1.0]]).is_err());
    }

    #[test]
    fn golden_ratio_pair() {
        let s = SymmetricOperator::from_rows(&[vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let p = Plane2::coordinate(2, 0, 1).unwrap();
        let pair = diagonalizing_pair(&s, &p).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(pair.c.unwrap(), phi, max_relative = 1e-15);
        assert_relative_eq!(pair.d.unwrap(), -2.0 / (1.0 + 5f64.sqrt()), max_relative = 1e-15);
        let (o, so) = pair_residuals(&s, &pair);
        assert!(o < 1e-15 && so < 1e-15);
    }

    #[test]
    fn diagonal_operator_keeps_basis() {
        let s = SymmetricOperator::diagonal(&[5.0, 7.0]).unwrap();
        let p = Plane2::coordinate(2, 0, 1).unwrap();
        let pair = diagonalizing_pair(&s, &p).unwrap();
        assert!(pair.c.is_none());
        assert_eq!(pair.v.as_slice(), &[1.0, 0.0]);
        assert_eq!(pair.w.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn random_pairs_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let m = DMatrix::from_fn(4, 4, |_, _| rng.sample::<f64, _>(StandardNormal));
            let s = SymmetricOperator::symmetrize(&m).unwrap();
            let p = random_plane(&mut rng, 4);
            let pair = diagonalizing_pair(&s, &p).unwrap();
            let (o, so) = pair_residuals(&s, &pair);
            assert!(o < 1e-10 && so < 1e-10);
        }
    }

    #[test]
    fn bounds_examples() {
        let s = SymmetricOperator::diagonal(&[2.0, 3.0]).unwrap();
        let b = eigen_bounds_check(&s, &Plane2::coordinate(2, 0, 1).unwrap()).unwrap();
        assert!(b.pass);
        assert_relative_eq!(b.lambda * b.lambda, 4.0, max_relative = 1e-14);
        assert_relative_eq!(b.mu * b.mu, 9.0, max_relative = 1e-14);
        assert_eq!(b.t, 6.0);

        let zero = SymmetricOperator::new(DMatrix::zeros(3, 3)).unwrap();
        let b = eigen_bounds_check(&zero, &Plane2::coordinate(3, 0, 2).unwrap()).unwrap();
        assert!(b.pass);
        assert_eq!((b.t, b.lambda, b.mu), (0.0, 0.0, 0.0));
    }

    #[test]
    fn indefinite_operator_is_hypothesis_failure() {
        // T = -1 is below λ² = 1 here: the bound genuinely needs PSD.
        let s = SymmetricOperator::diagonal(&[-1.0, 1.0]).unwrap();
        let p = Plane2::coordinate(2, 0, 1).unwrap();
        assert_eq!(plane_value(&s, &p).unwrap(), -1.0);
        assert!(matches!(eigen_bounds_check(&s, &p), Err(GeometryError::HypothesisUnmet(_))));
    }

    #[test]
    fn small_fuzz_is_clean_and_reproducible() {
        let a = fuzz_eigen_bounds(6, 2000, 3).unwrap();
        assert_eq!(a.bound_violations, 0);
        assert_eq!(a.pair_violations, 0);
        assert_eq!(a.hypothesis_failures, 0);
        assert_eq!(a, fuzz_eigen_bounds(6, 2000, 3).unwrap());
    }
}
