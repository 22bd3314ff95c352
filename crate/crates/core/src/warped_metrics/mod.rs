//! Rotationally symmetric metrics `g = dr² + f(r)² g₀` on a ball around a
//! pole: curvatures, principal curvatures of distance spheres, areas and
//! volumes, pinch extraction and a finite-difference curvature oracle.

mod band;
mod oracle;
mod profile;

pub use band::{curvature_band, CurvatureBand, PiecewiseLinear};
pub use oracle::{fd_curvature_oracle, fd_curvature_oracle_with_step, PlaneKind, FD_STEP};
pub use profile::{
    ClosureWarp, DifferencedWarp, ModelWarp, PerturbedWarp, RadialProfile, TableRow, TableWarp, Warp,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, GeometryError, Result};
use crate::grid::{RadiusGrid, DEFAULT_POINTS, UNBOUNDED_RADIUS};
use crate::model_spaces::{area_from_warp, unit_sphere_volume, SpaceForm};
use crate::quadrature::{adaptive_simpson, SimpsonConfig};

/// Extreme sectional curvatures at a radius: planes containing `∂r` and
/// planes tangent to the distance sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    pub k_radial: f64,
    pub k_spherical: f64,
}

impl CurvaturePair {
    pub fn min(&self) -> f64 {
        self.k_radial.min(self.k_spherical)
    }

    pub fn max(&self) -> f64 {
        self.k_radial.max(self.k_spherical)
    }
}

#[derive(Debug, Clone)]
pub struct WarpedMetric {
    profile: RadialProfile,
    dimension_n: usize,
}

impl WarpedMetric {
    pub fn new(profile: RadialProfile, dimension_n: usize) -> Result<Self> {
        if dimension_n < 2 {
            return Err(GeometryError::Dimension(dimension_n, 2));
        }
        Ok(Self {
            profile,
            dimension_n,
        })
    }

    /// The space form of curvature `a` written as a warped product.
    pub fn space_form(space: SpaceForm) -> Self {
        Self {
            profile: RadialProfile::model(space),
            dimension_n: space.dimension(),
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn dimension(&self) -> usize {
        self.dimension_n
    }

    pub fn domain_end(&self) -> f64 {
        self.profile.domain_end()
    }

    fn check(&self, op: &'static str, r: f64) -> Result<()> {
        if self.profile.contains(r) {
            Ok(())
        } else {
            Err(domain(op, r, format!("outside (0, {})", self.domain_end())))
        }
    }

    /// `(-f''/f, (1 - f'²)/f²)`. Every 2-plane at radius `r` has sectional
    /// curvature between the two.
    pub fn curvatures(&self, r: f64) -> Result<CurvaturePair> {
        self.check("curvatures", r)?;
        Ok(self.curvatures_unchecked(r))
    }

    pub(crate) fn curvatures_unchecked(&self, r: f64) -> CurvaturePair {
        let w = self.profile.warp();
        let f = w.value(r);
        CurvaturePair {
            k_radial: -w.second(r) / f,
            k_spherical: w.one_minus_slope_sq(r) / (f * f),
        }
    }

    /// The single principal curvature `f'/f` of the distance sphere `S_p(r)`.
    pub fn shape_operator_eigenvalue(&self, r: f64) -> Result<f64> {
        self.check("shape_operator_eigenvalue", r)?;
        Ok(self.profile.df(r) / self.profile.f(r))
    }

    /// `A(r) = f(r)^{n-1} ω_n`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        self.check("sphere_area", r)?;
        Ok(area_from_warp(self.profile.f(r), self.dimension_n))
    }

    /// `V(r) = ∫₀^r A(t) dt` by adaptive Simpson.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r > self.domain_end() {
            return Err(domain("ball_volume", r, format!("outside (0, {}]", self.domain_end())));
        }
        let omega = unit_sphere_volume(self.dimension_n)?;
        let p = (self.dimension_n - 1) as i32;
        let w = self.profile.warp();
        Ok(adaptive_simpson(
            |t| omega * w.value(t).powi(p),
            0.0,
            r,
            SimpsonConfig::default(),
        ))
    }

    /// Ricci curvatures `(radial, tangential)`: `(n-1)(-f''/f)` and
    /// `-f''/f + (n-2)(1-f'²)/f²`.
    pub fn ricci(&self, r: f64) -> Result<(f64, f64)> {
        let k = self.curvatures(r)?;
        let n = self.dimension_n as f64;
        Ok(((n - 1.0) * k.k_radial, k.k_radial + (n - 2.0) * k.k_spherical))
    }

    /// Intrinsic curvature of the distance sphere two ways: directly as a
    /// round sphere of radius `f(r)`, and by Gauss' equation as ambient
    /// tangential curvature plus the principal-curvature product `(f'/f)²`.
    ///
    /// Returns `(K̃_direct, relative residual)`; the residual is normalised
    /// by `max(1, K̃_direct)`.
    pub fn gauss_codazzi_check(&self, r: f64) -> Result<(f64, f64)> {
        let k = self.curvatures(r)?;
        let f = self.profile.f(r);
        let lambda = self.profile.df(r) / f;
        let direct = 1.0 / (f * f);
        let via_gauss = k.k_spherical + lambda * lambda;
        Ok((direct, (direct - via_gauss).abs() / direct.max(1.0)))
    }

    /// Default sample grid for comparisons against the model of curvature
    /// `a`: the domain is clipped to `π/(2√a)` for `a > 0`, and for `a < 0`
    /// to where `f_a^{n-1}` stays representable.
    pub fn default_grid(&self, a: f64, points: usize) -> Result<RadiusGrid> {
        let mut end = self.domain_end();
        if a > 0.0 {
            end = end.min(std::f64::consts::FRAC_PI_2 / a.sqrt());
        }
        let mut cap = UNBOUNDED_RADIUS;
        if a < 0.0 {
            cap = cap.min(700.0 / ((self.dimension_n as f64 - 1.0) * (-a).sqrt()));
        }
        if end.is_finite() && end > cap {
            end = f64::INFINITY;
        }
        RadiusGrid::for_domain(end, points, cap)
    }

    pub fn default_grid_512(&self, a: f64) -> Result<RadiusGrid> {
        self.default_grid(a, DEFAULT_POINTS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn metric(spec: &str, n: usize) -> WarpedMetric {
        WarpedMetric::new(RadialProfile::parse(spec).unwrap(), n).unwrap()
    }

    #[test]
    fn curvature_examples() {
        let k = metric("sin", 3).curvatures(0.5).unwrap();
        assert_relative_eq!(k.k_radial, 1.0, epsilon = 1e-15);
        assert_relative_eq!(k.k_spherical, 1.0, epsilon = 1e-15);
        let k = metric("sinh", 3).curvatures(1.0).unwrap();
        assert_relative_eq!(k.k_radial, -1.0, epsilon = 1e-15);
        assert_relative_eq!(k.k_spherical, -1.0, epsilon = 1e-15);
        let k = metric("euclid", 3).curvatures(1.3).unwrap();
        assert_eq!((k.k_radial, k.k_spherical), (0.0, 0.0));
        assert!(metric("sin", 3).curvatures(PI).is_err());
        assert!(metric("sin", 3).curvatures(0.0).is_err());
    }

    #[test]
    fn shape_operator_examples() {
        assert_eq!(metric("euclid", 3).shape_operator_eigenvalue(2.0).unwrap(), 0.5);
        assert_relative_eq!(
            metric("sinh", 3).shape_operator_eigenvalue(1.0).unwrap(),
            1.0f64.cosh() / 1.0f64.sinh(),
            max_relative = 1e-15
        );
        assert!(metric("sin", 3).shape_operator_eigenvalue(PI / 2.0).unwrap().abs() < 1e-16);
    }

    #[test]
    fn area_and_volume_examples() {
        assert_relative_eq!(metric("euclid", 3).sphere_area(1.0).unwrap(), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(
            metric("sinh", 3).sphere_area(1.0).unwrap(),
            4.0 * PI * 1.0f64.sinh().powi(2),
            max_relative = 1e-14
        );
        assert_relative_eq!(metric("sin", 4).sphere_area(PI / 2.0).unwrap(), 2.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(metric("euclid", 3).ball_volume(1.0).unwrap(), 4.0 * PI / 3.0, max_relative = 1e-12);
        assert_relative_eq!(
            metric("sinh", 2).ball_volume(1.0).unwrap(),
            2.0 * PI * (1.0f64.cosh() - 1.0),
            max_relative = 1e-10
        );
        // whole round 4-sphere
        assert_relative_eq!(metric("sin", 4).ball_volume(PI).unwrap(), 8.0 * PI * PI / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn space_form_recovery_is_bitwise() {
        for a in [-4.0, -1.0, 0.0, 1.0, 4.0] {
            let s = SpaceForm::new(a, 3).unwrap();
            let m = WarpedMetric::space_form(s);
            let g = m.default_grid(a, 64).unwrap();
            for &r in g.radii() {
                assert_eq!(m.sphere_area(r).unwrap(), s.sphere_area(r).unwrap());
                let k = m.curvatures(r).unwrap();
                assert!((k.k_radial - a).abs() <= 1e-10 && (k.k_spherical - a).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn gauss_codazzi_examples() {
        let (kt, res) = metric("sinh", 3).gauss_codazzi_check(1.0).unwrap();
        assert_relative_eq!(kt, 0.724_061_660_966_310_6, max_relative = 1e-12);
        assert!(res <= 1e-12);
        let (kt, res) = metric("euclid", 3).gauss_codazzi_check(0.5).unwrap();
        assert_relative_eq!(kt, 4.0, max_relative = 1e-15);
        assert!(res <= 1e-12);
        let (kt, res) = metric("sin", 3).gauss_codazzi_check(PI / 2.0).unwrap();
        assert_relative_eq!(kt, 1.0, max_relative = 1e-15);
        assert!(res <= 1e-12);
    }

    #[test]
    fn pole_completeness_limit() {
        for spec in ["sin", "sinh"] {
            let k = metric(spec, 3).curvatures(1e-3).unwrap();
            assert!((k.k_spherical - k.k_radial).abs() < 1e-2);
        }
    }

    #[test]
    fn default_grid_respects_model_domain() {
        let g = metric("sin", 3).default_grid(1.0, 512).unwrap();
        assert!(g.last() < PI / 2.0);
        let g = metric("sinh", 5).default_grid(-4.0, 512).unwrap();
        assert_eq!(g.last(), 20.0);
        let g = metric("sinh", 5).default_grid(-10000.0, 512).unwrap();
        assert!(g.last() <= 700.0 / 400.0);
    }
}
