//! Closed-form geometry of the simply connected space form of constant
//! curvature `a`: warp function, Hessian eigenvalue bound, sphere area and
//! ball volume.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use libm::tgamma as gamma;

use crate::error::{domain, GeometryError, Result};
use crate::quadrature::{adaptive_simpson, SimpsonConfig};

/// Below this value of `|a| r²` the warp function is evaluated by its Taylor
/// series in `a r²`.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Simply connected model of constant sectional curvature `curvature_a` in
/// dimension `dimension_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    curvature_a: f64,
    dimension_n: usize,
}

impl SpaceForm {
    pub fn new(curvature_a: f64, dimension_n: usize) -> Result<Self> {
        if dimension_n < 2 {
            return Err(GeometryError::Dimension(dimension_n, 2));
        }
        if !curvature_a.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "curvature {curvature_a} is not finite"
            )));
        }
        Ok(Self {
            curvature_a,
            dimension_n,
        })
    }

    pub fn curvature(&self) -> f64 {
        self.curvature_a
    }

    pub fn dimension(&self) -> usize {
        self.dimension_n
    }

    /// Radius up to which the warp function stays positive: `π/√a` for
    /// `a > 0`, unbounded otherwise.
    pub fn warp_limit(&self) -> f64 {
        if self.curvature_a > 0.0 {
            PI / self.curvature_a.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Largest radius admissible for the comparison theorems: `π/(2√a)` when
    /// `a > 0`.
    pub fn admissible_radius(&self) -> f64 {
        0.5 * self.warp_limit()
    }

    fn check_warp_domain(&self, op: &'static str, r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(op, r, "radius must be positive and finite"));
        }
        if r > self.warp_limit() {
            return Err(domain(op, r, format!("exceeds π/√a = {}", self.warp_limit())));
        }
        Ok(())
    }

    /// `f_a(r)`: `sinh(√|a| r)/√|a|`, `r` or `sin(√a r)/√a`.
    pub fn warp_function(&self, r: f64) -> Result<f64> {
        self.check_warp_domain("warp_function", r)?;
        let v = self.warp_unchecked(r);
        if !v.is_finite() {
            return Err(domain("warp_function", r, "warp function overflows"));
        }
        Ok(v)
    }

    /// `f_a'(r)`: `cosh(√|a| r)`, `1` or `cos(√a r)`.
    pub fn warp_derivative(&self, r: f64) -> Result<f64> {
        self.check_warp_domain("warp_derivative", r)?;
        let v = self.warp_derivative_unchecked(r);
        if !v.is_finite() {
            return Err(domain("warp_derivative", r, "derivative overflows"));
        }
        Ok(v)
    }

    pub(crate) fn warp_unchecked(&self, r: f64) -> f64 {
        let a = self.curvature_a;
        let x = a * r * r;
        if x.abs() < SERIES_THRESHOLD {
            r * (1.0 - x / 6.0 + x * x / 120.0)
        } else if a < 0.0 {
            let k = (-a).sqrt();
            (k * r).sinh() / k
        } else {
            let k = a.sqrt();
            (k * r).sin() / k
        }
    }

    pub(crate) fn warp_derivative_unchecked(&self, r: f64) -> f64 {
        let a = self.curvature_a;
        let x = a * r * r;
        if x.abs() < SERIES_THRESHOLD {
            1.0 - x / 2.0 + x * x / 24.0
        } else if a < 0.0 {
            ((-a).sqrt() * r).cosh()
        } else {
            (a.sqrt() * r).cos()
        }
    }

    /// `1 - f_a'(r)²` without cancellation: `-sinh²` or `sin²` of `√|a| r`.
    pub(crate) fn one_minus_slope_sq_unchecked(&self, r: f64) -> f64 {
        let a = self.curvature_a;
        let x = a * r * r;
        if x.abs() < SERIES_THRESHOLD {
            // cos² = 1 - x + x²/3 - ...
            x - x * x / 3.0
        } else if a < 0.0 {
            -((-a).sqrt() * r).sinh().powi(2)
        } else {
            (a.sqrt() * r).sin().powi(2)
        }
    }

    /// Lower bound `λ_a(r)` on the eigenvalues of `Hess(ρ)` under `K ≤ a`.
    ///
    /// For `a > 0` the radius must satisfy `r ≤ π/(2√a)`; at the endpoint the
    /// value is exactly zero.
    pub fn hessian_eigen_lower(&self, r: f64) -> Result<f64> {
        let a = self.curvature_a;
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain("hessian_eigen_lower", r, "radius must be positive and finite"));
        }
        let x = a * r * r;
        if x.abs() < SERIES_THRESHOLD {
            // coth series: (1/r)(1 - x/3 - x²/45)
            return Ok((1.0 - x / 3.0 - x * x / 45.0) / r);
        }
        if a < 0.0 {
            let k = (-a).sqrt();
            return Ok(k / (k * r).tanh());
        }
        let end = self.admissible_radius();
        if r > end * (1.0 + 1e-15) {
            return Err(domain(
                "hessian_eigen_lower",
                r,
                format!("exceeds π/(2√a) = {end}"),
            ));
        }
        if (r - end).abs() <= 4.0 * f64::EPSILON * end {
            return Ok(0.0);
        }
        let k = a.sqrt();
        Ok(k / (k * r).tan())
    }

    /// Model sphere area `A_a(r) = f_a(r)^{n-1} ω_n`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        let f = self.warp_function(r)?;
        Ok(area_from_warp(f, self.dimension_n))
    }

    /// Model ball volume `V_a(r) = ∫₀^r A_a(t) dt`.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_warp_domain("ball_volume", r)?;
        let omega = unit_sphere_volume(self.dimension_n)?;
        let p = (self.dimension_n - 1) as i32;
        let v = adaptive_simpson(
            |t| omega * self.warp_unchecked(t).powi(p),
            0.0,
            r,
            SimpsonConfig::default(),
        );
        if !v.is_finite() {
            return Err(domain("ball_volume", r, "volume overflows"));
        }
        Ok(v)
    }
}

/// `f^{n-1} ω_n`; shared by model and warped sphere areas so both follow the
/// same floating-point path.
pub(crate) fn area_from_warp(f: f64, n: usize) -> f64 {
    f.powi((n - 1) as i32) * unit_sphere_volume_unchecked(n)
}

/// Volume `ω_n = 2π^{n/2}/Γ(n/2)` of the unit sphere `S^{n-1} ⊂ ℝⁿ`.
pub fn unit_sphere_volume(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(GeometryError::Dimension(n, 2));
    }
    Ok(unit_sphere_volume_unchecked(n))
}

fn unit_sphere_volume_unchecked(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Admissible radius interval for comparison statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusDomain {
    max_radius: f64,
}

impl RadiusDomain {
    pub fn new(space: &SpaceForm, max_radius: f64) -> Result<Self> {
        if !(max_radius > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "max radius {max_radius} must be positive"
            )));
        }
        let limit = space.admissible_radius();
        if max_radius > limit * (1.0 + 1e-15) {
            return Err(GeometryError::InvalidParameter(format!(
                "max radius {max_radius} exceeds π/(2√a) = {limit}"
            )));
        }
        Ok(Self { max_radius })
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }
}
