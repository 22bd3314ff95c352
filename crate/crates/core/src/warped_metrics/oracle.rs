//! Sectional curvature from metric components alone.
//!
//! The warped metric is written in the chart `(r, θ, φ)` as
//! `diag(1, f², f² sin²θ)` and evaluated on the equator `θ = π/2`.
//! Christoffel symbols come from centered differences of the components and
//! the Riemann tensor from centered differences of the Christoffel symbols.
//! Only `f` itself is sampled, so the result is independent of the
//! closed-form curvature expressions. One Richardson step on the steps `h`
//! and `h/2` removes the `O(h²)` term.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::WarpedMetric;
use crate::error::{domain, Result};

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneKind {
    /// Plane spanned by `∂r` and a sphere direction.
    Radial,
    /// Plane tangent to the distance sphere.
    Spherical,
}

type Christoffel = [[[f64; 3]; 3]; 3];

fn components(metric: &WarpedMetric, x: [f64; 3]) -> Matrix3<f64> {
    let f = metric.profile().f(x[0]);
    let f2 = f * f;
    let s = x[1].sin();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, f2, 0.0, 0.0, 0.0, f2 * s * s)
}

fn shifted(x: [f64; 3], axis: usize, delta: f64) -> [f64; 3] {
    let mut y = x;
    y[axis] += delta;
    y
}

/// `Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} - ∂_l g_{ij})`.
fn christoffel(metric: &WarpedMetric, x: [f64; 3], h: f64) -> Christoffel {
    let g = components(metric, x);
    let ginv = g.try_inverse().expect("metric components invertible away from the pole");
    let dg: [Matrix3<f64>; 3] = std::array::from_fn(|axis| {
        (components(metric, shifted(x, axis, h)) - components(metric, shifted(x, axis, -h))) / (2.0 * h)
    });
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for l in 0..3 {
                    acc += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                gk[i][j] = 0.5 * acc;
            }
        }
    }
    gamma
}

/// Sectional curvature of the plane of the given kind at radius `r`.
pub fn fd_curvature_oracle(metric: &WarpedMetric, r: f64, plane: PlaneKind) -> Result<f64> {
    fd_curvature_oracle_with_step(metric, r, plane, FD_STEP)
}

/// [`fd_curvature_oracle`] with an explicit step `h`. Profiles with features
/// narrower than about `100 h` need a smaller step than the default.
pub fn fd_curvature_oracle_with_step(metric: &WarpedMetric, r: f64, plane: PlaneKind, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(crate::error::GeometryError::InvalidParameter(format!(
            "finite-difference step {h} must be positive"
        )));
    }
    let margin = 10.0 * h;
    if !(r >= margin) || r > metric.domain_end() - margin {
        return Err(domain(
            "fd_curvature_oracle",
            r,
            "too close to the pole or the domain end for the difference stencil",
        ));
    }
    let coarse = sectional(metric, r, plane, h);
    let fine = sectional(metric, r, plane, 0.5 * h);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn sectional(metric: &WarpedMetric, r: f64, plane: PlaneKind, h: f64) -> f64 {
    let x = [r, std::f64::consts::FRAC_PI_2, 0.0];
    let (i, j) = match plane {
        PlaneKind::Radial => (0, 1),
        PlaneKind::Spherical => (1, 2),
    };
    let gamma = christoffel(metric, x, h);
    let dgamma: [Christoffel; 3] = std::array::from_fn(|axis| {
        let plus = christoffel(metric, shifted(x, axis, h), h);
        let minus = christoffel(metric, shifted(x, axis, -h), h);
        let mut d = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    d[a][b][c] = (plus[a][b][c] - minus[a][b][c]) / (2.0 * h);
                }
            }
        }
        d
    });
    // R^ρ_{j i j} = ∂_i Γ^ρ_{jj} - ∂_j Γ^ρ_{ij} + Γ^ρ_{iλ} Γ^λ_{jj} - Γ^ρ_{jλ} Γ^λ_{ij}
    let riemann = |rho: usize| {
        let mut v = dgamma[i][rho][j][j] - dgamma[j][rho][i][j];
        for l in 0..3 {
            v += gamma[rho][i][l] * gamma[l][j][j] - gamma[rho][j][l] * gamma[l][i][j];
        }
        v
    };
    let g = components(metric, x);
    let numerator: f64 = (0..3).map(|rho| g[(i, rho)] * riemann(rho)).sum();
    let area = g[(i, i)] * g[(j, j)] - g[(i, j)] * g[(i, j)];
    numerator / area
}
