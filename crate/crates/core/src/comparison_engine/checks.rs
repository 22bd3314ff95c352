use serde::{Deserialize, Serialize};

use super::{bound_from_k, k_function, GridVerdict, PinchHypothesis, CHAIN_SLACK, GRID_SLACK};
use crate::error::{GeometryError, Result};
use crate::grid::RadiusGrid;
use crate::model_spaces::{unit_sphere_volume, SpaceForm};
use crate::quadrature::{adaptive_simpson, SimpsonConfig};
use crate::warped_metrics::{curvature_band, CurvatureBand, WarpedMetric};

/// Extracts the band and fails with `HypothesisUnmet` unless `K ≤ a` holds
/// on the grid.
pub(crate) fn certify_upper(metric: &WarpedMetric, a: f64, grid: &RadiusGrid) -> Result<CurvatureBand> {
    let band = curvature_band(metric, a, grid);
    if band.upper_bound_ok {
        Ok(band)
    } else {
        Err(GeometryError::HypothesisUnmet(format!(
            "upper curvature bound K <= {a} fails: max K - a = {:e} at r = {}",
            band.worst_excess, band.worst_radius
        )))
    }
}

fn model(metric: &WarpedMetric, a: f64) -> Result<SpaceForm> {
    SpaceForm::new(a, metric.dimension())
}

/// `F(r) = A(r) / A_a(r)`.
pub(crate) fn area_ratio(metric: &WarpedMetric, space: &SpaceForm, r: f64) -> Result<f64> {
    Ok(metric.sphere_area(r)? / space.sphere_area(r)?)
}

/// Tabulated `F`, `k` and the Key Lemma bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub radii: Vec<f64>,
    pub ratio_f: Vec<f64>,
    pub key_bound: Vec<Option<f64>>,
    pub k_values: Vec<f64>,
}

pub fn ratio_table(metric: &WarpedMetric, hyp: &PinchHypothesis, grid: &RadiusGrid) -> Result<RatioTable> {
    let space = model(metric, hyp.bound_a())?;
    let n = metric.dimension();
    let mut t = RatioTable {
        radii: Vec::with_capacity(grid.len()),
        ratio_f: Vec::with_capacity(grid.len()),
        key_bound: Vec::with_capacity(grid.len()),
        k_values: Vec::with_capacity(grid.len()),
    };
    for &r in grid.radii() {
        let k = k_function(hyp, r)?;
        t.radii.push(r);
        t.ratio_f.push(area_ratio(metric, &space, r)?);
        t.k_values.push(k);
        t.key_bound.push(bound_from_k(k, n));
    }
    Ok(t)
}

/// `F(r) ≤ (1 - f_a² s)^{-(n-1)/2}` at every grid radius where the bound
/// is defined. The caller is responsible for certifying the pinching.
pub fn key_lemma_check(metric: &WarpedMetric, hyp: &PinchHypothesis, grid: &RadiusGrid) -> Result<GridVerdict> {
    let table = ratio_table(metric, hyp, grid)?;
    let mut v = GridVerdict::new("key_lemma_bound");
    for ((&r, &f), bound) in table.radii.iter().zip(&table.ratio_f).zip(&table.key_bound) {
        let margin = bound.map(|b| (b - f) / b);
        v.record(r, f, *bound, margin, CHAIN_SLACK);
    }
    Ok(v)
}

/// Principal curvature `f'/f` of the distance spheres against `λ_a`.
pub fn hessian_comparison_check(metric: &WarpedMetric, a: f64, grid: &RadiusGrid) -> Result<GridVerdict> {
    certify_upper(metric, a, grid)?;
    let space = model(metric, a)?;
    let mut v = GridVerdict::new("hessian_comparison_check");
    for &r in grid.radii() {
        let lambda = metric.shape_operator_eigenvalue(r)?;
        let lower = space.hessian_eigen_lower(r)?;
        let margin = (lambda - lower) / lower.abs().max(1.0);
        v.record(r, lambda, Some(lower), Some(margin), GRID_SLACK);
    }
    Ok(v)
}

/// `F` is nondecreasing along the grid: `F[i+1] - F[i] ≥ -1e-9 F[i]`.
pub fn monotonicity_check(metric: &WarpedMetric, a: f64, grid: &RadiusGrid) -> Result<GridVerdict> {
    certify_upper(metric, a, grid)?;
    let space = model(metric, a)?;
    let mut v = GridVerdict::new("monotonicity_check");
    let mut prev: Option<f64> = None;
    for &r in grid.radii() {
        let f = area_ratio(metric, &space, r)?;
        match prev {
            None => v.record(r, f, None, None, GRID_SLACK),
            Some(p) => v.record(r, f, Some(p), Some((f - p) / p), GRID_SLACK),
        }
        prev = Some(f);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualityVerdict {
    /// Whether `F(R(1 - 1e-3)) ≤ 1 + 1e-6`, i.e. the equality case applies.
    pub triggered: bool,
    pub ratio_at_end: f64,
    /// `max |K - a|` over the grid; only computed when triggered.
    pub max_deviation: f64,
    pub worst_radius: f64,
    pub pass: bool,
}

/// Equality case of the sphere-area comparison: if `F → 1` at the outer
/// radius then every sectional curvature equals `a`, checked to `tol`.
pub fn equality_rigidity_check(
    metric: &WarpedMetric,
    a: f64,
    radius: f64,
    grid: &RadiusGrid,
    tol: f64,
) -> Result<EqualityVerdict> {
    certify_upper(metric, a, grid)?;
    let space = model(metric, a)?;
    let ratio_at_end = area_ratio(metric, &space, radius * (1.0 - 1e-3))?;
    let triggered = ratio_at_end <= 1.0 + 1e-6;
    let mut out = EqualityVerdict {
        triggered,
        ratio_at_end,
        max_deviation: f64::NAN,
        worst_radius: f64::NAN,
        pass: true,
    };
    if triggered {
        let mut worst = 0.0f64;
        for &r in grid.radii() {
            let k = metric.curvatures(r)?;
            let dev = (k.k_radial - a).abs().max((k.k_spherical - a).abs());
            if dev > worst || dev.is_nan() {
                worst = dev;
                out.worst_radius = r;
            }
        }
        out.max_deviation = worst;
        out.pass = worst <= tol;
    }
    Ok(out)
}

fn cumulative_integral(integrand: impl Fn(f64) -> f64, radii: &[f64]) -> Vec<f64> {
    let cfg = SimpsonConfig::default();
    let mut acc = 0.0;
    let mut prev = 0.0;
    radii
        .iter()
        .map(|&r| {
            acc += adaptive_simpson(&integrand, prev, r, cfg);
            prev = r;
            acc
        })
        .collect()
}

/// `V(r) ≤ V_a(r)` given the Ricci lower bound `(n-1)a`, which is certified
/// first on the grid from the radial and tangential Ricci curvatures.
pub fn volume_upper_check(metric: &WarpedMetric, a_ricci: f64, grid: &RadiusGrid) -> Result<GridVerdict> {
    let n = metric.dimension();
    let target = (n as f64 - 1.0) * a_ricci;
    let slack = GRID_SLACK * (1.0 + target.abs());
    for &r in grid.radii() {
        let (radial, tangential) = metric.ricci(r)?;
        if radial < target - slack || tangential < target - slack {
            return Err(GeometryError::HypothesisUnmet(format!(
                "Ricci >= (n-1)a = {target} fails at r = {r} (radial {radial}, tangential {tangential})"
            )));
        }
    }
    let space = model(metric, a_ricci)?;
    space.warp_function(grid.last())?;
    let omega = unit_sphere_volume(n)?;
    let p = (n - 1) as i32;
    let w = metric.profile().warp();
    let vol = cumulative_integral(|t| omega * w.value(t).powi(p), grid.radii());
    let vol_model = cumulative_integral(|t| omega * space.warp_unchecked(t).powi(p), grid.radii());
    let mut v = GridVerdict::new("volume_upper_check");
    for ((&r, &lhs), &rhs) in grid.radii().iter().zip(&vol).zip(&vol_model) {
        v.record(r, lhs, Some(rhs), Some((rhs - lhs) / rhs), GRID_SLACK);
    }
    Ok(v)
}

/// One proof step at a single radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepVerdict {
    /// `k(r) ≤ 0`: the step does not apply.
    Undefined { k: f64 },
    Checked { lhs: f64, rhs: f64, pass: bool },
}

impl StepVerdict {
    pub fn passed(&self) -> Option<bool> {
        match self {
            Self::Undefined { .. } => None,
            Self::Checked { pass, .. } => Some(*pass),
        }
    }
}

/// Diameter bound on the rescaled sphere `N = (S_p(r), f_a(r)^{-2} g)`: for
/// a warped metric `N` is round with diameter `π f(r)/f_a(r)`, to be compared
/// with `π k(r)^{-1/2}`.
pub fn bonnet_myers_step(metric: &WarpedMetric, hyp: &PinchHypothesis, r: f64) -> Result<StepVerdict> {
    let k = k_function(hyp, r)?;
    if !(k > 0.0) {
        return Ok(StepVerdict::Undefined { k });
    }
    let f = metric.profile().f(r);
    metric.curvatures(r)?;
    let fa = hyp.space().warp_function(r)?;
    let lhs = f / fa;
    let rhs = k.powf(-0.5);
    Ok(StepVerdict::Checked {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + GRID_SLACK),
    })
}

/// Volume of the rescaled sphere `f_a(r)^{-(n-1)} A(r)` against the volume
/// bound `k(r)^{-(n-1)/2} ω_n` for a manifold of diameter `≤ π k^{-1/2}`.
pub fn rescaled_volume_step(metric: &WarpedMetric, hyp: &PinchHypothesis, r: f64) -> Result<StepVerdict> {
    let k = k_function(hyp, r)?;
    if !(k > 0.0) {
        return Ok(StepVerdict::Undefined { k });
    }
    let n = metric.dimension();
    let area = metric.sphere_area(r)?;
    let fa = hyp.space().warp_function(r)?;
    let lhs = area / fa.powi((n - 1) as i32);
    let rhs = k.powf(-((n as f64) - 1.0) / 2.0) * unit_sphere_volume(n)?;
    Ok(StepVerdict::Checked {
        lhs,
        rhs,
        pass: lhs <= rhs * (1.0 + GRID_SLACK),
    })
}
