use serde::{Deserialize, Serialize};

use super::WarpedMetric;
use crate::grid::RadiusGrid;

/// Piecewise-linear interpolant through `(knot, value)` samples, held
/// constant outside the knot range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    /// `knots` must be strictly increasing and match `values` in length.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(knots.len(), values.len());
        assert!(!knots.is_empty());
        Self { knots, values }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn bracket(&self, r: f64) -> Option<usize> {
        let n = self.knots.len();
        if n == 1 || r <= self.knots[0] || r >= self.knots[n - 1] {
            return None;
        }
        Some(self.knots.partition_point(|k| *k <= r) - 1)
    }

    fn clamped(&self, r: f64) -> f64 {
        if r <= self.knots[0] {
            self.values[0]
        } else {
            self.values[self.values.len() - 1]
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self.bracket(r) {
            None => self.clamped(r),
            Some(i) => {
                let t = (r - self.knots[i]) / (self.knots[i + 1] - self.knots[i]);
                self.values[i] + t * (self.values[i + 1] - self.values[i])
            }
        }
    }

    /// Larger of the two bracketing samples; an upper envelope of the
    /// sampled function between knots.
    pub fn conservative(&self, r: f64) -> f64 {
        match self.bracket(r) {
            None => self.clamped(r),
            Some(i) => self.values[i].max(self.values[i + 1]),
        }
    }
}

/// Result of extracting `a - s(r) ≤ K ≤ a` from a metric on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureBand {
    pub bound_a: f64,
    pub upper_bound_ok: bool,
    /// Largest `max(K) - a` over the grid and where it occurs.
    pub worst_excess: f64,
    pub worst_radius: f64,
    pub pinch: PiecewiseLinear,
}

impl CurvatureBand {
    pub fn s_samples(&self) -> &[f64] {
        self.pinch.values()
    }
}

/// Grid slack for `max K ≤ a`.
pub(crate) fn upper_tolerance(a: f64) -> f64 {
    1e-9 * (1.0 + a.abs())
}

/// Samples `s(r) = max(0, a - min K)` and checks `max K ≤ a` at each radius.
/// Grid radii outside the metric's domain are skipped.
pub fn curvature_band(metric: &WarpedMetric, a: f64, grid: &RadiusGrid) -> CurvatureBand {
    let tol = upper_tolerance(a);
    let mut knots = Vec::with_capacity(grid.len());
    let mut s = Vec::with_capacity(grid.len());
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_radius = f64::NAN;
    for &r in grid.radii() {
        if !metric.profile().contains(r) {
            continue;
        }
        let k = metric.curvatures_unchecked(r);
        let excess = k.max() - a;
        if excess > worst_excess || excess.is_nan() {
            worst_excess = excess;
            worst_radius = r;
        }
        knots.push(r);
        s.push((a - k.min()).max(0.0));
    }
    if knots.is_empty() {
        knots.push(grid.first());
        s.push(f64::NAN);
    }
    CurvatureBand {
        bound_a: a,
        upper_bound_ok: worst_excess <= tol,
        worst_excess,
        worst_radius,
        pinch: PiecewiseLinear::new(knots, s),
    }
}
