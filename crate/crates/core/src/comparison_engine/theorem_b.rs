use super::checks::{certify_upper, equality_rigidity_check, key_lemma_check, monotonicity_check};
use super::{HypothesisName, PinchHypothesis, RigidityVerdict};
use crate::error::{GeometryError, Result};
use crate::grid::RadiusGrid;
use crate::warped_metrics::WarpedMetric;

/// Pinch threshold for "K = a on the boundary sphere".
const BOUNDARY_PINCH: f64 = 1e-6;

/// Local rigidity on a geodesic ball: `K ≤ a` inside and `K = a` on the
/// boundary sphere force `K ≡ a`.
///
/// The chain: certify `K ≤ a`; read `s` off the curvature band and require
/// it to vanish on the last tenth of the grid; check that `F` is
/// nondecreasing; check that the Key Lemma bound tends to 1 at the outer
/// radius; then run the equality case. Each unmet premise is reported as
/// `HypothesisUnmet` naming the link.
pub fn theorem_b_check(metric: &WarpedMetric, a: f64, radius: f64, grid: &RadiusGrid) -> Result<RigidityVerdict> {
    let n = metric.dimension();
    if n < 3 {
        return Err(GeometryError::Dimension(n, 3));
    }
    if a > 0.0 {
        let limit = std::f64::consts::FRAC_PI_2 / a.sqrt();
        if radius > limit * (1.0 + 1e-12) {
            return Err(GeometryError::HypothesisUnmet(format!(
                "radius {radius} exceeds π/(2√a) = {limit}"
            )));
        }
    }
    if grid.last() > radius {
        return Err(GeometryError::InvalidParameter(format!(
            "grid extends to {} beyond the ball radius {radius}",
            grid.last()
        )));
    }
    let band = certify_upper(metric, a, grid)?;

    let cutoff = grid.first() + 0.9 * (grid.last() - grid.first());
    let (outer_radii, outer_s): (Vec<f64>, Vec<f64>) = band
        .pinch
        .knots()
        .iter()
        .zip(band.s_samples())
        .filter(|(r, _)| **r >= cutoff)
        .map(|(r, s)| (*r, *s))
        .unzip();
    let boundary_pinch = outer_s.iter().copied().fold(0.0, f64::max);
    if !(boundary_pinch < BOUNDARY_PINCH) {
        return Err(GeometryError::HypothesisUnmet(format!(
            "K = a on the boundary sphere: pinch {boundary_pinch:e} does not vanish near r = {radius}"
        )));
    }

    let mono = monotonicity_check(metric, a, grid)?;
    let hyp = PinchHypothesis::from_band(&band, radius)?;
    let key = key_lemma_check(metric, &hyp, grid)?;
    let bound_at_end = key.bound.last().copied().flatten();
    let bound_to_one = bound_at_end.is_some_and(|b| (b - 1.0).abs() <= BOUNDARY_PINCH);

    let mut notes = Vec::new();
    if !mono.pass {
        notes.push(format!("F decreases at r = {}", mono.worst_radius));
    }
    if !key.pass {
        notes.push(format!("F exceeds the Key Lemma bound at r = {}", key.worst_radius));
    }
    if !bound_to_one {
        notes.push(format!("Key Lemma bound at the outer radius is {bound_at_end:?}, not 1"));
    }
    let eq = equality_rigidity_check(metric, a, radius, grid, 1e-4)?;
    if !eq.triggered {
        notes.push(format!("F at the outer radius is {}, not 1", eq.ratio_at_end));
    } else if !eq.pass {
        notes.push(format!("K deviates from a by {:e} at r = {}", eq.max_deviation, eq.worst_radius));
    }
    let forces = mono.pass && key.pass && bound_to_one && eq.triggered && eq.pass;
    Ok(RigidityVerdict {
        hypothesis_name: HypothesisName::TheoremB,
        condition_value: boundary_pinch,
        forces_rigidity: forces,
        conclusive: true,
        witness_radii: outer_radii,
        witness_values: outer_s,
        note: if notes.is_empty() {
            format!("chain closed: F ≡ 1 and K ≡ {a} within {:e}", eq.max_deviation)
        } else {
            notes.join("; ")
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped_metrics::RadialProfile;
    use std::f64::consts::PI;

    fn metric(spec: &str) -> WarpedMetric {
        WarpedMetric::new(RadialProfile::parse(spec).unwrap(), 3).unwrap()
    }

    #[test]
    fn sphere_chain_closes() {
        let m = metric("sin");
        let g = m.default_grid(1.0, 512).unwrap();
        let v = theorem_b_check(&m, 1.0, PI / 2.0, &g).unwrap();
        assert!(v.forces_rigidity, "{v:?}");
        assert_eq!(v.condition_value, 0.0);
    }

    #[test]
    fn hyperbolic_chain_closes() {
        let m = metric("sinh");
        let g = RadiusGrid::for_domain(2.0, 512, 20.0).unwrap();
        let v = theorem_b_check(&m, -1.0, 2.0, &g).unwrap();
        assert!(v.forces_rigidity, "{v:?}");
    }

    #[test]
    fn unmet_links_are_named() {
        let m = metric("sin");
        let g = RadiusGrid::for_domain(1.0, 64, 20.0).unwrap();
        match theorem_b_check(&m, 0.0, 1.0, &g) {
            Err(GeometryError::HypothesisUnmet(msg)) => assert!(msg.contains("upper curvature bound")),
            other => panic!("{other:?}"),
        }
        // K ≡ -4 ≤ -1 but the boundary pinch is 3, not 0
        let m = metric("model:-4");
        match theorem_b_check(&m, -1.0, 1.0, &g) {
            Err(GeometryError::HypothesisUnmet(msg)) => assert!(msg.contains("boundary")),
            other => panic!("{other:?}"),
        }
        assert!(theorem_b_check(&metric("sin"), 1.0, 2.0, &g).is_err());
    }
}
