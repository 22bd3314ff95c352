//! Comparison inequalities for warped metrics against a constant curvature
//! model, and the rigidity arguments assembled from them.
//!
//! Grid checks return a [`GridVerdict`]; an unmet hypothesis is an
//! [`GeometryError::HypothesisUnmet`] error, never a failed verdict.

mod checks;
mod pinch;
mod rigidity;
mod theorem_b;

pub use checks::{
    bonnet_myers_step, equality_rigidity_check, hessian_comparison_check, key_lemma_check,
    monotonicity_check, ratio_table, rescaled_volume_step, volume_upper_check, EqualityVerdict,
    StepVerdict,
};
pub use pinch::{PinchFunction, PinchHypothesis};
pub use rigidity::{rigidity_classifier, HypothesisName, RigidityVerdict, Theorem};
pub use theorem_b::theorem_b_check;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Slack on pointwise grid inequalities, relative.
pub const GRID_SLACK: f64 = 1e-9;
/// Slack on the assembled Key Lemma inequality, relative.
pub const CHAIN_SLACK: f64 = 1e-8;

/// `k(r) = 1 - f_a(r)² s(r)`.
pub fn k_function(hyp: &PinchHypothesis, r: f64) -> Result<f64> {
    hyp.check_radius(r)?;
    let fa = hyp.space().warp_function(r)?;
    Ok(1.0 - fa * fa * hyp.s(r))
}

/// `(1 - f_a(r)² s(r))^{-(n-1)/2}` where the base is positive, `None`
/// elsewhere.
pub fn key_lemma_bound(hyp: &PinchHypothesis, n: usize, r: f64) -> Result<Option<f64>> {
    let k = k_function(hyp, r)?;
    Ok(bound_from_k(k, n))
}

pub(crate) fn bound_from_k(k: f64, n: usize) -> Option<f64> {
    if k > 0.0 {
        Some(k.powf(-((n as f64) - 1.0) / 2.0))
    } else {
        None
    }
}

/// Pointwise verdict of a grid inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridVerdict {
    pub check: String,
    pub pass: bool,
    pub radii: Vec<f64>,
    /// Left-hand side per radius.
    pub values: Vec<f64>,
    /// Right-hand side per radius; `None` where undefined.
    pub bound: Vec<Option<f64>>,
    /// Smallest normalised slack `(rhs - lhs)/scale`; negative on failure.
    pub worst_margin: f64,
    pub worst_radius: f64,
}

impl GridVerdict {
    pub(crate) fn new(check: &str) -> Self {
        Self {
            check: check.into(),
            pass: true,
            radii: Vec::new(),
            values: Vec::new(),
            bound: Vec::new(),
            worst_margin: f64::INFINITY,
            worst_radius: f64::NAN,
        }
    }

    /// Records `lhs ≤ rhs` with `margin` already normalised, failing when
    /// `margin < -slack`.
    pub(crate) fn record(&mut self, r: f64, lhs: f64, rhs: Option<f64>, margin: Option<f64>, slack: f64) {
        self.radii.push(r);
        self.values.push(lhs);
        self.bound.push(rhs);
        if let Some(m) = margin {
            if m < self.worst_margin || m.is_nan() {
                self.worst_margin = m;
                self.worst_radius = r;
            }
            if !(m >= -slack) {
                self.pass = false;
            }
        }
    }

    pub fn undefined_count(&self) -> usize {
        self.bound.iter().filter(|b| b.is_none()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_and_bound_examples() {
        let hyp = PinchHypothesis::new(-1.0, PinchFunction::Exponential { c: 1.0, alpha: 3.0 }, f64::INFINITY).unwrap();
        // independent: sinh(1)² e^{-3} via exp
        let sinh1 = 0.5 * (1f64.exp() - (-1f64).exp());
        let k = 1.0 - sinh1 * sinh1 * (-3f64).exp();
        assert_relative_eq!(k, 0.931_24, epsilon = 1e-5);
        assert_relative_eq!(k_function(&hyp, 1.0).unwrap(), k, max_relative = 1e-14);
        let b = key_lemma_bound(&hyp, 3, 1.0).unwrap().unwrap();
        assert_relative_eq!(b, 1.0 / k, max_relative = 1e-14);
        assert_relative_eq!(b, 1.0738, epsilon = 1e-4);

        let flat = PinchHypothesis::new(0.0, PinchFunction::Power { c: 1.0, p: 3.0 }, f64::INFINITY).unwrap();
        assert_relative_eq!(k_function(&flat, 2.0).unwrap(), 0.5, max_relative = 1e-15);

        for a in [-2.0, 0.0, 0.5] {
            let zero = PinchHypothesis::new(a, PinchFunction::Zero, 1.0).unwrap();
            assert_eq!(k_function(&zero, 0.7).unwrap(), 1.0);
            assert_eq!(key_lemma_bound(&zero, 4, 0.7).unwrap(), Some(1.0));
        }
    }

    #[test]
    fn bound_undefined_when_k_nonpositive() {
        let hyp = PinchHypothesis::new(-1.0, PinchFunction::Exponential { c: 1.0, alpha: 0.0 }, f64::INFINITY).unwrap();
        assert_eq!(key_lemma_bound(&hyp, 3, 5.0).unwrap(), None);
        assert!(k_function(&hyp, 5.0).unwrap() <= 0.0);
    }

    #[test]
    fn hypothesis_domain() {
        assert!(PinchHypothesis::new(4.0, PinchFunction::Zero, 1.0).is_err());
        assert!(PinchHypothesis::new(4.0, PinchFunction::Zero, 0.78).is_ok());
        let hyp = PinchHypothesis::new(-1.0, PinchFunction::Zero, 2.0).unwrap();
        assert!(k_function(&hyp, 2.5).is_err());
    }

    #[test]
    fn pinch_parsing() {
        assert!(matches!(PinchFunction::parse("zero").unwrap(), PinchFunction::Zero));
        assert_eq!(PinchFunction::parse("exp:2:3").unwrap().eval(0.0), 2.0);
        assert_eq!(PinchFunction::parse("power:1:2").unwrap().eval(2.0), 0.25);
        assert!(PinchFunction::parse("exp:-1:3").is_err());
        assert!(PinchFunction::parse("cubic:1").is_err());
    }
}
