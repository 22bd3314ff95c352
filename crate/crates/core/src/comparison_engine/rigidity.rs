//! Decay conditions on the pinch function that force rigidity.
//!
//! Limits at infinity are estimated from samples at `r = 10, 20, 40` with an
//! Aitken extrapolation; the integral condition from quadrature on
//! `[1, 100]` plus a tail model fitted on `[50, 100]`. These are numeric
//! evidence, not proofs.

use serde::{Deserialize, Serialize};

use super::PinchHypothesis;
use crate::error::{GeometryError, Result};
use crate::quadrature::{adaptive_simpson, SimpsonConfig};

const LIMIT_RADII: [f64; 3] = [10.0, 20.0, 40.0];
const TAIL_RADII: [f64; 3] = [50.0, 75.0, 100.0];
const INTEGRAL_START: f64 = 1.0;
/// Extrapolated limit counts as zero below this fraction of the sample scale.
const ZERO_LIMIT: f64 = 1e-6;
/// Allowed relative spread of the two tail-rate estimates.
const RATE_STABILITY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// `-1 - s ≤ K ≤ -1` with `e^{2r} s(r) → 0`.
    A,
    /// `-s ≤ K ≤ 0` with `r² s(r) → 0` (odd n) or `∫ s < ∞` (even n).
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisName {
    TheoremA,
    #[serde(rename = "Theorem1-odd")]
    Theorem1Odd,
    #[serde(rename = "Theorem1-even")]
    Theorem1Even,
    TheoremB,
}

impl HypothesisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::TheoremA => "TheoremA",
            Self::Theorem1Odd => "Theorem1-odd",
            Self::Theorem1Even => "Theorem1-even",
            Self::TheoremB => "TheoremB",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityVerdict {
    pub hypothesis_name: HypothesisName,
    /// Extrapolated limit, integral estimate, or (Theorem B) the largest
    /// pinch sample near the boundary.
    pub condition_value: f64,
    pub forces_rigidity: bool,
    /// False when the samples admit no clean decay model.
    pub conclusive: bool,
    pub witness_radii: Vec<f64>,
    pub witness_values: Vec<f64>,
    pub note: String,
}

pub fn rigidity_classifier(hyp: &PinchHypothesis, n: usize, theorem: Theorem) -> Result<RigidityVerdict> {
    if n < 3 {
        return Err(GeometryError::Dimension(n, 3));
    }
    if hyp.domain_end().is_finite() {
        return Err(GeometryError::InvalidParameter(
            "rigidity classification needs an unbounded domain".into(),
        ));
    }
    match theorem {
        Theorem::A => {
            expect_bound(hyp, -1.0)?;
            Ok(limit_verdict(hyp, HypothesisName::TheoremA, |r| (2.0 * r).exp()))
        }
        Theorem::One => {
            expect_bound(hyp, 0.0)?;
            if n % 2 == 1 {
                Ok(limit_verdict(hyp, HypothesisName::Theorem1Odd, |r| r * r))
            } else {
                Ok(integral_verdict(hyp))
            }
        }
    }
}

fn expect_bound(hyp: &PinchHypothesis, a: f64) -> Result<()> {
    if hyp.bound_a() == a {
        Ok(())
    } else {
        Err(GeometryError::InvalidParameter(format!(
            "classifier expects bound a = {a}, got {}",
            hyp.bound_a()
        )))
    }
}

/// Aitken-extrapolated limit of three samples at geometrically spaced radii.
/// `None` when the samples are not monotone.
fn extrapolate(v: [f64; 3]) -> Option<(f64, &'static str)> {
    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    if d1 == 0.0 && d2 == 0.0 {
        return Some((v[2], "constant samples"));
    }
    if d1 * d2 < 0.0 {
        return None;
    }
    if d1 >= 0.0 && d2 >= 0.0 {
        if d2 >= d1 {
            return Some((f64::INFINITY, "samples grow without deceleration"));
        }
    }
    let denom = d2 - d1;
    let limit = v[2] - d2 * d2 / denom;
    Some((limit.max(0.0), "Aitken extrapolation"))
}

fn limit_verdict(hyp: &PinchHypothesis, name: HypothesisName, weight: impl Fn(f64) -> f64) -> RigidityVerdict {
    let samples = LIMIT_RADII.map(|r| weight(r) * hyp.s(r));
    let scale = samples.iter().copied().fold(0.0, f64::max);
    let mut verdict = RigidityVerdict {
        hypothesis_name: name,
        condition_value: f64::NAN,
        forces_rigidity: false,
        conclusive: false,
        witness_radii: LIMIT_RADII.to_vec(),
        witness_values: samples.to_vec(),
        note: String::new(),
    };
    if samples.iter().any(|v| !v.is_finite() || *v < 0.0) {
        verdict.note = "non-finite or negative samples".into();
        return verdict;
    }
    match extrapolate(samples) {
        None => verdict.note = "samples are not monotone".into(),
        Some((limit, how)) => {
            verdict.condition_value = limit;
            verdict.conclusive = true;
            verdict.forces_rigidity = limit <= ZERO_LIMIT * scale;
            verdict.note = how.into();
        }
    }
    verdict
}

fn stable(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).abs() <= RATE_STABILITY * a.abs().max(b.abs())
}

fn integral_verdict(hyp: &PinchHypothesis) -> RigidityVerdict {
    let cfg = SimpsonConfig::default();
    let body = adaptive_simpson(|r| hyp.s(r), INTEGRAL_START, TAIL_RADII[2], cfg);
    let t = TAIL_RADII.map(|r| hyp.s(r));
    let mut verdict = RigidityVerdict {
        hypothesis_name: HypothesisName::Theorem1Even,
        condition_value: f64::NAN,
        forces_rigidity: false,
        conclusive: false,
        witness_radii: TAIL_RADII.to_vec(),
        witness_values: t.to_vec(),
        note: String::new(),
    };
    if !body.is_finite() || t.iter().any(|v| !v.is_finite() || *v < 0.0) {
        verdict.note = "non-finite or negative samples".into();
        return verdict;
    }
    let finish = |v: &mut RigidityVerdict, tail: f64, note: String| {
        v.conclusive = true;
        v.condition_value = body + tail;
        v.forces_rigidity = tail.is_finite();
        v.note = note;
    };
    if t.iter().all(|v| *v == 0.0) {
        finish(&mut verdict, 0.0, "pinch vanishes on the tail".into());
        return verdict;
    }
    if t[0] < t[1] || t[1] < t[2] {
        if t[0] <= t[1] && t[1] <= t[2] {
            finish(&mut verdict, f64::INFINITY, "pinch does not decay".into());
        } else {
            verdict.note = "tail samples are not monotone".into();
        }
        return verdict;
    }
    if t[2] == 0.0 {
        verdict.note = "pinch vanishes inside the tail window".into();
        return verdict;
    }
    let (w1, w2) = (TAIL_RADII[1] - TAIL_RADII[0], TAIL_RADII[2] - TAIL_RADII[1]);
    let q1 = (t[0] / t[1]).ln() / w1;
    let q2 = (t[1] / t[2]).ln() / w2;
    if q1 > 0.0 && stable(q1, q2) {
        finish(&mut verdict, t[2] / q2, format!("exponential tail, rate {q2:.6}"));
        return verdict;
    }
    let p1 = (t[0] / t[1]).ln() / (TAIL_RADII[1] / TAIL_RADII[0]).ln();
    let p2 = (t[1] / t[2]).ln() / (TAIL_RADII[2] / TAIL_RADII[1]).ln();
    if stable(p1, p2) || (p1.abs() < 1e-12 && p2.abs() < 1e-12) {
        let p = 0.5 * (p1 + p2);
        if p > 1.0 + 1e-6 {
            finish(&mut verdict, t[2] * TAIL_RADII[2] / (p - 1.0), format!("power tail, exponent {p:.6}"));
        } else {
            finish(&mut verdict, f64::INFINITY, format!("power tail, exponent {p:.6} <= 1 diverges"));
        }
        return verdict;
    }
    verdict.note = format!("unstable tail rate (exp {q1:.4}/{q2:.4}, power {p1:.4}/{p2:.4})");
    verdict
}
