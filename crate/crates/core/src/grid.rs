use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};

pub const DEFAULT_POINTS: usize = 512;

/// Upper radius used when the domain is unbounded.
pub const UNBOUNDED_RADIUS: f64 = 20.0;

/// Sorted sample radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusGrid {
    radii: Vec<f64>,
}

impl RadiusGrid {
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if points < 2 || !(lo > 0.0) || !(hi > lo) || !hi.is_finite() {
            return Err(GeometryError::InvalidParameter(format!(
                "grid [{lo}, {hi}] with {points} points"
            )));
        }
        let step = (hi - lo) / (points - 1) as f64;
        let mut radii: Vec<f64> = (0..points).map(|i| lo + step * i as f64).collect();
        radii[points - 1] = hi;
        Ok(Self { radii })
    }

    pub fn from_radii(mut radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(GeometryError::InvalidParameter("grid radii must be positive and finite".into()));
        }
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        Ok(Self { radii })
    }

    /// `points` uniform radii on `[R·1e-3, R·(1-1e-3)]`, or on `[1e-3, cap]`
    /// when `R` is infinite.
    pub fn for_domain(domain_end: f64, points: usize, unbounded_cap: f64) -> Result<Self> {
        if domain_end.is_finite() {
            Self::uniform(domain_end * 1e-3, domain_end * (1.0 - 1e-3), points)
        } else {
            Self::uniform(1e-3, unbounded_cap.min(UNBOUNDED_RADIUS), points)
        }
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.radii[0]
    }

    pub fn last(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }
}
