use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::model_spaces::SpaceForm;
use crate::warped_metrics::{CurvatureBand, PiecewiseLinear};

/// Nonnegative pinch function `s(r)` in `a - s(r) ≤ K ≤ a`.
#[derive(Clone)]
pub enum PinchFunction {
    Zero,
    /// `c·e^{-alpha r}`
    Exponential { c: f64, alpha: f64 },
    /// `c·r^{-p}`
    Power { c: f64, p: f64 },
    Sampled(PiecewiseLinear),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for PinchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("Zero"),
            Self::Exponential { c, alpha } => write!(f, "Exponential({c}, {alpha})"),
            Self::Power { c, p } => write!(f, "Power({c}, {p})"),
            Self::Sampled(p) => write!(f, "Sampled({} knots)", p.knots().len()),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl PinchFunction {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Exponential { c, alpha } => c * (-alpha * r).exp(),
            Self::Power { c, p } => c * r.powf(-p),
            Self::Sampled(p) => p.eval(r),
            Self::Custom(f) => f(r),
        }
    }

    /// Parses `zero`, `exp:<c>:<alpha>` or `power:<c>:<p>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| GeometryError::Parse(format!("'{s}' is not a number in pinch '{spec}'")))
        };
        let out = match parts.as_slice() {
            ["zero"] => Self::Zero,
            ["exp", c, alpha] => Self::Exponential {
                c: num(c)?,
                alpha: num(alpha)?,
            },
            ["power", c, p] => Self::Power { c: num(c)?, p: num(p)? },
            _ => return Err(GeometryError::Parse(format!("unknown pinch '{spec}'"))),
        };
        match out {
            Self::Exponential { c, .. } | Self::Power { c, .. } if c < 0.0 => Err(GeometryError::InvalidParameter(
                format!("pinch coefficient {c} must be nonnegative"),
            )),
            other => Ok(other),
        }
    }

    /// `t·s`.
    pub fn scaled(&self, t: f64) -> Self {
        match self {
            Self::Zero => Self::Zero,
            Self::Exponential { c, alpha } => Self::Exponential { c: c * t, alpha: *alpha },
            Self::Power { c, p } => Self::Power { c: c * t, p: *p },
            Self::Sampled(p) => Self::Sampled(PiecewiseLinear::new(
                p.knots().to_vec(),
                p.values().iter().map(|v| v * t).collect(),
            )),
            Self::Custom(f) => {
                let f = f.clone();
                Self::Custom(Arc::new(move |r| t * f(r)))
            }
        }
    }
}

/// Curvature pinching `a - s(r) ≤ K ≤ a` on the ball of radius `domain_end`.
#[derive(Debug, Clone)]
pub struct PinchHypothesis {
    bound_a: f64,
    pinch: PinchFunction,
    domain_end: f64,
}

impl PinchHypothesis {
    pub fn new(bound_a: f64, pinch: PinchFunction, domain_end: f64) -> Result<Self> {
        if !bound_a.is_finite() {
            return Err(GeometryError::InvalidParameter(format!("bound {bound_a} is not finite")));
        }
        if !(domain_end > 0.0) {
            return Err(GeometryError::InvalidParameter(format!("domain end {domain_end} must be positive")));
        }
        if bound_a > 0.0 {
            let limit = std::f64::consts::FRAC_PI_2 / bound_a.sqrt();
            if domain_end > limit * (1.0 + 1e-12) {
                return Err(GeometryError::InvalidParameter(format!(
                    "domain end {domain_end} exceeds π/(2√a) = {limit}"
                )));
            }
        }
        Ok(Self {
            bound_a,
            pinch,
            domain_end,
        })
    }

    /// Hypothesis realised by an extracted curvature band.
    pub fn from_band(band: &CurvatureBand, domain_end: f64) -> Result<Self> {
        Self::new(band.bound_a, PinchFunction::Sampled(band.pinch.clone()), domain_end)
    }

    pub fn bound_a(&self) -> f64 {
        self.bound_a
    }

    pub fn pinch(&self) -> &PinchFunction {
        &self.pinch
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn s(&self, r: f64) -> f64 {
        self.pinch.eval(r)
    }

    pub(crate) fn space(&self) -> SpaceForm {
        SpaceForm::new(self.bound_a, 2).expect("finite bound")
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<()> {
        if r > 0.0 && r <= self.domain_end {
            Ok(())
        } else {
            Err(GeometryError::Domain {
                op: "pinch hypothesis",
                r,
                reason: format!("outside (0, {}]", self.domain_end),
            })
        }
    }
}
