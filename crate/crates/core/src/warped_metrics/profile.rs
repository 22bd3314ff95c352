//! Radial warp profiles `f` for metrics `dr² + f(r)² g₀`.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::model_spaces::SpaceForm;

/// A warp function with its first two derivatives.
pub trait Warp: Send + Sync + fmt::Debug {
    fn value(&self, r: f64) -> f64;
    fn first(&self, r: f64) -> f64;
    fn second(&self, r: f64) -> f64;

    /// `1 - f'(r)²`. Implementors with a cancellation-free closed form
    /// should override this; it feeds the tangential curvature.
    fn one_minus_slope_sq(&self, r: f64) -> f64 {
        let d = self.first(r);
        (1.0 - d) * (1.0 + d)
    }
}

/// Warp function of a space form.
#[derive(Debug, Clone, Copy)]
pub struct ModelWarp(pub SpaceForm);

impl Warp for ModelWarp {
    fn value(&self, r: f64) -> f64 {
        self.0.warp_unchecked(r)
    }
    fn first(&self, r: f64) -> f64 {
        self.0.warp_derivative_unchecked(r)
    }
    fn second(&self, r: f64) -> f64 {
        -self.0.curvature() * self.0.warp_unchecked(r)
    }
    fn one_minus_slope_sq(&self, r: f64) -> f64 {
        self.0.one_minus_slope_sq_unchecked(r)
    }
}

/// `f(r) = base(r)·(1 + eps·e^{-beta r})`.
#[derive(Debug, Clone)]
pub struct PerturbedWarp {
    pub base: Arc<dyn Warp>,
    pub eps: f64,
    pub beta: f64,
}

impl PerturbedWarp {
    fn factor(&self, r: f64) -> (f64, f64, f64) {
        let e = self.eps * (-self.beta * r).exp();
        (1.0 + e, -self.beta * e, self.beta * self.beta * e)
    }
}

impl Warp for PerturbedWarp {
    fn value(&self, r: f64) -> f64 {
        self.base.value(r) * self.factor(r).0
    }
    fn first(&self, r: f64) -> f64 {
        let (g, g1, _) = self.factor(r);
        self.base.first(r) * g + self.base.value(r) * g1
    }
    fn second(&self, r: f64) -> f64 {
        let (g, g1, g2) = self.factor(r);
        self.base.second(r) * g + 2.0 * self.base.first(r) * g1 + self.base.value(r) * g2
    }
    fn one_minus_slope_sq(&self, r: f64) -> f64 {
        // 1 - (b'g + bg')² = (1 - b'²)g² + (1 - g²) - 2bb'gg' - b²g'²
        let (g, g1, _) = self.factor(r);
        let b = self.base.value(r);
        let b1 = self.base.first(r);
        self.base.one_minus_slope_sq(r) * g * g + (1.0 - g) * (1.0 + g)
            - 2.0 * b * b1 * g * g1
            - b * b * g1 * g1
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Warp given by closures for `f`, `f'` and `f''`.
#[derive(Clone)]
pub struct ClosureWarp {
    pub f: ScalarFn,
    pub df: ScalarFn,
    pub d2f: ScalarFn,
}

impl fmt::Debug for ClosureWarp {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str("ClosureWarp")
    }
}

impl Warp for ClosureWarp {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn first(&self, r: f64) -> f64 {
        (self.df)(r)
    }
    fn second(&self, r: f64) -> f64 {
        (self.d2f)(r)
    }
}

/// Warp known only through `f`; derivatives come from 4th-order centered
/// differences with step `max(1e-5, 1e-7 r)`.
#[derive(Clone)]
pub struct DifferencedWarp {
    pub f: ScalarFn,
}

impl fmt::Debug for DifferencedWarp {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.write_str("DifferencedWarp")
    }
}

impl DifferencedWarp {
    fn step(r: f64) -> f64 {
        1e-5f64.max(1e-7 * r.abs())
    }
}

impl Warp for DifferencedWarp {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }
    fn first(&self, r: f64) -> f64 {
        let h = Self::step(r);
        let f = &self.f;
        (f(r - 2.0 * h) - 8.0 * f(r - h) + 8.0 * f(r + h) - f(r + 2.0 * h)) / (12.0 * h)
    }
    fn second(&self, r: f64) -> f64 {
        let h = Self::step(r);
        let f = &self.f;
        (-f(r - 2.0 * h) + 16.0 * f(r - h) - 30.0 * f(r) + 16.0 * f(r + h) - f(r + 2.0 * h))
            / (12.0 * h * h)
    }
}

/// One row `(r, f, f', f'')` of a tabulated profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub r: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// Tabulated profile interpolated piecewise by Hermite polynomials matching
/// `f`, `f'` and `f''` at both knots, so the three columns stay consistent.
#[derive(Debug, Clone)]
pub struct TableWarp {
    rows: Vec<TableRow>,
}

impl TableWarp {
    pub fn new(rows: Vec<TableRow>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(GeometryError::Parse("profile table needs at least two rows".into()));
        }
        for w in rows.windows(2) {
            if !(w[1].r > w[0].r) {
                return Err(GeometryError::Parse(format!(
                    "table radii must increase strictly (at r = {})",
                    w[1].r
                )));
            }
        }
        if rows.iter().any(|row| {
            !(row.r.is_finite() && row.f.is_finite() && row.df.is_finite() && row.d2f.is_finite())
        }) {
            return Err(GeometryError::Parse("table contains non-finite entries".into()));
        }
        Ok(Self { rows })
    }

    /// Parses CSV text with rows `r,f,f',f''`; a non-numeric first line is
    /// treated as a header.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> =
                fields.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == 4 => rows.push(TableRow {
                    r: v[0],
                    f: v[1],
                    df: v[2],
                    d2f: v[3],
                }),
                Err(_) if rows.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(GeometryError::Parse(format!(
                        "line {}: expected four numeric columns r,f,f',f''",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[TableRow] {
        &self.rows
    }

    fn locate(&self, r: f64) -> usize {
        let idx = self.rows.partition_point(|row| row.r <= r);
        idx.clamp(1, self.rows.len() - 1) - 1
    }

    /// Value and first two derivatives of the quintic Hermite piece.
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let i = self.locate(r);
        let (p, q) = (self.rows[i], self.rows[i + 1]);
        let h = q.r - p.r;
        let t = (r - p.r) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        // quintic Hermite basis and derivatives in t
        let b = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
        ];
        let db = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
        ];
        let d2b = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            3.0 * t - 12.0 * t2 + 10.0 * t3,
        ];
        let c = [p.f, h * p.df, h * h * p.d2f, q.f, h * q.df, h * h * q.d2f];
        let dot = |w: &[f64; 6]| w.iter().zip(c.iter()).map(|(x, y)| x * y).sum::<f64>();
        (dot(&b), dot(&db) / h, dot(&d2b) / (h * h))
    }
}

impl Warp for TableWarp {
    fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }
    fn first(&self, r: f64) -> f64 {
        self.eval(r).1
    }
    fn second(&self, r: f64) -> f64 {
        self.eval(r).2
    }
}

/// A warp function together with its domain `(0, R)` and pole behaviour.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    warp: Arc<dyn Warp>,
    domain_end: f64,
    pole_complete: bool,
    label: String,
}

impl RadialProfile {
    pub fn new(warp: Arc<dyn Warp>, domain_end: f64, pole_complete: bool, label: impl Into<String>) -> Result<Self> {
        if !(domain_end > 0.0) {
            return Err(GeometryError::InvalidParameter(format!(
                "domain end {domain_end} must be positive"
            )));
        }
        Ok(Self {
            warp,
            domain_end,
            pole_complete,
            label: label.into(),
        })
    }

    /// `f(r) = r`.
    pub fn euclid() -> Self {
        Self::model(SpaceForm::new(0.0, 2).expect("valid")).with_label("euclid")
    }

    /// `f(r) = sin r` on `(0, π)`.
    pub fn sphere() -> Self {
        Self::model(SpaceForm::new(1.0, 2).expect("valid")).with_label("sphere")
    }

    /// `f(r) = sinh r`.
    pub fn hyperbolic() -> Self {
        Self::model(SpaceForm::new(-1.0, 2).expect("valid")).with_label("hyperbolic")
    }

    /// Warp function of the space form of curvature `a`.
    pub fn model(space: SpaceForm) -> Self {
        Self {
            warp: Arc::new(ModelWarp(space)),
            domain_end: space.warp_limit(),
            pole_complete: true,
            label: format!("model:{}", space.curvature()),
        }
    }

    /// `f = f_base·(1 + eps·e^{-beta r})`. Pole-complete only when `eps = 0`,
    /// since `f'(0) = f_base'(0)·(1 + eps)` otherwise.
    pub fn perturbed(base: &RadialProfile, eps: f64, beta: f64) -> Result<Self> {
        if !eps.is_finite() || !beta.is_finite() || eps <= -1.0 {
            return Err(GeometryError::InvalidParameter(format!(
                "perturbation eps={eps}, beta={beta} not admissible"
            )));
        }
        Ok(Self {
            warp: Arc::new(PerturbedWarp {
                base: base.warp.clone(),
                eps,
                beta,
            }),
            domain_end: base.domain_end,
            pole_complete: base.pole_complete && eps == 0.0,
            label: format!("perturbed:{}:{}:{}", base.label, eps, beta),
        })
    }

    pub fn from_table(table: TableWarp) -> Self {
        let rows = table.rows();
        let first = rows[0];
        let end = rows[rows.len() - 1].r;
        let pole_complete = first.r == 0.0 && first.f.abs() <= 1e-12 && (first.df - 1.0).abs() <= 1e-9;
        Self {
            warp: Arc::new(table),
            domain_end: end,
            pole_complete,
            label: "table".into(),
        }
    }

    /// Profile from `f` alone, derivatives by finite differences.
    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain_end: f64,
        pole_complete: bool,
    ) -> Result<Self> {
        Self::new(Arc::new(DifferencedWarp { f: Arc::new(f) }), domain_end, pole_complete, "custom")
    }

    /// Parses `euclid`, `sphere`/`sin`, `hyperbolic`/`sinh`, `model:<a>` or
    /// `perturbed:<base>:<eps>:<beta>`. Tabulated profiles go through
    /// [`TableWarp::from_csv`].
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "euclid" => return Ok(Self::euclid()),
            "sphere" | "sin" => return Ok(Self::sphere()),
            "hyperbolic" | "sinh" => return Ok(Self::hyperbolic()),
            _ => {}
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| GeometryError::Parse(format!("'{s}' is not a number in profile '{spec}'")))
        };
        match parts.as_slice() {
            ["model", a] => Ok(Self::model(SpaceForm::new(num(a)?, 2)?)),
            ["perturbed", base, eps, beta] => {
                let base = Self::parse(base)?;
                Self::perturbed(&base, num(eps)?, num(beta)?)
            }
            _ => Err(GeometryError::Parse(format!("unknown profile '{spec}'"))),
        }
    }

    fn with_label(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn pole_complete(&self) -> bool {
        self.pole_complete
    }

    pub fn warp(&self) -> &dyn Warp {
        self.warp.as_ref()
    }

    pub fn f(&self, r: f64) -> f64 {
        self.warp.value(r)
    }

    pub fn df(&self, r: f64) -> f64 {
        self.warp.first(r)
    }

    pub fn d2f(&self, r: f64) -> f64 {
        self.warp.second(r)
    }

    pub fn contains(&self, r: f64) -> bool {
        r > 0.0 && r < self.domain_end
    }

    /// Checks positivity, pole behaviour and derivative self-consistency on a
    /// coarse grid. Returns the list of violated invariants.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let end = if self.domain_end.is_finite() { self.domain_end } else { 20.0 };
        let n = 64;
        for i in 1..n {
            let r = end * i as f64 / n as f64;
            let f = self.f(r);
            if !(f > 0.0) {
                out.push(format!("f({r}) = {f} is not positive"));
                break;
            }
        }
        if self.pole_complete {
            let r = 1e-6;
            if (self.f(r) / r - 1.0).abs() > 1e-4 || self.d2f(r).abs() > 1e-4 {
                out.push("pole completeness: f(r)/r -> 1, f''(r) -> 0 fails at r = 1e-6".into());
            }
        }
        let h = 1e-4 * end.min(1.0);
        for i in 1..16 {
            let r = end * i as f64 / 16.0;
            if r - 2.0 * h <= 0.0 || r + 2.0 * h >= self.domain_end {
                continue;
            }
            let fd1 = (self.f(r + h) - self.f(r - h)) / (2.0 * h);
            let fd2 = (self.df(r + h) - self.df(r - h)) / (2.0 * h);
            let scale1 = 1.0 + self.df(r).abs();
            let scale2 = 1.0 + self.d2f(r).abs();
            if (fd1 - self.df(r)).abs() > 1e-6 * scale1 || (fd2 - self.d2f(r)).abs() > 1e-6 * scale2 {
                out.push(format!("derivatives inconsistent with f at r = {r}"));
                break;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parse_builtins() {
        for (spec, r, f) in [
            ("euclid", 0.3, 0.3),
            ("sphere", 0.3, 0.3f64.sin()),
            ("sin", 0.3, 0.3f64.sin()),
            ("hyperbolic", 0.3, 0.3f64.sinh()),
            ("sinh", 0.3, 0.3f64.sinh()),
        ] {
            let p = RadialProfile::parse(spec).unwrap();
            assert_relative_eq!(p.f(r), f, max_relative = 1e-15);
            assert!(p.pole_complete());
            assert!(p.invariant_violations().is_empty(), "{spec}");
        }
        assert_eq!(RadialProfile::parse("sphere").unwrap().domain_end(), std::f64::consts::PI);
        assert!(RadialProfile::parse("sinh").unwrap().domain_end().is_infinite());
    }

    #[test]
    fn parse_perturbed() {
        let p = RadialProfile::parse("perturbed:sinh:0.01:3").unwrap();
        let r: f64 = 0.8;
        assert_relative_eq!(p.f(r), r.sinh() * (1.0 + 0.01 * (-3.0 * r).exp()), max_relative = 1e-15);
        assert!(!p.pole_complete());
        assert!(p.invariant_violations().is_empty());
        let p0 = RadialProfile::parse("perturbed:sinh:0:3").unwrap();
        assert!(p0.pole_complete());
    }

    #[test]
    fn parse_errors() {
        assert!(RadialProfile::parse("torus").is_err());
        assert!(RadialProfile::parse("perturbed:sinh:x:3").is_err());
        assert!(RadialProfile::parse("perturbed:sinh:0.1").is_err());
    }

    #[test]
    fn perturbed_stable_numerator_matches_naive() {
        let p = RadialProfile::parse("perturbed:sinh:0.05:2.5").unwrap();
        for r in [0.1, 0.5, 1.0, 2.0] {
            let d = p.df(r);
            assert_relative_eq!(p.warp().one_minus_slope_sq(r), 1.0 - d * d, max_relative = 1e-12);
        }
    }

    #[test]
    fn table_reproduces_sine() {
        let rows: Vec<TableRow> = (0..=200)
            .map(|i| {
                let r = 3.0 * i as f64 / 200.0;
                TableRow { r, f: r.sin(), df: r.cos(), d2f: -r.sin() }
            })
            .collect();
        let p = RadialProfile::from_table(TableWarp::new(rows).unwrap());
        assert!(p.pole_complete());
        for r in [0.05, 0.777, 1.5, 2.9] {
            assert!((p.f(r) - r.sin()).abs() < 1e-12);
            assert!((p.df(r) - r.cos()).abs() < 1e-10);
            assert!((p.d2f(r) + r.sin()).abs() < 1e-7);
        }
        assert!(p.invariant_violations().is_empty());
    }

    #[test]
    fn table_csv_parsing() {
        let text = "r,f,df,d2f\n0,0,1,0\n1,1,1,0\n2,2,1,0\n";
        let t = TableWarp::from_csv(text).unwrap();
        assert_eq!(t.rows().len(), 3);
        assert!((t.value(1.5) - 1.5).abs() < 1e-15);
        assert!(TableWarp::from_csv("0,0,1\n").is_err());
        assert!(TableWarp::from_csv("0,0,1,0\n0,1,1,0\n").is_err());
    }

    #[test]
    fn differenced_profile_derivatives() {
        let p = RadialProfile::from_fn(f64::sinh, f64::INFINITY, true).unwrap();
        for r in [0.3, 1.0, 2.5] {
            assert_relative_eq!(p.df(r), r.cosh(), max_relative = 1e-9);
            assert_relative_eq!(p.d2f(r), r.sinh(), max_relative = 1e-5);
        }
    }
}
