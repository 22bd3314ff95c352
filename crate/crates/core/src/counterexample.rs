//! A metric on the ball of radius π/2 with `K ≥ 0` everywhere, `K = 1` near
//! the centre and `K = 0` near the boundary.
//!
//! The profile is `sin r` on `(0, c-ε]`, a concave bridge `h` on
//! `[c-ε, c+ε]` and `π/2 - r` beyond, where `c` solves `sin r = π/2 - r`.
//! The bridge is built from its second derivative
//!
//! ```text
//! h''(t) = -sin(t) B(t) - m₁ β₁(t) - m₂ β₂(t)
//! ```
//!
//! with a smooth cutoff `B` and two bumps `βᵢ`. The amplitudes solve the two
//! linear conditions that make `h'` and `h` land on the outer line, so
//! `h'' ≤ 0` holds as soon as both amplitudes are nonnegative.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

use crate::comparison_engine::theorem_b_check;
use crate::error::{GeometryError, Result};
use crate::grid::RadiusGrid;
use crate::quadrature::{bisect, gauss_legendre};
use crate::warped_metrics::{RadialProfile, Warp, WarpedMetric, FD_STEP};

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const MAX_RETRIES: u32 = 8;
/// Oracle step on the bridge. The bump derivatives grow like `(4/ε)^k`, so
/// the default step leaves a truncation error near `1e-2` at the bump edges.
pub const BRIDGE_FD_STEP: f64 = 6e-5;
/// Uniform verification points across the bridge.
pub const VERIFY_POINTS: usize = 4096;
/// Extra points packed into each seam's `1e-3` neighbourhood.
pub const SEAM_POINTS: usize = 64;
const SEAM_WINDOW: f64 = 1e-3;

const CONCAVITY_TOL: f64 = 1e-10;
const SLOPE_TOL: f64 = 1e-10;
const SEAM_TOL: f64 = 1e-8;
const NONNEG_TOL: f64 = 1e-8;
const FLAT_TOL: f64 = 1e-8;
const ROUND_TOL: f64 = 1e-10;
const GL_PANELS: usize = 48;
const MOMENT_NODES: usize = 256;
const NODE_PANELS: usize = 2;
const TAIL_PANELS: usize = 1;

/// The root of `sin r + r - π/2` in `(0, π/2)`.
pub fn solve_c() -> f64 {
    bisect(|r| r.sin() + r - FRAC_PI_2, 0.0, FRAC_PI_2, 1e-12).expect("sign change on [0, π/2]")
}

fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
fn smooth_step(x: f64) -> f64 {
    let (p, q) = (psi(x), psi(1.0 - x));
    p / (p + q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.center) / self.half_width;
        if u.abs() < 1.0 {
            (-1.0 / (1.0 - u * u)).exp()
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// Residuals of value, first and second derivative at a seam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeamResidual {
    pub radius: f64,
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

impl SeamResidual {
    pub fn max(&self) -> f64 {
        self.value.max(self.first).max(self.second)
    }
}

/// Summary of the bridge checks on the verification grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeReport {
    pub max_second: f64,
    pub max_abs_first: f64,
    pub min_value: f64,
    pub left: SeamResidual,
    pub right: SeamResidual,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeSpec {
    pub c: f64,
    pub epsilon: f64,
    /// Transition window of the cutoff `B`.
    pub cutoff: (f64, f64),
    pub bumps: [Bump; 2],
    pub amplitudes: [f64; 2],
    pub retries: u32,
    pub report: BridgeReport,
    nodes: Vec<f64>,
    cumulative: Vec<(f64, f64)>,
}

impl BridgeSpec {
    pub fn left(&self) -> f64 {
        self.c - self.epsilon
    }

    pub fn right(&self) -> f64 {
        self.c + self.epsilon
    }

    fn cutoff_at(&self, t: f64) -> f64 {
        let (a0, a1) = self.cutoff;
        1.0 - smooth_step((t - a0) / (a1 - a0))
    }

    pub fn h2(&self, t: f64) -> f64 {
        second_derivative(t, self.cutoff, &self.bumps, self.amplitudes)
    }

    /// `(∫_L^t h'', ∫_L^t u h''(u) du)` from the nearest tabulated node.
    fn moments(&self, t: f64) -> (f64, f64) {
        let i = self.nodes.partition_point(|x| *x <= t).saturating_sub(1);
        let (a, (c0, c1)) = (self.nodes[i], self.cumulative[i]);
        if t <= a {
            return (c0, c1);
        }
        let d0 = gauss_legendre(|u| self.h2(u), a, t, TAIL_PANELS);
        let d1 = gauss_legendre(|u| u * self.h2(u), a, t, TAIL_PANELS);
        (c0 + d0, c1 + d1)
    }

    pub fn h1(&self, t: f64) -> f64 {
        self.left().cos() + self.moments(t).0
    }

    pub fn h(&self, t: f64) -> f64 {
        let l = self.left();
        let (m0, m1) = self.moments(t);
        l.sin() + (t - l) * l.cos() + (t * m0 - m1)
    }

    /// The `B`-weighted part of `h''`; exposed for inspection.
    pub fn cutoff_term(&self, t: f64) -> f64 {
        -t.sin() * self.cutoff_at(t)
    }

    /// Bridge verification radii: uniform plus clustered at both seams.
    pub fn verification_radii(&self) -> Vec<f64> {
        verification_radii(self.left(), self.right())
    }
}

fn second_derivative(t: f64, cutoff: (f64, f64), bumps: &[Bump; 2], m: [f64; 2]) -> f64 {
    let (a0, a1) = cutoff;
    let b = 1.0 - smooth_step((t - a0) / (a1 - a0));
    -t.sin() * b - m[0] * bumps[0].eval(t) - m[1] * bumps[1].eval(t)
}

fn piecewise_integral<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, breakpoints: &[f64]) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let mut total = 0.0;
    let mut a = lo;
    for &p in breakpoints.iter().filter(|p| **p > lo && **p < hi) {
        total += gauss_legendre(g, a, p, GL_PANELS);
        a = p;
    }
    total + gauss_legendre(g, a, hi, GL_PANELS)
}

/// Cumulative moments of `h''` on a node set refining the breakpoints.
fn tabulate(spec: &mut BridgeSpec, breakpoints: &[f64]) {
    let (l, r) = (spec.left(), spec.right());
    let mut nodes: Vec<f64> = (0..=MOMENT_NODES)
        .map(|i| l + (r - l) * i as f64 / MOMENT_NODES as f64)
        .collect();
    nodes.extend(breakpoints.iter().copied().filter(|p| *p > l && *p < r));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let mut cumulative = Vec::with_capacity(nodes.len());
    let (mut c0, mut c1) = (0.0, 0.0);
    cumulative.push((c0, c1));
    for w in nodes.windows(2) {
        c0 += gauss_legendre(|u| spec.h2(u), w[0], w[1], NODE_PANELS);
        c1 += gauss_legendre(|u| u * spec.h2(u), w[0], w[1], NODE_PANELS);
        cumulative.push((c0, c1));
    }
    spec.nodes = nodes;
    spec.cumulative = cumulative;
}

fn verification_radii(l: f64, r: f64) -> Vec<f64> {
    let mut radii: Vec<f64> = (0..VERIFY_POINTS)
        .map(|i| l + (r - l) * i as f64 / (VERIFY_POINTS - 1) as f64)
        .collect();
    for k in 1..=SEAM_POINTS {
        let d = SEAM_WINDOW * (k as f64 / SEAM_POINTS as f64).powi(2);
        radii.push(l + d);
        radii.push(r - d);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

/// Build the concave bridge on `[c-ε, c+ε]`.
///
/// Bumps sit at the one- and two-thirds points; if an amplitude comes out
/// negative their widths are halved and the solve repeated.
pub fn build_bridge(c: f64, epsilon: f64) -> Result<BridgeSpec> {
    if !(epsilon > 0.0) || !(c - epsilon > 0.0) || !(c + epsilon < FRAC_PI_2) {
        return Err(GeometryError::InvalidParameter(format!(
            "bridge [{}, {}] must lie inside (0, π/2)",
            c - epsilon,
            c + epsilon
        )));
    }
    let (l, r) = (c - epsilon, c + epsilon);
    let w = r - l;
    let cutoff = (l + w / 6.0, l + 5.0 * w / 6.0);
    let mut half_width = epsilon / 4.0;
    let mut last_amplitudes = [f64::NAN; 2];
    for retry in 0..=MAX_RETRIES {
        let bumps = [
            Bump { center: l + w / 3.0, half_width },
            Bump { center: l + 2.0 * w / 3.0, half_width },
        ];
        let mut breakpoints = vec![cutoff.0, cutoff.1];
        for b in &bumps {
            let (lo, hi) = b.support();
            breakpoints.extend([lo, b.center, hi]);
        }
        breakpoints.sort_by(f64::total_cmp);

        let base = |u: f64| second_derivative(u, cutoff, &bumps, [0.0, 0.0]);
        let ib = piecewise_integral(&base, l, r, &breakpoints);
        let jb = piecewise_integral(&|u: f64| (r - u) * base(u), l, r, &breakpoints);
        let mut col = [[0.0; 2]; 2];
        for (i, b) in bumps.iter().enumerate() {
            col[i][0] = piecewise_integral(&|u: f64| b.eval(u), l, r, &breakpoints);
            col[i][1] = piecewise_integral(&|u: f64| (r - u) * b.eval(u), l, r, &breakpoints);
        }
        // h'(R) = -1 and h(R) = π/2 - R
        let rhs0 = l.cos() + ib + 1.0;
        let rhs1 = l.sin() + w * l.cos() + jb - (FRAC_PI_2 - r);
        let det = col[0][0] * col[1][1] - col[1][0] * col[0][1];
        if det.abs() < 1e-300 {
            return Err(GeometryError::Construction("singular amplitude system".into()));
        }
        let m1 = (rhs0 * col[1][1] - col[1][0] * rhs1) / det;
        let m2 = (col[0][0] * rhs1 - rhs0 * col[0][1]) / det;
        last_amplitudes = [m1, m2];
        if m1 >= 0.0 && m2 >= 0.0 {
            let mut spec = BridgeSpec {
                c,
                epsilon,
                cutoff,
                bumps,
                amplitudes: [m1, m2],
                retries: retry,
                report: BridgeReport {
                    max_second: f64::NAN,
                    max_abs_first: f64::NAN,
                    min_value: f64::NAN,
                    left: SeamResidual { radius: l, value: 0.0, first: 0.0, second: 0.0 },
                    right: SeamResidual { radius: r, value: 0.0, first: 0.0, second: 0.0 },
                    points: 0,
                },
                nodes: Vec::new(),
                cumulative: Vec::new(),
            };
            tabulate(&mut spec, &breakpoints);
            spec.report = verify_bridge(&spec)?;
            return Ok(spec);
        }
        half_width /= 2.0;
    }
    Err(GeometryError::Construction(format!(
        "concavity: amplitudes {last_amplitudes:?} stayed negative after {MAX_RETRIES} retries"
    )))
}

fn verify_bridge(spec: &BridgeSpec) -> Result<BridgeReport> {
    let (l, r) = (spec.left(), spec.right());
    let radii = spec.verification_radii();
    let mut max_second = f64::NEG_INFINITY;
    let mut max_abs_first = 0.0f64;
    let mut min_value = f64::INFINITY;
    for &t in &radii {
        let h2 = spec.h2(t);
        if h2 > max_second {
            max_second = h2;
        }
        max_abs_first = max_abs_first.max(spec.h1(t).abs());
        min_value = min_value.min(spec.h(t));
    }
    let left = SeamResidual {
        radius: l,
        value: (spec.h(l) - l.sin()).abs(),
        first: (spec.h1(l) - l.cos()).abs(),
        second: (spec.h2(l) + l.sin()).abs(),
    };
    let right = SeamResidual {
        radius: r,
        value: (spec.h(r) - (FRAC_PI_2 - r)).abs(),
        first: (spec.h1(r) + 1.0).abs(),
        second: spec.h2(r).abs(),
    };
    if max_second > CONCAVITY_TOL {
        return Err(GeometryError::Construction(format!("concavity: max h'' = {max_second:e}")));
    }
    if max_abs_first > 1.0 + SLOPE_TOL {
        return Err(GeometryError::Construction(format!("slope: max |h'| = {max_abs_first}")));
    }
    if !(min_value > 0.0) {
        return Err(GeometryError::Construction(format!("positivity: min h = {min_value}")));
    }
    for seam in [&left, &right] {
        if seam.max() > SEAM_TOL {
            return Err(GeometryError::Construction(format!(
                "C² matching at r = {}: residual {:e}",
                seam.radius,
                seam.max()
            )));
        }
    }
    Ok(BridgeReport {
        max_second,
        max_abs_first,
        min_value,
        left,
        right,
        points: radii.len(),
    })
}

#[derive(Debug)]
struct CounterexampleWarp {
    bridge: Arc<BridgeSpec>,
}

enum Region {
    Inner,
    Bridge,
    Outer,
}

impl CounterexampleWarp {
    fn region(&self, r: f64) -> Region {
        if r < self.bridge.left() {
            Region::Inner
        } else if r <= self.bridge.right() {
            Region::Bridge
        } else {
            Region::Outer
        }
    }
}

impl Warp for CounterexampleWarp {
    fn value(&self, r: f64) -> f64 {
        match self.region(r) {
            Region::Inner => r.sin(),
            Region::Bridge => self.bridge.h(r),
            Region::Outer => FRAC_PI_2 - r,
        }
    }
    fn first(&self, r: f64) -> f64 {
        match self.region(r) {
            Region::Inner => r.cos(),
            Region::Bridge => self.bridge.h1(r),
            Region::Outer => -1.0,
        }
    }
    fn second(&self, r: f64) -> f64 {
        match self.region(r) {
            Region::Inner => -r.sin(),
            Region::Bridge => self.bridge.h2(r),
            Region::Outer => 0.0,
        }
    }
    fn one_minus_slope_sq(&self, r: f64) -> f64 {
        match self.region(r) {
            Region::Inner => r.sin().powi(2),
            Region::Bridge => {
                let d = self.bridge.h1(r);
                (1.0 - d) * (1.0 + d)
            }
            Region::Outer => 0.0,
        }
    }
}

/// The assembled metric together with its construction data.
#[derive(Debug, Clone)]
pub struct CounterexampleMetric {
    pub metric: WarpedMetric,
    pub c: f64,
    pub epsilon: f64,
    pub bridge: Arc<BridgeSpec>,
}

impl CounterexampleMetric {
    /// Build with the default half-width in dimension `n`.
    pub fn standard(n: usize) -> Result<Self> {
        let c = solve_c();
        let bridge = build_bridge(c, DEFAULT_EPSILON)?;
        assemble_profile(c, DEFAULT_EPSILON, bridge, n)
    }

    pub fn profile(&self) -> &RadialProfile {
        self.metric.profile()
    }

    /// Finite-difference step that resolves the bump edges: [`BRIDGE_FD_STEP`]
    /// on and near the bridge, the oracle default elsewhere.
    pub fn fd_step(&self, r: f64) -> f64 {
        let pad = 10.0 * FD_STEP;
        if r >= self.bridge.left() - pad && r <= self.bridge.right() + pad {
            BRIDGE_FD_STEP
        } else {
            FD_STEP
        }
    }
}

pub fn assemble_profile(c: f64, epsilon: f64, bridge: BridgeSpec, n: usize) -> Result<CounterexampleMetric> {
    if bridge.c != c || bridge.epsilon != epsilon {
        return Err(GeometryError::InvalidParameter(format!(
            "bridge was built for (c, ε) = ({}, {}), not ({c}, {epsilon})",
            bridge.c, bridge.epsilon
        )));
    }
    let bridge = Arc::new(bridge);
    let warp = CounterexampleWarp { bridge: Arc::clone(&bridge) };
    for seam in [bridge.left(), bridge.right()] {
        // evaluate each side through the assembled warp, just off the seam
        let below = seam - 1e-12;
        let above = seam + 1e-12;
        let res = [
            (warp.value(below) - warp.value(above)).abs(),
            (warp.first(below) - warp.first(above)).abs(),
            (warp.second(below) - warp.second(above)).abs(),
        ];
        let worst = res.iter().copied().fold(0.0, f64::max);
        if !(worst <= SEAM_TOL) {
            return Err(GeometryError::Construction(format!(
                "seam mismatch at r = {seam}: residual {worst:e}"
            )));
        }
    }
    let profile = RadialProfile::new(Arc::new(warp), FRAC_PI_2, true, "counterexample")?;
    let metric = WarpedMetric::new(profile, n)?;
    Ok(CounterexampleMetric { metric, c, epsilon, bridge })
}

/// Curvature extrema over one region of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionExtrema {
    pub lo: f64,
    pub hi: f64,
    pub min_k: f64,
    pub max_k: f64,
    pub min_at: f64,
    pub max_at: f64,
}

impl RegionExtrema {
    fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            min_k: f64::INFINITY,
            max_k: f64::NEG_INFINITY,
            min_at: f64::NAN,
            max_at: f64::NAN,
        }
    }

    fn push(&mut self, r: f64, k_lo: f64, k_hi: f64) {
        if k_lo < self.min_k {
            self.min_k = k_lo;
            self.min_at = r;
        }
        if k_hi > self.max_k {
            self.max_k = k_hi;
            self.max_at = r;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimsVerdict {
    pub inner: RegionExtrema,
    pub bridge: RegionExtrema,
    pub outer: RegionExtrema,
    pub nonnegative: bool,
    pub round_inside: bool,
    pub flat_outside: bool,
    /// Message of the unmet upper-bound premise when the local rigidity
    /// chain is run with `a = 0`; `None` if it unexpectedly ran through.
    pub upper_bound_failure: Option<String>,
    /// Largest `|K|` on the boundary sphere.
    pub boundary_curvature: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Sample radii on `(0, π/2 (1 - 1e-3))`, with the bridge seams resolved.
pub fn claims_grid(metric: &CounterexampleMetric) -> Vec<f64> {
    let end = FRAC_PI_2 * (1.0 - 1e-3);
    let mut radii: Vec<f64> = (1..=VERIFY_POINTS).map(|i| end * i as f64 / VERIFY_POINTS as f64).collect();
    radii.extend(metric.bridge.verification_radii());
    for k in 1..=SEAM_POINTS {
        let d = SEAM_WINDOW * (k as f64 / SEAM_POINTS as f64).powi(2);
        radii.push(metric.bridge.left() - d);
        radii.push(metric.bridge.right() + d);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    radii
}

pub fn verify_claims(metric: &CounterexampleMetric, n: usize) -> Result<ClaimsVerdict> {
    if n < 3 {
        return Err(GeometryError::Dimension(n, 3));
    }
    let m = if metric.metric.dimension() == n {
        metric.metric.clone()
    } else {
        WarpedMetric::new(metric.profile().clone(), n)?
    };
    let (l, r) = (metric.bridge.left(), metric.bridge.right());
    let mut inner = RegionExtrema::new(0.0, l);
    let mut bridge = RegionExtrema::new(l, r);
    let mut outer = RegionExtrema::new(r, FRAC_PI_2);
    let radii = claims_grid(metric);
    for &t in &radii {
        let k = m.curvatures(t)?;
        let region = if t < l {
            &mut inner
        } else if t <= r {
            &mut bridge
        } else {
            &mut outer
        };
        region.push(t, k.min(), k.max());
    }
    let overall_min = inner.min_k.min(bridge.min_k).min(outer.min_k);
    let nonnegative = overall_min >= -NONNEG_TOL;
    let round_inside = (inner.min_k - 1.0).abs() <= ROUND_TOL && (inner.max_k - 1.0).abs() <= ROUND_TOL;
    let flat_outside = outer.min_k.abs() <= FLAT_TOL && outer.max_k.abs() <= FLAT_TOL;

    let end = *radii.last().expect("nonempty");
    let boundary = m.curvatures(end)?;
    let boundary_curvature = boundary.k_radial.abs().max(boundary.k_spherical.abs());
    let grid = RadiusGrid::from_radii(radii.clone())?;
    let upper_bound_failure = match theorem_b_check(&m, 0.0, end, &grid) {
        Err(GeometryError::HypothesisUnmet(msg)) => Some(msg),
        Err(e) => return Err(e),
        Ok(_) => None,
    };
    let pass = nonnegative && round_inside && flat_outside && upper_bound_failure.is_some();
    Ok(ClaimsVerdict {
        inner,
        bridge,
        outer,
        nonnegative,
        round_inside,
        flat_outside,
        upper_bound_failure,
        boundary_curvature,
        samples: radii.len(),
        pass,
    })
}
