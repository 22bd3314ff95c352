//! One-dimensional numerics shared by the geometry modules: adaptive Simpson
//! quadrature, a fixed composite Gauss-Legendre rule and bisection.

/// Tolerances for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct SimpsonConfig {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_depth: u32,
}

impl Default for SimpsonConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_floor: 1e-14,
            max_depth: 40,
        }
    }
}

// Subdivisions forced before the error estimate is trusted.
const MIN_DEPTH: u32 = 4;

/// Integrates `f` over `[a, b]` by recursive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: SimpsonConfig) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let flo = f(lo);
    let fhi = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    let tol = cfg.abs_floor.max(cfg.rel_tol * whole.abs());
    sign * simpson_step(&f, lo, hi, flo, fm, fhi, whole, tol, 0, &cfg)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    cfg: &SimpsonConfig,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= cfg.max_depth || (depth >= MIN_DEPTH && delta.abs() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    let half = (0.5 * tol).max(cfg.abs_floor * 1e-3);
    simpson_step(f, a, m, fa, flm, fm, left, half, depth + 1, cfg)
        + simpson_step(f, m, b, fm, frm, fb, right, half, depth + 1, cfg)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss-Legendre over `panels` equal panels of `[a, b]`.
///
/// The node set moves continuously with the endpoints, so the result is a
/// smooth function of `a` and `b`; finite differences taken through it stay
/// clean, which per-call adaptive schemes do not guarantee.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let mut acc = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            acc += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += half * acc;
    }
    total
}

/// Bisection for a sign-changing continuous `f` on `[lo, hi]`.
///
/// Stops once the bracket collapses to adjacent floats or `|f| <= residual_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, residual_tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.abs() <= residual_tol {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_matches_known_integrals() {
        let cfg = SimpsonConfig::default();
        let v = adaptive_simpson(f64::sin, 0.0, PI, cfg);
        assert!((v - 2.0).abs() < 1e-10);
        let v = adaptive_simpson(f64::exp, 0.0, 3.0, cfg);
        assert!((v - (3f64.exp() - 1.0)).abs() / v < 1e-10);
        let v = adaptive_simpson(|x| x.sqrt(), 0.0, 1.0, cfg);
        assert!((v - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_reversed_interval_changes_sign() {
        let cfg = SimpsonConfig::default();
        let a = adaptive_simpson(f64::cos, 0.0, 1.0, cfg);
        let b = adaptive_simpson(f64::cos, 1.0, 0.0, cfg);
        assert_eq!(a, -b);
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        let s: f64 = 2.0 * GL8_WEIGHTS.iter().sum::<f64>();
        assert!((s - 2.0).abs() < 1e-15);
        // 8 nodes integrate degree 15 exactly
        let v = gauss_legendre(|x| x.powi(14), -1.0, 1.0, 1);
        assert!((v - 2.0 / 15.0).abs() < 1e-15);
        let v = gauss_legendre(f64::exp, 0.0, 2.0, 4);
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 0.0).is_none());
    }
}
