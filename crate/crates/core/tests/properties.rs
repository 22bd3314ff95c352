use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rigidity_core::comparison_engine::{
    key_lemma_bound, key_lemma_check, ratio_table, rescaled_volume_step, rigidity_classifier, PinchFunction,
    PinchHypothesis, StepVerdict, Theorem,
};
use rigidity_core::counterexample::CounterexampleMetric;
use rigidity_core::plane_operator::{
    diagonalizing_pair, eigen_bounds_check, plane_value, Plane2, SymmetricOperator,
};
use rigidity_core::warped_metrics::{
    curvature_band, fd_curvature_oracle, fd_curvature_oracle_with_step, PlaneKind, FD_STEP,
};
use rigidity_core::{RadialProfile, RadiusGrid, SpaceForm, WarpedMetric};

fn space(a: f64, n: usize) -> SpaceForm {
    SpaceForm::new(a, n).unwrap()
}

fn metric(spec: &str, n: usize) -> WarpedMetric {
    WarpedMetric::new(RadialProfile::parse(spec).unwrap(), n).unwrap()
}

/// Radius strictly inside the admissible domain, as a fraction of it.
fn inside(a: f64, frac: f64, unbounded: f64) -> f64 {
    let end = space(a, 2).admissible_radius();
    if end.is_finite() {
        frac * end
    } else {
        frac * unbounded
    }
}

fn curvature_case() -> impl Strategy<Value = f64> {
    prop_oneof![-4.0..4.0f64, Just(0.0), Just(1.0), Just(-1.0)]
}

fn matrix(n: usize) -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>, DVector<f64>)> {
    (
        prop::collection::vec(-3.0..3.0f64, n * n),
        prop::collection::vec(-2.0..2.0f64, n),
        prop::collection::vec(-2.0..2.0f64, n),
    )
        .prop_map(move |(m, x, y)| {
            let b = DMatrix::from_vec(n, n, m);
            (b.transpose() * &b, DVector::from_vec(x), DVector::from_vec(y))
        })
}

fn sym(m: &DMatrix<f64>) -> SymmetricOperator {
    SymmetricOperator::new(m.clone()).unwrap()
}

fn well_posed(x: &DVector<f64>, y: &DVector<f64>) -> bool {
    let (xx, yy, xy) = (x.dot(x), y.dot(y), x.dot(y));
    xx * yy - xy * xy > 1e-3 * xx * yy && xx > 1e-3 && yy > 1e-3
}

// model spaces

proptest! {
    #[test]
    fn log_derivative_identity(a in curvature_case(), frac in 1e-3..0.999f64) {
        let s = space(a, 3);
        let r = inside(a, frac, 30.0);
        let lam = s.hessian_eigen_lower(r).unwrap();
        let f = s.warp_function(r).unwrap();
        let df = s.warp_derivative(r).unwrap();
        prop_assert!((lam * f - df).abs() <= 1e-12 * df.abs() + 1e-15, "a={a} r={r}");
    }

    #[test]
    fn warp_is_continuous_in_a(r in 1e-3..2.0f64, t in -1.0..1.0f64) {
        let a = t * 1e-4 / (r * r);
        let f = space(a, 2).warp_function(r).unwrap();
        prop_assert!((f - r).abs() <= a.abs() * r.powi(3), "a={a} r={r}");
    }

    #[test]
    fn area_and_volume_increase(a in curvature_case(), n in 2usize..8, u in 0.01..0.98f64, du in 1e-3..0.01f64) {
        let s = space(a, n);
        let (r0, r1) = (inside(a, u, 10.0), inside(a, u + du, 10.0));
        prop_assert!(s.sphere_area(r1).unwrap() > s.sphere_area(r0).unwrap());
        prop_assert!(s.ball_volume(r1).unwrap() > s.ball_volume(r0).unwrap());
    }

    #[test]
    fn ball_volume_closed_forms(a in curvature_case(), frac in 0.01..0.99f64) {
        let r = inside(a, frac, 5.0);
        let k = a.abs().sqrt();
        let (v2, v3) = if a > 0.0 {
            (2.0 * PI * (1.0 - (k * r).cos()) / (k * k), 4.0 * PI * (r - (2.0 * k * r).sin() / (2.0 * k)) / (2.0 * k * k))
        } else if a < 0.0 {
            (2.0 * PI * ((k * r).cosh() - 1.0) / (k * k), 4.0 * PI * ((2.0 * k * r).sinh() / (2.0 * k) - r) / (2.0 * k * k))
        } else {
            (PI * r * r, 4.0 * PI * r.powi(3) / 3.0)
        };
        // the n=3 forms cancel for small k r, where the series is exact enough
        let v3 = if k * r < 1e-2 {
            4.0 * PI * (r.powi(3) / 3.0 - a * r.powi(5) / 15.0 + 2.0 * a * a * r.powi(7) / 315.0)
        } else {
            v3
        };
        prop_assert!((space(a, 2).ball_volume(r).unwrap() - v2).abs() <= 1e-9 * v2.abs());
        prop_assert!((space(a, 3).ball_volume(r).unwrap() - v3).abs() <= 1e-9 * v3.abs());
    }

    #[test]
    fn warp_nonincreasing_in_a(a in -4.0..4.0f64, da in 0.0..2.0f64, frac in 0.0..0.99f64) {
        let b = a + da;
        let r = inside(b, frac, 10.0).max(1e-6);
        let fa = space(a, 2).warp_function(r).unwrap();
        let fb = space(b, 2).warp_function(r).unwrap();
        prop_assert!(fb <= fa * (1.0 + 1e-15), "a={a} b={b} r={r}");
    }
}

// warped metrics

fn oracle_profile() -> impl Strategy<Value = (String, f64)> {
    prop_oneof![
        Just(("sin".to_string(), PI)),
        Just(("sinh".to_string(), 6.0)),
        Just(("euclid".to_string(), 6.0)),
        Just(("perturbed:sinh:0.05:1".to_string(), 6.0)),
        (-2.0..2.0f64).prop_map(|a| (format!("model:{a}"), if a > 0.0 { 0.99 * PI / a.sqrt() } else { 5.0 })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fd_oracle_agrees((spec, end) in oracle_profile(), n in 3usize..6, u in 0.0..1.0f64) {
        let m = metric(&spec, n);
        let lo = 10.0 * FD_STEP;
        let r = lo + u * (end - 2.0 * lo);
        let k = m.curvatures(r).unwrap();
        for (plane, exact) in [(PlaneKind::Radial, k.k_radial), (PlaneKind::Spherical, k.k_spherical)] {
            let fd = fd_curvature_oracle(&m, r, plane).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "{spec} r={r} {plane:?}: {fd} vs {exact}");
        }
    }
}

proptest! {
    #[test]
    fn gauss_codazzi_residuals((spec, end) in oracle_profile(), n in 2usize..8, u in 0.001..0.999f64) {
        let m = metric(&spec, n);
        let (_, residual) = m.gauss_codazzi_check(u * end).unwrap();
        prop_assert!(residual <= 1e-12, "{spec}: {residual}");
    }

    #[test]
    fn space_form_recovery(a in curvature_case(), n in 2usize..8, frac in 0.01..0.99f64) {
        let s = space(a, n);
        let m = WarpedMetric::space_form(s);
        let r = inside(a, frac, 10.0);
        prop_assert_eq!(m.sphere_area(r).unwrap().to_bits(), s.sphere_area(r).unwrap().to_bits());
        let k = m.curvatures(r).unwrap();
        prop_assert!((k.k_radial - a).abs() <= 1e-10 * (1.0 + a.abs()));
        prop_assert!((k.k_spherical - a).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn pole_complete_curvatures_agree(a in curvature_case(), n in 2usize..8) {
        let m = WarpedMetric::space_form(space(a, n));
        prop_assert!(m.profile().pole_complete());
        let k = m.curvatures(1e-3).unwrap();
        prop_assert!((k.k_spherical - k.k_radial).abs() < 1e-2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn band_at_curvature_maximum_certifies(eps in -0.2..0.2f64, beta in 0.2..3.0f64, n in 3usize..6) {
        let m = metric(&format!("perturbed:sinh:{eps}:{beta}"), n);
        let grid = RadiusGrid::uniform(0.05, 4.0, 128).unwrap();
        let top = grid
            .radii()
            .iter()
            .map(|&r| m.curvatures(r).unwrap().max())
            .fold(f64::NEG_INFINITY, f64::max);
        let band = curvature_band(&m, top, &grid);
        prop_assert!(band.upper_bound_ok);
        prop_assert!(band.s_samples().iter().all(|s| *s >= 0.0));
    }
}

// plane operator

proptest! {
    #[test]
    fn plane_value_basis_invariant(
        (m, x, y) in (2usize..7).prop_flat_map(matrix),
        p in -2.0..2.0f64, q in -2.0..2.0f64, r in -2.0..2.0f64, t in -2.0..2.0f64,
    ) {
        prop_assume!(well_posed(&x, &y));
        prop_assume!((p * t - q * r).abs() > 0.1);
        let s = sym(&m);
        let base = plane_value(&s, &Plane2::new(x.clone(), y.clone()).unwrap()).unwrap();
        let other = Plane2::new(&x * p + &y * q, &x * r + &y * t).unwrap();
        let v = plane_value(&s, &other).unwrap();
        prop_assert!((v - base).abs() <= 1e-10 * (1.0 + base.abs()), "{v} vs {base}");
    }

    #[test]
    fn eigenvector_planes_are_sharp((m, _, _) in (2usize..7).prop_flat_map(matrix), i in 0usize..7, j in 0usize..7) {
        let n = m.nrows();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let eig = m.clone().symmetric_eigen();
        let plane = Plane2::new(eig.eigenvectors.column(i).into(), eig.eigenvectors.column(j).into()).unwrap();
        let t = plane_value(&sym(&m), &plane).unwrap();
        let expect = eig.eigenvalues[i] * eig.eigenvalues[j];
        let scale = eig.eigenvalues.amax().powi(2);
        prop_assert!((t - expect).abs() <= 1e-12 * (1.0 + scale), "{t} vs {expect}");
    }

    #[test]
    fn diagonalizing_pair_reproduces_t((m, x, y) in (2usize..7).prop_flat_map(matrix)) {
        prop_assume!(well_posed(&x, &y));
        let s = sym(&m);
        let plane = Plane2::new(x, y).unwrap();
        let t = plane_value(&s, &plane).unwrap();
        let pair = diagonalizing_pair(&s, &plane).unwrap();
        let (sv, sw) = (&m * &pair.v, &m * &pair.w);
        let (nv, nw) = (pair.v.norm_squared(), pair.w.norm_squared());
        let product = sv.dot(&pair.v) / nv * (sw.dot(&pair.w) / nw);
        prop_assert!((product - t).abs() <= 1e-10 * (1.0 + t.abs()), "{product} vs {t}");
    }

    #[test]
    fn rayleigh_quotients_within_spectrum((m, x, y) in (2usize..7).prop_flat_map(matrix)) {
        prop_assume!(well_posed(&x, &y));
        let s = sym(&m);
        let plane = Plane2::new(x, y).unwrap();
        let bounds = eigen_bounds_check(&s, &plane).unwrap();
        prop_assert!(bounds.pass);
        let pair = diagonalizing_pair(&s, &plane).unwrap();
        let tol = 1e-9 * (1.0 + bounds.mu);
        for v in [&pair.v, &pair.w] {
            let q = (&m * v).dot(v) / v.norm_squared();
            prop_assert!(bounds.lambda - tol <= q && q <= bounds.mu + tol, "{} <= {q} <= {}", bounds.lambda, bounds.mu);
        }
    }

    #[test]
    fn plane_value_scales_quadratically((m, x, y) in (2usize..7).prop_flat_map(matrix), t in 0.01..100.0f64) {
        prop_assume!(well_posed(&x, &y));
        let plane = Plane2::new(x, y).unwrap();
        let base = plane_value(&sym(&m), &plane).unwrap();
        let scaled = plane_value(&sym(&(&m * t)), &plane).unwrap();
        prop_assert!((scaled - t * t * base).abs() <= 1e-10 * (1.0 + t * t * base.abs()));
    }
}

// comparison engine

fn slower_model() -> impl Strategy<Value = (f64, f64, usize)> {
    (-2.0..0.5f64, 0.0..1.5f64, 3usize..7).prop_map(|(a, gap, n)| (a, a - gap, n))
}

fn model_grid(a: f64) -> RadiusGrid {
    let end = if a > 0.0 { FRAC_PI_2 / a.sqrt() * (1.0 - 1e-3) } else { 4.0 };
    RadiusGrid::uniform(end / 256.0, end, 256).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn key_lemma_holds_on_certified_models((a, lower, n) in slower_model()) {
        let m = metric(&format!("model:{lower}"), n);
        let grid = model_grid(a);
        let hyp = PinchHypothesis::new(a, PinchFunction::Custom(std::sync::Arc::new(move |_| a - lower)), grid.last()).unwrap();
        let v = key_lemma_check(&m, &hyp, &grid).unwrap();
        prop_assert!(v.pass, "a={a} lower={lower} margin {}", v.worst_margin);
    }

    #[test]
    fn rescaled_volume_step_matches_key_lemma((a, lower, n) in slower_model(), u in 0.0..1.0f64) {
        let m = metric(&format!("model:{lower}"), n);
        let grid = model_grid(a);
        let r = grid.first() + u * (grid.last() - grid.first());
        let gap = a - lower;
        let hyp = PinchHypothesis::new(a, PinchFunction::Custom(std::sync::Arc::new(move |_| gap)), grid.last()).unwrap();
        let table = ratio_table(&m, &hyp, &RadiusGrid::from_radii(vec![r]).unwrap()).unwrap();
        let f = table.ratio_f[0];
        match (rescaled_volume_step(&m, &hyp, r).unwrap(), key_lemma_bound(&hyp, n, r).unwrap()) {
            (StepVerdict::Undefined { .. }, None) => {}
            (StepVerdict::Checked { lhs, rhs, pass }, Some(bound)) => {
                prop_assert!((lhs / rhs - f / bound).abs() <= 1e-12 * (1.0 + f / bound));
                if ((bound - f) / bound).abs() > 1e-8 {
                    prop_assert_eq!(pass, f <= bound);
                }
            }
            (step, bound) => prop_assert!(false, "step {step:?} vs bound {bound:?}"),
        }
    }

    #[test]
    fn ratio_tends_to_one_at_pole((a, lower, n) in slower_model()) {
        let m = metric(&format!("model:{lower}"), n);
        let hyp = PinchHypothesis::new(a, PinchFunction::Zero, 1.0).unwrap();
        let table = ratio_table(&m, &hyp, &RadiusGrid::from_radii(vec![1e-3]).unwrap()).unwrap();
        prop_assert!((table.ratio_f[0] - 1.0).abs() <= 1e-4);
    }
}

fn pinch_family() -> impl Strategy<Value = PinchFunction> {
    prop_oneof![
        (0.1..10.0f64, 0.5..4.0f64).prop_map(|(c, alpha)| PinchFunction::Exponential { c, alpha }),
        (0.1..10.0f64, 0.5..4.0f64).prop_map(|(c, p)| PinchFunction::Power { c, p }),
    ]
}

proptest! {
    #[test]
    fn classifier_is_scale_covariant(s in pinch_family(), t in 0.1..10.0f64, n in 3usize..8, one in any::<bool>()) {
        let (theorem, a) = if one { (Theorem::One, 0.0) } else { (Theorem::A, -1.0) };
        let base = rigidity_classifier(&PinchHypothesis::new(a, s.clone(), f64::INFINITY).unwrap(), n, theorem).unwrap();
        let scaled = rigidity_classifier(&PinchHypothesis::new(a, s.scaled(t), f64::INFINITY).unwrap(), n, theorem).unwrap();
        prop_assert_eq!(base.forces_rigidity, scaled.forces_rigidity);
        prop_assert_eq!(base.conclusive, scaled.conclusive);
        let (b, c) = (base.condition_value, scaled.condition_value);
        if b.is_finite() {
            prop_assert!((c - t * b).abs() <= 1e-9 * (1.0 + (t * b).abs()), "{c} vs {t}*{b}");
        } else {
            prop_assert!(c == b || (c.is_nan() && b.is_nan()));
        }
    }
}

// counterexample

fn counterexample() -> &'static CounterexampleMetric {
    static METRIC: OnceLock<CounterexampleMetric> = OnceLock::new();
    METRIC.get_or_init(|| CounterexampleMetric::standard(3).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn counterexample_fd_agreement(u in 0.0..1.0f64) {
        let cm = counterexample();
        let lo = 10.0 * FD_STEP;
        let r = lo + u * (FRAC_PI_2 - 2.0 * lo);
        let bridge = &cm.bridge;
        let near_seam = [bridge.left(), bridge.right()].iter().any(|s| (r - s).abs() <= 2.0 * FD_STEP);
        let tol = if near_seam { 1e-5 } else { 1e-6 };
        let k = cm.metric.curvatures(r).unwrap();
        for (plane, exact) in [(PlaneKind::Radial, k.k_radial), (PlaneKind::Spherical, k.k_spherical)] {
            let fd = fd_curvature_oracle_with_step(&cm.metric, r, plane, cm.fd_step(r)).unwrap();
            prop_assert!((fd - exact).abs() <= tol * (1.0 + exact.abs()), "r={r} {plane:?}: {fd} vs {exact}");
        }
    }
}

#[test]
fn counterexample_is_deterministic() {
    let a = CounterexampleMetric::standard(3).unwrap();
    let b = CounterexampleMetric::standard(3).unwrap();
    for i in 1..200 {
        let r = i as f64 * FRAC_PI_2 / 200.0;
        assert_eq!(a.metric.profile().f(r).to_bits(), b.metric.profile().f(r).to_bits());
        assert_eq!(a.metric.profile().d2f(r).to_bits(), b.metric.profile().d2f(r).to_bits());
    }
}
