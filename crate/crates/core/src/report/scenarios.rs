use std::time::Instant;

use super::{CheckRecord, Num, RunReport, Status, Table, Timing};
use crate::comparison_engine::{
    bonnet_myers_step, equality_rigidity_check, hessian_comparison_check, key_lemma_check, monotonicity_check,
    rescaled_volume_step, rigidity_classifier, theorem_b_check, GridVerdict, PinchFunction, PinchHypothesis,
    StepVerdict, Theorem,
};
use crate::counterexample::{build_bridge, claims_grid, solve_c, verify_claims};
use crate::error::{GeometryError, Result};
use crate::grid::RadiusGrid;
use crate::model_spaces::SpaceForm;
use crate::plane_operator::fuzz_eigen_bounds;
use crate::report::config::{Command, ScenarioConfig};
use crate::warped_metrics::{curvature_band, fd_curvature_oracle, PlaneKind, RadialProfile, WarpedMetric};

/// Agreement required between the difference oracle and the closed forms.
const ORACLE_TOL: f64 = 1e-6;
const GAUSS_TOL: f64 = 1e-12;

/// Runs one scenario. Unmet hypotheses become verdicts; only invalid input
/// is an error.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let start = Instant::now();
    let (checks, table) = match config.command {
        Command::ModelTable => model_table(config)?,
        Command::Curvature => curvature(config)?,
        Command::PinchVerify => (pinch_verify(config)?, None),
        Command::Lemma1Fuzz => (lemma1_fuzz(config)?, None),
        Command::Counterexample => counterexample(config)?,
        Command::RigidityClassify => (rigidity_classify(config)?, None),
        Command::TheoremB => (theorem_b(config)?, None),
    };
    let mut report = RunReport::new(config.clone(), checks, table);
    report.timing = Timing(Some(start.elapsed()));
    Ok(report)
}

fn metric(config: &ScenarioConfig) -> Result<WarpedMetric> {
    WarpedMetric::new(RadialProfile::parse(&config.profile)?, config.n)
}

fn grid(metric: &WarpedMetric, config: &ScenarioConfig) -> Result<RadiusGrid> {
    let g = metric.default_grid(config.a, config.grid)?;
    match config.r_max {
        Some(r) => RadiusGrid::uniform(g.first().min(r / config.grid as f64), r, config.grid),
        None => Ok(g),
    }
}

fn model_table(config: &ScenarioConfig) -> Result<(Vec<CheckRecord>, Option<Table>)> {
    let space = SpaceForm::new(config.a, config.n)?;
    let r_max = config.r_max.unwrap_or_else(|| {
        if config.a > 0.0 {
            space.admissible_radius()
        } else {
            3.0
        }
    });
    let g = RadiusGrid::uniform(r_max / config.grid as f64, r_max, config.grid)?;
    let mut table = Table::new(&["r", "f_a", "lambda_a", "A_a", "V_a"]);
    let mut v = GridVerdict::new("model_spaces");
    for &r in g.radii() {
        let f = space.warp_function(r)?;
        let df = space.warp_derivative(r)?;
        let lambda = space.hessian_eigen_lower(r)?;
        let area = space.sphere_area(r)?;
        let vol = space.ball_volume(r)?;
        table.push(&[r, f, lambda, area, vol]);
        let margin = config.tol - (lambda * f - df).abs() / df.abs().max(1.0);
        v.record(r, lambda * f, Some(df), Some(margin), 0.0);
    }
    Ok((vec![CheckRecord::from_grid(&v)], Some(table)))
}

fn curvature(config: &ScenarioConfig) -> Result<(Vec<CheckRecord>, Option<Table>)> {
    let m = metric(config)?;
    let g = grid(&m, config)?;
    let mut table = Table::new(&[
        "r",
        "f",
        "df",
        "d2f",
        "k_radial",
        "k_spherical",
        "fd_radial",
        "fd_spherical",
    ]);
    let mut oracle = GridVerdict::new("fd_curvature_oracle");
    let mut gauss = GridVerdict::new("gauss_codazzi_check");
    let p = m.profile();
    for &r in g.radii() {
        let k = m.curvatures(r)?;
        let fd = |plane| fd_curvature_oracle(&m, r, plane).ok();
        let (fr, fs) = (fd(PlaneKind::Radial), fd(PlaneKind::Spherical));
        table.push(&[
            r,
            p.f(r),
            p.df(r),
            p.d2f(r),
            k.k_radial,
            k.k_spherical,
            fr.unwrap_or(f64::NAN),
            fs.unwrap_or(f64::NAN),
        ]);
        let err = match (fr, fs) {
            (Some(a), Some(b)) => Some(
                ((a - k.k_radial).abs() / (1.0 + k.k_radial.abs()))
                    .max((b - k.k_spherical).abs() / (1.0 + k.k_spherical.abs())),
            ),
            _ => None,
        };
        oracle.record(r, err.unwrap_or(f64::NAN), err.map(|_| ORACLE_TOL), err.map(|e| ORACLE_TOL - e), 0.0);
        let (_, residual) = m.gauss_codazzi_check(r)?;
        gauss.record(r, residual, Some(GAUSS_TOL), Some(GAUSS_TOL - residual), 0.0);
    }
    let mut oracle_rec = CheckRecord::from_grid(&oracle);
    if oracle.undefined_count() == oracle.radii.len() {
        oracle_rec.verdict = Status::Inconclusive;
        oracle_rec.notes.push("no radius far enough from the pole and the domain end".into());
    }
    Ok((vec![oracle_rec, CheckRecord::from_grid(&gauss)], Some(table)))
}

/// Applies the chain's unmet premises to a computed record.
fn under(mut rec: CheckRecord, unmet: &[String]) -> CheckRecord {
    if !unmet.is_empty() {
        rec.verdict = Status::HypothesisUnmet;
        rec.hypothesis_failures.extend(unmet.iter().cloned());
    }
    rec
}

fn guarded(name: &str, res: Result<GridVerdict>, unmet: &[String]) -> Result<CheckRecord> {
    match res {
        Ok(v) => Ok(under(CheckRecord::from_grid(&v), unmet)),
        Err(GeometryError::HypothesisUnmet(msg)) => Ok(CheckRecord::unmet(name, msg)),
        Err(e) => Err(e),
    }
}

fn step_record(
    name: &str,
    m: &WarpedMetric,
    hyp: &PinchHypothesis,
    g: &RadiusGrid,
    step: fn(&WarpedMetric, &PinchHypothesis, f64) -> Result<StepVerdict>,
) -> Result<CheckRecord> {
    let mut v = GridVerdict::new(name);
    for &r in g.radii() {
        match step(m, hyp, r)? {
            StepVerdict::Undefined { k } => v.record(r, k, None, None, 0.0),
            StepVerdict::Checked { lhs, rhs, pass } => {
                let margin = (rhs - lhs) / rhs;
                // the step applies its own slack; keep its decision
                v.record(r, lhs, Some(rhs), Some(if pass { margin.max(0.0) } else { margin.min(-f64::MIN_POSITIVE) }), 0.0);
            }
        }
    }
    Ok(CheckRecord::from_grid(&v).with_detail("undefined_points", v.undefined_count() as f64))
}

fn pinch_verify(config: &ScenarioConfig) -> Result<Vec<CheckRecord>> {
    let m = metric(config)?;
    let g = grid(&m, config)?;
    let a = config.a;
    let mut unmet = Vec::new();
    let mut checks = Vec::new();

    let band = curvature_band(&m, a, &g);
    let mut band_rec = CheckRecord::new("curvature_band", Status::Pass);
    band_rec.radius_grid = g.radii().iter().copied().map(Num).collect();
    band_rec.values = band.s_samples().iter().copied().map(Num).collect();
    band_rec.margin = Num(-band.worst_excess);
    band_rec.worst_radius = Num(band.worst_radius);
    if !band.upper_bound_ok {
        let msg = format!(
            "upper curvature bound K <= {a} fails: max K - a = {:e} at r = {}",
            band.worst_excess, band.worst_radius
        );
        band_rec.verdict = Status::HypothesisUnmet;
        band_rec.hypothesis_failures.push(msg.clone());
        unmet.push(msg);
    }
    checks.push(band_rec);

    let domain_end = m.domain_end();
    let hyp = match &config.pinch {
        None => PinchHypothesis::from_band(&band, domain_end.min(g.last()))?,
        Some(spec) => {
            let hyp = PinchHypothesis::new(a, PinchFunction::parse(spec)?, g.last())?;
            let mut lower = GridVerdict::new("pinch_lower_bound");
            for &r in g.radii() {
                let kmin = m.curvatures(r)?.min();
                let floor = a - hyp.s(r);
                let slack = config.tol * (1.0 + floor.abs());
                lower.record(r, kmin, Some(floor), Some(kmin - floor + slack), 0.0);
            }
            let rec = CheckRecord::from_grid(&lower);
            if !lower.pass {
                let msg = format!("lower bound a - s <= K fails at r = {}", lower.worst_radius);
                unmet.push(msg.clone());
                checks.push(CheckRecord {
                    verdict: Status::HypothesisUnmet,
                    hypothesis_failures: vec![msg],
                    ..rec
                });
            } else {
                checks.push(rec);
            }
            hyp
        }
    };

    checks.push(guarded("hessian_comparison_check", hessian_comparison_check(&m, a, &g), &unmet)?);
    checks.push(guarded("monotonicity_check", monotonicity_check(&m, a, &g), &unmet)?);
    checks.push(under(CheckRecord::from_grid(&key_lemma_check(&m, &hyp, &g)?), &unmet));
    checks.push(under(step_record("bonnet_myers_step", &m, &hyp, &g, bonnet_myers_step)?, &unmet));
    checks.push(under(step_record("rescaled_volume_step", &m, &hyp, &g, rescaled_volume_step)?, &unmet));
    match equality_rigidity_check(&m, a, g.last(), &g, config.tol) {
        Ok(eq) => {
            let status = if !eq.triggered {
                Status::Inconclusive
            } else {
                Status::from_pass(eq.pass)
            };
            let mut rec = CheckRecord::new("equality_rigidity_check", status)
                .with_detail("ratio_at_end", eq.ratio_at_end)
                .with_detail("max_deviation", eq.max_deviation);
            rec.margin = Num(config.tol - eq.max_deviation);
            rec.worst_radius = Num(eq.worst_radius);
            if !eq.triggered {
                rec.notes.push("F does not return to 1 at the outer radius; equality case not reached".into());
            }
            checks.push(rec);
        }
        Err(GeometryError::HypothesisUnmet(msg)) => checks.push(CheckRecord::unmet("equality_rigidity_check", msg)),
        Err(e) => return Err(e),
    }
    Ok(checks)
}

fn lemma1_fuzz(config: &ScenarioConfig) -> Result<Vec<CheckRecord>> {
    let s = fuzz_eigen_bounds(config.n_max, config.trials, config.seed)?;
    let mut bounds = CheckRecord::new("eigen_bounds_check", Status::from_pass(s.bound_violations == 0))
        .with_detail("trials", s.trials as f64)
        .with_detail("violations", s.bound_violations as f64)
        .with_detail("not_psd", s.hypothesis_failures as f64);
    bounds.margin = Num(s.worst_bound_margin);
    if s.hypothesis_failures > 0 {
        bounds
            .notes
            .push(format!("{} operators failed the PSD check and were skipped", s.hypothesis_failures));
    }
    let mut pair = CheckRecord::new("diagonalizing_pair", Status::from_pass(s.pair_violations == 0))
        .with_detail("trials", s.trials as f64)
        .with_detail("violations", s.pair_violations as f64)
        .with_detail("worst_residual", s.worst_pair_residual);
    pair.margin = Num(1e-10 - s.worst_pair_residual);
    Ok(vec![bounds, pair])
}

fn counterexample(config: &ScenarioConfig) -> Result<(Vec<CheckRecord>, Option<Table>)> {
    let mut checks = Vec::new();
    let c = solve_c();
    let residual = c.sin() + c - std::f64::consts::FRAC_PI_2;
    let mut rec = CheckRecord::new("solve_c", Status::from_pass(residual.abs() < 1e-12))
        .with_detail("c", c)
        .with_detail("residual", residual);
    rec.margin = Num(1e-12 - residual.abs());
    checks.push(rec);

    let bridge = match build_bridge(c, config.epsilon) {
        Ok(b) => b,
        Err(GeometryError::Construction(msg)) => {
            let mut rec = CheckRecord::new("build_bridge", Status::Fail);
            rec.notes.push(msg);
            checks.push(rec);
            return Ok((checks, None));
        }
        Err(e) => return Err(e),
    };
    let rep = bridge.report.clone();
    let mut rec = CheckRecord::new("build_bridge", Status::Pass)
        .with_detail("epsilon", config.epsilon)
        .with_detail("m1", bridge.amplitudes[0])
        .with_detail("m2", bridge.amplitudes[1])
        .with_detail("retries", bridge.retries as f64)
        .with_detail("max_h2", rep.max_second)
        .with_detail("max_abs_h1", rep.max_abs_first)
        .with_detail("seam_left", rep.left.max())
        .with_detail("seam_right", rep.right.max())
        .with_detail("points", rep.points as f64);
    rec.margin = Num(1e-8 - rep.left.max().max(rep.right.max()));
    checks.push(rec);

    let cm = crate::counterexample::assemble_profile(c, config.epsilon, bridge, config.n)?;
    checks.push(CheckRecord::new("assemble_profile", Status::Pass).with_detail("domain_end", cm.metric.domain_end()));

    let v = verify_claims(&cm, config.n)?;
    let mut claims = CheckRecord::new("verify_claims", Status::from_pass(v.pass))
        .with_detail("inner_min_k", v.inner.min_k)
        .with_detail("inner_max_k", v.inner.max_k)
        .with_detail("bridge_min_k", v.bridge.min_k)
        .with_detail("bridge_max_k", v.bridge.max_k)
        .with_detail("outer_min_k", v.outer.min_k)
        .with_detail("outer_max_k", v.outer.max_k)
        .with_detail("boundary_curvature", v.boundary_curvature)
        .with_detail("samples", v.samples as f64);
    claims.margin = Num(v.inner.min_k.min(v.bridge.min_k).min(v.outer.min_k));
    claims.worst_radius = Num(if v.bridge.min_k < v.outer.min_k { v.bridge.min_at } else { v.outer.min_at });
    for (ok, what) in [
        (v.nonnegative, "K >= 0 everywhere"),
        (v.round_inside, "K = 1 inside"),
        (v.flat_outside, "K = 0 near the boundary"),
    ] {
        if !ok {
            claims.notes.push(format!("{what} fails"));
        }
    }
    checks.push(claims);

    // the upper-bound premise must be what breaks with a = 0
    let mut tb = CheckRecord::new("theorem_b_check", Status::from_pass(v.upper_bound_failure.is_some()));
    tb.detail.insert("a".into(), Num(0.0));
    match &v.upper_bound_failure {
        Some(msg) => {
            tb.hypothesis_failures.push(msg.clone());
            tb.notes
                .push("K >= 0 with K = 0 on the boundary sphere does not force K = 0: the lower bound does not suffice".into());
        }
        None => tb.notes.push("the chain ran although K <= 0 is violated inside".into()),
    }
    checks.push(tb);

    let table = if config.dump {
        let mut t = Table::new(&["r", "f", "df", "d2f", "k_radial", "k_spherical"]);
        let p = cm.profile();
        for r in claims_grid(&cm) {
            let k = cm.metric.curvatures(r)?;
            t.push(&[r, p.f(r), p.df(r), p.d2f(r), k.k_radial, k.k_spherical]);
        }
        Some(t)
    } else {
        None
    };
    Ok((checks, table))
}

pub(crate) fn parse_theorem(s: &str) -> Result<Theorem> {
    match s {
        "A" | "a" => Ok(Theorem::A),
        "1" | "one" => Ok(Theorem::One),
        _ => Err(GeometryError::Parse(format!("theorem must be A or 1, got {s:?}"))),
    }
}

fn rigidity_classify(config: &ScenarioConfig) -> Result<Vec<CheckRecord>> {
    let spec = config
        .pinch
        .as_deref()
        .ok_or_else(|| GeometryError::InvalidParameter("rigidity-classify needs --pinch".into()))?;
    let theorem = parse_theorem(&config.theorem)?;
    let a = match theorem {
        Theorem::A => -1.0,
        Theorem::One => 0.0,
    };
    let hyp = PinchHypothesis::new(a, PinchFunction::parse(spec)?, f64::INFINITY)?;
    let v = rigidity_classifier(&hyp, config.n, theorem)?;
    let status = if v.conclusive { Status::Pass } else { Status::Inconclusive };
    let mut rec = CheckRecord::new("rigidity_classifier", status).with_detail("condition_value", v.condition_value);
    rec.radius_grid = v.witness_radii.iter().copied().map(Num).collect();
    rec.values = v.witness_values.iter().copied().map(Num).collect();
    rec.margin = Num(v.condition_value);
    rec.forces_rigidity = Some(v.forces_rigidity);
    rec.notes.push(v.hypothesis_name.as_str().to_string());
    rec.notes.push(v.note);
    Ok(vec![rec])
}

fn theorem_b(config: &ScenarioConfig) -> Result<Vec<CheckRecord>> {
    let m = metric(config)?;
    let g0 = grid(&m, config)?;
    let radius = config.radius.unwrap_or(g0.last());
    let g = RadiusGrid::uniform(g0.first().min(radius / config.grid as f64), radius, config.grid)?;
    let rec = match theorem_b_check(&m, config.a, radius, &g) {
        Ok(v) => {
            let mut rec = CheckRecord::new("theorem_b_check", Status::from_pass(v.forces_rigidity))
                .with_detail("boundary_pinch", v.condition_value)
                .with_detail("radius", radius);
            rec.radius_grid = v.witness_radii.iter().copied().map(Num).collect();
            rec.values = v.witness_values.iter().copied().map(Num).collect();
            rec.margin = Num(v.condition_value);
            rec.forces_rigidity = Some(v.forces_rigidity);
            if !v.note.is_empty() {
                rec.notes.push(v.note);
            }
            rec
        }
        Err(GeometryError::HypothesisUnmet(msg)) => CheckRecord::unmet("theorem_b_check", msg),
        Err(e) => return Err(e),
    };
    Ok(vec![rec])
}
