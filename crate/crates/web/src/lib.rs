//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string; non-finite values become `null`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rigidity_core::comparison_engine::{ratio_table, PinchHypothesis};
use rigidity_core::counterexample::{assemble_profile, build_bridge, solve_c};
use rigidity_core::warped_metrics::curvature_band;
use rigidity_core::{RadialProfile, RadiusGrid, SpaceForm, WarpedMetric};

fn fin(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ModelCurves {
    r: Vec<f64>,
    f: Vec<Option<f64>>,
    lambda: Vec<Option<f64>>,
    area: Vec<Option<f64>>,
}

/// `f_a`, `λ_a` and `A_a` on `points` radii up to `r_max` (clipped to
/// `π/(2√a)` for positive `a`).
pub fn model_curves_json(a: f64, n: usize, r_max: f64, points: usize) -> Result<String, String> {
    let space = SpaceForm::new(a, n).map_err(|e| e.to_string())?;
    let end = r_max.min(space.admissible_radius());
    let grid = RadiusGrid::uniform(end / points as f64, end, points).map_err(|e| e.to_string())?;
    let mut out = ModelCurves {
        r: Vec::new(),
        f: Vec::new(),
        lambda: Vec::new(),
        area: Vec::new(),
    };
    for &r in grid.radii() {
        out.r.push(r);
        out.f.push(space.warp_function(r).ok().and_then(fin));
        out.lambda.push(space.hessian_eigen_lower(r).ok().and_then(fin));
        out.area.push(space.sphere_area(r).ok().and_then(fin));
    }
    to_json(&out)
}

#[derive(Serialize)]
struct KeyLemmaCurves {
    r: Vec<f64>,
    ratio: Vec<Option<f64>>,
    bound: Vec<Option<f64>>,
    pinch: Vec<Option<f64>>,
    upper_bound_ok: bool,
    worst_excess: Option<f64>,
    worst_radius: Option<f64>,
}

/// Volume ratio `F` against the Key Lemma bound, with the pinch extracted
/// from the profile's own curvatures.
pub fn key_lemma_json(profile: &str, a: f64, n: usize, points: usize) -> Result<String, String> {
    let p = RadialProfile::parse(profile).map_err(|e| e.to_string())?;
    let m = WarpedMetric::new(p, n).map_err(|e| e.to_string())?;
    let grid = m.default_grid(a, points).map_err(|e| e.to_string())?;
    let band = curvature_band(&m, a, &grid);
    let hyp = PinchHypothesis::from_band(&band, grid.last()).map_err(|e| e.to_string())?;
    let table = ratio_table(&m, &hyp, &grid).map_err(|e| e.to_string())?;
    to_json(&KeyLemmaCurves {
        ratio: table.ratio_f.iter().copied().map(fin).collect(),
        bound: table.key_bound.iter().map(|b| b.and_then(fin)).collect(),
        pinch: band.s_samples().iter().copied().map(fin).collect(),
        r: table.radii,
        upper_bound_ok: band.upper_bound_ok,
        worst_excess: fin(band.worst_excess),
        worst_radius: fin(band.worst_radius),
    })
}

#[derive(Serialize)]
struct CounterexampleCurves {
    c: f64,
    epsilon: f64,
    amplitudes: [f64; 2],
    r: Vec<f64>,
    f: Vec<f64>,
    k_radial: Vec<Option<f64>>,
    k_spherical: Vec<Option<f64>>,
}

/// Profile and curvatures of the nonnegatively curved counterexample.
pub fn counterexample_json(epsilon: f64, points: usize) -> Result<String, String> {
    let c = solve_c();
    let bridge = build_bridge(c, epsilon).map_err(|e| e.to_string())?;
    let amplitudes = bridge.amplitudes;
    let cm = assemble_profile(c, epsilon, bridge, 3).map_err(|e| e.to_string())?;
    let end = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-3);
    let grid = RadiusGrid::uniform(end / points as f64, end, points).map_err(|e| e.to_string())?;
    let mut out = CounterexampleCurves {
        c,
        epsilon,
        amplitudes,
        r: Vec::new(),
        f: Vec::new(),
        k_radial: Vec::new(),
        k_spherical: Vec::new(),
    };
    for &r in grid.radii() {
        let k = cm.metric.curvatures(r).map_err(|e| e.to_string())?;
        out.r.push(r);
        out.f.push(cm.profile().f(r));
        out.k_radial.push(fin(k.k_radial));
        out.k_spherical.push(fin(k.k_spherical));
    }
    to_json(&out)
}

#[wasm_bindgen]
pub fn model_curves(a: f64, n: usize, r_max: f64, points: usize) -> Result<String, JsValue> {
    model_curves_json(a, n, r_max, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn key_lemma(profile: &str, a: f64, n: usize, points: usize) -> Result<String, JsValue> {
    key_lemma_json(profile, a, n, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn counterexample(epsilon: f64, points: usize) -> Result<String, JsValue> {
    counterexample_json(epsilon, points).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn model_curves_shape() {
        let v: Value = serde_json::from_str(&model_curves_json(1.0, 3, 10.0, 64).unwrap()).unwrap();
        let r = v["r"].as_array().unwrap();
        assert_eq!(r.len(), 64);
        assert!((r[63].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(v["lambda"][63].as_f64(), Some(0.0));
    }

    #[test]
    fn key_lemma_on_model() {
        let v: Value = serde_json::from_str(&key_lemma_json("sinh", -1.0, 3, 32).unwrap()).unwrap();
        assert_eq!(v["upper_bound_ok"], Value::Bool(true));
        for (f, b) in v["ratio"].as_array().unwrap().iter().zip(v["bound"].as_array().unwrap()) {
            assert!((f.as_f64().unwrap() - 1.0).abs() < 1e-10);
            assert_eq!(b.as_f64(), Some(1.0));
        }
    }

    #[test]
    fn counterexample_curvatures() {
        let v: Value = serde_json::from_str(&counterexample_json(0.1, 200).unwrap()).unwrap();
        for k in v["k_radial"].as_array().unwrap() {
            assert!(k.as_f64().unwrap() >= -1e-8);
        }
        assert!(counterexample_json(5.0, 10).is_err());
        assert!(key_lemma_json("bogus", -1.0, 3, 32).is_err());
    }
}
