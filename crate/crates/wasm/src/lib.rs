//! Browser bindings: three small operations backing `www/index.html`.
//!
//! * [`race`]: mean normalized-distance curves of the Stein second-order
//!   method and 2SPSA on the skewed quartic, same seeds and budget.
//! * [`pd_map_2x2`]: any PD map applied to a symmetric 2x2 matrix.
//! * [`hessian_error_curve`]: Monte Carlo error of a Hessian estimator on a
//!   noiseless 2-D quadratic as the number of draws grows.
//!
//! The plain functions are usable natively; the `js_*` wrappers are the
//! exported JavaScript surface.

use steinzo::estimators::estimate_hessian;
use steinzo::experiment::{parse_pd_map, run_replicate, ExperimentConfig, ProblemInstance, RawConfig};
use steinzo::pdmap::{apply_pd_map, symmetric_lambda_min};
use steinzo::problems::QuadraticProblem;
use steinzo::{FnOracle, HessianEstimator, Matrix, Objective, RandomStream, Vector};
use wasm_bindgen::prelude::*;

/// Mean normalized-distance curves, one value per iteration `0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct RaceCurves {
    pub stein: Vec<f64>,
    pub spsa: Vec<f64>,
    /// Replicates where the Stein method ends strictly lower.
    pub stein_wins: usize,
    pub replicates: usize,
}

fn race_config(solver: &str, dim: usize, iterations: usize, replicates: usize, seed: u64) -> Result<ExperimentConfig, String> {
    let mut raw = RawConfig::default();
    raw.insert("problem", "skewed_quartic");
    raw.insert("dim", dim.to_string());
    raw.insert("solver", solver);
    raw.insert("iterations", iterations.to_string());
    raw.insert("replicates", replicates.to_string());
    raw.insert("base_seed", seed.to_string());
    raw.insert("theta0", "uniform:5");
    ExperimentConfig::from_raw(&raw).map_err(|e| e.to_string())
}

/// Runs both solvers in memory (no files) with 12 queries per iteration.
pub fn race(dim: usize, iterations: usize, replicates: usize, seed: u64) -> Result<RaceCurves, String> {
    if dim == 0 || replicates == 0 {
        return Err("dimension and replicates must be positive".into());
    }
    let mut curves = Vec::new();
    let mut finals = Vec::new();
    for solver in ["stein2", "2spsa"] {
        let config = race_config(solver, dim, iterations, replicates, seed)?;
        let problem = ProblemInstance::build(&config.problem, seed).map_err(|e| e.to_string())?;
        let mut sum = vec![0.0; iterations + 1];
        let mut last = Vec::new();
        for r in 0..replicates {
            let outcome = run_replicate(&config, &problem, r).map_err(|e| e.to_string())?;
            let norm = outcome.normalized();
            // A diverged replicate keeps its last value for the rest of the curve.
            for (k, s) in sum.iter_mut().enumerate() {
                *s += norm.get(k).copied().unwrap_or(f64::INFINITY) / replicates as f64;
            }
            last.push(outcome.final_normalized());
        }
        curves.push(sum);
        finals.push(last);
    }
    let stein_wins = finals[0].iter().zip(&finals[1]).filter(|(a, b)| a < b).count();
    let spsa = curves.pop().expect("two curves");
    let stein = curves.pop().expect("two curves");
    Ok(RaceCurves {
        stein,
        spsa,
        stein_wins,
        replicates,
    })
}

/// Maps `[[h11, h12], [h12, h22]]` with a PD map written in the config
/// grammar (`sqrt`, `sqrt:s:e`, `clamp:f`, `damp:f`, ...) at iteration `k`.
/// Returns `[m11, m12, m22, lambda_min(H), lambda_min(M)]`.
pub fn pd_map_2x2(map: &str, h11: f64, h12: f64, h22: f64, k: usize) -> Result<Vec<f64>, String> {
    let kind = parse_pd_map(map).map_err(|e| e.to_string())?;
    let h = Matrix::from_row_slice(2, 2, &[h11, h12, h12, h22]);
    let m = apply_pd_map(&kind, &h, k).map_err(|e| e.to_string())?;
    Ok(vec![
        m[(0, 0)],
        m[(0, 1)],
        m[(1, 1)],
        symmetric_lambda_min(&h),
        symmetric_lambda_min(&m),
    ])
}

fn hessian_kind(name: &str) -> Result<HessianEstimator, String> {
    match name {
        "one" => Ok(HessianEstimator::OnePoint),
        "two_forward" => Ok(HessianEstimator::TwoForward),
        "two_central" => Ok(HessianEstimator::TwoCentral),
        "three" => Ok(HessianEstimator::ThreePoint),
        other => Err(format!("unknown estimator `{other}` (one, two_forward, two_central, three)")),
    }
}

/// Max-entry error `|mean of n estimates - H|` of a Hessian estimator on
/// `f = theta^T diag(1, h22) theta / 2` at `theta = (1, 1)`, recorded at
/// `checkpoints` logarithmically spaced draw counts up to `draws`.
/// Returns pairs `[n_1, err_1, n_2, err_2, ...]`.
pub fn hessian_error_curve(
    estimator: &str,
    h22: f64,
    c: f64,
    draws: usize,
    checkpoints: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let kind = hessian_kind(estimator)?;
    if draws == 0 || checkpoints == 0 {
        return Err("draws and checkpoints must be positive".into());
    }
    let problem = QuadraticProblem::diagonal(&[1.0, h22], 0.0).map_err(|e| e.to_string())?;
    let mut oracle = FnOracle::new(2, |t: &Vector| problem.value(t));
    let theta = Vector::from_element(2, 1.0);
    let mut stream = RandomStream::new(seed, 0);
    let mut marks: Vec<usize> = (1..=checkpoints)
        .map(|i| ((draws as f64).powf(i as f64 / checkpoints as f64)).round().max(1.0) as usize)
        .collect();
    marks.dedup();
    let mut sum = Matrix::zeros(2, 2);
    let mut out = Vec::with_capacity(2 * marks.len());
    let mut next = 0;
    for n in 1..=draws {
        let u = stream.standard_normal_vector(2);
        sum += estimate_hessian(kind, &mut oracle, &theta, c, &u).map_err(|e| e.to_string())?;
        if next < marks.len() && n == marks[next] {
            let err = (&sum / n as f64 - problem.hessian()).amax();
            out.extend([n as f64, err]);
            next += 1;
        }
    }
    Ok(out)
}

#[wasm_bindgen]
pub struct JsRace {
    inner: RaceCurves,
}

#[wasm_bindgen]
impl JsRace {
    #[wasm_bindgen(getter)]
    pub fn stein(&self) -> Vec<f64> {
        self.inner.stein.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn spsa(&self) -> Vec<f64> {
        self.inner.spsa.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn stein_wins(&self) -> usize {
        self.inner.stein_wins
    }

    #[wasm_bindgen(getter)]
    pub fn replicates(&self) -> usize {
        self.inner.replicates
    }
}

#[wasm_bindgen(js_name = race)]
pub fn js_race(dim: usize, iterations: usize, replicates: usize, seed: u32) -> Result<JsRace, JsError> {
    race(dim, iterations, replicates, seed as u64)
        .map(|inner| JsRace { inner })
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = pdMap2x2)]
pub fn js_pd_map_2x2(map: &str, h11: f64, h12: f64, h22: f64, k: usize) -> Result<Vec<f64>, JsError> {
    pd_map_2x2(map, h11, h12, h22, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = hessianErrorCurve)]
pub fn js_hessian_error_curve(
    estimator: &str,
    h22: f64,
    c: f64,
    draws: usize,
    checkpoints: usize,
    seed: u32,
) -> Result<Vec<f64>, JsError> {
    hessian_error_curve(estimator, h22, c, draws, checkpoints, seed as u64).map_err(|e| JsError::new(&e))
}
