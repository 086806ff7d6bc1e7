//! Browser bindings: a lossy-map heatmap, similarity versus loop efficiency, and fidelity
//! versus loop error or jitter. Each export returns a JSON string.

use fiberloop::linop::random_sequence;
use fiberloop::loss::{lossy_composed_map, postselection_probability, similarity, LossParams};
use fiberloop::rng::stream_rng;
use fiberloop::sweep::{
    loops_for, run_loss_sweep, run_mismatch_sweep, Experiment, Grid, SweepConfig,
};
use fiberloop::{Error, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest mode count the page offers.
pub const MAX_MODES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossyMap {
    pub m: usize,
    pub loops: usize,
    /// `|U'_ij|`, row `i` is the input bin.
    pub magnitudes: Vec<Vec<f64>>,
    pub similarity: f64,
    pub postselection: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityCurve {
    pub eta_f: Vec<f64>,
    pub s_max: Vec<f64>,
    pub s_mean: Vec<f64>,
    pub p_s_at_best: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityCurve {
    /// `δ/c` or `σ/c`.
    pub x: Vec<f64>,
    pub f_mean: Vec<f64>,
    pub f_min: Vec<f64>,
    pub f_max: Vec<f64>,
}

fn check_modes(m: usize, max: usize) -> Result<()> {
    if m == 0 || m > max {
        return Err(Error::InvalidParameter(format!(
            "m = {m} is outside 1..={max}"
        )));
    }
    Ok(())
}

fn axis(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(2..=200).contains(&points) {
        return Err(Error::InvalidParameter(format!(
            "{points} points is outside 2..=200"
        )));
    }
    Ok((0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect())
}

/// The composed lossy map for a random program with `m - 1` passes, outer loop included.
pub fn lossy_map(m: usize, eta_f: f64, eta_s: f64, seed: u64) -> Result<LossyMap> {
    check_modes(m, MAX_MODES)?;
    let loops = loops_for(m);
    let seq = random_sequence(m, loops, &mut stream_rng(seed, 0))?;
    let map = lossy_composed_map(&seq, LossParams::new(eta_f, eta_s)?, true)?;
    Ok(LossyMap {
        m,
        loops,
        magnitudes: (1..=m)
            .map(|i| (1..=m).map(|j| map.entry(i, j).norm()).collect())
            .collect(),
        similarity: similarity(&map)?,
        postselection: postselection_probability(&map, &vec![1; m])?,
    })
}

/// Best-of-`iterations` similarity for `η_f` from `eta_min` to 1.
pub fn similarity_curve(
    m: usize,
    eta_s: f64,
    eta_min: f64,
    points: usize,
    iterations: usize,
    seed: u64,
) -> Result<SimilarityCurve> {
    check_modes(m, 6)?;
    let mut cfg = SweepConfig::for_experiment(Experiment::LossSimilarity);
    cfg.m = Some(Grid::Single(m as f64));
    cfg.eta_f = Some(Grid::Values(axis(eta_min, 1.0, points)?));
    cfg.eta_s = Some(Grid::Single(eta_s));
    cfg.iterations = Some(iterations);
    cfg.master_seed = seed;
    let table = run_loss_sweep(&cfg)?;
    let col = |name| table.floats(name).expect("numeric column");
    Ok(SimilarityCurve {
        eta_f: col("eta_f"),
        s_max: col("s_max"),
        s_mean: col("s_mean"),
        p_s_at_best: col("p_s_at_best"),
    })
}

/// Mean, worst and best fidelity over `trials` random programs, sweeping loop error
/// (`jitter = false`) or jitter from 0 to `max` (in units of `c`).
pub fn fidelity_curve(
    m: usize,
    jitter: bool,
    max: f64,
    points: usize,
    trials: usize,
    seed: u64,
) -> Result<FidelityCurve> {
    check_modes(m, 4)?;
    let experiment = if jitter {
        Experiment::JitterSigma
    } else {
        Experiment::MismatchDelta
    };
    let mut cfg = SweepConfig::for_experiment(experiment);
    let x = axis(0.0, max, points)?;
    cfg.m = Some(Grid::Single(m as f64));
    if jitter {
        cfg.sigma = Some(Grid::Values(x.clone()));
    } else {
        cfg.delta = Some(Grid::Values(x.clone()));
    }
    cfg.iterations = Some(trials);
    cfg.master_seed = seed;
    let table = run_mismatch_sweep(&cfg)?;
    let col = |name| table.floats(name).expect("numeric column");
    Ok(FidelityCurve {
        x,
        f_mean: col("f_mean"),
        f_min: col("f_min"),
        f_max: col("f_max"),
    })
}

fn to_js<T: Serialize>(result: Result<T>) -> std::result::Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = lossyMap)]
pub fn lossy_map_js(
    m: usize,
    eta_f: f64,
    eta_s: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(lossy_map(m, eta_f, eta_s, seed.into()))
}

#[wasm_bindgen(js_name = similarityCurve)]
pub fn similarity_curve_js(
    m: usize,
    eta_s: f64,
    eta_min: f64,
    points: usize,
    iterations: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(similarity_curve(
        m,
        eta_s,
        eta_min,
        points,
        iterations,
        seed.into(),
    ))
}

#[wasm_bindgen(js_name = fidelityCurve)]
pub fn fidelity_curve_js(
    m: usize,
    jitter: bool,
    max: f64,
    points: usize,
    trials: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(fidelity_curve(m, jitter, max, points, trials, seed.into()))
}
