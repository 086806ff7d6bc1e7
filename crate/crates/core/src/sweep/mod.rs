//! Seeded grid sweeps over loss and mismatch parameters.
//!
//! Every grid point reuses `master_seed`, so iteration `i` sees the same random switching
//! program at every point and trends along an axis are not masked by sampling noise.
//! Records come out in grid order (`m`, then `η_f`/`δ`, then `η_s`/`σ`) regardless of threading.

mod config;
mod dump;
mod table;

pub use config::{Angles, Experiment, Grid, OutputFormat, SweepConfig};
pub use dump::{dump_map, MapDump, MatrixJson};
pub use table::{format_significant, Cell, SweepTable, SIGNIFICANT_DIGITS};

use crate::error::{Error, Result};
use crate::loss::{optimize_similarity_with, LossParams, SimilaritySearch};
use crate::temporal::{expected_fidelity_with, FidelityTrials, MismatchParams};

pub const LOSS_COLUMNS: [&str; 12] = [
    "experiment",
    "m",
    "loops",
    "eta_f",
    "eta_s",
    "iterations",
    "seed",
    "s_max",
    "s_mean",
    "p_s_at_best",
    "best_iteration",
    "version",
];

pub const MISMATCH_COLUMNS: [&str; 14] = [
    "experiment",
    "m",
    "photons",
    "delta_over_c",
    "sigma_over_c",
    "tau_over_c",
    "trials",
    "seed",
    "f_mean",
    "f_min",
    "f_max",
    "f_std_err",
    "rejections",
    "version",
];

/// Inner-loop passes used by the loss sweeps: `m - 1`, but at least one.
pub fn loops_for(m: usize) -> usize {
    m.saturating_sub(1).max(1)
}

/// Runs whichever sweep the config names. `progress` receives `(done, total)` grid points.
pub fn run_sweep(
    config: &SweepConfig,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepTable> {
    match config.experiment {
        e if e.is_loss() => run_loss_sweep_with_progress(config, progress),
        e if e.is_mismatch() => run_mismatch_sweep_with_progress(config, progress),
        e => Err(Error::Config(format!("'{e}' is not a sweep"))),
    }
}

pub fn run_loss_sweep(config: &SweepConfig) -> Result<SweepTable> {
    run_loss_sweep_with_progress(config, &mut |_, _| {})
}

pub fn run_loss_sweep_with_progress(
    config: &SweepConfig,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepTable> {
    if !config.experiment.is_loss() {
        return Err(Error::Config(format!(
            "loss sweep cannot run experiment '{}'",
            config.experiment
        )));
    }
    let modes = config.modes()?;
    let eta_f = config.eta_f_values()?;
    let eta_s = config.eta_s_values()?;
    let iterations = config.iteration_count()?;
    let total = modes.len() * eta_f.len() * eta_s.len();

    let mut table = SweepTable::new(LOSS_COLUMNS.to_vec());
    for &m in &modes {
        let occupation = config.occupation_for(m)?;
        for &f in &eta_f {
            for &s in &eta_s {
                let loss = LossParams::new(f, s)?;
                let search = SimilaritySearch {
                    occupation: occupation.clone(),
                    include_outer: config.include_outer,
                    ..SimilaritySearch::new(m, loops_for(m), loss, iterations, config.master_seed)
                };
                let outcome = optimize_similarity_with(&search)?;
                table.push(vec![
                    config.experiment.name().into(),
                    m.into(),
                    search.loops.into(),
                    f.into(),
                    s.into(),
                    iterations.into(),
                    config.master_seed.into(),
                    outcome.best_similarity.into(),
                    outcome.mean_similarity.into(),
                    outcome.postselection_at_best.into(),
                    outcome.best_iteration.into(),
                    env!("CARGO_PKG_VERSION").into(),
                ]);
                progress(table.len(), total);
            }
        }
    }
    Ok(table)
}

pub fn run_mismatch_sweep(config: &SweepConfig) -> Result<SweepTable> {
    run_mismatch_sweep_with_progress(config, &mut |_, _| {})
}

pub fn run_mismatch_sweep_with_progress(
    config: &SweepConfig,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepTable> {
    if !config.experiment.is_mismatch() {
        return Err(Error::Config(format!(
            "mismatch sweep cannot run experiment '{}'",
            config.experiment
        )));
    }
    let modes = config.modes()?;
    let deltas = config.delta_values()?;
    let sigmas = config.sigma_values()?;
    let trials = config.iteration_count()?;
    let total = modes.len() * deltas.len() * sigmas.len();

    let mut table = SweepTable::new(MISMATCH_COLUMNS.to_vec());
    for &m in &modes {
        let occupation = config.occupation_for(m)?;
        let photons: usize = occupation.iter().sum();
        for &delta in &deltas {
            for &sigma in &sigmas {
                let params = MismatchParams::new(delta, sigma, 1.0, config.tau)?;
                let spec = FidelityTrials {
                    occupation: occupation.clone(),
                    jitter_repeats: config.jitter_repeats,
                    ..FidelityTrials::new(m, params, trials, config.master_seed)
                };
                let stats = expected_fidelity_with(&spec)?;
                table.push(vec![
                    config.experiment.name().into(),
                    m.into(),
                    photons.into(),
                    delta.into(),
                    sigma.into(),
                    config.tau.into(),
                    trials.into(),
                    config.master_seed.into(),
                    stats.mean.into(),
                    stats.min.into(),
                    stats.max.into(),
                    stats.std_err.into(),
                    stats.rejections.into(),
                    env!("CARGO_PKG_VERSION").into(),
                ]);
                progress(table.len(), total);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loss_config(m: &str, eta_f: &str, iterations: usize) -> SweepConfig {
        let mut cfg = SweepConfig::for_experiment(Experiment::LossSimilarity);
        cfg.m = Some(m.parse().unwrap());
        cfg.eta_f = Some(eta_f.parse().unwrap());
        cfg.iterations = Some(iterations);
        cfg.master_seed = 3;
        cfg
    }

    #[test]
    fn lossless_two_mode_point() {
        let table = run_loss_sweep(&loss_config("2", "1", 1750)).unwrap();
        assert_eq!(table.len(), 1);
        assert!(table.floats("s_max").unwrap()[0] >= 0.999);
        assert!((table.floats("p_s_at_best").unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_is_complete_and_in_order() {
        let mut cfg = loss_config("2:3:1", "0.8,1", 5);
        cfg.experiment = Experiment::LossSwitch;
        cfg.eta_s = Some("0.9:1:0.1".parse().unwrap());
        let table = run_loss_sweep(&cfg).unwrap();
        assert_eq!(table.len(), 8);
        assert_eq!(
            table.floats("m").unwrap(),
            vec![2., 2., 2., 2., 3., 3., 3., 3.]
        );
        assert_eq!(table.floats("eta_s").unwrap()[..2], [0.9, 1.0]);
        assert_eq!(table.floats("loops").unwrap()[7], 2.0);
    }

    #[test]
    fn loss_trend_at_three_modes() {
        let table = run_loss_sweep(&loss_config("3", "0.7,1.0", 400)).unwrap();
        let s = table.floats("s_max").unwrap();
        assert!(s[1] >= s[0], "{s:?}");
    }

    #[test]
    fn ideal_mismatch_row_is_perfect() {
        let mut cfg = SweepConfig::for_experiment(Experiment::MismatchDelta);
        cfg.m = Some(Grid::Single(3.0));
        cfg.delta = Some(Grid::Single(0.0));
        cfg.iterations = Some(20);
        let table = run_mismatch_sweep(&cfg).unwrap();
        for col in ["f_mean", "f_min", "f_max"] {
            assert!((table.floats(col).unwrap()[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_experiment_or_bad_grid() {
        let cfg = SweepConfig::for_experiment(Experiment::JitterSigma);
        assert!(run_loss_sweep(&cfg).is_err());
        let mut cfg = loss_config("2", "1", 5);
        assert!(run_mismatch_sweep(&cfg).is_err());
        cfg.eta_f = Some(Grid::Values(vec![]));
        assert!(run_loss_sweep(&cfg).is_err());
        cfg.eta_f = Some(Grid::Single(1.2));
        assert!(run_loss_sweep(&cfg).is_err());
        cfg.iterations = Some(0);
        assert!(run_loss_sweep(&cfg).is_err());
        let dump = SweepConfig::for_experiment(Experiment::MapDump);
        assert!(run_sweep(&dump, &mut |_, _| {}).is_err());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let mut cfg = SweepConfig::for_experiment(Experiment::JitterSigma);
        cfg.m = Some("1:2:1".parse().unwrap());
        cfg.sigma = Some("0:1:0.5".parse().unwrap());
        cfg.iterations = Some(30);
        cfg.master_seed = 11;
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let a = run_mismatch_sweep(&cfg)
                .unwrap()
                .to_bytes(&cfg, format)
                .unwrap();
            let b = run_mismatch_sweep(&cfg)
                .unwrap()
                .to_bytes(&cfg, format)
                .unwrap();
            assert_eq!(a, b);
        }
    }
}
