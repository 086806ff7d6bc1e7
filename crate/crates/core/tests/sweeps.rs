use std::fs;

use fiberloop::sweep::{
    dump_map, run_loss_sweep, run_mismatch_sweep, Experiment, Grid, MapDump, OutputFormat,
    SweepConfig,
};

#[test]
fn record_count_is_product_of_grid_sizes() {
    let mut cfg = SweepConfig::for_experiment(Experiment::LossSwitch);
    cfg.m = Some("2:3:1".parse().unwrap());
    cfg.eta_f = Some("0.8:1:0.1".parse().unwrap());
    cfg.eta_s = Some("0.9,1".parse().unwrap());
    cfg.iterations = Some(10);
    assert_eq!(run_loss_sweep(&cfg).unwrap().len(), 2 * 3 * 2);

    let mut cfg = SweepConfig::for_experiment(Experiment::MismatchDelta);
    cfg.m = Some("1:3:1".parse().unwrap());
    cfg.delta = Some("-0.5:0.5:0.25".parse().unwrap());
    cfg.sigma = Some("0,0.5".parse().unwrap());
    cfg.iterations = Some(5);
    assert_eq!(run_mismatch_sweep(&cfg).unwrap().len(), 3 * 5 * 2);
}

#[test]
fn emitted_metrics_are_probabilities() {
    let mut cfg = SweepConfig::for_experiment(Experiment::LossSwitch);
    cfg.eta_f = Some("0.7:1:0.15".parse().unwrap());
    cfg.eta_s = Some("0.7:1:0.15".parse().unwrap());
    cfg.iterations = Some(50);
    let table = run_loss_sweep(&cfg).unwrap();
    for col in ["s_max", "s_mean", "p_s_at_best"] {
        for x in table.floats(col).unwrap() {
            assert!((0.0..=1.0 + 1e-12).contains(&x), "{col} = {x}");
        }
    }
    let mut cfg = SweepConfig::for_experiment(Experiment::JitterSigma);
    cfg.iterations = Some(40);
    let table = run_mismatch_sweep(&cfg).unwrap();
    for col in ["f_mean", "f_min", "f_max"] {
        for x in table.floats(col).unwrap() {
            assert!((0.0..=1.0 + 1e-12).contains(&x), "{col} = {x}");
        }
    }
}

#[test]
fn single_mode_jitter_row_matches_closed_form() {
    let mut cfg = SweepConfig::for_experiment(Experiment::JitterSigma);
    cfg.m = Some(Grid::Single(1.0));
    cfg.sigma = Some(Grid::Single(1.0));
    cfg.iterations = Some(4000);
    cfg.master_seed = 21;
    let table = run_mismatch_sweep(&cfg).unwrap();
    let mean = table.floats("f_mean").unwrap()[0];
    let se = table.floats("f_std_err").unwrap()[0];
    assert!(
        (mean - std::f64::consts::FRAC_1_SQRT_2).abs() <= 3.0 * se,
        "{mean} ± {se}"
    );
}

#[test]
fn config_file_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.json");
    fs::write(
        &config_path,
        r#"{
            "experiment": "mismatch-delta",
            "m": "2:3:1",
            "delta": [0.0, 0.5],
            "iterations": 12,
            "master_seed": 5
        }"#,
    )
    .unwrap();
    let cfg = SweepConfig::from_path(&config_path).unwrap();
    let table = run_mismatch_sweep(&cfg).unwrap();

    let csv = String::from_utf8(table.to_bytes(&cfg, OutputFormat::Csv).unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,m,photons,delta_over_c,sigma_over_c,tau_over_c,trials,seed,f_mean,f_min,f_max,f_std_err,rejections,version"
    );
    assert_eq!(lines.count(), 4);

    let json: serde_json::Value =
        serde_json::from_slice(&table.to_bytes(&cfg, OutputFormat::Json).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 4);
    assert_eq!(json["config"]["experiment"], "mismatch-delta");
    assert_eq!(json["metadata"]["units"]["tau"], 100.0);
}

#[test]
fn map_dump_survives_a_file_round_trip() {
    let mut cfg = SweepConfig::for_experiment(Experiment::MapDump);
    cfg.master_seed = 31;
    let dump = dump_map(&cfg).unwrap();
    assert_eq!((dump.m, dump.loops), (3, 2));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("maps.json");
    fs::write(&path, serde_json::to_string_pretty(&dump).unwrap()).unwrap();
    let back = MapDump::from_json_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, dump);
    for (a, b) in back.v.iter().zip(&dump.v) {
        assert_eq!(a.to_transfer().unwrap(), b.to_transfer().unwrap());
    }
}
