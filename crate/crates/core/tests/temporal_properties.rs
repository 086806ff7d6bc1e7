use fiberloop::linop::{random_sequence, SwitchingSequence};
use fiberloop::rng::stream_rng;
use fiberloop::temporal::{
    apply_jitter, evolve_pulse_train, fidelity_expansion, fidelity_permanent, MismatchParams,
    Region, TemporalState,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

/// Every route a photon born in `bin` with shift `eps` can take through one pass, walked
/// beamsplitter by beamsplitter: `(exit bin, shift, amplitude)`.
fn enumerate_paths(
    seq: &SwitchingSequence,
    bin: usize,
    eps: f64,
    delta: f64,
) -> Vec<(usize, f64, Complex64)> {
    let m = seq.modes();
    let mut done = Vec::new();
    let bs = seq.setting(1, bin);
    done.push((bin - 1, eps, bs.u11()));
    // (next beamsplitter, loop entries so far, amplitude)
    let mut in_loop = vec![(bin + 1, 1usize, bs.u12())];
    while let Some((t, entries, amp)) = in_loop.pop() {
        let bs = seq.setting(1, t);
        done.push((t - 1, eps + entries as f64 * delta, amp * bs.u21()));
        if t <= m {
            in_loop.push((t + 1, entries + 1, amp * bs.u22()));
        }
    }
    done.into_iter()
        .filter(|(_, _, amp)| amp.norm() > 0.0)
        .collect()
}

#[test]
fn shifts_match_path_enumeration() {
    for seed in 0..40 {
        let mut rng = stream_rng(seed, 0);
        let m = rng.random_range(1..=3usize);
        let delta = rng.random_range(-2.0..2.0);
        let eps = rng.random_range(-2.0..2.0);
        let seq = random_sequence(m, 1, &mut rng).unwrap();
        let params = MismatchParams::in_width_units(delta, 0.0).unwrap();
        for bin in 1..=m {
            let mut occ = vec![0; m];
            occ[bin - 1] = 1;
            let input = TemporalState::from_occupation(&occ).unwrap();
            let shifted = TemporalState::from_configurations(
                m,
                input.configurations().map(|c| {
                    let photons = c
                        .photons
                        .iter()
                        .map(|p| fiberloop::temporal::PhotonLabel::new(p.region, p.time_bin, eps))
                        .collect();
                    (photons, c.amplitude)
                }),
            )
            .unwrap();
            let out = evolve_pulse_train(&seq, &shifted, &params).unwrap();
            let paths = enumerate_paths(&seq, bin, eps, delta);
            assert!(paths.iter().all(|(j, _, _)| (1..=m).contains(j)));
            assert_eq!(out.len(), paths.len(), "seed {seed} bin {bin}");
            for config in out.configurations() {
                let [label] = config.photons.as_slice() else {
                    panic!("single photon expected");
                };
                assert_eq!(label.region, Region::C);
                let (_, shift, amp) = paths
                    .iter()
                    .find(|(j, _, _)| *j == label.time_bin)
                    .expect("exit bin reached by some path");
                assert!((label.shift - shift).abs() < 1e-12);
                assert!((config.amplitude - amp).norm() < 1e-12);
                // loop entries: j - i + 1 for j >= i, none for j = i - 1
                let j = label.time_bin;
                let entries = if j + 1 == bin {
                    0.0
                } else {
                    (j + 1 - bin) as f64
                };
                assert!((label.shift - (eps + entries * delta)).abs() < 1e-12);
            }
        }
    }
}

fn random_occupation(m: usize, seed: u64) -> Vec<usize> {
    let mut rng = stream_rng(seed, 9);
    loop {
        let occ: Vec<usize> = (0..m).map(|_| rng.random_range(0..=2usize)).collect();
        let n: usize = occ.iter().sum();
        if (1..=3).contains(&n) {
            return occ;
        }
    }
}

#[test]
fn lossless_evolution_is_normalised() {
    for seed in 0..100 {
        let mut rng = stream_rng(seed, 0);
        let m = rng.random_range(1..=4usize);
        let params = MismatchParams::in_width_units(rng.random_range(-1.0..1.0), 0.8).unwrap();
        let seq = random_sequence(m, 1, &mut rng).unwrap();
        let input = TemporalState::from_occupation(&random_occupation(m, seed)).unwrap();
        let jittered = apply_jitter(&input, &params, &mut rng).unwrap();
        let out = evolve_pulse_train(&seq, &jittered.state, &params).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn jitter_sample_spread_matches_sigma() {
    let sigma = 1.3;
    let params = MismatchParams::in_width_units(0.0, sigma).unwrap();
    let input = TemporalState::from_occupation(&[1]).unwrap();
    let mut rng = stream_rng(77, 0);
    let draws: Vec<f64> = (0..10_000)
        .map(|_| apply_jitter(&input, &params, &mut rng).unwrap().offsets[0])
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    assert!((var.sqrt() / sigma - 1.0).abs() < 0.02);
}

#[test]
fn same_seed_same_jitter() {
    let params = MismatchParams::in_width_units(0.0, 0.5).unwrap();
    let input = TemporalState::from_occupation(&[1, 2, 0]).unwrap();
    let a = apply_jitter(&input, &params, &mut stream_rng(4, 4)).unwrap();
    let b = apply_jitter(&input, &params, &mut stream_rng(4, 4)).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fidelity_is_a_probability(
        seed in any::<u64>(), m in 1usize..=4, delta in -2.0f64..2.0, sigma in 0.0f64..2.0,
    ) {
        let mut rng = stream_rng(seed, 0);
        let params = MismatchParams::in_width_units(delta, sigma).unwrap();
        let seq = random_sequence(m, 1, &mut rng).unwrap();
        let occ = random_occupation(m, seed);
        let offsets: Vec<f64> = (0..m).map(|_| sigma * rng.random_range(-1.0..1.0)).collect();
        let f = fidelity_permanent(&seq, &params, &occ, &offsets).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
    }

    #[test]
    fn nonzero_shift_loses_fidelity(seed in any::<u64>(), m in 1usize..=3, delta in 0.05f64..2.0) {
        let mut rng = stream_rng(seed, 0);
        let params = MismatchParams::in_width_units(delta, 0.0).unwrap();
        let seq = random_sequence(m, 1, &mut rng).unwrap();
        let occ = vec![1; m];
        let input = TemporalState::from_occupation(&occ).unwrap();
        let ideal = evolve_pulse_train(&seq, &input, &params.without_mismatch()).unwrap();
        let actual = evolve_pulse_train(&seq, &input, &params).unwrap();
        let f = fidelity_expansion(&ideal, &actual, 1.0).unwrap();
        // the first pulse always enters the loop, so some shift is present
        prop_assert!(f < 1.0 - 1e-9);
    }
}
