use std::collections::HashMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::evolve::draw_offsets;
use super::state::{multiplicity_factorial, PhotonLabel, TemporalState};
use super::{gaussian_overlap, MismatchParams};
use crate::error::{Error, Result};
use crate::linop::{build_single_loop_map, random_sequence, SwitchingSequence};
use crate::par::map_indexed;
use crate::permanent::permanent;
use crate::rng::stream_rng;

/// Default number of random sequences per fidelity estimate.
pub const DEFAULT_FIDELITY_TRIALS: usize = 250;

fn label_overlap(a: &PhotonLabel, b: &PhotonLabel, c: f64) -> f64 {
    if a.region == b.region && a.time_bin == b.time_bin {
        gaussian_overlap(a.shift, b.shift, c)
    } else {
        0.0
    }
}

/// `⟨S'|S⟩` for two normalised configuration states, by explicit sum over permutations.
fn configuration_overlap(bra: &[PhotonLabel], ket: &[PhotonLabel], c: f64) -> f64 {
    if bra.len() != ket.len() {
        return 0.0;
    }
    let n = ket.len();
    let total: f64 = (0..n)
        .permutations(n)
        .map(|sigma| {
            sigma
                .iter()
                .zip(ket)
                .map(|(&s, k)| label_overlap(&bra[s], k, c))
                .product::<f64>()
        })
        .sum();
    total / (multiplicity_factorial(bra) * multiplicity_factorial(ket)).sqrt()
}

fn bin_key(photons: &[PhotonLabel]) -> Vec<usize> {
    let mut bins: Vec<usize> = photons.iter().map(|p| p.time_bin).collect();
    bins.sort_unstable();
    bins
}

/// `|⟨ideal|actual⟩|^2` as a literal double sum over configuration pairs, each pair
/// contributing `γ'^* γ sum_σ prod_i overlap(label'_σ(i), label_i)`.
///
/// Pairs whose bin multisets differ are skipped: every permutation of such a pair matches at
/// least one photon across bins, which contributes zero.
pub fn fidelity_expansion(ideal: &TemporalState, actual: &TemporalState, c: f64) -> Result<f64> {
    if ideal.modes() != actual.modes() {
        return Err(Error::DimensionMismatch {
            expected: ideal.modes(),
            found: actual.modes(),
        });
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "wave-packet width c = {c}"
        )));
    }
    let mut by_bins: HashMap<Vec<usize>, Vec<(&[PhotonLabel], Complex64)>> = HashMap::new();
    for (photons, gamma) in ideal.entries() {
        by_bins
            .entry(bin_key(photons))
            .or_default()
            .push((photons, gamma));
    }
    let mut overlap = Complex64::new(0.0, 0.0);
    for (photons, gamma) in actual.entries() {
        let Some(partners) = by_bins.get(&bin_key(photons)) else {
            continue;
        };
        for &(ideal_photons, ideal_gamma) in partners {
            overlap +=
                ideal_gamma.conj() * gamma * configuration_overlap(ideal_photons, photons, c);
        }
    }
    Ok(overlap.norm_sqr())
}

/// Fidelity through the permanent of the single-photon overlap matrix.
///
/// For input photons `p, q` (bins repeated by occupation),
/// `M_pq = sum_j V_pj^* V_qj exp(-Δ_{q→j}^2 / 4c^2)` with
/// `Δ_{q→j} = ε_q + (loop traversals from q to j) δ`, and
/// `F = |perm(M) / prod_i k_i!|^2`. `jitter` holds `ε_i` per bin, or is empty.
pub fn fidelity_permanent(
    seq: &SwitchingSequence,
    params: &MismatchParams,
    occupation: &[usize],
    jitter: &[f64],
) -> Result<f64> {
    let v = build_single_loop_map(seq)?;
    let m = v.dim();
    if occupation.len() != m {
        return Err(Error::OccupationLength {
            expected: m,
            found: occupation.len(),
        });
    }
    if !jitter.is_empty() && jitter.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: jitter.len(),
        });
    }
    let epsilon = |q: usize| jitter.get(q).copied().unwrap_or(0.0);
    let v = v.as_matrix();

    // overlap of each input's actual output amplitude with its ideal (unshifted) counterpart
    let mut damping = DMatrix::<f64>::zeros(m, m);
    for q in 0..m {
        for j in 0..m {
            if v[(q, j)] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let traversals = if j >= q { j - q + 1 } else { 0 };
            let shift = epsilon(q) + traversals as f64 * params.delta();
            params.check_shift(shift)?;
            damping[(q, j)] = gaussian_overlap(0.0, shift, params.c());
        }
    }

    let photons: Vec<usize> = occupation
        .iter()
        .enumerate()
        .flat_map(|(q, &k)| std::iter::repeat_n(q, k))
        .collect();
    let n = photons.len();
    let overlaps = DMatrix::from_fn(n, n, |a, b| {
        let (p, q) = (photons[a], photons[b]);
        (0..m)
            .map(|j| v[(p, j)].conj() * v[(q, j)] * damping[(q, j)])
            .sum::<Complex64>()
    });
    let normalisation: f64 = occupation
        .iter()
        .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
        .product();
    Ok((permanent(&overlaps)? / normalisation).norm_sqr())
}

/// Monte-Carlo fidelity estimate over random single-pass sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityTrials {
    pub m: usize,
    pub params: MismatchParams,
    pub trials: usize,
    pub seed: u64,
    pub occupation: Vec<usize>,
    /// Jitter draws averaged per sequence (ignored when `σ = 0`).
    pub jitter_repeats: usize,
}

impl FidelityTrials {
    /// One photon per bin, one jitter draw per sequence.
    pub fn new(m: usize, params: MismatchParams, trials: usize, seed: u64) -> Self {
        Self {
            m,
            params,
            trials,
            seed,
            occupation: vec![1; m],
            jitter_repeats: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Standard error of the mean.
    pub std_err: f64,
    pub trials: usize,
    /// Jitter draws rejected by the bin-confusion guard.
    pub rejections: usize,
}

pub fn expected_fidelity_mc(
    m: usize,
    params: &MismatchParams,
    trials: usize,
    seed: u64,
) -> Result<FidelityStats> {
    expected_fidelity_with(&FidelityTrials::new(m, *params, trials, seed))
}

/// Trial `t` draws its sequence, then its jitter, from stream `t` of `seed`.
pub fn expected_fidelity_with(spec: &FidelityTrials) -> Result<FidelityStats> {
    if spec.m == 0 {
        return Err(Error::ZeroModes);
    }
    if spec.trials == 0 || spec.jitter_repeats == 0 {
        return Err(Error::ZeroIterations);
    }
    if spec.occupation.len() != spec.m {
        return Err(Error::OccupationLength {
            expected: spec.m,
            found: spec.occupation.len(),
        });
    }
    let occupied: Vec<bool> = spec.occupation.iter().map(|&k| k > 0).collect();
    let repeats = if spec.params.sigma() == 0.0 {
        1
    } else {
        spec.jitter_repeats
    };
    let samples = map_indexed(spec.trials, |trial| -> Result<(f64, usize)> {
        let mut rng = stream_rng(spec.seed, trial as u64);
        let seq = random_sequence(spec.m, 1, &mut rng)?;
        let mut total = 0.0;
        let mut rejections = 0;
        for _ in 0..repeats {
            let (offsets, rejected) = draw_offsets(&occupied, &spec.params, &mut rng)?;
            rejections += rejected;
            total += fidelity_permanent(&seq, &spec.params, &spec.occupation, &offsets)?;
        }
        Ok((total / repeats as f64, rejections))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let variance = if samples.len() > 1 {
        samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(FidelityStats {
        mean,
        min: samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        max: samples
            .iter()
            .map(|s| s.0)
            .fold(f64::NEG_INFINITY, f64::max),
        std_err: (variance / n).sqrt(),
        trials: samples.len(),
        rejections: samples.iter().map(|s| s.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::BeamsplitterSetting;
    use crate::temporal::{apply_jitter, evolve_pulse_train};

    fn identity_two_mode() -> SwitchingSequence {
        SwitchingSequence::single_pass(2, vec![BeamsplitterSetting::swap(); 3]).unwrap()
    }

    fn expansion(
        seq: &SwitchingSequence,
        params: &MismatchParams,
        occ: &[usize],
        eps: &[f64],
    ) -> f64 {
        let input = TemporalState::from_occupation(occ).unwrap();
        let ideal = evolve_pulse_train(seq, &input, &params.without_mismatch()).unwrap();
        let shifted = if eps.is_empty() {
            input
        } else {
            TemporalState::from_configurations(
                input.modes(),
                input.entries().map(|(p, g)| {
                    let moved = p
                        .iter()
                        .map(|l| {
                            PhotonLabel::new(l.region, l.time_bin, l.shift + eps[l.time_bin - 1])
                        })
                        .collect();
                    (moved, g)
                }),
            )
            .unwrap()
        };
        let actual = evolve_pulse_train(seq, &shifted, params).unwrap();
        fidelity_expansion(&ideal, &actual, params.c()).unwrap()
    }

    #[test]
    fn self_fidelity_is_one() {
        let seq = random_sequence(3, 1, &mut stream_rng(8, 0)).unwrap();
        let out = evolve_pulse_train(
            &seq,
            &TemporalState::from_occupation(&[1, 1, 1]).unwrap(),
            &MismatchParams::ideal(),
        )
        .unwrap();
        assert!((fidelity_expansion(&out, &out, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_mode_loop_error() {
        let seq = SwitchingSequence::from_interior(1, vec![vec![]]).unwrap();
        for delta in [0.0, 0.2, 0.7, 1.5] {
            let params = MismatchParams::in_width_units(delta, 0.0).unwrap();
            let expected = (-delta * delta / 2.0).exp();
            assert!((expansion(&seq, &params, &[1], &[]) - expected).abs() < 1e-12);
            assert!(
                (fidelity_permanent(&seq, &params, &[1], &[]).unwrap() - expected).abs() < 1e-12
            );
        }
    }

    #[test]
    fn identity_map_two_photons() {
        let seq = identity_two_mode();
        let delta = 0.6;
        let params = MismatchParams::in_width_units(delta, 0.0).unwrap();
        let expected = (-delta * delta).exp();
        assert!((expansion(&seq, &params, &[1, 1], &[]) - expected).abs() < 1e-12);
        assert!(
            (fidelity_permanent(&seq, &params, &[1, 1], &[]).unwrap() - expected).abs() < 1e-12
        );
    }

    #[test]
    fn permanent_route_matches_expansion_with_collisions_and_jitter() {
        for seed in 0..10 {
            let m = 2 + seed as usize % 3;
            let mut rng = stream_rng(seed, 0);
            let seq = random_sequence(m, 1, &mut rng).unwrap();
            let params = MismatchParams::in_width_units(0.3, 0.4).unwrap();
            let mut occ = vec![0; m];
            occ[0] = 2;
            occ[m - 1] = 1;
            let input = TemporalState::from_occupation(&occ).unwrap();
            let jittered = apply_jitter(&input, &params, &mut rng).unwrap();
            let slow = expansion(&seq, &params, &occ, &jittered.offsets);
            let fast = fidelity_permanent(&seq, &params, &occ, &jittered.offsets).unwrap();
            assert!((slow - fast).abs() < 1e-10, "{slow} vs {fast}");
        }
    }

    #[test]
    fn ideal_trials_are_perfect() {
        let stats = expected_fidelity_mc(3, &MismatchParams::ideal(), 20, 1).unwrap();
        assert!((stats.mean - 1.0).abs() < 1e-12);
        assert!((stats.min - 1.0).abs() < 1e-12);
        assert!((stats.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = TemporalState::from_occupation(&[1]).unwrap();
        let b = TemporalState::from_occupation(&[1, 0]).unwrap();
        assert!(matches!(
            fidelity_expansion(&a, &b, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let seq = identity_two_mode();
        assert!(matches!(
            fidelity_permanent(&seq, &MismatchParams::ideal(), &[1], &[]),
            Err(Error::OccupationLength { .. })
        ));
        assert!(matches!(
            expected_fidelity_mc(2, &MismatchParams::ideal(), 0, 1),
            Err(Error::ZeroIterations)
        ));
    }
}
