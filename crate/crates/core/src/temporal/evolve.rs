use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::state::{multiplicity_factorial, PhotonLabel, Region, TemporalState};
use super::MismatchParams;
use crate::error::{Error, Result};
use crate::linop::SwitchingSequence;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Consecutive guard rejections after which a jitter draw gives up.
const MAX_REDRAWS: usize = 10_000;

/// Runs a pulse train through one inner-loop pass.
///
/// At beamsplitter `t` every region-A or region-B photon in bin `t` is replaced by
/// `u12 B(t+1, Δ+δ) + u11 C(t-1, Δ)` (from A) or `u22 B(t+1, Δ+δ) + u21 C(t-1, Δ)` (from B).
/// The product of creation operators is expanded branch by branch, and identical label
/// multisets merge with their bosonic weights.
pub fn evolve_pulse_train(
    seq: &SwitchingSequence,
    input: &TemporalState,
    params: &MismatchParams,
) -> Result<TemporalState> {
    let settings = seq.require_single_pass()?;
    let m = seq.modes();
    if input.modes() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: input.modes(),
        });
    }
    for label in input.labels() {
        if label.region != Region::A {
            return Err(Error::InputNotInRegionA);
        }
        if !(1..=m).contains(&label.time_bin) {
            return Err(Error::InvalidParameter(format!(
                "input photon in bin {} of a {m}-bin train",
                label.time_bin
            )));
        }
        params.check_shift(label.shift)?;
    }

    // coefficients of the (unnormalised) monomials prod L^† |0⟩
    let mut poly: BTreeMap<Vec<PhotonLabel>, Complex64> = input
        .entries()
        .map(|(photons, gamma)| {
            (
                photons.to_vec(),
                gamma / multiplicity_factorial(photons).sqrt(),
            )
        })
        .collect();

    for t in 1..=m + 1 {
        let bs = &settings[t - 1];
        let mut next: BTreeMap<Vec<PhotonLabel>, Complex64> = BTreeMap::new();
        for (photons, coef) in poly {
            let (active, rest): (Vec<PhotonLabel>, Vec<PhotonLabel>) = photons
                .into_iter()
                .partition(|p| p.time_bin == t && p.region != Region::C);
            let mut branches = vec![(rest, coef)];
            for label in active {
                let (to_loop, to_exit) = match label.region {
                    Region::A => (bs.u12(), bs.u11()),
                    _ => (bs.u22(), bs.u21()),
                };
                let looped = PhotonLabel::new(Region::B, t + 1, label.shift + params.delta());
                let exited = PhotonLabel::new(Region::C, t - 1, label.shift);
                let mut expanded = Vec::with_capacity(2 * branches.len());
                for (photons, amp) in &branches {
                    for (factor, new_label) in [(to_loop, looped), (to_exit, exited)] {
                        if factor == ZERO {
                            continue;
                        }
                        let mut p = photons.clone();
                        p.push(new_label);
                        expanded.push((p, amp * factor));
                    }
                }
                branches = expanded;
            }
            for (mut p, amp) in branches {
                p.sort();
                *next.entry(p).or_insert(ZERO) += amp;
            }
        }
        poly = next;
    }

    let mut out = Vec::with_capacity(poly.len());
    for (photons, coef) in poly {
        if coef == ZERO {
            continue;
        }
        for p in &photons {
            if p.region != Region::C {
                return Err(Error::PhotonInLoop);
            }
            if !(1..=m).contains(&p.time_bin) {
                return Err(Error::InvalidParameter(format!(
                    "photon exited into bin {}",
                    p.time_bin
                )));
            }
            params.check_shift(p.shift)?;
        }
        let gamma = coef * multiplicity_factorial(&photons).sqrt();
        out.push((photons, gamma));
    }
    TemporalState::from_configurations(m, out)
}

/// A jittered input state together with the per-bin offsets that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Jittered {
    pub state: TemporalState,
    /// `offsets[i - 1]` is `ε_i`; unoccupied bins stay at 0.
    pub offsets: Vec<f64>,
    /// Draws discarded by the bin-confusion guard.
    pub rejections: usize,
}

/// Shifts every photon of occupied input bin `i` by one shared draw `ε_i ~ N(0, σ^2)`.
///
/// Draws happen in ascending bin order; a draw with `|ε| >= τ/10` is discarded and redrawn.
pub fn apply_jitter<R: Rng + ?Sized>(
    input: &TemporalState,
    params: &MismatchParams,
    rng: &mut R,
) -> Result<Jittered> {
    let m = input.modes();
    let mut occupied = vec![false; m];
    for label in input.labels() {
        if label.region != Region::A {
            return Err(Error::InputNotInRegionA);
        }
        if !(1..=m).contains(&label.time_bin) {
            return Err(Error::InvalidParameter(format!(
                "input photon in bin {} of a {m}-bin train",
                label.time_bin
            )));
        }
        occupied[label.time_bin - 1] = true;
    }
    let (offsets, rejections) = draw_offsets(&occupied, params, rng)?;
    let mut shifted = Vec::with_capacity(input.len());
    for (photons, gamma) in input.entries() {
        let moved = photons
            .iter()
            .map(|p| {
                let shift = p.shift + offsets[p.time_bin - 1];
                params.check_shift(shift)?;
                Ok(PhotonLabel::new(p.region, p.time_bin, shift))
            })
            .collect::<Result<Vec<_>>>()?;
        shifted.push((moved, gamma));
    }
    Ok(Jittered {
        state: TemporalState::from_configurations(m, shifted)?,
        offsets,
        rejections,
    })
}

/// One guarded `N(0, σ^2)` draw per occupied bin, as `σ z` with standard normal `z`.
pub(crate) fn draw_offsets<R: Rng + ?Sized>(
    occupied: &[bool],
    params: &MismatchParams,
    rng: &mut R,
) -> Result<(Vec<f64>, usize)> {
    let mut offsets = vec![0.0; occupied.len()];
    let mut rejections = 0;
    if params.sigma() == 0.0 {
        return Ok((offsets, rejections));
    }
    let bound = params.bin_confusion_bound();
    for (offset, _) in offsets.iter_mut().zip(occupied).filter(|(_, &occ)| occ) {
        let mut attempts = 0;
        loop {
            let z: f64 = rng.sample(StandardNormal);
            let eps = params.sigma() * z;
            if eps.abs() < bound {
                *offset = eps;
                break;
            }
            rejections += 1;
            attempts += 1;
            if attempts >= MAX_REDRAWS {
                return Err(Error::BinConfusion { shift: eps, bound });
            }
        }
    }
    Ok((offsets, rejections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{build_single_loop_map, random_sequence, BeamsplitterSetting};
    use crate::rng::stream_rng;

    fn label(bin: usize, shift: f64) -> PhotonLabel {
        PhotonLabel::new(Region::C, bin, shift)
    }

    #[test]
    fn identity_map_shifts_each_photon_once() {
        let seq = SwitchingSequence::single_pass(2, vec![BeamsplitterSetting::swap(); 3]).unwrap();
        let input = TemporalState::from_occupation(&[1, 1]).unwrap();
        let params = MismatchParams::in_width_units(0.3, 0.0).unwrap();
        let out = evolve_pulse_train(&seq, &input, &params).unwrap();
        assert_eq!(out.len(), 1);
        let config = out.configurations().next().unwrap();
        assert_eq!(config.photons, vec![label(1, 0.3), label(2, 0.3)]);
        assert!((config.amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_photon_marginals_match_the_spatial_map() {
        let params = MismatchParams::ideal();
        for seed in 0..20 {
            let m = 1 + seed as usize % 5;
            let seq = random_sequence(m, 1, &mut stream_rng(seed, 0)).unwrap();
            let v = build_single_loop_map(&seq).unwrap();
            for i in 1..=m {
                let mut occ = vec![0; m];
                occ[i - 1] = 1;
                let input = TemporalState::from_occupation(&occ).unwrap();
                let out = evolve_pulse_train(&seq, &input, &params).unwrap();
                for j in 1..=m {
                    let amp = out.amplitude(&[label(j, 0.0)]);
                    assert!((amp - v.entry(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let seq = SwitchingSequence::single_pass(2, vec![BeamsplitterSetting::swap(); 3]).unwrap();
        let params = MismatchParams::ideal();
        let in_loop = TemporalState::from_configurations(
            2,
            [(
                vec![PhotonLabel::new(Region::B, 1, 0.0)],
                Complex64::new(1.0, 0.0),
            )],
        )
        .unwrap();
        assert!(matches!(
            evolve_pulse_train(&seq, &in_loop, &params),
            Err(Error::InputNotInRegionA)
        ));
        let three = TemporalState::from_occupation(&[1, 1, 1]).unwrap();
        assert!(matches!(
            evolve_pulse_train(&seq, &three, &params),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
        let far = TemporalState::from_configurations(
            2,
            [(
                vec![PhotonLabel::new(Region::A, 1, 50.0)],
                Complex64::new(1.0, 0.0),
            )],
        )
        .unwrap();
        assert!(matches!(
            evolve_pulse_train(&seq, &far, &params),
            Err(Error::BinConfusion { .. })
        ));
    }

    #[test]
    fn loop_error_accumulating_past_the_guard_is_caught() {
        // first bin circulates m times on the identity-setting path
        let m = 6;
        let mut settings = vec![BeamsplitterSetting::swap()];
        settings.extend(std::iter::repeat_n(BeamsplitterSetting::identity(), m - 1));
        settings.push(BeamsplitterSetting::swap());
        let seq = SwitchingSequence::single_pass(m, settings).unwrap();
        let params = MismatchParams::new(1.9, 0.0, 1.0, 100.0).unwrap();
        let mut occ = vec![0; m];
        occ[0] = 1;
        let input = TemporalState::from_occupation(&occ).unwrap();
        assert!(matches!(
            evolve_pulse_train(&seq, &input, &params),
            Err(Error::BinConfusion { .. })
        ));
    }

    #[test]
    fn zero_sigma_jitter_is_identity() {
        let input = TemporalState::from_occupation(&[1, 0, 2]).unwrap();
        let j = apply_jitter(&input, &MismatchParams::ideal(), &mut stream_rng(0, 0)).unwrap();
        assert_eq!(j.state, input);
        assert_eq!(j.rejections, 0);
    }

    #[test]
    fn jitter_is_shared_within_a_bin_and_reproducible() {
        let input = TemporalState::from_occupation(&[2, 0, 1]).unwrap();
        let params = MismatchParams::in_width_units(0.0, 0.5).unwrap();
        let a = apply_jitter(&input, &params, &mut stream_rng(4, 0)).unwrap();
        let b = apply_jitter(&input, &params, &mut stream_rng(4, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.offsets[1], 0.0);
        let labels: Vec<_> = a.state.labels().copied().collect();
        assert_eq!(labels[0].shift, a.offsets[0]);
        assert_eq!(labels[1].shift, a.offsets[0]);
        assert_eq!(labels[2].shift, a.offsets[2]);
    }

    #[test]
    fn jitter_guard_redraws() {
        // σ = τ/10 means roughly a third of draws land outside the guard
        let params = MismatchParams::new(0.0, 1.0, 0.1, 10.0).unwrap();
        let (offsets, rejections) =
            draw_offsets(&[true; 200], &params, &mut stream_rng(1, 0)).unwrap();
        assert!(rejections > 0);
        assert!(offsets.iter().all(|e| e.abs() < 1.0));
    }
}
