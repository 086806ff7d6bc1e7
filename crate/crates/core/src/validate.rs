//! Cross-module oracle suite: each check compares two independent computations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{enumerate_basis, output_amplitude, postselection_oracle};
use crate::linop::{build_composed_map, build_single_loop_map, random_sequence, TransferMatrix};
use crate::loss::{
    loss_matrix, lossy_composed_map, lossy_single_loop_map, postselection_probability, LossParams,
};
use crate::oracle::{overlap_by_quadrature, survival_by_gram_permanent};
use crate::permanent::{permanent_naive, permanent_ryser};
use crate::rng::stream_rng;
use crate::temporal::{
    apply_jitter, evolve_pulse_train, fidelity_expansion, fidelity_permanent, gaussian_overlap,
    MismatchParams, TemporalState,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed discrepancy.
    pub worst: f64,
    pub tolerance: f64,
    pub instances: usize,
}

impl Check {
    fn new(name: &'static str, worst: f64, tolerance: f64, instances: usize) -> Self {
        Self {
            name,
            passed: worst <= tolerance,
            worst,
            tolerance,
            instances,
        }
    }
}

/// Runs every check, each on its own rng stream of `seed`.
pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    let checks: [fn(u64) -> Result<Check>; 10] = [
        permanent_routes,
        unitarity,
        telescoping,
        lossy_map_routes,
        overlap_quadrature,
        temporal_normalisation,
        spatial_degeneration,
        fidelity_routes,
        fock_completeness,
        dilation_vs_gram,
    ];
    checks
        .iter()
        .enumerate()
        .map(|(k, check)| check(seed.wrapping_add(k as u64)))
        .collect()
}

fn random_complex(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = stream_rng(seed, 1);
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn permanent_routes(seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=6 {
        for k in 0..5 {
            let m = random_complex(n, seed.wrapping_mul(31).wrapping_add((n * 5 + k) as u64));
            let (a, b) = (permanent_naive(&m)?, permanent_ryser(&m)?);
            worst = worst.max((a - b).norm() / a.norm().max(1.0));
            count += 1;
        }
    }
    Ok(Check::new("permanent: naive vs Ryser", worst, 1e-10, count))
}

pub fn unitarity(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let m = rng.random_range(1..=8usize);
        let loops = rng.random_range(1..=m.saturating_sub(1).max(1));
        let seq = random_sequence(m, loops, &mut rng)?;
        worst = worst.max(build_composed_map(&seq)?.unitarity_deviation());
    }
    Ok(Check::new("lossless U is unitary", worst, 1e-12, 200))
}

pub fn telescoping(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=6usize);
        let loops = rng.random_range(1..=5usize);
        let loss = LossParams::new(rng.random_range(0.5..=1.0), rng.random_range(0.5..=1.0))?;
        let seq = random_sequence(m, loops, &mut rng)?;
        let direct = lossy_composed_map(&seq, loss, false)?;
        let skewed = loss_matrix(m, loops, loss)?.apply(&build_composed_map(&seq)?)?;
        worst = worst.max(direct.max_abs_diff(&skewed));
    }
    Ok(Check::new("prod V' = (prod V) o L(L)", worst, 1e-12, 100))
}

pub fn lossy_map_routes(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=8usize);
        let loss = LossParams::new(rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0))?;
        let seq = random_sequence(m, 1, &mut rng)?;
        let direct = lossy_single_loop_map(&seq, loss)?;
        let skewed = loss_matrix(m, 1, loss)?.apply(&build_single_loop_map(&seq)?)?;
        worst = worst.max(direct.max_abs_diff(&skewed));
    }
    Ok(Check::new("V' direct vs V o L(1)", worst, 1e-14, 100))
}

pub fn overlap_quadrature(_seed: u64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for k in 0..=32 {
        let d = -4.0 + 0.25 * k as f64;
        worst =
            worst.max((gaussian_overlap(d, 0.0, 1.0) - overlap_by_quadrature(d, 0.0, 1.0)).abs());
    }
    Ok(Check::new(
        "Gaussian overlap vs quadrature",
        worst,
        1e-8,
        33,
    ))
}

fn random_occupation<R: Rng>(m: usize, max_photons: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let occ: Vec<usize> = (0..m).map(|_| rng.random_range(0..=2usize)).collect();
        let n: usize = occ.iter().sum();
        if n >= 1 && n <= max_photons {
            return occ;
        }
    }
}

pub fn temporal_normalisation(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let m = rng.random_range(1..=4usize);
        let params = MismatchParams::in_width_units(rng.random_range(-1.0..1.0), 0.5)?;
        let seq = random_sequence(m, 1, &mut rng)?;
        let input = TemporalState::from_occupation(&random_occupation(m, 3, &mut rng))?;
        let jittered = apply_jitter(&input, &params, &mut rng)?;
        let out = evolve_pulse_train(&seq, &jittered.state, &params)?;
        worst = worst.max((out.norm_sqr() - 1.0).abs());
    }
    Ok(Check::new(
        "output temporal state is normalised",
        worst,
        1e-12,
        30,
    ))
}

pub fn spatial_degeneration(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in 1..=5 {
        let seq = random_sequence(m, 1, &mut rng)?;
        let v = build_single_loop_map(&seq)?;
        for i in 1..=m {
            let mut occ = vec![0; m];
            occ[i - 1] = 1;
            let out = evolve_pulse_train(
                &seq,
                &TemporalState::from_occupation(&occ)?,
                &MismatchParams::ideal(),
            )?;
            for j in 1..=m {
                let p = out.bin_probability(&[j]);
                worst = worst.max((p - v.entry(i, j).norm_sqr()).abs());
                count += 1;
            }
        }
    }
    Ok(Check::new(
        "single photon at delta = 0 follows |V_ij|^2",
        worst,
        1e-12,
        count,
    ))
}

pub fn fidelity_routes(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.random_range(1..=5usize);
        let params = MismatchParams::in_width_units(rng.random_range(-1.5..1.5), 0.7)?;
        let seq = random_sequence(m, 1, &mut rng)?;
        let occupation = random_occupation(m, 3, &mut rng);
        let input = TemporalState::from_occupation(&occupation)?;
        let jittered = apply_jitter(&input, &params, &mut rng)?;
        let ideal = evolve_pulse_train(&seq, &input, &params.without_mismatch())?;
        let actual = evolve_pulse_train(&seq, &jittered.state, &params)?;
        let expansion = fidelity_expansion(&ideal, &actual, params.c())?;
        let permanent = fidelity_permanent(&seq, &params, &occupation, &jittered.offsets)?;
        worst = worst.max((expansion - permanent).abs());
    }
    Ok(Check::new(
        "fidelity: configuration sum vs permanent",
        worst,
        1e-10,
        50,
    ))
}

pub fn fock_completeness(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in 1..=4usize {
        let loops = m.saturating_sub(1).max(1);
        let u = build_composed_map(&random_sequence(m, loops, &mut rng)?)?;
        for n in 1..=3 {
            let basis = enumerate_basis(m, n)?;
            for input in basis.states() {
                let total: f64 = basis
                    .states()
                    .iter()
                    .map(|out| output_amplitude(&u, input, out).map(|a| a.norm_sqr()))
                    .sum::<Result<f64>>()?;
                worst = worst.max((total - 1.0).abs());
                count += 1;
            }
        }
    }
    Ok(Check::new(
        "Fock output distribution sums to 1",
        worst,
        1e-9,
        count,
    ))
}

/// The dilation oracle against the Gram-permanent closed form, plus the row-weight formula
/// where the two must agree (one photon).
pub fn dilation_vs_gram(seed: u64) -> Result<Check> {
    let mut rng = stream_rng(seed, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let m = rng.random_range(1..=3usize);
        let loops = m.saturating_sub(1).max(1);
        let loss = LossParams::new(rng.random_range(0.6..=1.0), rng.random_range(0.6..=1.0))?;
        let seq = random_sequence(m, loops, &mut rng)?;
        let map: TransferMatrix = lossy_composed_map(&seq, loss, true)?;
        let occupation = random_occupation(m, 3, &mut rng);
        let oracle = postselection_oracle(&map, &occupation)?;
        worst = worst.max((oracle - survival_by_gram_permanent(&map, &occupation)?).abs());
        let mut single = vec![0; m];
        single[rng.random_range(0..m)] = 1;
        let oracle = postselection_oracle(&map, &single)?;
        worst = worst.max((oracle - postselection_probability(&map, &single)?).abs());
    }
    Ok(Check::new(
        "dilation oracle vs Gram permanent",
        worst,
        1e-9,
        100,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        for check in run_all(2024).unwrap() {
            assert!(check.passed, "{check:?}");
        }
    }
}
