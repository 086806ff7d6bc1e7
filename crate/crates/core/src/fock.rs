//! Exact multi-photon amplitudes on small Fock spaces.
//!
//! This is a brute-force reference: it enumerates every occupation vector and evaluates every
//! transition amplitude as a permanent, so it is only meant for a handful of modes and photons.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::TransferMatrix;
use crate::permanent::permanent;

/// Largest basis [`enumerate_basis`] will build.
pub const DEFAULT_BASIS_CAP: usize = 100_000;

/// Singular values above `1 + CONTRACTION_TOL` make a map unphysical.
pub const CONTRACTION_TOL: f64 = 1e-9;

/// All occupation vectors of `n` photons over `m` modes in descending lexicographic order,
/// e.g. `(2,0), (1,1), (0,2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    m: usize,
    n: usize,
    states: Vec<Vec<usize>>,
}

impl FockBasis {
    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

pub fn enumerate_basis(m: usize, n: usize) -> Result<FockBasis> {
    enumerate_basis_with_cap(m, n, DEFAULT_BASIS_CAP)
}

pub fn enumerate_basis_with_cap(m: usize, n: usize, cap: usize) -> Result<FockBasis> {
    if m == 0 {
        return Err(Error::ZeroModes);
    }
    let size = binomial((m + n - 1) as u128, n as u128);
    if size > cap as u128 {
        return Err(Error::BasisTooLarge { size, cap });
    }
    fn fill(
        prefix: &mut Vec<usize>,
        remaining: usize,
        modes_left: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if modes_left == 1 {
            prefix.push(remaining);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=remaining).rev() {
            prefix.push(k);
            fill(prefix, remaining - k, modes_left - 1, out);
            prefix.pop();
        }
    }
    let mut states = Vec::with_capacity(size as usize);
    fill(&mut Vec::with_capacity(m), n, m, &mut states);
    Ok(FockBasis { m, n, states })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn expand_modes(occupation: &[usize]) -> Vec<usize> {
    occupation
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k))
        .collect()
}

/// `perm(U[in, out]) / sqrt(prod in_i! prod out_j!)`, with rows of `U` repeated per input
/// photon and columns per output photon.
pub fn output_amplitude(
    map: &TransferMatrix,
    input: &[usize],
    output: &[usize],
) -> Result<Complex64> {
    let m = map.dim();
    for occ in [input, output] {
        if occ.len() != m {
            return Err(Error::OccupationLength {
                expected: m,
                found: occ.len(),
            });
        }
    }
    let rows = expand_modes(input);
    let cols = expand_modes(output);
    if rows.len() != cols.len() {
        return Err(Error::PhotonNumberMismatch {
            input: rows.len(),
            output: cols.len(),
        });
    }
    let u = map.as_matrix();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |a, b| u[(rows[a], cols[b])]);
    let norm: f64 = input.iter().chain(output).map(|&k| factorial(k)).product();
    Ok(permanent(&sub)? / norm.sqrt())
}

/// Unitary dilation of a contraction `A = W Σ X^†`.
///
/// One loss mode is appended per singular value `s_k < 1`:
///
/// ```text
/// [ A           W_K c_K ]
/// [ c_K X^†_K   -s_K    ]      c_k = sqrt(1 - s_k^2)
/// ```
///
/// System modes come first, so the top-left block is `A` itself.
pub fn dilate(map: &TransferMatrix) -> Result<TransferMatrix> {
    let m = map.dim();
    let a = map.as_matrix();
    let svd = a.clone().svd(true, true);
    let (Some(w), Some(x_adj)) = (svd.u, svd.v_t) else {
        return Err(Error::InvalidParameter("SVD did not converge".into()));
    };
    let singular: Vec<f64> = svd.singular_values.iter().copied().collect();
    if let Some(&s) = singular.iter().find(|&&s| s > 1.0 + CONTRACTION_TOL) {
        return Err(Error::NonContractive(s));
    }
    let lossy: Vec<usize> = (0..m).filter(|&k| singular[k] < 1.0).collect();
    let r = lossy.len();
    let mut d = DMatrix::<Complex64>::zeros(m + r, m + r);
    d.view_mut((0, 0), (m, m)).copy_from(a);
    for (idx, &k) in lossy.iter().enumerate() {
        let s = singular[k].min(1.0);
        let c = (1.0 - s * s).sqrt();
        for i in 0..m {
            d[(i, m + idx)] = w[(i, k)] * c;
            d[(m + idx, i)] = x_adj[(k, i)] * c;
        }
        d[(m + idx, m + idx)] = Complex64::new(-s, 0.0);
    }
    TransferMatrix::from_matrix(d)
}

/// Probability that every input photon reaches a system mode under the lossy map `A`.
///
/// `A` is dilated to a unitary, the full output distribution over system and loss modes is
/// computed, and outcomes with no photon in a loss mode are summed.
pub fn postselection_oracle(map: &TransferMatrix, input: &[usize]) -> Result<f64> {
    let m = map.dim();
    if input.len() != m {
        return Err(Error::OccupationLength {
            expected: m,
            found: input.len(),
        });
    }
    let unitary = dilate(map)?;
    let total_modes = unitary.dim();
    let n: usize = input.iter().sum();
    let mut extended = input.to_vec();
    extended.resize(total_modes, 0);
    let basis = enumerate_basis(total_modes, n)?;
    let mut survived = 0.0;
    for out in basis.states() {
        if out[m..].iter().all(|&k| k == 0) {
            survived += output_amplitude(&unitary, &extended, out)?.norm_sqr();
        }
    }
    Ok(survived)
}
