//! Non-uniform loss in the fiber-loop architecture.
//!
//! Paths that circulate the inner loop more often cross more fiber and more switch
//! transmissions, so loss skews the implemented map instead of merely scaling it. After `L`
//! passes the accumulated attenuation on input bin `i` to output bin `j` is
//! `eta_s^L * eta^(L + j - i)` with `eta = eta_f * eta_s`; the outer loop adds a uniform
//! `eta_f^(m(L-1)) * eta_s^(2(L-1))` on top.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::{self, BeamsplitterSetting, SwitchingSequence, TransferMatrix};
use crate::par::map_indexed;
use crate::rng::stream_rng;

/// Default Monte-Carlo iteration count for similarity searches.
pub const DEFAULT_SEARCH_ITERATIONS: usize = 1750;

/// Fiber efficiency per `τ` of fiber and switch efficiency per traversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    eta_f: f64,
    eta_s: f64,
}

impl LossParams {
    pub fn new(eta_f: f64, eta_s: f64) -> Result<Self> {
        for (name, value) in [("eta_f", eta_f), ("eta_s", eta_s)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::EfficiencyOutOfRange { name, value });
            }
        }
        Ok(Self { eta_f, eta_s })
    }

    pub fn lossless() -> Self {
        Self {
            eta_f: 1.0,
            eta_s: 1.0,
        }
    }

    pub fn eta_f(&self) -> f64 {
        self.eta_f
    }

    pub fn eta_s(&self) -> f64 {
        self.eta_s
    }

    /// Combined efficiency of one loop traversal, `eta_f * eta_s`.
    pub fn eta(&self) -> f64 {
        self.eta_f * self.eta_s
    }

    pub fn is_lossless(&self) -> bool {
        self.eta_f == 1.0 && self.eta_s == 1.0
    }
}

/// Element-wise attenuation `eta_s^L * eta^(L + j - i)` accumulated over `L` passes.
///
/// Entries with `i - j > L` are never reached by a nonzero map amplitude; they follow the
/// formula anyway and can exceed 1 (negative exponent).
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    loops: usize,
    entries: DMatrix<f64>,
}

impl LossMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[(i - 1, j - 1)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `U ∘ 𝓛`. Entries where `U` is exactly zero stay zero.
    pub fn apply(&self, map: &TransferMatrix) -> Result<TransferMatrix> {
        if map.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: map.dim(),
            });
        }
        let u = map.as_matrix();
        let skewed = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            let z = u[(r, c)];
            if z == Complex64::new(0.0, 0.0) {
                z
            } else {
                z * self.entries[(r, c)]
            }
        });
        TransferMatrix::from_matrix(skewed)
    }
}

pub fn loss_matrix(m: usize, loops: usize, loss: LossParams) -> Result<LossMatrix> {
    if m == 0 {
        return Err(Error::ZeroModes);
    }
    if loops == 0 {
        return Err(Error::ZeroPasses);
    }
    let eta = loss.eta();
    let switch = loss.eta_s.powi(loops as i32);
    let entries = DMatrix::from_fn(m, m, |r, c| {
        let exponent = loops as i32 + c as i32 - r as i32;
        switch * eta.powi(exponent)
    });
    Ok(LossMatrix { loops, entries })
}

/// `V'` for one pass, written out directly from the per-path loss count.
pub fn lossy_single_loop_map(seq: &SwitchingSequence, loss: LossParams) -> Result<TransferMatrix> {
    let settings = seq.require_single_pass()?;
    lossy_pass_map(seq.modes(), settings, loss)
}

/// One lossy map per pass.
pub fn lossy_pass_maps(seq: &SwitchingSequence, loss: LossParams) -> Result<Vec<TransferMatrix>> {
    seq.passes()
        .map(|settings| lossy_pass_map(seq.modes(), settings, loss))
        .collect()
}

fn lossy_pass_map(
    m: usize,
    settings: &[BeamsplitterSetting],
    loss: LossParams,
) -> Result<TransferMatrix> {
    let bs = |t: usize| &settings[t - 1];
    let eta = loss.eta();
    let entries = DMatrix::from_fn(m, m, |r, c| {
        let (i, j) = (r + 1, c + 1);
        if i > j + 1 {
            Complex64::new(0.0, 0.0)
        } else if i == j + 1 {
            bs(i).u11() * loss.eta_s
        } else {
            let circulate: Complex64 = (i + 1..=j).map(|k| bs(k).u22()).product();
            let attenuation = loss.eta_s * eta.powi((j - i + 1) as i32);
            bs(i).u12() * bs(j + 1).u21() * circulate * attenuation
        }
    });
    TransferMatrix::from_matrix(entries)
}

/// Uniform attenuation from `L - 1` outer-loop round trips: `eta_f^(m(L-1)) eta_s^(2(L-1))`.
pub fn outer_loop_factor(m: usize, loops: usize, loss: LossParams) -> f64 {
    let rounds = loops.saturating_sub(1) as i32;
    loss.eta_f.powi(m as i32 * rounds) * loss.eta_s.powi(2 * rounds)
}

/// `prod_l V'(l)`, times the outer-loop factor when `include_outer` is set.
pub fn lossy_composed_map(
    seq: &SwitchingSequence,
    loss: LossParams,
    include_outer: bool,
) -> Result<TransferMatrix> {
    let product = linop::compose_loops(&lossy_pass_maps(seq, loss)?)?;
    if include_outer {
        Ok(product.scaled(outer_loop_factor(seq.modes(), seq.num_passes(), loss)))
    } else {
        Ok(product)
    }
}

/// Closeness of the entry magnitudes to a uniform map:
/// `(sum |U_ij|)^2 / (m^2 sum |U_ij|^2)`, in `(0, 1]`.
pub fn similarity(map: &TransferMatrix) -> Result<f64> {
    let m = map.dim() as f64;
    let (l1, l2) = map
        .as_matrix()
        .iter()
        .fold((0.0, 0.0), |(l1, l2), z| (l1 + z.norm(), l2 + z.norm_sqr()));
    if l2 == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(l1 * l1 / (m * m * l2))
}

/// `prod_i (sum_j |U_ij|^2)^{k_i}`: every photon survives, rows treated independently.
pub fn postselection_probability(map: &TransferMatrix, occupation: &[usize]) -> Result<f64> {
    if occupation.len() != map.dim() {
        return Err(Error::OccupationLength {
            expected: map.dim(),
            found: occupation.len(),
        });
    }
    Ok(map
        .row_weights()
        .iter()
        .zip(occupation)
        .map(|(w, &k)| w.powi(k as i32))
        .product())
}

/// Parameters of a best-of-N random search over switching sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySearch {
    pub m: usize,
    pub loops: usize,
    pub loss: LossParams,
    pub iterations: usize,
    pub seed: u64,
    /// Input photons per bin for the post-selection probability.
    pub occupation: Vec<usize>,
    /// Whether the reported map (and hence `P_S`) carries the outer-loop attenuation.
    pub include_outer: bool,
}

impl SimilaritySearch {
    /// One photon per bin, outer loop included.
    pub fn new(m: usize, loops: usize, loss: LossParams, iterations: usize, seed: u64) -> Self {
        Self {
            m,
            loops,
            loss,
            iterations,
            seed,
            occupation: vec![1; m],
            include_outer: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best_sequence: SwitchingSequence,
    /// 0-based iteration index (and rng stream) of the winner.
    pub best_iteration: usize,
    pub best_similarity: f64,
    /// `P_S` of the map built from `best_sequence`.
    pub postselection_at_best: f64,
    pub mean_similarity: f64,
}

/// Random search with one photon per bin and outer-loop loss included.
///
/// Iteration `i` draws its sequence from stream `i` of `seed`; ties go to the lowest index.
pub fn optimize_similarity(
    m: usize,
    loops: usize,
    loss: LossParams,
    iterations: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    optimize_similarity_with(&SimilaritySearch::new(m, loops, loss, iterations, seed))
}

pub fn optimize_similarity_with(search: &SimilaritySearch) -> Result<SearchOutcome> {
    if search.m == 0 {
        return Err(Error::ZeroModes);
    }
    if search.loops == 0 {
        return Err(Error::ZeroPasses);
    }
    if search.iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    if search.occupation.len() != search.m {
        return Err(Error::OccupationLength {
            expected: search.m,
            found: search.occupation.len(),
        });
    }
    let draw = |iteration: usize| -> Result<(SwitchingSequence, TransferMatrix)> {
        let mut rng = stream_rng(search.seed, iteration as u64);
        let seq = linop::random_sequence(search.m, search.loops, &mut rng)?;
        let map = lossy_composed_map(&seq, search.loss, search.include_outer)?;
        Ok((seq, map))
    };
    let scores = map_indexed(search.iterations, |iteration| {
        draw(iteration).and_then(|(_, map)| similarity(&map))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;

    let mut best_iteration = 0;
    for (idx, &score) in scores.iter().enumerate() {
        if score > scores[best_iteration] {
            best_iteration = idx;
        }
    }
    let (best_sequence, best_map) = draw(best_iteration)?;
    Ok(SearchOutcome {
        best_iteration,
        best_similarity: scores[best_iteration],
        postselection_at_best: postselection_probability(&best_map, &search.occupation)?,
        mean_similarity: scores.iter().sum::<f64>() / scores.len() as f64,
        best_sequence,
    })
}
