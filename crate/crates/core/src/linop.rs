//! Lossless transfer maps of the fiber-loop architecture.
//!
//! A pulse train of `m` time bins passes a dynamically switched beamsplitter `m + 1` times per
//! inner-loop pass. The first and last settings of every pass are the swap matrix, which pins
//! the implemented map to an `m x m` block. Maps are stored with rows indexed by input bin and
//! columns by output bin, so composing passes is an ordinary left-to-right matrix product.
//!
//! Public accessors take 1-based indices (`i`, `j`, `t` in `1..=m`); storage is 0-based.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Tolerance used for every unitarity check in this module.
pub const UNITARITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One setting `[[u11, u12], [u21, u22]]` of the dynamic central beamsplitter.
///
/// Row 1 is the pulse arriving from the source, row 2 the pulse returning from the loop.
/// Column 1 leaves towards the detector, column 2 enters the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitterSetting {
    u11: Complex64,
    u12: Complex64,
    u21: Complex64,
    u22: Complex64,
}

impl BeamsplitterSetting {
    pub fn new(u11: Complex64, u12: Complex64, u21: Complex64, u22: Complex64) -> Result<Self> {
        let setting = Self { u11, u12, u21, u22 };
        let deviation = setting.unitarity_deviation();
        if deviation.is_nan() || deviation > UNITARITY_TOL {
            return Err(Error::NonUnitarySetting { deviation });
        }
        Ok(setting)
    }

    /// The boundary setting: the first bin is coupled fully in, the last fully out.
    pub const fn swap() -> Self {
        Self {
            u11: ZERO,
            u12: ONE,
            u21: ONE,
            u22: ZERO,
        }
    }

    /// No coupling: the source pulse exits, the loop pulse stays in the loop.
    pub const fn identity() -> Self {
        Self {
            u11: ONE,
            u12: ZERO,
            u21: ZERO,
            u22: ONE,
        }
    }

    /// `[[cos θ e^{iφ}, sin θ e^{iλ}], [-sin θ e^{-iλ}, cos θ e^{-iφ}]]`, an SU(2) element.
    pub fn from_angles(theta: f64, phi: f64, lambda: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            u11: Complex64::from_polar(c, phi),
            u12: Complex64::from_polar(s, lambda),
            u21: -Complex64::from_polar(s, -lambda),
            u22: Complex64::from_polar(c, -phi),
        }
    }

    pub fn u11(&self) -> Complex64 {
        self.u11
    }

    pub fn u12(&self) -> Complex64 {
        self.u12
    }

    pub fn u21(&self) -> Complex64 {
        self.u21
    }

    pub fn u22(&self) -> Complex64 {
        self.u22
    }

    /// `max |B B^† - I|` over the four entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let r1 = self.u11.norm_sqr() + self.u12.norm_sqr() - 1.0;
        let r2 = self.u21.norm_sqr() + self.u22.norm_sqr() - 1.0;
        let off = (self.u11 * self.u21.conj() + self.u12 * self.u22.conj()).norm();
        r1.abs().max(r2.abs()).max(off)
    }

    pub fn is_swap(&self) -> bool {
        let swap = Self::swap();
        [
            self.u11 - swap.u11,
            self.u12 - swap.u12,
            self.u21 - swap.u21,
            self.u22 - swap.u22,
        ]
        .iter()
        .all(|d| d.norm() <= UNITARITY_TOL)
    }
}

/// The time-ordered beamsplitter program for one or more inner-loop passes.
///
/// Each pass holds exactly `m + 1` settings and starts and ends with the swap matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingSequence {
    m: usize,
    passes: Vec<Vec<BeamsplitterSetting>>,
}

impl SwitchingSequence {
    pub fn new(m: usize, passes: Vec<Vec<BeamsplitterSetting>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroModes);
        }
        if passes.is_empty() {
            return Err(Error::ZeroPasses);
        }
        for (idx, settings) in passes.iter().enumerate() {
            let pass = idx + 1;
            if settings.len() != m + 1 {
                return Err(Error::WrongSettingCount {
                    pass,
                    expected: m + 1,
                    found: settings.len(),
                });
            }
            for t in [1, m + 1] {
                if !settings[t - 1].is_swap() {
                    return Err(Error::BoundaryViolation { pass, t });
                }
            }
        }
        Ok(Self { m, passes })
    }

    pub fn single_pass(m: usize, settings: Vec<BeamsplitterSetting>) -> Result<Self> {
        Self::new(m, vec![settings])
    }

    /// Builds passes from their `m - 1` interior settings (t = 2..=m), adding the boundary swaps.
    pub fn from_interior(m: usize, interior: Vec<Vec<BeamsplitterSetting>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroModes);
        }
        let passes = interior
            .into_iter()
            .enumerate()
            .map(|(idx, inner)| {
                if inner.len() != m - 1 {
                    return Err(Error::WrongSettingCount {
                        pass: idx + 1,
                        expected: m - 1,
                        found: inner.len(),
                    });
                }
                let mut settings = Vec::with_capacity(m + 1);
                settings.push(BeamsplitterSetting::swap());
                settings.extend(inner);
                settings.push(BeamsplitterSetting::swap());
                Ok(settings)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, passes)
    }

    pub fn modes(&self) -> usize {
        self.m
    }

    pub fn num_passes(&self) -> usize {
        self.passes.len()
    }

    /// Settings of pass `l` (1-based), indexed internally by `t - 1`.
    pub fn pass(&self, l: usize) -> &[BeamsplitterSetting] {
        &self.passes[l - 1]
    }

    /// Setting of the beamsplitter at time `t` (1-based) in pass `l` (1-based).
    pub fn setting(&self, l: usize, t: usize) -> &BeamsplitterSetting {
        &self.passes[l - 1][t - 1]
    }

    pub fn passes(&self) -> impl Iterator<Item = &[BeamsplitterSetting]> {
        self.passes.iter().map(Vec::as_slice)
    }

    /// Pass `l` (1-based) as a standalone single-pass sequence.
    pub fn pass_sequence(&self, l: usize) -> SwitchingSequence {
        SwitchingSequence {
            m: self.m,
            passes: vec![self.passes[l - 1].clone()],
        }
    }

    pub(crate) fn require_single_pass(&self) -> Result<&[BeamsplitterSetting]> {
        match self.passes.as_slice() {
            [only] => Ok(only),
            _ => Err(Error::NotSinglePass(self.passes.len())),
        }
    }
}

/// An `m x m` input-to-output amplitude map. Rows are input bins, columns output bins.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    entries: DMatrix<Complex64>,
}

impl TransferMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(Self { entries })
    }

    /// Row-major construction; `rows[i - 1][j - 1]` is the amplitude from bin `i` to bin `j`.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let m = rows.len();
        for row in rows {
            if row.len() != m {
                return Err(Error::NotSquare {
                    rows: m,
                    cols: row.len(),
                });
            }
        }
        Self::from_matrix(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::identity(m, m))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry `(i, j)`, both 1-based.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i - 1, j - 1)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// `max |V^† V - I|` entry-wise.
    pub fn unitarity_deviation(&self) -> f64 {
        let m = self.dim();
        let gram = self.entries.adjoint() * &self.entries;
        let identity = DMatrix::<Complex64>::identity(m, m);
        (gram - identity)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() < tol
    }

    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> TransferMatrix {
        TransferMatrix {
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.entries
            .clone()
            .singular_values()
            .iter()
            .copied()
            .collect()
    }

    /// Squared row norms `sum_j |V_ij|^2`, i.e. single-photon survival probability per input bin.
    pub fn row_weights(&self) -> Vec<f64> {
        self.entries
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == ZERO)
    }
}

/// The map `V` implemented by one pass of the inner loop.
///
/// `V_ij` is zero for `i > j + 1`, `u11(i)` for `i = j + 1` (the pulse leaves immediately and
/// lands in the previous output bin), and `u12(i) u21(j+1) prod_{k=i+1}^{j} u22(k)` otherwise
/// (the pulse circulates `j - i + 1` times and leaves at beamsplitter `j + 1`).
pub fn build_single_loop_map(seq: &SwitchingSequence) -> Result<TransferMatrix> {
    let settings = seq.require_single_pass()?;
    pass_map(seq.modes(), settings)
}

/// One map per pass, in pass order.
pub fn build_pass_maps(seq: &SwitchingSequence) -> Result<Vec<TransferMatrix>> {
    seq.passes()
        .map(|settings| pass_map(seq.modes(), settings))
        .collect()
}

/// `prod_l V(l)` for every pass of `seq`.
pub fn build_composed_map(seq: &SwitchingSequence) -> Result<TransferMatrix> {
    compose_loops(&build_pass_maps(seq)?)
}

fn pass_map(m: usize, settings: &[BeamsplitterSetting]) -> Result<TransferMatrix> {
    let bs = |t: usize| &settings[t - 1];
    let entries = DMatrix::from_fn(m, m, |r, c| {
        let (i, j) = (r + 1, c + 1);
        if i > j + 1 {
            ZERO
        } else if i == j + 1 {
            bs(i).u11
        } else {
            let circulate: Complex64 = (i + 1..=j).map(|k| bs(k).u22).product();
            bs(i).u12 * bs(j + 1).u21 * circulate
        }
    });
    let map = TransferMatrix { entries };
    let deviation = map.unitarity_deviation();
    if deviation > UNITARITY_TOL * (m + 1) as f64 {
        return Err(Error::NonUnitarySetting { deviation });
    }
    Ok(map)
}

/// Ordered product `V(1) V(2) ... V(L)`.
pub fn compose_loops(maps: &[TransferMatrix]) -> Result<TransferMatrix> {
    let (first, rest) = maps.split_first().ok_or(Error::EmptyMapList)?;
    let m = first.dim();
    let mut acc = first.entries.clone();
    for map in rest {
        if map.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: map.dim(),
            });
        }
        acc *= &map.entries;
    }
    Ok(TransferMatrix { entries: acc })
}

/// Random program for `loops` passes over `m` bins, built from [`random_angles`].
pub fn random_sequence<R: Rng + ?Sized>(
    m: usize,
    loops: usize,
    rng: &mut R,
) -> Result<SwitchingSequence> {
    let interior = random_angles(m, loops, rng)?
        .into_iter()
        .map(|pass| {
            pass.into_iter()
                .map(|(theta, phi, lambda)| BeamsplitterSetting::from_angles(theta, phi, lambda))
                .collect()
        })
        .collect();
    SwitchingSequence::from_interior(m, interior)
}

/// Interior angles `(θ, φ, λ)` for `loops` passes, `m - 1` per pass.
///
/// `θ ~ U[0, π/2]` and `φ, λ ~ U[0, 2π)`, drawn in that order for `t = 2..=m` of pass 1,
/// then pass 2, and so on.
pub fn random_angles<R: Rng + ?Sized>(
    m: usize,
    loops: usize,
    rng: &mut R,
) -> Result<Vec<Vec<(f64, f64, f64)>>> {
    if m == 0 {
        return Err(Error::ZeroModes);
    }
    if loops == 0 {
        return Err(Error::ZeroPasses);
    }
    Ok((0..loops)
        .map(|_| {
            (2..=m)
                .map(|_| {
                    let theta = rng.random_range(0.0..=FRAC_PI_2);
                    let phi = rng.random_range(0.0..2.0 * PI);
                    let lambda = rng.random_range(0.0..2.0 * PI);
                    (theta, phi, lambda)
                })
                .collect()
        })
        .collect())
}
