//! Independent reference computations used by the `validate` suite and the tests.
//!
//! Nothing in here is on a production path.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linop::TransferMatrix;
use crate::permanent::permanent_naive;
use crate::temporal::WavePacket;

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|k| {
            let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
            weight * f(a + k as f64 * h)
        })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// `∫ ψ(x - d1) ψ(x - d2) dx` by quadrature over `±(|d1| + |d2| + 12c)`.
pub fn overlap_by_quadrature(d1: f64, d2: f64, c: f64) -> f64 {
    let packet = WavePacket::new(c).expect("positive width");
    let half = d1.abs() + d2.abs() + 12.0 * c;
    simpson(
        |x| packet.amplitude(x - d1) * packet.amplitude(x - d2),
        -half,
        half,
        4000,
    )
}

/// All-photon survival probability `perm(G[S, S]) / prod k_i!` with `G = A A^†`.
///
/// This is the closed form of summing `|amplitude|^2` over every system-mode outcome.
pub fn survival_by_gram_permanent(map: &TransferMatrix, input: &[usize]) -> Result<f64> {
    let m = map.dim();
    if input.len() != m {
        return Err(Error::OccupationLength {
            expected: m,
            found: input.len(),
        });
    }
    let a = map.as_matrix();
    let gram = a * a.adjoint();
    let rows: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k))
        .collect();
    let sub = DMatrix::from_fn(rows.len(), rows.len(), |p, q| gram[(rows[p], rows[q])]);
    let norm: f64 = input
        .iter()
        .map(|&k| (1..=k).map(|x| x as f64).product::<f64>())
        .product();
    let perm: Complex64 = permanent_naive(&sub)?;
    Ok(perm.re / norm)
}
