//! Matrix permanents.
//!
//! Two routes are kept side by side: the defining sum over permutations, and Ryser's
//! inclusion-exclusion formula walked in Gray-code order. The second is the production path;
//! the first exists to check it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest dimension accepted by [`permanent`].
pub const DEFAULT_CAP: usize = 12;

/// Permanent via Ryser's formula, refusing matrices above [`DEFAULT_CAP`].
pub fn permanent(matrix: &DMatrix<Complex64>) -> Result<Complex64> {
    permanent_with_cap(matrix, DEFAULT_CAP)
}

pub fn permanent_with_cap(matrix: &DMatrix<Complex64>, cap: usize) -> Result<Complex64> {
    let n = check_square(matrix)?;
    if n > cap {
        return Err(Error::PermanentTooLarge { n, cap });
    }
    Ok(ryser(matrix))
}

/// `sum_σ prod_i M[i, σ(i)]` by explicit recursion over the permutations.
pub fn permanent_naive(matrix: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(matrix)?;
    if n > DEFAULT_CAP {
        return Err(Error::PermanentTooLarge {
            n,
            cap: DEFAULT_CAP,
        });
    }
    fn expand(matrix: &DMatrix<Complex64>, row: usize, used: &mut [bool]) -> Complex64 {
        let n = used.len();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if used[col] {
                continue;
            }
            let entry = matrix[(row, col)];
            used[col] = true;
            total += entry * expand(matrix, row + 1, used);
            used[col] = false;
        }
        total
    }
    Ok(expand(matrix, 0, &mut vec![false; n]))
}

/// `perm(M) = (-1)^n sum_{S ⊆ cols} (-1)^{|S|} prod_i sum_{j ∈ S} M_ij`, O(2^n n).
pub fn permanent_ryser(matrix: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(matrix)?;
    if n > DEFAULT_CAP {
        return Err(Error::PermanentTooLarge {
            n,
            cap: DEFAULT_CAP,
        });
    }
    Ok(ryser(matrix))
}

fn ryser(matrix: &DMatrix<Complex64>) -> Complex64 {
    let n = matrix.nrows();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1u64..(1u64 << n) {
        // flip the column whose bit changes between gray(k-1) and gray(k)
        let col = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let adding = gray & (1 << col) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if adding {
                *sum += matrix[(i, col)];
            } else {
                *sum -= matrix[(i, col)];
            }
        }
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

fn check_square(matrix: &DMatrix<Complex64>) -> Result<usize> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}
