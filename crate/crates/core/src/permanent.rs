//! Exact permanent evaluation (Glynn's formula with Gray-code updates) and
//! the repeated-row/column transition submatrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dynamics::Propagator;
use crate::lattice::Configuration;
use crate::{Error, Result};

/// Largest matrix size accepted by the permanent kernel.
pub const MAX_PERMANENT_SIZE: usize = 30;

/// The n x n submatrix whose permanent gives a transition amplitude.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub a: DMatrix<Complex64>,
    pub input: Configuration,
    pub output: Configuration,
}

/// Permanent of a square complex matrix.
///
/// Glynn's formula with Gray-code column-sum updates, O(2^k k). The empty
/// matrix has permanent 1.
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::NotSquare { rows: k, cols: m.ncols() });
    }
    if k > MAX_PERMANENT_SIZE {
        return Err(Error::PermanentTooLarge(k, MAX_PERMANENT_SIZE));
    }
    if k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }

    // Column sums for delta = (+1, ..., +1).
    let mut sums: Vec<Complex64> = (0..k)
        .map(|j| (0..k).map(|i| m[(i, j)]).sum())
        .collect();
    let mut total: Complex64 = sums.iter().product();
    let mut delta = vec![1.0f64; k];

    // Gray-code walk over the remaining k-1 sign vectors; row 0 stays +1.
    let steps: u64 = 1u64 << (k - 1);
    for g in 1..steps {
        let row = g.trailing_zeros() as usize + 1;
        delta[row] = -delta[row];
        let factor = 2.0 * delta[row];
        for (j, sum) in sums.iter_mut().enumerate() {
            *sum += m[(row, j)] * factor;
        }
        // Each flip toggles the overall sign of the delta product.
        let sign = if g % 2 == 0 { 1.0 } else { -1.0 };
        let prod: Complex64 = sums.iter().product();
        total += prod * sign;
    }
    Ok(total / 2f64.powi(k as i32 - 1))
}

/// Build the transition submatrix A for input `r` and output `s`: `s_i`
/// copies of row-data for site i and `r_j` copies of column-data for site j,
/// in nondecreasing site order, so `A[a][b] = R[out_a][in_b]`.
pub fn submatrix_for_transition(
    prop: &Propagator,
    r: &Configuration,
    s: &Configuration,
) -> Result<TransitionMatrix> {
    let n_in = r.total() as usize;
    let n_out = s.total() as usize;
    if n_in != n_out {
        return Err(Error::ParticleMismatch { input: n_in, output: n_out });
    }
    let ins = r.site_list();
    let outs = s.site_list();
    let a = DMatrix::from_fn(n_in, n_in, |row, col| prop.r[(outs[row], ins[col])]);
    Ok(TransitionMatrix {
        a,
        input: r.clone(),
        output: s.clone(),
    })
}

/// Permanent of a real nonnegative matrix (same kernel, real arithmetic).
pub fn permanent_real(m: &DMatrix<f64>) -> Result<f64> {
    let complex = m.map(|x| Complex64::new(x, 0.0));
    Ok(permanent(&complex)?.re)
}
