use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{amplitudes, check_dim, Observable, QuantumState};

/// Largest imaginary part tolerated in the weight formula before it is dropped.
pub const WEIGHT_IMAG_TOL: f64 = 1e-12;

/// Real joint weights over pairs `(a_i, b_j)`; rows follow A, columns B.
/// Entries may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub values: DMatrix<f64>,
    /// Largest `|Im|` seen in the defining expression.
    pub max_imaginary: f64,
}

impl WeightTable {
    pub fn row_sums(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.values.column_iter().map(|c| c.sum()).collect()
    }

    pub fn total(&self) -> f64 {
        self.values.sum()
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }
}

/// `W(a_i, b_j) = 1/2 (z^A_i* z^B_j <a_i|b_j> + z^B_j* z^A_i <b_j|a_i>)`.
pub fn weight_table(state: &QuantumState, basis_a: &Observable, basis_b: &Observable) -> Result<WeightTable> {
    check_dim(basis_a.dim(), basis_b.dim())?;
    let za = amplitudes(state, basis_a)?;
    let zb = amplitudes(state, basis_b)?;
    let overlap = basis_a.overlaps(basis_b)?;
    let n = state.dim();
    let mut values = DMatrix::zeros(n, n);
    let mut max_imaginary: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let forward = za[i].conj() * zb[j] * overlap[(i, j)];
            let backward = zb[j].conj() * za[i] * overlap[(i, j)].conj();
            let w = (forward + backward) * 0.5;
            max_imaginary = max_imaginary.max(w.im.abs());
            values[(i, j)] = w.re;
        }
    }
    if max_imaginary > WEIGHT_IMAG_TOL {
        return Err(Error::InvalidArgument(format!("weight table has imaginary residue {max_imaginary:e}")));
    }
    Ok(WeightTable { values, max_imaginary })
}
