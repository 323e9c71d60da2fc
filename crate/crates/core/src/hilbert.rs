//! Finite-dimensional Hilbert space: states, non-degenerate Hermitian
//! observables, a cyclic Jacobi eigensolver, the Born rule and projection.
//!
//! Eigenvectors are stored as the columns of a unitary matrix and follow a
//! fixed phase convention: the first component whose modulus exceeds
//! [`PHASE_REFERENCE_FLOOR`] is real and positive. Two decompositions of the
//! same input are bitwise identical.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum dimension accepted by the eigensolver.
pub const MAX_DIM: usize = 64;
/// Tolerance on unit norm and orthonormality.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `H == H^dagger`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;
/// Components below this modulus are skipped when fixing eigenvector phases.
pub const PHASE_REFERENCE_FLOOR: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// A unit vector of complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
}

impl QuantumState {
    /// Builds a state, rejecting amplitude vectors that are not unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amplitudes))
    }

    /// Builds a state after rescaling to unit norm. Only the zero vector is rejected.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_vector(v.unscale(norm))
    }

    pub fn from_vector(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidDimension(amplitudes.len()));
        }
        let norm_sq = amplitudes.norm_squared();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: norm_sq.sqrt() });
        }
        Ok(Self { amplitudes })
    }

    /// The `k`-th computational basis vector.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Self::from_vector(v)
    }

    /// `sum_j coefficients_j |b_j>` for the eigenbasis of `basis`.
    pub fn from_coefficients(basis: &Observable, coefficients: &[C64]) -> Result<Self> {
        check_dim(basis.dim(), coefficients.len())?;
        let c = DVector::from_column_slice(coefficients);
        Self::from_vector(&basis.eigenbasis * c)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }
}

/// A Hermitian operator with a non-degenerate spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: DMatrix<C64>,
    eigenvalues: Vec<f64>,
    eigenbasis: DMatrix<C64>,
}

impl Observable {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        let eig = eigendecompose(&matrix)?;
        Ok(Self { matrix, eigenvalues: eig.eigenvalues, eigenbasis: eig.eigenbasis })
    }

    /// Builds `sum_k eigenvalue_k |v_k><v_k|` from an orthonormal set of vectors.
    /// Pairs are reordered by ascending eigenvalue.
    pub fn from_eigenbasis(eigenvalues: Vec<f64>, vectors: Vec<DVector<C64>>) -> Result<Self> {
        let dim = vectors.len();
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        check_dim(dim, eigenvalues.len())?;
        for v in &vectors {
            check_dim(dim, v.len())?;
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let sorted: Vec<f64> = order.iter().map(|&k| eigenvalues[k]).collect();
        check_gaps(&sorted)?;

        let mut basis = DMatrix::zeros(dim, dim);
        for (col, &k) in order.iter().enumerate() {
            basis.set_column(col, &vectors[k]);
        }
        let deviation = gram_deviation(&basis);
        if deviation > NORM_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        fix_phases(&mut basis);

        let diag = DMatrix::from_diagonal(&DVector::from_iterator(dim, sorted.iter().map(|&l| C64::new(l, 0.0))));
        let matrix = &basis * diag * basis.adjoint();
        Ok(Self { matrix, eigenvalues: sorted, eigenbasis: basis })
    }

    /// Standard basis, eigenvalues `0, 1, .., dim-1`.
    pub fn computational(dim: usize) -> Result<Self> {
        let vectors = (0..dim)
            .map(|k| {
                let mut v = DVector::zeros(dim);
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::from_eigenbasis(index_eigenvalues(dim), vectors)
    }

    /// Sylvester-Hadamard basis; `dim` must be a power of two. For a qubit the
    /// eigenvectors are `(1,1)/sqrt2` then `(1,-1)/sqrt2`.
    pub fn hadamard(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDimension(dim));
        }
        let scale = 1.0 / (dim as f64).sqrt();
        let vectors = (0..dim)
            .map(|k| {
                DVector::from_iterator(
                    dim,
                    (0..dim).map(|j| {
                        let sign = if (j & k).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                        C64::new(sign * scale, 0.0)
                    }),
                )
            })
            .collect();
        Self::from_eigenbasis(index_eigenvalues(dim), vectors)
    }

    /// Discrete Fourier basis `f_k[m] = exp(2 pi i k m / dim) / sqrt(dim)`.
    pub fn fourier(dim: usize) -> Result<Self> {
        let scale = 1.0 / (dim as f64).sqrt();
        let vectors = (0..dim)
            .map(|k| {
                DVector::from_iterator(
                    dim,
                    (0..dim).map(|m| C64::from_polar(scale, 2.0 * PI * (k * m) as f64 / dim as f64)),
                )
            })
            .collect();
        Self::from_eigenbasis(index_eigenvalues(dim), vectors)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary matrix whose columns are the eigenvectors.
    pub fn eigenbasis(&self) -> &DMatrix<C64> {
        &self.eigenbasis
    }

    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenbasis.column(k).into_owned()
    }

    /// Matrix of inner products `O[i][j] = <a_i|b_j>` with `self` as A.
    pub fn overlaps(&self, other: &Observable) -> Result<DMatrix<C64>> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.eigenbasis.adjoint() * &other.eigenbasis)
    }

    /// Same eigenvectors with every eigenvalue negated (and the order reversed
    /// to keep the spectrum ascending).
    pub fn negated(&self) -> Self {
        let dim = self.dim();
        let vectors = (0..dim).rev().map(|k| self.eigenvector(k)).collect();
        let eigenvalues = self.eigenvalues.iter().rev().map(|l| -l).collect();
        Self::from_eigenbasis(eigenvalues, vectors).expect("negation preserves a valid eigenbasis")
    }
}

/// Output of [`eigendecompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    /// Strictly ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, phase-normalized.
    pub eigenbasis: DMatrix<C64>,
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix with non-degenerate spectrum.
pub fn eigendecompose(h: &DMatrix<C64>) -> Result<Eigen> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: h.ncols() });
    }
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidDimension(n));
    }
    let max_asymmetry = max_hermitian_deviation(h);
    if max_asymmetry > HERMITIAN_TOL {
        return Err(Error::NonHermitian { max_asymmetry });
    }

    let mut a = (h + h.adjoint()).scale(0.5);
    for k in 0..n {
        a[(k, k)] = C64::new(a[(k, k)].re, 0.0);
    }
    let mut v = DMatrix::<C64>::identity(n, n);
    let threshold = JACOBI_OFF_TOL * h.norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { off_norm: off, sweeps });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    check_gaps(&eigenvalues)?;

    let mut basis = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        basis.set_column(col, &v.column(k));
    }
    fix_phases(&mut basis);
    Ok(Eigen { eigenvalues, eigenbasis: basis })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// The rotation is `J = D R` with `D = diag(1, e^{-i phi})` making the pivot
/// real and `R` the real symmetric Jacobi rotation.
fn rotate(a: &mut DMatrix<C64>, v: &mut DMatrix<C64>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.nrows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

fn off_diagonal_norm(a: &DMatrix<C64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

pub(crate) fn max_hermitian_deviation(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_gaps(sorted: &[f64]) -> Result<()> {
    for k in 1..sorted.len() {
        let gap = sorted[k] - sorted[k - 1];
        if gap < DEGENERACY_GAP {
            return Err(Error::DegenerateSpectrum { index: k - 1, next: k, gap });
        }
    }
    Ok(())
}

fn fix_phases(basis: &mut DMatrix<C64>) {
    for mut col in basis.column_iter_mut() {
        if let Some(reference) = col.iter().copied().find(|z| z.norm() > PHASE_REFERENCE_FLOOR) {
            let rot = reference.conj() / reference.norm();
            let mut first = true;
            for z in col.iter_mut() {
                *z *= rot;
                if first && z.norm() > PHASE_REFERENCE_FLOOR {
                    *z = C64::new(z.re, 0.0);
                    first = false;
                }
            }
        }
    }
}

fn gram_deviation(basis: &DMatrix<C64>) -> f64 {
    let gram = basis.adjoint() * basis;
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn index_eigenvalues(dim: usize) -> Vec<f64> {
    (0..dim).map(|k| k as f64).collect()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `z_i = <a_i|S>` for the eigenbasis of `basis`.
pub fn amplitudes(state: &QuantumState, basis: &Observable) -> Result<DVector<C64>> {
    check_dim(basis.dim(), state.dim())?;
    Ok(basis.eigenbasis.adjoint() * &state.amplitudes)
}

/// Born rule `P(a_i) = |<a_i|S>|^2`.
pub fn born_probabilities(state: &QuantumState, basis: &Observable) -> Result<Vec<f64>> {
    Ok(amplitudes(state, basis)?.iter().map(|z| z.norm_sqr()).collect())
}

/// Post-measurement state for outcome `outcome`: the eigenvector itself.
pub fn project(state: &QuantumState, basis: &Observable, outcome: usize) -> Result<QuantumState> {
    let probs = born_probabilities(state, basis)?;
    let probability =
        *probs.get(outcome).ok_or_else(|| Error::InvalidArgument(format!("outcome {outcome} out of range")))?;
    if probability <= 1e-12 {
        return Err(Error::ZeroProbabilityOutcome { index: outcome, probability });
    }
    Ok(QuantumState { amplitudes: basis.eigenvector(outcome) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_is_degenerate() {
        let id = DMatrix::<C64>::identity(2, 2);
        assert!(matches!(eigendecompose(&id), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let x = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let eig = eigendecompose(&x).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        let v0 = eig.eigenbasis.column(0);
        let v1 = eig.eigenbasis.column(1);
        assert!((v0[0] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-14);
        assert!((v0[1] - c(-FRAC_1_SQRT_2, 0.)).norm() < 1e-14);
        assert!((v1[0] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-14);
        assert!((v1[1] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(2., 0.), c(0., 0.)]);
        match eigendecompose(&m) {
            Err(Error::NonHermitian { max_asymmetry }) => assert!((max_asymmetry - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn amplitudes_in_hadamard_basis() {
        let zero = QuantumState::basis_state(2, 0).unwrap();
        let h = Observable::hadamard(2).unwrap();
        let z = amplitudes(&zero, &h).unwrap();
        assert!((z[0] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        assert!((z[1] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        let p = born_probabilities(&zero, &h).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_amplitudes_are_indicator() {
        let f = Observable::fourier(3).unwrap();
        let s = QuantumState::from_vector(f.eigenvector(0)).unwrap();
        let z = amplitudes(&s, &f).unwrap();
        assert!((z[0] - c(1., 0.)).norm() < 1e-14);
        assert!(z[1].norm() < 1e-14 && z[2].norm() < 1e-14);
    }

    #[test]
    fn projection_rules() {
        let zero = QuantumState::basis_state(2, 0).unwrap();
        let h = Observable::hadamard(2).unwrap();
        let plus = project(&zero, &h, 0).unwrap();
        assert!((plus.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        assert!((plus.amplitudes()[1] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        let again = born_probabilities(&plus, &h).unwrap();
        assert!((again[0] - 1.0).abs() < 1e-15);

        let comp = Observable::computational(2).unwrap();
        let same = project(&zero, &comp, 0).unwrap();
        assert_eq!(same.amplitudes(), zero.amplitudes());
        assert!(matches!(project(&zero, &comp, 1), Err(Error::ZeroProbabilityOutcome { .. })));
    }

    #[test]
    fn state_validation() {
        assert!(matches!(QuantumState::new(vec![c(1., 0.), c(1., 0.)]), Err(Error::NotNormalized { .. })));
        assert!(matches!(QuantumState::new(vec![c(1., 0.)]), Err(Error::InvalidDimension(1))));
        let s = QuantumState::normalized(vec![c(1., 0.), c(1., 0.)]).unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
        let comp = Observable::computational(3).unwrap();
        assert!(matches!(amplitudes(&s, &comp), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn negated_observable_keeps_vectors() {
        let h = Observable::hadamard(2).unwrap();
        let n = h.negated();
        assert_eq!(n.eigenvalues(), &[-1.0, -0.0]);
        assert_eq!(n.eigenvector(0), h.eigenvector(1));
        assert_eq!(n.eigenvector(1), h.eigenvector(0));
    }
}
