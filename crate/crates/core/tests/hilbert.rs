mod common;

use common::*;
use labelqm::hilbert::{eigendecompose, MAX_DIM};
use labelqm::{amplitudes, born_probabilities, project, Error, Observable, QuantumState};
use nalgebra::DMatrix;
use proptest::prelude::*;

const DIMS: [usize; 4] = [2, 3, 4, 8];

/// Closed-form eigenvalues of a 2x2 Hermitian matrix.
fn eig2(a: f64, d: f64, b_norm: f64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b_norm * b_norm).sqrt();
    [mean - r, mean + r]
}

/// Trigonometric roots of the characteristic cubic of a real symmetric 3x3 matrix.
fn eig3_symmetric(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b: Vec<Vec<f64>> =
        (0..3).map(|i| (0..3).map(|j| (m[i][j] - if i == j { q } else { 0.0 }) / p).collect()).collect();
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut out = [e1, e2, e3];
    out.sort_by(f64::total_cmp);
    out
}

#[test]
fn two_by_two_matches_closed_form() {
    let mut g = rng(1);
    for _ in 0..200 {
        let h = random_hermitian(&mut g, 2);
        let eig = eigendecompose(&h).unwrap();
        let want = eig2(h[(0, 0)].re, h[(1, 1)].re, h[(0, 1)].norm());
        assert!(max_abs(&eig.eigenvalues, &want) < 1e-12, "{:?} vs {want:?}", eig.eigenvalues);
    }
}

#[test]
fn real_symmetric_three_by_three_matches_cardano() {
    let mut g = rng(2);
    for _ in 0..200 {
        let h = random_hermitian(&mut g, 3).map(|z| labelqm::C64::new(z.re, 0.0));
        let m: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| h[(i, j)].re));
        let eig = eigendecompose(&h).unwrap();
        assert!(max_abs(&eig.eigenvalues, &eig3_symmetric(&m)) < 1e-10);
    }
}

#[test]
fn reconstruction_and_orthonormality_up_to_dim_16() {
    let mut g = rng(3);
    for k in 0..100 {
        let n = 2 + k % 15;
        let h = random_hermitian(&mut g, n);
        let eig = eigendecompose(&h).unwrap();
        let v = &eig.eigenbasis;
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            eig.eigenvalues.iter().map(|l| labelqm::C64::new(*l, 0.0)),
        ));
        let back = v * lam * v.adjoint();
        let resid = (&back - &h).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(resid < 1e-8, "dim {n}: {resid}");
        let gram = v.adjoint() * v;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - labelqm::C64::new(want, 0.0)).norm() < 1e-10);
            }
        }
        assert!(eig.eigenvalues.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn phase_convention_and_bitwise_determinism() {
    let mut g = rng(4);
    for n in [2, 5, 9, 16] {
        let h = random_hermitian(&mut g, n);
        let a = eigendecompose(&h).unwrap();
        let b = eigendecompose(&h).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenbasis, b.eigenbasis);
        for col in a.eigenbasis.column_iter() {
            let first = col.iter().find(|z| z.norm() > 1e-10).unwrap();
            assert_eq!(first.im, 0.0);
            assert!(first.re > 0.0);
        }
    }
}

#[test]
fn rejects_bad_matrices() {
    let mut g = rng(5);
    let mut h = random_hermitian(&mut g, 3);
    h[(0, 1)] += labelqm::C64::new(1e-6, 0.0);
    assert!(matches!(eigendecompose(&h), Err(Error::NonHermitian { .. })));
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1.0 + 1e-9, 0.0), c(2.0, 0.0)]));
    assert!(matches!(eigendecompose(&diag), Err(Error::DegenerateSpectrum { .. })));
    let big = DMatrix::<labelqm::C64>::zeros(MAX_DIM + 1, MAX_DIM + 1);
    assert!(matches!(eigendecompose(&big), Err(Error::InvalidDimension(_))));
}

#[test]
fn named_bases() {
    let h = Observable::hadamard(4).unwrap();
    let s = 0.5;
    // Sylvester rows, after the phase convention every first entry is +1/2
    for k in 0..4 {
        assert!((h.eigenvector(k)[0].re - s).abs() < 1e-15);
        for i in 0..4 {
            assert!((h.eigenvector(k)[i].norm() - s).abs() < 1e-15);
        }
    }
    assert_eq!(h.eigenvalues(), &[0.0, 1.0, 2.0, 3.0]);
    assert!(matches!(Observable::hadamard(3), Err(Error::InvalidDimension(3))));
    let f = Observable::fourier(3).unwrap();
    let o = f.overlaps(&Observable::computational(3).unwrap()).unwrap();
    for z in o.iter() {
        assert!((z.norm_sqr() - 1.0 / 3.0).abs() < 1e-14);
    }
}

#[test]
fn born_sums_to_one_on_random_pairs() {
    let mut g = rng(6);
    for k in 0..200 {
        let n = DIMS[k % 4];
        let s = random_state(&mut g, n);
        let obs = random_observable(&mut g, n);
        let p = born_probabilities(&s, &obs).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(p.iter().all(|x| *x >= 0.0));
        assert!(max_abs(&p, &born_oracle(&s, &obs)) < 1e-12);
        let z = amplitudes(&s, &obs).unwrap();
        let norm: f64 = z.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn measure_project_measure_repeats() {
    let mut g = rng(7);
    for k in 0..50 {
        let n = DIMS[k % 4];
        let s = random_state(&mut g, n);
        let obs = random_observable(&mut g, n);
        let p = born_probabilities(&s, &obs).unwrap();
        for (i, pi) in p.iter().enumerate() {
            if *pi > 1e-12 {
                let post = project(&s, &obs, i).unwrap();
                let again = born_probabilities(&post, &obs).unwrap();
                for (j, q) in again.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((q - want).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn eigenstate_of_computational_basis() {
    let s = QuantumState::basis_state(3, 1).unwrap();
    let p = born_probabilities(&s, &Observable::computational(3).unwrap()).unwrap();
    assert_eq!(p, vec![0.0, 1.0, 0.0]);
    let e = project(&s, &Observable::computational(3).unwrap(), 0);
    assert!(matches!(e, Err(Error::ZeroProbabilityOutcome { index: 0, .. })));
}

proptest! {
    #[test]
    fn born_is_distribution(seed in any::<u64>(), dim_idx in 0usize..4) {
        let mut g = rng(seed);
        let n = DIMS[dim_idx];
        let s = random_state(&mut g, n);
        let obs = random_observable(&mut g, n);
        let p = born_probabilities(&s, &obs).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn eigenpairs_satisfy_definition(seed in any::<u64>(), n in 2usize..12) {
        let mut g = rng(seed);
        let h = random_hermitian(&mut g, n);
        let eig = eigendecompose(&h).unwrap();
        for k in 0..n {
            let v = eig.eigenbasis.column(k);
            let hv = &h * v;
            let resid = (hv - v * labelqm::C64::new(eig.eigenvalues[k], 0.0)).norm();
            prop_assert!(resid < 1e-9);
        }
        let trace: f64 = (0..n).map(|i| h[(i, i)].re).sum();
        prop_assert!((eig.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-9);
    }

    #[test]
    fn state_rejects_wrong_norm(scale in 1.001f64..10.0) {
        let v = vec![c(scale, 0.0), c(0.0, 0.0)];
        let rejected = matches!(QuantumState::new(v.clone()), Err(Error::NotNormalized { .. }));
        prop_assert!(rejected);
        prop_assert!(QuantumState::normalized(v).is_ok());
    }
}
