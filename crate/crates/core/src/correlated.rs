//! Label-correlated pairs.
//!
//! Two systems share coefficients `z^B_j`: system a has the pure state
//! `sum_j z^B_j |b^a_j>` and system b the analogous state on its own basis.
//! The labels are matched so that a B measurement on both systems always
//! returns `(b_j, -b_j)`. Tables are indexed by A outcome (rows, ascending
//! eigenvalue) and by the shared index `j` (columns, ascending eigenvalue of
//! B on system a; system b then reads `-b_j`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{born_probabilities, check_dim, Observable, QuantumState, NORM_TOL};
use crate::measurement::{sampler, total_variation, MeasurementRecord};
use crate::rng;

/// Threshold for the ambiguity and divergence flags.
pub const FLAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedPairEnsemble {
    z_b: Vec<C64>,
    basis_a: Observable,
    basis_b: Observable,
    /// `pairing[j]` is the index in `basis_b` of the partner of `basis_a` index `j`.
    pairing: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointSemantics {
    OrthodoxBFirst,
    OrthodoxAFirst,
    LabelTheory,
}

impl JointSemantics {
    pub const ALL: [JointSemantics; 3] = [Self::OrthodoxBFirst, Self::OrthodoxAFirst, Self::LabelTheory];

    pub fn name(self) -> &'static str {
        match self {
            Self::OrthodoxBFirst => "orthodox_b_first",
            Self::OrthodoxAFirst => "orthodox_a_first",
            Self::LabelTheory => "label_theory",
        }
    }
}

/// Which expression supplies `P(b_j | a_i)` in the label-theory table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionalForm {
    /// `|<b_j|a_i>|^2`
    #[default]
    Overlap,
    /// `|Z_ij|^2 / sum_j' |Z_ij'|^2` from the amplitude-table moduli.
    AmplitudeTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub semantics: JointSemantics,
    pub table: DMatrix<f64>,
}

impl JointDistribution {
    pub fn a_marginal(&self) -> Vec<f64> {
        self.table.row_iter().map(|r| r.sum()).collect()
    }

    pub fn b_marginal(&self) -> Vec<f64> {
        self.table.column_iter().map(|c| c.sum()).collect()
    }
}

impl CorrelatedPairEnsemble {
    /// System b gets the same eigenvectors as system a with negated eigenvalues.
    pub fn new(z_b: Vec<C64>, basis_a: Observable) -> Result<Self> {
        let vectors = (0..basis_a.dim()).map(|k| basis_a.eigenvector(k)).collect();
        Self::with_companion_basis(z_b, basis_a, vectors)
    }

    /// `vectors_b[j]` is the companion eigenvector of `basis_a` index `j`; its
    /// eigenvalue is set to `-b^a_j`.
    pub fn with_companion_basis(z_b: Vec<C64>, basis_a: Observable, vectors_b: Vec<DVector<C64>>) -> Result<Self> {
        let n = basis_a.dim();
        check_dim(n, z_b.len())?;
        check_dim(n, vectors_b.len())?;
        let norm_sq: f64 = z_b.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: norm_sq.sqrt() });
        }
        let negated: Vec<f64> = basis_a.eigenvalues().iter().map(|l| -l).collect();
        let basis_b = Observable::from_eigenbasis(negated, vectors_b)?;
        // ascending order reverses the pairing
        let pairing = (0..n).map(|j| n - 1 - j).collect();
        Ok(Self { z_b, basis_a, basis_b, pairing })
    }

    pub fn dim(&self) -> usize {
        self.z_b.len()
    }

    pub fn z_b(&self) -> &[C64] {
        &self.z_b
    }

    pub fn basis_a(&self) -> &Observable {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &Observable {
        &self.basis_b
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// `|S_a> = sum_j z^B_j |b^a_j>`.
    pub fn state_a(&self) -> QuantumState {
        QuantumState::from_coefficients(&self.basis_a, &self.z_b).expect("validated at construction")
    }

    /// Joint B measurement on both systems: rows index `basis_a`, columns `basis_b`.
    pub fn bb_joint(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |j, k| if self.pairing[j] == k { self.z_b[j].norm_sqr() } else { 0.0 })
    }
}

/// Distribution of A on system a when system b is left alone; the same in
/// both theories.
pub fn unmeasured_companion_distribution(pair: &CorrelatedPairEnsemble, a: &Observable) -> Result<Vec<f64>> {
    check_dim(pair.dim(), a.dim())?;
    born_probabilities(&pair.state_a(), a)
}

pub fn joint_distribution(
    pair: &CorrelatedPairEnsemble,
    a: &Observable,
    semantics: JointSemantics,
) -> Result<JointDistribution> {
    joint_distribution_with(pair, a, semantics, ConditionalForm::Overlap)
}

pub fn joint_distribution_with(
    pair: &CorrelatedPairEnsemble,
    a: &Observable,
    semantics: JointSemantics,
    form: ConditionalForm,
) -> Result<JointDistribution> {
    let n = pair.dim();
    check_dim(n, a.dim())?;
    let o2 = a.overlaps(&pair.basis_a)?.map(|z| z.norm_sqr());
    let table = match semantics {
        JointSemantics::OrthodoxBFirst => DMatrix::from_fn(n, n, |i, j| pair.z_b[j].norm_sqr() * o2[(i, j)]),
        // the A-first projection chain and the label theory share one formula
        JointSemantics::OrthodoxAFirst | JointSemantics::LabelTheory => {
            let pa = unmeasured_companion_distribution(pair, a)?;
            let cond = conditional_table(a, &pair.basis_a, form)?;
            DMatrix::from_fn(n, n, |i, j| pa[i] * cond[(i, j)])
        }
    };
    Ok(JointDistribution { semantics, table })
}

/// Row-stochastic `P(b_j | a_i)`.
fn conditional_table(a: &Observable, b: &Observable, form: ConditionalForm) -> Result<DMatrix<f64>> {
    let o = a.overlaps(b)?;
    Ok(match form {
        ConditionalForm::Overlap => o.map(|z| z.norm_sqr()),
        ConditionalForm::AmplitudeTable => {
            let scale = 1.0 / (a.dim() as f64).sqrt();
            let z2 = o.map(|z| (z.norm() * scale).powi(2));
            let mut out = z2.clone();
            for (i, mut row) in out.row_iter_mut().enumerate() {
                let total: f64 = z2.row(i).sum();
                row.iter_mut().for_each(|v| *v = if total > 0.0 { *v / total } else { 0.0 });
            }
            out
        }
    })
}

/// Largest entrywise gap between the two label-theory conditional forms.
pub fn conditional_form_difference(pair: &CorrelatedPairEnsemble, a: &Observable) -> Result<f64> {
    let x = conditional_table(a, &pair.basis_a, ConditionalForm::Overlap)?;
    let y = conditional_table(a, &pair.basis_a, ConditionalForm::AmplitudeTable)?;
    Ok(x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityReport {
    pub orthodox_b_first: DMatrix<f64>,
    pub orthodox_a_first: DMatrix<f64>,
    pub label_theory: DMatrix<f64>,
    /// TV between the two orthodox orders.
    pub tv_distance: f64,
    /// TV between the label theory and the B-first orthodox table.
    pub tv_label_vs_b_first: f64,
    /// `sum_i label(i, j) - |z^B_j|^2`.
    pub marginal_deviation: Vec<f64>,
    pub b_marginal_label: Vec<f64>,
    pub b_marginal_orthodox: Vec<f64>,
    pub ambiguous: bool,
    pub divergent_from_orthodox: bool,
}

pub fn ambiguity_report(pair: &CorrelatedPairEnsemble, a: &Observable) -> Result<AmbiguityReport> {
    let b_first = joint_distribution(pair, a, JointSemantics::OrthodoxBFirst)?;
    let a_first = joint_distribution(pair, a, JointSemantics::OrthodoxAFirst)?;
    let label = joint_distribution(pair, a, JointSemantics::LabelTheory)?;
    let tv_distance = total_variation(&b_first.table, &a_first.table);
    let tv_label_vs_b_first = total_variation(&label.table, &b_first.table);
    let b_marginal_label = label.b_marginal();
    let b_marginal_orthodox: Vec<f64> = pair.z_b.iter().map(|z| z.norm_sqr()).collect();
    let marginal_deviation: Vec<f64> = b_marginal_label.iter().zip(&b_marginal_orthodox).map(|(l, o)| l - o).collect();
    let max_dev = marginal_deviation.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    Ok(AmbiguityReport {
        ambiguous: tv_distance > FLAG_TOL,
        divergent_from_orthodox: tv_label_vs_b_first > FLAG_TOL || max_dev > FLAG_TOL,
        orthodox_b_first: b_first.table,
        orthodox_a_first: a_first.table,
        label_theory: label.table,
        tv_distance,
        tv_label_vs_b_first,
        marginal_deviation,
        b_marginal_label,
        b_marginal_orthodox,
    })
}

/// Samples `(a_i, j)` outcome pairs from the chosen joint table.
pub fn sample_pair(
    pair: &CorrelatedPairEnsemble,
    a: &Observable,
    semantics: JointSemantics,
    n: u64,
    seed: u64,
) -> Result<MeasurementRecord> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let joint = joint_distribution(pair, a, semantics)?;
    let dim = pair.dim();
    // row-major flattening: cell = i * dim + j
    let weights: Vec<f64> = (0..dim * dim).map(|c| joint.table[(c / dim, c % dim)]).collect();
    let dist = sampler(&weights)?;
    let chunks = rng::map_chunks(n as usize, seed, |g, len| {
        let mut local = vec![0u64; dim * dim];
        for _ in 0..len {
            local[rand::distr::Distribution::sample(&dist, g)] += 1;
        }
        local
    });
    let mut cells = vec![0u64; dim * dim];
    for chunk in chunks {
        for (c, v) in chunk.into_iter().enumerate() {
            cells[c] += v;
        }
    }
    let counts =
        cells.into_iter().enumerate().filter(|(_, v)| *v > 0).map(|(c, v)| (vec![c / dim, c % dim], v)).collect();
    Ok(MeasurementRecord {
        protocol: vec!["A_on_a".into(), format!("B_on_b:{}", semantics.name())],
        outcome_ranges: vec![dim, dim],
        seed,
        n_samples: n,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn perfect_b_correlation() {
        let pair = CorrelatedPairEnsemble::new(
            vec![c(0.9_f64.sqrt()), c(0.1_f64.sqrt())],
            Observable::computational(2).unwrap(),
        )
        .unwrap();
        let t = pair.bb_joint();
        assert!((t[(0, 1)] - 0.9).abs() < 1e-15);
        assert!((t[(1, 0)] - 0.1).abs() < 1e-15);
        assert_eq!(t[(0, 0)], 0.0);
        assert_eq!(t[(1, 1)], 0.0);
        // b eigenvalues are the negated a eigenvalues
        let a = pair.basis_a().eigenvalues();
        let b = pair.basis_b().eigenvalues();
        for j in 0..2 {
            assert!((b[pair.pairing()[j]] + a[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        assert!(matches!(
            CorrelatedPairEnsemble::new(vec![c(1.0), c(1.0)], Observable::computational(2).unwrap()),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn commuting_case_all_semantics_agree() {
        let comp = Observable::computational(3).unwrap();
        let pair = CorrelatedPairEnsemble::new(vec![c(0.6), c(0.0), c(0.8)], comp.clone()).unwrap();
        let tables: Vec<_> =
            JointSemantics::ALL.iter().map(|&s| joint_distribution(&pair, &comp, s).unwrap().table).collect();
        for t in &tables[1..] {
            assert!(total_variation(t, &tables[0]) < 1e-15);
        }
        let r = ambiguity_report(&pair, &comp).unwrap();
        assert!(!r.ambiguous && !r.divergent_from_orthodox);
    }

    #[test]
    fn conditional_forms_agree() {
        let pair = CorrelatedPairEnsemble::new(vec![c(0.6), c(0.8)], Observable::computational(2).unwrap()).unwrap();
        let d = conditional_form_difference(&pair, &Observable::hadamard(2).unwrap()).unwrap();
        assert!(d < 1e-15);
        let x = joint_distribution_with(
            &pair,
            &Observable::hadamard(2).unwrap(),
            JointSemantics::LabelTheory,
            ConditionalForm::AmplitudeTable,
        )
        .unwrap();
        let y = joint_distribution(&pair, &Observable::hadamard(2).unwrap(), JointSemantics::LabelTheory).unwrap();
        assert!(total_variation(&x.table, &y.table) < 1e-15);
    }

    #[test]
    fn single_sample() {
        let pair = CorrelatedPairEnsemble::new(vec![c(0.6), c(0.8)], Observable::computational(2).unwrap()).unwrap();
        let rec = sample_pair(&pair, &Observable::hadamard(2).unwrap(), JointSemantics::LabelTheory, 1, 5).unwrap();
        assert_eq!(rec.total(), 1);
        assert_eq!(rec.counts.len(), 1);
    }
}
