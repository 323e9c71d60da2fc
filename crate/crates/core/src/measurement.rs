//! Orthodox single and sequential measurements, analytic and sampled.
//!
//! Sequential protocols always project onto the observed eigenvector between
//! steps, so a protocol is a Markov chain whose first step follows the Born
//! rule on the state and whose later steps follow `|<o'_k|o_j>|^2`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{amplitudes, born_probabilities, check_dim, Observable, QuantumState};
use crate::rng;

/// Tables whose total variation exceeds this are considered different.
pub const ORDER_TV_TOL: f64 = 1e-10;

/// Outcome counts of a sampled protocol. Outcome tuples hold one eigen-index
/// per protocol step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub protocol: Vec<String>,
    /// Number of outcomes of each step.
    pub outcome_ranges: Vec<usize>,
    pub seed: u64,
    pub n_samples: u64,
    pub counts: BTreeMap<Vec<usize>, u64>,
}

impl MeasurementRecord {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count(&self, outcome: &[usize]) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    /// Empirical distribution of step `step` alone.
    pub fn marginal_frequencies(&self, step: usize) -> Vec<f64> {
        let mut freq = vec![0.0; self.outcome_ranges[step]];
        for (outcome, &c) in &self.counts {
            freq[outcome[step]] += c as f64;
        }
        freq.iter_mut().for_each(|f| *f /= self.n_samples as f64);
        freq
    }
}

/// `P(a_i) = |sum_j z^B_j <a_i|b_j>|^2`, the Born rule for A evaluated through
/// the expansion of the state in the eigenbasis of B. Interference between the
/// `b_j` components is retained.
pub fn direct_distribution(state: &QuantumState, expansion: &Observable, a: &Observable) -> Result<Vec<f64>> {
    let zb = amplitudes(state, expansion)?;
    let overlap = a.overlaps(expansion)?;
    Ok((0..a.dim())
        .map(|i| (0..zb.len()).map(|j| zb[j] * overlap[(i, j)]).sum::<num_complex::Complex64>().norm_sqr())
        .collect())
}

/// `P'(a_i) = sum_j |z^B_j <a_i|b_j>|^2`: B measured first, the state
/// projected, then A measured.
pub fn sequential_distribution(state: &QuantumState, b_first: &Observable, a_second: &Observable) -> Result<Vec<f64>> {
    let pb = born_probabilities(state, b_first)?;
    let transition = transition_matrix(b_first, a_second)?;
    Ok((0..a_second.dim()).map(|i| pb.iter().enumerate().map(|(j, p)| p * transition[(j, i)]).sum()).collect())
}

/// `T[j][i] = |<next_i|prev_j>|^2`.
fn transition_matrix(prev: &Observable, next: &Observable) -> Result<DMatrix<f64>> {
    let o = prev.overlaps(next)?;
    Ok(o.map(|z| z.norm_sqr()))
}

/// Samples a projective measurement sequence `n_samples` times.
pub fn sample_protocol(
    state: &QuantumState,
    protocol: &[(&str, &Observable)],
    n_samples: u64,
    seed: u64,
) -> Result<MeasurementRecord> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    if protocol.is_empty() {
        return Err(Error::InvalidArgument("protocol is empty".into()));
    }
    for (_, obs) in protocol {
        check_dim(state.dim(), obs.dim())?;
    }
    let first = sampler(&born_probabilities(state, protocol[0].1)?)?;
    let steps: Vec<Vec<Option<WeightedIndex<f64>>>> = protocol
        .windows(2)
        .map(|w| {
            let t = transition_matrix(w[0].1, w[1].1)?;
            Ok(t.row_iter().map(|row| sampler(&row.iter().copied().collect::<Vec<_>>()).ok()).collect())
        })
        .collect::<Result<_>>()?;

    let chunks = rng::map_chunks(n_samples as usize, seed, |g, len| {
        let mut local: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let mut outcome = Vec::with_capacity(protocol.len());
        for _ in 0..len {
            outcome.clear();
            let mut current = first.sample(g);
            outcome.push(current);
            for step in &steps {
                current =
                    step[current].as_ref().expect("reachable outcomes have a normalized transition row").sample(g);
                outcome.push(current);
            }
            *local.entry(outcome.clone()).or_insert(0) += 1;
        }
        local
    });
    let mut counts = BTreeMap::new();
    for chunk in chunks {
        for (k, v) in chunk {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    Ok(MeasurementRecord {
        protocol: protocol.iter().map(|(name, _)| name.to_string()).collect(),
        outcome_ranges: protocol.iter().map(|(_, o)| o.dim()).collect(),
        seed,
        n_samples,
        counts,
    })
}

pub(crate) fn sampler(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    let clean: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
    WeightedIndex::new(&clean).map_err(|e| Error::InvalidArgument(format!("cannot sample distribution: {e}")))
}

/// Half the L1 distance between two tables of equal shape.
pub fn total_variation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    0.5 * a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Joint tables for the two orders of measuring A and B on one system.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderReport {
    /// `P(a_i) |<b_j|a_i>|^2`, rows A, columns B.
    pub a_first: DMatrix<f64>,
    /// `P(b_j) |<a_i|b_j>|^2`, rows A, columns B.
    pub b_first: DMatrix<f64>,
    pub tv_distance: f64,
    pub order_sensitive: bool,
}

pub fn order_comparison(state: &QuantumState, a: &Observable, b: &Observable) -> Result<OrderReport> {
    let pa = born_probabilities(state, a)?;
    let pb = born_probabilities(state, b)?;
    let o2 = a.overlaps(b)?.map(|z| z.norm_sqr());
    let n = a.dim();
    let a_first = DMatrix::from_fn(n, n, |i, j| pa[i] * o2[(i, j)]);
    let b_first = DMatrix::from_fn(n, n, |i, j| pb[j] * o2[(i, j)]);
    let tv_distance = total_variation(&a_first, &b_first);
    Ok(OrderReport { a_first, b_first, tv_distance, order_sensitive: tv_distance > ORDER_TV_TOL })
}
