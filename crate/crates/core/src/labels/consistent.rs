use crate::error::{Error, Result};
use crate::hilbert::{amplitudes, check_dim, Observable, QuantumState};

/// Overlaps with modulus below this count as zero.
pub const ZERO_OVERLAP_THRESHOLD: f64 = 1e-12;

/// One joint-value label: an eigen-index per observable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabelTuple {
    pub indices: Vec<usize>,
    /// Some member index has zero amplitude in the state, so `P(label) = 0`.
    pub zero_weight: bool,
}

/// Set of consistent joint values for a family of observables on a state.
#[derive(Debug, Clone)]
pub struct LabelSpace {
    dim: usize,
    n_observables: usize,
    tuples: Vec<LabelTuple>,
    threshold: f64,
}

impl LabelSpace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_observables(&self) -> usize {
        self.n_observables
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> &[LabelTuple] {
        &self.tuples
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn contains(&self, indices: &[usize]) -> bool {
        self.tuples.binary_search_by(|t| t.indices.as_slice().cmp(indices)).is_ok()
    }

    /// Image of the projection onto observable `which`, ascending.
    pub fn projection(&self, which: usize) -> Vec<usize> {
        let mut seen = vec![false; self.dim];
        for t in &self.tuples {
            seen[t.indices[which]] = true;
        }
        (0..self.dim).filter(|&i| seen[i]).collect()
    }
}

/// Enumerates every index tuple whose member eigenvectors have pairwise
/// nonvanishing overlaps.
pub fn consistent_set(state: &QuantumState, observables: &[Observable]) -> Result<LabelSpace> {
    consistent_set_with_threshold(state, observables, ZERO_OVERLAP_THRESHOLD)
}

pub fn consistent_set_with_threshold(
    state: &QuantumState,
    observables: &[Observable],
    threshold: f64,
) -> Result<LabelSpace> {
    if observables.len() < 2 {
        return Err(Error::InvalidArgument("at least two observables are required".into()));
    }
    let dim = state.dim();
    for obs in observables {
        check_dim(dim, obs.dim())?;
    }
    let k = observables.len();

    // allowed[a][b][i][j]: |<a_i|b_j>| >= threshold, for a < b
    let mut allowed = vec![vec![Vec::new(); k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let o = observables[a].overlaps(&observables[b])?;
            allowed[a][b] = (0..dim)
                .map(|i| (0..dim).map(|j| o[(i, j)].norm() >= threshold).collect::<Vec<_>>())
                .collect::<Vec<_>>();
        }
    }
    let support: Vec<Vec<bool>> = observables
        .iter()
        .map(|obs| Ok(amplitudes(state, obs)?.iter().map(|z| z.norm() >= threshold).collect()))
        .collect::<Result<_>>()?;

    let mut tuples = Vec::new();
    let mut current = Vec::with_capacity(k);
    extend(&allowed, dim, k, &mut current, &mut |indices| {
        let zero_weight = indices.iter().enumerate().any(|(a, &i)| !support[a][i]);
        tuples.push(LabelTuple { indices: indices.to_vec(), zero_weight });
    });
    if tuples.is_empty() {
        return Err(Error::EmptyLabelSpace);
    }
    Ok(LabelSpace { dim, n_observables: k, tuples, threshold })
}

fn extend(
    allowed: &[Vec<Vec<Vec<bool>>>],
    dim: usize,
    k: usize,
    current: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    let depth = current.len();
    if depth == k {
        emit(current);
        return;
    }
    for i in 0..dim {
        if current.iter().enumerate().all(|(a, &ia)| allowed[a][depth][ia][i]) {
            current.push(i);
            extend(allowed, dim, k, current, emit);
            current.pop();
        }
    }
}
