//! Joint amplitude table `Z_ij` over label pairs.
//!
//! Moduli are fixed to `|<a_i|b_j>| / sqrt(N)`, which makes every row and
//! column carry squared norm `1/N` and reproduces the conditional rule
//! `|Z_ij|^2 / sum_j' |Z_ij'|^2 = |<b_j|a_i>|^2`. The phases are the unknowns:
//! they are fit so that the marginal sums match the state amplitudes in
//! modulus, `|sum_j Z_ij| = |z^A_i|` and `|sum_i Z_ij| = |z^B_j|`. The phase
//! mismatch left over is recorded as a per-eigenvector gauge.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::consistent::ZERO_OVERLAP_THRESHOLD;
use crate::error::{Error, Result};
use crate::hilbert::{amplitudes, check_dim, Observable, QuantumState};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub max_iterations: usize,
    /// Target for the marginal residual.
    pub tolerance: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Starting phases for restart 0 (row-major, `N*N`), replacing the default
    /// `arg(z^A_i z^B_j <a_i|b_j>)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_phases: Option<Vec<f64>>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { max_iterations: 5000, tolerance: 1e-8, restarts: 8, seed: 0, initial_phases: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    pub moduli: DMatrix<f64>,
    /// Radians in `(-pi, pi]`.
    pub phases: DMatrix<f64>,
    /// `arg(sum_j Z_ij) - arg(z^A_i)`, zero where either side vanishes.
    pub gauge_a: Vec<f64>,
    /// `arg(sum_i Z_ij) - arg(z^B_j)`.
    pub gauge_b: Vec<f64>,
    pub residual: f64,
    /// Restart that produced these phases.
    pub restart: usize,
    pub iterations: usize,
}

impl ZTable {
    pub fn dim(&self) -> usize {
        self.moduli.nrows()
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        C64::from_polar(self.moduli[(i, j)], self.phases[(i, j)])
    }

    pub fn values(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.value(i, j))
    }

    /// `sum_j Z_ij`.
    pub fn row_sums(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.value(i, j)).sum()).collect()
    }

    /// `sum_i Z_ij`.
    pub fn column_sums(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n).map(|j| (0..n).map(|i| self.value(i, j)).sum()).collect()
    }

    /// `|Z_ij|^2 / sum_j' |Z_ij'|^2`, the conditional of B given `a_i`.
    pub fn conditional_given_a(&self, i: usize) -> Vec<f64> {
        let row: Vec<f64> = self.moduli.row(i).iter().map(|m| m * m).collect();
        let total: f64 = row.iter().sum();
        row.iter().map(|p| if total > 0.0 { p / total } else { 0.0 }).collect()
    }
}

/// `sqrt( sum_i (|sum_j Z_ij| - |z^A_i|)^2 + sum_j (|sum_i Z_ij| - |z^B_j|)^2 )`.
pub fn marginal_residual(values: &DMatrix<C64>, target_a: &[f64], target_b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (row, target) in values.row_iter().zip(target_a) {
        sum += (row.sum().norm() - target).powi(2);
    }
    for (col, target) in values.column_iter().zip(target_b) {
        sum += (col.sum().norm() - target).powi(2);
    }
    sum.sqrt()
}

/// Fits the phases of the amplitude table for `state` on the pair `(A, B)`.
///
/// Runs `restarts` independent projected gradient descents (restart 0 from the
/// canonical initialization, the rest from uniformly random phases drawn from
/// derived streams) and keeps the lowest residual, ties going to the lower
/// restart index. A best residual above `tolerance` is returned as
/// [`Error::SolverDidNotConverge`] carrying the table.
pub fn z_table(
    state: &QuantumState,
    basis_a: &Observable,
    basis_b: &Observable,
    params: &SolverParams,
) -> Result<ZTable> {
    check_dim(basis_a.dim(), basis_b.dim())?;
    let n = state.dim();
    let za = amplitudes(state, basis_a)?;
    let zb = amplitudes(state, basis_b)?;
    let overlap = basis_a.overlaps(basis_b)?;
    if let Some(init) = &params.initial_phases {
        check_dim(n * n, init.len())?;
    }
    if params.restarts == 0 {
        return Err(Error::InvalidArgument("restarts must be at least 1".into()));
    }

    let scale = 1.0 / (n as f64).sqrt();
    let moduli = DMatrix::from_fn(n, n, |i, j| {
        let m = overlap[(i, j)].norm();
        if m < ZERO_OVERLAP_THRESHOLD {
            0.0
        } else {
            m * scale
        }
    });
    let problem = Problem {
        n,
        moduli: moduli.iter().copied().collect(),
        target_a: za.iter().map(|z| z.norm()).collect(),
        target_b: zb.iter().map(|z| z.norm()).collect(),
    };

    // internal phase vectors are column-major, matching nalgebra storage
    let mut canonical = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            canonical[i + j * n] = match &params.initial_phases {
                Some(init) => init[i * n + j],
                None => {
                    let w = za[i] * zb[j] * overlap[(i, j)];
                    if w.norm() > 0.0 {
                        w.arg()
                    } else {
                        0.0
                    }
                }
            };
        }
    }

    let runs: Vec<Descent> = (0..params.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                canonical.clone()
            } else {
                let mut g = rng::stream(params.seed, r as u64);
                (0..n * n).map(|_| g.random_range(-PI..PI)).collect()
            };
            problem.descend(start, params.max_iterations, params.tolerance)
        })
        .collect();

    let (restart, best) = runs
        .into_iter()
        .enumerate()
        .fold(None::<(usize, Descent)>, |acc, (r, d)| match acc {
            Some((br, bd)) if bd.residual <= d.residual => Some((br, bd)),
            _ => Some((r, d)),
        })
        .expect("at least one restart");

    let mut phases = DMatrix::from_column_slice(n, n, &best.phases);
    for (p, m) in phases.iter_mut().zip(moduli.iter()) {
        *p = if *m == 0.0 { 0.0 } else { wrap(*p) };
    }
    let values = DMatrix::from_fn(n, n, |i, j| C64::from_polar(moduli[(i, j)], phases[(i, j)]));
    let residual = marginal_residual(&values, &problem.target_a, &problem.target_b);
    let gauge_a = (0..n).map(|i| gauge(values.row(i).iter().sum(), za[i])).collect();
    let gauge_b = (0..n).map(|j| gauge(values.column(j).iter().sum(), zb[j])).collect();

    let table = ZTable { moduli, phases, gauge_a, gauge_b, residual, restart, iterations: best.iterations };
    if residual <= params.tolerance {
        Ok(table)
    } else {
        Err(Error::SolverDidNotConverge { best: Box::new(table) })
    }
}

fn gauge(sum: C64, target: C64) -> f64 {
    const FLOOR: f64 = 1e-12;
    if sum.norm() < FLOOR || target.norm() < FLOOR {
        0.0
    } else {
        wrap(sum.arg() - target.arg())
    }
}

/// Maps an angle into `(-pi, pi]`.
fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

struct Problem {
    n: usize,
    /// Column-major.
    moduli: Vec<f64>,
    target_a: Vec<f64>,
    target_b: Vec<f64>,
}

struct Descent {
    phases: Vec<f64>,
    residual: f64,
    iterations: usize,
}

impl Problem {
    fn entries(&self, phases: &[f64]) -> Vec<C64> {
        self.moduli.iter().zip(phases).map(|(&m, &p)| C64::from_polar(m, p)).collect()
    }

    fn sums(&self, z: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let n = self.n;
        let mut rows = vec![C64::new(0.0, 0.0); n];
        let mut cols = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                let v = z[i + j * n];
                rows[i] += v;
                cols[j] += v;
            }
        }
        (rows, cols)
    }

    fn objective(&self, phases: &[f64]) -> f64 {
        let (rows, cols) = self.sums(&self.entries(phases));
        let a: f64 = rows.iter().zip(&self.target_a).map(|(r, t)| (r.norm() - t).powi(2)).sum();
        let b: f64 = cols.iter().zip(&self.target_b).map(|(c, t)| (c.norm() - t).powi(2)).sum();
        a + b
    }

    fn value_and_gradient(&self, phases: &[f64]) -> (f64, Vec<f64>) {
        let n = self.n;
        let z = self.entries(phases);
        let (rows, cols) = self.sums(&z);
        let factor = |s: C64, t: f64| {
            let r = s.norm();
            if r > 1e-300 {
                1.0 - t / r
            } else if t == 0.0 {
                1.0
            } else {
                0.0
            }
        };
        let fa: Vec<f64> = rows.iter().zip(&self.target_a).map(|(&r, &t)| factor(r, t)).collect();
        let fb: Vec<f64> = cols.iter().zip(&self.target_b).map(|(&c, &t)| factor(c, t)).collect();
        let mut grad = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                let v = z[i + j * n];
                // d|S|/dtheta = -Im(conj(S) Z) / |S|
                grad[i + j * n] = -2.0 * ((rows[i].conj() * v).im * fa[i] + (cols[j].conj() * v).im * fb[j]);
            }
        }
        let value = rows.iter().zip(&self.target_a).map(|(r, t)| (r.norm() - t).powi(2)).sum::<f64>()
            + cols.iter().zip(&self.target_b).map(|(c, t)| (c.norm() - t).powi(2)).sum::<f64>();
        (value, grad)
    }

    /// Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.
    fn descend(&self, mut x: Vec<f64>, max_iterations: usize, tolerance: f64) -> Descent {
        let target = tolerance * tolerance;
        let (mut f, mut g) = self.value_and_gradient(&x);
        let mut step = 1.0;
        let mut iterations = 0;
        while iterations < max_iterations && f > target {
            let g_sq: f64 = g.iter().map(|v| v * v).sum();
            if g_sq == 0.0 {
                break;
            }
            let mut alpha = step;
            let mut accepted = None;
            for _ in 0..60 {
                let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
                let ft = self.objective(&trial);
                if ft <= f - 1e-4 * alpha * g_sq {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= 0.5;
            }
            let Some((next, _)) = accepted else { break };
            let (f_next, g_next) = self.value_and_gradient(&next);
            let s: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_next.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e10) } else { (alpha * 2.0).min(1e10) };
            x = next.into_iter().map(wrap).collect();
            f = f_next;
            g = g_next;
            iterations += 1;
        }
        Descent { phases: x, residual: f.max(0.0).sqrt(), iterations }
    }
}

/// Standalone amplitude table on explicit moduli/phases, used to score
/// externally constructed tables against the marginal targets of a state.
pub(crate) fn table_from_values(
    values: &DMatrix<C64>,
    target_a: &DVector<C64>,
    target_b: &DVector<C64>,
    gauge_a: Vec<f64>,
    gauge_b: Vec<f64>,
) -> ZTable {
    let n = values.nrows();
    let ta: Vec<f64> = target_a.iter().map(|z| z.norm()).collect();
    let tb: Vec<f64> = target_b.iter().map(|z| z.norm()).collect();
    ZTable {
        moduli: DMatrix::from_fn(n, n, |i, j| values[(i, j)].norm()),
        phases: DMatrix::from_fn(n, n, |i, j| {
            let v = values[(i, j)];
            if v.norm() > 0.0 {
                v.arg()
            } else {
                0.0
            }
        }),
        gauge_a,
        gauge_b,
        residual: marginal_residual(values, &ta, &tb),
        restart: 0,
        iterations: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn hand_solution_has_zero_residual() {
        // phases [[0,0],[pi/2,-pi/2]] with all moduli 1/2
        let z = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::from_polar(0.5, 0.0),
                C64::from_polar(0.5, 0.0),
                C64::from_polar(0.5, FRAC_PI_2),
                C64::from_polar(0.5, -FRAC_PI_2),
            ],
        );
        let r = marginal_residual(&z, &[1.0, 0.0], &[std::f64::consts::FRAC_1_SQRT_2; 2]);
        assert!(r < 1e-15);
    }

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-PI) - PI).abs() < 1e-12);
        assert!((wrap(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = Problem { n: 2, moduli: vec![0.5, 0.3, 0.4, 0.6], target_a: vec![0.9, 0.2], target_b: vec![0.5, 0.7] };
        let x = vec![0.3, -1.1, 2.0, 0.7];
        let (_, g) = p.value_and_gradient(&x);
        let h = 1e-6;
        for k in 0..4 {
            let mut up = x.clone();
            let mut down = x.clone();
            up[k] += h;
            down[k] -= h;
            let fd = (p.objective(&up) - p.objective(&down)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7, "component {k}: {fd} vs {}", g[k]);
        }
    }
}
