//! Periodic position/momentum grid, discrete Wigner function and the explicit
//! labeled phase-space state.
//!
//! Grid points are `x_k = (k - n/2) dx` and `p_m = (m - n/2) dp` with
//! `dx dp = 2 pi hbar / n`, so `p_m x_k / hbar = 2 pi (m - n/2)(k - n/2) / n`
//! and the momentum wavefunction is a unitary DFT of the position one.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::ztable::{table_from_values, z_table, SolverParams, ZTable};
use crate::error::{Error, Result};
use crate::hilbert::{Observable, QuantumState};

/// Smallest grid accepted by [`discrete_wigner`].
pub const MIN_WIGNER_POINTS: usize = 16;
const GRID_NORM_TOL: f64 = 1e-8;
const REFERENCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    n_points: usize,
    dx: f64,
    dp: f64,
    hbar: f64,
    psi_x: Vec<C64>,
    xi_p: Vec<C64>,
}

impl PhaseSpaceGrid {
    /// `psi_x` must satisfy `sum |psi|^2 dx = 1` within 1e-8.
    pub fn new(n_points: usize, dx: f64, hbar: f64, psi_x: Vec<C64>) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("n_points = {n_points} is not a power of two")));
        }
        if psi_x.len() != n_points {
            return Err(Error::DimensionMismatch { expected: n_points, found: psi_x.len() });
        }
        if !(dx > 0.0 && dx.is_finite()) || !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidArgument("dx and hbar must be positive".into()));
        }
        let norm: f64 = psi_x.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        if (norm - 1.0).abs() > GRID_NORM_TOL {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        let dp = 2.0 * PI * hbar / (n_points as f64 * dx);
        let phi: Vec<C64> = psi_x.iter().map(|z| z * dx.sqrt()).collect();
        let xi_p = dft(&phi, -1.0).into_iter().map(|z| z / dp.sqrt()).collect();
        Ok(Self { n_points, dx, dp, hbar, psi_x, xi_p })
    }

    /// Samples `f` at the grid positions and rescales to unit norm.
    pub fn from_fn(n_points: usize, dx: f64, hbar: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        let half = (n_points / 2) as f64;
        let raw: Vec<C64> = (0..n_points).map(|k| f((k as f64 - half) * dx)).collect();
        let norm = (raw.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(n_points, dx, hbar, raw.into_iter().map(|z| z / norm).collect())
    }

    /// Spacing that gives the position and momentum windows equal extent.
    pub fn balanced_dx(n_points: usize, hbar: f64) -> f64 {
        (2.0 * PI * hbar / n_points as f64).sqrt()
    }

    /// Gaussian wave packet `exp(-(x-x0)^2 / (4 sigma^2) + i p0 x / hbar)`.
    pub fn gaussian(n_points: usize, dx: f64, hbar: f64, x0: f64, p0: f64, sigma: f64) -> Result<Self> {
        Self::from_fn(n_points, dx, hbar, |x| {
            C64::from_polar((-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x / hbar)
        })
    }

    /// Even superposition of two Gaussians centered at `+-separation/2`.
    pub fn two_peak(n_points: usize, dx: f64, hbar: f64, separation: f64, sigma: f64) -> Result<Self> {
        let h = separation / 2.0;
        Self::from_fn(n_points, dx, hbar, |x| {
            let g = |c: f64| (-(x - c).powi(2) / (4.0 * sigma * sigma)).exp();
            C64::new(g(h) + g(-h), 0.0)
        })
    }

    /// Plane wave carrying exactly grid momentum `p_m`.
    pub fn plane_wave(n_points: usize, dx: f64, hbar: f64, momentum_index: usize) -> Result<Self> {
        if momentum_index >= n_points {
            return Err(Error::InvalidArgument("momentum index out of range".into()));
        }
        let amp = 1.0 / (n_points as f64 * dx).sqrt();
        let psi = (0..n_points).map(|k| C64::from_polar(amp, grid_angle(n_points, momentum_index, k))).collect();
        Self::new(n_points, dx, hbar, psi)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn psi_x(&self) -> &[C64] {
        &self.psi_x
    }

    pub fn xi_p(&self) -> &[C64] {
        &self.xi_p
    }

    pub fn x(&self, k: usize) -> f64 {
        (k as f64 - (self.n_points / 2) as f64) * self.dx
    }

    pub fn p(&self, m: usize) -> f64 {
        (m as f64 - (self.n_points / 2) as f64) * self.dp
    }

    /// Position amplitudes as a unit vector `psi_k sqrt(dx)`.
    pub fn position_amplitudes(&self) -> Vec<C64> {
        self.psi_x.iter().map(|z| z * self.dx.sqrt()).collect()
    }

    /// Momentum amplitudes as a unit vector `xi_m sqrt(dp)`.
    pub fn momentum_amplitudes(&self) -> Vec<C64> {
        self.xi_p.iter().map(|z| z * self.dp.sqrt()).collect()
    }

    /// `max_k |psi_k - IDFT(DFT(psi))_k|` in unit-vector scaling.
    pub fn round_trip_residual(&self) -> f64 {
        let phi = self.position_amplitudes();
        let back = dft(&self.momentum_amplitudes(), 1.0);
        phi.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn state(&self) -> Result<QuantumState> {
        QuantumState::new(self.position_amplitudes())
    }

    /// Position operator on the grid (eigenvalues `x_k`, eigenvectors `e_k`).
    pub fn position_observable(&self) -> Result<Observable> {
        let n = self.n_points;
        let vectors = (0..n)
            .map(|k| {
                let mut v = DVector::zeros(n);
                v[k] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Observable::from_eigenbasis((0..n).map(|k| self.x(k)).collect(), vectors)
    }

    /// Momentum operator on the grid: eigenvector `m` has components
    /// `exp(i p_m x_k / hbar) / sqrt(n)`.
    pub fn momentum_observable(&self) -> Result<Observable> {
        let n = self.n_points;
        let scale = 1.0 / (n as f64).sqrt();
        let vectors = (0..n)
            .map(|m| DVector::from_iterator(n, (0..n).map(|k| C64::from_polar(scale, grid_angle(n, m, k)))))
            .collect();
        Observable::from_eigenbasis((0..n).map(|m| self.p(m)).collect(), vectors)
    }
}

/// `p_m x_k / hbar` reduced modulo `2 pi` exactly in integer arithmetic.
fn grid_angle(n: usize, m: usize, k: usize) -> f64 {
    let half = (n / 2) as i64;
    let r = ((m as i64 - half) * (k as i64 - half)).rem_euclid(n as i64);
    2.0 * PI * r as f64 / n as f64
}

/// Unitary centered DFT; `sign = -1` maps position to momentum.
fn dft(v: &[C64], sign: f64) -> Vec<C64> {
    let n = v.len();
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|m| {
            v.iter().enumerate().map(|(k, z)| z * C64::from_polar(1.0, sign * grid_angle(n, m, k))).sum::<C64>() * scale
        })
        .collect()
}

/// Real Wigner table, rows indexed by position, columns by momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerTable {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub dx: f64,
    pub dp: f64,
    pub hbar: f64,
    pub values: DMatrix<f64>,
    /// Largest imaginary part dropped from the kernel sum.
    pub max_imaginary: f64,
}

impl WignerTable {
    /// `sum_p W(x, p) dp` for each `x`.
    pub fn position_marginal(&self) -> Vec<f64> {
        self.values.row_iter().map(|r| r.sum() * self.dp).collect()
    }

    /// `sum_x W(x, p) dx` for each `p`.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        self.values.column_iter().map(|c| c.sum() * self.dx).collect()
    }

    pub fn total(&self) -> f64 {
        self.values.sum() * self.dx * self.dp
    }

    pub fn min(&self) -> f64 {
        self.values.min()
    }
}

/// Discrete Wigner function
/// `W(x, p) = 1/(2 pi hbar) sum_s psi*(x + s/2) psi(x - s/2) e^{i p s / hbar} ds`.
///
/// The shift `s` runs over one period `[-L/2, L/2]` in steps of `dx` with the
/// two end points weighted by one half. Half-step samples of `psi` come from
/// its periodic trigonometric interpolant, so both marginals are reproduced
/// exactly up to rounding.
pub fn discrete_wigner(grid: &PhaseSpaceGrid) -> Result<WignerTable> {
    let n = grid.n_points;
    if n < MIN_WIGNER_POINTS {
        return Err(Error::GridTooSmall(n));
    }
    let phi = grid.position_amplitudes();
    let chi = grid.momentum_amplitudes();
    let scale = 1.0 / (n as f64).sqrt();
    // phi at x_k + dx/2
    let half_shift: Vec<C64> = (0..n)
        .map(|k| {
            chi.iter()
                .enumerate()
                .map(|(m, c)| {
                    let extra = PI * (m as f64 - (n / 2) as f64) / n as f64;
                    c * C64::from_polar(1.0, grid_angle(n, m, k) + extra)
                })
                .sum::<C64>()
                * scale
        })
        .collect();
    let ni = n as i64;
    let sample = |k: usize, l: i64| -> C64 {
        // phi at x_k + l dx / 2
        if l.rem_euclid(2) == 0 {
            phi[(k as i64 + l / 2).rem_euclid(ni) as usize]
        } else {
            let r = (l - 1).div_euclid(2);
            half_shift[(k as i64 + r).rem_euclid(ni) as usize]
        }
    };

    let norm = 1.0 / (2.0 * PI * grid.hbar);
    let half = ni / 2;
    let mut values = DMatrix::zeros(n, n);
    let mut max_imaginary: f64 = 0.0;
    let mut products = vec![C64::new(0.0, 0.0); n + 1];
    for k in 0..n {
        for (slot, l) in (-half..=half).enumerate() {
            let w = if l.abs() == half { 0.5 } else { 1.0 };
            products[slot] = sample(k, l).conj() * sample(k, -l) * w;
        }
        for m in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for (slot, l) in (-half..=half).enumerate() {
                // p_m l dx / hbar = 2 pi (m - n/2) l / n
                let r = ((m as i64 - half) * l).rem_euclid(ni);
                acc += products[slot] * C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64);
            }
            let value = acc * norm;
            max_imaginary = max_imaginary.max(value.im.abs());
            values[(k, m)] = value.re;
        }
    }
    if max_imaginary > 1e-9 {
        return Err(Error::InvalidArgument(format!("Wigner kernel left imaginary residue {max_imaginary:e}")));
    }
    Ok(WignerTable {
        x: (0..n).map(|k| grid.x(k)).collect(),
        p: (0..n).map(|m| grid.p(m)).collect(),
        dx: grid.dx,
        dp: grid.dp,
        hbar: grid.hbar,
        values,
        max_imaginary,
    })
}

/// Explicit amplitude table for a phase-space state with reference point
/// `(x_0, p_0)`, together with its momentum trace.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPhaseSpaceState {
    /// `Z_km = phi_k chi_m exp(i (p_m x_0 - x_k p_0) / hbar)` in the re-phased
    /// bases `|x>' = e^{i p_0 x / hbar}|x>`, `|p>' = e^{-i p x_0 / hbar}|p>`.
    pub table: ZTable,
    pub x0_index: usize,
    pub p0_index: usize,
    /// Sum over momentum expressed in the original position basis.
    pub trace: Vec<C64>,
    /// `c` minimizing `|trace - c psi|`.
    pub factor: C64,
    /// `|trace - c psi| / |trace|`.
    pub proportionality_residual: f64,
}

pub fn phase_space_label_state(
    grid: &PhaseSpaceGrid,
    x0_index: usize,
    p0_index: usize,
) -> Result<LabeledPhaseSpaceState> {
    let n = grid.n_points;
    if x0_index >= n || p0_index >= n {
        return Err(Error::InvalidArgument("reference index out of range".into()));
    }
    if grid.psi_x[x0_index].norm() <= REFERENCE_FLOOR {
        return Err(Error::ZeroReferenceAmplitude { which: "position", index: x0_index });
    }
    if grid.xi_p[p0_index].norm() <= REFERENCE_FLOOR {
        return Err(Error::ZeroReferenceAmplitude { which: "momentum", index: p0_index });
    }
    let phi = DVector::from_vec(grid.position_amplitudes());
    let chi = DVector::from_vec(grid.momentum_amplitudes());

    let values = DMatrix::from_fn(n, n, |k, m| {
        let angle = grid_angle(n, m, x0_index) - grid_angle(n, p0_index, k);
        phi[k] * chi[m] * C64::from_polar(1.0, angle)
    });
    let gauge_a: Vec<f64> = (0..n).map(|k| grid_angle(n, p0_index, k)).collect();
    let gauge_b: Vec<f64> = (0..n).map(|m| -grid_angle(n, m, x0_index)).collect();

    // |x_k>' carries e^{i p_0 x_k / hbar}; undo it to read the ray in |x_k>
    let trace: Vec<C64> =
        (0..n).map(|k| values.row(k).iter().sum::<C64>() * C64::from_polar(1.0, gauge_a[k])).collect();
    let (factor, proportionality_residual) = proportionality(&trace, phi.as_slice());
    let table = table_from_values(&values, &phi, &chi, gauge_a, gauge_b);
    Ok(LabeledPhaseSpaceState { table, x0_index, p0_index, trace, factor, proportionality_residual })
}

/// Fits an amplitude table for the grid state on the position and momentum
/// observables, starting restart 0 from the phases of the explicit table.
pub fn reinject(grid: &PhaseSpaceGrid, labeled: &LabeledPhaseSpaceState, params: &SolverParams) -> Result<ZTable> {
    let n = grid.n_points;
    let initial: Vec<f64> = (0..n * n).map(|c| labeled.table.phases[(c / n, c % n)]).collect();
    let params = SolverParams { initial_phases: Some(initial), ..params.clone() };
    z_table(&grid.state()?, &grid.position_observable()?, &grid.momentum_observable()?, &params)
}

/// Best `c` with `u ~ c v` and the relative residual `|u - c v| / |u|`.
pub fn proportionality(u: &[C64], v: &[C64]) -> (C64, f64) {
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let vu: C64 = v.iter().zip(u).map(|(a, b)| a.conj() * b).sum();
    let c = vu / vv;
    let err: f64 = u.iter().zip(v).map(|(a, b)| (a - c * b).norm_sqr()).sum::<f64>().sqrt();
    let un: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (c, if un > 0.0 { err / un } else { err })
}
