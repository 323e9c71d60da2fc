//! Spin-1/2 labels on a finite set of directions and the singlet correlation.
//!
//! A label assigns `+1` or `-1` to every representative direction, with
//! `f(-n) = -f(n)` fixing the value on antipodes. Its amplitude is the pure
//! vector quaternion `sum_k w_k f(n_k) N(n_k)`, `N(n) = n_x i + n_y j + n_z k`.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Largest direction count for which the label space is enumerated.
pub const MAX_ENUMERATED_DIRECTIONS: usize = 16;
/// Two directions closer than this (in cross-product norm) are treated as parallel.
pub const PARALLEL_TOL: f64 = 1e-9;
pub const UNIT_TOL: f64 = 1e-12;
/// Cosines this close to `+-1` are snapped so that sampling is exact.
pub const COSINE_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// `N(n)` for a 3-vector.
    pub const fn pure(v: [f64; 3]) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionScheme {
    FibonacciHemisphere,
    RandomHemisphere,
}

/// Representatives of the direction pairs `{n, -n}` with their weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    directions: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl DirectionSet {
    /// Equal weights `1/K`. Inputs are normalized.
    pub fn new(directions: Vec<[f64; 3]>) -> Result<Self> {
        let k = directions.len();
        Self::with_weights(directions, vec![1.0 / k.max(1) as f64; k])
    }

    pub fn with_weights(directions: Vec<[f64; 3]>, weights: Vec<f64>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidArgument("direction set is empty".into()));
        }
        if directions.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: directions.len(), found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidArgument("direction weights must be positive".into()));
        }
        let mut unit = Vec::with_capacity(directions.len());
        for d in directions {
            let n = norm(d);
            if !n.is_finite() || n < UNIT_TOL {
                return Err(Error::InvalidArgument(format!("direction {d:?} has no length")));
            }
            unit.push([d[0] / n, d[1] / n, d[2] / n]);
        }
        for a in 0..unit.len() {
            for b in a + 1..unit.len() {
                if norm(cross(unit[a], unit[b])) < PARALLEL_TOL {
                    return Err(Error::InvalidArgument(format!("directions {a} and {b} are parallel or antiparallel")));
                }
            }
        }
        Ok(Self { directions: unit, weights })
    }

    /// `K` directions on the open upper hemisphere.
    pub fn generate(k: usize, scheme: DirectionScheme, seed: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("need at least one direction".into()));
        }
        let dirs = match scheme {
            DirectionScheme::FibonacciHemisphere => {
                let golden = PI * (3.0 - 5f64.sqrt());
                (0..k)
                    .map(|i| {
                        let z = 1.0 - (i as f64 + 0.5) / k as f64;
                        let r = (1.0 - z * z).sqrt();
                        let phi = golden * i as f64;
                        [r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            }
            DirectionScheme::RandomHemisphere => {
                let mut g = rng::stream(seed, 0);
                (0..k)
                    .map(|_| {
                        let z: f64 = 1.0 - g.random::<f64>();
                        let phi = 2.0 * PI * g.random::<f64>();
                        let r = (1.0 - z * z).sqrt();
                        [r * phi.cos(), r * phi.sin(), z]
                    })
                    .collect()
            }
        };
        Self::new(dirs)
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest angle in degrees between any two of the lines `{n, -n}`.
    pub fn min_line_angle_deg(&self) -> f64 {
        let mut best = 90.0_f64;
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let c = dot(self.directions[a], self.directions[b]).abs().min(1.0);
                best = best.min(c.acos().to_degrees());
            }
        }
        best
    }
}

/// Shorthand for [`DirectionSet::generate`].
pub fn sphere_directions(k: usize, scheme: DirectionScheme, seed: u64) -> Result<DirectionSet> {
    DirectionSet::generate(k, scheme, seed)
}

/// Sign of the label on each representative direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinLabel {
    signs: Vec<i8>,
}

impl SpinLabel {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidArgument("label signs must be +1 or -1".into()));
        }
        Ok(Self { signs })
    }

    /// Bit `k` of `bits` set means `f(n_k) = -1`.
    pub fn from_bits(k: usize, bits: u64) -> Self {
        Self { signs: (0..k).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect() }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn value(&self, d: DirectionRef) -> i8 {
        let s = self.signs[d.index];
        if d.antipode {
            -s
        } else {
            s
        }
    }

    pub fn flipped(&self) -> Self {
        Self { signs: self.signs.iter().map(|s| -s).collect() }
    }
}

/// A direction `n_index` or its antipode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionRef {
    pub index: usize,
    pub antipode: bool,
}

impl DirectionRef {
    pub fn vector(self, dirs: &DirectionSet) -> [f64; 3] {
        let v = dirs.directions[self.index];
        if self.antipode {
            [-v[0], -v[1], -v[2]]
        } else {
            v
        }
    }
}

pub fn spin_amplitude(label: &SpinLabel, dirs: &DirectionSet) -> Result<Quaternion> {
    if label.signs.len() != dirs.len() {
        return Err(Error::DimensionMismatch { expected: dirs.len(), found: label.signs.len() });
    }
    Ok(amplitude_of(&label.signs, dirs))
}

fn amplitude_of(signs: &[i8], dirs: &DirectionSet) -> Quaternion {
    let mut acc = Quaternion::default();
    for ((s, n), w) in signs.iter().zip(&dirs.directions).zip(&dirs.weights) {
        let term = Quaternion::pure(*n).scale(*w);
        acc += if *s < 0 { -term } else { term };
    }
    acc
}

/// All labels with `f(n_0) = +1`, normalized by `|Psi(f)|^2`.
pub fn conditional_ensemble(n0: usize, dirs: &DirectionSet) -> Result<Vec<(SpinLabel, f64)>> {
    let k = dirs.len();
    if k > MAX_ENUMERATED_DIRECTIONS {
        return Err(Error::TooManyDirections(k));
    }
    if n0 >= k {
        return Err(Error::InvalidArgument(format!("direction index {n0} out of range")));
    }
    let mut out: Vec<(SpinLabel, f64)> = (0..1u64 << k)
        .filter(|bits| bits >> n0 & 1 == 0)
        .map(|bits| {
            let label = SpinLabel::from_bits(k, bits);
            let w = amplitude_of(&label.signs, dirs).norm_sqr();
            (label, w)
        })
        .collect();
    let total: f64 = out.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::AllZeroAmplitudes);
    }
    out.iter_mut().for_each(|(_, w)| *w /= total);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionConditional {
    pub theta_deg: f64,
    pub label_conditional: f64,
    pub quantum_conditional: f64,
    pub deviation: f64,
}

/// `P(f(m) = +1 | f(n_0) = +1)` next to `cos^2(theta/2)`.
pub fn direction_conditional(n0: usize, m: DirectionRef, dirs: &DirectionSet) -> Result<DirectionConditional> {
    let ensemble = conditional_ensemble(n0, dirs)?;
    conditional_from_ensemble(&ensemble, n0, m, dirs)
}

fn conditional_from_ensemble(
    ensemble: &[(SpinLabel, f64)],
    n0: usize,
    m: DirectionRef,
    dirs: &DirectionSet,
) -> Result<DirectionConditional> {
    if m.index >= dirs.len() {
        return Err(Error::InvalidArgument(format!("direction index {} out of range", m.index)));
    }
    let hit: f64 = ensemble.iter().filter(|(f, _)| f.value(m) == 1).map(|(_, w)| w).sum();
    let total: f64 = ensemble.iter().map(|(_, w)| w).sum();
    let label_conditional = hit / total;
    let c = dot(dirs.directions[n0], m.vector(dirs)).clamp(-1.0, 1.0);
    let theta = c.acos();
    let quantum_conditional = (theta / 2.0).cos().powi(2);
    Ok(DirectionConditional {
        theta_deg: theta.to_degrees(),
        label_conditional,
        quantum_conditional,
        deviation: label_conditional - quantum_conditional,
    })
}

/// Conditionals from `n_0 = 0` to every direction and every antipode of the
/// Fibonacci set with `K` directions, sorted by angle.
pub fn deviation_sweep(k: usize) -> Result<Vec<DirectionConditional>> {
    let dirs = DirectionSet::generate(k, DirectionScheme::FibonacciHemisphere, 0)?;
    let ensemble = conditional_ensemble(0, &dirs)?;
    let mut rows = Vec::with_capacity(2 * k);
    for index in 0..k {
        for antipode in [false, true] {
            rows.push(conditional_from_ensemble(&ensemble, 0, DirectionRef { index, antipode }, &dirs)?);
        }
    }
    rows.sort_by(|a, b| a.theta_deg.total_cmp(&b.theta_deg));
    Ok(rows)
}

/// Empirical singlet correlation between measurement directions `n` and `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingletEstimate {
    pub n_samples: u64,
    pub seed: u64,
    pub correlation: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// `-n.m`
    pub analytic: f64,
}

/// Draws `s = +-1` uniformly and `t` with `P(t | s) = (1 - s t n.m) / 2`.
pub fn singlet_sample(n: [f64; 3], m: [f64; 3], n_samples: u64, seed: u64) -> Result<SingletEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let (nn, nm) = (norm(n), norm(m));
    if !(nn > UNIT_TOL && nm > UNIT_TOL) {
        return Err(Error::InvalidArgument("measurement directions must be nonzero".into()));
    }
    let mut c = dot(n, m) / (nn * nm);
    if c > 1.0 - COSINE_SNAP {
        c = 1.0;
    } else if c < -1.0 + COSINE_SNAP {
        c = -1.0;
    }
    let chunks = rng::map_chunks(n_samples as usize, seed, |g, len| {
        let (mut st, mut ss, mut tt) = (0i64, 0i64, 0i64);
        for _ in 0..len {
            let s: i64 = if g.random::<bool>() { 1 } else { -1 };
            let p_plus = 0.5 * (1.0 - s as f64 * c);
            let t: i64 = if g.random::<f64>() < p_plus { 1 } else { -1 };
            st += s * t;
            ss += s;
            tt += t;
        }
        (st, ss, tt)
    });
    let (st, ss, tt) = chunks.into_iter().fold((0i64, 0i64, 0i64), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let total = n_samples as f64;
    Ok(SingletEstimate {
        n_samples,
        seed,
        correlation: st as f64 / total,
        mean_a: ss as f64 / total,
        mean_b: tt as f64 / total,
        analytic: -c,
    })
}

/// Unit vector in the x-z plane at `theta_deg` from +z.
pub fn direction_in_xz(theta_deg: f64) -> [f64; 3] {
    let t = theta_deg.to_radians();
    [t.sin(), 0.0, t.cos()]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_units() {
        let q = Quaternion::I;
        assert_eq!(q * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(q * q, -Quaternion::ONE);
        assert_eq!(Quaternion::I * Quaternion::J * Quaternion::K, -Quaternion::ONE);
    }

    #[test]
    fn flip_negates_amplitude_exactly() {
        let dirs = DirectionSet::generate(6, DirectionScheme::FibonacciHemisphere, 0).unwrap();
        for bits in 0..64 {
            let f = SpinLabel::from_bits(6, bits);
            let a = spin_amplitude(&f, &dirs).unwrap();
            let b = spin_amplitude(&f.flipped(), &dirs).unwrap();
            assert_eq!(a, -b);
            assert_eq!(a.w, 0.0);
        }
    }

    #[test]
    fn single_direction() {
        let dirs = DirectionSet::generate(1, DirectionScheme::FibonacciHemisphere, 0).unwrap();
        let ens = conditional_ensemble(0, &dirs).unwrap();
        assert_eq!(ens.len(), 1);
        assert_eq!(ens[0].1, 1.0);
    }

    #[test]
    fn parallel_rejected() {
        assert!(DirectionSet::new(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -2.0]]).is_err());
        assert!(DirectionSet::new(vec![[0.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn too_many_for_enumeration() {
        let dirs = DirectionSet::generate(17, DirectionScheme::FibonacciHemisphere, 0).unwrap();
        assert!(matches!(conditional_ensemble(0, &dirs), Err(Error::TooManyDirections(17))));
    }

    #[test]
    fn self_and_antipode() {
        let dirs = DirectionSet::generate(5, DirectionScheme::RandomHemisphere, 9).unwrap();
        let same = direction_conditional(2, DirectionRef { index: 2, antipode: false }, &dirs).unwrap();
        let anti = direction_conditional(2, DirectionRef { index: 2, antipode: true }, &dirs).unwrap();
        assert_eq!(same.label_conditional, 1.0);
        assert_eq!(anti.label_conditional, 0.0);
    }

    #[test]
    fn singlet_exact_at_antiparallel() {
        let n = direction_in_xz(0.0);
        let est = singlet_sample(n, [-n[0], -n[1], -n[2]], 10_000, 1).unwrap();
        assert_eq!(est.correlation, 1.0);
        let est = singlet_sample(n, n, 10_000, 1).unwrap();
        assert_eq!(est.correlation, -1.0);
    }
}
