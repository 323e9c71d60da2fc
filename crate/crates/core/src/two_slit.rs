//! Two-slit screen patterns with slit tags.
//!
//! The slits sit at `(-d/2, 0)` and `(+d/2, 0)`, the screen is the line
//! `y = D` sampled at `screen_points` evenly spaced positions. The amplitude
//! from slit `s` at pixel `r` is `a_s exp(2 pi i (d_s - D) / lambda) / d_s`;
//! the common phase `exp(2 pi i D / lambda)` is dropped.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::sampler;
use crate::rng;

/// Pixels with `|Psi_L|^2 + |Psi_R|^2` below this have no slit conditional.
pub const DARK_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlitGeometry {
    pub wavelength: f64,
    pub slit_separation: f64,
    pub screen_distance: f64,
    pub screen_halfwidth: f64,
    pub screen_points: usize,
    /// `[re, im]`
    pub amplitude_l: [f64; 2],
    pub amplitude_r: [f64; 2],
}

impl Default for SlitGeometry {
    fn default() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            wavelength: 500e-9,
            slit_separation: 50e-6,
            screen_distance: 1.0,
            screen_halfwidth: 0.05,
            screen_points: 101,
            amplitude_l: [a, 0.0],
            amplitude_r: [a, 0.0],
        }
    }
}

impl SlitGeometry {
    pub fn amplitude_l(&self) -> C64 {
        C64::new(self.amplitude_l[0], self.amplitude_l[1])
    }

    pub fn amplitude_r(&self) -> C64 {
        C64::new(self.amplitude_r[0], self.amplitude_r[1])
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("slit_separation", self.slit_separation),
            ("screen_distance", self.screen_distance),
            ("screen_halfwidth", self.screen_halfwidth),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::DegenerateGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        if self.screen_points < 2 {
            return Err(Error::DegenerateGeometry("screen_points must be at least 2".into()));
        }
        let norm_sq = self.amplitude_l().norm_sqr() + self.amplitude_r().norm_sqr();
        if norm_sq == 0.0 {
            return Err(Error::AllZeroAmplitudes);
        }
        if (norm_sq - 1.0).abs() > crate::hilbert::NORM_TOL {
            return Err(Error::NotNormalized { norm: norm_sq.sqrt() });
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<f64> {
        let n = self.screen_points;
        let step = 2.0 * self.screen_halfwidth / (n - 1) as f64;
        (0..n)
            .map(|i| {
                // mirror so that the grid is exactly symmetric about 0
                let k = i as f64 - (n - 1) as f64 / 2.0;
                k * step
            })
            .collect()
    }

    /// `d_R - d_L` at screen position `x`.
    pub fn path_difference(&self, x: f64) -> f64 {
        let (dl, dr) = (self.distance(x, -0.5 * self.slit_separation), self.distance(x, 0.5 * self.slit_separation));
        dr - dl
    }

    fn distance(&self, x: f64, slit_x: f64) -> f64 {
        (x - slit_x).hypot(self.screen_distance)
    }

    /// `d - D`, computed without cancellation.
    fn excess(&self, x: f64, slit_x: f64) -> f64 {
        let u = x - slit_x;
        u * u / (self.distance(x, slit_x) + self.screen_distance)
    }
}

/// Jointly normalized slit amplitudes on the screen.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitAmplitudes {
    pub positions: Vec<f64>,
    pub psi_l: Vec<C64>,
    pub psi_r: Vec<C64>,
}

pub fn slit_amplitudes(geometry: &SlitGeometry) -> Result<SlitAmplitudes> {
    geometry.validate()?;
    let positions = geometry.positions();
    let wave = |x: f64, slit_x: f64, a: C64| {
        let phase = 2.0 * std::f64::consts::PI * geometry.excess(x, slit_x) / geometry.wavelength;
        a * C64::from_polar(1.0, phase) / geometry.distance(x, slit_x)
    };
    let half = 0.5 * geometry.slit_separation;
    let mut psi_l: Vec<C64> = positions.iter().map(|&x| wave(x, -half, geometry.amplitude_l())).collect();
    let mut psi_r: Vec<C64> = positions.iter().map(|&x| wave(x, half, geometry.amplitude_r())).collect();
    let total: f64 = psi_l.iter().chain(&psi_r).map(|z| z.norm_sqr()).sum();
    let scale = 1.0 / total.sqrt();
    psi_l.iter_mut().chain(psi_r.iter_mut()).for_each(|z| *z *= scale);
    Ok(SlitAmplitudes { positions, psi_l, psi_r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenSemantics {
    /// Labels carried by the particles: `|Psi_L + Psi_R|^2`.
    Label,
    /// Which-slit record: `|Psi_L|^2 + |Psi_R|^2`.
    Orthodox,
}

impl ScreenSemantics {
    pub fn name(self) -> &'static str {
        match self {
            Self::Label => "label",
            Self::Orthodox => "orthodox",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPattern {
    pub semantics: ScreenSemantics,
    pub positions: Vec<f64>,
    pub intensity: Vec<f64>,
    /// Fringe contrast over the central fringe region.
    pub visibility: f64,
}

pub fn pattern(amps: &SlitAmplitudes, semantics: ScreenSemantics) -> ScreenPattern {
    let intensity = amps
        .psi_l
        .iter()
        .zip(&amps.psi_r)
        .map(|(l, r)| match semantics {
            ScreenSemantics::Label => (l + r).norm_sqr(),
            ScreenSemantics::Orthodox => l.norm_sqr() + r.norm_sqr(),
        })
        .collect();
    ScreenPattern { semantics, positions: amps.positions.clone(), intensity, visibility: visibility(amps, semantics) }
}

/// Pixels around the screen center within one fringe period, i.e. whose
/// unwrapped relative phase `arg(Psi_R conj(Psi_L))` stays within `pi` of the
/// central pixel.
pub fn central_fringe_region(amps: &SlitAmplitudes) -> Vec<usize> {
    let n = amps.positions.len();
    let center = (n - 1) / 2;
    let rel = |i: usize| amps.psi_r[i] * amps.psi_l[i].conj();
    let mut region = vec![center];
    for dir in [-1isize, 1] {
        let mut prev = rel(center);
        let mut unwrapped = 0.0;
        let mut i = center as isize + dir;
        while i >= 0 && (i as usize) < n {
            let cur = rel(i as usize);
            if cur.norm() == 0.0 || prev.norm() == 0.0 {
                break;
            }
            unwrapped += (cur * prev.conj()).arg();
            if unwrapped.abs() > std::f64::consts::PI {
                break;
            }
            region.push(i as usize);
            prev = cur;
            i += dir;
        }
    }
    region.sort_unstable();
    region
}

/// `(I_max - I_min) / (I_max + I_min)` where the extremes are the fringe
/// maximum and minimum intensities summed over the central fringe region. For
/// the label pattern these are `(|L| + |R|)^2` and `(|L| - |R|)^2`; the
/// orthodox pattern has no fringe so both equal `|L|^2 + |R|^2`.
pub fn visibility(amps: &SlitAmplitudes, semantics: ScreenSemantics) -> f64 {
    let region = central_fringe_region(amps);
    let (mut hi, mut lo) = (0.0, 0.0);
    for &i in &region {
        let (l, r) = (amps.psi_l[i].norm(), amps.psi_r[i].norm());
        match semantics {
            ScreenSemantics::Label => {
                hi += (l + r) * (l + r);
                lo += (l - r) * (l - r);
            }
            ScreenSemantics::Orthodox => {
                hi += l * l + r * r;
                lo += l * l + r * r;
            }
        }
    }
    if hi + lo == 0.0 {
        0.0
    } else {
        (hi - lo) / (hi + lo)
    }
}

/// `P(L | r)` and `P(R | r)` under the label semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitConditionals {
    pub p_l: Vec<f64>,
    pub p_r: Vec<f64>,
    /// False on dark pixels, where the conditionals are NaN.
    pub defined: Vec<bool>,
}

pub fn slit_conditionals(amps: &SlitAmplitudes) -> SlitConditionals {
    let n = amps.positions.len();
    let mut out = SlitConditionals { p_l: vec![f64::NAN; n], p_r: vec![f64::NAN; n], defined: vec![false; n] };
    for i in 0..n {
        let (l, r) = (amps.psi_l[i].norm_sqr(), amps.psi_r[i].norm_sqr());
        if l + r >= DARK_THRESHOLD {
            out.p_l[i] = l / (l + r);
            out.p_r[i] = r / (l + r);
            out.defined[i] = true;
        }
    }
    out
}

/// Sampled hits per pixel, split by the recorded slit tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSlitCounts {
    pub semantics: ScreenSemantics,
    pub n_samples: u64,
    pub seed: u64,
    pub counts_l: Vec<u64>,
    pub counts_r: Vec<u64>,
}

impl TwoSlitCounts {
    pub fn hits(&self, pixel: usize) -> u64 {
        self.counts_l[pixel] + self.counts_r[pixel]
    }
}

/// Samples `n` hits. `tag_fidelity` is the probability that the recorded tag
/// is the true one.
pub fn sample_twoslit(
    geometry: &SlitGeometry,
    semantics: ScreenSemantics,
    n: u64,
    seed: u64,
    tag_fidelity: f64,
) -> Result<TwoSlitCounts> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&tag_fidelity) {
        return Err(Error::InvalidArgument(format!("tag_fidelity {tag_fidelity} outside [0, 1]")));
    }
    let amps = slit_amplitudes(geometry)?;
    let pixels = amps.positions.len();
    let l2: Vec<f64> = amps.psi_l.iter().map(|z| z.norm_sqr()).collect();
    let r2: Vec<f64> = amps.psi_r.iter().map(|z| z.norm_sqr()).collect();
    let cond = slit_conditionals(&amps);
    let label_pixels = sampler(&pattern(&amps, ScreenSemantics::Label).intensity)?;
    let pl = geometry.amplitude_l().norm_sqr();
    let per_slit =
        [if pl > 0.0 { Some(sampler(&l2)?) } else { None }, if pl < 1.0 { Some(sampler(&r2)?) } else { None }];
    let chunks = rng::map_chunks(n as usize, seed, |g, len| {
        let mut cl = vec![0u64; pixels];
        let mut cr = vec![0u64; pixels];
        for _ in 0..len {
            let (pixel, left) = match semantics {
                ScreenSemantics::Label => {
                    let p = rand::distr::Distribution::sample(&label_pixels, g);
                    (p, g.random::<f64>() < cond.p_l[p])
                }
                ScreenSemantics::Orthodox => {
                    let left = g.random::<f64>() < pl;
                    let d = per_slit[if left { 0 } else { 1 }].as_ref().expect("chosen slit is open");
                    (rand::distr::Distribution::sample(d, g), left)
                }
            };
            let flip = g.random::<f64>() >= tag_fidelity;
            let recorded = left != flip;
            if recorded {
                cl[pixel] += 1;
            } else {
                cr[pixel] += 1;
            }
        }
        (cl, cr)
    });
    let mut counts_l = vec![0u64; pixels];
    let mut counts_r = vec![0u64; pixels];
    for (cl, cr) in chunks {
        for p in 0..pixels {
            counts_l[p] += cl[p];
            counts_r[p] += cr[p];
        }
    }
    Ok(TwoSlitCounts { semantics, n_samples: n, seed, counts_l, counts_r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_center_is_bright() {
        let g = SlitGeometry::default();
        let amps = slit_amplitudes(&g).unwrap();
        let c = (g.screen_points - 1) / 2;
        assert_eq!(amps.positions[c], 0.0);
        assert!((amps.psi_l[c] - amps.psi_r[c]).norm() < 1e-15);
        let p = pattern(&amps, ScreenSemantics::Label);
        assert!((p.visibility - 1.0).abs() < 1e-9);
        let o = pattern(&amps, ScreenSemantics::Orthodox);
        assert!(o.visibility.abs() < 1e-12);
    }

    #[test]
    fn joint_normalization() {
        let amps = slit_amplitudes(&SlitGeometry::default()).unwrap();
        let total: f64 = amps.psi_l.iter().chain(&amps.psi_r).map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_slit_has_no_fringes() {
        let g = SlitGeometry { amplitude_l: [1.0, 0.0], amplitude_r: [0.0, 0.0], ..Default::default() };
        let amps = slit_amplitudes(&g).unwrap();
        let label = pattern(&amps, ScreenSemantics::Label);
        let orth = pattern(&amps, ScreenSemantics::Orthodox);
        assert_eq!(label.intensity, orth.intensity);
        let cond = slit_conditionals(&amps);
        assert!(cond.p_l.iter().all(|p| *p == 1.0));
    }

    #[test]
    fn bad_geometry() {
        let g = SlitGeometry { wavelength: 0.0, ..Default::default() };
        assert!(matches!(slit_amplitudes(&g), Err(Error::DegenerateGeometry(_))));
        let g = SlitGeometry { amplitude_l: [0.0, 0.0], amplitude_r: [0.0, 0.0], ..Default::default() };
        assert!(matches!(slit_amplitudes(&g), Err(Error::AllZeroAmplitudes)));
    }
}
