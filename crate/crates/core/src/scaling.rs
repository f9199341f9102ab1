//! Entropy profiles and the fits that read scaling laws off them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::xy_exact::{self, XyModel};

/// One `(L, S_L)` sample, entropy in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub l: usize,
    pub s: f64,
}

/// Block entropy as a function of block length for one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyProfile {
    label: String,
    points: Vec<ProfilePoint>,
}

impl EntropyProfile {
    /// `points` must have strictly increasing `L` and non-negative `S`.
    pub fn new(label: impl Into<String>, points: Vec<ProfilePoint>) -> Result<Self> {
        if let Some(w) = points.windows(2).find(|w| w[1].l <= w[0].l) {
            return Err(Error::InvalidParameter(format!(
                "profile block lengths must increase strictly ({} then {})",
                w[0].l, w[1].l
            )));
        }
        if let Some(p) = points.iter().find(|p| !(p.s >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "negative entropy {} at L = {}",
                p.s, p.l
            )));
        }
        Ok(EntropyProfile {
            label: label.into(),
            points,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn entropy_at(&self, l: usize) -> Option<f64> {
        self.points
            .binary_search_by_key(&l, |p| p.l)
            .ok()
            .map(|i| self.points[i].s)
    }

    /// Same samples with `offset` added to every entropy.
    pub fn shifted(&self, offset: f64) -> Result<Self> {
        let points = self
            .points
            .iter()
            .map(|p| ProfilePoint {
                l: p.l,
                s: p.s + offset,
            })
            .collect();
        EntropyProfile::new(self.label.clone(), points)
    }
}

/// Least-squares line `S = slope · log₂ L + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// `6 · slope`, the estimate of `c + c̄`.
    pub central_charge_sum: f64,
    pub rms_residual: f64,
    pub window: (usize, usize),
}

/// Default fit window `[L_max/4, L_max]`.
pub fn default_window(profile: &EntropyProfile) -> (usize, usize) {
    let l_max = profile.points.last().map_or(0, |p| p.l);
    ((l_max / 4).max(1), l_max)
}

/// Ordinary least squares of `S` against `log₂ L` over `window` (inclusive).
pub fn fit_central_charge(profile: &EntropyProfile, window: (usize, usize)) -> Result<ScalingFit> {
    let (lmin, lmax) = window;
    let samples: Vec<(f64, f64)> = profile
        .points
        .iter()
        .filter(|p| p.l >= lmin && p.l <= lmax)
        .map(|p| ((p.l as f64).log2(), p.s))
        .collect();
    if samples.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            found: samples.len(),
            lmin,
            lmax,
        });
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_x).powi(2)).sum();
    let sxy: f64 = samples
        .iter()
        .map(|s| (s.0 - mean_x) * (s.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = samples
        .iter()
        .map(|s| (s.1 - slope * s.0 - intercept).powi(2))
        .sum();
    Ok(ScalingFit {
        slope,
        intercept,
        central_charge_sum: 6.0 * slope,
        rms_residual: (rss / n).sqrt(),
        window,
    })
}

pub const DEFAULT_SATURATION_INCREMENT: f64 = 1e-4;
pub const DEFAULT_SATURATION_DELTA: f64 = 0.01;

/// Where a profile stops growing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaturationEstimate {
    pub s_max: f64,
    /// Smallest `L` with `S_L ≥ S_max - delta`.
    pub entanglement_length: usize,
    /// Both of the last two increments are below the threshold.
    pub converged: bool,
}

pub fn saturation_analysis(
    profile: &EntropyProfile,
    eps_inc: f64,
    delta: f64,
) -> Result<SaturationEstimate> {
    let pts = &profile.points;
    let last = pts
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty profile".into()))?;
    let s_max = last.s;
    let converged = match pts.len() {
        0 => unreachable!(),
        1 => true,
        2 => (pts[1].s - pts[0].s).abs() < eps_inc,
        n => pts[n - 3..]
            .windows(2)
            .all(|w| (w[1].s - w[0].s).abs() < eps_inc),
    };
    let entanglement_length = pts
        .iter()
        .find(|p| p.s >= s_max - delta)
        .map_or(last.l, |p| p.l);
    Ok(SaturationEstimate {
        s_max,
        entanglement_length,
        converged,
    })
}

/// `S_L(γ = 1) - S_L(γ)` at `a = 1`, evaluated at `L = l_max`.
///
/// Both profiles grow with the same slope, so the difference tends to a
/// constant; the value at `l_max` is taken as its estimate.
pub fn gamma_subleading(gamma: f64, l_max: usize) -> Result<f64> {
    if gamma == 0.0 {
        return Err(Error::InvalidParameter(
            "gamma = 0 is the XX chain, a different universality class".into(),
        ));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if l_max < 50 {
        return Err(Error::InvalidParameter(format!(
            "l_max must be >= 50, got {l_max}"
        )));
    }
    let entropy = |g: f64| -> Result<f64> {
        let nu = xy_exact::block_modes(&XyModel::new(1.0, g)?, l_max, xy_exact::DEFAULT_TOL)?;
        Ok(xy_exact::block_entropy(&nu))
    };
    if gamma == 1.0 {
        return Ok(0.0);
    }
    Ok(entropy(1.0)? - entropy(gamma)?)
}

/// Mean over the window of `(S^a_{L+1} - S^a_L) / (S^b_{L+1} - S^b_L)`,
/// for every `L` with `L` and `L+1` inside the window and in both profiles.
pub fn increment_ratio(
    profile_a: &EntropyProfile,
    profile_b: &EntropyProfile,
    window: (usize, usize),
) -> Result<f64> {
    let (lmin, lmax) = window;
    let mut ratios = Vec::new();
    for l in lmin..lmax {
        let (Some(a0), Some(a1), Some(b0), Some(b1)) = (
            profile_a.entropy_at(l),
            profile_a.entropy_at(l + 1),
            profile_b.entropy_at(l),
            profile_b.entropy_at(l + 1),
        ) else {
            return Err(Error::InvalidParameter(format!(
                "profiles lack a common grid point at L = {l} or {}",
                l + 1
            )));
        };
        let denominator = b1 - b0;
        if denominator.abs() < 1e-14 {
            return Err(Error::VanishingIncrement { l });
        }
        ratios.push((a1 - a0) / denominator);
    }
    if ratios.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: 0,
            lmin,
            lmax,
        });
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}
