//! Infinite XY chain: block entropies from the Majorana correlation matrix.
//!
//! The Hamiltonian is
//! `H = -Σ_l [ (a/2)((1+γ) σˣ_l σˣ_{l+1} + (1-γ) σʸ_l σʸ_{l+1}) + σᶻ_l ]`,
//! stored through the inverse coupling `h = 1/a` so that the field-free XX
//! chain (`a → ∞`) is the ordinary value `h = 0`.
//!
//! The ground state is Gaussian in the Majorana operators, so a block of `L`
//! spins is fully described by the `2L × 2L` antisymmetric matrix `B_L` of
//! second moments. Its canonical-form values `ν_m` give `L` independent
//! fermionic modes with occupations `(1 + ν_m)/2`, and the block entropy is
//! the sum of their binary entropies.

use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::{self, Options};
use crate::scaling::{EntropyProfile, ProfilePoint};
use crate::spectra::binary_entropy;

/// Default absolute tolerance for the coupling coefficients.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Hard cap on integrand evaluations per coefficient.
pub const MAX_EVALUATIONS: usize = 1 << 22;

/// Pre-clamp slack allowed on mode occupations.
pub const NU_SLACK: f64 = 1e-8;

/// Parameters of the XY chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XyModel {
    h: f64,
    gamma: f64,
}

impl XyModel {
    /// `h = 1/a` is the inverse coupling, `gamma` the anisotropy.
    pub fn new(h: f64, gamma: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inverse coupling h must be finite and >= 0, got {h}"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "anisotropy gamma must lie in [0, 1], got {gamma}"
            )));
        }
        Ok(XyModel { h, gamma })
    }

    /// Builds the model from the coupling `a`; `a = ∞` is allowed.
    pub fn from_coupling(a: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling a must be > 0, got {a}"
            )));
        }
        XyModel::new(1.0 / a, gamma)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The coupling `a = 1/h` (infinite at `h = 0`).
    pub fn a(&self) -> f64 {
        1.0 / self.h
    }

    /// Critical lines: the Ising-like line `h = 1, γ > 0` and the XX segment
    /// `γ = 0, h ≤ 1`.
    pub fn is_critical(&self) -> bool {
        (self.h == 1.0 && self.gamma > 0.0) || (self.gamma == 0.0 && self.h <= 1.0)
    }

    pub fn label(&self) -> String {
        format!("xy h={} gamma={}", self.h, self.gamma)
    }
}

/// The coefficients `g_l` for lags `-max_lag..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSequence {
    max_lag: usize,
    values: Vec<f64>,
    achieved_tolerance: f64,
}

impl CouplingSequence {
    /// Builds a sequence from `values[k] = g_{k - max_lag}`.
    pub fn from_values(values: Vec<f64>, achieved_tolerance: f64) -> Result<Self> {
        if values.len() % 2 != 1 {
            return Err(Error::Dimension(format!(
                "coupling sequence needs an odd number of lags, got {}",
                values.len()
            )));
        }
        Ok(CouplingSequence {
            max_lag: values.len() / 2,
            values,
            achieved_tolerance,
        })
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    /// `g_l`; panics if `|l| > max_lag`.
    pub fn get(&self, l: i64) -> f64 {
        let idx = l + self.max_lag as i64;
        assert!(
            idx >= 0 && (idx as usize) < self.values.len(),
            "lag {l} outside ±{}",
            self.max_lag
        );
        self.values[idx as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn achieved_tolerance(&self) -> f64 {
        self.achieved_tolerance
    }
}

/// `g_l` with the closed-form overrides applied where the integrand is
/// discontinuous or singular (`γ = 0`, and the critical Ising point).
pub fn coupling_coefficients(
    model: &XyModel,
    max_lag: usize,
    tol: f64,
) -> Result<CouplingSequence> {
    check_tol(tol)?;
    match analytic_coefficients(model, max_lag) {
        Some(seq) => Ok(seq),
        None => quadrature_coefficients(model, max_lag, tol),
    }
}

/// Closed forms, when the model has one:
/// `γ = 0`: `g_0 = 2φ/π - 1`, `g_l = 2 sin(lφ)/(lπ)` with `φ = arccos(min(h, 1))`;
/// `h = 1, γ = 1`: `g_l = -2/(π(2l+1))`.
pub fn analytic_coefficients(model: &XyModel, max_lag: usize) -> Option<CouplingSequence> {
    let lags = -(max_lag as i64)..=(max_lag as i64);
    let values: Vec<f64> = if model.gamma == 0.0 {
        let phi = model.h.min(1.0).acos();
        lags.map(|l| {
            if l == 0 {
                2.0 * phi / PI - 1.0
            } else {
                2.0 * (l as f64 * phi).sin() / (l as f64 * PI)
            }
        })
        .collect()
    } else if model.h == 1.0 && model.gamma == 1.0 {
        lags.map(|l| -2.0 / (PI * (2 * l + 1) as f64)).collect()
    } else {
        return None;
    };
    Some(CouplingSequence {
        max_lag,
        values,
        achieved_tolerance: 0.0,
    })
}

/// `g_l` by adaptive quadrature of
/// `(1/2π) ∫₀^{2π} e^{-ilφ} (cos φ - h - iγ sin φ)/|cos φ - h - iγ sin φ| dφ`,
/// with no closed-form shortcuts.
pub fn quadrature_coefficients(
    model: &XyModel,
    max_lag: usize,
    tol: f64,
) -> Result<CouplingSequence> {
    check_tol(tol)?;
    let lags: Vec<i64> = (-(max_lag as i64)..=(max_lag as i64)).collect();
    let results: Vec<(f64, f64)> = lags
        .par_iter()
        .map(|&l| coefficient_by_quadrature(model, l, tol))
        .collect::<Result<_>>()?;
    let achieved = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(CouplingSequence {
        max_lag,
        values: results.into_iter().map(|r| r.0).collect(),
        achieved_tolerance: achieved,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "tolerance must be > 0, got {tol}"
        )))
    }
}

/// Returns `(g_l, achieved)` where `achieved` bounds both the quadrature
/// error estimate and the imaginary residue.
fn coefficient_by_quadrature(model: &XyModel, lag: i64, tol: f64) -> Result<(f64, f64)> {
    let (h, gamma) = (model.h, model.gamma);
    let singular_at = Cell::new(None);
    let integrand = |phi: f64| {
        let re = phi.cos() - h;
        let im = -gamma * phi.sin();
        let modulus = re.hypot(im);
        if modulus == 0.0 {
            singular_at.set(Some(phi));
            return [0.0, 0.0];
        }
        let (s, c) = (lag as f64 * phi).sin_cos();
        // e^{-ilφ} (re + i im) / |.|
        let scale = 1.0 / (2.0 * PI * modulus);
        [(c * re + s * im) * scale, (c * im - s * re) * scale]
    };

    let mut breakpoints = Vec::new();
    if h < 1.0 {
        let phi_a = h.acos();
        breakpoints.extend([phi_a, 2.0 * PI - phi_a]);
    }
    breakpoints.push(PI);
    let opts = Options {
        tol,
        max_evals: MAX_EVALUATIONS,
        initial_panels: 4 + lag.unsigned_abs() as usize / 2,
    };
    let outcome = quadrature::integrate(integrand, 0.0, 2.0 * PI, &breakpoints, opts);
    if let Some(phi) = singular_at.get() {
        return Err(Error::NumericalSingularity { lag, phi });
    }
    match outcome {
        Ok(est) => {
            let achieved = est.error.max(est.value[1].abs());
            if est.value[1].abs() > tol {
                return Err(Error::ToleranceNotMet {
                    lag,
                    requested: tol,
                    achieved,
                    evaluations: est.evaluations,
                });
            }
            Ok((est.value[0], achieved))
        }
        Err(failed) => Err(Error::ToleranceNotMet {
            lag,
            requested: tol,
            achieved: failed.partial.error,
            evaluations: failed.partial.evaluations,
        }),
    }
}

/// The `2L × 2L` block-Toeplitz matrix `B_L` with 2×2 blocks
/// `Π_l = [[0, g_l], [-g_{-l}, 0]]` at block position `(j, k)`, `l = k - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCorrelationMatrix {
    l: usize,
    entries: DMatrix<f64>,
}

impl BlockCorrelationMatrix {
    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The `L × L` matrix `G[j][k] = g_{k-j}` of even-row, odd-column
    /// entries. Every other entry of `B_L` is either zero or fixed by
    /// antisymmetry, so the singular values of `G` are the `ν_m`.
    fn coupling_block(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.l, self.l, |j, k| self.entries[(2 * j, 2 * k + 1)])
    }
}

pub fn block_correlation(g: &CouplingSequence, l: usize) -> Result<BlockCorrelationMatrix> {
    if l == 0 {
        return Err(Error::Dimension("block length must be >= 1".into()));
    }
    if l > g.max_lag + 1 {
        return Err(Error::Dimension(format!(
            "block of {l} spins needs lags up to {}, sequence has {}",
            l - 1,
            g.max_lag
        )));
    }
    let mut entries = DMatrix::zeros(2 * l, 2 * l);
    for j in 0..l {
        for k in 0..l {
            let lag = k as i64 - j as i64;
            entries[(2 * j, 2 * k + 1)] = g.get(lag);
            entries[(2 * j + 1, 2 * k)] = -g.get(-lag);
        }
    }
    Ok(BlockCorrelationMatrix { l, entries })
}

/// Canonical-form values `ν_m ∈ [0, 1]`, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOccupations {
    nu: Vec<f64>,
}

impl ModeOccupations {
    /// Validates, clamps within [`NU_SLACK`] and sorts.
    pub fn new(mut nu: Vec<f64>) -> Result<Self> {
        for v in nu.iter_mut() {
            if !v.is_finite() || *v < -NU_SLACK || *v > 1.0 + NU_SLACK {
                return Err(Error::InvalidCorrelationMatrix { value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        nu.sort_by(|a, b| b.total_cmp(a));
        Ok(ModeOccupations { nu })
    }

    pub fn values(&self) -> &[f64] {
        &self.nu
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }
}

pub fn mode_occupations(b: &BlockCorrelationMatrix) -> Result<ModeOccupations> {
    let g = b.coupling_block();
    let svd = g
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenSolver(format!("SVD of {0}x{0} block failed", b.l)))?;
    ModeOccupations::new(svd.singular_values.iter().copied().collect())
}

/// `S = Σ_m H₂((1 + ν_m)/2)` in bits.
pub fn block_entropy(nu: &ModeOccupations) -> f64 {
    nu.values()
        .iter()
        .map(|&v| binary_entropy((1.0 + v) / 2.0).expect("occupation in [0, 1]"))
        .sum()
}

/// Mode occupations of the `L`-spin block, computing `g` from scratch.
pub fn block_modes(model: &XyModel, l: usize, tol: f64) -> Result<ModeOccupations> {
    if l == 0 {
        return Err(Error::Dimension("block length must be >= 1".into()));
    }
    let g = coupling_coefficients(model, l - 1, tol)?;
    mode_occupations(&block_correlation(&g, l)?)
}

/// `(L, S_L)` for `L = 1..=l_max`, sharing one coupling sequence.
pub fn entropy_profile(model: &XyModel, l_max: usize, tol: f64) -> Result<EntropyProfile> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be >= 1".into()));
    }
    let g = coupling_coefficients(model, l_max - 1, tol)?;
    let points = (1..=l_max)
        .into_par_iter()
        .map(|l| {
            let nu = mode_occupations(&block_correlation(&g, l)?)?;
            Ok(ProfilePoint {
                l,
                s: block_entropy(&nu),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EntropyProfile::new(model.label(), points)
}

/// Above this `|1 - a|` the half-chain formula is only a rough guide.
pub const HALF_CHAIN_VALIDITY: f64 = 0.25;

/// Near-critical saturation entropy of the Ising chain,
/// `(1/6) log₂(1/|1 - a|)`, with `a = 1/h`. Only `γ = 1` is accepted.
///
/// The formula is an asymptotic statement as `a → 1`; see
/// [`half_chain_is_near_critical`] for where it is trustworthy. Values with
/// `|1 - a| > 1` are negative.
pub fn half_chain_entropy(model: &XyModel) -> Result<f64> {
    if model.gamma != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "half-chain entropy is defined for the Ising chain (gamma = 1), got gamma = {}",
            model.gamma
        )));
    }
    if model.h == 0.0 {
        return Err(Error::InvalidParameter(
            "half-chain entropy needs a finite coupling a (h > 0)".into(),
        ));
    }
    let distance = (1.0 - model.a()).abs();
    if distance == 0.0 {
        return Err(Error::Divergent(
            "half-chain entropy is infinite at the critical point a = 1".into(),
        ));
    }
    Ok((1.0 / distance).log2() / 6.0)
}

pub fn half_chain_is_near_critical(model: &XyModel) -> bool {
    (1.0 - model.a()).abs() <= HALF_CHAIN_VALIDITY
}
