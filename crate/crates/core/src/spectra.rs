//! Entropy functionals and reduced-density-matrix spectra.
//!
//! For a Gaussian block state with mode occupations `ν_m` the `2^L`
//! eigenvalues of `ρ_L` are the products `Π_m (1 ± ν_m)/2`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::xy_exact::ModeOccupations;

/// Largest block for which all `2^L` eigenvalues are enumerated.
pub const FULL_SPECTRUM_CAP: usize = 24;

/// Default slack for majorization partial sums.
pub const MAJORIZATION_TOL: f64 = 1e-10;

const NORMALIZATION_TOL: f64 = 1e-10;

/// `-x log₂ x - (1-x) log₂(1-x)`, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "binary entropy needs x in [0, 1], got {x}"
        )));
    }
    let x = x.clamp(0.0, 1.0);
    Ok(plogp(x) + plogp(1.0 - x))
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Eigenvalues of a density matrix, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilitySpectrum {
    probabilities: Vec<f64>,
    /// `false` when only the largest `k` eigenvalues are present.
    complete: bool,
}

impl ProbabilitySpectrum {
    /// A full spectrum. Entries within `1e-10` below zero are set to zero.
    pub fn complete(probabilities: Vec<f64>) -> Result<Self> {
        let spec = Self::checked(probabilities, true)?;
        let total = neumaier_sum(spec.probabilities.iter().copied());
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(spec)
    }

    /// The largest eigenvalues of some spectrum.
    pub fn prefix(probabilities: Vec<f64>) -> Result<Self> {
        let spec = Self::checked(probabilities, false)?;
        let total = neumaier_sum(spec.probabilities.iter().copied());
        if total > 1.0 + NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "prefix probabilities sum to {total} > 1"
            )));
        }
        Ok(spec)
    }

    fn checked(mut probabilities: Vec<f64>, complete: bool) -> Result<Self> {
        for p in probabilities.iter_mut() {
            if !(*p >= -NORMALIZATION_TOL && *p <= 1.0 + NORMALIZATION_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
            *p = p.clamp(0.0, 1.0);
        }
        probabilities.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(ProbabilitySpectrum {
            probabilities,
            complete,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// Von Neumann entropy in bits, `-Σ p log₂ p`.
pub fn shannon_entropy(spec: &ProbabilitySpectrum) -> Result<f64> {
    if !spec.complete {
        return Err(Error::IncompleteSpectrum("entropy"));
    }
    Ok(neumaier_sum(spec.probabilities.iter().map(|&p| plogp(p))).max(0.0))
}

fn mode_factors(nu: &ModeOccupations) -> Vec<[f64; 2]> {
    nu.values()
        .iter()
        .map(|&v| [(1.0 + v) / 2.0, (1.0 - v) / 2.0])
        .collect()
}

/// All `2^L` eigenvalues of `ρ_L`.
pub fn reduced_spectrum_full(nu: &ModeOccupations) -> Result<ProbabilitySpectrum> {
    let l = nu.len();
    if l > FULL_SPECTRUM_CAP {
        return Err(Error::EnumerationCap {
            l,
            cap: FULL_SPECTRUM_CAP,
        });
    }
    // Built so that every product is accumulated in mode order 0..L,
    // matching `assignment_probability`.
    let mut probs = Vec::with_capacity(1 << l);
    probs.push(1.0);
    for [up, down] in mode_factors(nu) {
        let n = probs.len();
        probs.extend_from_within(..n);
        for p in &mut probs[..n] {
            *p *= up;
        }
        for p in &mut probs[n..] {
            *p *= down;
        }
    }
    ProbabilitySpectrum::complete(probs)
}

fn assignment_probability(factors: &[[f64; 2]], flipped: &[u64]) -> f64 {
    let mut acc = 1.0;
    for (m, f) in factors.iter().enumerate() {
        let bit = (flipped[m / 64] >> (m % 64)) & 1;
        acc *= f[bit as usize];
    }
    acc
}

struct Candidate {
    value: f64,
    /// Position, in ratio order, of the last flipped mode.
    last: usize,
    flipped: Vec<u64>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.total_cmp(&other.value)
    }
}

/// The `k` largest eigenvalues of `ρ_L`, without enumerating all `2^L`.
///
/// Flipping mode `m` away from its likelier state multiplies a probability by
/// `r_m = (1-ν_m)/(1+ν_m) ≤ 1`. With modes ordered by decreasing `r`, every
/// set of flipped modes is reached exactly once from the empty set by
/// "append the next mode" or "replace the last mode by the next one", and
/// neither move increases the probability, so a max-heap pops them in
/// descending order.
pub fn reduced_spectrum_topk(nu: &ModeOccupations, k: usize) -> Result<ProbabilitySpectrum> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let l = nu.len();
    let total = if l < 63 { Some(1usize << l) } else { None };
    if total.is_some_and(|t| k >= t) {
        return reduced_spectrum_full(nu);
    }

    let factors = mode_factors(nu);
    // ν is sorted descending, so r is ascending in mode index; ratio order
    // position q is mode L-1-q.
    let mode_of = |q: usize| l - 1 - q;
    let words = l.div_ceil(64).max(1);
    let with_flip = |flipped: &[u64], q: usize| {
        let mut f = flipped.to_vec();
        let m = mode_of(q);
        f[m / 64] |= 1 << (m % 64);
        f
    };

    let mut out = Vec::with_capacity(k);
    let empty = vec![0u64; words];
    out.push(assignment_probability(&factors, &empty));
    let mut heap = BinaryHeap::new();
    if l > 0 {
        let flipped = with_flip(&empty, 0);
        heap.push(Candidate {
            value: assignment_probability(&factors, &flipped),
            last: 0,
            flipped,
        });
    }
    while out.len() < k {
        let Some(top) = heap.pop() else { break };
        out.push(top.value);
        let next = top.last + 1;
        if next < l {
            let appended = with_flip(&top.flipped, next);
            heap.push(Candidate {
                value: assignment_probability(&factors, &appended),
                last: next,
                flipped: appended,
            });
            let mut replaced = with_flip(&top.flipped, next);
            let m = mode_of(top.last);
            replaced[m / 64] &= !(1 << (m % 64));
            heap.push(Candidate {
                value: assignment_probability(&factors, &replaced),
                last: next,
                flipped: replaced,
            });
        }
    }
    ProbabilitySpectrum::prefix(out)
}

/// Outcome of testing `q ≺ p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub holds: bool,
    /// Largest excess of a partial sum of `q` over the matching one of `p`.
    pub max_violation: f64,
    /// Number of terms in the partial sum where the worst excess occurs
    /// minus one (0 when nothing is violated).
    pub worst_index: usize,
}

/// Tests whether `p` majorizes `q`: every partial sum of the sorted `q` is at
/// most the matching partial sum of `p`, up to `tol`. The shorter spectrum is
/// padded with zeros.
pub fn majorization_compare(
    p: &ProbabilitySpectrum,
    q: &ProbabilitySpectrum,
    tol: f64,
) -> Result<MajorizationReport> {
    if !p.complete || !q.complete {
        return Err(Error::IncompleteSpectrum("majorization"));
    }
    let n = p.len().max(q.len());
    let mut sum_p = Neumaier::default();
    let mut sum_q = Neumaier::default();
    let mut max_violation = 0.0;
    let mut worst_index = 0;
    for i in 0..n {
        sum_p.add(p.probabilities.get(i).copied().unwrap_or(0.0));
        sum_q.add(q.probabilities.get(i).copied().unwrap_or(0.0));
        let excess = sum_q.value() - sum_p.value();
        if excess > max_violation {
            max_violation = excess;
            worst_index = i;
        }
    }
    Ok(MajorizationReport {
        holds: max_violation <= tol,
        max_violation,
        worst_index,
    })
}

/// Number of eigenvalues `≥ epsilon`.
pub fn effective_rank(spec: &ProbabilitySpectrum, epsilon: f64) -> Result<usize> {
    if !spec.complete {
        let smallest = spec.probabilities.last().copied().unwrap_or(1.0);
        if smallest >= epsilon {
            return Err(Error::UncertainRank { smallest, epsilon });
        }
    }
    Ok(spec
        .probabilities
        .iter()
        .take_while(|&&p| p >= epsilon)
        .count())
}

/// Effective rank straight from mode occupations, growing a top-k prefix
/// until it reaches below `epsilon`.
pub fn effective_rank_of_modes(nu: &ModeOccupations, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    if nu.len() <= 16 {
        return effective_rank(&reduced_spectrum_full(nu)?, epsilon);
    }
    let mut k = 64;
    loop {
        let spec = reduced_spectrum_topk(nu, k)?;
        match effective_rank(&spec, epsilon) {
            Err(Error::UncertainRank { .. }) => k *= 4,
            other => return other,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    values.for_each(|v| acc.add(v));
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn modes(v: &[f64]) -> ModeOccupations {
        ModeOccupations::new(v.to_vec()).unwrap()
    }

    fn spectrum(v: &[f64]) -> ProbabilitySpectrum {
        ProbabilitySpectrum::complete(v.to_vec()).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        let x = (1.0 + 2.0 / PI) / 2.0;
        let direct = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        assert!((binary_entropy(x).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(x).unwrap() - 0.683_760_458).abs() < 1e-8);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-1e-9).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn shannon_entropy_values() {
        assert_eq!(shannon_entropy(&spectrum(&[1.0])).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&spectrum(&[0.5, 0.5])).unwrap(), 1.0);
        let nu = modes(&[2.0 / PI]);
        let full = reduced_spectrum_full(&nu).unwrap();
        let via_modes = binary_entropy((1.0 + 2.0 / PI) / 2.0).unwrap();
        assert!((shannon_entropy(&full).unwrap() - via_modes).abs() < 1e-15);
    }

    #[test]
    fn shannon_entropy_refuses_prefix() {
        let prefix = ProbabilitySpectrum::prefix(vec![0.5]).unwrap();
        assert!(matches!(
            shannon_entropy(&prefix),
            Err(Error::IncompleteSpectrum(_))
        ));
    }

    #[test]
    fn spectra_must_be_normalised() {
        assert!(ProbabilitySpectrum::complete(vec![0.5, 0.4]).is_err());
        assert!(ProbabilitySpectrum::complete(vec![1.2, -0.2]).is_err());
        assert!(ProbabilitySpectrum::prefix(vec![0.7, 0.6]).is_err());
        let s = ProbabilitySpectrum::complete(vec![0.2, 0.8, -1e-12]).unwrap();
        assert_eq!(s.probabilities(), &[0.8, 0.2, 0.0]);
    }

    #[test]
    fn full_spectrum_examples() {
        assert_eq!(
            reduced_spectrum_full(&modes(&[1.0]))
                .unwrap()
                .probabilities(),
            &[1.0, 0.0]
        );
        assert_eq!(
            reduced_spectrum_full(&modes(&[0.0, 0.0]))
                .unwrap()
                .probabilities(),
            &[0.25; 4]
        );
        let s = reduced_spectrum_full(&modes(&[2.0 / PI])).unwrap();
        assert!((s.probabilities()[0] - 0.818_309_886_2).abs() < 1e-10);
        assert!((s.probabilities()[1] - 0.181_690_113_8).abs() < 1e-10);
        assert!(s.is_complete());
    }

    #[test]
    fn full_spectrum_cap() {
        let nu = modes(&[0.5; FULL_SPECTRUM_CAP + 1]);
        assert!(matches!(
            reduced_spectrum_full(&nu),
            Err(Error::EnumerationCap { .. })
        ));
    }

    #[test]
    fn topk_examples() {
        let nu = modes(&[0.9, 0.5]);
        let top1 = reduced_spectrum_topk(&nu, 1).unwrap();
        assert_eq!(top1.probabilities(), &[0.95 * 0.75]);
        let top2 = reduced_spectrum_topk(&nu, 2).unwrap();
        assert!((top2.probabilities()[0] - 0.7125).abs() < 1e-15);
        assert!((top2.probabilities()[1] - 0.2375).abs() < 1e-15);
        assert!(!top2.is_complete());
        let all = reduced_spectrum_topk(&nu, 10).unwrap();
        assert!(all.is_complete());
        assert_eq!(all, reduced_spectrum_full(&nu).unwrap());
    }

    #[test]
    fn topk_handles_many_modes() {
        let nu = modes(&vec![0.99; 100]);
        let s = reduced_spectrum_topk(&nu, 5).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.probabilities()[0] > s.probabilities()[1]);
    }

    #[test]
    fn majorization_examples() {
        let r =
            majorization_compare(&spectrum(&[1.0, 0.0]), &spectrum(&[0.5, 0.5]), 1e-10).unwrap();
        assert!(r.holds);
        assert_eq!(r.max_violation, 0.0);
        let r =
            majorization_compare(&spectrum(&[0.7, 0.3]), &spectrum(&[0.6, 0.4]), 1e-10).unwrap();
        assert!(r.holds);
        let r =
            majorization_compare(&spectrum(&[0.6, 0.4]), &spectrum(&[0.7, 0.3]), 1e-10).unwrap();
        assert!(!r.holds);
        assert!((r.max_violation - 0.1).abs() < 1e-12);
        assert_eq!(r.worst_index, 0);
    }

    #[test]
    fn majorization_pads_shorter_spectrum() {
        let p = spectrum(&[0.5, 0.5]);
        let q = spectrum(&[0.25; 4]);
        assert!(majorization_compare(&p, &q, 1e-12).unwrap().holds);
        assert!(!majorization_compare(&q, &p, 1e-12).unwrap().holds);
    }

    #[test]
    fn majorization_refuses_prefix() {
        let prefix = ProbabilitySpectrum::prefix(vec![0.5]).unwrap();
        assert!(majorization_compare(&prefix, &spectrum(&[1.0]), 1e-10).is_err());
    }

    #[test]
    fn effective_rank_examples() {
        let s = spectrum(&[0.9, 0.05, 0.05]);
        assert_eq!(effective_rank(&s, 0.04).unwrap(), 3);
        assert_eq!(effective_rank(&s, 0.1).unwrap(), 1);
    }

    #[test]
    fn effective_rank_of_prefix_needs_a_small_tail() {
        let prefix = ProbabilitySpectrum::prefix(vec![0.6, 0.3]).unwrap();
        assert!(matches!(
            effective_rank(&prefix, 0.1),
            Err(Error::UncertainRank { .. })
        ));
        assert_eq!(effective_rank(&prefix, 0.5).unwrap(), 1);
    }

    #[test]
    fn effective_rank_from_modes_agrees_with_enumeration() {
        let nu = modes(&[
            0.999, 0.99, 0.97, 0.9, 0.8, 0.6, 0.999, 0.9999, 0.95, 0.85, 0.7, 0.99, 0.9, 0.98,
            0.97, 0.96, 0.995, 0.93,
        ]);
        let direct = effective_rank(&reduced_spectrum_full(&nu).unwrap(), 1e-4).unwrap();
        assert_eq!(effective_rank_of_modes(&nu, 1e-4).unwrap(), direct);
    }
}
