//! Exact ground states of finite XXZ chains.
//!
//! `H = s Σ_l (σˣ_l σˣ_{l+1} + σʸ_l σʸ_{l+1} + Δ σᶻ_l σᶻ_{l+1} + λ σᶻ_l)`
//! with `s = -1` for [`SignConvention::PaperFerro`] and `s = +1` for
//! [`SignConvention::Antiferro`].
//!
//! Basis index bit `l` encodes spin `l`; a clear bit is `σᶻ = +1`. Total
//! `σᶻ` commutes with `H`, so the ground state is searched sector by sector
//! with Lanczos and the lowest sector wins.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lanczos;
use crate::scaling::{EntropyProfile, ProfilePoint};
use crate::spectra::{shannon_entropy, ProbabilitySpectrum};

pub const MIN_SITES: usize = 2;
pub const MAX_SITES: usize = 24;

/// Largest block for which [`ReducedDensityMatrix`] is materialized.
pub const MAX_RDM_SITES: usize = 12;

/// Energies closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Sectors this small are diagonalized densely.
const DENSE_SECTOR_DIM: usize = 64;

const KRYLOV_CAP: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    /// Overall minus sign in front of the sum.
    PaperFerro,
    /// Overall plus sign; the antiferromagnetic Heisenberg chain at `Δ = 1`.
    Antiferro,
}

impl SignConvention {
    fn factor(self) -> f64 {
        match self {
            SignConvention::PaperFerro => -1.0,
            SignConvention::Antiferro => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Site `N` is site `0`.
    Periodic,
    /// No bond between sites `N-1` and `0`; field terms on every site.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzModel {
    pub delta: f64,
    pub lambda: f64,
    n: usize,
    pub sign: SignConvention,
    pub boundary: Boundary,
}

impl XxzModel {
    /// Antiferromagnetic sign, periodic ring.
    pub fn new(delta: f64, lambda: f64, n: usize) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "chain length must lie in [{MIN_SITES}, {MAX_SITES}], got {n}"
            )));
        }
        if !delta.is_finite() || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta and lambda must be finite, got {delta}, {lambda}"
            )));
        }
        Ok(XxzModel {
            delta,
            lambda,
            n,
            sign: SignConvention::Antiferro,
            boundary: Boundary::Periodic,
        })
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Nearest-neighbour pairs `(l, l+1 mod N)`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let count = match self.boundary {
            Boundary::Periodic => self.n,
            Boundary::Open => self.n - 1,
        };
        (0..count).map(|l| (l, (l + 1) % self.n)).collect()
    }

    pub fn label(&self) -> String {
        format!(
            "xxz delta={} lambda={} n={} sign={:?} boundary={:?}",
            self.delta, self.lambda, self.n, self.sign, self.boundary
        )
    }

    fn diagonal(&self, bonds: &[(usize, usize)], state: usize) -> f64 {
        let z = |l: usize| 1.0 - 2.0 * ((state >> l) & 1) as f64;
        let zz: f64 = bonds.iter().map(|&(a, b)| z(a) * z(b)).sum();
        let field: f64 = (0..self.n).map(z).sum();
        self.sign.factor() * (self.delta * zz + self.lambda * field)
    }

    /// Lowest possible energy in the sector with total `σᶻ = m`: every bond
    /// at its two-site minimum plus the exact field term.
    fn sector_lower_bound(&self, m: i32) -> f64 {
        let s = self.sign.factor();
        let d = self.delta;
        let bond_min = [s * d, s * (2.0 - d), s * (-2.0 - d)]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        self.bonds().len() as f64 * bond_min + s * self.lambda * m as f64
    }
}

/// Pure state on `N` spins, `2^N` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Requires `2^n` amplitudes of unit norm (within `1e-12`).
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n > MAX_SITES || amplitudes.len() != 1 << n {
            return Err(Error::Dimension(format!(
                "{} amplitudes do not describe {n} spins",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(QuantumState { n, amplitudes })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_SITES || index >= 1 << n {
            return Err(Error::Dimension(format!(
                "basis index {index} out of range for {n} spins"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n, amplitudes })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// The state with site `j` relabelled as site `j - shift (mod N)`.
    pub fn translated(&self, shift: usize) -> QuantumState {
        let n = self.n;
        let shift = shift % n;
        let mask = (1usize << n) - 1;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let rotated = if shift == 0 {
                i
            } else {
                ((i >> shift) | (i << (n - shift))) & mask
            };
            out[rotated] = a;
        }
        QuantumState { n, amplitudes: out }
    }
}

/// `H|ψ⟩` on the full `2^N` space, not normalized.
pub fn apply_hamiltonian(model: &XxzModel, state: &QuantumState) -> Result<Vec<Complex64>> {
    if state.n != model.n {
        return Err(Error::Dimension(format!(
            "model has {} sites, state has {}",
            model.n, state.n
        )));
    }
    let bonds = model.bonds();
    let hop = 2.0 * model.sign.factor();
    let psi = &state.amplitudes;
    let out = (0..psi.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = psi[i] * model.diagonal(&bonds, i);
            for &(a, b) in &bonds {
                if ((i >> a) ^ (i >> b)) & 1 == 1 {
                    acc += psi[i ^ (1 << a) ^ (1 << b)] * hop;
                }
            }
            acc
        })
        .collect();
    Ok(out)
}

/// Basis states with a fixed number of flipped (down) spins, in increasing
/// order, and the Hamiltonian restricted to them in sparse form.
struct Sector {
    magnetization: i32,
    states: Vec<usize>,
    diagonal: Vec<f64>,
    offsets: Vec<usize>,
    neighbours: Vec<u32>,
    hop: f64,
}

impl Sector {
    fn new(model: &XxzModel, down: usize) -> Sector {
        let n = model.n;
        let states = fixed_weight_states(n, down);
        let bonds = model.bonds();
        let diagonal = states
            .par_iter()
            .map(|&s| model.diagonal(&bonds, s))
            .collect();
        let per_state: Vec<Vec<u32>> = states
            .par_iter()
            .map(|&s| {
                bonds
                    .iter()
                    .filter(|&&(a, b)| ((s >> a) ^ (s >> b)) & 1 == 1)
                    .map(|&(a, b)| {
                        let t = s ^ (1 << a) ^ (1 << b);
                        states.binary_search(&t).expect("hop stays in sector") as u32
                    })
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(states.len() + 1);
        offsets.push(0);
        let mut neighbours = Vec::new();
        for row in per_state {
            neighbours.extend(row);
            offsets.push(neighbours.len());
        }
        Sector {
            magnetization: n as i32 - 2 * down as i32,
            states,
            diagonal,
            offsets,
            neighbours,
            hop: 2.0 * model.sign.factor(),
        }
    }

    fn dim(&self) -> usize {
        self.states.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut acc = self.diagonal[i] * x[i];
            for &j in &self.neighbours[self.offsets[i]..self.offsets[i + 1]] {
                acc += self.hop * x[j as usize];
            }
            *yi = acc;
        });
    }

    fn dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.diagonal[i];
            for &j in &self.neighbours[self.offsets[i]..self.offsets[i + 1]] {
                m[(i, j as usize)] += self.hop;
            }
        }
        m
    }
}

fn fixed_weight_states(n: usize, k: usize) -> Vec<usize> {
    if k == 0 {
        return vec![0];
    }
    let limit = 1usize << n;
    let mut out = Vec::new();
    let mut v = (1usize << k) - 1;
    while v < limit {
        out.push(v);
        // next integer with the same popcount
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateOptions {
    /// Residual bound `‖Hψ - Eψ‖`.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            tol: 1e-10,
            max_iter: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: QuantumState,
    /// Total `σᶻ` of the state.
    pub sector: i32,
    pub residual: f64,
}

struct SectorResult {
    energy: f64,
    vector: Vec<f64>,
    residual: f64,
}

fn solve_sector(sector: &Sector, opts: &GroundStateOptions) -> Result<SectorResult> {
    if sector.dim() <= DENSE_SECTOR_DIM {
        let eig = SymmetricEigen::new(sector.dense());
        let (idx, &energy) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("sector is non-empty");
        let vector: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let mut hv = vec![0.0; vector.len()];
        sector.apply(&vector, &mut hv);
        let residual = hv
            .iter()
            .zip(&vector)
            .map(|(a, b)| (a - energy * b).powi(2))
            .sum::<f64>()
            .sqrt();
        return Ok(SectorResult {
            energy,
            vector,
            residual,
        });
    }
    let seed = opts
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(sector.magnetization as i64 as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..sector.dim())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let lopts = lanczos::Options {
        tol: opts.tol,
        max_iter: opts.max_iter,
        krylov_cap: KRYLOV_CAP,
    };
    match lanczos::lowest_eigenpair(|x, y| sector.apply(x, y), start, lopts) {
        Ok(pair) => Ok(SectorResult {
            energy: pair.value,
            vector: pair.vector,
            residual: pair.residual,
        }),
        Err(stalled) => Err(Error::NotConverged {
            sector: sector.magnetization,
            iterations: stalled.iterations,
            residual: stalled.residual,
        }),
    }
}

fn embed(model: &XxzModel, sector: &Sector, vector: &[f64]) -> QuantumState {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); model.dim()];
    for (&s, &v) in sector.states.iter().zip(vector) {
        amplitudes[s] = Complex64::new(v, 0.0);
    }
    QuantumState {
        n: model.n,
        amplitudes,
    }
}

fn check_options(opts: &GroundStateOptions) -> Result<()> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidParameter(
            "ground-state search needs tol > 0 and max_iter >= 1".into(),
        ));
    }
    Ok(())
}

/// Lowest state within the sector of total `σᶻ = magnetization`.
pub fn ground_state_in_sector(
    model: &XxzModel,
    magnetization: i32,
    opts: &GroundStateOptions,
) -> Result<GroundState> {
    check_options(opts)?;
    let n = model.n as i32;
    if magnetization.abs() > n || (n - magnetization) % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "no sector with total sigma^z = {magnetization} on {n} spins"
        )));
    }
    let sector = Sector::new(model, ((n - magnetization) / 2) as usize);
    let res = solve_sector(&sector, opts)?;
    Ok(GroundState {
        energy: res.energy,
        state: embed(model, &sector, &res.vector),
        sector: magnetization,
        residual: res.residual,
    })
}

/// Global ground state over all magnetization sectors.
///
/// Sectors are visited by increasing `|total σᶻ|`; one whose energy lower
/// bound already exceeds the best energy found is skipped. Two sectors whose
/// ground energies agree within [`DEGENERACY_TOL`] make the ground state
/// ambiguous and yield [`Error::DegenerateGroundState`].
pub fn ground_state(model: &XxzModel, opts: &GroundStateOptions) -> Result<GroundState> {
    check_options(opts)?;
    let n = model.n;
    let mut downs: Vec<usize> = (0..=n).collect();
    downs.sort_by_key(|&k| {
        let m = n as i32 - 2 * k as i32;
        (m.abs(), -m)
    });

    let mut best: Option<(Sector, SectorResult)> = None;
    let mut energies: Vec<(i32, f64)> = Vec::new();
    for k in downs {
        let m = n as i32 - 2 * k as i32;
        if let Some((_, b)) = &best {
            if model.sector_lower_bound(m) > b.energy + DEGENERACY_TOL {
                continue;
            }
        }
        let sector = Sector::new(model, k);
        let res = solve_sector(&sector, opts)?;
        energies.push((m, res.energy));
        if best.as_ref().is_none_or(|(_, b)| res.energy < b.energy) {
            best = Some((sector, res));
        }
    }
    let (sector, res) = best.expect("at least one sector");
    let tied: Vec<i32> = energies
        .iter()
        .filter(|(_, e)| (e - res.energy).abs() <= DEGENERACY_TOL)
        .map(|(m, _)| *m)
        .collect();
    if tied.len() > 1 {
        return Err(Error::DegenerateGroundState {
            energy: res.energy,
            sectors: tied,
            tolerance: DEGENERACY_TOL,
        });
    }
    Ok(GroundState {
        energy: res.energy,
        state: embed(model, &sector, &res.vector),
        sector: sector.magnetization,
        residual: res.residual,
    })
}

/// `ρ_L` of a block of `L` contiguous spins.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    l: usize,
    entries: DMatrix<Complex64>,
    // Column-major 2^L x 2^{N-L} reshape of the state; ρ = M M†.
    factor: Vec<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Largest `|ρ_ij - conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.entries.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues, descending. Taken from the smaller of `M M†` and `M† M`
    /// and padded with zeros.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let rows = self.entries.nrows();
        let cols = self.factor.len() / rows;
        let mut ev = cut_eigenvalues(rows, cols, &self.factor);
        ev.resize(rows, 0.0);
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Hermitian within `1e-12`, eigenvalues `≥ -1e-10`, trace 1 within `1e-10`.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let smallest = self.eigenvalues().last().copied().unwrap_or(0.0);
        if smallest < -1e-10 {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(())
    }

    pub fn spectrum(&self) -> Result<ProbabilitySpectrum> {
        ProbabilitySpectrum::complete(self.eigenvalues())
    }
}

fn check_block(n: usize, l: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::InvalidParameter(format!(
            "block length {l} outside [1, {n}]"
        )));
    }
    Ok(())
}

/// `ρ_L` for sites `0..L`, the Gram matrix of the amplitudes reshaped to
/// `2^L × 2^{N-L}`.
pub fn reduced_density_matrix(
    state: &QuantumState,
    n: usize,
    l: usize,
) -> Result<ReducedDensityMatrix> {
    if n != state.n {
        return Err(Error::Dimension(format!(
            "state has {} sites, caller expects {n}",
            state.n
        )));
    }
    check_block(n, l)?;
    if l > MAX_RDM_SITES {
        return Err(Error::InvalidParameter(format!(
            "a {l}-site density matrix exceeds the {MAX_RDM_SITES}-site limit; use block_spectrum"
        )));
    }
    let m = DMatrix::from_column_slice(1 << l, 1 << (n - l), &state.amplitudes);
    Ok(ReducedDensityMatrix {
        l,
        entries: &m * m.adjoint(),
        factor: state.amplitudes.clone(),
    })
}

/// `ρ_L` for sites `start..start+L (mod N)`.
pub fn reduced_density_matrix_at(
    state: &QuantumState,
    n: usize,
    start: usize,
    l: usize,
) -> Result<ReducedDensityMatrix> {
    reduced_density_matrix(&state.translated(start), n, l)
}

/// Nonzero spectrum of `ρ_L` (sites `0..L`), computed from whichever side of
/// the cut is smaller. For `L > N/2` that is the Gram matrix of sites
/// `L..N`, whose nonzero eigenvalues coincide with those of `ρ_L`.
pub fn block_spectrum(state: &QuantumState, l: usize) -> Result<ProbabilitySpectrum> {
    let n = state.n;
    check_block(n, l)?;
    let mut ev = cut_eigenvalues(1 << l, 1 << (n - l), &state.amplitudes);
    if let Some(&bad) = ev.iter().find(|&&p| p < -1e-10) {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {bad:e}"
        )));
    }
    ev.iter_mut().for_each(|p| *p = p.max(0.0));
    ProbabilitySpectrum::complete(ev)
}

// Eigenvalues of the smaller Gram matrix of a column-major rows x cols
// reshape. Real arithmetic when every amplitude is real.
fn cut_eigenvalues(rows: usize, cols: usize, amps: &[Complex64]) -> Vec<f64> {
    if amps.iter().all(|a| a.im == 0.0) {
        let re: Vec<f64> = amps.iter().map(|a| a.re).collect();
        let m = DMatrix::from_column_slice(rows, cols, &re);
        let gram = if rows <= cols {
            &m * m.transpose()
        } else {
            m.transpose() * &m
        };
        SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        let m = DMatrix::from_column_slice(rows, cols, amps);
        let gram = if rows <= cols {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        SymmetricEigen::new(gram)
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }
}

/// `S_L` for `L = 1..N-1` of a given state.
pub fn state_entropy_profile(
    label: impl Into<String>,
    state: &QuantumState,
) -> Result<EntropyProfile> {
    let n = state.n;
    let points = (1..n)
        .into_par_iter()
        .map(|l| {
            Ok(ProfilePoint {
                l,
                s: shannon_entropy(&block_spectrum(state, l)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    EntropyProfile::new(label, points)
}

/// Ground state, then `S_L` for `L = 1..N-1`.
pub fn entropy_profile_ed(model: &XxzModel, opts: &GroundStateOptions) -> Result<EntropyProfile> {
    let gs = ground_state(model, opts)?;
    state_entropy_profile(model.label(), &gs.state)
}
