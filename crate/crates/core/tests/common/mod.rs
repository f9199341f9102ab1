//! Reference computations kept independent of the library's algorithms.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

/// Midpoint rule on `n` equal panels of
/// `(1/2π) ∫₀^{2π} e^{-ilφ} (cos φ - h - iγ sin φ)/|·| dφ`.
/// Returns (real, imaginary).
pub fn brute_force_coupling(h: f64, gamma: f64, lag: i64, n: usize) -> (f64, f64) {
    let step = 2.0 * PI / n as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for k in 0..n {
        let phi = (k as f64 + 0.5) * step;
        let a = phi.cos() - h;
        let b = -gamma * phi.sin();
        let r = (a * a + b * b).sqrt();
        let (s, c) = (lag as f64 * phi).sin_cos();
        re += (c * a + s * b) / r;
        im += (c * b - s * a) / r;
    }
    (re * step / (2.0 * PI), im * step / (2.0 * PI))
}

/// Cyclic Jacobi eigenvalue iteration for a dense real symmetric matrix
/// stored row-major. Returns the eigenvalues, unsorted.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Spectrum of the Hermitian matrix `i·B` for real antisymmetric `B`, via
/// the real symmetric embedding `[[0, -B], [B, 0]]`, whose eigenvalues are
/// those of `i·B`, each twice. Returned sorted descending, once each.
pub fn hermitian_spectrum_of_i_times(b: &[Vec<f64>]) -> Vec<f64> {
    let n = b.len();
    let mut emb = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            emb[i][n + j] = -b[i][j];
            emb[n + i][j] = b[i][j];
        }
    }
    let mut ev = jacobi_eigenvalues(emb);
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.into_iter().step_by(2).collect()
}

/// `B_L` entry by entry from the Majorana pair layout: even row `2j`, odd
/// column `2k+1` carry `g_{k-j}`; odd row `2j+1`, even column `2k` carry
/// `-g_{j-k}`; everything else is zero.
pub fn block_matrix_by_entries(g: impl Fn(i64) -> f64, l: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; 2 * l]; 2 * l];
    for r in 0..2 * l {
        for c in 0..2 * l {
            let (j, k) = ((r / 2) as i64, (c / 2) as i64);
            m[r][c] = match (r % 2, c % 2) {
                (0, 1) => g(k - j),
                (1, 0) => -g(j - k),
                _ => 0.0,
            };
        }
    }
    m
}

#[derive(Clone, Copy)]
pub struct Xxz {
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    /// -1 or +1 in front of the whole sum.
    pub sign: f64,
    pub periodic: bool,
}

/// `⟨bra|H|ket⟩` from explicit single-site Pauli actions, complex phases
/// included, without using σᶻ conservation.
pub fn xxz_element(m: &Xxz, bra: usize, ket: usize) -> f64 {
    // σ acting on a single spin with bit value `b`: (new bit, amplitude)
    fn x(b: usize) -> (usize, (f64, f64)) {
        (b ^ 1, (1.0, 0.0))
    }
    fn y(b: usize) -> (usize, (f64, f64)) {
        if b == 0 {
            (1, (0.0, 1.0))
        } else {
            (0, (0.0, -1.0))
        }
    }
    fn z(b: usize) -> (usize, (f64, f64)) {
        (b, (if b == 0 { 1.0 } else { -1.0 }, 0.0))
    }
    fn mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    type Op = fn(usize) -> (usize, (f64, f64));
    let pair = |ops: [(usize, Op); 2]| -> (f64, f64) {
        let mut state = ket;
        let mut amp = (1.0, 0.0);
        for (site, op) in ops {
            let (nb, a) = op((state >> site) & 1);
            state = (state & !(1 << site)) | (nb << site);
            amp = mul(amp, a);
        }
        if state == bra {
            amp
        } else {
            (0.0, 0.0)
        }
    };
    let bonds = if m.periodic { m.n } else { m.n - 1 };
    let mut total = (0.0, 0.0);
    for l in 0..bonds {
        let r = (l + 1) % m.n;
        for (coef, term) in [
            (1.0, pair([(l, x as Op), (r, x as Op)])),
            (1.0, pair([(l, y as Op), (r, y as Op)])),
            (m.delta, pair([(l, z as Op), (r, z as Op)])),
        ] {
            total.0 += coef * term.0;
            total.1 += coef * term.1;
        }
    }
    for l in 0..m.n {
        let (nb, a) = z((ket >> l) & 1);
        let state = (ket & !(1 << l)) | (nb << l);
        if state == bra {
            total.0 += m.lambda * a.0;
            total.1 += m.lambda * a.1;
        }
    }
    assert!(total.1.abs() < 1e-15, "XXZ matrix element is real");
    m.sign * total.0
}

pub fn dense_xxz(m: &Xxz, basis: &[usize]) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(basis.len(), basis.len(), |i, j| {
        xxz_element(m, basis[i], basis[j])
    })
}

pub struct DenseGround {
    pub energy: f64,
    /// Full-space amplitudes of the ground vector.
    pub vector: Vec<f64>,
    /// Lowest energy per popcount of down spins.
    pub sector_energies: Vec<f64>,
}

/// Dense diagonalization block by block in the number of down spins.
pub fn dense_ground(m: &Xxz) -> DenseGround {
    let sector_basis = |k: usize| -> Vec<usize> {
        (0..1usize << m.n)
            .filter(|s| s.count_ones() as usize == k)
            .collect()
    };
    // Eigenvalues only per sector; the eigenvector is computed once for the winner.
    let sector_energies: Vec<f64> = (0..=m.n)
        .map(|k| {
            dense_xxz(m, &sector_basis(k))
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let (best_k, &energy) = sector_energies
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let basis = sector_basis(best_k);
    let eig = nalgebra::SymmetricEigen::new(dense_xxz(m, &basis));
    let idx = eig.eigenvalues.imin();
    let mut vector = vec![0.0; 1 << m.n];
    for (pos, &s) in basis.iter().enumerate() {
        vector[s] = eig.eigenvectors[(pos, idx)];
    }
    DenseGround {
        energy,
        vector,
        sector_energies,
    }
}

/// Von Neumann entropy in bits from eigenvalues, independent of the library.
pub fn entropy_bits(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.log2())
        .sum()
}
