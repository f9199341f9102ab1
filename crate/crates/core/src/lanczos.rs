//! Lowest eigenpair of a real symmetric operator by restarted Lanczos with
//! full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    /// Required residual `‖Aψ - θψ‖` of the returned unit vector.
    pub tol: f64,
    /// Total Lanczos steps over all restarts.
    pub max_iter: usize,
    /// Krylov basis size before a restart from the current Ritz vector.
    pub krylov_cap: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Stalled {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

const CHUNK: usize = 4096;

/// Two passes of classical Gram-Schmidt against `basis`. Each coefficient is
/// a sequential dot product and each output element a sequential sum, so the
/// result does not depend on the thread count.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.par_iter().map(|b| dot(w, b)).collect();
        w.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let offset = c * CHUNK;
            for (b, &coef) in basis.iter().zip(&coeffs) {
                for (k, x) in chunk.iter_mut().enumerate() {
                    *x -= coef * b[offset + k];
                }
            }
        });
    }
}

fn lowest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (
        theta,
        eig.eigenvectors.column(idx).iter().copied().collect(),
    )
}

pub(crate) fn lowest_eigenpair<F>(
    apply: F,
    start: Vec<f64>,
    opts: Options,
) -> Result<Eigenpair, Stalled>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    let dim = start.len();
    let mut current = start;
    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;
    let mut scratch = vec![0.0; dim];

    loop {
        let n0 = norm(&current);
        current.iter_mut().for_each(|x| *x /= n0);
        let mut basis: Vec<Vec<f64>> = vec![current];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        let (theta, ritz) = loop {
            let v = basis.last().unwrap();
            let mut w = vec![0.0; dim];
            apply(v, &mut w);
            let alpha = dot(&w, v);
            alphas.push(alpha);
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            iterations += 1;

            let (theta, y) = lowest_ritz(&alphas, &betas);
            let estimate = beta * y.last().unwrap().abs();
            let invariant = beta <= 1e-12 * alpha.abs().max(1.0);
            let full = basis.len() >= opts.krylov_cap.min(dim) || iterations >= opts.max_iter;
            if estimate <= 0.5 * opts.tol || invariant || full {
                break (theta, y);
            }
            w.iter_mut().for_each(|x| *x /= beta);
            betas.push(beta);
            basis.push(w);
        };

        // Ritz vector and its true residual.
        let mut psi = vec![0.0; dim];
        psi.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let offset = c * CHUNK;
                for (b, &coef) in basis.iter().zip(&ritz) {
                    for (k, x) in chunk.iter_mut().enumerate() {
                        *x += coef * b[offset + k];
                    }
                }
            });
        drop(basis);
        let n = norm(&psi);
        psi.iter_mut().for_each(|x| *x /= n);
        apply(&psi, &mut scratch);
        let rayleigh = dot(&psi, &scratch);
        let value = if rayleigh.is_finite() {
            rayleigh
        } else {
            theta
        };
        let residual = scratch
            .iter()
            .zip(&psi)
            .map(|(hx, x)| (hx - value * x).powi(2))
            .sum::<f64>()
            .sqrt();
        last_residual = residual.min(last_residual);
        if residual <= opts.tol {
            return Ok(Eigenpair {
                value,
                vector: psi,
                residual,
            });
        }
        if iterations >= opts.max_iter {
            return Err(Stalled {
                iterations,
                residual: last_residual,
            });
        }
        current = psi;
    }
}
