//! Block entanglement entropy of ground states of one-dimensional spin-1/2 chains.
//!
//! Two engines produce entropy profiles `S_L` (in bits) for a block of `L`
//! contiguous spins:
//!
//! - [`xy_exact`]: the infinite XY chain, solved through the Majorana
//!   correlation matrix of the block. Cost is polynomial in `L`.
//! - [`ed_engine`]: finite XXZ rings, solved by Lanczos exact
//!   diagonalization in fixed-magnetization sectors.
//!
//! [`spectra`] turns mode occupations into reduced-density-matrix spectra
//! and compares them by majorization; [`scaling`] fits the logarithmic
//! growth and extracts the central charge.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ed_engine;
pub mod error;
mod lanczos;
pub mod quadrature;
pub mod scaling;
pub mod spectra;
pub mod xy_exact;

pub use error::{Error, Result};
