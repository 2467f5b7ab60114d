//! Odd period polynomials of level-one Hecke eigenforms.
//!
//! The crate builds cusp-form bases from exact q-expansions, diagonalizes
//! the Hecke operator `T_2`, evaluates critical L-values through the
//! incomplete-gamma expansion, assembles the odd period polynomial and
//! certifies numerically where its zeros lie: the nine forced zeros at
//! `0, ±2, ±1/2` and the double zeros `±1`, with every remaining zero on the
//! unit circle.
//!
//! Everything here is `no_std` + `alloc`; IO, reporting and the command-line
//! driver live in the `periodpoly` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact_series;
pub mod hecke;
pub mod lfunction;
pub mod period;
pub mod real;
pub mod zeros;

pub use error::{Error, Result};
pub use real::{Complex, Ctx, Real};

/// Default working precision for weight `k`: `max(192, 6k)` bits.
pub fn default_prec_bits(k: u32) -> usize {
    real::word_prec((6 * k as usize).max(192))
}

/// Default number of eigenform coefficients for weight `k`: `max(2k, 64)`.
pub fn default_n_coeffs(k: u32) -> usize {
    (2 * k as usize).max(64)
}
