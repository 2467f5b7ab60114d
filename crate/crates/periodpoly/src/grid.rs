//! CSV sampling grids of `log10 |f|` for contour plots.
//!
//! Header `x,y,logabs`, then one row per lattice point with `y` outer and
//! `x` inner. Values are clamped to `[-16, 300]`; points where `f` is not
//! finite get the upper clamp.

use std::io::{self, Write};

use num_complex::Complex64;
use periodpoly_core::period::RealPoly;
use rayon::prelude::*;

use crate::config::Grid;

pub const HEADER: &str = "x,y,logabs";
pub const FLOOR: f64 = -16.0;
pub const CEILING: f64 = 300.0;

pub fn clamp_log(v: f64) -> f64 {
    if v.is_nan() {
        CEILING
    } else {
        v.clamp(FLOOR, CEILING)
    }
}

/// `log10 |p(z)|` in double precision, with the coefficients rescaled by a
/// power of two so that large weights do not overflow.
pub fn polynomial_log_abs(p: &RealPoly) -> impl Fn(Complex64) -> f64 + Sync {
    let (c, shift) = p.to_f64_scaled();
    let offset = shift as f64 * std::f64::consts::LOG10_2;
    move |z| {
        let v = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
        v.norm().log10() + offset
    }
}

/// `log10 |sin 2πz - sin(2π/z)|`.
pub fn s_log_abs(z: Complex64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    ((z * two_pi).sin() - (z.inv() * two_pi).sin()).norm().log10()
}

/// Writes the grid, evaluating rows in parallel.
pub fn write_grid<W, F>(mut out: W, grid: &Grid, log_abs: F) -> io::Result<()>
where
    W: Write,
    F: Fn(Complex64) -> f64 + Sync,
{
    writeln!(out, "{HEADER}")?;
    let rows: Vec<String> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let mut row = String::new();
            for i in 0..grid.nx {
                let x = grid.x(i);
                let v = clamp_log(log_abs(Complex64::new(x, y)));
                row.push_str(&format!("{x},{y},{v}\n"));
            }
            row
        })
        .collect();
    for r in rows {
        out.write_all(r.as_bytes())?;
    }
    out.flush()
}
