//! Parsed command-line settings.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Inclusive range of even weights, written `A..B` or a single `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightRange {
    pub start: u32,
    pub end: u32,
}

impl WeightRange {
    pub fn single(k: u32) -> Self {
        WeightRange { start: k, end: k }
    }

    pub fn weights(&self) -> Vec<u32> {
        (self.start..=self.end).step_by(2).collect()
    }
}

impl FromStr for WeightRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad weight `{t}`"));
        let (start, end) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if start % 2 == 1 || end % 2 == 1 {
            return Err(format!("weights must be even, got {s}"));
        }
        if start < 12 {
            return Err(format!("weights start at 12, got {start}"));
        }
        if end < start {
            return Err(format!("empty weight range {s}"));
        }
        Ok(WeightRange { start, end })
    }
}

impl fmt::Display for WeightRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// Rectangular sampling lattice `XMIN,XMAX,YMIN,YMAX,NX,NY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { xmin: -2.5, xmax: 2.5, ymin: -2.5, ymax: 2.5, nx: 501, ny: 501 }
    }
}

impl Grid {
    pub fn x(&self, i: usize) -> f64 {
        self.xmin + (self.xmax - self.xmin) * i as f64 / (self.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.ymin + (self.ymax - self.ymin) * j as f64 / (self.ny - 1) as f64
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(format!("grid needs XMIN,XMAX,YMIN,YMAX,NX,NY, got `{s}`"));
        }
        let f = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(format!("bad number `{t}`"));
        let n = |t: &str| t.parse::<usize>().map_err(|_| format!("bad count `{t}`"));
        let g = Grid { xmin: f(parts[0])?, xmax: f(parts[1])?, ymin: f(parts[2])?, ymax: f(parts[3])?, nx: n(parts[4])?, ny: n(parts[5])? };
        if g.nx < 2 || g.ny < 2 {
            return Err("grid needs NX, NY >= 2".into());
        }
        if g.xmin >= g.xmax || g.ymin >= g.ymax {
            return Err("grid needs XMIN < XMAX and YMIN < YMAX".into());
        }
        Ok(g)
    }
}

/// Settings shared by the per-weight commands.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub weights: WeightRange,
    /// `None` picks `max(192, 6k)` per weight.
    pub prec_bits: Option<usize>,
    /// `None` picks `max(2k, 64)` per weight.
    pub n_coeffs: Option<usize>,
    pub out_dir: PathBuf,
    /// Initial samples per circle for contour work.
    pub contour_samples: usize,
}

impl VerifyConfig {
    pub fn new(weights: WeightRange, out_dir: PathBuf) -> Self {
        VerifyConfig { weights, prec_bits: None, n_coeffs: None, out_dir, contour_samples: 256 }
    }

    pub fn prec_for(&self, k: u32) -> usize {
        match self.prec_bits {
            Some(p) => periodpoly_core::real::word_prec(p),
            None => periodpoly_core::default_prec_bits(k),
        }
    }

    pub fn coeffs_for(&self, k: u32) -> usize {
        self.n_coeffs.unwrap_or_else(|| periodpoly_core::default_n_coeffs(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_ranges() {
        assert_eq!("12..20".parse::<WeightRange>().unwrap().weights(), vec![12, 14, 16, 18, 20]);
        assert_eq!("34".parse::<WeightRange>().unwrap(), WeightRange::single(34));
        assert_eq!("12..=14".parse::<WeightRange>().unwrap().end, 14);
        for bad in ["13..20", "10..20", "20..12", "x", "12..y"] {
            assert!(bad.parse::<WeightRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g: Grid = "-1,1,-2,2,3,5".parse().unwrap();
        assert_eq!((g.nx, g.ny), (3, 5));
        assert_eq!(g.x(1), 0.0);
        assert_eq!(g.y(4), 2.0);
        for bad in ["0,1,0,1,1,4", "0,1,0,1,4", "1,0,0,1,4,4", "0,1,0,nan,4,4"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
        let d = Grid::default();
        assert_eq!((d.nx, d.ny, d.xmin, d.ymax), (501, 501, -2.5, 2.5));
    }
}
