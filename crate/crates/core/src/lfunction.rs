//! Critical values `L_f(s)`, `1 <= s <= k-1`, from the incomplete-gamma expansion
//!
//! ```text
//! Λ(s) = (2π)^{-s} Γ(s) L_f(s) = Σ a(n) [ G(s, 2πn) + (-1)^{k/2} G(k-s, 2πn) ]
//! ```
//!
//! with `G(s, x) = x^{-s} Γ(s, x)`. Both halves decay like `e^{-2πn}`, so a few
//! hundred terms give thousands of bits. The truncation error is bounded
//! through Deligne's `|a(n)| <= 2 n^{k/2}` together with
//! `Γ(s, x) <= 2 x^{s-1} e^{-x}` for `x >= 2(s-1)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hecke::Eigenform;
use crate::real::{word_prec, Ctx, Real};

const GUARD_BITS: usize = 64;

/// `Γ(s, x)` for a positive integer `s` by the upward recurrence
/// `Γ(s+1, x) = s Γ(s, x) + x^s e^{-x}`; every term is positive.
pub fn upper_incomplete_gamma_int(s: u32, x: &Real, cx: &mut Ctx) -> Real {
    assert!(s >= 1, "incomplete gamma needs s >= 1");
    let e = cx.exp(&-x);
    let mut g = e.clone();
    let mut xp = Real::one(x.prec());
    for j in 1..s {
        xp = &xp * x;
        g = g.mul_i64(j as i64) + &xp * &e;
    }
    g
}

/// `log2` of a bound on `Σ_{n>N} |a(n)| (G(s, 2πn) + G(k-s, 2πn))`, valid for every `s`.
///
/// `None` when `N` is too small for the incomplete-gamma estimate to apply.
pub fn completed_tail_log2(k: u32, n: usize) -> Option<f64> {
    let two_pi = 2.0 * core::f64::consts::PI;
    let m = (n + 1) as f64;
    if two_pi * m < 2.0 * (k as f64 - 2.0) {
        return None;
    }
    // t_m = (4/π) m^{k/2-1} e^{-2πm}; consecutive ratios are at most rho.
    let a = k as f64 / 2.0 - 1.0;
    let log2_t = libm::log2(4.0 / core::f64::consts::PI) + a * libm::log2(m)
        - two_pi * m * core::f64::consts::LOG2_E;
    let log2_rho = a * libm::log2(1.0 + 1.0 / m) - two_pi * core::f64::consts::LOG2_E;
    if log2_rho >= -0.5 {
        return None;
    }
    Some(log2_t - libm::log2(1.0 - libm::exp2(log2_rho)) + 1.0)
}

/// `log2 ((2π)^s / (s-1)!)`, the factor taking `Λ(s)` to `L_f(s)`.
fn l_factor_log2(s: u32) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    s as f64 * libm::log2(two_pi) - libm::lgamma(s as f64) * core::f64::consts::LOG2_E
}

/// Smallest truncation `N` whose tail is below `2^{-prec-8}` both for `Λ(s)`
/// and for `L_f(s)` at every `s`.
pub fn truncation_length(k: u32, prec_bits: usize) -> usize {
    let worst_factor = (1..k).map(l_factor_log2).fold(0.0f64, f64::max);
    let target = -(prec_bits as f64) - 8.0 - worst_factor;
    let mut n = 1usize;
    loop {
        if let Some(t) = completed_tail_log2(k, n) {
            if t < target {
                return n;
            }
        }
        n += 1;
    }
}

/// `G(s, 2πn)` for `1 <= n <= N` and `1 <= s <= k-1`, shared by every form of weight `k`.
#[derive(Clone, Debug)]
pub struct GammaTable {
    pub weight: u32,
    pub prec_bits: usize,
    n_terms: usize,
    /// `g[n - 1][s - 1] = G(s, 2πn)`.
    g: Vec<Vec<Real>>,
}

impl GammaTable {
    pub fn new(k: u32, n_terms: usize, prec_bits: usize) -> Self {
        let work = word_prec(prec_bits + GUARD_BITS);
        let mut cx = Ctx::new(work);
        let two_pi = cx.two_pi();
        let q = cx.exp(&-&two_pi);
        let mut qn = Real::one(work);
        let mut g = Vec::with_capacity(n_terms);
        for n in 1..=n_terms {
            qn = &qn * &q;
            let x = two_pi.mul_i64(n as i64);
            let inv_x = Real::one(work) / &x;
            let mut row = Vec::with_capacity(k as usize - 1);
            let mut cur = &qn * &inv_x;
            row.push(cur.clone());
            for s in 1..k - 1 {
                cur = (cur.mul_i64(s as i64) + &qn) * &inv_x;
                row.push(cur.clone());
            }
            g.push(row);
        }
        GammaTable { weight: k, prec_bits, n_terms, g }
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    /// `G(s, 2πn)`.
    pub fn get(&self, s: u32, n: usize) -> &Real {
        &self.g[n - 1][s as usize - 1]
    }
}

/// One critical value with its certified truncation error.
#[derive(Clone, Debug)]
pub struct LValueRecord {
    pub s: u32,
    /// `L_f(s)`.
    pub value: Real,
    /// `Λ(s) = (2π)^{-s} Γ(s) L_f(s)`.
    pub completed: Real,
    /// Bound on `|L_f(s) - value|` from truncating at `n_terms_used`.
    pub tail_bound: Real,
    pub n_terms_used: usize,
    /// `|L_f(s) - 1| <= 4 * 2^{-k/4}`, checked when `s >= 3k/4`.
    pub bound1_ok: Option<bool>,
    /// `|L_f(s)| <= 2 sqrt(k) ln(2k) + 1`, checked when `s >= k/2`.
    pub bound2_ok: Option<bool>,
}

/// Every critical value of one eigenform, computed eagerly.
#[derive(Clone, Debug)]
pub struct LValues {
    pub weight: u32,
    pub prec_bits: usize,
    records: Vec<LValueRecord>,
}

impl LValues {
    /// Uses the default truncation for the form's precision.
    pub fn new(f: &Eigenform) -> Result<Self> {
        let n = truncation_length(f.weight, f.prec_bits);
        check_terms(f, n)?;
        let table = GammaTable::new(f.weight, n, f.prec_bits);
        Ok(Self::from_table(f, &table))
    }

    /// Truncates at exactly `n_terms`.
    pub fn with_terms(f: &Eigenform, n_terms: usize) -> Result<Self> {
        check_terms(f, n_terms)?;
        let table = GammaTable::new(f.weight, n_terms, f.prec_bits);
        Ok(Self::from_table(f, &table))
    }

    /// Reuses a table built for the same weight; `f` must have at least
    /// `table.n_terms()` coefficients.
    pub fn from_table(f: &Eigenform, table: &GammaTable) -> Self {
        assert_eq!(f.weight, table.weight, "gamma table built for another weight");
        assert!(f.n_coeffs() >= table.n_terms, "eigenform has too few coefficients");
        let k = f.weight;
        let mut cx = Ctx::new(word_prec(f.prec_bits + GUARD_BITS));
        let records = (1..k).map(|s| record(f, table, s, &mut cx)).collect();
        LValues { weight: k, prec_bits: f.prec_bits, records }
    }

    /// Record for `1 <= s <= k-1`.
    pub fn get(&self, s: u32) -> &LValueRecord {
        &self.records[s as usize - 1]
    }

    /// `L_f(s)`.
    pub fn value(&self, s: u32) -> &Real {
        &self.get(s).value
    }

    /// `Λ(s)`.
    pub fn completed(&self, s: u32) -> &Real {
        &self.get(s).completed
    }

    pub fn records(&self) -> &[LValueRecord] {
        &self.records
    }
}

fn check_terms(f: &Eigenform, n: usize) -> Result<()> {
    if f.n_coeffs() < n {
        return Err(Error::InsufficientCoefficients { s: 0, required: n, available: f.n_coeffs() });
    }
    Ok(())
}

fn reflection_sign(k: u32) -> i64 {
    if (k / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Λ(s)` and `Σ |a(n)| (G(s) + G(k-s))`, the scale of the computation.
fn completed_sum(f: &Eigenform, table: &GammaTable, s: u32) -> (Real, Real) {
    let k = f.weight;
    let work = word_prec(f.prec_bits + GUARD_BITS);
    let eps = reflection_sign(k);
    let mut acc = Real::zero(work);
    let mut mag = Real::zero(work);
    for n in 1..=table.n_terms {
        let a = f.a(n);
        let g1 = table.get(s, n);
        let g2 = table.get(k - s, n);
        let pair = if eps == 1 { g1 + g2 } else { g1 - g2 };
        acc += &(a * &pair);
        mag += &(a.abs() * (g1 + g2));
    }
    (acc, mag)
}

fn record(f: &Eigenform, table: &GammaTable, s: u32, cx: &mut Ctx) -> LValueRecord {
    let k = f.weight;
    let prec = f.prec_bits;
    let work = word_prec(prec + GUARD_BITS);
    let (completed, _) = completed_sum(f, table, s);
    let factor = cx.two_pi().powi(s) / factorial(s - 1, work);
    let value = &completed * &factor;
    let tail_log2 = completed_tail_log2(k, table.n_terms)
        .map_or(f64::INFINITY, |t| t + l_factor_log2(s));
    let tail_bound = if tail_log2.is_finite() {
        Real::pow2(libm::ceil(tail_log2) as i64, prec)
    } else {
        Real::from_f64(f64::MAX, prec)
    };
    let (bound1_ok, bound2_ok) = lemma_bounds(k, s, &value, &tail_bound, cx);
    LValueRecord {
        s,
        value: value.with_prec(prec),
        completed: completed.with_prec(prec),
        tail_bound,
        n_terms_used: table.n_terms,
        bound1_ok,
        bound2_ok,
    }
}

fn factorial(n: u32, prec: usize) -> Real {
    let mut acc = num_bigint::BigInt::from(1);
    for j in 2..=n {
        acc *= j;
    }
    Real::from_bigint(&acc, prec)
}

/// The two L-value bounds, each tested against `|value| + tail` so a pass
/// holds for the true value.
fn lemma_bounds(k: u32, s: u32, value: &Real, tail: &Real, cx: &mut Ctx) -> (Option<bool>, Option<bool>) {
    let prec = value.prec();
    let bound1 = (4 * s >= 3 * k).then(|| {
        let ln2 = cx.ln(&Real::from_i64(2, prec));
        let limit = cx.exp(&(ln2 * Real::from_f64(-(k as f64) / 4.0, prec))).mul_i64(4);
        (value - &Real::one(prec)).abs() + tail <= limit
    });
    let bound2 = (2 * s >= k).then(|| {
        let kk = Real::from_i64(k as i64, prec);
        let limit = kk.sqrt().mul_i64(2) * cx.ln(&kk.mul_i64(2)) + Real::one(prec);
        value.abs() + tail <= limit
    });
    (bound1, bound2)
}

/// A single record computed from scratch, independent of any cache.
pub fn completed_lvalue(f: &Eigenform, s: u32) -> Result<LValueRecord> {
    let k = f.weight;
    if s < 1 || s >= k {
        return Err(Error::OutOfStrip { s, max: k - 1 });
    }
    let n = truncation_length(k, f.prec_bits);
    if f.n_coeffs() < n {
        return Err(Error::InsufficientCoefficients { s, required: n, available: f.n_coeffs() });
    }
    let table = GammaTable::new(k, n, f.prec_bits);
    let mut cx = Ctx::new(word_prec(f.prec_bits + GUARD_BITS));
    Ok(record(f, &table, s, &mut cx))
}

/// `(s, bound1_ok, bound2_ok)` for every integer `s` in `[k/2, k-1]`.
pub fn check_lemma4_bounds(values: &LValues) -> Vec<(u32, Option<bool>, Option<bool>)> {
    let k = values.weight;
    (k / 2..k)
        .map(|s| {
            let r = values.get(s);
            (s, r.bound1_ok, r.bound2_ok)
        })
        .collect()
}

/// Largest `|Λ(s) - (-1)^{k/2} Λ(k-s)|` over `1 <= s <= k-1`, each side summed
/// on its own, divided by `max(1, Σ |a(n)| (G(s) + G(k-s)))`.
///
/// The divisor is the size of the terms being added; `Λ(s)` itself can be
/// far larger than 1 near the edges of the strip and vanishes at the centre
/// for `k ≡ 2 mod 4`.
pub fn functional_equation_residual(f: &Eigenform, table: &GammaTable) -> Real {
    let k = f.weight;
    let prec = f.prec_bits;
    let eps = reflection_sign(k);
    let mut worst = Real::zero(prec);
    for s in 1..k {
        let (left, mag) = completed_sum(f, table, s);
        let (right, _) = completed_sum(f, table, k - s);
        let diff = if eps == 1 { &left - &right } else { &left + &right };
        let scale = mag.max(Real::one(prec));
        worst = worst.max((diff.abs() / scale).with_prec(prec));
    }
    worst
}
