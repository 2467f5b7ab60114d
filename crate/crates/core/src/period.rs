//! Odd period polynomials, the weight-`w` slash action and the checks built on it.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact_series::{bernoulli, binomial};
use crate::hecke::Eigenform;
use crate::lfunction::LValues;
use crate::real::{Complex, Ctx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
    None,
}

/// Polynomial with multi-precision real coefficients indexed by power.
///
/// Trailing zero coefficients are dropped, so the stored length is
/// `degree + 1` (or 0 for the zero polynomial). A parity is recorded only
/// when the off-parity coefficients are exact zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    coeffs: Vec<Real>,
    parity: Parity,
    prec: usize,
}

impl RealPoly {
    pub fn new(mut coeffs: Vec<Real>, prec: usize) -> Self {
        while coeffs.last().is_some_and(Real::is_zero) {
            coeffs.pop();
        }
        let vanish = |start: usize| coeffs.iter().skip(start).step_by(2).all(Real::is_zero);
        let parity = if coeffs.is_empty() {
            Parity::None
        } else if vanish(0) {
            Parity::Odd
        } else if vanish(1) {
            Parity::Even
        } else {
            Parity::None
        };
        RealPoly { coeffs, parity, prec }
    }

    pub fn from_f64(coeffs: &[f64], prec: usize) -> Self {
        RealPoly::new(coeffs.iter().map(|&c| Real::from_f64(c, prec)).collect(), prec)
    }

    pub fn from_rationals(coeffs: &[BigRational], prec: usize) -> Self {
        RealPoly::new(coeffs.iter().map(|c| Real::from_ratio(c, prec)).collect(), prec)
    }

    pub fn zero(prec: usize) -> Self {
        RealPoly::new(Vec::new(), prec)
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Coefficient of `X^j`, zero beyond the degree.
    pub fn coeff(&self, j: usize) -> Real {
        self.coeffs.get(j).cloned().unwrap_or_else(|| Real::zero(self.prec))
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn max_abs_coeff(&self) -> Real {
        self.coeffs
            .iter()
            .fold(Real::zero(self.prec), |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, k: &Real) -> RealPoly {
        RealPoly::new(self.coeffs.iter().map(|c| c * k).collect(), self.prec)
    }

    pub fn add(&self, other: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RealPoly::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect(), self.prec)
    }

    pub fn sub(&self, other: &RealPoly) -> RealPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        RealPoly::new((0..n).map(|j| self.coeff(j) - other.coeff(j)).collect(), self.prec)
    }

    pub fn derivative(&self) -> RealPoly {
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.mul_i64(j as i64))
                .collect(),
            self.prec,
        )
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, x: &Real) -> Real {
        let mut acc = Real::zero(self.prec.max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc = &acc * x + c;
        }
        acc
    }

    /// Horner evaluation at a complex point, in `z^2` when the parity allows.
    pub fn eval(&self, z: &Complex) -> Complex {
        match self.parity {
            Parity::Odd if self.coeffs.len() > 2 => {
                let z2 = z * z;
                z * &horner_complex(self.coeffs.iter().skip(1).step_by(2), &z2, self.prec)
            }
            Parity::Even if self.coeffs.len() > 2 => {
                let z2 = z * z;
                horner_complex(self.coeffs.iter().step_by(2), &z2, self.prec)
            }
            _ => horner_complex(self.coeffs.iter(), z, self.prec),
        }
    }

    /// Value and derivative at a complex point in one Horner pass.
    pub fn eval_with_derivative(&self, z: &Complex) -> (Complex, Complex) {
        let prec = self.prec.max(z.prec());
        let mut p = Complex::zero(prec);
        let mut dp = Complex::zero(prec);
        for c in self.coeffs.iter().rev() {
            dp = &dp * z + &p;
            p = &p * z;
            p.re += c;
        }
        (p, dp)
    }

    /// `X^w P(1/X)` read off the coefficient vector.
    pub fn reciprocal(&self, w: usize) -> Result<RealPoly> {
        self.check_degree(w)?;
        Ok(RealPoly::new((0..=w).rev().map(|j| self.coeff(j)).collect(), self.prec))
    }

    /// Coefficients as doubles after a common scaling by `2^{-shift}`.
    pub fn to_f64_scaled(&self) -> (Vec<f64>, i64) {
        let shift = self
            .coeffs
            .iter()
            .filter_map(Real::exponent)
            .max()
            .unwrap_or(0);
        (self.coeffs.iter().map(|c| c.ldexp(-shift).to_f64()).collect(), shift)
    }

    fn check_degree(&self, w: usize) -> Result<()> {
        if self.degree() > w {
            return Err(Error::DegreeOverflow { degree: self.degree(), weight: w });
        }
        Ok(())
    }
}

/// Unimodular matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Moebius {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Moebius {
    pub const IDENTITY: Moebius = Moebius { a: 1, b: 0, c: 0, d: 1 };
    pub const S: Moebius = Moebius { a: 0, b: 1, c: -1, d: 0 };
    pub const U: Moebius = Moebius { a: 1, b: -1, c: 1, d: 0 };
    pub const U2: Moebius = Moebius { a: 0, b: -1, c: 1, d: -1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidParameters(alloc::format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {}",
                a * d - b * c
            )));
        }
        Ok(Moebius { a, b, c, d })
    }

    pub fn mul(&self, o: &Moebius) -> Moebius {
        Moebius {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// `(P | A)(z) = (cz + d)^w P((az + b)/(cz + d))`.
///
/// Expands `Σ_j p_j (az + b)^j (cz + d)^{w-j}` by a homogeneous Horner
/// scheme, `H_t = H_{t-1} (az + b) + p_{w-t} (cz + d)^t`.
pub fn slash(p: &RealPoly, m: &Moebius, w: usize) -> Result<RealPoly> {
    p.check_degree(w)?;
    let prec = p.prec();
    let mul_linear = |h: &[Real], s: i64, t: i64| {
        // (s z + t) h(z)
        let mut out = vec![Real::zero(prec); h.len() + 1];
        for (i, c) in h.iter().enumerate() {
            if t != 0 {
                out[i] += &c.mul_i64(t);
            }
            if s != 0 {
                out[i + 1] += &c.mul_i64(s);
            }
        }
        out
    };
    let mut h = vec![p.coeff(w)];
    let mut v_pow = vec![Real::one(prec)];
    for t in 1..=w {
        h = mul_linear(&h, m.a, m.b);
        v_pow = mul_linear(&v_pow, m.c, m.d);
        let c = p.coeff(w - t);
        if !c.is_zero() {
            for (hi, vi) in h.iter_mut().zip(&v_pow) {
                *hi += &(vi * &c);
            }
        }
    }
    Ok(RealPoly::new(h, prec))
}

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn horner_complex<'a, I>(coeffs: I, z: &Complex, prec: usize) -> Complex
where
    I: DoubleEndedIterator<Item = &'a Real>,
{
    let prec = prec.max(z.prec());
    let mut re = Real::zero(prec);
    let mut im = Real::zero(prec);
    for c in coeffs.rev() {
        let nr = &re * &z.re - &im * &z.im + c;
        im = &re * &z.im + &im * &z.re;
        re = nr;
    }
    Complex::new(re, im)
}

/// `r_f^-(X) = Σ_{n odd} (-1)^{(n-1)/2} C(w, n) n! (2π)^{-n-1} L_f(n+1) X^{w-n}`.
///
/// `n! (2π)^{-n-1} L_f(n+1)` is the completed value `Λ(n+1)`. Coefficients
/// of degree at least `w/2` are computed and the rest mirrored, so the
/// self-reciprocity `c_j = c_{w-j}` holds exactly.
pub fn odd_period_polynomial(f: &Eigenform, lv: &LValues) -> RealPoly {
    let w = f.w as usize;
    let prec = f.prec_bits;
    let mut coeffs = vec![Real::zero(prec); w];
    for n in (1..w).step_by(2).filter(|&n| 2 * n <= w) {
        let c = lv
            .completed(n as u32 + 1)
            .mul_i64(sign((n - 1) / 2))
            * Real::from_bigint(&binomial(w as u64, n as u64), prec);
        coeffs[n] = c.clone();
        coeffs[w - n] = c;
    }
    RealPoly::new(coeffs, prec)
}

/// `p(X) = Σ_{m=0}^{w/2-1} (-1)^m (2πX)^{2m+1} / (2m+1)! L_f(w - 2m)`,
/// built term by term from the L-values; a constant multiple of `r_f^-`.
pub fn normalized_p(f: &Eigenform, lv: &LValues) -> RealPoly {
    let w = f.w as usize;
    let prec = f.prec_bits;
    let mut cx = Ctx::new(prec);
    let terms = sine_terms(w, prec, &mut cx);
    let mut coeffs = vec![Real::zero(prec); w];
    for m in 0..w / 2 {
        coeffs[2 * m + 1] = &terms[2 * m + 1] * lv.value((w - 2 * m) as u32);
    }
    RealPoly::new(coeffs, prec)
}

/// `(-1)^m (2π)^{2m+1} / (2m+1)!` at index `2m+1`, zero at even indices, up to `deg`.
fn sine_terms(deg: usize, prec: usize, cx: &mut Ctx) -> Vec<Real> {
    let two_pi = cx.two_pi();
    let mut out = vec![Real::zero(prec); deg + 1];
    let mut t = Real::one(prec);
    for j in 1..=deg {
        t = (&t * &two_pi).div_i64(j as i64);
        if j % 2 == 1 {
            out[j] = t.mul_i64(sign((j - 1) / 2));
        }
    }
    out
}

/// The factor `(-1)^{k/2} w! (2π)^{-w-1}` with `r_f^- = factor · p`.
pub fn r_over_p(w: usize, prec: usize, cx: &mut Ctx) -> Real {
    let mut fact = BigInt::one();
    for j in 2..=w as u64 {
        fact *= j;
    }
    let two_pi = cx.two_pi();
    (Real::from_bigint(&fact, prec) / two_pi.powi(w as u32 + 1)).mul_i64(sign(w / 2 + 1))
}

/// The half `q_f` with `p(X) = q_f(X) + X^w q_f(1/X)`.
///
/// Holds the terms of degree below `w/2`, `m <= (w-4)/4`, and when `w/2` is
/// odd the halved central term `(-1)^{(w-2)/4} (2πX)^{w/2} L_f(w/2+1) / (2 (w/2)!)`.
pub fn q_split(f: &Eigenform, lv: &LValues) -> RealPoly {
    let w = f.w as usize;
    let prec = f.prec_bits;
    let mut cx = Ctx::new(prec);
    let terms = sine_terms(w / 2, prec, &mut cx);
    let mut coeffs = vec![Real::zero(prec); w / 2 + 1];
    for m in 0..=(w - 4) / 4 {
        coeffs[2 * m + 1] = &terms[2 * m + 1] * lv.value((w - 2 * m) as u32);
    }
    if w % 4 == 2 {
        let c = w / 2;
        coeffs[c] = (&terms[c] * lv.value(c as u32 + 1)).ldexp(-1);
    }
    RealPoly::new(coeffs, prec)
}

/// Largest `|p(z) - q(z) - z^w q(1/z)|` over the given points.
pub fn reconstruction_residual(p: &RealPoly, q: &RealPoly, w: usize, points: &[Complex]) -> Real {
    let mut worst = Real::zero(p.prec());
    for z in points {
        let zi = z.inv();
        let zw = complex_powi(z, w as u32);
        let r = p.eval(z) - q.eval(z) - zw * q.eval(&zi);
        worst = worst.max(r.abs());
    }
    worst
}

pub(crate) fn complex_powi(z: &Complex, mut n: u32) -> Complex {
    let mut acc = Complex::from_real(Real::one(z.prec()));
    let mut base = z.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = &acc * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Deterministic points spread over `4/5 <= |z| <= 5/4`.
pub fn sample_points(count: usize, prec: usize) -> Vec<Complex> {
    let golden = 0.618_033_988_749_894_9_f64;
    let root2 = core::f64::consts::SQRT_2 - 1.0;
    (0..count)
        .map(|j| {
            let t = libm::fmod(j as f64 * golden + 0.1, 1.0);
            let r = 0.8 + 0.45 * libm::fmod(j as f64 * root2 + 0.3, 1.0);
            let th = 2.0 * core::f64::consts::PI * t;
            Complex::from_f64(r * libm::cos(th), r * libm::sin(th), prec)
        })
        .collect()
}

/// Normalized residuals of the period relations at weight `w + 2`.
#[derive(Clone, Debug)]
pub struct CocycleResidual {
    /// `max |coeff of P|(1 + S)| / max |coeff of P|`.
    pub s_relation: Real,
    /// `max |coeff of P|(1 + U + U^2)| / max |coeff of P|`.
    pub u_relation: Real,
}

impl CocycleResidual {
    pub fn max(&self) -> Real {
        self.s_relation.clone().max(self.u_relation.clone())
    }
}

pub fn check_cocycle_relations(p: &RealPoly, k: usize) -> Result<CocycleResidual> {
    if k < 2 {
        return Err(Error::InvalidWeight(k as i64));
    }
    let w = k - 2;
    let prec = p.prec();
    if p.is_zero() {
        return Ok(CocycleResidual { s_relation: Real::zero(prec), u_relation: Real::zero(prec) });
    }
    let scale = p.max_abs_coeff();
    let rel_s = p.add(&slash(p, &Moebius::S, w)?);
    let rel_u = p.add(&slash(p, &Moebius::U, w)?).add(&slash(p, &Moebius::U2, w)?);
    Ok(CocycleResidual {
        s_relation: rel_s.max_abs_coeff() / &scale,
        u_relation: rel_u.max_abs_coeff() / &scale,
    })
}

/// One evaluation of the trivial-zero certificate.
#[derive(Clone, Debug)]
pub struct TrivialCheck {
    pub label: &'static str,
    pub residual: Real,
    pub tolerance: Real,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct TrivialZeroCertificate {
    /// `P(0), P(±1), P'(±1), P(±2), P(±1/2)`.
    pub evaluations: Vec<TrivialCheck>,
    /// `P(2) + 2^w P(1/2)` and `P(2) - 2^w P(1/2)`.
    pub identities: Vec<TrivialCheck>,
}

impl TrivialZeroCertificate {
    pub fn passed(&self) -> bool {
        self.evaluations.iter().chain(&self.identities).all(|c| c.ok)
    }
}

/// Checks the forced zeros `0, ±1 (double), ±2, ±1/2` of an odd period polynomial.
///
/// The tolerance at a point `x` is `2^{-prec/2} max|c_j| max(1, |x|)^w`,
/// multiplied by `w` for derivative values.
pub fn trivial_zero_certificate(r: &RealPoly, w: usize) -> Result<TrivialZeroCertificate> {
    if r.parity() != Parity::Odd && !r.is_zero() {
        return Err(Error::InvalidParameters("trivial-zero certificate needs an odd polynomial".into()));
    }
    r.check_degree(w)?;
    let prec = r.prec();
    let dr = r.derivative();
    let base = r.max_abs_coeff().ldexp(-(prec as i64) / 2);
    let tol = |log2_mag: i64, deriv: bool| {
        let t = base.ldexp(log2_mag.max(0) * w as i64);
        if deriv {
            t.mul_i64(w.max(1) as i64)
        } else {
            t
        }
    };
    let x = |num: i64, log2_den: i64| Real::from_i64(num, prec).ldexp(-log2_den);
    let mut evaluations = Vec::with_capacity(9);
    let mut push = |label, value: Real, tolerance: Real| {
        let residual = value.abs();
        let ok = residual <= tolerance;
        evaluations.push(TrivialCheck { label, residual, tolerance, ok });
    };
    push("P(0)", r.coeff(0), tol(0, false));
    push("P(1)", r.eval_real(&x(1, 0)), tol(0, false));
    push("P(-1)", r.eval_real(&x(-1, 0)), tol(0, false));
    push("P'(1)", dr.eval_real(&x(1, 0)), tol(0, true));
    push("P'(-1)", dr.eval_real(&x(-1, 0)), tol(0, true));
    push("P(2)", r.eval_real(&x(2, 0)), tol(1, false));
    push("P(-2)", r.eval_real(&x(-2, 0)), tol(1, false));
    push("P(1/2)", r.eval_real(&x(1, 1)), tol(0, false));
    push("P(-1/2)", r.eval_real(&x(-1, 1)), tol(0, false));

    let p2 = r.eval_real(&x(2, 0));
    let p_half = r.eval_real(&x(1, 1)).ldexp(w as i64);
    let id_tol = tol(1, false).mul_i64(2);
    let identities = [("P(2)+2^wP(1/2)", &p2 + &p_half), ("P(2)-2^wP(1/2)", &p2 - &p_half)]
        .into_iter()
        .map(|(label, v)| {
            let residual = v.abs();
            let ok = residual <= id_tol;
            TrivialCheck { label, residual, tolerance: id_tol.clone(), ok }
        })
        .collect();
    Ok(TrivialZeroCertificate { evaluations, identities })
}

/// `B^0_m(X) = Σ_{i=0, i≠1}^{m} C(m, i) B_i X^{m-i}`, indexed by power.
fn bernoulli_b0(m: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); m + 1];
    for i in (0..=m).filter(|&i| i != 1) {
        let b = bernoulli(i);
        if !b.is_zero() {
            out[m - i] = b * binomial(m as u64, i as u64);
        }
    }
    out
}

/// Exact odd period polynomial of the cusp form `R_n` at slash weight `w`:
/// `(-1)^{k/2+n/2} 2^w [B^0_{ñ+1}/(ñ+1) - B^0_{n+1}/(n+1)] | (I - S)`, `ñ = w - n`.
pub fn bernoulli_period_polynomial_exact(n: usize, w: usize) -> Result<Vec<BigRational>> {
    if w < 2 || w % 2 == 1 || n == 0 || n >= w || n % 2 == 1 {
        return Err(Error::InvalidParameters(alloc::format!(
            "Bernoulli-type polynomial needs even n with 0 < n < w and even w, got n = {n}, w = {w}"
        )));
    }
    let nt = w - n;
    let mut f = vec![BigRational::zero(); w + 1];
    for (j, c) in bernoulli_b0(nt + 1).into_iter().enumerate() {
        f[j] += c / BigInt::from(nt + 1);
    }
    for (j, c) in bernoulli_b0(n + 1).into_iter().enumerate() {
        f[j] -= c / BigInt::from(n + 1);
    }
    // (F | S)(z) = z^w F(-1/z): coefficient of z^{w-j} is (-1)^j F_j.
    let mut g = f.clone();
    for (j, c) in f.iter().enumerate() {
        let term = if j % 2 == 0 { c.clone() } else { -c.clone() };
        g[w - j] -= term;
    }
    let k = w + 2;
    let s = sign(k / 2 + n / 2);
    let two_w = BigInt::one() << w;
    let factor = BigRational::from_integer(two_w * s);
    let mut out: Vec<BigRational> = g.into_iter().map(|c| c * &factor).collect();
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    Ok(out)
}

pub fn bernoulli_period_polynomial(n: usize, w: usize, prec: usize) -> Result<RealPoly> {
    Ok(RealPoly::from_rationals(&bernoulli_period_polynomial_exact(n, w)?, prec))
}

/// Linear independence of the odd period polynomials of one weight.
#[derive(Clone, Debug)]
pub struct SpanCheck {
    pub dim: usize,
    /// `|det| / Π ||row||` for the matrix of the first `dim` odd coefficients,
    /// each column scaled to unit maximum.
    pub hadamard_ratio: Real,
    pub independent: bool,
}

pub fn span_check(polys: &[RealPoly]) -> SpanCheck {
    let dim = polys.len();
    let prec = polys.first().map_or(64, RealPoly::prec);
    if dim == 0 {
        return SpanCheck { dim, hadamard_ratio: Real::one(prec), independent: true };
    }
    let mut m: Vec<Vec<Real>> = polys
        .iter()
        .map(|p| (0..dim).map(|i| p.coeff(2 * i + 1)).collect())
        .collect();
    for col in 0..dim {
        let top = (0..dim).fold(Real::zero(prec), |acc, r| acc.max(m[r][col].abs()));
        if !top.is_zero() {
            for row in m.iter_mut() {
                row[col] = &row[col] / &top;
            }
        }
    }
    let mut norms = Real::one(prec);
    for row in &m {
        let n2 = row.iter().fold(Real::zero(prec), |acc, x| acc + x * x);
        norms = norms * n2.sqrt();
    }
    let mut det = Real::one(prec);
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].is_zero() {
            det = Real::zero(prec);
            break;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det = &det * &m[col][col];
        for r in col + 1..dim {
            let factor = &m[r][col] / &m[col][col];
            for c in col..dim {
                let t = &factor * &m[col][c];
                m[r][c] -= &t;
            }
        }
    }
    let ratio = if norms.is_zero() { Real::zero(prec) } else { det.abs() / norms };
    let independent = !ratio.is_zero() && ratio.log2_abs() > -(prec as f64) / 4.0;
    SpanCheck { dim, hadamard_ratio: ratio, independent }
}

/// True when `c_j = c_{w-j}` holds bit for bit.
pub fn is_self_reciprocal(p: &RealPoly, w: usize) -> bool {
    (0..=w).all(|j| p.coeff(j) == p.coeff(w - j) && p.coeff(j).prec() == p.coeff(w - j).prec())
        && p.degree() <= w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::eigenforms;
    use crate::{default_n_coeffs, default_prec_bits};
    use proptest::prelude::*;

    fn poly(v: &[i64]) -> RealPoly {
        RealPoly::new(v.iter().map(|&c| Real::from_i64(c, 192)).collect(), 192)
    }

    fn ints(p: &RealPoly) -> Vec<i64> {
        p.coeffs().iter().map(|c| libm::round(c.to_f64()) as i64).collect()
    }

    /// Independent oracle: expand `(cz+d)^w p((az+b)/(cz+d))` with i128 binomials.
    fn slash_oracle(p: &[i64], m: &Moebius, w: usize) -> Vec<i128> {
        let lin_pow = |s: i64, t: i64, e: usize| {
            let mut v = std::vec![1i128];
            for _ in 0..e {
                let mut n = std::vec![0i128; v.len() + 1];
                for (i, c) in v.iter().enumerate() {
                    n[i] += c * t as i128;
                    n[i + 1] += c * s as i128;
                }
                v = n;
            }
            v
        };
        let mut out = std::vec![0i128; w + 1];
        for (j, &c) in p.iter().enumerate() {
            let u = lin_pow(m.a, m.b, j);
            let v = lin_pow(m.c, m.d, w - j);
            for (i, x) in u.iter().enumerate() {
                for (l, y) in v.iter().enumerate() {
                    out[i + l] += c as i128 * x * y;
                }
            }
        }
        out
    }

    #[test]
    fn slash_examples() {
        let x = poly(&[0, 1]);
        assert_eq!(slash(&x, &Moebius::IDENTITY, 2).unwrap(), x);
        assert_eq!(ints(&slash(&x, &Moebius::S, 2).unwrap()), std::vec![0, -1]);
        assert!(matches!(
            slash(&poly(&[0, 0, 0, 1]), &Moebius::S, 2),
            Err(Error::DegreeOverflow { degree: 3, weight: 2 })
        ));
        assert!(Moebius::new(2, 1, 1, 1).is_ok());
        assert!(Moebius::new(2, 1, 1, 2).is_err());
        assert_eq!(Moebius::U.mul(&Moebius::U), Moebius::U2);
        let u3 = Moebius::U2.mul(&Moebius::U);
        assert_eq!((u3.a, u3.b, u3.c, u3.d), (-1, 0, 0, -1));
    }

    proptest! {
        #[test]
        fn slash_matches_binomial_expansion(
            coeffs in proptest::collection::vec(-20i64..20, 1..8),
            which in 0usize..4,
            extra in 0usize..3,
        ) {
            let m = [Moebius::IDENTITY, Moebius::S, Moebius::U, Moebius::U2][which];
            let w = coeffs.len() - 1 + extra;
            let got = slash(&poly(&coeffs), &m, w).unwrap();
            let want = slash_oracle(&coeffs, &m, w);
            for (j, c) in want.iter().enumerate() {
                prop_assert_eq!(libm::round(got.coeff(j).to_f64()) as i128, *c);
            }
        }

        #[test]
        fn slash_is_an_action(coeffs in proptest::collection::vec(-9i64..9, 1..7)) {
            let w = 6;
            let p = poly(&coeffs);
            let two_steps = slash(&slash(&p, &Moebius::U, w).unwrap(), &Moebius::U, w).unwrap();
            let direct = slash(&p, &Moebius::U.mul(&Moebius::U), w).unwrap();
            prop_assert_eq!(ints(&two_steps), ints(&direct));
        }
    }

    #[test]
    fn cocycle_examples() {
        let x = poly(&[0, 1]);
        let r = check_cocycle_relations(&x, 4).unwrap();
        assert!(r.max().to_f64() > 0.5);
        let z = check_cocycle_relations(&RealPoly::zero(192), 12).unwrap();
        assert!(z.max().is_zero());
    }

    #[test]
    fn trivial_certificate_rejects_missing_double_zero() {
        let p = poly(&[0, -4, 0, 1]);
        let cert = trivial_zero_certificate(&p, 4).unwrap();
        let d1 = cert.evaluations.iter().find(|c| c.label == "P'(1)").unwrap();
        assert!(!d1.ok);
        assert!(!cert.passed());
        assert!(trivial_zero_certificate(&poly(&[1, 1]), 4).is_err());
    }

    /// `X (X^2 - 4)(X^2 - 1/4)(X^2 - 1)^2`, times 4 to clear the fraction.
    fn delta_shape() -> Vec<i64> {
        let mul = |a: &[i64], b: &[i64]| {
            let mut o = std::vec![0i64; a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    o[i + j] += x * y;
                }
            }
            o
        };
        let mut p = std::vec![0, 1];
        for f in [&[-4i64, 0, 1][..], &[-1, 0, 4], &[-1, 0, 1], &[-1, 0, 1]] {
            p = mul(&p, f);
        }
        p
    }

    #[test]
    fn weight_12_has_the_closed_form() {
        let f = &eigenforms(12, 64, 192).unwrap()[0];
        let lv = LValues::new(f).unwrap();
        let r = odd_period_polynomial(f, &lv);
        let shape = delta_shape();
        assert_eq!(r.degree(), 9);
        let c = &r.coeff(9) / &Real::from_i64(shape[9], 192);
        let mut worst = f64::NEG_INFINITY;
        for (j, s) in shape.iter().enumerate() {
            let want = c.mul_i64(*s);
            let err = (&r.coeff(j) - &want).abs();
            if !err.is_zero() {
                worst = worst.max(err.log2_abs() - r.max_abs_coeff().log2_abs());
            }
        }
        assert!(worst < -64.0, "relative error 2^{worst}");
        assert!(trivial_zero_certificate(&r, 10).unwrap().passed());
    }

    #[test]
    fn period_polynomials_of_eigenforms() {
        for k in [16u32, 22, 24, 34] {
            let prec = default_prec_bits(k);
            let w = k as usize - 2;
            let mut rs = Vec::new();
            let mut cx = Ctx::new(prec);
            for f in eigenforms(k, default_n_coeffs(k), prec).unwrap() {
                let lv = LValues::new(&f).unwrap();
                let r = odd_period_polynomial(&f, &lv);
                assert_eq!(r.degree(), w - 1);
                assert_eq!(r.parity(), Parity::Odd);
                assert!(is_self_reciprocal(&r, w));
                // top coefficient: C(w,1) (2π)^{-2} L(2)
                let top = lv.value(2).mul_i64(w as i64) / cx.two_pi().powi(2);
                assert!(((&r.coeff(w - 1) - &top) / &top).log2_abs() < -(prec as f64) / 2.0);

                let cert = trivial_zero_certificate(&r, w).unwrap();
                assert!(cert.passed(), "k={k} {cert:?}");
                let coc = check_cocycle_relations(&r, k as usize).unwrap();
                assert!(coc.max().log2_abs() < -(prec as f64) / 2.0, "k={k}");
                let minus_r = slash(&r, &Moebius::S, w).unwrap().add(&r);
                let gap = minus_r.max_abs_coeff().log2_abs() - r.max_abs_coeff().log2_abs();
                assert!(gap < -(prec as f64) / 2.0);

                let p = normalized_p(&f, &lv);
                let factor = r_over_p(w, prec, &mut cx);
                let diff = r.sub(&p.scale(&factor)).max_abs_coeff() / r.max_abs_coeff();
                assert!(diff.log2_abs() < -(prec as f64) / 2.0, "k={k}");
                let m0 = &cx.two_pi() * lv.value(w as u32);
                assert!((&p.coeff(1) - &m0).abs().log2_abs() < -(prec as f64) / 2.0);

                let q = q_split(&f, &lv);
                if k % 4 == 2 {
                    assert!(q.coeff(w / 2).is_zero());
                }
                let pts = sample_points(100, prec);
                let res = reconstruction_residual(&p, &q, w, &pts);
                assert!(res.log2_abs() < -(prec as f64) / 2.0, "k={k}");
                let one = Complex::from_f64(1.0, 0.0, prec);
                let m_one = Complex::from_f64(-1.0, 0.0, prec);
                assert!(q.eval(&one).abs().log2_abs() < -(prec as f64) / 2.0);
                assert!(q.eval(&m_one).abs().log2_abs() < -(prec as f64) / 2.0);
                rs.push(r);
            }
            let span = span_check(&rs);
            assert!(span.independent, "k={k}");
        }
    }

    #[test]
    fn p_and_r_share_roots() {
        let k = 28u32;
        let prec = default_prec_bits(k);
        let f = &eigenforms(k, default_n_coeffs(k), prec).unwrap()[0];
        let lv = LValues::new(f).unwrap();
        let r = odd_period_polynomial(f, &lv);
        let p = normalized_p(f, &lv);
        let mut cx = Ctx::new(prec);
        let factor = r_over_p(26, prec, &mut cx);
        for j in 0..50 {
            let th = 2.0 * core::f64::consts::PI * (j as f64 + 0.37) / 50.0;
            let z = Complex::from_f64(1.2 * th.cos(), 1.2 * th.sin(), prec);
            let a = r.eval(&z);
            let b = p.eval(&z).scale(&factor);
            assert!(((a.clone() - b).abs() / a.abs()).log2_abs() < -(prec as f64) / 2.0);
        }
    }

    #[test]
    fn bernoulli_polynomials_are_period_polynomials() {
        for w in [10usize, 14, 18, 22] {
            for n in (2..w).step_by(2) {
                let exact = bernoulli_period_polynomial_exact(n, w).unwrap();
                assert!(exact.iter().step_by(2).all(Zero::is_zero), "n={n} w={w}");
                let mirror = bernoulli_period_polynomial_exact(w - n, w).unwrap();
                let same = exact == mirror;
                let opposite = exact.iter().zip(&mirror).all(|(a, b)| a == &-b.clone());
                assert!(same || opposite);
                let p = bernoulli_period_polynomial(n, w, 256).unwrap();
                assert_eq!(p.parity(), Parity::Odd);
                let res = check_cocycle_relations(&p, w + 2).unwrap();
                assert!(res.max().is_zero() || res.max().log2_abs() < -128.0, "n={n} w={w}");
            }
        }
        assert!(bernoulli_period_polynomial_exact(3, 10).is_err());
        assert!(bernoulli_period_polynomial_exact(10, 10).is_err());
        assert!(bernoulli_period_polynomial_exact(0, 10).is_err());
    }

    #[test]
    fn parity_and_reciprocal() {
        let p = poly(&[0, 3, 0, 5]);
        assert_eq!(p.parity(), Parity::Odd);
        assert_eq!(poly(&[1, 0, 2]).parity(), Parity::Even);
        assert_eq!(poly(&[1, 1]).parity(), Parity::None);
        assert_eq!(ints(&p.reciprocal(4).unwrap()), std::vec![0, 5, 0, 3]);
        assert!(is_self_reciprocal(&poly(&[0, 2, 0, 2]), 4));
        assert!(!is_self_reciprocal(&poly(&[0, 2, 0, 3]), 4));
    }
}
