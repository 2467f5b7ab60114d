//! Hecke operators on q-expansions and real embeddings of level-one eigenforms.
//!
//! Eigenvalues of `T_2` come from its exact characteristic polynomial: sign
//! changes on a dyadic grid isolate the (real, simple) roots, bisection and
//! Newton steps refine them, and the eigenvector is solved in working
//! precision against the echelon basis.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact_series::{cusp_basis, cusp_dimension, CuspBasis, QSeries};
use crate::real::{word_prec, Real};

/// `T_m` applied to a weight-`k` q-expansion: `b(n) = sum_{d | gcd(m,n)} d^{k-1} a(mn/d^2)`.
pub fn hecke_apply(series: &QSeries, m: u64, k: u32, out_order: usize) -> Result<QSeries> {
    assert!(m >= 1, "Hecke index must be positive");
    let need = if out_order == 0 { 0 } else { m as usize * (out_order - 1) + 1 };
    if series.order() < need {
        return Err(Error::InsufficientOrder { have: series.order(), need });
    }
    let mut out = Vec::with_capacity(out_order);
    for n in 0..out_order as u64 {
        let g = if n == 0 { m } else { m.gcd(&n) };
        let mut acc = BigRational::zero();
        for d in (1..=g).filter(|d| g % d == 0) {
            let idx = (m * n / (d * d)) as usize;
            let a = series.coeff(idx);
            if !a.is_zero() {
                acc += a * BigInt::from(d).pow(k - 1);
            }
        }
        out.push(acc);
    }
    Ok(QSeries::new(out))
}

/// Exact matrix of `T_m` on the echelon basis: `T_m(form_j) = sum_i M[i][j] form_i`.
pub fn hecke_matrix(basis: &CuspBasis, m: u64) -> Result<Vec<Vec<BigRational>>> {
    let dim = basis.dim();
    let mut mat = vec![vec![BigRational::zero(); dim]; dim];
    for (j, form) in basis.forms.iter().enumerate() {
        let image = hecke_apply(form, m, basis.weight, dim + 1)?;
        for (i, row) in mat.iter_mut().enumerate() {
            row[j] = image.coeff(i + 1).clone();
        }
    }
    Ok(mat)
}

/// Characteristic polynomial `det(xI - A)`, coefficients indexed by power.
///
/// With `D` the common denominator of `A`, the Faddeev–LeVerrier recursion
/// runs on the integer matrix `DA` and the result is rescaled.
pub fn charpoly(a: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = a.len();
    let den = a
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let b: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|c| c.numer() * (&den / c.denom())).collect())
        .collect();
    let cb = charpoly_int(&b);
    let mut scale = BigInt::one();
    let mut out = vec![BigRational::zero(); n + 1];
    for i in (0..=n).rev() {
        out[i] = BigRational::new(cb[i].clone(), scale.clone());
        scale *= &den;
    }
    out
}

fn charpoly_int(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = next;
        let trace: BigInt = (0..n)
            .map(|i| (0..n).map(|j| &a[i][j] * &m[j][i]).sum::<BigInt>())
            .sum();
        coeffs[n - k] = -trace / BigInt::from(k);
    }
    coeffs
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

fn poly_trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let top = r.len() - 1;
        let q = &r[top] / lead;
        for i in 0..=db {
            let t = &q * &b[i];
            r[top - db + i] -= t;
        }
        r.pop();
        r = poly_trim(r);
    }
    r
}

/// True when `p` shares no root with its derivative.
///
/// A reduction modulo a prime that keeps the degree and is squarefree
/// settles the question at once; otherwise the Euclidean algorithm runs
/// over the rationals.
pub fn is_squarefree(p: &[BigRational]) -> bool {
    let p = poly_trim(p.to_vec());
    if p.len() <= 2 {
        return true;
    }
    let den = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    for q in small_primes(30) {
        let qb = BigInt::from(q);
        let red: Vec<u64> = ints
            .iter()
            .map(|c| c.mod_floor(&qb).to_u64().expect("residue fits"))
            .collect();
        if red[red.len() - 1] == 0 {
            continue;
        }
        let deriv: Vec<u64> = red
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * (i as u64 % q) % q)
            .collect();
        if fp_gcd(&red, &deriv, q).len() == 1 {
            return true;
        }
    }
    let dp: Vec<BigRational> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let mut a = p;
    let mut b = poly_trim(dp);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn eval_scaled(p: &[BigInt], num: &BigInt, shift: u32) -> BigInt {
    // p(num / 2^shift) * 2^(shift * deg)
    let deg = p.len() - 1;
    let mut acc = BigInt::zero();
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * num + (c << (shift as usize * (deg - i)));
    }
    acc
}

/// Brackets for every real root of a squarefree integer polynomial inside `[-bound, bound]`.
///
/// Returns dyadic endpoints `(lo, hi)` as numerators over `2^shift`; equal
/// endpoints mark an exact root on the grid.
fn isolate_real_roots(p: &[BigInt], bound_log2: u32, expected: usize) -> Option<(u32, Vec<(BigInt, BigInt)>)> {
    let sign = |v: &BigInt| v.sign();
    for shift in 6..=20u32 {
        // Grid points num / 2^shift covering [-2^bound_log2, 2^bound_log2].
        let half = BigInt::one() << (bound_log2 + shift) as usize;
        let step = BigInt::one() << bound_log2 as usize;
        let mut brackets = Vec::new();
        let mut prev: Option<(BigInt, num_bigint::Sign)> = None;
        let mut x = -half.clone();
        while x <= half {
            let v = eval_scaled(p, &x, shift);
            let s = sign(&v);
            if s == num_bigint::Sign::NoSign {
                brackets.push((x.clone(), x.clone()));
                prev = None;
            } else {
                if let Some((px, ps)) = &prev {
                    if *ps != s {
                        brackets.push((px.clone(), x.clone()));
                    }
                }
                prev = Some((x.clone(), s));
            }
            x += &step;
        }
        if brackets.len() == expected {
            return Some((shift, brackets));
        }
    }
    None
}

fn eval_real(p: &[Real], x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut v = Real::zero(prec);
    let mut dv = Real::zero(prec);
    for c in p.iter().rev() {
        dv = &dv * x + &v;
        v = &v * x + c;
    }
    (v, dv)
}

fn refine_root(p: &[Real], lo: Real, hi: Real, prec: usize) -> Real {
    let mut lo = lo;
    let mut hi = hi;
    if lo == hi {
        return lo;
    }
    let s_lo = eval_real(p, &lo).0.signum();
    let half = Real::from_f64(0.5, prec);
    for _ in 0..48 {
        let mid = (&lo + &hi) * &half;
        let s = eval_real(p, &mid).0.signum();
        if s == 0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = (&lo + &hi) * &half;
    for _ in 0..200 {
        let (v, dv) = eval_real(p, &x);
        if v.is_zero() {
            break;
        }
        if v.signum() == s_lo {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let tol = x.abs().max(Real::one(prec)) * Real::pow2(-(prec as i64) + 8, prec);
        let newton = (!dv.is_zero()).then(|| &v / &dv);
        // A Newton step below the tolerance has converged even when rounding
        // puts it on the bracket edge.
        if let Some(d) = &newton {
            if d.abs() <= tol {
                x = &x - d;
                break;
            }
        }
        let mut next = match newton {
            Some(d) => &x - &d,
            None => (&lo + &hi) * &half,
        };
        if next <= lo || next >= hi {
            next = (&lo + &hi) * &half;
        }
        x = next;
        if (&hi - &lo).abs() <= tol {
            break;
        }
    }
    x
}

// --- irreducibility over the rationals, certified modulo small primes ---

fn fp_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow(a, p - 2, p)
}

fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = fp_trim(a.to_vec());
    let db = b.len() - 1;
    let inv = fp_inv(b[db], p);
    while r.len() > db {
        let top = r.len() - 1;
        let q = r[top] * inv % p;
        for i in 0..=db {
            let t = q * b[i] % p;
            let idx = top - db + i;
            r[idx] = (r[idx] + p - t) % p;
        }
        r = fp_trim(r);
    }
    r
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&out, f, p)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = fp_trim(a.to_vec());
    let mut b = fp_trim(b.to_vec());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin-style test: a squarefree monic `f` of degree `n` is irreducible over
/// `F_p` iff `gcd(f, x^{p^i} - x) = 1` for `i <= n/2`.
fn irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u64];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(&acc, &base, f, p);
            }
            base = fp_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = fp_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn small_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = 3u64;
    while out.len() < count {
        if (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0) {
            out.push(n);
        }
        n += 2;
    }
    out
}

/// Certifies irreducibility over `Q` of a monic integer polynomial by finding
/// a prime where its reduction is squarefree and irreducible.
pub fn certified_irreducible(f: &[BigInt]) -> bool {
    if f.len() <= 2 {
        return true;
    }
    for p in small_primes(400) {
        let pb = BigInt::from(p);
        let red: Vec<u64> = f
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits"))
            .collect();
        let deriv: Vec<u64> = red
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * (i as u64 % p) % p)
            .collect();
        if fp_gcd(&red, &deriv, p).len() > 1 {
            continue;
        }
        if irreducible_mod_p(&red, p) {
            return true;
        }
    }
    false
}

/// Degree over `Q` of each root, for a characteristic polynomial that might
/// factor: smallest subset of the roots containing root `i` whose monic
/// product has integer coefficients.
fn field_degrees_by_subsets(roots: &[Real]) -> Vec<usize> {
    let n = roots.len();
    let prec = roots[0].prec();
    let tol_bits = -(prec as f64) / 3.0;
    let is_integral = |subset: &[usize]| {
        let mut poly = vec![Real::one(prec)];
        for &i in subset {
            let mut next = vec![Real::zero(prec); poly.len() + 1];
            for (j, c) in poly.iter().enumerate() {
                next[j + 1] = &next[j + 1] + c;
                next[j] = &next[j] - &(c * &roots[i]);
            }
            poly = next;
        }
        poly.iter().all(|c| {
            let nearest = Real::from_f64(libm::round(c.to_f64()), prec);
            let err = (c - &nearest).abs();
            err.is_zero() || err.log2_abs() - c.log2_abs().max(0.0) < tol_bits
        })
    };
    let mut degrees = vec![n; n];
    for i in 0..n {
        'size: for size in 1..n {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let mut pick: Vec<usize> = (0..size - 1).collect();
            loop {
                let mut subset = vec![i];
                subset.extend(pick.iter().map(|&t| others[t]));
                if is_integral(&subset) {
                    degrees[i] = size;
                    break 'size;
                }
                // next combination of size-1 out of others.len()
                let m = others.len();
                let r = pick.len();
                let mut t = r;
                while t > 0 && pick[t - 1] == m - r + t - 1 {
                    t -= 1;
                }
                if t == 0 {
                    break;
                }
                pick[t - 1] += 1;
                for u in t..r {
                    pick[u] = pick[u - 1] + 1;
                }
            }
        }
    }
    degrees
}

/// A Hecke eigenform embedded in high-precision reals, normalized by `a(1) = 1`.
#[derive(Clone, Debug)]
pub struct Eigenform {
    pub weight: u32,
    pub w: u32,
    pub prec_bits: usize,
    /// `coeffs[n - 1] = a(n)`.
    pub coeffs: Vec<Real>,
    pub t2_eigenvalue: Real,
    pub field_degree: usize,
    /// Position of the `T_2` eigenvalue among the real roots of its
    /// characteristic polynomial, in increasing order.
    pub conjugate_index: usize,
}

impl Eigenform {
    /// `a(n)` for `1 <= n <= N`.
    pub fn a(&self, n: usize) -> &Real {
        &self.coeffs[n - 1]
    }

    pub fn n_coeffs(&self) -> usize {
        self.coeffs.len()
    }
}

/// Everything computed for one weight before splitting into eigenforms.
#[derive(Clone, Debug)]
pub struct HeckeSystem {
    pub basis: CuspBasis,
    pub t2: Vec<Vec<BigRational>>,
    /// Integer characteristic polynomial of `T_2`, indexed by power.
    pub charpoly: Vec<BigInt>,
}

impl HeckeSystem {
    pub fn new(k: u32, n_coeffs: usize) -> Result<Self> {
        let dim = cusp_dimension(k);
        if dim == 0 {
            crate::exact_series::eisenstein_qexp(k, 1)?;
            return Err(Error::NoCuspForms(k));
        }
        let order = n_coeffs.max(2 * (dim + 1)) + 1;
        let basis = cusp_basis(k, order)?;
        let t2 = hecke_matrix(&basis, 2)?;
        let cp = charpoly(&t2);
        if !is_squarefree(&cp) {
            return Err(Error::RepeatedEigenvalue(k));
        }
        let charpoly = cp
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer());
                c.to_integer()
            })
            .collect();
        Ok(HeckeSystem { basis, t2, charpoly })
    }

    pub fn weight(&self) -> u32 {
        self.basis.weight
    }

    /// Sum of the `T_2` eigenvalues, exactly.
    pub fn t2_trace(&self) -> BigRational {
        (0..self.t2.len()).map(|i| self.t2[i][i].clone()).sum()
    }

    /// Real embeddings of every eigenform, `a(1) .. a(n_coeffs)` at `prec_bits`.
    pub fn eigenforms(&self, n_coeffs: usize, prec_bits: usize) -> Result<Vec<Eigenform>> {
        let k = self.weight();
        let dim = self.basis.dim();
        if self.basis.order() <= n_coeffs {
            return Err(Error::InsufficientOrder { have: self.basis.order(), need: n_coeffs + 1 });
        }
        let prec_bits = word_prec(prec_bits);
        let work = word_prec(prec_bits + self.guard_bits(n_coeffs));

        // Deligne: |a(2)| <= 2 * 2^{(k-1)/2} < 2^{(k+1)/2 + 1}.
        let bound_log2 = (k + 1) / 2 + 1;
        let (shift, brackets) = isolate_real_roots(&self.charpoly, bound_log2, dim)
            .ok_or(Error::EigenvalueIsolation(k))?;
        let cp_real: Vec<Real> = self.charpoly.iter().map(|c| Real::from_bigint(c, work)).collect();
        let scale = Real::pow2(-(shift as i64), work);
        let eigenvalues: Vec<Real> = brackets
            .iter()
            .map(|(lo, hi)| {
                let lo = Real::from_bigint(lo, work) * &scale;
                let hi = Real::from_bigint(hi, work) * &scale;
                refine_root(&cp_real, lo, hi, work)
            })
            .collect();

        let degrees = if certified_irreducible(&self.charpoly) {
            vec![dim; dim]
        } else {
            field_degrees_by_subsets(&eigenvalues)
        };

        let forms_real: Vec<Vec<Real>> = self
            .basis
            .forms
            .iter()
            .map(|f| (1..=n_coeffs).map(|n| Real::from_ratio(f.coeff(n), work)).collect())
            .collect();

        let mut out = Vec::with_capacity(dim);
        for (idx, lambda) in eigenvalues.iter().enumerate() {
            let v = null_vector(&self.t2, lambda, work);
            let coeffs = (0..n_coeffs)
                .map(|n| {
                    let mut acc = Real::zero(work);
                    for (j, vj) in v.iter().enumerate() {
                        acc += &(vj * &forms_real[j][n]);
                    }
                    acc.with_prec(prec_bits)
                })
                .collect();
            out.push(Eigenform {
                weight: k,
                w: k - 2,
                prec_bits,
                coeffs,
                t2_eigenvalue: lambda.clone().with_prec(prec_bits),
                field_degree: degrees[idx],
                conjugate_index: idx,
            });
        }
        Ok(out)
    }

    /// Extra bits lost when eigenform coefficients are assembled from basis
    /// forms whose coefficients dwarf the Deligne scale `n^{(k-1)/2}`.
    fn guard_bits(&self, n_coeffs: usize) -> usize {
        let k = self.weight() as f64;
        let mut worst: f64 = 0.0;
        for f in &self.basis.forms {
            for n in 1..=n_coeffs.min(f.order() - 1) {
                let c = f.coeff(n);
                if c.is_zero() {
                    continue;
                }
                let bits = c.numer().bits() as f64 - c.denom().bits() as f64;
                worst = worst.max(bits - (k - 1.0) / 2.0 * libm::log2(n as f64));
            }
        }
        worst.max(0.0) as usize + 64
    }
}

/// Eigenvector of `mat` for eigenvalue `lambda` normalized so its first entry is 1.
///
/// Entry `j` is `a(j+1)` of the eigenform because the basis is echelonized.
fn null_vector(mat: &[Vec<BigRational>], lambda: &Real, prec: usize) -> Vec<Real> {
    let n = mat.len();
    let mut a: Vec<Vec<Real>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| {
                    let x = Real::from_ratio(c, prec);
                    if i == j {
                        x - lambda
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    // Full pivoting pushes the vanishing pivot to the last position.
    let mut cols: Vec<usize> = (0..n).collect();
    for step in 0..n.saturating_sub(1) {
        let (mut pr, mut pc) = (step, step);
        let mut best = a[step][step].abs();
        for r in step..n {
            for c in step..n {
                let v = a[r][c].abs();
                if v > best {
                    best = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        a.swap(step, pr);
        for row in a.iter_mut() {
            row.swap(step, pc);
        }
        cols.swap(step, pc);
        for r in step + 1..n {
            let f = &a[r][step] / &a[step][step];
            if f.is_zero() {
                continue;
            }
            for c in step..n {
                let t = &f * &a[step][c];
                a[r][c] -= &t;
            }
        }
    }
    let mut x = vec![Real::zero(prec); n];
    x[n - 1] = Real::one(prec);
    for r in (0..n - 1).rev() {
        let mut acc = Real::zero(prec);
        for c in r + 1..n {
            acc += &(&a[r][c] * &x[c]);
        }
        x[r] = -(acc / &a[r][r]);
    }
    let mut v = vec![Real::zero(prec); n];
    for (pos, &col) in cols.iter().enumerate() {
        v[col] = x[pos].clone();
    }
    let lead = v[0].clone();
    v.iter().map(|c| c / &lead).collect()
}

/// Eigenforms of weight `k`: one per real embedding of the Hecke eigenvalue field.
pub fn eigenforms(k: u32, n_coeffs: usize, prec_bits: usize) -> Result<Vec<Eigenform>> {
    HeckeSystem::new(k, n_coeffs)?.eigenforms(n_coeffs, prec_bits)
}

/// Number of divisors of `n`.
pub fn divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Largest `|a(n)| / (d(n) n^{(k-1)/2})` over the stored coefficients; at
/// most 1 for a genuine eigenform.
pub fn deligne_ratio(f: &Eigenform) -> Real {
    let prec = f.prec_bits;
    let half_k1 = Real::from_f64((f.weight as f64 - 1.0) / 2.0, prec);
    let mut cx = crate::real::Ctx::new(prec);
    let mut worst = Real::zero(prec);
    for n in 1..=f.n_coeffs() {
        let ln_n = cx.ln(&Real::from_u64(n as u64, prec));
        let scale = cx.exp(&(&half_k1 * &ln_n)).mul_i64(divisor_count(n as u64) as i64);
        worst = worst.max(f.a(n).abs() / scale);
    }
    worst
}

/// Largest Deligne-normalized residual of the Hecke relations
/// `a(m)a(n) = a(mn)` (coprime) and `a(p)a(p^r) = a(p^{r+1}) + p^{k-1} a(p^{r-1})`.
pub fn multiplicativity_residual(f: &Eigenform) -> Real {
    let prec = f.prec_bits;
    let n_max = f.n_coeffs();
    let mut cx = crate::real::Ctx::new(prec);
    let half_k1 = Real::from_f64((f.weight as f64 - 1.0) / 2.0, prec);
    let mut norm = |n: usize| {
        let ln_n = cx.ln(&Real::from_u64(n as u64, prec));
        cx.exp(&(&half_k1 * &ln_n))
    };
    let mut worst = Real::zero(prec);
    for m in 2..=n_max {
        for n in m + 1..=n_max / m {
            if m.gcd(&n) != 1 {
                continue;
            }
            let r = (f.a(m) * f.a(n) - f.a(m * n)).abs() / norm(m * n);
            worst = worst.max(r);
        }
    }
    let primes = (2..=n_max).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0));
    for p in primes {
        let pk1 = Real::from_bigint(&BigInt::from(p).pow(f.weight - 1), prec);
        let mut pr = p;
        let mut prev = 1usize;
        while pr * p <= n_max {
            let lhs = f.a(p) * f.a(pr);
            let rhs = f.a(pr * p) + &pk1 * f.a(prev);
            worst = worst.max((lhs - rhs).abs() / norm(pr * p));
            prev = pr;
            pr *= p;
        }
    }
    worst
}
