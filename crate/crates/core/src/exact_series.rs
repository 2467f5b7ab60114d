//! Exact q-expansions over the rationals and the echelon cusp-form basis.
//!
//! A [`QSeries`] of order `n` knows the coefficients of `q^0 .. q^{n-1}`;
//! every result is exact modulo `q^order`, and combining series of different
//! orders truncates to the smaller one.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigRational>,
}

impl QSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        QSeries { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        QSeries::new(coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    /// `1 + O(q^order)`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); order];
        if let Some(c) = coeffs.first_mut() {
            *c = BigRational::one();
        }
        QSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `q^n`. Panics when `n` is beyond the known order.
    pub fn coeff(&self, n: usize) -> &BigRational {
        &self.coeffs[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        QSeries::new(self.coeffs[..order.min(self.order())].to_vec())
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn zip_with(&self, other: &QSeries, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> QSeries {
        QSeries::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    /// Clears denominators: returns integer coefficients and their common denominator.
    fn integer_image(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        (ints, den)
    }
}

/// `sum_{d | n} d^r`.
pub fn sigma_power(n: u64, r: u32) -> BigInt {
    assert!(n >= 1, "sigma_power needs n >= 1");
    let mut total = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                total += BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    total
}

static BERNOULLI: spin::RwLock<Vec<BigRational>> = spin::RwLock::new(Vec::new());

/// Bernoulli number `B_n` with `B_1 = -1/2`, from the recurrence
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`. Values are cached process-wide.
pub fn bernoulli(n: usize) -> BigRational {
    if let Some(b) = BERNOULLI.read().get(n) {
        return b.clone();
    }
    let mut cache = BERNOULLI.write();
    while cache.len() <= n {
        let m = cache.len();
        if m == 0 {
            cache.push(BigRational::one());
            continue;
        }
        let mut binom = BigInt::one(); // C(m+1, j)
        let mut acc = BigRational::zero();
        for (j, b) in cache.iter().enumerate() {
            acc += b * &binom;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        cache.push(-acc / BigInt::from(m + 1));
    }
    cache[n].clone()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn check_weight(k: u32) -> Result<()> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::InvalidWeight(k as i64));
    }
    Ok(())
}

/// `E_k = 1 - (2k / B_k) sum_{n>=1} sigma_{k-1}(n) q^n`.
pub fn eisenstein_qexp(k: u32, order: usize) -> Result<QSeries> {
    check_weight(k)?;
    let factor = -BigRational::from_integer(BigInt::from(2 * k)) / bernoulli(k as usize);
    let mut coeffs = Vec::with_capacity(order);
    for n in 0..order {
        coeffs.push(if n == 0 {
            BigRational::one()
        } else {
            &factor * sigma_power(n as u64, k - 1)
        });
    }
    Ok(QSeries::new(coeffs))
}

/// The discriminant form `Δ = (E4^3 - E6^2) / 1728`.
pub fn delta_qexp(order: usize) -> QSeries {
    let e4 = eisenstein_qexp(4, order).expect("weight 4");
    let e6 = eisenstein_qexp(6, order).expect("weight 6");
    let e4_cubed = series_mul(&series_mul(&e4, &e4), &e4);
    let e6_squared = series_mul(&e6, &e6);
    e4_cubed
        .sub(&e6_squared)
        .scale(&BigRational::new(BigInt::one(), BigInt::from(1728)))
}

/// Exact Cauchy product truncated to the smaller order.
pub fn series_mul(a: &QSeries, b: &QSeries) -> QSeries {
    let order = a.order().min(b.order());
    let (ai, ad) = a.truncate(order).integer_image();
    let (bi, bd) = b.truncate(order).integer_image();
    let den = ad * bd;
    QSeries::new(
        int_mul(&ai, &bi)
            .into_iter()
            .map(|c| BigRational::new(c, den.clone()))
            .collect(),
    )
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let order = a.len().min(b.len());
    let mut out = vec![BigInt::zero(); order];
    for (i, x) in a[..order].iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..order - i].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn int_pow(a: &[BigInt], mut n: u32) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); a.len()];
    if let Some(c) = acc.first_mut() {
        *c = BigInt::one();
    }
    let mut base = a.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            acc = int_mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = int_mul(&base, &base);
        }
    }
    acc
}

pub fn series_pow(a: &QSeries, mut n: u32) -> QSeries {
    let mut acc = QSeries::one(a.order());
    let mut base = a.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = series_mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = series_mul(&base, &base);
        }
    }
    acc
}

/// Dimension of the space of level-one cusp forms of weight `k`.
pub fn cusp_dimension(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

#[derive(Clone, Debug)]
pub struct CuspBasis {
    pub weight: u32,
    pub forms: Vec<QSeries>,
}

impl CuspBasis {
    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn order(&self) -> usize {
        self.forms.first().map_or(0, QSeries::order)
    }
}

/// Echelon basis of `S_k` built from `Δ^j E4^b E6^c`, `j = 1..dim`.
///
/// Form `j` (0-based) has coefficient 1 at `q^{j+1}` and 0 at every other
/// `q^{i+1}`, `i < dim`.
pub fn cusp_basis(k: u32, order: usize) -> Result<CuspBasis> {
    check_weight(k)?;
    let dim = cusp_dimension(k);
    if dim == 0 {
        return Ok(CuspBasis { weight: k, forms: Vec::new() });
    }
    if order <= dim {
        return Err(Error::InsufficientOrder { have: order, need: dim + 1 });
    }

    // Every monomial is integral with unit leading coefficient, so the whole
    // construction stays in the integers.
    let integral = |s: QSeries| s.integer_image().0;
    let delta = integral(delta_qexp(order));
    let e4 = integral(eisenstein_qexp(4, order)?);
    let e6 = integral(eisenstein_qexp(6, order)?);
    // k - 12j has the same residue mod 4 for every j, so the E6 exponent is fixed
    // and the E4 exponent drops by 3 per step in j.
    let c = if (k as usize - 12) % 4 == 0 { 0 } else { 1 };
    let b_of = |j: usize| (k as usize - 12 * j - 6 * c) / 4;

    let e4_cubed = int_pow(&e4, 3);
    let mut e4_power = int_pow(&e4, b_of(dim) as u32);
    if c == 1 {
        e4_power = int_mul(&e4_power, &e6);
    }
    let mut eis = Vec::with_capacity(dim);
    for j in (1..=dim).rev() {
        if j < dim {
            e4_power = int_mul(&e4_power, &e4_cubed);
        }
        debug_assert_eq!(4 * b_of(j) + 6 * c + 12 * j, k as usize);
        eis.push(e4_power.clone());
    }
    eis.reverse();

    let mut forms: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    let mut delta_power = delta.clone();
    for (idx, e) in eis.iter().enumerate() {
        if idx > 0 {
            delta_power = int_mul(&delta_power, &delta);
        }
        forms.push(int_mul(&delta_power, e));
    }

    for j in (0..dim).rev() {
        let (head, tail) = forms.split_at_mut(j);
        let pivot = &tail[0];
        for form in head.iter_mut() {
            let c = form[j + 1].clone();
            if !c.is_zero() {
                for (x, p) in form.iter_mut().zip(pivot) {
                    *x -= &c * p;
                }
            }
        }
    }
    let forms: Vec<QSeries> = forms.into_iter().map(QSeries::from_integers).collect();
    debug_assert!(forms.iter().enumerate().all(|(j, f)| {
        (0..dim).all(|i| f.coeff(i + 1) == &BigRational::from_integer(BigInt::from((i == j) as u8)))
    }));
    Ok(CuspBasis { weight: k, forms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> QSeries {
        QSeries::from_integers(v.iter().map(|&x| BigInt::from(x)))
    }

    /// Independent oracle: q * prod_{n>=1} (1 - q^n)^24 with machine integers.
    fn eta_delta(order: usize) -> Vec<i64> {
        let mut p = vec![0i64; order];
        if order > 1 {
            p[1] = 1;
        }
        for n in 1..order {
            for _ in 0..24 {
                for i in (n..order).rev() {
                    p[i] -= p[i - n];
                }
            }
        }
        p
    }

    fn divisor_sum_oracle(n: u64, r: u32) -> u64 {
        (1..=n).filter(|d| n % d == 0).map(|d| d.pow(r)).sum()
    }

    #[test]
    fn sigma_power_examples() {
        assert_eq!(sigma_power(1, 3), BigInt::from(1));
        assert_eq!(sigma_power(2, 3), BigInt::from(9));
        assert_eq!(sigma_power(6, 1), BigInt::from(12));
        for n in 1..200u64 {
            assert_eq!(sigma_power(n, 2), BigInt::from(divisor_sum_oracle(n, 2)));
        }
    }

    #[test]
    fn bernoulli_values() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(bernoulli(0), r(1, 1));
        assert_eq!(bernoulli(1), r(-1, 2));
        assert_eq!(bernoulli(2), r(1, 6));
        assert_eq!(bernoulli(3), r(0, 1));
        assert_eq!(bernoulli(4), r(-1, 30));
        assert_eq!(bernoulli(12), r(-691, 2730));
    }

    #[test]
    fn eisenstein_examples() {
        assert_eq!(eisenstein_qexp(4, 3).unwrap(), ints(&[1, 240, 2160]));
        assert_eq!(eisenstein_qexp(6, 2).unwrap(), ints(&[1, -504]));
        assert_eq!(eisenstein_qexp(10, 1).unwrap(), ints(&[1]));
        assert!(matches!(eisenstein_qexp(5, 3), Err(Error::InvalidWeight(5))));
        assert!(matches!(eisenstein_qexp(2, 3), Err(Error::InvalidWeight(2))));
        // E_4 = 1 + 240 sum sigma_3(n) q^n
        let e4 = eisenstein_qexp(4, 30).unwrap();
        for n in 1..30 {
            let want = 240 * divisor_sum_oracle(n as u64, 3) as i64;
            assert_eq!(e4.coeff(n), &BigRational::from_integer(BigInt::from(want)));
        }
    }

    #[test]
    fn eisenstein_denominators_divide_constant() {
        let e12 = eisenstein_qexp(12, 20).unwrap();
        let c = BigRational::from_integer(BigInt::from(24)) / bernoulli(12);
        for a in e12.coeffs() {
            assert!(c.denom() % a.denom() == BigInt::zero());
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_qexp(3), ints(&[0, 1, -24]));
        assert_eq!(delta_qexp(5), ints(&[0, 1, -24, 252, -1472]));
        assert_eq!(delta_qexp(1), ints(&[0]));
        let d = delta_qexp(40);
        assert!(d.is_integral());
        assert_eq!(d, ints(&eta_delta(40)));
    }

    #[test]
    fn series_mul_examples() {
        assert_eq!(series_mul(&ints(&[1, 1]), &ints(&[1, 1])), ints(&[1, 2]));
        let e4 = eisenstein_qexp(4, 3).unwrap();
        assert_eq!(series_mul(&e4, &e4), ints(&[1, 480, 61920]));
        let s = ints(&[3, -1, 4]);
        assert_eq!(series_mul(&s, &ints(&[1])), ints(&[3]));
        let half = QSeries::new(vec![BigRational::new(1.into(), 2.into()); 3]);
        assert_eq!(
            series_mul(&half, &ints(&[2, 0, 0])),
            ints(&[1, 1, 1])
        );
    }

    #[test]
    fn e4_cubed_minus_e6_squared_is_1728_delta() {
        for order in [1, 2, 7, 25, 60] {
            let e4 = eisenstein_qexp(4, order).unwrap();
            let e6 = eisenstein_qexp(6, order).unwrap();
            let lhs = series_pow(&e4, 3).sub(&series_mul(&e6, &e6));
            assert_eq!(lhs, ints(&eta_delta(order).iter().map(|c| 1728 * c).collect::<Vec<_>>()));
            assert_eq!(delta_qexp(order), ints(&eta_delta(order)));
        }
    }

    #[test]
    fn dimensions() {
        let expect = [
            (4, 0), (10, 0), (12, 1), (14, 0), (16, 1), (24, 2), (26, 1), (34, 2),
            (36, 3), (38, 2), (120, 10), (122, 9), (200, 16),
        ];
        for (k, d) in expect {
            assert_eq!(cusp_dimension(k), d, "k = {k}");
        }
    }

    #[test]
    fn basis_examples() {
        let b12 = cusp_basis(12, 10).unwrap();
        assert_eq!(b12.dim(), 1);
        assert_eq!(b12.forms[0], delta_qexp(10));
        assert_eq!(cusp_basis(14, 10).unwrap().dim(), 0);
        assert_eq!(cusp_basis(34, 10).unwrap().dim(), 2);
        assert!(matches!(
            cusp_basis(36, 3),
            Err(Error::InsufficientOrder { have: 3, need: 4 })
        ));
    }

    #[test]
    fn basis_is_echelon_and_cuspidal() {
        for k in (12..=60).step_by(2) {
            let b = cusp_basis(k, 12).unwrap();
            assert_eq!(b.dim(), cusp_dimension(k));
            for (j, f) in b.forms.iter().enumerate() {
                assert!(f.coeff(0).is_zero());
                assert!(f.is_integral());
                for i in 0..b.dim() {
                    let want = if i == j { BigRational::one() } else { BigRational::zero() };
                    assert_eq!(f.coeff(i + 1), &want, "k={k} form {j} at q^{}", i + 1);
                }
            }
        }
    }

    fn small_series() -> impl Strategy<Value = QSeries> {
        proptest::collection::vec((-50i64..50, 1i64..6), 1..9).prop_map(|v| {
            QSeries::new(
                v.into_iter()
                    .map(|(n, d)| BigRational::new(n.into(), d.into()))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn mul_commutes(a in small_series(), b in small_series()) {
            prop_assert_eq!(series_mul(&a, &b), series_mul(&b, &a));
        }

        #[test]
        fn mul_associates(a in small_series(), b in small_series(), c in small_series()) {
            prop_assert_eq!(
                series_mul(&series_mul(&a, &b), &c),
                series_mul(&a, &series_mul(&b, &c))
            );
        }
    }
}
