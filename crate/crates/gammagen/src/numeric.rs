//! High-precision numeric evaluation used to cross-check exact results.
//!
//! Values are fixed-point with 192 fractional bits, which leaves over 100
//! bits of headroom above the 1e-20 comparison tolerance used by callers.
//! Nothing here is exact; the exact routes never depend on this module.

use crate::cyclo::CycloNumber;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

pub const FRAC_BITS: u32 = 192;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fixed(BigInt);

impl Fixed {
    pub fn zero() -> Self {
        Fixed(BigInt::zero())
    }

    pub fn one() -> Self {
        Fixed(BigInt::from(1) << FRAC_BITS)
    }

    pub fn from_i64(n: i64) -> Self {
        Fixed(BigInt::from(n) << FRAC_BITS)
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Fixed((r.numer() << FRAC_BITS) / r.denom())
    }

    /// 10^-d as a comparison tolerance.
    pub fn pow10_neg(d: u32) -> Self {
        Fixed((BigInt::from(1) << FRAC_BITS) / BigInt::from(10u64).pow(d))
    }

    pub fn add(&self, o: &Self) -> Self {
        Fixed(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Fixed(&self.0 - &o.0)
    }

    pub fn neg(&self) -> Self {
        Fixed(-&self.0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Fixed((&self.0 * &o.0) >> FRAC_BITS)
    }

    pub fn div(&self, o: &Self) -> Self {
        Fixed((&self.0 << FRAC_BITS) / &o.0)
    }

    pub fn div_int(&self, n: i64) -> Self {
        Fixed(&self.0 / BigInt::from(n))
    }

    pub fn mul_int(&self, n: i64) -> Self {
        Fixed(&self.0 * BigInt::from(n))
    }

    pub fn abs(&self) -> Self {
        Fixed(self.0.abs())
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Integer part, rounded toward negative infinity.
    pub fn floor_i64(&self) -> i64 {
        (&self.0 >> FRAC_BITS).to_i64().expect("floor fits i64")
    }

    pub fn to_f64(&self) -> f64 {
        let f = self.0.to_f64().unwrap_or(f64::NAN);
        f / 2f64.powi(FRAC_BITS as i32)
    }
}

fn atan_inv(x: i64) -> Fixed {
    // atan(1/x) for |x| >= 2: alternating sum of 1/((2k+1) x^(2k+1))
    let xx = x * x;
    let mut term = Fixed::one().div_int(x);
    let mut acc = Fixed::zero();
    let mut k = 0i64;
    while !term.0.is_zero() {
        let piece = term.div_int(2 * k + 1);
        if k % 2 == 0 {
            acc = acc.add(&piece);
        } else {
            acc = acc.sub(&piece);
        }
        term = term.div_int(xx);
        k += 1;
    }
    acc
}

pub fn pi() -> Fixed {
    static PI: OnceLock<Fixed> = OnceLock::new();
    PI.get_or_init(|| atan_inv(5).mul_int(16).sub(&atan_inv(239).mul_int(4)))
        .clone()
}

fn ln2() -> Fixed {
    static LN2: OnceLock<Fixed> = OnceLock::new();
    LN2.get_or_init(|| atanh_series(&Fixed::one().div_int(3))).clone()
}

// 2 * (z + z^3/3 + z^5/5 + ...) = ln((1+z)/(1-z)), needs |z| < 1
fn atanh_series(z: &Fixed) -> Fixed {
    let zz = z.mul(z);
    let mut term = z.clone();
    let mut acc = Fixed::zero();
    let mut k = 0i64;
    while !term.0.is_zero() {
        acc = acc.add(&term.div_int(2 * k + 1));
        term = term.mul(&zz);
        k += 1;
    }
    acc.mul_int(2)
}

/// Natural logarithm of a positive integer.
pub fn ln_u64(n: u64) -> Fixed {
    assert!(n >= 1);
    if n == 1 {
        return Fixed::zero();
    }
    let bits = 63 - (n as i64).leading_zeros();
    // y = n / 2^bits lies in [1, 2)
    let y = Fixed::from_i64(n as i64).div(&Fixed::from_i64(1 << bits));
    let z = y.sub(&Fixed::one()).div(&y.add(&Fixed::one()));
    atanh_series(&z).add(&ln2().mul_int(bits as i64))
}

/// exp of a fixed-point value via argument halving and Taylor series.
pub fn exp(x: &Fixed) -> Fixed {
    let mut halvings = 0u32;
    let mut u = x.clone();
    let half = Fixed::one().div_int(2);
    while u.abs() > half {
        u = u.div_int(2);
        halvings += 1;
        assert!(halvings < 64, "exp argument out of supported range");
    }
    let mut term = Fixed::one();
    let mut acc = Fixed::zero();
    let mut k = 0i64;
    while !term.0.is_zero() {
        acc = acc.add(&term);
        k += 1;
        term = term.mul(&u).div_int(k);
    }
    for _ in 0..halvings {
        acc = acc.mul(&acc);
    }
    acc
}

/// (sin x, cos x) with range reduction modulo 2*pi.
pub fn sin_cos(x: &Fixed) -> (Fixed, Fixed) {
    let two_pi = pi().mul_int(2);
    let turns = x.div(&two_pi).floor_i64();
    let mut r = x.sub(&two_pi.mul_int(turns));
    if r.is_negative() {
        r = r.add(&two_pi);
    }
    let half_pi = pi().div_int(2);
    let quadrant = r.div(&half_pi).floor_i64().clamp(0, 3);
    let t = r.sub(&half_pi.mul_int(quadrant));
    let (s, c) = sin_cos_small(&t);
    match quadrant {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    }
}

fn sin_cos_small(t: &Fixed) -> (Fixed, Fixed) {
    let tt = t.mul(t);
    let mut sin = Fixed::zero();
    let mut cos = Fixed::zero();
    let mut term = Fixed::one();
    let mut k = 0i64;
    // term = t^(2j) / (2j)! on even steps; multiply by t once for sin parts
    loop {
        if term.0.is_zero() {
            break;
        }
        if k % 2 == 0 {
            cos = cos.add(&term);
            sin = sin.add(&term.mul(t).div_int(2 * k + 1));
        } else {
            cos = cos.sub(&term);
            sin = sin.sub(&term.mul(t).div_int(2 * k + 1));
        }
        term = term.mul(&tt).div_int((2 * k + 1) * (2 * k + 2));
        k += 1;
    }
    (sin, cos)
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Fixed,
    pub im: Fixed,
}

impl Complex {
    pub fn zero() -> Self {
        Complex { re: Fixed::zero(), im: Fixed::zero() }
    }

    pub fn one() -> Self {
        Complex { re: Fixed::one(), im: Fixed::zero() }
    }

    pub fn from_real(re: Fixed) -> Self {
        Complex { re, im: Fixed::zero() }
    }

    pub fn new(re: Fixed, im: Fixed) -> Self {
        Complex { re, im }
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> Self {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Complex {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn div(&self, o: &Self) -> Self {
        let den = o.re.mul(&o.re).add(&o.im.mul(&o.im));
        let num = self.mul(&o.conj());
        Complex { re: num.re.div(&den), im: num.im.div(&den) }
    }

    pub fn scale(&self, f: &Fixed) -> Self {
        Complex { re: self.re.mul(f), im: self.im.mul(f) }
    }

    /// Componentwise comparison against a tolerance.
    pub fn approx_eq(&self, o: &Self, tol: &Fixed) -> bool {
        self.re.sub(&o.re).abs() < *tol && self.im.sub(&o.im).abs() < *tol
    }
}

/// e(k/m) = exp(2 pi i k / m).
pub fn e_frac(k: i64, m: u64) -> Complex {
    assert!(m >= 1);
    let k = k.rem_euclid(m as i64);
    let angle = pi().mul_int(2 * k).div_int(m as i64);
    let (s, c) = sin_cos(&angle);
    Complex { re: c, im: s }
}

pub fn cyclo_to_complex(x: &CycloNumber) -> Complex {
    let m = x.conductor();
    let mut acc = Complex::zero();
    for (e, coeff) in x.terms() {
        acc = acc.add(&e_frac(e as i64, m).scale(&Fixed::from_rational(coeff)));
    }
    acc
}

pub fn exp_complex(z: &Complex) -> Complex {
    let r = exp(&z.re);
    let (s, c) = sin_cos(&z.im);
    Complex { re: r.mul(&c), im: r.mul(&s) }
}

/// n^(-s) = exp(-s ln n) for a positive integer n.
pub fn n_pow_minus_s(n: u64, s: &Complex) -> Complex {
    let ln_n = ln_u64(n);
    exp_complex(&s.neg().scale(&ln_n))
}

/// Determinant by column-subset dynamic programming; mirrors the exact
/// routine so the two routes share no code.
pub fn complex_det(mat: &[Vec<Complex>]) -> Complex {
    let n = mat.len();
    assert!(mat.iter().all(|row| row.len() == n));
    assert!(n <= 20);
    let mut layer = vec![Complex::zero(); 1 << n];
    layer[0] = Complex::one();
    for mask in 0usize..(1 << n) {
        let k = mask.count_ones() as usize;
        if k == n {
            continue;
        }
        if layer[mask].re.is_zero() && layer[mask].im.is_zero() {
            continue;
        }
        let base = layer[mask].clone();
        for j in 0..n {
            let bit = 1usize << j;
            if mask & bit != 0 {
                continue;
            }
            let pos = (mask & (bit - 1)).count_ones() as usize;
            let contrib = base.mul(&mat[k][j]);
            let slot = &mut layer[mask | bit];
            *slot = if (k + pos) % 2 == 0 { slot.add(&contrib) } else { slot.sub(&contrib) };
        }
    }
    layer[(1 << n) - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn decimal(digits: &str, shift: u32) -> Fixed {
        let n: BigInt = digits.parse().unwrap();
        Fixed::from_rational(&BigRational::new(n, BigInt::from(10u64).pow(shift)))
    }

    #[test]
    fn pi_digits() {
        let want = decimal("314159265358979323846264338327950288419716939937510", 50);
        assert!(pi().sub(&want).abs() < Fixed::pow10_neg(48));
    }

    #[test]
    fn ln_values() {
        let want_ln2 = decimal("69314718055994530941723212145817656807550013436026", 50);
        assert!(ln_u64(2).sub(&want_ln2).abs() < Fixed::pow10_neg(45));
        // ln 10 = ln 2 + ln 5
        assert!(ln_u64(10).sub(&ln_u64(2)).sub(&ln_u64(5)).abs() < Fixed::pow10_neg(45));
        let want_ln10 = decimal("230258509299404568401799145468436420760110148862877", 50);
        assert!(ln_u64(10).sub(&want_ln10).abs() < Fixed::pow10_neg(45));
    }

    #[test]
    fn exp_digits() {
        let want_e = decimal("271828182845904523536028747135266249775724709369996", 50);
        assert!(exp(&Fixed::one()).sub(&want_e).abs() < Fixed::pow10_neg(45));
        // exp(ln 7) = 7
        assert!(exp(&ln_u64(7)).sub(&Fixed::from_i64(7)).abs() < Fixed::pow10_neg(40));
    }

    #[test]
    fn trig_identities() {
        for k in [-7i64, -1, 0, 1, 2, 5, 11] {
            let x = pi().mul_int(k).div_int(9).add(&Fixed::from_rational(
                &BigRational::new(BigInt::from(k), BigInt::from(13)),
            ));
            let (s, c) = sin_cos(&x);
            let one = s.mul(&s).add(&c.mul(&c));
            assert!(one.sub(&Fixed::one()).abs() < Fixed::pow10_neg(40));
        }
    }

    #[test]
    fn roots_of_unity_close() {
        let z = e_frac(1, 5);
        let mut p = Complex::one();
        for _ in 0..5 {
            p = p.mul(&z);
        }
        assert!(p.approx_eq(&Complex::one(), &Fixed::pow10_neg(40)));

        let sum = e_frac(1, 5)
            .add(&e_frac(2, 5))
            .add(&e_frac(3, 5))
            .add(&e_frac(4, 5));
        let minus_one = Complex::from_real(Fixed::from_i64(-1));
        assert!(sum.approx_eq(&minus_one, &Fixed::pow10_neg(40)));
    }

    #[test]
    fn cyclo_evaluation_matches() {
        // zeta_12^3 = i
        let x = CycloNumber::root_of_unity(12, 3).unwrap();
        let got = cyclo_to_complex(&x);
        let want = Complex::new(Fixed::zero(), Fixed::one());
        assert!(got.approx_eq(&want, &Fixed::pow10_neg(40)));
    }

    #[test]
    fn power_multiplicativity() {
        let s = Complex::new(
            Fixed::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(3))),
            Fixed::from_rational(&BigRational::new(BigInt::from(-7), BigInt::from(5))),
        );
        let lhs = n_pow_minus_s(6, &s);
        let rhs = n_pow_minus_s(2, &s).mul(&n_pow_minus_s(3, &s));
        assert!(lhs.approx_eq(&rhs, &Fixed::pow10_neg(40)));
        assert!(n_pow_minus_s(1, &s).approx_eq(&Complex::one(), &Fixed::pow10_neg(40)));
    }

    #[test]
    fn determinant_small_cases() {
        let i = |v: i64| Complex::from_real(Fixed::from_i64(v));
        let id = vec![vec![i(1), i(0)], vec![i(0), i(1)]];
        assert!(complex_det(&id).approx_eq(&Complex::one(), &Fixed::pow10_neg(40)));
        let m = vec![vec![i(2), i(3)], vec![i(4), i(5)]];
        assert!(complex_det(&m).approx_eq(&i(-2), &Fixed::pow10_neg(40)));
        // repeated rows vanish
        let r = vec![vec![i(7), i(9)], vec![i(7), i(9)]];
        assert!(complex_det(&r).approx_eq(&Complex::zero(), &Fixed::pow10_neg(40)));
    }
}
