//! Exact 2x2 matrices over the rationals, with the congruence-subgroup
//! predicates and constructions the rest of the crate builds on.
//!
//! Entries are arbitrary-precision rationals so that elliptic test matrices
//! like `[[1,-2/3],[16/3,-23/9]]` and unbounded word evaluations are exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatError {
    #[error("determinant {0} is not 1")]
    NotUnimodular(String),
    #[error("matrix has non-integer entries")]
    NotIntegral,
    #[error("not an integer matrix of determinant 1 with lower-left divisible by {0}")]
    NotInGamma0(u64),
    #[error("q = {0} and a*n = {1} share a factor")]
    NotCoprime(i64, i128),
    #[error("upper-left entry 0 admits no completion")]
    ZeroUpperLeft,
    #[error("a = 0 forces q = +-1, got q = {0}")]
    NoCompletion(i64),
    #[error("level must be positive")]
    ZeroLevel,
    #[error("cannot parse matrix literal {0:?}")]
    Parse(String),
}

/// 2x2 rational matrix `[[a, b], [c, d]]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(rat(a), rat(b), rat(c), rat(d))
    }

    pub fn identity() -> Self {
        Mat2::from_ints(1, 0, 0, 1)
    }

    /// `T = [[1,1],[0,1]]`.
    pub fn t() -> Self {
        Mat2::from_ints(1, 1, 0, 1)
    }

    /// `T^k`.
    pub fn t_pow(k: &BigInt) -> Self {
        let mut m = Mat2::identity();
        m.b = Rational::from_integer(k.clone());
        m
    }

    /// `W = [[1,0],[N,1]]`, the lower-triangular generator at level `n`.
    pub fn w(n: u64) -> Self {
        Mat2::from_ints(1, 0, n as i64, 1)
    }

    /// `W^k` at level `n`.
    pub fn w_pow(n: u64, k: &BigInt) -> Self {
        let mut m = Mat2::identity();
        m.c = Rational::from_integer(k * BigInt::from(n));
        m
    }

    /// `S = [[0,-1],[1,0]]`.
    pub fn s() -> Self {
        Mat2::from_ints(0, -1, 1, 0)
    }

    pub fn neg(&self) -> Self {
        Mat2::new(-self.a.clone(), -self.b.clone(), -self.c.clone(), -self.d.clone())
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        Mat2::new(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.d
    }

    /// Inverse, defined only for determinant 1: `[[d,-b],[-c,a]]`.
    pub fn inv(&self) -> Result<Mat2, MatError> {
        if !self.det().is_one() {
            return Err(MatError::NotUnimodular(self.det().to_string()));
        }
        Ok(Mat2::new(self.d.clone(), -self.b.clone(), -self.c.clone(), self.a.clone()))
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer() && self.c.is_integer() && self.d.is_integer()
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    /// Integer matrix with det 1 and lower-left divisible by `n`.
    pub fn in_gamma0(&self, n: u64) -> bool {
        self.is_integral()
            && self.det().is_one()
            && (self.c.to_integer() % BigInt::from(n.max(1))).is_zero()
    }

    /// `in_gamma0` plus both diagonal entries congruent to 1 mod `n`.
    pub fn in_gamma1(&self, n: u64) -> bool {
        if !self.in_gamma0(n) {
            return false;
        }
        let n = BigInt::from(n.max(1));
        let one = BigInt::one();
        (self.a.to_integer() - &one).mod_floor(&n).is_zero()
            && (self.d.to_integer() - &one).mod_floor(&n).is_zero()
    }

    /// Max of |a|, |b|, |c|/n, |d| for `[[a,b],[c,d]]` in Gamma0(n).
    pub fn height(&self, n: u64) -> Result<BigInt, MatError> {
        if n == 0 {
            return Err(MatError::ZeroLevel);
        }
        if !self.is_integral() {
            return Err(MatError::NotIntegral);
        }
        let c = self.c.to_integer();
        let nn = BigInt::from(n);
        if !(&c % &nn).is_zero() {
            return Err(MatError::NotInGamma0(n));
        }
        let vals = [
            self.a.to_integer().abs(),
            self.b.to_integer().abs(),
            (c / nn).abs(),
            self.d.to_integer().abs(),
        ];
        Ok(vals.into_iter().max().unwrap())
    }

    /// True when the matrix has infinite order and no fixed point on the
    /// real line: |trace| < 2 with trace not an integer. Integer traces in
    /// (-2, 2) give finite order, which this rejects.
    pub fn is_elliptic_infinite(&self) -> bool {
        let t = self.trace();
        t.abs() < rat(2) && !t.is_integer()
    }

    pub fn entries_i64(&self) -> Option<[i64; 4]> {
        if !self.is_integral() {
            return None;
        }
        let get = |r: &Rational| -> Option<i64> {
            let i = r.to_integer();
            i64::try_from(&i).ok()
        };
        Some([get(&self.a)?, get(&self.b)?, get(&self.c)?, get(&self.d)?])
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

fn parse_rational(s: &str) -> Result<Rational, MatError> {
    let err = || MatError::Parse(s.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let n = BigInt::from_str(num).map_err(|_| err())?;
            let d = BigInt::from_str(den).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| err())?)),
    }
}

impl FromStr for Mat2 {
    type Err = MatError;

    /// Parses the `Display` form `[[a,b],[c,d]]`; entries may be `p/q`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || MatError::Parse(s.to_string());
        let inner = compact.strip_prefix("[[").and_then(|t| t.strip_suffix("]]")).ok_or_else(err)?;
        let (row1, row2) = inner.split_once("],[").ok_or_else(err)?;
        let (a, b) = row1.split_once(',').ok_or_else(err)?;
        let (c, d) = row2.split_once(',').ok_or_else(err)?;
        if [a, b, c, d].iter().any(|t| t.is_empty() || t.contains(['[', ']'])) {
            return Err(err());
        }
        Ok(Mat2::new(
            parse_rational(a)?,
            parse_rational(b)?,
            parse_rational(c)?,
            parse_rational(d)?,
        ))
    }
}

/// The canonical level-`n` element with top row `(q, -a)`.
///
/// Completion solves `q*d + a*n*c = 1`. For `a != 0` the representative is
/// pinned by `0 <= d < |a*n|`; any two completions differ by a left power of
/// `W`. For `a = 0` the matrix is `[[q,0],[0,q]]`, so `q` must be a unit.
pub fn gamma_qa(n: u64, q: i64, a: i64) -> Result<Mat2, MatError> {
    if n == 0 {
        return Err(MatError::ZeroLevel);
    }
    if q == 0 {
        return Err(MatError::ZeroUpperLeft);
    }
    if a == 0 {
        if q == 1 || q == -1 {
            return Ok(Mat2::from_ints(q, 0, 0, q));
        }
        return Err(MatError::NoCompletion(q));
    }
    let an = (a as i128) * (n as i128);
    if gcd_i128(q as i128, an) != 1 {
        return Err(MatError::NotCoprime(q, an));
    }
    let (_, x, _) = egcd_i128(q as i128, an);
    // x*q + y*(a*n) = 1, so d = x mod |a*n| keeps 0 <= d < |a*n|
    let d = x.rem_euclid(an.abs());
    let c = (1 - q as i128 * d) / an;
    Ok(Mat2::new(
        rat(q),
        rat(-a),
        Rational::from_integer(BigInt::from(c * n as i128)),
        Rational::from_integer(BigInt::from(d)),
    ))
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}
