//! Dirichlet characters, Ramanujan and character sums, Hecke-style
//! coefficient sequences, and the Dirichlet polynomial relating a twisted
//! series to its primitively-twisted counterpart, together with an exact
//! check of the functional equation that polynomial satisfies.

use crate::arith::{
    divisors, euler_phi, factorize, gcd_u64, is_prime, lcm_u64, moebius, pow_mod,
    primitive_root,
};
use crate::cyclo::{CycloNumber, Rational};
use crate::numeric::{self, Complex, Fixed};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwistError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("character index {index} out of range for modulus {modulus}")]
    BadCharIndex { modulus: u64, index: u64 },
    #[error("character mod {0} is not primitive")]
    NotPrimitive(u64),
    #[error("nebentypus modulus {xi_modulus} does not match level {level}")]
    LevelMismatch { xi_modulus: u64, level: u64 },
    #[error("twist modulus {q} shares a factor with the level {level}")]
    NotCoprime { q: u64, level: u64 },
    #[error("no coefficient data for prime {0}")]
    MissingLambda(u64),
    #[error("no stored coefficient for {p}^{j} at the bad prime {p}")]
    MissingBadData { p: u64, j: u32 },
    #[error("coefficients are indexed from 1")]
    ZeroIndex,
    #[error("{0} is not a prime valid for this slot")]
    BadPrime(u64),
    #[error("X = {x} tests no coefficients (largest polynomial support {support})")]
    XTooSmall { x: u64, support: u64 },
}

/// Generators of the unit group mod q as (generator, order), CRT-lifted so
/// each is 1 modulo the complementary part. The list order is canonical:
/// prime powers ascending, with the order-2 generator first at powers of 2.
fn unit_group_generators(q: u64) -> Vec<(u64, u64)> {
    let mut gens = Vec::new();
    for &(p, e) in &factorize(q) {
        let pk = p.pow(e);
        let rest = q / pk;
        let locals: Vec<(u64, u64)> = if p == 2 {
            match e {
                1 => vec![],
                2 => vec![(3, 2)],
                _ => vec![(pk - 1, 2), (3, 1 << (e - 2))],
            }
        } else {
            vec![(primitive_root(p, e), pk - pk / p)]
        };
        for (g, d) in locals {
            // x = g mod pk, x = 1 mod rest
            let t = ((g + pk - 1) % pk) as u128
                * crate::arith::inv_mod(rest % pk, pk).unwrap() as u128
                % pk as u128;
            let x = (1 + rest as u128 * t) % q as u128;
            gens.push((x as u64, d));
        }
    }
    gens
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    /// lcm of the unit-group generator orders (1 for trivial group)
    group_exponent: u64,
    /// per residue: exponent t with value zeta_L^t, or None off the units
    exponents: Vec<Option<u64>>,
    /// defining exponents against the canonical generator list
    gen_exponents: Vec<u64>,
}

impl DirichletCharacter {
    pub fn from_gen_exponents(q: u64, ks: &[u64]) -> Result<Self, TwistError> {
        if q == 0 {
            return Err(TwistError::ZeroModulus);
        }
        let gens = unit_group_generators(q);
        if ks.len() != gens.len() || ks.iter().zip(&gens).any(|(&k, &(_, d))| k >= d) {
            return Err(TwistError::BadCharIndex { modulus: q, index: u64::MAX });
        }
        let l = gens.iter().fold(1u64, |acc, &(_, d)| lcm_u64(acc, d));
        let mut exponents = vec![None; q as usize];
        // walk the whole unit group in mixed-radix order over the generators
        let mut digits = vec![0u64; gens.len()];
        loop {
            let mut a = 1u64;
            let mut t = 0u64;
            for (i, &(g, d)) in gens.iter().enumerate() {
                a = (a as u128 * pow_mod(g, digits[i], q) as u128 % q as u128) as u64;
                t = ((t as u128 + digits[i] as u128 * ks[i] as u128 * (l / d) as u128)
                    % l as u128) as u64;
            }
            exponents[(a % q) as usize] = Some(t);
            let mut i = 0;
            loop {
                if i == gens.len() {
                    let table_done = DirichletCharacter {
                        modulus: q,
                        group_exponent: l,
                        exponents,
                        gen_exponents: ks.to_vec(),
                    };
                    return Ok(table_done);
                }
                digits[i] += 1;
                if digits[i] < gens[i].1 {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }

    pub fn trivial(q: u64) -> Result<Self, TwistError> {
        let r = unit_group_generators(q).len();
        Self::from_gen_exponents(q, &vec![0; r])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in the canonical enumeration of characters mod q.
    pub fn index(&self) -> u64 {
        let gens = unit_group_generators(self.modulus);
        let mut idx = 0u64;
        for (&k, &(_, d)) in self.gen_exponents.iter().zip(&gens).rev() {
            idx = idx * d + k;
        }
        idx
    }

    pub fn value(&self, n: i64) -> CycloNumber {
        let a = n.rem_euclid(self.modulus as i64) as usize;
        match self.exponents[a] {
            Some(t) => CycloNumber::root_of_unity(self.group_exponent, t as i64).unwrap(),
            None => CycloNumber::zero(),
        }
    }

    pub fn is_unit(&self, n: i64) -> bool {
        self.exponents[n.rem_euclid(self.modulus as i64) as usize].is_some()
    }

    pub fn order(&self) -> u64 {
        let mut g = self.group_exponent;
        for t in self.exponents.iter().flatten() {
            g = gcd_u64(g, *t);
        }
        self.group_exponent / if g == 0 { self.group_exponent } else { g }
    }

    pub fn is_trivial(&self) -> bool {
        self.gen_exponents.iter().all(|&k| k == 0)
    }

    pub fn conj(&self) -> Self {
        let gens = unit_group_generators(self.modulus);
        let ks: Vec<u64> = self
            .gen_exponents
            .iter()
            .zip(&gens)
            .map(|(&k, &(_, d))| (d - k) % d)
            .collect();
        Self::from_gen_exponents(self.modulus, &ks).unwrap()
    }

    /// Smallest modulus the character factors through.
    pub fn conductor(&self) -> u64 {
        'outer: for d in divisors(self.modulus) {
            for (a, t) in self.exponents.iter().enumerate() {
                if let Some(&t) = t.as_ref() {
                    if a as u64 % d == 1 % d && t != 0 {
                        continue 'outer;
                    }
                }
            }
            return d;
        }
        unreachable!("the full modulus always works");
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let qs = self.conductor();
        let gens = unit_group_generators(qs);
        let ks: Vec<u64> = gens
            .iter()
            .map(|&(g, d)| {
                let m = lift_coprime(g, qs, self.modulus);
                let t = self.exponents[(m % self.modulus) as usize]
                    .expect("lift chosen coprime to the modulus");
                // zeta_L^t has order dividing d, so t*d/L is integral
                let num = t as u128 * d as u128;
                debug_assert_eq!(num % self.group_exponent as u128, 0);
                ((num / self.group_exponent as u128) % d as u128) as u64
            })
            .collect();
        Self::from_gen_exponents(qs, &ks).unwrap()
    }

    /// (q*, q0, q2): conductor, product of primes dividing q but not q*,
    /// and the cofactor q / (q* q0).
    pub fn decomposition(&self) -> (u64, u64, u64) {
        let qs = self.conductor();
        let q0: u64 = factorize(self.modulus)
            .iter()
            .filter(|&&(p, _)| qs % p != 0)
            .map(|&(p, _)| p)
            .product();
        (qs, q0, self.modulus / (qs * q0))
    }
}

/// Smallest m with m = n mod qs and gcd(m, q) = 1; exists whenever qs | q
/// and gcd(n, qs) = 1.
fn lift_coprime(n: u64, qs: u64, q: u64) -> u64 {
    let mut m = n % q;
    loop {
        if gcd_u64(m, q) == 1 {
            return m;
        }
        m = (m + qs) % q;
    }
}

pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>, TwistError> {
    let count = character_count(q)?;
    (0..count).map(|i| character_by_index(q, i)).collect()
}

pub fn character_count(q: u64) -> Result<u64, TwistError> {
    if q == 0 {
        return Err(TwistError::ZeroModulus);
    }
    Ok(euler_phi(q))
}

pub fn character_by_index(q: u64, index: u64) -> Result<DirichletCharacter, TwistError> {
    if q == 0 {
        return Err(TwistError::ZeroModulus);
    }
    if index >= euler_phi(q) {
        return Err(TwistError::BadCharIndex { modulus: q, index });
    }
    let gens = unit_group_generators(q);
    let mut ks = Vec::with_capacity(gens.len());
    let mut rest = index;
    for &(_, d) in &gens {
        ks.push(rest % d);
        rest /= d;
    }
    DirichletCharacter::from_gen_exponents(q, &ks)
}

/// c_q(n) by the closed form mu(q/g) phi(q) / phi(q/g) with g = gcd(q, n).
pub fn ramanujan_c(q: u64, n: i64) -> i64 {
    assert!(q >= 1);
    let r = n.rem_euclid(q as i64) as u64;
    let g = if r == 0 { q } else { gcd_u64(q, r) };
    moebius(q / g) * (euler_phi(q) / euler_phi(q / g)) as i64
}

/// The defining exponential sum; reference route for ramanujan_c.
pub fn ramanujan_c_direct(q: u64, n: i64) -> CycloNumber {
    assert!(q >= 1);
    let mut acc = CycloNumber::zero();
    for a in 1..=q {
        if gcd_u64(a, q) == 1 {
            let k = (a as i128 * n as i128).rem_euclid(q as i128) as i64;
            acc = acc.add(&CycloNumber::root_of_unity(q, k).unwrap());
        }
    }
    acc
}

/// tau(chi) = sum of chi(a) e(a/q); defined here for primitive characters
/// only, where |tau|^2 = q.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<CycloNumber, TwistError> {
    if !chi.is_primitive() {
        return Err(TwistError::NotPrimitive(chi.modulus));
    }
    let q = chi.modulus;
    let mut acc = CycloNumber::zero();
    for a in 1..=q {
        let v = chi.value(a as i64);
        if v.term_count() != 0 {
            acc = acc.add(&v.mul(&CycloNumber::root_of_unity(q, a as i64).unwrap()));
        }
    }
    Ok(acc)
}

/// Precomputed data for evaluating c_chi at many n.
pub struct CchiEvaluator {
    q_star: u64,
    q0: u64,
    q2: u64,
    chi_star: DirichletCharacter,
    chi_star_bar: DirichletCharacter,
    tau_star: CycloNumber,
    mu_q0_scaled: Rational,
}

impl CchiEvaluator {
    pub fn new(chi: &DirichletCharacter) -> Self {
        let (q_star, q0, q2) = chi.decomposition();
        let chi_star = chi.primitive();
        let chi_star_bar = chi_star.conj();
        let tau_star = gauss_sum(&chi_star).unwrap();
        let mu_q0_scaled = Rational::from_integer(BigInt::from(moebius(q0) * q2 as i64));
        CchiEvaluator { q_star, q0, q2, chi_star, chi_star_bar, tau_star, mu_q0_scaled }
    }

    pub fn tau_star(&self) -> &CycloNumber {
        &self.tau_star
    }

    pub fn q_star(&self) -> u64 {
        self.q_star
    }

    /// The cofactor u(n) with c_chi(n) = u(n) * tau(chi*); u is a rational
    /// multiple of a single root of unity (or zero).
    pub fn factored(&self, n: i64) -> CycloNumber {
        if n.rem_euclid(self.q2 as i64) != 0 {
            return CycloNumber::zero();
        }
        let np = n / self.q2 as i64;
        let r = np.rem_euclid(self.q0 as i64) as u64;
        let g = if r == 0 { self.q0 } else { gcd_u64(self.q0, r) };
        let scalar = &self.mu_q0_scaled
            * Rational::from_integer(BigInt::from(moebius(g) * euler_phi(g) as i64));
        self.chi_star
            .value(self.q0 as i64)
            .mul(&self.chi_star_bar.value(np))
            .scale(&scalar)
    }

    pub fn value(&self, n: i64) -> CycloNumber {
        self.factored(n).mul(&self.tau_star)
    }
}

/// c_chi(n) via the conductor decomposition: zero unless q2 | n, and
/// otherwise a rational-times-root multiple of tau(chi*).
pub fn c_chi(chi: &DirichletCharacter, n: i64) -> CycloNumber {
    CchiEvaluator::new(chi).value(n)
}

/// The defining sum over units; reference route for c_chi.
pub fn c_chi_direct(chi: &DirichletCharacter, n: i64) -> CycloNumber {
    let q = chi.modulus();
    let mut acc = CycloNumber::zero();
    for a in 1..=q {
        let v = chi.value(a as i64);
        if v.term_count() != 0 {
            let k = (a as i128 * n as i128).rem_euclid(q as i128) as i64;
            acc = acc.add(&v.mul(&CycloNumber::root_of_unity(q, k).unwrap()));
        }
    }
    acc
}

/// Multiplicative coefficient data: nebentypus xi mod the level, one lambda
/// per good prime driving the usual recursion, and freely specified values
/// at primes dividing the level.
#[derive(Clone, Debug)]
pub struct HeckeCoefficients {
    level: u64,
    xi: DirichletCharacter,
    lambda: BTreeMap<u64, CycloNumber>,
    bad: BTreeMap<u64, Vec<CycloNumber>>,
}

impl HeckeCoefficients {
    pub fn new(
        level: u64,
        xi: DirichletCharacter,
        lambda: BTreeMap<u64, CycloNumber>,
        bad: BTreeMap<u64, Vec<CycloNumber>>,
    ) -> Result<Self, TwistError> {
        if xi.modulus() != level {
            return Err(TwistError::LevelMismatch { xi_modulus: xi.modulus(), level });
        }
        for &p in lambda.keys() {
            if !is_prime(p) || level % p == 0 {
                return Err(TwistError::BadPrime(p));
            }
        }
        for &p in bad.keys() {
            if !is_prime(p) || level % p != 0 {
                return Err(TwistError::BadPrime(p));
            }
        }
        Ok(HeckeCoefficients { level, xi, lambda, bad })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn xi(&self) -> &DirichletCharacter {
        &self.xi
    }

    pub fn lambda_prime_power(&self, p: u64, j: i64) -> Result<CycloNumber, TwistError> {
        if j < 0 {
            return Ok(CycloNumber::zero());
        }
        if j == 0 {
            return Ok(CycloNumber::one());
        }
        if self.level % p == 0 {
            let stored = self.bad.get(&p).ok_or(TwistError::MissingBadData { p, j: j as u32 })?;
            return stored
                .get(j as usize - 1)
                .cloned()
                .ok_or(TwistError::MissingBadData { p, j: j as u32 });
        }
        let lp = self.lambda.get(&p).ok_or(TwistError::MissingLambda(p))?;
        let xi_p = self.xi.value(p as i64);
        let mut prev = CycloNumber::one();
        let mut cur = lp.clone();
        for _ in 1..j {
            let next = lp.mul(&cur).sub(&xi_p.mul(&prev));
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    pub fn coefficient(&self, n: u64) -> Result<CycloNumber, TwistError> {
        if n == 0 {
            return Err(TwistError::ZeroIndex);
        }
        let mut acc = CycloNumber::one();
        for &(p, e) in &factorize(n) {
            acc = acc.mul(&self.lambda_prime_power(p, e as i64)?);
        }
        Ok(acc)
    }

    /// Coefficient data of the dual series: conjugated nebentypus and
    /// lambda~_p = conj(xi(p)) lambda_p at good primes. Values at level
    /// primes carry over unchanged.
    pub fn dual(&self) -> Self {
        let xi_bar = self.xi.conj();
        let lambda = self
            .lambda
            .iter()
            .map(|(&p, v)| (p, xi_bar.value(p as i64).mul(v)))
            .collect();
        HeckeCoefficients { level: self.level, xi: xi_bar, lambda, bad: self.bad.clone() }
    }
}

/// Monomial in the symbols u_p = p^(-s); exponents may be negative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(Vec<(u64, i64)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn u_pow(p: u64, e: i64) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(p, e)])
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut map: BTreeMap<u64, i64> = self.0.iter().copied().collect();
        for &(p, e) in &o.0 {
            let v = map.entry(p).or_insert(0);
            *v += e;
            if *v == 0 {
                map.remove(&p);
            }
        }
        Monomial(map.into_iter().collect())
    }

    pub fn inverse(&self) -> Self {
        Monomial(self.0.iter().map(|&(p, e)| (p, -e)).collect())
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.0
    }

    /// The integer n with this monomial = n^(-s), if all exponents are >= 0.
    pub fn as_index(&self) -> Option<u64> {
        let mut n = 1u64;
        for &(p, e) in &self.0 {
            if e < 0 {
                return None;
            }
            n = n.checked_mul(p.checked_pow(e as u32)?)?;
        }
        Some(n)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|&(p, e)| format!("u{p}^{e}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Finite sum of cyclotomic coefficients times monomials in the u_p.
#[derive(Clone, Debug)]
pub struct DirichletPolynomial {
    terms: BTreeMap<Monomial, CycloNumber>,
}

impl DirichletPolynomial {
    pub fn zero() -> Self {
        DirichletPolynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_term(Monomial::one(), CycloNumber::one())
    }

    pub fn from_term(m: Monomial, c: CycloNumber) -> Self {
        let mut dp = Self::zero();
        dp.insert(m, c);
        dp
    }

    fn insert(&mut self, m: Monomial, c: CycloNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &CycloNumber)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DirichletPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.insert(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &CycloNumber) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.insert(m.clone(), v.mul(c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Substitutes s -> 1 - s, realized on monomials as u_p -> (p u_p)^(-1).
    pub fn subst_one_minus_s(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut scalar = Rational::one();
            for &(p, e) in m.factors() {
                let pe = BigInt::from(p).pow(e.unsigned_abs() as u32);
                if e > 0 {
                    scalar /= Rational::from_integer(pe);
                } else {
                    scalar *= Rational::from_integer(pe);
                }
            }
            out.insert(m.inverse(), c.scale(&scalar));
        }
        out
    }

    /// View as a Dirichlet series n -> coefficient; None if any exponent is
    /// negative.
    pub fn as_series(&self) -> Option<BTreeMap<u64, CycloNumber>> {
        let mut map = BTreeMap::new();
        for (m, c) in &self.terms {
            map.insert(m.as_index()?, c.clone());
        }
        Some(map)
    }

    /// Numeric evaluation at a complex point s.
    pub fn eval(&self, s: &Complex) -> Complex {
        let mut acc = Complex::zero();
        for (m, c) in &self.terms {
            let mut w = Fixed::zero();
            for &(p, e) in m.factors() {
                w = w.add(&numeric::ln_u64(p).mul(&Fixed::from_i64(e)));
            }
            let term = numeric::exp_complex(&s.neg().scale(&w));
            acc = acc.add(&term.mul(&numeric::cyclo_to_complex(c)));
        }
        acc
    }
}

impl PartialEq for DirichletPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for DirichletPolynomial {}

impl fmt::Display for DirichletPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The Dirichlet polynomial D with sum lambda_n c_chi(n) n^(-s) =
/// D(s) * sum lambda_n c_chi*(n) n^(-s), assembled from the closed form:
/// for p | q*, a factor lambda_{p^e} p^{e(1-s)} with e = ord_p(q/q*); for
/// p | q away from q*, the bracket
/// lambda_{p^a} p^(1-s) - lambda_{p^(a-1)} (chi*(p) + xi(p) conj(chi*)(p)
/// p^(1-2s)) + lambda_{p^(a-2)} xi(p) p^(-s), times p^((a-1)(1-s)).
pub fn build_d(
    h: &HeckeCoefficients,
    chi: &DirichletCharacter,
) -> Result<DirichletPolynomial, TwistError> {
    let q = chi.modulus();
    if gcd_u64(q, h.level()) != 1 {
        return Err(TwistError::NotCoprime { q, level: h.level() });
    }
    let chi_star = chi.primitive();
    let chi_star_bar = chi_star.conj();
    let q_star = chi_star.modulus();
    let mut d = DirichletPolynomial::one();
    for &(p, a) in &factorize(q) {
        let factor = if q_star % p == 0 {
            let e = a - factorize(q_star).iter().find(|&&(pp, _)| pp == p).unwrap().1;
            if e == 0 {
                continue;
            }
            let lam = h.lambda_prime_power(p, e as i64)?;
            let scale = Rational::from_integer(BigInt::from(p).pow(e));
            DirichletPolynomial::from_term(Monomial::u_pow(p, e as i64), lam.scale(&scale))
        } else {
            let xi_p = h.xi().value(p as i64);
            let lam_a = h.lambda_prime_power(p, a as i64)?;
            let lam_a1 = h.lambda_prime_power(p, a as i64 - 1)?;
            let lam_a2 = h.lambda_prime_power(p, a as i64 - 2)?;
            let p_rat = Rational::from_integer(BigInt::from(p));
            let mut bracket = DirichletPolynomial::from_term(
                Monomial::u_pow(p, 1),
                lam_a.scale(&p_rat),
            );
            bracket = bracket.sub(&DirichletPolynomial::from_term(
                Monomial::one(),
                lam_a1.mul(&chi_star.value(p as i64)),
            ));
            bracket = bracket.sub(&DirichletPolynomial::from_term(
                Monomial::u_pow(p, 2),
                lam_a1.mul(&xi_p).mul(&chi_star_bar.value(p as i64)).scale(&p_rat),
            ));
            bracket = bracket.add(&DirichletPolynomial::from_term(
                Monomial::u_pow(p, 1),
                lam_a2.mul(&xi_p),
            ));
            let prefactor = DirichletPolynomial::from_term(
                Monomial::u_pow(p, a as i64 - 1),
                CycloNumber::from_rational(Rational::from_integer(
                    BigInt::from(p).pow(a - 1),
                )),
            );
            prefactor.mul(&bracket)
        };
        d = d.mul(&factor);
    }
    Ok(d)
}

/// Exact check of D_f(s) = (q/q*)^(1-2s) xi(q/q*) D_g(1-s) as Laurent
/// objects in the u_p.
pub fn check_fe(
    df: &DirichletPolynomial,
    dg: &DirichletPolynomial,
    q: u64,
    q_star: u64,
    xi: &DirichletCharacter,
) -> bool {
    assert!(q_star >= 1 && q % q_star == 0);
    let ratio = q / q_star;
    let mut mono = Monomial::one();
    for &(p, a) in &factorize(ratio) {
        mono = mono.mul(&Monomial::u_pow(p, 2 * a as i64));
    }
    let coeff = xi
        .value(ratio as i64)
        .scale(&Rational::from_integer(BigInt::from(ratio)));
    let rhs = DirichletPolynomial::from_term(mono, coeff).mul(&dg.subst_one_minus_s());
    *df == rhs
}

/// Numeric spot-check of the same identity at given complex points.
pub fn check_fe_numeric(
    df: &DirichletPolynomial,
    dg: &DirichletPolynomial,
    q: u64,
    q_star: u64,
    xi: &DirichletCharacter,
    points: &[Complex],
    tol: &Fixed,
) -> bool {
    let ratio = q / q_star;
    points.iter().all(|s| {
        let lhs = df.eval(s);
        let one_minus_s = Complex::one().sub(s);
        // (q/q*)^(1-2s) = exp((1-2s) ln(q/q*))
        let expo = Complex::one().sub(&s.scale(&Fixed::from_i64(2)));
        let power = numeric::exp_complex(&expo.scale(&numeric::ln_u64(ratio)));
        let rhs = power
            .mul(&numeric::cyclo_to_complex(&xi.value(ratio as i64)))
            .mul(&dg.eval(&one_minus_s));
        lhs.approx_eq(&rhs, tol)
    })
}

fn convolution_matches(
    h: &HeckeCoefficients,
    chi: &DirichletCharacter,
    d: &DirichletPolynomial,
    x: u64,
) -> Result<bool, TwistError> {
    let series = d.as_series().expect("polynomial from build_d has no negative exponents");
    let support = series.keys().copied().max().unwrap_or(1);
    let limit = x / support;
    if limit == 0 {
        return Err(TwistError::XTooSmall { x, support });
    }
    let ev = CchiEvaluator::new(chi);
    let ev_star = CchiEvaluator::new(&chi.primitive());
    for n in 1..=limit {
        let mut lhs = CycloNumber::zero();
        for (&dd, coeff) in &series {
            if n % dd == 0 {
                let m = n / dd;
                lhs = lhs.add(&coeff.mul(&h.coefficient(m)?).mul(&ev_star.value(m as i64)));
            }
        }
        let rhs = h.coefficient(n)?.mul(&ev.value(n as i64));
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force convolution check that build_d produced the right
/// polynomial: the coefficients of D(s) * sum_{n <= X} lambda_n c_chi*(n)
/// n^(-s) must equal lambda_n c_chi(n) for every n up to X over the
/// largest support of D.
pub fn oracle_twist_ratio(
    h: &HeckeCoefficients,
    chi: &DirichletCharacter,
    x: u64,
) -> Result<bool, TwistError> {
    let d = build_d(h, chi)?;
    convolution_matches(h, chi, &d, x)
}

/// The functions c_chi over all characters of all moduli dividing Q,
/// viewed on Z/Q: checks the family has exactly Q members, each with
/// nonzero self-product, pairwise orthogonal.
///
/// Inner products factor as tau(chi*) conj(tau(chi'*)) times a sum of
/// single-root terms; the tau factors are nonzero, so only the sums are
/// tested.
pub fn orthogonality_check(q_big: u64) -> Result<bool, TwistError> {
    if q_big == 0 {
        return Err(TwistError::ZeroModulus);
    }
    let mut factored_tables: Vec<Vec<CycloNumber>> = Vec::new();
    for d in divisors(q_big) {
        for chi in characters_mod(d)? {
            let ev = CchiEvaluator::new(&chi);
            factored_tables.push((0..q_big).map(|n| ev.factored(n as i64)).collect());
        }
    }
    if factored_tables.len() as u64 != q_big {
        return Ok(false);
    }
    for i in 0..factored_tables.len() {
        for j in i..factored_tables.len() {
            let mut acc = CycloNumber::zero();
            for n in 0..q_big as usize {
                acc = acc.add(&factored_tables[i][n].mul(&factored_tables[j][n].conj()));
            }
            if (i == j) == acc.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn cy(n: i64) -> CycloNumber {
        CycloNumber::from_integer(n)
    }

    #[test]
    fn character_counts_and_multiplicativity() {
        for q in [1u64, 2, 3, 4, 5, 8, 9, 12, 24] {
            let chars = characters_mod(q).unwrap();
            assert_eq!(chars.len() as u64, euler_phi(q));
            for (i, chi) in chars.iter().enumerate() {
                assert_eq!(chi.index(), i as u64);
                assert!(chi.value(1).is_one());
                for a in 0..q as i64 {
                    for b in 0..q as i64 {
                        let lhs = chi.value(a * b);
                        let rhs = chi.value(a).mul(&chi.value(b));
                        assert_eq!(lhs, rhs, "q={q} chi#{i} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn modulus_one_is_constant_one() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        for n in -3..4 {
            assert!(chi.value(n).is_one());
        }
        assert_eq!(chi.conductor(), 1);
        assert_eq!(chi.order(), 1);
    }

    #[test]
    fn conductor_tables() {
        let conds = |q: u64| {
            let mut v: Vec<u64> =
                characters_mod(q).unwrap().iter().map(|c| c.conductor()).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(conds(12), vec![1, 3, 4, 12]);
        assert_eq!(conds(8), vec![1, 4, 8, 8]);
        assert_eq!(conds(9), vec![1, 3, 9, 9, 9, 9]);
        assert_eq!(conds(5), vec![1, 5, 5, 5]);
        assert!(DirichletCharacter::trivial(60).unwrap().conductor() == 1);
    }

    #[test]
    fn induced_character_agrees_on_units() {
        for q in [12u64, 9, 24, 45] {
            for chi in characters_mod(q).unwrap() {
                let star = chi.primitive();
                assert_eq!(star.conductor(), star.modulus());
                for n in 1..=q as i64 {
                    if gcd_u64(n as u64, q) == 1 {
                        assert_eq!(chi.value(n), star.value(n));
                    }
                }
                let (qs, q0, q2) = chi.decomposition();
                assert_eq!(qs * q0 * q2, q);
                for &(p, _) in &factorize(q0) {
                    assert!(q % p == 0 && qs % p != 0);
                }
            }
        }
    }

    #[test]
    fn conjugation_involutes() {
        for chi in characters_mod(15).unwrap() {
            assert_eq!(chi.conj().conj(), chi);
            for n in 0..15 {
                assert_eq!(chi.conj().value(n), chi.value(n).conj());
            }
        }
    }

    #[test]
    fn ramanujan_closed_form_vs_direct() {
        for q in 1..=30u64 {
            for n in -10i64..=30 {
                let direct = ramanujan_c_direct(q, n)
                    .to_rational()
                    .expect("Ramanujan sums are integers");
                assert_eq!(direct, Rational::from_integer(BigInt::from(ramanujan_c(q, n))));
            }
        }
    }

    #[test]
    fn ramanujan_known_values() {
        assert_eq!(ramanujan_c(4, 2), -2);
        assert_eq!(ramanujan_c(1, 17), 1);
        for q in [2u64, 3, 5, 7, 11] {
            for n in 1..q as i64 {
                assert_eq!(ramanujan_c(q, n), -1);
            }
            assert_eq!(ramanujan_c(q, q as i64), q as i64 - 1);
        }
        // periodicity and multiplicativity in the modulus
        for q in 1..=12u64 {
            for n in 0..12i64 {
                assert_eq!(ramanujan_c(q, n), ramanujan_c(q, n + q as i64));
            }
        }
        for (q1, q2) in [(3u64, 4u64), (5, 8), (9, 4)] {
            for n in 0..20i64 {
                assert_eq!(
                    ramanujan_c(q1 * q2, n),
                    ramanujan_c(q1, n) * ramanujan_c(q2, n)
                );
            }
        }
    }

    #[test]
    fn gauss_sum_basics() {
        let one = DirichletCharacter::trivial(1).unwrap();
        assert!(gauss_sum(&one).unwrap().is_one());
        assert_eq!(
            gauss_sum(&DirichletCharacter::trivial(4).unwrap()).unwrap_err(),
            TwistError::NotPrimitive(4)
        );
        // |tau|^2 = q for every primitive character
        for q in 1..=13u64 {
            for chi in characters_mod(q).unwrap() {
                if chi.is_primitive() {
                    let tau = gauss_sum(&chi).unwrap();
                    assert_eq!(
                        tau.mul(&tau.conj()),
                        cy(q as i64),
                        "q={q} index={}",
                        chi.index()
                    );
                    // tau(chi) tau(conj chi) = chi(-1) q
                    let tau_bar = gauss_sum(&chi.conj()).unwrap();
                    assert_eq!(tau.mul(&tau_bar), chi.value(-1).scale(&rat(q as i64, 1)));
                }
            }
        }
        // quadratic character mod 5: tau^2 = 5
        let quad = characters_mod(5)
            .unwrap()
            .into_iter()
            .find(|c| c.order() == 2)
            .unwrap();
        let tau = gauss_sum(&quad).unwrap();
        assert_eq!(tau.mul(&tau), cy(5));
    }

    #[test]
    fn c_chi_fast_vs_direct() {
        for q in 1..=21u64 {
            for chi in characters_mod(q).unwrap() {
                let ev = CchiEvaluator::new(&chi);
                for n in -6i64..=24 {
                    let fast = ev.value(n);
                    let direct = c_chi_direct(&chi, n);
                    assert_eq!(fast, direct, "q={q} index={} n={n}", chi.index());
                }
            }
        }
    }

    #[test]
    fn c_chi_special_shapes() {
        // trivial character: c_chi = ramanujan sum
        for q in [4u64, 6, 12] {
            let chi = DirichletCharacter::trivial(q).unwrap();
            for n in 0..15i64 {
                assert_eq!(
                    c_chi(&chi, n).to_rational().unwrap(),
                    Rational::from_integer(BigInt::from(ramanujan_c(q, n)))
                );
            }
        }
        // primitive character: c_chi(n) = tau(chi) conj(chi)(n)
        for chi in characters_mod(7).unwrap() {
            if chi.is_primitive() {
                let tau = gauss_sum(&chi).unwrap();
                for n in 0..10i64 {
                    assert_eq!(c_chi(&chi, n), tau.mul(&chi.conj().value(n)));
                }
            }
        }
        // q2 does not divide n: zero. trivial mod 4 has q2 = 2
        let chi = DirichletCharacter::trivial(4).unwrap();
        assert_eq!(chi.decomposition(), (1, 2, 2));
        for n in [1i64, 3, 5, -1] {
            assert!(c_chi(&chi, n).is_zero());
        }
    }

    fn hecke_rational(
        level: u64,
        xi_index: u64,
        lams: &[(u64, Rational)],
        bad: &[(u64, Vec<Rational>)],
    ) -> HeckeCoefficients {
        let xi = character_by_index(level, xi_index).unwrap();
        let lambda = lams
            .iter()
            .map(|(p, r)| (*p, CycloNumber::from_rational(r.clone())))
            .collect();
        let bad = bad
            .iter()
            .map(|(p, v)| {
                (*p, v.iter().map(|r| CycloNumber::from_rational(r.clone())).collect())
            })
            .collect();
        HeckeCoefficients::new(level, xi, lambda, bad).unwrap()
    }

    #[test]
    fn hecke_recursion_and_multiplicativity() {
        let h = hecke_rational(
            1,
            0,
            &[(2, rat(3, 5)), (3, rat(-1, 2)), (5, rat(7, 1))],
            &[],
        );
        assert!(h.coefficient(1).unwrap().is_one());
        assert_eq!(
            h.coefficient(6).unwrap(),
            h.coefficient(2).unwrap().mul(&h.coefficient(3).unwrap())
        );
        // lambda_{p^2} = lambda_p^2 - xi(p) with trivial xi
        let l2 = h.coefficient(2).unwrap();
        assert_eq!(h.coefficient(4).unwrap(), l2.mul(&l2).sub(&cy(1)));
        for j in 1..5i64 {
            let next = h.lambda_prime_power(2, j + 1).unwrap();
            let prev = h.lambda_prime_power(2, j - 1).unwrap();
            let cur = h.lambda_prime_power(2, j).unwrap();
            assert_eq!(next.add(&prev), l2.mul(&cur));
        }
        assert_eq!(h.coefficient(0).unwrap_err(), TwistError::ZeroIndex);
        assert_eq!(h.coefficient(7).unwrap_err(), TwistError::MissingLambda(7));
    }

    #[test]
    fn hecke_nontrivial_nebentypus_and_dual() {
        let h = hecke_rational(
            7,
            2,
            &[(2, rat(1, 3)), (3, rat(-2, 1)), (5, rat(1, 1)), (11, rat(4, 7)), (13, rat(0, 1))],
            &[(7, vec![rat(1, 2), rat(0, 1)])],
        );
        let xi = h.xi().clone();
        assert!(!xi.is_trivial());
        // recursion with the character value in place
        let l2 = h.lambda_prime_power(2, 1).unwrap();
        let l4 = h.lambda_prime_power(2, 2).unwrap();
        assert_eq!(l4, l2.mul(&l2).sub(&xi.value(2)));
        // bad prime data is read back as stored
        assert_eq!(h.lambda_prime_power(7, 1).unwrap(), CycloNumber::from_rational(rat(1, 2)));
        assert!(h.lambda_prime_power(7, 2).unwrap().is_zero());
        assert_eq!(
            h.lambda_prime_power(7, 3).unwrap_err(),
            TwistError::MissingBadData { p: 7, j: 3 }
        );
        // dual: lambda~_n = conj(xi)(n) lambda_n away from the level
        let dual = h.dual();
        for n in [1u64, 2, 3, 4, 6, 9, 10, 11, 12, 13] {
            assert_eq!(
                dual.coefficient(n).unwrap(),
                xi.conj().value(n as i64).mul(&h.coefficient(n).unwrap()),
                "n={n}"
            );
        }
        // and the dual of the dual recovers the original at good primes
        for n in [2u64, 3, 6, 11] {
            assert_eq!(dual.dual().coefficient(n).unwrap(), h.coefficient(n).unwrap());
        }
    }

    #[test]
    fn hecke_validation() {
        let xi = DirichletCharacter::trivial(6).unwrap();
        assert_eq!(
            HeckeCoefficients::new(4, xi.clone(), BTreeMap::new(), BTreeMap::new())
                .unwrap_err(),
            TwistError::LevelMismatch { xi_modulus: 6, level: 4 }
        );
        let mut lam = BTreeMap::new();
        lam.insert(3u64, cy(1));
        assert_eq!(
            HeckeCoefficients::new(6, xi.clone(), lam, BTreeMap::new()).unwrap_err(),
            TwistError::BadPrime(3)
        );
        let mut bad = BTreeMap::new();
        bad.insert(5u64, vec![cy(1)]);
        assert_eq!(
            HeckeCoefficients::new(6, xi, BTreeMap::new(), bad).unwrap_err(),
            TwistError::BadPrime(5)
        );
    }

    #[test]
    fn polynomial_algebra() {
        let u2 = Monomial::u_pow(2, 1);
        let u3 = Monomial::u_pow(3, -2);
        assert_eq!(u2.mul(&u3).factors(), &[(2, 1), (3, -2)]);
        assert_eq!(u2.mul(&u2.inverse()), Monomial::one());
        assert_eq!(Monomial::u_pow(6, 0), Monomial::one());
        assert_eq!(u2.as_index(), Some(2));
        assert_eq!(u3.as_index(), None);

        let p = DirichletPolynomial::from_term(u2.clone(), cy(3))
            .add(&DirichletPolynomial::one());
        let q = DirichletPolynomial::from_term(u2.clone(), cy(-3))
            .add(&DirichletPolynomial::one());
        // (1 + 3u)(1 - 3u) = 1 - 9u^2
        let expect = DirichletPolynomial::one()
            .sub(&DirichletPolynomial::from_term(Monomial::u_pow(2, 2), cy(9)));
        assert_eq!(p.mul(&q), expect);
        assert!(p.sub(&p).is_zero());

        // substitution is an involution
        let poly = DirichletPolynomial::from_term(Monomial::u_pow(5, 2), cy(7))
            .add(&DirichletPolynomial::from_term(u2, cy(-2)))
            .add(&DirichletPolynomial::one());
        assert_eq!(poly.subst_one_minus_s().subst_one_minus_s(), poly);
    }

    #[test]
    fn polynomial_eval_matches_series() {
        // 1 - 9 * 4^{-s} at s = 1/2 - i/3
        let poly = DirichletPolynomial::one()
            .sub(&DirichletPolynomial::from_term(Monomial::u_pow(2, 2), cy(9)));
        let s = Complex::new(
            Fixed::from_rational(&rat(1, 2)),
            Fixed::from_rational(&rat(-1, 3)),
        );
        let got = poly.eval(&s);
        let want = Complex::one().sub(
            &numeric::n_pow_minus_s(4, &s).scale(&Fixed::from_i64(9)),
        );
        assert!(got.approx_eq(&want, &Fixed::pow10_neg(30)));
    }

    #[test]
    fn build_d_primitive_is_one() {
        let h = hecke_rational(1, 0, &[(2, rat(1, 2)), (5, rat(3, 1))], &[]);
        for chi in characters_mod(5).unwrap() {
            if chi.is_primitive() {
                assert_eq!(build_d(&h, &chi).unwrap(), DirichletPolynomial::one());
            }
        }
        assert_eq!(
            build_d(&h, &DirichletCharacter::trivial(1).unwrap()).unwrap(),
            DirichletPolynomial::one()
        );
    }

    #[test]
    fn build_d_trivial_prime_modulus() {
        let h = hecke_rational(1, 0, &[(3, rat(-4, 7))], &[]);
        let chi = DirichletCharacter::trivial(3).unwrap();
        let d = build_d(&h, &chi).unwrap();
        // lambda_3 * 3^{1-s} - 1 - 3^{1-2s}
        let expect = DirichletPolynomial::from_term(
            Monomial::u_pow(3, 1),
            CycloNumber::from_rational(rat(-4 * 3, 7)),
        )
        .sub(&DirichletPolynomial::one())
        .sub(&DirichletPolynomial::from_term(Monomial::u_pow(3, 2), cy(3)));
        assert_eq!(d, expect);
    }

    #[test]
    fn build_d_prime_times_conductor() {
        // chi mod 9 induced from a primitive character mod 3: q/q* = 3
        let h = hecke_rational(1, 0, &[(3, rat(5, 2))], &[]);
        let chi9 = characters_mod(9)
            .unwrap()
            .into_iter()
            .find(|c| c.conductor() == 3)
            .unwrap();
        let d = build_d(&h, &chi9).unwrap();
        let expect = DirichletPolynomial::from_term(
            Monomial::u_pow(3, 1),
            CycloNumber::from_rational(rat(15, 2)),
        );
        assert_eq!(d, expect);
        assert_eq!(
            build_d(&hecke_rational(3, 0, &[], &[(3, vec![])]), &chi9).unwrap_err(),
            TwistError::NotCoprime { q: 9, level: 3 }
        );
    }

    #[test]
    fn functional_equation_exact_and_numeric() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let points: Vec<Complex> = (0..3)
            .map(|_| {
                Complex::new(
                    Fixed::from_rational(&rat(rng.gen_range(-3i64..=3), 4)),
                    Fixed::from_rational(&rat(rng.gen_range(-3i64..=3), 5)),
                )
            })
            .collect();
        for q in [3u64, 4, 9, 12, 15] {
            for chi in characters_mod(q).unwrap() {
                let lams: Vec<(u64, Rational)> = factorize(q)
                    .iter()
                    .map(|&(p, _)| {
                        (p, rat(rng.gen_range(-8i64..=8), rng.gen_range(1i64..=5)))
                    })
                    .collect();
                let h = hecke_rational(1, 0, &lams, &[]);
                let df = build_d(&h, &chi).unwrap();
                let dg = build_d(&h.dual(), &chi.conj()).unwrap();
                let q_star = chi.conductor();
                assert!(
                    check_fe(&df, &dg, q, q_star, h.xi()),
                    "q={q} index={}",
                    chi.index()
                );
                assert!(check_fe_numeric(
                    &df,
                    &dg,
                    q,
                    q_star,
                    h.xi(),
                    &points,
                    &Fixed::pow10_neg(20)
                ));
                // corrupting one coefficient must break the identity
                if !df.is_zero() {
                    let broken = df.add(&DirichletPolynomial::from_term(
                        Monomial::u_pow(2, 1),
                        cy(1),
                    ));
                    assert!(!check_fe(&broken, &dg, q, q_star, h.xi()));
                }
            }
        }
    }

    #[test]
    fn functional_equation_nontrivial_nebentypus() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // level 7 with a character of order 6; twists by characters mod q
        // coprime to 7
        for xi_index in [1u64, 3] {
            let lams: Vec<(u64, Rational)> = [2u64, 3, 5]
                .iter()
                .map(|&p| (p, rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=4))))
                .collect();
            let h = hecke_rational(7, xi_index, &lams, &[(7, vec![rat(1, 1)])]);
            for q in [4u64, 9, 12] {
                for chi in characters_mod(q).unwrap() {
                    let df = build_d(&h, &chi).unwrap();
                    let dg = build_d(&h.dual(), &chi.conj()).unwrap();
                    assert!(
                        check_fe(&df, &dg, q, chi.conductor(), h.xi()),
                        "xi#{xi_index} q={q} chi#{}",
                        chi.index()
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_validates_and_detects_corruption() {
        let h = hecke_rational(
            1,
            0,
            &[(2, rat(3, 4)), (3, rat(-5, 3)), (5, rat(1, 6)), (7, rat(2, 1)),
              (11, rat(-1, 2)), (13, rat(1, 1)), (17, rat(0, 1)), (19, rat(2, 7)),
              (23, rat(-3, 5)), (29, rat(1, 3)), (31, rat(4, 3)), (37, rat(-2, 9)),
              (41, rat(5, 6)), (43, rat(-1, 7)), (47, rat(3, 2))],
            &[],
        );
        let trivial1 = DirichletCharacter::trivial(1).unwrap();
        assert!(oracle_twist_ratio(&h, &trivial1, 50).unwrap());

        let chi = DirichletCharacter::trivial(3).unwrap();
        assert!(oracle_twist_ratio(&h, &chi, 50).unwrap());

        let chi12 = characters_mod(12)
            .unwrap()
            .into_iter()
            .find(|c| c.conductor() == 3)
            .unwrap();
        assert!(oracle_twist_ratio(&h, &chi12, 50).unwrap());

        // corrupt one coefficient of D: the convolution must notice
        let d = build_d(&h, &chi).unwrap();
        let broken = d.add(&DirichletPolynomial::from_term(Monomial::u_pow(3, 1), cy(1)));
        assert_eq!(convolution_matches(&h, &chi, &broken, 50), Ok(false));

        assert_eq!(
            oracle_twist_ratio(&h, &chi, 5),
            Err(TwistError::XTooSmall { x: 5, support: 9 })
        );
    }

    #[test]
    fn orthogonality_small_moduli() {
        for q in [1u64, 2, 5, 12] {
            assert!(orthogonality_check(q).unwrap(), "Q={q}");
        }
    }
}
