//! Exact arithmetic in cyclotomic fields.
//!
//! A value is a rational combination of roots of unity of a common order
//! (the conductor). Sums and products stay in the group-ring picture, which
//! keeps term counts small; zero tests reduce into a basis of the field, one
//! prime power at a time. Equality is mathematical equality, not equality of
//! representations.

use crate::arith::{factorize, inv_mod, lcm_u64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("{0} does not divide {1}")]
    NotDivisible(u64, u64),
    #[error("galois index {0} not coprime to conductor {1}")]
    NotCoprime(u64, u64),
}

#[derive(Clone, Debug)]
pub struct CycloNumber {
    conductor: u64,
    /// exponent (mod conductor) -> coefficient; no zero coefficients stored
    terms: BTreeMap<u64, Rational>,
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber { conductor: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(0, r);
        }
        CycloNumber { conductor: 1, terms }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `e(k/m)`: the primitive description is normalized, so the stored
    /// conductor is `m / gcd(k, m)`.
    pub fn root_of_unity(m: u64, k: i64) -> Result<Self, CycloError> {
        if m == 0 {
            return Err(CycloError::ZeroConductor);
        }
        let k = k.rem_euclid(m as i64) as u64;
        let g = crate::arith::gcd_u64(k, m);
        let (m, k) = if g == 0 { (1, 0) } else { (m / g, k / g) };
        let mut terms = BTreeMap::new();
        terms.insert(k % m, Rational::one());
        Ok(CycloNumber { conductor: m, terms })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    /// Re-expresses the value with conductor `m` (a multiple of the current
    /// one). The value is unchanged.
    pub fn embed(&self, m: u64) -> Result<Self, CycloError> {
        if m == 0 {
            return Err(CycloError::ZeroConductor);
        }
        if m % self.conductor != 0 {
            return Err(CycloError::NotDivisible(self.conductor, m));
        }
        let scale = m / self.conductor;
        let terms = self.terms.iter().map(|(&e, c)| (e * scale, c.clone())).collect();
        Ok(CycloNumber { conductor: m, terms })
    }

    fn merge<F: Fn(&Rational) -> Rational>(&self, rhs: &Self, f: F) -> Self {
        let m = lcm_u64(self.conductor, rhs.conductor);
        let a = self.embed(m).unwrap();
        let b = rhs.embed(m).unwrap();
        let mut terms = a.terms;
        for (e, c) in b.terms {
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot += f(&c);
            if slot.is_zero() {
                terms.remove(&e);
            }
        }
        CycloNumber { conductor: m, terms }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.merge(rhs, |c| c.clone())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.merge(rhs, |c| -c.clone())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(&e, c)| (e, -c.clone())).collect();
        CycloNumber { conductor: self.conductor, terms }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(&e, c)| (e, c * r)).collect();
        CycloNumber { conductor: self.conductor, terms }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let m = lcm_u64(self.conductor, rhs.conductor);
        let a = self.embed(m).unwrap();
        let b = rhs.embed(m).unwrap();
        let mut terms: BTreeMap<u64, Rational> = BTreeMap::new();
        for (&ea, ca) in &a.terms {
            for (&eb, cb) in &b.terms {
                let e = (ea + eb) % m;
                let slot = terms.entry(e).or_insert_with(Rational::zero);
                *slot += ca * cb;
                if slot.is_zero() {
                    terms.remove(&e);
                }
            }
        }
        CycloNumber { conductor: m, terms }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Applies the automorphism sending each order-`m` root to its `k`-th
    /// power; `k` must be invertible mod the conductor.
    pub fn galois(&self, k: u64) -> Result<Self, CycloError> {
        let m = self.conductor;
        if inv_mod(k % m, m).is_none() {
            return Err(CycloError::NotCoprime(k, m));
        }
        let terms = self
            .terms
            .iter()
            .map(|(&e, c)| ((e as u128 * k as u128 % m as u128) as u64, c.clone()))
            .collect();
        Ok(CycloNumber { conductor: m, terms })
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Self {
        if self.conductor <= 2 {
            return self.clone();
        }
        self.galois(self.conductor - 1).unwrap()
    }

    /// Coefficients over the product basis of the degree-phi(conductor)
    /// field extension. Two values are equal exactly when their conductors'
    /// lcm-embeddings produce identical coefficient vectors; a value is zero
    /// exactly when all coefficients vanish.
    ///
    /// The basis is the product over prime powers p^e || M of the monomials
    /// `zeta_{p^e}^a` with `a = u p^(e-1) + v`, `0 <= u <= p-2`,
    /// `0 <= v < p^(e-1)`; a top-layer exponent (`u = p-1`) rewrites as minus
    /// the sum over the lower layers.
    pub fn canonical_coeffs(&self) -> (u64, Vec<Rational>) {
        let m = self.conductor;
        let fac = factorize(m);
        // per prime power: modulus p^e, alpha (CRT weight), phi, p^(e-1), stride
        struct Comp {
            pk: u64,
            alpha: u64,
            phi: u64,
            layer: u64,
            stride: u64,
        }
        let mut comps: Vec<Comp> = Vec::new();
        let mut stride = 1u64;
        for &(p, e) in &fac {
            let pk = p.pow(e);
            let alpha = inv_mod(m / pk % pk, pk).expect("prime power parts are coprime");
            let layer = p.pow(e - 1);
            let phi = pk - layer;
            comps.push(Comp { pk, alpha, phi, layer, stride });
            stride *= phi;
        }
        let dim = stride.max(1) as usize;
        let mut out = vec![Rational::zero(); dim];
        // expansion of one term: cartesian product of per-component rewrites
        let mut entries: Vec<(u64, bool)> = Vec::new();
        let mut next: Vec<(u64, bool)> = Vec::new();
        for (&x, coeff) in &self.terms {
            entries.clear();
            entries.push((0, false));
            for comp in &comps {
                let a = (x % comp.pk) as u128 * comp.alpha as u128 % comp.pk as u128;
                let a = a as u64;
                let u = a / comp.layer;
                let v = a % comp.layer;
                next.clear();
                if u < comp.pk / comp.layer - 1 {
                    // p - 1 is pk/layer - 1; keep the monomial as-is
                    let idx = u * comp.layer + v;
                    for &(base, negated) in &entries {
                        next.push((base + idx * comp.stride, negated));
                    }
                } else {
                    for t in 0..(comp.phi / comp.layer) {
                        let idx = t * comp.layer + v;
                        for &(base, negated) in &entries {
                            next.push((base + idx * comp.stride, !negated));
                        }
                    }
                }
                std::mem::swap(&mut entries, &mut next);
            }
            for &(idx, negated) in &entries {
                if negated {
                    out[idx as usize] -= coeff;
                } else {
                    out[idx as usize] += coeff;
                }
            }
        }
        (m, out)
    }

    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        // single-term values are never zero (coefficients are nonzero)
        if self.terms.len() == 1 {
            return false;
        }
        self.canonical_coeffs().1.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    /// The rational value, if the number is rational.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::zero());
        }
        if self.conductor == 1 {
            return self.terms.get(&0).cloned();
        }
        let (_, coeffs) = self.canonical_coeffs();
        if coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(coeffs[0].clone())
        } else {
            None
        }
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for CycloNumber {}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z{}^{}", self.conductor, e)?;
            } else {
                write!(f, "{}*z{}^{}", c, self.conductor, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn root(m: u64, k: i64) -> CycloNumber {
        CycloNumber::root_of_unity(m, k).unwrap()
    }

    #[test]
    fn root_normalizes_conductor() {
        assert_eq!(root(6, 2).conductor(), 3);
        assert_eq!(root(6, 2), root(3, 1));
        assert_eq!(root(12, 0).conductor(), 1);
        assert_eq!(root(2, 1), CycloNumber::from_integer(-1));
        assert_eq!(root(1, 5), CycloNumber::one());
    }

    #[test]
    fn full_prime_sums_vanish() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let mut s = CycloNumber::zero();
            for k in 0..p {
                s = s.add(&root(p, k as i64));
            }
            assert!(s.is_zero(), "sum of all order-{p} roots");
            assert!(!s.add(&CycloNumber::one()).is_zero());
        }
    }

    #[test]
    fn prime_power_relations() {
        // zeta_9: 1 + z^3 + z^6 = 0, so z^7 = -(z^1 + z^4)
        let lhs = root(9, 7);
        let rhs = root(9, 1).add(&root(9, 4)).neg();
        assert_eq!(lhs, rhs);
        // zeta_4^2 = -1
        let i = root(4, 1);
        assert_eq!(i.mul(&i), CycloNumber::from_integer(-1));
        // zeta_8^2 = zeta_4
        assert_eq!(root(8, 1).mul(&root(8, 1)), root(4, 1));
    }

    #[test]
    fn mixed_conductor_arithmetic() {
        // z6 = -z3^2: the hexagonal relation
        let z6 = root(6, 1);
        let z3 = root(3, 1);
        assert_eq!(z6, z3.mul(&z3).neg());
        // (z5 + z5^4) satisfies x^2 + x - 1 = 0
        let x = root(5, 1).add(&root(5, 4));
        let val = x.mul(&x).add(&x).sub(&CycloNumber::one());
        assert!(val.is_zero());
    }

    #[test]
    fn galois_and_conjugation() {
        let z = root(7, 1);
        let x = z.add(&z.conj());
        assert_eq!(x, root(7, 1).add(&root(7, 6)));
        assert_eq!(x.conj(), x);
        let y = root(12, 1).scale(&Rational::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(y.conj().conj(), y);
        assert!(root(12, 1).galois(4).is_err());
        // conjugation is multiplicative
        let a = root(12, 1).add(&CycloNumber::from_integer(2));
        let b = root(12, 7).sub(&root(4, 1));
        assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
    }

    #[test]
    fn norm_of_root_combination_is_rational() {
        // |1 + z5|^2 = (1 + z5)(1 + z5^-1) = 2 + z5 + z5^4, not rational;
        // but z5 * conj(z5) = 1
        let z = root(5, 1);
        assert!(z.mul(&z.conj()).is_one());
        assert_eq!(z.mul(&z.conj()).to_rational(), Some(Rational::one()));
        assert_eq!(root(5, 1).add(&root(5, 2)).to_rational(), None);
    }

    #[test]
    fn embed_preserves_value() {
        let z3 = root(3, 1);
        let e = z3.embed(12).unwrap();
        assert_eq!(e.conductor(), 12);
        assert_eq!(e, root(12, 4));
        assert_eq!(e, z3);
        assert!(z3.embed(10).is_err());
    }

    #[test]
    fn random_ring_axioms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let rand_cyclo = |rng: &mut rand_chacha::ChaCha8Rng| {
            let m = [1u64, 2, 3, 4, 5, 6, 8, 9, 12][rng.gen_range(0..9)];
            let mut x = CycloNumber::zero();
            for _ in 0..rng.gen_range(0..4) {
                let k = rng.gen_range(0..m as i64);
                let num = rng.gen_range(-3i64..=3);
                let den = rng.gen_range(1i64..=3);
                x = x.add(&root(m, k).scale(&Rational::new(num.into(), den.into())));
            }
            x
        };
        for _ in 0..60 {
            let a = rand_cyclo(&mut rng);
            let b = rand_cyclo(&mut rng);
            let c = rand_cyclo(&mut rng);
            assert_eq!(a.add(&b), b.add(&a));
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            assert_eq!(a.sub(&a), CycloNumber::zero());
        }
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let x = root(7, 3).add(&CycloNumber::one());
        let mut acc = CycloNumber::one();
        for k in 0..6 {
            assert_eq!(x.pow(k), acc);
            acc = acc.mul(&x);
        }
    }

    #[test]
    fn canonical_dimension_matches_phi() {
        for m in [1u64, 2, 3, 4, 8, 9, 12, 30] {
            let x = root(m, 1);
            let (cm, coeffs) = x.canonical_coeffs();
            assert_eq!(cm, x.conductor());
            assert_eq!(coeffs.len() as u64, crate::arith::euler_phi(x.conductor()));
        }
    }
}
