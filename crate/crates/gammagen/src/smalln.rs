//! Small-level generator tables for Gamma_0(N), certification by coset
//! enumeration, the matrix identities used at levels 6, 15, 23, and the
//! elliptic test matrices for the composite levels.

use crate::arith::dedekind_psi;
use crate::cosets::{todd_coxeter, Strategy, TcConfig, TcResult};
use crate::matcore::{gamma_qa, Mat2, MatError, Rational};
use crate::words::{matrix_to_stword, WordError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SmallnError {
    #[error("no generator table entry for level {0}")]
    UnknownLevel(u64),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Symbolic generator names as they appear in the level table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenSpec {
    NegIdentity,
    T,
    W,
    NegW,
    Gamma { q: i64, a: i64 },
    NegGamma { q: i64, a: i64 },
}

impl GenSpec {
    pub fn matrix(&self, level: u64) -> Result<Mat2, MatError> {
        Ok(match *self {
            GenSpec::NegIdentity => Mat2::identity().neg(),
            GenSpec::T => Mat2::t(),
            GenSpec::W => Mat2::w(level),
            GenSpec::NegW => Mat2::w(level).neg(),
            GenSpec::Gamma { q, a } => gamma_qa(level, q, a)?,
            GenSpec::NegGamma { q, a } => gamma_qa(level, q, a)?.neg(),
        })
    }

    pub fn label(&self) -> String {
        match *self {
            GenSpec::NegIdentity => "-I".into(),
            GenSpec::T => "T".into(),
            GenSpec::W => "W".into(),
            GenSpec::NegW => "-W".into(),
            GenSpec::Gamma { q, a } => format!("gamma_{{{q},{a}}}"),
            GenSpec::NegGamma { q, a } => format!("-gamma_{{{q},{a}}}"),
        }
    }
}

pub const LEVELS: [u64; 13] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 15, 17, 23];

pub fn generator_table(level: u64) -> Result<Vec<GenSpec>, SmallnError> {
    use GenSpec::*;
    Ok(match level {
        1 | 2 => vec![T, W],
        3 => vec![T, NegW],
        4 => vec![NegIdentity, T, W],
        5 => vec![T, W, Gamma { q: 2, a: 1 }],
        6 => vec![NegIdentity, T, W, Gamma { q: 5, a: 2 }],
        7 => vec![T, W, NegGamma { q: 2, a: 1 }],
        8 => vec![NegIdentity, T, W, Gamma { q: 3, a: 1 }],
        9 => vec![NegIdentity, T, W, Gamma { q: 2, a: 1 }],
        11 => vec![NegIdentity, W, Gamma { q: 2, a: 1 }, Gamma { q: 3, a: 1 }],
        15 => vec![
            NegIdentity,
            T,
            W,
            Gamma { q: 2, a: 1 },
            Gamma { q: 4, a: 1 },
            Gamma { q: 11, a: 4 },
        ],
        17 => vec![
            T,
            W,
            Gamma { q: 2, a: 1 },
            Gamma { q: 3, a: 1 },
            Gamma { q: 6, a: 1 },
        ],
        23 => vec![
            NegIdentity,
            T,
            W,
            Gamma { q: 2, a: 1 },
            Gamma { q: 4, a: 1 },
            Gamma { q: 6, a: 1 },
            Gamma { q: 10, a: -3 },
        ],
        _ => return Err(SmallnError::UnknownLevel(level)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certification {
    pub level: u64,
    pub generators: Vec<GenSpec>,
    /// index of the generated subgroup when the enumeration closed
    pub index: Option<usize>,
    pub expected_index: u64,
    pub generating: bool,
}

/// Runs coset enumeration over the listed generators and compares the
/// index with N prod_{p|N} (1 + 1/p). Equality certifies that the set
/// generates Gamma_0(N), since every listed matrix lies in it.
pub fn certify_level(level: u64, max_cosets: usize) -> Result<Certification, SmallnError> {
    let generators = generator_table(level)?;
    certify_generators(level, &generators, max_cosets)
}

pub fn certify_generators(
    level: u64,
    generators: &[GenSpec],
    max_cosets: usize,
) -> Result<Certification, SmallnError> {
    let mut words = Vec::with_capacity(generators.len());
    for g in generators {
        let m = g.matrix(level)?;
        debug_assert!(m.in_gamma0(level));
        words.push(matrix_to_stword(&m)?);
    }
    let outcome = todd_coxeter(&words, &TcConfig { max_cosets, strategy: Strategy::Felsch });
    let expected_index = dedekind_psi(level);
    let index = match outcome.result {
        TcResult::Index(ix) => Some(ix),
        TcResult::Overflow => None,
    };
    Ok(Certification {
        level,
        generators: generators.to_vec(),
        index,
        expected_index,
        generating: index == Some(expected_index as usize),
    })
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub level: u64,
    pub label: &'static str,
    pub lhs: Mat2,
    pub rhs: Mat2,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The seven product identities that express the extra table generators
/// at levels 6, 15, 23 through matrices with small upper-left entry.
pub fn product_identities() -> Vec<IdentityCheck> {
    let t = Mat2::t();
    let f = Mat2::from_ints;
    let mut out = Vec::new();
    let w6 = Mat2::w(6);
    out.push(IdentityCheck {
        level: 6,
        label: "6a",
        lhs: f(5, -1, 6, -1),
        rhs: t.mul(&w6.inv().unwrap()).neg(),
    });
    out.push(IdentityCheck {
        level: 6,
        label: "6b",
        lhs: f(5, 1, -6, -1),
        rhs: t.inv().unwrap().mul(&w6).neg(),
    });
    out.push(IdentityCheck {
        level: 15,
        label: "15a",
        lhs: f(8, -1, -15, 2),
        rhs: t.inv().unwrap().mul(&f(2, -1, 15, -7).inv().unwrap()),
    });
    out.push(IdentityCheck {
        level: 15,
        label: "15b",
        lhs: f(8, 1, 15, 2),
        rhs: f(2, -1, -15, 8).inv().unwrap(),
    });
    out.push(IdentityCheck {
        level: 15,
        label: "15c",
        lhs: f(8, -3, 75, -28),
        rhs: f(2, -1, 15, -7).mul(&t).mul(&f(11, -4, -30, 11)).neg(),
    });
    out.push(IdentityCheck {
        level: 23,
        label: "23a",
        lhs: f(3, -1, -23, 8),
        rhs: f(4, -1, -23, 6)
            .mul(&f(6, -1, -23, 4).inv().unwrap())
            .mul(&f(10, 3, 23, 7).inv().unwrap())
            .neg(),
    });
    out.push(IdentityCheck {
        level: 23,
        label: "23b",
        lhs: f(3, 1, 23, 8),
        rhs: f(2, -1, 23, -11).mul(&f(10, 3, 23, 7)).neg(),
    });
    out
}

#[derive(Clone, Debug)]
pub struct EllipticCase {
    pub q: u64,
    pub s: u64,
    pub level: u64,
    pub matrix: Mat2,
}

fn upper_shift(denom: u64) -> Mat2 {
    Mat2::new(
        Rational::one(),
        -Rational::new(BigInt::from(2), BigInt::from(denom)),
        Rational::zero(),
        Rational::one(),
    )
}

/// gamma_{q,1}^(-1) (1 -2/s; 0 1) gamma_{s,1}^(-1) (1 -2/q; 0 1)
/// for q, s in {3, 4, 6} with level qs - 1 <= 23. Each has trace
/// -2 + 4/(qs): irrational-free, non-integral, absolute value below 2.
pub fn elliptic_cases() -> Result<Vec<EllipticCase>, SmallnError> {
    let mut out = Vec::new();
    for q in [3u64, 4, 6] {
        for s in [3u64, 4, 6] {
            let level = q * s - 1;
            if level > 23 {
                continue;
            }
            let gq = gamma_qa(level, q as i64, 1)?;
            let gs = gamma_qa(level, s as i64, 1)?;
            let matrix = gq
                .inv()?
                .mul(&upper_shift(s))
                .mul(&gs.inv()?)
                .mul(&upper_shift(q));
            out.push(EllipticCase { q, s, level, matrix });
        }
    }
    Ok(out)
}
