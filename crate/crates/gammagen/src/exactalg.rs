//! Exact determinants, the nonvanishing test for exponential-sum matrices,
//! and the block normal form for zero patterns with no empty row.

use crate::arith::is_prime;
use crate::cyclo::CycloNumber;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactAlgError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("m must be positive")]
    ZeroM,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {0} appears twice")]
    DuplicatePrime(u64),
    #[error("prime q_{j} = {q} divides m*n")]
    PrimeDividesData { j: usize, q: u64 },
    #[error("subset entry {a} in column {j} is outside 1..{q}")]
    SubsetOutOfRange { j: usize, a: u64, q: u64 },
    #[error("element {a} used twice in column {j}")]
    OverlappingSubsets { j: usize, a: u64 },
    #[error("subset grid is not {h}x{h}")]
    BadShape { h: usize },
    #[error("diagonal subset {0} is empty")]
    EmptyDiagonal(usize),
    #[error("row {0} of the pattern is all zero")]
    ZeroRow(usize),
}

/// Matrix with entries S_{i,j} = sum over a in s_{i,j} of e(n a / (m q_j)).
/// Within each column the subsets are disjoint subsets of {1, ..., q_j - 1},
/// the q_j are distinct primes, and no q_j divides m n.
#[derive(Clone, Debug)]
pub struct ExpSumMatrix {
    m: u64,
    n: i64,
    primes: Vec<u64>,
    subsets: Vec<Vec<BTreeSet<u64>>>,
}

impl ExpSumMatrix {
    pub fn new(
        m: u64,
        n: i64,
        primes: Vec<u64>,
        subsets: Vec<Vec<BTreeSet<u64>>>,
    ) -> Result<Self, ExactAlgError> {
        if m == 0 {
            return Err(ExactAlgError::ZeroM);
        }
        let h = primes.len();
        for (j, &q) in primes.iter().enumerate() {
            if !is_prime(q) {
                return Err(ExactAlgError::NotPrime(q));
            }
            if primes[..j].contains(&q) {
                return Err(ExactAlgError::DuplicatePrime(q));
            }
            let mn = m as i128 * n as i128;
            if mn % q as i128 == 0 {
                return Err(ExactAlgError::PrimeDividesData { j, q });
            }
        }
        if subsets.len() != h || subsets.iter().any(|row| row.len() != h) {
            return Err(ExactAlgError::BadShape { h });
        }
        for j in 0..h {
            let q = primes[j];
            let mut seen = BTreeSet::new();
            for row in &subsets {
                for &a in &row[j] {
                    if a == 0 || a >= q {
                        return Err(ExactAlgError::SubsetOutOfRange { j, a, q });
                    }
                    if !seen.insert(a) {
                        return Err(ExactAlgError::OverlappingSubsets { j, a });
                    }
                }
            }
        }
        Ok(ExpSumMatrix { m, n, primes, subsets })
    }

    pub fn size(&self) -> usize {
        self.primes.len()
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn shift(&self) -> i64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn subsets(&self) -> &[Vec<BTreeSet<u64>>] {
        &self.subsets
    }

    /// Common conductor m * q_1 * ... * q_h; every entry lives in this field.
    pub fn conductor(&self) -> u64 {
        self.primes.iter().product::<u64>() * self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> CycloNumber {
        let modulus = self.m * self.primes[j];
        let mut acc = CycloNumber::zero();
        for &a in &self.subsets[i][j] {
            let k = (self.n as i128 * a as i128).rem_euclid(modulus as i128) as i64;
            acc = acc.add(&CycloNumber::root_of_unity(modulus, k).unwrap());
        }
        acc
    }

    pub fn entries(&self) -> Vec<Vec<CycloNumber>> {
        let h = self.size();
        (0..h).map(|i| (0..h).map(|j| self.entry(i, j)).collect()).collect()
    }
}

/// Exact determinant by column-subset dynamic programming. Division-free,
/// so no cyclotomic inverses are ever needed. Exponential in the dimension;
/// intended for small matrices.
pub fn exact_det(mat: &[Vec<CycloNumber>]) -> Result<CycloNumber, ExactAlgError> {
    let n = mat.len();
    if mat.iter().any(|row| row.len() != n) {
        return Err(ExactAlgError::NotSquare);
    }
    assert!(n <= 20, "subset DP determinant limited to n <= 20");
    if n == 0 {
        return Ok(CycloNumber::one());
    }
    // layer[mask] = det of the minor on rows 0..popcount(mask), columns mask
    let mut layer = vec![CycloNumber::zero(); 1 << n];
    layer[0] = CycloNumber::one();
    for mask in 0usize..(1 << n) {
        let k = mask.count_ones() as usize;
        if k == n || layer[mask].term_count() == 0 {
            continue;
        }
        let base = layer[mask].clone();
        for j in 0..n {
            let bit = 1usize << j;
            if mask & bit != 0 || mat[k][j].term_count() == 0 {
                continue;
            }
            let pos = (mask & (bit - 1)).count_ones() as usize;
            let contrib = base.mul(&mat[k][j]);
            let slot = &mut layer[mask | bit];
            *slot = if (k + pos) % 2 == 0 { slot.add(&contrib) } else { slot.sub(&contrib) };
        }
    }
    Ok(layer[(1 << n) - 1].clone())
}

/// Embeds all entries at the common conductor, takes the exact determinant,
/// and reports whether it is nonzero. Requires every diagonal subset to be
/// nonempty; the guarantee proved for these matrices applies only then.
pub fn key_det_nonzero(spec: &ExpSumMatrix) -> Result<(CycloNumber, bool), ExactAlgError> {
    for i in 0..spec.size() {
        if spec.subsets[i][i].is_empty() {
            return Err(ExactAlgError::EmptyDiagonal(i));
        }
    }
    let big = spec.conductor();
    let mat: Vec<Vec<CycloNumber>> = spec
        .entries()
        .into_iter()
        .map(|row| row.into_iter().map(|e| e.embed(big).unwrap()).collect())
        .collect();
    let det = exact_det(&mat)?;
    let nonzero = !det.is_zero();
    Ok((det, nonzero))
}

/// Row and column permutations bringing a zero pattern into the form
///
/// ```text
///   [ A  0 ]
///   [ C  D ]
/// ```
///
/// where A is m x m with all diagonal entries nonzero and m is as large as
/// possible. Fails only when some row is entirely zero; otherwise m >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallBlockForm {
    pub m: usize,
    /// result row r is input row row_perm[r]
    pub row_perm: Vec<usize>,
    /// result column c is input column col_perm[c]
    pub col_perm: Vec<usize>,
}

pub fn hall_block_form(pattern: &[Vec<bool>]) -> Result<HallBlockForm, ExactAlgError> {
    let n = pattern.len();
    assert!(pattern.iter().all(|row| row.len() == n));
    for (i, row) in pattern.iter().enumerate() {
        if row.iter().all(|&x| !x) {
            return Err(ExactAlgError::ZeroRow(i));
        }
    }

    // maximum matching, rows to columns
    let mut match_col_of_row = vec![usize::MAX; n];
    let mut match_row_of_col = vec![usize::MAX; n];
    fn augment(
        r: usize,
        pattern: &[Vec<bool>],
        seen: &mut [bool],
        mcr: &mut [usize],
        mrc: &mut [usize],
    ) -> bool {
        for c in 0..pattern.len() {
            if pattern[r][c] && !seen[c] {
                seen[c] = true;
                if mrc[c] == usize::MAX
                    || augment(mrc[c], pattern, seen, mcr, mrc)
                {
                    mcr[r] = c;
                    mrc[c] = r;
                    return true;
                }
            }
        }
        false
    }
    for r in 0..n {
        let mut seen = vec![false; n];
        augment(r, pattern, &mut seen, &mut match_col_of_row, &mut match_row_of_col);
    }

    // alternating reachability from unmatched columns: a reached row is
    // excluded from the top block, since one of its edges leaves the block
    let mut col_reached = vec![false; n];
    let mut row_reached = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&c| match_row_of_col[c] == usize::MAX).collect();
    for &c in &queue {
        col_reached[c] = true;
    }
    while let Some(c) = queue.pop() {
        for r in 0..n {
            if pattern[r][c] && !row_reached[r] {
                row_reached[r] = true;
                let mc = match_col_of_row[r];
                if mc != usize::MAX && !col_reached[mc] {
                    col_reached[mc] = true;
                    queue.push(mc);
                }
            }
        }
    }

    // top block: matched rows not reached, each paired with its matched column
    let mut top_rows: Vec<usize> = (0..n)
        .filter(|&r| match_col_of_row[r] != usize::MAX && !row_reached[r])
        .collect();
    top_rows.sort_unstable();
    let m = top_rows.len();
    let top_cols: Vec<usize> = top_rows.iter().map(|&r| match_col_of_row[r]).collect();

    let mut row_perm = top_rows.clone();
    row_perm.extend((0..n).filter(|r| !top_rows.contains(r)));
    let mut col_perm = top_cols.clone();
    col_perm.extend((0..n).filter(|c| !top_cols.contains(c)));

    debug_assert!(audit_block_form(pattern, m, &row_perm, &col_perm));
    Ok(HallBlockForm { m, row_perm, col_perm })
}

/// Structural check: diagonal of the top block nonzero, upper-right zero.
pub fn audit_block_form(
    pattern: &[Vec<bool>],
    m: usize,
    row_perm: &[usize],
    col_perm: &[usize],
) -> bool {
    let n = pattern.len();
    if m == 0 || m > n {
        return false;
    }
    let mut rp = row_perm.to_vec();
    let mut cp = col_perm.to_vec();
    rp.sort_unstable();
    cp.sort_unstable();
    if rp != (0..n).collect::<Vec<_>>() || cp != (0..n).collect::<Vec<_>>() {
        return false;
    }
    for r in 0..m {
        if !pattern[row_perm[r]][col_perm[r]] {
            return false;
        }
        for c in m..n {
            if pattern[row_perm[r]][col_perm[c]] {
                return false;
            }
        }
    }
    true
}
