//! Coset enumeration over SL2(Z) = <S, T | S^4 = S^2 (S T)^3 = 1>, the
//! explicit coset action for the level subgroups, and Schreier generator
//! extraction.

use crate::arith::{dedekind_psi, euler_phi, gcd_u64};
use crate::matcore::Mat2;
use crate::words::{matrix_to_stword, StLetter, STWord, WordError};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CosetError {
    #[error("level must be positive")]
    ZeroLevel,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("coset table audit failed: {0}")]
    Audit(&'static str),
}

pub const DEFAULT_MAX_COSETS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Deduction-first: keep every relator closed at every live coset and
    /// only then define the first missing table entry.
    Felsch,
    /// Scan-and-fill: trace every relator at every coset in definition
    /// order, defining cosets to close each scan.
    Hlt,
}

#[derive(Clone, Copy, Debug)]
pub struct TcConfig {
    pub max_cosets: usize,
    pub strategy: Strategy,
}

impl Default for TcConfig {
    fn default() -> Self {
        TcConfig { max_cosets: DEFAULT_MAX_COSETS, strategy: Strategy::Felsch }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TcResult {
    Index(usize),
    /// The run hit `max_cosets` before the table closed. Says nothing about
    /// the true index.
    Overflow,
}

#[derive(Clone, Debug)]
pub struct TcOutcome {
    pub result: TcResult,
    pub cosets_defined: usize,
    pub max_live: usize,
    /// Compacted table on success: `table[c][col]` over columns
    /// S, S^-1, T, T^-1.
    pub table: Option<Vec<[u32; 4]>>,
}

const UNDEF: u32 = u32::MAX;
const COL_S: usize = 0;
const COL_T: usize = 2;

// S^4 and S^2 (S T)^3, as column strings
const RELATORS: [&[usize]; 2] = [
    &[COL_S, COL_S, COL_S, COL_S],
    &[COL_S, COL_S, COL_S, COL_T, COL_S, COL_T, COL_S, COL_T],
];

fn word_cols(w: &STWord) -> Vec<usize> {
    w.0.iter()
        .map(|l| match l {
            StLetter::S => COL_S,
            StLetter::T => COL_T,
            StLetter::TInv => COL_T ^ 1,
        })
        .collect()
}

struct Enumerator {
    table: Vec<[u32; 4]>,
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    coinc: VecDeque<(u32, u32)>,
    /// Newly recorded edges pending relator scans (Felsch deductions).
    deductions: VecDeque<(u32, usize)>,
    track_deductions: bool,
    max_cosets: usize,
    progressed: bool,
    gap_cursor: u32,
}

impl Enumerator {
    fn new(max_cosets: usize) -> Self {
        Enumerator {
            table: vec![[UNDEF; 4]],
            parent: vec![0],
            live: 1,
            max_live: 1,
            coinc: VecDeque::new(),
            deductions: VecDeque::new(),
            track_deductions: false,
            max_cosets,
            progressed: false,
            gap_cursor: 0,
        }
    }

    fn find(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let p = self.parent[c as usize];
            self.parent[c as usize] = self.parent[p as usize];
            c = self.parent[c as usize];
        }
        c
    }

    fn alive(&mut self, c: u32) -> bool {
        self.find(c) == c
    }

    fn cell(&mut self, c: u32, col: usize) -> u32 {
        let e = self.table[c as usize][col];
        if e == UNDEF {
            UNDEF
        } else {
            self.find(e)
        }
    }

    /// Records `c . col = d`, propagating the inverse edge. Disagreements
    /// queue a coincidence.
    fn set(&mut self, c: u32, col: usize, d: u32) {
        let c = self.find(c);
        let d = self.find(d);
        let existing = self.cell(c, col);
        if existing == UNDEF {
            self.table[c as usize][col] = d;
            self.progressed = true;
            if self.track_deductions {
                self.deductions.push_back((c, col));
                self.deductions.push_back((d, col ^ 1));
            }
            let back = self.cell(d, col ^ 1);
            if back == UNDEF {
                self.table[d as usize][col ^ 1] = c;
            } else if back != c {
                self.coinc.push_back((back, c));
            }
        } else if existing != d {
            self.coinc.push_back((existing, d));
        }
    }

    fn define(&mut self, c: u32, col: usize) -> Option<u32> {
        if self.table.len() >= self.max_cosets {
            return None;
        }
        let n = self.table.len() as u32;
        self.table.push([UNDEF; 4]);
        self.parent.push(n);
        self.live += 1;
        self.max_live = self.max_live.max(self.live);
        self.set(c, col, n);
        Some(n)
    }

    fn process_coincidences(&mut self) {
        while let Some((x, y)) = self.coinc.pop_front() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            self.progressed = true;
            let (keep, kill) = if x < y { (x, y) } else { (y, x) };
            self.parent[kill as usize] = keep;
            self.live -= 1;
            for col in 0..4 {
                let e = self.table[kill as usize][col];
                if e != UNDEF {
                    self.table[kill as usize][col] = UNDEF;
                    let e = self.find(e);
                    self.set(keep, col, e);
                }
            }
        }
    }

    /// Traces `w` from `c` back to `c`. Returns false on overflow while
    /// filling.
    fn scan(&mut self, c: u32, w: &[usize], fill: bool) -> bool {
        let target = self.find(c);
        let mut f = target;
        let mut i = 0;
        while i < w.len() {
            let nxt = self.cell(f, w[i]);
            if nxt == UNDEF {
                break;
            }
            f = nxt;
            i += 1;
        }
        if i == w.len() {
            if f != target {
                self.coinc.push_back((f, target));
                self.progressed = true;
            }
            return true;
        }
        let mut b = target;
        let mut j = w.len();
        while j > i {
            let prv = self.cell(b, w[j - 1] ^ 1);
            if prv == UNDEF {
                break;
            }
            b = prv;
            j -= 1;
        }
        if j == i {
            if f != b {
                self.coinc.push_back((f, b));
                self.progressed = true;
            }
            return true;
        }
        if j == i + 1 {
            self.set(f, w[i], b);
            return true;
        }
        if fill {
            while j > i + 1 {
                match self.define(f, w[i]) {
                    Some(n) => {
                        f = n;
                        i += 1;
                    }
                    None => return false,
                }
            }
            self.set(f, w[i], b);
        }
        true
    }

    /// Scans all relator rotations through freshly recorded edges until the
    /// deduction queue drains. Keeps the table relator-closed at every live
    /// coset given it was closed before the queued edges appeared.
    fn drain_deductions(&mut self, rotations: &[Vec<Vec<usize>>; 4]) {
        loop {
            self.process_coincidences();
            let Some((c, col)) = self.deductions.pop_front() else {
                break;
            };
            let c = self.find(c);
            for rot in &rotations[col] {
                self.scan(c, rot, false);
                self.process_coincidences();
            }
        }
    }

    /// First undefined cell of a live coset. Cells of live cosets never
    /// revert to undefined, so the cursor only moves forward.
    fn first_gap(&mut self) -> Option<(u32, usize)> {
        while (self.gap_cursor as usize) < self.table.len() {
            let c = self.gap_cursor;
            if self.alive(c) {
                for col in 0..4 {
                    if self.table[c as usize][col] == UNDEF {
                        return Some((c, col));
                    }
                }
            }
            self.gap_cursor += 1;
        }
        None
    }

    fn compact(&mut self) -> Vec<[u32; 4]> {
        let mut names = vec![UNDEF; self.table.len()];
        let mut next = 0u32;
        for c in 0..self.table.len() as u32 {
            if self.alive(c) {
                names[c as usize] = next;
                next += 1;
            }
        }
        let mut out = Vec::with_capacity(next as usize);
        for c in 0..self.table.len() as u32 {
            if !self.alive(c) {
                continue;
            }
            let mut row = [UNDEF; 4];
            for col in 0..4 {
                let e = self.cell(c, col);
                debug_assert_ne!(e, UNDEF);
                row[col] = names[e as usize];
            }
            out.push(row);
        }
        out
    }
}

/// Every cyclic rotation of each relator, bucketed by first column. Edge
/// deductions only need the rotations that begin with the edge's label.
fn relator_rotations() -> [Vec<Vec<usize>>; 4] {
    let mut out: [Vec<Vec<usize>>; 4] = Default::default();
    for r in RELATORS {
        for k in 0..r.len() {
            let rot: Vec<usize> = r[k..].iter().chain(r[..k].iter()).copied().collect();
            if !out[rot[0]].contains(&rot) {
                out[rot[0]].push(rot);
            }
        }
    }
    out
}

/// Enumerates the cosets of the subgroup generated by `subgroup` (words in
/// S and T) inside SL2(Z). Deterministic for a fixed config.
pub fn todd_coxeter(subgroup: &[STWord], cfg: &TcConfig) -> TcOutcome {
    let rotations = relator_rotations();
    let mut e = Enumerator::new(cfg.max_cosets.max(1));
    let sub_cols: Vec<Vec<usize>> = subgroup.iter().map(word_cols).collect();
    let mut overflow = false;
    match cfg.strategy {
        Strategy::Felsch => {
            e.track_deductions = true;
            for w in &sub_cols {
                if !e.scan(0, w, true) {
                    overflow = true;
                    break;
                }
                e.drain_deductions(&rotations);
            }
            while !overflow {
                e.drain_deductions(&rotations);
                match e.first_gap() {
                    Some((c, col)) => {
                        if e.define(c, col).is_none() {
                            overflow = true;
                        }
                    }
                    None => break,
                }
            }
        }
        Strategy::Hlt => {
            for w in &sub_cols {
                if !e.scan(0, w, true) {
                    overflow = true;
                    break;
                }
                e.process_coincidences();
            }
            let mut c = 0u32;
            while !overflow && (c as usize) < e.table.len() {
                if e.alive(c) {
                    for r in RELATORS {
                        if !e.scan(c, r, true) {
                            overflow = true;
                            break;
                        }
                        e.process_coincidences();
                        if !e.alive(c) {
                            break;
                        }
                    }
                }
                c += 1;
            }
            // insurance: relator paths cover every cell for this
            // presentation, so the table should already be complete
            if !overflow {
                e.track_deductions = true;
                while let Some((c, col)) = e.first_gap() {
                    if e.define(c, col).is_none() {
                        overflow = true;
                        break;
                    }
                    e.drain_deductions(&rotations);
                }
            }
        }
    }
    let cosets_defined = e.table.len();
    let max_live = e.max_live;
    if overflow {
        return TcOutcome { result: TcResult::Overflow, cosets_defined, max_live, table: None };
    }
    let table = e.compact();
    let outcome = TcOutcome {
        result: TcResult::Index(table.len()),
        cosets_defined,
        max_live,
        table: Some(table),
    };
    debug_assert!(audit_outcome(&outcome, subgroup).is_ok());
    outcome
}

/// Full-table audit of a completed enumeration: every entry defined and
/// inverse-consistent, every relator closed at every coset, every subgroup
/// word closed at coset 0, and the action transitive.
pub fn audit_outcome(outcome: &TcOutcome, subgroup: &[STWord]) -> Result<(), CosetError> {
    let table = outcome.table.as_ref().ok_or(CosetError::Audit("no table"))?;
    let n = table.len();
    if !matches!(outcome.result, TcResult::Index(i) if i == n) {
        return Err(CosetError::Audit("result disagrees with table size"));
    }
    for (c, row) in table.iter().enumerate() {
        for col in 0..4 {
            let d = row[col];
            if d == UNDEF || d as usize >= n {
                return Err(CosetError::Audit("undefined or out-of-range entry"));
            }
            if table[d as usize][col ^ 1] as usize != c {
                return Err(CosetError::Audit("inverse columns disagree"));
            }
        }
    }
    let trace = |start: u32, w: &[usize]| -> u32 {
        w.iter().fold(start, |c, &col| table[c as usize][col])
    };
    for c in 0..n as u32 {
        for r in RELATORS {
            if trace(c, r) != c {
                return Err(CosetError::Audit("relator does not close"));
            }
        }
    }
    for w in subgroup {
        if trace(0, &word_cols(w)) != 0 {
            return Err(CosetError::Audit("subgroup word moves coset 0"));
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0u32]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(c) = queue.pop_front() {
        for col in 0..4 {
            let d = table[c as usize][col];
            if !seen[d as usize] {
                seen[d as usize] = true;
                reached += 1;
                queue.push_back(d);
            }
        }
    }
    if reached != n {
        return Err(CosetError::Audit("action not transitive"));
    }
    Ok(())
}

/// Explicit right action of S and T on the cosets of a level subgroup,
/// realized on row labels.
#[derive(Clone, Debug)]
pub struct CosetAction {
    pub level: u64,
    /// Label of each coset; `labels[identity]` is the identity coset.
    pub labels: Vec<(u64, u64)>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    pub identity: usize,
}

impl CosetAction {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn apply(&self, coset: usize, letter: StLetter) -> usize {
        match letter {
            StLetter::S => self.s[coset],
            StLetter::T => self.t[coset],
            StLetter::TInv => {
                // t is a bijection; walk the cycle backward
                self.t.iter().position(|&x| x == coset).unwrap()
            }
        }
    }
}

/// Cosets of the level subgroup with unit diagonal (mod `n`), labelled by
/// the bottom row `(c, d)` of a representative, taken mod `n`. Two matrices
/// share a label exactly when they share a coset, so the label count is the
/// index: `psi(n) * phi(n)`.
pub fn gamma1_coset_action(n: u64) -> Result<CosetAction, CosetError> {
    if n == 0 {
        return Err(CosetError::ZeroLevel);
    }
    let mut labels = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd_u64(gcd_u64(c, d), n) == 1 {
                labels.push((c, d));
            }
        }
    }
    build_action(n, labels, |c, d, _| (c, d))
}

/// Cosets of the level subgroup defined by the divisibility condition alone,
/// labelled by the bottom row up to units: the projective line mod `n`.
/// Index `psi(n)`.
pub fn gamma0_coset_action(n: u64) -> Result<CosetAction, CosetError> {
    if n == 0 {
        return Err(CosetError::ZeroLevel);
    }
    let canon = |c: u64, d: u64, n: u64| canonical_proj(c, d, n);
    let mut labels = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd_u64(gcd_u64(c, d), n) == 1 && canon(c, d, n) == (c, d) {
                labels.push((c, d));
            }
        }
    }
    build_action(n, labels, canon)
}

fn canonical_proj(c: u64, d: u64, n: u64) -> (u64, u64) {
    if n == 1 {
        return (0, 0);
    }
    let mut best = None;
    for u in 1..n {
        if gcd_u64(u, n) != 1 {
            continue;
        }
        let cand = (u * c % n, u * d % n);
        if best.map_or(true, |b| cand < b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

fn build_action(
    n: u64,
    labels: Vec<(u64, u64)>,
    canon: fn(u64, u64, u64) -> (u64, u64),
) -> Result<CosetAction, CosetError> {
    let index_of = |row: (u64, u64)| -> usize {
        labels.binary_search(&row).expect("action stays on labels")
    };
    let mut s = Vec::with_capacity(labels.len());
    let mut t = Vec::with_capacity(labels.len());
    for &(c, d) in &labels {
        // bottom row transforms by right multiplication
        let s_row = canon(d % n, (n - c % n) % n, n);
        let t_row = canon(c, (c + d) % n, n);
        s.push(index_of(s_row));
        t.push(index_of(t_row));
    }
    let identity = index_of(canon(0 % n, 1 % n, n));
    Ok(CosetAction { level: n, labels, s, t, identity })
}

/// Coset representatives as matrices, via breadth-first search from the
/// identity coset along S and T edges.
pub fn coset_representatives(action: &CosetAction) -> Vec<Mat2> {
    let n = action.len();
    let mut reps: Vec<Option<Mat2>> = vec![None; n];
    reps[action.identity] = Some(Mat2::identity());
    let mut queue = VecDeque::from([action.identity]);
    let s_mat = Mat2::s();
    let t_mat = Mat2::t();
    while let Some(i) = queue.pop_front() {
        let here = reps[i].clone().unwrap();
        for (perm, mat) in [(&action.s, &s_mat), (&action.t, &t_mat)] {
            let j = perm[i];
            if reps[j].is_none() {
                reps[j] = Some(here.mul(mat));
                queue.push_back(j);
            }
            // inverse edges keep the graph strongly connected
            let back = perm.iter().position(|&x| x == i).unwrap();
            if reps[back].is_none() {
                reps[back] = Some(here.mul(&mat.inv().unwrap()));
                queue.push_back(back);
            }
        }
    }
    reps.into_iter().map(|r| r.expect("coset action is transitive")).collect()
}

/// Schreier generators for the subgroup realized by `action`: one per
/// (representative, generator) pair, with identities and duplicates dropped.
/// The returned set is certified by re-enumerating cosets against it.
pub fn schreier_generators(action: &CosetAction) -> Result<Vec<Mat2>, CosetError> {
    let reps = coset_representatives(action);
    let mut out: Vec<Mat2> = Vec::new();
    for (i, rep) in reps.iter().enumerate() {
        for (perm, mat) in [(&action.s, &Mat2::s()), (&action.t, &Mat2::t())] {
            let j = perm[i];
            let g = rep.mul(mat).mul(&reps[j].inv().unwrap());
            if g.is_identity() || out.contains(&g) {
                continue;
            }
            out.push(g);
        }
    }
    let words: Vec<STWord> =
        out.iter().map(matrix_to_stword).collect::<Result<_, _>>()?;
    let outcome = todd_coxeter(&words, &TcConfig::default());
    if outcome.result != TcResult::Index(action.len()) {
        return Err(CosetError::Audit("schreier set fails certification"));
    }
    Ok(out)
}

/// Greedily drops generators whose removal provably keeps the index: each
/// candidate removal is re-certified by a fresh enumeration. Removals whose
/// enumeration overflows `prune_max_cosets` are kept.
pub fn minimal_generating_set(n: u64) -> Result<Vec<Mat2>, CosetError> {
    let action = gamma1_coset_action(n)?;
    let full = schreier_generators(&action)?;
    let target = TcResult::Index(action.len());
    let mut kept = full;
    let prune_cfg = TcConfig { max_cosets: 40_000.max(4 * action.len()), ..TcConfig::default() };
    let mut i = 0;
    while i < kept.len() {
        if kept.len() == 1 {
            break;
        }
        let mut trial = kept.clone();
        trial.remove(i);
        let words: Vec<STWord> =
            trial.iter().map(matrix_to_stword).collect::<Result<_, _>>()?;
        if todd_coxeter(&words, &prune_cfg).result == target {
            kept = trial;
        } else {
            i += 1;
        }
    }
    Ok(kept)
}

/// Index of the unit-diagonal level subgroup.
pub fn index_gamma1(n: u64) -> u64 {
    dedekind_psi(n) * euler_phi(n)
}

/// Index of the divisibility-only level subgroup.
pub fn index_gamma0(n: u64) -> u64 {
    dedekind_psi(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::gamma_qa;

    fn st(s: &str) -> STWord {
        s.parse().unwrap()
    }

    #[test]
    fn full_group_has_index_one() {
        let out = todd_coxeter(&[st("S"), st("T")], &TcConfig::default());
        assert_eq!(out.result, TcResult::Index(1));
        assert!(audit_outcome(&out, &[st("S"), st("T")]).is_ok());
    }

    #[test]
    fn presentation_relators_hold_in_matrices() {
        let s = Mat2::s();
        let t = Mat2::t();
        let s4 = s.mul(&s).mul(&s).mul(&s);
        assert!(s4.is_identity());
        let st3 = s.mul(&t).mul(&s.mul(&t)).mul(&s.mul(&t));
        assert_eq!(st3, Mat2::identity().neg());
        assert!(s.mul(&s).mul(&st3).is_identity());
    }

    #[test]
    fn trivial_subgroup_overflows() {
        let out = todd_coxeter(&[], &TcConfig { max_cosets: 2_000, ..TcConfig::default() });
        assert_eq!(out.result, TcResult::Overflow);
        assert!(out.cosets_defined >= 2_000);
        assert!(out.table.is_none());
    }

    #[test]
    fn strategies_agree_on_small_indices() {
        for n in [2u64, 3, 4, 5, 6] {
            let action = gamma1_coset_action(n).unwrap();
            let gens = schreier_generators(&action).unwrap();
            let words: Vec<STWord> = gens.iter().map(|g| matrix_to_stword(g).unwrap()).collect();
            let felsch = todd_coxeter(&words, &TcConfig::default());
            let hlt =
                todd_coxeter(&words, &TcConfig { strategy: Strategy::Hlt, ..TcConfig::default() });
            assert_eq!(felsch.result, TcResult::Index(action.len()));
            assert_eq!(hlt.result, TcResult::Index(action.len()));
            assert!(audit_outcome(&felsch, &words).is_ok());
            assert!(audit_outcome(&hlt, &words).is_ok());
        }
    }

    #[test]
    fn redundant_word_keeps_index() {
        let action = gamma1_coset_action(5).unwrap();
        let gens = schreier_generators(&action).unwrap();
        let mut words: Vec<STWord> = gens.iter().map(|g| matrix_to_stword(g).unwrap()).collect();
        let base = todd_coxeter(&words, &TcConfig::default());
        let extra = gens[0].mul(&gens[1]);
        words.push(matrix_to_stword(&extra).unwrap());
        let with_extra = todd_coxeter(&words, &TcConfig::default());
        assert_eq!(base.result, with_extra.result);
    }

    #[test]
    fn label_counts_match_index_formulas() {
        for n in 1..=20u64 {
            let a1 = gamma1_coset_action(n).unwrap();
            assert_eq!(a1.len() as u64, index_gamma1(n), "level {n}");
            let a0 = gamma0_coset_action(n).unwrap();
            assert_eq!(a0.len() as u64, index_gamma0(n), "level {n}");
        }
        assert_eq!(index_gamma1(5), 24);
        assert_eq!(index_gamma1(13), 168);
    }

    #[test]
    fn action_permutations_are_bijective() {
        for n in [1u64, 4, 6, 12] {
            for action in [gamma1_coset_action(n).unwrap(), gamma0_coset_action(n).unwrap()] {
                let mut seen_s = vec![false; action.len()];
                let mut seen_t = vec![false; action.len()];
                for i in 0..action.len() {
                    seen_s[action.s[i]] = true;
                    seen_t[action.t[i]] = true;
                }
                assert!(seen_s.iter().all(|&x| x));
                assert!(seen_t.iter().all(|&x| x));
                // S^4 = identity on cosets
                for i in 0..action.len() {
                    let j = action.s[action.s[action.s[action.s[i]]]];
                    assert_eq!(i, j);
                }
            }
        }
    }

    #[test]
    fn representatives_land_in_their_cosets() {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::One;
        let seven = BigInt::from(7);
        let action = gamma1_coset_action(7).unwrap();
        let reps = coset_representatives(&action);
        for (i, rep) in reps.iter().enumerate() {
            assert!(rep.det().is_one());
            let c = rep.c.to_integer().mod_floor(&seven);
            let d = rep.d.to_integer().mod_floor(&seven);
            let label = action.labels[i];
            assert_eq!((u64::try_from(c).unwrap(), u64::try_from(d).unwrap()), label);
        }
    }

    #[test]
    fn schreier_generators_lie_in_subgroup() {
        for n in [2u64, 3, 5, 6] {
            let action = gamma1_coset_action(n).unwrap();
            let gens = schreier_generators(&action).unwrap();
            for g in &gens {
                assert!(g.in_gamma1(n), "level {n}: {g}");
            }
        }
    }

    #[test]
    fn minimal_set_certifies_and_shrinks() {
        let gens = minimal_generating_set(5).unwrap();
        let words: Vec<STWord> = gens.iter().map(|g| matrix_to_stword(g).unwrap()).collect();
        let out = todd_coxeter(&words, &TcConfig::default());
        assert_eq!(out.result, TcResult::Index(24));
        // the level-5 subgroup is free of rank 3
        assert_eq!(gens.len(), 3);
    }

    #[test]
    fn known_index_via_canonical_generators() {
        // level 5: T, W, and the canonical q=2 element generate the full
        // divisibility-only subgroup, since 2 generates the units mod 5
        let g21 = gamma_qa(5, 2, 1).unwrap();
        let gens = [Mat2::t(), Mat2::w(5), g21.clone()];
        let mut words: Vec<STWord> = gens.iter().map(|g| matrix_to_stword(g).unwrap()).collect();
        // a redundant product must not change the index
        words.push(matrix_to_stword(&g21.mul(&Mat2::t())).unwrap());
        let out = todd_coxeter(&words, &TcConfig::default());
        assert_eq!(out.result, TcResult::Index(6));
        assert_eq!(index_gamma0(5), 6);
    }
}
