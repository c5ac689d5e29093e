//! Exact computation in congruence subgroups of SL2(Z).
//!
//! The crate covers three connected strands: word-level work in the
//! generators T and W (enumeration by height, Euclidean rewriting,
//! decomposition with logarithmically few corrective factors), coset
//! machinery (Todd-Coxeter enumeration, Schreier generators, certification
//! of small generating sets), and exact Dirichlet-series algebra over
//! cyclotomic numbers (Ramanujan and character sums, twisted Hecke
//! relations, functional-equation checks, and the determinant
//! non-vanishing route through block normal forms).

pub mod arith;
pub mod cosets;
pub mod cyclo;
pub mod exactalg;
pub mod hq;
pub mod matcore;
pub mod numeric;
pub mod smalln;
pub mod twists;
pub mod words;
