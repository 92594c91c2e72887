//! Exact-arithmetic library for valuations on rational function fields K(X).
//!
//! The crate computes with pair valuations `v_{a,gamma}`, minimal pairs, key
//! polynomials and their truncation valuations `v_Q`, pseudo-Cauchy sequences
//! and their limit valuations, and ramification-theoretic bounds on implicit
//! constant fields. Every number is exact: rationals are arbitrary precision,
//! algebraic elements are tower expressions with refinable expansion
//! certificates, and valuations live in `Q ∪ {±∞}` or the lexicographic
//! product `(Q ⊕ Z)_lex`.

pub mod error;
pub mod values;
pub mod field;
pub mod poly;
pub mod ground;
pub mod algclose;
pub mod pairdef;
pub mod keypoly;
pub mod pcslimit;
pub mod ramicf;

pub use error::{Error, Result};
pub use values::OrderedValue;
pub use ground::{CoeffField, GroundField};
pub use poly::Poly;
pub use algclose::{AlgElem, NewtonPolygon, RefinePolicy};
pub use pairdef::PairOfDefinition;
pub use keypoly::AmbientValuation;
pub use pcslimit::{LimitValuation, StageData};
pub use ramicf::{RamData, SandwichReport};
