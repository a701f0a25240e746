//! Exact symbolic engine for the graded Poisson ("big") bracket calculus of
//! split pre-Courant algebroids on A + A* and the associated multiplicative
//! curved L-infinity brackets on multivector sections.
//!
//! Everything is computed over the polynomial function algebra of `T*[2]A[1]`
//! with exact rational coefficients, so every identity is decided exactly.
//!
//! # Conventions
//!
//! Coordinates are ordered x1 < .. < xn < p1 < .. < pn < xi1 < .. < xid <
//! th1 < .. < thd; monomials are written with that order and odd reordering
//! tracks a sign per transposition. The bracket table is {p^i, x_i} =
//! {th^a, xi_a} = 1; graded symmetry then forces {x_i, p^i} = -1 and
//! {xi_a, th^a} = +1. All Koszul signs use the parity of the total degree
//! (equivalently of the degree shifted by two).

pub mod bracket;
pub mod courant;
pub mod error;
pub mod exec;
pub mod linf;
pub mod superalgebra;
pub mod testkit;
pub mod verify;

pub use bracket::{bracket as big_bracket, exp_adjoint, nested_bracket, try_bracket};
pub use courant::{CourantStructure, IntegrabilityReport, SkewEndo};
pub use error::EngineError;
pub use linf::{LElement, Side, SymFormAtom, SymFormFamily};
pub use superalgebra::{Bidegree, Dims, GenKind, GeneratorId, Monomial, Rational, Superfunction};
