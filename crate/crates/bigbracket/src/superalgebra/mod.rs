//! The bigraded supercommutative algebra F of polynomial functions on
//! `T*[2]A[1]` with A the trivial bundle R^n x R^d over R^n.
//!
//! All coefficients are exact rationals; normal forms are unique, so equality
//! of superfunctions is structural equality.

mod generator;
mod monomial;
mod superfunction;

pub use generator::{Bidegree, Dims, GenKind, GeneratorId};
pub use monomial::Monomial;
pub use superfunction::Superfunction;

/// Exact scalar type used everywhere in the engine.
pub type Rational = num_rational::BigRational;

/// Shorthand for an exact rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Shorthand for an integer rational.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(num.into())
}
