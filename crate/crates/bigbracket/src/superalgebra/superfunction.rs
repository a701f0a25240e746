//! Sparse superfunctions: exact rational linear combinations of normal-form
//! monomials over a fixed pair of dimensions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::EngineError;
use crate::exec;
use crate::superalgebra::generator::{Bidegree, Dims, GeneratorId};
use crate::superalgebra::monomial::Monomial;
use crate::superalgebra::Rational;

/// An element of the polynomial function algebra on `T*[2]A[1]`.
///
/// The zero element is the empty term map; no zero coefficients are stored,
/// so structural equality decides algebraic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superfunction {
    dims: Dims,
    terms: BTreeMap<Monomial, Rational>,
}

impl Superfunction {
    pub fn zero(dims: Dims) -> Superfunction {
        Superfunction { dims, terms: BTreeMap::new() }
    }

    pub fn scalar(dims: Dims, value: Rational) -> Superfunction {
        let mut f = Superfunction::zero(dims);
        if !value.is_zero() {
            f.terms.insert(Monomial::one(), value);
        }
        f
    }

    pub fn one(dims: Dims) -> Superfunction {
        Superfunction::scalar(dims, Rational::one())
    }

    pub fn generator(dims: Dims, g: GeneratorId) -> Result<Superfunction, EngineError> {
        g.check_in(dims)?;
        let mut f = Superfunction::zero(dims);
        f.terms.insert(Monomial::from_generator(g), Rational::one());
        Ok(f)
    }

    pub fn from_monomial(
        dims: Dims,
        mono: Monomial,
        coeff: Rational,
    ) -> Result<Superfunction, EngineError> {
        mono.check_in(dims)?;
        let mut f = Superfunction::zero(dims);
        if !coeff.is_zero() {
            f.terms.insert(mono, coeff);
        }
        Ok(f)
    }

    /// Builds `coeff * g1 * g2 * ...` from a factor word; odd repeats give 0.
    pub fn from_factors(
        dims: Dims,
        factors: &[GeneratorId],
        coeff: Rational,
    ) -> Result<Superfunction, EngineError> {
        for g in factors {
            g.check_in(dims)?;
        }
        match Monomial::from_factors(factors) {
            None => Ok(Superfunction::zero(dims)),
            Some((mono, sign)) => {
                Superfunction::from_monomial(dims, mono, coeff * Rational::from_integer(sign.into()))
            }
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        self.terms.get(mono).cloned().unwrap_or_else(Rational::zero)
    }

    fn check_dims(&self, other: &Superfunction) -> Result<(), EngineError> {
        if self.dims != other.dims {
            return Err(EngineError::DimensionMismatch(self.dims, other.dims));
        }
        Ok(())
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Superfunction) -> Result<Superfunction, EngineError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Superfunction) -> Result<Superfunction, EngineError> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Superfunction {
        if factor.is_zero() {
            return Superfunction::zero(self.dims);
        }
        Superfunction {
            dims: self.dims,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    /// Supercommutative product: F.G = (-1)^{fg} G.F on homogeneous degrees.
    pub fn try_mul(&self, other: &Superfunction) -> Result<Superfunction, EngineError> {
        self.check_dims(other)?;
        let lhs: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        let rhs: Vec<(&Monomial, &Rational)> = other.terms.iter().collect();
        let partial = exec::map_default(&lhs, |&(ma, ca)| {
            let mut acc: Vec<(Monomial, Rational)> = Vec::with_capacity(rhs.len());
            for &(mb, cb) in &rhs {
                if let Some((m, sign)) = ma.mul(mb) {
                    let mut c = ca * cb;
                    if sign < 0 {
                        c = -c;
                    }
                    acc.push((m, c));
                }
            }
            acc
        });
        let mut out = Superfunction::zero(self.dims);
        for chunk in partial {
            for (m, c) in chunk {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Splits into bidegree-homogeneous components; empty map for zero.
    pub fn bidegree_split(&self) -> BTreeMap<Bidegree, Superfunction> {
        let mut out: BTreeMap<Bidegree, Superfunction> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.bidegree())
                .or_insert_with(|| Superfunction::zero(self.dims))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// The component of a given bidegree.
    pub fn component(&self, bd: Bidegree) -> Superfunction {
        let mut out = Superfunction::zero(self.dims);
        for (m, c) in &self.terms {
            if m.bidegree() == bd {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// `Some(bd)` when nonzero and concentrated in a single bidegree.
    pub fn homogeneous_bidegree(&self) -> Option<Bidegree> {
        let mut iter = self.terms.keys();
        let first = iter.next()?.bidegree();
        iter.all(|m| m.bidegree() == first).then_some(first)
    }

    /// True when every term has the given total degree (vacuously for zero).
    pub fn has_total_degree(&self, t: u32) -> bool {
        self.terms.keys().all(|m| m.total_degree() == t)
    }

    /// Parity of the total degree, when defined (zero reports even).
    pub fn parity_odd(&self) -> Option<bool> {
        let mut parities = self.terms.keys().map(|m| m.total_degree() % 2 == 1);
        match parities.next() {
            None => Some(false),
            Some(first) => parities.all(|p| p == first).then_some(first),
        }
    }

    /// True when no term contains a `p` generator (i.e. the function is a
    /// section of the exterior algebra of A + A*).
    pub fn is_p_free(&self) -> bool {
        self.terms.keys().all(|m| {
            m.evens()
                .iter()
                .all(|(g, _)| g.kind != crate::superalgebra::GenKind::P)
        })
    }

    /// Largest total degree among the terms (zero for the zero function).
    pub fn max_total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }
}

impl std::ops::Add for &Superfunction {
    type Output = Superfunction;

    fn add(self, rhs: &Superfunction) -> Superfunction {
        self.try_add(rhs).expect("superfunction addition: dimension mismatch")
    }
}

impl std::ops::Sub for &Superfunction {
    type Output = Superfunction;

    fn sub(self, rhs: &Superfunction) -> Superfunction {
        self.try_sub(rhs).expect("superfunction subtraction: dimension mismatch")
    }
}

impl std::ops::Mul for &Superfunction {
    type Output = Superfunction;

    fn mul(self, rhs: &Superfunction) -> Superfunction {
        self.try_mul(rhs).expect("superfunction product: dimension mismatch")
    }
}

impl std::ops::Neg for &Superfunction {
    type Output = Superfunction;

    fn neg(self) -> Superfunction {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", abs)?;
            } else if abs.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", abs, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::rat;

    fn dims() -> Dims {
        Dims::new(2, 2)
    }

    fn gen(f: fn(u32) -> GeneratorId, i: u32) -> Superfunction {
        Superfunction::generator(dims(), f(i)).unwrap()
    }

    #[test]
    fn zero_is_empty_term_set() {
        let z = Superfunction::zero(dims());
        assert!(z.is_zero());
        assert_eq!(Superfunction::scalar(dims(), rat(0, 1)), z);
    }

    #[test]
    fn sum_with_negation_cancels() {
        let f = gen(GeneratorId::theta, 1);
        let g = &f + &gen(GeneratorId::x, 1);
        assert!((&g - &g).is_zero());
    }

    #[test]
    fn odd_square_vanishes_in_product() {
        let th1 = gen(GeneratorId::theta, 1);
        assert!((&th1 * &th1).is_zero());
    }

    #[test]
    fn supercommutativity_sign_on_odd_pair() {
        let xi1 = gen(GeneratorId::xi, 1);
        let th1 = gen(GeneratorId::theta, 1);
        assert_eq!(&xi1 * &th1, -&(&th1 * &xi1));
    }

    #[test]
    fn binomial_with_odd_part() {
        // (x1 + xi1)^2 = x1^2 + 2 x1 xi1
        let f = &gen(GeneratorId::x, 1) + &gen(GeneratorId::xi, 1);
        let sq = &f * &f;
        let x1 = GeneratorId::x(1);
        let xi1 = GeneratorId::xi(1);
        let expect = &Superfunction::from_factors(dims(), &[x1, x1], rat(1, 1)).unwrap()
            + &Superfunction::from_factors(dims(), &[x1, xi1], rat(2, 1)).unwrap();
        assert_eq!(sq, expect);
    }

    #[test]
    fn bidegree_split_components() {
        let d = Dims::new(1, 3);
        let t = Superfunction::from_factors(
            d,
            &[GeneratorId::theta(1), GeneratorId::theta(2), GeneratorId::theta(3)],
            rat(1, 1),
        )
        .unwrap();
        let m = Superfunction::from_factors(d, &[GeneratorId::p(1), GeneratorId::xi(1)], rat(1, 1))
            .unwrap();
        let f = &t + &m;
        let split = f.bidegree_split();
        assert_eq!(split.len(), 2);
        assert_eq!(split[&Bidegree::new(3, 0)], t);
        assert_eq!(split[&Bidegree::new(1, 2)], m);
        assert!(Superfunction::zero(d).bidegree_split().is_empty());
    }

    #[test]
    fn from_factors_duplicate_odd_is_zero() {
        let f = Superfunction::from_factors(
            dims(),
            &[GeneratorId::theta(1), GeneratorId::theta(1)],
            rat(1, 1),
        )
        .unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let f = Superfunction::one(Dims::new(1, 1));
        let g = Superfunction::one(Dims::new(2, 1));
        assert!(f.try_mul(&g).is_err());
        assert!(f.try_add(&g).is_err());
    }

    #[test]
    fn display_renders_signs_and_coefficients() {
        let f = &Superfunction::from_factors(dims(), &[GeneratorId::x(1)], rat(-3, 2)).unwrap()
            + &Superfunction::one(dims());
        assert_eq!(f.to_string(), "1 - 3/2*x1");
    }
}
