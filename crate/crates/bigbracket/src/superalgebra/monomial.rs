//! Normal-form monomials in the supercommutative coordinate algebra.
//!
//! A monomial is a product of even generators with positive exponents and a
//! strictly increasing word of odd generators. Odd generators square to zero,
//! so each appears at most once; reordering odd factors costs a sign per
//! transposition.

use crate::superalgebra::generator::{Bidegree, Dims, GeneratorId};

/// A normal-form monomial (no coefficient).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    /// Even factors, sorted by generator, exponents >= 1.
    evens: Vec<(GeneratorId, u32)>,
    /// Odd factors, strictly increasing in the canonical order.
    odds: Vec<GeneratorId>,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn from_generator(g: GeneratorId) -> Monomial {
        if g.is_odd() {
            Monomial { evens: Vec::new(), odds: vec![g] }
        } else {
            Monomial { evens: vec![(g, 1)], odds: Vec::new() }
        }
    }

    /// Builds a monomial from an arbitrary factor word, normal-ordering odd
    /// generators. Returns `None` when an odd generator repeats, and the sign
    /// picked up by the reordering otherwise.
    pub fn from_factors(factors: &[GeneratorId]) -> Option<(Monomial, i8)> {
        let mut m = Monomial::one();
        let mut sign = 1i8;
        for &g in factors {
            let s = m.push_factor(g)?;
            sign *= s;
        }
        Some((m, sign))
    }

    /// Multiplies by a single generator on the right; `None` on odd squares.
    pub fn push_factor(&mut self, g: GeneratorId) -> Option<i8> {
        if g.is_odd() {
            // Insert into the increasing odd word; the new factor starts at
            // the right end, so it moves past every strictly larger factor.
            match self.odds.binary_search(&g) {
                Ok(_) => None,
                Err(pos) => {
                    let transpositions = self.odds.len() - pos;
                    self.odds.insert(pos, g);
                    Some(if transpositions.is_multiple_of(2) { 1 } else { -1 })
                }
            }
        } else {
            match self.evens.binary_search_by_key(&g, |&(h, _)| h) {
                Ok(i) => self.evens[i].1 += 1,
                Err(i) => self.evens.insert(i, (g, 1)),
            }
            Some(1)
        }
    }

    pub fn is_one(&self) -> bool {
        self.evens.is_empty() && self.odds.is_empty()
    }

    pub fn evens(&self) -> &[(GeneratorId, u32)] {
        &self.evens
    }

    pub fn odds(&self) -> &[GeneratorId] {
        &self.odds
    }

    pub fn bidegree(&self) -> Bidegree {
        let mut k = 0;
        let mut l = 0;
        for &(g, e) in &self.evens {
            let b = g.bidegree();
            k += b.k * e;
            l += b.l * e;
        }
        for g in &self.odds {
            let b = g.bidegree();
            k += b.k;
            l += b.l;
        }
        Bidegree::new(k, l)
    }

    pub fn total_degree(&self) -> u32 {
        self.bidegree().total()
    }

    /// The factor word in written order: even generators with multiplicity,
    /// then the odd word.
    pub fn factor_word(&self) -> Vec<GeneratorId> {
        let mut word = Vec::with_capacity(self.len());
        for &(g, e) in &self.evens {
            for _ in 0..e {
                word.push(g);
            }
        }
        word.extend_from_slice(&self.odds);
        word
    }

    pub fn len(&self) -> usize {
        self.evens.iter().map(|&(_, e)| e as usize).sum::<usize>() + self.odds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_one()
    }

    pub fn check_in(&self, dims: Dims) -> Result<(), crate::error::EngineError> {
        for &(g, _) in &self.evens {
            g.check_in(dims)?;
        }
        for g in &self.odds {
            g.check_in(dims)?;
        }
        Ok(())
    }

    /// Supercommutative product. `None` when an odd generator repeats; the
    /// sign counts the odd transpositions needed to merge the odd words.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i8)> {
        // Even part: merge-add the exponents.
        let mut evens = Vec::with_capacity(self.evens.len() + other.evens.len());
        let (mut i, mut j) = (0, 0);
        while i < self.evens.len() && j < other.evens.len() {
            match self.evens[i].0.cmp(&other.evens[j].0) {
                std::cmp::Ordering::Less => {
                    evens.push(self.evens[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    evens.push(other.evens[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    evens.push((self.evens[i].0, self.evens[i].1 + other.evens[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        evens.extend_from_slice(&self.evens[i..]);
        evens.extend_from_slice(&other.evens[j..]);

        // Odd part: merge two increasing words, counting inversions. A factor
        // from `other` that lands before `r` remaining factors of `self`
        // moves past each of them.
        let mut odds = Vec::with_capacity(self.odds.len() + other.odds.len());
        let (mut i, mut j) = (0, 0);
        let mut inversions = 0usize;
        while i < self.odds.len() && j < other.odds.len() {
            match self.odds[i].cmp(&other.odds[j]) {
                std::cmp::Ordering::Less => {
                    odds.push(self.odds[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    inversions += self.odds.len() - i;
                    odds.push(other.odds[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        odds.extend_from_slice(&self.odds[i..]);
        odds.extend_from_slice(&other.odds[j..]);

        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        Some((Monomial { evens, odds }, sign))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(g, e) in &self.evens {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", g)?;
            } else {
                write!(f, "{}^{}", g, e)?;
            }
        }
        for g in &self.odds {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", g)?;
        }
        Ok(())
    }
}
