//! Deterministic test-tuple sets for pointwise form verification.
//!
//! The base elements are the generators x_i and th^a (xi_a on the form
//! side), pairwise wedges, and x-monomial multiples of the fibre generators
//! up to a configurable degree. Tuples are combinations with repetition;
//! arities above three fall back to the bare generators, and oversized sets
//! are subsampled with a seeded generator so runs are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::courant;
use crate::exec;
use crate::linf::{LElement, Side};
use crate::superalgebra::{Dims, GeneratorId, Superfunction};

#[derive(Debug, Clone)]
pub struct TupleConfig {
    /// Highest x-degree of the monomial coefficients in the base set.
    pub x_degree: u32,
    /// Cap on the number of tuples per arity; larger sets are subsampled.
    pub max_tuples_per_arity: usize,
    /// Seed for the deterministic subsampling.
    pub seed: u64,
    /// Execution strategy for tuple sweeps.
    pub mode: exec::Mode,
}

impl Default for TupleConfig {
    fn default() -> Self {
        TupleConfig {
            x_degree: 2,
            max_tuples_per_arity: 1500,
            seed: 0,
            mode: exec::Mode::default(),
        }
    }
}

impl TupleConfig {
    /// A lighter configuration for unit tests.
    pub fn small() -> TupleConfig {
        TupleConfig { x_degree: 1, max_tuples_per_arity: 250, ..TupleConfig::default() }
    }

    pub fn with_seed(seed: u64) -> TupleConfig {
        TupleConfig { seed, ..TupleConfig::default() }
    }
}

fn fibre_gen(dims: Dims, side: Side, a: u32) -> Superfunction {
    let g = match side {
        Side::Multivector => GeneratorId::theta(a),
        Side::Form => GeneratorId::xi(a),
    };
    Superfunction::generator(dims, g).expect("in range")
}

fn element(side: Side, value: Superfunction) -> LElement {
    LElement::new(side, value).expect("constructed on the right side")
}

/// The default base elements for a side: x_i, fibre generators, pairwise
/// wedges and monomial multiples of the fibre generators.
pub fn base_elements(dims: Dims, side: Side, cfg: &TupleConfig) -> Vec<LElement> {
    let mut out = Vec::new();
    for i in 1..=dims.n {
        out.push(element(
            side,
            Superfunction::generator(dims, GeneratorId::x(i)).expect("in range"),
        ));
    }
    for a in 1..=dims.d {
        out.push(element(side, fibre_gen(dims, side, a)));
    }
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            let w = fibre_gen(dims, side, a)
                .try_mul(&fibre_gen(dims, side, b))
                .expect("same dims");
            out.push(element(side, w));
        }
    }
    // Nonconstant monomial coefficients on single fibre generators.
    for f in courant::x_monomials(dims, cfg.x_degree) {
        let constant = f.num_terms() == 1 && f.terms().next().map(|(m, _)| m.is_one()).unwrap_or(false);
        if constant {
            continue;
        }
        for a in 1..=dims.d {
            out.push(element(side, f.try_mul(&fibre_gen(dims, side, a)).expect("same dims")));
        }
    }
    out
}

/// Bare generators only, for the high arities.
fn generator_elements(dims: Dims, side: Side) -> Vec<LElement> {
    let mut out = Vec::new();
    for i in 1..=dims.n {
        out.push(element(
            side,
            Superfunction::generator(dims, GeneratorId::x(i)).expect("in range"),
        ));
    }
    for a in 1..=dims.d {
        out.push(element(side, fibre_gen(dims, side, a)));
    }
    out
}

/// Combinations with repetition of `base`, capped to `max` by deterministic
/// subsampling.
pub(crate) fn small_cartesian(base: &[LElement], arity: usize, max: usize) -> Vec<Vec<LElement>> {
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &tuples {
            let start = t.last().copied().unwrap_or(0);
            for i in start..base.len() {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        tuples = next;
    }
    let mut out: Vec<Vec<LElement>> = tuples
        .into_iter()
        .map(|t| t.into_iter().map(|i| base[i].clone()).collect())
        .collect();
    if out.len() > max {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7 ^ (arity as u64) << 8 ^ max as u64);
        let mut keep: Vec<usize> = Vec::with_capacity(max);
        let len = out.len();
        for _ in 0..max {
            keep.push(rng.gen_range(0..len));
        }
        keep.sort_unstable();
        keep.dedup();
        out = keep.into_iter().map(|i| out[i].clone()).collect();
    }
    out
}

/// The default tuple set for one arity. Arity 0 is the single empty tuple.
pub fn tuples_for_arity(
    dims: Dims,
    side: Side,
    arity: usize,
    cfg: &TupleConfig,
) -> Vec<Vec<LElement>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    let base = if arity <= 3 {
        base_elements(dims, side, cfg)
    } else {
        generator_elements(dims, side)
    };
    let full_count = count_multisets(base.len(), arity);
    let tuples = small_cartesian(&base, arity, usize::MAX);
    if full_count <= cfg.max_tuples_per_arity {
        return tuples;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ ((arity as u64) << 32));
    let mut keep: Vec<usize> = Vec::with_capacity(cfg.max_tuples_per_arity);
    for _ in 0..cfg.max_tuples_per_arity {
        keep.push(rng.gen_range(0..tuples.len()));
    }
    keep.sort_unstable();
    keep.dedup();
    keep.into_iter().map(|i| tuples[i].clone()).collect()
}

fn count_multisets(n: usize, k: usize) -> usize {
    // C(n + k - 1, k), saturating.
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num = num.saturating_mul((n + i) as u128);
        den = den.saturating_mul((i + 1) as u128);
    }
    usize::try_from(num / den).unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_contains_generators_and_wedges() {
        let dims = Dims::new(2, 2);
        let cfg = TupleConfig::default();
        let base = base_elements(dims, Side::Multivector, &cfg);
        // 2 x's + 2 thetas + 1 wedge + (x-monomials of degree 1..2 = 5) * 2 thetas
        assert_eq!(base.len(), 2 + 2 + 1 + 5 * 2);
    }

    #[test]
    fn tuples_are_deterministic() {
        let dims = Dims::new(2, 3);
        let cfg = TupleConfig::default();
        let a = tuples_for_arity(dims, Side::Multivector, 2, &cfg);
        let b = tuples_for_arity(dims, Side::Multivector, 2, &cfg);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn arity_zero_is_single_empty_tuple() {
        let dims = Dims::new(1, 1);
        let t = tuples_for_arity(dims, Side::Multivector, 0, &TupleConfig::default());
        assert_eq!(t.len(), 1);
        assert!(t[0].is_empty());
    }

    #[test]
    fn high_arities_use_generators_only() {
        let dims = Dims::new(4, 4);
        let cfg = TupleConfig::default();
        let t4 = tuples_for_arity(dims, Side::Multivector, 4, &cfg);
        assert!(t4.len() <= cfg.max_tuples_per_arity);
        for tuple in &t4 {
            for el in tuple {
                assert!(el.value().num_terms() == 1);
            }
        }
    }
}
