//! Axiom-level properties of the superalgebra and the big bracket: exact
//! supercommutativity, associativity, graded symmetry, Leibniz, Jacobi,
//! bidegree bookkeeping, the section pairing, and agreement with the
//! independent peeling oracle.

use bigbracket::bracket::{bracket, nested_bracket};
use bigbracket::superalgebra::{rat_int, Bidegree, Dims, GeneratorId, Superfunction};
use bigbracket::testkit;

use proptest::prelude::*;
use rand::Rng;

fn sign(parity: u32) -> i64 {
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Strategy: a seeded random superfunction of bounded total degree.
fn arb_superfunction(dims: Dims, max_degree: u32) -> impl Strategy<Value = Superfunction> {
    (any::<u64>(), 0..=max_degree).prop_map(move |(seed, deg)| {
        let mut r = testkit::rng(seed);
        testkit::random_total_degree(&mut r, dims, deg, 3)
    })
}

fn arb_homogeneous(dims: Dims) -> impl Strategy<Value = Superfunction> {
    (any::<u64>(), 0u32..=3, 0u32..=3).prop_map(move |(seed, k, l)| {
        let mut r = testkit::rng(seed);
        testkit::random_homogeneous(&mut r, dims, Bidegree::new(k, l), 3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative_and_distributive(
        f in arb_superfunction(Dims::new(2, 2), 3),
        g in arb_superfunction(Dims::new(2, 2), 3),
        h in arb_superfunction(Dims::new(2, 2), 3),
    ) {
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
    }

    #[test]
    fn product_supercommutes(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(pf), Some(pg)) = (f.parity_odd(), g.parity_odd()) else {
            return Ok(());
        };
        let flip = if pf && pg { -1 } else { 1 };
        prop_assert_eq!(&f * &g, (&g * &f).scale(&rat_int(flip)));
    }

    #[test]
    fn product_respects_bidegree(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(bf), Some(bg)) = (f.homogeneous_bidegree(), g.homogeneous_bidegree()) else {
            return Ok(());
        };
        let fg = &f * &g;
        if let Some(b) = fg.homogeneous_bidegree() {
            prop_assert_eq!(b, bf + bg);
        } else {
            prop_assert!(fg.is_zero());
        }
    }

    #[test]
    fn bracket_matches_peeling_oracle(
        f in arb_superfunction(Dims::new(2, 2), 4),
        g in arb_superfunction(Dims::new(2, 2), 4),
    ) {
        prop_assert_eq!(bracket(&f, &g), testkit::oracle_bracket(&f, &g));
    }

    #[test]
    fn bracket_graded_symmetry(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(pf), Some(pg)) = (f.parity_odd(), g.parity_odd()) else {
            return Ok(());
        };
        let flip = if pf && pg { 1 } else { -1 };
        prop_assert_eq!(bracket(&f, &g), bracket(&g, &f).scale(&rat_int(flip)));
    }

    #[test]
    fn bracket_leibniz(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
        h in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(pf), Some(pg)) = (f.parity_odd(), g.parity_odd()) else {
            return Ok(());
        };
        let lhs = bracket(&f, &(&g * &h));
        let koszul = if pf && pg { -1 } else { 1 };
        let rhs = &(&bracket(&f, &g) * &h)
            + &(&g * &bracket(&f, &h)).scale(&rat_int(koszul));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_graded_jacobi(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
        h in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(pf), Some(pg)) = (f.parity_odd(), g.parity_odd()) else {
            return Ok(());
        };
        let koszul = if pf && pg { -1 } else { 1 };
        let lhs = bracket(&f, &bracket(&g, &h));
        let rhs = &bracket(&bracket(&f, &g), &h)
            + &bracket(&g, &bracket(&f, &h)).scale(&rat_int(koszul));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_has_bidegree_minus_one_minus_one(
        f in arb_homogeneous(Dims::new(2, 2)),
        g in arb_homogeneous(Dims::new(2, 2)),
    ) {
        let (Some(bf), Some(bg)) = (f.homogeneous_bidegree(), g.homogeneous_bidegree()) else {
            return Ok(());
        };
        let fg = bracket(&f, &g);
        if let Some(b) = fg.homogeneous_bidegree() {
            prop_assert_eq!(b.k + 1, bf.k + bg.k);
            prop_assert_eq!(b.l + 1, bf.l + bg.l);
        } else {
            prop_assert!(fg.is_zero());
        }
    }
}

#[test]
fn normal_form_is_order_independent() {
    // Building a product factor by factor in any order agrees with the
    // normal form up to the tracked sign, so normalizing twice is the
    // identity by construction.
    let dims = Dims::new(2, 2);
    let word = [
        GeneratorId::theta(2),
        GeneratorId::x(1),
        GeneratorId::xi(1),
        GeneratorId::theta(1),
        GeneratorId::x(1),
    ];
    let direct = Superfunction::from_factors(dims, &word, rat_int(1)).unwrap();
    let mut product = Superfunction::one(dims);
    for g in word {
        product = &product * &Superfunction::generator(dims, g).unwrap();
    }
    assert_eq!(direct, product);
}

#[test]
fn pairing_on_degree_one_sections() {
    // {X + a, Y + b} = a(Y) + b(X) for sections of A + A*.
    let dims = Dims::new(2, 2);
    let mut r = testkit::rng(7);
    for _ in 0..50 {
        let u = testkit::random_total_degree(&mut r, dims, 1, 3);
        let v = testkit::random_total_degree(&mut r, dims, 1, 3);
        let pair_uv = bracket(&u, &v);
        let pair_vu = bracket(&v, &u);
        // The pairing is symmetric and lands in F^0.
        assert_eq!(pair_uv, pair_vu);
        assert!(pair_uv.is_zero() || pair_uv.homogeneous_bidegree() == Some(Bidegree::new(0, 0)));
    }
    // Concrete values.
    let th1 = Superfunction::generator(dims, GeneratorId::theta(1)).unwrap();
    let xi1 = Superfunction::generator(dims, GeneratorId::xi(1)).unwrap();
    let xi2 = Superfunction::generator(dims, GeneratorId::xi(2)).unwrap();
    assert_eq!(bracket(&th1, &xi1), Superfunction::one(dims));
    assert!(bracket(&th1, &xi2).is_zero());
}

#[test]
fn functions_bracket_trivially_with_low_degrees() {
    // {f, g} = 0 and {f, X + a} = 0 for functions of the base.
    let dims = Dims::new(2, 2);
    let mut r = testkit::rng(13);
    for _ in 0..30 {
        let f = testkit::random_total_degree(&mut r, dims, 0, 3);
        let g = testkit::random_total_degree(&mut r, dims, 0, 3);
        let u = testkit::random_total_degree(&mut r, dims, 1, 3);
        assert!(bracket(&f, &g).is_zero());
        assert!(bracket(&f, &u).is_zero());
    }
}

#[test]
fn derived_operations_satisfy_pre_courant_axioms() {
    // For any degree-3 Theta, the derived anchor and bracket satisfy both
    // defining identities of a pre-Courant structure on random sections.
    let dims = Dims::new(2, 2);
    let mut r = testkit::rng(21);
    for trial in 0..25 {
        let cs = testkit::random_theta(&mut r, dims, 4);
        let u = testkit::random_total_degree(&mut r, dims, 1, 3);
        let v = testkit::random_total_degree(&mut r, dims, 1, 3);
        let w = testkit::random_total_degree(&mut r, dims, 1, 3);

        let pair = |a: &Superfunction, b: &Superfunction| bracket(a, b);
        let lhs = cs.anchor_apply(&u, &pair(&v, &w)).unwrap();

        // rho(u).<v,w> = <[u,v], w> + <v, [u,w]>
        let rhs1 = &pair(&cs.dorfman(&u, &v).unwrap(), &w)
            + &pair(&v, &cs.dorfman(&u, &w).unwrap());
        assert_eq!(lhs, rhs1, "first axiom fails at trial {}", trial);

        // rho(u).<v,w> = <u, [v,w] + [w,v]>
        let sym = &cs.dorfman(&v, &w).unwrap() + &cs.dorfman(&w, &v).unwrap();
        let rhs2 = pair(&u, &sym);
        assert_eq!(lhs, rhs2, "second axiom fails at trial {}", trial);
    }
}

#[test]
fn nested_bracket_examples() {
    // Left-nesting, identity case and the anchor value of the tangent
    // structure, cross-checked against the peeling oracle.
    let cs = testkit::mu_tm(1);
    let dims = cs.dims();
    let th1 = Superfunction::generator(dims, GeneratorId::theta(1)).unwrap();
    let x1 = Superfunction::generator(dims, GeneratorId::x(1)).unwrap();
    assert_eq!(nested_bracket(cs.theta(), &[]).unwrap(), cs.theta().clone());
    let v = nested_bracket(cs.mu(), &[&th1, &x1]).unwrap();
    assert_eq!(v, Superfunction::one(dims));
    let o = testkit::oracle_bracket(&testkit::oracle_bracket(cs.mu(), &th1), &x1);
    assert_eq!(o, v);
}

#[test]
fn exp_adjoint_series_matches_displayed_expansion() {
    // e^pi Theta expands bidegree by bidegree as
    //   psi + {pi,gamma} + 1/2 {pi,{pi,mu}} + 1/6 {pi,{pi,{pi,phi}}}   (3,0)
    //   + gamma + {pi,mu} + 1/2 {pi,{pi,phi}}                          (2,1)
    //   + mu + {pi,phi}                                               (1,2)
    //   + phi                                                         (0,3)
    let mut r = testkit::rng(5);
    let dims = Dims::new(2, 3);
    let cs = testkit::random_theta(&mut r, dims, 5);
    let pi = testkit::random_bivector(&mut r, dims, 3);
    let twisted = cs.twist_default(&pi).unwrap();

    let b = |f: &Superfunction, g: &Superfunction| bracket(f, g);
    let pi1 = |f: &Superfunction| b(&pi, f);
    let half = bigbracket::superalgebra::rat(1, 2);
    let sixth = bigbracket::superalgebra::rat(1, 6);

    let expect_30 = &(cs.psi() + &pi1(cs.gamma()))
        + &(&pi1(&pi1(cs.mu())).scale(&half) + &pi1(&pi1(&pi1(cs.phi()))).scale(&sixth));
    let expect_21 = &(cs.gamma() + &pi1(cs.mu())) + &pi1(&pi1(cs.phi())).scale(&half);
    let expect_12 = cs.mu() + &pi1(cs.phi());

    assert_eq!(twisted.psi(), &expect_30);
    assert_eq!(twisted.gamma(), &expect_21);
    assert_eq!(twisted.mu(), &expect_12);
    assert_eq!(twisted.phi(), cs.phi());
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_and_sequential_brackets_agree() {
    use bigbracket::bracket::bracket_with_mode;
    use bigbracket::exec::Mode;
    let dims = Dims::new(3, 3);
    let mut r = testkit::rng(0xD0);
    let mut f = Superfunction::zero(dims);
    let mut g = Superfunction::zero(dims);
    for _ in 0..120 {
        f = &f + &testkit::random_homogeneous(&mut r, dims, Bidegree::new(2, 1), 1);
        g = &g + &testkit::random_homogeneous(&mut r, dims, Bidegree::new(1, 2), 1);
    }
    assert_eq!(
        bracket_with_mode(Mode::Sequential, &f, &g),
        bracket_with_mode(Mode::Parallel, &f, &g)
    );
}

#[test]
fn seeded_homogeneous_triples_satisfy_all_axioms() {
    // The acceptance-style sweep in miniature: graded symmetry, Leibniz,
    // Jacobi and bidegree on seeded homogeneous triples over (2,3).
    let dims = Dims::new(2, 3);
    let mut r = testkit::rng(1729);
    for _ in 0..60 {
        let bk = Bidegree::new(r.gen_range(0..=3), r.gen_range(0..=3));
        let bl = Bidegree::new(r.gen_range(0..=3), r.gen_range(0..=3));
        let bm = Bidegree::new(r.gen_range(0..=2), r.gen_range(0..=2));
        let f = testkit::random_homogeneous(&mut r, dims, bk, 2);
        let g = testkit::random_homogeneous(&mut r, dims, bl, 2);
        let h = testkit::random_homogeneous(&mut r, dims, bm, 2);

        let sf = sign(bk.total() * bl.total());
        assert_eq!(bracket(&f, &g), bracket(&g, &f).scale(&rat_int(-sf)));

        let lhs = bracket(&f, &(&g * &h));
        let rhs = &(&bracket(&f, &g) * &h) + &(&g * &bracket(&f, &h)).scale(&rat_int(sf));
        assert_eq!(lhs, rhs);

        let jac_lhs = bracket(&f, &bracket(&g, &h));
        let jac_rhs = &bracket(&bracket(&f, &g), &h)
            + &bracket(&g, &bracket(&f, &h)).scale(&rat_int(sf));
        assert_eq!(jac_lhs, jac_rhs);
    }
}
