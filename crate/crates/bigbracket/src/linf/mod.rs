//! The graded vector space `L = Gamma(wedge A)[2]` (and its dual-side twin),
//! symmetric vector-valued forms represented by derived-bracket and Euler
//! atoms, the structure maps between degree-3 functions and curved
//! L-infinity brackets, their inverses, twisting, and the dual bracket
//! family.

mod insertion;
mod tuples;

pub use insertion::{
    compare_on_tuples, families_equal, gen_jacobi_check, insert_eval, nijenhuis_form_check,
    rn_bracket, rn_bracket_dyn, unshuffle_indices, EqualityEvidence, JacobiCheck, JacobiReport,
    NijenhuisFormReport, RnBracket, SymbolicJacobi, TupleDefect,
};
pub use tuples::{base_elements, tuples_for_arity, TupleConfig};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::bracket::{nested_bracket, try_bracket};
use crate::courant::{CourantStructure, SkewEndo};
use crate::error::EngineError;
use crate::superalgebra::{rat, rat_int, Bidegree, Dims, Rational, Superfunction};

/// Which copy of the graded vector space an element lives on:
/// multivector sections (bidegree (k,0), i.e. x/theta polynomials) or
/// form sections (bidegree (0,l), i.e. x/xi polynomials).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Multivector,
    Form,
}

impl Side {
    fn admits(&self, bd: Bidegree) -> bool {
        match self {
            Side::Multivector => bd.l == 0,
            Side::Form => bd.k == 0,
        }
    }

    fn count(&self, bd: Bidegree) -> u32 {
        match self {
            Side::Multivector => bd.k,
            Side::Form => bd.l,
        }
    }
}

/// An element of `L = Gamma(wedge A)[2]` (or of the dual-side space). The
/// homogeneous piece with fibre word length c sits in shifted degree c - 2:
/// functions in degree -2, sections of A in degree -1, bivectors in 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LElement {
    value: Superfunction,
    side: Side,
}

impl LElement {
    pub fn new(side: Side, value: Superfunction) -> Result<LElement, EngineError> {
        for (m, _) in value.terms() {
            if !side.admits(m.bidegree()) {
                return Err(EngineError::NotHomogeneous { what: "L-element side" });
            }
        }
        Ok(LElement { value, side })
    }

    pub fn multivector(value: Superfunction) -> Result<LElement, EngineError> {
        LElement::new(Side::Multivector, value)
    }

    pub fn form(value: Superfunction) -> Result<LElement, EngineError> {
        LElement::new(Side::Form, value)
    }

    pub fn zero(dims: Dims, side: Side) -> LElement {
        LElement { value: Superfunction::zero(dims), side }
    }

    pub fn value(&self) -> &Superfunction {
        &self.value
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dims(&self) -> Dims {
        self.value.dims()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Decomposition into shifted-degree-homogeneous pieces.
    pub fn shifted_pieces(&self) -> Vec<(i64, LElement)> {
        let mut by_count: BTreeMap<u32, Superfunction> = BTreeMap::new();
        for (m, c) in self.value.terms() {
            let count = self.side.count(m.bidegree());
            by_count
                .entry(count)
                .or_insert_with(|| Superfunction::zero(self.dims()))
                .add_term(m.clone(), c.clone());
        }
        by_count
            .into_iter()
            .map(|(count, value)| (i64::from(count) - 2, LElement { value, side: self.side }))
            .collect()
    }

    /// Shifted degree when homogeneous; `None` for zero or mixed elements.
    pub fn shifted_degree(&self) -> Option<i64> {
        let pieces = self.shifted_pieces();
        match pieces.as_slice() {
            [(p, _)] => Some(*p),
            _ => None,
        }
    }

    /// Parity of the shifted degree (equals the fibre word length mod 2).
    pub fn parity_odd(&self) -> Option<bool> {
        let mut parities = self
            .value
            .terms()
            .map(|(m, _)| self.side.count(m.bidegree()) % 2 == 1);
        match parities.next() {
            None => Some(false),
            Some(first) => parities.all(|p| p == first).then_some(first),
        }
    }

    /// The graded commutative product of the section algebra.
    pub fn wedge(&self, other: &LElement) -> Result<LElement, EngineError> {
        if self.side != other.side {
            return Err(EngineError::NotHomogeneous { what: "wedge operand side" });
        }
        LElement::new(self.side, self.value.try_mul(&other.value)?)
    }
}

/// One atom of a symmetric vector-valued form: either a derived-bracket
/// expression (P_1,..,P_k) -> sign * {..{{gen, P_1}, P_2}.., P_k}, or the
/// Euler map P -> scale * p * P on shifted degree p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymFormAtom {
    Derived {
        gen: Superfunction,
        arity: usize,
        sign: Rational,
    },
    Euler {
        scale: Rational,
    },
}

impl SymFormAtom {
    pub fn arity(&self) -> usize {
        match self {
            SymFormAtom::Derived { arity, .. } => *arity,
            SymFormAtom::Euler { .. } => 1,
        }
    }

    /// Degree as a graded map: total degree of the generator minus 2 for a
    /// derived atom, 0 for the Euler atom.
    pub fn map_degree(&self) -> Option<i64> {
        match self {
            SymFormAtom::Derived { gen, .. } => {
                if gen.is_zero() {
                    None
                } else {
                    let mut degrees = gen.terms().map(|(m, _)| m.total_degree());
                    let first = degrees.next().unwrap();
                    degrees
                        .all(|t| t == first)
                        .then_some(i64::from(first) - 2)
                }
            }
            SymFormAtom::Euler { .. } => Some(0),
        }
    }

    pub fn eval(&self, side: Side, args: &[LElement]) -> Result<LElement, EngineError> {
        match self {
            SymFormAtom::Derived { gen, arity, sign } => {
                debug_assert_eq!(args.len(), *arity);
                let values: Vec<&Superfunction> = args.iter().map(|a| a.value()).collect();
                let raw = nested_bracket(gen, &values)?;
                LElement::new(side, raw.scale(sign))
            }
            SymFormAtom::Euler { scale } => {
                debug_assert_eq!(args.len(), 1);
                let mut out = Superfunction::zero(args[0].dims());
                for (p, piece) in args[0].shifted_pieces() {
                    out = out.try_add(&piece.value().scale(&(scale * rat_int(p))))?;
                }
                LElement::new(side, out)
            }
        }
    }
}

/// An arity-graded symmetric vector-valued form, stored as lists of atoms
/// per arity. `declared_degree` is the degree of the form as a graded map
/// (1 for bracket families, 0 for deformation families).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymFormFamily {
    dims: Dims,
    side: Side,
    declared_degree: i64,
    by_arity: BTreeMap<usize, Vec<SymFormAtom>>,
}

impl SymFormFamily {
    pub fn new(dims: Dims, side: Side, declared_degree: i64) -> SymFormFamily {
        SymFormFamily { dims, side, declared_degree, by_arity: BTreeMap::new() }
    }

    /// Adds an atom after checking its map degree against the family degree.
    pub fn push_atom(&mut self, atom: SymFormAtom) -> Result<(), EngineError> {
        if let SymFormAtom::Derived { gen, .. } = &atom {
            if !gen.is_zero() && !gen.has_total_degree(gen.max_total_degree()) {
                return Err(EngineError::NotHomogeneous { what: "atom generator" });
            }
        }
        if let Some(deg) = atom.map_degree() {
            if deg != self.declared_degree {
                return Err(EngineError::NotRepresentable(format!(
                    "atom of map degree {} in a family of declared degree {}",
                    deg, self.declared_degree
                )));
            }
        }
        self.by_arity.entry(atom.arity()).or_default().push(atom);
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn declared_degree(&self) -> i64 {
        self.declared_degree
    }

    pub fn arities(&self) -> Vec<usize> {
        self.by_arity.keys().copied().collect()
    }

    pub fn atoms_at(&self, arity: usize) -> &[SymFormAtom] {
        self.by_arity.get(&arity).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn is_empty(&self) -> bool {
        self.by_arity.values().all(Vec::is_empty)
    }

    /// Scales every atom; a zero factor empties the family.
    pub fn scaled(&self, factor: &Rational) -> SymFormFamily {
        let mut out = SymFormFamily::new(self.dims, self.side, self.declared_degree);
        if factor.is_zero() {
            return out;
        }
        for atoms in self.by_arity.values() {
            for atom in atoms {
                let scaled = match atom {
                    SymFormAtom::Derived { gen, arity, sign } => SymFormAtom::Derived {
                        gen: gen.clone(),
                        arity: *arity,
                        sign: sign * factor,
                    },
                    SymFormAtom::Euler { scale } => SymFormAtom::Euler { scale: scale * factor },
                };
                out.by_arity.entry(scaled.arity()).or_default().push(scaled);
            }
        }
        out
    }

    /// Sum of sign-weighted generators at an arity when every atom there is
    /// derived; `None` if an Euler atom is present.
    pub fn merged_gen(&self, arity: usize) -> Option<Superfunction> {
        let mut acc = Superfunction::zero(self.dims);
        for atom in self.atoms_at(arity) {
            match atom {
                SymFormAtom::Derived { gen, sign, .. } => {
                    acc = acc.try_add(&gen.scale(sign)).ok()?;
                }
                SymFormAtom::Euler { .. } => return None,
            }
        }
        Some(acc)
    }

    /// True when the family consists of Euler atoms only; returns the total
    /// scale.
    pub fn euler_scale(&self) -> Option<Rational> {
        let mut total = Rational::zero();
        for atoms in self.by_arity.values() {
            for atom in atoms {
                match atom {
                    SymFormAtom::Euler { scale } => total += scale,
                    SymFormAtom::Derived { gen, .. } if gen.is_zero() => {}
                    SymFormAtom::Derived { .. } => return None,
                }
            }
        }
        Some(total)
    }

    /// Recognizes a bracket family l = M(Theta): degree 1, derived atoms at
    /// arities 0..3 whose merged generators sit in the slots (3-k, k).
    pub fn as_m_shape(&self) -> Option<CourantStructure> {
        if self.declared_degree != 1 || self.side != Side::Multivector {
            return None;
        }
        let mut theta = Superfunction::zero(self.dims);
        for &arity in self.by_arity.keys() {
            if arity > 3 {
                return None;
            }
            let gen = self.merged_gen(arity)?;
            let slot = Bidegree::new(3 - arity as u32, arity as u32);
            if !gen.is_zero() && gen.homogeneous_bidegree() != Some(slot) {
                return None;
            }
            theta = theta.try_add(&gen).ok()?;
        }
        CourantStructure::decompose(theta).ok()
    }

    /// Recognizes a deformation family j = Upsilon(J): degree 0, derived
    /// atoms at arities 0..2 whose merged generators are the negated blocks.
    pub fn as_upsilon_shape(&self) -> Option<SkewEndo> {
        if self.declared_degree != 0 || self.side != Side::Multivector {
            return None;
        }
        let mut blocks = [
            Superfunction::zero(self.dims),
            Superfunction::zero(self.dims),
            Superfunction::zero(self.dims),
        ];
        for &arity in self.by_arity.keys() {
            if arity > 2 {
                return None;
            }
            let gen = self.merged_gen(arity)?;
            let slot = Bidegree::new(2 - arity as u32, arity as u32);
            if !gen.is_zero() && gen.homogeneous_bidegree() != Some(slot) {
                return None;
            }
            blocks[arity] = -&gen;
        }
        let [pi, nn, omega] = blocks;
        SkewEndo::from_parts(pi, nn, omega).ok()
    }
}

/// Pointwise evaluation interface shared by symbolic families and
/// Richardson-Nijenhuis bracket evaluators.
pub trait FormEvaluator: Send + Sync {
    fn dims(&self) -> Dims;
    fn side(&self) -> Side;
    fn degree(&self) -> i64;
    fn arities(&self) -> Vec<usize>;
    fn eval(&self, arity: usize, args: &[LElement]) -> Result<LElement, EngineError>;
}

impl FormEvaluator for SymFormFamily {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn side(&self) -> Side {
        self.side
    }

    fn degree(&self) -> i64 {
        self.declared_degree
    }

    fn arities(&self) -> Vec<usize> {
        self.arities()
    }

    fn eval(&self, arity: usize, args: &[LElement]) -> Result<LElement, EngineError> {
        if args.len() != arity {
            return Err(EngineError::Unsupported(format!(
                "arity {} called with {} arguments",
                arity,
                args.len()
            )));
        }
        let mut acc = LElement::zero(self.dims, self.side);
        for atom in self.atoms_at(arity) {
            let v = atom.eval(self.side, args)?;
            acc = LElement::new(self.side, acc.value().try_add(v.value())?)?;
        }
        Ok(acc)
    }
}

/// Shared handle for evaluator composition.
pub type DynForm = Arc<dyn FormEvaluator>;

// ---------------------------------------------------------------------------
// The structure maps
// ---------------------------------------------------------------------------

/// The bracket family of a structure function:
/// l_0 = psi, l_1(P) = {gamma,P}, l_2(P,Q) = {{mu,P},Q},
/// l_3(P,Q,R) = {{{phi,P},Q},R}.
pub fn map_m(cs: &CourantStructure) -> SymFormFamily {
    let mut fam = SymFormFamily::new(cs.dims(), Side::Multivector, 1);
    for (arity, gen) in [(0, cs.psi()), (1, cs.gamma()), (2, cs.mu()), (3, cs.phi())] {
        if !gen.is_zero() {
            fam.push_atom(SymFormAtom::Derived {
                gen: gen.clone(),
                arity,
                sign: rat_int(1),
            })
            .expect("structure components have map degree 1");
        }
    }
    fam
}

/// The deformation family of a skew endomorphism:
/// j_0 = -pi, j_1(P) = {-N, P}, j_2(P,Q) = {{-omega, P}, Q}.
pub fn map_upsilon(j: &SkewEndo) -> SymFormFamily {
    let mut fam = SymFormFamily::new(j.dims(), Side::Multivector, 0);
    for (arity, gen) in [(0, j.pi()), (1, j.nn()), (2, j.omega())] {
        if !gen.is_zero() {
            fam.push_atom(SymFormAtom::Derived {
                gen: gen.clone(),
                arity,
                sign: rat_int(-1),
            })
            .expect("endomorphism blocks have map degree 0");
        }
    }
    fam
}

/// The dual-side bracket family on form sections:
/// lambda_0 = phi, lambda_1(a) = {mu,a}, lambda_2(a,b) = {{gamma,a},b},
/// lambda_3(a,b,e) = {{{psi,a},b},e}.
pub fn dual_lambda(cs: &CourantStructure) -> SymFormFamily {
    let mut fam = SymFormFamily::new(cs.dims(), Side::Form, 1);
    for (arity, gen) in [(0, cs.phi()), (1, cs.mu()), (2, cs.gamma()), (3, cs.psi())] {
        if !gen.is_zero() {
            fam.push_atom(SymFormAtom::Derived {
                gen: gen.clone(),
                arity,
                sign: rat_int(1),
            })
            .expect("structure components have map degree 1");
        }
    }
    fam
}

/// The Euler-multiple family k = scale * E (arity 1, degree 0). The square
/// of an Upsilon-type Nijenhuis form is -lambda * E.
pub fn euler_family(dims: Dims, side: Side, scale: Rational) -> SymFormFamily {
    let mut fam = SymFormFamily::new(dims, side, 0);
    fam.push_atom(SymFormAtom::Euler { scale })
        .expect("euler atom has degree 0");
    fam
}

/// Extends a p-free homogeneous tensor with `arity` dual slots to a graded
/// symmetric multiderivation, as the single derived atom with sign
/// (-1)^{k l - k(k-1)/2} where k = arity and l is the multivector slot count.
pub fn extend_tensor(v: &Superfunction, arity: usize) -> Result<SymFormFamily, EngineError> {
    let bd = v
        .homogeneous_bidegree()
        .ok_or(EngineError::NotHomogeneous { what: "tensor to extend" })?;
    if !v.is_p_free() {
        return Err(EngineError::MomentTermInSection);
    }
    if bd.l as usize != arity {
        return Err(EngineError::NotRepresentable(format!(
            "tensor has {} dual slots but arity {} was requested",
            bd.l, arity
        )));
    }
    let k = arity as i64;
    let l = i64::from(bd.k);
    let exponent = k * l - k * (k - 1) / 2;
    let sign = if exponent.rem_euclid(2) == 0 { rat_int(1) } else { rat_int(-1) };
    let mut fam = SymFormFamily::new(v.dims(), Side::Multivector, i64::from(bd.total()) - 2);
    fam.push_atom(SymFormAtom::Derived { gen: v.clone(), arity, sign })?;
    Ok(fam)
}

// ---------------------------------------------------------------------------
// Inverse maps (coefficient reconstruction)
// ---------------------------------------------------------------------------

fn gen_x(dims: Dims, i: u32) -> Superfunction {
    Superfunction::generator(dims, crate::superalgebra::GeneratorId::x(i)).expect("in range")
}

fn gen_theta(dims: Dims, a: u32) -> Superfunction {
    Superfunction::generator(dims, crate::superalgebra::GeneratorId::theta(a)).expect("in range")
}

#[cfg(test)]
fn gen_xi(dims: Dims, a: u32) -> Superfunction {
    Superfunction::generator(dims, crate::superalgebra::GeneratorId::xi(a)).expect("in range")
}

fn lmv(value: Superfunction) -> LElement {
    LElement::multivector(value).expect("multivector argument")
}

/// The coefficient polynomial (an x-polynomial times the sign of reordering)
/// of the given odd word inside `v`.
fn odd_coefficient(v: &Superfunction, odds: &[crate::superalgebra::GeneratorId]) -> Superfunction {
    let dims = v.dims();
    let mut out = Superfunction::zero(dims);
    for (m, c) in v.terms() {
        if m.odds() == odds {
            let mut word: Vec<crate::superalgebra::GeneratorId> = Vec::new();
            for &(g, e) in m.evens() {
                for _ in 0..e {
                    word.push(g);
                }
            }
            out = out
                .try_add(&Superfunction::from_factors(dims, &word, c.clone()).expect("in range"))
                .expect("same dims");
        }
    }
    out
}

/// Requires `v` to be a nonzero constant and returns it.
fn constant_of(v: &Superfunction, what: &str) -> Result<Rational, EngineError> {
    if v.num_terms() != 1 {
        return Err(EngineError::NotRepresentable(format!(
            "calibration value for {} is not a nonzero constant: {}",
            what, v
        )));
    }
    let (m, c) = v.terms().next().unwrap();
    if !m.is_one() {
        return Err(EngineError::NotRepresentable(format!(
            "calibration value for {} is not constant: {}",
            what, v
        )));
    }
    Ok(c.clone())
}

struct SlotSpec {
    /// The unit basis monomial of the structure function being recovered.
    basis: Superfunction,
    /// Arguments fed to the evaluator.
    args: Vec<LElement>,
    /// Odd word whose coefficient is read off the evaluation.
    read_odds: Vec<crate::superalgebra::GeneratorId>,
    arity: usize,
}

/// Reconstructs a structure function of total degree `total` from evaluator
/// values, calibrating the sign of every coefficient slot against the
/// forward map computed by the engine itself. `unit_family` builds the
/// forward family of a unit basis monomial.
fn reconstruct_from_slots(
    dims: Dims,
    eval: &dyn FormEvaluator,
    slots: Vec<SlotSpec>,
    unit_family: &dyn Fn(&Superfunction) -> Result<SymFormFamily, EngineError>,
) -> Result<Superfunction, EngineError> {
    let mut out = Superfunction::zero(dims);
    for slot in &slots {
        let fam = unit_family(&slot.basis)?;
        let unit_value = fam.eval(slot.arity, &slot.args)?;
        let s = constant_of(
            &odd_coefficient(unit_value.value(), &slot.read_odds),
            &format!("slot {}", slot.basis),
        )?;
        let observed = eval.eval(slot.arity, &slot.args)?;
        let coeff = odd_coefficient(observed.value(), &slot.read_odds);
        let contrib = coeff.scale(&(rat_int(1) / s)).try_mul(&slot.basis)?;
        out = out.try_add(&contrib)?;
    }
    Ok(out)
}

fn verification_args(dims: Dims) -> Vec<LElement> {
    let mut base: Vec<LElement> = Vec::new();
    for i in 1..=dims.n {
        base.push(lmv(gen_x(dims, i)));
    }
    for a in 1..=dims.d {
        base.push(lmv(gen_theta(dims, a)));
    }
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            base.push(lmv(gen_theta(dims, a).try_mul(&gen_theta(dims, b)).unwrap()));
        }
    }
    if dims.n >= 1 && dims.d >= 1 {
        base.push(lmv(gen_x(dims, 1).try_mul(&gen_theta(dims, 1)).unwrap()));
    }
    // A multi-term element catches evaluators that are not additive.
    if dims.d >= 2 {
        let sum = gen_theta(dims, 1)
            .try_add(&gen_theta(dims, 2))
            .expect("same dims");
        base.push(lmv(sum));
    }
    base
}

fn check_agreement(
    a: &dyn FormEvaluator,
    b: &dyn FormEvaluator,
    arities: &[usize],
    base: &[LElement],
) -> Result<(), EngineError> {
    for &arity in arities {
        let tuples = tuples::small_cartesian(base, arity, 600);
        for t in tuples {
            let va = a.eval(arity, &t)?;
            let vb = b.eval(arity, &t)?;
            if va != vb {
                return Err(EngineError::NotRepresentable(format!(
                    "evaluator disagrees with its reconstruction at arity {} (defect {})",
                    arity,
                    va.value() - vb.value()
                )));
            }
        }
    }
    Ok(())
}

/// Inverse of `map_m`: rebuilds the degree-3 structure function from bracket
/// evaluations on generators, then cross-checks the reconstruction against
/// the evaluator on a product-closed argument set.
pub fn map_m_inverse(
    dims: Dims,
    eval: &dyn FormEvaluator,
) -> Result<CourantStructure, EngineError> {
    use crate::superalgebra::GeneratorId;

    // psi := l_0.
    let psi_el = eval.eval(0, &[])?;
    let psi = psi_el.value().clone();
    if !psi.is_zero() && psi.homogeneous_bidegree() != Some(Bidegree::new(3, 0)) {
        return Err(EngineError::NotRepresentable(format!(
            "arity-0 value is not a 3-vector: {}",
            psi
        )));
    }

    let m_unit = |basis: &Superfunction| -> Result<SymFormFamily, EngineError> {
        Ok(map_m(&CourantStructure::decompose(basis.clone())?))
    };

    // gamma from l_1 on x_i (p-theta slots) and th^c (theta-theta-xi slots).
    let mut slots: Vec<SlotSpec> = Vec::new();
    for i in 1..=dims.n {
        for a in 1..=dims.d {
            let basis = Superfunction::from_factors(
                dims,
                &[GeneratorId::p(i), GeneratorId::theta(a)],
                rat_int(1),
            )
            .expect("in range");
            slots.push(SlotSpec {
                basis,
                args: vec![lmv(gen_x(dims, i))],
                read_odds: vec![GeneratorId::theta(a)],
                arity: 1,
            });
        }
    }
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            for c in 1..=dims.d {
                let basis = Superfunction::from_factors(
                    dims,
                    &[GeneratorId::theta(a), GeneratorId::theta(b), GeneratorId::xi(c)],
                    rat_int(1),
                )
                .expect("in range");
                slots.push(SlotSpec {
                    basis,
                    args: vec![lmv(gen_theta(dims, c))],
                    read_odds: vec![GeneratorId::theta(a), GeneratorId::theta(b)],
                    arity: 1,
                });
            }
        }
    }
    let gamma = reconstruct_from_slots(dims, eval, slots, &m_unit)?;

    // mu from l_2 on (x_i, th^a) and (th^a, th^b).
    let mut slots: Vec<SlotSpec> = Vec::new();
    for i in 1..=dims.n {
        for a in 1..=dims.d {
            let basis = Superfunction::from_factors(
                dims,
                &[GeneratorId::p(i), GeneratorId::xi(a)],
                rat_int(1),
            )
            .expect("in range");
            slots.push(SlotSpec {
                basis,
                args: vec![lmv(gen_x(dims, i)), lmv(gen_theta(dims, a))],
                read_odds: vec![],
                arity: 2,
            });
        }
    }
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            for c in 1..=dims.d {
                let basis = Superfunction::from_factors(
                    dims,
                    &[GeneratorId::xi(a), GeneratorId::xi(b), GeneratorId::theta(c)],
                    rat_int(1),
                )
                .expect("in range");
                slots.push(SlotSpec {
                    basis,
                    args: vec![lmv(gen_theta(dims, a)), lmv(gen_theta(dims, b))],
                    read_odds: vec![GeneratorId::theta(c)],
                    arity: 2,
                });
            }
        }
    }
    let mu = reconstruct_from_slots(dims, eval, slots, &m_unit)?;

    // phi from l_3 on theta triples.
    let mut slots: Vec<SlotSpec> = Vec::new();
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            for c in (b + 1)..=dims.d {
                let basis = Superfunction::from_factors(
                    dims,
                    &[GeneratorId::xi(a), GeneratorId::xi(b), GeneratorId::xi(c)],
                    rat_int(1),
                )
                .expect("in range");
                slots.push(SlotSpec {
                    basis,
                    args: vec![
                        lmv(gen_theta(dims, a)),
                        lmv(gen_theta(dims, b)),
                        lmv(gen_theta(dims, c)),
                    ],
                    read_odds: vec![],
                    arity: 3,
                });
            }
        }
    }
    let phi = reconstruct_from_slots(dims, eval, slots, &m_unit)?;

    let theta = &(&(&psi + &gamma) + &mu) + &phi;
    let cs = CourantStructure::decompose(theta)?;

    // Multiderivation cross-check on a product-closed argument set.
    let fam = map_m(&cs);
    check_agreement(eval, &fam, &[0, 1, 2, 3], &verification_args(dims))?;
    Ok(cs)
}

/// Inverse of `map_upsilon`. The evaluator must be function-multilinear:
/// inserting a degree minus-two element gives zero.
pub fn map_upsilon_inverse(
    dims: Dims,
    eval: &dyn FormEvaluator,
) -> Result<SkewEndo, EngineError> {
    use crate::superalgebra::GeneratorId;

    // C-infinity multilinearity: evaluations on function slots must vanish.
    for i in 1..=dims.n {
        let v1 = eval.eval(1, &[lmv(gen_x(dims, i))])?;
        if !v1.is_zero() {
            return Err(EngineError::NotRepresentable(
                "arity-1 evaluator is not function-multilinear".into(),
            ));
        }
        for a in 1..=dims.d {
            let v2 = eval.eval(2, &[lmv(gen_x(dims, i)), lmv(gen_theta(dims, a))])?;
            if !v2.is_zero() {
                return Err(EngineError::NotRepresentable(
                    "arity-2 evaluator is not function-multilinear".into(),
                ));
            }
        }
    }

    let pi = -&eval.eval(0, &[])?.value().clone();
    if !pi.is_zero() && pi.homogeneous_bidegree() != Some(Bidegree::new(2, 0)) {
        return Err(EngineError::NotRepresentable(format!(
            "arity-0 value is not a bivector: {}",
            pi
        )));
    }

    let u_unit = |basis: &Superfunction| -> Result<SymFormFamily, EngineError> {
        let bd = basis
            .homogeneous_bidegree()
            .ok_or(EngineError::NotHomogeneous { what: "unit block" })?;
        let endo = match (bd.k, bd.l) {
            (1, 1) => SkewEndo::n_only(basis.clone())?,
            (0, 2) => SkewEndo::omega_only(basis.clone())?,
            _ => return Err(EngineError::NotRepresentable("unit block slot".into())),
        };
        Ok(map_upsilon(&endo))
    };

    // N from j_1 on th^c.
    let mut slots: Vec<SlotSpec> = Vec::new();
    for c in 1..=dims.d {
        for a in 1..=dims.d {
            let basis = Superfunction::from_factors(
                dims,
                &[GeneratorId::theta(a), GeneratorId::xi(c)],
                rat_int(1),
            )
            .expect("in range");
            slots.push(SlotSpec {
                basis,
                args: vec![lmv(gen_theta(dims, c))],
                read_odds: vec![GeneratorId::theta(a)],
                arity: 1,
            });
        }
    }
    let nn = reconstruct_from_slots(dims, eval, slots, &u_unit)?;

    // omega from j_2 on theta pairs.
    let mut slots: Vec<SlotSpec> = Vec::new();
    for a in 1..=dims.d {
        for b in (a + 1)..=dims.d {
            let basis = Superfunction::from_factors(
                dims,
                &[GeneratorId::xi(a), GeneratorId::xi(b)],
                rat_int(1),
            )
            .expect("in range");
            slots.push(SlotSpec {
                basis,
                args: vec![lmv(gen_theta(dims, a)), lmv(gen_theta(dims, b))],
                read_odds: vec![],
                arity: 2,
            });
        }
    }
    let omega = reconstruct_from_slots(dims, eval, slots, &u_unit)?;

    let endo = SkewEndo::from_parts(pi, nn, omega)?;
    let fam = map_upsilon(&endo);
    check_agreement(eval, &fam, &[0, 1, 2], &verification_args(dims))?;
    Ok(endo)
}

// ---------------------------------------------------------------------------
// Maurer-Cartan and twisting
// ---------------------------------------------------------------------------

fn check_bivector(pi: &LElement) -> Result<(), EngineError> {
    if pi.side() != Side::Multivector {
        return Err(EngineError::NotHomogeneous { what: "twisting element side" });
    }
    if !pi.is_zero() && pi.shifted_degree() != Some(0) {
        return Err(EngineError::NotRepresentable(
            "twisting element must have shifted degree zero".into(),
        ));
    }
    Ok(())
}

/// Maurer-Cartan defect l_0 - l_1(pi) + 1/2 l_2(pi,pi) - 1/6 l_3(pi,pi,pi).
pub fn maurer_cartan_defect(
    l: &SymFormFamily,
    pi: &LElement,
) -> Result<Superfunction, EngineError> {
    check_bivector(pi)?;
    twisted_arity0(l, pi)
}

fn twisted_arity0(l: &dyn FormEvaluator, pi: &LElement) -> Result<Superfunction, EngineError> {
    let dims = l.dims();
    let mut acc = Superfunction::zero(dims);
    let coeffs = [rat_int(1), rat_int(-1), rat(1, 2), rat(-1, 6)];
    for (arity, coeff) in coeffs.iter().enumerate() {
        if !l.arities().contains(&arity) {
            continue;
        }
        let args = vec![pi.clone(); arity];
        let v = l.eval(arity, &args)?;
        acc = acc.try_add(&v.value().scale(coeff))?;
    }
    Ok(acc)
}

/// Pointwise twisting of an arbitrary evaluator with arities <= 3: the four
/// evaluation rules
///   (e l)_0 = l_0 - l_1(pi) + 1/2 l_2(pi,pi) - 1/6 l_3(pi,pi,pi)
///   (e l)_1 = l_1 - l_2(pi,.) + 1/2 l_3(pi,pi,.)
///   (e l)_2 = l_2 - l_3(pi,.,.)
///   (e l)_3 = l_3
pub struct TwistedEvaluator {
    inner: DynForm,
    pi: LElement,
}

impl TwistedEvaluator {
    pub fn new(inner: DynForm, pi: LElement) -> Result<TwistedEvaluator, EngineError> {
        check_bivector(&pi)?;
        if inner.arities().into_iter().any(|a| a > 3) {
            return Err(EngineError::Unsupported(
                "twisting is implemented for arities up to 3".into(),
            ));
        }
        Ok(TwistedEvaluator { inner, pi })
    }
}

impl FormEvaluator for TwistedEvaluator {
    fn dims(&self) -> Dims {
        self.inner.dims()
    }

    fn side(&self) -> Side {
        self.inner.side()
    }

    fn degree(&self) -> i64 {
        self.inner.degree()
    }

    fn arities(&self) -> Vec<usize> {
        vec![0, 1, 2, 3]
    }

    fn eval(&self, arity: usize, args: &[LElement]) -> Result<LElement, EngineError> {
        let dims = self.dims();
        let has = |a: usize| self.inner.arities().contains(&a);
        let mut acc = Superfunction::zero(dims);
        // Contributions from l_{arity + m} with m copies of pi inserted and
        // coefficient (-1)^m / m!.
        let coeffs = [rat_int(1), rat_int(-1), rat(1, 2), rat(-1, 6)];
        for (m, coeff) in coeffs.iter().enumerate().take(4 - arity.min(3)) {
            let target = arity + m;
            if target > 3 || !has(target) {
                continue;
            }
            let mut full_args = vec![self.pi.clone(); m];
            full_args.extend_from_slice(args);
            let v = self.inner.eval(target, &full_args)?;
            acc = acc.try_add(&v.value().scale(coeff))?;
        }
        LElement::new(self.side(), acc)
    }
}

/// Symbolic twisting of an atom family by a bivector: closes over derived
/// atoms by partially applying higher-arity atoms to pi.
pub fn twist_linf(l: &SymFormFamily, pi: &LElement) -> Result<SymFormFamily, EngineError> {
    check_bivector(pi)?;
    if l.arities().into_iter().any(|a| a > 3) {
        return Err(EngineError::Unsupported(
            "twisting is implemented for arities up to 3".into(),
        ));
    }
    let dims = l.dims();
    let mut out = SymFormFamily::new(dims, l.side(), l.declared_degree());

    // Arity 0: the evaluated alternating sum, stored as a constant atom.
    let v0 = twisted_arity0(l, pi)?;
    if !v0.is_zero() {
        out.push_atom(SymFormAtom::Derived { gen: v0, arity: 0, sign: rat_int(1) })?;
    }

    // Arities 1 and 2: original atoms plus partial applications to pi.
    for arity in 1..=3usize {
        for atom in l.atoms_at(arity) {
            out.push_atom(atom.clone())?;
        }
        let partial_coeffs: &[(usize, Rational)] = match arity {
            1 => &[(2, rat_int(-1)), (3, rat(1, 2))],
            2 => &[(3, rat_int(-1))],
            _ => &[],
        };
        for (source, coeff) in partial_coeffs {
            for atom in l.atoms_at(*source) {
                match atom {
                    SymFormAtom::Derived { gen, sign, .. } => {
                        let copies = source - arity;
                        let mut partial = gen.clone();
                        for _ in 0..copies {
                            partial = try_bracket(&partial, pi.value())?;
                        }
                        if !partial.is_zero() {
                            out.push_atom(SymFormAtom::Derived {
                                gen: partial,
                                arity,
                                sign: sign * coeff,
                            })?;
                        }
                    }
                    SymFormAtom::Euler { .. } => {
                        return Err(EngineError::Unsupported(
                            "cannot partially apply an Euler atom".into(),
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    #[test]
    fn l_element_sides_and_degrees() {
        let dims = Dims::new(2, 3);
        let f = gen_x(dims, 1);
        let el = LElement::multivector(f.clone()).unwrap();
        assert_eq!(el.shifted_degree(), Some(-2));
        let th = gen_theta(dims, 1);
        assert_eq!(LElement::multivector(th.clone()).unwrap().shifted_degree(), Some(-1));
        let pi = testkit::wedge_thetas(dims, &[1, 2]);
        assert_eq!(LElement::multivector(pi).unwrap().shifted_degree(), Some(0));
        // xi lives on the form side only.
        assert!(LElement::multivector(gen_xi(dims, 1)).is_err());
        assert!(LElement::form(gen_xi(dims, 1)).is_ok());
        // Mixed element: pieces but no homogeneous degree.
        let mixed = LElement::multivector(&f + &th).unwrap();
        assert_eq!(mixed.shifted_degree(), None);
        assert_eq!(mixed.shifted_pieces().len(), 2);
    }

    #[test]
    fn euler_atom_uses_shifted_degree() {
        let dims = Dims::new(2, 3);
        let atom = SymFormAtom::Euler { scale: rat_int(1) };
        let f = lmv(gen_x(dims, 1));
        assert_eq!(
            atom.eval(Side::Multivector, std::slice::from_ref(&f)).unwrap().value(),
            &gen_x(dims, 1).scale(&rat_int(-2))
        );
        let pi = lmv(testkit::wedge_thetas(dims, &[1, 2]));
        assert!(atom.eval(Side::Multivector, &[pi]).unwrap().is_zero());
        let triv = lmv(testkit::wedge_thetas(dims, &[1, 2, 3]));
        assert_eq!(
            atom.eval(Side::Multivector, std::slice::from_ref(&triv)).unwrap().value(),
            triv.value()
        );
    }

    #[test]
    fn map_m_l2_is_the_anchor_on_tm() {
        let cs = testkit::mu_tm(1);
        let dims = cs.dims();
        let fam = map_m(&cs);
        let v = fam
            .eval(2, &[lmv(gen_theta(dims, 1)), lmv(gen_x(dims, 1))])
            .unwrap();
        assert_eq!(v.value(), &Superfunction::one(dims));
    }

    #[test]
    fn map_m_psi_only_is_curvature() {
        let cs = testkit::curved_psi_only();
        let fam = map_m(&cs);
        assert_eq!(fam.arities(), vec![0]);
        assert_eq!(fam.eval(0, &[]).unwrap().value(), cs.psi());
    }

    #[test]
    fn map_m_round_trip_concrete() {
        for cs in [
            testkit::mu_tm(2),
            testkit::solvable_mu2(),
            testkit::full_proto(),
            testkit::mu_tm_plus_nonclosed_phi(),
        ] {
            let fam = map_m(&cs);
            let back = map_m_inverse(cs.dims(), &fam).unwrap();
            assert_eq!(back.theta(), cs.theta());
        }
    }

    #[test]
    fn map_m_inverse_zero() {
        let dims = Dims::new(2, 2);
        let fam = SymFormFamily::new(dims, Side::Multivector, 1);
        let back = map_m_inverse(dims, &fam).unwrap();
        assert!(back.theta().is_zero());
    }

    #[test]
    fn upsilon_round_trip() {
        let dims = Dims::new(2, 2);
        for endo in [
            SkewEndo::zero(dims),
            testkit::n_swap(dims),
            SkewEndo::pi_only(testkit::wedge_thetas(dims, &[1, 2])).unwrap(),
            testkit::pi_omega_pair(dims, rat_int(2)),
        ] {
            let fam = map_upsilon(&endo);
            let back = map_upsilon_inverse(dims, &fam).unwrap();
            assert_eq!(back.function(), endo.function());
        }
    }

    #[test]
    fn upsilon_j1_is_the_negated_n_bracket() {
        let dims = Dims::new(0, 2);
        let endo = testkit::n_swap(dims);
        let fam = map_upsilon(&endo);
        let v = fam.eval(1, &[lmv(gen_theta(dims, 1))]).unwrap();
        // N(e1) = e2 for the swap.
        assert_eq!(v.value(), &gen_theta(dims, 2));
    }

    #[test]
    fn upsilon_j2_on_unit_two_form() {
        let dims = Dims::new(0, 2);
        let omega = testkit::wedge_xis(dims, &[1, 2]);
        let endo = SkewEndo::omega_only(omega).unwrap();
        let fam = map_upsilon(&endo);
        let v = fam
            .eval(2, &[lmv(gen_theta(dims, 1)), lmv(gen_theta(dims, 2))])
            .unwrap();
        let one = Superfunction::one(dims);
        assert!(v.value() == &one || v.value() == &-&one);
        // Freeze the convention: omega(e1, e2) evaluates to +1.
        assert_eq!(v.value(), &one);
    }

    #[test]
    fn extend_tensor_matches_upsilon_blocks() {
        let dims = Dims::new(2, 2);
        let endo = testkit::n_swap(dims);
        let ext = extend_tensor(endo.nn(), 1).unwrap();
        let ups = map_upsilon(&SkewEndo::n_only(endo.nn().clone()).unwrap());
        // (-1)^{k l - k(k-1)/2} = -1 for k = l = 1: the extension equals j_1.
        let args = [lmv(gen_theta(dims, 1))];
        assert_eq!(
            ext.eval(1, &args).unwrap(),
            ups.eval(1, &args).unwrap()
        );

        let omega = testkit::wedge_xis(dims, &[1, 2]);
        let ext2 = extend_tensor(&omega, 2).unwrap();
        let ups2 = map_upsilon(&SkewEndo::omega_only(omega).unwrap());
        let args2 = [lmv(gen_theta(dims, 1)), lmv(gen_theta(dims, 2))];
        assert_eq!(ext2.eval(2, &args2).unwrap(), ups2.eval(2, &args2).unwrap());
    }

    #[test]
    fn extend_tensor_of_phi_negates_l3() {
        let dims = Dims::new(0, 3);
        let phi = testkit::wedge_xis(dims, &[1, 2, 3]);
        let cs = CourantStructure::decompose(phi.clone()).unwrap();
        let l = map_m(&cs);
        let ext = extend_tensor(&phi, 3).unwrap();
        let args = [
            lmv(gen_theta(dims, 1)),
            lmv(gen_theta(dims, 2)),
            lmv(gen_theta(dims, 3)),
        ];
        let via_l3 = l.eval(3, &args).unwrap();
        let via_ext = ext.eval(3, &args).unwrap();
        assert_eq!(via_ext.value(), &-&via_l3.value().clone());
    }

    #[test]
    fn dual_lambda_is_de_rham_on_tm() {
        let cs = testkit::mu_tm(1);
        let dims = cs.dims();
        let lam = dual_lambda(&cs);
        let v = lam
            .eval(1, &[LElement::form(gen_x(dims, 1)).unwrap()])
            .unwrap();
        assert_eq!(v.value(), &gen_xi(dims, 1));
    }

    #[test]
    fn dual_lambda_psi_only_feeds_lambda3() {
        let cs = testkit::curved_psi_only();
        let lam = dual_lambda(&cs);
        assert_eq!(lam.arities(), vec![3]);
    }

    #[test]
    fn maurer_cartan_trivial_and_curvature_cases() {
        let dims = Dims::new(2, 2);
        let zero_pi = LElement::zero(dims, Side::Multivector);
        let empty = SymFormFamily::new(dims, Side::Multivector, 1);
        assert!(maurer_cartan_defect(&empty, &zero_pi).unwrap().is_zero());

        let cs = testkit::curved_psi_only();
        let fam = map_m(&cs);
        let pi0 = LElement::zero(cs.dims(), Side::Multivector);
        assert_eq!(&maurer_cartan_defect(&fam, &pi0).unwrap(), cs.psi());
    }

    #[test]
    fn maurer_cartan_bivector_on_r2() {
        // Every bivector on R^2 is Poisson: MC defect of M(mu_TM) vanishes.
        let cs = testkit::mu_tm(2);
        let dims = cs.dims();
        let pi = lmv(
            gen_x(dims, 1)
                .try_mul(&testkit::wedge_thetas(dims, &[1, 2]))
                .unwrap(),
        );
        let fam = map_m(&cs);
        assert!(maurer_cartan_defect(&fam, &pi).unwrap().is_zero());
    }

    #[test]
    fn twist_linf_by_zero_is_identity_on_evals() {
        let cs = testkit::full_proto();
        let dims = cs.dims();
        let fam = map_m(&cs);
        let zero_pi = LElement::zero(dims, Side::Multivector);
        let twisted = twist_linf(&fam, &zero_pi).unwrap();
        let args = verification_args(dims);
        for arity in 0..=3usize {
            for t in tuples::small_cartesian(&args, arity, 100) {
                assert_eq!(
                    fam.eval(arity, &t).unwrap(),
                    twisted.eval(arity, &t).unwrap()
                );
            }
        }
    }

    #[test]
    fn twist_linf_keeps_l3_and_shifts_l2() {
        let cs = testkit::full_proto();
        let dims = cs.dims();
        let fam = map_m(&cs);
        let pi = lmv(testkit::wedge_thetas(dims, &[1, 2]));
        let twisted = twist_linf(&fam, &pi).unwrap();

        // (e l)_3 = l_3.
        assert_eq!(twisted.merged_gen(3), fam.merged_gen(3));

        // (e l)_2(P,Q) = l_2(P,Q) - l_3(pi,P,Q).
        let p = lmv(gen_theta(dims, 1));
        let q = lmv(gen_theta(dims, 2));
        let lhs = twisted.eval(2, &[p.clone(), q.clone()]).unwrap();
        let direct = fam.eval(2, &[p.clone(), q.clone()]).unwrap();
        let l3pi = fam.eval(3, &[pi.clone(), p, q]).unwrap();
        assert_eq!(lhs.value(), &(direct.value() - l3pi.value()));
    }
}
