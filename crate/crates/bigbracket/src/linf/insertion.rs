//! Insertion operator, Richardson-Nijenhuis bracket, generalized Jacobi
//! checking and Nijenhuis-form verification on symmetric vector-valued
//! forms.

use std::sync::Arc;

use crate::courant::ComponentEq;
use crate::error::EngineError;
use crate::exec;
use crate::linf::tuples::{tuples_for_arity, TupleConfig};
use crate::linf::{DynForm, FormEvaluator, LElement, Side, SymFormFamily};
use crate::superalgebra::{Dims, Rational, Superfunction};

/// Sorted k-subsets of {0,..,n-1}: the unshuffle selectors Sh(k, n-k).
pub fn unshuffle_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // Advance the combination.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in (i + 1)..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Koszul sign of reordering X_1..X_n into (X_sel.., X_rest..): a minus sign
/// for every inversion between two odd-parity arguments.
fn koszul_sign(sel: &[usize], rest: &[usize], parities: &[bool]) -> i64 {
    let mut inversions = 0usize;
    for &s in sel {
        if !parities[s] {
            continue;
        }
        inversions += rest.iter().filter(|&&r| r < s && parities[r]).count();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Expands the arguments into shifted-homogeneous combinations; each entry is
/// (parities, homogeneous args).
fn homogeneous_combinations(args: &[LElement]) -> Vec<(Vec<bool>, Vec<LElement>)> {
    let mut combos: Vec<(Vec<bool>, Vec<LElement>)> = vec![(Vec::new(), Vec::new())];
    for arg in args {
        let pieces = arg.shifted_pieces();
        let mut next = Vec::with_capacity(combos.len() * pieces.len().max(1));
        for (p, piece) in &pieces {
            for (pars, items) in &combos {
                let mut pars = pars.clone();
                pars.push(p.rem_euclid(2) == 1);
                let mut items = items.clone();
                items.push(piece.clone());
                next.push((pars, items));
            }
        }
        combos = next;
    }
    combos
}

/// Insertion ι_K H of a k-form into an h-form, evaluated on k+h-1 arguments:
/// the unshuffle sum over H(K(X_sel), X_rest) with Koszul signs. Inserting
/// into an arity-0 form gives zero.
pub fn insert_eval(
    k_form: &dyn FormEvaluator,
    k_arity: usize,
    h_form: &dyn FormEvaluator,
    h_arity: usize,
    args: &[LElement],
) -> Result<LElement, EngineError> {
    let dims = h_form.dims();
    let side = h_form.side();
    if h_arity == 0 {
        return Ok(LElement::zero(dims, side));
    }
    let n = k_arity + h_arity - 1;
    if args.len() != n {
        return Err(EngineError::Unsupported(format!(
            "insertion of a {}-form into a {}-form takes {} arguments, got {}",
            k_arity,
            h_arity,
            n,
            args.len()
        )));
    }
    let mut acc = Superfunction::zero(dims);
    for (parities, items) in homogeneous_combinations(args) {
        for sel in unshuffle_indices(n, k_arity) {
            let rest: Vec<usize> = (0..n).filter(|i| !sel.contains(i)).collect();
            let sign = koszul_sign(&sel, &rest, &parities);
            let k_args: Vec<LElement> = sel.iter().map(|&i| items[i].clone()).collect();
            let inserted = k_form.eval(k_arity, &k_args)?;
            let mut h_args = Vec::with_capacity(h_arity);
            h_args.push(inserted);
            h_args.extend(rest.iter().map(|&i| items[i].clone()));
            let v = h_form.eval(h_arity, &h_args)?;
            acc = acc.try_add(&v.value().scale(&Rational::from_integer(sign.into())))?;
        }
    }
    LElement::new(side, acc)
}

/// The Richardson-Nijenhuis bracket `[K,H] = i_K H - (-1)^{KH} i_H K` as a
/// pointwise evaluator, with a symbolic family attached for the closed
/// cases (Euler multiples against anything, deformation families against
/// bracket families).
#[derive(Clone)]
pub struct RnBracket {
    left: DynForm,
    right: DynForm,
    degree: i64,
    dims: Dims,
    side: Side,
    pub symbolic: Option<SymFormFamily>,
}

impl RnBracket {
    pub fn left(&self) -> &DynForm {
        &self.left
    }

    pub fn right(&self) -> &DynForm {
        &self.right
    }
}

fn symbolic_rn(left: &SymFormFamily, right: &SymFormFamily) -> Option<SymFormFamily> {
    // Euler multiples: [sE, H] = -s deg(H) H and [K, sE] = s deg(K) K.
    if let Some(s) = left.euler_scale() {
        let factor = -&s * Rational::from_integer(right.declared_degree().into());
        return Some(right.scaled(&factor));
    }
    if let Some(s) = right.euler_scale() {
        let factor = s * Rational::from_integer(left.declared_degree().into());
        return Some(left.scaled(&factor));
    }
    // Deformation against bracket family: [Upsilon(J), M(Theta)] = M(Theta_J).
    if let (Some(endo), Some(cs)) = (left.as_upsilon_shape(), right.as_m_shape()) {
        let deformed = cs.deform(&endo).ok()?;
        return Some(crate::linf::map_m(&deformed));
    }
    if let (Some(cs), Some(endo)) = (left.as_m_shape(), right.as_upsilon_shape()) {
        let deformed = cs.deform(&endo).ok()?;
        return Some(crate::linf::map_m(&deformed).scaled(&Rational::from_integer((-1).into())));
    }
    None
}

/// RN bracket of two symbolic families.
pub fn rn_bracket(left: &SymFormFamily, right: &SymFormFamily) -> RnBracket {
    let symbolic = symbolic_rn(left, right);
    RnBracket {
        degree: left.declared_degree() + right.declared_degree(),
        dims: left.dims(),
        side: left.side(),
        left: Arc::new(left.clone()),
        right: Arc::new(right.clone()),
        symbolic,
    }
}

/// RN bracket of arbitrary evaluators (pointwise only).
pub fn rn_bracket_dyn(left: DynForm, right: DynForm) -> RnBracket {
    RnBracket {
        degree: left.degree() + right.degree(),
        dims: left.dims(),
        side: left.side(),
        left,
        right,
        symbolic: None,
    }
}

impl FormEvaluator for RnBracket {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn side(&self) -> Side {
        self.side
    }

    fn degree(&self) -> i64 {
        self.degree
    }

    fn arities(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for ka in self.left.arities() {
            for ha in self.right.arities() {
                if ka + ha >= 1 {
                    out.push(ka + ha - 1);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn eval(&self, arity: usize, args: &[LElement]) -> Result<LElement, EngineError> {
        let mut acc = Superfunction::zero(self.dims);
        let flip_sign = if (self.left.degree() * self.right.degree()).rem_euclid(2) == 1 {
            Rational::from_integer((-1).into())
        } else {
            Rational::from_integer(1.into())
        };
        for ka in self.left.arities() {
            if arity + 1 < ka {
                continue;
            }
            let ha = arity + 1 - ka;
            if self.right.arities().contains(&ha) {
                let v = insert_eval(self.left.as_ref(), ka, self.right.as_ref(), ha, args)?;
                acc = acc.try_add(v.value())?;
            }
        }
        for ha in self.right.arities() {
            if arity + 1 < ha {
                continue;
            }
            let ka = arity + 1 - ha;
            if self.left.arities().contains(&ka) {
                let v = insert_eval(self.right.as_ref(), ha, self.left.as_ref(), ka, args)?;
                acc = acc.try_sub(&v.value().scale(&flip_sign))?;
            }
        }
        LElement::new(self.side, acc)
    }
}

// ---------------------------------------------------------------------------
// Pointwise comparison utilities
// ---------------------------------------------------------------------------

/// How an equality between two forms was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqualityEvidence {
    /// Reduced to exact equality of structure functions.
    Symbolic,
    /// Verified on the finite default tuple set only.
    OnTuples,
}

/// A failing tuple with its defect.
#[derive(Debug, Clone)]
pub struct TupleDefect {
    pub arity: usize,
    pub tuple_index: usize,
    pub tuple: String,
    pub defect: Superfunction,
}

fn describe_tuple(t: &[LElement]) -> String {
    let parts: Vec<String> = t.iter().map(|e| e.value().to_string()).collect();
    format!("({})", parts.join("; "))
}

/// Compares two evaluators on the default tuple sets of every listed arity;
/// returns the failures.
pub fn compare_on_tuples(
    a: &dyn FormEvaluator,
    b: Option<&dyn FormEvaluator>,
    arities: &[usize],
    cfg: &TupleConfig,
) -> Result<Vec<TupleDefect>, EngineError> {
    let dims = a.dims();
    let side = a.side();
    let mut failures = Vec::new();
    for &arity in arities {
        let tuples = tuples_for_arity(dims, side, arity, cfg);
        let results = exec::map(cfg.mode, &tuples, |t| -> Result<Superfunction, EngineError> {
            let va = a.eval(arity, t)?;
            let defect = match b {
                Some(b) => va.value() - b.eval(arity, t)?.value(),
                None => va.value().clone(),
            };
            Ok(defect)
        });
        for (idx, r) in results.into_iter().enumerate() {
            let defect = r?;
            if !defect.is_zero() {
                // Keep only the first few defects; the verdict is what
                // matters and full descriptions get large.
                if failures.len() < 8 {
                    failures.push(TupleDefect {
                        arity,
                        tuple_index: idx,
                        tuple: describe_tuple(&tuples[idx]),
                        defect,
                    });
                }
            }
        }
    }
    Ok(failures)
}

/// Decides equality of two families: symbolically when both reduce to
/// recognized shapes, otherwise on the default tuple set.
pub fn families_equal(
    a: &SymFormFamily,
    b: &SymFormFamily,
    cfg: &TupleConfig,
) -> Result<(bool, EqualityEvidence), EngineError> {
    if let (Some(ca), Some(cb)) = (a.as_m_shape(), b.as_m_shape()) {
        return Ok((ca.theta() == cb.theta(), EqualityEvidence::Symbolic));
    }
    if let (Some(ja), Some(jb)) = (a.as_upsilon_shape(), b.as_upsilon_shape()) {
        return Ok((ja.function() == jb.function(), EqualityEvidence::Symbolic));
    }
    if let (Some(sa), Some(sb)) = (a.euler_scale(), b.euler_scale()) {
        return Ok((sa == sb, EqualityEvidence::Symbolic));
    }
    let mut arities = a.arities();
    arities.extend(b.arities());
    arities.sort_unstable();
    arities.dedup();
    let failures = compare_on_tuples(a, Some(b), &arities, cfg)?;
    Ok((failures.is_empty(), EqualityEvidence::OnTuples))
}

// ---------------------------------------------------------------------------
// Generalized Jacobi
// ---------------------------------------------------------------------------

/// Outcome of the symbolic criterion for bracket families.
#[derive(Debug, Clone)]
pub struct SymbolicJacobi {
    /// The component equation deciding this n; `None` for the vacuous n = 5.
    pub component: Option<ComponentEq>,
    pub defect: Superfunction,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct JacobiCheck {
    pub n: usize,
    pub symbolic: Option<SymbolicJacobi>,
    pub tuple_count: usize,
    pub failures: Vec<TupleDefect>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct JacobiReport {
    pub per_n: Vec<JacobiCheck>,
    pub passed: bool,
    /// False when the symbolic criterion passes an n whose pointwise sweep
    /// found a defect: that would be an engine inconsistency.
    pub consistent: bool,
}

/// Evaluates the generalized Jacobi identity of a degree-1 family for each
/// n <= n_max on the default tuple set; for recognized bracket families the
/// decidable component criterion is run as well.
pub fn gen_jacobi_check(
    l: &SymFormFamily,
    n_max: usize,
    cfg: &TupleConfig,
) -> Result<JacobiReport, EngineError> {
    if l.declared_degree() != 1 {
        return Err(EngineError::Precondition(
            "generalized Jacobi applies to degree-1 families".into(),
        ));
    }
    if n_max > 5 {
        return Err(EngineError::Unsupported(
            "arities are capped at 3, so Jacobi identities stop at n = 5".into(),
        ));
    }
    let dims = l.dims();
    let side = l.side();
    let m_shape = l.as_m_shape();
    let integ = m_shape.as_ref().map(|cs| cs.integrability());

    let mut per_n = Vec::new();
    let mut passed = true;
    let mut consistent = true;
    for n in 0..=n_max {
        // Symbolic criterion for bracket families: the n-th identity is the
        // (n+1)-st component equation; n = 5 holds vacuously.
        let symbolic = integ.as_ref().map(|report| {
            if n < 5 {
                let (component, defect) = report.components[n].clone();
                SymbolicJacobi { component: Some(component), passed: defect.is_zero(), defect }
            } else {
                SymbolicJacobi {
                    component: None,
                    defect: Superfunction::zero(dims),
                    passed: true,
                }
            }
        });

        // Pointwise unshuffle sums on the default tuples.
        let tuples = tuples_for_arity(dims, side, n, cfg);
        let results = exec::map(cfg.mode, &tuples, |t| -> Result<Superfunction, EngineError> {
            let mut acc = Superfunction::zero(dims);
            for i in l.arities() {
                if n + 1 < i {
                    continue;
                }
                let j = n + 1 - i;
                if j == 0 || !l.arities().contains(&j) {
                    continue;
                }
                let v = insert_eval(l, i, l, j, t)?;
                acc = acc.try_add(v.value())?;
            }
            Ok(acc)
        });
        let mut failures = Vec::new();
        for (idx, r) in results.into_iter().enumerate() {
            let defect = r?;
            if !defect.is_zero() && failures.len() < 8 {
                failures.push(TupleDefect {
                    arity: n,
                    tuple_index: idx,
                    tuple: describe_tuple(&tuples[idx]),
                    defect,
                });
            }
        }

        let pointwise_pass = failures.is_empty();
        let n_pass = match &symbolic {
            Some(s) => s.passed,
            None => pointwise_pass,
        };
        if let Some(s) = &symbolic {
            if s.passed && !pointwise_pass {
                consistent = false;
            }
        }
        passed &= n_pass;
        per_n.push(JacobiCheck {
            n,
            symbolic,
            tuple_count: tuples.len(),
            failures,
            passed: n_pass,
        });
    }
    Ok(JacobiReport { per_n, passed, consistent })
}

// ---------------------------------------------------------------------------
// Nijenhuis forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NijenhuisFormReport {
    pub holds: bool,
    /// Failures of `[n,[n,l]] = [k,l]` on the tuple set.
    pub deformation_failures: Vec<TupleDefect>,
    /// Failures of `[n,k] = 0` on the tuple set.
    pub square_failures: Vec<TupleDefect>,
    /// Symbolic verdict, when both sides reduced to structure functions.
    pub symbolic: Option<bool>,
}

/// Checks the two identities defining a Nijenhuis form of square k on l:
/// `[n,[n,l]] = [k,l]` and `[n,k] = 0`. Each identity is decided
/// symbolically when the operands reduce to recognized shapes and verified
/// pointwise on the default tuple set in every case.
pub fn nijenhuis_form_check(
    n_form: &SymFormFamily,
    l: &SymFormFamily,
    k_form: &SymFormFamily,
    cfg: &TupleConfig,
) -> Result<NijenhuisFormReport, EngineError> {
    if n_form.declared_degree() != 0 || k_form.declared_degree() != 0 {
        return Err(EngineError::Precondition(
            "a Nijenhuis form and its square have degree 0".into(),
        ));
    }
    if l.declared_degree() != 1 {
        return Err(EngineError::Precondition("the bracket family has degree 1".into()));
    }

    let inner = rn_bracket(n_form, l);
    let outer: RnBracket = match &inner.symbolic {
        Some(sym) => rn_bracket(n_form, sym),
        None => rn_bracket_dyn(Arc::new(n_form.clone()), Arc::new(inner.clone())),
    };
    let rhs = rn_bracket(k_form, l);

    // Symbolic route: both sides reduce to bracket families.
    let symbolic = match (&outer.symbolic, &rhs.symbolic) {
        (Some(a), Some(b)) => Some(families_equal(a, b, cfg)?.0),
        _ => None,
    };

    let mut arities: Vec<usize> = outer.arities();
    arities.extend(rhs.arities());
    arities.sort_unstable();
    arities.dedup();
    arities.retain(|&a| a <= 4);
    let deformation_failures = compare_on_tuples(&outer, Some(&rhs), &arities, cfg)?;

    let nk = rn_bracket(n_form, k_form);
    if let Some(sym) = &nk.symbolic {
        if !sym.is_empty() {
            // [j, sE] = s * 0 * j vanishes for any degree-0 family; a
            // nonempty symbolic result here is an engine bug.
            return Err(EngineError::Unsupported(
                "unexpected nonzero symbolic [n, k] for degree-0 operands".into(),
            ));
        }
    }
    let mut nk_arities = nk.arities();
    nk_arities.retain(|&a| a <= 3);
    let square_failures = compare_on_tuples(&nk, None, &nk_arities, cfg)?;

    let pointwise_holds = deformation_failures.is_empty() && square_failures.is_empty();
    let holds = match symbolic {
        Some(s) => {
            if s != pointwise_holds {
                return Err(EngineError::Unsupported(format!(
                    "symbolic ({}) and pointwise ({}) Nijenhuis verdicts disagree",
                    s, pointwise_holds
                )));
            }
            s
        }
        None => pointwise_holds,
    };
    Ok(NijenhuisFormReport { holds, deformation_failures, square_failures, symbolic })
}
