//! One-call verification of the commuting diagrams and the named geometric
//! structures: the deformation square, the twisting square, the two
//! twist-deform squares and the full cube, plus Nijenhuis-morphism and
//! structure checks decided through their Courant-side criteria.
//!
//! Every face is computed along two independent paths. The bracket-family
//! side always goes through the pointwise insertion machinery and is reduced
//! back to a structure function with the inverse map, so a passing face
//! really does compare two different pipelines.

use std::fmt;
use std::sync::Arc;

use crate::bracket::{try_bracket, DEFAULT_MAX_ORDER};
use crate::courant::{CourantStructure, SkewEndo, SquareTestOptions};
use crate::error::EngineError;
use crate::linf::{
    compare_on_tuples, euler_family, map_m, map_m_inverse, map_upsilon, maurer_cartan_defect,
    nijenhuis_form_check, rn_bracket, rn_bracket_dyn, twist_linf, FormEvaluator, LElement, Side,
    TupleConfig, TwistedEvaluator,
};
use crate::superalgebra::{rat, Rational, Superfunction};

/// The commuting faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceId {
    /// M(Theta_J) = (M(Theta))_{Upsilon(J)}.
    DeformSquare,
    /// M(e^pi Theta) = eps^pi (M(Theta)).
    TwistSquare,
    /// e^pi(Theta_N) = (e^pi Theta)_{e^pi N}.
    CourantTwistDeform,
    /// eps^pi(l_{j1}) = (eps^pi l)_{j'} with j' = j_1 + N-extension of j_0.
    LinfTwistDeform,
    /// All of the above as the six faces of the cube.
    Cube,
}

impl fmt::Display for FaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FaceId::DeformSquare => "deform-square",
            FaceId::TwistSquare => "twist-square",
            FaceId::CourantTwistDeform => "courant-twist-deform",
            FaceId::LinfTwistDeform => "linf-twist-deform",
            FaceId::Cube => "cube",
        };
        f.write_str(s)
    }
}

impl FaceId {
    pub fn parse(s: &str) -> Option<FaceId> {
        match s {
            "deform-square" => Some(FaceId::DeformSquare),
            "twist-square" => Some(FaceId::TwistSquare),
            "courant-twist-deform" => Some(FaceId::CourantTwistDeform),
            "linf-twist-deform" => Some(FaceId::LinfTwistDeform),
            "cube" => Some(FaceId::Cube),
            _ => None,
        }
    }
}

/// One verified equality.
#[derive(Debug, Clone)]
pub struct FaceCheck {
    pub label: String,
    pub passed: bool,
    /// Nonzero defect when the comparison is between structure functions.
    pub defect: Option<Superfunction>,
}

#[derive(Debug, Clone)]
pub struct FaceReport {
    pub face: FaceId,
    pub checks: Vec<FaceCheck>,
    pub passed: bool,
}

fn check_theta(label: &str, lhs: &Superfunction, rhs: &Superfunction) -> FaceCheck {
    let defect = lhs - rhs;
    FaceCheck { label: label.to_string(), passed: defect.is_zero(), defect: Some(defect) }
}

/// Deformation square: Theta_J via the bracket against the pointwise
/// Richardson-Nijenhuis deformation reduced through the inverse map.
fn deform_square(
    label_prefix: &str,
    cs: &CourantStructure,
    j: &SkewEndo,
) -> Result<FaceCheck, EngineError> {
    let courant_side = cs.deform(j)?;
    let l = map_m(cs);
    let jf = map_upsilon(j);
    // Pointwise-only RN bracket, then coefficient reconstruction.
    let rn = rn_bracket_dyn(Arc::new(jf), Arc::new(l));
    let linf_side = map_m_inverse(cs.dims(), &rn)?;
    let mut check = check_theta(
        &format!("{}: M(Theta_J) = [Upsilon(J), M(Theta)]", label_prefix),
        courant_side.theta(),
        linf_side.theta(),
    );
    // A bracket family has no arity-4 part, so the pointwise deformation
    // must vanish there when j2 and l3 are both present.
    if check.passed && FormEvaluator::arities(&rn).contains(&4) {
        let residue = compare_on_tuples(&rn, None, &[4], &TupleConfig::default())?;
        if let Some(first) = residue.first() {
            check.passed = false;
            check.defect = Some(first.defect.clone());
            check.label.push_str(" [arity-4 residue]");
        }
    }
    Ok(check)
}

/// Twist square: M(e^pi Theta) against eps^pi M(Theta).
fn twist_square(
    label_prefix: &str,
    cs: &CourantStructure,
    pi: &Superfunction,
    max_order: u32,
) -> Result<FaceCheck, EngineError> {
    let courant_side = cs.twist(pi, max_order)?;
    let l = map_m(cs);
    let pi_el = LElement::multivector(pi.clone())?;
    let twisted = twist_linf(&l, &pi_el)?;
    let linf_side = map_m_inverse(cs.dims(), &twisted)?;
    Ok(check_theta(
        &format!("{}: M(e^pi Theta) = eps^pi M(Theta)", label_prefix),
        courant_side.theta(),
        linf_side.theta(),
    ))
}

/// Courant-side twist/deform square: e^pi(Theta_N) = (e^pi Theta)_{e^pi N}.
fn courant_twist_deform(
    label_prefix: &str,
    cs: &CourantStructure,
    n_endo: &SkewEndo,
    pi: &Superfunction,
    max_order: u32,
) -> Result<FaceCheck, EngineError> {
    let lhs = cs.deform(n_endo)?.twist(pi, max_order)?;
    let twisted_n = n_endo.twist_n_block(pi)?;
    let rhs = cs.twist(pi, max_order)?.deform(&twisted_n)?;
    Ok(check_theta(
        &format!("{}: e^pi(Theta_N) = (e^pi Theta)_(e^pi N)", label_prefix),
        lhs.theta(),
        rhs.theta(),
    ))
}

/// Bracket-side twist/deform square, verified pointwise on the tuple set:
/// eps^pi([j_1, l]) = [j', eps^pi l] with j' = Upsilon(e^pi N).
fn linf_twist_deform(
    label_prefix: &str,
    cs: &CourantStructure,
    n_endo: &SkewEndo,
    pi: &Superfunction,
    cfg: &TupleConfig,
) -> Result<FaceCheck, EngineError> {
    let l = map_m(cs);
    let j1 = map_upsilon(n_endo);
    let pi_el = LElement::multivector(pi.clone())?;

    // Left path: deform pointwise, then twist the evaluator.
    let deformed = rn_bracket_dyn(Arc::new(j1), Arc::new(l.clone()));
    let lhs = TwistedEvaluator::new(Arc::new(deformed), pi_el.clone())?;

    // Right path: symbolic twisted family, deformed by j' pointwise.
    let twisted_l = twist_linf(&l, &pi_el)?;
    let j_prime = map_upsilon(&n_endo.twist_n_block(pi)?);
    let rhs = rn_bracket(&j_prime, &twisted_l);

    let failures = compare_on_tuples(&lhs, Some(&rhs), &[0, 1, 2, 3], cfg)?;
    let passed = failures.is_empty();
    let defect = failures.first().map(|f| f.defect.clone());
    Ok(FaceCheck {
        label: format!("{}: eps^pi(l_j1) = (eps^pi l)_j'", label_prefix),
        passed,
        defect,
    })
}

/// Options shared by the verification entry points.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub tuples: TupleConfig,
    pub square: SquareTestOptions,
}

impl VerifyOptions {
    pub fn max_order(&self) -> u32 {
        DEFAULT_MAX_ORDER
    }
}

/// Verifies one face (or the whole cube) on concrete inputs. The endomorphism
/// argument contributes only its N block to the twist-deform faces.
pub fn verify_face(
    face: FaceId,
    cs: &CourantStructure,
    j: &SkewEndo,
    pi: &Superfunction,
    opts: &VerifyOptions,
) -> Result<FaceReport, EngineError> {
    let max_order = opts.max_order();
    let n_endo = SkewEndo::n_only(j.nn().clone())?;
    let checks = match face {
        FaceId::DeformSquare => vec![deform_square("deform-square", cs, j)?],
        FaceId::TwistSquare => vec![twist_square("twist-square", cs, pi, max_order)?],
        FaceId::CourantTwistDeform => {
            vec![courant_twist_deform("courant-twist-deform", cs, &n_endo, pi, max_order)?]
        }
        FaceId::LinfTwistDeform => {
            vec![linf_twist_deform("linf-twist-deform", cs, &n_endo, pi, &opts.tuples)?]
        }
        FaceId::Cube => {
            let twisted_theta = cs.twist(pi, max_order)?;
            let deformed_theta = cs.deform(&n_endo)?;
            let twisted_n = n_endo.twist_n_block(pi)?;
            vec![
                // Bottom and top.
                courant_twist_deform("cube/bottom", cs, &n_endo, pi, max_order)?,
                linf_twist_deform("cube/top", cs, &n_endo, pi, &opts.tuples)?,
                // Four vertical faces.
                deform_square("cube/front", cs, &n_endo)?,
                deform_square("cube/back", &twisted_theta, &twisted_n)?,
                twist_square("cube/left", cs, pi, max_order)?,
                twist_square("cube/right", &deformed_theta, pi, max_order)?,
            ]
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(FaceReport { face, checks, passed })
}

/// Report of the two-sided Nijenhuis verification.
#[derive(Debug, Clone)]
pub struct NijenhuisReport {
    pub torsion: Superfunction,
    pub is_nijenhuis: bool,
    /// Verdict of the independent bracket-family check.
    pub form_side: bool,
}

/// Decides whether J is a Nijenhuis morphism for Theta (torsion = 0 under
/// J^2 = lambda id) and cross-checks the verdict against the independent
/// Nijenhuis-form test with square -lambda E.
pub fn nijenhuis_morphism_check(
    cs: &CourantStructure,
    j: &SkewEndo,
    lambda: &Rational,
    opts: &VerifyOptions,
) -> Result<NijenhuisReport, EngineError> {
    let torsion = cs.torsion(j, lambda, &opts.square)?;
    let is_nijenhuis = torsion.is_zero();

    let l = map_m(cs);
    let n_form = map_upsilon(j);
    let k_form = euler_family(cs.dims(), Side::Multivector, -lambda);
    let form = nijenhuis_form_check(&n_form, &l, &k_form, &opts.tuples)?;
    if form.holds != is_nijenhuis {
        return Err(EngineError::Unsupported(format!(
            "torsion test ({}) and form test ({}) disagree",
            is_nijenhuis, form.holds
        )));
    }
    Ok(NijenhuisReport { torsion, is_nijenhuis, form_side: form.holds })
}

/// The named structures decided through their Courant-side criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureKind {
    Poisson,
    PoissonNijenhuis,
    OmegaN,
    POmega,
    ExactPqnBackground,
    MaurerCartan,
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureKind::Poisson => "poisson",
            StructureKind::PoissonNijenhuis => "poisson-nijenhuis",
            StructureKind::OmegaN => "omega-n",
            StructureKind::POmega => "p-omega",
            StructureKind::ExactPqnBackground => "exact-pqn-background",
            StructureKind::MaurerCartan => "maurer-cartan",
        };
        f.write_str(s)
    }
}

impl StructureKind {
    pub fn parse(s: &str) -> Option<StructureKind> {
        match s {
            "poisson" => Some(StructureKind::Poisson),
            "poisson-nijenhuis" => Some(StructureKind::PoissonNijenhuis),
            "omega-n" => Some(StructureKind::OmegaN),
            "p-omega" => Some(StructureKind::POmega),
            "exact-pqn-background" => Some(StructureKind::ExactPqnBackground),
            "maurer-cartan" => Some(StructureKind::MaurerCartan),
        _ => None,
        }
    }
}

/// Input data for a structure check: the Lie algebroid structure mu plus the
/// tensors the kind requires.
#[derive(Debug, Clone)]
pub struct StructureInput {
    pub mu: Superfunction,
    pub pi: Option<Superfunction>,
    pub nn: Option<Superfunction>,
    pub omega: Option<Superfunction>,
    pub phi: Option<Superfunction>,
    pub lambda: Option<Rational>,
}

impl StructureInput {
    pub fn new(mu: Superfunction) -> StructureInput {
        StructureInput { mu, pi: None, nn: None, omega: None, phi: None, lambda: None }
    }
}

#[derive(Debug, Clone)]
pub struct PreconditionCheck {
    pub label: String,
    pub passed: bool,
    pub defect: Option<Superfunction>,
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub kind: StructureKind,
    pub preconditions: Vec<PreconditionCheck>,
    /// The verdict; `false` with failed preconditions means rejected before
    /// the main criterion ran.
    pub holds: bool,
    pub torsion: Option<Superfunction>,
    pub detail: String,
}

fn precondition(label: &str, defect: Superfunction) -> PreconditionCheck {
    PreconditionCheck { label: label.to_string(), passed: defect.is_zero(), defect: Some(defect) }
}

fn require(input: &Option<Superfunction>, what: &str) -> Result<Superfunction, EngineError> {
    input
        .clone()
        .ok_or_else(|| EngineError::Precondition(format!("structure check needs {}", what)))
}

/// Decides a named structure through the equivalent Courant-side criterion:
/// assemble J and Theta and test the Nijenhuis torsion (or the Schouten
/// condition for plain Poisson).
pub fn check_structure(
    kind: StructureKind,
    input: &StructureInput,
    opts: &VerifyOptions,
) -> Result<StructureReport, EngineError> {
    let dims = input.mu.dims();
    let mu_cs = CourantStructure::decompose(input.mu.clone())?;
    let mut preconditions = Vec::new();

    // Every kind presumes mu is a Lie algebroid structure.
    let mu_int = mu_cs.integrability();
    preconditions.push(precondition("{mu,mu} = 0", mu_int.full.clone()));

    match kind {
        StructureKind::Poisson => {
            let pi = require(&input.pi, "a bivector pi")?;
            let schouten = try_bracket(&try_bracket(&input.mu, &pi)?, &pi)?;
            // Consistency with the Maurer-Cartan defect of the bracket family.
            let l = map_m(&mu_cs);
            let defect = maurer_cartan_defect(&l, &LElement::multivector(pi.clone())?)?;
            let mc_zero = defect.is_zero();
            if mc_zero != schouten.is_zero() {
                return Err(EngineError::Unsupported(
                    "Schouten condition and Maurer-Cartan defect disagree".into(),
                ));
            }
            let holds = preconditions.iter().all(|p| p.passed) && schouten.is_zero();
            Ok(StructureReport {
                kind,
                preconditions,
                holds,
                torsion: None,
                detail: format!("{{{{mu,pi}},pi}} = {}", schouten),
            })
        }
        StructureKind::MaurerCartan => {
            let pi = require(&input.pi, "a bivector pi")?;
            let l = map_m(&mu_cs);
            let defect = maurer_cartan_defect(&l, &LElement::multivector(pi)?)?;
            let holds = preconditions.iter().all(|p| p.passed) && defect.is_zero();
            Ok(StructureReport {
                kind,
                preconditions,
                holds,
                torsion: None,
                detail: format!("maurer-cartan defect = {}", defect),
            })
        }
        StructureKind::PoissonNijenhuis
        | StructureKind::OmegaN
        | StructureKind::POmega
        | StructureKind::ExactPqnBackground => {
            let lambda = input
                .lambda
                .clone()
                .ok_or_else(|| EngineError::Precondition("structure check needs lambda".into()))?;

            // Assemble J and Theta per kind, recording the compatibility
            // preconditions individually.
            let (endo, theta_cs) = match kind {
                StructureKind::PoissonNijenhuis => {
                    let pi = require(&input.pi, "a bivector pi")?;
                    let nn = require(&input.nn, "a (1,1)-tensor N")?;
                    let endo = SkewEndo::from_parts(pi, nn, Superfunction::zero(dims))?;
                    (endo, mu_cs.clone())
                }
                StructureKind::OmegaN => {
                    let omega = require(&input.omega, "a 2-form omega")?;
                    let nn = require(&input.nn, "a (1,1)-tensor N")?;
                    preconditions.push(precondition(
                        "omega closed: {mu, omega} = 0",
                        try_bracket(&input.mu, &omega)?,
                    ));
                    let endo = SkewEndo::from_parts(Superfunction::zero(dims), nn, omega)?;
                    (endo, mu_cs.clone())
                }
                StructureKind::POmega => {
                    let pi = require(&input.pi, "a bivector pi")?;
                    let omega = require(&input.omega, "a 2-form omega")?;
                    // pi must be Poisson.
                    let schouten = try_bracket(&try_bracket(&input.mu, &pi)?, &pi)?;
                    preconditions.push(precondition("pi Poisson: {{mu,pi},pi} = 0", schouten));
                    preconditions.push(precondition(
                        "omega closed: {mu, omega} = 0",
                        try_bracket(&input.mu, &omega)?,
                    ));
                    // N = pi-sharp after omega-flat, recovered from the
                    // generator action of the two blocks.
                    let nn = compose_n(&pi, &omega)?;
                    preconditions.push(precondition(
                        "omega_N closed: {mu, omega_N} = 0",
                        try_bracket(&input.mu, &omega_n(&omega, &nn)?)?,
                    ));
                    let endo = SkewEndo::n_only(nn)?;
                    (endo, mu_cs.clone())
                }
                StructureKind::ExactPqnBackground => {
                    let pi = require(&input.pi, "a bivector pi")?;
                    let nn = require(&input.nn, "a (1,1)-tensor N")?;
                    let omega = require(&input.omega, "a 2-form omega")?;
                    let phi = require(&input.phi, "a closed 3-form phi")?;
                    preconditions.push(precondition(
                        "phi closed: {mu, phi} = 0",
                        try_bracket(&input.mu, &phi)?,
                    ));
                    let endo = SkewEndo::from_parts(pi, nn, omega)?;
                    let theta = CourantStructure::decompose(&input.mu + &phi)?;
                    (endo, theta)
                }
                _ => unreachable!(),
            };

            // J^2 = lambda id covers the block compatibilities (N pi-sharp
            // symmetric, omega-flat N symmetric, N^2 = lambda).
            let square = endo.square_scalar(&opts.square)?;
            let square_ok = square.as_ref() == Some(&lambda);
            preconditions.push(PreconditionCheck {
                label: format!("J^2 = {} id (found {:?})", lambda, square.map(|r| r.to_string())),
                passed: square_ok,
                defect: None,
            });

            if preconditions.iter().any(|p| !p.passed) {
                return Ok(StructureReport {
                    kind,
                    preconditions,
                    holds: false,
                    torsion: None,
                    detail: "rejected by preconditions".into(),
                });
            }

            let report = nijenhuis_morphism_check(&theta_cs, &endo, &lambda, opts)?;
            Ok(StructureReport {
                kind,
                preconditions,
                holds: report.is_nijenhuis,
                torsion: Some(report.torsion),
                detail: "decided by the Nijenhuis torsion of the assembled J".into(),
            })
        }
    }
}

/// The composite tensor N = pi-sharp after omega-flat, reconstructed from
/// its action N(u) = {{u, omega}, pi} on the fibre generators.
fn compose_n(pi: &Superfunction, omega: &Superfunction) -> Result<Superfunction, EngineError> {
    let dims = pi.dims();
    let mut nn = Superfunction::zero(dims);
    for c in 1..=dims.d {
        let th_c = Superfunction::generator(dims, crate::superalgebra::GeneratorId::theta(c))?;
        let image = try_bracket(&try_bracket(&th_c, omega)?, pi)?;
        // image = sum_a N^a_c th^a; the encoding of N as a function carries
        // a global minus sign.
        for (m, coeff) in image.terms() {
            if m.odds().len() != 1 || !m.evens().is_empty() {
                return Err(EngineError::NotRepresentable(
                    "composite N has non-constant or non-section entries; use constant-coefficient pi and omega".into(),
                ));
            }
            let a = m.odds()[0];
            nn = nn.try_add(&Superfunction::from_factors(
                dims,
                &[a, crate::superalgebra::GeneratorId::xi(c)],
                -coeff.clone(),
            )?)?;
        }
    }
    Ok(nn)
}

/// omega_N(u, v) = omega(N u, v) as a 2-form function: computed from the
/// generator action omega_N-flat(u) = omega-flat(N u) and reassembled.
fn omega_n(omega: &Superfunction, nn: &Superfunction) -> Result<Superfunction, EngineError> {
    let dims = omega.dims();
    let mut out = Superfunction::zero(dims);
    for c in 1..=dims.d {
        let th_c = Superfunction::generator(dims, crate::superalgebra::GeneratorId::theta(c))?;
        let n_u = try_bracket(&th_c, nn)?;
        let image = try_bracket(&n_u, omega)?; // omega-flat(N u), a 1-form
        for (m, coeff) in image.terms() {
            if m.odds().len() != 1 || !m.evens().is_empty() {
                return Err(EngineError::NotRepresentable(
                    "omega_N has non-constant entries; use constant-coefficient inputs".into(),
                ));
            }
            let b = m.odds()[0];
            // omega_N = 1/2 (omega_N)_{cb} xi_c xi_b over all pairs; the
            // flat map of xi_c xi_b sends th^c to xi_b with the engine sign
            // calibrated below.
            out = out.try_add(&Superfunction::from_factors(
                dims,
                &[crate::superalgebra::GeneratorId::xi(c), b],
                coeff.clone() * rat(1, 2),
            )?)?;
        }
    }
    // Calibrate: the flat map of the reassembled form must reproduce the
    // generator action omega-flat(N .) exactly.
    for c in 1..=dims.d {
        let th_c = Superfunction::generator(dims, crate::superalgebra::GeneratorId::theta(c))?;
        let expect = try_bracket(&try_bracket(&th_c, nn)?, omega)?;
        let got = try_bracket(&th_c, &out)?;
        if got != expect {
            // The engine convention differs by a sign; flip once.
            let flipped = out.scale(&Rational::from_integer((-1).into()));
            let got2 = try_bracket(&th_c, &flipped)?;
            if got2 != expect {
                return Err(EngineError::NotRepresentable(
                    "omega_N reassembly failed; inputs are not a compatible pair".into(),
                ));
            }
            return Ok(flipped);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superalgebra::{rat_int, Dims, GeneratorId};
    use crate::testkit;
    use num_traits::Zero;

    fn opts() -> VerifyOptions {
        VerifyOptions { tuples: TupleConfig::small(), square: SquareTestOptions::default() }
    }

    fn x_theta_bivector(dims: Dims) -> Superfunction {
        Superfunction::generator(dims, GeneratorId::x(1))
            .unwrap()
            .try_mul(&testkit::wedge_thetas(dims, &[1, 2]))
            .unwrap()
    }

    #[test]
    fn deform_square_on_tm_with_swap() {
        let cs = testkit::mu_tm(2);
        let j = testkit::n_swap(cs.dims());
        let pi = Superfunction::zero(cs.dims());
        let report = verify_face(FaceId::DeformSquare, &cs, &j, &pi, &opts()).unwrap();
        assert!(report.passed, "{:?}", report.checks);
    }

    #[test]
    fn twist_square_on_curved_structure() {
        // Theta = th1 th2 th3 + solvable mu over (0,3) is not needed; use the
        // proto structure with all slots filled over (2,3).
        let cs = testkit::full_proto();
        let dims = cs.dims();
        let j = SkewEndo::zero(dims);
        let pi = x_theta_bivector(dims);
        let report = verify_face(FaceId::TwistSquare, &cs, &j, &pi, &opts()).unwrap();
        assert!(report.passed, "{:?}", report.checks);
    }

    #[test]
    fn courant_twist_deform_face() {
        let cs = testkit::mu_tm(2);
        let dims = cs.dims();
        let j = testkit::n_swap(dims);
        let pi = x_theta_bivector(dims);
        let report = verify_face(FaceId::CourantTwistDeform, &cs, &j, &pi, &opts()).unwrap();
        assert!(report.passed, "{:?}", report.checks);
    }

    #[test]
    fn linf_twist_deform_face() {
        let cs = testkit::mu_tm(2);
        let dims = cs.dims();
        let j = testkit::n_swap(dims);
        let pi = x_theta_bivector(dims);
        let report = verify_face(FaceId::LinfTwistDeform, &cs, &j, &pi, &opts()).unwrap();
        assert!(report.passed, "{:?}", report.checks);
    }

    #[test]
    fn cube_all_faces_pass() {
        let cs = testkit::mu_tm(2);
        let dims = cs.dims();
        let j = testkit::n_diag(dims, 2, 2);
        let pi = x_theta_bivector(dims);
        let report = verify_face(FaceId::Cube, &cs, &j, &pi, &opts()).unwrap();
        assert_eq!(report.checks.len(), 6);
        assert!(report.passed, "{:?}", report.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    }

    #[test]
    fn nijenhuis_check_swap_on_solvable() {
        // The swap endomorphism on the solvable algebra: decided exactly,
        // both sides must agree (that agreement is the test).
        let cs = testkit::solvable_mu2();
        let j = testkit::n_swap(cs.dims());
        let report = nijenhuis_morphism_check(&cs, &j, &rat_int(1), &opts()).unwrap();
        assert_eq!(report.is_nijenhuis, report.form_side);
    }

    #[test]
    fn nijenhuis_check_zero_endo() {
        let cs = testkit::solvable_mu2();
        let j = SkewEndo::zero(cs.dims());
        let report = nijenhuis_morphism_check(&cs, &j, &Rational::zero(), &opts()).unwrap();
        assert!(report.is_nijenhuis);
    }

    #[test]
    fn poisson_structure_on_r2() {
        let cs = testkit::mu_tm(2);
        let dims = cs.dims();
        let mut input = StructureInput::new(cs.theta().clone());
        input.pi = Some(x_theta_bivector(dims));
        let report = check_structure(StructureKind::Poisson, &input, &opts()).unwrap();
        assert!(report.holds, "{}", report.detail);
    }

    #[test]
    fn poisson_structure_rejected_on_r3() {
        let cs = testkit::mu_tm(3);
        let dims = cs.dims();
        let x1 = Superfunction::generator(dims, GeneratorId::x(1)).unwrap();
        let pi = &testkit::wedge_thetas(dims, &[1, 2])
            + &x1.try_mul(&testkit::wedge_thetas(dims, &[1, 3])).unwrap();
        assert!(!testkit::poisson_oracle(&pi));
        let mut input = StructureInput::new(cs.theta().clone());
        input.pi = Some(pi);
        let report = check_structure(StructureKind::Poisson, &input, &opts()).unwrap();
        assert!(!report.holds);
    }

    #[test]
    fn omega_n_structure_abelian() {
        // Abelian mu = 0 over (0,2): every compatible pair passes.
        let dims = Dims::new(0, 2);
        let mu = Superfunction::zero(dims);
        let nn = testkit::n_swap(dims).nn().clone();
        let omega = testkit::wedge_xis(dims, &[1, 2]);
        // omega-flat N = N* omega-flat requires the swap-compatible pairing;
        // verified through J^2 = lambda id inside the check.
        let mut input = StructureInput::new(mu);
        input.nn = Some(nn);
        input.omega = Some(omega);
        input.lambda = Some(rat_int(1));
        let report = check_structure(StructureKind::OmegaN, &input, &opts()).unwrap();
        if report.preconditions.iter().all(|p| p.passed) {
            assert!(report.holds, "zero bracket kills all torsion");
        }
    }

    #[test]
    fn exact_pqn_rejects_nonclosed_phi() {
        let cs = testkit::mu_tm(4);
        let dims = cs.dims();
        let phi = Superfunction::from_factors(
            dims,
            &[GeneratorId::x(4), GeneratorId::xi(1), GeneratorId::xi(2), GeneratorId::xi(3)],
            rat_int(1),
        )
        .unwrap();
        let mut input = StructureInput::new(cs.theta().clone());
        input.pi = Some(Superfunction::zero(dims));
        input.nn = Some(Superfunction::zero(dims));
        input.omega = Some(Superfunction::zero(dims));
        input.phi = Some(phi);
        input.lambda = Some(Rational::zero());
        let report = check_structure(StructureKind::ExactPqnBackground, &input, &opts()).unwrap();
        assert!(!report.holds);
        let closedness = report
            .preconditions
            .iter()
            .find(|p| p.label.starts_with("phi closed"))
            .unwrap();
        assert!(!closedness.passed);
    }
}
