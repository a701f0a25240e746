//! Pre-Courant and Courant structures on A + A*: bidegree decomposition,
//! component integrability equations, derived anchor/Dorfman brackets,
//! deformation by skew-symmetric endomorphisms, Nijenhuis torsion and
//! twisting by bivectors or 2-forms.
//!
//! Torsion is only defined under J^2 = lambda id; the weaker notion of an
//! endomorphism whose deformation happens to stay Courant without a scalar
//! square has no closed criterion and is not implemented. Integrability of
//! a deformation can always be tested directly with [`CourantStructure::integrability`].

use std::fmt;

use num_traits::Zero;

use crate::bracket::{bracket, exp_adjoint, nested_bracket, try_bracket, DEFAULT_MAX_ORDER};
use crate::error::EngineError;
use crate::superalgebra::{rat, Bidegree, Dims, GeneratorId, Rational, Superfunction};

/// A degree-3 function Theta with its bidegree components cached:
/// Theta = psi + gamma + mu + phi with psi in F^{3,0}, gamma in F^{2,1},
/// mu in F^{1,2}, phi in F^{0,3}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CourantStructure {
    theta: Superfunction,
    psi: Superfunction,
    gamma: Superfunction,
    mu: Superfunction,
    phi: Superfunction,
}

impl CourantStructure {
    /// Splits a total-degree-3 superfunction into its four components.
    pub fn decompose(theta: Superfunction) -> Result<CourantStructure, EngineError> {
        for (m, _) in theta.terms() {
            if m.total_degree() != 3 {
                return Err(EngineError::TotalDegree {
                    expected: 3,
                    found: m.total_degree(),
                });
            }
        }
        let psi = theta.component(Bidegree::new(3, 0));
        let gamma = theta.component(Bidegree::new(2, 1));
        let mu = theta.component(Bidegree::new(1, 2));
        let phi = theta.component(Bidegree::new(0, 3));
        Ok(CourantStructure { theta, psi, gamma, mu, phi })
    }

    pub fn zero(dims: Dims) -> CourantStructure {
        CourantStructure::decompose(Superfunction::zero(dims)).expect("zero is degree 3")
    }

    pub fn dims(&self) -> Dims {
        self.theta.dims()
    }

    pub fn theta(&self) -> &Superfunction {
        &self.theta
    }

    pub fn psi(&self) -> &Superfunction {
        &self.psi
    }

    pub fn gamma(&self) -> &Superfunction {
        &self.gamma
    }

    pub fn mu(&self) -> &Superfunction {
        &self.mu
    }

    pub fn phi(&self) -> &Superfunction {
        &self.phi
    }

    /// The five component equations of {Theta,Theta} = 0 and the full
    /// bracket, computed independently and cross-checked.
    pub fn integrability(&self) -> IntegrabilityReport {
        let c1 = bracket(&self.gamma, &self.psi);
        let c2 = &bracket(&self.gamma, &self.gamma)
            + &bracket(&self.mu, &self.psi).scale(&rat(2, 1));
        let c3 = &bracket(&self.mu, &self.gamma) + &bracket(&self.psi, &self.phi);
        let c4 =
            &bracket(&self.mu, &self.mu) + &bracket(&self.gamma, &self.phi).scale(&rat(2, 1));
        let c5 = bracket(&self.mu, &self.phi);
        let full = bracket(&self.theta, &self.theta);

        // {Theta,Theta} = 2*c1 + c2 + 2*c3 + c4 + 2*c5, sorted by bidegree.
        let recombined = &(&(&c1.scale(&rat(2, 1)) + &c2) + &(&c3.scale(&rat(2, 1)) + &c4))
            + &c5.scale(&rat(2, 1));
        assert_eq!(
            full, recombined,
            "component equations disagree with {{Theta,Theta}}"
        );

        let components = [
            (ComponentEq::GammaPsi, c1),
            (ComponentEq::GammaGammaMuPsi, c2),
            (ComponentEq::MuGammaPsiPhi, c3),
            (ComponentEq::MuMuGammaPhi, c4),
            (ComponentEq::MuPhi, c5),
        ];
        let is_courant = full.is_zero();
        debug_assert_eq!(is_courant, components.iter().all(|(_, c)| c.is_zero()));
        IntegrabilityReport { full, components, is_courant }
    }

    /// Anchor action rho(u).f = {{u, Theta}, f} for u in F^1, f in F^{0,0}.
    pub fn anchor_apply(
        &self,
        u: &Superfunction,
        f: &Superfunction,
    ) -> Result<Superfunction, EngineError> {
        if !u.has_total_degree(1) {
            return Err(EngineError::TotalDegree { expected: 1, found: u.max_total_degree() });
        }
        if let Some(bd) = f.homogeneous_bidegree() {
            if bd != Bidegree::new(0, 0) {
                return Err(EngineError::BidegreeMismatch {
                    expected: Bidegree::new(0, 0),
                    found: bd,
                });
            }
        } else if !f.is_zero() {
            return Err(EngineError::NotHomogeneous { what: "anchor argument" });
        }
        nested_bracket(u, &[&self.theta, f])
    }

    /// Dorfman bracket [u, v] = {{u, Theta}, v} on sections u, v in F^1.
    pub fn dorfman(
        &self,
        u: &Superfunction,
        v: &Superfunction,
    ) -> Result<Superfunction, EngineError> {
        for w in [u, v] {
            if !w.has_total_degree(1) {
                return Err(EngineError::TotalDegree { expected: 1, found: w.max_total_degree() });
            }
        }
        nested_bracket(u, &[&self.theta, v])
    }

    /// Deformation by a skew endomorphism: Theta_J = {pi + N + omega, Theta}.
    pub fn deform(&self, j: &SkewEndo) -> Result<CourantStructure, EngineError> {
        let deformed = try_bracket(j.function(), &self.theta)?;
        CourantStructure::decompose(deformed)
    }

    /// Nijenhuis torsion T_Theta(J) = ((Theta_J)_J - lambda Theta) / 2,
    /// defined when J^2 = lambda id (checked).
    pub fn torsion(
        &self,
        j: &SkewEndo,
        lambda: &Rational,
        opts: &SquareTestOptions,
    ) -> Result<Superfunction, EngineError> {
        match j.square_scalar(opts)? {
            Some(l) if &l == lambda => {}
            other => {
                return Err(EngineError::Precondition(format!(
                    "J^2 = lambda id fails: expected lambda = {}, generator test found {:?}",
                    lambda,
                    other.map(|r| r.to_string())
                )));
            }
        }
        let twice = self.deform(j)?.deform(j)?;
        let diff = &twice.theta - &self.theta.scale(lambda);
        Ok(diff.scale(&rat(1, 2)))
    }

    /// Twisting by a bivector (bidegree (2,0)) or a 2-form (bidegree (0,2)):
    /// the Hamiltonian flow exp{s, .} applied to Theta.
    pub fn twist(&self, s: &Superfunction, max_order: u32) -> Result<CourantStructure, EngineError> {
        if !s.is_zero() {
            match s.homogeneous_bidegree() {
                Some(bd) if bd == Bidegree::new(2, 0) || bd == Bidegree::new(0, 2) => {}
                Some(bd) => {
                    return Err(EngineError::BidegreeMismatch {
                        expected: Bidegree::new(2, 0),
                        found: bd,
                    });
                }
                None => return Err(EngineError::NotHomogeneous { what: "twisting element" }),
            }
        }
        CourantStructure::decompose(exp_adjoint(s, &self.theta, max_order)?)
    }

    pub fn twist_default(&self, s: &Superfunction) -> Result<CourantStructure, EngineError> {
        self.twist(s, DEFAULT_MAX_ORDER)
    }
}

/// Identifies one of the five component equations of {Theta,Theta} = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentEq {
    /// {gamma, psi} = 0, bidegree (4,0).
    GammaPsi,
    /// {gamma, gamma} + 2 {mu, psi} = 0, bidegree (3,1).
    GammaGammaMuPsi,
    /// {mu, gamma} + {psi, phi} = 0, bidegree (2,2).
    MuGammaPsiPhi,
    /// {mu, mu} + 2 {gamma, phi} = 0, bidegree (1,3).
    MuMuGammaPhi,
    /// {mu, phi} = 0, bidegree (0,4).
    MuPhi,
}

impl fmt::Display for ComponentEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ComponentEq::GammaPsi => "{gamma,psi}",
            ComponentEq::GammaGammaMuPsi => "{gamma,gamma}+2{mu,psi}",
            ComponentEq::MuGammaPsiPhi => "{mu,gamma}+{psi,phi}",
            ComponentEq::MuMuGammaPhi => "{mu,mu}+2{gamma,phi}",
            ComponentEq::MuPhi => "{mu,phi}",
        };
        f.write_str(s)
    }
}

/// Outcome of the integrability test.
#[derive(Debug, Clone)]
pub struct IntegrabilityReport {
    /// {Theta, Theta} in full.
    pub full: Superfunction,
    /// The five component left-hand sides, in equation order.
    pub components: [(ComponentEq, Superfunction); 5],
    pub is_courant: bool,
}

impl IntegrabilityReport {
    /// The component equations that fail, in order.
    pub fn failing(&self) -> Vec<ComponentEq> {
        self.components
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(id, _)| *id)
            .collect()
    }
}

/// Options for deciding J^2 = lambda id on the generating set.
#[derive(Debug, Clone)]
pub struct SquareTestOptions {
    /// Also test f*u for x-monomials f up to this degree.
    pub x_degree: u32,
}

impl Default for SquareTestOptions {
    fn default() -> Self {
        SquareTestOptions { x_degree: 2 }
    }
}

/// A skew-symmetric endomorphism J of A + A*, stored as the corresponding
/// degree-2 section pi + N + omega with pi in F^{2,0}, N in F^{1,1} and
/// omega in F^{0,2}. The action on sections is J(u) = {u, pi + N + omega}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewEndo {
    pi: Superfunction,
    nn: Superfunction,
    omega: Superfunction,
    j: Superfunction,
}

impl SkewEndo {
    /// Splits a degree-2 section into its three blocks. Terms containing
    /// moment coordinates p are rejected: they are not sections of the
    /// exterior square of A + A*.
    pub fn from_function(j: Superfunction) -> Result<SkewEndo, EngineError> {
        for (m, _) in j.terms() {
            if m.total_degree() != 2 {
                return Err(EngineError::TotalDegree { expected: 2, found: m.total_degree() });
            }
        }
        if !j.is_p_free() {
            return Err(EngineError::MomentTermInSection);
        }
        let pi = j.component(Bidegree::new(2, 0));
        let nn = j.component(Bidegree::new(1, 1));
        let omega = j.component(Bidegree::new(0, 2));
        Ok(SkewEndo { pi, nn, omega, j })
    }

    pub fn from_parts(
        pi: Superfunction,
        nn: Superfunction,
        omega: Superfunction,
    ) -> Result<SkewEndo, EngineError> {
        let j = &(&pi + &nn) + &omega;
        let endo = SkewEndo::from_function(j)?;
        // The parts must already live in their own blocks.
        if endo.pi != pi || endo.nn != nn || endo.omega != omega {
            return Err(EngineError::NotHomogeneous { what: "skew endomorphism block" });
        }
        Ok(endo)
    }

    pub fn zero(dims: Dims) -> SkewEndo {
        SkewEndo::from_function(Superfunction::zero(dims)).expect("zero section")
    }

    pub fn n_only(nn: Superfunction) -> Result<SkewEndo, EngineError> {
        let dims = nn.dims();
        SkewEndo::from_parts(Superfunction::zero(dims), nn, Superfunction::zero(dims))
    }

    pub fn pi_only(pi: Superfunction) -> Result<SkewEndo, EngineError> {
        let dims = pi.dims();
        SkewEndo::from_parts(pi, Superfunction::zero(dims), Superfunction::zero(dims))
    }

    pub fn omega_only(omega: Superfunction) -> Result<SkewEndo, EngineError> {
        let dims = omega.dims();
        SkewEndo::from_parts(Superfunction::zero(dims), Superfunction::zero(dims), omega)
    }

    pub fn dims(&self) -> Dims {
        self.j.dims()
    }

    pub fn pi(&self) -> &Superfunction {
        &self.pi
    }

    pub fn nn(&self) -> &Superfunction {
        &self.nn
    }

    pub fn omega(&self) -> &Superfunction {
        &self.omega
    }

    /// The section pi + N + omega itself.
    pub fn function(&self) -> &Superfunction {
        &self.j
    }

    /// J(u) = {u, pi + N + omega}.
    pub fn apply(&self, u: &Superfunction) -> Result<Superfunction, EngineError> {
        try_bracket(u, &self.j)
    }

    /// The twisting e^pi N = N + {pi, N} of the N-block by a bivector,
    /// packaged as the endomorphism with bivector block {pi, N}.
    pub fn twist_n_block(&self, pi: &Superfunction) -> Result<SkewEndo, EngineError> {
        let moved = try_bracket(pi, &self.nn)?;
        SkewEndo::from_parts(moved, self.nn.clone(), Superfunction::zero(self.dims()))
    }

    /// Decides whether J^2 = lambda id for a constant rational lambda by
    /// applying J twice to every odd generator (and to x-monomial multiples
    /// up to the configured degree). Returns the scalar if one exists.
    pub fn square_scalar(
        &self,
        opts: &SquareTestOptions,
    ) -> Result<Option<Rational>, EngineError> {
        let dims = self.dims();
        let mut lambda: Option<Rational> = None;

        let mut sections: Vec<Superfunction> = Vec::new();
        for a in 1..=dims.d {
            sections.push(Superfunction::generator(dims, GeneratorId::theta(a))?);
            sections.push(Superfunction::generator(dims, GeneratorId::xi(a))?);
        }
        let coeffs = x_monomials(dims, opts.x_degree);

        for u in &sections {
            for f in &coeffs {
                let fu = f.try_mul(u)?;
                let squared = try_bracket(&try_bracket(&fu, &self.j)?, &self.j)?;
                // J^2(fu) = 0 asserts lambda = 0, so any single mismatch
                // between sections rules out a scalar square.
                match extract_scalar_multiple(&squared, &fu) {
                    None => return Ok(None),
                    Some(l) => match &lambda {
                        None => lambda = Some(l),
                        Some(prev) => {
                            if *prev != l {
                                return Ok(None);
                            }
                        }
                    },
                }
            }
        }
        Ok(lambda.or_else(|| Some(Rational::zero())))
    }
}

/// All x-monomials of degree <= max_degree (including 1), as superfunctions.
pub(crate) fn x_monomials(dims: Dims, max_degree: u32) -> Vec<Superfunction> {
    let mut out = vec![Superfunction::one(dims)];
    if dims.n == 0 {
        return out;
    }
    // Exponent vectors by total degree, built in lexicographic layers.
    let mut exps: Vec<Vec<u32>> = vec![vec![0; dims.n as usize]];
    for _ in 0..max_degree {
        let mut next: Vec<Vec<u32>> = Vec::new();
        for e in &exps {
            // Raise only indices at or after the last raised one to avoid
            // generating the same monomial twice.
            let start = e
                .iter()
                .rposition(|&v| v > 0)
                .unwrap_or(0);
            for i in start..dims.n as usize {
                let mut raised = e.clone();
                raised[i] += 1;
                next.push(raised);
            }
        }
        for e in &next {
            let mut word: Vec<GeneratorId> = Vec::new();
            for (i, &v) in e.iter().enumerate() {
                for _ in 0..v {
                    word.push(GeneratorId::x(i as u32 + 1));
                }
            }
            out.push(
                Superfunction::from_factors(dims, &word, Rational::from_integer(1.into()))
                    .expect("x generators in range"),
            );
        }
        exps = next;
    }
    out
}

/// If `v = c * u` for a rational constant c, returns c; `None` otherwise.
/// Zero v gives Some(0).
fn extract_scalar_multiple(v: &Superfunction, u: &Superfunction) -> Option<Rational> {
    if v.is_zero() {
        return Some(Rational::zero());
    }
    if u.is_zero() {
        return None;
    }
    let (m0, c0) = u.terms().next()?;
    let ratio = v.coefficient(m0) / c0;
    if ratio.is_zero() {
        return None;
    }
    (v == &u.scale(&ratio)).then_some(ratio)
}
