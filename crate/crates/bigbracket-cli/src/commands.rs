//! Check commands: parsing from spec-file token lists or CLI arguments, and
//! execution against the engine.

use std::collections::BTreeMap;
use std::time::Instant;

use bigbracket::courant::{CourantStructure, SkewEndo, SquareTestOptions};
use bigbracket::exec::Mode;
use bigbracket::linf::{
    dual_lambda, gen_jacobi_check, map_m, maurer_cartan_defect, twist_linf, LElement, TupleConfig,
};
use bigbracket::superalgebra::{Rational, Superfunction};
use bigbracket::verify::{
    check_structure, nijenhuis_morphism_check, verify_face, FaceId, StructureInput,
    StructureKind, VerifyOptions,
};

use crate::expr::parse_with_env;
use crate::report::{CheckRecord, CheckStatus};
use crate::specfile::ProblemSpec;

/// Checker parameters shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub tuples_degree: u32,
    pub max_order: u32,
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, tuples_degree: 2, max_order: 8, timings: false }
    }
}

impl RunOptions {
    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tuples: TupleConfig {
                x_degree: self.tuples_degree,
                seed: self.seed,
                mode: Mode::default(),
                ..TupleConfig::default()
            },
            square: SquareTestOptions { x_degree: self.tuples_degree },
        }
    }
}

/// One check request with named arguments.
#[derive(Debug, Clone)]
pub struct CheckRequest {
    pub command: String,
    pub args: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum CommandError {
    /// Malformed request or unparsable expression: exit code 2 territory.
    Parse(String),
    /// The engine rejected the inputs.
    Precondition(String),
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Parse(m) => write!(f, "parse error: {}", m),
            CommandError::Precondition(m) => write!(f, "precondition failed: {}", m),
        }
    }
}

impl std::error::Error for CommandError {}

pub const COMMANDS: &[&str] = &[
    "check-courant",
    "dorfman",
    "anchor",
    "to-linf",
    "check-linf",
    "deform",
    "torsion",
    "twist",
    "twist-linf",
    "check-mc",
    "check-nijenhuis",
    "check-structure",
    "verify-face",
    "verify-cube",
];

impl CheckRequest {
    /// Parses `command --key value ...` token lists from a spec file.
    pub fn from_tokens(tokens: &[String]) -> Result<CheckRequest, CommandError> {
        let Some((command, rest)) = tokens.split_first() else {
            return Err(CommandError::Parse("empty check line".into()));
        };
        if !COMMANDS.contains(&command.as_str()) {
            return Err(CommandError::Parse(format!("unknown check command '{}'", command)));
        }
        let mut args = BTreeMap::new();
        let mut it = rest.iter();
        while let Some(flag) = it.next() {
            let Some(key) = flag.strip_prefix("--") else {
                return Err(CommandError::Parse(format!(
                    "expected '--flag value', found '{}'",
                    flag
                )));
            };
            let Some(value) = it.next() else {
                return Err(CommandError::Parse(format!("flag '--{}' is missing a value", key)));
            };
            args.insert(key.to_string(), value.clone());
        }
        Ok(CheckRequest { command: command.clone(), args })
    }
}

/// Resolves an argument: a binding name or an inline expression.
fn resolve(
    spec: &ProblemSpec,
    request: &CheckRequest,
    key: &str,
    default_binding: Option<&str>,
) -> Result<Superfunction, CommandError> {
    let source: String = match request.args.get(key) {
        Some(v) => v.clone(),
        None => match default_binding {
            Some(name) if spec.env.contains_key(name) => name.to_string(),
            _ => {
                return Err(CommandError::Parse(format!(
                    "missing --{} (no binding named '{}')",
                    key,
                    default_binding.unwrap_or(key)
                )));
            }
        },
    };
    if let Some(bound) = spec.env.get(&source) {
        return Ok(bound.clone());
    }
    parse_with_env(&source, spec.dims, Some(&spec.env))
        .map_err(|e| CommandError::Parse(format!("--{} '{}': {}", key, source, e)))
}

fn resolve_optional(
    spec: &ProblemSpec,
    request: &CheckRequest,
    key: &str,
) -> Result<Option<Superfunction>, CommandError> {
    if request.args.contains_key(key) {
        resolve(spec, request, key, None).map(Some)
    } else {
        Ok(None)
    }
}

fn resolve_lambda(request: &CheckRequest) -> Result<Rational, CommandError> {
    let Some(src) = request.args.get("lambda") else {
        return Err(CommandError::Parse("missing --lambda".into()));
    };
    crate::expr::parse_rational_literal(src)
        .map_err(|e| CommandError::Parse(format!("--lambda '{}': {}", src, e)))
}

fn decompose(theta: Superfunction) -> Result<CourantStructure, CommandError> {
    CourantStructure::decompose(theta).map_err(|e| CommandError::Precondition(e.to_string()))
}

fn skew(j: Superfunction) -> Result<SkewEndo, CommandError> {
    SkewEndo::from_function(j).map_err(|e| CommandError::Precondition(e.to_string()))
}

fn precondition<T>(r: Result<T, bigbracket::EngineError>) -> Result<T, CommandError> {
    r.map_err(|e| CommandError::Precondition(e.to_string()))
}

struct Outcome {
    status: CheckStatus,
    value: Option<String>,
    defect: Option<String>,
    details: Vec<String>,
}

impl Outcome {
    fn pass_value(value: String) -> Outcome {
        Outcome { status: CheckStatus::Pass, value: Some(value), defect: None, details: Vec::new() }
    }

    fn verdict(passed: bool, defect: Option<String>, details: Vec<String>) -> Outcome {
        Outcome {
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            value: Some(passed.to_string()),
            defect,
            details,
        }
    }
}

fn family_summary(fam: &bigbracket::SymFormFamily) -> Vec<String> {
    let mut out = Vec::new();
    for arity in fam.arities() {
        let gen = fam
            .merged_gen(arity)
            .map(|g| g.to_string())
            .unwrap_or_else(|| "<euler atom>".to_string());
        out.push(format!("arity {}: generator {}", arity, gen));
    }
    out
}

fn run_command(
    spec: &ProblemSpec,
    request: &CheckRequest,
    opts: &RunOptions,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Outcome, CommandError> {
    let vopts = opts.verify_options();
    let mut record = |key: &str, f: &Superfunction| {
        inputs.insert(key.to_string(), f.to_string());
    };

    match request.command.as_str() {
        "check-courant" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            record("theta", &theta);
            let cs = decompose(theta)?;
            let report = cs.integrability();
            let details: Vec<String> = report
                .components
                .iter()
                .map(|(id, defect)| {
                    if defect.is_zero() {
                        format!("{} = 0", id)
                    } else {
                        format!("{} = {}", id, defect)
                    }
                })
                .collect();
            let defect =
                (!report.is_courant).then(|| report.full.to_string());
            Ok(Outcome::verdict(report.is_courant, defect, details))
        }
        "dorfman" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let u = resolve(spec, request, "u", Some("u"))?;
            let v = resolve(spec, request, "v", Some("v"))?;
            record("theta", &theta);
            record("u", &u);
            record("v", &v);
            let cs = decompose(theta)?;
            let out = precondition(cs.dorfman(&u, &v))?;
            Ok(Outcome::pass_value(out.to_string()))
        }
        "anchor" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let u = resolve(spec, request, "u", Some("u"))?;
            let f = resolve(spec, request, "f", Some("f"))?;
            record("theta", &theta);
            record("u", &u);
            record("f", &f);
            let cs = decompose(theta)?;
            let out = precondition(cs.anchor_apply(&u, &f))?;
            Ok(Outcome::pass_value(out.to_string()))
        }
        "to-linf" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            record("theta", &theta);
            let cs = decompose(theta)?;
            let fam = map_m(&cs);
            let mut details = family_summary(&fam);
            details.push("dual side:".to_string());
            details.extend(family_summary(&dual_lambda(&cs)));
            Ok(Outcome {
                status: CheckStatus::Pass,
                value: Some(format!("bracket family with arities {:?}", fam.arities())),
                defect: None,
                details,
            })
        }
        "check-linf" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            record("theta", &theta);
            let max_n: usize = match request.args.get("max-n") {
                Some(v) => v
                    .parse()
                    .map_err(|_| CommandError::Parse(format!("--max-n '{}' is not an integer", v)))?,
                None => 5,
            };
            let cs = decompose(theta)?;
            let fam = map_m(&cs);
            let report = precondition(gen_jacobi_check(&fam, max_n, &vopts.tuples))?;
            let mut details = Vec::new();
            for check in &report.per_n {
                let mut line = format!(
                    "n = {}: {} ({} tuples)",
                    check.n,
                    if check.passed { "pass" } else { "fail" },
                    check.tuple_count
                );
                if let Some(sym) = &check.symbolic {
                    match &sym.component {
                        Some(c) => line.push_str(&format!(", component {}", c)),
                        None => line.push_str(", vacuous"),
                    }
                }
                details.push(line);
            }
            let defect = report
                .per_n
                .iter()
                .find_map(|c| c.symbolic.as_ref().filter(|s| !s.passed).map(|s| s.defect.to_string()));
            Ok(Outcome::verdict(report.passed, defect, details))
        }
        "deform" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let j = resolve(spec, request, "j", Some("j"))?;
            record("theta", &theta);
            record("j", &j);
            let cs = decompose(theta)?;
            let endo = skew(j)?;
            let out = precondition(cs.deform(&endo))?;
            Ok(Outcome::pass_value(out.theta().to_string()))
        }
        "torsion" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let j = resolve(spec, request, "j", Some("j"))?;
            let lambda = resolve_lambda(request)?;
            record("theta", &theta);
            record("j", &j);
            inputs.insert("lambda".to_string(), lambda.to_string());
            let cs = decompose(theta)?;
            let endo = skew(j)?;
            let torsion = precondition(cs.torsion(&endo, &lambda, &vopts.square))?;
            Ok(Outcome::pass_value(torsion.to_string()))
        }
        "twist" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            record("theta", &theta);
            let pi = resolve_optional(spec, request, "pi")?;
            let omega = resolve_optional(spec, request, "omega")?;
            let s = match (pi, omega) {
                (Some(p), None) => p,
                (None, Some(o)) => o,
                (Some(_), Some(_)) => {
                    return Err(CommandError::Parse("twist takes --pi or --omega, not both".into()));
                }
                (None, None) => resolve(spec, request, "pi", Some("pi"))?,
            };
            record("s", &s);
            let cs = decompose(theta)?;
            let out = precondition(cs.twist(&s, opts.max_order))?;
            Ok(Outcome::pass_value(out.theta().to_string()))
        }
        "twist-linf" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let pi = resolve(spec, request, "pi", Some("pi"))?;
            record("theta", &theta);
            record("pi", &pi);
            let cs = decompose(theta)?;
            let fam = map_m(&cs);
            let pi_el = precondition(LElement::multivector(pi))?;
            let twisted = precondition(twist_linf(&fam, &pi_el))?;
            Ok(Outcome {
                status: CheckStatus::Pass,
                value: Some(format!("twisted family with arities {:?}", twisted.arities())),
                defect: None,
                details: family_summary(&twisted),
            })
        }
        "check-mc" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let pi = resolve(spec, request, "pi", Some("pi"))?;
            record("theta", &theta);
            record("pi", &pi);
            let cs = decompose(theta)?;
            let fam = map_m(&cs);
            let pi_el = precondition(LElement::multivector(pi))?;
            let defect = precondition(maurer_cartan_defect(&fam, &pi_el))?;
            let passed = defect.is_zero();
            Ok(Outcome::verdict(passed, (!passed).then(|| defect.to_string()), Vec::new()))
        }
        "check-nijenhuis" => {
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let j = resolve(spec, request, "j", Some("j"))?;
            let lambda = resolve_lambda(request)?;
            record("theta", &theta);
            record("j", &j);
            inputs.insert("lambda".to_string(), lambda.to_string());
            let cs = decompose(theta)?;
            let endo = skew(j)?;
            let report = precondition(nijenhuis_morphism_check(&cs, &endo, &lambda, &vopts))?;
            let details = vec![
                format!("torsion = {}", report.torsion),
                format!("bracket-family side agrees: {}", report.form_side),
            ];
            Ok(Outcome::verdict(
                report.is_nijenhuis,
                (!report.is_nijenhuis).then(|| report.torsion.to_string()),
                details,
            ))
        }
        "check-structure" => {
            let kind_name = request
                .args
                .get("kind")
                .ok_or_else(|| CommandError::Parse("missing --kind".into()))?;
            let kind = StructureKind::parse(kind_name).ok_or_else(|| {
                CommandError::Parse(format!(
                    "unknown structure kind '{}'; expected one of poisson, poisson-nijenhuis, omega-n, p-omega, exact-pqn-background, maurer-cartan",
                    kind_name
                ))
            })?;
            let mu = resolve(spec, request, "mu", Some("mu"))?;
            record("mu", &mu);
            let mut input = StructureInput::new(mu);
            input.pi = resolve_optional(spec, request, "pi")?;
            input.nn = resolve_optional(spec, request, "n")?;
            input.omega = resolve_optional(spec, request, "omega")?;
            input.phi = resolve_optional(spec, request, "phi")?;
            if request.args.contains_key("lambda") {
                input.lambda = Some(resolve_lambda(request)?);
            }
            for (key, val) in [("pi", &input.pi), ("n", &input.nn), ("omega", &input.omega), ("phi", &input.phi)] {
                if let Some(v) = val {
                    inputs.insert(key.to_string(), v.to_string());
                }
            }
            let report = precondition(check_structure(kind, &input, &vopts))?;
            let mut details: Vec<String> = report
                .preconditions
                .iter()
                .map(|p| format!("precondition {}: {}", p.label, if p.passed { "ok" } else { "FAILED" }))
                .collect();
            details.push(report.detail.clone());
            let failed_pre = report.preconditions.iter().any(|p| !p.passed);
            if failed_pre {
                return Ok(Outcome {
                    status: CheckStatus::PreconditionFailed,
                    value: Some("false".into()),
                    defect: report
                        .preconditions
                        .iter()
                        .find(|p| !p.passed)
                        .and_then(|p| p.defect.as_ref().map(|d| d.to_string())),
                    details,
                });
            }
            Ok(Outcome::verdict(
                report.holds,
                report.torsion.filter(|t| !t.is_zero()).map(|t| t.to_string()),
                details,
            ))
        }
        "verify-face" | "verify-cube" => {
            let face = if request.command == "verify-cube" {
                FaceId::Cube
            } else {
                let name = request
                    .args
                    .get("face")
                    .ok_or_else(|| CommandError::Parse("missing --face".into()))?;
                FaceId::parse(name).ok_or_else(|| {
                    CommandError::Parse(format!(
                        "unknown face '{}'; expected deform-square, twist-square, courant-twist-deform, linf-twist-deform or cube",
                        name
                    ))
                })?
            };
            let theta = resolve(spec, request, "theta", Some("theta"))?;
            let j = resolve(spec, request, "j", Some("j"))?;
            let pi = resolve(spec, request, "pi", Some("pi"))?;
            record("theta", &theta);
            record("j", &j);
            record("pi", &pi);
            let cs = decompose(theta)?;
            let endo = skew(j)?;
            let report = precondition(verify_face(face, &cs, &endo, &pi, &vopts))?;
            let details: Vec<String> = report
                .checks
                .iter()
                .map(|c| format!("{}: {}", c.label, if c.passed { "pass" } else { "FAIL" }))
                .collect();
            let defect = report
                .checks
                .iter()
                .find(|c| !c.passed)
                .and_then(|c| c.defect.as_ref().map(|d| d.to_string()));
            Ok(Outcome::verdict(report.passed, defect, details))
        }
        other => Err(CommandError::Parse(format!("unknown check command '{}'", other))),
    }
}

/// Executes one check request and wraps the outcome in a record.
pub fn execute(
    spec: &ProblemSpec,
    request: &CheckRequest,
    opts: &RunOptions,
    id: usize,
) -> Result<CheckRecord, CommandError> {
    let start = Instant::now();
    let mut inputs = BTreeMap::new();
    let outcome = match run_command(spec, request, opts, &mut inputs) {
        Ok(outcome) => outcome,
        Err(CommandError::Precondition(message)) => Outcome {
            status: CheckStatus::PreconditionFailed,
            value: None,
            defect: None,
            details: vec![message],
        },
        Err(parse) => return Err(parse),
    };
    Ok(CheckRecord {
        id,
        command: request.command.clone(),
        inputs,
        status: outcome.status,
        value: outcome.value,
        defect: outcome.defect,
        details: outcome.details,
        timing_ms: opts
            .timings
            .then(|| u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)),
    })
}
