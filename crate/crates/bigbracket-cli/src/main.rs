//! Command-line front end: runs checks from a problem-spec file, either the
//! file's own `[checks]` section (`run`) or a single check given as a
//! subcommand, and emits a text or JSON report.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bigbracket_cli::commands::{execute, CheckRequest, CommandError, RunOptions};
use bigbracket_cli::report::{CheckStatus, ProblemInfo, Report, SCHEMA};
use bigbracket_cli::specfile::{self, ProblemSpec};

#[derive(Debug, Parser)]
#[command(
    name = "bigbracket",
    about = "Exact big-bracket calculus on split pre-Courant algebroids and their curved L-infinity brackets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Problem-spec file (dimensions, bindings and optionally checks).
    spec: PathBuf,
    /// Emit the report as a single JSON document on stdout.
    #[arg(long)]
    json: bool,
    /// Seed for deterministic tuple subsampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Highest x-degree in generated test tuples and square tests.
    #[arg(long = "tuples-degree", default_value_t = 2)]
    tuples_degree: u32,
    /// Bound on Hamiltonian exponential series.
    #[arg(long = "max-order", default_value_t = 8)]
    max_order: u32,
    /// Include wall-clock timings in the report (breaks byte-stability).
    #[arg(long)]
    timings: bool,
}

/// Flags forwarded verbatim to the check request.
#[derive(Debug, Args, Default)]
struct Forward {
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    j: Option<String>,
    #[arg(long)]
    pi: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    face: Option<String>,
    #[arg(long = "max-n")]
    max_n: Option<String>,
}

impl Forward {
    fn into_args(self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let pairs = [
            ("theta", self.theta),
            ("u", self.u),
            ("v", self.v),
            ("f", self.f),
            ("j", self.j),
            ("pi", self.pi),
            ("omega", self.omega),
            ("n", self.n),
            ("mu", self.mu),
            ("phi", self.phi),
            ("lambda", self.lambda),
            ("kind", self.kind),
            ("face", self.face),
            ("max-n", self.max_n),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        }
        map
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every check listed in the spec file's `[checks]` section.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Test {Theta,Theta} = 0 through the five component equations.
    CheckCourant {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Dorfman bracket [u, v] of two degree-1 sections.
    Dorfman {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Anchor action rho(u).f.
    Anchor {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Print the bracket family of Theta (and its dual-side twin).
    ToLinf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Generalized Jacobi check of the bracket family.
    CheckLinf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Deform Theta by a skew endomorphism.
    Deform {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Nijenhuis torsion of J on Theta (requires J^2 = lambda id).
    Torsion {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Twist Theta by a bivector (--pi) or a 2-form (--omega).
    Twist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Twist the bracket family by a bivector.
    TwistLinf {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Maurer-Cartan defect of a bivector.
    CheckMc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Two-sided Nijenhuis morphism check.
    CheckNijenhuis {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Decide a named structure through its Courant-side criterion.
    CheckStructure {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Verify one commuting face on concrete inputs.
    VerifyFace {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
    /// Verify all six faces of the cube.
    VerifyCube {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        flags: Forward,
    },
}

impl Command {
    fn split(self) -> (Common, Option<CheckRequest>) {
        fn req(name: &str, flags: Forward) -> CheckRequest {
            CheckRequest { command: name.to_string(), args: flags.into_args() }
        }
        match self {
            Command::Run { common } => (common, None),
            Command::CheckCourant { common, flags } => (common, Some(req("check-courant", flags))),
            Command::Dorfman { common, flags } => (common, Some(req("dorfman", flags))),
            Command::Anchor { common, flags } => (common, Some(req("anchor", flags))),
            Command::ToLinf { common, flags } => (common, Some(req("to-linf", flags))),
            Command::CheckLinf { common, flags } => (common, Some(req("check-linf", flags))),
            Command::Deform { common, flags } => (common, Some(req("deform", flags))),
            Command::Torsion { common, flags } => (common, Some(req("torsion", flags))),
            Command::Twist { common, flags } => (common, Some(req("twist", flags))),
            Command::TwistLinf { common, flags } => (common, Some(req("twist-linf", flags))),
            Command::CheckMc { common, flags } => (common, Some(req("check-mc", flags))),
            Command::CheckNijenhuis { common, flags } => {
                (common, Some(req("check-nijenhuis", flags)))
            }
            Command::CheckStructure { common, flags } => {
                (common, Some(req("check-structure", flags)))
            }
            Command::VerifyFace { common, flags } => (common, Some(req("verify-face", flags))),
            Command::VerifyCube { common, flags } => (common, Some(req("verify-cube", flags))),
        }
    }
}

const EXIT_PARSE_ERROR: u8 = 2;

fn load_spec(common: &Common) -> Result<ProblemSpec, String> {
    let text = std::fs::read_to_string(&common.spec)
        .map_err(|e| format!("cannot read {}: {}", common.spec.display(), e))?;
    specfile::parse_spec(&text).map_err(|e| format!("{}: {}", common.spec.display(), e))
}

fn requests_from_spec(spec: &ProblemSpec) -> Result<Vec<CheckRequest>, String> {
    let mut out = Vec::new();
    for tokens in &spec.checks {
        out.push(CheckRequest::from_tokens(tokens).map_err(|e| e.to_string())?);
    }
    if out.is_empty() {
        return Err("the spec file has no [checks] section entries; use a subcommand".into());
    }
    Ok(out)
}

fn print_text_report(report: &Report) {
    println!(
        "problem: n = {}, d = {} (seed {})",
        report.problem.n, report.problem.d, report.seed
    );
    for check in &report.checks {
        let tag = match check.status {
            CheckStatus::Pass => "ok",
            CheckStatus::Fail => "FAIL",
            CheckStatus::PreconditionFailed => "PRECONDITION",
        };
        let mut line = format!("[{:>12}] {}", tag, check.command);
        if let Some(v) = &check.value {
            line.push_str(&format!(" -> {}", v));
        }
        if let Some(t) = check.timing_ms {
            line.push_str(&format!(" ({} ms)", t));
        }
        println!("{}", line);
        for d in &check.details {
            println!("    {}", d);
        }
        if let Some(defect) = &check.defect {
            println!("    defect: {}", defect);
        }
    }
    let overall = match report.status {
        CheckStatus::Pass => "all checks passed",
        CheckStatus::Fail => "some checks failed",
        CheckStatus::PreconditionFailed => "precondition failures",
    };
    println!("{} (exit code {})", overall, report.exit_code);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, single) = cli.command.split();

    let spec = match load_spec(&common) {
        Ok(s) => s,
        Err(message) => {
            eprintln!("error: {}", message);
            return ExitCode::from(EXIT_PARSE_ERROR);
        }
    };

    let requests = match single {
        Some(r) => vec![r],
        None => match requests_from_spec(&spec) {
            Ok(rs) => rs,
            Err(message) => {
                eprintln!("error: {}", message);
                return ExitCode::from(EXIT_PARSE_ERROR);
            }
        },
    };

    let opts = RunOptions {
        seed: common.seed,
        tuples_degree: common.tuples_degree,
        max_order: common.max_order,
        timings: common.timings,
    };

    let mut records = Vec::new();
    for (id, request) in requests.iter().enumerate() {
        match execute(&spec, request, &opts, id) {
            Ok(record) => records.push(record),
            Err(CommandError::Parse(message)) => {
                eprintln!("error: check {}: {}", id, message);
                return ExitCode::from(EXIT_PARSE_ERROR);
            }
            Err(CommandError::Precondition(message)) => {
                eprintln!("error: check {}: precondition failed: {}", id, message);
                return ExitCode::from(3);
            }
        }
    }

    let (status, exit_code) = Report::summarize(&records);
    let report = Report {
        schema: SCHEMA.to_string(),
        problem: ProblemInfo { n: spec.dims.n, d: spec.dims.d },
        seed: common.seed,
        tuples_degree: common.tuples_degree,
        max_order: common.max_order,
        checks: records,
        status,
        exit_code,
    };

    if common.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print_text_report(&report);
    }
    ExitCode::from(u8::try_from(exit_code).unwrap_or(1))
}
