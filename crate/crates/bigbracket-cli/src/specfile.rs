//! Problem-specification files: a sectioned key/value text format with
//! quoted expression strings.
//!
//! ```text
//! # a comment
//! [problem]
//! n = 2
//! d = 2
//!
//! [bindings]
//! theta = "p1*xi1 + p2*xi2"
//! pi    = "x1 th1*th2"
//!
//! `[checks]`
//! check-courant
//! torsion --j nswap --lambda 1
//! ```
//!
//! Bindings are ordered; an expression may reference names bound above it
//! (forward references are rejected). Files may use LF or CRLF endings.

use std::collections::BTreeMap;

use bigbracket::superalgebra::{Dims, Superfunction};

use crate::expr::{is_generator_name, parse_with_env, ParseError};

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub dims: Dims,
    /// Bindings in declaration order, with their source expressions.
    pub bindings: Vec<(String, String)>,
    pub env: BTreeMap<String, Superfunction>,
    /// Check command lines (tokenized) from the `[checks]` section.
    pub checks: Vec<Vec<String>>,
}

#[derive(Debug, Clone)]
pub struct SpecError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for SpecError {}

fn spec_err<T>(line: usize, message: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError { line, message: message.into() })
}

fn from_parse_error(line: usize, e: ParseError) -> SpecError {
    SpecError { line, message: format!("in expression at column {}: {}", e.col, e.message) }
}

/// Splits a check line into tokens, honoring double quotes.
pub fn tokenize_command(line: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in line.chars() {
        match c {
            '"' => {
                if in_quotes {
                    out.push(std::mem::take(&mut current));
                }
                in_quotes = !in_quotes;
            }
            c if c.is_whitespace() && !in_quotes => {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if in_quotes {
        return Err("unterminated quote".into());
    }
    if !current.is_empty() {
        out.push(current);
    }
    Ok(out)
}

enum Section {
    None,
    Problem,
    Bindings,
    Checks,
}

/// Parses a `key = value` line; the value keeps its quotes stripped.
fn parse_kv(line: &str) -> Option<(String, String)> {
    let (key, value) = line.split_once('=')?;
    let key = key.trim().to_string();
    let mut value = value.trim().to_string();
    if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
        value = value[1..value.len() - 1].to_string();
    }
    Some((key, value))
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec, SpecError> {
    let mut section = Section::None;
    let mut n: Option<u32> = None;
    let mut d: Option<u32> = None;
    let mut raw_bindings: Vec<(usize, String, String)> = Vec::new();
    let mut checks: Vec<Vec<String>> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim_end_matches('\r').trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name.trim() {
                "problem" => Section::Problem,
                "bindings" => Section::Bindings,
                "checks" => Section::Checks,
                other => return spec_err(lineno, format!("unknown section [{}]", other)),
            };
            continue;
        }
        match section {
            Section::None => {
                return spec_err(lineno, "content before the first section header");
            }
            Section::Problem => {
                let Some((key, value)) = parse_kv(line) else {
                    return spec_err(lineno, "expected 'key = value'");
                };
                let parsed: u32 = value
                    .parse()
                    .map_err(|_| SpecError { line: lineno, message: format!("invalid integer '{}'", value) })?;
                match key.as_str() {
                    "n" => n = Some(parsed),
                    "d" => d = Some(parsed),
                    other => return spec_err(lineno, format!("unknown problem key '{}'", other)),
                }
            }
            Section::Bindings => {
                let Some((key, value)) = parse_kv(line) else {
                    return spec_err(lineno, "expected 'name = \"expression\"'");
                };
                raw_bindings.push((lineno, key, value));
            }
            Section::Checks => {
                let tokens = tokenize_command(line)
                    .map_err(|m| SpecError { line: lineno, message: m })?;
                if !tokens.is_empty() {
                    checks.push(tokens);
                }
            }
        }
    }

    let n = n.ok_or(SpecError { line: 0, message: "missing problem key 'n'".into() })?;
    let d = d.ok_or(SpecError { line: 0, message: "missing problem key 'd'".into() })?;
    if d == 0 {
        return spec_err(0, "fibre dimension d must be positive");
    }
    let dims = Dims::new(n, d);

    let mut env: BTreeMap<String, Superfunction> = BTreeMap::new();
    let mut bindings = Vec::new();
    for (lineno, name, src) in raw_bindings {
        if env.contains_key(&name) {
            return spec_err(lineno, format!("duplicate binding '{}'", name));
        }
        if is_generator_name(&name) {
            return spec_err(lineno, format!("binding '{}' collides with generator syntax", name));
        }
        // Only names bound above are visible: forward references fail here.
        let value = parse_with_env(&src, dims, Some(&env))
            .map_err(|e| from_parse_error(lineno, e))?;
        env.insert(name.clone(), value);
        bindings.push((name, src));
    }

    Ok(ProblemSpec { dims, bindings, env, checks })
}
