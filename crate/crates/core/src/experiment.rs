//! Line-oriented experiment description format.
//!
//! ```text
//! # comment
//! qubit q0 alpha=0.70710678 beta=0.70710678 phase0=sym:t1 phase1=sym:t2
//! prior t1 uniform 0 3.141592653589793
//! prior t2 fixed 0
//! gate M q0
//! gate R(0.6,0.8,sym:a,fixed:0.25) q0
//! measure samples=1000000 shots=0 seed=42
//! ```
//!
//! One declaration per line. `key=value` arguments may appear in any order.
//! All errors in a file are collected in a single pass, each with a 1-based
//! line and column pointing into the offending token.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::gate::{general_rotation, global_phase, hadamard_m, phase_flip, GateError, GateMatrix};
use crate::monte_carlo::{EnsembleConfig, DEFAULT_SEED};
use crate::phase::{is_identifier, PhaseError, PhaseExpr, PhasePrior, PhaseSymbol};
use crate::state::{StateError, SymbolicState};

/// Sample count used when a file has no `measure` line.
pub const DEFAULT_FILE_SAMPLES: u64 = 100_000;

/// Tolerance on `alpha^2 + beta^2 = 1` for decimal amplitudes written in a
/// file. Accepted pairs are rescaled to unit norm by [`resolve`].
pub const FILE_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpec {
    Symbol(PhaseSymbol),
    Fixed(f64),
}

impl fmt::Display for PhaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Symbol(s) => write!(f, "sym:{s}"),
            Self::Fixed(v) => write!(f, "fixed:{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitDecl {
    pub name: String,
    pub alpha: f64,
    pub beta: f64,
    pub phase0: PhaseSpec,
    pub phase1: PhaseSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorDecl {
    pub symbol: PhaseSymbol,
    pub prior: PhasePrior,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateParam {
    Real(f64),
    Phase(PhaseSpec),
}

impl fmt::Display for GateParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Real(v) => write!(f, "{v}"),
            Self::Phase(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateStep {
    pub name: String,
    pub params: Vec<GateParam>,
    pub targets: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasureDecl {
    pub samples: u64,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentAst {
    pub qubits: Vec<QubitDecl>,
    pub priors: Vec<PriorDecl>,
    pub gates: Vec<GateStep>,
    pub measure: Option<MeasureDecl>,
}

/// Canonical text: qubits, priors, gates, then the measure line.
impl fmt::Display for ExperimentAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.qubits {
            writeln!(
                f,
                "qubit {} alpha={} beta={} phase0={} phase1={}",
                q.name, q.alpha, q.beta, q.phase0, q.phase1
            )?;
        }
        for p in &self.priors {
            match p.prior {
                PhasePrior::Fixed(v) => writeln!(f, "prior {} fixed {v}", p.symbol)?,
                PhasePrior::Uniform { lo, hi } => writeln!(f, "prior {} uniform {lo} {hi}", p.symbol)?,
            }
        }
        for g in &self.gates {
            write!(f, "gate {}", g.name)?;
            if !g.params.is_empty() {
                let params: Vec<String> = g.params.iter().map(ToString::to_string).collect();
                write!(f, "({})", params.join(","))?;
            }
            writeln!(f, " {}", g.targets.join(" "))?;
        }
        if let Some(m) = &self.measure {
            write!(f, "measure samples={}", m.samples)?;
            if let Some(s) = m.shots {
                write!(f, " shots={s}")?;
            }
            if let Some(s) = m.seed {
                write!(f, " seed={s}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A token and the 1-based column of its first character.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

impl Token<'_> {
    /// Column of the character at byte offset `offset` inside the token.
    fn column_at(&self, offset: usize) -> usize {
        self.column + self.text[..offset].chars().count()
    }
}

struct Parser {
    errors: Vec<ParseError>,
    line: usize,
}

impl Parser {
    fn error(&mut self, column: usize, message: impl Into<String>) {
        self.errors.push(ParseError {
            line: self.line,
            column,
            message: message.into(),
        });
    }
}

/// Splits on whitespace, keeping parenthesized groups together.
fn tokenize<'a>(p: &mut Parser, line: &'a str) -> Vec<Token<'a>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut depth = 0usize;
    let mut column = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() && depth == 0 {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &line[b..byte],
                    column: c,
                });
            }
            continue;
        }
        if start.is_none() {
            start = Some((byte, column));
        }
        match ch {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        if depth > 0 {
            p.error(c, "unbalanced parenthesis");
        }
        tokens.push(Token {
            text: &line[b..],
            column: c,
        });
    }
    tokens
}

/// Decimal real with optional exponent: `[+-]?(d+(.d*)?|.d+)([eE][+-]?d+)?`.
pub fn parse_real(s: &str) -> Option<f64> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != b.len() {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_int(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn real_at(p: &mut Parser, text: &str, column: usize, what: &str) -> Option<f64> {
    let v = parse_real(text);
    if v.is_none() {
        p.error(column, format!("invalid number `{text}` for {what}"));
    }
    v
}

fn name_at(p: &mut Parser, text: &str, column: usize, what: &str) -> Option<String> {
    if is_identifier(text) {
        Some(text.to_owned())
    } else {
        p.error(column, format!("invalid {what} name `{text}`"));
        None
    }
}

fn symbol_at(p: &mut Parser, text: &str, column: usize) -> Option<PhaseSymbol> {
    let name = name_at(p, text, column, "phase symbol")?;
    if name.starts_with("__") {
        p.error(
            column,
            format!("phase symbol names starting with `__` are reserved: `{name}`"),
        );
        return None;
    }
    PhaseSymbol::new(name).ok()
}

fn phase_spec_at(p: &mut Parser, text: &str, column: usize) -> Option<PhaseSpec> {
    if let Some(name) = text.strip_prefix("sym:") {
        symbol_at(p, name, column + 4).map(PhaseSpec::Symbol)
    } else if let Some(v) = text.strip_prefix("fixed:") {
        real_at(p, v, column + 6, "fixed phase").map(PhaseSpec::Fixed)
    } else {
        p.error(column, format!("expected `sym:NAME` or `fixed:REAL`, found `{text}`"));
        None
    }
}

/// `key=value` arguments, checked against `allowed`. Unknown and repeated
/// keys are reported.
fn key_values<'a>(p: &mut Parser, tokens: &[Token<'a>], allowed: &[&str]) -> BTreeMap<&'a str, (Token<'a>, usize)> {
    let mut out = BTreeMap::new();
    for t in tokens {
        let Some((key, value)) = t.text.split_once('=') else {
            p.error(t.column, format!("expected `key=value`, found `{}`", t.text));
            continue;
        };
        if !allowed.contains(&key) {
            p.error(t.column, format!("unknown argument `{key}`"));
            continue;
        }
        if out.contains_key(key) {
            p.error(t.column, format!("argument `{key}` given twice"));
            continue;
        }
        let value_column = t.column_at(key.len() + 1);
        out.insert(
            key,
            (
                Token {
                    text: value,
                    column: value_column,
                },
                t.column,
            ),
        );
    }
    out
}

/// Positions kept for validation after the whole file is read.
struct Positions {
    qubit_names: Vec<(usize, usize)>,
    // Every syntactically valid qubit name, including rejected declarations.
    mentioned_qubits: BTreeSet<String>,
    gate_targets: Vec<Vec<(usize, usize)>>,
    priors: Vec<(usize, usize)>,
}

fn parse_qubit(p: &mut Parser, head: Token, rest: &[Token]) -> Option<(QubitDecl, usize)> {
    let Some((name_tok, args)) = rest.split_first() else {
        p.error(head.column, "`qubit` needs a name");
        return None;
    };
    let name = name_at(p, name_tok.text, name_tok.column, "qubit");
    let kv = key_values(p, args, &["alpha", "beta", "phase0", "phase1"]);
    let mut missing = false;
    for key in ["alpha", "beta", "phase0", "phase1"] {
        if !kv.contains_key(key) {
            p.error(head.column, format!("`qubit` is missing `{key}=`"));
            missing = true;
        }
    }
    if missing {
        return None;
    }
    let coeff = |p: &mut Parser, key: &str| {
        let (t, arg_col) = kv[key];
        let v = real_at(p, t.text, t.column, key)?;
        if v < 0.0 {
            p.error(arg_col, format!("{key} must be nonnegative, got {v}"));
            return None;
        }
        Some(v)
    };
    let alpha = coeff(p, "alpha");
    let beta = coeff(p, "beta");
    let (t0, _) = kv["phase0"];
    let (t1, _) = kv["phase1"];
    let phase0 = phase_spec_at(p, t0.text, t0.column);
    let phase1 = phase_spec_at(p, t1.text, t1.column);
    let (alpha, beta) = (alpha?, beta?);
    let norm = alpha * alpha + beta * beta;
    if (norm - 1.0).abs() > FILE_NORM_TOL {
        p.error(
            kv["alpha"].1,
            format!("qubit `{}` not normalized: alpha^2 + beta^2 = {norm}", name_tok.text),
        );
        return None;
    }
    Some((
        QubitDecl {
            name: name?,
            alpha,
            beta,
            phase0: phase0?,
            phase1: phase1?,
        },
        name_tok.column,
    ))
}

fn parse_prior(p: &mut Parser, head: Token, rest: &[Token]) -> Option<(PriorDecl, usize)> {
    let [name_tok, kind, args @ ..] = rest else {
        p.error(
            head.column,
            "expected `prior NAME uniform LO HI` or `prior NAME fixed VALUE`",
        );
        return None;
    };
    let symbol = symbol_at(p, name_tok.text, name_tok.column);
    let prior = match (kind.text, args) {
        ("uniform", [lo, hi]) => {
            let lo_v = real_at(p, lo.text, lo.column, "lower bound");
            let hi_v = real_at(p, hi.text, hi.column, "upper bound");
            let (lo_v, hi_v) = (lo_v?, hi_v?);
            match PhasePrior::uniform(lo_v, hi_v) {
                Ok(prior) => prior,
                Err(_) => {
                    p.error(hi.column, format!("uniform prior needs lo < hi, got {lo_v} and {hi_v}"));
                    return None;
                }
            }
        }
        ("fixed", [v]) => PhasePrior::Fixed(real_at(p, v.text, v.column, "fixed value")?),
        ("uniform", _) | ("fixed", _) => {
            let col = args.get(2).or(args.get(1)).unwrap_or(kind).column;
            p.error(col, format!("wrong number of arguments for `{}` prior", kind.text));
            return None;
        }
        (other, _) => {
            p.error(kind.column, format!("unknown prior kind `{other}`"));
            return None;
        }
    };
    Some((PriorDecl { symbol: symbol?, prior }, name_tok.column))
}

fn parse_gate_param(p: &mut Parser, text: &str, column: usize) -> Option<GateParam> {
    let trimmed = text.trim_start();
    let column = column + (text.len() - trimmed.len());
    let trimmed = trimmed.trim_end();
    if trimmed.is_empty() {
        p.error(column, "empty gate parameter");
        return None;
    }
    if trimmed.starts_with("sym:") || trimmed.starts_with("fixed:") {
        phase_spec_at(p, trimmed, column).map(GateParam::Phase)
    } else {
        real_at(p, trimmed, column, "gate parameter").map(GateParam::Real)
    }
}

fn parse_gate(p: &mut Parser, head: Token, rest: &[Token]) -> Option<(GateStep, Vec<(usize, usize)>)> {
    let Some((spec, targets)) = rest.split_first() else {
        p.error(head.column, "`gate` needs a gate and at least one target");
        return None;
    };
    let (name_text, params) = match spec.text.find('(') {
        None => (spec.text, Vec::new()),
        Some(open) => {
            let inner_start = open + 1;
            if !spec.text.ends_with(')') || spec.text.len() <= open + 1 {
                p.error(spec.column, format!("malformed gate `{}`", spec.text));
                return None;
            }
            let inner = &spec.text[inner_start..spec.text.len() - 1];
            let mut params = Vec::new();
            let mut ok = true;
            if !inner.trim().is_empty() {
                let mut offset = inner_start;
                for piece in inner.split(',') {
                    match parse_gate_param(p, piece, spec.column_at(offset)) {
                        Some(v) => params.push(v),
                        None => ok = false,
                    }
                    offset += piece.len() + 1;
                }
            }
            if !ok {
                return None;
            }
            (&spec.text[..open], params)
        }
    };
    let name = name_at(p, name_text, spec.column, "gate");
    if targets.is_empty() {
        p.error(spec.column, "gate has no target qubits");
        return None;
    }
    let mut names = Vec::new();
    let mut positions = Vec::new();
    let mut seen = BTreeSet::new();
    for t in targets {
        if let Some(n) = name_at(p, t.text, t.column, "qubit") {
            if !seen.insert(n.clone()) {
                p.error(t.column, format!("qubit `{n}` targeted twice"));
                return None;
            }
            names.push(n);
            positions.push((p.line, t.column));
        }
    }
    if names.len() != targets.len() {
        return None;
    }
    Some((
        GateStep {
            name: name?,
            params,
            targets: names,
        },
        positions,
    ))
}

fn parse_measure(p: &mut Parser, head: Token, rest: &[Token]) -> Option<MeasureDecl> {
    let kv = key_values(p, rest, &["samples", "shots", "seed"]);
    let int = |p: &mut Parser, key: &str| -> Option<Option<u64>> {
        match kv.get(key) {
            None => Some(None),
            Some((t, _)) => match parse_int(t.text) {
                Some(v) => Some(Some(v)),
                None => {
                    p.error(t.column, format!("invalid integer `{}` for {key}", t.text));
                    None
                }
            },
        }
    };
    let samples = int(p, "samples");
    let shots = int(p, "shots");
    let seed = int(p, "seed");
    let samples = match samples? {
        None => {
            p.error(head.column, "`measure` is missing `samples=`");
            return None;
        }
        Some(0) => {
            p.error(kv["samples"].0.column, "samples must be at least 1");
            return None;
        }
        Some(n) => n,
    };
    Some(MeasureDecl {
        samples,
        shots: shots?,
        seed: seed?,
    })
}

/// Parses an experiment file, returning every error found.
pub fn parse(text: &str) -> Result<ExperimentAst, Vec<ParseError>> {
    let mut p = Parser {
        errors: Vec::new(),
        line: 0,
    };
    let mut ast = ExperimentAst::default();
    let mut pos = Positions {
        qubit_names: Vec::new(),
        mentioned_qubits: BTreeSet::new(),
        gate_targets: Vec::new(),
        priors: Vec::new(),
    };
    let mut measure_line: Option<usize> = None;

    for (i, raw) in text.split('\n').enumerate() {
        p.line = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let content = raw.split_once('#').map_or(raw, |(before, _)| before);
        let tokens = tokenize(&mut p, content);
        let Some((head, rest)) = tokens.split_first() else {
            continue;
        };
        match head.text {
            "qubit" => {
                if let Some(name) = rest.first().filter(|t| is_identifier(t.text)) {
                    pos.mentioned_qubits.insert(name.text.to_owned());
                }
                if let Some((q, col)) = parse_qubit(&mut p, *head, rest) {
                    ast.qubits.push(q);
                    pos.qubit_names.push((p.line, col));
                }
            }
            "prior" => {
                if let Some((d, col)) = parse_prior(&mut p, *head, rest) {
                    ast.priors.push(d);
                    pos.priors.push((p.line, col));
                }
            }
            "gate" => {
                if let Some((g, targets)) = parse_gate(&mut p, *head, rest) {
                    ast.gates.push(g);
                    pos.gate_targets.push(targets);
                }
            }
            "measure" => {
                if let Some(first) = measure_line {
                    p.error(head.column, format!("duplicate `measure` (first on line {first})"));
                } else if let Some(m) = parse_measure(&mut p, *head, rest) {
                    ast.measure = Some(m);
                    measure_line = Some(p.line);
                }
            }
            other => p.error(head.column, format!("unknown directive `{other}`")),
        }
    }

    validate(&ast, &pos, &mut p.errors);
    if p.errors.is_empty() {
        Ok(ast)
    } else {
        p.errors.sort_by_key(|e| (e.line, e.column));
        Err(p.errors)
    }
}

fn validate(ast: &ExperimentAst, pos: &Positions, errors: &mut Vec<ParseError>) {
    let mut declared = BTreeSet::new();
    for (q, &(line, column)) in ast.qubits.iter().zip(&pos.qubit_names) {
        if !declared.insert(q.name.as_str()) {
            errors.push(ParseError {
                line,
                column,
                message: format!("qubit `{}` declared twice", q.name),
            });
        }
    }
    for (g, targets) in ast.gates.iter().zip(&pos.gate_targets) {
        for (t, &(line, column)) in g.targets.iter().zip(targets) {
            if !pos.mentioned_qubits.contains(t.as_str()) {
                errors.push(ParseError {
                    line,
                    column,
                    message: format!("unknown qubit `{t}`"),
                });
            }
        }
    }
    let mut priors = BTreeSet::new();
    for (d, &(line, column)) in ast.priors.iter().zip(&pos.priors) {
        if !priors.insert(&d.symbol) {
            errors.push(ParseError {
                line,
                column,
                message: format!("second prior for symbol `{}`", d.symbol),
            });
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolveError {
    #[error("experiment declares no qubits")]
    NoQubits,
    #[error("gate step {step}: unknown gate `{name}`")]
    UnknownGate { step: usize, name: String },
    #[error("gate step {step}: `{name}` {message}")]
    ArityMismatch { step: usize, name: String, message: String },
    #[error("gate step {step}: unknown qubit `{name}`")]
    UnknownQubit { step: usize, name: String },
    #[error("gate step {step}: {source}")]
    Gate { step: usize, source: GateError },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// A resolved experiment, ready for [`crate::monte_carlo::run_ensemble`].
#[derive(Debug, Clone)]
pub struct Experiment {
    pub state: SymbolicState,
    pub gates: Vec<(GateMatrix, Vec<usize>)>,
    pub config: EnsembleConfig,
}

/// Maps `fixed:` phases onto phase expressions. Zero is the zero expression;
/// any other value becomes a reserved symbol with a fixed prior, since phase
/// expressions hold only rational multiples of π.
#[derive(Default)]
struct FixedPhases {
    by_bits: BTreeMap<u64, PhaseSymbol>,
    priors: Vec<(PhaseSymbol, f64)>,
}

impl FixedPhases {
    fn expr(&mut self, spec: &PhaseSpec) -> PhaseExpr {
        match spec {
            PhaseSpec::Symbol(s) => PhaseExpr::symbol(s.clone()),
            PhaseSpec::Fixed(v) if *v == 0.0 => PhaseExpr::zero(),
            PhaseSpec::Fixed(v) => {
                let next = self.by_bits.len();
                let priors = &mut self.priors;
                let sym = self
                    .by_bits
                    .entry(v.to_bits())
                    .or_insert_with(|| {
                        let sym = PhaseSymbol::new(format!("__fixed{next}")).expect("reserved names are valid");
                        priors.push((sym.clone(), *v));
                        sym
                    })
                    .clone();
                PhaseExpr::symbol(sym)
            }
        }
    }
}

/// Rescales a pair within [`FILE_NORM_TOL`] of unit norm; other pairs pass
/// through unchanged and are rejected downstream.
fn unit_pair(alpha: f64, beta: f64) -> (f64, f64) {
    let norm = alpha * alpha + beta * beta;
    if (norm - 1.0).abs() <= FILE_NORM_TOL {
        let scale = norm.sqrt();
        (alpha / scale, beta / scale)
    } else {
        (alpha, beta)
    }
}

fn resolve_gate(step: usize, g: &GateStep, fixed: &mut FixedPhases) -> Result<GateMatrix, ResolveError> {
    let arity = |message: String| ResolveError::ArityMismatch {
        step,
        name: g.name.clone(),
        message,
    };
    if g.targets.len() != 1 {
        return Err(arity(format!("acts on 1 qubit, got {} targets", g.targets.len())));
    }
    let expect_params = |n: usize| {
        if g.params.len() == n {
            Ok(())
        } else {
            Err(arity(format!("takes {n} parameters, got {}", g.params.len())))
        }
    };
    match g.name.as_str() {
        "M" => {
            expect_params(0)?;
            Ok(hadamard_m())
        }
        "PF" => {
            expect_params(0)?;
            Ok(phase_flip())
        }
        "GP" => {
            expect_params(1)?;
            match &g.params[0] {
                GateParam::Phase(p) => Ok(global_phase(fixed.expr(p))),
                GateParam::Real(_) => Err(arity("expects a phase (`sym:` or `fixed:`)".into())),
            }
        }
        "R" => {
            expect_params(4)?;
            match &g.params[..] {
                [GateParam::Real(a), GateParam::Real(b), GateParam::Phase(p1), GateParam::Phase(p2)] => {
                    let (t1, t2) = (fixed.expr(p1), fixed.expr(p2));
                    let (a, b) = unit_pair(*a, *b);
                    general_rotation(a, b, t1, t2).map_err(|source| ResolveError::Gate { step, source })
                }
                _ => Err(arity("expects (REAL, REAL, phase, phase)".into())),
            }
        }
        other => Err(ResolveError::UnknownGate {
            step,
            name: other.to_owned(),
        }),
    }
}

/// Builds the state, gate list and ensemble configuration.
///
/// Qubits are tensored in declaration order. Symbols without a declared
/// prior get [`PhasePrior::unknown`]. A missing `measure` line means
/// `samples=100000 shots=0 seed=42`.
pub fn resolve(ast: &ExperimentAst) -> Result<Experiment, ResolveError> {
    let mut fixed = FixedPhases::default();
    let mut state: Option<SymbolicState> = None;
    for q in &ast.qubits {
        let (alpha, beta) = unit_pair(q.alpha, q.beta);
        let qubit = SymbolicState::prepare_qubit(alpha, beta, fixed.expr(&q.phase0), fixed.expr(&q.phase1))?;
        state = Some(match state {
            None => qubit,
            Some(s) => s.tensor(&qubit)?,
        });
    }
    let state = state.ok_or(ResolveError::NoQubits)?;

    let index: BTreeMap<&str, usize> = ast
        .qubits
        .iter()
        .enumerate()
        .map(|(i, q)| (q.name.as_str(), i))
        .collect();
    let mut gates = Vec::with_capacity(ast.gates.len());
    for (step, g) in ast.gates.iter().enumerate() {
        let step = step + 1;
        let targets = g
            .targets
            .iter()
            .map(|t| {
                index
                    .get(t.as_str())
                    .copied()
                    .ok_or_else(|| ResolveError::UnknownQubit { step, name: t.clone() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        gates.push((resolve_gate(step, g, &mut fixed)?, targets));
    }

    let mut priors: BTreeMap<PhaseSymbol, PhasePrior> =
        ast.priors.iter().map(|d| (d.symbol.clone(), d.prior)).collect();
    for (sym, v) in fixed.priors {
        priors.insert(sym, PhasePrior::Fixed(v));
    }
    let used = state
        .symbols()
        .into_iter()
        .chain(gates.iter().flat_map(|(g, _)| g.symbols()));
    for sym in used {
        priors.entry(sym).or_insert_with(PhasePrior::unknown);
    }

    let measure = ast.measure.unwrap_or(MeasureDecl {
        samples: DEFAULT_FILE_SAMPLES,
        shots: None,
        seed: None,
    });
    let config = EnsembleConfig {
        samples: measure.samples,
        shots_per_sample: measure.shots.unwrap_or(0),
        seed: measure.seed.unwrap_or(DEFAULT_SEED),
        priors,
    };
    Ok(Experiment { state, gates, config })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const REFERENCE: &str = "qubit q0 alpha=0.70710678 beta=0.70710678 phase0=sym:t1 phase1=sym:t2\n\
                         prior t1 uniform 0 3.141592653589793\n\
                         prior t2 fixed 0\n\
                         gate M q0\n\
                         measure samples=1000000 seed=42";

    fn errors(text: &str) -> Vec<ParseError> {
        parse(text).expect_err("should fail")
    }

    #[test]
    fn parses_the_reference_experiment() {
        let ast = parse(REFERENCE).unwrap();
        assert_eq!(ast.qubits.len(), 1);
        assert_eq!(ast.priors.len(), 2);
        assert_eq!(ast.gates.len(), 1);
        assert_eq!(
            ast.measure,
            Some(MeasureDecl {
                samples: 1_000_000,
                shots: None,
                seed: Some(42)
            })
        );
        assert_eq!(ast.priors[0].prior, PhasePrior::Uniform { lo: 0.0, hi: PI });
    }

    #[test]
    fn unknown_qubit_is_positioned() {
        let e = errors("gate M q9");
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].line, e[0].column), (1, 8));
        assert!(e[0].message.contains("q9"));
    }

    #[test]
    fn unnormalized_qubit_is_rejected() {
        let e = errors("qubit q0 alpha=0.9 beta=0.9 phase0=fixed:0 phase1=fixed:0");
        assert_eq!(e.len(), 1);
        assert!(e[0].message.contains("not normalized"), "{}", e[0].message);
        assert_eq!(e[0].column, 10);
    }

    #[test]
    fn errors_are_collected_across_lines() {
        let e = errors("bogus\nqubit q0 alpha=x beta=1 phase0=sym:a phase1=sym:b\ngate M q1\n");
        let lines: Vec<usize> = e.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![1, 2, 3]);
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let ast = parse("# header\r\n\r\nqubit a alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0 # trailing\r\n").unwrap();
        assert_eq!(ast.qubits[0].name, "a");
        assert!(parse("").unwrap().qubits.is_empty());
    }

    #[test]
    fn gate_parameters_parse() {
        let ast =
            parse("qubit q0 alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0\ngate R(0.6, 0.8, sym:a, fixed:-1.5e-1) q0")
                .unwrap();
        assert_eq!(
            ast.gates[0].params,
            vec![
                GateParam::Real(0.6),
                GateParam::Real(0.8),
                GateParam::Phase(PhaseSpec::Symbol(PhaseSymbol::new("a").unwrap())),
                GateParam::Phase(PhaseSpec::Fixed(-0.15)),
            ]
        );
    }

    #[test]
    fn gate_parameter_error_column() {
        let e = errors("qubit q0 alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0\ngate R(0.6,zz,sym:a,sym:b) q0");
        assert_eq!((e[0].line, e[0].column), (2, 12));
    }

    #[test]
    fn real_grammar() {
        for ok in ["0", "-1", "+2.5", ".5", "5.", "1e3", "1.5E-7"] {
            assert!(parse_real(ok).is_some(), "{ok}");
        }
        for bad in ["", ".", "e5", "1e", "inf", "NaN", "0x10", "1.2.3", "1e999"] {
            assert!(parse_real(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn resolve_reference_experiment() {
        let exp = resolve(&parse(REFERENCE).unwrap()).unwrap();
        assert_eq!(exp.state.num_qubits(), 1);
        assert_eq!(exp.gates.len(), 1);
        assert_eq!(exp.gates[0].0, hadamard_m());
        assert_eq!(exp.config.samples, 1_000_000);
        assert_eq!(exp.config.seed, 42);
        assert_eq!(exp.config.shots_per_sample, 0);
        assert_eq!(
            exp.config.priors[&PhaseSymbol::new("t1").unwrap()],
            PhasePrior::Uniform { lo: 0.0, hi: PI }
        );
    }

    #[test]
    fn resolve_rotation_and_defaults() {
        let ast =
            parse("qubit q0 alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0\ngate R(0.6,0.8,sym:a,sym:b) q0").unwrap();
        let exp = resolve(&ast).unwrap();
        let expected = general_rotation(0.6, 0.8, PhaseExpr::var("a"), PhaseExpr::var("b")).unwrap();
        assert_eq!(exp.gates[0].0, expected);
        assert_eq!(exp.config.samples, DEFAULT_FILE_SAMPLES);
        assert_eq!(exp.config.seed, 42);
        assert_eq!(
            exp.config.priors[&PhaseSymbol::new("a").unwrap()],
            PhasePrior::unknown()
        );
    }

    #[test]
    fn resolve_rejects_unknown_gates_and_arity() {
        let q = "qubit q0 alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0\nqubit q1 alpha=1 beta=0 phase0=fixed:0 phase1=fixed:0\n";
        let err = resolve(&parse(&format!("{q}gate XYZ q0")).unwrap()).unwrap_err();
        assert_eq!(
            err,
            ResolveError::UnknownGate {
                step: 1,
                name: "XYZ".into()
            }
        );
        for bad in [
            "gate M(0.5) q0",
            "gate M q0 q1",
            "gate GP q0",
            "gate R(1,0,sym:a) q0",
            "gate GP(0.5) q0",
        ] {
            assert!(
                matches!(
                    resolve(&parse(&format!("{q}{bad}")).unwrap()),
                    Err(ResolveError::ArityMismatch { .. })
                ),
                "{bad}"
            );
        }
        assert!(matches!(
            resolve(&parse(&format!("{q}gate R(0.9,0.9,sym:a,sym:b) q0")).unwrap()),
            Err(ResolveError::Gate { step: 1, .. })
        ));
        assert_eq!(resolve(&ExperimentAst::default()).unwrap_err(), ResolveError::NoQubits);
    }

    #[test]
    fn fixed_phases_become_reserved_symbols() {
        let ast =
            parse("qubit q0 alpha=0.6 beta=0.8 phase0=fixed:0.5 phase1=fixed:0.5\ngate GP(fixed:1.25) q0").unwrap();
        let exp = resolve(&ast).unwrap();
        let f0 = PhaseSymbol::new("__fixed0").unwrap();
        let f1 = PhaseSymbol::new("__fixed1").unwrap();
        assert_eq!(exp.config.priors[&f0], PhasePrior::Fixed(0.5));
        assert_eq!(exp.config.priors[&f1], PhasePrior::Fixed(1.25));
        assert_eq!(exp.config.priors.len(), 2);
    }

    #[test]
    fn canonical_text_round_trips() {
        let ast = parse(REFERENCE).unwrap();
        assert_eq!(parse(&ast.to_string()).unwrap(), ast);
    }
}
