//! Exact symbolic phase angles.
//!
//! A [`PhaseExpr`] is an integer-linear combination of named unknown phase
//! symbols plus an exact rational multiple of π. Expressions are always kept
//! in canonical form (no zero coefficients, π offset in `[0, 2)`), so
//! structural equality is symbolic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhaseError {
    #[error("invalid phase symbol name {0:?}")]
    InvalidSymbol(String),
    #[error("unbound phase symbol `{0}`")]
    UnboundSymbol(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
}

/// Returns true if `name` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Name of an unknown phase angle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhaseSymbol(String);

impl PhaseSymbol {
    pub fn new(name: impl Into<String>) -> Result<Self, PhaseError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Self(name))
        } else {
            Err(PhaseError::InvalidSymbol(name))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reduces `r` into the half-open interval `[0, 2)`.
fn reduce_mod_two(r: Rational64) -> Rational64 {
    let two = Rational64::from_integer(2);
    let q = (r / two).floor();
    r - q * two
}

/// `Σ coeff·symbol + pi_offset·π`, canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PhaseExpr {
    terms: BTreeMap<PhaseSymbol, i64>,
    pi_offset: Rational64,
}

impl PhaseExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single symbol `s` with coefficient one.
    pub fn symbol(s: PhaseSymbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, 1);
        Self {
            terms,
            pi_offset: Rational64::zero(),
        }
    }

    /// Convenience for tests and examples; panics on an invalid name.
    pub fn var(name: &str) -> Self {
        Self::symbol(PhaseSymbol::new(name).expect("valid symbol name"))
    }

    /// A pure constant `offset·π`.
    pub fn pi(offset: Rational64) -> Self {
        Self {
            terms: BTreeMap::new(),
            pi_offset: reduce_mod_two(offset),
        }
    }

    pub fn from_parts(terms: impl IntoIterator<Item = (PhaseSymbol, i64)>, pi_offset: Rational64) -> Self {
        let mut out = BTreeMap::new();
        for (s, c) in terms {
            *out.entry(s).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        Self {
            terms: out,
            pi_offset: reduce_mod_two(pi_offset),
        }
    }

    pub fn terms(&self) -> &BTreeMap<PhaseSymbol, i64> {
        &self.terms
    }

    pub fn pi_offset(&self) -> Rational64 {
        self.pi_offset
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.pi_offset.is_zero()
    }

    /// True when no symbols appear (a pure multiple of π).
    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &PhaseSymbol) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &PhaseSymbol> {
        self.terms.keys()
    }

    /// Shifts the expression by `k·π`.
    pub fn shifted_by_pi(&self, k: Rational64) -> Self {
        Self {
            terms: self.terms.clone(),
            pi_offset: reduce_mod_two(self.pi_offset + k),
        }
    }

    /// `Σ coeff·binding + pi_offset·π`; not reduced modulo 2π.
    pub fn eval(&self, assignment: &PhaseAssignment) -> Result<f64, PhaseError> {
        let mut acc = self.offset_radians();
        for (s, &c) in &self.terms {
            acc += c as f64 * assignment.get(s)?;
        }
        Ok(acc)
    }

    pub fn offset_radians(&self) -> f64 {
        self.pi_offset.to_f64().unwrap_or(0.0) * std::f64::consts::PI
    }
}

impl Add for &PhaseExpr {
    type Output = PhaseExpr;

    fn add(self, rhs: &PhaseExpr) -> PhaseExpr {
        let mut terms = self.terms.clone();
        for (s, c) in &rhs.terms {
            *terms.entry(s.clone()).or_insert(0) += c;
        }
        terms.retain(|_, c| *c != 0);
        PhaseExpr {
            terms,
            pi_offset: reduce_mod_two(self.pi_offset + rhs.pi_offset),
        }
    }
}

impl Add for PhaseExpr {
    type Output = PhaseExpr;

    fn add(self, rhs: PhaseExpr) -> PhaseExpr {
        &self + &rhs
    }
}

impl Neg for &PhaseExpr {
    type Output = PhaseExpr;

    fn neg(self) -> PhaseExpr {
        PhaseExpr {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect(),
            pi_offset: reduce_mod_two(-self.pi_offset),
        }
    }
}

impl Neg for PhaseExpr {
    type Output = PhaseExpr;

    fn neg(self) -> PhaseExpr {
        -&self
    }
}

impl Sub for &PhaseExpr {
    type Output = PhaseExpr;

    fn sub(self, rhs: &PhaseExpr) -> PhaseExpr {
        self + &(-rhs)
    }
}

impl Sub for PhaseExpr {
    type Output = PhaseExpr;

    fn sub(self, rhs: PhaseExpr) -> PhaseExpr {
        &self - &rhs
    }
}

impl fmt::Display for PhaseExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, &c) in &self.terms {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match c.abs() {
                1 => write!(f, "{s}")?,
                k => write!(f, "{k}{s}")?,
            }
            first = false;
        }
        if !self.pi_offset.is_zero() {
            if !first {
                f.write_str(" + ")?;
            }
            let p = self.pi_offset;
            if p.is_integer() {
                write!(f, "{}π", p.to_integer())?;
            } else {
                write!(f, "{}/{}π", p.numer(), p.denom())?;
            }
        }
        Ok(())
    }
}

/// Distribution assumed over an unknown phase symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhasePrior {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl PhasePrior {
    pub fn fixed(value: f64) -> Result<Self, PhaseError> {
        if value.is_finite() {
            Ok(Self::Fixed(value))
        } else {
            Err(PhaseError::InvalidPrior(format!("fixed value {value} is not finite")))
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, PhaseError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self::Uniform { lo, hi })
        } else {
            Err(PhaseError::InvalidPrior(format!(
                "uniform bounds must satisfy lo < hi, got [{lo}, {hi})"
            )))
        }
    }

    /// Prior used when a symbol is declared without one: uniform on `[0, 2π)`.
    pub fn unknown() -> Self {
        Self::Uniform {
            lo: 0.0,
            hi: std::f64::consts::TAU,
        }
    }

    /// Draws the binding of `symbol` for sample `sample_index`.
    ///
    /// The value depends only on `(seed, sample_index, symbol)`.
    pub fn sample(&self, seed: u64, sample_index: u64, symbol: &PhaseSymbol) -> f64 {
        match *self {
            Self::Fixed(v) => v,
            Self::Uniform { lo, hi } => {
                let mut r = rng::counter_rng(seed, sample_index, symbol.name());
                r.gen_range(lo..hi)
            }
        }
    }
}

/// Concrete symbol → radians binding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseAssignment {
    bindings: BTreeMap<PhaseSymbol, f64>,
}

impl PhaseAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, s: PhaseSymbol, radians: f64) -> &mut Self {
        self.bindings.insert(s, radians);
        self
    }

    pub fn with(mut self, name: &str, radians: f64) -> Self {
        self.bind(PhaseSymbol::new(name).expect("valid symbol name"), radians);
        self
    }

    pub fn get(&self, s: &PhaseSymbol) -> Result<f64, PhaseError> {
        self.bindings
            .get(s)
            .copied()
            .ok_or_else(|| PhaseError::UnboundSymbol(s.name().to_owned()))
    }

    pub fn bindings(&self) -> &BTreeMap<PhaseSymbol, f64> {
        &self.bindings
    }
}

impl FromIterator<(PhaseSymbol, f64)> for PhaseAssignment {
    fn from_iter<I: IntoIterator<Item = (PhaseSymbol, f64)>>(iter: I) -> Self {
        Self {
            bindings: iter.into_iter().collect(),
        }
    }
}

/// Samples every prior for one ensemble member.
pub fn sample_assignment(priors: &BTreeMap<PhaseSymbol, PhasePrior>, seed: u64, sample_index: u64) -> PhaseAssignment {
    priors
        .iter()
        .map(|(s, p)| (s.clone(), p.sample(seed, sample_index, s)))
        .collect()
}

/// True when the lowest-ordered symbol carries a negative coefficient.
pub(crate) fn leading_coefficient_negative(e: &PhaseExpr) -> bool {
    e.terms.values().next().is_some_and(|c| c.is_negative())
}
