//! Closed-form outcome probabilities and the arcsine law of `P(0)`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_rational::Rational64;
use num_traits::One;

use crate::gate::{apply, global_phase, hadamard_m, GateError, GateMatrix};
use crate::phase::{leading_coefficient_negative, PhaseAssignment, PhaseError, PhaseExpr, PhaseSymbol};
use crate::state::{StateError, SymbolicState, COEFF_EPS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("outcome {outcome} out of range for a {dim}-dimensional state")]
    OutcomeOutOfRange { outcome: usize, dim: usize },
    #[error("value {0} outside the domain of the arcsine law")]
    Domain(f64),
    #[error("distributions have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("not a probability distribution: {0}")]
    InvalidDistribution(String),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// `constant + Σ coeff·cos(delta)`.
///
/// Each delta is canonical: its lowest-ordered symbol has a positive
/// coefficient (cos is even) and its π offset lies in `[0, 1)` (a `+π` is
/// folded into the coefficient's sign). Pure-offset cosines are folded into
/// the constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbExpr {
    constant: f64,
    cosine_terms: Vec<(f64, PhaseExpr)>,
}

impl ProbExpr {
    pub fn new(constant: f64, terms: impl IntoIterator<Item = (f64, PhaseExpr)>) -> Self {
        let one = Rational64::one();
        let mut constant = constant;
        let mut merged: BTreeMap<PhaseExpr, f64> = BTreeMap::new();
        for (mut c, mut delta) in terms {
            if delta.is_constant() {
                constant += c * delta.offset_radians().cos();
                continue;
            }
            if leading_coefficient_negative(&delta) {
                delta = -delta;
            }
            if delta.pi_offset() >= one {
                delta = delta.shifted_by_pi(-one);
                c = -c;
            }
            *merged.entry(delta).or_insert(0.0) += c;
        }
        let cosine_terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= COEFF_EPS)
            .map(|(d, c)| (c, d))
            .collect();
        Self { constant, cosine_terms }
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn cosine_terms(&self) -> &[(f64, PhaseExpr)] {
        &self.cosine_terms
    }

    /// True when the expression has no symbolic dependence.
    pub fn is_constant(&self) -> bool {
        self.cosine_terms.is_empty()
    }

    pub fn eval(&self, a: &PhaseAssignment) -> Result<f64, PhaseError> {
        self.cosine_terms
            .iter()
            .try_fold(self.constant, |acc, (c, d)| Ok(acc + c * d.eval(a)?.cos()))
    }
}

impl fmt::Display for ProbExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (c, d) in &self.cosine_terms {
            let sign = if *c < 0.0 { '-' } else { '+' };
            write!(f, " {sign} {}·cos({d})", c.abs())?;
        }
        Ok(())
    }
}

/// Symbolic `|amplitude(outcome)|²`.
///
/// Expands `|Σ rⱼ e^{iφⱼ}|² = Σ rⱼ² + Σ_{j<k} 2 rⱼ r_k cos(φⱼ − φ_k)`.
pub fn outcome_prob_symbolic(s: &SymbolicState, outcome: usize) -> Result<ProbExpr, AnalyticsError> {
    if outcome >= s.dim() {
        return Err(AnalyticsError::OutcomeOutOfRange { outcome, dim: s.dim() });
    }
    let terms = s.amplitude(outcome).terms();
    let constant = terms.iter().map(|(r, _)| r * r).sum();
    let cross = terms
        .iter()
        .enumerate()
        .flat_map(|(j, (rj, pj))| terms[j + 1..].iter().map(move |(rk, pk)| (2.0 * rj * rk, pj - pk)));
    Ok(ProbExpr::new(constant, cross))
}

/// Symbol names used by [`prob0_after_m_general`].
pub const GENERAL_THETA1: &str = "t1";
pub const GENERAL_THETA2: &str = "t2";

/// `P(0)` after `M` acts on `α e^{iθ₁}|0⟩ + β e^{iθ₂}|1⟩`, derived through
/// the symbolic pipeline. The result is `½ + αβ·cos(θ₁ − θ₂)`.
pub fn prob0_after_m_general(alpha: f64, beta: f64) -> Result<ProbExpr, AnalyticsError> {
    let s = SymbolicState::prepare_qubit(
        alpha,
        beta,
        PhaseExpr::var(GENERAL_THETA1),
        PhaseExpr::var(GENERAL_THETA2),
    )?;
    let out = apply(&hadamard_m(), &s, &[0])?;
    outcome_prob_symbolic(&out, 0)
}

/// Arcsine density `1/(π√(y − y²))` on the open interval `(0, 1)`.
pub fn arcsine_pdf(y: f64) -> Result<f64, AnalyticsError> {
    if !(y > 0.0 && y < 1.0) {
        return Err(AnalyticsError::Domain(y));
    }
    Ok(1.0 / (PI * (y - y * y).sqrt()))
}

/// Arcsine distribution function `1 − arccos(2y − 1)/π` on `[0, 1]`.
pub fn arcsine_cdf(y: f64) -> Result<f64, AnalyticsError> {
    if !(0.0..=1.0).contains(&y) {
        return Err(AnalyticsError::Domain(y));
    }
    Ok(1.0 - (2.0 * y - 1.0).acos() / PI)
}

/// Mean of the arcsine law, i.e. the expected `P(0)` over a uniform phase
/// difference.
pub fn expected_prob0() -> f64 {
    0.5
}

/// Probabilities of the computational basis outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, AnalyticsError> {
        if probabilities.is_empty() {
            return Err(AnalyticsError::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(-1e-12..=1.0 + 1e-12).contains(*p)) {
            return Err(AnalyticsError::InvalidDistribution(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(AnalyticsError::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// `½ Σ |aⱼ − bⱼ|`.
pub fn total_variation(a: &OutcomeDistribution, b: &OutcomeDistribution) -> Result<f64, AnalyticsError> {
    if a.probabilities.len() != b.probabilities.len() {
        return Err(AnalyticsError::DimensionMismatch(
            a.probabilities.len(),
            b.probabilities.len(),
        ));
    }
    Ok(0.5
        * a.probabilities
            .iter()
            .zip(&b.probabilities)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

/// Reserved symbol that carries the shift in
/// [`global_phase_invariance_check`].
pub const GLOBAL_SHIFT_SYMBOL: &str = "__global_shift";

/// Total variation between the measurement distributions of `g|s⟩` and
/// `g·e^{iθ}|s⟩` under `a`. `g` acts on the leading `arity` qubits.
pub fn global_phase_invariance_check(
    g: &GateMatrix,
    s: &SymbolicState,
    theta: f64,
    a: &PhaseAssignment,
) -> Result<f64, AnalyticsError> {
    let targets: Vec<usize> = (0..g.arity()).collect();
    let shift = PhaseSymbol::new(GLOBAL_SHIFT_SYMBOL)?;
    let shifted = apply(&global_phase(PhaseExpr::symbol(shift.clone())), s, &[0])?;
    let mut a_shifted = a.clone();
    a_shifted.bind(shift, theta);

    let plain = apply(g, s, &targets)?.evaluate(a)?;
    let moved = apply(g, &shifted, &targets)?.evaluate(&a_shifted)?;
    let p = OutcomeDistribution::new(plain.probabilities())?;
    let q = OutcomeDistribution::new(moved.probabilities())?;
    total_variation(&p, &q)
}

/// The equal-superposition qubit with unknown component phases `t1`, `t2`.
pub fn equal_superposition() -> SymbolicState {
    SymbolicState::prepare_qubit(
        FRAC_1_SQRT_2,
        FRAC_1_SQRT_2,
        PhaseExpr::var(GENERAL_THETA1),
        PhaseExpr::var(GENERAL_THETA2),
    )
    .expect("1/√2 pair is normalized")
}
