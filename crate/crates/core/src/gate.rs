//! Symbolic unitary gates and their application to symbolic states.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::phase::{PhaseAssignment, PhaseError, PhaseExpr, PhasePrior, PhaseSymbol};
use crate::state::{check_real_pair, StateError, SymbolicAmplitude, SymbolicState};

/// Largest number of terms an amplitude may reach during gate application.
pub const MAX_AMPLITUDE_TERMS: usize = 4096;

/// Seed used by [`check_unitary`] to draw its random assignments.
const UNITARITY_SEED: u64 = 0x005e_ed0f_0417;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GateError {
    #[error("bad targets {targets:?} for a {arity}-qubit gate on {num_qubits} qubits")]
    BadTargets {
        targets: Vec<usize>,
        arity: usize,
        num_qubits: usize,
    },
    #[error("amplitude {index} grew to {terms} terms (limit {MAX_AMPLITUDE_TERMS})")]
    TermBlowup { index: usize, terms: usize },
    #[error("gate entries do not form a unitary matrix")]
    NotUnitary,
    #[error("gate of arity {arity} needs {expected} entries, got {actual}")]
    BadShape {
        arity: usize,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// A `2ᵏ×2ᵏ` matrix of symbolic amplitudes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    arity: usize,
    entries: Vec<SymbolicAmplitude>,
}

impl GateMatrix {
    /// Builds a custom gate. Rejected unless it passes
    /// `check_unitary(·, 32, 1e-9)`.
    pub fn from_entries(arity: usize, entries: Vec<SymbolicAmplitude>) -> Result<Self, GateError> {
        let g = Self::from_entries_unchecked(arity, entries)?;
        if check_unitary(&g, 32, 1e-9) {
            Ok(g)
        } else {
            Err(GateError::NotUnitary)
        }
    }

    /// Shape-checked construction without the unitarity check. Used to
    /// build negative controls for the verification suite.
    pub fn from_entries_unchecked(arity: usize, entries: Vec<SymbolicAmplitude>) -> Result<Self, GateError> {
        let dim = 1usize << arity;
        if arity == 0 || entries.len() != dim * dim {
            return Err(GateError::BadShape {
                arity,
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self { arity, entries })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn entry(&self, row: usize, col: usize) -> &SymbolicAmplitude {
        &self.entries[row * self.dim() + col]
    }

    pub fn symbols(&self) -> BTreeSet<PhaseSymbol> {
        self.entries.iter().flat_map(|e| e.symbols().cloned()).collect()
    }

    /// Row-major numeric matrix under `a`.
    pub fn evaluate(&self, a: &PhaseAssignment) -> Result<Vec<Complex64>, PhaseError> {
        self.entries.iter().map(|e| e.eval(a)).collect()
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix) -> Result<GateMatrix, GateError> {
        if self.arity != rhs.arity {
            return Err(GateError::BadShape {
                arity: self.arity,
                expected: self.entries.len(),
                actual: rhs.entries.len(),
            });
        }
        let d = self.dim();
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let terms = (0..d).flat_map(|k| self.entry(r, k).mul(rhs.entry(k, c)).terms().to_vec());
                entries.push(SymbolicAmplitude::from_terms(terms));
            }
        }
        Ok(GateMatrix {
            arity: self.arity,
            entries,
        })
    }
}

fn pi() -> PhaseExpr {
    PhaseExpr::pi(Rational64::one())
}

/// The general rotation
/// `[[α e^{iθ₁}, β e^{−iθ₂}], [β e^{iθ₂}, −α e^{−iθ₁}]]`.
pub fn general_rotation(alpha: f64, beta: f64, theta1: PhaseExpr, theta2: PhaseExpr) -> Result<GateMatrix, GateError> {
    check_real_pair(alpha, beta)?;
    let entries = vec![
        SymbolicAmplitude::monomial(alpha, theta1.clone()),
        SymbolicAmplitude::monomial(beta, -&theta2),
        SymbolicAmplitude::monomial(beta, theta2),
        SymbolicAmplitude::monomial(alpha, &(-&theta1) + &pi()),
    ];
    Ok(GateMatrix { arity: 1, entries })
}

/// `M = (1/√2)[[1, 1], [1, −1]]`.
pub fn hadamard_m() -> GateMatrix {
    let h = |p: PhaseExpr| SymbolicAmplitude::monomial(FRAC_1_SQRT_2, p);
    GateMatrix {
        arity: 1,
        entries: vec![
            h(PhaseExpr::zero()),
            h(PhaseExpr::zero()),
            h(PhaseExpr::zero()),
            h(pi()),
        ],
    }
}

/// `diag(1, −1)`.
pub fn phase_flip() -> GateMatrix {
    GateMatrix {
        arity: 1,
        entries: vec![
            SymbolicAmplitude::one(),
            SymbolicAmplitude::zero(),
            SymbolicAmplitude::zero(),
            SymbolicAmplitude::monomial(1.0, pi()),
        ],
    }
}

/// `e^{iθ}·I` on one qubit.
pub fn global_phase(theta: PhaseExpr) -> GateMatrix {
    GateMatrix {
        arity: 1,
        entries: vec![
            SymbolicAmplitude::monomial(1.0, theta.clone()),
            SymbolicAmplitude::zero(),
            SymbolicAmplitude::zero(),
            SymbolicAmplitude::monomial(1.0, theta),
        ],
    }
}

fn validate_targets(g: &GateMatrix, n: usize, targets: &[usize]) -> Result<(), GateError> {
    let distinct: BTreeSet<_> = targets.iter().collect();
    if targets.len() != g.arity || distinct.len() != targets.len() || targets.iter().any(|&t| t >= n) {
        return Err(GateError::BadTargets {
            targets: targets.to_vec(),
            arity: g.arity,
            num_qubits: n,
        });
    }
    Ok(())
}

/// Applies `g` to the `targets` qubits of `s`.
///
/// `targets[0]` is the most significant qubit of the gate's local index. The
/// full `2ⁿ×2ⁿ` operator is never formed; each block of amplitudes that
/// differ only on the target bits is transformed in place.
pub fn apply(g: &GateMatrix, s: &SymbolicState, targets: &[usize]) -> Result<SymbolicState, GateError> {
    let n = s.num_qubits();
    validate_targets(g, n, targets)?;
    let k = g.arity;
    let d = g.dim();
    let masks: Vec<usize> = targets.iter().map(|&t| 1usize << (n - 1 - t)).collect();
    let target_mask: usize = masks.iter().sum();
    let offsets: Vec<usize> = (0..d)
        .map(|local| {
            (0..k)
                .filter(|j| local & (1 << (k - 1 - j)) != 0)
                .map(|j| masks[j])
                .sum()
        })
        .collect();

    let amps = s.amplitudes();
    let mut out = vec![SymbolicAmplitude::zero(); amps.len()];
    for base in (0..amps.len()).filter(|i| i & target_mask == 0) {
        for r in 0..d {
            let mut terms = Vec::new();
            for c in 0..d {
                let e = g.entry(r, c);
                let a = &amps[base + offsets[c]];
                if e.is_zero() || a.is_zero() {
                    continue;
                }
                terms.extend_from_slice(e.mul(a).terms());
            }
            let amp = SymbolicAmplitude::from_terms(terms);
            let index = base + offsets[r];
            if amp.len() > MAX_AMPLITUDE_TERMS {
                return Err(GateError::TermBlowup {
                    index,
                    terms: amp.len(),
                });
            }
            out[index] = amp;
        }
    }
    Ok(SymbolicState::from_amplitudes(n, out)?)
}

/// Largest entry magnitude of `U†U − I` for a row-major `d×d` matrix.
pub fn unitarity_residual(u: &[Complex64], d: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let dot: Complex64 = (0..d).map(|k| u[k * d + i].conj() * u[k * d + j]).sum();
            let target = if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// True iff `U†U` is within `tol` of the identity (max-norm) for `trials`
/// random assignments of the gate's symbols, drawn uniformly on `[0, 2π)`.
pub fn check_unitary(g: &GateMatrix, trials: usize, tol: f64) -> bool {
    let symbols = g.symbols();
    let prior = PhasePrior::unknown();
    (0..trials.max(1) as u64).all(|i| {
        let a: PhaseAssignment = symbols
            .iter()
            .map(|s| (s.clone(), prior.sample(UNITARITY_SEED, i, s)))
            .collect();
        match g.evaluate(&a) {
            Ok(u) => unitarity_residual(&u, g.dim()) < tol,
            Err(_) => false,
        }
    })
}
