//! Symbolic and concrete state vectors.
//!
//! Qubit 0 is the leftmost (most significant) tensor factor: basis index bit
//! `n - 1 - k` holds qubit `k`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::{Ratio, Rational64};
use num_traits::{One, Zero};

use crate::phase::{PhaseAssignment, PhaseError, PhaseExpr, PhaseSymbol};

/// Terms with a smaller coefficient magnitude are dropped.
pub const COEFF_EPS: f64 = 1e-12;
/// Tolerance on `α² + β² = 1` for preparation and rotation parameters.
pub const NORM_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("amplitudes not normalized: α² + β² = {0}")]
    NotNormalized(f64),
    #[error("amplitude coefficients must be nonnegative, got α = {alpha}, β = {beta}")]
    NegativeCoefficient { alpha: f64, beta: f64 },
    #[error("state would have {requested} qubits, limit is {limit}")]
    SizeOverflow { requested: usize, limit: usize },
    #[error("amplitude {index} has {terms} terms; relative phase rank needs a monomial state")]
    NotMonomial { index: usize, terms: usize },
    #[error("expected {expected} amplitudes, got {actual}")]
    BadLength { expected: usize, actual: usize },
    #[error("basis index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

/// Checks `α, β ≥ 0` and `α² + β² = 1` within [`NORM_TOL`].
pub fn check_real_pair(alpha: f64, beta: f64) -> Result<(), StateError> {
    if !(alpha >= 0.0 && beta >= 0.0) {
        return Err(StateError::NegativeCoefficient { alpha, beta });
    }
    let n = alpha * alpha + beta * beta;
    if (n - 1.0).abs() > NORM_TOL {
        return Err(StateError::NotNormalized(n));
    }
    Ok(())
}

/// `Σ coeff·e^{i·phase}` over a canonical term list.
///
/// Canonical form: every coefficient is strictly positive (a negative sign is
/// carried as a `+π` offset), no two terms share a phase, and terms are sorted
/// by phase. Terms whose phases differ by exactly π are merged with opposite
/// signs, so exact cancellations vanish.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolicAmplitude {
    terms: Vec<(f64, PhaseExpr)>,
}

impl SymbolicAmplitude {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1.0, PhaseExpr::zero())
    }

    pub fn monomial(coeff: f64, phase: PhaseExpr) -> Self {
        Self::from_terms([(coeff, phase)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (f64, PhaseExpr)>) -> Self {
        let one = Rational64::one();
        // Key: phase with its π offset reduced into [0, 1).
        let mut merged: BTreeMap<PhaseExpr, f64> = BTreeMap::new();
        for (c, p) in terms {
            let (key, signed) = if p.pi_offset() >= one {
                (p.shifted_by_pi(-one), -c)
            } else {
                (p, c)
            };
            *merged.entry(key).or_insert(0.0) += signed;
        }
        let mut out: Vec<(f64, PhaseExpr)> = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= COEFF_EPS)
            .map(|(p, c)| if c < 0.0 { (-c, p.shifted_by_pi(one)) } else { (c, p) })
            .collect();
        out.sort_by(|a, b| a.1.cmp(&b.1));
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(f64, PhaseExpr)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .flat_map(|(c1, p1)| other.terms.iter().map(move |(c2, p2)| (c1 * c2, p1 + p2))),
        )
    }

    /// Multiplies every term by `e^{i·phase}`.
    pub fn rotated(&self, phase: &PhaseExpr) -> Self {
        Self::from_terms(self.terms.iter().map(|(c, p)| (*c, p + phase)))
    }

    pub fn eval(&self, a: &PhaseAssignment) -> Result<Complex64, PhaseError> {
        self.terms.iter().try_fold(Complex64::zero(), |acc, (c, p)| {
            Ok(acc + Complex64::from_polar(*c, p.eval(a)?))
        })
    }

    pub fn symbols(&self) -> impl Iterator<Item = &PhaseSymbol> {
        self.terms.iter().flat_map(|(_, p)| p.symbols())
    }

    /// Identical phases term by term, coefficients within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((c1, p1), (c2, p2))| p1 == p2 && (c1 - c2).abs() <= tol)
    }
}

/// Symbolic `2ⁿ`-entry amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicState {
    num_qubits: usize,
    amplitudes: Vec<SymbolicAmplitude>,
}

impl SymbolicState {
    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, StateError> {
        if num_qubits == 0 || num_qubits > DEFAULT_MAX_QUBITS {
            return Err(StateError::SizeOverflow {
                requested: num_qubits,
                limit: DEFAULT_MAX_QUBITS,
            });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(StateError::IndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![SymbolicAmplitude::zero(); dim];
        amplitudes[index] = SymbolicAmplitude::one();
        Ok(Self { num_qubits, amplitudes })
    }

    /// `α·e^{i·θ₀}|0⟩ + β·e^{i·θ₁}|1⟩`.
    pub fn prepare_qubit(alpha: f64, beta: f64, theta0: PhaseExpr, theta1: PhaseExpr) -> Result<Self, StateError> {
        check_real_pair(alpha, beta)?;
        Ok(Self {
            num_qubits: 1,
            amplitudes: vec![
                SymbolicAmplitude::monomial(alpha, theta0),
                SymbolicAmplitude::monomial(beta, theta1),
            ],
        })
    }

    /// Builds a state from raw amplitudes. Normalization is not checked.
    pub(crate) fn from_amplitudes(num_qubits: usize, amplitudes: Vec<SymbolicAmplitude>) -> Result<Self, StateError> {
        let expected = 1usize << num_qubits;
        if amplitudes.len() != expected {
            return Err(StateError::BadLength {
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[SymbolicAmplitude] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> &SymbolicAmplitude {
        &self.amplitudes[index]
    }

    pub fn symbols(&self) -> BTreeSet<PhaseSymbol> {
        self.amplitudes.iter().flat_map(|a| a.symbols().cloned()).collect()
    }

    /// `self ⊗ other` with the default qubit limit.
    pub fn tensor(&self, other: &Self) -> Result<Self, StateError> {
        self.tensor_with_limit(other, DEFAULT_MAX_QUBITS)
    }

    pub fn tensor_with_limit(&self, other: &Self, max_qubits: usize) -> Result<Self, StateError> {
        let n = self.num_qubits + other.num_qubits;
        if n > max_qubits {
            return Err(StateError::SizeOverflow {
                requested: n,
                limit: max_qubits,
            });
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a.mul(b)))
            .collect();
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Multiplies the whole state by `e^{i·phase}`.
    pub fn with_global_phase(&self, phase: &PhaseExpr) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a.rotated(phase)).collect(),
        }
    }

    pub fn evaluate(&self, a: &PhaseAssignment) -> Result<ConcreteState, StateError> {
        let amplitudes = self
            .amplitudes
            .iter()
            .map(|amp| amp.eval(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConcreteState {
            num_qubits: self.num_qubits,
            amplitudes,
        })
    }

    /// Number of independent unknown relative phases of a monomial state.
    ///
    /// Each nonzero amplitude's phase is mapped to its integer coefficient
    /// vector over all symbols; the result is the rational rank of the
    /// differences against the first nonzero amplitude.
    pub fn relative_phase_rank(&self) -> Result<usize, StateError> {
        for (index, amp) in self.amplitudes.iter().enumerate() {
            if amp.len() > 1 {
                return Err(StateError::NotMonomial {
                    index,
                    terms: amp.len(),
                });
            }
        }
        let symbols: Vec<PhaseSymbol> = self.symbols().into_iter().collect();
        let exponents: Vec<Vec<i64>> = self
            .amplitudes
            .iter()
            .filter_map(|a| a.terms().first())
            .map(|(_, p)| symbols.iter().map(|s| p.coefficient(s)).collect())
            .collect();
        let Some((reference, rest)) = exponents.split_first() else {
            return Ok(0);
        };
        let rows: Vec<Vec<i64>> = rest
            .iter()
            .map(|row| row.iter().zip(reference).map(|(x, r)| x - r).collect())
            .collect();
        Ok(rational_rank(rows, symbols.len()))
    }
}

/// Rank over ℚ by Gaussian elimination with exact rationals.
fn rational_rank(rows: Vec<Vec<i64>>, cols: usize) -> usize {
    let mut m: Vec<Vec<Ratio<i128>>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| Ratio::from_integer(x as i128)).collect())
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][col];
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col] / p;
                for (x, &v) in row[col..cols].iter_mut().zip(&pivot_row[col..cols]) {
                    *x -= f * v;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Numeric `2ⁿ`-entry state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl ConcreteState {
    /// Builds a state, rejecting wrong lengths and norms off by more than 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(StateError::BadLength {
                expected: dim.max(2).next_power_of_two(),
                actual: dim,
            });
        }
        let s = Self {
            num_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(StateError::NotNormalized(n));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Born-rule probabilities of the computational basis outcomes.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Elementwise tensor product.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
                .collect(),
        }
    }

    /// Applies a dense `2ᵏ×2ᵏ` row-major matrix to the `targets` qubits.
    ///
    /// `targets[0]` is the most significant qubit of the matrix's local index.
    pub fn apply_matrix(&self, matrix: &[Complex64], targets: &[usize]) -> Self {
        let k = targets.len();
        let dim = 1usize << k;
        assert_eq!(matrix.len(), dim * dim, "matrix size does not match targets");
        let n = self.num_qubits;
        let masks: Vec<usize> = targets.iter().map(|&t| 1usize << (n - 1 - t)).collect();
        let target_mask: usize = masks.iter().sum();
        let offset = |local: usize| -> usize {
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| local & (1 << (k - 1 - j)) != 0)
                .map(|(_, m)| m)
                .sum()
        };
        let offsets: Vec<usize> = (0..dim).map(offset).collect();
        let mut out = vec![Complex64::zero(); self.amplitudes.len()];
        for base in (0..self.amplitudes.len()).filter(|i| i & target_mask == 0) {
            for r in 0..dim {
                out[base + offsets[r]] = (0..dim)
                    .map(|c| matrix[r * dim + c] * self.amplitudes[base + offsets[c]])
                    .sum();
            }
        }
        Self {
            num_qubits: n,
            amplitudes: out,
        }
    }
}
