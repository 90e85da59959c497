//! Randomized property sweeps bundled behind `qphase verify`.
//!
//! The generators here are also used by the integration and acceptance
//! tests so that every sweep draws from the same families of states, gates
//! and assignments.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_rational::Rational64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analytics::{
    equal_superposition, global_phase_invariance_check, outcome_prob_symbolic, OutcomeDistribution,
};
use crate::gate::{apply, general_rotation, global_phase, hadamard_m, phase_flip, unitarity_residual, GateMatrix};
use crate::phase::{PhaseAssignment, PhaseExpr, PhaseSymbol};
use crate::state::{SymbolicAmplitude, SymbolicState};

pub const UNITARITY_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-10;
pub const INVARIANCE_TOL: f64 = 1e-12;
pub const AGREEMENT_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

const SYMBOL_POOL: [&str; 6] = ["s0", "s1", "s2", "s3", "s4", "s5"];

/// Seeded generators for random test inputs.
pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Nonnegative `(α, β)` on the unit circle.
    pub fn unit_pair(&mut self) -> (f64, f64) {
        let u = self.rng.gen_range(0.0..=FRAC_PI_2);
        (u.cos(), u.sin())
    }

    /// Up to three pool symbols with small integer coefficients plus a
    /// multiple of π/4.
    pub fn phase_expr(&mut self) -> PhaseExpr {
        let n = self.rng.gen_range(0..=3);
        let terms: Vec<(PhaseSymbol, i64)> = (0..n)
            .map(|_| {
                let s = SYMBOL_POOL[self.rng.gen_range(0..SYMBOL_POOL.len())];
                let c = [-2, -1, 1, 2][self.rng.gen_range(0..4)];
                (PhaseSymbol::new(s).expect("pool names are valid"), c)
            })
            .collect();
        PhaseExpr::from_parts(terms, Rational64::new(self.rng.gen_range(0..8), 4))
    }

    pub fn qubit(&mut self) -> SymbolicState {
        let (a, b) = self.unit_pair();
        let (p0, p1) = (self.phase_expr(), self.phase_expr());
        SymbolicState::prepare_qubit(a, b, p0, p1).expect("unit pair")
    }

    /// Product of `n` random qubits.
    pub fn product_state(&mut self, n: usize) -> SymbolicState {
        let mut s = self.qubit();
        for _ in 1..n {
            let q = self.qubit();
            s = s.tensor(&q).expect("small state");
        }
        s
    }

    /// One of `M`, phase flip, a global phase, or a general rotation.
    pub fn gate(&mut self) -> GateMatrix {
        match self.rng.gen_range(0..4) {
            0 => hadamard_m(),
            1 => phase_flip(),
            2 => global_phase(self.phase_expr()),
            _ => self.rotation(),
        }
    }

    pub fn rotation(&mut self) -> GateMatrix {
        let (a, b) = self.unit_pair();
        let (t1, t2) = (self.phase_expr(), self.phase_expr());
        general_rotation(a, b, t1, t2).expect("unit pair")
    }

    /// 1–3 qubits followed by 0–4 random single-qubit gates.
    pub fn pipeline_state(&mut self) -> SymbolicState {
        let n = self.rng.gen_range(1..=3);
        let mut s = self.product_state(n);
        for _ in 0..self.rng.gen_range(0..=4) {
            let g = self.gate();
            let t = self.rng.gen_range(0..n);
            s = apply(&g, &s, &[t]).expect("valid target");
        }
        s
    }

    /// Binds every pool symbol (and any in `extra`) uniformly on `[0, 2π)`.
    pub fn assignment(&mut self, extra: &BTreeSet<PhaseSymbol>) -> PhaseAssignment {
        let mut a = PhaseAssignment::new();
        for s in SYMBOL_POOL {
            a.bind(
                PhaseSymbol::new(s).expect("pool names are valid"),
                self.rng.gen_range(0.0..TAU),
            );
        }
        for s in extra {
            a.bind(s.clone(), self.rng.gen_range(0.0..TAU));
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub trials: usize,
    /// Largest observed deviation.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Adds a non-unitary shear to the unitarity sweep (negative control).
    pub corrupt_gate: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 42,
            corrupt_gate: false,
        }
    }
}

fn outcome(name: &'static str, trials: usize, worst: f64, tolerance: f64) -> PropertyOutcome {
    PropertyOutcome {
        name,
        trials,
        worst,
        tolerance,
        passed: worst < tolerance,
    }
}

/// The shear `[[1, 1], [0, 1]]`, built without the unitarity check.
pub fn shear_gate() -> GateMatrix {
    let one = SymbolicAmplitude::one;
    GateMatrix::from_entries_unchecked(1, vec![one(), one(), SymbolicAmplitude::zero(), one()]).expect("2x2 shape")
}

pub fn unitarity_sweep(trials: usize, seed: u64, corrupt_gate: bool) -> PropertyOutcome {
    let mut g = Generator::new(seed);
    let mut gates: Vec<GateMatrix> = vec![hadamard_m(), phase_flip(), global_phase(PhaseExpr::var("s0"))];
    gates.extend((0..trials).map(|_| g.rotation()));
    if corrupt_gate {
        gates.push(shear_gate());
    }
    let worst = gates
        .iter()
        .map(|gate| {
            let a = g.assignment(&BTreeSet::new());
            let u = gate.evaluate(&a).expect("pool symbols bound");
            unitarity_residual(&u, gate.dim())
        })
        .fold(0.0, f64::max);
    outcome("unitarity", gates.len(), worst, UNITARITY_TOL)
}

pub fn norm_sweep(trials: usize, seed: u64) -> PropertyOutcome {
    let mut g = Generator::new(seed);
    let worst = (0..trials)
        .map(|_| {
            let s = g.pipeline_state();
            let a = g.assignment(&BTreeSet::new());
            (s.evaluate(&a).expect("pool symbols bound").norm_sqr() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    outcome("norm-conservation", trials, worst, NORM_TOL)
}

pub fn global_phase_sweep(trials: usize, seed: u64) -> PropertyOutcome {
    let mut g = Generator::new(seed);
    let worst = (0..trials)
        .map(|_| {
            let gate = g.gate();
            let s = g.pipeline_state();
            let theta = g.rng().gen_range(-TAU..TAU);
            let a = g.assignment(&BTreeSet::new());
            global_phase_invariance_check(&gate, &s, theta, &a).unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    outcome("global-phase-invariance", trials, worst, INVARIANCE_TOL)
}

pub fn agreement_sweep(trials: usize, seed: u64) -> PropertyOutcome {
    let mut g = Generator::new(seed);
    let worst = (0..trials)
        .map(|_| {
            let s = g.pipeline_state();
            let a = g.assignment(&BTreeSet::new());
            let numeric = s.evaluate(&a).expect("pool symbols bound").probabilities();
            numeric
                .iter()
                .enumerate()
                .map(|(j, p)| {
                    let symbolic = outcome_prob_symbolic(&s, j)
                        .and_then(|e| Ok(e.eval(&a)?))
                        .unwrap_or(f64::INFINITY);
                    (symbolic - p).abs()
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    outcome("symbolic-numeric-agreement", trials, worst, AGREEMENT_TOL)
}

/// Interference after `M` on the equal superposition: `P(0) = ½ + ½cos(t1 − t2)`
/// and `P(1) = ½ − ½cos(t1 − t2)`; at `t1 − t2 = π/2` both are ½.
pub fn closed_form_check() -> PropertyOutcome {
    let s = apply(&hadamard_m(), &equal_superposition(), &[0]).expect("1-qubit target");
    let delta = PhaseExpr::var("t1") - PhaseExpr::var("t2");
    let mut worst = 0.0f64;
    for (outcome_index, sign) in [(0usize, 1.0), (1, -1.0)] {
        let p = outcome_prob_symbolic(&s, outcome_index).expect("in range");
        worst = worst.max((p.constant() - 0.5).abs());
        match p.cosine_terms() {
            [(c, d)] if *d == delta => worst = worst.max((c - 0.5 * sign).abs()),
            _ => worst = f64::INFINITY,
        }
    }
    let a = PhaseAssignment::new().with("t1", PI / 2.0).with("t2", 0.0);
    let probs = s.evaluate(&a).expect("bound").probabilities();
    if let Ok(d) = OutcomeDistribution::new(probs) {
        for p in d.probabilities() {
            worst = worst.max((p - 0.5).abs());
        }
    } else {
        worst = f64::INFINITY;
    }
    outcome("closed-form-interference", 1, worst, CLOSED_FORM_TOL)
}

/// Runs every sweep; each runs at least once.
pub fn run_verify(opts: &VerifyOptions) -> Vec<PropertyOutcome> {
    let trials = opts.trials.max(1);
    vec![
        unitarity_sweep(trials, opts.seed, opts.corrupt_gate),
        norm_sweep(trials, opts.seed.wrapping_add(1)),
        global_phase_sweep(trials, opts.seed.wrapping_add(2)),
        agreement_sweep(trials, opts.seed.wrapping_add(3)),
        closed_form_check(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_sweeps_pass() {
        let results = run_verify(&VerifyOptions {
            trials: 200,
            ..Default::default()
        });
        assert_eq!(results.len(), 5);
        for r in results {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn corrupted_gate_fails_unitarity() {
        let r = unitarity_sweep(5, 1, true);
        assert!(!r.passed);
        assert_eq!(r.name, "unitarity");
    }

    #[test]
    fn single_trial_runs_everything() {
        let results = run_verify(&VerifyOptions {
            trials: 1,
            ..Default::default()
        });
        assert!(results.iter().all(|r| r.trials >= 1 && r.passed));
    }
}
