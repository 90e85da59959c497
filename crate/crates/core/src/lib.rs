//! Simulation of qubits whose components carry unknown relative phases.
//!
//! Phases are kept symbolic ([`phase::PhaseExpr`]) through state preparation
//! and gate application, so outcome probabilities come out in closed form
//! ([`analytics::outcome_prob_symbolic`]). The same states can be evaluated
//! numerically under sampled phase assignments and run as seeded ensembles
//! ([`monte_carlo::run_ensemble`]).

pub mod analytics;
pub mod experiment;
pub mod gate;
pub mod monte_carlo;
pub mod phase;
pub mod report;
pub mod rng;
pub mod state;
pub mod verify;

pub use analytics::{OutcomeDistribution, ProbExpr};
pub use gate::GateMatrix;
pub use phase::{PhaseAssignment, PhaseExpr, PhasePrior, PhaseSymbol};
pub use state::{ConcreteState, SymbolicAmplitude, SymbolicState};
