//! Seeded ensembles over phase priors.
//!
//! Sample `i` of an ensemble draws every phase symbol from the counter-based
//! stream `(seed, i, symbol)`, so the result never depends on how samples are
//! scheduled. Sums are formed over fixed blocks of [`BLOCK_SIZE`] samples
//! and the block partials are combined in index order, which keeps
//! sequential and parallel runs bitwise identical.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analytics::arcsine_cdf;
use crate::gate::{apply, GateError, GateMatrix};
use crate::phase::{PhaseError, PhasePrior, PhaseSymbol};
use crate::rng::counter_rng;
use crate::state::{ConcreteState, SymbolicState};

pub const BLOCK_SIZE: usize = 4096;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;

const SHOTS_TAG: &str = "__shots";
const MEASURE_TAG: &str = "__measure";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnsembleError {
    #[error("empty sample")]
    EmptySample,
    #[error("ensemble needs at least one sample")]
    NoSamples,
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub samples: u64,
    /// Basis measurements per sample; 0 uses exact probabilities only.
    pub shots_per_sample: u64,
    pub seed: u64,
    pub priors: BTreeMap<PhaseSymbol, PhasePrior>,
}

impl EnsembleConfig {
    pub fn new(priors: BTreeMap<PhaseSymbol, PhasePrior>) -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            shots_per_sample: 0,
            seed: DEFAULT_SEED,
            priors,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub per_sample_prob0: Vec<f64>,
    pub empirical_outcome_counts: BTreeMap<usize, u64>,
    pub mean_prob0: f64,
    pub ks_vs_arcsine: f64,
    /// Exact outcome probabilities averaged over samples.
    pub mean_outcome_probs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Blocks are spread over the current rayon pool.
    #[default]
    Parallel,
}

/// One amplitude term: coefficient, π offset in radians, and
/// `(symbol index, coefficient)` pairs.
type CompiledTerm = (f64, f64, Vec<(usize, f64)>);

/// A symbolic state flattened for fast repeated evaluation. Evaluation order
/// matches [`SymbolicState::evaluate`], so the numbers are identical.
struct CompiledState {
    symbols: Vec<(PhaseSymbol, PhasePrior)>,
    amplitudes: Vec<Vec<CompiledTerm>>,
}

impl CompiledState {
    fn new(s: &SymbolicState, priors: &BTreeMap<PhaseSymbol, PhasePrior>) -> Result<Self, PhaseError> {
        let used: BTreeSet<PhaseSymbol> = s.symbols();
        let mut symbols = Vec::with_capacity(used.len());
        for sym in &used {
            let prior = priors
                .get(sym)
                .ok_or_else(|| PhaseError::UnboundSymbol(sym.name().to_owned()))?;
            symbols.push((sym.clone(), *prior));
        }
        let index: BTreeMap<&PhaseSymbol, usize> = used.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let amplitudes = s
            .amplitudes()
            .iter()
            .map(|amp| {
                amp.terms()
                    .iter()
                    .map(|(c, p)| {
                        let lin = p.terms().iter().map(|(s, k)| (index[s], *k as f64)).collect();
                        (*c, p.offset_radians(), lin)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { symbols, amplitudes })
    }

    fn probabilities_into(&self, seed: u64, sample: u64, values: &mut Vec<f64>, out: &mut [f64]) {
        values.clear();
        values.extend(self.symbols.iter().map(|(s, prior)| prior.sample(seed, sample, s)));
        for (slot, terms) in out.iter_mut().zip(&self.amplitudes) {
            let z = terms.iter().fold(Complex64::zero(), |acc, (c, off, lin)| {
                let phase = lin.iter().fold(*off, |a, (i, k)| a + k * values[*i]);
                acc + Complex64::from_polar(*c, phase)
            });
            *slot = z.norm_sqr();
        }
    }
}

struct BlockResult {
    prob0: Vec<f64>,
    outcome_sums: Vec<f64>,
    counts: BTreeMap<usize, u64>,
}

/// Draws `shots` outcomes from `probs` with `rng`, adding them to `counts`.
fn draw_outcomes(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng, counts: &mut BTreeMap<usize, u64>) {
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in probs {
        acc += p.max(0.0);
        cumulative.push(acc);
    }
    let total = acc;
    for _ in 0..shots {
        let u = rng.gen::<f64>() * total;
        let k = cumulative.partition_point(|&c| c <= u).min(probs.len() - 1);
        *counts.entry(k).or_insert(0) += 1;
    }
}

/// Runs the ensemble with the default (parallel) execution.
pub fn run_ensemble(
    s: &SymbolicState,
    gates: &[(GateMatrix, Vec<usize>)],
    cfg: &EnsembleConfig,
) -> Result<EnsembleResult, EnsembleError> {
    run_ensemble_with(s, gates, cfg, Execution::default())
}

/// For every sample: draw an assignment, evaluate the gated state, record
/// the exact outcome probabilities and, when requested, sampled shots.
///
/// Gates are applied symbolically once; each sample then only evaluates the
/// resulting amplitudes.
pub fn run_ensemble_with(
    s: &SymbolicState,
    gates: &[(GateMatrix, Vec<usize>)],
    cfg: &EnsembleConfig,
    execution: Execution,
) -> Result<EnsembleResult, EnsembleError> {
    if cfg.samples == 0 {
        return Err(EnsembleError::NoSamples);
    }
    for (g, _) in gates {
        if let Some(sym) = g.symbols().into_iter().find(|s| !cfg.priors.contains_key(s)) {
            return Err(PhaseError::UnboundSymbol(sym.name().to_owned()).into());
        }
    }
    let mut state = s.clone();
    for (g, targets) in gates {
        state = apply(g, &state, targets)?;
    }
    let compiled = CompiledState::new(&state, &cfg.priors)?;
    let dim = state.dim();

    let n_blocks = cfg.samples.div_ceil(BLOCK_SIZE as u64);
    let run_block = |b: u64| -> BlockResult {
        let start = b * BLOCK_SIZE as u64;
        let end = (start + BLOCK_SIZE as u64).min(cfg.samples);
        let mut values = Vec::new();
        let mut probs = vec![0.0; dim];
        let mut block = BlockResult {
            prob0: Vec::with_capacity((end - start) as usize),
            outcome_sums: vec![0.0; dim],
            counts: BTreeMap::new(),
        };
        for i in start..end {
            compiled.probabilities_into(cfg.seed, i, &mut values, &mut probs);
            block.prob0.push(probs[0].clamp(0.0, 1.0));
            for (acc, p) in block.outcome_sums.iter_mut().zip(&probs) {
                *acc += p;
            }
            if cfg.shots_per_sample > 0 {
                let mut rng = counter_rng(cfg.seed, i, SHOTS_TAG);
                draw_outcomes(&probs, cfg.shots_per_sample, &mut rng, &mut block.counts);
            }
        }
        block
    };
    let blocks: Vec<BlockResult> = match execution {
        Execution::Sequential => (0..n_blocks).map(run_block).collect(),
        Execution::Parallel => (0..n_blocks).into_par_iter().map(run_block).collect(),
    };

    let mut per_sample_prob0 = Vec::with_capacity(cfg.samples as usize);
    let mut outcome_sums = vec![0.0; dim];
    let mut empirical_outcome_counts = BTreeMap::new();
    for block in blocks {
        per_sample_prob0.extend_from_slice(&block.prob0);
        for (acc, p) in outcome_sums.iter_mut().zip(&block.outcome_sums) {
            *acc += p;
        }
        for (k, c) in block.counts {
            *empirical_outcome_counts.entry(k).or_insert(0) += c;
        }
    }
    let n = cfg.samples as f64;
    let mean_prob0 = per_sample_prob0.iter().sum::<f64>() / n;
    let mean_outcome_probs = outcome_sums.into_iter().map(|s| s / n).collect();
    let ks_vs_arcsine = ks_statistic(&per_sample_prob0, |y| {
        arcsine_cdf(y.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
    })?;
    Ok(EnsembleResult {
        per_sample_prob0,
        empirical_outcome_counts,
        mean_prob0,
        ks_vs_arcsine,
        mean_outcome_probs,
    })
}

/// Draws `shots` i.i.d. basis outcomes from `|amplitude|²`.
pub fn measure_shots(c: &ConcreteState, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    let mut rng = counter_rng(seed, 0, MEASURE_TAG);
    draw_outcomes(&c.probabilities(), shots, &mut rng, &mut counts);
    counts
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, EnsembleError> {
    if samples.is_empty() {
        return Err(EnsembleError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let hi = (i + 1) as f64 / n - f;
            let lo = f - i as f64 / n;
            hi.abs().max(lo.abs())
        })
        .fold(0.0, f64::max))
}

/// Equal-width bin counts over `[lo, hi)`; out-of-range values land in the
/// edge bins.
///
/// # Panics
/// If `bins == 0` or `lo >= hi`.
pub fn histogram(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<u64> {
    assert!(bins >= 1, "histogram needs at least one bin");
    assert!(lo < hi, "histogram range must satisfy lo < hi");
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for &x in samples {
        let k = ((x - lo) / width).floor();
        let k = if k.is_nan() || k < 0.0 {
            0
        } else {
            (k as usize).min(bins - 1)
        };
        counts[k] += 1;
    }
    counts
}
