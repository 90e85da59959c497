//! Machine-readable reports for the `run` and `density` commands.
//!
//! CSV floats carry 17 significant digits. CSV metadata goes in leading
//! `# key=value` lines so the table itself stays a plain header plus records.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analytics::{arcsine_cdf, arcsine_pdf, equal_superposition, GENERAL_THETA1, GENERAL_THETA2};
use crate::experiment::{parse, resolve, ParseError, ResolveError};
use crate::gate::hadamard_m;
use crate::monte_carlo::{histogram, ks_statistic, run_ensemble_with, EnsembleConfig, EnsembleError, Execution};
use crate::phase::{PhasePrior, PhaseSymbol};

/// Bins of the per-sample P(0) histogram in run reports.
pub const RUN_HISTOGRAM_BINS: usize = 20;
pub const DEFAULT_DENSITY_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_DENSITY_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Parse(Vec<ParseError>),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

impl RunError {
    /// 2 for input and validation problems, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse(_) | RunError::Resolve(_) | RunError::Argument(_) => 2,
            RunError::Ensemble(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: usize,
    pub analytic_prob_mean: f64,
    pub empirical_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub digest: String,
    pub seed: u64,
    pub samples: u64,
    pub shots_per_sample: u64,
    pub mean_prob0: f64,
    pub ks_vs_arcsine: f64,
    pub outcomes: Vec<OutcomeRow>,
    /// Counts of per-sample P(0) over equal bins of `[0, 1)`.
    pub prob0_histogram: Vec<u64>,
}

/// Hex SHA-256 of the experiment text.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses, resolves and runs an experiment file.
pub fn run_report(text: &str, overrides: RunOverrides, execution: Execution) -> Result<RunReport, RunError> {
    let ast = parse(text).map_err(RunError::Parse)?;
    let mut exp = resolve(&ast)?;
    if let Some(seed) = overrides.seed {
        exp.config.seed = seed;
    }
    if let Some(samples) = overrides.samples {
        if samples == 0 {
            return Err(RunError::Argument("samples must be at least 1".into()));
        }
        exp.config.samples = samples;
    }
    let r = run_ensemble_with(&exp.state, &exp.gates, &exp.config, execution)?;
    let outcomes = r
        .mean_outcome_probs
        .iter()
        .enumerate()
        .map(|(k, &p)| OutcomeRow {
            outcome: k,
            analytic_prob_mean: p,
            empirical_count: r.empirical_outcome_counts.get(&k).copied().unwrap_or(0),
        })
        .collect();
    Ok(RunReport {
        digest: digest(text),
        seed: exp.config.seed,
        samples: exp.config.samples,
        shots_per_sample: exp.config.shots_per_sample,
        mean_prob0: r.mean_prob0,
        ks_vs_arcsine: r.ks_vs_arcsine,
        outcomes,
        prob0_histogram: histogram(&r.per_sample_prob0, RUN_HISTOGRAM_BINS, 0.0, 1.0),
    })
}

impl RunReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let hist: Vec<String> = self.prob0_histogram.iter().map(u64::to_string).collect();
                let mut out = String::new();
                let _ = writeln!(out, "# digest={}", self.digest);
                let _ = writeln!(out, "# seed={}", self.seed);
                let _ = writeln!(out, "# samples={}", self.samples);
                let _ = writeln!(out, "# shots_per_sample={}", self.shots_per_sample);
                let _ = writeln!(out, "# mean_prob0={}", sci(self.mean_prob0));
                let _ = writeln!(out, "# ks_vs_arcsine={}", sci(self.ks_vs_arcsine));
                let _ = writeln!(out, "# prob0_histogram={}", hist.join(";"));
                out.push_str("outcome,analytic_prob_mean,empirical_count\n");
                for row in &self.outcomes {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        row.outcome,
                        sci(row.analytic_prob_mean),
                        row.empirical_count
                    );
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub bin_center: f64,
    pub empirical_density: f64,
    pub analytic_pdf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub seed: u64,
    pub samples: u64,
    pub bins: Vec<DensityRow>,
    pub ks_statistic: f64,
    pub mean_prob0: f64,
}

/// P(0) density of the equal superposition after `M`, with the relative
/// phase uniform on `(0, π)`, against the arcsine pdf.
pub fn density_report(samples: u64, bins: usize, seed: u64, execution: Execution) -> Result<DensityReport, RunError> {
    if samples == 0 {
        return Err(RunError::Argument("samples must be at least 1".into()));
    }
    if bins == 0 {
        return Err(RunError::Argument("bins must be at least 1".into()));
    }
    let mut priors = BTreeMap::new();
    let sym = |n: &str| PhaseSymbol::new(n).expect("valid name");
    priors.insert(sym(GENERAL_THETA1), PhasePrior::uniform(0.0, PI).expect("valid range"));
    priors.insert(sym(GENERAL_THETA2), PhasePrior::Fixed(0.0));
    let cfg = EnsembleConfig {
        samples,
        seed,
        ..EnsembleConfig::new(priors)
    };
    let r = run_ensemble_with(&equal_superposition(), &[(hadamard_m(), vec![0])], &cfg, execution)?;
    let counts = histogram(&r.per_sample_prob0, bins, 0.0, 1.0);
    let width = 1.0 / bins as f64;
    let rows = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let center = (k as f64 + 0.5) * width;
            DensityRow {
                bin_center: center,
                empirical_density: c as f64 / (samples as f64 * width),
                analytic_pdf: arcsine_pdf(center).expect("bin centers lie inside (0, 1)"),
            }
        })
        .collect();
    let ks = ks_statistic(&r.per_sample_prob0, |y| {
        arcsine_cdf(y.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
    })?;
    Ok(DensityReport {
        seed,
        samples,
        bins: rows,
        ks_statistic: ks,
        mean_prob0: r.mean_prob0,
    })
}

impl DensityReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Csv => {
                let mut out = String::new();
                let _ = writeln!(out, "# seed={}", self.seed);
                let _ = writeln!(out, "# samples={}", self.samples);
                let _ = writeln!(out, "# mean_prob0={}", sci(self.mean_prob0));
                let _ = writeln!(out, "# ks_statistic={}", sci(self.ks_statistic));
                out.push_str("bin_center,empirical_density,analytic_pdf\n");
                for row in &self.bins {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        sci(row.bin_center),
                        sci(row.empirical_density),
                        sci(row.analytic_pdf)
                    );
                }
                out
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
