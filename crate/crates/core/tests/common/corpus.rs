//! Parser corpus: file names with the AST or error positions each must give.

use std::path::PathBuf;

use qphase::experiment::{ExperimentAst, GateParam, GateStep, MeasureDecl, PhaseSpec, PriorDecl, QubitDecl};
use qphase::{PhasePrior, PhaseSymbol};

pub fn corpus_path(kind: &str, name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(kind)
        .join(format!("{name}.qx"))
}

pub fn read(kind: &str, name: &str) -> String {
    std::fs::read_to_string(corpus_path(kind, name)).expect("corpus file readable")
}

fn sym(name: &str) -> PhaseSpec {
    PhaseSpec::Symbol(PhaseSymbol::new(name).unwrap())
}

fn fixed(v: f64) -> PhaseSpec {
    PhaseSpec::Fixed(v)
}

fn qubit(name: &str, alpha: f64, beta: f64, phase0: PhaseSpec, phase1: PhaseSpec) -> QubitDecl {
    QubitDecl {
        name: name.into(),
        alpha,
        beta,
        phase0,
        phase1,
    }
}

fn ground(name: &str) -> QubitDecl {
    qubit(name, 1.0, 0.0, fixed(0.0), fixed(0.0))
}

fn prior(name: &str, prior: PhasePrior) -> PriorDecl {
    PriorDecl {
        symbol: PhaseSymbol::new(name).unwrap(),
        prior,
    }
}

fn uniform(lo: f64, hi: f64) -> PhasePrior {
    PhasePrior::uniform(lo, hi).unwrap()
}

fn gate(name: &str, params: Vec<GateParam>, target: &str) -> GateStep {
    GateStep {
        name: name.into(),
        params,
        targets: vec![target.into()],
    }
}

fn measure(samples: u64, shots: Option<u64>, seed: Option<u64>) -> Option<MeasureDecl> {
    Some(MeasureDecl { samples, shots, seed })
}

fn ast(qubits: Vec<QubitDecl>, priors: Vec<PriorDecl>, gates: Vec<GateStep>, m: Option<MeasureDecl>) -> ExperimentAst {
    ExperimentAst {
        qubits,
        priors,
        gates,
        measure: m,
    }
}

// The reference file spells 1/√2 to eight digits; the AST keeps them.
#[allow(clippy::approx_constant)]
pub fn valid_cases() -> Vec<(&'static str, ExperimentAst)> {
    let ab = |n: &str| qubit(n, 0.6, 0.8, sym("a"), sym("b"));
    vec![
        ("01_minimal", ast(vec![ground("q")], vec![], vec![], None)),
        (
            "02_reference",
            ast(
                vec![qubit("q0", 0.70710678, 0.70710678, sym("t1"), sym("t2"))],
                vec![
                    prior("t1", uniform(0.0, std::f64::consts::PI)),
                    prior("t2", PhasePrior::Fixed(0.0)),
                ],
                vec![gate("M", vec![], "q0")],
                measure(1_000_000, None, Some(42)),
            ),
        ),
        (
            "03_comments_blank_lines",
            ast(vec![ab("q")], vec![], vec![gate("M", vec![], "q")], None),
        ),
        (
            "04_permuted_keys",
            ast(vec![ab("q")], vec![], vec![], measure(10, None, Some(5))),
        ),
        (
            "05_two_qubits",
            ast(
                vec![ground("a"), qubit("b", 0.0, 1.0, fixed(0.0), sym("s"))],
                vec![],
                vec![gate("M", vec![], "a"), gate("PF", vec![], "b")],
                None,
            ),
        ),
        (
            "06_rotation_spaces",
            ast(
                vec![ground("q")],
                vec![],
                vec![gate(
                    "R",
                    vec![
                        GateParam::Real(0.6),
                        GateParam::Real(0.8),
                        GateParam::Phase(sym("x")),
                        GateParam::Phase(fixed(0.25)),
                    ],
                    "q",
                )],
                None,
            ),
        ),
        (
            "07_global_phase_symbol",
            ast(
                vec![ab("q")],
                vec![prior("g", uniform(0.0, std::f64::consts::TAU))],
                vec![gate("GP", vec![GateParam::Phase(sym("g"))], "q")],
                None,
            ),
        ),
        (
            "08_phase_flip",
            ast(
                vec![qubit("q", 0.6, 0.8, sym("th"), sym("th"))],
                vec![],
                vec![gate("PF", vec![], "q")],
                None,
            ),
        ),
        (
            "09_shots_and_seed",
            ast(vec![ground("q")], vec![], vec![], measure(100, Some(10), Some(7))),
        ),
        (
            "10_samples_only",
            ast(vec![ground("q")], vec![], vec![], measure(3, None, None)),
        ),
        (
            "11_crlf",
            ast(vec![ground("q")], vec![], vec![gate("M", vec![], "q")], None),
        ),
        (
            "12_tabs",
            ast(vec![ground("q")], vec![], vec![gate("M", vec![], "q")], None),
        ),
        (
            "13_scientific",
            ast(vec![qubit("q", 0.6, 0.8, fixed(0.0), fixed(0.0))], vec![], vec![], None),
        ),
        (
            "14_negative_fixed_phase",
            ast(
                vec![qubit("q", 1.0, 0.0, fixed(-1.5), fixed(2.5))],
                vec![],
                vec![],
                None,
            ),
        ),
        (
            "15_negative_uniform_bounds",
            ast(
                vec![qubit("q", 0.6, 0.8, sym("a"), fixed(0.0))],
                vec![prior("a", uniform(-3.5, -0.5))],
                vec![],
                None,
            ),
        ),
        (
            "16_no_measure",
            ast(
                vec![ab("q")],
                vec![],
                vec![gate("M", vec![], "q"), gate("M", vec![], "q")],
                None,
            ),
        ),
        (
            "17_gate_sequence",
            ast(
                vec![ab("q")],
                vec![],
                vec![gate("M", vec![], "q"), gate("PF", vec![], "q"), gate("M", vec![], "q")],
                None,
            ),
        ),
        (
            "18_four_qubits",
            ast(
                (0..4)
                    .map(|i| qubit(&format!("q{i}"), 0.6, 0.8, sym(&format!("a{i}")), sym(&format!("b{i}"))))
                    .collect(),
                vec![],
                vec![gate("M", vec![], "q3")],
                None,
            ),
        ),
        (
            "19_trailing_comments",
            ast(
                vec![ground("q")],
                vec![],
                vec![gate("M", vec![], "q")],
                measure(9, None, None),
            ),
        ),
        (
            "20_signs_and_bare_fraction",
            ast(vec![qubit("q", 0.6, 0.8, fixed(0.5), fixed(0.0))], vec![], vec![], None),
        ),
        (
            "21_underscored_names",
            ast(
                vec![qubit("q_0", 1.0, 0.0, sym("theta_1"), sym("Theta2"))],
                vec![prior("theta_1", PhasePrior::Fixed(1.25))],
                vec![],
                None,
            ),
        ),
        (
            "22_unknown_gate_name",
            ast(vec![ground("q")], vec![], vec![gate("H", vec![], "q")], None),
        ),
        (
            "23_no_trailing_newline",
            ast(vec![ground("q")], vec![], vec![gate("M", vec![], "q")], None),
        ),
    ]
}

/// Every error, as `(line, column)`, in reported order.
pub fn invalid_cases() -> Vec<(&'static str, Vec<(usize, usize)>)> {
    vec![
        ("01_not_normalized", vec![(1, 9)]),
        ("02_unknown_directive", vec![(1, 1)]),
        ("03_unknown_target", vec![(2, 8)]),
        ("04_bad_number", vec![(1, 15)]),
        ("05_negative_beta", vec![(1, 17)]),
        ("06_bad_phase_spec", vec![(1, 31)]),
        ("07_reserved_symbol", vec![(1, 35)]),
        ("08_unbalanced_paren", vec![(2, 6), (2, 6)]),
        ("09_duplicate_qubit", vec![(2, 7)]),
        ("10_duplicate_measure", vec![(3, 1)]),
        ("11_zero_samples", vec![(2, 17)]),
        ("12_missing_samples", vec![(2, 1)]),
        ("13_fractional_samples", vec![(2, 17)]),
        ("14_unknown_argument", vec![(2, 19)]),
        ("15_repeated_key", vec![(1, 17)]),
        ("16_empty_uniform_range", vec![(2, 19)]),
        ("17_unknown_prior_kind", vec![(2, 9)]),
        ("18_duplicate_prior", vec![(3, 7)]),
        ("19_target_twice", vec![(2, 10)]),
        ("20_bad_gate_param", vec![(2, 13)]),
        ("21_empty_gate_param", vec![(2, 12)]),
        ("22_qubit_without_name", vec![(1, 1)]),
        ("23_several_errors", vec![(1, 1), (3, 17)]),
        ("24_dangling_exponent", vec![(1, 15)]),
        ("25_bad_fixed_phase", vec![(1, 52)]),
        ("26_gate_without_target", vec![(2, 6)]),
        ("27_bad_qubit_name", vec![(1, 7)]),
        ("28_missing_phase", vec![(1, 1)]),
    ]
}
