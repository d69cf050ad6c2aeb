//! A line-oriented text language for coherent-state circuits.
//!
//! One statement per line, `#` starts a comment, tokens are separated by
//! whitespace. A program declares mode labels, prepares states on them (either
//! protocol preparations or explicit `term` lines whose multipliers scale the
//! program's α), and then applies linear-optics operations, post-selections,
//! and assertions. The two bundled circuits in `circuits/` encode the
//! concentration pipelines end to end.
//!
//! ```text
//! # grammar, one statement per line
//! alpha <float>                                   # at most once, before preparations
//! modes <label>+
//! term <re> <im> : <mult>+                        # mult: decimal | sqrt2 | -sqrt2
//! prep_ecp1_input <β> <γ> on <4 labels>
//! prep_ecp1_anc   <β> <γ> on <label>
//! prep_ecp2_input   <β> <γ> <δ> <η> on <4 labels>
//! prep_ecp2_twomode <β> <γ> <δ> <η> on <2 labels>
//! prep_ecp2_g       <β> <γ> <δ> <η> on <label>
//! bs <i> <j> -> <i'> <j'>
//! bsvac <i> -> <n1> <n2>
//! swap <i> <j>
//! selectvac <label>+
//! projvac <label>
//! discard <label>
//! normalize
//! assert_terms <int>
//! assert_prob_ge <float>
//! report [ecp1|ecp2]
//! ```
//!
//! Labels are identifiers (`[A-Za-z][A-Za-z0-9_]*`), each declared exactly
//! once — by a `modes` line or as a fresh output of `bs`/`bsvac` — and they
//! stop being usable once consumed by `selectvac`, `projvac`, or `discard`.

mod exec;
mod format;
mod parse;

pub use exec::{execute_circuit, ExecError, ExecutionReport, ReportSnapshot, StepRecord};
pub use format::format_program;
pub use parse::parse_circuit;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::state::ModeLabel;

/// A parsed program: the coherent amplitude α plus the statement list.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    pub alpha: f64,
    pub statements: Vec<Statement>,
    pub source_name: String,
}

impl CircuitProgram {
    /// Structural equality: same α and same statement kinds in the same
    /// order, ignoring source line numbers and the source name.
    pub fn structurally_equals(&self, other: &CircuitProgram) -> bool {
        self.alpha == other.alpha
            && self.statements.len() == other.statements.len()
            && self
                .statements
                .iter()
                .zip(&other.statements)
                .all(|(a, b)| a.kind == b.kind)
    }
}

/// One statement together with its 1-based source line.
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

/// Amplitude multiplier of a `term` statement, interpreted as a multiple of α.
/// `sqrt2` tokens are kept distinct from decimals so formatting preserves them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmpMultiplier {
    Value(f64),
    Sqrt2,
    NegSqrt2,
}

impl AmpMultiplier {
    pub fn value(self) -> f64 {
        match self {
            AmpMultiplier::Value(v) => v,
            AmpMultiplier::Sqrt2 => std::f64::consts::SQRT_2,
            AmpMultiplier::NegSqrt2 => -std::f64::consts::SQRT_2,
        }
    }
}

/// Target of a `report` statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportTarget {
    Ecp1,
    Ecp2,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    DeclareModes(Vec<ModeLabel>),
    Term { coefficient: C64, multipliers: Vec<AmpMultiplier> },
    PrepEcp1Input { beta: f64, gamma: f64, modes: [ModeLabel; 4] },
    PrepEcp1Ancilla { beta: f64, gamma: f64, mode: ModeLabel },
    PrepEcp2Input { beta: f64, gamma: f64, delta: f64, eta: f64, modes: [ModeLabel; 4] },
    PrepEcp2TwoMode { beta: f64, gamma: f64, delta: f64, eta: f64, modes: [ModeLabel; 2] },
    PrepEcp2G { beta: f64, gamma: f64, delta: f64, eta: f64, mode: ModeLabel },
    BeamSplitter { inputs: [ModeLabel; 2], outputs: [ModeLabel; 2] },
    BeamSplitterVacuum { input: ModeLabel, outputs: [ModeLabel; 2] },
    Swap(ModeLabel, ModeLabel),
    SelectVacuum(Vec<ModeLabel>),
    ProjectVacuum(ModeLabel),
    Discard(ModeLabel),
    Normalize,
    AssertTerms(usize),
    AssertProbGe(f64),
    Report(ReportTarget),
}

/// First parse failure, with a precise source location.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}
