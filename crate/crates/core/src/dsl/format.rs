//! Canonical pretty-printer; `parse ∘ format` is the structural identity.

use std::fmt::Write as _;

use super::{AmpMultiplier, CircuitProgram, ReportTarget, StatementKind};

/// Render a program in canonical form: a header comment, the `alpha` line,
/// and one statement per line. Numbers are printed with `{}` (shortest
/// round-trippable form), and `sqrt2` multiplier tokens are kept verbatim.
pub fn format_program(prog: &CircuitProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# circuit: {}", prog.source_name);
    // A statement-free program with the default α prints as the bare header.
    if !prog.statements.is_empty() || prog.alpha != 1.0 {
        let _ = writeln!(out, "alpha {}", prog.alpha);
    }
    for statement in &prog.statements {
        out.push_str(&format_statement(&statement.kind));
        out.push('\n');
    }
    out
}

pub(crate) fn format_statement(kind: &StatementKind) -> String {
    match kind {
        StatementKind::DeclareModes(labels) => format!("modes {}", join(labels)),
        StatementKind::Term { coefficient, multipliers } => {
            let mults: Vec<String> = multipliers
                .iter()
                .map(|m| match m {
                    AmpMultiplier::Value(v) => format!("{v}"),
                    AmpMultiplier::Sqrt2 => "sqrt2".into(),
                    AmpMultiplier::NegSqrt2 => "-sqrt2".into(),
                })
                .collect();
            format!("term {} {} : {}", coefficient.re, coefficient.im, mults.join(" "))
        }
        StatementKind::PrepEcp1Input { beta, gamma, modes } => {
            format!("prep_ecp1_input {beta} {gamma} on {}", join(modes))
        }
        StatementKind::PrepEcp1Ancilla { beta, gamma, mode } => {
            format!("prep_ecp1_anc {beta} {gamma} on {mode}")
        }
        StatementKind::PrepEcp2Input { beta, gamma, delta, eta, modes } => {
            format!("prep_ecp2_input {beta} {gamma} {delta} {eta} on {}", join(modes))
        }
        StatementKind::PrepEcp2TwoMode { beta, gamma, delta, eta, modes } => {
            format!("prep_ecp2_twomode {beta} {gamma} {delta} {eta} on {}", join(modes))
        }
        StatementKind::PrepEcp2G { beta, gamma, delta, eta, mode } => {
            format!("prep_ecp2_g {beta} {gamma} {delta} {eta} on {mode}")
        }
        StatementKind::BeamSplitter { inputs, outputs } => {
            format!("bs {} {} -> {} {}", inputs[0], inputs[1], outputs[0], outputs[1])
        }
        StatementKind::BeamSplitterVacuum { input, outputs } => {
            format!("bsvac {input} -> {} {}", outputs[0], outputs[1])
        }
        StatementKind::Swap(i, j) => format!("swap {i} {j}"),
        StatementKind::SelectVacuum(labels) => format!("selectvac {}", join(labels)),
        StatementKind::ProjectVacuum(label) => format!("projvac {label}"),
        StatementKind::Discard(label) => format!("discard {label}"),
        StatementKind::Normalize => "normalize".into(),
        StatementKind::AssertTerms(n) => format!("assert_terms {n}"),
        StatementKind::AssertProbGe(p) => format!("assert_prob_ge {p}"),
        StatementKind::Report(ReportTarget::None) => "report".into(),
        StatementKind::Report(ReportTarget::Ecp1) => "report ecp1".into(),
        StatementKind::Report(ReportTarget::Ecp2) => "report ecp2".into(),
    }
}

fn join(labels: &[crate::state::ModeLabel]) -> String {
    labels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(" ")
}
