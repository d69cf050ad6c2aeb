//! Executor: runs a parsed program against a single evolving state.

use std::collections::HashSet;

use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::protocols::{
    build_ancilla_g, build_ancilla_single, build_ancilla_two_mode, build_partial_ecp1,
    build_partial_ecp2, build_target_mes, Ecp1Params, Ecp2Params,
};
use crate::state::{
    BranchTerm, CoherentSuperposition, ModeLabel, SimError, ToleranceConfig,
};

use super::format::format_statement;
use super::{CircuitProgram, ReportTarget, Statement, StatementKind};

/// Runtime failure of a circuit, carrying the source line of the statement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("line {line}: assertion failed: {message}")]
    Assertion { line: usize, message: String },
    #[error("line {line}: {source}")]
    State { line: usize, source: SimError },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

impl ExecError {
    pub fn line(&self) -> usize {
        match self {
            ExecError::Assertion { line, .. }
            | ExecError::State { line, .. }
            | ExecError::Invalid { line, .. } => *line,
        }
    }
}

/// Per-statement trace entry.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub line: usize,
    pub statement: String,
    pub term_count: usize,
    pub norm_squared: f64,
    /// Probability of this statement's selection event, when it has one.
    pub probability: Option<f64>,
}

/// Snapshot produced by a `report` statement.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSnapshot {
    pub line: usize,
    pub term_count: usize,
    pub norm_squared: f64,
    pub modes: Vec<ModeLabel>,
    /// Fidelity against the maximally entangled 4-mode target, when requested.
    pub fidelity: Option<f64>,
    pub cumulative_probability: f64,
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Serialize)]
pub struct ExecutionReport {
    pub source_name: String,
    pub alpha: f64,
    pub steps: Vec<StepRecord>,
    /// Product of all selection probabilities encountered so far (1 if none).
    pub cumulative_probability: f64,
    pub snapshots: Vec<ReportSnapshot>,
    pub final_state: CoherentSuperposition,
}

struct Machine {
    alpha: f64,
    state: CoherentSuperposition,
    /// Declared labels not yet carrying state, in declaration order.
    pending: Vec<ModeLabel>,
    populated: HashSet<ModeLabel>,
    cumulative_probability: f64,
}

impl Machine {
    fn require_populated(&self, label: &ModeLabel, line: usize) -> Result<(), ExecError> {
        if self.populated.contains(label) {
            Ok(())
        } else {
            Err(ExecError::Invalid {
                line,
                message: format!("mode `{label}` is declared but carries no state yet"),
            })
        }
    }

    fn take_pending(&mut self, labels: &[ModeLabel], line: usize) -> Result<(), ExecError> {
        for label in labels {
            if self.populated.contains(label) {
                return Err(ExecError::Invalid {
                    line,
                    message: format!("mode `{label}` already carries state"),
                });
            }
            if !self.pending.contains(label) {
                return Err(ExecError::Invalid {
                    line,
                    message: format!("mode `{label}` is not available for preparation"),
                });
            }
        }
        self.pending.retain(|m| !labels.contains(m));
        for label in labels {
            self.populated.insert(label.clone());
        }
        Ok(())
    }

    fn tensor_prepared(
        &mut self,
        prepared: CoherentSuperposition,
        labels: &[ModeLabel],
        line: usize,
    ) -> Result<(), ExecError> {
        self.take_pending(labels, line)?;
        let prepared = prepared
            .relabeled(labels)
            .map_err(|source| ExecError::State { line, source })?;
        self.state = self
            .state
            .tensor(&prepared)
            .map_err(|source| ExecError::State { line, source })?;
        Ok(())
    }
}

/// Execute the statements in order; the first assertion failure or runtime
/// error halts the run and names its source line.
pub fn execute_circuit(prog: &CircuitProgram) -> Result<ExecutionReport, ExecError> {
    let mut machine = Machine {
        alpha: prog.alpha,
        state: CoherentSuperposition::scalar(),
        pending: Vec::new(),
        populated: HashSet::new(),
        cumulative_probability: 1.0,
    };
    let mut steps = Vec::with_capacity(prog.statements.len());
    let mut snapshots = Vec::new();

    for statement in &prog.statements {
        let probability = execute_statement(statement, &mut machine, &mut snapshots)?;
        steps.push(StepRecord {
            line: statement.line,
            statement: format_statement(&statement.kind),
            term_count: machine.state.term_count(),
            norm_squared: machine.state.norm_squared(),
            probability,
        });
    }

    Ok(ExecutionReport {
        source_name: prog.source_name.clone(),
        alpha: prog.alpha,
        steps,
        cumulative_probability: machine.cumulative_probability,
        snapshots,
        final_state: machine.state,
    })
}

fn execute_statement(
    statement: &Statement,
    machine: &mut Machine,
    snapshots: &mut Vec<ReportSnapshot>,
) -> Result<Option<f64>, ExecError> {
    let line = statement.line;
    let state_err = |source: SimError| ExecError::State { line, source };
    match &statement.kind {
        StatementKind::DeclareModes(labels) => {
            machine.pending.extend(labels.iter().cloned());
        }
        StatementKind::Term { coefficient, multipliers } => {
            if machine.populated.is_empty() {
                // First term populates every declared mode at once.
                let register = std::mem::take(&mut machine.pending);
                for label in &register {
                    machine.populated.insert(label.clone());
                }
                machine.state = CoherentSuperposition::empty(register).map_err(state_err)?;
            } else if !machine.pending.is_empty() {
                return Err(ExecError::Invalid {
                    line,
                    message: "`term` needs all declared modes populated; finish preparations first"
                        .into(),
                });
            }
            if multipliers.len() != machine.state.mode_count() {
                return Err(ExecError::Invalid {
                    line,
                    message: format!(
                        "term lists {} multipliers for a {}-mode register",
                        multipliers.len(),
                        machine.state.mode_count()
                    ),
                });
            }
            let amplitudes =
                multipliers.iter().map(|m| C64::new(m.value() * machine.alpha, 0.0)).collect();
            let term = BranchTerm::new(*coefficient, amplitudes).map_err(state_err)?;
            let mut terms = machine.state.terms().to_vec();
            terms.push(term);
            machine.state = CoherentSuperposition::new(machine.state.modes().to_vec(), terms)
                .map_err(state_err)?;
        }
        StatementKind::PrepEcp1Input { beta, gamma, modes } => {
            let params = Ecp1Params::new(machine.alpha, *beta, *gamma).map_err(state_err)?;
            let prepared = build_partial_ecp1(&params).map_err(state_err)?;
            machine.tensor_prepared(prepared, modes, line)?;
        }
        StatementKind::PrepEcp1Ancilla { beta, gamma, mode } => {
            let params = Ecp1Params::new(machine.alpha, *beta, *gamma).map_err(state_err)?;
            let prepared = build_ancilla_single(&params).map_err(state_err)?;
            machine.tensor_prepared(prepared, std::slice::from_ref(mode), line)?;
        }
        StatementKind::PrepEcp2Input { beta, gamma, delta, eta, modes } => {
            let params =
                Ecp2Params::new(machine.alpha, *beta, *gamma, *delta, *eta).map_err(state_err)?;
            let prepared = build_partial_ecp2(&params).map_err(state_err)?;
            machine.tensor_prepared(prepared, modes, line)?;
        }
        StatementKind::PrepEcp2TwoMode { beta, gamma, delta, eta, modes } => {
            let params =
                Ecp2Params::new(machine.alpha, *beta, *gamma, *delta, *eta).map_err(state_err)?;
            let prepared = build_ancilla_two_mode(&params).map_err(state_err)?;
            machine.tensor_prepared(prepared, modes, line)?;
        }
        StatementKind::PrepEcp2G { beta, gamma, delta, eta, mode } => {
            let params =
                Ecp2Params::new(machine.alpha, *beta, *gamma, *delta, *eta).map_err(state_err)?;
            let prepared = build_ancilla_g(&params).map_err(state_err)?;
            machine.tensor_prepared(prepared, std::slice::from_ref(mode), line)?;
        }
        StatementKind::BeamSplitter { inputs: [i, j], outputs: [out_i, out_j] } => {
            machine.require_populated(i, line)?;
            machine.require_populated(j, line)?;
            machine.state = machine
                .state
                .beam_splitter(i, j)
                .and_then(|s| s.renamed_mode(i, out_i.clone()))
                .and_then(|s| s.renamed_mode(j, out_j.clone()))
                .map_err(state_err)?;
            machine.populated.remove(i);
            machine.populated.remove(j);
            machine.populated.insert(out_i.clone());
            machine.populated.insert(out_j.clone());
        }
        StatementKind::BeamSplitterVacuum { input, outputs: [out_1, out_2] } => {
            machine.require_populated(input, line)?;
            machine.state = machine
                .state
                .beam_splitter_with_vacuum(input, out_1.clone(), out_2.clone())
                .map_err(state_err)?;
            machine.populated.remove(input);
            machine.populated.insert(out_1.clone());
            machine.populated.insert(out_2.clone());
        }
        StatementKind::Swap(i, j) => {
            machine.require_populated(i, line)?;
            machine.require_populated(j, line)?;
            machine.state = machine.state.swap_modes(i, j).map_err(state_err)?;
        }
        StatementKind::SelectVacuum(labels) => {
            for label in labels {
                machine.require_populated(label, line)?;
            }
            let outcome = machine.state.select_vacuum_branch(labels).map_err(state_err)?;
            machine.cumulative_probability *= outcome.probability;
            machine.state = outcome.state;
            for label in labels {
                machine.populated.remove(label);
            }
            return Ok(Some(outcome.probability));
        }
        StatementKind::ProjectVacuum(label) => {
            machine.require_populated(label, line)?;
            let outcome = machine.state.project_vacuum(label).map_err(state_err)?;
            machine.cumulative_probability *= outcome.probability;
            machine.state = outcome.state;
            machine.populated.remove(label);
            return Ok(Some(outcome.probability));
        }
        StatementKind::Discard(label) => {
            machine.require_populated(label, line)?;
            machine.state = machine.state.discard_correlated_mode(label).map_err(state_err)?;
            machine.populated.remove(label);
        }
        StatementKind::Normalize => {
            machine.state = machine.state.normalized().map_err(state_err)?;
        }
        StatementKind::AssertTerms(expected) => {
            let got = machine.state.term_count();
            if got != *expected {
                return Err(ExecError::Assertion {
                    line,
                    message: format!("expected {expected} terms, state has {got}"),
                });
            }
        }
        StatementKind::AssertProbGe(bound) => {
            if machine.cumulative_probability < *bound {
                return Err(ExecError::Assertion {
                    line,
                    message: format!(
                        "cumulative probability {:.12} < {bound}",
                        machine.cumulative_probability
                    ),
                });
            }
        }
        StatementKind::Report(target) => {
            let fidelity = match target {
                ReportTarget::None => None,
                ReportTarget::Ecp1 | ReportTarget::Ecp2 => {
                    if machine.state.mode_count() != 4 {
                        return Err(ExecError::Invalid {
                            line,
                            message: format!(
                                "report target needs a 4-mode state, register has {} modes",
                                machine.state.mode_count()
                            ),
                        });
                    }
                    if machine.state.norm_squared() <= ToleranceConfig::default().coeff_zero_tol {
                        Some(0.0)
                    } else {
                        let target_state = build_target_mes(machine.alpha)
                            .and_then(|t| t.relabeled(machine.state.modes()))
                            .map_err(state_err)?;
                        Some(machine.state.fidelity(&target_state).map_err(state_err)?)
                    }
                }
            };
            snapshots.push(ReportSnapshot {
                line,
                term_count: machine.state.term_count(),
                norm_squared: machine.state.norm_squared(),
                modes: machine.state.modes().to_vec(),
                fidelity,
                cumulative_probability: machine.cumulative_probability,
            });
        }
    }
    Ok(None)
}
