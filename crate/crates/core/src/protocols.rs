//! The two entanglement concentration pipelines for 4-mode Cluster-type
//! entangled coherent states, their closed-form normalization constants, and
//! both success-probability formulas.
//!
//! The target of both pipelines is the maximally entangled Cluster-type ECS
//!
//! ```text
//! ∣ψ⟩ = ½ (∣α,α,α,α⟩ + ∣−α,−α,α,α⟩ + ∣α,α,−α,−α⟩ − ∣−α,−α,−α,−α⟩),
//! ```
//!
//! which the first pipeline (ECP1) recovers from a two-parameter partially
//! entangled input assisted by a single-mode ancilla, and the second (ECP2)
//! from a four-parameter input assisted by a two-mode ancilla plus one more
//! single-mode ancilla. Each pipeline runs the exact engine end to end and
//! reports both the exact post-selection probability and the closed form
//! (4∣N₁N₂βγ∣² and 4∣N₃N₄N₅βγδη∣² respectively); the two agree to roundoff
//! because the Gram cross terms cancel pairwise.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::state::{
    BranchTerm, CoherentSuperposition, ModeLabel, Result, SimError, ToleranceConfig,
};

/// Inputs of the first concentration pipeline: coherent amplitude α and the
/// two real coefficients of the partially entangled state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ecp1Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl Ecp1Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(SimError::NonFinite("protocol parameter"));
        }
        if alpha <= 0.0 {
            return Err(SimError::Degenerate("alpha must be strictly positive".into()));
        }
        if beta == 0.0 && gamma == 0.0 {
            return Err(SimError::Degenerate("beta and gamma cannot both be zero".into()));
        }
        Ok(Ecp1Params { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Inputs of the second concentration pipeline: coherent amplitude α and four
/// real coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ecp2Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    eta: f64,
}

impl Ecp2Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, eta: f64) -> Result<Self> {
        let values = [alpha, beta, gamma, delta, eta];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite("protocol parameter"));
        }
        if alpha <= 0.0 {
            return Err(SimError::Degenerate("alpha must be strictly positive".into()));
        }
        if beta == 0.0 && gamma == 0.0 && delta == 0.0 && eta == 0.0 {
            return Err(SimError::Degenerate("all four coefficients are zero".into()));
        }
        Ok(Ecp2Params { alpha, beta, gamma, delta, eta })
    }

    /// Build the coefficients from the angular parameterization; the resulting
    /// squares sum to 1.
    pub fn from_theta(alpha: f64, theta: &ThetaParams) -> Result<Self> {
        let (beta, gamma, delta, eta) = theta_to_coefficients(theta);
        Ecp2Params::new(alpha, beta, gamma, delta, eta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Angles parameterizing the unit sphere β² + γ² + δ² + η² = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl ThetaParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite() && theta3.is_finite()) {
            return Err(SimError::NonFinite("theta parameter"));
        }
        Ok(ThetaParams { theta1, theta2, theta3 })
    }
}

/// β = cos θ₃, γ = sin θ₃ cos θ₂, δ = sin θ₃ sin θ₂ cos θ₁, η = sin θ₃ sin θ₂ sin θ₁.
pub fn theta_to_coefficients(t: &ThetaParams) -> (f64, f64, f64, f64) {
    let beta = t.theta3.cos();
    let gamma = t.theta3.sin() * t.theta2.cos();
    let delta = t.theta3.sin() * t.theta2.sin() * t.theta1.cos();
    let eta = t.theta3.sin() * t.theta2.sin() * t.theta1.sin();
    (beta, gamma, delta, eta)
}

fn inv_sqrt(radicand: f64, what: &str) -> Result<f64> {
    if !radicand.is_finite() || radicand <= 0.0 {
        return Err(SimError::Degenerate(format!(
            "normalization radicand of {what} is {radicand:e}, not strictly positive"
        )));
    }
    Ok(radicand.powf(-0.5))
}

/// N₁ = [2β² + 2γ² + 2e^{−4∣α∣²}(β² − γ²)]^{−1/2}.
pub fn n1(p: &Ecp1Params) -> Result<f64> {
    let (b, g) = (p.beta, p.gamma);
    let k = (-4.0 * p.alpha * p.alpha).exp();
    inv_sqrt(2.0 * b * b + 2.0 * g * g + 2.0 * k * (b * b - g * g), "the ECP1 input state")
}

/// N₂ = [β² + γ² + 2βγ e^{−2∣α∣²}]^{−1/2}.
pub fn n2(p: &Ecp1Params) -> Result<f64> {
    let (b, g) = (p.beta, p.gamma);
    let k = (-2.0 * p.alpha * p.alpha).exp();
    inv_sqrt(b * b + g * g + 2.0 * b * g * k, "the single-mode ancilla")
}

/// N₃ = [β²+γ²+δ²+η² + 2(βγ+βδ−γη−δη)e^{−4∣α∣²} + 2(δγ−ηβ)e^{−8∣α∣²}]^{−1/2}.
pub fn n3(q: &Ecp2Params) -> Result<f64> {
    let (b, g, d, e) = (q.beta, q.gamma, q.delta, q.eta);
    let k4 = (-4.0 * q.alpha * q.alpha).exp();
    let k8 = (-8.0 * q.alpha * q.alpha).exp();
    inv_sqrt(
        b * b + g * g + d * d + e * e
            + 2.0 * (b * g + b * d - g * e - d * e) * k4
            + 2.0 * (d * g - e * b) * k8,
        "the ECP2 input state",
    )
}

/// N₄ = [β²+γ²+δ²+η² + 2(βγ+βδ+ηγ+δη)e^{−2∣α∣²} + 2(δγ+ηβ)e^{−4∣α∣²}]^{−1/2}.
pub fn n4(q: &Ecp2Params) -> Result<f64> {
    let (b, g, d, e) = (q.beta, q.gamma, q.delta, q.eta);
    let k2 = (-2.0 * q.alpha * q.alpha).exp();
    let k4 = (-4.0 * q.alpha * q.alpha).exp();
    inv_sqrt(
        b * b + g * g + d * d + e * e
            + 2.0 * (b * g + b * d + e * g + d * e) * k2
            + 2.0 * (d * g + e * b) * k4,
        "the two-mode ancilla",
    )
}

/// N₅ = [β²γ² + δ²η² + 2βγδη e^{−2∣α∣²}]^{−1/2}.
pub fn n5(q: &Ecp2Params) -> Result<f64> {
    let (b, g, d, e) = (q.beta, q.gamma, q.delta, q.eta);
    let k2 = (-2.0 * q.alpha * q.alpha).exp();
    inv_sqrt(
        b * b * g * g + d * d * e * e + 2.0 * b * g * d * e * k2,
        "the product-coefficient ancilla",
    )
}

fn ml(name: &str) -> ModeLabel {
    ModeLabel::from(name)
}

/// The four cluster amplitude patterns over one register, scaled by α.
fn cluster_patterns(alpha: f64) -> [[C64; 4]; 4] {
    let a = C64::new(alpha, 0.0);
    [
        [a, a, a, a],
        [-a, -a, a, a],
        [a, a, -a, -a],
        [-a, -a, -a, -a],
    ]
}

fn four_term_state(
    mode_names: [&str; 4],
    alpha: f64,
    coefficients: [f64; 4],
) -> Result<CoherentSuperposition> {
    let patterns = cluster_patterns(alpha);
    let terms = coefficients
        .iter()
        .zip(patterns.iter())
        .map(|(c, amps)| BranchTerm::new(C64::new(*c, 0.0), amps.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    CoherentSuperposition::new(mode_names.map(ml).to_vec(), terms)
}

/// The maximally entangled 4-mode Cluster-type ECS over modes (a, b, c, d).
///
/// Coefficients (+½, +½, +½, −½); the cluster sign pattern makes the Gram
/// cross terms cancel pairwise, so the state has unit norm for every α.
pub fn build_target_mes(alpha: f64) -> Result<CoherentSuperposition> {
    if !alpha.is_finite() {
        return Err(SimError::NonFinite("alpha"));
    }
    if alpha <= 0.0 {
        return Err(SimError::Degenerate("alpha must be strictly positive".into()));
    }
    four_term_state(["a", "b", "c", "d"], alpha, [0.5, 0.5, 0.5, -0.5])
}

/// The partially entangled ECP1 input over (a, b, c, d), normalized via N₁:
/// coefficients N₁·(β, β, γ, −γ) on the four cluster patterns.
pub fn build_partial_ecp1(p: &Ecp1Params) -> Result<CoherentSuperposition> {
    let norm = n1(p)?;
    four_term_state(
        ["a", "b", "c", "d"],
        p.alpha,
        [norm * p.beta, norm * p.beta, norm * p.gamma, -norm * p.gamma],
    )
}

/// The single-mode ancilla N₂(β∣α⟩ + γ∣−α⟩) on mode e.
pub fn build_ancilla_single(p: &Ecp1Params) -> Result<CoherentSuperposition> {
    let norm = n2(p)?;
    let a = C64::new(p.alpha, 0.0);
    CoherentSuperposition::new(
        vec![ml("e")],
        vec![
            BranchTerm::new(C64::new(norm * p.beta, 0.0), vec![a])?,
            BranchTerm::new(C64::new(norm * p.gamma, 0.0), vec![-a])?,
        ],
    )
}

/// The four-coefficient ECP2 input over (a, b, c, d), normalized via N₃:
/// coefficients N₃·(β, γ, δ, −η).
pub fn build_partial_ecp2(q: &Ecp2Params) -> Result<CoherentSuperposition> {
    let norm = n3(q)?;
    four_term_state(
        ["a", "b", "c", "d"],
        q.alpha,
        [norm * q.beta, norm * q.gamma, norm * q.delta, -norm * q.eta],
    )
}

/// The two-mode ancilla N₄(β∣α,α⟩ + γ∣α,−α⟩ + δ∣−α,α⟩ + η∣−α,−α⟩) on (e, f).
pub fn build_ancilla_two_mode(q: &Ecp2Params) -> Result<CoherentSuperposition> {
    let norm = n4(q)?;
    let a = C64::new(q.alpha, 0.0);
    let coeff = |v: f64| C64::new(norm * v, 0.0);
    CoherentSuperposition::new(
        vec![ml("e"), ml("f")],
        vec![
            BranchTerm::new(coeff(q.beta), vec![a, a])?,
            BranchTerm::new(coeff(q.gamma), vec![a, -a])?,
            BranchTerm::new(coeff(q.delta), vec![-a, a])?,
            BranchTerm::new(coeff(q.eta), vec![-a, -a])?,
        ],
    )
}

/// The product-coefficient ancilla N₅(βγ∣α⟩ + δη∣−α⟩) on mode g.
pub fn build_ancilla_g(q: &Ecp2Params) -> Result<CoherentSuperposition> {
    let norm = n5(q)?;
    let a = C64::new(q.alpha, 0.0);
    CoherentSuperposition::new(
        vec![ml("g")],
        vec![
            BranchTerm::new(C64::new(norm * q.beta * q.gamma, 0.0), vec![a])?,
            BranchTerm::new(C64::new(norm * q.delta * q.eta, 0.0), vec![-a])?,
        ],
    )
}

/// Closed-form ECP1 success probability P = 4∣N₁N₂βγ∣².
pub fn formula_p_ecp1(p: &Ecp1Params) -> Result<f64> {
    let value = n1(p)? * n2(p)? * p.beta * p.gamma;
    Ok(4.0 * value * value)
}

/// Closed-form ECP2 success probability P = 4∣N₃N₄N₅βγδη∣².
pub fn formula_p_ecp2(q: &Ecp2Params) -> Result<f64> {
    let value = n3(q)? * n4(q)? * n5(q)? * q.beta * q.gamma * q.delta * q.eta;
    Ok(4.0 * value * value)
}

/// One named intermediate state of a pipeline run.
#[derive(Debug, Clone)]
pub struct StageState {
    pub name: String,
    pub state: CoherentSuperposition,
}

/// Full record of a pipeline run, including every intermediate state.
#[derive(Debug, Clone)]
pub struct EcpRun {
    pub stages: Vec<StageState>,
    pub p_exact: f64,
    pub p_formula: f64,
    pub final_fidelity: f64,
}

impl EcpRun {
    pub fn final_state(&self) -> &CoherentSuperposition {
        &self.stages.last().expect("pipeline has stages").state
    }
}

/// Per-stage summary serialized into a [`ProtocolReport`].
#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub name: String,
    pub term_count: usize,
    pub norm_squared: f64,
    pub modes: Vec<ModeLabel>,
}

/// Parameters echoed back in a report.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ProtocolParams {
    Ecp1(Ecp1Params),
    Ecp2(Ecp2Params),
}

/// Structured result of a pipeline run.
///
/// Serializes to a JSON document with the stage array, the exact and
/// closed-form probabilities, the final fidelity against the maximally
/// entangled target pattern, the input parameters, and the library version.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub library_version: String,
    pub parameters: ProtocolParams,
    pub stages: Vec<StageRecord>,
    pub p_exact: f64,
    pub p_formula: f64,
    pub final_fidelity: f64,
    pub final_state: CoherentSuperposition,
}

fn stage_records(stages: &[StageState]) -> Vec<StageRecord> {
    stages
        .iter()
        .map(|s| StageRecord {
            name: s.name.clone(),
            term_count: s.state.term_count(),
            norm_squared: s.state.norm_squared(),
            modes: s.state.modes().to_vec(),
        })
        .collect()
}

/// Fidelity of `state` against the maximally entangled pattern on its own
/// register; 0 for a zero-norm state (a failed post-selection).
fn fidelity_against_target(state: &CoherentSuperposition, alpha: f64) -> Result<f64> {
    if state.norm_squared() <= ToleranceConfig::default().coeff_zero_tol {
        return Ok(0.0);
    }
    let target = build_target_mes(alpha)?.relabeled(state.modes())?;
    state.fidelity(&target)
}

/// Run the first pipeline with full stage states.
///
/// Stages: input ⊗ ancilla → BS on (d, e) → post-selection on vacuum in d₁
/// (this records the exact success probability) → vacuum-port BS e₁ → (e₂, e₃)
/// → detection of e₃.
pub fn run_ecp1_stages(p: &Ecp1Params) -> Result<EcpRun> {
    let input = build_partial_ecp1(p)?;
    let ancilla = build_ancilla_single(p)?;
    let combined = input.tensor(&ancilla)?;

    let after_bs = combined
        .beam_splitter(&ml("d"), &ml("e"))?
        .renamed_mode(&ml("d"), ml("d1"))?
        .renamed_mode(&ml("e"), ml("e1"))?;

    let selected = after_bs.select_vacuum_branch(&[ml("d1")])?;
    let p_exact = selected.probability;

    let widened = selected
        .state
        .beam_splitter_with_vacuum(&ml("e1"), ml("e2"), ml("e3"))?;
    let final_state = widened.discard_correlated_mode(&ml("e3"))?;

    let final_fidelity = fidelity_against_target(&final_state, p.alpha)?;
    let stages = vec![
        StageState { name: "input ⊗ ancilla".into(), state: combined },
        StageState { name: "after BS1 (d,e) → (d1,e1)".into(), state: after_bs },
        StageState { name: "post-selected on vacuum in d1".into(), state: selected.state },
        StageState { name: "after BS2 e1 → (e2,e3)".into(), state: widened },
        StageState { name: "after detection of e3".into(), state: final_state },
    ];
    Ok(EcpRun { stages, p_exact, p_formula: formula_p_ecp1(p)?, final_fidelity })
}

/// Run the first pipeline and summarize it.
pub fn run_ecp1(p: &Ecp1Params) -> Result<ProtocolReport> {
    let run = run_ecp1_stages(p)?;
    Ok(ProtocolReport {
        protocol: "ecp1".into(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        parameters: ProtocolParams::Ecp1(*p),
        stages: stage_records(&run.stages),
        p_exact: run.p_exact,
        p_formula: run.p_formula,
        final_fidelity: run.final_fidelity,
        final_state: run.final_state().clone(),
    })
}

/// Run the second pipeline with full stage states.
///
/// Stages: input ⊗ ancillae → BS on (a,f), (c,e), (d,g) → post-selection on
/// vacuum in a₁, d₁, e₁ (records the exact success probability) → swap
/// c₁ ↔ f₁ → vacuum-port BS on f₁, c₁, g₁ → detection of f₂, c₂, g₂.
pub fn run_ecp2_stages(q: &Ecp2Params) -> Result<EcpRun> {
    let combined = build_partial_ecp2(q)?
        .tensor(&build_ancilla_two_mode(q)?)?
        .tensor(&build_ancilla_g(q)?)?;

    let after_bs = combined
        .beam_splitter(&ml("a"), &ml("f"))?
        .beam_splitter(&ml("c"), &ml("e"))?
        .beam_splitter(&ml("d"), &ml("g"))?
        .renamed_mode(&ml("a"), ml("a1"))?
        .renamed_mode(&ml("f"), ml("f1"))?
        .renamed_mode(&ml("c"), ml("c1"))?
        .renamed_mode(&ml("e"), ml("e1"))?
        .renamed_mode(&ml("d"), ml("d1"))?
        .renamed_mode(&ml("g"), ml("g1"))?;

    let selected = after_bs.select_vacuum_branch(&[ml("a1"), ml("d1"), ml("e1")])?;
    let p_exact = selected.probability;

    let swapped = selected.state.swap_modes(&ml("c1"), &ml("f1"))?;
    let widened = swapped
        .beam_splitter_with_vacuum(&ml("f1"), ml("f2"), ml("f3"))?
        .beam_splitter_with_vacuum(&ml("c1"), ml("c2"), ml("c3"))?
        .beam_splitter_with_vacuum(&ml("g1"), ml("g2"), ml("g3"))?;
    let final_state = widened
        .discard_correlated_mode(&ml("f2"))?
        .discard_correlated_mode(&ml("c2"))?
        .discard_correlated_mode(&ml("g2"))?;

    let final_fidelity = fidelity_against_target(&final_state, q.alpha)?;
    let stages = vec![
        StageState { name: "input ⊗ ancillae".into(), state: combined },
        StageState { name: "after BS1–BS3 on (a,f), (c,e), (d,g)".into(), state: after_bs },
        StageState { name: "post-selected on vacuum in a1, d1, e1".into(), state: selected.state },
        StageState { name: "after swap c1 ↔ f1".into(), state: swapped },
        StageState { name: "after BS4–BS6 on f1, c1, g1".into(), state: widened },
        StageState { name: "after detection of f2, c2, g2".into(), state: final_state },
    ];
    Ok(EcpRun { stages, p_exact, p_formula: formula_p_ecp2(q)?, final_fidelity })
}

/// Run the second pipeline and summarize it.
pub fn run_ecp2(q: &Ecp2Params) -> Result<ProtocolReport> {
    let run = run_ecp2_stages(q)?;
    Ok(ProtocolReport {
        protocol: "ecp2".into(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        parameters: ProtocolParams::Ecp2(*q),
        stages: stage_records(&run.stages),
        p_exact: run.p_exact,
        p_formula: run.p_formula,
        final_fidelity: run.final_fidelity,
        final_state: run.final_state().clone(),
    })
}
