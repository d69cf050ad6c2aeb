//! Deterministic CSV sweeps of the success probabilities.
//!
//! Both sweeps evaluate the closed-form probability and the exact pipeline at
//! every grid point and emit one row per point, α in the outer loop and grid
//! coordinates ascending in the inner loops. Rows are computed in parallel but
//! buffered and written in index order, and every number is printed with 17
//! significant digits, so two invocations with the same spec produce
//! byte-identical files.
//!
//! The first sweep varies β over [0, 1] with γ = √(1 − β²) (the normalization
//! convention of the angular parameterization); the second varies θ₁ and θ₂
//! over [0, π/2] at fixed θ₃.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::protocols::{
    formula_p_ecp1, formula_p_ecp2, run_ecp1_stages, run_ecp2_stages, Ecp1Params, Ecp2Params,
    ThetaParams,
};
use crate::state::{Result, SimError};

/// Which pipeline a sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepProtocol {
    Ecp1,
    Ecp2,
}

/// Grid description for either sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub protocol: SweepProtocol,
    pub alpha_values: Vec<f64>,
    pub grid_steps: usize,
    /// Fixed θ₃ for the second sweep; ignored by the first.
    pub theta3: f64,
}

impl SweepSpec {
    pub fn new(
        protocol: SweepProtocol,
        alpha_values: Vec<f64>,
        grid_steps: usize,
        theta3: f64,
    ) -> Result<Self> {
        if grid_steps < 2 {
            return Err(SimError::Degenerate("grid needs at least 2 steps".into()));
        }
        if alpha_values.is_empty() {
            return Err(SimError::Degenerate("alpha list is empty".into()));
        }
        if alpha_values.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(SimError::Degenerate("alpha values must be positive and finite".into()));
        }
        if !theta3.is_finite() {
            return Err(SimError::NonFinite("theta3"));
        }
        Ok(SweepSpec { protocol, alpha_values, grid_steps, theta3 })
    }
}

/// The (β, γ, δ, η) tuple of the angular parameterization.
pub type Coefficients = (f64, f64, f64, f64);

pub const ECP1_CSV_HEADER: &str = "alpha,beta,gamma,p_formula,p_exact";
pub const ECP2_CSV_HEADER: &str =
    "alpha,theta1,theta2,theta3,beta,gamma,delta,eta,p_formula,p_exact";

/// 17-significant-digit field; round-trips to the same double.
fn field(x: f64) -> String {
    format!("{x:.16e}")
}

fn grid(steps: usize, upper: f64) -> Vec<f64> {
    (0..steps).map(|i| upper * i as f64 / (steps - 1) as f64).collect()
}

/// Closed-form and exact ECP1 probabilities at one (α, β) point with
/// γ = √(1 − β²). Returns (γ, p_formula, p_exact).
pub fn ecp1_point(alpha: f64, beta: f64) -> Result<(f64, f64, f64)> {
    let gamma = (1.0 - beta * beta).max(0.0).sqrt();
    let params = Ecp1Params::new(alpha, beta, gamma)?;
    let p_formula = formula_p_ecp1(&params)?;
    let p_exact = run_ecp1_stages(&params)?.p_exact;
    Ok((gamma, p_formula, p_exact))
}

/// Render the first sweep as a CSV document.
pub fn sweep_ecp1_csv(spec: &SweepSpec) -> Result<String> {
    let betas = grid(spec.grid_steps, 1.0);
    let points: Vec<(f64, f64)> = spec
        .alpha_values
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(alpha, beta)| {
            let (gamma, p_formula, p_exact) = ecp1_point(alpha, beta)?;
            Ok(format!(
                "{},{},{},{},{}",
                field(alpha),
                field(beta),
                field(gamma),
                field(p_formula),
                field(p_exact)
            ))
        })
        .collect::<Result<Vec<String>>>()?;
    let mut out = String::with_capacity(rows.len() * 64);
    let _ = writeln!(out, "{ECP1_CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    Ok(out)
}

/// Closed-form and exact ECP2 probabilities at one (α, θ₁, θ₂, θ₃) point.
///
/// Coefficients below the f64 representation noise of cos(π/2) are snapped to
/// exact zeros, so the grid boundaries carry clean P = 0 rows. At corners
/// where both coefficient products βγ and δη vanish, the product-coefficient
/// ancilla cannot be normalized; the protocol has no coherence to concentrate
/// there and both probabilities are reported as the limiting value 0.
pub fn ecp2_point(
    alpha: f64,
    theta1: f64,
    theta2: f64,
    theta3: f64,
) -> Result<(Coefficients, f64, f64)> {
    let theta = ThetaParams::new(theta1, theta2, theta3)?;
    let snap = |v: f64| if v.abs() <= 1e-15 { 0.0 } else { v };
    let (beta, gamma, delta, eta) = crate::protocols::theta_to_coefficients(&theta);
    let (beta, gamma, delta, eta) = (snap(beta), snap(gamma), snap(delta), snap(eta));
    let coefficients = (beta, gamma, delta, eta);
    let params = Ecp2Params::new(alpha, beta, gamma, delta, eta)?;
    match formula_p_ecp2(&params) {
        Ok(p_formula) => {
            let p_exact = run_ecp2_stages(&params)?.p_exact;
            Ok((coefficients, p_formula, p_exact))
        }
        Err(SimError::Degenerate(_)) => Ok((coefficients, 0.0, 0.0)),
        Err(other) => Err(other),
    }
}

/// Render the second sweep as a CSV document (θ₁ outer, θ₂ inner per α).
pub fn sweep_ecp2_csv(spec: &SweepSpec) -> Result<String> {
    let thetas = grid(spec.grid_steps, std::f64::consts::FRAC_PI_2);
    let mut points = Vec::with_capacity(spec.alpha_values.len() * thetas.len() * thetas.len());
    for &a in &spec.alpha_values {
        for &t1 in &thetas {
            for &t2 in &thetas {
                points.push((a, t1, t2));
            }
        }
    }
    let theta3 = spec.theta3;
    let rows = points
        .par_iter()
        .map(|&(alpha, t1, t2)| {
            let ((beta, gamma, delta, eta), p_formula, p_exact) =
                ecp2_point(alpha, t1, t2, theta3)?;
            Ok(format!(
                "{},{},{},{},{},{},{},{},{},{}",
                field(alpha),
                field(t1),
                field(t2),
                field(theta3),
                field(beta),
                field(gamma),
                field(delta),
                field(eta),
                field(p_formula),
                field(p_exact)
            ))
        })
        .collect::<Result<Vec<String>>>()?;
    let mut out = String::with_capacity(rows.len() * 128);
    let _ = writeln!(out, "{ECP2_CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{row}");
    }
    Ok(out)
}

/// Render whichever sweep the spec selects.
pub fn sweep_csv(spec: &SweepSpec) -> Result<String> {
    match spec.protocol {
        SweepProtocol::Ecp1 => sweep_ecp1_csv(spec),
        SweepProtocol::Ecp2 => sweep_ecp2_csv(spec),
    }
}
