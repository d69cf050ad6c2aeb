//! Linear-optics circuit primitives acting on [`CoherentSuperposition`].
//!
//! All beam splitters are balanced (50:50) and act on coherent amplitudes as
//!
//! ```text
//! (u, v) ↦ ((u + v)/√2, (u − v)/√2),
//! ```
//!
//! which preserves every pairwise coherent-state overlap and hence every Gram
//! contraction. Post-selection on "no photon" in a set of modes is implemented
//! as exact branch selection on zero amplitude; the physical ∣0⟩⟨0∣ projection
//! is available separately so the finite-α discrepancy between the two can be
//! quantified.

use crate::state::{
    BranchTerm, CoherentSuperposition, ModeLabel, Result, SimError, ToleranceConfig,
};

/// Kept branch of a post-selection together with the probability of the
/// selection event.
///
/// The branch is returned unnormalized; the probability is always computed
/// against the normalized input.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub state: CoherentSuperposition,
    pub probability: f64,
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl CoherentSuperposition {
    /// Balanced beam splitter on the pair `(mode_i, mode_j)`.
    ///
    /// Coefficients are unchanged and the register keeps its labels; use
    /// [`CoherentSuperposition::renamed_mode`] to relabel outputs.
    pub fn beam_splitter(&self, mode_i: &ModeLabel, mode_j: &ModeLabel) -> Result<Self> {
        let i = self.mode_index(mode_i)?;
        let j = self.mode_index(mode_j)?;
        if i == j {
            return Err(SimError::DuplicateMode(mode_i.clone()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut amplitudes = t.amplitudes.clone();
                let (u, v) = (amplitudes[i], amplitudes[j]);
                amplitudes[i] = (u + v) * SQRT_HALF;
                amplitudes[j] = (u - v) * SQRT_HALF;
                BranchTerm { coefficient: t.coefficient, amplitudes }
            })
            .collect();
        CoherentSuperposition::new(self.modes.clone(), terms)
    }

    /// Balanced beam splitter with a vacuum state on the second input port:
    /// the amplitude u of `mode` splits into (u/√2, u/√2) on two fresh output
    /// modes that replace `mode` in the register.
    pub fn beam_splitter_with_vacuum(
        &self,
        mode: &ModeLabel,
        new_label_1: ModeLabel,
        new_label_2: ModeLabel,
    ) -> Result<Self> {
        let idx = self.mode_index(mode)?;
        if new_label_1 == new_label_2 {
            return Err(SimError::DuplicateMode(new_label_2));
        }
        for fresh in [&new_label_1, &new_label_2] {
            if fresh != mode && self.modes.contains(fresh) {
                return Err(SimError::DuplicateMode(fresh.clone()));
            }
        }
        let mut modes = self.modes.clone();
        modes.splice(idx..=idx, [new_label_1, new_label_2]);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut amplitudes = t.amplitudes.clone();
                let u = amplitudes[idx] * SQRT_HALF;
                amplitudes.splice(idx..=idx, [u, u]);
                BranchTerm { coefficient: t.coefficient, amplitudes }
            })
            .collect();
        CoherentSuperposition::new(modes, terms)
    }

    /// Exchange the register positions of two modes.
    ///
    /// The amplitudes travel with their labels, so the map from label to
    /// amplitude is unchanged; only the register ordering (and with it any
    /// position-aligned comparison against another state) changes. Applying
    /// the swap twice is the identity.
    pub fn swap_modes(&self, mode_i: &ModeLabel, mode_j: &ModeLabel) -> Result<Self> {
        let i = self.mode_index(mode_i)?;
        let j = self.mode_index(mode_j)?;
        let mut modes = self.modes.clone();
        modes.swap(i, j);
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut amplitudes = t.amplitudes.clone();
                amplitudes.swap(i, j);
                BranchTerm { coefficient: t.coefficient, amplitudes }
            })
            .collect();
        CoherentSuperposition::new(modes, terms)
    }

    /// Post-select on "no photon" in every listed mode.
    ///
    /// Keeps exactly the terms whose amplitudes vanish in all listed modes and
    /// removes those modes from the kept branch. The probability is
    /// norm²(kept)/norm²(input); cross overlaps between kept and discarded
    /// branches are not folded in. If no term survives, the outcome is an
    /// empty branch with probability 0.
    pub fn select_vacuum_branch(&self, modes: &[ModeLabel]) -> Result<SelectionOutcome> {
        let indices = modes
            .iter()
            .map(|m| self.mode_index(m))
            .collect::<Result<Vec<usize>>>()?;
        let input_norm = self.norm_squared();
        if input_norm <= ToleranceConfig::default().coeff_zero_tol {
            return Err(SimError::Degenerate("post-selection on a zero-norm state".into()));
        }
        // Zero-detection threshold scales with the state's amplitude range so
        // that beam-splitter roundoff of order α·ε still counts as vacuum.
        let tol = ToleranceConfig::default().amp_merge_tol
            * self.max_amplitude_magnitude().max(1.0);
        let kept: Vec<BranchTerm> = self
            .terms
            .iter()
            .filter(|t| indices.iter().all(|&i| t.amplitudes[i].norm() <= tol))
            .cloned()
            .collect();
        let kept_state =
            CoherentSuperposition::new(self.modes.clone(), kept)?;
        let probability = kept_state.norm_squared() / input_norm;
        Ok(SelectionOutcome {
            state: kept_state.without_mode_indices(&indices),
            probability,
        })
    }

    /// Physical ∣0⟩⟨0∣ projection of one mode.
    ///
    /// Every term's coefficient is multiplied by ⟨0∣u⟩ = e^{−∣u∣²/2} and the
    /// mode is removed. Unlike [`CoherentSuperposition::select_vacuum_branch`]
    /// this keeps contributions from non-vacuum terms, suppressed as
    /// e^{−∣α∣²}.
    pub fn project_vacuum(&self, mode: &ModeLabel) -> Result<SelectionOutcome> {
        let idx = self.mode_index(mode)?;
        let input_norm = self.norm_squared();
        let terms = self
            .terms
            .iter()
            .map(|t| BranchTerm {
                coefficient: t.coefficient * (-0.5 * t.amplitudes[idx].norm_sqr()).exp(),
                amplitudes: t.amplitudes.clone(),
            })
            .collect();
        let projected = CoherentSuperposition::new(self.modes.clone(), terms)?
            .without_mode_indices(&[idx])
            .canonicalized(&ToleranceConfig::default());
        let probability = if input_norm > 0.0 {
            projected.norm_squared() / input_norm
        } else {
            0.0
        };
        Ok(SelectionOutcome { state: projected, probability })
    }

    /// Remove a mode that is perfectly correlated with the retained pattern
    /// (the paper's non-distinguishing detection).
    ///
    /// For every group of terms sharing the same retained-mode amplitudes, all
    /// members must agree on the discarded-mode amplitude; otherwise the
    /// removal would not be a pure-state map and a decoherence error is
    /// returned. Coefficients are unchanged.
    pub fn discard_correlated_mode(&self, mode: &ModeLabel) -> Result<Self> {
        let idx = self.mode_index(mode)?;
        let tol = ToleranceConfig::default().amp_merge_tol
            * self.max_amplitude_magnitude().max(1.0);
        // Terms are few; quadratic grouping is fine at desk scale.
        for (n, t) in self.terms.iter().enumerate() {
            for other in &self.terms[n + 1..] {
                let retained_match = t
                    .amplitudes
                    .iter()
                    .zip(&other.amplitudes)
                    .enumerate()
                    .all(|(k, (a, b))| k == idx || (a - b).norm() <= tol);
                if retained_match && (t.amplitudes[idx] - other.amplitudes[idx]).norm() > tol {
                    return Err(SimError::Decoherence {
                        mode: mode.clone(),
                        detail: format!(
                            "amplitudes {} and {} occur against the same retained pattern",
                            t.amplitudes[idx], other.amplitudes[idx]
                        ),
                    });
                }
            }
        }
        Ok(self
            .without_mode_indices(&[idx])
            .canonicalized(&ToleranceConfig::default()))
    }
}

#[allow(dead_code)]
fn _is_send_sync<T: Send + Sync>() {}
const _: fn() = _is_send_sync::<CoherentSuperposition>;
