//! Exact state algebra for finite superpositions of multimode coherent states.
//!
//! A state is a finite sum Σ_j c_j ∣u_j1⟩ ⊗ ... ⊗ ∣u_jM⟩ over a fixed, ordered
//! register of M spatial modes, where each ∣u⟩ is a coherent state labeled by
//! its complex amplitude. Coherent states are never exactly orthogonal,
//!
//! ```text
//! ⟨u∣v⟩ = exp(−½∣u∣² − ½∣v∣² + u*v),
//! ```
//!
//! so every inner product, norm, probability, and fidelity here is computed by
//! contracting the Gram matrix of the participating branch terms. No Fock-space
//! truncation is involved; results are exact up to `f64` roundoff.
//!
//! States are immutable values and all operations are pure functions, so the
//! types in this module are safe to share across threads.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

/// Error type for state and circuit operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// A supplied scalar (amplitude, coefficient, or parameter) is NaN or infinite.
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    /// Two states disagree on the number of modes.
    #[error("mode count mismatch: {left} vs {right}")]
    ModeCountMismatch { left: usize, right: usize },
    /// A referenced mode label is not part of the register.
    #[error("unknown mode `{0}`")]
    UnknownMode(ModeLabel),
    /// A mode label occurs more than once in a register.
    #[error("duplicate mode `{0}`")]
    DuplicateMode(ModeLabel),
    /// A branch term does not carry one amplitude per register mode.
    #[error("term carries {got} amplitudes for a register of {expected} modes")]
    TermArity { expected: usize, got: usize },
    /// An operation that requires nonzero norm was applied to a (numerically) zero state.
    #[error("degenerate state: {0}")]
    Degenerate(String),
    /// Discarding the mode would not be a pure-state map.
    #[error("discarding mode `{mode}` would decohere the state: {detail}")]
    Decoherence { mode: ModeLabel, detail: String },
    /// An invalid tolerance configuration.
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Symbolic name of a spatial mode (`a`, `d1`, `e2`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ModeLabel(String);

impl ModeLabel {
    pub fn new(name: impl Into<String>) -> Self {
        ModeLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ModeLabel {
    fn from(s: &str) -> Self {
        ModeLabel(s.to_owned())
    }
}

/// Tolerances used when bringing a state to canonical form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute tolerance on amplitude components when merging equal terms.
    pub amp_merge_tol: f64,
    /// Absolute tolerance below which a term coefficient counts as zero.
    pub coeff_zero_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig { amp_merge_tol: 1e-9, coeff_zero_tol: 1e-12 }
    }
}

impl ToleranceConfig {
    pub fn new(amp_merge_tol: f64, coeff_zero_tol: f64) -> Result<Self> {
        if !(amp_merge_tol > 0.0 && amp_merge_tol.is_finite()) {
            return Err(SimError::InvalidTolerance("amp_merge_tol must be strictly positive"));
        }
        if !(coeff_zero_tol > 0.0 && coeff_zero_tol.is_finite()) {
            return Err(SimError::InvalidTolerance("coeff_zero_tol must be strictly positive"));
        }
        Ok(ToleranceConfig { amp_merge_tol, coeff_zero_tol })
    }
}

/// Overlap ⟨u∣v⟩ of two single-mode coherent states.
///
/// Always has magnitude ≤ 1, with equality iff `u == v`.
pub fn mode_overlap(u: C64, v: C64) -> Result<C64> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(SimError::NonFinite("coherent amplitude"));
    }
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(SimError::NonFinite("coherent amplitude"));
    }
    let exponent = C64::new(-0.5 * (u.norm_sqr() + v.norm_sqr()), 0.0) + u.conj() * v;
    Ok(exponent.exp())
}

/// One product ket of a superposition: a complex coefficient together with one
/// coherent amplitude per register mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchTerm {
    pub coefficient: C64,
    pub amplitudes: Vec<C64>,
}

impl BranchTerm {
    pub fn new(coefficient: C64, amplitudes: Vec<C64>) -> Result<Self> {
        if !(coefficient.re.is_finite() && coefficient.im.is_finite()) {
            return Err(SimError::NonFinite("term coefficient"));
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(SimError::NonFinite("coherent amplitude"));
        }
        Ok(BranchTerm { coefficient, amplitudes })
    }

    /// Componentwise comparison of amplitude vectors within an absolute tolerance.
    fn amplitudes_match(&self, other: &BranchTerm, tol: f64) -> bool {
        self.amplitudes.len() == other.amplitudes.len()
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a.re - b.re).abs() <= tol && (a.im - b.im).abs() <= tol)
    }
}

/// A finite superposition of multimode coherent states over a fixed register.
///
/// Instances are kept in canonical form: terms are sorted lexicographically by
/// their amplitude vectors (componentwise, as `(re, im)` pairs), terms with
/// matching amplitude vectors are merged, and terms with negligible
/// coefficients are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentSuperposition {
    pub(crate) modes: Vec<ModeLabel>,
    pub(crate) terms: Vec<BranchTerm>,
}

impl CoherentSuperposition {
    /// Build a state from a register and a list of terms, canonicalizing with
    /// the default tolerances.
    pub fn new(modes: Vec<ModeLabel>, terms: Vec<BranchTerm>) -> Result<Self> {
        Self::with_tolerance(modes, terms, &ToleranceConfig::default())
    }

    /// As [`CoherentSuperposition::new`] with explicit tolerances.
    pub fn with_tolerance(
        modes: Vec<ModeLabel>,
        terms: Vec<BranchTerm>,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(SimError::DuplicateMode(m.clone()));
            }
        }
        for t in &terms {
            if t.amplitudes.len() != modes.len() {
                return Err(SimError::TermArity { expected: modes.len(), got: t.amplitudes.len() });
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(SimError::NonFinite("term coefficient"));
            }
            if t.amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
                return Err(SimError::NonFinite("coherent amplitude"));
            }
        }
        let mut state = CoherentSuperposition { modes, terms };
        state.canonicalize_in_place(tol);
        Ok(state)
    }

    /// The zero-mode scalar state (a single term with coefficient 1).
    pub fn scalar() -> Self {
        CoherentSuperposition {
            modes: Vec::new(),
            terms: vec![BranchTerm { coefficient: C64::new(1.0, 0.0), amplitudes: Vec::new() }],
        }
    }

    /// A state over `modes` with no terms (the zero vector).
    pub fn empty(modes: Vec<ModeLabel>) -> Result<Self> {
        Self::new(modes, Vec::new())
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn terms(&self) -> &[BranchTerm] {
        &self.terms
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Index of `label` in the register.
    pub fn mode_index(&self, label: &ModeLabel) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| SimError::UnknownMode(label.clone()))
    }

    /// Largest amplitude-component magnitude over all terms; 0 for term-free states.
    pub fn max_amplitude_magnitude(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.amplitudes.iter())
            .map(|a| a.re.abs().max(a.im.abs()))
            .fold(0.0, f64::max)
    }

    /// Gram-contracted inner product ⟨self∣rhs⟩.
    ///
    /// Conjugate-linear in `self`, linear in `rhs`. Modes are aligned by
    /// register position; only the mode counts must agree.
    pub fn inner_product(&self, rhs: &CoherentSuperposition) -> Result<C64> {
        if self.modes.len() != rhs.modes.len() {
            return Err(SimError::ModeCountMismatch {
                left: self.modes.len(),
                right: rhs.modes.len(),
            });
        }
        let mut acc = C64::new(0.0, 0.0);
        for lt in &self.terms {
            for rt in &rhs.terms {
                // Accumulate the per-mode overlap exponents and exponentiate once.
                let mut exponent = C64::new(0.0, 0.0);
                for (u, v) in lt.amplitudes.iter().zip(&rt.amplitudes) {
                    exponent += C64::new(-0.5 * (u.norm_sqr() + v.norm_sqr()), 0.0) + u.conj() * v;
                }
                acc += lt.coefficient.conj() * rt.coefficient * exponent.exp();
            }
        }
        Ok(acc)
    }

    /// ⟨self∣self⟩, which is real up to roundoff.
    pub fn norm_squared(&self) -> f64 {
        self.inner_product(self)
            .expect("self inner product cannot mismatch")
            .re
    }

    /// Rescaled copy with unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2 <= ToleranceConfig::default().coeff_zero_tol {
            return Err(SimError::Degenerate(format!("cannot normalize state with norm² = {n2:e}")));
        }
        let scale = C64::new(1.0 / n2.sqrt(), 0.0);
        let terms = self
            .terms
            .iter()
            .map(|t| BranchTerm { coefficient: t.coefficient * scale, amplitudes: t.amplitudes.clone() })
            .collect();
        Ok(CoherentSuperposition { modes: self.modes.clone(), terms })
    }

    /// Re-canonicalize with explicit tolerances: merge terms whose amplitude
    /// vectors agree componentwise within `amp_merge_tol` (coefficients
    /// summed), drop terms with coefficient magnitude ≤ `coeff_zero_tol`, and
    /// sort terms into the canonical order.
    pub fn canonicalized(&self, tol: &ToleranceConfig) -> Self {
        let mut out = self.clone();
        out.canonicalize_in_place(tol);
        out
    }

    fn canonicalize_in_place(&mut self, tol: &ToleranceConfig) {
        self.terms.sort_by(|a, b| {
            for (u, v) in a.amplitudes.iter().zip(&b.amplitudes) {
                match u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)) {
                    std::cmp::Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        });
        let mut merged: Vec<BranchTerm> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.amplitudes_match(&term, tol.amp_merge_tol) => {
                    last.coefficient += term.coefficient;
                }
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.coefficient.norm() > tol.coeff_zero_tol);
        self.terms = merged;
    }

    /// Tensor product; the registers must be disjoint.
    pub fn tensor(&self, rhs: &CoherentSuperposition) -> Result<Self> {
        for m in &rhs.modes {
            if self.modes.contains(m) {
                return Err(SimError::DuplicateMode(m.clone()));
            }
        }
        let mut modes = self.modes.clone();
        modes.extend(rhs.modes.iter().cloned());
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for lt in &self.terms {
            for rt in &rhs.terms {
                let mut amplitudes = lt.amplitudes.clone();
                amplitudes.extend_from_slice(&rt.amplitudes);
                terms.push(BranchTerm { coefficient: lt.coefficient * rt.coefficient, amplitudes });
            }
        }
        CoherentSuperposition::new(modes, terms)
    }

    /// ∣⟨target∣self⟩∣² with both states normalized.
    pub fn fidelity(&self, target: &CoherentSuperposition) -> Result<f64> {
        let n_self = self.norm_squared();
        let n_target = target.norm_squared();
        let tiny = ToleranceConfig::default().coeff_zero_tol;
        if n_self <= tiny || n_target <= tiny {
            return Err(SimError::Degenerate("fidelity of a zero-norm state".into()));
        }
        let ip = target.inner_product(self)?;
        Ok(ip.norm_sqr() / (n_self * n_target))
    }

    /// Copy with a fresh register of the same length.
    pub fn relabeled(&self, labels: &[ModeLabel]) -> Result<Self> {
        if labels.len() != self.modes.len() {
            return Err(SimError::ModeCountMismatch { left: self.modes.len(), right: labels.len() });
        }
        for (i, m) in labels.iter().enumerate() {
            if labels[..i].contains(m) {
                return Err(SimError::DuplicateMode(m.clone()));
            }
        }
        Ok(CoherentSuperposition { modes: labels.to_vec(), terms: self.terms.clone() })
    }

    /// Copy with one mode renamed in place.
    pub fn renamed_mode(&self, from: &ModeLabel, to: ModeLabel) -> Result<Self> {
        let idx = self.mode_index(from)?;
        if &to != from && self.modes.contains(&to) {
            return Err(SimError::DuplicateMode(to));
        }
        let mut modes = self.modes.clone();
        modes[idx] = to;
        Ok(CoherentSuperposition { modes, terms: self.terms.clone() })
    }

    /// Drop the modes at `indices` from the register and from every term.
    ///
    /// Callers are responsible for making sure the removal is physically
    /// meaningful (all terms agree on the removed amplitudes).
    pub(crate) fn without_mode_indices(&self, indices: &[usize]) -> Self {
        let keep: Vec<usize> =
            (0..self.modes.len()).filter(|i| !indices.contains(i)).collect();
        let modes = keep.iter().map(|&i| self.modes[i].clone()).collect();
        let terms = self
            .terms
            .iter()
            .map(|t| BranchTerm {
                coefficient: t.coefficient,
                amplitudes: keep.iter().map(|&i| t.amplitudes[i]).collect(),
            })
            .collect();
        CoherentSuperposition { modes, terms }
    }
}
