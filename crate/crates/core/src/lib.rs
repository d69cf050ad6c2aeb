//! Exact desk-scale simulator of linear-optics circuits over superpositions of
//! multimode coherent states.
//!
//! The engine represents a state as a finite list of product terms, each a
//! complex coefficient together with one coherent amplitude per spatial mode,
//! and computes every overlap, norm, probability, and fidelity by contracting
//! the Gram matrix of the (non-orthogonal) coherent family. On top of the
//! engine sit:
//!
//! - [`optics`]: balanced beam splitters, mode swaps, vacuum post-selection,
//!   physical vacuum projection, and non-distinguishing detection;
//! - [`protocols`]: the two entanglement concentration pipelines for 4-mode
//!   Cluster-type entangled coherent states, their closed-form normalization
//!   constants N₁–N₅, and both success-probability formulas;
//! - [`dsl`]: a line-oriented circuit language (`.circ` files) with a parser,
//!   executor, and canonical formatter;
//! - [`sweep`]: deterministic CSV parameter sweeps of the success
//!   probabilities;
//! - [`validate`]: a self-check suite comparing every closed form against the
//!   exact engine.

pub mod dsl;
pub mod optics;
pub mod protocols;
pub mod state;
pub mod sweep;
pub mod validate;

pub use optics::SelectionOutcome;
pub use state::{
    mode_overlap, BranchTerm, CoherentSuperposition, ModeLabel, Result, SimError, ToleranceConfig,
};
