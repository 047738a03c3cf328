//! Execution engines for compiled schedules and analytic protocols.

mod recurrence;
mod statevector;
mod virtual_cool;

pub use recurrence::run_tree_recurrence;
pub use statevector::{run_postselected, run_statevector, MultiCopyState};
pub use virtual_cool::{
    brute_force_virtual_cool_oracle, virtual_cool, ConvergencePrediction, ObservableCurve,
    VirtualCoolResult,
};

use crate::qcore::DensityOp;

/// Per-layer trace record, captured when requested via [`RunOptions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerRecord {
    pub layer: usize,
    /// First-copy energy Tr(H φ̃₁) after this layer.
    pub energy: f64,
    /// First-copy purity Tr(φ̃₁²).
    pub purity: f64,
    /// Σ_k Tr(H_k ρ) over all copies; conserved by every schedule.
    /// Absent for the two-copy recurrence engine.
    pub total_energy: Option<f64>,
}

/// Knobs for a single engine run.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Capture a [`LayerRecord`] after every layer.
    pub record_layers: bool,
}

/// Result of one protocol execution.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Reduced state of the first copy.
    pub first_copy: DensityOp,
    /// Tr(H φ̃₁).
    pub energy: f64,
    /// Fidelity with the exact imaginary-time-evolved target state.
    pub fidelity_beta: f64,
    /// Fidelity with the ground state.
    pub fidelity_ground: f64,
    /// Cumulative post-selection probability; 1 without post-selection.
    pub success_probability: f64,
    /// Set when a post-selection projection probability underflowed; the
    /// metric fields are NaN in that case.
    pub aborted: bool,
    pub layer_records: Vec<LayerRecord>,
    pub warnings: Vec<String>,
}
