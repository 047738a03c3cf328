//! Centralized tolerances and size caps.
//!
//! Every tolerance used by contract checks, invariants, and property tests
//! lives here so there is a single place to tighten or loosen them.

/// Tolerances and caps consulted throughout the crate.
#[derive(Debug, Clone, Copy)]
pub struct NumericsConfig {
    /// Relative Hermiticity tolerance: max|A - A†| <= tol * max|A|.
    pub hermiticity_tol: f64,
    /// Unitarity residual tolerance: max|U†U - I|.
    pub unitarity_tol: f64,
    /// State-norm tolerance after normalization: | ||psi|| - 1 |.
    pub norm_tol: f64,
    /// Trace tolerance for density operators.
    pub trace_tol: f64,
    /// Allowed negative eigenvalue slack for positive operators.
    pub psd_tol: f64,
    /// Relative degeneracy tolerance (scaled by the operator norm).
    pub degeneracy_rel_tol: f64,
    /// Maximum number of statevector amplitudes.
    pub statevector_amp_cap: usize,
    /// Maximum side length of a dense density operator.
    pub density_side_cap: usize,
    /// Maximum single-copy dimension for the tree recurrence engine.
    pub recurrence_dim_cap: usize,
    /// Maximum number of spin sites for the Ising builder.
    pub ising_site_cap: u32,
    /// Maximum depth parameter for schedule builders.
    pub schedule_depth_cap: u32,
    /// Largest accepted gate step parameter.
    pub eps_max: f64,
    /// Step size above which higher-order gate errors dominate; a warning
    /// is attached to runs that exceed it.
    pub eps_warn: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        NumericsConfig {
            hermiticity_tol: 1e-12,
            unitarity_tol: 1e-10,
            norm_tol: 1e-10,
            trace_tol: 1e-10,
            psd_tol: 1e-10,
            degeneracy_rel_tol: 1e-9,
            statevector_amp_cap: 1 << 22,
            density_side_cap: 1 << 13,
            recurrence_dim_cap: 1 << 7,
            ising_site_cap: 10,
            schedule_depth_cap: 12,
            eps_max: 1.0,
            eps_warn: 0.3,
        }
    }
}
