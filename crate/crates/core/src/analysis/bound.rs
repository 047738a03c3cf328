//! Convergence bound for the tree recurrence.
//!
//! The first copy after n layers at step β/n satisfies
//!
//!   ||φ_β - φ̃₁⁽ⁿ⁾||₁ ≤ (β σ_max(K²) / (2 n ||H||)) (e^{4β||H||} - 1)
//!
//! up to O(1/n²), where σ_max(K²) is the largest standard deviation of K²
//! along the exact imaginary-time trajectory. The bound is asserted only
//! in the small-step regime eps ≤ 0.1; outside it the slack is reported,
//! not asserted.

use crate::engines::{run_tree_recurrence, RunOptions};
use crate::error::{Error, Result};
use crate::gates::sigma_k2_from_weights;
use crate::models::{imaginary_evolved, initial_state, HamiltonianSpec, InitialStateSpec};
use crate::numerics::NumericsConfig;
use crate::qcore::trace_distance;

/// Bound evaluation paired with the measured recurrence error.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub beta: f64,
    pub n: u32,
    pub eps: f64,
    pub h_norm: f64,
    /// σ_l(K²) along the exact trajectory, layers 0..n-1.
    pub sigma_per_layer: Vec<f64>,
    pub sigma_max: f64,
    /// B_K = ||K||² + ||K²||, the second-order bound constant.
    pub b_k: f64,
    /// Bound value on ||φ_β - φ̃₁⁽ⁿ⁾||₁.
    pub bound: f64,
    /// Measured one-norm distance (twice the trace distance).
    pub measured: f64,
    /// bound - measured.
    pub slack: f64,
}

impl BoundReport {
    /// True when the bound assertion regime applies.
    pub fn in_asserted_regime(&self) -> bool {
        self.eps <= 0.1
    }
}

/// Evaluates the bound and runs the recurrence for the measured distance.
pub fn tree_bound(
    h: &HamiltonianSpec,
    init: &InitialStateSpec,
    beta: f64,
    n: u32,
    cfg: &NumericsConfig,
) -> Result<BoundReport> {
    if n == 0 || beta <= 0.0 {
        return Err(Error::Contract(format!(
            "tree bound needs n >= 1 and beta > 0 (got n={n}, beta={beta})"
        )));
    }
    let eps = beta / n as f64;
    let phi0 = initial_state(init, h, cfg)?;
    let evals = h.eigenvalues();
    let base_weights: Vec<f64> = h
        .to_eigenbasis(&phi0)
        .iter()
        .map(|c| c.norm_sqr())
        .collect();

    // Spectral weights of the exact trajectory state at layer l are
    // proportional to w_i e^{-2 l eps E_i}; evaluate with a shift so large
    // exponents cannot overflow.
    let mut sigma_per_layer = Vec::with_capacity(n as usize);
    for l in 0..n {
        let le = 2.0 * l as f64 * eps;
        let log_w: Vec<f64> = base_weights
            .iter()
            .zip(evals.iter())
            .map(|(&w, &e)| {
                if w > 0.0 {
                    w.ln() - le * e
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let shift = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = log_w.iter().map(|&lw| (lw - shift).exp()).collect();
        let z: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= z;
        }
        sigma_per_layer.push(sigma_k2_from_weights(evals, &weights));
    }
    let sigma_max = sigma_per_layer.iter().copied().fold(0.0, f64::max);

    let h_norm = h.operator_norm();
    let spread = evals[evals.len() - 1] - evals[0];
    let b_k = 2.0 * spread * spread;
    let bound = if h_norm > 1e-14 {
        beta * sigma_max / (2.0 * n as f64 * h_norm) * ((4.0 * beta * h_norm).exp() - 1.0)
    } else {
        // ||H|| -> 0 limit of the same expression.
        2.0 * beta * beta * sigma_max / n as f64
    };

    let run = run_tree_recurrence(h, init, eps, n, RunOptions::default(), cfg)?;
    let ideal = imaginary_evolved(h, &phi0, beta, cfg)?;
    let measured = 2.0 * trace_distance(&ideal.to_density(), &run.first_copy)?;

    Ok(BoundReport {
        beta,
        n,
        eps,
        h_norm,
        sigma_per_layer,
        sigma_max,
        b_k,
        bound,
        measured,
        slack: bound - measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn eigenstate_trajectory_has_zero_error() {
        let h = HamiltonianSpec::single_qubit_z();
        let init = InitialStateSpec::Explicit(h.ground_state());
        let r = tree_bound(&h, &init, 0.5, 10, &cfg()).unwrap();
        assert!(r.measured < 1e-12, "measured {}", r.measured);
        assert!(r.bound >= 0.0);
        assert!(r.sigma_max < 1e-10);
    }

    #[test]
    fn bound_dominates_measured_error() {
        let h = HamiltonianSpec::single_qubit_z();
        let init = InitialStateSpec::PlusAll;
        let r = tree_bound(&h, &init, 0.5, 20, &cfg()).unwrap();
        assert!(r.in_asserted_regime());
        assert!(
            r.slack >= -1e-8,
            "bound {} < measured {}",
            r.bound,
            r.measured
        );
    }

    #[test]
    fn bound_scales_inversely_with_layers() {
        let h = HamiltonianSpec::single_qubit_z();
        let init = InitialStateSpec::PlusAll;
        let beta = 0.4;
        let b1 = tree_bound(&h, &init, beta, 20, &cfg()).unwrap();
        let b2 = tree_bound(&h, &init, beta, 40, &cfg()).unwrap();
        // Doubling n halves the bound, up to the σ_max grid change.
        let ratio = b2.bound / b1.bound;
        assert!((ratio - 0.5).abs() < 0.05 * 0.5, "ratio {ratio}");
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let h = HamiltonianSpec::single_qubit_z();
        let init = InitialStateSpec::PlusAll;
        assert!(tree_bound(&h, &init, 0.0, 10, &cfg()).is_err());
        assert!(tree_bound(&h, &init, 0.5, 0, &cfg()).is_err());
    }
}
