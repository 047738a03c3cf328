//! Swap-trick virtual cooling from a single layer of U gates on
//! maximally entangled internal pairs.
//!
//! One U layer turns each copy into the state
//! ρ̃ = 1/D + (i/2D²)(Tr(e^{-i2εH}) e^{i2εH} - Tr(e^{i2εH}) e^{-i2εH}),
//! which is diagonal in the energy basis with
//! p_i = 1/D + (1/D²) Σ_j sin(2ε(E_j - E_i)). Cyclic-SWAP estimation on n
//! copies then probes Tr(x ρ̃ⁿ)/Tr(ρ̃ⁿ), which converges exponentially in
//! n to a uniform mixture over the maximal-probability eigenstates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::gate_u;
use crate::models::{initial_state, HamiltonianSpec, InitialStateSpec};
use crate::numerics::NumericsConfig;
use crate::qcore::{kron, partial_trace, ComplexMatrix, DensityOp, Purity, StateVector};

/// Ratio estimates Tr(x ρ̃ⁿ)/Tr(ρ̃ⁿ) for one observable, indexed by n-1.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableCurve {
    pub values: Vec<f64>,
}

/// Exponential-convergence prediction from the probability spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePrediction {
    /// Largest probability p_*.
    pub p_star: f64,
    /// Second-largest probability p_** (= p_* when fully degenerate).
    pub p_second: f64,
    /// Number of eigenstates sharing p_*.
    pub degeneracy: usize,
    pub dim: usize,
    /// Per-n decay rate ln(p_*/p_**); 0 when no second level exists.
    pub rate: f64,
    /// Asymptotic weight floor 1/x for the maximal-probability state.
    pub floor: f64,
    /// Lower bound (1/x)/(1 + ((D-x)/x)(p_**/p_*)ⁿ) per n.
    pub lower_bound: Vec<f64>,
    /// Computed weight p_*ⁿ/Σp_iⁿ of one maximal-probability eigenstate.
    pub ground_weight: Vec<f64>,
}

/// Output of the analytic virtual-cooling pipeline.
#[derive(Debug, Clone)]
pub struct VirtualCoolResult {
    /// Single-internal-copy state after one U layer, in the lab basis.
    pub rho_tilde: DensityOp,
    /// Its eigenbasis probabilities p_i (ascending energy order).
    pub probabilities: Vec<f64>,
    /// One curve per requested observable.
    pub estimates: Vec<ObservableCurve>,
    /// Tr(ρ̃ⁿ); underflows to 0 for large n — see `log_denominators`.
    pub denominators: Vec<f64>,
    /// ln Tr(ρ̃ⁿ), accumulated in the log domain.
    pub log_denominators: Vec<f64>,
    pub prediction: ConvergencePrediction,
}

/// Computes ρ̃ and the swap-trick ratio estimates analytically.
pub fn virtual_cool(
    h_int: &HamiltonianSpec,
    eps: f64,
    n_max: u32,
    observables: &[ComplexMatrix],
    cfg: &NumericsConfig,
) -> Result<VirtualCoolResult> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Contract(format!("epsilon {eps} must be >= 0")));
    }
    if n_max == 0 {
        return Err(Error::Contract("n_max must be >= 1".into()));
    }
    let dim = h_int.dim();
    let evals = h_int.eigenvalues();
    let d_f = dim as f64;

    let mut probabilities = Vec::with_capacity(dim);
    for (i, &ei) in evals.iter().enumerate() {
        let mut s = 0.0;
        for &ej in evals {
            s += (2.0 * eps * (ej - ei)).sin();
        }
        let p = 1.0 / d_f + s / (d_f * d_f);
        if p < -1e-10 {
            return Err(Error::NumericalRange(format!(
                "probability p_{i} = {p} went negative"
            )));
        }
        probabilities.push(p.max(0.0));
    }

    // ρ̃ in the lab basis.
    let v = h_int.eigenvectors();
    let mut scaled = v.clone();
    for (k, &p) in probabilities.iter().enumerate() {
        for r in 0..dim {
            scaled[(r, k)] *= Complex64::new(p, 0.0);
        }
    }
    let rho_tilde = DensityOp::from_matrix(&scaled * &v.adjoint(), Purity::Mixed, cfg)?;

    // Diagonal matrix elements of each observable in the energy basis.
    let obs_diags: Vec<Vec<f64>> = observables
        .iter()
        .map(|x| {
            if x.rows() != dim || x.cols() != dim {
                return Err(Error::Shape(format!(
                    "observable is {}x{}, Hamiltonian dim {dim}",
                    x.rows(),
                    x.cols()
                )));
            }
            let xv = x * v;
            let mut diag = Vec::with_capacity(dim);
            for k in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..dim {
                    acc += v[(r, k)].conj() * xv[(r, k)];
                }
                diag.push(acc.re);
            }
            Ok(diag)
        })
        .collect::<Result<_>>()?;

    // Probability ranking for the convergence prediction.
    let p_star = probabilities.iter().copied().fold(0.0, f64::max);
    let tol = 1e-9 * p_star.max(1e-300);
    let degeneracy = probabilities.iter().filter(|&&p| p >= p_star - tol).count();
    let p_second = probabilities
        .iter()
        .copied()
        .filter(|&p| p < p_star - tol)
        .fold(0.0, f64::max);
    let (p_second, rate) = if p_second > 0.0 {
        (p_second, (p_star / p_second).ln())
    } else {
        (p_star, 0.0)
    };

    // Log-domain weights per n: w_i(n) = exp(n (ln p_i - ln p_*)).
    let log_p: Vec<f64> = probabilities
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect();
    let log_p_star = p_star.ln();

    let mut estimates: Vec<ObservableCurve> = obs_diags
        .iter()
        .map(|_| ObservableCurve {
            values: Vec::with_capacity(n_max as usize),
        })
        .collect();
    let mut denominators = Vec::with_capacity(n_max as usize);
    let mut log_denominators = Vec::with_capacity(n_max as usize);
    let mut lower_bound = Vec::with_capacity(n_max as usize);
    let mut ground_weight = Vec::with_capacity(n_max as usize);
    let x = degeneracy as f64;
    let d_minus_x = (dim - degeneracy) as f64;

    for n in 1..=n_max {
        let nf = n as f64;
        let weights: Vec<f64> = log_p
            .iter()
            .map(|&lp| {
                if lp.is_finite() {
                    (nf * (lp - log_p_star)).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let z: f64 = weights.iter().sum();
        for (curve, diag) in estimates.iter_mut().zip(obs_diags.iter()) {
            let num: f64 = weights.iter().zip(diag.iter()).map(|(w, x)| w * x).sum();
            curve.values.push(num / z);
        }
        let log_denom = nf * log_p_star + z.ln();
        log_denominators.push(log_denom);
        denominators.push(log_denom.exp());
        ground_weight.push(1.0 / z);
        let ratio_n = if rate == 0.0 { 1.0 } else { (-nf * rate).exp() };
        lower_bound.push((1.0 / x) / (1.0 + (d_minus_x / x) * ratio_n));
    }

    Ok(VirtualCoolResult {
        rho_tilde,
        probabilities,
        estimates,
        denominators,
        log_denominators,
        prediction: ConvergencePrediction {
            p_star,
            p_second,
            degeneracy,
            dim,
            rate,
            floor: 1.0 / x,
            lower_bound,
            ground_weight,
        },
    })
}

/// Brute-force check of the ρ̃ closed form: builds two copies, each made
/// of two internal systems in the maximally entangled state, applies one
/// U gate generated by H_int ⊗ 1, and traces down to a single internal
/// system.
pub fn brute_force_virtual_cool_oracle(
    h_int: &HamiltonianSpec,
    eps: f64,
    cfg: &NumericsConfig,
) -> Result<DensityOp> {
    let d = h_int.dim();
    let pair_dim = d * d;
    if pair_dim > cfg.density_side_cap {
        return Err(Error::CapExceeded(format!(
            "internal pair dim {pair_dim} exceeds cap {}",
            cfg.density_side_cap
        )));
    }
    // Hamiltonian on one copy (= two internal systems): H_int ⊗ 1.
    let h_pair = HamiltonianSpec::explicit(
        kron(h_int.matrix(), &ComplexMatrix::identity(d), cfg)?,
        cfg,
    )?;
    let entangled = initial_state(&InitialStateSpec::MaxEntangled { d }, &h_pair, cfg)?;
    let joint = entangled.tensor(&entangled);
    let u = gate_u(&h_pair, eps, 1, cfg)?;
    let out = StateVector::new(u.matrix().mul_vec(joint.amplitudes()))?;
    // Trace out the second copy, then the second internal system.
    let one_copy = partial_trace(&out.to_density(), &[pair_dim, pair_dim], &[0])?;
    partial_trace(&one_copy, &[d, d], &[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::trace_distance;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn two_level_closed_form() {
        // H = σz: ρ̃ = ½I - (sin 4ε)/4 σz, so p_gs = ½ + (sin 4ε)/4.
        let h = HamiltonianSpec::single_qubit_z();
        let eps = 0.2;
        let r = virtual_cool(&h, eps, 3, &[], &cfg()).unwrap();
        let want = 0.5 + (4.0 * eps).sin() / 4.0;
        assert!((r.probabilities[0] - want).abs() < 1e-14);
        assert!((r.probabilities[1] - (1.0 - want)).abs() < 1e-14);
    }

    #[test]
    fn oracle_matches_closed_form_sigma_z() {
        let h = HamiltonianSpec::single_qubit_z();
        let eps = 0.2;
        let analytic = virtual_cool(&h, eps, 1, &[], &cfg()).unwrap();
        let brute = brute_force_virtual_cool_oracle(&h, eps, &cfg()).unwrap();
        let dist = trace_distance(&analytic.rho_tilde, &brute).unwrap();
        assert!(dist < 1e-10, "closed form vs circuit oracle: {dist}");
    }

    #[test]
    fn oracle_matches_closed_form_ising() {
        let h = HamiltonianSpec::mixed_field_ising(2, true, &cfg()).unwrap();
        let eps = 0.05;
        let analytic = virtual_cool(&h, eps, 1, &[], &cfg()).unwrap();
        let brute = brute_force_virtual_cool_oracle(&h, eps, &cfg()).unwrap();
        let dist = trace_distance(&analytic.rho_tilde, &brute).unwrap();
        assert!(dist < 1e-10, "closed form vs circuit oracle: {dist}");
    }

    #[test]
    fn zero_eps_gives_uniform_mixture() {
        let h = HamiltonianSpec::mixed_field_ising(2, true, &cfg()).unwrap();
        let d = h.dim() as f64;
        let r = virtual_cool(&h, 0.0, 4, &[h.matrix().clone()], &cfg()).unwrap();
        for p in &r.probabilities {
            assert!((p - 1.0 / d).abs() < 1e-14);
        }
        let tr_h: f64 = h.eigenvalues().iter().sum();
        for v in &r.estimates[0].values {
            assert!((v - tr_h / d).abs() < 1e-12);
        }
        let oracle = brute_force_virtual_cool_oracle(&h, 0.0, &cfg()).unwrap();
        let dist = trace_distance(&r.rho_tilde, &oracle).unwrap();
        assert!(dist < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one_and_bound_holds() {
        let h = HamiltonianSpec::mixed_field_ising(4, true, &cfg()).unwrap();
        let eps = 0.03 / 4.0;
        let r = virtual_cool(&h, eps, 200, &[h.matrix().clone()], &cfg()).unwrap();
        let total: f64 = r.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        for (w, b) in r
            .prediction
            .ground_weight
            .iter()
            .zip(r.prediction.lower_bound.iter())
        {
            assert!(w + 1e-12 >= *b, "weight {w} below bound {b}");
        }
    }

    #[test]
    fn energy_estimate_approaches_ground_energy() {
        let h = HamiltonianSpec::mixed_field_ising(3, true, &cfg()).unwrap();
        let eps = 0.01;
        let r = virtual_cool(&h, eps, 2000, &[h.matrix().clone()], &cfg()).unwrap();
        let last = *r.estimates[0].values.last().unwrap();
        assert!(
            (last - h.ground_energy()).abs() < 1e-3,
            "estimate {last} vs E_gs {}",
            h.ground_energy()
        );
        // Denominator shrinks exponentially: the shot-cost proxy.
        assert!(r.log_denominators[1999] < r.log_denominators[0]);
    }
}
