//! Two-copy recurrence for the tree circuit.
//!
//! The reduced state of the first copy after layer l+1 equals
//! Tr₂(U φ̃⊗φ̃ U†) with φ̃ the layer-l state, so the full 2^n-copy tree
//! never has to be simulated. Everything runs in the eigenbasis of H,
//! where e^{-i eps K} is diagonal and e^{±iπ/4 S} acts by a four-point
//! elementwise stencil; one layer costs O(d⁴).

use num_complex::Complex64;
use rayon::prelude::*;

use super::{LayerRecord, RunOptions, RunResult};
use crate::error::{Error, Result};
use crate::models::{imaginary_evolved, initial_state, HamiltonianSpec, InitialStateSpec};
use crate::numerics::NumericsConfig;
use crate::qcore::{fidelity_pure, ComplexMatrix, DensityOp, Purity};

const PAR_THRESHOLD: usize = 1 << 18;

/// Iterates the tree recurrence n times from the pure initial state and
/// returns first-copy metrics. The cooling direction (sign +1) is fixed,
/// matching the default tree schedule.
pub fn run_tree_recurrence(
    h: &HamiltonianSpec,
    init: &InitialStateSpec,
    eps: f64,
    n: u32,
    opts: RunOptions,
    cfg: &NumericsConfig,
) -> Result<RunResult> {
    let d = h.dim();
    if d > cfg.recurrence_dim_cap {
        return Err(Error::CapExceeded(format!(
            "recurrence copy dim {d} exceeds cap {}",
            cfg.recurrence_dim_cap
        )));
    }
    if !(eps >= 0.0 && eps <= cfg.eps_max) {
        return Err(Error::Contract(format!(
            "epsilon {eps} outside [0, {}]",
            cfg.eps_max
        )));
    }
    let mut warnings = Vec::new();
    if let Some(w) = crate::gates::epsilon_warning(eps, cfg) {
        warnings.push(w);
    }

    let phi0 = initial_state(init, h, cfg)?;
    let coeffs = h.to_eigenbasis(&phi0);
    let evals = h.eigenvalues().to_vec();

    // First-copy state in the eigenbasis, d x d row-major.
    let mut rho: Vec<Complex64> = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            rho.push(coeffs[a] * coeffs[b].conj());
        }
    }

    // Phase of e^{-i eps K} on the pair index (a, b): e^{-i eps (E_a - E_b)}.
    let phases: Vec<Complex64> = (0..d * d)
        .map(|p| {
            let (a, b) = (p / d, p % d);
            Complex64::new(0.0, -eps * (evals[a] - evals[b])).exp()
        })
        .collect();

    let dd = d * d;
    let mut pair = vec![Complex64::new(0.0, 0.0); dd * dd];
    let mut scratch = vec![Complex64::new(0.0, 0.0); dd * dd];
    let mut records = Vec::new();

    for layer in 1..=n {
        kron_square_into(&rho, d, &mut pair);
        swap_conjugate(&pair, &mut scratch, d, -1.0);
        phase_conjugate(&mut scratch, &phases);
        swap_conjugate(&scratch, &mut pair, d, 1.0);
        trace_out_second(&pair, d, &mut rho);

        // Keep the iterate exactly Hermitian with unit trace; FP drift
        // compounds over tens of layers otherwise.
        hermitize_unit_trace(&mut rho, d);

        if opts.record_layers {
            let energy: f64 = (0..d).map(|a| evals[a] * rho[a * d + a].re).sum();
            let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
            records.push(LayerRecord {
                layer: layer as usize,
                energy,
                purity,
                total_energy: None,
            });
        }
    }

    let energy: f64 = (0..d).map(|a| evals[a] * rho[a * d + a].re).sum();

    // Back to the lab basis for the returned state.
    let rho_eig = ComplexMatrix::new(d, d, rho)?;
    let v = h.eigenvectors();
    let rho_lab = &(v * &rho_eig) * &v.adjoint();
    let first_copy = DensityOp::from_matrix(rho_lab, Purity::Unknown, cfg)?;

    let ideal = imaginary_evolved(h, &phi0, n as f64 * eps, cfg)?;
    let fidelity_beta = fidelity_pure(&ideal, &first_copy)?;
    let fidelity_ground = fidelity_pure(&h.ground_state(), &first_copy)?;

    Ok(RunResult {
        first_copy,
        energy,
        fidelity_beta,
        fidelity_ground,
        success_probability: 1.0,
        aborted: false,
        layer_records: records,
        warnings,
    })
}

/// pair = rho ⊗ rho on the two-copy index space.
fn kron_square_into(rho: &[Complex64], d: usize, pair: &mut [Complex64]) {
    let dd = d * d;
    if pair.len() >= PAR_THRESHOLD {
        pair.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let (row, col) = (idx / dd, idx % dd);
            let (a, b) = (row / d, row % d);
            let (c, e) = (col / d, col % d);
            *slot = rho[a * d + c] * rho[b * d + e];
        });
    } else {
        for (idx, slot) in pair.iter_mut().enumerate() {
            let (row, col) = (idx / dd, idx % dd);
            let (a, b) = (row / d, row % d);
            let (c, e) = (col / d, col % d);
            *slot = rho[a * d + c] * rho[b * d + e];
        }
    }
}

/// out = e^{i sign π/4 S} X e^{-i sign π/4 S}
///     = ½ (X + SXS) + (i·sign/2)(SX - XS).
fn swap_conjugate(x: &[Complex64], out: &mut [Complex64], d: usize, sign: f64) {
    let dd = d * d;
    let half = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5 * sign);
    let kernel = |idx: usize| -> Complex64 {
        let (row, col) = (idx / dd, idx % dd);
        let (a, b) = (row / d, row % d);
        let (c, e) = (col / d, col % d);
        let row_s = b * d + a;
        let col_s = e * d + c;
        let plain = x[row * dd + col];
        let s_left = x[row_s * dd + col];
        let s_right = x[row * dd + col_s];
        let s_both = x[row_s * dd + col_s];
        half * (plain + s_both) + ih * (s_left - s_right)
    };
    if out.len() >= PAR_THRESHOLD {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(idx, slot)| *slot = kernel(idx));
    } else {
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot = kernel(idx);
        }
    }
}

/// X <- D X D† with D = diag(phases) on the pair index.
fn phase_conjugate(x: &mut [Complex64], phases: &[Complex64]) {
    let dd = phases.len();
    if x.len() >= PAR_THRESHOLD {
        x.par_iter_mut().enumerate().for_each(|(idx, slot)| {
            let (row, col) = (idx / dd, idx % dd);
            *slot *= phases[row] * phases[col].conj();
        });
    } else {
        for (idx, slot) in x.iter_mut().enumerate() {
            let (row, col) = (idx / dd, idx % dd);
            *slot *= phases[row] * phases[col].conj();
        }
    }
}

/// rho[a, c] = Σ_b pair[(a b), (c b)].
fn trace_out_second(pair: &[Complex64], d: usize, rho: &mut [Complex64]) {
    let dd = d * d;
    for a in 0..d {
        for c in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..d {
                acc += pair[(a * d + b) * dd + (c * d + b)];
            }
            rho[a * d + c] = acc;
        }
    }
}

fn hermitize_unit_trace(rho: &mut [Complex64], d: usize) {
    for a in 0..d {
        for b in (a + 1)..d {
            let avg = (rho[a * d + b] + rho[b * d + a].conj()) * Complex64::new(0.5, 0.0);
            rho[a * d + b] = avg;
            rho[b * d + a] = avg.conj();
        }
        rho[a * d + a] = Complex64::new(rho[a * d + a].re, 0.0);
    }
    let tr: f64 = (0..d).map(|a| rho[a * d + a].re).sum();
    if tr > 0.0 {
        let inv = Complex64::new(1.0 / tr, 0.0);
        for z in rho.iter_mut() {
            *z *= inv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::build_tree;
    use crate::engines::run_statevector;
    use crate::qcore::trace_distance;

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn matches_full_statevector_tree() {
        let h = HamiltonianSpec::single_qubit_z();
        let init = InitialStateSpec::PlusAll;
        for (n, tol) in [(1u32, 1e-10), (2, 1e-10), (3, 1e-9)] {
            for eps in [0.05, 0.2] {
                let s = build_tree(n, &cfg()).unwrap();
                let full =
                    run_statevector(&s, &h, &init, eps, RunOptions::default(), &cfg()).unwrap();
                let rec =
                    run_tree_recurrence(&h, &init, eps, n, RunOptions::default(), &cfg()).unwrap();
                let dist = trace_distance(&full.first_copy, &rec.first_copy).unwrap();
                assert!(dist <= tol, "n={n} eps={eps}: distance {dist}");
            }
        }
    }

    #[test]
    fn eigenstate_is_fixed_point() {
        let h = HamiltonianSpec::mixed_field_ising(2, true, &cfg()).unwrap();
        let e = h.eigenvector(2);
        let init = InitialStateSpec::Explicit(e.clone());
        let r = run_tree_recurrence(&h, &init, 0.2, 5, RunOptions::default(), &cfg()).unwrap();
        let dist = trace_distance(&e.to_density(), &r.first_copy).unwrap();
        assert!(dist < 1e-10, "fixed point drifted by {dist}");
    }

    #[test]
    fn energy_is_nonincreasing_in_layers_at_small_eps() {
        let h = HamiltonianSpec::mixed_field_ising(3, true, &cfg()).unwrap();
        let init = InitialStateSpec::OverlapMix { p: 0.125 };
        let opts = RunOptions {
            record_layers: true,
        };
        let r = run_tree_recurrence(&h, &init, 0.02, 25, opts, &cfg()).unwrap();
        let mut last = f64::INFINITY;
        for rec in &r.layer_records {
            assert!(
                rec.energy <= last + 1e-9,
                "energy rose at layer {}: {} -> {}",
                rec.layer,
                last,
                rec.energy
            );
            last = rec.energy;
        }
    }

    #[test]
    fn converges_toward_ground_state() {
        let h = HamiltonianSpec::mixed_field_ising(2, true, &cfg()).unwrap();
        let init = InitialStateSpec::OverlapMix { p: 0.25 };
        let r = run_tree_recurrence(&h, &init, 0.05, 40, RunOptions::default(), &cfg()).unwrap();
        assert!(
            r.fidelity_ground > 0.9,
            "ground fidelity {} after 40 layers",
            r.fidelity_ground
        );
    }

    #[test]
    fn recurrence_cap() {
        let mut small = cfg();
        small.recurrence_dim_cap = 2;
        let h = HamiltonianSpec::mixed_field_ising(2, true, &small).unwrap();
        assert!(matches!(
            run_tree_recurrence(
                &h,
                &InitialStateSpec::PlusAll,
                0.1,
                2,
                RunOptions::default(),
                &small
            ),
            Err(Error::CapExceeded(_))
        ));
    }
}
