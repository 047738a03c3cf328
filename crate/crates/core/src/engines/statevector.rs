//! Full multi-copy statevector execution of compiled schedules.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{LayerRecord, RunOptions, RunResult};
use crate::compiler::{validate, Bookkeeping, Schedule, Step, ValidationOutcome};
use crate::error::{Error, Result};
use crate::gates::{
    apply_embedded_pair, apply_embedded_single, epsilon_warning, gate_u, gate_v, gate_w, GateKind,
};
use crate::models::{imaginary_evolved, initial_state, HamiltonianSpec, InitialStateSpec};
use crate::numerics::NumericsConfig;
use crate::qcore::{fidelity_pure, ComplexMatrix, DensityOp, Purity, StateVector};

/// Pure state of m identical copies of a d-dimensional system.
///
/// Copy 0 is the most significant index factor. Gate application works by
/// index arithmetic on the amplitude buffer; no d^m × d^m matrix is ever
/// materialized.
#[derive(Debug, Clone)]
pub struct MultiCopyState {
    copy_dim: usize,
    copies: usize,
    amps: Vec<Complex64>,
}

impl MultiCopyState {
    /// All `copies` copies initialized to `single`.
    pub fn new_product(single: &StateVector, copies: usize, cfg: &NumericsConfig) -> Result<Self> {
        let d = single.dim();
        let mut total = 1usize;
        for _ in 0..copies {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= cfg.statevector_amp_cap)
                .ok_or_else(|| {
                    Error::CapExceeded(format!(
                        "statevector of {copies} copies of dim {d} exceeds {} amplitudes",
                        cfg.statevector_amp_cap
                    ))
                })?;
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..copies {
            let mut next = Vec::with_capacity(amps.len() * d);
            for a in &amps {
                for b in single.amplitudes() {
                    next.push(a * b);
                }
            }
            amps = next;
        }
        debug_assert_eq!(amps.len(), total);
        Ok(MultiCopyState {
            copy_dim: d,
            copies,
            amps,
        })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn copy_dim(&self) -> usize {
        self.copy_dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Applies a two-copy unitary to copies (i, j).
    pub fn apply_pair(&mut self, op: &ComplexMatrix, i: usize, j: usize) {
        apply_embedded_pair(&mut self.amps, self.copy_dim, self.copies, i, j, op);
    }

    /// Applies a single-copy operator to one copy.
    pub fn apply_single(&mut self, op: &ComplexMatrix, copy: usize) {
        apply_embedded_single(&mut self.amps, self.copy_dim, self.copies, copy, op);
    }

    /// Reduced density operator of one copy.
    pub fn reduced_density(&self, copy: usize) -> DensityOp {
        let d = self.copy_dim;
        let s = d.pow((self.copies - 1 - copy) as u32);
        let mut rho = ComplexMatrix::zeros(d, d);
        let total = self.amps.len();
        let mut idx = 0usize;
        while idx < total {
            let digit = (idx / s) % d;
            if digit != 0 {
                idx += s; // skip the whole non-zero digit block
                continue;
            }
            for off in 0..s {
                let base = idx + off;
                for a in 0..d {
                    let za = self.amps[base + a * s];
                    for b in 0..d {
                        rho[(a, b)] += za * self.amps[base + b * s].conj();
                    }
                }
            }
            idx += s;
        }
        DensityOp::from_matrix(rho, Purity::Unknown, &NumericsConfig::default())
            .expect("reduced density is Hermitian by construction")
    }

    /// Projects one copy onto `target`, returning the pre-normalization
    /// projection probability and renormalizing the survivor.
    pub fn project_copy(&mut self, copy: usize, target: &[Complex64]) -> f64 {
        let d = self.copy_dim;
        assert_eq!(target.len(), d);
        let s = d.pow((self.copies - 1 - copy) as u32);
        let total = self.amps.len();
        let mut prob = 0.0f64;
        let mut idx = 0usize;
        while idx < total {
            let digit = (idx / s) % d;
            if digit != 0 {
                idx += s;
                continue;
            }
            for off in 0..s {
                let base = idx + off;
                let mut overlap = Complex64::new(0.0, 0.0);
                for a in 0..d {
                    overlap += target[a].conj() * self.amps[base + a * s];
                }
                prob += overlap.norm_sqr();
                for a in 0..d {
                    self.amps[base + a * s] = target[a] * overlap;
                }
            }
            idx += s;
        }
        if prob > 0.0 {
            let inv = 1.0 / prob.sqrt();
            for z in self.amps.iter_mut() {
                *z *= Complex64::new(inv, 0.0);
            }
        }
        prob
    }

    /// Σ_k Tr(H_k ρ): total energy over all copies.
    pub fn total_energy(&self, h: &HamiltonianSpec) -> f64 {
        (0..self.copies)
            .map(|k| energy_of(h, &self.reduced_density(k)))
            .sum()
    }
}

pub(crate) fn energy_of(h: &HamiltonianSpec, rho: &DensityOp) -> f64 {
    let d = h.dim();
    let hm = h.matrix();
    let rm = rho.matrix();
    let mut acc = 0.0;
    for a in 0..d {
        for b in 0..d {
            acc += (hm[(a, b)] * rm[(b, a)]).re;
        }
    }
    acc
}

/// Runs a schedule on the full d^m statevector.
///
/// Padding steps apply e^{-i eps H} per unit (e^{-i √eps H} for W
/// bookkeeping). Metrics compare the first copy against the exact
/// imaginary-time target determined by the replayed bookkeeping labels and
/// the schedule's direction sign.
pub fn run_statevector(
    schedule: &Schedule,
    h: &HamiltonianSpec,
    init: &InitialStateSpec,
    eps: f64,
    opts: RunOptions,
    cfg: &NumericsConfig,
) -> Result<RunResult> {
    run_schedule(schedule, h, init, eps, opts, cfg, false)
}

/// Like [`run_statevector`], but whenever a gate returns a copy's
/// bookkeeping label to zero the copy is projected back onto the initial
/// state, accumulating the success probability.
///
/// A projection probability below 1e-14 aborts the run: the result carries
/// `success_probability = 0`, `aborted = true`, and NaN metrics.
pub fn run_postselected(
    schedule: &Schedule,
    h: &HamiltonianSpec,
    init: &InitialStateSpec,
    eps: f64,
    opts: RunOptions,
    cfg: &NumericsConfig,
) -> Result<RunResult> {
    run_schedule(schedule, h, init, eps, opts, cfg, true)
}

#[allow(clippy::too_many_arguments)]
fn run_schedule(
    schedule: &Schedule,
    h: &HamiltonianSpec,
    init: &InitialStateSpec,
    eps: f64,
    opts: RunOptions,
    cfg: &NumericsConfig,
    post_select: bool,
) -> Result<RunResult> {
    if !(eps >= 0.0 && eps <= cfg.eps_max) {
        return Err(Error::Contract(format!(
            "epsilon {eps} outside [0, {}]",
            cfg.eps_max
        )));
    }
    let cert = match validate(schedule) {
        ValidationOutcome::Valid(c) => c,
        ValidationOutcome::Invalid(v) => {
            return Err(Error::Validation(format!(
                "step {}: {}",
                v.step_index, v.reason
            )))
        }
    };
    let has_w = schedule.uses_kind(GateKind::W);
    if has_w && (schedule.uses_kind(GateKind::U) || schedule.uses_kind(GateKind::V)) {
        return Err(Error::Contract(
            "schedules mixing W with U/V gates are not supported".into(),
        ));
    }
    // W heats the first copy; U/V follow the schedule sign (+1 = cool).
    let direction = if has_w { -1 } else { schedule.sign };
    let pad_unit = if has_w { eps.sqrt() } else { eps };

    let mut warnings = Vec::new();
    if let Some(w) = epsilon_warning(eps, cfg) {
        warnings.push(w);
    }

    let phi0 = initial_state(init, h, cfg)?;
    let mut state = MultiCopyState::new_product(&phi0, schedule.m_copies, cfg)?;

    let mut gate_mats: HashMap<GateKind, ComplexMatrix> = HashMap::new();
    for step in &schedule.steps {
        if let Step::Gate { kind, .. } = step {
            if !gate_mats.contains_key(kind) {
                let op = match kind {
                    GateKind::U => gate_u(h, eps, schedule.sign, cfg)?,
                    GateKind::V => gate_v(h, eps, schedule.sign, cfg)?,
                    GateKind::W => gate_w(h, eps, cfg)?,
                };
                gate_mats.insert(*kind, op.matrix().clone());
            }
        }
    }
    let mut pad_mats: HashMap<u32, ComplexMatrix> = HashMap::new();
    let mut projection_targets: HashMap<i32, Vec<Complex64>> = HashMap::new();

    let mut book = Bookkeeping::new(schedule.m_copies);
    let mut success = 1.0f64;
    let mut records = Vec::new();

    for (layer, range) in schedule.layer_ranges().into_iter().enumerate() {
        for step in &schedule.steps[range] {
            book.apply(step)
                .map_err(|e| Error::Validation(e.to_string()))?;
            match *step {
                Step::Gate { kind, i, j } => {
                    state.apply_pair(&gate_mats[&kind], i, j);
                    if post_select {
                        for copy in [i, j] {
                            if book.labels()[copy].re == 0 {
                                let im = book.labels()[copy].im;
                                let target = projection_targets.entry(im).or_insert_with(|| {
                                    h.real_evolution(im as f64 * pad_unit)
                                        .mul_vec(phi0.amplitudes())
                                });
                                let p = state.project_copy(copy, target);
                                success *= p;
                                if p < 1e-14 {
                                    return Ok(aborted_result(h, records, warnings));
                                }
                            }
                        }
                    }
                }
                Step::Pad { copy, steps } => {
                    let mat = pad_mats
                        .entry(steps)
                        .or_insert_with(|| h.real_evolution(pad_unit * steps as f64));
                    state.apply_single(mat, copy);
                }
            }
        }
        if opts.record_layers {
            let rho = state.reduced_density(0);
            records.push(LayerRecord {
                layer: layer + 1,
                energy: energy_of(h, &rho),
                purity: rho.purity_value(),
                total_energy: Some(state.total_energy(h)),
            });
        }
    }

    let rho1 = state.reduced_density(0);
    let energy = energy_of(h, &rho1);
    let first = cert.final_labels[0];
    let beta_target = direction as f64 * first.re as f64 * eps;
    let ideal = imaginary_evolved(h, &phi0, beta_target, cfg)?;
    let ideal = if first.im != 0 {
        StateVector::new(
            h.real_evolution(first.im as f64 * pad_unit)
                .mul_vec(ideal.amplitudes()),
        )?
    } else {
        ideal
    };
    let fidelity_beta = fidelity_pure(&ideal, &rho1)?;
    let fidelity_ground = fidelity_pure(&h.ground_state(), &rho1)?;

    Ok(RunResult {
        first_copy: rho1,
        energy,
        fidelity_beta,
        fidelity_ground,
        success_probability: success,
        aborted: false,
        layer_records: records,
        warnings,
    })
}

fn aborted_result(
    h: &HamiltonianSpec,
    records: Vec<LayerRecord>,
    warnings: Vec<String>,
) -> RunResult {
    let d = h.dim();
    let mixed = ComplexMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
    RunResult {
        first_copy: DensityOp::from_matrix(mixed, Purity::Mixed, &NumericsConfig::default())
            .expect("uniform state is Hermitian"),
        energy: f64::NAN,
        fidelity_beta: f64::NAN,
        fidelity_ground: f64::NAN,
        success_probability: 0.0,
        aborted: true,
        layer_records: records,
        warnings,
    }
}
