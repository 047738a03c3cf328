//! Gate error-law measurement: trace distances on an eps grid, fitted
//! log-log slopes, and Richardson extrapolation of the leading
//! coefficient for comparison with the analytic σ(K²).

use crate::error::Result;
use crate::gates::{gate_u, gate_v, gate_w, sigma_k2, GateKind, TwoCopyOperator};
use crate::models::{imaginary_evolved, HamiltonianSpec};
use crate::numerics::NumericsConfig;
use crate::qcore::{trace_distance, DensityOp, StateVector};

use super::log_log_slope;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateScalingRow {
    pub eps: f64,
    /// Joint two-copy trace distance to the ideal pair state.
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct GateScalingReport {
    pub gate: GateKind,
    pub rows: Vec<GateScalingRow>,
    /// Fitted log-log slope; NaN when the distances vanish (eigenstate
    /// input).
    pub slope: f64,
    /// distance/eps² extrapolated to eps -> 0 (U and V only).
    pub richardson_coefficient: Option<f64>,
    /// σ(K²) evaluated on the input state (U and V only).
    pub analytic_sigma: Option<f64>,
}

/// Halving grid 0.1, 0.05, ..., ~1.56e-3 inside the paper's fit window.
pub fn default_eps_grid() -> Vec<f64> {
    (0..7).map(|k| 0.1 / f64::powi(2.0, k)).collect()
}

/// Measures the gate error law on an eps grid.
pub fn gate_scaling_report(
    h: &HamiltonianSpec,
    phi0: &StateVector,
    kind: GateKind,
    eps_grid: &[f64],
    cfg: &NumericsConfig,
) -> Result<GateScalingReport> {
    let mut rows = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let op = match kind {
            GateKind::U => gate_u(h, eps, 1, cfg)?,
            GateKind::V => gate_v(h, eps, 1, cfg)?,
            GateKind::W => gate_w(h, eps, cfg)?,
        };
        let distance = joint_distance(h, phi0, kind, eps, &op, cfg)?;
        rows.push(GateScalingRow { eps, distance });
    }

    let clean: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.distance > 1e-13)
        .map(|r| (r.eps, r.distance))
        .collect();
    let slope = if clean.len() == rows.len() {
        log_log_slope(&clean)
    } else {
        f64::NAN
    };

    let (richardson_coefficient, analytic_sigma) = match kind {
        GateKind::U | GateKind::V => {
            (richardson_eps2(&rows), Some(sigma_k2(h, phi0)))
        }
        GateKind::W => (None, None),
    };

    Ok(GateScalingReport {
        gate: kind,
        rows,
        slope,
        richardson_coefficient,
        analytic_sigma,
    })
}

/// Linear extrapolation of c(eps) = distance/eps² to eps -> 0 from the two
/// smallest grid points.
fn richardson_eps2(rows: &[GateScalingRow]) -> Option<f64> {
    let mut sorted: Vec<&GateScalingRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.eps.partial_cmp(&b.eps).unwrap());
    let (r1, r2) = (sorted.first()?, sorted.get(1)?);
    let c1 = r1.distance / (r1.eps * r1.eps);
    let c2 = r2.distance / (r2.eps * r2.eps);
    Some((c1 * r2.eps - c2 * r1.eps) / (r2.eps - r1.eps))
}

/// ½||ideal - gate output||₁ on the joint pair state.
fn joint_distance(
    h: &HamiltonianSpec,
    phi0: &StateVector,
    kind: GateKind,
    eps: f64,
    op: &TwoCopyOperator,
    cfg: &NumericsConfig,
) -> Result<f64> {
    let joint = phi0.tensor(phi0);
    let out = StateVector::new(op.matrix().mul_vec(joint.amplitudes()))?.to_density();
    let ideal = ideal_pair(h, phi0, kind, eps, cfg)?;
    trace_distance(&ideal, &out)
}

/// Ideal pair state for one gate application (direction sign +1).
fn ideal_pair(
    h: &HamiltonianSpec,
    phi0: &StateVector,
    kind: GateKind,
    eps: f64,
    cfg: &NumericsConfig,
) -> Result<DensityOp> {
    let cooled = imaginary_evolved(h, phi0, eps, cfg)?;
    let heated = imaginary_evolved(h, phi0, -eps, cfg)?;
    let pair = match kind {
        GateKind::U => cooled.tensor(&heated),
        GateKind::V => {
            // Both copies pick up eps of forward real time.
            let rot = h.real_evolution(eps);
            let c = StateVector::new(rot.mul_vec(cooled.amplitudes()))?;
            let ht = StateVector::new(rot.mul_vec(heated.amplitudes()))?;
            c.tensor(&ht)
        }
        GateKind::W => {
            // First copy heats; second cools and acquires √eps real time.
            let rot = h.real_evolution(eps.sqrt());
            let c = StateVector::new(rot.mul_vec(cooled.amplitudes()))?;
            heated.tensor(&c)
        }
    };
    Ok(pair.to_density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{initial_state, InitialStateSpec};

    fn cfg() -> NumericsConfig {
        NumericsConfig::default()
    }

    #[test]
    fn u_and_v_slopes_are_two() {
        let h = HamiltonianSpec::single_qubit_z();
        let phi0 = initial_state(&InitialStateSpec::PlusAll, &h, &cfg()).unwrap();
        for kind in [GateKind::U, GateKind::V] {
            let rep =
                gate_scaling_report(&h, &phi0, kind, &default_eps_grid(), &cfg()).unwrap();
            assert!(
                (rep.slope - 2.0).abs() <= 0.05,
                "{kind:?} slope {}",
                rep.slope
            );
            let coeff = rep.richardson_coefficient.unwrap();
            let sigma = rep.analytic_sigma.unwrap();
            assert!((sigma - 2.0).abs() < 1e-12, "σ(K²) for σz,|+> is 2");
            assert!(
                (coeff / sigma - 1.0).abs() <= 0.02,
                "{kind:?} coefficient {coeff} vs σ {sigma}"
            );
        }
    }

    #[test]
    fn w_slope_is_three_halves() {
        let h = HamiltonianSpec::single_qubit_z();
        let phi0 = initial_state(&InitialStateSpec::PlusAll, &h, &cfg()).unwrap();
        let rep =
            gate_scaling_report(&h, &phi0, GateKind::W, &default_eps_grid(), &cfg()).unwrap();
        assert!((rep.slope - 1.5).abs() <= 0.1, "W slope {}", rep.slope);
        assert!(rep.richardson_coefficient.is_none());
    }

    #[test]
    fn eigenstate_distances_vanish() {
        let h = HamiltonianSpec::single_qubit_z();
        let gs = h.ground_state();
        let rep =
            gate_scaling_report(&h, &gs, GateKind::U, &default_eps_grid(), &cfg()).unwrap();
        for row in &rep.rows {
            assert!(row.distance <= 1e-12, "eigenstate distance {}", row.distance);
        }
        assert!(rep.slope.is_nan());
    }
}
