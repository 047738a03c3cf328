//! Deterministic step-size optimization.
//!
//! Coarse log-spaced grid followed by golden-section refinement around the
//! best bracket. The objective is assumed unimodal after the coarse grid;
//! multimodal traces fall back to refinement around the best grid point,
//! and the returned optimum is never worse than the best grid value.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Result of a step-size optimization.
#[derive(Debug, Clone)]
pub struct EpsOptimum {
    pub eps_star: f64,
    /// Objective value at `eps_star`.
    pub value: f64,
    /// Coarse grid trace as (eps, value) pairs.
    pub grid: Vec<(f64, f64)>,
    pub refine_iterations: u32,
    /// Set when the best grid point sits on the search boundary; the
    /// boundary value is returned un-refined.
    pub at_boundary: bool,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimizes `objective` over [eps_lo, eps_hi].
///
/// `grid_points` log-spaced evaluations (evaluated in parallel) bracket
/// the minimum; golden-section then refines to relative width `rel_tol`.
pub fn optimize_eps<F>(
    objective: F,
    eps_lo: f64,
    eps_hi: f64,
    rel_tol: f64,
    grid_points: usize,
) -> Result<EpsOptimum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(eps_lo > 0.0 && eps_hi > eps_lo) {
        return Err(Error::Contract(format!(
            "need 0 < eps_lo < eps_hi, got [{eps_lo}, {eps_hi}]"
        )));
    }
    if grid_points < 3 || rel_tol <= 0.0 {
        return Err(Error::Contract(
            "need grid_points >= 3 and rel_tol > 0".into(),
        ));
    }

    let ratio = eps_hi / eps_lo;
    let grid_eps: Vec<f64> = (0..grid_points)
        .map(|k| eps_lo * ratio.powf(k as f64 / (grid_points - 1) as f64))
        .collect();
    let values: Vec<Result<f64>> = grid_eps.par_iter().map(|&e| objective(e)).collect();
    let mut grid = Vec::with_capacity(grid_points);
    for (e, v) in grid_eps.iter().zip(values) {
        grid.push((*e, v?));
    }

    // First strict minimum, so constant traces resolve to eps_lo.
    let mut best = 0usize;
    for k in 1..grid.len() {
        if grid[k].1 < grid[best].1 {
            best = k;
        }
    }

    if best == 0 || best == grid_points - 1 {
        return Ok(EpsOptimum {
            eps_star: grid[best].0,
            value: grid[best].1,
            grid,
            refine_iterations: 0,
            at_boundary: true,
        });
    }

    // Golden-section refinement inside the bracketing interval.
    let mut a = grid[best - 1].0;
    let mut b = grid[best + 1].0;
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    let mut best_pt = grid[best];
    let mut iterations = 0u32;
    while (b - a) > rel_tol * 0.5 * (a + b) && iterations < 200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = objective(x2)?;
        }
        iterations += 1;
        let (cx, cf) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if cf < best_pt.1 {
            best_pt = (cx, cf);
        }
    }

    Ok(EpsOptimum {
        eps_star: best_pt.0,
        value: best_pt.1,
        grid,
        refine_iterations: iterations,
        at_boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = optimize_eps(|e| Ok((e - 0.2) * (e - 0.2)), 1e-3, 1.0, 1e-3, 25).unwrap();
        assert!(!r.at_boundary);
        assert!((r.eps_star - 0.2).abs() <= 2e-3 * 0.2 + 1e-6, "eps* {}", r.eps_star);
    }

    #[test]
    fn constant_objective_returns_lower_boundary() {
        let r = optimize_eps(|_| Ok(1.0), 1e-2, 1.0, 1e-3, 25).unwrap();
        assert!(r.at_boundary);
        assert_eq!(r.eps_star, 1e-2);
    }

    #[test]
    fn never_worse_than_best_grid_point() {
        // Multimodal on the log grid.
        let f = |e: f64| Ok((6.0 * e).sin().abs() + 0.1 * e);
        let r = optimize_eps(f, 1e-3, 1.0, 1e-3, 25).unwrap();
        let best_grid = r
            .grid
            .iter()
            .map(|p| p.1)
            .fold(f64::INFINITY, f64::min);
        assert!(r.value <= best_grid + 1e-15);
    }

    #[test]
    fn propagates_objective_errors() {
        let f = |_e: f64| -> Result<f64> { Err(Error::CapExceeded("boom".into())) };
        assert!(optimize_eps(f, 1e-3, 1.0, 1e-3, 5).is_err());
    }

    #[test]
    fn deterministic_across_calls() {
        let f = |e: f64| Ok((e - 0.11).powi(2) + (3.0 * e).cos() * 1e-3);
        let a = optimize_eps(f, 1e-3, 1.0, 1e-3, 25).unwrap();
        let b = optimize_eps(f, 1e-3, 1.0, 1e-3, 25).unwrap();
        assert_eq!(a.eps_star.to_bits(), b.eps_star.to_bits());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
