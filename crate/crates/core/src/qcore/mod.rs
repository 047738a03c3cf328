//! Dense complex linear algebra and quantum primitives shared by all
//! other modules: Kronecker products, Hermitian matrix exponentials,
//! partial traces, and the distance/fidelity metrics.
//!
//! All types are immutable after construction; operations are pure
//! functions. Matrix exponentials only ever go through Hermitian
//! eigendecomposition (see [`herm_exp`]); anti-Hermitian generators are
//! handled by the callers as products of Hermitian-generated factors.

mod eigen;
mod matrix;
mod state;

pub(crate) use eigen::hermitian_eigen;
pub use matrix::ComplexMatrix;
pub use state::{DensityOp, Purity, StateVector};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

/// Kronecker product a ⊗ b. The first factor is the most significant
/// index block. Errors when an output dimension exceeds the configured cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix, cfg: &NumericsConfig) -> Result<ComplexMatrix> {
    let rows = a
        .rows()
        .checked_mul(b.rows())
        .filter(|&r| r <= cfg.statevector_amp_cap);
    let cols = a
        .cols()
        .checked_mul(b.cols())
        .filter(|&c| c <= cfg.statevector_amp_cap);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(Error::CapExceeded(format!(
                "kron output {}x{} * {}x{} exceeds dimension cap {}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                cfg.statevector_amp_cap
            )))
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ra in 0..a.rows() {
        for ca in 0..a.cols() {
            let f = a[(ra, ca)];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for rb in 0..b.rows() {
                for cb in 0..b.cols() {
                    out[(ra * b.rows() + rb, ca * b.cols() + cb)] = f * b[(rb, cb)];
                }
            }
        }
    }
    Ok(out)
}

/// e^{scale * h} for Hermitian h, via eigendecomposition h = Q Λ Q†.
///
/// For purely imaginary `scale` the result is unitary and the residual
/// max|U†U - I| is checked against the configured tolerance.
pub fn herm_exp(h: &ComplexMatrix, scale: Complex64, cfg: &NumericsConfig) -> Result<ComplexMatrix> {
    if !h.is_square() {
        return Err(Error::Shape("herm_exp needs a square matrix".into()));
    }
    if !h.is_hermitian(cfg.hermiticity_tol) {
        return Err(Error::Contract(format!(
            "herm_exp input is not Hermitian (residual {:.3e})",
            h.hermiticity_residual()
        )));
    }
    let n = h.rows();
    let (vals, vecs) = hermitian_eigen(h);
    // Q e^{scale Λ}: scale each column, then multiply by Q†.
    let mut scaled = vecs.clone();
    for (k, &lambda) in vals.iter().enumerate() {
        let f = (scale * lambda).exp();
        for r in 0..n {
            scaled[(r, k)] *= f;
        }
    }
    let out = &scaled * &vecs.adjoint();
    if scale.re == 0.0 {
        let residual = (&(&out.adjoint() * &out) - &ComplexMatrix::identity(n)).max_abs();
        if residual > cfg.unitarity_tol {
            return Err(Error::NumericalRange(format!(
                "unitary exponential failed its unitarity check (residual {residual:.3e})"
            )));
        }
    }
    Ok(out)
}

/// Traces out the subsystems not listed in `keep`.
///
/// `dims` are the subsystem dimensions, most significant first, and must
/// multiply to the operator dimension. The output trace equals the input
/// trace.
pub fn partial_trace(rho: &DensityOp, dims: &[usize], keep: &[usize]) -> Result<DensityOp> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Shape(format!(
            "subsystem dims {:?} do not multiply to operator dim {}",
            dims,
            rho.dim()
        )));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape("keep set is empty or out of range".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

    let strides: Vec<usize> = (0..dims.len())
        .map(|i| dims[i + 1..].iter().product())
        .collect();
    let offsets = |subsys: &[usize]| -> Vec<usize> {
        // Lookup table: composite index over `subsys` -> offset in the full index.
        let count: usize = subsys.iter().map(|&i| dims[i]).product();
        let mut table = vec![0usize; count];
        for (t, slot) in table.iter_mut().enumerate() {
            let mut rem = t;
            let mut off = 0;
            for &i in subsys.iter().rev() {
                off += (rem % dims[i]) * strides[i];
                rem /= dims[i];
            }
            *slot = off;
        }
        table
    };
    let kept_off = offsets(&keep);
    let traced_off = offsets(&traced);

    let out_dim = kept_off.len();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let m = rho.matrix();
    for (orow, &ro) in kept_off.iter().enumerate() {
        for (ocol, &co) in kept_off.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m[(ro + t, co + t)];
            }
            out[(orow, ocol)] = acc;
        }
    }
    let purity = match rho.purity() {
        Purity::Pure if traced.is_empty() => Purity::Pure,
        _ => Purity::Unknown,
    };
    DensityOp::from_matrix(out, purity, &NumericsConfig::default())
}

/// Trace distance ½ Σ|λ_i(a - b)|.
pub fn trace_distance(a: &DensityOp, b: &DensityOp) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "trace distance dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    let (vals, _) = hermitian_eigen(&diff);
    Ok(0.5 * vals.iter().map(|l| l.abs()).sum::<f64>())
}

/// Fidelity <target|rho|target> with a pure target, clamped to [0, 1].
pub fn fidelity_pure(target: &StateVector, rho: &DensityOp) -> Result<f64> {
    if target.dim() != rho.dim() {
        return Err(Error::Shape(format!(
            "fidelity dimension mismatch: {} vs {}",
            target.dim(),
            rho.dim()
        )));
    }
    let f = rho.expectation(target).re;
    Ok(f.clamp(0.0, 1.0))
}

/// Operator norm: the largest singular value (largest |eigenvalue| for
/// Hermitian input).
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.is_square() && a.is_hermitian(1e-12) {
        let (vals, _) = hermitian_eigen(a);
        return vals.iter().map(|l| l.abs()).fold(0.0, f64::max);
    }
    let gram = &a.adjoint() * a;
    let (vals, _) = hermitian_eigen(&gram);
    vals.iter()
        .map(|l| l.max(0.0))
        .fold(0.0, f64::max)
        .sqrt()
}
