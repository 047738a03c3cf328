//! Pure states and density operators.

use num_complex::Complex64;

use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::numerics::NumericsConfig;

/// Pure state amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data: Vec<Complex64>,
}

impl StateVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Shape("state vector must have positive dim".into()));
        }
        Ok(StateVector { data })
    }

    /// Computational basis state |index> in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut data = vec![Complex64::new(0.0, 0.0); dim];
        data[index] = Complex64::new(1.0, 0.0);
        StateVector { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Returns the normalized copy; errors if the norm is numerically zero.
    pub fn normalized(&self, cfg: &NumericsConfig) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::NumericalRange(
                "cannot normalize a zero state vector".into(),
            ));
        }
        let out = StateVector {
            data: self.data.iter().map(|z| z / n).collect(),
        };
        debug_assert!((out.norm() - 1.0).abs() <= cfg.norm_tol);
        Ok(out)
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Tensor product |self> ⊗ |other>.
    pub fn tensor(&self, other: &StateVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        StateVector { data }
    }

    /// Pure density operator |self><self|.
    pub fn to_density(&self) -> DensityOp {
        let d = self.dim();
        let mat = ComplexMatrix::from_fn(d, d, |r, c| self.data[r] * self.data[c].conj());
        DensityOp {
            matrix: mat,
            purity: Purity::Pure,
        }
    }
}

/// Purity tag carried by a density operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purity {
    Pure,
    Mixed,
    Unknown,
}

/// Hermitian positive operator, typically a quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOp {
    matrix: ComplexMatrix,
    purity: Purity,
}

impl DensityOp {
    /// Wraps a matrix after checking Hermiticity.
    pub fn from_matrix(matrix: ComplexMatrix, purity: Purity, cfg: &NumericsConfig) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape("density operator must be square".into()));
        }
        if !matrix.is_hermitian(cfg.hermiticity_tol) {
            return Err(Error::Contract(format!(
                "density operator is not Hermitian (residual {:.3e})",
                matrix.hermiticity_residual()
            )));
        }
        Ok(DensityOp { matrix, purity })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> Purity {
        self.purity
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tr(rho^2), in [1/d, 1] for unit-trace states.
    pub fn purity_value(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for r in 0..d {
            for c in 0..d {
                acc += (self.matrix[(r, c)] * self.matrix[(c, r)]).re;
            }
        }
        acc
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// Checks positivity: smallest eigenvalue >= -psd_tol.
    pub fn validate_psd(&self, cfg: &NumericsConfig) -> Result<()> {
        let min = self
            .eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -cfg.psd_tol {
            return Err(Error::Contract(format!(
                "density operator has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Expectation value <psi|rho|psi>.
    pub fn expectation(&self, psi: &StateVector) -> Complex64 {
        let v = self.matrix.mul_vec(psi.amplitudes());
        psi.amplitudes()
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_density() {
        let psi = StateVector::basis(2, 0);
        let rho = psi.to_density();
        assert_eq!(rho.purity(), Purity::Pure);
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.purity_value() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_dims_multiply() {
        let a = StateVector::basis(2, 1);
        let b = StateVector::basis(3, 2);
        let t = a.tensor(&b);
        assert_eq!(t.dim(), 6);
        assert_eq!(t.amplitudes()[5], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn non_hermitian_rejected() {
        let cfg = NumericsConfig::default();
        let m = ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new((r + 2 * c) as f64, 0.0));
        assert!(DensityOp::from_matrix(m, Purity::Unknown, &cfg).is_err());
    }
}
