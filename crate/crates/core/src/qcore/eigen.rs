//! Hermitian eigendecomposition kernel.
//!
//! All matrix exponentials in the crate go through this single routine.
//! Eigenvectors get a canonical phase (largest-modulus component real and
//! positive) so that downstream state constructions are deterministic.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;

pub(crate) fn to_dmatrix(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// the columns of a unitary matrix. The caller is responsible for checking
/// Hermiticity; the strictly-lower triangle is mirrored before the solve so
/// that tiny asymmetries cannot leak in.
pub(crate) fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square(), "eigendecomposition needs a square matrix");
    let n = m.rows();
    let mut a = to_dmatrix(m);
    for r in 0..n {
        a[(r, r)] = Complex64::new(a[(r, r)].re, 0.0);
        for c in 0..r {
            let avg = (a[(c, r)] + a[(r, c)].conj()) * Complex64::new(0.5, 0.0);
            a[(c, r)] = avg;
            a[(r, c)] = avg.conj();
        }
    }
    let eig = a.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("non-finite eigenvalue")
    });

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let phase = canonical_phase(eig.eigenvectors.column(src).iter());
        for r in 0..n {
            vectors[(r, col)] = eig.eigenvectors[(r, src)] * phase;
        }
    }
    (values, vectors)
}

/// Phase factor that makes the largest-modulus component real positive.
/// Near-ties resolve to the lowest index, keeping the choice deterministic.
fn canonical_phase<'a>(column: impl Iterator<Item = &'a Complex64>) -> Complex64 {
    let entries: Vec<Complex64> = column.copied().collect();
    let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pick = entries
        .iter()
        .find(|z| z.norm() >= max * (1.0 - 1e-12))
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    if pick.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        pick.conj() / pick.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_hermitian_input() {
        let m = ComplexMatrix::from_fn(3, 3, |r, c| {
            if r == c {
                Complex64::new(r as f64, 0.0)
            } else if r < c {
                Complex64::new(0.5, 0.25 * (r + c) as f64)
            } else {
                Complex64::new(0.5, -0.25 * (r + c) as f64)
            }
        });
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let mut diag = ComplexMatrix::zeros(3, 3);
        for k in 0..3 {
            diag[(k, k)] = Complex64::new(vals[k], 0.0);
        }
        let rebuilt = &(&vecs * &diag) * &vecs.adjoint();
        let err = (&rebuilt - &m).max_abs();
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn canonical_phase_is_deterministic() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (_, v1) = hermitian_eigen(&m);
        let (_, v2) = hermitian_eigen(&m);
        assert_eq!(v1.data(), v2.data());
        // First maximal-modulus component of each column is real positive
        // (ties resolve to the lowest index).
        for c in 0..2 {
            let entries: Vec<Complex64> = (0..2).map(|r| v1[(r, c)]).collect();
            let max = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let top = entries
                .iter()
                .find(|z| z.norm() >= max * (1.0 - 1e-12))
                .unwrap();
            assert!(top.im.abs() < 1e-14 && top.re > 0.0);
        }
    }
}
