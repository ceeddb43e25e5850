//! Thin adapters from `ndarray` matrices to `faer` decompositions.

use faer::{Mat, Side};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{NfError, Result};

fn to_faer(a: &Array2<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &Array2<Complex64>) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Err(NfError::InvalidArgument("empty matrix".into()));
    }
    to_faer(a).singular_values().map_err(|e| NfError::Numerical(format!("svd did not converge: {e:?}")))
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are returned in
/// nonincreasing order with eigenvectors in the matching columns.
pub fn hermitian_eigen(a: &Array2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    if a.is_empty() || a.nrows() != a.ncols() {
        return Err(NfError::InvalidArgument(format!("expected a nonempty square matrix, got {:?}", a.dim())));
    }
    let evd = to_faer(a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| NfError::Numerical(format!("eigendecomposition did not converge: {e:?}")))?;
    let n = a.nrows();
    let values = evd.S().column_vector();
    let u = evd.U();
    // faer sorts ascending
    let order: Vec<usize> = (0..n).rev().collect();
    let eigenvalues = order.iter().map(|&i| values[i].re).collect();
    let vectors = Array2::from_shape_fn((n, n), |(r, c)| u[(r, order[c])]);
    Ok((eigenvalues, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let mut a = Array2::zeros((3, 2));
        a[(0, 0)] = Complex64::new(0.0, 2.0);
        a[(1, 1)] = Complex64::new(-5.0, 0.0);
        let s = singular_values(&a).unwrap();
        assert!((s[0] - 5.0).abs() < 1e-12 && (s[1] - 2.0).abs() < 1e-12);
        assert!(singular_values(&Array2::zeros((0, 0))).is_err());
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let a = Array2::from_shape_fn((4, 4), |(i, j)| {
            let v = Complex64::new((i + j) as f64, i as f64 - j as f64);
            if i == j {
                Complex64::new(v.re + 10.0, 0.0)
            } else {
                v
            }
        });
        let (vals, vecs) = hermitian_eigen(&a).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for (c, &lambda) in vals.iter().enumerate() {
            let v = vecs.column(c);
            let av = a.dot(&v);
            for (x, y) in av.iter().zip(v.iter()) {
                assert!((x - y * lambda).norm() < 1e-10);
            }
        }
    }
}
