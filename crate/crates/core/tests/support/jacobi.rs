//! Cyclic Jacobi eigensolver for real symmetric matrices, used to check
//! singular values independently of the library's decompositions.

use num_complex::Complex64;

/// Eigenvalues of a real symmetric matrix (row-major, n×n), descending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Singular values of a complex rows×cols matrix via the eigenvalues of
/// HᴴH, embedded as the real matrix [[A, -B], [B, A]] whose spectrum is that
/// of HᴴH with every eigenvalue doubled.
pub fn singular_values(h: &[Complex64], rows: usize, cols: usize) -> Vec<f64> {
    let mut g = vec![Complex64::new(0.0, 0.0); cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                acc += h[r * cols + i].conj() * h[r * cols + j];
            }
            g[i * cols + j] = acc;
        }
    }
    let m = 2 * cols;
    let mut real = vec![0.0; m * m];
    for i in 0..cols {
        for j in 0..cols {
            let z = g[i * cols + j];
            real[i * m + j] = z.re;
            real[i * m + j + cols] = -z.im;
            real[(i + cols) * m + j] = z.im;
            real[(i + cols) * m + j + cols] = z.re;
        }
    }
    symmetric_eigenvalues(real, m).into_iter().step_by(2).map(|v| v.max(0.0).sqrt()).collect()
}
