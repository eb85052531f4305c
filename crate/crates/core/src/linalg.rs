//! Small dense Hermitian linear algebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{hermitian_defect, HERMITIAN_TOL};
use crate::{Error, Result};

pub const MAX_EIGEN_DIM: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// A complex Hermitian `H = A + iB` is embedded as the real symmetric
/// `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
/// doubled. The embedding is diagonalized with cyclic Jacobi rotations until
/// the off-diagonal Frobenius norm drops below `1e-13 · max(1, ‖H‖_F)`.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid(
            "M",
            format!("expected a square matrix, got {}x{}", n, m.ncols()),
        ));
    }
    if n > MAX_EIGEN_DIM {
        return Err(Error::invalid("M", format!("dimension {n} exceeds {MAX_EIGEN_DIM}")));
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            // Symmetrize so that sub-tolerance defects do not bias the result.
            let h = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[i * size + j] = h.re;
            a[(i + n) * size + (j + n)] = h.re;
            a[(i + n) * size + j] = h.im;
            a[i * size + (j + n)] = -h.im;
        }
    }

    let mut doubled = jacobi_symmetric(&mut a, size)?;
    doubled.sort_by(|x, y| x.total_cmp(y));
    Ok(doubled.into_iter().step_by(2).collect())
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on a dense real symmetric matrix stored row-major.
/// Returns the (unsorted) diagonal after convergence.
fn jacobi_symmetric(a: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAGONAL_TOL * frob.max(1.0);

    let mut off = off_norm(a, n);
    let mut sweeps = 0;
    while off >= threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
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
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
        sweeps += 1;
        off = off_norm(a, n);
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

/// Partial transpose over the first factor of a `d1 ⊗ d2` operator:
/// `ρ_{(i j),(k l)} → ρ_{(k j),(i l)}`.
pub fn partial_transpose_first(rho: &DMatrix<Complex64>, d1: usize, d2: usize) -> Result<DMatrix<Complex64>> {
    let d = d1 * d2;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::invalid(
            "rho",
            format!(
                "expected {d}x{d} for dims {d1}x{d2}, got {}x{}",
                rho.nrows(),
                rho.ncols()
            ),
        ));
    }
    Ok(DMatrix::from_fn(d, d, |row, col| {
        let (i, j) = (row / d2, row % d2);
        let (k, l) = (col / d2, col % d2);
        rho[(k * d2 + j, i * d2 + l)]
    }))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
}
