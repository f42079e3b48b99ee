//! Complex linear solves by Gaussian elimination with partial pivoting.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumericsError;

/// Solve M x = rhs for complex square M.
///
/// Pivots smaller than `1e-14 * ||M||_F` are treated as exact zeros and
/// reported as `SingularMatrix` (a zero matrix therefore always errors).
pub fn complex_solve(m: &ComplexMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>, NumericsError> {
    assert!(m.is_square(), "complex_solve needs a square matrix");
    let n = m.rows();
    assert_eq!(rhs.len(), n, "complex_solve rhs length mismatch");
    let threshold = 1e-14 * m.frobenius_norm();

    let mut a = m.clone();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = a[(k, k)].norm();
        for i in k + 1..n {
            let mag = a[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag <= threshold {
            return Err(NumericsError::SingularMatrix);
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = tmp;
            }
            b.swap(k, pivot_row);
        }
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let v = a[(i, j)] - factor * a[(k, j)];
                a[(i, j)] = v;
            }
            let bk = b[k];
            b[i] -= factor * bk;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut acc = b[k];
        for j in k + 1..n {
            acc -= a[(k, j)] * x[j];
        }
        x[k] = acc / a[(k, k)];
    }
    Ok(x)
}

/// Solve M X = Rhs column by column for a complex matrix right-hand side.
pub fn complex_solve_matrix(
    m: &ComplexMatrix,
    rhs: &ComplexMatrix,
) -> Result<ComplexMatrix, NumericsError> {
    assert_eq!(m.rows(), rhs.rows(), "complex_solve_matrix dimension mismatch");
    let mut out = ComplexMatrix::zeros(rhs.rows(), rhs.cols());
    for j in 0..rhs.cols() {
        let col = rhs.col(j);
        let x = complex_solve(m, &col)?;
        out.set_col(j, &x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::RealMatrix;
    use crate::numerics::{gaussian_stream, RngSpec};

    #[test]
    fn real_system_by_hand() {
        // [[2, 1], [1, 3]] x = [5, 10] -> x = [1, 3]
        let m = RealMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).to_complex();
        let rhs = [Complex64::new(5.0, 0.0), Complex64::new(10.0, 0.0)];
        let x = complex_solve(&m, &rhs).unwrap();
        assert!((x[0] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((x[1] - Complex64::new(3.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn complex_system_by_hand() {
        // (1+i) x = 2 -> x = 1 - i
        let mut m = ComplexMatrix::zeros(1, 1);
        m[(0, 0)] = Complex64::new(1.0, 1.0);
        let x = complex_solve(&m, &[Complex64::new(2.0, 0.0)]).unwrap();
        assert!((x[0] - Complex64::new(1.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).to_complex();
        let rhs = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(matches!(complex_solve(&m, &rhs), Err(NumericsError::SingularMatrix)));
    }

    #[test]
    fn zero_matrix_rejected() {
        let m = ComplexMatrix::zeros(2, 2);
        let rhs = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(matches!(complex_solve(&m, &rhs), Err(NumericsError::SingularMatrix)));
    }

    #[test]
    fn random_roundtrip() {
        let mut g = gaussian_stream(RngSpec::new(3, 7));
        for _ in 0..30 {
            let mut m = ComplexMatrix::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] = Complex64::new(g.gaussian(), g.gaussian());
                }
                m[(i, i)] += Complex64::new(4.0, 0.0);
            }
            let xs: Vec<Complex64> =
                (0..4).map(|_| Complex64::new(g.gaussian(), g.gaussian())).collect();
            let rhs = m.mul_vec(&xs);
            let got = complex_solve(&m, &rhs).unwrap();
            for (a, b) in got.iter().zip(&xs) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn matrix_rhs_identity_gives_inverse() {
        let m = RealMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).to_complex();
        let inv = complex_solve_matrix(&m, &ComplexMatrix::identity(2)).unwrap();
        assert!((inv[(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((inv[(1, 1)] - Complex64::new(0.25, 0.0)).norm() < 1e-14);
        assert!(inv[(0, 1)].norm() < 1e-14);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            // Partial pivoting guarantees a small *residual* no matter how
            // ill-conditioned the instance is, so the backward check
            // ||M x - b|| <= tol * (||M|| ||x|| + ||b||) must hold for every
            // solution the routine returns.
            #[test]
            fn residual_is_small_on_random_instances(
                seed in 0u64..1000,
                n in 1usize..9,
            ) {
                let mut g = gaussian_stream(RngSpec::new(seed, 11));
                let mut m = ComplexMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = Complex64::new(g.gaussian(), g.gaussian());
                    }
                }
                let rhs: Vec<Complex64> =
                    (0..n).map(|_| Complex64::new(g.gaussian(), g.gaussian())).collect();
                if let Ok(x) = complex_solve(&m, &rhs) {
                    let mx = m.mul_vec(&x);
                    let residual: f64 = mx
                        .iter()
                        .zip(&rhs)
                        .map(|(a, b)| (a - b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    let x_norm: f64 = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    let b_norm: f64 = rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    let scale = m.frobenius_norm() * x_norm + b_norm;
                    prop_assert!(
                        residual <= 1e-10 * scale.max(1e-300),
                        "residual {residual} vs scale {scale} at n = {n}"
                    );
                }
            }
        }
    }
}
