//! Singular values via one-sided Jacobi and symmetric eigendecomposition
//! via cyclic two-sided Jacobi. Matrices here never exceed ~12x12, so the
//! quadratically convergent Jacobi family is both simple and highly
//! accurate.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, RealMatrix};

/// One-sided Jacobi convergence tolerance on normalized column couplings.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// All singular values of a complex matrix, descending.
///
/// One-sided Jacobi: unitary 2x2 rotations orthogonalize column pairs until
/// every normalized coupling |c_p^H c_q| / (|c_p||c_q|) falls below
/// tolerance; the singular values are then the column norms.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let work = if m.rows() >= m.cols() { m.clone() } else { m.hermitian_transpose() };
    let ncols = work.cols();
    let mut cols: Vec<Vec<Complex64>> = (0..ncols).map(|j| work.col(j)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let a: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let b: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let coupling: Complex64 =
                    cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = coupling.norm();
                if g <= JACOBI_TOL * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                // Phase the q-column so the coupling becomes real, then apply
                // the classical symmetric-Jacobi rotation for [[a, g], [g, b]].
                let phase = coupling / g; // e^{j theta}
                let zeta = (b - a) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase_conj = phase.conj();
                for i in 0..cols[p].len() {
                    let u = cols[p][i];
                    let w = cols[q][i] * phase_conj;
                    cols[p][i] = u * c - w * s;
                    cols[q][i] = u * s + w * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Smallest singular value; 0 for rank-deficient input.
pub fn sigma_min(m: &ComplexMatrix) -> f64 {
    *singular_values(m).last().expect("sigma_min of an empty matrix")
}

/// Largest singular value (operator norm).
pub fn sigma_max(m: &ComplexMatrix) -> f64 {
    singular_values(m)[0]
}

/// Singular values of a real matrix, descending.
pub fn real_singular_values(m: &RealMatrix) -> Vec<f64> {
    singular_values(&m.to_complex())
}

/// Operator (spectral) norm of a real matrix.
pub fn op_norm(m: &RealMatrix) -> f64 {
    real_singular_values(m)[0]
}

/// Smallest singular value of a real matrix.
pub fn real_sigma_min(m: &RealMatrix) -> f64 {
    *real_singular_values(m).last().expect("sigma_min of an empty matrix")
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi.
///
/// Returns eigenvalues ascending and the matching orthonormal eigenvectors
/// as the columns of the second component.
pub fn sym_eigen(m: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    assert!(m.is_square(), "sym_eigen needs a square matrix");
    let n = m.rows();
    let mut a = m.symmetrized();
    let mut v = RealMatrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - s * aqj;
                    a[(q, j)] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = RealMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &RealMatrix) -> Vec<f64> {
    sym_eigen(m).0
}
