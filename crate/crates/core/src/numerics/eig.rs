//! Eigenvalues of general real matrices through the complex Hessenberg /
//! shifted-QR route: reduce with Householder reflectors, then iterate
//! single-shift QR with Wilkinson shifts and Givens rotations until the
//! subdiagonal deflates.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, RealMatrix};
use super::NumericsError;

/// Balance a matrix by diagonal similarity with powers of two
/// (Parlett-Reinsch). Exact in floating point, eigenvalues unchanged, and
/// much better conditioning for companion-form input.
fn balance(a: &mut ComplexMatrix) {
    let n = a.rows();
    let radix = 2.0f64;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut row_norm = 0.0f64;
            let mut col_norm = 0.0f64;
            for j in 0..n {
                if j != i {
                    row_norm += a[(i, j)].norm();
                    col_norm += a[(j, i)].norm();
                }
            }
            if row_norm <= 1e-300 || col_norm <= 1e-300 {
                continue;
            }
            let mut factor = 1.0f64;
            let mut c = col_norm;
            let target = row_norm / radix;
            while c < target {
                factor *= radix;
                c *= radix * radix;
            }
            let target = row_norm * radix;
            while c > target {
                factor /= radix;
                c /= radix * radix;
            }
            if factor != 1.0 && (row_norm + col_norm) * 0.95 > c + row_norm / factor {
                converged = false;
                for j in 0..n {
                    let v = a[(i, j)] / factor;
                    a[(i, j)] = v;
                }
                for j in 0..n {
                    let v = a[(j, i)] * factor;
                    a[(j, i)] = v;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Reduce a square complex matrix to upper Hessenberg form in place
/// (similarity transform by Householder reflectors; eigenvalues preserved).
fn hessenberg(h: &mut ComplexMatrix) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        // Build the reflector annihilating h[k+2.., k].
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            continue;
        }
        let alpha = if v[0].norm() > 0.0 {
            -(v[0] / v[0].norm()) * norm
        } else {
            Complex64::new(-norm, 0.0)
        };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 <= 1e-300 {
            continue;
        }
        // H = I - 2 v v^H / (v^H v); apply H on the left and right.
        for j in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (off, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + off, j)];
            }
            let scale = dot * (2.0 / vnorm2);
            for (off, vi) in v.iter().enumerate() {
                let val = h[(k + 1 + off, j)] - scale * vi;
                h[(k + 1 + off, j)] = val;
            }
        }
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (off, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + off)] * vi;
            }
            let scale = dot * (2.0 / vnorm2);
            for (off, vi) in v.iter().enumerate() {
                let val = h[(i, k + 1 + off)] - scale * vi.conj();
                h[(i, k + 1 + off)] = val;
            }
        }
    }
}

/// Complex Givens rotation zeroing the second component of (a, b):
/// G = [[c, s], [-conj(s), c]] with real c.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r <= 1e-300 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if a.norm() <= 1e-300 {
        return (0.0, b.conj() / b.norm());
    }
    let c = a.norm() / r;
    let s = b.conj() / a.conj() * c;
    (c, s)
}

/// Wilkinson shift: the eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square real matrix.
///
/// Returns `NonConvergence` if the QR iteration exhausts its budget, which
/// in practice only happens on adversarial input far outside this crate's
/// problem sizes.
pub fn eigenvalues(m: &RealMatrix) -> Result<Vec<Complex64>, NumericsError> {
    assert!(m.is_square(), "eigenvalues needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    let mut h = m.to_complex();
    balance(&mut h);
    hessenberg(&mut h);

    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1; // active block is rows/cols lo..=hi
    let budget = 200 * n.max(1);
    let mut iters_total = 0usize;
    let mut iters_since_deflate = 0usize;

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * diag.max(1e-300) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            // 1x1 block deflated.
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            iters_since_deflate = 0;
            continue;
        }

        iters_total += 1;
        iters_since_deflate += 1;
        if iters_total > budget {
            return Err(NumericsError::NonConvergence { iterations: iters_total });
        }

        // Exceptional shift breaks rare cycling.
        let shift = if iters_since_deflate % 25 == 0 {
            Complex64::new(h[(hi, hi - 1)].norm() + h[(hi - 1, hi - 2.min(hi - 1))].norm(), 0.0)
                + h[(hi, hi)]
        } else {
            wilkinson_shift(&h, hi)
        };

        // Implicit single-shift QR sweep on the active block via Givens.
        for i in lo..n {
            h[(i, i)] -= shift;
        }
        let mut rotations: Vec<(usize, f64, Complex64)> = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            // Left-apply to rows k, k+1.
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + y * s;
                h[(k + 1, j)] = -x * s.conj() + y * c;
            }
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            // Right-apply G^H to columns k, k+1.
            let top = (k + 2).min(hi) + 1;
            for i in 0..top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..n {
            h[(i, i)] += shift;
        }

        // Deflate from the bottom if the subdiagonal collapsed.
        while hi > 0 {
            let sub = h[(hi, hi - 1)].norm();
            let diag = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            if sub <= f64::EPSILON * diag.max(1e-300) {
                eigs.push(h[(hi, hi)]);
                hi -= 1;
                iters_since_deflate = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            break;
        }
    }
    if eigs.len() < n {
        eigs.push(h[(0, 0)]);
    }
    Ok(eigs)
}

/// Spectral radius: max |lambda| over the eigenvalues.
pub fn spectral_radius(m: &RealMatrix) -> Result<f64, NumericsError> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max))
}
