//! Small dense decompositions: LU solves, Hermitian eigenvalues via cyclic
//! Jacobi rotations, singular values and the unitary polar factor.
//!
//! Everything here runs on desk-scale matrices (a few hundred rows at most),
//! so robustness and determinism win over asymptotics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{C64, Operator, ONE, ZERO};

/// Solves A X = B by LU factorization with partial pivoting.
pub fn lu_solve(a: &Operator, b: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "lu_solve",
            expected: format!("rhs with {} rows", n),
            actual: format!("{} rows", b.rows()),
        });
    }
    let m = b.cols();
    let mut lu: Vec<C64> = a.entries().to_vec();
    let mut x: Vec<C64> = b.entries().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        // Partial pivot on the largest modulus in column k.
        let mut pivot_row = k;
        let mut pivot_mag = lu[perm[k] * n + k].norm();
        for r in (k + 1)..n {
            let mag = lu[perm[r] * n + k].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag == 0.0 {
            return Err(Error::Singular { context: "lu_solve" });
        }
        perm.swap(k, pivot_row);
        let pk = perm[k];
        let diag = lu[pk * n + k];
        for r in (k + 1)..n {
            let pr = perm[r];
            let factor = lu[pr * n + k] / diag;
            lu[pr * n + k] = factor;
            for c in (k + 1)..n {
                let v = lu[pk * n + c];
                lu[pr * n + c] -= factor * v;
            }
        }
    }

    // Forward substitution on the permuted right-hand side.
    let mut y = vec![ZERO; n * m];
    for i in 0..n {
        let pi = perm[i];
        for j in 0..m {
            let mut acc = x[pi * m + j];
            for k in 0..i {
                acc -= lu[pi * n + k] * y[k * m + j];
            }
            y[i * m + j] = acc;
        }
    }
    // Back substitution.
    for i in (0..n).rev() {
        let pi = perm[i];
        let diag = lu[pi * n + i];
        for j in 0..m {
            let mut acc = y[i * m + j];
            for k in (i + 1)..n {
                acc -= lu[pi * n + k] * x[k * m + j];
            }
            x[i * m + j] = acc / diag;
        }
    }
    Operator::from_entries(n, m, x)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in decreasing order together with the matrix whose
/// columns are the matching orthonormal eigenvectors. Column phases are fixed
/// by making the largest-magnitude component real and positive.
pub fn hermitian_eigen(a: &Operator) -> Result<(Vec<f64>, Operator)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m: Vec<C64> = a.entries().to_vec();
    // Work on the Hermitian average to shed representation noise.
    for i in 0..n {
        for j in 0..n {
            let avg = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = avg;
        }
    }
    let mut v = Operator::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = 1e-30 * scale;

    let max_sweeps = 60;
    let mut sweeps = 0;
    loop {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j].norm_sqr();
            }
        }
        if off.sqrt() <= tol || n == 1 {
            break;
        }
        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence {
                context: "hermitian_eigen",
                iterations: max_sweeps,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[p * n + q];
                let gmag = g.norm();
                if gmag <= tol / (n as f64) {
                    continue;
                }
                // Phase that makes the (p,q) entry real, then a real Jacobi
                // rotation on the 2x2 block [[app, |g|], [|g|, aqq]].
                let u = g / gmag;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (2.0 * gmag);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J restricted to (p,q): [[u*c, u*s], [-s, c]].
                let jpp = u * c;
                let jpq = u * s;
                let jqp = C64::new(-s, 0.0);
                let jqq = C64::new(c, 0.0);

                // A <- J^H A J: first right-multiply columns p, q...
                for i in 0..n {
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    m[i * n + p] = aip * jpp + aiq * jqp;
                    m[i * n + q] = aip * jpq + aiq * jqq;
                }
                // ...then left-multiply rows p, q by J^H.
                for j in 0..n {
                    let apj = m[p * n + j];
                    let aqj = m[q * n + j];
                    m[p * n + j] = jpp.conj() * apj + jqp.conj() * aqj;
                    m[q * n + j] = jpq.conj() * apj + jqq.conj() * aqj;
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;

                // Accumulate eigenvectors: V <- V J.
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * jpp + viq * jqp);
                    v.set(i, q, vip * jpq + viq * jqq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Operator::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        // Deterministic phase: largest-magnitude component real positive.
        let mut best = 0usize;
        let mut best_mag = 0.0;
        for i in 0..n {
            let mag = v.get(i, src).norm();
            if mag > best_mag + 1e-15 {
                best_mag = mag;
                best = i;
            }
        }
        let phase = if best_mag > 0.0 {
            let z = v.get(best, src);
            z.conj() / z.norm()
        } else {
            ONE
        };
        for i in 0..n {
            vectors.set(i, col, v.get(i, src) * phase);
        }
    }
    Ok((eigenvalues, vectors))
}

pub fn min_hermitian_eigenvalue(a: &Operator) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(*vals.last().expect("nonempty spectrum"))
}

/// The min(rows, cols) singular values in decreasing order, from the
/// spectrum of the smaller Gram matrix.
pub fn singular_values(a: &Operator) -> Result<Vec<f64>> {
    let gram = if a.rows() <= a.cols() {
        a.mul(&a.adjoint())
    } else {
        a.adjoint().mul(a)
    };
    let (vals, _) = hermitian_eigen(&gram)?;
    Ok(vals
        .into_iter()
        .take(a.rows().min(a.cols()))
        .map(|x| x.max(0.0).sqrt())
        .collect())
}

/// Largest singular value.
pub fn operator_norm(a: &Operator) -> f64 {
    singular_values(a)
        .map(|s| s.first().copied().unwrap_or(0.0))
        .unwrap_or(0.0)
}

/// Trace norm (sum of singular values).
pub fn trace_norm(a: &Operator) -> f64 {
    singular_values(a).map(|s| s.iter().sum()).unwrap_or(0.0)
}

/// Unitary polar factor of a nonsingular matrix via the Newton iteration
/// X <- (X + X^{-†})/2, which converges to U in A = U P.
pub fn polar_unitary(a: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::Singular {
            context: "polar_unitary",
        });
    }
    let mut x = a.scale(Complex64::new(1.0 / norm * (n as f64).sqrt(), 0.0));
    let id = Operator::identity(n);
    for _ in 0..80 {
        let inv_adj = lu_solve(&x.adjoint(), &id)?;
        let next = x.add(&inv_adj).scale(C64::new(0.5, 0.0));
        let delta = next.sub(&x).frobenius_norm();
        x = next;
        if delta < 1e-15 * (n as f64) {
            let defect = x.adjoint().mul(&x).sub(&id).frobenius_norm();
            if defect < 1e-12 * (n as f64) {
                return Ok(x);
            }
        }
    }
    Err(Error::NoConvergence {
        context: "polar_unitary",
        iterations: 80,
    })
}
