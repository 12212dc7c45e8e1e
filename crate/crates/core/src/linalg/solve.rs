use super::matrix::ComplexMatrix;
use super::scalar::Complex;
use super::LinalgError;

/// Relative pivot threshold below which elimination reports singularity.
const PIVOT_RTOL: f64 = 1e-14;

struct LuFactors {
    /// Packed L (unit lower, below diagonal) and U (upper) factors.
    lu: ComplexMatrix,
    /// Row permutation: `perm[k]` is the original row placed at step k.
    perm: Vec<usize>,
}

fn lu_factor(a: &ComplexMatrix) -> Result<LuFactors, LinalgError> {
    assert!(a.is_square(), "solve requires a square coefficient matrix");
    let n = a.rows();
    let scale = a.max_abs();
    let threshold = PIVOT_RTOL * scale;
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut best = k;
        let mut best_mag = lu[(k, k)].abs();
        for i in (k + 1)..n {
            let mag = lu[(i, k)].abs();
            if mag > best_mag {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag <= threshold {
            return Err(LinalgError::SingularMatrix {
                step: k,
                pivot: best_mag,
            });
        }
        if best != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(best, j)];
                lu[(best, j)] = t;
            }
            perm.swap(k, best);
        }
        let pivot = lu[(k, k)];
        for i in (k + 1)..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            for j in (k + 1)..n {
                let adj = factor * lu[(k, j)];
                lu[(i, j)] -= adj;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n, "right-hand side row count mismatch");
        let m = b.cols();
        let mut x = ComplexMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        // Forward substitution with unit lower factor.
        for k in 0..n {
            for i in (k + 1)..n {
                let f = self.lu[(i, k)];
                for j in 0..m {
                    let adj = f * x[(k, j)];
                    x[(i, j)] -= adj;
                }
            }
        }
        // Back substitution.
        for k in (0..n).rev() {
            let d = self.lu[(k, k)];
            for j in 0..m {
                x[(k, j)] = x[(k, j)] / d;
            }
            for i in 0..k {
                let f = self.lu[(i, k)];
                for j in 0..m {
                    let adj = f * x[(k, j)];
                    x[(i, j)] -= adj;
                }
            }
        }
        x
    }
}

/// Solves `A X = B` by partial-pivoted Gaussian elimination.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    Ok(lu_factor(a)?.solve(b))
}

/// Cheap estimate of the smallest singular value of `a`.
///
/// Inverse iteration on `A^* A` through the LU factors of `A`; a singular
/// factorization short-circuits to zero. Used as the residual check behind
/// the eigenvalue solvers, so it deliberately avoids the QR path.
pub fn sigma_min_estimate(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    assert!(a.is_square());
    if n == 0 {
        return 0.0;
    }
    let factors = match lu_factor(a) {
        Ok(f) => f,
        Err(_) => return 0.0,
    };
    let at = a.conj_transpose();
    let factors_t = match lu_factor(&at) {
        Ok(f) => f,
        Err(_) => return 0.0,
    };
    // Start from a fixed dense direction so the estimate is deterministic.
    let mut v = ComplexMatrix::from_fn(n, 1, |i, _| {
        Complex::new(1.0, 0.3 + i as f64 * 0.1).scale(1.0 / (1.0 + i as f64))
    });
    let mut norm = vec_norm(&v);
    let mut sigma = f64::INFINITY;
    for _ in 0..6 {
        v = v.scale_re(1.0 / norm);
        // One multiplication by (A^* A)^{-1}.
        let w = factors_t.solve(&v);
        let w = factors.solve(&w);
        norm = vec_norm(&w);
        if !norm.is_finite() || norm == 0.0 {
            return 0.0;
        }
        // norm approximates 1 / sigma_min^2 at convergence.
        sigma = (1.0 / norm).sqrt();
        v = w;
    }
    sigma
}

fn vec_norm(v: &ComplexMatrix) -> f64 {
    v.entries().iter().map(|z| z.abs_sq()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve_returns_rhs() {
        let a = ComplexMatrix::identity(3);
        let b = ComplexMatrix::from_fn(3, 2, |i, j| Complex::new(i as f64 + 0.5, j as f64 - 1.0));
        let x = solve(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn scalar_solve() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0]]);
        let x = solve(&a, &b).unwrap();
        assert!((x[(0, 0)] - Complex::from_real(0.5)).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_is_singular() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0]]);
        assert!(matches!(
            solve(&a, &b),
            Err(LinalgError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn roundtrip_residual_small() {
        let a = ComplexMatrix::from_fn(5, 5, |i, j| {
            let base = ((i * 5 + j) as f64 * 0.37).sin();
            let diag = if i == j { 4.0 } else { 0.0 };
            Complex::new(base + diag, ((i + 2 * j) as f64 * 0.21).cos() * 0.5)
        });
        let b = ComplexMatrix::from_fn(5, 1, |i, _| Complex::new(i as f64 - 2.0, 1.0));
        let x = solve(&a, &b).unwrap();
        let r = a.mul(&x).sub(&b);
        assert!(r.max_abs() < 1e-10);
    }

    #[test]
    fn sigma_min_of_singular_is_zero() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert_eq!(sigma_min_estimate(&a), 0.0);
    }

    #[test]
    fn sigma_min_of_diagonal() {
        let a = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, 0.25]]);
        let s = sigma_min_estimate(&a);
        assert!((s - 0.25).abs() < 1e-10, "sigma = {s}");
    }
}
