use super::matrix::ComplexMatrix;
use super::scalar::Complex;
use super::LinalgError;

/// Cholesky factor `L` with `X = L L^*`, or `None` when `X` is not positive
/// definite (some pivot fails to be strictly positive).
pub fn cholesky(x: &ComplexMatrix) -> Option<ComplexMatrix> {
    assert!(x.is_square(), "cholesky requires a square matrix");
    let n = x.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = x[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].abs_sq();
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex::from_real(dj);
        for i in (j + 1)..n {
            let mut s = x[(i, j)];
            for k in 0..j {
                let adj = l[(i, k)] * l[(j, k)].conj();
                s -= adj;
            }
            l[(i, j)] = s.scale(1.0 / dj);
        }
    }
    Some(l)
}

/// True iff `X - margin I` admits a Cholesky factorization with strictly
/// positive pivots. Checks the Hermitian invariant first.
pub fn is_positive_definite(x: &ComplexMatrix, margin: f64) -> Result<bool, LinalgError> {
    if !x.is_hermitian() {
        return Err(LinalgError::NotHermitian {
            residual: x.hermitian_residual(),
        });
    }
    let n = x.rows();
    let shifted = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            // Drop the (tiny) imaginary diagonal residue so pivots are real.
            Complex::from_real(x[(i, j)].re - margin)
        } else {
            x[(i, j)]
        }
    });
    Ok(cholesky(&shifted).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_margins() {
        let i2 = ComplexMatrix::identity(2);
        assert!(is_positive_definite(&i2, 0.5).unwrap());
        assert!(!is_positive_definite(&i2, 1.5).unwrap());
    }

    #[test]
    fn indefinite_detected() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!is_positive_definite(&x, 0.0).unwrap());
    }

    #[test]
    fn non_hermitian_rejected() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(
            is_positive_definite(&x, 0.0),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn monotone_in_margin() {
        let x = ComplexMatrix::from_rows(&[
            vec![Complex::from_real(2.0), Complex::new(0.3, 0.4)],
            vec![Complex::new(0.3, -0.4), Complex::from_real(1.0)],
        ]);
        let mut last = true;
        for k in 0..40 {
            let margin = -2.0 + 0.1 * k as f64;
            let now = is_positive_definite(&x, margin).unwrap();
            assert!(!(now && !last), "definiteness must not recover as margin grows");
            last = now;
        }
    }

    #[test]
    fn factor_reconstructs() {
        let x = ComplexMatrix::from_rows(&[
            vec![Complex::from_real(4.0), Complex::new(1.0, -1.0)],
            vec![Complex::new(1.0, 1.0), Complex::from_real(3.0)],
        ]);
        let l = cholesky(&x).unwrap();
        let back = l.mul(&l.conj_transpose());
        assert!(back.sub(&x).max_abs() < 1e-14);
    }
}
