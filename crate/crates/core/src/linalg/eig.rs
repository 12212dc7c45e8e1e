use super::matrix::ComplexMatrix;
use super::scalar::Complex;
use super::LinalgError;

/// Hard cap on problem size; the sweep and certification paths never need
/// more, and the dense O(n^3) kernels are not meant to scale past this.
const MAX_DIM: usize = 200;

/// All eigenvalues of a general complex matrix, with multiplicity.
///
/// Householder reduction to upper Hessenberg form followed by the shifted QR
/// iteration (Wilkinson shifts, explicit Givens sweeps). The iteration cap is
/// `100 * n` QR steps; exceeding it returns `NoConvergence` rather than a
/// partial spectrum.
pub fn eig_general(x: &ComplexMatrix) -> Result<Vec<Complex>, LinalgError> {
    assert!(x.is_square(), "eig_general requires a square matrix");
    let n = x.rows();
    assert!(n >= 1 && n <= MAX_DIM, "dimension out of supported range");
    if n == 1 {
        return Ok(vec![x[(0, 0)]]);
    }
    let mut h = x.clone();
    hessenberg_in_place(&mut h);
    qr_eigenvalues(&mut h, 100 * n)
}

/// Eigenvalues of a Hermitian matrix, in nondecreasing order.
///
/// Cyclic Jacobi sweeps with complex rotations; the off-diagonal residual is
/// driven below `1e-12 * max_abs`.
pub fn eig_hermitian(x: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    if !x.is_hermitian() {
        return Err(LinalgError::NotHermitian {
            residual: x.hermitian_residual(),
        });
    }
    let n = x.rows();
    assert!(n >= 1 && n <= MAX_DIM, "dimension out of supported range");
    // Work on the exactly symmetrized copy so rounding asymmetry cannot leak
    // into the rotations.
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::from_real(x[(i, i)].re)
        } else {
            (x[(i, j)] + x[(j, i)].conj()).scale(0.5)
        }
    });
    let scale = a.max_abs();
    if n == 1 || scale == 0.0 {
        let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        d.sort_by(|p, q| p.partial_cmp(q).unwrap());
        return Ok(d);
    }
    let target = 1e-13 * scale;
    let mut converged = false;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, p, q);
            }
        }
    }
    if !converged {
        // Final acceptance at the documented residual bound.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off > 1e-12 * scale {
            return Err(LinalgError::NoConvergence { iterations: 60 * n * n });
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    d.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(d)
}

fn jacobi_rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.abs();
    if b == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq.scale(1.0 / b);
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // Unitary U = [[c*phase, s*phase], [-s, c]] diagonalizes the (p,q) pivot.
    let upp = phase.scale(c);
    let upq = phase.scale(s);
    let n = a.rows();
    // A <- A U on columns p, q.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * upp - aiq.scale(s);
        a[(i, q)] = aip * upq + aiq.scale(c);
    }
    // A <- U^* A on rows p, q.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * upp.conj() - aqj.scale(s);
        a[(q, j)] = apj * upq.conj() + aqj.scale(c);
    }
    // Restore exact Hermitian structure on the touched rows/columns.
    a[(p, q)] = Complex::ZERO;
    a[(q, p)] = Complex::ZERO;
    let dp = a[(p, p)].re;
    let dq = a[(q, q)].re;
    a[(p, p)] = Complex::from_real(dp);
    a[(q, q)] = Complex::from_real(dq);
    for i in 0..n {
        if i != p && i != q {
            let mp = (a[(i, p)] + a[(p, i)].conj()).scale(0.5);
            a[(i, p)] = mp;
            a[(p, i)] = mp.conj();
            let mq = (a[(i, q)] + a[(q, i)].conj()).scale(0.5);
            a[(i, q)] = mq;
            a[(q, i)] = mq.conj();
        }
    }
}

fn hessenberg_in_place(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![Complex::ZERO; n];
    for k in 0..(n - 2) {
        let mut norm_sq = 0.0;
        for i in (k + 1)..n {
            norm_sq += a[(i, k)].abs_sq();
        }
        let mut tail_sq = 0.0;
        for i in (k + 2)..n {
            tail_sq += a[(i, k)].abs_sq();
        }
        if tail_sq <= f64::EPSILON * f64::EPSILON * norm_sq || norm_sq == 0.0 {
            continue;
        }
        let norm = norm_sq.sqrt();
        let x0 = a[(k + 1, k)];
        let alpha = if x0.abs() == 0.0 {
            Complex::from_real(-norm)
        } else {
            -x0.scale(norm / x0.abs())
        };
        let m = n - k - 1;
        v[0] = x0 - alpha;
        for i in (k + 2)..n {
            v[i - k - 1] = a[(i, k)];
        }
        let vnorm_sq: f64 = v[..m].iter().map(|z| z.abs_sq()).sum();
        if vnorm_sq == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sq;
        // Left reflection on rows k+1..n.
        for j in k..n {
            let mut s = Complex::ZERO;
            for i in 0..m {
                s += v[i].conj() * a[(k + 1 + i, j)];
            }
            s = s.scale(beta);
            for i in 0..m {
                let adj = v[i] * s;
                let cur = a[(k + 1 + i, j)];
                a[(k + 1 + i, j)] = cur - adj;
            }
        }
        // Right reflection on columns k+1..n.
        for i in 0..n {
            let mut s = Complex::ZERO;
            for j in 0..m {
                s += a[(i, k + 1 + j)] * v[j];
            }
            s = s.scale(beta);
            for j in 0..m {
                let adj = s * v[j].conj();
                let cur = a[(i, k + 1 + j)];
                a[(i, k + 1 + j)] = cur - adj;
            }
        }
        a[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            a[(i, k)] = Complex::ZERO;
        }
    }
}

fn eig2(a: Complex, b: Complex, c: Complex, d: Complex) -> (Complex, Complex) {
    let mean = (a + d).scale(0.5);
    let half_diff = (a - d).scale(0.5);
    let disc = (half_diff * half_diff + b * c).sqrt();
    (mean + disc, mean - disc)
}

fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex {
    let (l1, l2) = eig2(
        h[(hi - 1, hi - 1)],
        h[(hi - 1, hi)],
        h[(hi, hi - 1)],
        h[(hi, hi)],
    );
    let target = h[(hi, hi)];
    if (l1 - target).abs() <= (l2 - target).abs() {
        l1
    } else {
        l2
    }
}

fn givens(f: Complex, g: Complex) -> (f64, Complex) {
    let fa = f.abs();
    let ga = g.abs();
    if ga == 0.0 {
        return (1.0, Complex::ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj().scale(1.0 / ga));
    }
    let r = fa.hypot(ga);
    let c = fa / r;
    let s = f.scale(1.0 / fa) * g.conj().scale(1.0 / r);
    (c, s)
}

fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex) {
    for i in lo..=hi {
        let d = h[(i, i)];
        h[(i, i)] = d - mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x.scale(c) + s * y;
            h[(k + 1, j)] = y.scale(c) - s.conj() * x;
        }
        h[(k + 1, k)] = Complex::ZERO;
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        let bot = (k + 2).min(hi);
        for i in lo..=bot {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x.scale(c) + s.conj() * y;
            h[(i, k + 1)] = y.scale(c) - s * x;
        }
    }
    for i in lo..=hi {
        let d = h[(i, i)];
        h[(i, i)] = d + mu;
    }
}

fn qr_eigenvalues(h: &mut ComplexMatrix, cap: usize) -> Result<Vec<Complex>, LinalgError> {
    let n = h.rows();
    let scale = h.max_abs();
    let mut eigs = vec![Complex::ZERO; n];
    let mut hi = n - 1;
    let mut steps = 0usize;
    let mut since_deflation = 0usize;

    let negligible = |h: &ComplexMatrix, i: usize| -> bool {
        let local = h[(i - 1, i - 1)].abs() + h[(i, i)].abs();
        let tol = f64::EPSILON * if local > 0.0 { local } else { scale };
        h[(i, i - 1)].abs() <= tol
    };

    loop {
        // Deflate converged trailing 1x1 blocks.
        loop {
            if hi == 0 {
                eigs[0] = h[(0, 0)];
                return Ok(eigs);
            }
            if negligible(h, hi) {
                h[(hi, hi - 1)] = Complex::ZERO;
                eigs[hi] = h[(hi, hi)];
                hi -= 1;
                since_deflation = 0;
            } else {
                break;
            }
        }
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            if negligible(h, lo) {
                h[(lo, lo - 1)] = Complex::ZERO;
                break;
            }
            lo -= 1;
        }
        if hi - lo == 1 {
            let (l1, l2) = eig2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs[lo] = l1;
            eigs[hi] = l2;
            if lo == 0 {
                return Ok(eigs);
            }
            hi = lo - 1;
            since_deflation = 0;
            continue;
        }
        if steps >= cap {
            return Err(LinalgError::NoConvergence { iterations: steps });
        }
        steps += 1;
        since_deflation += 1;
        let mu = if since_deflation % 12 == 0 {
            // Exceptional shift to break symmetric limit cycles.
            let lower = h[(hi, hi - 1)].abs()
                + if hi >= 2 { h[(hi - 1, hi - 2)].abs() } else { 0.0 };
            h[(hi, hi)] + Complex::from_real(0.75 * lower)
        } else {
            wilkinson_shift(h, hi)
        };
        qr_step(h, lo, hi, mu);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sigma_min_estimate;

    fn sorted_by_re(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn involution_matrix() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eigs = sorted_by_re(eig_general(&x).unwrap());
        assert!((eigs[0] - Complex::from_real(-1.0)).abs() < 1e-12);
        assert!((eigs[1] - Complex::from_real(1.0)).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_companion() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 1.0]]);
        let eigs = sorted_by_re(eig_general(&x).unwrap());
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((eigs[0] - Complex::from_real(1.0 - phi)).abs() < 1e-12);
        assert!((eigs[1] - Complex::from_real(phi)).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_satisfy_singularity_residual() {
        let x = ComplexMatrix::from_fn(7, 7, |i, j| {
            Complex::new(
                ((i * 3 + j * 5) as f64 * 0.31).sin(),
                ((i + 7 * j) as f64 * 0.17).cos() * 0.8,
            )
        });
        let eigs = eig_general(&x).unwrap();
        assert_eq!(eigs.len(), 7);
        let scale = x.max_abs();
        for lam in eigs {
            let shifted = x.sub(&ComplexMatrix::scaled_identity(7, lam));
            let sigma = sigma_min_estimate(&shifted);
            assert!(sigma <= 1e-8 * scale, "sigma {sigma:.3e} too large");
        }
    }

    #[test]
    fn cyclic_permutation_matrices() {
        // Unshifted QR cycles on these; the exceptional shift must break out.
        for n in [3usize, 5, 8] {
            let x = ComplexMatrix::from_fn(n, n, |i, j| {
                if i == (j + 1) % n {
                    Complex::ONE
                } else {
                    Complex::ZERO
                }
            });
            let eigs = eig_general(&x).unwrap();
            // Spectrum is the n-th roots of unity.
            for lam in &eigs {
                assert!((lam.abs() - 1.0).abs() < 1e-10);
                let nth = lam.powi(n);
                assert!((nth - Complex::ONE).abs() < 1e-8, "n = {n}, lam = {lam}");
            }
            let mut args: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
            args.sort_by(|a, b| a.partial_cmp(b).unwrap());
            args.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            assert_eq!(args.len(), n, "n = {n}: roots must be distinct");
        }
    }

    #[test]
    fn defective_jordan_block() {
        // A 4x4 Jordan block has a defective eigenvalue; the computed values
        // form the usual eps^(1/4) cluster around it and the mean recovers
        // the trace.
        let n = 4;
        let x = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j || j == i + 1 {
                Complex::ONE
            } else {
                Complex::ZERO
            }
        });
        let eigs = eig_general(&x).unwrap();
        let mut mean = Complex::ZERO;
        for lam in &eigs {
            assert!((*lam - Complex::ONE).abs() < 5e-4, "lam = {lam}");
            mean += *lam;
        }
        mean = mean.scale(1.0 / n as f64);
        assert!((mean - Complex::ONE).abs() < 1e-12);
    }

    #[test]
    fn trivial_spectra() {
        let zero = ComplexMatrix::zeros(3, 3);
        for lam in eig_general(&zero).unwrap() {
            assert_eq!(lam, Complex::ZERO);
        }
        let eye = ComplexMatrix::identity(4);
        for lam in eig_general(&eye).unwrap() {
            assert!((lam - Complex::ONE).abs() < 1e-14);
        }
        let repeated = ComplexMatrix::from_real_rows(&[
            &[2.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0],
            &[0.0, 0.0, -1.0],
        ]);
        let mut eigs = eig_general(&repeated).unwrap();
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((eigs[0] - Complex::from_real(-1.0)).abs() < 1e-14);
        assert!((eigs[1] - Complex::from_real(2.0)).abs() < 1e-14);
        assert!((eigs[2] - Complex::from_real(2.0)).abs() < 1e-14);
    }

    #[test]
    fn hermitian_diag() {
        let x = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(eig_hermitian(&x).unwrap(), vec![-1.0, 3.0]);
    }

    #[test]
    fn hermitian_pauli_like() {
        let x = ComplexMatrix::from_rows(&[
            vec![Complex::ZERO, Complex::I],
            vec![Complex::new(0.0, -1.0), Complex::ZERO],
        ]);
        let e = eig_hermitian(&x).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-13);
        assert!((e[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hermitian_rejects_general() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            eig_hermitian(&x),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_matches_general_on_hermitian_input() {
        let raw = ComplexMatrix::from_fn(6, 6, |i, j| {
            Complex::new(
                ((i * 7 + j * 2) as f64 * 0.23).sin(),
                ((i * 2 + j * 5) as f64 * 0.41).cos(),
            )
        });
        let h = raw.herm_part();
        let via_jacobi = eig_hermitian(&h).unwrap();
        let mut via_qr: Vec<f64> = eig_general(&h).unwrap().iter().map(|z| z.re).collect();
        via_qr.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in via_jacobi.iter().zip(via_qr.iter()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + h.max_abs()));
        }
        // Imag parts from the QR path must vanish on Hermitian input.
        for z in eig_general(&h).unwrap() {
            assert!(z.im.abs() < 1e-8 * (1.0 + h.max_abs()));
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let raw = ComplexMatrix::from_fn(5, 5, |i, j| {
            Complex::new((i as f64 + 1.0) * 0.3 - j as f64 * 0.2, (i * j) as f64 * 0.07)
        });
        let h = raw.herm_part();
        let eigs = eig_hermitian(&h).unwrap();
        let sum: f64 = eigs.iter().sum();
        let tr = 2.0 * raw.trace().re;
        assert!((sum - tr).abs() < 1e-10 * (1.0 + tr.abs()));
    }
}
