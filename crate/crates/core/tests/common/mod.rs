//! Shared test oracles and seeded generators.
//!
//! The eigenvalue oracle here deliberately avoids the library's QR path:
//! characteristic polynomial coefficients come from the trace recursion
//! (matrix products only), and roots from a simultaneous Durand-Kerner
//! iteration.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roesser::linalg::{Complex, ComplexMatrix};
use roesser::model::{DimensionKind, RoesserModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

/// Monic characteristic polynomial coefficients `c_0 + c_1 x + ... + x^n`
/// via the trace recursion (no eigenvalue machinery involved).
pub fn char_poly(x: &ComplexMatrix) -> Vec<Complex> {
    let n = x.rows();
    assert!(x.is_square());
    // c[n] = 1; m_1 = I; for k = 1..=n:
    //   c[n-k] = -tr(X m_k) / k,  m_{k+1} = X m_k + c[n-k] I.
    let mut coeffs = vec![Complex::ZERO; n + 1];
    coeffs[n] = Complex::ONE;
    let mut m = ComplexMatrix::identity(n);
    for k in 1..=n {
        let xm = x.mul(&m);
        let c = xm.trace().scale(-1.0 / k as f64);
        coeffs[n - k] = c;
        if k < n {
            m = xm.add(&ComplexMatrix::scaled_identity(n, c));
        }
    }
    coeffs
}

fn eval_poly(coeffs: &[Complex], z: Complex) -> Complex {
    let mut acc = Complex::ZERO;
    for c in coeffs.iter().rev() {
        acc = acc * z + *c;
    }
    acc
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[Complex]) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    // Radius bound keeps the initial ring outside typical root clusters.
    let lead = coeffs[n];
    let bound = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (*c / lead).abs())
            .fold(0.0, f64::max);
    let seed = Complex::new(0.4, 0.9);
    let mut roots: Vec<Complex> = (0..n)
        .map(|i| seed.powi(i + 1).scale(0.6 * bound / seed.abs().powi((i + 1) as i32)))
        .collect();
    // Distinct starting angles.
    for (i, r) in roots.iter_mut().enumerate() {
        *r = Complex::from_polar(
            0.5 * bound * (1.0 + 0.3 * (i as f64 / n as f64)),
            2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.37,
        );
    }
    for _ in 0..600 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = lead;
            for j in 0..n {
                if j != i {
                    denom = denom * (roots[i] - roots[j]);
                }
            }
            if denom.abs() == 0.0 {
                continue;
            }
            let delta = eval_poly(coeffs, roots[i]) / denom;
            roots[i] = roots[i] - delta;
            moved = moved.max(delta.abs());
        }
        if moved < 1e-14 * (1.0 + bound) {
            break;
        }
    }
    roots
}

/// Independent eigenvalue oracle: characteristic polynomial roots.
pub fn eig_oracle(x: &ComplexMatrix) -> Vec<Complex> {
    poly_roots(&char_poly(x))
}

/// Greedy nearest-neighbour multiset match; panics with context when a pair
/// exceeds the tolerance.
pub fn assert_multiset_close(a: &[Complex], b: &[Complex], tol: f64, context: &str) {
    assert_eq!(a.len(), b.len(), "{context}: cardinality mismatch");
    let mut unmatched: Vec<Complex> = b.to_vec();
    for (i, x) in a.iter().enumerate() {
        let (best, dist) = unmatched
            .iter()
            .enumerate()
            .map(|(j, y)| (j, (*x - *y).abs()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .expect("nonempty");
        assert!(
            dist <= tol,
            "{context}: eigenvalue {i} ({x}) no partner within {tol:.2e} (closest {dist:.2e})"
        );
        unmatched.swap_remove(best);
    }
}

pub fn random_real_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex::from_real(uniform(r, -1.0, 1.0) * scale)
    })
}

pub fn random_complex_matrix(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        Complex::new(uniform(r, -1.0, 1.0), uniform(r, -1.0, 1.0))
    })
}

fn spectral_radius(x: &ComplexMatrix) -> f64 {
    roesser::linalg::eig_general(x)
        .expect("eig converges on test inputs")
        .iter()
        .map(|z| z.abs())
        .fold(0.0, f64::max)
}

fn spectral_abscissa(x: &ComplexMatrix) -> f64 {
    roesser::linalg::eig_general(x)
        .expect("eig converges on test inputs")
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rescales or shifts a square block so its spectrum sits at the requested
/// stability margin for the given kind (radius for shift, abscissa for
/// derivative).
pub fn place_spectrum(x: &ComplexMatrix, kind: DimensionKind, target: f64) -> ComplexMatrix {
    match kind {
        DimensionKind::Shift => {
            let rho = spectral_radius(x);
            if rho < 1e-9 {
                x.clone()
            } else {
                x.scale_re(target / rho)
            }
        }
        DimensionKind::Derivative => shift_abscissa(x, target),
    }
}

/// Random 2D model with the requested kinds. The second block is placed
/// strictly inside its region most of the time (one in ten draws leaves it
/// unstable for verdict coverage); the leading block is placed across the
/// boundary so verdicts mix.
pub fn random_model(
    r: &mut ChaCha8Rng,
    kind1: DimensionKind,
    kind2: DimensionKind,
    max_dim: usize,
) -> RoesserModel {
    let k1 = r.gen_range(1..=max_dim);
    let k2 = r.gen_range(1..=max_dim);
    let coupling = uniform(r, 0.1, 0.8);
    let a12 = random_real_matrix(r, k1, k2, coupling);
    let a21 = random_real_matrix(r, k2, k1, coupling);

    let raw22 = random_real_matrix(r, k2, k2, 1.0);
    let a22 = match kind2 {
        DimensionKind::Shift => {
            let target = if r.gen_range(0..10) == 0 {
                uniform(r, 1.02, 1.2)
            } else {
                uniform(r, 0.2, 0.92)
            };
            place_spectrum(&raw22, kind2, target)
        }
        DimensionKind::Derivative => {
            let margin = if r.gen_range(0..10) == 0 {
                uniform(r, -0.5, -0.05)
            } else {
                uniform(r, 0.1, 1.0)
            };
            shift_abscissa(&raw22, margin)
        }
    };

    let raw11 = random_real_matrix(r, k1, k1, 1.0);
    let a11 = match kind1 {
        DimensionKind::Shift => place_spectrum(&raw11, kind1, uniform(r, 0.25, 1.25)),
        DimensionKind::Derivative => shift_abscissa(&raw11, uniform(r, -0.4, 1.0)),
    };

    RoesserModel::new(a11, a12, a21, a22, kind1, kind2).expect("generated blocks conform")
}

/// Shifts the diagonal so the spectral abscissa lands at `-margin`.
pub fn shift_abscissa(x: &ComplexMatrix, margin: f64) -> ComplexMatrix {
    let alpha = spectral_abscissa(x);
    x.sub(&ComplexMatrix::scaled_identity(
        x.rows(),
        Complex::from_real(alpha + margin),
    ))
}
