//! The boundary transfer matrix and its nD generalization.
//!
//! Eliminating the second state direction of a 2D model at a frequency
//! `delta` leaves the `k1 x k1` matrix
//! `M(delta) = A11 + A12 (I - delta A22)^{-1} delta A21`;
//! this module evaluates it (including the symbolic limit at infinity) and
//! the corresponding linear-fractional form for nD models.

use thiserror::Error;

use crate::linalg::{solve, Complex, ComplexMatrix, LinalgError};
use crate::model::{DimensionKind, ExtendedComplex, NdRoesserModel, RoesserModel};

/// A point produced by a boundary sweep, tagged with the sweep parameter that
/// generated it (the angle on the circle, or the axis parameter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub value: ExtendedComplex,
    pub source_angle: f64,
}

impl BoundaryPoint {
    pub fn finite(value: Complex, source_angle: f64) -> Self {
        BoundaryPoint {
            value: ExtendedComplex::Finite(value),
            source_angle,
        }
    }

    pub fn infinity() -> Self {
        BoundaryPoint {
            value: ExtendedComplex::Infinity,
            source_angle: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Whether the point lies on the boundary of the given region kind,
    /// within `tol` (|value| = 1 for a shift, Re(value) = 0 or infinity for
    /// a derivative).
    pub fn on_boundary(&self, kind: DimensionKind, tol: f64) -> bool {
        match (kind, &self.value) {
            (DimensionKind::Shift, ExtendedComplex::Finite(z)) => (z.abs() - 1.0).abs() <= tol,
            (DimensionKind::Shift, ExtendedComplex::Infinity) => false,
            (DimensionKind::Derivative, ExtendedComplex::Finite(z)) => z.re.abs() <= tol,
            (DimensionKind::Derivative, ExtendedComplex::Infinity) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransferError {
    /// `(I - delta A22)` (or the nD analogue) is singular at the requested
    /// point: the eliminated block has an eigenvalue at `1/delta`, which the
    /// stability precondition rules out.
    #[error("transfer matrix has a pole at the requested point ({0})")]
    PoleHit(LinalgError),
    /// Count of boundary points does not match the model dimensions.
    #[error("expected {expected} boundary points, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// Uniform boundary samples for one dimension.
///
/// Shift: the `n` roots of unity (angle `2 pi k / n`). Derivative: the points
/// `i tan(phi)` on a uniform open grid of `phi`, with the infinity sample
/// appended when requested. Grids for `n` and any multiple of `n` are nested,
/// so refining a sweep only adds points.
pub fn boundary_samples(kind: DimensionKind, n: usize, include_infinity: bool) -> Vec<BoundaryPoint> {
    match kind {
        DimensionKind::Shift => (0..n)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                BoundaryPoint::finite(Complex::from_polar(1.0, theta), theta)
            })
            .collect(),
        DimensionKind::Derivative => {
            let mut pts: Vec<BoundaryPoint> = (1..n)
                .map(|k| {
                    let phi = -std::f64::consts::FRAC_PI_2
                        + std::f64::consts::PI * k as f64 / n as f64;
                    BoundaryPoint::finite(Complex::new(0.0, phi.tan()), phi)
                })
                .collect();
            if include_infinity {
                pts.push(BoundaryPoint::infinity());
            }
            pts
        }
    }
}

/// The boundary transfer matrix at a single point.
///
/// At the symbolic infinity the limit `A11 - A12 A22^{-1} A21` is used, which
/// requires `A22` nonsingular.
pub fn m_delta(m: &RoesserModel, delta: &BoundaryPoint) -> Result<ComplexMatrix, TransferError> {
    m_at(m, &delta.value)
}

/// Same as [`m_delta`] for a raw extended point (interior probing uses this).
pub fn m_at(m: &RoesserModel, delta: &ExtendedComplex) -> Result<ComplexMatrix, TransferError> {
    let k2 = m.k2();
    match delta {
        ExtendedComplex::Finite(d) => {
            let lhs = ComplexMatrix::identity(k2).sub(&m.a22().scale(*d));
            let rhs = m.a21().scale(*d);
            let x = solve(&lhs, &rhs).map_err(TransferError::PoleHit)?;
            Ok(m.a11().add(&m.a12().mul(&x)))
        }
        ExtendedComplex::Infinity => {
            let x = solve(m.a22(), m.a21()).map_err(TransferError::PoleHit)?;
            Ok(m.a11().sub(&m.a12().mul(&x)))
        }
    }
}

/// The nD transfer matrix `D + C (I - Delta A)^{-1} Delta B` with
/// `Delta = blockdiag(delta_i I)` over the trailing dimensions.
///
/// Infinite coordinates are eliminated exactly: a state block scaled by an
/// infinite parameter contributes the constraint row `(A x + B u)_i = 0`
/// instead of `x_i = delta_i (A x + B u)_i`, which reproduces the 2D limit
/// formula when every coordinate is infinite.
pub fn nd_m_delta(
    m: &NdRoesserModel,
    deltas: &[BoundaryPoint],
) -> Result<ComplexMatrix, TransferError> {
    let n = m.n();
    if deltas.len() != n - 1 {
        return Err(TransferError::ArityMismatch {
            expected: n - 1,
            got: deltas.len(),
        });
    }
    let (a_m, b_m, c_m, d_m) = crate::model::nd_partition(m);
    let tail = a_m.rows();
    let k1 = d_m.rows();
    // Row block i (dimension i+2) spans rows off..off+dim.
    let mut k = ComplexMatrix::zeros(tail, tail);
    let mut rhs = ComplexMatrix::zeros(tail, k1);
    let mut off = 0;
    for (i, bp) in deltas.iter().enumerate() {
        let dim = m.dim(i + 1);
        match bp.value {
            ExtendedComplex::Finite(d) => {
                for r in 0..dim {
                    for c in 0..tail {
                        let v = -(a_m[(off + r, c)] * d);
                        k[(off + r, c)] = v;
                    }
                    k[(off + r, off + r)] += Complex::ONE;
                    for c in 0..k1 {
                        rhs[(off + r, c)] = b_m[(off + r, c)] * d;
                    }
                }
            }
            ExtendedComplex::Infinity => {
                for r in 0..dim {
                    for c in 0..tail {
                        k[(off + r, c)] = a_m[(off + r, c)];
                    }
                    for c in 0..k1 {
                        rhs[(off + r, c)] = -b_m[(off + r, c)];
                    }
                }
            }
        }
        off += dim;
    }
    let x = solve(&k, &rhs).map_err(TransferError::PoleHit)?;
    Ok(d_m.add(&c_m.mul(&x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DimensionKind::Shift;

    fn s1() -> RoesserModel {
        RoesserModel::scalar(0.5, 0.3, 0.3, 0.5, Shift, Shift)
    }

    #[test]
    fn at_zero_returns_a11() {
        let m = s1();
        let p = BoundaryPoint::finite(Complex::ZERO, 0.0);
        let v = m_delta(&m, &p).unwrap();
        assert_eq!(&v, m.a11());
    }

    #[test]
    fn scalar_at_one() {
        let m = s1();
        let p = BoundaryPoint::finite(Complex::ONE, 0.0);
        let v = m_delta(&m, &p).unwrap();
        assert!((v[(0, 0)] - Complex::from_real(0.68)).abs() < 1e-15);
    }

    #[test]
    fn pole_reported() {
        let m = s1();
        let p = BoundaryPoint::finite(Complex::from_real(2.0), 0.0);
        assert!(matches!(m_delta(&m, &p), Err(TransferError::PoleHit(_))));
    }

    #[test]
    fn infinity_limit() {
        let m = s1();
        let v = m_delta(&m, &BoundaryPoint::infinity()).unwrap();
        // a - b c / d = 0.5 - 0.09 / 0.5
        assert!((v[(0, 0)] - Complex::from_real(0.5 - 0.18)).abs() < 1e-15);
    }

    #[test]
    fn nd_collapses_to_2d() {
        let m = s1();
        let nd = NdRoesserModel::from_2d(&m);
        for k in 0..16 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 16.0;
            let p = BoundaryPoint::finite(Complex::from_polar(1.0, theta), theta);
            let a = m_delta(&m, &p).unwrap();
            let b = nd_m_delta(&nd, &[p]).unwrap();
            assert!(a.sub(&b).max_abs() < 1e-14);
        }
        let a = m_delta(&m, &BoundaryPoint::infinity()).unwrap();
        let b = nd_m_delta(&nd, &[BoundaryPoint::infinity()]).unwrap();
        assert!(a.sub(&b).max_abs() < 1e-14);
    }

    #[test]
    fn nd_all_zero_gives_leading_block() {
        let blocks: Vec<Vec<ComplexMatrix>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        ComplexMatrix::from_fn(1, 1, |_, _| {
                            Complex::from_real(0.1 * (i as f64 + 1.0) - 0.05 * j as f64)
                        })
                    })
                    .collect()
            })
            .collect();
        let m = NdRoesserModel::new(blocks, vec![Shift; 3]).unwrap();
        let zero = BoundaryPoint::finite(Complex::ZERO, 0.0);
        let v = nd_m_delta(&m, &[zero, zero]).unwrap();
        assert_eq!(&v, m.block(0, 0));
    }

    #[test]
    fn conjugate_symmetry() {
        let m = RoesserModel::new(
            ComplexMatrix::from_real_rows(&[&[0.2, 0.4], &[-0.1, 0.3]]),
            ComplexMatrix::from_real_rows(&[&[0.5], &[0.1]]),
            ComplexMatrix::from_real_rows(&[&[0.3, -0.2]]),
            ComplexMatrix::from_real_rows(&[&[0.6]]),
            Shift,
            Shift,
        )
        .unwrap();
        let theta = 1.234;
        let p = BoundaryPoint::finite(Complex::from_polar(1.0, theta), theta);
        let q = BoundaryPoint::finite(Complex::from_polar(1.0, -theta), -theta);
        let mp = m_delta(&m, &p).unwrap();
        let mq = m_delta(&m, &q).unwrap();
        let conj_mp = ComplexMatrix::from_fn(2, 2, |i, j| mp[(i, j)].conj());
        assert!(mq.sub(&conj_mp).max_abs() < 1e-12);
    }

    #[test]
    fn boundary_sample_invariants() {
        for pts in [
            boundary_samples(DimensionKind::Shift, 64, true),
            boundary_samples(DimensionKind::Shift, 64, false),
        ] {
            assert_eq!(pts.len(), 64);
            for p in pts {
                assert!(p.on_boundary(DimensionKind::Shift, 1e-12));
            }
        }
        let pts = boundary_samples(DimensionKind::Derivative, 64, true);
        assert_eq!(pts.len(), 64);
        assert!(pts.last().unwrap().value.is_infinity());
        for p in &pts {
            assert!(p.on_boundary(DimensionKind::Derivative, 1e-12));
        }
        // Nesting: every n-grid point appears in the 4n-grid.
        let coarse = boundary_samples(DimensionKind::Derivative, 16, false);
        let fine = boundary_samples(DimensionKind::Derivative, 64, false);
        for c in &coarse {
            assert!(fine.iter().any(|f| {
                match (c.value.as_finite(), f.value.as_finite()) {
                    (Some(a), Some(b)) => (a - b).abs() < 1e-9 * (1.0 + a.abs()),
                    _ => false,
                }
            }));
        }
    }
}
