//! Parameter-dependent Stein/Lyapunov data and the polynomial ansatz.
//!
//! The certification unknowns are a constant matrix `Y` for the eliminated
//! block and a Hermitian-symmetrized polynomial `P(delta)` for the boundary
//! family. This module evaluates the two Stein forms, reduces bilateral
//! polynomials in `(delta, conj(delta))` to one-sided ones on each boundary,
//! and assembles the sampled semidefinite feasibility problem solved by
//! [`crate::sdp`].

use thiserror::Error;

use crate::linalg::{Complex, ComplexMatrix};
use crate::model::{DimensionKind, ExtendedComplex, RoesserModel};
use crate::sdp::{embed_hermitian, AffineBlock, LmiProblem, SymMatrix};
use crate::transfer::{m_delta, BoundaryPoint, TransferError};

/// Basis for the polynomial ansatz.
///
/// The plain monomial basis is unbounded at the infinity sample, which the
/// extended imaginary axis contains; the Moebius basis `(delta/(1+delta))^i`
/// stays bounded there and is therefore the natural choice for a derivative
/// second dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    Moebius,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LyapunovError {
    #[error("transfer matrix pole at a sample point: {0}")]
    Pole(#[from] TransferError),
    #[error("monomial ansatz of degree >= 1 is unbounded at infinity")]
    UnboundedAtInfinity,
    #[error("moebius basis has a pole at delta = -1")]
    BasisPole,
    #[error("moebius basis requires a derivative second dimension")]
    BasisRegionMismatch,
}

/// Hermitian-symmetrized polynomial `P(delta) = S(delta) + S(delta)^*` with
/// `S(delta) = sum_i coeffs[i] b_i(delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialLyapunov {
    /// Coefficients for powers 0..=degree.
    pub coeffs: Vec<ComplexMatrix>,
    pub basis: Basis,
}

impl PolynomialLyapunov {
    pub fn constant(p0: ComplexMatrix) -> Self {
        PolynomialLyapunov {
            coeffs: vec![p0],
            basis: Basis::Monomial,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// Basis function values `b_0(delta) .. b_nu(delta)`.
    fn basis_values(
        basis: Basis,
        degree: usize,
        delta: &ExtendedComplex,
    ) -> Result<Vec<Complex>, LyapunovError> {
        let base = match (basis, delta) {
            (Basis::Monomial, ExtendedComplex::Finite(d)) => *d,
            (Basis::Monomial, ExtendedComplex::Infinity) => {
                if degree == 0 {
                    Complex::ZERO // only b_0 = 1 is used
                } else {
                    return Err(LyapunovError::UnboundedAtInfinity);
                }
            }
            (Basis::Moebius, ExtendedComplex::Finite(d)) => {
                let den = Complex::ONE + *d;
                if den.abs() < 1e-14 {
                    return Err(LyapunovError::BasisPole);
                }
                *d / den
            }
            (Basis::Moebius, ExtendedComplex::Infinity) => Complex::ONE,
        };
        let mut vals = Vec::with_capacity(degree + 1);
        let mut acc = Complex::ONE;
        for _ in 0..=degree {
            vals.push(acc);
            acc *= base;
        }
        Ok(vals)
    }

    /// Evaluates `P(delta)`; always Hermitian by construction.
    pub fn eval(&self, delta: &ExtendedComplex) -> Result<ComplexMatrix, LyapunovError> {
        let vals = Self::basis_values(self.basis, self.degree(), delta)?;
        let k = self.dim();
        let mut s = ComplexMatrix::zeros(k, k);
        for (c, b) in self.coeffs.iter().zip(vals.iter()) {
            s = s.add(&c.scale(*b));
        }
        Ok(s.herm_part())
    }
}

/// Bilateral polynomial `Q(delta) = sum_{k,l} coeffs[k][l] delta^k (delta')^l`
/// where `delta'` is the conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct BilateralPolynomial {
    /// Grid indexed `[power of delta][power of conj(delta)]`.
    pub coeffs: Vec<Vec<ComplexMatrix>>,
}

impl BilateralPolynomial {
    pub fn eta(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn gamma(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0][0].rows()
    }

    /// Raw (not symmetrized) evaluation.
    pub fn eval(&self, delta: Complex) -> ComplexMatrix {
        let k = self.dim();
        let mut s = ComplexMatrix::zeros(k, k);
        let conj = delta.conj();
        for (kp, row) in self.coeffs.iter().enumerate() {
            for (lp, q) in row.iter().enumerate() {
                let w = delta.powi(kp) * conj.powi(lp);
                s = s.add(&q.scale(w));
            }
        }
        s
    }
}

/// Reduces a bilateral polynomial to one-sided monomial coefficients whose
/// Hermitian-symmetrized evaluation agrees with `Q + Q^*` on the boundary of
/// the given region kind.
///
/// Shift (unit circle): `delta * delta' = 1`, so each mixed monomial drops to
/// a pure power of `delta` or `delta'`; the `delta'` terms fold into the
/// conjugate-transposed coefficient of the matching `delta` power.
/// Derivative (imaginary axis): `delta' = -delta`, so the coefficient of
/// `delta^{k+l}` picks up the sign `(-1)^l`.
pub fn reduce_bilateral(q: &BilateralPolynomial, kind2: DimensionKind) -> Vec<ComplexMatrix> {
    let k1 = q.dim();
    match kind2 {
        DimensionKind::Shift => {
            let mut max_pow = 0usize;
            for kp in 0..=q.eta() {
                for lp in 0..=q.gamma() {
                    max_pow = max_pow.max(kp.abs_diff(lp));
                }
            }
            let mut out = vec![ComplexMatrix::zeros(k1, k1); max_pow + 1];
            for (kp, row) in q.coeffs.iter().enumerate() {
                for (lp, qkl) in row.iter().enumerate() {
                    if kp >= lp {
                        out[kp - lp] = out[kp - lp].add(qkl);
                    } else {
                        out[lp - kp] = out[lp - kp].add(&qkl.conj_transpose());
                    }
                }
            }
            out
        }
        DimensionKind::Derivative => {
            let mut out = vec![ComplexMatrix::zeros(k1, k1); q.eta() + q.gamma() + 1];
            for (kp, row) in q.coeffs.iter().enumerate() {
                for (lp, qkl) in row.iter().enumerate() {
                    let signed = if lp % 2 == 0 { qkl.clone() } else { qkl.neg() };
                    out[kp + lp] = out[kp + lp].add(&signed);
                }
            }
            out
        }
    }
}

/// Left-hand side of the constant Stein/Lyapunov inequality for the
/// eliminated block: `r00 Y + r10 (A22' Y + Y A22) + r11 A22' Y A22`.
pub fn stein_a22(m: &RoesserModel, y: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(y.rows(), m.k2(), "Y must match the second block dimension");
    assert!(y.is_square());
    let r = m.kind2.region();
    stein_form(&r, m.a22(), y)
}

/// The Stein form `r00 P + r10 (M^* P + P M) + r11 M^* P M` for a transfer
/// sample `M` and Hermitian `P`, with coefficients from region `r`.
pub fn stein_form(
    r: &crate::model::RegionDescriptor,
    m_val: &ComplexMatrix,
    p: &ComplexMatrix,
) -> ComplexMatrix {
    let mh = m_val.conj_transpose();
    let mut out = p.scale_re(r.r00);
    if r.r10 != 0.0 {
        out = out.add(&mh.mul(p).add(&p.mul(m_val)).scale_re(r.r10));
    }
    if r.r11 != 0.0 {
        out = out.add(&mh.mul(p).mul(m_val).scale_re(r.r11));
    }
    out
}

/// Left-hand side of the parameter-dependent Stein inequality at one
/// boundary point, with `M = m_delta` and `P = P(delta)`.
pub fn stein_m(
    m: &RoesserModel,
    p: &PolynomialLyapunov,
    delta: &BoundaryPoint,
) -> Result<ComplexMatrix, LyapunovError> {
    let m_val = m_delta(m, delta)?;
    let p_val = p.eval(&delta.value)?;
    Ok(stein_form(&m.kind1.region(), &m_val, &p_val))
}

/// Classification of the real decision variables behind `(Y, P_0..P_nu)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    /// Symmetric entry of Y at (a, b), a <= b.
    Y(usize, usize),
    /// Real part of `P_i[a][b]` (for i = 0 only a <= b, Hermitian).
    PRe(usize, usize, usize),
    /// Imaginary part of `P_i[a][b]` (for i = 0 only a < b).
    PIm(usize, usize, usize),
}

/// Variable layout of an assembled problem. Degrees extend by appending
/// variables, so a degree-nu layout is a prefix of the degree-(nu+1) one and
/// feasible points zero-pad upward.
#[derive(Debug, Clone, PartialEq)]
pub struct VarLayout {
    pub k1: usize,
    pub k2: usize,
    pub nu: usize,
    pub basis: Basis,
    vars: Vec<VarKind>,
}

impl VarLayout {
    fn build(k1: usize, k2: usize, nu: usize, basis: Basis) -> Self {
        let mut vars = Vec::new();
        for a in 0..k2 {
            for b in a..k2 {
                vars.push(VarKind::Y(a, b));
            }
        }
        // P0 is Hermitian up to symmetrization: real diagonal, complex upper
        // triangle. Higher coefficients are full complex matrices.
        for i in 0..=nu {
            for a in 0..k1 {
                for b in 0..k1 {
                    if i == 0 && b < a {
                        continue;
                    }
                    vars.push(VarKind::PRe(i, a, b));
                    if i > 0 || b > a {
                        vars.push(VarKind::PIm(i, a, b));
                    }
                }
            }
        }
        VarLayout { k1, k2, nu, basis, vars }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars
            .iter()
            .map(|v| match v {
                VarKind::Y(a, b) => format!("Y[{a},{b}]"),
                VarKind::PRe(i, a, b) => format!("P{i}.re[{a},{b}]"),
                VarKind::PIm(i, a, b) => format!("P{i}.im[{a},{b}]"),
            })
            .collect()
    }

    /// The elementary complex matrix added to `P_i` by one unit of variable
    /// `v`, or `None` for Y variables.
    fn p_elementary(&self, v: VarKind) -> Option<(usize, ComplexMatrix)> {
        match v {
            VarKind::Y(_, _) => None,
            VarKind::PRe(i, a, b) => {
                let mut t = ComplexMatrix::zeros(self.k1, self.k1);
                t.set(a, b, Complex::ONE);
                Some((i, t))
            }
            VarKind::PIm(i, a, b) => {
                let mut t = ComplexMatrix::zeros(self.k1, self.k1);
                t.set(a, b, Complex::I);
                Some((i, t))
            }
        }
    }

    /// The symmetric elementary matrix added to `Y` by one unit of variable
    /// `v`, or `None` for P variables.
    fn y_elementary(&self, v: VarKind) -> Option<SymMatrix> {
        match v {
            VarKind::Y(a, b) => {
                let mut s = SymMatrix::zeros(self.k2);
                s.set_sym(a, b, 1.0);
                Some(s)
            }
            _ => None,
        }
    }

    pub fn y_from_x(&self, x: &[f64]) -> ComplexMatrix {
        assert_eq!(x.len(), self.num_vars());
        let mut y = ComplexMatrix::zeros(self.k2, self.k2);
        for (idx, v) in self.vars.iter().enumerate() {
            if let VarKind::Y(a, b) = v {
                y.set(*a, *b, Complex::from_real(x[idx]));
                y.set(*b, *a, Complex::from_real(x[idx]));
            }
        }
        y
    }

    pub fn p_from_x(&self, x: &[f64]) -> PolynomialLyapunov {
        assert_eq!(x.len(), self.num_vars());
        let mut coeffs = vec![ComplexMatrix::zeros(self.k1, self.k1); self.nu + 1];
        for (idx, v) in self.vars.iter().enumerate() {
            if let Some((i, t)) = self.p_elementary(*v) {
                coeffs[i] = coeffs[i].add(&t.scale_re(x[idx]));
            }
        }
        PolynomialLyapunov {
            coeffs,
            basis: self.basis,
        }
    }
}

/// An assembled sampled feasibility problem plus its variable layout.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledLmi {
    pub problem: LmiProblem,
    pub layout: VarLayout,
    /// True when the infinity sample had to be dropped because the monomial
    /// ansatz cannot be evaluated there.
    pub skipped_infinity: bool,
}

/// Builds the sampled semidefinite feasibility problem: `Y >= eps I`,
/// `-stein_a22(Y) >= eps I`, and for every sample `P(delta) >= eps I`,
/// `-stein_m(delta) >= eps I`, all affine in the real variables behind
/// `(Y, P_0..P_nu)`. Complex Hermitian constraints are embedded as real
/// symmetric blocks of doubled size.
pub fn assemble_lmi(
    m: &RoesserModel,
    nu: usize,
    basis: Basis,
    sample_points: &[BoundaryPoint],
    eps: f64,
) -> Result<AssembledLmi, LyapunovError> {
    assert!(eps > 0.0, "strictness gap must be positive");
    if basis == Basis::Moebius && m.kind2 != DimensionKind::Derivative {
        return Err(LyapunovError::BasisRegionMismatch);
    }
    let k1 = m.k1();
    let k2 = m.k2();
    let layout = VarLayout::build(k1, k2, nu, basis);
    let r1 = m.kind1.region();
    let r2 = m.kind2.region();
    let mut blocks = Vec::with_capacity(2 + 2 * sample_points.len());

    // Block 1: Y - eps I >= 0 (real symmetric, no embedding needed).
    {
        let mut terms = Vec::new();
        for (idx, v) in layout.vars.iter().enumerate() {
            if let Some(s) = layout.y_elementary(*v) {
                terms.push((idx, s));
            }
        }
        blocks.push(AffineBlock {
            dim: k2,
            f0: SymMatrix::identity_scaled(k2, -eps),
            terms,
        });
    }

    // Block 2: -stein_a22(Y) - eps I >= 0.
    {
        let mut terms = Vec::new();
        for (idx, v) in layout.vars.iter().enumerate() {
            if layout.y_elementary(*v).is_some() {
                let basis_y = layout.y_from_x(&unit_vector(layout.num_vars(), idx));
                let coeff = stein_form(&r2, m.a22(), &basis_y).neg();
                terms.push((idx, embed_real_sym(&coeff)));
            }
        }
        blocks.push(AffineBlock {
            dim: k2,
            f0: SymMatrix::identity_scaled(k2, -eps),
            terms,
        });
    }

    // Per-sample blocks.
    let mut skipped_infinity = false;
    for bp in sample_points {
        if bp.value.is_infinity() && basis == Basis::Monomial && nu >= 1 {
            skipped_infinity = true;
            continue;
        }
        let bvals = PolynomialLyapunov::basis_values(basis, nu, &bp.value)?;
        let m_val = m_delta(m, bp)?;
        let mut p_terms = Vec::new();
        let mut stein_terms = Vec::new();
        for (idx, v) in layout.vars.iter().enumerate() {
            if let Some((i, t)) = layout.p_elementary(*v) {
                // Hermitian contribution of one unit of this variable.
                let c = t.scale(bvals[i]).herm_part();
                p_terms.push((idx, embed_hermitian(&c)));
                let s = stein_form(&r1, &m_val, &c).neg();
                stein_terms.push((idx, embed_hermitian(&s)));
            }
        }
        blocks.push(AffineBlock {
            dim: 2 * k1,
            f0: SymMatrix::identity_scaled(2 * k1, -eps),
            terms: p_terms,
        });
        blocks.push(AffineBlock {
            dim: 2 * k1,
            f0: SymMatrix::identity_scaled(2 * k1, -eps),
            terms: stein_terms,
        });
    }

    let problem = LmiProblem::new(layout.num_vars(), blocks, layout.var_names());
    Ok(AssembledLmi {
        problem,
        layout,
        skipped_infinity,
    })
}

fn unit_vector(n: usize, idx: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[idx] = 1.0;
    v
}

/// Embeds a real symmetric complex-typed matrix as a plain `SymMatrix`.
fn embed_real_sym(x: &ComplexMatrix) -> SymMatrix {
    let n = x.rows();
    let mut out = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, 0.5 * (x[(i, j)].re + x[(j, i)].re));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DimensionKind::{Derivative, Shift};
    use crate::sdp::{solve_margin, SdpStatus, SolveOptions};
    use crate::transfer::boundary_samples;

    fn s1() -> RoesserModel {
        RoesserModel::scalar(0.5, 0.3, 0.3, 0.5, Shift, Shift)
    }

    fn one_by_one(v: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[v]])
    }

    #[test]
    fn stein_a22_shift_scalar() {
        let m = s1();
        let out = stein_a22(&m, &one_by_one(1.0));
        assert!((out[(0, 0)].re + 0.75).abs() < 1e-15);
    }

    #[test]
    fn stein_a22_derivative_scalar() {
        let m = RoesserModel::scalar(0.0, 0.0, 0.0, -1.0, Derivative, Derivative);
        let out = stein_a22(&m, &one_by_one(1.0));
        assert!((out[(0, 0)].re + 2.0).abs() < 1e-15);
    }

    #[test]
    fn stein_a22_zero_block_is_negated_y() {
        let m = RoesserModel::scalar(0.1, 0.2, 0.3, 0.0, Shift, Shift);
        let y = one_by_one(2.5);
        let out = stein_a22(&m, &y);
        assert!((out[(0, 0)].re + 2.5).abs() < 1e-15);
    }

    #[test]
    fn stein_m_shift_constant_p() {
        let m = s1();
        let p = PolynomialLyapunov::constant(one_by_one(0.5)); // herm doubles to 1
        let bp = BoundaryPoint::finite(Complex::ONE, 0.0);
        let out = stein_m(&m, &p, &bp).unwrap();
        assert!((out[(0, 0)].re - (0.68f64 * 0.68 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn stein_m_derivative_constant_p() {
        let m = RoesserModel::scalar(-1.0, 0.0, 0.0, -1.0, Derivative, Derivative);
        let p = PolynomialLyapunov::constant(one_by_one(0.5));
        let bp = BoundaryPoint::finite(Complex::ZERO, 0.0);
        let out = stein_m(&m, &p, &bp).unwrap();
        assert!((out[(0, 0)].re + 2.0).abs() < 1e-12);
    }

    #[test]
    fn stein_m_decoupled_independent_of_delta() {
        let a11 = ComplexMatrix::from_real_rows(&[&[0.3, 0.2], &[-0.1, 0.4]]);
        let m = RoesserModel::new(
            a11.clone(),
            ComplexMatrix::zeros(2, 1),
            ComplexMatrix::from_real_rows(&[&[0.5, 0.5]]),
            one_by_one(0.5),
            Shift,
            Shift,
        )
        .unwrap();
        let p = PolynomialLyapunov::constant(ComplexMatrix::identity(2).scale_re(0.5));
        let expect = a11.conj_transpose().mul(&a11).sub(&ComplexMatrix::identity(2));
        for k in 0..8 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
            let bp = BoundaryPoint::finite(Complex::from_polar(1.0, th), th);
            let out = stein_m(&m, &p, &bp).unwrap();
            assert!(out.sub(&expect).max_abs() < 1e-13);
        }
    }

    #[test]
    fn reduce_single_mixed_monomial_shift() {
        let q11 = ComplexMatrix::from_rows(&[vec![Complex::new(0.3, -0.2)]]);
        let zero = ComplexMatrix::zeros(1, 1);
        let q = BilateralPolynomial {
            coeffs: vec![
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), q11.clone()],
            ],
        };
        let out = reduce_bilateral(&q, Shift);
        assert_eq!(out[0], q11);
        for c in &out[1..] {
            assert_eq!(c.max_abs(), 0.0);
        }
    }

    #[test]
    fn reduce_unbalanced_monomial_shift() {
        let q21 = ComplexMatrix::from_rows(&[vec![Complex::new(-1.0, 0.5)]]);
        let zero = ComplexMatrix::zeros(1, 1);
        // delta^2 * delta'
        let q = BilateralPolynomial {
            coeffs: vec![
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), q21.clone()],
            ],
        };
        let out = reduce_bilateral(&q, Shift);
        assert_eq!(out[1], q21);
        assert_eq!(out[0].max_abs(), 0.0);
    }

    #[test]
    fn reduce_mixed_monomial_derivative() {
        let q11 = ComplexMatrix::from_rows(&[vec![Complex::new(0.7, 0.1)]]);
        let zero = ComplexMatrix::zeros(1, 1);
        let q = BilateralPolynomial {
            coeffs: vec![
                vec![zero.clone(), zero.clone()],
                vec![zero.clone(), q11.clone()],
            ],
        };
        let out = reduce_bilateral(&q, Derivative);
        assert_eq!(out[2], q11.neg());
        assert_eq!(out[0].max_abs(), 0.0);
        assert_eq!(out[1].max_abs(), 0.0);
    }

    #[test]
    fn reduction_preserves_boundary_evaluation() {
        // Seeded pseudo-random coefficients; the identity must hold at
        // machine precision on the respective boundary.
        let mut state = 0x243F6A8885A308D3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for kind in [Shift, Derivative] {
            for _case in 0..20 {
                let coeffs: Vec<Vec<ComplexMatrix>> = (0..3)
                    .map(|_| {
                        (0..3)
                            .map(|_| {
                                ComplexMatrix::from_fn(2, 2, |_, _| Complex::new(next(), next()))
                            })
                            .collect()
                    })
                    .collect();
                let q = BilateralPolynomial { coeffs };
                let reduced = PolynomialLyapunov {
                    coeffs: reduce_bilateral(&q, kind),
                    basis: Basis::Monomial,
                };
                for t in 0..10 {
                    let delta = match kind {
                        Shift => Complex::from_polar(1.0, 0.37 + t as f64),
                        Derivative => Complex::new(0.0, -4.0 + t as f64),
                    };
                    let direct = q.eval(delta).herm_part();
                    let via_reduction =
                        reduced.eval(&ExtendedComplex::Finite(delta)).unwrap();
                    let scale = 1.0 + direct.max_abs();
                    assert!(
                        direct.sub(&via_reduction).max_abs() <= 1e-12 * scale,
                        "kind {kind:?} case {_case} point {t}"
                    );
                }
            }
        }
    }

    #[test]
    fn assemble_scalar_s1_counts_and_feasibility() {
        let m = s1();
        let samples = boundary_samples(Shift, 8, true);
        let asm = assemble_lmi(&m, 0, Basis::Monomial, &samples, 1e-6).unwrap();
        assert_eq!(asm.problem.num_vars, 2);
        assert_eq!(asm.problem.blocks.len(), 1 + 1 + 8 * 2);
        assert!(!asm.skipped_infinity);
        let opts = SolveOptions {
            margin_cap: 1.0,
            stop_margin: Some(0.25),
            ..SolveOptions::default()
        };
        let sol = solve_margin(&asm.problem, &opts);
        assert_eq!(sol.status, SdpStatus::Feasible);
        // The recovered Y and P(delta) are positive definite on the circle.
        let y = asm.layout.y_from_x(&sol.x);
        assert!(y[(0, 0)].re > 0.0);
        let p = asm.layout.p_from_x(&sol.x);
        for bp in &samples {
            let pv = p.eval(&bp.value).unwrap();
            assert!(pv[(0, 0)].re > 0.0);
        }
    }

    #[test]
    fn assemble_scalar_s2_infeasible_across_degrees() {
        let m = RoesserModel::scalar(0.9, 0.5, 0.5, 0.9, Shift, Shift);
        let samples = boundary_samples(Shift, 64, true);
        for nu in 0..3 {
            let asm = assemble_lmi(&m, nu, Basis::Monomial, &samples, 1e-6).unwrap();
            let opts = SolveOptions {
                margin_cap: 1.0,
                stop_margin: Some(0.25),
                ..SolveOptions::default()
            };
            let sol = solve_margin(&asm.problem, &opts);
            assert_eq!(sol.status, SdpStatus::Infeasible, "degree {nu}");
        }
    }

    #[test]
    fn assemble_decoupled_blocks_identical_across_samples() {
        let m = RoesserModel::new(
            one_by_one(0.6),
            ComplexMatrix::zeros(1, 1),
            one_by_one(0.4),
            one_by_one(0.5),
            Shift,
            Shift,
        )
        .unwrap();
        let samples = boundary_samples(Shift, 8, true);
        let asm = assemble_lmi(&m, 0, Basis::Monomial, &samples, 1e-6).unwrap();
        // Stein blocks are every second per-sample block; with zero coupling
        // they must not depend on the sample.
        let stein_blocks: Vec<&AffineBlock> = asm.problem.blocks[2..].iter().skip(1).step_by(2).collect();
        for b in &stein_blocks[1..] {
            assert_eq!(*b, stein_blocks[0]);
        }
    }

    #[test]
    fn assemble_is_affine() {
        let m = s1();
        let samples = boundary_samples(Shift, 8, true);
        let asm = assemble_lmi(&m, 1, Basis::Monomial, &samples, 1e-6).unwrap();
        let n = asm.problem.num_vars;
        let x1: Vec<f64> = (0..n).map(|i| 0.3 + 0.1 * i as f64).collect();
        let x2: Vec<f64> = (0..n).map(|i| -0.2 + 0.05 * (i as f64).sin()).collect();
        let xs: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        for b in &asm.problem.blocks {
            let e1 = b.eval(&x1, 0.0);
            let e2 = b.eval(&x2, 0.0);
            let es = b.eval(&xs, 0.0);
            for i in 0..b.dim {
                for j in 0..b.dim {
                    let lhs = es.get(i, j);
                    let rhs = e1.get(i, j) + e2.get(i, j) - b.f0.get(i, j);
                    assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
                }
            }
        }
    }

    #[test]
    fn zero_padding_extends_feasible_points() {
        let m = s1();
        let samples = boundary_samples(Shift, 16, true);
        let lo = assemble_lmi(&m, 1, Basis::Monomial, &samples, 1e-6).unwrap();
        let hi = assemble_lmi(&m, 2, Basis::Monomial, &samples, 1e-6).unwrap();
        let opts = SolveOptions {
            margin_cap: 1.0,
            stop_margin: Some(0.25),
            ..SolveOptions::default()
        };
        let sol = solve_margin(&lo.problem, &opts);
        assert_eq!(sol.status, SdpStatus::Feasible);
        let mut padded = sol.x.clone();
        padded.resize(hi.problem.num_vars, 0.0);
        assert!(crate::sdp::verify_solution(&hi.problem, &padded, sol.margin));
    }

    #[test]
    fn moebius_requires_derivative() {
        let m = s1();
        let samples = boundary_samples(Shift, 8, true);
        assert!(matches!(
            assemble_lmi(&m, 0, Basis::Moebius, &samples, 1e-6),
            Err(LyapunovError::BasisRegionMismatch)
        ));
    }

    #[test]
    fn monomial_skips_infinity_sample() {
        let m = RoesserModel::scalar(-1.0, 0.5, 0.5, -1.0, Derivative, Derivative);
        let samples = boundary_samples(Derivative, 8, true);
        let asm = assemble_lmi(&m, 1, Basis::Monomial, &samples, 1e-6).unwrap();
        assert!(asm.skipped_infinity);
        assert_eq!(asm.problem.blocks.len(), 2 + 2 * (samples.len() - 1));
        let asm_moebius = assemble_lmi(&m, 1, Basis::Moebius, &samples, 1e-6).unwrap();
        assert!(!asm_moebius.skipped_infinity);
        assert_eq!(asm_moebius.problem.blocks.len(), 2 + 2 * samples.len());
    }

    #[test]
    fn moebius_eval_at_infinity() {
        let p = PolynomialLyapunov {
            coeffs: vec![one_by_one(0.5), one_by_one(0.25)],
            basis: Basis::Moebius,
        };
        let v = p.eval(&ExtendedComplex::Infinity).unwrap();
        // herm(0.5 + 0.25 * 1) = 1.5
        assert!((v[(0, 0)].re - 1.5).abs() < 1e-15);
        let monomial = PolynomialLyapunov {
            coeffs: vec![one_by_one(0.5), one_by_one(0.25)],
            basis: Basis::Monomial,
        };
        assert!(matches!(
            monomial.eval(&ExtendedComplex::Infinity),
            Err(LyapunovError::UnboundedAtInfinity)
        ));
    }
}
