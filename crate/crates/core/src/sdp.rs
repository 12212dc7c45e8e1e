//! Semidefinite margin solver for affine symmetric constraint blocks.
//!
//! Maximizes a common margin `t` subject to `F_b(x) >= t I` for every block
//! `b`, where each block is the affine map `x -> F0 + sum_j x_j F_j` over
//! real symmetric matrices. A log-det barrier interior-point method follows
//! the central path with a fixed reduction schedule, so identical inputs
//! produce bit-identical outputs. Infeasibility is only reported with a
//! certified dual bound; otherwise the status is Indeterminate.

use std::io::Write;

use crate::linalg::{eig_hermitian, Complex, ComplexMatrix};

/// Dense real symmetric matrix, row-major full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity_scaled(n: usize, s: f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square input required");
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = rows[i][j];
            }
        }
        assert!(m.symmetry_residual() <= 1e-12 * (1.0 + m.max_abs()), "input not symmetric");
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(v.is_finite());
        self.data[i * self.n + j] = v;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn add_scaled(&mut self, other: &SymMatrix, c: f64) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    fn matmul(&self, other: &SymMatrixView) -> Vec<f64> {
        dense_matmul(&self.data, other.0, self.n)
    }

    fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.n, self.n, |i, j| Complex::from_real(self.get(i, j)))
    }

    /// Smallest eigenvalue, via the Hermitian eigensolver.
    pub fn min_eig(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let sym = SymMatrix {
            n: self.n,
            data: self.data.clone(),
        }
        .symmetrized();
        eig_hermitian(&sym.to_complex()).expect("symmetrized input")[0]
    }

    fn symmetrized(mut self) -> Self {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let m = 0.5 * (self.get(i, j) + self.get(j, i));
                self.data[i * self.n + j] = m;
                self.data[j * self.n + i] = m;
            }
        }
        self
    }

    /// Lower Cholesky factor, or `None` if not positive definite.
    fn cholesky(&self) -> Option<Vec<f64>> {
        let n = self.n;
        let mut l = vec![0.0f64; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let dj = d.sqrt();
            l[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / dj;
            }
        }
        Some(l)
    }
}

struct SymMatrixView<'a>(&'a [f64]);

fn dense_matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for j in 0..n {
                dst[j] += aik * row[j];
            }
        }
    }
    out
}

fn chol_solve_inplace(l: &[f64], n: usize, x: &mut [f64]) {
    // L y = x, then L^T z = y.
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
}

fn chol_inverse(l: &[f64], n: usize) -> Vec<f64> {
    let mut inv = vec![0.0f64; n * n];
    let mut col = vec![0.0f64; n];
    for j in 0..n {
        col.iter_mut().for_each(|v| *v = 0.0);
        col[j] = 1.0;
        chol_solve_inplace(l, n, &mut col);
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    inv
}

/// Embeds a complex Hermitian matrix as the real symmetric matrix
/// `[[Re, -Im], [Im, Re]]` of doubled size; definiteness is preserved and
/// every eigenvalue appears with doubled multiplicity.
pub fn embed_hermitian(h: &ComplexMatrix) -> SymMatrix {
    assert!(h.is_square());
    let k = h.rows();
    let mut out = SymMatrix::zeros(2 * k);
    for i in 0..k {
        for j in 0..k {
            // Symmetrize the Hermitian input exactly before embedding.
            let z = (h[(i, j)] + h[(j, i)].conj()).scale(0.5);
            out.set(i, j, z.re);
            out.set(k + i, k + j, z.re);
            out.set(i, k + j, -z.im);
            out.set(k + i, j, z.im);
        }
    }
    out
}

/// One affine constraint block `F0 + sum_j x_j F_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineBlock {
    pub dim: usize,
    pub f0: SymMatrix,
    /// Sparse list of `(variable index, coefficient matrix)` pairs.
    pub terms: Vec<(usize, SymMatrix)>,
}

impl AffineBlock {
    pub fn eval(&self, x: &[f64], t: f64) -> SymMatrix {
        let mut g = self.f0.clone();
        for (j, fj) in &self.terms {
            g.add_scaled(fj, x[*j]);
        }
        for i in 0..self.dim {
            let v = g.get(i, i) - t;
            g.data[i * self.dim + i] = v;
        }
        g
    }
}

/// An affine semidefinite feasibility problem in margin form.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiProblem {
    pub num_vars: usize,
    pub blocks: Vec<AffineBlock>,
    pub var_names: Vec<String>,
}

impl LmiProblem {
    pub fn new(num_vars: usize, blocks: Vec<AffineBlock>, var_names: Vec<String>) -> Self {
        assert!(num_vars >= 1, "at least one decision variable required");
        assert!(!blocks.is_empty(), "at least one block required");
        assert_eq!(var_names.len(), num_vars);
        for b in &blocks {
            assert_eq!(b.f0.dim(), b.dim);
            assert!(b.f0.symmetry_residual() <= 1e-12 * (1.0 + b.f0.max_abs()));
            for (j, fj) in &b.terms {
                assert!(*j < num_vars, "term references unknown variable");
                assert_eq!(fj.dim(), b.dim);
                assert!(fj.symmetry_residual() <= 1e-12 * (1.0 + fj.max_abs()));
            }
        }
        LmiProblem {
            num_vars,
            blocks,
            var_names,
        }
    }

    /// Writes the problem in a sparse text format for external cross-checks:
    /// one `block var row col value` entry per line, where `var` 0 denotes
    /// the constant matrix and `var` `j >= 1` the coefficient of `x_j`.
    /// Only the lower triangle of each symmetric matrix is emitted.
    pub fn write_sparse<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "# margin-form LMI problem: maximize t s.t. F_b(x) - t I >= 0")?;
        writeln!(w, "# vars {}", self.num_vars)?;
        for (j, name) in self.var_names.iter().enumerate() {
            writeln!(w, "# var {} {}", j + 1, name)?;
        }
        writeln!(w, "# blocks {}", self.blocks.len())?;
        for (bi, b) in self.blocks.iter().enumerate() {
            writeln!(w, "# block {} dim {}", bi, b.dim)?;
            for i in 0..b.dim {
                for jcol in 0..=i {
                    let v = b.f0.get(i, jcol);
                    if v != 0.0 {
                        writeln!(w, "{} 0 {} {} {:?}", bi, i, jcol, v)?;
                    }
                }
            }
            for (var, fj) in &b.terms {
                for i in 0..b.dim {
                    for jcol in 0..=i {
                        let v = fj.get(i, jcol);
                        if v != 0.0 {
                            writeln!(w, "{} {} {} {} {:?}", bi, var + 1, i, jcol, v)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Feasible,
    Infeasible,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<f64>,
    /// Best verified margin found (the `t` of the returned `x`).
    pub margin: f64,
    pub iterations: usize,
    /// Certified upper bound on the optimal margin, when centering reached
    /// the accuracy needed to trust the duality gap.
    pub upper_bound: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Margins above this are Feasible; certified bounds below its negation
    /// are Infeasible.
    pub feas_tol: f64,
    /// Multiplicative path-parameter reduction per outer iteration.
    pub path_shrink: f64,
    /// Total Newton iteration cap.
    pub max_newton: usize,
    /// Hard upper bound on the margin; finite caps make homogeneous
    /// feasibility problems bounded without extra blocks.
    pub margin_cap: f64,
    /// Box bound `|x_j| <= var_bound` baked into the barrier. Affine
    /// feasibility problems that are homogeneous in `x` have unbounded
    /// centering problems otherwise; the bound is generous enough never to
    /// bind on well-scaled inputs.
    pub var_bound: f64,
    /// Optional early exit: stop as soon as a verified margin exceeds this.
    /// Feasibility-only callers set it; the default runs the path to full
    /// precision so the returned margin is the optimum.
    pub stop_margin: Option<f64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feas_tol: 1e-8,
            path_shrink: 0.2,
            max_newton: 500,
            margin_cap: f64::INFINITY,
            var_bound: 1e8,
            stop_margin: None,
        }
    }
}

struct Workspace {
    /// Gradient and Newton step over z = (x_0 .. x_{p-1}, t).
    grad: Vec<f64>,
    hess: Vec<f64>,
    step: Vec<f64>,
}

/// Total barrier degree: block dimensions, the variable box, and the cap.
fn barrier_degree(p: &LmiProblem, opts: &SolveOptions) -> f64 {
    let blocks: usize = p.blocks.iter().map(|b| b.dim).sum();
    blocks as f64
        + 2.0 * p.num_vars as f64
        + if opts.margin_cap.is_finite() { 1.0 } else { 0.0 }
}

fn is_interior(p: &LmiProblem, x: &[f64], t: f64, cap: f64, bound: f64) -> bool {
    if cap.is_finite() && t >= cap {
        return false;
    }
    if x.iter().any(|v| v.abs() >= bound) {
        return false;
    }
    p.blocks.iter().all(|b| b.eval(x, t).cholesky().is_some())
}

fn barrier_value(p: &LmiProblem, x: &[f64], t: f64, cap: f64, bound: f64) -> Option<f64> {
    let mut phi = 0.0;
    for b in &p.blocks {
        let l = b.eval(x, t).cholesky()?;
        let n = b.dim;
        for i in 0..n {
            phi -= 2.0 * l[i * n + i].ln();
        }
    }
    for v in x {
        let lo = bound + v;
        let hi = bound - v;
        if lo <= 0.0 || hi <= 0.0 {
            return None;
        }
        phi -= lo.ln() + hi.ln();
    }
    if cap.is_finite() {
        if t >= cap {
            return None;
        }
        phi -= (cap - t).ln();
    }
    Some(phi)
}

/// Maximizes the margin over all blocks.
///
/// The returned `x` is re-validated with an independent Cholesky check on
/// every block before Feasible is reported. Numerical breakdown degrades to
/// Indeterminate, never to a guessed verdict.
pub fn solve_margin(p: &LmiProblem, opts: &SolveOptions) -> SdpSolution {
    assert!(p.num_vars >= 1 && !p.blocks.is_empty());
    let nv = p.num_vars;
    let nz = nv + 1; // decision vector plus the margin
    let cap = opts.margin_cap;
    let bound = opts.var_bound;
    assert!(bound > 0.0 && bound.is_finite());

    // Strictly interior start: x = 0, t below the least eigenvalue of F(0).
    let mut x = vec![0.0f64; nv];
    let mut min_eig = f64::INFINITY;
    for b in &p.blocks {
        min_eig = min_eig.min(b.eval(&x, 0.0).min_eig());
    }
    let mut t = min_eig - 1.0 - 0.01 * min_eig.abs();
    if cap.is_finite() {
        t = t.min(cap - 1.0 - 0.01 * cap.abs());
    }
    debug_assert!(is_interior(p, &x, t, cap, bound));

    let theta = barrier_degree(p, opts);
    let mut mu = (1.0f64).max(t.abs());
    let mut ws = Workspace {
        grad: vec![0.0; nz],
        hess: vec![0.0; nz * nz],
        step: vec![0.0; nz],
    };
    let mut total_newton = 0usize;
    let mut upper_bound: Option<f64> = None;
    let mut note = None;
    let mu_floor = 1e-13 * (1.0f64).max(t.abs());

    'outer: loop {
        let rho = 1.0 / mu;
        // Center on the current path point with damped Newton.
        let mut centered = false;
        for _inner in 0..60 {
            if total_newton >= opts.max_newton {
                break 'outer;
            }
            total_newton += 1;
            if !assemble_newton(p, &x, t, rho, cap, bound, &mut ws) {
                note = Some("numerical breakdown while assembling the Newton system".to_string());
                break 'outer;
            }
            if !solve_newton(&mut ws, nz) {
                note = Some("numerical breakdown in the Newton solve".to_string());
                break 'outer;
            }
            let decrement_sq: f64 = ws
                .step
                .iter()
                .zip(ws.grad.iter())
                .map(|(s, g)| -s * g)
                .sum();
            if !decrement_sq.is_finite() {
                note = Some("non-finite Newton decrement".to_string());
                break 'outer;
            }
            if decrement_sq <= 1e-10 * (1.0 + t.abs()) {
                centered = true;
                break;
            }
            // Backtracking line search: stay interior and decrease the
            // centering objective.
            let h0 = match barrier_value(p, &x, t, cap, bound) {
                Some(v) => -rho * t + v,
                None => {
                    note = Some("iterate left the interior".to_string());
                    break 'outer;
                }
            };
            let gdot: f64 = ws.step.iter().zip(ws.grad.iter()).map(|(s, g)| s * g).sum();
            let mut alpha = 1.0f64;
            let mut moved = false;
            while alpha > 1e-14 {
                let xt: Vec<f64> = x
                    .iter()
                    .zip(ws.step[..nv].iter())
                    .map(|(xi, si)| xi + alpha * si)
                    .collect();
                let tt = t + alpha * ws.step[nv];
                if is_interior(p, &xt, tt, cap, bound) {
                    let ht = -rho * tt + barrier_value(p, &xt, tt, cap, bound).unwrap();
                    if ht <= h0 + 0.25 * alpha * gdot {
                        x = xt;
                        t = tt;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved {
                // Stalled: treat the current point as centered enough and
                // let the outer classification decide.
                centered = decrement_sq <= 1e-4 * (1.0 + t.abs());
                break;
            }
        }

        if centered {
            // Central-path duality gap, with a small safety factor for the
            // residual decrement.
            let bound = t + 1.1 * mu * theta;
            upper_bound = Some(match upper_bound {
                Some(b) => bound.min(b),
                None => bound,
            });
            // In feasibility-only mode, return as soon as either side of the
            // question is settled; the default schedule runs the path down
            // so the reported margin is the optimum.
            if let Some(sm) = opts.stop_margin {
                if let Some(ub) = upper_bound {
                    if ub < -opts.feas_tol {
                        return finish(p, x, t, total_newton, upper_bound, SdpStatus::Infeasible, note);
                    }
                }
                if t > sm.max(opts.feas_tol) && verify_solution(p, &x, t) {
                    break 'outer;
                }
            }
        }
        mu *= opts.path_shrink;
        if mu < mu_floor || total_newton >= opts.max_newton {
            break 'outer;
        }
    }

    let status = if t > opts.feas_tol {
        SdpStatus::Feasible
    } else if upper_bound.map_or(false, |ub| ub < -opts.feas_tol) {
        SdpStatus::Infeasible
    } else {
        SdpStatus::Indeterminate
    };
    finish(p, x, t, total_newton, upper_bound, status, note)
}

fn finish(
    p: &LmiProblem,
    x: Vec<f64>,
    t: f64,
    iterations: usize,
    upper_bound: Option<f64>,
    status: SdpStatus,
    note: Option<String>,
) -> SdpSolution {
    let status = if status == SdpStatus::Feasible && !verify_solution(p, &x, t) {
        SdpStatus::Indeterminate
    } else {
        status
    };
    SdpSolution {
        status,
        x,
        margin: t,
        iterations,
        upper_bound,
        note,
    }
}

fn assemble_newton(
    p: &LmiProblem,
    x: &[f64],
    t: f64,
    rho: f64,
    cap: f64,
    bound: f64,
    ws: &mut Workspace,
) -> bool {
    let nv = p.num_vars;
    let nz = nv + 1;
    ws.grad.iter_mut().for_each(|v| *v = 0.0);
    ws.hess.iter_mut().for_each(|v| *v = 0.0);
    ws.grad[nv] = -rho; // objective -rho * t

    for b in &p.blocks {
        let m = b.dim;
        let g = b.eval(x, t);
        let l = match g.cholesky() {
            Some(l) => l,
            None => return false,
        };
        let ginv = chol_inverse(&l, m);
        // S_j = G^{-1} F_j for the block's variables; S_t = -G^{-1}.
        let mut local: Vec<(usize, Vec<f64>)> = Vec::with_capacity(b.terms.len() + 1);
        for (j, fj) in &b.terms {
            local.push((*j, SymMatrix { n: m, data: ginv.clone() }.matmul(&SymMatrixView(&fj.data))));
        }
        let s_t: Vec<f64> = ginv.iter().map(|v| -v).collect();
        local.push((nv, s_t));
        for (j, sj) in &local {
            let tr: f64 = (0..m).map(|i| sj[i * m + i]).sum();
            ws.grad[*j] -= tr;
        }
        for a in 0..local.len() {
            let (ja, sa) = &local[a];
            for bidx in a..local.len() {
                let (jb, sb) = &local[bidx];
                let mut tr = 0.0;
                for i in 0..m {
                    for k in 0..m {
                        tr += sa[i * m + k] * sb[k * m + i];
                    }
                }
                ws.hess[ja * nz + jb] += tr;
                if ja != jb {
                    ws.hess[jb * nz + ja] += tr;
                }
            }
        }
    }
    for (j, v) in x.iter().enumerate() {
        let lo = bound + v;
        let hi = bound - v;
        if lo <= 0.0 || hi <= 0.0 {
            return false;
        }
        ws.grad[j] += 1.0 / hi - 1.0 / lo;
        ws.hess[j * nz + j] += 1.0 / (hi * hi) + 1.0 / (lo * lo);
    }
    if cap.is_finite() {
        let gap = cap - t;
        if gap <= 0.0 {
            return false;
        }
        ws.grad[nv] += 1.0 / gap;
        ws.hess[nv * nz + nv] += 1.0 / (gap * gap);
    }
    ws.grad.iter().all(|v| v.is_finite()) && ws.hess.iter().all(|v| v.is_finite())
}

fn solve_newton(ws: &mut Workspace, nz: usize) -> bool {
    let trace: f64 = (0..nz).map(|i| ws.hess[i * nz + i]).sum();
    let base = 1e-12 * (1.0 + trace / nz as f64);
    let mut ridge = 0.0f64;
    for _ in 0..8 {
        let mut h = SymMatrix::zeros(nz);
        for i in 0..nz {
            for j in 0..nz {
                h.data[i * nz + j] = ws.hess[i * nz + j];
            }
            h.data[i * nz + i] += ridge;
        }
        if let Some(l) = h.cholesky() {
            for i in 0..nz {
                ws.step[i] = -ws.grad[i];
            }
            chol_solve_inplace(&l, nz, &mut ws.step);
            return ws.step.iter().all(|v| v.is_finite());
        }
        ridge = if ridge == 0.0 { base } else { ridge * 100.0 };
    }
    false
}

/// Independent check that every block satisfies `F_b(x) - (t - slack) I > 0`,
/// with a relative `1e-12`-scale slack. Does not reuse any solver state.
pub fn verify_solution(p: &LmiProblem, x: &[f64], t: f64) -> bool {
    assert_eq!(x.len(), p.num_vars);
    let slack = 1e-12 * (1.0 + t.abs());
    p.blocks
        .iter()
        .all(|b| b.eval(x, t - slack).cholesky().is_some())
}
