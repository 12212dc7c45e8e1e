use std::fmt;
use std::ops::{Index, IndexMut};

use super::scalar::Complex;

/// Dense rectangular complex matrix, row-major.
///
/// Constructors reject non-finite entries: NaN or infinity in a matrix is
/// always an upstream bug, never meaningful data in this crate.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::ONE;
        }
        m
    }

    /// `s * I`.
    pub fn scaled_identity(n: usize, s: Complex) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(v);
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex>]) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ComplexMatrix::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        assert!(r > 0, "matrix needs at least one row");
        let c = rows[0].len();
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ComplexMatrix::from_fn(r, c, |i, j| Complex::from_real(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
        self[(i, j)] = v;
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).fold(Complex::ZERO, |acc, i| acc + self[(i, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `X + X^*`; the Hermitian symmetrization used by the polynomial ansatz.
    pub fn herm_part(&self) -> Self {
        assert!(self.is_square(), "herm_part of a non-square matrix");
        ComplexMatrix::from_fn(self.rows, self.rows, |i, j| {
            self[(i, j)] + self[(j, i)].conj()
        })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn neg(&self) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)])
    }

    pub fn scale(&self, s: Complex) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(s))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Hermitian within `1e-12 * (1 + max_abs)`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_residual() <= 1e-12 * (1.0 + self.max_abs())
    }

    /// `max |X - X^*|` over all entries.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols.min(self.rows) {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).abs());
            }
        }
        worst
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Copies `block` into `self` with its top-left corner at `(i0, j0)`.
    pub fn set_block(&mut self, i0: usize, j0: usize, block: &Self) {
        assert!(i0 + block.rows <= self.rows && j0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(i0 + i, j0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, i0: usize, j0: usize, rows: usize, cols: usize) -> Self {
        assert!(i0 + rows <= self.rows && j0 + cols <= self.cols);
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(i0 + i, j0 + j)])
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}  ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conj_transpose_scalar_i() {
        let x = ComplexMatrix::from_rows(&[vec![Complex::I]]);
        let xt = x.conj_transpose();
        assert_eq!(xt[(0, 0)], Complex::new(0.0, -1.0));
    }

    #[test]
    fn conj_transpose_fixes_real_symmetric() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -3.0]]);
        assert_eq!(x.conj_transpose(), x);
    }

    #[test]
    fn conj_transpose_involution() {
        let x = ComplexMatrix::from_fn(3, 4, |i, j| {
            Complex::new((i * 7 + j) as f64 * 0.3 - 1.0, (j * 3 + i) as f64 * 0.1 - 0.4)
        });
        assert_eq!(x.conj_transpose().conj_transpose(), x);
    }

    #[test]
    fn herm_part_scalar() {
        let x = ComplexMatrix::from_rows(&[vec![Complex::new(1.0, 1.0)]]);
        let h = x.herm_part();
        assert_eq!(h[(0, 0)], Complex::new(2.0, 0.0));
    }

    #[test]
    fn herm_part_doubles_hermitian() {
        let h = ComplexMatrix::from_rows(&[
            vec![Complex::from_real(2.0), Complex::new(1.0, 3.0)],
            vec![Complex::new(1.0, -3.0), Complex::from_real(-1.0)],
        ]);
        assert_eq!(h.herm_part(), h.scale_re(2.0));
    }

    #[test]
    fn herm_part_nilpotent() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let h = x.herm_part();
        assert_eq!(h, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));
    }

    #[test]
    fn herm_part_is_its_own_conj_transpose() {
        let x = ComplexMatrix::from_fn(4, 4, |i, j| {
            Complex::new((i as f64 - 1.3) * (j as f64 + 0.7), (i * j) as f64 * 0.11 - 0.5)
        });
        let h = x.herm_part();
        assert_eq!(h.conj_transpose(), h);
    }

    #[test]
    #[should_panic(expected = "non-square")]
    fn herm_part_rejects_rectangular() {
        ComplexMatrix::zeros(2, 3).herm_part();
    }

    #[test]
    #[should_panic(expected = "non-finite")]
    fn constructors_reject_nan() {
        ComplexMatrix::from_fn(1, 1, |_, _| Complex::new(f64::NAN, 0.0));
    }
}
