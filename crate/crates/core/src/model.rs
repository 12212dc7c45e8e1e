//! Roesser models and the stability-region algebra.
//!
//! Each propagation dimension carries one of two canonical regions: the open
//! unit disc for a shift (discrete) dimension, or the open left half-plane
//! for a derivative (continuous) dimension. Both are encoded by a 2x2 real
//! coefficient matrix whose quadratic form `f(lambda)` is negative exactly on
//! the region.

use thiserror::Error;

use crate::linalg::{Complex, ComplexMatrix};

/// The operator attached to a dimension, fixing its stability region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionKind {
    /// Continuous dimension; region is the open left half-plane.
    Derivative,
    /// Discrete dimension; region is the open unit disc.
    Shift,
}

impl DimensionKind {
    pub fn region(self) -> RegionDescriptor {
        match self {
            DimensionKind::Derivative => RegionDescriptor {
                r11: 0.0,
                r10: 1.0,
                r00: 0.0,
                kind: self,
            },
            DimensionKind::Shift => RegionDescriptor {
                r11: 1.0,
                r10: 0.0,
                r00: -1.0,
                kind: self,
            },
        }
    }
}

/// Coefficients of the region form `f(lambda) = r11 |lambda|^2 +
/// 2 r10 Re(lambda) + r00`, restricted to the two canonical regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionDescriptor {
    pub r11: f64,
    pub r10: f64,
    pub r00: f64,
    pub kind: DimensionKind,
}

/// A point of the extended complex plane. Infinity is kept symbolic: IEEE
/// infinities would poison downstream arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtendedComplex::Finite(Complex::new(re, im))
    }

    pub fn as_finite(&self) -> Option<Complex> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn conj(&self) -> Self {
        match self {
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(z.conj()),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        }
    }
}

/// Which of the four derived point sets of a region to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSet {
    /// The open stability region itself (`f < 0`).
    Stable,
    /// Its closed complement (`f >= 0`).
    Complement,
    /// The boundary (`f = 0` for both the form and its swap).
    Boundary,
    /// Reciprocals of the complement (`f_hat >= 0`).
    Diamond,
}

/// The real quadratic form of the region (or of its swapped variant).
///
/// The swap exchanges the `|lambda|^2` and constant coefficients; it is the
/// form whose nonnegativity set is exactly the reciprocal of the complement.
pub fn f_region(r: &RegionDescriptor, lambda: Complex, use_hat: bool) -> f64 {
    let (c2, c0) = if use_hat { (r.r00, r.r11) } else { (r.r11, r.r00) };
    c2 * lambda.abs_sq() + 2.0 * r.r10 * lambda.re + c0
}

/// Membership of `lambda` in one of the region sets, with tolerance `tol`.
///
/// The point at infinity is resolved symbolically: for a shift region it lies
/// in the complement only; for a derivative region it is the common limit of
/// both ends of the imaginary axis, hence on the boundary (and in the
/// complement and diamond sets).
pub fn region_membership(
    r: &RegionDescriptor,
    lambda: &ExtendedComplex,
    which: RegionSet,
    tol: f64,
) -> bool {
    assert!(tol >= 0.0, "tolerance must be nonnegative");
    match lambda {
        ExtendedComplex::Infinity => match (r.kind, which) {
            (DimensionKind::Shift, RegionSet::Complement) => true,
            (DimensionKind::Shift, _) => false,
            (DimensionKind::Derivative, RegionSet::Stable) => false,
            (DimensionKind::Derivative, _) => true,
        },
        ExtendedComplex::Finite(z) => {
            let f = f_region(r, *z, false);
            let f_hat = f_region(r, *z, true);
            match which {
                RegionSet::Stable => f < -tol,
                RegionSet::Complement => f >= -tol,
                RegionSet::Boundary => f.abs() <= tol && f_hat.abs() <= tol,
                RegionSet::Diamond => f_hat >= -tol,
            }
        }
    }
}

/// Default membership tolerance; boundary sampling produces points of unit
/// modulus only up to rounding.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("block A{row}{col} must be {expect_rows}x{expect_cols}, got {got_rows}x{got_cols}")]
    BlockShape {
        row: usize,
        col: usize,
        expect_rows: usize,
        expect_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("block A{row}{col} has a nonzero imaginary entry")]
    ComplexBlock { row: usize, col: usize },
    #[error("state dimension {index} is empty")]
    EmptyDimension { index: usize },
    #[error("model needs at least {min} dimensions, got {got}")]
    TooFewDimensions { min: usize, got: usize },
    #[error("kinds list has {kinds} entries for {dims} dimensions")]
    KindCount { kinds: usize, dims: usize },
}

/// A 2D Roesser model: four real blocks plus the operator kind of each
/// dimension. The recursion advances `x1` along the first dimension and `x2`
/// along the second, both driven by the shared block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RoesserModel {
    a11: ComplexMatrix,
    a12: ComplexMatrix,
    a21: ComplexMatrix,
    a22: ComplexMatrix,
    pub kind1: DimensionKind,
    pub kind2: DimensionKind,
}

impl RoesserModel {
    pub fn new(
        a11: ComplexMatrix,
        a12: ComplexMatrix,
        a21: ComplexMatrix,
        a22: ComplexMatrix,
        kind1: DimensionKind,
        kind2: DimensionKind,
    ) -> Result<Self, ModelError> {
        let k1 = a11.rows();
        let k2 = a22.rows();
        if k1 == 0 {
            return Err(ModelError::EmptyDimension { index: 1 });
        }
        if k2 == 0 {
            return Err(ModelError::EmptyDimension { index: 2 });
        }
        let blocks = [
            (1, 1, &a11, k1, k1),
            (1, 2, &a12, k1, k2),
            (2, 1, &a21, k2, k1),
            (2, 2, &a22, k2, k2),
        ];
        for (row, col, b, er, ec) in blocks {
            if b.rows() != er || b.cols() != ec {
                return Err(ModelError::BlockShape {
                    row,
                    col,
                    expect_rows: er,
                    expect_cols: ec,
                    got_rows: b.rows(),
                    got_cols: b.cols(),
                });
            }
            if !b.is_real() {
                return Err(ModelError::ComplexBlock { row, col });
            }
        }
        Ok(RoesserModel {
            a11,
            a12,
            a21,
            a22,
            kind1,
            kind2,
        })
    }

    /// Convenience constructor for scalar (1+1) models.
    pub fn scalar(a: f64, b: f64, c: f64, d: f64, kind1: DimensionKind, kind2: DimensionKind) -> Self {
        RoesserModel::new(
            ComplexMatrix::from_real_rows(&[&[a]]),
            ComplexMatrix::from_real_rows(&[&[b]]),
            ComplexMatrix::from_real_rows(&[&[c]]),
            ComplexMatrix::from_real_rows(&[&[d]]),
            kind1,
            kind2,
        )
        .expect("scalar blocks always conform")
    }

    pub fn k1(&self) -> usize {
        self.a11.rows()
    }

    pub fn k2(&self) -> usize {
        self.a22.rows()
    }

    pub fn a11(&self) -> &ComplexMatrix {
        &self.a11
    }

    pub fn a12(&self) -> &ComplexMatrix {
        &self.a12
    }

    pub fn a21(&self) -> &ComplexMatrix {
        &self.a21
    }

    pub fn a22(&self) -> &ComplexMatrix {
        &self.a22
    }

    /// Largest entry modulus over all four blocks.
    pub fn max_block_abs(&self) -> f64 {
        self.a11
            .max_abs()
            .max(self.a12.max_abs())
            .max(self.a21.max_abs())
            .max(self.a22.max_abs())
    }
}

/// An nD Roesser model: an `n x n` grid of real blocks and one operator kind
/// per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NdRoesserModel {
    blocks: Vec<Vec<ComplexMatrix>>,
    kinds: Vec<DimensionKind>,
    dims: Vec<usize>,
}

impl NdRoesserModel {
    pub fn new(blocks: Vec<Vec<ComplexMatrix>>, kinds: Vec<DimensionKind>) -> Result<Self, ModelError> {
        let n = blocks.len();
        if n < 2 {
            return Err(ModelError::TooFewDimensions { min: 2, got: n });
        }
        if kinds.len() != n {
            return Err(ModelError::KindCount {
                kinds: kinds.len(),
                dims: n,
            });
        }
        let dims: Vec<usize> = (0..n).map(|i| blocks[i][i].rows()).collect();
        for (i, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(ModelError::EmptyDimension { index: i + 1 });
            }
        }
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != n {
                return Err(ModelError::KindCount {
                    kinds: row.len(),
                    dims: n,
                });
            }
            for (j, b) in row.iter().enumerate() {
                if b.rows() != dims[i] || b.cols() != dims[j] {
                    return Err(ModelError::BlockShape {
                        row: i + 1,
                        col: j + 1,
                        expect_rows: dims[i],
                        expect_cols: dims[j],
                        got_rows: b.rows(),
                        got_cols: b.cols(),
                    });
                }
                if !b.is_real() {
                    return Err(ModelError::ComplexBlock {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        Ok(NdRoesserModel { blocks, kinds, dims })
    }

    pub fn from_2d(m: &RoesserModel) -> Self {
        NdRoesserModel::new(
            vec![
                vec![m.a11().clone(), m.a12().clone()],
                vec![m.a21().clone(), m.a22().clone()],
            ],
            vec![m.kind1, m.kind2],
        )
        .expect("a valid 2D model converts directly")
    }

    /// The 2D view of a two-dimensional model.
    pub fn to_2d(&self) -> Option<RoesserModel> {
        if self.n() != 2 {
            return None;
        }
        RoesserModel::new(
            self.blocks[0][0].clone(),
            self.blocks[0][1].clone(),
            self.blocks[1][0].clone(),
            self.blocks[1][1].clone(),
            self.kinds[0],
            self.kinds[1],
        )
        .ok()
    }

    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn kind(&self, i: usize) -> DimensionKind {
        self.kinds[i]
    }

    pub fn kinds(&self) -> &[DimensionKind] {
        &self.kinds
    }

    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i][j]
    }

    pub fn max_block_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|b| b.max_abs())
            .fold(0.0, f64::max)
    }
}

/// Partition that singles out dimension 1: `a_m` stacks the trailing blocks,
/// `b_m` their coupling into dimension 1, `c_m` the reverse coupling, and
/// `d_m` is the leading block. For `n = 2` this is `(A22, A21, A12, A11)`.
pub fn nd_partition(
    m: &NdRoesserModel,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let n = m.n();
    let tail: usize = (1..n).map(|i| m.dim(i)).sum();
    let k1 = m.dim(0);
    let mut a_m = ComplexMatrix::zeros(tail, tail);
    let mut b_m = ComplexMatrix::zeros(tail, k1);
    let mut c_m = ComplexMatrix::zeros(k1, tail);
    let mut offsets = Vec::with_capacity(n);
    let mut acc = 0;
    for i in 1..n {
        offsets.push(acc);
        acc += m.dim(i);
    }
    for i in 1..n {
        let oi = offsets[i - 1];
        b_m.set_block(oi, 0, m.block(i, 0));
        c_m.set_block(0, oi, m.block(0, i));
        for j in 1..n {
            a_m.set_block(oi, offsets[j - 1], m.block(i, j));
        }
    }
    (a_m, b_m, c_m, m.block(0, 0).clone())
}
