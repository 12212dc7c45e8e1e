//! Structural stability certification for 2D and nD Roesser models.
//!
//! A Roesser model splits its state into sub-vectors, each propagating along
//! its own direction (discrete shift or continuous derivative). Structural
//! stability reduces to two conditions: region-stability of the second
//! diagonal block, and region-stability of the boundary transfer matrix
//! `M(delta) = A11 + A12 (I - delta A22)^{-1} delta A21` for every `delta`
//! on the boundary of the second stability region.
//!
//! Two independent decision paths are provided:
//!
//! * [`oracle`]: a dense boundary sweep that checks the spectrum of
//!   `M(delta)` sample by sample (a semi-decision at grid resolution);
//! * [`certify`]: a degree hierarchy of parameter-dependent Stein/Lyapunov
//!   inequalities with a polynomial Hermitian ansatz `P(delta)`, solved by
//!   the embedded semidefinite margin solver in [`sdp`] and re-verified by
//!   fine boundary and interior sweeps.
//!
//! All dense complex linear algebra is self-contained in [`linalg`] so that
//! results are reproducible bit for bit across runs.

pub mod certify;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod oracle;
pub mod sdp;
pub mod sim;
pub mod transfer;

pub use linalg::{Complex, ComplexMatrix};
pub use model::{DimensionKind, ExtendedComplex, NdRoesserModel, RegionDescriptor, RoesserModel};
