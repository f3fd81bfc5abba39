//! Positive definite kernels on finite groupoids and the reproducing kernel
//! Hilbert spaces they generate.
//!
//! Covers finite groupoids and their unitary representations, kernels built
//! from representations, characters and convolutions, the Hilbert space of a
//! kernel with its orthonormal basis, reconstruction of a representation from
//! an invariant kernel, and kernel distances with small tour solvers.

pub mod applications;
pub mod error;
pub mod groupoid;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod reconstruction;
pub mod representation;
pub mod rkhs;

pub use error::{Error, Result};
pub use groupoid::{Arrow, FiniteGroupoid, GroupTable, Point, RawGroupoid};
pub use kernel::GroupoidKernel;
pub use linalg::{CMatrix, CVector, C64};
pub use representation::{HaarSide, HaarSystem, HilbertFamily, UnitaryRepresentation, VectorField};
pub use rkhs::{RkhsFunction, RkhsModel};
