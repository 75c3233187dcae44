//! Gradient-recovery C0 linear finite elements for the sixth-order
//! (triharmonic) Dirichlet problem −Δ³u = f.
//!
//! The discretization keeps the trial space piecewise linear and reaches the
//! sixth-order operator through a gradient recovery operator `G`: the bilinear
//! form integrates `D(G²u) : D(G²v)`, where `G²` is the recovered Hessian
//! obtained by composing `G` with itself. Essential boundary conditions
//! (value, recovered normal and tangential gradient, recovered normal-normal
//! Hessian) are imposed as linear constraints and solved in saddle-point form.
//!
//! Modules follow the pipeline:
//!
//! * [`mesh`]: triangulations, the four uniform square patterns, L-shape and
//!   disk generators, red refinement, boundary frames.
//! * [`sparse`]: CSR matrices, products, AMD ordering, sparse LU, and the
//!   constrained saddle solver.
//! * [`quad`]: symmetric triangle quadrature rules.
//! * [`fem`]: P1 element calculus, stiffness/load assembly, error norms.
//! * [`recovery`]: the three recovery operators (weighted averaging,
//!   superconvergent patch recovery, polynomial preserving recovery) and the
//!   recovered-Hessian composition.
//! * [`solver`]: system assembly, boundary constraints, end-to-end solves.
//! * [`study`]: manufactured examples and convergence-study reports.
//!
//! The crate is `no_std` (with `alloc`); file I/O and the command line live in
//! the companion `triharm-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod fem;
pub mod mesh;
pub mod quad;
pub mod recovery;
pub mod solver;
pub mod sparse;
pub mod study;

mod math;

pub use fem::ProblemSpec;
pub use mesh::{Mesh, MeshPattern};
pub use recovery::{RecoveryMethod, RecoveryOperator};
pub use sparse::SparseMatrix;
pub use study::{ConvergenceReport, Example};

/// Errors surfaced by mesh construction, assembly, and solves.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Precondition violation on a public operation (bad argument).
    InvalidArgument(alloc::string::String),
    /// Mesh topology or geometry failed validation.
    BadMesh(alloc::string::String),
    /// A least-squares patch stayed rank deficient after maximal enlargement.
    DegeneratePatch { vertex: usize, cond: f64 },
    /// Constraint rows with identical coefficients but conflicting data.
    InconsistentConstraints { vertex: usize },
    /// The factorization hit a zero pivot.
    SingularSystem { dropped_rows: alloc::vec::Vec<usize> },
    /// The solve finished but the residual exceeded the tolerance.
    ResidualTooLarge { achieved: f64, tolerance: f64 },
    /// Missing exact-solution callbacks for an operation that needs them.
    MissingExact,
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::BadMesh(msg) => write!(f, "bad mesh: {msg}"),
            Error::DegeneratePatch { vertex, cond } => {
                write!(f, "patch at vertex {vertex} rank deficient (cond {cond:.2e})")
            }
            Error::InconsistentConstraints { vertex } => {
                write!(f, "conflicting constraint data at boundary vertex {vertex}")
            }
            Error::SingularSystem { dropped_rows } => {
                write!(f, "singular system ({} dependent constraint rows dropped)", dropped_rows.len())
            }
            Error::ResidualTooLarge { achieved, tolerance } => {
                write!(f, "solver residual {achieved:.2e} above tolerance {tolerance:.2e}")
            }
            Error::MissingExact => write!(f, "exact-solution callbacks required but absent"),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
