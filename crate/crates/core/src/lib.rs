//! L1 time discretization of time-fractional diffusion equations
//! `D^α y - A y = f` on a 1-D Galerkin space, with forward and backward
//! solvers, discrete and continuous contour kernels, spectral reference
//! solutions, and a box-constrained Tikhonov inverse source solver.

pub mod banded;
pub mod error;
pub mod evolve;
pub mod fem1d;
pub mod inverse;
pub mod l1_core;
pub mod oracle;
pub mod par;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use evolve::{ContourSpec, SourceSpec, SpaceTimeField};
pub use fem1d::{AssembledSystem, OperatorCoefficients, Profile, SpaceMesh1D, SpectralData};
pub use inverse::{InverseProblem, InverseSolution};
pub use l1_core::{make_weights, L1Weights, Symbol, SymbolReport, TimeGrid};
pub use par::Execution;
