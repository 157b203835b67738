//! Barzilai-Borwein gradient methods over weighted inner-product spaces.
//!
//! The crate provides the BB1/BB2/alternating gradient iteration
//! ([`solver`]), synthetic quadratics with prescribed spectra
//! ([`spectral`]), three PDE-constrained optimal control back-ends
//! ([`fem`]), and an experiment harness that builds iteration-count tables
//! and mesh-independence reports ([`harness`]).

pub mod error;
pub mod fem;
pub mod harness;
pub mod linalg;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{DenseVector, WeightedSpace};

pub use solver::{BBConfig, BBTrace, GradientProblem, InitScheme, StepRule};
