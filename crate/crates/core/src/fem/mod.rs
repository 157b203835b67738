//! Finite element back-ends: Dirichlet boundary control of the Poisson
//! equation, Neumann boundary control of the wave equation, and distributed
//! control of viscous Burgers.

use std::sync::Arc;

pub mod burgers;
pub mod mesh;
pub mod poisson;
pub mod wave;

pub use burgers::{BurgersConfig, BurgersProblem};
pub use mesh::UnitSquareMesh;
pub use poisson::{PoissonConfig, PoissonProblem};
pub use wave::{WaveBoundary, WaveConfig, WaveProblem};

/// A scalar field on the plane.
pub type Field2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A time-dependent scalar field `(t, x1, x2)`.
pub type Field2T = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// A scalar field on the line.
pub type Field1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A time-dependent scalar field `(t, x)` on the line.
pub type Field1T = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Number of time steps for horizon `t_final` and nominal step `dt`; the
/// step actually used is `t_final / steps`.
pub fn time_steps(t_final: f64, dt: f64) -> crate::Result<usize> {
    if !(dt > 0.0 && t_final > 0.0) {
        return Err(crate::Error::InvalidArgument(format!(
            "need positive horizon and step, got T = {t_final}, dt = {dt}"
        )));
    }
    Ok(((t_final / dt).round() as usize).max(1))
}
