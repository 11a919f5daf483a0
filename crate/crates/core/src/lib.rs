//! Classification and portraits for the cubic Kolmogorov family
//! `y' = y(b0 + b1 y z + b2 y + b3 z)`, `z' = z(c0 + b1 y z + b2 y + b3 z)`.

pub mod compactification;
pub mod error;
pub mod finite;
pub mod global;
pub mod infinite;
pub mod integrator;
pub mod parameter_domain;
pub mod render;
pub mod report;
pub mod scalar;
pub mod sectors;
pub mod skeleton;
pub mod sweep;
pub mod system;
pub mod tracer;

pub use error::Error;
pub use parameter_domain::ParameterPoint;
pub use scalar::{Scalar, Sign};
