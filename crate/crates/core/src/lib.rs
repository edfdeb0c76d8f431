//! Fast forward and adjoint vector spherical harmonic transforms for
//! tangent fields on the unit sphere.

mod error;
mod scalar;

pub mod cg;
pub mod diagnostics;
pub mod favest;
pub mod fields;
pub mod legendre;
pub mod quadrature;
pub mod sht;
pub mod types;
pub mod vsh;

pub use error::{Error, Result};
pub use scalar::{CVec3, Real, C};
pub use sht::TensorGrid;
pub use types::*;

pub type SpherePoint64 = SpherePoint<f64>;
pub type ScalarCoefficients64 = ScalarCoefficients<f64>;
pub type VectorCoefficients64 = VectorCoefficients<f64>;
pub type TangentFieldSamples64 = TangentFieldSamples<f64>;
pub type QuadratureRule64 = QuadratureRule<f64>;
pub type TensorGrid64 = TensorGrid<f64>;

pub type SpherePoint32 = SpherePoint<f32>;
pub type ScalarCoefficients32 = ScalarCoefficients<f32>;
pub type VectorCoefficients32 = VectorCoefficients<f32>;
pub type TangentFieldSamples32 = TangentFieldSamples<f32>;
pub type QuadratureRule32 = QuadratureRule<f32>;
pub type TensorGrid32 = TensorGrid<f32>;
