// `!(x > 0.0)` is used on purpose: it also rejects NaN. Quadrature nodes are
// kept at their published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod limit;
pub mod numerics;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{
    ball_volume, intersection_volume, intersection_volume_asymptote, intersection_volume_bound,
    lambda_geometry, rho, rho_bounds, DimensionConstants, Extended, LambdaGeometry, ModelConfig,
    RhoBounds,
};
