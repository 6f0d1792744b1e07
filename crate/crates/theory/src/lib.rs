//! Numerical experiments on how 1-NN reference sets shape asymptotic GM.
//!
//! - [`density`]: piecewise-uniform and Gaussian-mixture class densities.
//! - [`boundary`]: exact GM of a threshold on the line and its maximiser.
//! - [`montecarlo`]: asymptotic GM of a reference set by sampling.
//! - [`voronoi`]: cell-growth checks when a prototype is removed.
//! - [`removal`]: predicted and observed GM change from removing a prototype.
//! - [`exhaustive`]: best reference subset of a small set, per cardinality.
//! - [`bayes`]: Bayes and balanced Bayes against random editing.

pub mod bayes;
pub mod boundary;
pub mod density;
mod error;
pub mod exhaustive;
pub mod montecarlo;
pub mod removal;
pub mod voronoi;

pub use density::{Density, DensityModel, GaussianMixture, PiecewiseUniform1D};
pub use error::{Error, Result};
pub use montecarlo::{asymptotic_gm, GmEstimate, LabeledPointSet};
