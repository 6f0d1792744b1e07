//! Nearest-neighbour instance selection for imbalanced two-class data.
//!
//! The crate is organised bottom-up:
//!
//! - [`data`]: KEEL/CSV ingestion, min-max scaling and 5x2 stratified fold plans.
//! - [`knn`]: point sets, the mixed numeric/nominal distance, 1-NN and k-NN
//!   classification and the leave-one-out GM fitness used by the optimisers.
//! - [`metrics`]: confusion counts, GM and friends, win counting and the sign test.
//! - [`selection`]: single reference-set methods (RUS, TL, CNN, OSS, TL+CNN, NCL,
//!   EUS, PSO and random editing).
//! - [`ensemble`]: bagging, ERUS, RUSBoost and EUSBoost over 1-NN members.
//!
//! Everything stochastic takes an explicit `u64` seed and is reproducible.

pub mod data;
pub mod ensemble;
mod error;
pub mod knn;
pub mod metrics;
pub mod seed;
pub mod selection;

pub use data::{Attribute, AttributeKind, Class, Dataset, FoldPlan, Instance, Scaler};
pub use ensemble::EnsembleModel;
pub use error::{Error, Result};
pub use knn::{NearestNeighbor, PointSet, ReferenceSet};
pub use metrics::ConfusionCounts;
