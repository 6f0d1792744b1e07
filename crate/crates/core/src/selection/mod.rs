//! Single reference-set instance selection methods.
//!
//! Every method keeps all minority (positive) instances except random
//! editing, which samples from both classes. Stochastic methods are pure
//! functions of `(points, params, seed)`.

mod cnn;
mod eus;
mod ncl;
mod pso;
mod random_edit;
mod rus;
mod tomek;

pub use cnn::{cnn_mod, oss, tl_cnn};
pub use eus::{eus, eus_fitness, eus_weighted, EusParams};
pub use ncl::ncl;
pub use pso::{pso_fitness, pso_select, PsoParams};
pub use random_edit::{random_edit, ReParams};
pub use rus::{rus, undersample_negatives};
pub use tomek::tomek_links;

pub(crate) use eus::eus_geom;
pub(crate) use rus::rus_weighted;
pub(crate) use tomek::tomek_within;

use crate::data::Class;
use crate::knn::PointSet;

/// Positives plus the negatives switched on in `mask`, which is indexed in
/// the order of `negatives`.
pub(crate) fn retained_from_mask(positives: &[usize], negatives: &[usize], mask: &[bool]) -> Vec<usize> {
    let mut out = positives.to_vec();
    out.extend(negatives.iter().zip(mask).filter(|(_, &on)| on).map(|(&i, _)| i));
    out.sort_unstable();
    out
}

pub(crate) fn split_classes(points: &PointSet) -> (Vec<usize>, Vec<usize>) {
    (points.indices_of(Class::Positive), points.indices_of(Class::Negative))
}

/// Bit density that makes the expected number of selected negatives equal
/// the number of positives, capped at one half.
pub(crate) fn balanced_density(n_pos: usize, n_neg: usize) -> f64 {
    if n_neg == 0 {
        return 0.5;
    }
    (n_pos as f64 / n_neg as f64).min(0.5)
}
