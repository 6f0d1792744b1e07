//! Sampling-based checks of how Voronoi cells change when one prototype is
//! removed: every other cell can only grow, and the cells bordering the
//! removed one absorb its region.

use std::collections::BTreeSet;

use gmselect_core::seed::{self, member_seed, Rng};
use rand::Rng as _;

use crate::montecarlo::nearest_in;
use crate::{Error, Result};

/// Probe box: the bounding box of `points` grown by half its extent
/// (a quarter on each side); flat dimensions get a unit margin.
pub fn probe_box(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let dim = points[0].len();
    (0..dim)
        .map(|k| {
            let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            let margin = if hi > lo { 0.25 * (hi - lo) } else { 1.0 };
            (lo - margin, hi + margin)
        })
        .collect()
}

fn probe(bounds: &[(f64, f64)], rng: &mut Rng) -> Vec<f64> {
    bounds.iter().map(|&(lo, hi)| lo + rng.random::<f64>() * (hi - lo)).collect()
}

fn check_points(points: &[Vec<f64>], i: usize) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    if i >= points.len() {
        return Err(Error::InvalidArgument(format!("index {i} out of range for {} points", points.len())));
    }
    if points.iter().any(|p| p.len() != points[0].len() || p.is_empty()) {
        return Err(Error::InvalidArgument("points must share a positive dimension".into()));
    }
    Ok(())
}

/// Cells sharing a facet with cell `i`: the second-nearest point of every
/// probe that lands in cell `i`. This can miss neighbours whose shared
/// facet is small relative to `probe_count`, but never reports a false one.
pub fn voronoi_neighbors(points: &[Vec<f64>], i: usize, probe_count: usize, seed: u64) -> Result<BTreeSet<usize>> {
    check_points(points, i)?;
    let bounds = probe_box(points);
    let mut rng = seed::rng(seed);
    let mut out = BTreeSet::new();
    for _ in 0..probe_count {
        let x = probe(&bounds, &mut rng);
        if nearest_in(points, &x, None) == Some(i) {
            if let Some(j) = nearest_in(points, &x, Some(i)) {
                out.insert(j);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub probes: usize,
    /// Probes that fell in the removed point's cell.
    pub old_cell_probes: usize,
    /// Probes outside the removed cell whose nearest point changed. Always 0.
    pub inclusion_violations: usize,
    /// Facet neighbours of the removed cell, detected on a separate stream.
    pub neighbours: Vec<usize>,
    /// Old-cell probes captured by each entry of `neighbours`.
    pub captured: Vec<usize>,
    /// Detected neighbours that captured none of the old-cell probes; these
    /// point to too few probes rather than a failure of the geometry.
    pub expansion_failures: usize,
}

/// Removes point `i` and checks, over `probe_count` uniform probes, that no
/// other cell loses ground and that every neighbouring cell gains some.
pub fn lemma_check(points: &[Vec<f64>], i: usize, probe_count: usize, seed: u64) -> Result<LemmaReport> {
    check_points(points, i)?;
    let neighbours: Vec<usize> = voronoi_neighbors(points, i, probe_count, member_seed(seed, 2))?.into_iter().collect();
    let bounds = probe_box(points);
    let mut rng = seed::rng(member_seed(seed, 1));
    let mut captured = vec![0; neighbours.len()];
    let (mut old_cell, mut violations) = (0, 0);
    for _ in 0..probe_count {
        let x = probe(&bounds, &mut rng);
        let before = nearest_in(points, &x, None);
        let after = nearest_in(points, &x, Some(i));
        if before == Some(i) {
            old_cell += 1;
            if let Some(k) = after.and_then(|a| neighbours.iter().position(|&n| n == a)) {
                captured[k] += 1;
            }
        } else if before != after {
            violations += 1;
        }
    }
    let expansion_failures = captured.iter().filter(|&&c| c == 0).count();
    Ok(LemmaReport {
        probes: probe_count,
        old_cell_probes: old_cell,
        inclusion_violations: violations,
        neighbours,
        captured,
        expansion_failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaStudy {
    pub configurations: usize,
    pub probes: usize,
    pub inclusion_violations: usize,
    pub expansion_failures: usize,
}

/// Runs [`lemma_check`] on `configurations` random point sets of 5 to 30
/// points in 1 to 4 dimensions, removing a random point from each.
pub fn lemma_study(configurations: usize, probe_count: usize, seed: u64) -> Result<LemmaStudy> {
    let mut out = LemmaStudy { configurations, probes: 0, inclusion_violations: 0, expansion_failures: 0 };
    for c in 0..configurations {
        let mut rng = seed::rng(member_seed(seed, c));
        let n = rng.random_range(5..=30);
        let dim = rng.random_range(1..=4);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
        let i = rng.random_range(0..n);
        let r = lemma_check(&points, i, probe_count, rng.random())?;
        out.probes += r.probes;
        out.inclusion_violations += r.inclusion_violations;
        out.expansion_failures += r.expansion_failures;
    }
    Ok(out)
}
