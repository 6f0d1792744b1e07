//! Exact GM of a single threshold classifier on the line ("positive left of
//! `b`") when both class densities are piecewise uniform.
//!
//! Between consecutive breakpoints TPR and TNR are linear in `b`, so GM² is a
//! concave quadratic there and its maximiser is the midpoint of the two roots.

use crate::density::{Density, DensityModel, PiecewiseUniform1D, Segment};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub b: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub gm: f64,
}

fn piecewise(model: &DensityModel) -> Result<(&PiecewiseUniform1D, &PiecewiseUniform1D)> {
    match (&model.positive, &model.negative) {
        (Density::Piecewise(p), Density::Piecewise(n)) => Ok((p, n)),
        _ => Err(Error::InvalidArgument("boundary analysis needs piecewise-uniform 1D densities".into())),
    }
}

fn evaluate(pos: &PiecewiseUniform1D, neg: &PiecewiseUniform1D, b: f64) -> BoundaryPoint {
    let tpr = pos.cdf(b);
    let tnr = neg.survival(b);
    BoundaryPoint { b, tpr, tnr, gm: (tpr * tnr).sqrt() }
}

/// TPR, TNR and GM of the classifier that labels `x < b` positive.
pub fn gm_boundary_1d(model: &DensityModel, b: f64) -> Result<BoundaryPoint> {
    let (pos, neg) = piecewise(model)?;
    Ok(evaluate(pos, neg, b))
}

/// GM sampled at `steps + 1` evenly spaced boundaries in `[from, to]`.
pub fn gm_curve(model: &DensityModel, from: f64, to: f64, steps: usize) -> Result<Vec<BoundaryPoint>> {
    let (pos, neg) = piecewise(model)?;
    let steps = steps.max(1);
    Ok((0..=steps).map(|k| evaluate(pos, neg, from + (to - from) * k as f64 / steps as f64)).collect())
}

pub fn curve_csv(curve: &[BoundaryPoint]) -> String {
    let mut out = String::from("b,tpr,tnr,gm\n");
    for p in curve {
        out.push_str(&format!("{},{},{},{}\n", p.b, p.tpr, p.tnr, p.gm));
    }
    out
}

/// The active segment over `[x0, x1]`, if any, and the mass of the segments
/// entirely on the requested side of the interval.
fn linear_piece(segs: &[Segment], x0: f64, x1: f64, left: bool) -> (Option<Segment>, f64) {
    let active = segs.iter().copied().find(|s| s.lo <= x0 && s.hi >= x1);
    let full =
        segs.iter().filter(|s| if left { s.hi <= x0 } else { s.lo >= x1 }).map(|s| s.density * (s.hi - s.lo)).sum();
    (active, full)
}

/// The boundary maximising GM, found by exact maximisation on every linear
/// piece. When GM is maximal on a whole interval (as in a gap between
/// non-overlapping supports) its midpoint is returned; otherwise ties go to
/// the smallest boundary.
pub fn best_boundary_1d(model: &DensityModel) -> Result<BoundaryPoint> {
    let (pos, neg) = piecewise(model)?;
    let (ps, ns) = (pos.canonical(), neg.canonical());
    let mut xs: Vec<f64> = ps.iter().chain(&ns).flat_map(|s| [s.lo, s.hi]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut candidates: Vec<BoundaryPoint> = Vec::new();
    let mut flats: Vec<(f64, f64, f64)> = Vec::new();
    candidates.push(evaluate(pos, neg, xs[0]));
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let (pa, pfull) = linear_piece(&ps, x0, x1, true);
        let (na, nfull) = linear_piece(&ns, x0, x1, false);
        match (pa, na) {
            (Some(p), Some(n)) => {
                // TPR = pfull + c (b - p.lo) vanishes at r1; TNR = nfull + f (n.hi - b) at r2.
                let r1 = p.lo - pfull / p.density;
                let r2 = n.hi + nfull / n.density;
                let v = 0.5 * (r1 + r2);
                if x0 < v && v < x1 {
                    candidates.push(evaluate(pos, neg, v));
                }
            }
            (None, None) => flats.push((x0, x1, evaluate(pos, neg, x0).gm)),
            _ => {}
        }
        candidates.push(evaluate(pos, neg, x1));
    }

    let best_gm = candidates.iter().map(|c| c.gm).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best_gm.max(1.0);
    let mut plateau: Option<(f64, f64)> = None;
    for &(x0, x1, g) in &flats {
        if best_gm - g > tol {
            if plateau.is_some() {
                break;
            }
            continue;
        }
        plateau = match plateau {
            Some((lo, hi)) if hi == x0 => Some((lo, x1)),
            Some(_) => break,
            None => Some((x0, x1)),
        };
    }
    if let Some((lo, hi)) = plateau {
        return Ok(evaluate(pos, neg, 0.5 * (lo + hi)));
    }
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.gm > best.gm || (c.gm == best.gm && c.b < best.b) {
            best = *c;
        }
    }
    Ok(best)
}
