use approx::assert_abs_diff_eq;
use gmselect_core::Class;
use gmselect_theory::boundary::{best_boundary_1d, gm_boundary_1d};
use gmselect_theory::montecarlo::quadrature_gm_2d;
use gmselect_theory::removal::removal_analysis;
use gmselect_theory::voronoi::lemma_check;
use gmselect_theory::{asymptotic_gm, DensityModel, LabeledPointSet};
use proptest::prelude::*;

const TWO_STEP: &str = r#"
prior_positive = 0.5

[positive]
kind = "piecewise"
segments = [{ lo = 0.0, hi = 1.0, density = 0.5 }, { lo = 1.0, hi = 2.0, density = 0.5 }]

[negative]
kind = "piecewise"
segments = [{ lo = 1.0, hi = 3.0, density = 0.5 }]
"#;

#[test]
fn piecewise_model_from_toml() {
    let m = DensityModel::from_toml_str(TWO_STEP).unwrap();
    let p = gm_boundary_1d(&m, 1.5).unwrap();
    assert_abs_diff_eq!(p.tpr, 0.75, epsilon = 1e-15);
    assert_abs_diff_eq!(p.tnr, 0.75, epsilon = 1e-15);
    // GM² = (b/2)(3-b)/2 peaks at b = 1.5.
    let best = best_boundary_1d(&m).unwrap();
    assert_abs_diff_eq!(best.b, 1.5, epsilon = 1e-12);
    assert_abs_diff_eq!(best.gm, 0.75, epsilon = 1e-12);
}

#[test]
fn bad_models_are_rejected() {
    let short = TWO_STEP.replace("density = 0.5 }]\n\n[negative]", "density = 0.4 }]\n\n[negative]");
    assert!(DensityModel::from_toml_str(&short).is_err());
    assert!(DensityModel::from_toml_str(&TWO_STEP.replace("0.5\n", "1.5\n")).is_err());
    assert!(DensityModel::from_toml_str("prior_positive = 0.5\n").is_err());
}

#[test]
fn mixture_model_from_toml() {
    let text = r#"
prior_positive = 0.2
[positive]
kind = "mixture"
components = [{ weight = 1.0, mean = [0.0, 0.0], variance = [1.0, 1.0] }]
[negative]
kind = "mixture"
components = [{ weight = 0.5, mean = [2.0, 0.0], variance = [1.0, 1.0] }, { weight = 0.5, mean = [-2.0, 0.0], variance = [1.0, 1.0] }]
"#;
    let m = DensityModel::from_toml_str(text).unwrap();
    assert_eq!(m.dim(), 2);
    assert_abs_diff_eq!(m.prior_negative(), 0.8, epsilon = 1e-15);
}

#[test]
fn sampling_agrees_with_quadrature() {
    let m = DensityModel::overlapping_gaussians();
    let refset = LabeledPointSet::new(
        vec![vec![0.0, 0.0], vec![-0.5, 0.8], vec![1.3, 0.5], vec![2.0, -0.4], vec![0.9, 1.6]],
        vec![Class::Positive, Class::Positive, Class::Negative, Class::Negative, Class::Negative],
    )
    .unwrap();
    let mc = asymptotic_gm(&refset, &m, 200_000, 3).unwrap();
    let (tpr, tnr, gm) = quadrature_gm_2d(&refset, &m, -8.0, 9.0, 800);
    assert_abs_diff_eq!(mc.tpr, tpr, epsilon = 5.0 * mc.se.max(1e-3));
    assert_abs_diff_eq!(mc.tnr, tnr, epsilon = 0.01);
    assert_abs_diff_eq!(mc.gm, gm, epsilon = 5.0 * mc.se);
}

#[test]
fn predicted_rates_match_direct_estimate_on_the_same_bank() {
    let m = DensityModel::overlapping_gaussians();
    let refset = LabeledPointSet::new(
        vec![vec![0.0, 0.0], vec![0.4, 0.3], vec![1.3, 0.5], vec![2.0, -0.4], vec![-1.0, 1.5]],
        vec![Class::Positive, Class::Positive, Class::Negative, Class::Negative, Class::Negative],
    )
    .unwrap();
    for i in 0..refset.len() {
        let a = removal_analysis(&refset, i, &m, 20_000, 8).unwrap();
        let after = asymptotic_gm(&refset.without(i), &m, 20_000, 8).unwrap();
        let (tpr, tnr) = a.rates_after();
        assert_abs_diff_eq!(tpr, after.tpr, epsilon = 1e-12);
        assert_abs_diff_eq!(tnr, after.tnr, epsilon = 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn removal_never_shrinks_other_cells(
        pts in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 3), 3..12),
        pick in any::<proptest::sample::Index>(),
        seed in any::<u64>(),
    ) {
        let i = pick.index(pts.len());
        let r = lemma_check(&pts, i, 3000, seed).unwrap();
        prop_assert_eq!(r.inclusion_violations, 0);
        prop_assert!(r.captured.iter().sum::<usize>() <= r.old_cell_probes);
    }
}
