use std::fmt::Write as _;

use gmselect_core::data::{parse_keel, stratified_two_fold, to_keel};
use gmselect_core::knn::PointSet;
use gmselect_core::{AttributeKind, Class, Dataset, Scaler};
use proptest::prelude::*;

/// Same shape as abalone19: a nominal sex attribute, seven reals, 32
/// positives among 4174 rows.
fn abalone_like() -> String {
    let mut s = String::from("@relation abalone19\n@attribute Sex {M, F, I}\n");
    for name in ["Length", "Diameter", "Height", "Whole_weight", "Shucked_weight", "Viscera_weight", "Shell_weight"] {
        let _ = writeln!(s, "@attribute {name} real [0.0, 3.0]");
    }
    s.push_str("@attribute Class {positive, negative}\n@inputs Sex, Length, Diameter, Height, Whole_weight, Shucked_weight, Viscera_weight, Shell_weight\n@outputs Class\n@data\n");
    for i in 0..4174 {
        let sex = ["M", "F", "I"][i % 3];
        let class = if i % 130 == 7 && i < 130 * 32 { "positive" } else { "negative" };
        let vals: Vec<String> = (0..7).map(|k| format!("{:.3}", ((i * 31 + k * 17) % 1000) as f64 / 400.0)).collect();
        let _ = writeln!(s, "{sex}, {}, {class}", vals.join(", "));
    }
    s
}

#[test]
fn abalone_shaped_file() {
    let ds = parse_keel(&abalone_like()).unwrap();
    assert_eq!(ds.name, "abalone19");
    assert_eq!((ds.n_pos(), ds.n_neg()), (32, 4142));
    assert_eq!(format!("{:.2}", ds.imbalance_ratio()), "129.44");
    assert_eq!((ds.n_numeric(), ds.n_nominal()), (7, 1));
    assert!(matches!(&ds.schema[0].kind, AttributeKind::Nominal { categories } if categories.len() == 3));
    assert_eq!(ds.positive_label, "positive");

    let plan = stratified_two_fold(&ds, 4).unwrap();
    let (train, test) = plan.split(0, 0);
    assert_eq!(train.len() + test.len(), ds.len());
    let train_ds = ds.subset(train);
    assert_eq!(train_ds.n_pos(), 16);
    let scaler = Scaler::fit(&train_ds);
    let ps = PointSet::from_dataset(&train_ds, &scaler).unwrap();
    assert_eq!(ps.dim(), 8);
    assert!(ps.nominal_mask()[0]);
    assert_eq!(ps.indices_of(Class::Positive).len(), 16);
}

#[test]
fn load_from_disk_uses_relation_name() {
    let dir = std::env::temp_dir().join(format!("gmselect-core-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("copy.dat");
    std::fs::write(&path, abalone_like()).unwrap();
    let ds = Dataset::load(&path).unwrap();
    assert_eq!(ds.name, "abalone19");
    assert!(Dataset::load(dir.join("missing.dat")).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

fn keel_text(rows: &[(f64, f64, usize, bool)]) -> String {
    let mut s = String::from("@relation prop\n@attribute a real\n@attribute b real [-100.0, 100.0]\n@attribute c {x, y, z}\n@attribute out {yes, no}\n@data\n");
    for &(a, b, c, pos) in rows {
        let _ = writeln!(s, "{a}, {b}, {}, {}", ["x", "y", "z"][c], if pos { "yes" } else { "no" });
    }
    s
}

proptest! {
    #[test]
    fn keel_round_trip(
        mut rows in proptest::collection::vec((-1e6f64..1e6, -100.0f64..100.0, 0usize..3, any::<bool>()), 2..40)
    ) {
        // Keep the positive class the strict minority so the labels stay put.
        rows[0].3 = false;
        let n_pos = rows.iter().filter(|r| r.3).count();
        prop_assume!(n_pos > 0 && 2 * n_pos < rows.len());
        let ds = parse_keel(&keel_text(&rows)).unwrap();
        let again = parse_keel(&to_keel(&ds)).unwrap();
        prop_assert_eq!(&ds, &again);
        prop_assert_eq!(ds.n_pos(), n_pos);
    }
}
