//! Datasets, ingestion, scaling and fold planning.

mod folds;
mod keel;
mod scale;
mod tabular;

pub use folds::{stratified_folds, stratified_two_fold, FoldPlan, REPETITIONS};
pub use keel::{parse_keel, to_keel};
pub use scale::Scaler;
pub use tabular::parse_csv;

use std::fmt;
use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Positive,
    Negative,
}

impl Class {
    pub fn is_positive(self) -> bool {
        self == Class::Positive
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Positive => f.write_str("positive"),
            Class::Negative => f.write_str("negative"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    /// `range` is the declared `[lo, hi]`, when the source declares one.
    Numeric {
        integer: bool,
        range: Option<(f64, f64)>,
    },
    Nominal {
        categories: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>, range: Option<(f64, f64)>) -> Result<Self> {
        if let Some((lo, hi)) = range {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::Validation(format!("declared range [{lo}, {hi}] has min > max")));
            }
        }
        Ok(Attribute { name: name.into(), kind: AttributeKind::Numeric { integer: false, range } })
    }

    pub fn nominal(name: impl Into<String>, categories: Vec<String>) -> Result<Self> {
        let name = name.into();
        if categories.is_empty() {
            return Err(Error::Validation(format!("attribute {name} has no categories")));
        }
        for (i, c) in categories.iter().enumerate() {
            if categories[..i].contains(c) {
                return Err(Error::Validation(format!("attribute {name} repeats category {c}")));
            }
        }
        Ok(Attribute { name, kind: AttributeKind::Nominal { categories } })
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, AttributeKind::Nominal { .. })
    }

    /// Position of `value` in the category list, for nominal attributes.
    pub fn category_index(&self, value: &str) -> Option<usize> {
        match &self.kind {
            AttributeKind::Nominal { categories } => categories.iter().position(|c| c == value),
            AttributeKind::Numeric { .. } => None,
        }
    }
}

/// One labelled row. Nominal values are stored as their category index.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<f64>,
    pub label: Class,
}

/// A two-class dataset whose positive class is the minority.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: Vec<Attribute>,
    pub instances: Vec<Instance>,
    /// Name of the output attribute.
    pub class_name: String,
    pub positive_label: String,
    pub negative_label: String,
}

impl Dataset {
    /// Builds a dataset from rows carrying raw class labels, designating the
    /// less frequent label positive (lexicographically smaller on a tie).
    pub fn from_labelled_rows(
        name: impl Into<String>,
        schema: Vec<Attribute>,
        class_name: impl Into<String>,
        rows: Vec<(Vec<f64>, String)>,
    ) -> Result<Self> {
        let mut labels: Vec<(String, usize)> = Vec::new();
        for (_, label) in &rows {
            match labels.iter_mut().find(|(l, _)| l == label) {
                Some((_, n)) => *n += 1,
                None => labels.push((label.clone(), 1)),
            }
        }
        if labels.len() > 2 {
            return Err(Error::Validation(format!("expected two classes, found {}", labels.len())));
        }
        if labels.len() < 2 {
            return Err(Error::Validation("each class needs at least one instance".into()));
        }
        labels.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let positive_label = labels[0].0.clone();
        let negative_label = labels[1].0.clone();
        let instances = rows
            .into_iter()
            .map(|(values, label)| Instance {
                values,
                label: if label == positive_label { Class::Positive } else { Class::Negative },
            })
            .collect();
        Self::new(name, schema, class_name, positive_label, negative_label, instances)
    }

    pub fn new(
        name: impl Into<String>,
        schema: Vec<Attribute>,
        class_name: impl Into<String>,
        positive_label: impl Into<String>,
        negative_label: impl Into<String>,
        instances: Vec<Instance>,
    ) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            schema,
            instances,
            class_name: class_name.into(),
            positive_label: positive_label.into(),
            negative_label: negative_label.into(),
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        for (row, inst) in self.instances.iter().enumerate() {
            if inst.values.len() != self.schema.len() {
                return Err(Error::Validation(format!(
                    "instance {row} has {} values, schema has {}",
                    inst.values.len(),
                    self.schema.len()
                )));
            }
            for (v, attr) in inst.values.iter().zip(&self.schema) {
                match &attr.kind {
                    AttributeKind::Numeric { .. } if !v.is_finite() => {
                        return Err(Error::Validation(format!("instance {row}: non-finite value for {}", attr.name)));
                    }
                    AttributeKind::Nominal { categories }
                        if v.fract() != 0.0 || *v < 0.0 || *v as usize >= categories.len() =>
                    {
                        return Err(Error::Validation(format!(
                            "instance {row}: value {v} is not a category of {}",
                            attr.name
                        )));
                    }
                    _ => {}
                }
            }
        }
        let (pos, neg) = (self.n_pos(), self.n_neg());
        if pos == 0 || neg == 0 {
            return Err(Error::Validation("each class needs at least one instance".into()));
        }
        if pos > neg {
            return Err(Error::Validation(format!("positive class is the majority ({pos} > {neg})")));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let mut ds = if is_csv { parse_csv(&text)? } else { parse_keel(&text)? };
        if ds.name.is_empty() || is_csv {
            ds.name = name;
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.instances.iter().filter(|i| i.label.is_positive()).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }

    pub fn imbalance_ratio(&self) -> f64 {
        self.n_neg() as f64 / self.n_pos() as f64
    }

    pub fn labels(&self) -> Vec<Class> {
        self.instances.iter().map(|i| i.label).collect()
    }

    pub fn n_numeric(&self) -> usize {
        self.schema.iter().filter(|a| !a.is_nominal()).count()
    }

    pub fn n_nominal(&self) -> usize {
        self.schema.len() - self.n_numeric()
    }

    /// Rows at `indices`, in that order. The positive designation is carried
    /// over unchanged even if the subset flips the class balance.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            schema: self.schema.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
            class_name: self.class_name.clone(),
            positive_label: self.positive_label.clone(),
            negative_label: self.negative_label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_designates_lexicographically_smaller_label() {
        let schema = vec![Attribute::numeric("x", None).unwrap()];
        let rows = vec![(vec![0.0], "b".to_string()), (vec![1.0], "a".to_string())];
        let ds = Dataset::from_labelled_rows("t", schema, "class", rows).unwrap();
        assert_eq!(ds.positive_label, "a");
        assert_eq!(ds.instances[1].label, Class::Positive);
        assert_eq!(ds.imbalance_ratio(), 1.0);
    }

    #[test]
    fn minority_becomes_positive() {
        let schema = vec![Attribute::numeric("x", None).unwrap()];
        let rows = vec![(vec![0.0], "a".to_string()), (vec![1.0], "a".to_string()), (vec![2.0], "z".to_string())];
        let ds = Dataset::from_labelled_rows("t", schema, "class", rows).unwrap();
        assert_eq!(ds.positive_label, "z");
        assert_eq!((ds.n_pos(), ds.n_neg()), (1, 2));
    }

    #[test]
    fn attribute_invariants() {
        assert!(Attribute::numeric("x", Some((2.0, 1.0))).is_err());
        assert!(Attribute::nominal("c", vec![]).is_err());
        assert!(Attribute::nominal("c", vec!["a".into(), "a".into()]).is_err());
    }
}
