use super::{AttributeKind, Dataset, Instance};
use crate::{Error, Result};

/// Per-attribute min-max normaliser fitted on a training half.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    /// `None` for nominal attributes, which pass through unchanged.
    bounds: Vec<Option<(f64, f64)>>,
}

impl Scaler {
    pub fn fit(ds: &Dataset) -> Scaler {
        let bounds = ds
            .schema
            .iter()
            .enumerate()
            .map(|(j, attr)| match attr.kind {
                AttributeKind::Nominal { .. } => None,
                AttributeKind::Numeric { .. } => {
                    let (lo, hi) = ds.instances.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), inst| {
                        (lo.min(inst.values[j]), hi.max(inst.values[j]))
                    });
                    if lo.is_finite() {
                        Some((lo, hi))
                    } else {
                        Some((0.0, 0.0))
                    }
                }
            })
            .collect();
        Scaler { bounds }
    }

    pub fn bounds(&self) -> &[Option<(f64, f64)>] {
        &self.bounds
    }

    /// `(v - min) / (max - min)`, unclipped; a constant training feature maps to 0.
    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.bounds.len() {
            return Err(Error::LengthMismatch { expected: self.bounds.len(), found: values.len() });
        }
        Ok(values
            .iter()
            .zip(&self.bounds)
            .map(|(&v, b)| match *b {
                None => v,
                Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
                Some(_) => 0.0,
            })
            .collect())
    }

    pub fn apply_instance(&self, x: &Instance) -> Result<Vec<f64>> {
        self.apply(&x.values)
    }

    /// Checks that `ds` has the schema shape this scaler was fitted on.
    pub fn check_schema(&self, ds: &Dataset) -> Result<()> {
        let same = ds.schema.len() == self.bounds.len()
            && ds.schema.iter().zip(&self.bounds).all(|(a, b)| a.is_nominal() == b.is_none());
        if same {
            Ok(())
        } else {
            Err(Error::InvalidArgument("dataset schema does not match the fitted scaler".into()))
        }
    }
}
