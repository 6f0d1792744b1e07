//! The benchmark's method roster and how each method is trained.

use anyhow::{bail, Result};
use gmselect_core::ensemble::{self, BAGGING_SIZE, BOOSTING_SIZE};
use gmselect_core::selection::{self, EusParams, PsoParams, ReParams};
use gmselect_core::{Class, EnsembleModel, PointSet, ReferenceSet};

use crate::config::MethodSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    OneNn,
    Bag1Nn { size: usize },
    Rus,
    Erus { size: usize },
    RusBoost { size: usize },
    EusBoost { size: usize, eus: EusParams },
    Eus(EusParams),
    Pso(PsoParams),
    Tl,
    Oss,
    TlCnn,
    Ncl,
    RandomEdit(ReParams),
}

/// The four properties methods are grouped by in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Categories {
    pub random: bool,
    pub balancing: bool,
    pub explicit_gm: bool,
    pub ensemble: bool,
}

pub const CATEGORY_NAMES: [&str; 4] = ["random selection", "balances classes", "optimises GM", "ensemble"];

impl Categories {
    pub fn flags(&self) -> [bool; 4] {
        [self.random, self.balancing, self.explicit_gm, self.ensemble]
    }
}

pub enum Fitted {
    Single(ReferenceSet),
    Ensemble(EnsembleModel),
}

impl Fitted {
    pub fn predict(&self, train: &PointSet, x: &[f64]) -> gmselect_core::Result<Class> {
        match self {
            Fitted::Single(r) => Ok(r.classifier(train)?.classify(x)),
            Fitted::Ensemble(m) => m.predict(train, x),
        }
    }

    /// Reference-set size; the mean member size for ensembles.
    pub fn retained(&self) -> usize {
        match self {
            Fitted::Single(r) => r.len(),
            Fitted::Ensemble(m) => m.mean_member_size(),
        }
    }
}

impl Method {
    /// 1-NN, BAG1NN, RUS, ERUS, RUSBOOST, EUSBOOST, EUS, PSO, TL, OSS, TL+CNN, NCL.
    pub fn standard_roster() -> Vec<Method> {
        vec![
            Method::OneNn,
            Method::Bag1Nn { size: BAGGING_SIZE },
            Method::Rus,
            Method::Erus { size: BAGGING_SIZE },
            Method::RusBoost { size: BOOSTING_SIZE },
            Method::EusBoost { size: BOOSTING_SIZE, eus: EusParams::default() },
            Method::Eus(EusParams::default()),
            Method::Pso(PsoParams::default()),
            Method::Tl,
            Method::Oss,
            Method::TlCnn,
            Method::Ncl,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::OneNn => "1NN",
            Method::Bag1Nn { .. } => "BAG1NN",
            Method::Rus => "RUS",
            Method::Erus { .. } => "ERUS",
            Method::RusBoost { .. } => "RUSBOOST",
            Method::EusBoost { .. } => "EUSBOOST",
            Method::Eus(_) => "EUS",
            Method::Pso(_) => "PSO",
            Method::Tl => "TL",
            Method::Oss => "OSS",
            Method::TlCnn => "TL+CNN",
            Method::Ncl => "NCL",
            Method::RandomEdit(_) => "RE",
        }
    }

    pub fn categories(&self) -> Categories {
        let (random, balancing, explicit_gm, ensemble) = match self {
            Method::OneNn => (false, false, false, false),
            Method::Bag1Nn { .. } => (true, false, false, true),
            Method::Rus => (true, true, false, false),
            Method::Erus { .. } => (true, true, false, true),
            Method::RusBoost { .. } => (true, true, false, true),
            Method::EusBoost { .. } => (true, true, true, true),
            Method::Eus(_) => (true, true, true, false),
            Method::Pso(_) => (true, false, true, false),
            Method::Tl | Method::Oss | Method::TlCnn | Method::Ncl => (false, true, false, false),
            Method::RandomEdit(_) => (true, false, true, false),
        };
        Categories { random, balancing, explicit_gm, ensemble }
    }

    pub fn from_spec(spec: &MethodSpec) -> Result<Method> {
        let key = spec.name.to_ascii_uppercase().replace('-', "");
        let eus = || {
            let mut p = EusParams::default();
            if let Some(v) = spec.population {
                p.population = v;
            }
            if let Some(v) = spec.generations {
                p.generations = v;
            }
            if let Some(v) = spec.lambda {
                p.lambda = v;
            }
            p
        };
        let (method, allowed): (Method, &[&str]) = match key.as_str() {
            "1NN" => (Method::OneNn, &[]),
            "BAG1NN" => (Method::Bag1Nn { size: spec.size.unwrap_or(BAGGING_SIZE) }, &["size"]),
            "RUS" => (Method::Rus, &[]),
            "ERUS" => (Method::Erus { size: spec.size.unwrap_or(BAGGING_SIZE) }, &["size"]),
            "RUSBOOST" => (Method::RusBoost { size: spec.size.unwrap_or(BOOSTING_SIZE) }, &["size"]),
            "EUSBOOST" => (
                Method::EusBoost { size: spec.size.unwrap_or(BOOSTING_SIZE), eus: eus() },
                &["size", "population", "generations", "lambda"],
            ),
            "EUS" => (Method::Eus(eus()), &["population", "generations", "lambda"]),
            "PSO" => {
                let mut p = PsoParams::default();
                if let Some(v) = spec.swarm {
                    p.swarm = v;
                }
                if let Some(v) = spec.iterations {
                    p.iterations = v;
                }
                (Method::Pso(p), &["swarm", "iterations"])
            }
            "TL" => (Method::Tl, &[]),
            "OSS" => (Method::Oss, &[]),
            "TL+CNN" | "TLCNN" => (Method::TlCnn, &[]),
            "NCL" => (Method::Ncl, &[]),
            "RE" => {
                let mut p = ReParams::default();
                if let Some(v) = spec.prototypes {
                    p.size = v;
                }
                if let Some(v) = spec.trials {
                    p.trials = v;
                }
                (Method::RandomEdit(p), &["prototypes", "trials"])
            }
            _ => bail!("unknown method {:?}", spec.name),
        };
        let given = [
            ("size", spec.size.is_some()),
            ("population", spec.population.is_some()),
            ("generations", spec.generations.is_some()),
            ("lambda", spec.lambda.is_some()),
            ("swarm", spec.swarm.is_some()),
            ("iterations", spec.iterations.is_some()),
            ("prototypes", spec.prototypes.is_some()),
            ("trials", spec.trials.is_some()),
        ];
        for (param, set) in given {
            if set && !allowed.contains(&param) {
                bail!("method {} does not take parameter {param}", method.name());
            }
        }
        if let Method::Bag1Nn { size: 0 }
        | Method::Erus { size: 0 }
        | Method::RusBoost { size: 0 }
        | Method::EusBoost { size: 0, .. } = method
        {
            bail!("ensemble size must be at least 1");
        }
        Ok(method)
    }

    pub fn fit(&self, train: &PointSet, seed: u64) -> Result<Fitted> {
        Ok(match self {
            Method::OneNn => Fitted::Single(ReferenceSet::new((0..train.len()).collect(), "1NN", None)),
            Method::Bag1Nn { size } => Fitted::Ensemble(ensemble::bag_1nn(train, *size, seed)?),
            Method::Rus => Fitted::Single(selection::rus(train, seed)),
            Method::Erus { size } => Fitted::Ensemble(ensemble::erus(train, *size, seed)),
            Method::RusBoost { size } => Fitted::Ensemble(ensemble::rusboost(train, *size, seed)),
            Method::EusBoost { size, eus } => Fitted::Ensemble(ensemble::eusboost(train, *size, eus, seed)),
            Method::Eus(p) => Fitted::Single(selection::eus(train, p, seed)),
            Method::Pso(p) => Fitted::Single(selection::pso_select(train, p, seed)),
            Method::Tl => Fitted::Single(selection::tomek_links(train)),
            Method::Oss => Fitted::Single(selection::oss(train, seed)),
            Method::TlCnn => Fitted::Single(selection::tl_cnn(train, seed)),
            Method::Ncl => Fitted::Single(selection::ncl(train)),
            Method::RandomEdit(p) => Fitted::Single(selection::random_edit(train, *p, seed)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roster_names_are_unique_and_ordered() {
        let names: Vec<&str> = Method::standard_roster().iter().map(Method::name).collect();
        assert_eq!(
            names,
            ["1NN", "BAG1NN", "RUS", "ERUS", "RUSBOOST", "EUSBOOST", "EUS", "PSO", "TL", "OSS", "TL+CNN", "NCL"]
        );
    }

    #[test]
    fn category_membership() {
        let roster = Method::standard_roster();
        let members = |k: usize| -> Vec<usize> {
            roster.iter().enumerate().filter(|(_, m)| m.categories().flags()[k]).map(|(i, _)| i + 1).collect()
        };
        assert_eq!(members(0), vec![2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(members(1), vec![3, 4, 5, 6, 7, 9, 10, 11, 12]);
        assert_eq!(members(2), vec![6, 7, 8]);
        assert_eq!(members(3), vec![2, 4, 5, 6]);
    }

    #[test]
    fn spec_parsing() {
        let m = Method::from_spec(&MethodSpec { size: Some(5), ..MethodSpec::named("erus") }).unwrap();
        assert_eq!(m, Method::Erus { size: 5 });
        assert!(Method::from_spec(&MethodSpec { size: Some(5), ..MethodSpec::named("TL") }).is_err());
        assert!(Method::from_spec(&MethodSpec::named("SMOTE")).is_err());
        assert!(Method::from_spec(&MethodSpec { size: Some(0), ..MethodSpec::named("ERUS") }).is_err());
        assert_eq!(Method::from_spec(&MethodSpec::named("tl-cnn")).unwrap(), Method::TlCnn);
        assert_eq!(Method::from_spec(&MethodSpec::named("1-NN")).unwrap(), Method::OneNn);
    }
}
