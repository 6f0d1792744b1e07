//! Win table, pairwise sign tests and category summary from trial records.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use gmselect_core::metrics::{self, SignTestResult, WinTable};

use crate::experiment::TrialRecord;
use crate::methods::{Method, CATEGORY_NAMES};

pub const DEFAULT_ALPHA: f64 = 0.05;

type TrialKey = (String, usize, usize);

#[derive(Debug, Clone)]
pub struct Report {
    pub methods: Vec<String>,
    pub wins: WinTable,
    /// `sign[i][j]` tests whether method `i` beats method `j`.
    pub sign: Vec<Vec<SignTestResult>>,
    pub alpha: f64,
    pub bonferroni_m: usize,
    /// Trials left out of the win table because some method has no result.
    pub incomplete_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryRow {
    pub name: &'static str,
    pub members: Vec<String>,
    pub mean_wins_in: f64,
    /// Mean wins of the other methods, excluding plain 1-NN.
    pub mean_wins_out: f64,
    /// Significant pairwise wins of members over non-members (excluding
    /// 1-NN), and the reverse.
    pub significant_for: usize,
    pub significant_against: usize,
}

impl Report {
    /// Builds the report; `bonferroni_m` defaults to `k (k - 1)` for `k` methods.
    pub fn build(records: &[TrialRecord], alpha: f64, bonferroni_m: Option<usize>) -> Result<Report> {
        let mut methods: Vec<String> = Vec::new();
        let mut table: BTreeMap<TrialKey, BTreeMap<String, f64>> = BTreeMap::new();
        for r in records {
            if !methods.contains(&r.method) {
                methods.push(r.method.clone());
            }
            if !r.failed {
                table.entry((r.dataset.clone(), r.rep, r.fold)).or_default().insert(r.method.clone(), r.gm);
            } else {
                table.entry((r.dataset.clone(), r.rep, r.fold)).or_default();
            }
        }
        if methods.is_empty() {
            bail!("no trial records");
        }
        let k = methods.len();
        let rows: Vec<Vec<f64>> = table
            .values()
            .filter_map(|row| methods.iter().map(|m| row.get(m).copied()).collect::<Option<Vec<f64>>>())
            .collect();
        let incomplete = table.len() - rows.len();
        if incomplete > 0 {
            log::warn!("{incomplete} trials lack a result for some method; they are left out of the win table");
        }
        if rows.is_empty() {
            bail!("no trial has results for every method");
        }
        let wins = metrics::win_counts(&rows)?;

        let mut sign = Vec::with_capacity(k);
        for a in &methods {
            let mut row = Vec::with_capacity(k);
            for b in &methods {
                let (xs, ys): (Vec<f64>, Vec<f64>) =
                    table.values().filter_map(|t| Some((*t.get(a)?, *t.get(b)?))).unzip();
                if xs.is_empty() {
                    bail!("methods {a} and {b} share no completed trial");
                }
                row.push(metrics::sign_test(&xs, &ys)?);
            }
            sign.push(row);
        }
        Ok(Report {
            methods,
            wins,
            sign,
            alpha,
            bonferroni_m: bonferroni_m.unwrap_or(k * k.saturating_sub(1)).max(1),
            incomplete_trials: incomplete,
        })
    }

    pub fn adjusted_p(&self, i: usize, j: usize) -> f64 {
        self.sign[i][j].p_bonferroni(self.bonferroni_m)
    }

    pub fn significant(&self, i: usize, j: usize) -> bool {
        i != j && self.adjusted_p(i, j) < self.alpha
    }

    /// Category rows for the methods of the standard roster present here.
    pub fn categories(&self) -> Vec<CategoryRow> {
        let roster = Method::standard_roster();
        let cats: Vec<Option<[bool; 4]>> = self
            .methods
            .iter()
            .map(|m| roster.iter().find(|r| r.name() == m).map(|r| r.categories().flags()))
            .collect();
        let mean = |idx: &[usize]| {
            if idx.is_empty() {
                f64::NAN
            } else {
                idx.iter().map(|&i| self.wins.wins[i]).sum::<f64>() / idx.len() as f64
            }
        };
        (0..4)
            .map(|c| {
                let inside: Vec<usize> = (0..self.methods.len()).filter(|&i| cats[i].is_some_and(|f| f[c])).collect();
                let outside: Vec<usize> = (0..self.methods.len())
                    .filter(|&i| cats[i].is_some_and(|f| !f[c]) && self.methods[i] != "1NN")
                    .collect();
                let mut for_ = 0;
                let mut against = 0;
                for &a in &inside {
                    for &b in &outside {
                        for_ += usize::from(self.significant(a, b));
                        against += usize::from(self.significant(b, a));
                    }
                }
                CategoryRow {
                    name: CATEGORY_NAMES[c],
                    members: inside.iter().map(|&i| self.methods[i].clone()).collect(),
                    mean_wins_in: mean(&inside),
                    mean_wins_out: mean(&outside),
                    significant_for: for_,
                    significant_against: against,
                }
            })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let k = self.methods.len();
        let _ = writeln!(s, "# GM benchmark report\n");
        let _ = writeln!(s, "{} complete trials, {} methods.", self.wins.trials, k);
        if self.incomplete_trials > 0 {
            let _ =
                writeln!(s, "{} trials with a failed method were left out of the win table.", self.incomplete_trials);
        }
        let _ = writeln!(s, "\n## Wins\n\nTies on a trial split the win evenly.\n\n| method | wins |\n|---|---:|");
        for (m, w) in self.methods.iter().zip(&self.wins.wins) {
            let _ = writeln!(s, "| {m} | {} |", fmt_wins(*w));
        }
        let _ = writeln!(s, "| total | {} |", fmt_wins(self.wins.total()));

        let _ = writeln!(
            s,
            "\n## Sign tests\n\nOne-sided p-values that the row method beats the column method, \
             Bonferroni-adjusted for {} comparisons. **Bold** entries are significant at {}.\n",
            self.bonferroni_m, self.alpha
        );
        let _ = write!(s, "| |");
        for j in 0..k {
            let _ = write!(s, " ({}) |", j + 1);
        }
        let _ = write!(s, "\n|---|");
        for _ in 0..k {
            let _ = write!(s, "---:|");
        }
        let _ = writeln!(s);
        for i in 0..k {
            let _ = write!(s, "| {} ({}) |", self.methods[i], i + 1);
            for j in 0..k {
                let p = self.adjusted_p(i, j);
                if self.significant(i, j) {
                    let _ = write!(s, " **{p:.3}** |");
                } else {
                    let _ = write!(s, " {p:.3} |");
                }
            }
            let _ = writeln!(s);
        }

        let _ = writeln!(
            s,
            "\n## Categories\n\nMean wins inside each group against the other methods (1NN excluded), and \
             significant pairwise wins between the groups.\n\n\
             | category | members | mean wins (in) | mean wins (out) | significant for | significant against |\n\
             |---|---|---:|---:|---:|---:|"
        );
        for c in self.categories() {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} |",
                c.name,
                c.members.join(", "),
                fmt_mean(c.mean_wins_in),
                fmt_mean(c.mean_wins_out),
                c.significant_for,
                c.significant_against
            );
        }
        s
    }
}

fn fmt_mean(w: f64) -> String {
    if w.is_nan() {
        "–".into()
    } else {
        format!("{w:.1}")
    }
}

fn fmt_wins(w: f64) -> String {
    if w.fract() == 0.0 {
        format!("{w:.0}")
    } else {
        format!("{w:.2}")
    }
}
