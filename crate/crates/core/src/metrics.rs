//! Confusion-matrix measures, win counting and the paired sign test.

use crate::data::Class;
use crate::{Error, Result};

/// The two-class confusion matrix with the positive class as target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_neg: usize,
    pub false_pos: usize,
    pub true_neg: usize,
}

impl ConfusionCounts {
    pub fn from_labels(truth: &[Class], predicted: &[Class]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::LengthMismatch { expected: truth.len(), found: predicted.len() });
        }
        Ok(Self::from_labels_unchecked(truth, predicted))
    }

    pub(crate) fn from_labels_unchecked(truth: &[Class], predicted: &[Class]) -> Self {
        let mut c = ConfusionCounts::default();
        for (t, p) in truth.iter().zip(predicted) {
            c.record(*t, *p);
        }
        c
    }

    pub fn record(&mut self, truth: Class, predicted: Class) {
        match (truth, predicted) {
            (Class::Positive, Class::Positive) => self.true_pos += 1,
            (Class::Positive, Class::Negative) => self.false_neg += 1,
            (Class::Negative, Class::Positive) => self.false_pos += 1,
            (Class::Negative, Class::Negative) => self.true_neg += 1,
        }
    }

    pub fn positives(&self) -> usize {
        self.true_pos + self.false_neg
    }

    pub fn negatives(&self) -> usize {
        self.false_pos + self.true_neg
    }

    pub fn total(&self) -> usize {
        self.positives() + self.negatives()
    }
}

/// Builds counts from raw label sequences where `positive` names the target class.
pub fn confusion<L: PartialEq>(truth: &[L], predicted: &[L], positive: &L) -> Result<ConfusionCounts> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), found: predicted.len() });
    }
    let class = |l: &L| if l == positive { Class::Positive } else { Class::Negative };
    let mut c = ConfusionCounts::default();
    for (t, p) in truth.iter().zip(predicted) {
        c.record(class(t), class(p));
    }
    Ok(c)
}

pub fn tpr(c: &ConfusionCounts) -> Result<f64> {
    if c.positives() == 0 {
        return Err(Error::InvalidArgument("TPR undefined without positive instances".into()));
    }
    Ok(c.true_pos as f64 / c.positives() as f64)
}

pub fn tnr(c: &ConfusionCounts) -> Result<f64> {
    if c.negatives() == 0 {
        return Err(Error::InvalidArgument("TNR undefined without negative instances".into()));
    }
    Ok(c.true_neg as f64 / c.negatives() as f64)
}

/// Geometric mean of TPR and TNR.
pub fn gm(c: &ConfusionCounts) -> Result<f64> {
    Ok((tpr(c)? * tnr(c)?).sqrt())
}

/// GM with an absent class counted as a zero rate.
pub(crate) fn gm_or_zero(c: &ConfusionCounts) -> f64 {
    gm(c).unwrap_or(0.0)
}

/// F1 with the positive class as target; 0 when there are no true positives.
pub fn f_measure(c: &ConfusionCounts) -> f64 {
    if c.true_pos == 0 {
        return 0.0;
    }
    let tp = c.true_pos as f64;
    2.0 * tp / (2.0 * tp + c.false_neg as f64 + c.false_pos as f64)
}

/// Area under the one-point ROC curve of a hard classifier: `(TPR + TNR) / 2`.
/// An absent class contributes a zero rate.
pub fn balanced_auc(c: &ConfusionCounts) -> f64 {
    (tpr(c).unwrap_or(0.0) + tnr(c).unwrap_or(0.0)) / 2.0
}

/// Fractional win totals per method.
#[derive(Debug, Clone, PartialEq)]
pub struct WinTable {
    pub wins: Vec<f64>,
    pub trials: usize,
}

impl WinTable {
    pub fn total(&self) -> f64 {
        self.wins.iter().sum()
    }
}

/// Per trial (row), splits one win evenly among the methods (columns) that
/// attain the row maximum.
pub fn win_counts(rows: &[Vec<f64>]) -> Result<WinTable> {
    let m = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || m == 0 {
        return Err(Error::InvalidArgument("win counting needs a non-empty matrix".into()));
    }
    let mut wins = vec![0.0; m];
    for row in rows {
        if row.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: row.len() });
        }
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let winners: Vec<usize> = (0..m).filter(|&j| row[j] == best).collect();
        let share = 1.0 / winners.len() as f64;
        for j in winners {
            wins[j] += share;
        }
    }
    Ok(WinTable { wins, trials: rows.len() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignTestResult {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// One-sided `P(X >= wins)` for `X ~ Binomial(wins + losses, 1/2)`.
    pub p_value: f64,
}

impl SignTestResult {
    pub fn p_bonferroni(&self, m: usize) -> f64 {
        bonferroni(self.p_value, m)
    }
}

/// One-sided sign test that `a` tends to exceed `b`. Ties are discarded.
pub fn sign_test(a: &[f64], b: &[f64]) -> Result<SignTestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    if a.is_empty() {
        return Err(Error::InvalidArgument("sign test needs at least one pair".into()));
    }
    let (mut wins, mut losses, mut ties) = (0, 0, 0);
    for (x, y) in a.iter().zip(b) {
        if x > y {
            wins += 1;
        } else if x < y {
            losses += 1;
        } else {
            ties += 1;
        }
    }
    Ok(SignTestResult { wins, losses, ties, p_value: binomial_upper_tail(wins + losses, wins) })
}

/// `sum_{k=w}^{n} C(n,k) / 2^n`, evaluated in log space.
pub fn binomial_upper_tail(n: usize, w: usize) -> f64 {
    if w == 0 {
        return 1.0;
    }
    if w > n {
        return 0.0;
    }
    let mut ln_fact = Vec::with_capacity(n + 1);
    ln_fact.push(0.0f64);
    for k in 1..=n {
        ln_fact.push(ln_fact[k - 1] + (k as f64).ln());
    }
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    let terms: Vec<f64> = (w..=n).map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k] - ln_half_n).collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

/// `min(1, m * p)`.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}
