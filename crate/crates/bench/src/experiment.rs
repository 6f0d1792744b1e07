//! 5x2 cross-validation runs: every method sees the same folds, every trial
//! gets a seed derived from its coordinates, and records come out in a fixed
//! order whatever the number of worker threads.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;
use std::time::Instant;

use anyhow::{Context, Result};
use gmselect_core::data::stratified_folds;
use gmselect_core::metrics::{self, ConfusionCounts};
use gmselect_core::{Dataset, PointSet, Scaler};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::methods::Method;

pub const CSV_HEADER: [&str; 10] =
    ["dataset", "rep", "fold", "method", "gm", "tpr", "tnr", "retained", "millis", "failed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub rep: usize,
    pub fold: usize,
    pub method: String,
    pub gm: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub retained: usize,
    pub millis: u64,
    pub failed: bool,
}

fn hash_u64(parts: &[&str]) -> u64 {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Seed for one (dataset, repetition, fold, method) trial.
pub fn trial_seed(master: u64, dataset: &str, rep: usize, fold: usize, method: &str) -> u64 {
    hash_u64(&[&master.to_string(), dataset, &rep.to_string(), &fold.to_string(), method])
}

/// Seed of a dataset's fold plan; shared by all methods.
pub fn fold_seed(master: u64, dataset: &str) -> u64 {
    hash_u64(&[&master.to_string(), dataset, "folds"])
}

/// Train and test points of one (repetition, fold), scaled by the training half.
pub struct Split {
    pub dataset: String,
    pub rep: usize,
    pub fold: usize,
    pub train: PointSet,
    pub test: PointSet,
    pub train_idx: Vec<usize>,
}

pub fn prepare_splits(ds: &Dataset, master: u64, repetitions: usize) -> Result<Vec<Split>> {
    let plan = stratified_folds(ds, fold_seed(master, &ds.name), repetitions)
        .with_context(|| format!("splitting {}", ds.name))?;
    let mut out = Vec::with_capacity(2 * repetitions);
    for rep in 0..repetitions {
        for fold in 0..2 {
            let (tr, te) = plan.split(rep, fold);
            let train_ds = ds.subset(tr);
            let scaler = Scaler::fit(&train_ds);
            out.push(Split {
                dataset: ds.name.clone(),
                rep,
                fold,
                train: PointSet::from_dataset(&train_ds, &scaler)?,
                test: PointSet::from_dataset(&ds.subset(te), &scaler)?,
                train_idx: tr.to_vec(),
            });
        }
    }
    Ok(out)
}

fn evaluate(method: &Method, split: &Split, seed: u64) -> Result<(ConfusionCounts, usize)> {
    let fitted = method.fit(&split.train, seed)?;
    let mut c = ConfusionCounts::default();
    for i in 0..split.test.len() {
        c.record(split.test.label(i), fitted.predict(&split.train, split.test.point(i))?);
    }
    Ok((c, fitted.retained()))
}

/// Runs one trial, turning errors and panics into a failed record.
pub fn run_trial(method: &Method, split: &Split, master: u64, timing: bool) -> TrialRecord {
    let seed = trial_seed(master, &split.dataset, split.rep, split.fold, method.name());
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| evaluate(method, split, seed)));
    let millis = if timing { start.elapsed().as_millis() as u64 } else { 0 };
    let mut rec = TrialRecord {
        dataset: split.dataset.clone(),
        rep: split.rep,
        fold: split.fold,
        method: method.name().to_string(),
        gm: f64::NAN,
        tpr: f64::NAN,
        tnr: f64::NAN,
        retained: 0,
        millis,
        failed: true,
    };
    let problem = match outcome {
        Ok(Ok((c, retained))) => match (metrics::tpr(&c), metrics::tnr(&c)) {
            (Ok(tpr), Ok(tnr)) => {
                rec.tpr = tpr;
                rec.tnr = tnr;
                rec.gm = (tpr * tnr).sqrt();
                rec.retained = retained;
                rec.failed = false;
                return rec;
            }
            (Err(e), _) | (_, Err(e)) => e.to_string(),
        },
        Ok(Err(e)) => format!("{e:#}"),
        Err(panic) => panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into()),
    };
    log::warn!("{} rep {} fold {} {}: trial failed: {problem}", rec.dataset, rec.rep, rec.fold, rec.method);
    rec
}

/// CSV writer for trial records, header first.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        inner.write_record(CSV_HEADER)?;
        inner.flush()?;
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, rec: &TrialRecord) -> Result<()> {
        self.inner.serialize(rec)?;
        self.inner.flush()?;
        Ok(())
    }
}

pub fn read_records(text: &str) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        anyhow::bail!("unexpected CSV header {:?}", headers.iter().collect::<Vec<_>>());
    }
    rdr.deserialize().map(|r| r.map_err(Into::into)).collect()
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut buf = Vec::new();
    {
        let mut w = RecordWriter::new(&mut buf)?;
        for r in records {
            w.write(r)?;
        }
    }
    Ok(String::from_utf8(buf)?)
}

/// Runs every (dataset, repetition, fold, method) trial on a pool of
/// `cfg.jobs` threads. Records are returned, and streamed to `sink` as soon
/// as all earlier ones are done, in dataset / repetition / fold / roster order.
pub fn run_experiment<W: Write>(cfg: &ExperimentConfig, sink: Option<W>) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let roster = cfg.roster()?;
    let datasets = cfg.load_datasets()?;
    let mut splits = Vec::new();
    for ds in &datasets {
        splits.extend(prepare_splits(ds, cfg.seed, cfg.repetitions)?);
    }
    let jobs: Vec<(usize, usize)> = (0..splits.len()).flat_map(|s| (0..roster.len()).map(move |m| (s, m))).collect();
    let total = jobs.len();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let mut writer = sink.map(RecordWriter::new).transpose()?;
    let (tx, rx) = mpsc::channel::<(usize, TrialRecord)>();

    let mut records = Vec::with_capacity(total);
    std::thread::scope(|scope| -> Result<()> {
        let (splits, roster, jobs) = (&splits, &roster, &jobs);
        scope.spawn(move || {
            pool.install(|| {
                jobs.par_iter().enumerate().for_each_with(tx, |tx, (k, &(s, m))| {
                    let rec = run_trial(&roster[m], &splits[s], cfg.seed, cfg.timing);
                    // The receiver only hangs up on a write error, which is reported below.
                    let _ = tx.send((k, rec));
                });
            });
        });
        let mut pending = BTreeMap::new();
        for (k, rec) in rx {
            pending.insert(k, rec);
            while let Some(rec) = pending.remove(&records.len()) {
                if let Some(w) = writer.as_mut() {
                    w.write(&rec)?;
                }
                log::info!(
                    "{}/{} {} rep {} fold {} {}: gm {:.4}",
                    records.len() + 1,
                    total,
                    rec.dataset,
                    rec.rep,
                    rec.fold,
                    rec.method,
                    rec.gm
                );
                records.push(rec);
            }
        }
        Ok(())
    })?;
    Ok(records)
}
