use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gmselect_bench::config::ExperimentConfig;
use gmselect_bench::experiment::{read_records, run_experiment};
use gmselect_bench::report::{Report, DEFAULT_ALPHA};
use gmselect_bench::synthetic::standard_suite;
use gmselect_core::selection::ReParams;
use gmselect_core::Dataset;
use gmselect_theory::bayes::{cb_bb_demo, DemoParams, DemoResult};
use gmselect_theory::boundary::{best_boundary_1d, curve_csv, gm_curve};
use gmselect_theory::exhaustive::{construct_nonmonotonic_set, ConstructionParams, RecordedSet};
use gmselect_theory::removal::{removal_study, StudyParams};
use gmselect_theory::voronoi::lemma_study;
use gmselect_theory::{Density, DensityModel};

#[derive(Parser)]
#[command(name = "gmselect", version, about = "Instance selection for imbalanced 1-NN classification, judged by GM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a 5x2 cross-validation experiment; writes trials.csv and report.md.
    Run {
        /// Experiment TOML; without one, the ten-set synthetic suite is run
        /// with the standard roster.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory (default: config value, GMSELECT_OUT, then "results").
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall time per trial; makes the CSV non-reproducible.
        #[arg(long)]
        timing: bool,
    },
    /// Build the win table, sign-test matrix and category summary from a trials CSV.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Number of comparisons to correct for (default k(k-1)).
        #[arg(long)]
        bonferroni_m: Option<usize>,
        /// Write Markdown here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical experiments on asymptotic GM.
    Theory {
        #[command(subcommand)]
        command: Theory,
    },
    /// Validate KEEL (or CSV) files and summarise them.
    Parse {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Theory {
    /// Exact GM of a threshold classifier on a piecewise-uniform 1D model.
    Boundary1d {
        /// Model TOML (default: U[0,9] positives against U[3,10] negatives).
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// Write the GM curve CSV here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Bayes, balanced Bayes and random editing on a two-mode Gaussian mixture.
    DemoGaussian {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, default_value_t = 9000)]
        test_size: usize,
        /// Random-editing prototypes.
        #[arg(long, default_value_t = 25)]
        prototypes: usize,
        /// Random-editing trials; 0 skips random editing.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Best reference subset of a small point set, per cardinality.
    Exhaustive {
        /// Recorded point set TOML (default: the bundled 15-point set).
        #[arg(long, conflicts_with = "construct")]
        points: Option<PathBuf>,
        /// Search for a new set with a non-monotonic best-GM curve.
        #[arg(long)]
        construct: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Save the constructed set as TOML.
        #[arg(long, requires = "construct")]
        save: Option<PathBuf>,
    },
    /// Check that removing a prototype only grows the other Voronoi cells.
    LemmaCheck {
        #[arg(long, default_value_t = 100)]
        configs: usize,
        #[arg(long, default_value_t = 10_000)]
        probes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compare predicted and re-estimated GM change from removing a prototype.
    Prop1 {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 20_000)]
        samples: usize,
        #[arg(long, default_value_t = 5.0)]
        z: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, seed, jobs, out, timing } => cmd_run(config, seed, jobs, out, timing),
        Command::Report { records, alpha, bonferroni_m, out } => {
            let text = fs::read_to_string(&records).with_context(|| format!("reading {}", records.display()))?;
            let report = Report::build(&read_records(&text)?, alpha, bonferroni_m)?;
            emit(out.as_deref(), &report.to_markdown())
        }
        Command::Theory { command } => cmd_theory(command),
        Command::Parse { files } => {
            let mut bad = 0;
            for f in &files {
                match Dataset::load(f) {
                    Ok(ds) => println!(
                        "{}: {} instances ({} positive '{}', {} negative '{}'), {} numeric + {} nominal attributes, IR {:.2}",
                        f.display(),
                        ds.len(),
                        ds.n_pos(),
                        ds.positive_label,
                        ds.n_neg(),
                        ds.negative_label,
                        ds.n_numeric(),
                        ds.n_nominal(),
                        ds.imbalance_ratio()
                    ),
                    Err(e) => {
                        bad += 1;
                        eprintln!("{}: {e}", f.display());
                    }
                }
            }
            if bad > 0 {
                bail!("{bad} of {} files failed to parse", files.len());
            }
            Ok(())
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_run(
    config: Option<PathBuf>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<PathBuf>,
    timing: bool,
) -> Result<()> {
    let mut cfg = match &config {
        Some(p) => ExperimentConfig::load(p)?,
        None => {
            let mut cfg = ExperimentConfig { synthetic: standard_suite(1), ..Default::default() };
            cfg.out = std::env::var_os(gmselect_bench::config::OUT_ENV).map(PathBuf::from);
            cfg
        }
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    cfg.timing |= timing;
    let dir = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join("trials.csv");
    let file = File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    let records = run_experiment(&cfg, Some(BufWriter::new(file)))?;
    let failed = records.iter().filter(|r| r.failed).count();
    eprintln!("{} trials written to {} ({failed} failed)", records.len(), csv_path.display());
    let report = Report::build(&records, DEFAULT_ALPHA, None)?;
    let md = dir.join("report.md");
    fs::write(&md, report.to_markdown()).with_context(|| format!("writing {}", md.display()))?;
    eprintln!("report written to {}", md.display());
    Ok(())
}

fn load_model(path: Option<&Path>, default: fn() -> DensityModel) -> Result<DensityModel> {
    Ok(match path {
        Some(p) => DensityModel::load(p)?,
        None => default(),
    })
}

fn cmd_theory(command: Theory) -> Result<()> {
    match command {
        Theory::Boundary1d { model, steps, csv } => {
            let model = load_model(model.as_deref(), DensityModel::uniform_overlap)?;
            let best = best_boundary_1d(&model)?;
            let (lo, hi) = support(&model)?;
            let curve = gm_curve(&model, lo, hi, steps)?;
            emit(csv.as_deref(), &curve_csv(&curve))?;
            eprintln!("best boundary b* = {} with TPR {:.6}, TNR {:.6}, GM {:.6}", best.b, best.tpr, best.tnr, best.gm);
            Ok(())
        }
        Theory::DemoGaussian { model, seeds, test_size, prototypes, trials } => {
            let model = load_model(model.as_deref(), DensityModel::two_mode_mixture)?;
            let params = DemoParams {
                test_size,
                random_edit: (trials > 0).then_some(ReParams { size: prototypes, trials }),
                ..Default::default()
            };
            println!("{}", DemoResult::csv_header());
            let mut results = Vec::new();
            for seed in 0..seeds {
                let r = cb_bb_demo(&model, &params, seed)?;
                println!("{}", r.csv_row());
                results.push(r);
            }
            let n = results.len().max(1) as f64;
            let mean = |f: fn(&DemoResult) -> f64| results.iter().map(f).sum::<f64>() / n;
            eprintln!("mean GM: Bayes {:.4}, balanced Bayes {:.4}", mean(|r| r.gm_cb), mean(|r| r.gm_bb));
            if params.random_edit.is_some() {
                eprintln!("mean GM: random editing {:.4}", mean(|r| r.gm_re.unwrap_or(f64::NAN)));
            }
            Ok(())
        }
        Theory::Exhaustive { points, construct, seed, save } => {
            let (set, result) = if construct {
                let (set, result) = construct_nonmonotonic_set(&ConstructionParams { seed, ..Default::default() })?;
                eprintln!("found a qualifying set on attempt {}", set.attempt);
                if let Some(p) = &save {
                    fs::write(p, set.to_toml()).with_context(|| format!("writing {}", p.display()))?;
                }
                (set, result)
            } else {
                let set = match &points {
                    Some(p) => {
                        toml::from_str(&fs::read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?
                    }
                    None => RecordedSet::builtin(),
                };
                let result = set.search()?;
                (set, result)
            };
            print!("{}", result.curve_csv());
            eprintln!(
                "{} points, {} subsets: full-set GM {:.4}, best GM {:.4} with {} points; non-monotonic at k = {:?}",
                set.points.len(),
                result.evaluated,
                result.full_gm,
                result.best.gm,
                result.best.subset.len(),
                result.non_monotonic_steps()
            );
            Ok(())
        }
        Theory::LemmaCheck { configs, probes, seed } => {
            let s = lemma_study(configs, probes, seed)?;
            println!(
                "{} configurations, {} probes: {} inclusion violations, {} neighbours without captured probes",
                s.configurations, s.probes, s.inclusion_violations, s.expansion_failures
            );
            if s.inclusion_violations > 0 {
                bail!("inclusion violated");
            }
            Ok(())
        }
        Theory::Prop1 { cases, samples, z, seed } => {
            let r = removal_study(&StudyParams {
                target_cases: cases,
                samples,
                z_threshold: z,
                seed,
                ..Default::default()
            })?;
            println!(
                "{} configurations, {} removals, {} significant, {} confirmed ({:.2}%)",
                r.configurations,
                r.cases,
                r.significant,
                r.confirmed,
                100.0 * r.confirmation_rate()
            );
            Ok(())
        }
    }
}

/// Span of both class supports, padded by one unit on each side.
fn support(model: &DensityModel) -> Result<(f64, f64)> {
    let (Density::Piecewise(p), Density::Piecewise(n)) = (&model.positive, &model.negative) else {
        bail!("boundary analysis needs piecewise-uniform 1D densities");
    };
    let segs = p.segments.iter().chain(&n.segments);
    let lo = segs.clone().map(|s| s.lo).fold(f64::INFINITY, f64::min);
    let hi = segs.map(|s| s.hi).fold(f64::NEG_INFINITY, f64::max);
    Ok((lo - 1.0, hi + 1.0))
}
