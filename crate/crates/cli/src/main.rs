use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use bblr::data::{
    load_csv_with_manifest, load_dataset, parse_libsvm, resolve_dataset, Dataset, Scaler, SplitPlan, SplitScheme,
    DATA_DIR_ENV,
};
use bblr::eval::{
    cross_validate_many, fit_method, noise_sweep, pooled_against, reproduce_tables, sparsity_sweep, with_jobs,
    CvOptions, CvReport, Method, MethodSettings, TableId, TableOptions, Trained,
};
use bblr::kernel::{SavedKernelModel, TrainInputsRef};
use bblr::losses::{loss_curve, LossKind, PlateauConstants, Target};
use bblr::model::SavedLinearModel;
use bblr::optim::SlaConfig;
use bblr::BBHyper;

#[derive(Parser)]
#[command(name = "bblr", version, about = "Beta-Bernoulli logistic classifiers: training and experiments")]
struct Cli {
    /// Directory searched for named datasets.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,
    /// Threads for folds and grid cells.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Libsvm,
}

#[derive(clap::Args, Clone, Serialize, Deserialize, Debug)]
struct Common {
    /// Seed for splits, inner validation and label noise.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON file with method settings, or a bare optimizer config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fixed L2 penalty instead of inner validation.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit one method on a whole dataset and save the model.
    Train {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value = "bblr3")]
        method: Method,
        #[command(flatten)]
        common: Common,
    },
    /// Repeated k-fold cross-validation of one or more methods.
    Cv {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Comma-separated; pooled McNemar tests compare each to the first.
        #[arg(long, value_delimiter = ',', default_value = "bblr3")]
        method: Vec<Method>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        /// Share of training labels flipped in each fold.
        #[arg(long)]
        noise: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run benchmark table protocols and check them against the reference
    /// numbers. Exits non-zero unless every band passes.
    ReproduceTable {
        #[arg(long, value_delimiter = ',', default_value = "train-01,clean-cv,noisy-cv,kernel-compare,sparse-kernel")]
        id: Vec<String>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write loss curves as CSV, one file per sharpness.
    PlotLoss {
        #[arg(long, value_enum, default_value = "bbgamma")]
        kind: KindArg,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        gamma: Vec<f64>,
        /// Plateau floor of the positive class.
        #[arg(long, default_value_t = 0.0098)]
        a: f64,
        /// Plateau span.
        #[arg(long, default_value_t = 0.9804)]
        b: f64,
        /// Use the negative-class loss.
        #[arg(long)]
        negative: bool,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        z_min: f64,
        #[arg(long, default_value_t = 4.0)]
        z_max: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Support counts of L2 and sparse kernel models at growing training sizes.
    SparsitySweep {
        #[arg(long, default_value = "banana")]
        dataset: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_delimiter = ',', default_value = "100,200,400,800")]
        sizes: Vec<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-validation under increasing training-label noise.
    NoiseSweep {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_delimiter = ',', default_value = "lr,bblr3")]
        method: Vec<Method>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.2")]
        rates: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the command recorded in a run manifest with its settings.
    Rerun {
        manifest: PathBuf,
        /// Write outputs here instead of the recorded directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Logistic,
    Hinge,
    ZeroOne,
    Sigmoid,
    GenLogistic,
    Bbgamma,
}

/// Everything needed to reproduce a run; written into every output directory.
#[derive(Serialize, Deserialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    datasets: Vec<String>,
    methods: Vec<Method>,
    seed: Option<u64>,
    split_plan: Option<SplitPlan>,
    settings: MethodSettings,
    out: PathBuf,
}

const SETTINGS_KEYS: [&str; 7] = ["sla", "slam", "bblr4", "lambdas", "fixed_lambda", "inner_folds", "kernel"];

/// Settings from a config file: a run manifest, a settings object, or a bare
/// optimizer config. Flags are applied afterwards.
fn load_settings(common: &Common) -> Result<MethodSettings> {
    let mut settings = match &common.config {
        None => MethodSettings::default(),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let v: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            let obj = v.as_object().context("config must be a JSON object")?;
            if let Some(s) = obj.get("settings") {
                serde_json::from_value(s.clone())?
            } else if obj.keys().any(|k| SETTINGS_KEYS.contains(&k.as_str())) {
                serde_json::from_value(v)?
            } else {
                MethodSettings {
                    sla: serde_json::from_value::<SlaConfig>(v)?,
                    ..MethodSettings::default()
                }
            }
        }
    };
    if let Some(l) = common.lambda {
        settings.fixed_lambda = Some(l);
    }
    settings.validate()?;
    Ok(settings)
}

fn load(name: &str, format: Option<Format>, data_dir: Option<&Path>) -> Result<(PathBuf, Dataset)> {
    let path = resolve_dataset(name, data_dir)?;
    let data = match format {
        None => load_dataset(&path)?,
        Some(Format::Csv) => load_csv_with_manifest(&path)?,
        Some(Format::Libsvm) => parse_libsvm(&fs::read_to_string(&path)?)?,
    };
    Ok((path, data))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)?).with_context(|| format!("writing {}", path.display()))
}

fn kfold(folds: usize, reps: usize, seed: u64) -> SplitPlan {
    SplitPlan {
        seed,
        scheme: SplitScheme::KFold { k: folds, repetitions: reps },
        stratified: true,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.3}"))
}

fn cv_summary(reports: &[CvReport], data: &Dataset) -> Result<String> {
    let mut s = String::from("method\tmean_error_percent\tmean_zero_one\tfolds\tfailed\tmean_support\tmcnemar_z_vs_first\n");
    for r in reports {
        let z = if r.method == reports[0].method {
            "-".into()
        } else {
            pooled_against(&reports[0], r, data).map_or_else(|_| "-".into(), |m| format!("{:.3}", m.z))
        };
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{z}",
            r.method,
            fmt_opt(r.mean_error_percent()),
            fmt_opt(r.mean_zero_one()),
            r.folds.len(),
            r.failures.len(),
            fmt_opt(r.mean_support())
        )?;
    }
    Ok(s)
}

fn save_model(dir: &Path, dataset: &Path, trained: &Trained, scaler: Scaler, n: usize) -> Result<()> {
    match trained {
        Trained::Linear {
            model,
            hyper,
            lambda,
            report,
        } => {
            let gamma = report.as_ref().and_then(|r| r.final_gamma()).unwrap_or(1.0);
            let saved = SavedLinearModel {
                weights: model.weights.clone(),
                hyper: hyper.unwrap_or_else(|| BBHyper::logistic(gamma)),
                lambda: Some(*lambda),
                scaler: Some(scaler),
            };
            write_json(&dir.join("model.json"), &saved)?;
            if let Some(r) = report {
                write_json(&dir.join("fit_report.json"), r)?;
            }
        }
        Trained::Kernel {
            model,
            hyper,
            report,
            mixture,
            support,
            ..
        } => {
            let saved = SavedKernelModel {
                alphas: model.alphas.clone(),
                spec: model.spec,
                train_inputs_ref: TrainInputsRef {
                    dataset: dataset.display().to_string(),
                    rows: (0..n).collect(),
                },
                hyper: *hyper,
                mixture_prior: mixture.clone(),
                scaler: Some(scaler),
            };
            write_json(&dir.join("model.json"), &saved)?;
            write_json(&dir.join("fit_report.json"), report)?;
            println!("support count {support}");
        }
    }
    Ok(())
}

fn plateau_kind(kind: KindArg, a: f64, b: f64, negative: bool) -> Result<LossKind> {
    Ok(match kind {
        KindArg::Logistic => LossKind::Logistic,
        KindArg::Hinge => LossKind::Hinge,
        KindArg::ZeroOne => LossKind::ZeroOne,
        KindArg::Sigmoid => LossKind::Sigmoid,
        KindArg::GenLogistic => LossKind::GenLogistic,
        KindArg::Bbgamma => LossKind::BetaBernoulli {
            plateau: PlateauConstants::new(a, b)?,
            target: if negative { Target::Negative } else { Target::Positive },
        },
    })
}

fn manifest(
    command: &str,
    argv: &[String],
    datasets: Vec<String>,
    methods: Vec<Method>,
    seed: Option<u64>,
    split_plan: Option<SplitPlan>,
    settings: MethodSettings,
    out: &Path,
) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_json(
        &out.join("manifest.json"),
        &RunManifest {
            command: command.into(),
            argv: argv.to_vec(),
            datasets,
            methods,
            seed,
            split_plan,
            settings,
            out: out.to_path_buf(),
        },
    )
}

/// `argv` without occurrences of `flag` and its value.
fn strip_flag(argv: &[String], flag: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == flag {
            skip = true;
        } else if !a.starts_with(&format!("{flag}=")) {
            out.push(a.clone());
        }
    }
    out
}

/// Returns whether every checked band passed.
fn run(cli: Cli, argv: &[String]) -> Result<bool> {
    let data_dir = cli.data_dir.as_deref();
    let jobs = cli.jobs;
    match cli.cmd {
        Cmd::Train {
            dataset,
            format,
            method,
            common,
        } => {
            let settings = load_settings(&common)?;
            let (path, data) = load(&dataset, format, data_dir)?;
            let scaler = Scaler::fit(&data)?;
            let scaled = scaler.transform(&data)?;
            let out = &common.out;
            manifest("train", argv, vec![path.display().to_string()], vec![method], Some(common.seed), None, settings.clone(), out)?;
            let trained = with_jobs(jobs, || fit_method(method, &scaled, &settings, common.seed))??;
            let pred = trained.predict(&scaled)?;
            let wrong = pred.iter().zip(scaled.labels()).filter(|(p, y)| p != y).count();
            println!("{method} on {}: training 0-1 loss {wrong} of {}", path.display(), data.len());
            save_model(out, &path, &trained, scaler, data.len())?;
            Ok(true)
        }
        Cmd::Cv {
            dataset,
            format,
            method,
            folds,
            reps,
            noise,
            common,
        } => {
            let settings = load_settings(&common)?;
            let (path, data) = load(&dataset, format, data_dir)?;
            let plan = kfold(folds, reps, common.seed);
            let out = &common.out;
            manifest("cv", argv, vec![path.display().to_string()], method.clone(), Some(common.seed), Some(plan.clone()), settings.clone(), out)?;
            let opts = CvOptions {
                noise_rate: noise,
                standardize: true,
            };
            let reports = with_jobs(jobs, || cross_validate_many(&data, &plan, &method, &settings, &opts))??;
            for r in &reports {
                for f in &r.failures {
                    eprintln!("{}: fold {}/{} failed: {}", r.method, f.repetition, f.index, f.message);
                }
            }
            let summary = cv_summary(&reports, &data)?;
            print!("{summary}");
            fs::write(out.join("metrics.tsv"), summary)?;
            write_json(&out.join("metrics.json"), &reports)?;
            Ok(true)
        }
        Cmd::ReproduceTable { id, reps, folds, common } => {
            let ids = id.iter().map(|s| s.parse::<TableId>()).collect::<bblr::Result<Vec<_>>>()?;
            let settings = load_settings(&common)?;
            let opts = TableOptions {
                data_dir: data_dir.map(Path::to_path_buf),
                repetitions: reps,
                folds,
                seed: common.seed,
                settings: settings.clone(),
                ..TableOptions::default()
            };
            let out = &common.out;
            manifest(
                "reproduce-table",
                argv,
                opts.datasets.clone(),
                Vec::new(),
                Some(common.seed),
                Some(kfold(folds, reps, common.seed)),
                settings,
                out,
            )?;
            let tables = with_jobs(jobs, || reproduce_tables(&ids, &opts))??;
            let mut all = true;
            for t in &tables {
                let tsv = t.to_tsv();
                println!("{tsv}");
                fs::write(out.join(format!("{}.tsv", t.id.name())), tsv)?;
                write_json(&out.join(format!("{}.json", t.id.name())), t)?;
                all &= t.passed();
            }
            Ok(all)
        }
        Cmd::PlotLoss {
            kind,
            gamma,
            a,
            b,
            negative,
            z_min,
            z_max,
            points,
            out,
        } => {
            let loss = plateau_kind(kind, a, b, negative)?;
            manifest("plot-loss", argv, Vec::new(), Vec::new(), None, None, MethodSettings::default(), &out)?;
            for g in gamma {
                let curve = loss_curve(loss, g, z_min, z_max, points)?;
                let mut csv = String::from("z,loss");
                let rescale = match loss {
                    LossKind::BetaBernoulli { plateau, .. } if plateau.a > 0.0 => Some(plateau.zero_one_rescale()),
                    _ => None,
                };
                csv.push_str(if rescale.is_some() { ",rescaled\n" } else { "\n" });
                for (z, l) in curve {
                    match rescale {
                        Some((s, c)) => writeln!(csv, "{z},{l},{}", s * (l - c))?,
                        None => writeln!(csv, "{z},{l}")?,
                    }
                }
                let file = out.join(format!("loss_{}_gamma_{g}.csv", loss.name()));
                fs::write(&file, csv)?;
                println!("{}", file.display());
            }
            Ok(true)
        }
        Cmd::SparsitySweep {
            dataset,
            format,
            sizes,
            common,
        } => {
            let settings = load_settings(&common)?;
            let (path, data) = load(&dataset, format, data_dir)?;
            let out = &common.out;
            manifest(
                "sparsity-sweep",
                argv,
                vec![path.display().to_string()],
                vec![Method::Kbblr, Method::SparseKbblr],
                Some(common.seed),
                None,
                settings.clone(),
                out,
            )?;
            let points = with_jobs(jobs, || sparsity_sweep(&data, &sizes, &settings, common.seed))??;
            let mut csv = String::from("n,sparse_support,l2_support\n");
            for p in &points {
                writeln!(csv, "{},{},{}", p.n, p.sparse_support, p.l2_support)?;
            }
            print!("{csv}");
            fs::write(out.join("sparsity.csv"), csv)?;
            Ok(true)
        }
        Cmd::NoiseSweep {
            dataset,
            format,
            method,
            rates,
            folds,
            reps,
            common,
        } => {
            let settings = load_settings(&common)?;
            let (path, data) = load(&dataset, format, data_dir)?;
            let plan = kfold(folds, reps, common.seed);
            let out = &common.out;
            manifest("noise-sweep", argv, vec![path.display().to_string()], method.clone(), Some(common.seed), Some(plan.clone()), settings.clone(), out)?;
            let points = with_jobs(jobs, || noise_sweep(&data, &rates, &method, &plan, &settings))??;
            let mut tsv = String::from("rate\tmethod\tmean_error_percent\tmean_zero_one\tfailed\n");
            for p in &points {
                for r in &p.reports {
                    writeln!(
                        tsv,
                        "{}\t{}\t{}\t{}\t{}",
                        p.rate,
                        r.method,
                        fmt_opt(r.mean_error_percent()),
                        fmt_opt(r.mean_zero_one()),
                        r.failures.len()
                    )?;
                }
            }
            print!("{tsv}");
            fs::write(out.join("noise.tsv"), tsv)?;
            write_json(&out.join("noise.json"), &points)?;
            Ok(true)
        }
        Cmd::Rerun { manifest, out } => {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let m: RunManifest = serde_json::from_str(&text)?;
            if m.argv.iter().any(|a| a == "rerun") {
                bail!("manifest records a rerun");
            }
            let mut argv = strip_flag(&strip_flag(&m.argv, "--config"), "--out");
            // the recorded settings replace any config file named on the command line
            if m.command != "plot-loss" {
                argv.push("--config".into());
                argv.push(manifest.display().to_string());
            }
            argv.push("--out".into());
            argv.push(out.unwrap_or(m.out).display().to_string());
            let cli = Cli::try_parse_from(&argv)?;
            run(cli, &argv)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, &argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more acceptance bands failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
