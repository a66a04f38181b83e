use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use cod::classifier::{detect, score_outlierness, train_default_model, OutlierModel};
use cod::dataset::{load_dataset, normalize_features, split_views, write_dataset, LabelColumn};
use cod::eval::{auc, run_experiment, run_multiview_experiment, summary_table, write_reports_csv};
use cod::pipeline::{analyze_view, multiview_outlierness, single_view_features, PipelineParams};
use cod::simulate::{build_experiment_instance, OutlierConfig, CONFIG_NAMES};
use cod::{CodError, LabeledDataset, OutliernessFeatures};

#[derive(Parser)]
#[command(name = "cod", version, about = "Community-based outlier detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a CSV dataset, print a summary, optionally write it back normalized.
    Ingest {
        input: PathBuf,
        #[command(flatten)]
        opts: CommonArgs,
    },
    /// Inject class and attribute outliers; writes CSV with an `__outlier` column.
    Inject {
        input: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CONFIG_NAMES))]
        config: String,
        #[command(flatten)]
        opts: CommonArgs,
    },
    /// Compute outlierness features `sample_index,phi1,phi2,attribute_flag`.
    Features {
        input: PathBuf,
        /// Also write the mutual kNN graph as `i j weight` lines (single view).
        #[arg(long)]
        edge_list: Option<PathBuf>,
        /// Also write the final communities as `id origin members` lines (single view).
        #[arg(long)]
        community_dump: Option<PathBuf>,
        #[command(flatten)]
        opts: CommonArgs,
    },
    /// Train the outlier model on a synthetic corpus and save it as JSON.
    TrainModel {
        #[command(flatten)]
        opts: CommonArgs,
    },
    /// Score a dataset: `sample_index,phi1,phi2,score,flag`.
    Detect {
        input: PathBuf,
        /// Decision threshold on the outlier probability.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[command(flatten)]
        opts: CommonArgs,
    },
    /// Run the repeated injection + AUC protocol on a clean dataset.
    Evaluate {
        input: PathBuf,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(CONFIG_NAMES))]
        config: String,
        #[arg(long, default_value_t = 50)]
        repeats: usize,
        /// Name used in the report (defaults to the file stem).
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        opts: CommonArgs,
    },
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat JSON file with the same keys as these flags.
    #[arg(long)]
    config_file: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    percentile: Option<f64>,
    #[arg(long)]
    entropy_tol: Option<f64>,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    views: Option<usize>,
    /// Label column: header name or 0-based index (default: last column).
    #[arg(long)]
    label_col: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    k: Option<usize>,
    q: Option<usize>,
    percentile: Option<f64>,
    #[serde(alias = "entropy_tol")]
    entropy_tol: Option<f64>,
    #[serde(alias = "no_normalize")]
    no_normalize: Option<bool>,
    seed: Option<u64>,
    views: Option<usize>,
    #[serde(alias = "label_col")]
    label_col: Option<String>,
    threads: Option<usize>,
    model: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// Flags layered over the config file over defaults.
struct RunConfig {
    params: PipelineParams,
    seed: u64,
    views: usize,
    label_col: LabelColumn,
    threads: Option<usize>,
    model: Option<PathBuf>,
    out: Option<PathBuf>,
}

impl RunConfig {
    fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CodError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let defaults = PipelineParams::default();
        let params = PipelineParams {
            k: args.k.or(file.k).unwrap_or(defaults.k),
            q: args.q.or(file.q).unwrap_or(defaults.q),
            percentile: args.percentile.or(file.percentile).unwrap_or(defaults.percentile),
            entropy_tol: args.entropy_tol.or(file.entropy_tol).unwrap_or(defaults.entropy_tol),
            normalize: !(args.no_normalize || file.no_normalize.unwrap_or(false)),
        };
        params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let views = args.views.or(file.views).unwrap_or(1);
        if views == 0 {
            return Err(CliError::Usage("--views must be >= 1".into()));
        }
        let threads = args.threads.or(file.threads);
        if threads == Some(0) {
            return Err(CliError::Usage("--threads must be >= 1".into()));
        }
        Ok(Self {
            params,
            seed: args.seed.or(file.seed).unwrap_or(0),
            views,
            label_col: args
                .label_col
                .clone()
                .or(file.label_col)
                .map(|s| s.parse().expect("infallible"))
                .unwrap_or_default(),
            threads,
            model: args.model.clone().or(file.model),
            out: args.out.clone().or(file.out),
        })
    }

    fn output(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(path) => Box::new(create(path)?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn load(&self, input: &Path) -> Result<LabeledDataset, CliError> {
        Ok(load_dataset(input, &self.label_col)?)
    }

    fn features(&self, ds: &LabeledDataset) -> Result<OutliernessFeatures, CliError> {
        Ok(if self.views > 1 {
            multiview_outlierness(&split_views(ds, self.views, self.seed)?, &self.params)?
        } else {
            single_view_features(ds, &self.params)?
        })
    }

    fn model(&self) -> Result<OutlierModel, CliError> {
        match &self.model {
            Some(path) => Ok(OutlierModel::load(path)?),
            None => {
                eprintln!("no --model given; training the default model (seed {})", self.seed);
                Ok(train_default_model(self.seed, &self.params)?.0)
            }
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| {
        CliError::Runtime(CodError::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(CodError),
}

impl From<CodError> for CliError {
    fn from(e: CodError) -> Self {
        CliError::Runtime(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(CodError::Io {
            path: "<output>".into(),
            source: e,
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let opts = match &cli.command {
        Command::Ingest { opts, .. }
        | Command::Inject { opts, .. }
        | Command::Features { opts, .. }
        | Command::TrainModel { opts }
        | Command::Detect { opts, .. }
        | Command::Evaluate { opts, .. } => opts,
    };
    let cfg = RunConfig::resolve(opts)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }

    match &cli.command {
        Command::Ingest { input, .. } => {
            let ds = cfg.load(input)?;
            let counts = ds.class_counts();
            eprintln!(
                "{}: {} samples, {} features, {} classes {:?}",
                input.display(),
                ds.n_samples(),
                ds.n_features(),
                ds.n_classes(),
                counts
            );
            if cfg.out.is_some() {
                let ds = if cfg.params.normalize { normalize_features(&ds)? } else { ds };
                write_dataset(cfg.output()?, &ds, None)?;
            }
        }
        Command::Inject { input, config, .. } => {
            let ds = cfg.load(input)?;
            let instance = build_experiment_instance(&ds, &OutlierConfig::named(config, cfg.seed)?)?;
            write_dataset(cfg.output()?, &instance.data, Some(&instance.truth))?;
        }
        Command::Features {
            input,
            edge_list,
            community_dump,
            ..
        } => {
            let ds = cfg.load(input)?;
            if edge_list.is_none() && community_dump.is_none() {
                cfg.features(&ds)?.write_csv(cfg.output()?)?;
                return Ok(());
            }
            if cfg.views > 1 {
                return Err(CliError::Usage("--edge-list and --community-dump need a single view".into()));
            }
            let analysis = analyze_view(&ds, &cfg.params)?;
            if let Some(path) = edge_list {
                analysis.graph.write_edge_list(create(path)?)?;
            }
            if let Some(path) = community_dump {
                analysis.communities.write_dump(create(path)?)?;
            }
            analysis.features.write_csv(cfg.output()?)?;
        }
        Command::TrainModel { .. } => {
            let path = cfg
                .model
                .clone()
                .or_else(|| cfg.out.clone())
                .ok_or_else(|| CliError::Usage("train-model needs --model or --out".into()))?;
            let (model, corpus) = train_default_model(cfg.seed, &cfg.params)?;
            model.save(&path)?;
            let scores: Vec<f64> = corpus.features.iter().map(|&p| model.probability(p)).collect();
            println!("model written to {}", path.display());
            println!("weights: {:?}", model.weights);
            println!("corpus: {}", corpus.description);
            println!("corpus AUC: {:.4}", auc(&scores, &corpus.truth)?);
        }
        Command::Detect { input, threshold, .. } => {
            let model = match &cfg.model {
                Some(path) => OutlierModel::load(path)?,
                None => return Err(CliError::Usage("detect needs --model".into())),
            };
            let ds = cfg.load(input)?;
            let features = cfg.features(&ds)?;
            let scores = score_outlierness(&model, &features)?;
            let flags = detect(&model, &features, *threshold)?;
            let mut w = csv::Writer::from_writer(cfg.output()?);
            w.write_record(["sample_index", "phi1", "phi2", "score", "flag"])
                .map_err(CodError::from)?;
            for i in 0..features.len() {
                w.write_record([
                    i.to_string(),
                    features.phi[i][0].to_string(),
                    features.phi[i][1].to_string(),
                    scores[i].to_string(),
                    flags[i].to_string(),
                ])
                .map_err(CodError::from)?;
            }
            w.flush()?;
        }
        Command::Evaluate {
            input,
            config,
            repeats,
            name,
            ..
        } => {
            let model = cfg.model()?;
            let ds = cfg.load(input)?;
            let name = name.clone().unwrap_or_else(|| {
                input
                    .file_stem()
                    .map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned())
            });
            let outlier_config = OutlierConfig::named(config, cfg.seed)?;
            let report = if cfg.views > 1 {
                run_multiview_experiment(&name, &ds, cfg.views, &outlier_config, &cfg.params, &model, *repeats)?
            } else {
                run_experiment(&name, &ds, &outlier_config, &cfg.params, &model, *repeats)?
            };
            if cfg.out.is_some() {
                write_reports_csv(cfg.output()?, std::slice::from_ref(&report))?;
            }
            print!("{}", summary_table(std::slice::from_ref(&report)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
