use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gaitsig::export::{self, read_feature_csv, read_scalogram_csv};
use gaitsig::features::Level;
use gaitsig::gait::JointSide;
use gaitsig::ingest;
use gaitsig::pipeline::{
    eval_stage, features_from_scalograms, map_stage, run_pipeline, write_features, write_resolved_config,
    write_scalograms, write_subjects, RunConfig, ScalesConfig, SynthConfig,
};
use gaitsig::synth::generate;
use gaitsig::wavelet::Boundary;

#[derive(Parser)]
#[command(name = "gaitsig", version, about = "Wavelet and self-organizing-map analysis of gait cycles")]
struct Cli {
    /// TOML run configuration supplying defaults for every subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for the generator, the map and the validation folds.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a CSV or JSON dataset and write it back as normalized subjects.csv.
    Ingest { input: PathBuf },
    /// Generate a synthetic dataset as subjects.csv.
    Synth {
        #[arg(long, value_enum, default_value = "spastic")]
        preset: Preset,
        /// Subjects per class.
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Transform a dataset into per joint-side scalograms under `<out>/scalograms`.
    Cwt {
        input: PathBuf,
        #[command(flatten)]
        joints: JointsArg,
        /// `min:max:count` for log spacing, or a comma-separated list.
        #[arg(long, value_parser = parse_scales)]
        scales: Option<ScalesConfig>,
        #[arg(long, value_enum)]
        boundary: Option<BoundaryArg>,
        /// Skip the PGM images.
        #[arg(long)]
        no_pgm: bool,
    },
    /// Build feature vectors from scalogram CSV files or directories of them.
    Features {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        joints: JointsArg,
        #[arg(long)]
        level: Option<Level>,
        #[arg(long)]
        zscore: bool,
    },
    /// Train a map on a feature matrix and write its U-Matrix and clusters.
    Train {
        features: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Leave-one-out evaluation of a feature matrix.
    Eval {
        features: PathBuf,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Every stage from data to evaluation.
    Run {
        #[arg(long, value_parser = parse_scales)]
        scales: Option<ScalesConfig>,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        level: Option<Level>,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Spastic,
    Laterality,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Zero,
    Periodic,
}

#[derive(Args)]
struct JointsArg {
    /// Comma-separated joint-sides such as `hip:right,knee:left`.
    #[arg(long, value_delimiter = ',')]
    joints: Option<Vec<JointSide>>,
}

#[derive(Args)]
struct MapArgs {
    /// Map size as `ROWSxCOLS`.
    #[arg(long, value_parser = parse_dims)]
    map_dims: Option<(usize, usize)>,
    #[arg(long)]
    epochs: Option<usize>,
}

fn parse_scales(s: &str) -> std::result::Result<ScalesConfig, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [min, max, count] => Ok(ScalesConfig::LogSpaced {
            min: num(min)?,
            max: num(max)?,
            count: count.trim().parse().map_err(|e| format!("{count:?}: {e}"))?,
        }),
        [list] => Ok(ScalesConfig::List(list.split(',').map(num).collect::<Result<_, _>>()?)),
        _ => Err("expected min:max:count or a comma-separated list".into()),
    }
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or("expected ROWSxCOLS")?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((n(r)?, n(c)?))
}

impl MapArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some((rows, cols)) = self.map_dims {
            cfg.som.rows = rows;
            cfg.som.cols = cols;
        }
        if let Some(e) = self.epochs {
            cfg.som.epochs = e;
        }
    }
}

impl JointsArg {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(j) = &self.joints {
            cfg.features.joints = j.clone();
        }
    }
}

fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).with_context(|| "config stage failed")?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    Ok(cfg)
}

/// Validates the parameters, creates the output directory and echoes the config into it.
fn prepare(cfg: &RunConfig) -> Result<&Path> {
    cfg.validate_params().context("config stage failed")?;
    let out = cfg.output.dir.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_resolved_config(cfg, out).context("config stage failed")?;
    Ok(out)
}

fn scalogram_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            found.retain(|f| f.extension().is_some_and(|x| x == "csv"));
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    if files.is_empty() {
        bail!("no scalogram files found");
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = base_config(&cli)?;
    match &cli.command {
        Command::Ingest { input } => {
            let out = prepare(&cfg)?;
            let subjects = ingest::ingest(input).context("data stage failed")?;
            write_subjects(out, &subjects).context("data stage failed")?;
            println!("{} subjects -> {}", subjects.len(), out.join("subjects.csv").display());
        }
        Command::Synth { preset, n } => {
            cfg.input = None;
            cfg.synth = Some(match preset {
                Preset::Spastic => SynthConfig::Spastic { n_subjects: *n },
                Preset::Laterality => SynthConfig::Laterality { n_subjects: *n },
            });
            cfg.validate().context("config stage failed")?;
            let out = prepare(&cfg)?;
            let spec = cfg.synth.as_ref().expect("set above").spec(cfg.seed);
            let subjects = generate(&spec).context("data stage failed")?;
            write_subjects(out, &subjects).context("data stage failed")?;
            println!("{} subjects -> {}", subjects.len(), out.join("subjects.csv").display());
        }
        Command::Cwt {
            input,
            joints,
            scales,
            boundary,
            no_pgm,
        } => {
            joints.apply(&mut cfg);
            if let Some(s) = scales {
                cfg.wavelet.scales = s.clone();
            }
            if let Some(b) = boundary {
                cfg.wavelet.boundary = match b {
                    BoundaryArg::Zero => Boundary::Zero,
                    BoundaryArg::Periodic => Boundary::Periodic,
                };
            }
            if *no_pgm {
                cfg.output.pgm = false;
            }
            let out = prepare(&cfg)?;
            let subjects = ingest::ingest(input).context("data stage failed")?;
            let cwt = cfg.wavelet.cwt().context("config stage failed")?;
            let dir = out.join("scalograms");
            write_scalograms(&subjects, &cwt, &cfg, &dir).context("cwt stage failed")?;
            println!(
                "{} scalograms -> {}",
                subjects.len() * cfg.features.joints.len(),
                dir.display()
            );
        }
        Command::Features {
            inputs,
            joints,
            level,
            zscore,
        } => {
            joints.apply(&mut cfg);
            if let Some(l) = level {
                cfg.features.level = *l;
            }
            cfg.features.zscore |= *zscore;
            let out = prepare(&cfg)?;
            let records = scalogram_files(inputs)
                .context("features stage failed")?
                .iter()
                .map(|p| {
                    let f = export::open(p)?;
                    read_scalogram_csv(f).map_err(|e| gaitsig::Error::Schema(format!("{}: {e}", p.display())))
                })
                .collect::<gaitsig::Result<Vec<_>>>()
                .context("features stage failed")?;
            let fm = features_from_scalograms(records, &cfg.features).context("features stage failed")?;
            let path = out.join("features.csv");
            write_features(&path, &fm).context("features stage failed")?;
            println!("{} vectors of length {} -> {}", fm.rows.len(), fm.dim(), path.display());
        }
        Command::Train {
            features,
            map,
            threshold,
        } => {
            map.apply(&mut cfg);
            if threshold.is_some() {
                cfg.clusters.threshold = *threshold;
            }
            let out = prepare(&cfg)?;
            let fm = export::open(features)
                .and_then(read_feature_csv)
                .context("features stage failed")?;
            let s = map_stage(&fm, &cfg, out)?;
            println!(
                "quantization error {:.4}  clusters {} (threshold {:.4})",
                s.quantization_error, s.clusters, s.threshold
            );
        }
        Command::Eval { features, map } => {
            map.apply(&mut cfg);
            let out = prepare(&cfg)?;
            let fm = export::open(features)
                .and_then(read_feature_csv)
                .context("features stage failed")?;
            let report = eval_stage(&fm, &cfg, out)?;
            print!("{report}");
        }
        Command::Run {
            scales,
            map,
            level,
            threshold,
        } => {
            if let Some(s) = scales {
                cfg.wavelet.scales = s.clone();
            }
            map.apply(&mut cfg);
            if let Some(l) = level {
                cfg.features.level = *l;
            }
            if threshold.is_some() {
                cfg.clusters.threshold = *threshold;
            }
            if cfg.input.is_none() && cfg.synth.is_none() {
                bail!("config stage failed: run needs a --config with an [input] or [synth] section");
            }
            let summary = run_pipeline(&cfg)?;
            print!("{summary}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already embed their cause, so skip links that repeat.
            let mut msg = String::new();
            for cause in e.chain().map(ToString::to_string) {
                if !msg.contains(&cause) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&cause);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
