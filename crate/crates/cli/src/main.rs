use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use polymm_cli::stages::print_reports;
use polymm_cli::{CliError, Pipeline, PipelineConfig, StageReport};
use polymm_learn::baselines::ModelKind;

#[derive(Parser)]
#[command(name = "polymm", version, about = "Polymer P-SMILES dataset, image and instruction pipeline")]
struct Cli {
    /// Pipeline config (TOML).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output root; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Model {
    Linr,
    Mlp,
}

#[derive(Subcommand)]
enum Command {
    /// Read and canonicalize every source CSV.
    Ingest,
    /// Deduplicate and merge the ingested sources.
    Merge,
    /// Missing-value counts of the merged table.
    Stats,
    /// Seeded train/test split of the merged table.
    Split {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Compute the descriptor table.
    Descriptors,
    /// Render structure images.
    Depict {
        #[arg(long)]
        img_size: Option<u32>,
        /// Write SVG only.
        #[arg(long)]
        no_png: bool,
    },
    /// Render instruction/answer pairs as JSONL.
    GenInstructions {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        templates: Option<String>,
    },
    /// Train and score per-property baselines.
    Baseline {
        #[arg(long, value_enum)]
        model: Model,
        /// Split manifest to train on; defaults to the split stage's output.
        #[arg(long)]
        split: Option<String>,
    },
    /// Score a predictions CSV (key,property,value) against a truth table, or
    /// every baseline when no files are given.
    Evaluate {
        #[arg(long, requires = "truth")]
        predictions: Option<String>,
        #[arg(long, requires = "predictions")]
        truth: Option<String>,
    },
    /// Fine-tune adapters on a toy attention block.
    LoraDemo {
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Every stage in order.
    Run,
}

fn load(cli: &Cli, required: bool) -> Result<PipelineConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None if required => return Err(CliError::Config("--config is required for this command".into())),
        None => PipelineConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Vec<StageReport>, CliError> {
    let standalone = matches!(cli.command, Command::LoraDemo { .. } | Command::Evaluate { predictions: Some(_), .. });
    let mut cfg = load(cli, !standalone)?;
    let single = |r: Result<StageReport, CliError>| r.map(|r| vec![r]);
    match &cli.command {
        Command::Split { seed, ratio } => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.split_ratio = ratio.unwrap_or(cfg.split_ratio);
        }
        Command::Depict { img_size, no_png } => {
            cfg.img_size = img_size.unwrap_or(cfg.img_size);
            cfg.png &= !no_png;
        }
        Command::GenInstructions { seed, templates } => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            if templates.is_some() {
                cfg.templates = templates.clone();
            }
        }
        Command::LoraDemo { rank, alpha, steps, seed } => {
            let l = &mut cfg.lora;
            l.rank = rank.unwrap_or(l.rank);
            l.alpha = alpha.unwrap_or(l.alpha);
            l.steps = steps.unwrap_or(l.steps);
            l.seed = seed.unwrap_or(l.seed);
        }
        _ => {}
    }
    cfg.validate().map_err(CliError::Config)?;
    let p = Pipeline::new(cfg);
    match &cli.command {
        Command::Ingest => single(p.ingest()),
        Command::Merge => single(p.merge()),
        Command::Stats => single(p.stats()),
        Command::Split { .. } => single(p.split()),
        Command::Descriptors => single(p.descriptors()),
        Command::Depict { .. } => single(p.depict()),
        Command::GenInstructions { .. } => single(p.gen_instructions()),
        Command::Baseline { model, split } => {
            let kind = match model {
                Model::Linr => ModelKind::Linr,
                Model::Mlp => ModelKind::Mlp,
            };
            single(p.baseline(kind, split.as_deref()))
        }
        Command::Evaluate { predictions: Some(pred), truth: Some(truth) } => {
            let name = std::path::Path::new(pred)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "predictions".into());
            single(p.evaluate(&[(name, p.file_input(pred), p.file_input(truth))]))
        }
        Command::Evaluate { .. } => single(p.evaluate(&p.baseline_eval_jobs())),
        Command::LoraDemo { .. } => single(p.lora_demo(&p.config.lora)),
        Command::Run => p.run_all(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(reports) => {
            let _ = print_reports(&mut std::io::stdout().lock(), &reports);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
