use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use pepforge::config::{AppConfig, ObjectiveMode, PromptStyleName, CONFIG_ENV_VAR};
use pepforge::pipeline::{self, EvalInput};
use pepforge::schema::write_jsonl;
use pepforge::service;

use pepforge_core::chem::{parse_smiles, validate_valence};
use pepforge_core::properties::SurrogatePredictor;
use pepforge_core::reward::GenerationHistory;

/// Cyclic peptide dataset pipeline and reward-scoring service.
#[derive(Parser)]
#[command(name = "pepforge", version, about)]
struct Cli {
    /// Configuration file (TOML); falls back to $PEPFORGE_CONFIG, then
    /// defaults.
    #[arg(long, global = true, env = CONFIG_ENV_VAR)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate seed peptides into original/mutated pairs.
    Augment {
        /// Seed peptide JSONL ({id, helm}).
        #[arg(long)]
        seeds: PathBuf,
        /// Monomer vocabulary TSV (overrides config).
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Mutations drawn per seed.
        #[arg(short, long, default_value_t = 100)]
        k: usize,
        /// Augmentation seed (overrides config).
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Annotate pairs with predicted properties and improvement labels.
    Annotate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build training/pool/hold-out splits from annotated pairs.
    Split {
        #[arg(short, long)]
        input: PathBuf,
        /// Output directory for sft.jsonl, rl_pool.jsonl, test.jsonl.
        #[arg(short, long)]
        output: PathBuf,
        /// Per-group training cap (overrides config).
        #[arg(long)]
        sft_cap: Option<usize>,
        /// Pool size (overrides config).
        #[arg(long)]
        rl_pool: Option<usize>,
        /// Hold-out cap (overrides config).
        #[arg(long)]
        test_size: Option<usize>,
    },
    /// Render prompt/target training samples from annotated pairs.
    BuildPrompts {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Prompt flavor (overrides config).
        #[arg(long)]
        style: Option<PromptStyleName>,
        /// Goal-sentence mode (overrides config).
        #[arg(long)]
        objective: Option<ObjectiveMode>,
    },
    /// Score candidate SMILES against a seed molecule.
    Score {
        /// Seed molecule SMILES.
        #[arg(long)]
        seed: String,
        /// File of candidate SMILES, one per line.
        #[arg(long)]
        candidates: PathBuf,
        /// Output JSONL (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the six-metric report (and transition matrices from pairs).
    Evaluate {
        /// Generation dump JSONL ({seed_id, output_text|smiles, ...}).
        #[arg(long, conflicts_with = "pairs")]
        generations: Option<PathBuf>,
        /// Annotated pair JSONL; mutated peptides count as generations.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Pair JSONL whose mutated molecules form the novelty index.
        #[arg(long)]
        training: Option<PathBuf>,
        /// Row label in the report table.
        #[arg(long, default_value = "generated")]
        label: String,
        /// Output directory.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the reward/advantage HTTP service.
    Serve {
        /// Bind address (overrides config).
        #[arg(long)]
        bind: Option<String>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut config = AppConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Augment {
            seeds,
            vocab,
            k,
            rng_seed,
            output,
        } => {
            if let Some(vocab) = vocab {
                config.vocabulary = vocab;
            }
            if let Some(seed) = rng_seed {
                config.rng_seed = seed;
            }
            pipeline::run_augment(&config, &seeds, k, &output)?;
        }
        Command::Annotate { input, output } => {
            pipeline::run_annotate(&config, &input, &output)?;
        }
        Command::Split {
            input,
            output,
            sft_cap,
            rl_pool,
            test_size,
        } => {
            let mut caps = config.splits.clone();
            if let Some(cap) = sft_cap {
                caps.sft_group_cap = cap;
            }
            if let Some(pool) = rl_pool {
                caps.rl_pool_size = pool;
            }
            if let Some(test) = test_size {
                caps.test_size = test;
            }
            pipeline::run_split(&config, &caps, &input, &output)?;
        }
        Command::BuildPrompts {
            input,
            output,
            style,
            objective,
        } => {
            let style = style.unwrap_or(config.prompts.style);
            let objective = objective.unwrap_or(config.prompts.objective);
            pipeline::run_build_prompts(style, objective, &input, &output)?;
        }
        Command::Score {
            seed,
            candidates,
            output,
        } => {
            run_score(&config, &seed, &candidates, output.as_deref())?;
        }
        Command::Evaluate {
            generations,
            pairs,
            training,
            label,
            output,
        } => {
            let input = match (generations, pairs) {
                (Some(path), None) => EvalInput::Generations(path),
                (None, Some(path)) => EvalInput::Pairs(path),
                _ => anyhow::bail!("provide exactly one of --generations or --pairs"),
            };
            pipeline::run_evaluate(&config, &input, training.as_deref(), &label, &output)?;
        }
        Command::Serve { bind } => {
            if let Some(bind) = bind {
                config.bind = bind;
            }
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(config))?;
        }
    }
    Ok(())
}

fn run_score(
    config: &AppConfig,
    seed: &str,
    candidates: &std::path::Path,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let seed_graph = parse_smiles(seed).map_err(|e| anyhow::anyhow!("seed: {e}"))?;
    anyhow::ensure!(validate_valence(&seed_graph).valid, "seed fails valence");
    let text = std::fs::read_to_string(candidates)
        .with_context(|| format!("reading {}", candidates.display()))?;
    let predictor = SurrogatePredictor::new(config.surrogate);
    let mut history = GenerationHistory::new(config.reward.history_capacity);

    #[derive(serde::Serialize)]
    struct ScoredLine {
        smiles: String,
        #[serde(flatten)]
        result: service::CandidateResult,
    }

    let mut lines = Vec::new();
    for line in text.lines() {
        let smiles = line.trim();
        if smiles.is_empty() || smiles.starts_with('#') {
            continue;
        }
        let result =
            service::score_candidate(&seed_graph, smiles, &predictor, &mut history, config);
        lines.push(ScoredLine {
            smiles: smiles.to_string(),
            result,
        });
    }
    match output {
        Some(path) => write_jsonl(path, &lines)?,
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            for line in &lines {
                use std::io::Write;
                serde_json::to_writer(&mut handle, line)?;
                handle.write_all(b"\n")?;
            }
        }
    }
    eprintln!("score: {} candidates", lines.len());
    Ok(())
}
