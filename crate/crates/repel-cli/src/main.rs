//! Batch CLI around the core library: synthetic corpus generation, pattern
//! extraction, distributional training, the full co-training run, and the
//! two evaluation protocols.
//!
//! Every training/run option can also come from a flat `key = value` config
//! file (`--config`); explicit command-line flags win over file values,
//! which win over the built-in defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use repel_core::cotrain::RunConfig;
use repel_core::dump::read_kv_file;
use repel_core::embed::{InteractionForm, TrainConfig};
use repel_core::pattern::PatternConfig;
use repel_core::pipeline::{
    eval_kbc_from_files, eval_re_from_files, extract_patterns_pipeline, run_pipeline,
    train_pipeline, PipelineConfig,
};
use repel_core::synth::{write_synthetic, SynthSpec};

#[derive(Parser)]
#[command(
    name = "repel",
    about = "Weakly-supervised relation extraction by co-training textual patterns with entity embeddings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic corpus with a ground-truth manifest.
    Synth(SynthArgs),
    /// Extract candidate patterns and dump each relation's top-K by seed
    /// reliability.
    ExtractPatterns(ExtractArgs),
    /// Train the distributional module only (text + seed objectives).
    Train(TrainArgs),
    /// Full co-training run with artifacts and optional evaluations.
    Run(RunArgs),
    /// Rank entities for incomplete test triples with dumped embeddings.
    EvalKbc(EvalKbcArgs),
    /// Corpus-level relation extraction over dumped patterns and word
    /// vectors.
    EvalRe(EvalReArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    relations: usize,
    #[arg(long, default_value_t = 40)]
    entities_per_relation: usize,
    #[arg(long, default_value_t = 40)]
    pairs_per_relation: usize,
    #[arg(long, default_value_t = 10)]
    seeds_per_relation: usize,
    #[arg(long, default_value_t = 5)]
    templates_per_relation: usize,
    #[arg(long, default_value_t = 5)]
    noise_templates_per_relation: usize,
    #[arg(long, default_value_t = 2)]
    sentences_per_pair: usize,
    #[arg(long, default_value_t = 400)]
    distractor_sentences: usize,
    #[arg(long, default_value_t = 42)]
    rng_seed: u64,
}

/// Pattern extraction knobs; file values: window, max_pattern_len,
/// min_support.
#[derive(Args, Default)]
struct PatternOpts {
    /// Context tokens kept on each side of a meta pattern [default: 2]
    #[arg(long)]
    window: Option<usize>,
    /// Longest template incl. placeholders [default: 10]
    #[arg(long)]
    max_pattern_len: Option<usize>,
    /// Minimum extracted pairs to keep a pattern [default: 3]
    #[arg(long)]
    min_support: Option<usize>,
}

impl PatternOpts {
    fn resolve(&self, file: &KvFile) -> Result<PatternConfig> {
        let d = PatternConfig::default();
        Ok(PatternConfig {
            context_window: pick(self.window, file.get("window")?, d.context_window),
            max_pattern_len: pick(
                self.max_pattern_len,
                file.get("max_pattern_len")?,
                d.max_pattern_len,
            ),
            min_support: pick(self.min_support, file.get("min_support")?, d.min_support),
        })
    }
}

/// Distributional training knobs; file keys match the flag names.
#[derive(Args, Default)]
struct TrainOpts {
    /// Embedding dimension [default: 100]
    #[arg(long)]
    dim: Option<usize>,
    /// SGD learning rate [default: 0.01]
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Seed-objective weight [default: 0.005]
    #[arg(long)]
    eta: Option<f64>,
    /// Interaction-objective weight [default: 1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Negative samples per edge [default: 5]
    #[arg(long)]
    negatives: Option<usize>,
    /// Text edge samples per outer iteration [default: 2000000]
    #[arg(long)]
    text_samples: Option<usize>,
    /// Seed samples per relation per outer iteration [default: 100000]
    #[arg(long)]
    seed_samples: Option<usize>,
    /// Generated-pair samples per relation [default: seed_samples]
    #[arg(long)]
    gen_samples: Option<usize>,
    /// Interaction gradient: direct or ranking [default: direct]
    #[arg(long)]
    interaction_form: Option<String>,
    /// L2 cap per raw gradient [default: 5]
    #[arg(long)]
    grad_clip: Option<f64>,
    /// Data-parallel workers (>1 gives up determinism) [default: 1]
    #[arg(long)]
    workers: Option<usize>,
    /// RNG seed for init and sampling [default: 1]
    #[arg(long)]
    rng_seed: Option<u64>,
}

impl TrainOpts {
    fn resolve(&self, file: &KvFile) -> Result<TrainConfig> {
        let d = TrainConfig::default();
        let seed_samples = pick(self.seed_samples, file.get("seed_samples")?, d.seed_samples);
        let form = match self
            .interaction_form
            .clone()
            .or(file.get::<String>("interaction_form")?)
        {
            None => d.interaction_form,
            Some(s) => match s.as_str() {
                "direct" => InteractionForm::Direct,
                "ranking" => InteractionForm::Ranking,
                other => bail!("interaction_form must be `direct` or `ranking`, got `{other}`"),
            },
        };
        Ok(TrainConfig {
            dim: pick(self.dim, file.get("dim")?, d.dim),
            learning_rate: pick(self.learning_rate, file.get("learning_rate")?, d.learning_rate),
            eta: pick(self.eta, file.get("eta")?, d.eta),
            lambda: pick(self.lambda, file.get("lambda")?, d.lambda),
            negatives: pick(self.negatives, file.get("negatives")?, d.negatives),
            text_samples: pick(self.text_samples, file.get("text_samples")?, d.text_samples),
            seed_samples,
            gen_samples: pick(self.gen_samples, file.get("gen_samples")?, seed_samples),
            interaction_form: form,
            grad_clip: pick(self.grad_clip, file.get("grad_clip")?, d.grad_clip),
            workers: pick(self.workers, file.get("workers")?, d.workers),
            rng_seed: pick(self.rng_seed, file.get("rng_seed")?, d.rng_seed),
        })
    }
}

#[derive(Args, Default)]
struct RunOpts {
    /// Outer co-training iterations [default: 5]
    #[arg(long)]
    outer_iterations: Option<usize>,
    /// Reliable patterns per relation (K) [default: 100]
    #[arg(long)]
    top_k: Option<usize>,
    /// Single-worker bit-reproducible mode [default: true]
    #[arg(long)]
    deterministic: Option<bool>,
}

impl RunOpts {
    fn resolve(&self, train: TrainConfig, file: &KvFile) -> Result<RunConfig> {
        let d = RunConfig::default();
        Ok(RunConfig {
            outer_iterations: pick(
                self.outer_iterations,
                file.get("outer_iterations")?,
                d.outer_iterations,
            ),
            top_k: pick(self.top_k, file.get("top_k")?, d.top_k),
            train,
            deterministic: pick(self.deterministic, file.get("deterministic")?, d.deterministic),
        })
    }
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    /// Output pattern dump path.
    #[arg(long)]
    out: PathBuf,
    /// Patterns to keep per relation [default: 100]
    #[arg(long)]
    top_k: Option<usize>,
    #[command(flatten)]
    pattern: PatternOpts,
    /// Flat key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Subsample each relation's seeds to N before training.
    #[arg(long)]
    seeds_per_relation: Option<usize>,
    #[command(flatten)]
    train: TrainOpts,
    #[command(flatten)]
    run: RunOpts,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Subsample each relation's seeds to N before training.
    #[arg(long)]
    seeds_per_relation: Option<usize>,
    /// Gold KBC triples (relation<TAB>head<TAB>tail) to evaluate against.
    #[arg(long)]
    kbc_gold: Option<PathBuf>,
    /// Gold RE pairs to evaluate against.
    #[arg(long)]
    re_gold: Option<PathBuf>,
    /// RE test sentences (corpus format); training corpus reused if absent.
    #[arg(long)]
    re_sentences: Option<PathBuf>,
    /// Filtered KBC ranking.
    #[arg(long, default_value_t = false)]
    kbc_filtered: bool,
    /// Score-function instances per relation in instances.tsv [default: 50]
    #[arg(long)]
    distributional_top: Option<usize>,
    #[command(flatten)]
    pattern: PatternOpts,
    #[command(flatten)]
    train: TrainOpts,
    #[command(flatten)]
    run: RunOpts,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalKbcArgs {
    /// entities.vec dump.
    #[arg(long)]
    entities_vec: PathBuf,
    /// relations.vec dump.
    #[arg(long)]
    relations_vec: PathBuf,
    /// Test triples (relation<TAB>head<TAB>tail).
    #[arg(long)]
    test: PathBuf,
    /// Report output path.
    #[arg(long)]
    report: PathBuf,
    /// Hits cutoffs.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 3, 10])]
    cutoffs: Vec<usize>,
    /// Remove known-true candidates before ranking.
    #[arg(long, default_value_t = false)]
    filtered: bool,
}

#[derive(Args)]
struct EvalReArgs {
    /// words.vec dump.
    #[arg(long)]
    words_vec: PathBuf,
    /// Selected-pattern dump.
    #[arg(long)]
    patterns: PathBuf,
    /// Test sentences (corpus line format).
    #[arg(long)]
    sentences: PathBuf,
    /// Gold pairs (relation<TAB>head<TAB>tail).
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Precision/recall cutoffs.
    #[arg(long, value_delimiter = ',', default_values_t = vec![10usize, 20, 50, 100])]
    cutoffs: Vec<usize>,
    #[command(flatten)]
    pattern: PatternOpts,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Loaded config file, or empty when none was given.
struct KvFile(BTreeMap<String, String>);

impl KvFile {
    fn load(path: &Option<PathBuf>) -> Result<Self> {
        match path {
            Some(p) => Ok(KvFile(read_kv_file(p)?)),
            None => Ok(KvFile(BTreeMap::new())),
        }
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| anyhow::anyhow!("config key `{}`: cannot parse `{}`", key, raw)),
        }
    }
}

fn pick<T>(cli: Option<T>, file: Option<T>, default: T) -> T {
    cli.or(file).unwrap_or(default)
}

fn main() {
    if let Err(err) = dispatch(Cli::parse()) {
        eprintln!("error: {:#}", err);
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => synth(args),
        Command::ExtractPatterns(args) => extract(args),
        Command::Train(args) => train(args),
        Command::Run(args) => run(args),
        Command::EvalKbc(args) => eval_kbc(args),
        Command::EvalRe(args) => eval_re(args),
    }
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        relations: args.relations,
        entities_per_relation: args.entities_per_relation,
        pairs_per_relation: args.pairs_per_relation,
        seeds_per_relation: args.seeds_per_relation,
        templates_per_relation: args.templates_per_relation,
        noise_templates_per_relation: args.noise_templates_per_relation,
        sentences_per_pair: args.sentences_per_pair,
        distractor_sentences: args.distractor_sentences,
        rng_seed: args.rng_seed,
    };
    let paths = write_synthetic(&spec, &args.out_dir)?;
    println!("corpus   {}", paths.corpus.display());
    println!("seeds    {}", paths.seeds.display());
    println!("manifest {}", paths.manifest.display());
    Ok(())
}

fn extract(args: ExtractArgs) -> Result<()> {
    let file = KvFile::load(&args.config)?;
    let pattern = args.pattern.resolve(&file)?;
    let top_k = pick(args.top_k, file.get("top_k")?, 100);
    let rows = extract_patterns_pipeline(&args.corpus, &args.seeds, &args.out, &pattern, top_k)
        .context("extract-patterns failed")?;
    println!("wrote {} pattern rows to {}", rows, args.out.display());
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let file = KvFile::load(&args.config)?;
    let train_cfg = args.train.resolve(&file)?;
    let run_cfg = args.run.resolve(train_cfg, &file)?;
    let seeds_n = args.seeds_per_relation.or(file.get("seeds_per_relation")?);
    let (store, reports) =
        train_pipeline(&args.corpus, &args.seeds, &args.out_dir, &run_cfg, seeds_n)
            .context("train failed")?;
    println!(
        "trained {} entities x {} dims over {} epochs",
        store.entity_count(),
        store.dim(),
        reports.len()
    );
    for (i, rep) in reports.iter().enumerate() {
        println!(
            "epoch {}: text {:.4}  seed {:.4}",
            i + 1,
            rep.text.mean(),
            rep.seed.mean()
        );
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let file = KvFile::load(&args.config)?;
    let train_cfg = args.train.resolve(&file)?;
    let run_cfg = args.run.resolve(train_cfg, &file)?;
    let pattern = args.pattern.resolve(&file)?;

    let mut cfg = PipelineConfig::new(&args.corpus, &args.seeds, &args.out_dir);
    cfg.run = run_cfg;
    cfg.pattern = pattern;
    cfg.seeds_per_relation = args.seeds_per_relation.or(file.get("seeds_per_relation")?);
    cfg.kbc_gold = args.kbc_gold;
    cfg.re_gold = args.re_gold;
    cfg.re_sentences = args.re_sentences;
    cfg.kbc_filtered = args.kbc_filtered || file.get("kbc_filtered")?.unwrap_or(false);
    cfg.distributional_top =
        pick(args.distributional_top, file.get("distributional_top")?, 50);

    let outcome = run_pipeline(&cfg).context("run failed")?;
    for rec in &outcome.state.trace {
        println!(
            "iteration {}: mean_R {:.4}  mean_bonus {:.4}  o_text {:.4}  o_seed {:.4}  o_i {:.4}",
            rec.iteration,
            rec.mean_reliability,
            rec.mean_bonus,
            rec.text_objective,
            rec.seed_objective,
            rec.interaction_objective
        );
    }
    println!("extracted {} instances", outcome.instances_extracted);
    if let Some(kbc) = &outcome.kbc_report {
        if let Some(mr) = kbc.mean_rank {
            print!("kbc: MR {:.2}", mr);
            for (k, v) in &kbc.hits_at {
                print!("  Hits@{} {:.2}", k, v);
            }
            println!();
        }
    }
    if let Some(re) = &outcome.re_report {
        print!("re:");
        for (k, v) in &re.precision_at {
            print!("  P@{} {:.2}", k, v);
        }
        println!();
    }
    println!("artifacts in {}", args.out_dir.display());
    Ok(())
}

fn eval_kbc(args: EvalKbcArgs) -> Result<()> {
    let (report, skipped) = eval_kbc_from_files(
        &args.entities_vec,
        &args.relations_vec,
        &args.test,
        &args.report,
        &args.cutoffs,
        args.filtered,
    )
    .context("eval-kbc failed")?;
    if let Some(mr) = report.mean_rank {
        print!("MR {:.2}", mr);
        for (k, v) in &report.hits_at {
            print!("  Hits@{} {:.2}", k, v);
        }
        println!();
    }
    if skipped > 0 {
        eprintln!("warning: {} test instances skipped (unknown entity or relation)", skipped);
    }
    Ok(())
}

fn eval_re(args: EvalReArgs) -> Result<()> {
    let file = KvFile::load(&args.config)?;
    let pattern = args.pattern.resolve(&file)?;
    let report = eval_re_from_files(
        &args.words_vec,
        &args.patterns,
        &args.sentences,
        &args.gold,
        &args.out_dir,
        &pattern,
        &args.cutoffs,
    )
    .context("eval-re failed")?;
    for (k, p) in &report.precision_at {
        println!(
            "P@{} {:.2}  R@{} {:.2}  F1@{} {:.2}",
            k, p, k, report.recall_at[k], k, report.f1_at[k]
        );
    }
    Ok(())
}
