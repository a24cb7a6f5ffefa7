//! Batch orchestration: load -> extract patterns -> co-train -> dump
//! artifacts, plus the evaluation entry points the CLI wraps.
//!
//! Every writer emits deterministic bytes, so two runs with the same config
//! and seed produce identical artifact trees.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    build_cooccurrence, load_corpus, load_corpus_with_vocabs, load_seeds, Corpus, EntityPair,
    RelationSpec, Vocab,
};
use crate::cotrain::{run_with_observer, CoTrainState, RunConfig};
use crate::dump::{
    read_embedding_file, read_pattern_dump, read_triples, write_embedding_file,
    write_epoch_trace, write_instances, write_pattern_dump, write_pr_curve, write_predictions,
    write_report, write_trace, InstanceRow, InstanceSource, PatternDumpRow,
};
use crate::embed::{train_distributional, EmbeddingStore};
use crate::error::{Error, Result};
use crate::eval::{
    kbc_evaluate, re_evaluate, EvalReport, KbcInstance, PatternMatcher, ReGroup, WordVectorTable,
};
use crate::pattern::{
    combined_reliability, extract_patterns, pair_meta_pattern, select_top_k, Pattern,
    PatternConfig, PatternIndex,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub corpus_path: PathBuf,
    pub seeds_path: PathBuf,
    pub out_dir: PathBuf,
    pub run: RunConfig,
    pub pattern: PatternConfig,
    /// Subsample each relation's seeds down to N_r before training.
    pub seeds_per_relation: Option<usize>,
    /// Gold KBC triples (`relation<TAB>head<TAB>tail`).
    pub kbc_gold: Option<PathBuf>,
    /// Gold RE pairs, same triple format.
    pub re_gold: Option<PathBuf>,
    /// Test sentences for RE (corpus line format); the training corpus is
    /// reused when absent.
    pub re_sentences: Option<PathBuf>,
    /// Filtered KBC ranking (known true candidates removed).
    pub kbc_filtered: bool,
    pub kbc_cutoffs: Vec<usize>,
    pub re_cutoffs: Vec<usize>,
    /// Instances per relation taken from the score function for the merged
    /// extraction dump; 0 disables the distributional route.
    pub distributional_top: usize,
}

impl PipelineConfig {
    pub fn new(
        corpus_path: impl Into<PathBuf>,
        seeds_path: impl Into<PathBuf>,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        PipelineConfig {
            corpus_path: corpus_path.into(),
            seeds_path: seeds_path.into(),
            out_dir: out_dir.into(),
            run: RunConfig::default(),
            pattern: PatternConfig::default(),
            seeds_per_relation: None,
            kbc_gold: None,
            re_gold: None,
            re_sentences: None,
            kbc_filtered: false,
            kbc_cutoffs: vec![1, 3, 10],
            re_cutoffs: vec![10, 20, 50, 100],
            distributional_top: 50,
        }
    }
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub state: CoTrainState,
    pub kbc_report: Option<EvalReport>,
    pub re_report: Option<EvalReport>,
    pub instances_extracted: usize,
}

/// Full REPEL run with per-iteration checkpoints and final artifacts.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let (corpus, load_report) =
        load_corpus(&cfg.corpus_path).map_err(|e| e.in_stage("load-corpus"))?;
    let (network, cooc_report) = build_cooccurrence(&corpus);
    let (specs, seed_report) =
        load_seeds(&cfg.seeds_path, &corpus).map_err(|e| e.in_stage("load-seeds"))?;
    let specs = match cfg.seeds_per_relation {
        Some(n) => subsample_seeds(&specs, n, cfg.run.train.rng_seed),
        None => specs,
    };
    let index = extract_patterns(&corpus, &cfg.pattern);

    fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::io(&cfg.out_dir, e))?;
    let checkpoints = cfg.out_dir.join("checkpoints");
    fs::create_dir_all(&checkpoints).map_err(|e| Error::io(&checkpoints, e))?;

    let mut checkpoint_err: Option<Error> = None;
    let state = run_with_observer(&corpus, &network, &index, &specs, &cfg.run, |st| {
        if checkpoint_err.is_some() {
            return;
        }
        let dir = checkpoints.join(format!("iter_{:04}", st.outer_iteration));
        if let Err(e) = write_checkpoint(&dir, &corpus, &index, &specs, st, &cfg.run) {
            checkpoint_err = Some(e);
        }
    })
    .map_err(|e| e.in_stage("cotrain"))?;
    if let Some(e) = checkpoint_err {
        return Err(e.in_stage("checkpoint"));
    }

    write_store(&cfg.out_dir, &corpus, &specs, &state.store).map_err(|e| e.in_stage("dump"))?;
    let rows = pattern_rows(&corpus, &index, &specs, &state, &cfg.run)?;
    write_pattern_dump(cfg.out_dir.join("patterns.tsv"), &rows)
        .map_err(|e| e.in_stage("dump"))?;
    write_trace(cfg.out_dir.join("trace.tsv"), &state.trace).map_err(|e| e.in_stage("dump"))?;

    let instance_rows = extract_instances(&corpus, &index, &specs, &state, cfg.distributional_top);
    write_instances(cfg.out_dir.join("instances.tsv"), &instance_rows)
        .map_err(|e| e.in_stage("dump"))?;

    let kbc_report = match &cfg.kbc_gold {
        Some(path) => Some(
            run_kbc_eval(path, &corpus, &specs, &state.store, cfg)
                .map_err(|e| e.in_stage("eval-kbc"))?,
        ),
        None => None,
    };
    let re_report = match &cfg.re_gold {
        Some(path) => Some(
            run_re_eval(path, &corpus, &index, &specs, &state, cfg)
                .map_err(|e| e.in_stage("eval-re"))?,
        ),
        None => None,
    };

    write_summary(
        &cfg.out_dir,
        &corpus,
        &load_report,
        &cooc_report,
        &network,
        &seed_report,
        &index,
        &specs,
        &state,
        instance_rows.len(),
        kbc_report.as_ref(),
        re_report.as_ref(),
    )
    .map_err(|e| e.in_stage("dump"))?;

    Ok(PipelineOutcome {
        state,
        kbc_report,
        re_report,
        instances_extracted: instance_rows.len(),
    })
}

/// Deterministic random subsample of each relation's seeds.
fn subsample_seeds(specs: &[RelationSpec], n: usize, rng_seed: u64) -> Vec<RelationSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ 0x5EED_5EED_5EED_5EED);
    specs
        .iter()
        .map(|spec| {
            if spec.seed_count() <= n {
                return spec.clone();
            }
            let mut idx: Vec<usize> = (0..spec.seed_count()).collect();
            idx.shuffle(&mut rng);
            let mut keep: Vec<usize> = idx[..n].to_vec();
            keep.sort_unstable();
            let pairs: Vec<EntityPair> = keep.iter().map(|&i| spec.seed_pairs[i]).collect();
            RelationSpec::new(spec.relation, spec.name.clone(), pairs)
        })
        .collect()
}

fn write_store(
    dir: &Path,
    corpus: &Corpus,
    specs: &[RelationSpec],
    store: &EmbeddingStore,
) -> Result<()> {
    let relation_labels: Vec<String> = specs.iter().map(|s| s.name.clone()).collect();
    write_embedding_file(
        dir.join("entities.vec"),
        corpus.entity_vocab.labels(),
        store.entities_flat(),
        store.dim(),
    )?;
    write_embedding_file(
        dir.join("words.vec"),
        corpus.word_vocab.labels(),
        store.words_flat(),
        store.dim(),
    )?;
    write_embedding_file(
        dir.join("relations.vec"),
        &relation_labels,
        store.relations_flat(),
        store.dim(),
    )
}

/// Dump rows for the current selection, scored with the current store when
/// training has happened (bonus 0 at the bootstrap).
fn pattern_rows(
    _corpus: &Corpus,
    index: &PatternIndex,
    specs: &[RelationSpec],
    state: &CoTrainState,
    run: &RunConfig,
) -> Result<Vec<PatternDumpRow>> {
    let mut rows = Vec::new();
    for (ri, sel) in state.selected.iter().enumerate() {
        let spec = &specs[ri];
        let scorer = (state.outer_iteration > 0).then(|| state.store.relation_scorer(spec.relation));
        for &id in sel {
            let score = combined_reliability(
                index,
                id,
                spec,
                scorer.as_ref().map(|s| s as &dyn crate::pattern::PairScorer),
                run.train.lambda,
            )?;
            let p = index.pattern(id);
            rows.push(PatternDumpRow {
                relation: spec.name.clone(),
                kind: p.kind,
                canonical: p.canonical.clone(),
                reliability: score.seed_reliability,
                combined: score.combined,
                support: index.support(id),
            });
        }
    }
    Ok(rows)
}

fn write_checkpoint(
    dir: &Path,
    corpus: &Corpus,
    index: &PatternIndex,
    specs: &[RelationSpec],
    state: &CoTrainState,
    run: &RunConfig,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_store(dir, corpus, specs, &state.store)?;
    let rows = pattern_rows(corpus, index, specs, state, run)?;
    write_pattern_dump(dir.join("patterns.tsv"), &rows)
}

/// Merged extraction dump: pattern-extracted pairs (G(P) minus seeds) and
/// the score function's top pairs per relation, tagged by source.
fn extract_instances(
    corpus: &Corpus,
    index: &PatternIndex,
    specs: &[RelationSpec],
    state: &CoTrainState,
    distributional_top: usize,
) -> Vec<InstanceRow> {
    let generated = state.generated(index);
    let mut rows = Vec::new();
    for (ri, spec) in specs.iter().enumerate() {
        let from_patterns: HashSet<EntityPair> = generated[ri]
            .iter()
            .copied()
            .filter(|p| !spec.is_seed(p))
            .collect();

        let mut from_scores: HashSet<EntityPair> = HashSet::new();
        if distributional_top > 0 {
            let mut scored: Vec<(EntityPair, f64)> = Vec::new();
            for h in 0..corpus.entity_count() {
                for t in 0..corpus.entity_count() {
                    if h == t {
                        continue;
                    }
                    let pair = EntityPair::new(h, t);
                    if spec.is_seed(&pair) {
                        continue;
                    }
                    scored.push((pair, state.store.score(pair, spec.relation)));
                }
            }
            scored.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.0.cmp(&b.0))
            });
            from_scores = scored.into_iter().take(distributional_top).map(|(p, _)| p).collect();
        }

        let mut all: Vec<EntityPair> = from_patterns.union(&from_scores).copied().collect();
        all.sort_unstable();
        for pair in all {
            let source = match (from_patterns.contains(&pair), from_scores.contains(&pair)) {
                (true, true) => InstanceSource::Both,
                (true, false) => InstanceSource::Pattern,
                (false, true) => InstanceSource::Distributional,
                (false, false) => unreachable!(),
            };
            rows.push(InstanceRow {
                relation: spec.name.clone(),
                head: corpus.entity_vocab.label(pair.head).to_string(),
                tail: corpus.entity_vocab.label(pair.tail).to_string(),
                confidence: state.store.score(pair, spec.relation),
                source,
            });
        }
    }
    rows
}

fn run_kbc_eval(
    gold_path: &Path,
    corpus: &Corpus,
    specs: &[RelationSpec],
    store: &EmbeddingStore,
    cfg: &PipelineConfig,
) -> Result<EvalReport> {
    let triples = read_triples(gold_path)?;
    let by_name: HashMap<&str, usize> =
        specs.iter().map(|s| (s.name.as_str(), s.relation)).collect();
    let mut instances: Vec<KbcInstance> = Vec::new();
    for (r, h, t) in &triples {
        let (Some(&rid), Some(h), Some(t)) = (
            by_name.get(r.as_str()),
            corpus.entity_vocab.id(h),
            corpus.entity_vocab.id(t),
        ) else {
            continue;
        };
        instances.push((h, t, rid));
    }
    let universe: Vec<usize> = (0..corpus.entity_count()).collect();
    let known: HashSet<KbcInstance> = instances
        .iter()
        .copied()
        .chain(specs.iter().flat_map(|s| {
            s.seed_pairs.iter().map(move |p| (p.head, p.tail, s.relation))
        }))
        .collect();
    let outcome = kbc_evaluate(
        store,
        &instances,
        &universe,
        &cfg.kbc_cutoffs,
        cfg.kbc_filtered.then_some(&known),
    )?;
    write_report(cfg.out_dir.join("kbc_report.tsv"), &outcome.report)?;
    Ok(outcome.report)
}

/// Builds the per-pair sentence groups for RE: every sentence mentioning a
/// gold pair contributes its local meta pattern to that pair's group.
pub fn re_groups_from_corpus(
    corpus: &Corpus,
    gold: &HashMap<(String, String), String>,
    pattern_cfg: &PatternConfig,
) -> Vec<ReGroup> {
    let mut grouped: BTreeMap<(String, String), Vec<Pattern>> = BTreeMap::new();
    for sentence in &corpus.sentences {
        for (hi, hm) in sentence.mentions.iter().enumerate() {
            for (ti, tm) in sentence.mentions.iter().enumerate() {
                if hi == ti || hm.entity == tm.entity {
                    continue;
                }
                let key = (
                    corpus.entity_vocab.label(hm.entity).to_string(),
                    corpus.entity_vocab.label(tm.entity).to_string(),
                );
                if !gold.contains_key(&key) {
                    continue;
                }
                if let Some(p) =
                    pair_meta_pattern(sentence, hi, ti, &corpus.word_vocab, pattern_cfg)
                {
                    grouped.entry(key).or_default().push(p);
                }
            }
        }
    }
    grouped
        .into_iter()
        .map(|((head, tail), sentences)| ReGroup { head, tail, sentences })
        .collect()
}

fn run_re_eval(
    gold_path: &Path,
    corpus: &Corpus,
    index: &PatternIndex,
    specs: &[RelationSpec],
    state: &CoTrainState,
    cfg: &PipelineConfig,
) -> Result<EvalReport> {
    let gold: HashMap<(String, String), String> = read_triples(gold_path)?
        .into_iter()
        .map(|(r, h, t)| ((h, t), r))
        .collect();

    // Test sentences: a dedicated file (sharing the trained word ids) or
    // the training corpus itself.
    let test_corpus;
    let corpus_ref = match &cfg.re_sentences {
        Some(path) => {
            let (c, _) = load_corpus_with_vocabs(
                path,
                Vocab::new(),
                corpus.word_vocab.clone(),
            )?;
            test_corpus = c;
            &test_corpus
        }
        None => corpus,
    };
    let groups = re_groups_from_corpus(corpus_ref, &gold, &cfg.pattern);

    let reliable: Vec<(String, Vec<&Pattern>)> = specs
        .iter()
        .enumerate()
        .map(|(ri, s)| {
            (
                s.name.clone(),
                state.selected[ri].iter().map(|&id| index.pattern(id)).collect(),
            )
        })
        .collect();
    let table = WordVectorTable::new(state.store.dim(), state.store.words_flat());
    let matcher = PatternMatcher::new(&reliable, &table);
    let (report, ranked) = re_evaluate(&groups, &gold, &matcher, &table, &cfg.re_cutoffs)?;

    write_report(cfg.out_dir.join("re_report.tsv"), &report)?;
    write_pr_curve(cfg.out_dir.join("re_pr_curve.tsv"), &report.pr_curve)?;
    write_predictions(cfg.out_dir.join("re_predictions.tsv"), &ranked)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn write_summary(
    dir: &Path,
    corpus: &Corpus,
    load_report: &crate::corpus::LoadReport,
    cooc: &crate::corpus::CooccurrenceReport,
    network: &crate::corpus::CooccurrenceNetwork,
    seed_report: &crate::corpus::SeedReport,
    index: &PatternIndex,
    specs: &[RelationSpec],
    state: &CoTrainState,
    instances: usize,
    kbc: Option<&EvalReport>,
    re: Option<&EvalReport>,
) -> Result<()> {
    let path = dir.join("summary.tsv");
    let mut out = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "sentences_loaded\t{}", load_report.sentences_loaded)?;
        writeln!(
            out,
            "sentences_rejected_overlap\t{}",
            load_report.rejected_overlapping_mentions
        )?;
        writeln!(out, "entities\t{}", corpus.entity_count())?;
        writeln!(out, "words\t{}", corpus.word_count())?;
        writeln!(out, "cooccurrence_edges\t{}", network.edge_count())?;
        writeln!(out, "cooccurrence_events\t{}", cooc.events)?;
        writeln!(out, "network_empty\t{}", cooc.empty)?;
        writeln!(out, "seed_rows_unresolvable\t{}", seed_report.rows_unresolvable)?;
        writeln!(out, "relations_dropped\t{}", seed_report.relations_dropped.len())?;
        writeln!(out, "patterns_retained\t{}", index.len())?;
        writeln!(out, "outer_iterations\t{}", state.outer_iteration)?;
        for (ri, spec) in specs.iter().enumerate() {
            writeln!(
                out,
                "relation\t{}\tseeds\t{}\tselected\t{}",
                spec.name,
                spec.seed_count(),
                state.selected[ri].len()
            )?;
        }
        writeln!(out, "instances_extracted\t{}", instances)?;
        if let Some(r) = kbc {
            if let Some(mr) = r.mean_rank {
                writeln!(out, "kbc_mean_rank\t{:.6}", mr)?;
            }
            for (k, v) in &r.hits_at {
                writeln!(out, "kbc_hits@{}\t{:.6}", k, v)?;
            }
        }
        if let Some(r) = re {
            for (k, v) in &r.precision_at {
                writeln!(out, "re_p@{}\t{:.6}", k, v)?;
            }
        }
        Ok(())
    };
    write().map_err(|e| Error::io(&path, e))
}

// ---------------------------------------------------------------------------
// Distributional-only training (REPEL-D / `train` subcommand).
// ---------------------------------------------------------------------------

/// Trains text + seed objectives only and dumps the embeddings. Returns the
/// final store and the per-epoch reports.
pub fn train_pipeline(
    corpus_path: &Path,
    seeds_path: &Path,
    out_dir: &Path,
    run: &RunConfig,
    seeds_per_relation: Option<usize>,
) -> Result<(EmbeddingStore, Vec<crate::embed::EpochReport>)> {
    let (corpus, _) = load_corpus(corpus_path).map_err(|e| e.in_stage("load-corpus"))?;
    let (network, _) = build_cooccurrence(&corpus);
    let (specs, _) = load_seeds(seeds_path, &corpus).map_err(|e| e.in_stage("load-seeds"))?;
    let specs = match seeds_per_relation {
        Some(n) => subsample_seeds(&specs, n, run.train.rng_seed),
        None => specs,
    };
    if !specs.iter().any(|s| s.seed_count() > 0) {
        return Err(Error::Invalid("no usable relations".into()).in_stage("load-seeds"));
    }

    let mut train_cfg = run.train.clone();
    if run.deterministic {
        train_cfg.workers = 1;
    }
    let mut store = EmbeddingStore::init(
        corpus.entity_count(),
        corpus.word_count(),
        specs.len(),
        train_cfg.dim,
        train_cfg.rng_seed,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.rng_seed ^ 0x9E37_79B9_7F4A_7C15);
    let reports = train_distributional(
        &mut store,
        &network,
        &specs,
        &train_cfg,
        run.outer_iterations,
        &mut rng,
    );

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_store(out_dir, &corpus, &specs, &store).map_err(|e| e.in_stage("dump"))?;
    write_epoch_trace(out_dir.join("train_trace.tsv"), &reports)
        .map_err(|e| e.in_stage("dump"))?;
    Ok((store, reports))
}

// ---------------------------------------------------------------------------
// Stand-alone pattern extraction (`extract-patterns` subcommand).
// ---------------------------------------------------------------------------

/// Seed-reliability-only extraction and selection; writes the pattern dump.
pub fn extract_patterns_pipeline(
    corpus_path: &Path,
    seeds_path: &Path,
    out_path: &Path,
    pattern_cfg: &PatternConfig,
    top_k: usize,
) -> Result<usize> {
    let (corpus, _) = load_corpus(corpus_path).map_err(|e| e.in_stage("load-corpus"))?;
    let (specs, _) = load_seeds(seeds_path, &corpus).map_err(|e| e.in_stage("load-seeds"))?;
    let index = extract_patterns(&corpus, pattern_cfg);

    let mut rows = Vec::new();
    for spec in &specs {
        let selected = select_top_k(&index, spec, None, 0.0, top_k)?;
        for id in selected {
            let score = combined_reliability(&index, id, spec, None, 0.0)?;
            let p = index.pattern(id);
            rows.push(PatternDumpRow {
                relation: spec.name.clone(),
                kind: p.kind,
                canonical: p.canonical.clone(),
                reliability: score.seed_reliability,
                combined: score.combined,
                support: index.support(id),
            });
        }
    }
    write_pattern_dump(out_path, &rows).map_err(|e| e.in_stage("dump"))?;
    Ok(rows.len())
}

// ---------------------------------------------------------------------------
// Evaluation from dumped artifacts (`eval-kbc` / `eval-re` subcommands).
// ---------------------------------------------------------------------------

/// KBC evaluation against dumped entity/relation vectors. The candidate
/// universe is every dumped entity; filtered mode removes the test triples
/// themselves from the candidates.
pub fn eval_kbc_from_files(
    entities_vec: &Path,
    relations_vec: &Path,
    test_path: &Path,
    report_out: &Path,
    cutoffs: &[usize],
    filtered: bool,
) -> Result<(EvalReport, usize)> {
    let (entity_labels, entity_data, dim) = read_embedding_file(entities_vec)?;
    let (relation_labels, relation_data, rdim) = read_embedding_file(relations_vec)?;
    if dim != rdim {
        return Err(Error::Invalid(format!(
            "dimension mismatch: entities {} vs relations {}",
            dim, rdim
        )));
    }
    let store = EmbeddingStore::from_parts(dim, entity_data, Vec::new(), relation_data);
    let entity_ids: HashMap<&str, usize> =
        entity_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let relation_ids: HashMap<&str, usize> =
        relation_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();

    let mut instances = Vec::new();
    let mut unresolved = 0usize;
    for (r, h, t) in read_triples(test_path)? {
        match (
            relation_ids.get(r.as_str()),
            entity_ids.get(h.as_str()),
            entity_ids.get(t.as_str()),
        ) {
            (Some(&r), Some(&h), Some(&t)) => instances.push((h, t, r)),
            _ => unresolved += 1,
        }
    }
    let universe: Vec<usize> = (0..entity_labels.len()).collect();
    let known: HashSet<KbcInstance> = instances.iter().copied().collect();
    let outcome = kbc_evaluate(&store, &instances, &universe, cutoffs, filtered.then_some(&known))?;
    write_report(report_out, &outcome.report)?;
    Ok((outcome.report, unresolved + outcome.skipped))
}

/// RE evaluation against a dumped word table and pattern dump. Test
/// sentences are reduced to local meta patterns; unseen words fall outside
/// the trained table and are skipped by the matcher.
pub fn eval_re_from_files(
    words_vec: &Path,
    patterns_path: &Path,
    sentences_path: &Path,
    gold_path: &Path,
    out_dir: &Path,
    pattern_cfg: &PatternConfig,
    cutoffs: &[usize],
) -> Result<EvalReport> {
    let (word_labels, word_data, dim) = read_embedding_file(words_vec)?;
    let mut word_vocab = Vocab::from_labels(word_labels);

    // Reliable patterns grouped by relation, in dump order.
    let mut reliable_owned: Vec<(String, Vec<Pattern>)> = Vec::new();
    for row in read_pattern_dump(patterns_path)? {
        let pattern =
            Pattern::from_canonical(row.kind, &row.canonical, |w| word_vocab.intern(w));
        match reliable_owned.iter_mut().find(|(name, _)| *name == row.relation) {
            Some((_, v)) => v.push(pattern),
            None => reliable_owned.push((row.relation.clone(), vec![pattern])),
        }
    }

    let gold: HashMap<(String, String), String> = read_triples(gold_path)?
        .into_iter()
        .map(|(r, h, t)| ((h, t), r))
        .collect();
    let (test_corpus, _) =
        load_corpus_with_vocabs(sentences_path, Vocab::new(), word_vocab)?;
    let groups = re_groups_from_corpus(&test_corpus, &gold, pattern_cfg);

    let table = WordVectorTable::new(dim, &word_data);
    let reliable: Vec<(String, Vec<&Pattern>)> = reliable_owned
        .iter()
        .map(|(n, ps)| (n.clone(), ps.iter().collect()))
        .collect();
    let matcher = PatternMatcher::new(&reliable, &table);
    let (report, ranked) = re_evaluate(&groups, &gold, &matcher, &table, cutoffs)?;

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_report(out_dir.join("re_report.tsv"), &report)?;
    write_pr_curve(out_dir.join("re_pr_curve.tsv"), &report.pr_curve)?;
    write_predictions(out_dir.join("re_predictions.tsv"), &ranked)?;
    Ok(report)
}
