//! Alternating optimization driver: train the distributional module with the
//! pairs extracted by the current pattern sets, then re-select each
//! relation's top-K patterns with the fresh scorer.
//!
//! Iteration 0 bootstraps the pattern sets from seed reliability alone (the
//! scorer is untrained, so this is the lambda = 0 degenerate selection).
//! Every following iteration materializes G(P), runs one training epoch and
//! re-selects; the final iteration skips the re-selection so that a single
//! outer iteration unrolls to "seed-only selection plus one epoch trained on
//! those patterns' pairs".

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CooccurrenceNetwork, Corpus, EntityPair, RelationSpec};
use crate::embed::{train_epoch, EmbeddingStore, TrainConfig};
use crate::error::{Error, Result};
use crate::pattern::{
    combined_reliability, extract_pairs, select_top_k, PairScorer, PatternId, PatternIndex,
};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub outer_iterations: usize,
    /// Reliable patterns per relation (K).
    pub top_k: usize,
    pub train: TrainConfig,
    /// Forces a single training worker so runs are bit-reproducible.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            outer_iterations: 5,
            top_k: 100,
            train: TrainConfig::default(),
            deterministic: true,
        }
    }
}

/// Per-iteration trace record. Iteration 0 is the bootstrap selection; it
/// carries no training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Mean seed reliability over all selected patterns, pooled over
    /// relations.
    pub mean_reliability: f64,
    /// Mean distributional bonus over all selected patterns (0 at the
    /// bootstrap iteration).
    pub mean_bonus: f64,
    pub text_objective: f64,
    pub seed_objective: f64,
    pub interaction_objective: f64,
    /// Ranked selection per relation, in spec order.
    pub selected: Vec<Vec<PatternId>>,
}

#[derive(Debug, Clone)]
pub struct CoTrainState {
    /// Completed training iterations.
    pub outer_iteration: usize,
    /// Current ranked selection per relation.
    pub selected: Vec<Vec<PatternId>>,
    pub store: EmbeddingStore,
    pub trace: Vec<IterationRecord>,
}

impl CoTrainState {
    /// Materialized G(P) per relation under the current selection.
    pub fn generated(&self, index: &PatternIndex) -> Vec<Vec<EntityPair>> {
        self.selected.iter().map(|sel| extract_pairs(index, sel)).collect()
    }
}

/// Jaccard overlap of two per-relation selections, pooled over relations.
/// Both empty counts as full overlap.
pub fn selection_overlap(a: &[Vec<PatternId>], b: &[Vec<PatternId>]) -> f64 {
    use std::collections::BTreeSet;
    let mut intersection = 0usize;
    let mut union = 0usize;
    for (sa, sb) in a.iter().zip(b) {
        let xa: BTreeSet<_> = sa.iter().collect();
        let xb: BTreeSet<_> = sb.iter().collect();
        intersection += xa.intersection(&xb).count();
        union += xa.union(&xb).count();
    }
    if union == 0 {
        1.0
    } else {
        intersection as f64 / union as f64
    }
}

pub fn run(
    corpus: &Corpus,
    network: &CooccurrenceNetwork,
    index: &PatternIndex,
    specs: &[RelationSpec],
    cfg: &RunConfig,
) -> Result<CoTrainState> {
    run_with_observer(corpus, network, index, specs, cfg, |_| {})
}

/// Like [`run`], invoking the observer after every completed iteration
/// (including the bootstrap), e.g. for checkpointing or per-iteration
/// evaluation.
pub fn run_with_observer(
    corpus: &Corpus,
    network: &CooccurrenceNetwork,
    index: &PatternIndex,
    specs: &[RelationSpec],
    cfg: &RunConfig,
    mut observer: impl FnMut(&CoTrainState),
) -> Result<CoTrainState> {
    if cfg.outer_iterations == 0 {
        return Err(Error::Config("outer_iterations must be at least 1".into()));
    }
    if cfg.top_k == 0 {
        return Err(Error::Config("top_k must be at least 1".into()));
    }
    if !specs.iter().any(|s| s.seed_count() > 0) {
        return Err(Error::Invalid(
            "no usable relations: every relation has zero seeds".into(),
        ));
    }

    let mut train_cfg = cfg.train.clone();
    if cfg.deterministic {
        train_cfg.workers = 1;
    }

    let store = EmbeddingStore::init(
        corpus.entity_count(),
        corpus.word_count(),
        specs.len(),
        train_cfg.dim,
        train_cfg.rng_seed,
    );
    // Separate stream for sampling so the store init draws are not replayed.
    let mut rng = ChaCha8Rng::seed_from_u64(train_cfg.rng_seed ^ 0x9E37_79B9_7F4A_7C15);

    // Bootstrap: seed reliability only.
    let selected: Vec<Vec<PatternId>> = specs
        .iter()
        .map(|spec| select_top_k(index, spec, None, 0.0, cfg.top_k))
        .collect::<Result<_>>()?;

    let mut state = CoTrainState {
        outer_iteration: 0,
        selected,
        store,
        trace: Vec::new(),
    };
    let (boot_r, _) = selection_stats(index, specs, &state.selected, None, train_cfg.lambda)?;
    state.trace.push(IterationRecord {
        iteration: 0,
        mean_reliability: boot_r,
        mean_bonus: 0.0,
        text_objective: 0.0,
        seed_objective: 0.0,
        interaction_objective: 0.0,
        selected: state.selected.clone(),
    });
    observer(&state);

    for iteration in 1..=cfg.outer_iterations {
        let generated = state.generated(index);
        let report =
            train_epoch(&mut state.store, network, specs, &generated, &train_cfg, &mut rng);

        if iteration < cfg.outer_iterations {
            state.selected = reselect(index, specs, &state.store, &train_cfg, cfg.top_k)?;
        }
        let (mean_r, mean_bonus) = selection_stats(
            index,
            specs,
            &state.selected,
            Some(&state.store),
            train_cfg.lambda,
        )?;

        state.outer_iteration = iteration;
        state.trace.push(IterationRecord {
            iteration,
            mean_reliability: mean_r,
            mean_bonus,
            text_objective: report.text.mean(),
            seed_objective: report.seed.mean(),
            interaction_objective: report.interaction.mean(),
            selected: state.selected.clone(),
        });
        observer(&state);
    }
    Ok(state)
}

fn reselect(
    index: &PatternIndex,
    specs: &[RelationSpec],
    store: &EmbeddingStore,
    train_cfg: &TrainConfig,
    top_k: usize,
) -> Result<Vec<Vec<PatternId>>> {
    specs
        .iter()
        .map(|spec| {
            let scorer = store.relation_scorer(spec.relation);
            select_top_k(index, spec, Some(&scorer), train_cfg.lambda, top_k)
        })
        .collect()
}

fn selection_stats(
    index: &PatternIndex,
    specs: &[RelationSpec],
    selected: &[Vec<PatternId>],
    store: Option<&EmbeddingStore>,
    lambda: f64,
) -> Result<(f64, f64)> {
    let mut sum_r = 0.0;
    let mut sum_b = 0.0;
    let mut total = 0usize;
    for (ri, sel) in selected.iter().enumerate() {
        let scorer = store.map(|s| s.relation_scorer(specs[ri].relation));
        for &id in sel {
            let score = combined_reliability(
                index,
                id,
                &specs[ri],
                scorer.as_ref().map(|s| s as &dyn PairScorer),
                lambda,
            )?;
            sum_r += score.seed_reliability;
            sum_b += score.distributional_bonus.unwrap_or(0.0);
            total += 1;
        }
    }
    if total == 0 {
        Ok((0.0, 0.0))
    } else {
        Ok((sum_r / total as f64, sum_b / total as f64))
    }
}

/// Monte-Carlo snapshot of the three objective components plus the exact
/// pattern objective. Used for traces and convergence plots only.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSnapshot {
    /// Exact sum of seed reliabilities over all selected patterns.
    pub pattern_objective: f64,
    pub text_mean: f64,
    pub seed_mean: f64,
    pub interaction_mean: f64,
    /// Set when sample_size was zero: all sampled means are zero.
    pub empty: bool,
}

pub fn objective_snapshot(
    state: &CoTrainState,
    network: &CooccurrenceNetwork,
    index: &PatternIndex,
    specs: &[RelationSpec],
    cfg: &TrainConfig,
    sample_size: usize,
    rng_seed: u64,
) -> Result<ObjectiveSnapshot> {
    let mut pattern_objective = 0.0;
    for (ri, sel) in state.selected.iter().enumerate() {
        for &id in sel {
            pattern_objective += crate::pattern::seed_reliability(index, id, &specs[ri])?;
        }
    }

    if sample_size == 0 {
        return Ok(ObjectiveSnapshot {
            pattern_objective,
            text_mean: 0.0,
            seed_mean: 0.0,
            interaction_mean: 0.0,
            empty: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let store = &state.store;

    let mut text_sum = 0.0;
    let mut text_n = 0usize;
    if !network.is_empty() {
        for _ in 0..sample_size {
            let edge = *network.sample_edge(&mut rng).expect("non-empty network");
            let negatives: Vec<_> = (0..cfg.negatives)
                .map(|_| network.sample_noise_word(&mut rng).expect("words exist"))
                .collect();
            text_sum += crate::embed::text_term(store, edge.entity, edge.word, &negatives);
            text_n += 1;
        }
    }

    let usable: Vec<usize> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.seed_count() > 0)
        .map(|(i, _)| i)
        .collect();
    let mut seed_sum = 0.0;
    let mut seed_n = 0usize;
    if !usable.is_empty() {
        for _ in 0..sample_size {
            let spec = &specs[usable[rng.gen_range(0..usable.len())]];
            let pos = spec.seed_pairs[rng.gen_range(0..spec.seed_pairs.len())];
            let replacement = rng.gen_range(0..store.entity_count());
            let neg = if rng.gen_bool(0.5) {
                EntityPair::new(replacement, pos.tail)
            } else {
                EntityPair::new(pos.head, replacement)
            };
            seed_sum += crate::embed::margin_term(store, spec.relation, pos, neg);
            seed_n += 1;
        }
    }

    let generated = state.generated(index);
    let populated: Vec<usize> =
        (0..specs.len()).filter(|&ri| !generated[ri].is_empty()).collect();
    let mut inter_sum = 0.0;
    let mut inter_n = 0usize;
    if !populated.is_empty() {
        for _ in 0..sample_size {
            let ri = populated[rng.gen_range(0..populated.len())];
            let pairs = &generated[ri];
            let pair = pairs[rng.gen_range(0..pairs.len())];
            inter_sum += store.score(pair, specs[ri].relation);
            inter_n += 1;
        }
    }

    let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
    Ok(ObjectiveSnapshot {
        pattern_objective,
        text_mean: mean(text_sum, text_n),
        seed_mean: mean(seed_sum, seed_n),
        interaction_mean: mean(inter_sum, inter_n),
        empty: false,
    })
}
