//! Distributional module: entity, word-context and relation vectors trained
//! by sampled stochastic gradient ascent.
//!
//! Three objective terms are optimized. Text: negative-sampling ascent on
//! edges of the co-occurrence network, edges drawn proportionally to their
//! weight, negatives from the unigram distribution raised to 3/4. Seeds: a
//! ranking margin `min{1, L(f|r) - L(f'|r)}` against corrupted pairs,
//! scaled by `eta`. Interaction: ascent on the pair score `L(f|r)` of pairs
//! generated by the pattern module, scaled by `lambda`.
//!
//! The pair score is translation-style: `L(f|r) = 1 - ||x_h + y_r - x_t||^2`,
//! maximal exactly when the head vector plus the relation vector lands on
//! the tail vector.
//!
//! Training tolerates unsynchronized data-parallel workers (lost updates are
//! accepted); a single worker with a seeded sampler is bit-deterministic and
//! is what every acceptance test uses.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CooccurrenceNetwork, EntityId, EntityPair, RelationId, RelationSpec, WordId};

/// All trainable parameters: entity vectors, word context vectors and
/// relation vectors, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    entity_count: usize,
    word_count: usize,
    relation_count: usize,
    entities: Vec<f64>,
    words: Vec<f64>,
    relations: Vec<f64>,
}

impl EmbeddingStore {
    /// Entity and relation entries drawn uniformly from [-0.5/d, +0.5/d),
    /// word context vectors start at zero. Fully determined by the seed.
    pub fn init(
        entity_count: usize,
        word_count: usize,
        relation_count: usize,
        dim: usize,
        rng_seed: u64,
    ) -> Self {
        assert!(dim >= 1, "embedding dimension must be at least 1");
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n * dim).map(|_| (rng.gen::<f64>() - 0.5) / dim as f64).collect()
        };
        let entities = draw(entity_count);
        let relations = draw(relation_count);
        EmbeddingStore {
            dim,
            entity_count,
            word_count,
            relation_count,
            entities,
            words: vec![0.0; word_count * dim],
            relations,
        }
    }

    /// Assembles a store from dumped vectors; rows must share one dimension.
    pub fn from_parts(
        dim: usize,
        entities: Vec<f64>,
        words: Vec<f64>,
        relations: Vec<f64>,
    ) -> Self {
        assert!(dim >= 1);
        assert_eq!(entities.len() % dim, 0);
        assert_eq!(words.len() % dim, 0);
        assert_eq!(relations.len() % dim, 0);
        EmbeddingStore {
            dim,
            entity_count: entities.len() / dim,
            word_count: words.len() / dim,
            relation_count: relations.len() / dim,
            entities,
            words,
            relations,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    pub fn entity(&self, id: EntityId) -> &[f64] {
        &self.entities[id * self.dim..(id + 1) * self.dim]
    }

    pub fn entity_mut(&mut self, id: EntityId) -> &mut [f64] {
        &mut self.entities[id * self.dim..(id + 1) * self.dim]
    }

    pub fn word(&self, id: WordId) -> &[f64] {
        &self.words[id * self.dim..(id + 1) * self.dim]
    }

    pub fn word_mut(&mut self, id: WordId) -> &mut [f64] {
        &mut self.words[id * self.dim..(id + 1) * self.dim]
    }

    pub fn relation(&self, id: RelationId) -> &[f64] {
        &self.relations[id * self.dim..(id + 1) * self.dim]
    }

    pub fn relation_mut(&mut self, id: RelationId) -> &mut [f64] {
        &mut self.relations[id * self.dim..(id + 1) * self.dim]
    }

    /// Pair score under a relation: `1 - ||x_h + y_r - x_t||^2`.
    pub fn score(&self, pair: EntityPair, relation: RelationId) -> f64 {
        let h = self.entity(pair.head);
        let t = self.entity(pair.tail);
        let y = self.relation(relation);
        let mut sq = 0.0;
        for k in 0..self.dim {
            let r = h[k] + y[k] - t[k];
            sq += r * r;
        }
        1.0 - sq
    }

    /// A `PairScorer` view of one relation's score function.
    pub fn relation_scorer(&self, relation: RelationId) -> impl Fn(EntityPair) -> f64 + '_ {
        move |pair| self.score(pair, relation)
    }

    pub fn all_finite(&self) -> bool {
        self.entities.iter().chain(&self.words).chain(&self.relations).all(|v| v.is_finite())
    }

    /// Row-major backing storage, for dumps and vector tables.
    pub fn entities_flat(&self) -> &[f64] {
        &self.entities
    }

    pub fn words_flat(&self) -> &[f64] {
        &self.words
    }

    pub fn relations_flat(&self) -> &[f64] {
        &self.relations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionForm {
    /// Ascend the raw pair score of generated pairs.
    Direct,
    /// Treat generated pairs as pseudo-seeds under the ranking margin.
    Ranking,
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub dim: usize,
    pub learning_rate: f64,
    /// Weight of the seed ranking objective.
    pub eta: f64,
    /// Weight of the interaction objective.
    pub lambda: f64,
    /// Negative words per sampled edge.
    pub negatives: usize,
    /// Text edge samples per outer iteration.
    pub text_samples: usize,
    /// Seed-pair samples per relation per outer iteration.
    pub seed_samples: usize,
    /// Generated-pair samples per relation per outer iteration.
    pub gen_samples: usize,
    pub interaction_form: InteractionForm,
    /// L2 cap on every raw gradient vector.
    pub grad_clip: f64,
    /// Data-parallel workers; anything above 1 gives up determinism.
    pub workers: usize,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            learning_rate: 0.01,
            eta: 0.005,
            lambda: 1.0,
            negatives: 5,
            text_samples: 2_000_000,
            seed_samples: 100_000,
            gen_samples: 100_000,
            interaction_form: InteractionForm::Direct,
            grad_clip: 5.0,
            workers: 1,
            rng_seed: 1,
        }
    }
}

/// Which parameter vector a gradient applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Entity(EntityId),
    Word(WordId),
    Relation(RelationId),
}

// ---------------------------------------------------------------------------
// Pure objective terms and gradients.
//
// These read parameters through `VectorRead` so the exact same math runs on
// a plain store (tests, evaluation) and on the shared atomic view used
// during training.
// ---------------------------------------------------------------------------

pub(crate) trait VectorRead {
    fn dim(&self) -> usize;
    fn entity_count(&self) -> usize;
    fn load_entity(&self, id: EntityId, out: &mut [f64]);
    fn load_word(&self, id: WordId, out: &mut [f64]);
    fn load_relation(&self, id: RelationId, out: &mut [f64]);
}

impl VectorRead for EmbeddingStore {
    fn dim(&self) -> usize {
        self.dim
    }
    fn entity_count(&self) -> usize {
        self.entity_count
    }
    fn load_entity(&self, id: EntityId, out: &mut [f64]) {
        out.copy_from_slice(self.entity(id));
    }
    fn load_word(&self, id: WordId, out: &mut [f64]) {
        out.copy_from_slice(self.word(id));
    }
    fn load_relation(&self, id: RelationId, out: &mut [f64]) {
        out.copy_from_slice(self.relation(id));
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient of the text term. The gradient with respect to a word context
/// vector is `coef * x_e`; coefficients of repeated words are summed.
pub struct TextGradient {
    pub entity_grad: Vec<f64>,
    pub word_coefs: Vec<(WordId, f64)>,
}

fn text_term_impl<V: VectorRead>(
    v: &V,
    entity: EntityId,
    word: WordId,
    negatives: &[WordId],
) -> f64 {
    let d = v.dim();
    let mut ent = vec![0.0; d];
    let mut ctx = vec![0.0; d];
    v.load_entity(entity, &mut ent);
    v.load_word(word, &mut ctx);
    let mut term = sigmoid(dot(&ent, &ctx)).ln();
    for &neg in negatives {
        v.load_word(neg, &mut ctx);
        term += sigmoid(-dot(&ent, &ctx)).ln();
    }
    term
}

fn text_gradient_impl<V: VectorRead>(
    v: &V,
    entity: EntityId,
    word: WordId,
    negatives: &[WordId],
) -> TextGradient {
    let d = v.dim();
    let mut ent = vec![0.0; d];
    v.load_entity(entity, &mut ent);
    let mut entity_grad = vec![0.0; d];
    let mut word_coefs: Vec<(WordId, f64)> = Vec::with_capacity(1 + negatives.len());

    let mut push_coef = |w: WordId, coef: f64| {
        if let Some(entry) = word_coefs.iter_mut().find(|(id, _)| *id == w) {
            entry.1 += coef;
        } else {
            word_coefs.push((w, coef));
        }
    };

    let mut ctx = vec![0.0; d];
    v.load_word(word, &mut ctx);
    // d/dz log sigma(z) = 1 - sigma(z)
    let coef = 1.0 - sigmoid(dot(&ent, &ctx));
    for k in 0..d {
        entity_grad[k] += coef * ctx[k];
    }
    push_coef(word, coef);

    for &neg in negatives {
        v.load_word(neg, &mut ctx);
        // d/dz log sigma(-z) = -sigma(z)
        let coef = -sigmoid(dot(&ent, &ctx));
        for k in 0..d {
            entity_grad[k] += coef * ctx[k];
        }
        push_coef(neg, coef);
    }
    TextGradient { entity_grad, word_coefs }
}

/// Negative-sampling text objective term for one edge and its negatives.
pub fn text_term(
    store: &EmbeddingStore,
    entity: EntityId,
    word: WordId,
    negatives: &[WordId],
) -> f64 {
    text_term_impl(store, entity, word, negatives)
}

pub fn text_gradient(
    store: &EmbeddingStore,
    entity: EntityId,
    word: WordId,
    negatives: &[WordId],
) -> TextGradient {
    text_gradient_impl(store, entity, word, negatives)
}

fn score_impl<V: VectorRead>(v: &V, pair: EntityPair, relation: RelationId) -> f64 {
    let d = v.dim();
    let mut h = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut y = vec![0.0; d];
    v.load_entity(pair.head, &mut h);
    v.load_entity(pair.tail, &mut t);
    v.load_relation(relation, &mut y);
    let mut sq = 0.0;
    for k in 0..d {
        let r = h[k] + y[k] - t[k];
        sq += r * r;
    }
    1.0 - sq
}

fn accumulate(grads: &mut Vec<(Param, Vec<f64>)>, param: Param, scale: f64, v: &[f64]) {
    if let Some((_, g)) = grads.iter_mut().find(|(p, _)| *p == param) {
        for (gk, vk) in g.iter_mut().zip(v) {
            *gk += scale * vk;
        }
    } else {
        grads.push((param, v.iter().map(|x| scale * x).collect()));
    }
}

/// Gradient of `L(f|r)` with respect to the head, tail and relation vectors.
pub fn score_gradient(
    store: &EmbeddingStore,
    pair: EntityPair,
    relation: RelationId,
) -> Vec<(Param, Vec<f64>)> {
    score_gradient_impl(store, pair, relation)
}

fn score_gradient_impl<V: VectorRead>(
    v: &V,
    pair: EntityPair,
    relation: RelationId,
) -> Vec<(Param, Vec<f64>)> {
    let d = v.dim();
    let mut h = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut y = vec![0.0; d];
    v.load_entity(pair.head, &mut h);
    v.load_entity(pair.tail, &mut t);
    v.load_relation(relation, &mut y);
    let residual: Vec<f64> = (0..d).map(|k| h[k] + y[k] - t[k]).collect();

    let mut grads = Vec::with_capacity(3);
    accumulate(&mut grads, Param::Entity(pair.head), -2.0, &residual);
    accumulate(&mut grads, Param::Entity(pair.tail), 2.0, &residual);
    accumulate(&mut grads, Param::Relation(relation), -2.0, &residual);
    grads
}

/// Ranking margin term `min{1, L(pos|r) - L(neg|r)}`.
pub fn margin_term(
    store: &EmbeddingStore,
    relation: RelationId,
    positive: EntityPair,
    negative: EntityPair,
) -> f64 {
    (score_impl(store, positive, relation) - score_impl(store, negative, relation)).min(1.0)
}

/// Gradient of the margin below the clip; `None` once the margin reached 1.
/// Shared vectors between the positive and corrupted pair accumulate, so a
/// corruption that collides with the positive yields no update.
pub fn margin_gradient(
    store: &EmbeddingStore,
    relation: RelationId,
    positive: EntityPair,
    negative: EntityPair,
) -> Option<Vec<(Param, Vec<f64>)>> {
    margin_gradient_impl(store, relation, positive, negative)
}

fn margin_gradient_impl<V: VectorRead>(
    v: &V,
    relation: RelationId,
    positive: EntityPair,
    negative: EntityPair,
) -> Option<Vec<(Param, Vec<f64>)>> {
    let delta = score_impl(v, positive, relation) - score_impl(v, negative, relation);
    if delta >= 1.0 {
        return None;
    }
    let d = v.dim();
    let mut h = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut y = vec![0.0; d];
    v.load_relation(relation, &mut y);

    let mut grads: Vec<(Param, Vec<f64>)> = Vec::with_capacity(5);

    v.load_entity(positive.head, &mut h);
    v.load_entity(positive.tail, &mut t);
    let pos_res: Vec<f64> = (0..d).map(|k| h[k] + y[k] - t[k]).collect();
    accumulate(&mut grads, Param::Entity(positive.head), -2.0, &pos_res);
    accumulate(&mut grads, Param::Entity(positive.tail), 2.0, &pos_res);
    accumulate(&mut grads, Param::Relation(relation), -2.0, &pos_res);

    v.load_entity(negative.head, &mut h);
    v.load_entity(negative.tail, &mut t);
    let neg_res: Vec<f64> = (0..d).map(|k| h[k] + y[k] - t[k]).collect();
    accumulate(&mut grads, Param::Entity(negative.head), 2.0, &neg_res);
    accumulate(&mut grads, Param::Entity(negative.tail), -2.0, &neg_res);
    accumulate(&mut grads, Param::Relation(relation), 2.0, &neg_res);

    Some(grads)
}

// ---------------------------------------------------------------------------
// Shared parameter view.
//
// Parameters are reinterpreted as atomic u64 bit patterns for the duration
// of an update; relaxed read-modify-write gives hogwild semantics across
// workers and exact plain arithmetic for a single worker.
// ---------------------------------------------------------------------------

#[repr(transparent)]
struct AtomicCell(AtomicU64);

impl AtomicCell {
    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn add(&self, delta: f64) {
        let v = self.get() + delta;
        self.0.store(v.to_bits(), Ordering::Relaxed);
    }
}

fn as_cells(buf: &mut [f64]) -> &[AtomicCell] {
    // Same size and alignment as f64 on every supported target; the &mut
    // borrow guarantees exclusive access for the lifetime of the view.
    unsafe { std::slice::from_raw_parts(buf.as_ptr() as *const AtomicCell, buf.len()) }
}

pub(crate) struct StoreView<'a> {
    dim: usize,
    entity_count: usize,
    entities: &'a [AtomicCell],
    words: &'a [AtomicCell],
    relations: &'a [AtomicCell],
}

impl<'a> StoreView<'a> {
    fn new(store: &'a mut EmbeddingStore) -> Self {
        StoreView {
            dim: store.dim,
            entity_count: store.entity_count,
            entities: as_cells(&mut store.entities),
            words: as_cells(&mut store.words),
            relations: as_cells(&mut store.relations),
        }
    }

    fn load(&self, cells: &[AtomicCell], id: usize, out: &mut [f64]) {
        let base = id * self.dim;
        for (k, o) in out.iter_mut().enumerate() {
            *o = cells[base + k].get();
        }
    }

    /// `param += step * clip(grad)` where the clip caps the L2 norm of the
    /// raw gradient.
    fn apply(&self, param: Param, grad: &[f64], step: f64, clip: f64) {
        let norm_sq: f64 = grad.iter().map(|g| g * g).sum();
        let scale = if norm_sq > clip * clip {
            step * clip / norm_sq.sqrt()
        } else {
            step
        };
        let cells = match param {
            Param::Entity(id) => &self.entities[id * self.dim..],
            Param::Word(id) => &self.words[id * self.dim..],
            Param::Relation(id) => &self.relations[id * self.dim..],
        };
        for (k, g) in grad.iter().enumerate() {
            cells[k].add(scale * g);
        }
    }
}

impl VectorRead for StoreView<'_> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn entity_count(&self) -> usize {
        self.entity_count
    }
    fn load_entity(&self, id: EntityId, out: &mut [f64]) {
        self.load(self.entities, id, out);
    }
    fn load_word(&self, id: WordId, out: &mut [f64]) {
        self.load(self.words, id, out);
    }
    fn load_relation(&self, id: RelationId, out: &mut [f64]) {
        self.load(self.relations, id, out);
    }
}

// ---------------------------------------------------------------------------
// Sampled ascent steps.
// ---------------------------------------------------------------------------

fn text_step_view<R: Rng>(
    view: &StoreView<'_>,
    network: &CooccurrenceNetwork,
    cfg: &TrainConfig,
    rng: &mut R,
) -> f64 {
    let edge = *network.sample_edge(rng).expect("non-empty network");
    let negatives: Vec<WordId> = (0..cfg.negatives)
        .map(|_| network.sample_noise_word(rng).expect("non-empty vocabulary"))
        .collect();

    let term = text_term_impl(view, edge.entity, edge.word, &negatives);
    let grad = text_gradient_impl(view, edge.entity, edge.word, &negatives);

    // Word updates use the entity vector as read before the entity update.
    let mut ent = vec![0.0; view.dim()];
    view.load_entity(edge.entity, &mut ent);
    let mut word_grad = vec![0.0; view.dim()];
    for (w, coef) in &grad.word_coefs {
        for k in 0..view.dim() {
            word_grad[k] = coef * ent[k];
        }
        view.apply(Param::Word(*w), &word_grad, cfg.learning_rate, cfg.grad_clip);
    }
    view.apply(
        Param::Entity(edge.entity),
        &grad.entity_grad,
        cfg.learning_rate,
        cfg.grad_clip,
    );
    term
}

fn corrupt_pair<R: Rng>(view: &StoreView<'_>, pair: EntityPair, rng: &mut R) -> EntityPair {
    let replacement = rng.gen_range(0..view.entity_count());
    if rng.gen_bool(0.5) {
        EntityPair::new(replacement, pair.tail)
    } else {
        EntityPair::new(pair.head, replacement)
    }
}

fn margin_step_view<R: Rng>(
    view: &StoreView<'_>,
    relation: RelationId,
    pairs: &[EntityPair],
    step: f64,
    cfg: &TrainConfig,
    rng: &mut R,
) -> f64 {
    let positive = pairs[rng.gen_range(0..pairs.len())];
    let negative = corrupt_pair(view, positive, rng);
    let delta =
        score_impl(view, positive, relation) - score_impl(view, negative, relation);
    if let Some(grads) = margin_gradient_impl(view, relation, positive, negative) {
        for (param, grad) in &grads {
            view.apply(*param, grad, step, cfg.grad_clip);
        }
    }
    delta.min(1.0)
}

fn interaction_step_view<R: Rng>(
    view: &StoreView<'_>,
    relation: RelationId,
    generated: &[EntityPair],
    cfg: &TrainConfig,
    rng: &mut R,
) -> f64 {
    match cfg.interaction_form {
        InteractionForm::Direct => {
            let pair = generated[rng.gen_range(0..generated.len())];
            let term = score_impl(view, pair, relation);
            let grads = score_gradient_impl(view, pair, relation);
            let step = cfg.lambda * cfg.learning_rate;
            for (param, grad) in &grads {
                view.apply(*param, grad, step, cfg.grad_clip);
            }
            term
        }
        InteractionForm::Ranking => {
            let step = cfg.lambda * cfg.learning_rate;
            margin_step_view(view, relation, generated, step, cfg, rng)
        }
    }
}

/// One negative-sampling ascent step on a sampled co-occurrence edge.
/// Returns the sampled objective term, or `None` for an empty network.
pub fn text_step<R: Rng>(
    store: &mut EmbeddingStore,
    network: &CooccurrenceNetwork,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Option<f64> {
    if network.is_empty() {
        return None;
    }
    let view = StoreView::new(store);
    Some(text_step_view(&view, network, cfg, rng))
}

/// One ranking-margin step on a sampled seed pair; no update once the
/// sampled margin has reached the clip. Returns `min{1, margin}`.
pub fn seed_step<R: Rng>(
    store: &mut EmbeddingStore,
    spec: &RelationSpec,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Option<f64> {
    if spec.seed_pairs.is_empty() {
        return None;
    }
    let view = StoreView::new(store);
    let step = cfg.eta * cfg.learning_rate;
    Some(margin_step_view(&view, spec.relation, &spec.seed_pairs, step, cfg, rng))
}

/// One ascent step on a pair sampled from the generated set G(P); a no-op
/// for an empty set.
pub fn interaction_step<R: Rng>(
    store: &mut EmbeddingStore,
    spec: &RelationSpec,
    generated: &[EntityPair],
    cfg: &TrainConfig,
    rng: &mut R,
) -> Option<f64> {
    if generated.is_empty() {
        return None;
    }
    let view = StoreView::new(store);
    Some(interaction_step_view(&view, spec.relation, generated, cfg, rng))
}

/// Online mean of sampled objective terms, bucketed into quartiles of the
/// step sequence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectiveStat {
    pub count: usize,
    pub sum: f64,
    quartile_sums: [f64; 4],
    quartile_counts: [usize; 4],
}

impl ObjectiveStat {
    fn record(&mut self, index: usize, planned: usize, value: f64) {
        self.count += 1;
        self.sum += value;
        let q = if planned == 0 { 0 } else { (index * 4 / planned).min(3) };
        self.quartile_sums[q] += value;
        self.quartile_counts[q] += 1;
    }

    fn merge(&mut self, other: &ObjectiveStat) {
        self.count += other.count;
        self.sum += other.sum;
        for q in 0..4 {
            self.quartile_sums[q] += other.quartile_sums[q];
            self.quartile_counts[q] += other.quartile_counts[q];
        }
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    pub fn quartile_mean(&self, q: usize) -> Option<f64> {
        (self.quartile_counts[q] > 0).then(|| self.quartile_sums[q] / self.quartile_counts[q] as f64)
    }
}

/// Mean sampled objective terms of one epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpochReport {
    pub text: ObjectiveStat,
    pub seed: ObjectiveStat,
    pub interaction: ObjectiveStat,
}

impl EpochReport {
    fn merge(&mut self, other: &EpochReport) {
        self.text.merge(&other.text);
        self.seed.merge(&other.seed);
        self.interaction.merge(&other.interaction);
    }
}

/// One outer-iteration epoch: `text_samples` text steps, then per relation
/// `seed_samples` seed steps and `gen_samples` interaction steps in
/// round-robin over relations. Relations without seeds are skipped;
/// relations with an empty generated set skip only interaction steps.
pub fn train_epoch(
    store: &mut EmbeddingStore,
    network: &CooccurrenceNetwork,
    specs: &[RelationSpec],
    generated: &[Vec<EntityPair>],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> EpochReport {
    assert_eq!(specs.len(), generated.len(), "one generated set per relation");
    let workers = cfg.workers.max(1);
    if workers == 1 {
        let view = StoreView::new(store);
        return epoch_worker(&view, network, specs, generated, cfg, WorkerShare::full(cfg), rng);
    }

    // Hogwild: split sample budgets across workers; lost updates tolerated.
    let seeds: Vec<u64> = (0..workers).map(|_| rng.next_u64()).collect();
    let view = StoreView::new(store);
    let mut report = EpochReport::default();
    std::thread::scope(|scope| {
        let view = &view;
        let handles: Vec<_> = seeds
            .into_iter()
            .enumerate()
            .map(|(w, seed)| {
                let share = WorkerShare::split(cfg, w, workers);
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    epoch_worker(view, network, specs, generated, cfg, share, &mut rng)
                })
            })
            .collect();
        for h in handles {
            report.merge(&h.join().expect("training worker panicked"));
        }
    });
    report
}

/// Per-worker slice of the epoch's sample budget.
struct WorkerShare {
    text: usize,
    seed: usize,
    gen: usize,
}

impl WorkerShare {
    fn full(cfg: &TrainConfig) -> Self {
        WorkerShare { text: cfg.text_samples, seed: cfg.seed_samples, gen: cfg.gen_samples }
    }

    fn split(cfg: &TrainConfig, worker: usize, workers: usize) -> Self {
        let part = |total: usize| {
            let base = total / workers;
            base + usize::from(worker < total % workers)
        };
        WorkerShare {
            text: part(cfg.text_samples),
            seed: part(cfg.seed_samples),
            gen: part(cfg.gen_samples),
        }
    }
}

fn epoch_worker<R: Rng>(
    view: &StoreView<'_>,
    network: &CooccurrenceNetwork,
    specs: &[RelationSpec],
    generated: &[Vec<EntityPair>],
    cfg: &TrainConfig,
    share: WorkerShare,
    rng: &mut R,
) -> EpochReport {
    let mut report = EpochReport::default();

    if !network.is_empty() {
        for i in 0..share.text {
            let term = text_step_view(view, network, cfg, rng);
            report.text.record(i, share.text, term);
        }
    }

    let usable: Vec<usize> = specs
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.seed_pairs.is_empty())
        .map(|(i, _)| i)
        .collect();
    if usable.is_empty() {
        return report;
    }

    let rounds = share.seed.max(share.gen);
    let seed_total = share.seed * usable.len();
    let gen_total = share.gen * usable.len();
    let (mut seed_idx, mut gen_idx) = (0usize, 0usize);
    let seed_scale = cfg.eta * cfg.learning_rate;
    for round in 0..rounds {
        for &ri in &usable {
            let spec = &specs[ri];
            if round < share.seed {
                let term = margin_step_view(
                    view,
                    spec.relation,
                    &spec.seed_pairs,
                    seed_scale,
                    cfg,
                    rng,
                );
                report.seed.record(seed_idx, seed_total, term);
                seed_idx += 1;
            }
            if round < share.gen && !generated[ri].is_empty() {
                let term = interaction_step_view(view, spec.relation, &generated[ri], cfg, rng);
                report.interaction.record(gen_idx, gen_total, term);
                gen_idx += 1;
            }
        }
    }
    report
}

/// Distributional-only training (no pattern interplay): `epochs` epochs of
/// text and seed steps. This is the REPEL-D ablation and the `train`
/// subcommand.
pub fn train_distributional(
    store: &mut EmbeddingStore,
    network: &CooccurrenceNetwork,
    specs: &[RelationSpec],
    cfg: &TrainConfig,
    epochs: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<EpochReport> {
    let generated: Vec<Vec<EntityPair>> = vec![Vec::new(); specs.len()];
    (0..epochs)
        .map(|_| train_epoch(store, network, specs, &generated, cfg, rng))
        .collect()
}
