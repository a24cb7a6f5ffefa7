//! Corpus data model: pre-linked sentences, vocabularies, the entity-word
//! co-occurrence network and seed relation instances.
//!
//! Input arrives already tokenized and entity-linked. One corpus line is a
//! JSON object with `tokens`, `mentions` (each `{start, end, entity}`,
//! token spans half-open) and an optional `dep_heads` array (0-based head
//! index per token, -1 for the root).

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sample::AliasTable;

pub type EntityId = usize;
pub type WordId = usize;
pub type RelationId = usize;

/// An ordered entity pair (head, tail). Pairs derived from the corpus always
/// have `head != tail`; corrupted pairs produced during training may not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityPair {
    pub head: EntityId,
    pub tail: EntityId,
}

impl EntityPair {
    pub fn new(head: EntityId, tail: EntityId) -> Self {
        EntityPair { head, tail }
    }
}

/// Bijection between strings and dense ids, in first-appearance order.
#[derive(Debug, Clone, Default)]
pub struct Vocab {
    entries: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    /// Builds a vocabulary whose ids follow the given label order.
    pub fn from_labels<I: IntoIterator<Item = String>>(labels: I) -> Self {
        let mut v = Vocab::new();
        for label in labels {
            v.intern(&label);
        }
        v
    }

    pub fn intern(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.entries.len();
        self.entries.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.entries[id]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.entries
    }
}

/// An entity mention: token span `[start, end)` resolved to a dense id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub entity: EntityId,
}

/// One tokenized sentence with resolved mentions.
#[derive(Debug, Clone)]
pub struct Sentence {
    pub tokens: Vec<WordId>,
    pub mentions: Vec<Mention>,
    /// Syntactic head per token (-1 for root), when supplied upstream.
    pub dep_heads: Option<Vec<i32>>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    pub entity_vocab: Vocab,
    pub word_vocab: Vocab,
}

impl Corpus {
    pub fn entity_count(&self) -> usize {
        self.entity_vocab.len()
    }

    pub fn word_count(&self) -> usize {
        self.word_vocab.len()
    }
}

/// Per-load warning counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines_read: usize,
    pub sentences_loaded: usize,
    /// Lines dropped because two mention spans overlap.
    pub rejected_overlapping_mentions: usize,
}

/// One corpus line as parsed from disk, before vocabulary resolution.
#[derive(Debug, Clone, Deserialize)]
pub struct RawMention {
    pub start: usize,
    pub end: usize,
    pub entity: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawSentence {
    pub tokens: Vec<String>,
    pub mentions: Vec<RawMention>,
    #[serde(default)]
    pub dep_heads: Option<Vec<i32>>,
}

type MentionRecord = RawMention;
type SentenceRecord = RawSentence;

fn validate_record(rec: &SentenceRecord) -> std::result::Result<(), String> {
    let n = rec.tokens.len();
    for (i, m) in rec.mentions.iter().enumerate() {
        if m.start >= m.end {
            return Err(format!("mentions[{}]: empty span {}..{}", i, m.start, m.end));
        }
        if m.end > n {
            return Err(format!(
                "mentions[{}]: span {}..{} out of bounds ({} tokens)",
                i, m.start, m.end, n
            ));
        }
    }
    if let Some(heads) = &rec.dep_heads {
        if heads.len() != n {
            return Err(format!(
                "dep_heads: length {} does not match {} tokens",
                heads.len(),
                n
            ));
        }
        let mut roots = 0usize;
        for (i, &h) in heads.iter().enumerate() {
            if h == -1 {
                roots += 1;
            } else if h < 0 || h as usize >= n {
                return Err(format!("dep_heads[{}]: head {} out of range", i, h));
            }
        }
        if roots != 1 {
            return Err(format!("dep_heads: expected exactly one root, found {}", roots));
        }
    }
    Ok(())
}

fn mentions_overlap(mentions: &[MentionRecord]) -> bool {
    let mut spans: Vec<(usize, usize)> = mentions.iter().map(|m| (m.start, m.end)).collect();
    spans.sort_unstable();
    spans.windows(2).any(|w| w[1].0 < w[0].1)
}

/// Loads a corpus file. Tokens are lowercased; vocabularies are assigned in
/// first-appearance order, so the same bytes always produce the same corpus.
///
/// Structurally broken lines (bad JSON, invalid spans or dep_heads) are hard
/// errors naming the line and field. Lines with overlapping mentions are
/// skipped and counted in the report.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<(Corpus, LoadReport)> {
    load_corpus_with_vocabs(path, Vocab::new(), Vocab::new())
}

/// Like [`load_corpus`] but extends the supplied vocabularies, so a test
/// corpus can share word ids with a previously trained model (unseen words
/// get fresh ids past the trained range).
pub fn load_corpus_with_vocabs(
    path: impl AsRef<Path>,
    entity_vocab: Vocab,
    word_vocab: Vocab,
) -> Result<(Corpus, LoadReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut corpus = Corpus {
        sentences: Vec::new(),
        entity_vocab,
        word_vocab,
    };
    let mut report = LoadReport::default();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines_read += 1;
        let rec: SentenceRecord = serde_json::from_str(&line)
            .map_err(|e| Error::malformed(path, line_no, e.to_string()))?;
        validate_record(&rec).map_err(|d| Error::malformed(path, line_no, d))?;
        if mentions_overlap(&rec.mentions) {
            report.rejected_overlapping_mentions += 1;
            continue;
        }
        push_sentence(&mut corpus, &rec);
        report.sentences_loaded += 1;
    }
    Ok((corpus, report))
}

fn push_sentence(corpus: &mut Corpus, rec: &SentenceRecord) {
    let tokens: Vec<WordId> = rec
        .tokens
        .iter()
        .map(|t| corpus.word_vocab.intern(&t.to_lowercase()))
        .collect();
    let mentions: Vec<Mention> = rec
        .mentions
        .iter()
        .map(|m| Mention {
            start: m.start,
            end: m.end,
            entity: corpus.entity_vocab.intern(&m.entity),
        })
        .collect();
    corpus.sentences.push(Sentence {
        tokens,
        mentions,
        dep_heads: rec.dep_heads.clone(),
    });
}

/// Entity-word bipartite network. An edge weight is the number of sentences
/// in which the entity and the word co-occur; a word occurring twice in one
/// sentence still counts once. Tokens inside any mention span do not
/// co-occur with anything.
#[derive(Debug, Clone)]
pub struct CooccurrenceNetwork {
    /// Sorted by (entity, word); weights strictly positive.
    pub edges: Vec<CoEdge>,
    /// Corpus-wide token occurrence counts, indexed by word id.
    pub unigram_counts: Vec<u64>,
    edge_sampler: Option<AliasTable>,
    /// Negative-word sampler over unigram^(3/4).
    noise_sampler: Option<AliasTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoEdge {
    pub entity: EntityId,
    pub word: WordId,
    pub weight: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceReport {
    pub sentences_with_mentions: usize,
    /// Total (sentence, entity, distinct word) events; equals the sum of
    /// edge weights.
    pub events: u64,
    /// Set when the corpus produced no edges at all.
    pub empty: bool,
}

impl CooccurrenceNetwork {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight as u64).sum()
    }

    /// Draws an edge index proportionally to its weight.
    pub fn sample_edge<R: rand::Rng>(&self, rng: &mut R) -> Option<&CoEdge> {
        self.edge_sampler.as_ref().map(|t| &self.edges[t.sample(rng)])
    }

    /// Draws a negative word from the smoothed unigram distribution.
    pub fn sample_noise_word<R: rand::Rng>(&self, rng: &mut R) -> Option<WordId> {
        self.noise_sampler.as_ref().map(|t| t.sample(rng))
    }
}

/// Builds the co-occurrence network over a corpus.
pub fn build_cooccurrence(corpus: &Corpus) -> (CooccurrenceNetwork, CooccurrenceReport) {
    let mut counts: HashMap<(EntityId, WordId), u32> = HashMap::new();
    let mut unigram_counts = vec![0u64; corpus.word_count()];
    let mut report = CooccurrenceReport::default();

    for sentence in &corpus.sentences {
        for &t in &sentence.tokens {
            unigram_counts[t] += 1;
        }
        if sentence.mentions.is_empty() {
            continue;
        }
        report.sentences_with_mentions += 1;

        let mut in_mention = vec![false; sentence.tokens.len()];
        for m in &sentence.mentions {
            for flag in &mut in_mention[m.start..m.end] {
                *flag = true;
            }
        }
        let mut entities: Vec<EntityId> = sentence.mentions.iter().map(|m| m.entity).collect();
        entities.sort_unstable();
        entities.dedup();
        let mut words: Vec<WordId> = sentence
            .tokens
            .iter()
            .zip(&in_mention)
            .filter(|(_, &inside)| !inside)
            .map(|(&w, _)| w)
            .collect();
        words.sort_unstable();
        words.dedup();

        for &e in &entities {
            for &w in &words {
                *counts.entry((e, w)).or_insert(0) += 1;
                report.events += 1;
            }
        }
    }

    let mut edges: Vec<CoEdge> = counts
        .into_iter()
        .map(|((entity, word), weight)| CoEdge { entity, word, weight })
        .collect();
    edges.sort_unstable_by_key(|e| (e.entity, e.word));
    report.empty = edges.is_empty();

    let edge_weights: Vec<f64> = edges.iter().map(|e| e.weight as f64).collect();
    let noise_weights: Vec<f64> = unigram_counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let network = CooccurrenceNetwork {
        edge_sampler: AliasTable::new(&edge_weights),
        noise_sampler: AliasTable::new(&noise_weights),
        edges,
        unigram_counts,
    };
    (network, report)
}

/// One target relation: its seed entity pairs and the currently selected
/// pattern set.
#[derive(Debug, Clone)]
pub struct RelationSpec {
    pub relation: RelationId,
    pub name: String,
    /// Distinct seed pairs in file order (usable for uniform sampling).
    pub seed_pairs: Vec<EntityPair>,
    seed_set: HashSet<EntityPair>,
    /// Pattern ids selected for this relation; empty until co-training.
    pub selected_patterns: Vec<usize>,
}

impl RelationSpec {
    pub fn new(relation: RelationId, name: impl Into<String>, pairs: Vec<EntityPair>) -> Self {
        let mut seed_pairs = Vec::new();
        let mut seed_set = HashSet::new();
        for p in pairs {
            if seed_set.insert(p) {
                seed_pairs.push(p);
            }
        }
        RelationSpec {
            relation,
            name: name.into(),
            seed_pairs,
            seed_set,
            selected_patterns: Vec::new(),
        }
    }

    /// Number of distinct seed pairs (N_r).
    pub fn seed_count(&self) -> usize {
        self.seed_pairs.len()
    }

    pub fn is_seed(&self, pair: &EntityPair) -> bool {
        self.seed_set.contains(pair)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedReport {
    pub rows_read: usize,
    /// Rows whose head or tail entity is absent from the corpus.
    pub rows_unresolvable: usize,
    /// Rows where head == tail.
    pub rows_degenerate: usize,
    pub duplicate_rows: usize,
    /// Relations dropped because none of their rows resolved.
    pub relations_dropped: Vec<String>,
}

/// Loads seed instances from a tab-separated `relation<TAB>head<TAB>tail`
/// file. Relations come out in file order; unresolvable rows are skipped and
/// counted; relations with zero usable seeds are dropped.
pub fn load_seeds(
    path: impl AsRef<Path>,
    corpus: &Corpus,
) -> Result<(Vec<RelationSpec>, SeedReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut order: Vec<String> = Vec::new();
    let mut pairs_by_relation: HashMap<String, Vec<EntityPair>> = HashMap::new();
    let mut report = SeedReport::default();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        report.rows_read += 1;
        let mut cols = line.split('\t');
        let (relation, head, tail) = match (cols.next(), cols.next(), cols.next()) {
            (Some(r), Some(h), Some(t)) if !r.is_empty() => (r, h, t),
            _ => {
                return Err(Error::malformed(
                    path,
                    line_no,
                    "expected 3 tab-separated columns: relation, head, tail",
                ))
            }
        };
        if !pairs_by_relation.contains_key(relation) {
            order.push(relation.to_string());
            pairs_by_relation.insert(relation.to_string(), Vec::new());
        }
        let (h, t) = match (corpus.entity_vocab.id(head), corpus.entity_vocab.id(tail)) {
            (Some(h), Some(t)) => (h, t),
            _ => {
                report.rows_unresolvable += 1;
                continue;
            }
        };
        if h == t {
            report.rows_degenerate += 1;
            continue;
        }
        pairs_by_relation
            .get_mut(relation)
            .unwrap()
            .push(EntityPair::new(h, t));
    }

    let mut specs = Vec::new();
    for name in order {
        let pairs = pairs_by_relation.remove(&name).unwrap();
        if pairs.is_empty() {
            report.relations_dropped.push(name);
            continue;
        }
        let raw = pairs.len();
        let spec = RelationSpec::new(specs.len(), name, pairs);
        report.duplicate_rows += raw - spec.seed_count();
        specs.push(spec);
    }
    Ok((specs, report))
}
