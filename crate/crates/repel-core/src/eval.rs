//! Downstream evaluation: knowledge-base-completion entity ranking from the
//! pair scorer, and corpus-level relation extraction by matching sentence
//! patterns to reliable patterns in embedding space.
//!
//! KBC ranks every candidate entity for the head and the tail slot of each
//! test instance. Ties are resolved pessimistically: the true entity ranks
//! last among equal scores, so reported numbers never overstate.
//!
//! RE represents a pattern as the mean of its tokens' word context vectors
//! (the only word-attached vectors the text objective produces; the matcher
//! accepts any word-vector table via [`WordVectorTable`], which is the
//! switch point if a different token representation is wanted). Each test
//! sentence is matched to its most cosine-similar reliable pattern, votes
//! are averaged per entity pair, and pairs are ranked by confidence.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::corpus::{EntityId, RelationId, WordId};
use crate::embed::EmbeddingStore;
use crate::error::{Error, Result};
use crate::pattern::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTask {
    Kbc,
    Re,
}

/// Metric bundle for either task; fields that do not apply stay empty.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: EvalTask,
    /// Mean rank over all ranked slots (KBC only), always >= 1.
    pub mean_rank: Option<f64>,
    /// Cutoff -> percentage of ranks within the cutoff.
    pub hits_at: BTreeMap<usize, f64>,
    pub precision_at: BTreeMap<usize, f64>,
    pub recall_at: BTreeMap<usize, f64>,
    pub f1_at: BTreeMap<usize, f64>,
    /// One (recall, precision) point per rank position, percentages.
    pub pr_curve: Vec<(f64, f64)>,
}

impl EvalReport {
    fn new(task: EvalTask) -> Self {
        EvalReport {
            task,
            mean_rank: None,
            hits_at: BTreeMap::new(),
            precision_at: BTreeMap::new(),
            recall_at: BTreeMap::new(),
            f1_at: BTreeMap::new(),
            pr_curve: Vec::new(),
        }
    }
}

/// Harmonic mean of precision and recall (inputs and output in percent).
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

// ---------------------------------------------------------------------------
// Knowledge base completion.
// ---------------------------------------------------------------------------

pub type KbcInstance = (EntityId, EntityId, RelationId);

#[derive(Debug, Clone)]
pub struct KbcOutcome {
    pub report: EvalReport,
    /// Instances dropped for referencing an unknown entity or relation.
    pub skipped: usize,
}

/// Ranks every universe entity for the head and tail slot of each instance.
/// `known_true`, when given, switches to filtered ranking: candidates that
/// form a different known-true instance are removed before ranking.
pub fn kbc_evaluate(
    store: &EmbeddingStore,
    instances: &[KbcInstance],
    universe: &[EntityId],
    cutoffs: &[usize],
    known_true: Option<&HashSet<KbcInstance>>,
) -> Result<KbcOutcome> {
    if universe.is_empty() {
        return Err(Error::Invalid("empty candidate universe".into()));
    }
    let mut ranks: Vec<usize> = Vec::with_capacity(instances.len() * 2);
    let mut skipped = 0usize;

    for &(head, tail, relation) in instances {
        let in_range = head < store.entity_count()
            && tail < store.entity_count()
            && relation < store.relation_count();
        if !in_range {
            skipped += 1;
            continue;
        }
        ranks.push(rank_slot(store, head, tail, relation, universe, known_true, Slot::Tail));
        ranks.push(rank_slot(store, head, tail, relation, universe, known_true, Slot::Head));
    }

    if ranks.is_empty() {
        return Err(Error::Invalid("no evaluable KBC instances".into()));
    }

    let mut report = EvalReport::new(EvalTask::Kbc);
    report.mean_rank = Some(ranks.iter().sum::<usize>() as f64 / ranks.len() as f64);
    for &k in cutoffs {
        let hits = ranks.iter().filter(|&&r| r <= k).count();
        report.hits_at.insert(k, 100.0 * hits as f64 / ranks.len() as f64);
    }
    Ok(KbcOutcome { report, skipped })
}

#[derive(Clone, Copy)]
enum Slot {
    Head,
    Tail,
}

/// Pessimistic rank of the true entity within the candidate list: one plus
/// the number of other kept candidates scoring at least as high.
fn rank_slot(
    store: &EmbeddingStore,
    head: EntityId,
    tail: EntityId,
    relation: RelationId,
    universe: &[EntityId],
    known_true: Option<&HashSet<KbcInstance>>,
    slot: Slot,
) -> usize {
    let truth = match slot {
        Slot::Tail => tail,
        Slot::Head => head,
    };
    let score_of = |candidate: EntityId| -> f64 {
        let pair = match slot {
            Slot::Tail => crate::corpus::EntityPair::new(head, candidate),
            Slot::Head => crate::corpus::EntityPair::new(candidate, tail),
        };
        store.score(pair, relation)
    };
    let true_score = score_of(truth);
    let mut ahead = 0usize;
    for &candidate in universe {
        if candidate == truth || candidate >= store.entity_count() {
            continue;
        }
        if let Some(known) = known_true {
            let formed = match slot {
                Slot::Tail => (head, candidate, relation),
                Slot::Head => (candidate, tail, relation),
            };
            if known.contains(&formed) {
                continue;
            }
        }
        if score_of(candidate) >= true_score {
            ahead += 1;
        }
    }
    ahead + 1
}

// ---------------------------------------------------------------------------
// Pattern vectors and matching.
// ---------------------------------------------------------------------------

/// A word-id-indexed vector table; ids beyond `count` are out of vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct WordVectorTable<'a> {
    dim: usize,
    count: usize,
    data: &'a [f64],
}

impl<'a> WordVectorTable<'a> {
    pub fn new(dim: usize, data: &'a [f64]) -> Self {
        assert!(dim >= 1 && data.len() % dim == 0);
        WordVectorTable { dim, count: data.len() / dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn get(&self, id: WordId) -> Option<&'a [f64]> {
        (id < self.count).then(|| &self.data[id * self.dim..(id + 1) * self.dim])
    }
}

/// Mean vector of a pattern's non-placeholder tokens. Out-of-vocabulary
/// tokens are skipped; the flag marks all-placeholder or fully-OOV patterns
/// (their vector is zero).
pub fn pattern_vector(pattern: &Pattern, table: &WordVectorTable<'_>) -> (Vec<f64>, bool) {
    let mut sum = vec![0.0; table.dim()];
    let mut n = 0usize;
    for id in pattern.word_ids() {
        if let Some(v) = table.get(id) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
    }
    if n == 0 {
        return (sum, true);
    }
    for s in &mut sum {
        *s /= n as f64;
    }
    let zero = sum.iter().all(|&v| v == 0.0);
    (sum, zero)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Outcome of matching one sentence pattern against the reliable sets.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchOutcome {
    /// Relation owning the most similar reliable pattern; `None` when no
    /// pattern matched with positive similarity.
    pub relation: Option<String>,
    pub similarity: f64,
}

/// Reliable patterns of every relation with precomputed vectors.
pub struct PatternMatcher {
    /// (relation index, pattern vector); degenerate patterns excluded.
    entries: Vec<(usize, Vec<f64>)>,
    relations: Vec<String>,
}

impl PatternMatcher {
    /// `reliable`: per relation, the name and its selected patterns.
    pub fn new(reliable: &[(String, Vec<&Pattern>)], table: &WordVectorTable<'_>) -> Self {
        let mut entries = Vec::new();
        let mut relations = Vec::new();
        for (name, patterns) in reliable {
            let rid = relations.len();
            relations.push(name.clone());
            for p in patterns {
                let (v, degenerate) = pattern_vector(p, table);
                if !degenerate {
                    entries.push((rid, v));
                }
            }
        }
        PatternMatcher { entries, relations }
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Most similar reliable pattern across all relations. Equal
    /// similarities keep the first entry in relation/pattern order.
    pub fn match_pattern(
        &self,
        sentence_pattern: &Pattern,
        table: &WordVectorTable<'_>,
    ) -> MatchOutcome {
        let (v, degenerate) = pattern_vector(sentence_pattern, table);
        if degenerate {
            return MatchOutcome { relation: None, similarity: 0.0 };
        }
        let mut best: Option<(usize, f64)> = None;
        for (rid, pv) in &self.entries {
            let sim = cosine(&v, pv);
            if best.map_or(true, |(_, s)| sim > s) {
                best = Some((*rid, sim));
            }
        }
        match best {
            Some((rid, sim)) if sim > 0.0 => MatchOutcome {
                relation: Some(self.relations[rid].clone()),
                similarity: sim,
            },
            _ => MatchOutcome { relation: None, similarity: 0.0 },
        }
    }
}

// ---------------------------------------------------------------------------
// Corpus-level relation extraction.
// ---------------------------------------------------------------------------

/// Test sentences grouped by the entity pair they mention; each sentence is
/// reduced to its local pattern.
#[derive(Debug, Clone)]
pub struct ReGroup {
    pub head: String,
    pub tail: String,
    pub sentences: Vec<Pattern>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedPrediction {
    pub head: String,
    pub tail: String,
    /// `None` when every sentence of the pair failed to match.
    pub relation: Option<String>,
    pub confidence: f64,
}

/// Classifies every sentence, consolidates votes per pair by averaging the
/// per-relation similarities over the pair's sentences, and ranks pairs by
/// confidence descending (stable for ties, no-match pairs last).
pub fn rank_re_predictions(
    groups: &[ReGroup],
    matcher: &PatternMatcher,
    table: &WordVectorTable<'_>,
) -> Vec<RankedPrediction> {
    let mut ranked: Vec<RankedPrediction> = groups
        .iter()
        .map(|group| {
            let mut votes: Vec<f64> = vec![0.0; matcher.relations().len()];
            for sentence in &group.sentences {
                let outcome = matcher.match_pattern(sentence, table);
                if let Some(name) = &outcome.relation {
                    let rid = matcher.relations().iter().position(|r| r == name).unwrap();
                    votes[rid] += outcome.similarity;
                }
            }
            let n = group.sentences.len().max(1) as f64;
            let mut best: Option<(usize, f64)> = None;
            for (rid, sum) in votes.iter().enumerate() {
                let mean = sum / n;
                if mean > 0.0 && best.map_or(true, |(_, b)| mean > b) {
                    best = Some((rid, mean));
                }
            }
            match best {
                Some((rid, confidence)) => RankedPrediction {
                    head: group.head.clone(),
                    tail: group.tail.clone(),
                    relation: Some(matcher.relations()[rid].clone()),
                    confidence,
                },
                None => RankedPrediction {
                    head: group.head.clone(),
                    tail: group.tail.clone(),
                    relation: None,
                    confidence: 0.0,
                },
            }
        })
        .collect();
    // Stable sort keeps input order among equal confidences.
    ranked.sort_by(|a, b| b.confidence.partial_cmp(&a.confidence).unwrap());
    ranked
}

/// P@K / R@K / F1@K and the PR curve over an already-ranked prediction list.
pub fn metrics_from_ranked(
    ranked: &[RankedPrediction],
    gold: &HashMap<(String, String), String>,
    cutoffs: &[usize],
) -> Result<EvalReport> {
    if ranked.is_empty() {
        return Err(Error::Invalid("no ranked pairs to evaluate".into()));
    }
    let total_true = gold.len();
    if total_true == 0 {
        return Err(Error::Invalid("empty ground truth".into()));
    }

    let correct_flags: Vec<bool> = ranked
        .iter()
        .map(|p| {
            let key = (p.head.clone(), p.tail.clone());
            match (&p.relation, gold.get(&key)) {
                (Some(pred), Some(truth)) => pred == truth,
                _ => false,
            }
        })
        .collect();

    let mut report = EvalReport::new(EvalTask::Re);
    let mut correct = 0usize;
    for (i, &ok) in correct_flags.iter().enumerate() {
        if ok {
            correct += 1;
        }
        let precision = 100.0 * correct as f64 / (i + 1) as f64;
        let recall = 100.0 * correct as f64 / total_true as f64;
        report.pr_curve.push((recall, precision));
    }

    for &k in cutoffs {
        let upto = k.min(correct_flags.len());
        let correct_k = correct_flags[..upto].iter().filter(|&&c| c).count();
        let p = 100.0 * correct_k as f64 / k as f64;
        let r = 100.0 * correct_k as f64 / total_true as f64;
        report.precision_at.insert(k, p);
        report.recall_at.insert(k, r);
        report.f1_at.insert(k, f1_score(p, r));
    }
    Ok(report)
}

/// Full corpus-level RE evaluation; returns the report and the ranked
/// predictions backing it.
pub fn re_evaluate(
    groups: &[ReGroup],
    gold: &HashMap<(String, String), String>,
    matcher: &PatternMatcher,
    table: &WordVectorTable<'_>,
    cutoffs: &[usize],
) -> Result<(EvalReport, Vec<RankedPrediction>)> {
    let ranked = rank_re_predictions(groups, matcher, table);
    let report = metrics_from_ranked(&ranked, gold, cutoffs)?;
    Ok((report, ranked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocab;
    use crate::pattern::{PatternKind, PatternToken};

    fn store(
        dim: usize,
        entities: &[&[f64]],
        words: &[&[f64]],
        relations: &[&[f64]],
    ) -> EmbeddingStore {
        let flat = |rows: &[&[f64]]| rows.iter().flat_map(|r| r.iter().copied()).collect();
        EmbeddingStore::from_parts(dim, flat(entities), flat(words), flat(relations))
    }

    #[test]
    fn kbc_forced_top_rank() {
        // Entity 1 = entity 0 + y exactly; entities 2, 3 are far away.
        let s = store(
            2,
            &[&[0.0, 0.0], &[1.0, 0.0], &[5.0, 5.0], &[-4.0, 3.0]],
            &[],
            &[&[1.0, 0.0]],
        );
        let outcome = kbc_evaluate(&s, &[(0, 1, 0)], &[0, 1, 2, 3], &[10], None).unwrap();
        assert_eq!(outcome.report.mean_rank, Some(1.0));
        assert_eq!(outcome.report.hits_at[&10], 100.0);
        assert_eq!(outcome.skipped, 0);
    }

    #[test]
    fn kbc_all_zero_embeddings_rank_pessimistically() {
        let s = store(2, &[&[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0], &[0.0, 0.0]], &[], &[&[0.0, 0.0]]);
        let outcome = kbc_evaluate(&s, &[(0, 1, 0)], &[0, 1, 2, 3], &[10], None).unwrap();
        // Every candidate ties: the true entity ranks last, i.e. |E|.
        assert_eq!(outcome.report.mean_rank, Some(4.0));
    }

    #[test]
    fn kbc_skips_unknown_entities() {
        let s = store(2, &[&[0.0, 0.0], &[0.0, 0.0]], &[], &[&[0.0, 0.0]]);
        let outcome = kbc_evaluate(&s, &[(0, 9, 0), (0, 1, 0)], &[0, 1], &[10], None).unwrap();
        assert_eq!(outcome.skipped, 1);
        let err = kbc_evaluate(&s, &[(0, 9, 0)], &[0, 1], &[10], None);
        assert!(err.is_err());
    }

    #[test]
    fn kbc_filtered_never_worse_than_raw() {
        let s = store(
            2,
            &[&[0.0, 0.0], &[1.0, 0.1], &[1.0, 0.0], &[0.9, 0.0]],
            &[],
            &[&[1.0, 0.0]],
        );
        let instances = [(0, 1, 0)];
        // (0, 2, 0) is also true; filtering removes entity 2 from the tail
        // candidates.
        let known: HashSet<KbcInstance> = [(0, 1, 0), (0, 2, 0)].into_iter().collect();
        let raw = kbc_evaluate(&s, &instances, &[0, 1, 2, 3], &[10], None).unwrap();
        let filtered =
            kbc_evaluate(&s, &instances, &[0, 1, 2, 3], &[10], Some(&known)).unwrap();
        assert!(filtered.report.mean_rank.unwrap() <= raw.report.mean_rank.unwrap());
    }

    fn vocab_of(words: &[&str]) -> Vocab {
        let mut v = Vocab::new();
        for w in words {
            v.intern(w);
        }
        v
    }

    fn meta(template: Vec<PatternToken>, vocab: &Vocab) -> Pattern {
        Pattern::new(PatternKind::Meta, template, vocab)
    }

    #[test]
    fn pattern_vector_examples() {
        let vocab = vocab_of(&["alpha", "beta"]);
        let data = vec![1.0, 2.0, -1.0, -2.0];
        let table = WordVectorTable::new(2, &data);

        let single = meta(
            vec![PatternToken::Head, PatternToken::Word(0), PatternToken::Tail],
            &vocab,
        );
        let (v, degenerate) = pattern_vector(&single, &table);
        assert_eq!(v, vec![1.0, 2.0]);
        assert!(!degenerate);

        // Opposite vectors cancel to zero.
        let cancel = meta(
            vec![
                PatternToken::Head,
                PatternToken::Word(0),
                PatternToken::Word(1),
                PatternToken::Tail,
            ],
            &vocab,
        );
        let (v, _) = pattern_vector(&cancel, &table);
        assert_eq!(v, vec![0.0, 0.0]);

        // Placeholders only.
        let bare = meta(vec![PatternToken::Head, PatternToken::Tail], &vocab);
        let (_, degenerate) = pattern_vector(&bare, &table);
        assert!(degenerate);

        // Out-of-vocabulary ids are skipped.
        let big_vocab = vocab_of(&["a", "b", "c", "d", "e", "f", "g", "h"]);
        let oov = meta(
            vec![PatternToken::Head, PatternToken::Word(7), PatternToken::Tail],
            &big_vocab,
        );
        let (_, degenerate) = pattern_vector(&oov, &table);
        assert!(degenerate);
    }

    #[test]
    fn pattern_vector_matches_naive_mean() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let dim = 6;
        let data: Vec<f64> = (0..dim * 5).map(|_| rng.gen::<f64>() - 0.5).collect();
        let table = WordVectorTable::new(dim, &data);
        let vocab = vocab_of(&["a", "b", "c", "d", "e"]);
        let p = meta(
            vec![
                PatternToken::Head,
                PatternToken::Word(1),
                PatternToken::Word(3),
                PatternToken::Word(4),
                PatternToken::Tail,
            ],
            &vocab,
        );
        let (v, _) = pattern_vector(&p, &table);
        for k in 0..dim {
            let naive = (data[dim + k] + data[3 * dim + k] + data[4 * dim + k]) / 3.0;
            assert!((v[k] - naive).abs() < 1e-9);
        }
    }

    fn simple_matcher(
        table: &WordVectorTable<'_>,
        vocab: &Vocab,
    ) -> (PatternMatcher, Pattern, Pattern) {
        let born = meta(
            vec![PatternToken::Head, PatternToken::Word(0), PatternToken::Tail],
            vocab,
        );
        let capital = meta(
            vec![PatternToken::Head, PatternToken::Word(1), PatternToken::Tail],
            vocab,
        );
        let matcher = PatternMatcher::new(
            &[
                ("born_in".to_string(), vec![&born]),
                ("capital_of".to_string(), vec![&capital]),
            ],
            table,
        );
        (matcher, born, capital)
    }

    #[test]
    fn matching_identical_pattern_scores_one() {
        let vocab = vocab_of(&["born", "capital"]);
        let data = vec![1.0, 0.0, 0.0, 1.0];
        let table = WordVectorTable::new(2, &data);
        let (matcher, born, _) = simple_matcher(&table, &vocab);
        let outcome = matcher.match_pattern(&born, &table);
        assert_eq!(outcome.relation.as_deref(), Some("born_in"));
        assert!((outcome.similarity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_only_is_no_match() {
        let vocab = vocab_of(&["born", "capital", "other"]);
        // born and capital share direction (1,0); "other" is orthogonal.
        let data = vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let table = WordVectorTable::new(2, &data);
        let (matcher, _, _) = simple_matcher(&table, &vocab);
        let probe = meta(
            vec![PatternToken::Head, PatternToken::Word(2), PatternToken::Tail],
            &vocab,
        );
        let outcome = matcher.match_pattern(&probe, &table);
        assert_eq!(outcome.relation, None);
        assert_eq!(outcome.similarity, 0.0);
    }

    fn gold_pairs(pairs: &[(&str, &str, &str)]) -> HashMap<(String, String), String> {
        pairs
            .iter()
            .map(|&(h, t, r)| ((h.to_string(), t.to_string()), r.to_string()))
            .collect()
    }

    #[test]
    fn perfect_ranking_scores_full_precision() {
        let vocab = vocab_of(&["born", "capital"]);
        let data = vec![1.0, 0.0, 0.0, 1.0];
        let table = WordVectorTable::new(2, &data);
        let (matcher, born, capital) = simple_matcher(&table, &vocab);

        let groups = vec![
            ReGroup { head: "a".into(), tail: "b".into(), sentences: vec![born.clone()] },
            ReGroup { head: "c".into(), tail: "d".into(), sentences: vec![capital.clone()] },
        ];
        let gold = gold_pairs(&[("a", "b", "born_in"), ("c", "d", "capital_of")]);
        let (report, ranked) = re_evaluate(&groups, &gold, &matcher, &table, &[1, 2]).unwrap();
        assert_eq!(report.precision_at[&2], 100.0);
        assert_eq!(report.recall_at[&2], 100.0);
        assert_eq!(report.f1_at[&2], 100.0);
        assert_eq!(ranked.len(), 2);
        // Recall along the curve never decreases.
        for w in report.pr_curve.windows(2) {
            assert!(w[1].0 >= w[0].0);
        }
    }

    #[test]
    fn consolidation_averages_votes_and_no_match_ranks_last() {
        let vocab = vocab_of(&["born", "capital"]);
        let data = vec![1.0, 0.0, 0.0, 1.0];
        let table = WordVectorTable::new(2, &data);
        let (matcher, born, capital) = simple_matcher(&table, &vocab);

        // Two sentences voting born_in (sim 1 each), one voting capital_of:
        // born_in mean 2/3 beats capital_of mean 1/3.
        let mixed = ReGroup {
            head: "a".into(),
            tail: "b".into(),
            sentences: vec![born.clone(), born.clone(), capital.clone()],
        };
        let silent = ReGroup {
            head: "x".into(),
            tail: "y".into(),
            sentences: vec![Pattern::new(
                PatternKind::Meta,
                vec![PatternToken::Head, PatternToken::Tail],
                &vocab,
            )],
        };
        let ranked = rank_re_predictions(&[silent.clone(), mixed.clone()], &matcher, &table);
        assert_eq!(ranked[0].relation.as_deref(), Some("born_in"));
        assert!((ranked[0].confidence - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(ranked[1].relation, None);
        assert_eq!(ranked[1].confidence, 0.0);
    }

    #[test]
    fn table3_consistency_identity() {
        // 131 test pairs, 39 correct in the top 50: P@50 = 78.00 and
        // R@50 = 29.77, the published REPEL row.
        let ranked: Vec<RankedPrediction> = (0..131)
            .map(|i| RankedPrediction {
                head: format!("h{}", i),
                tail: format!("t{}", i),
                relation: Some(if i < 39 { "r".to_string() } else { "wrong".to_string() }),
                confidence: 1.0 - i as f64 / 131.0,
            })
            .collect();
        let gold: HashMap<(String, String), String> = (0..131)
            .map(|i| ((format!("h{}", i), format!("t{}", i)), "r".to_string()))
            .collect();
        let report = metrics_from_ranked(&ranked, &gold, &[50]).unwrap();
        assert!((report.precision_at[&50] - 78.00).abs() < 1e-9);
        assert!((report.recall_at[&50] - 29.77).abs() < 0.01);
        assert!((report.f1_at[&50] - 43.09).abs() < 0.02);
    }
}
