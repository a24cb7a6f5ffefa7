//! Textual patterns: extraction from sentences, reliability scoring against
//! seed pairs, and discrete top-K selection per relation.
//!
//! Two pattern kinds are extracted for every ordered pair of distinct entity
//! mentions in a sentence. The meta pattern keeps the tokens strictly
//! between the mentions plus up to `context_window` tokens on each outer
//! side. The path pattern keeps the tokens along the shortest undirected
//! dependency path between the two mention head tokens (only for sentences
//! that carry `dep_heads`). Both surface orders are emitted, so an
//! asymmetric relation can be captured in either direction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::corpus::{Corpus, EntityPair, Mention, RelationSpec, Sentence, Vocab, WordId};
use crate::error::{Error, Result};

pub type PatternId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternKind {
    Meta,
    Path,
}

impl PatternKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PatternKind::Meta => "meta",
            PatternKind::Path => "path",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternToken {
    Head,
    Tail,
    Word(WordId),
}

/// A placeholder-bearing token sequence, with its rendered string form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub template: Vec<PatternToken>,
    pub canonical: String,
}

impl Pattern {
    pub fn new(kind: PatternKind, template: Vec<PatternToken>, word_vocab: &Vocab) -> Self {
        let canonical = render_template(&template, word_vocab);
        Pattern { kind, template, canonical }
    }

    /// Word ids of the non-placeholder tokens, in template order.
    pub fn word_ids(&self) -> impl Iterator<Item = WordId> + '_ {
        self.template.iter().filter_map(|t| match t {
            PatternToken::Word(w) => Some(*w),
            _ => None,
        })
    }

    /// Rebuilds a pattern from its canonical form; `intern` maps each
    /// non-placeholder token to a word id.
    pub fn from_canonical(
        kind: PatternKind,
        canonical: &str,
        mut intern: impl FnMut(&str) -> WordId,
    ) -> Self {
        let template: Vec<PatternToken> = canonical
            .split_whitespace()
            .map(|tok| match tok {
                "[Head]" => PatternToken::Head,
                "[Tail]" => PatternToken::Tail,
                w => PatternToken::Word(intern(w)),
            })
            .collect();
        Pattern {
            kind,
            template,
            canonical: canonical.split_whitespace().collect::<Vec<_>>().join(" "),
        }
    }
}

fn render_template(template: &[PatternToken], vocab: &Vocab) -> String {
    let parts: Vec<&str> = template
        .iter()
        .map(|t| match t {
            PatternToken::Head => "[Head]",
            PatternToken::Tail => "[Tail]",
            PatternToken::Word(w) => vocab.label(*w),
        })
        .collect();
    parts.join(" ")
}

#[derive(Debug, Clone)]
pub struct PatternConfig {
    /// Context tokens kept on each outer side of a meta pattern.
    pub context_window: usize,
    /// Maximum template length including the two placeholders.
    pub max_pattern_len: usize,
    /// Minimum distinct extracted pairs for a pattern to be retained.
    pub min_support: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            context_window: 2,
            max_pattern_len: 10,
            min_support: 3,
        }
    }
}

/// All retained patterns with their extraction sets G(pi).
///
/// Patterns are sorted by (canonical, kind), extraction sets by pair, so
/// rebuilding from the same corpus yields an identical index.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternIndex {
    patterns: Vec<Pattern>,
    extractions: Vec<Vec<EntityPair>>,
}

impl PatternIndex {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, id: PatternId) -> &Pattern {
        &self.patterns[id]
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    /// Extracted pairs of one pattern, sorted ascending.
    pub fn extracted(&self, id: PatternId) -> &[EntityPair] {
        &self.extractions[id]
    }

    pub fn support(&self, id: PatternId) -> usize {
        self.extractions[id].len()
    }

    pub fn ids(&self) -> impl Iterator<Item = PatternId> {
        0..self.patterns.len()
    }
}

/// Extracts and aggregates candidate patterns over the whole corpus.
pub fn extract_patterns(corpus: &Corpus, config: &PatternConfig) -> PatternIndex {
    let mut aggregate: HashMap<(PatternKind, Vec<PatternToken>), HashSet<EntityPair>> =
        HashMap::new();
    let mut scratch: Vec<(PatternKind, Vec<PatternToken>, EntityPair)> = Vec::new();

    for sentence in &corpus.sentences {
        scratch.clear();
        sentence_candidates(sentence, config, &mut scratch);
        for (kind, template, pair) in scratch.drain(..) {
            aggregate.entry((kind, template)).or_default().insert(pair);
        }
    }

    let mut entries: Vec<(Pattern, Vec<EntityPair>)> = aggregate
        .into_iter()
        .filter(|(_, pairs)| pairs.len() >= config.min_support.max(1))
        .map(|((kind, template), pairs)| {
            let pattern = Pattern::new(kind, template, &corpus.word_vocab);
            let mut pairs: Vec<EntityPair> = pairs.into_iter().collect();
            pairs.sort_unstable();
            (pattern, pairs)
        })
        .collect();
    entries.sort_by(|a, b| {
        (&a.0.canonical, a.0.kind, &a.0.template).cmp(&(&b.0.canonical, b.0.kind, &b.0.template))
    });

    let (patterns, extractions) = entries.into_iter().unzip();
    PatternIndex { patterns, extractions }
}

/// Emits every candidate (kind, template, pair) for one sentence, both
/// mention orders included, deduplicated by the caller.
fn sentence_candidates(
    sentence: &Sentence,
    config: &PatternConfig,
    out: &mut Vec<(PatternKind, Vec<PatternToken>, EntityPair)>,
) {
    let mentions = &sentence.mentions;
    if mentions.len() < 2 {
        return;
    }
    // Mentions in textual order; spans never overlap.
    let mut order: Vec<usize> = (0..mentions.len()).collect();
    order.sort_unstable_by_key(|&i| mentions[i].start);

    for a in 0..order.len() {
        for b in (a + 1)..order.len() {
            let first = &mentions[order[a]];
            let second = &mentions[order[b]];
            if first.entity == second.entity {
                continue;
            }
            let forward = EntityPair::new(first.entity, second.entity);
            let backward = EntityPair::new(second.entity, first.entity);

            for (p1, p2, pair) in [
                (PatternToken::Head, PatternToken::Tail, forward),
                (PatternToken::Tail, PatternToken::Head, backward),
            ] {
                if let Some(t) = meta_template(sentence, first, second, p1, p2, config) {
                    out.push((PatternKind::Meta, t, pair));
                }
                if let Some(t) = path_template(sentence, first, second, p1, p2, config) {
                    out.push((PatternKind::Path, t, pair));
                }
            }
        }
    }
}

fn meta_template(
    sentence: &Sentence,
    first: &Mention,
    second: &Mention,
    p1: PatternToken,
    p2: PatternToken,
    config: &PatternConfig,
) -> Option<Vec<PatternToken>> {
    let tokens = &sentence.tokens;
    let left_from = first.start.saturating_sub(config.context_window);
    let right_to = (second.end + config.context_window).min(tokens.len());

    let mut template = Vec::with_capacity(right_to - left_from + 2);
    template.extend(tokens[left_from..first.start].iter().map(|&w| PatternToken::Word(w)));
    template.push(p1);
    template.extend(tokens[first.end..second.start].iter().map(|&w| PatternToken::Word(w)));
    template.push(p2);
    template.extend(tokens[second.end..right_to].iter().map(|&w| PatternToken::Word(w)));

    (template.len() <= config.max_pattern_len).then_some(template)
}

fn path_template(
    sentence: &Sentence,
    first: &Mention,
    second: &Mention,
    p1: PatternToken,
    p2: PatternToken,
    config: &PatternConfig,
) -> Option<Vec<PatternToken>> {
    let heads = sentence.dep_heads.as_ref()?;
    let from = mention_head_token(first, heads);
    let to = mention_head_token(second, heads);
    let path = shortest_path(heads, from, to)?;

    let mut template = Vec::with_capacity(path.len());
    template.push(p1);
    template.extend(path[1..path.len() - 1].iter().map(|&i| PatternToken::Word(sentence.tokens[i])));
    template.push(p2);

    (template.len() <= config.max_pattern_len).then_some(template)
}

/// The token of a mention whose syntactic head lies outside the span (or is
/// the root); falls back to the last token of the span.
fn mention_head_token(mention: &Mention, heads: &[i32]) -> usize {
    for i in mention.start..mention.end {
        let h = heads[i];
        if h == -1 || (h as usize) < mention.start || (h as usize) >= mention.end {
            return i;
        }
    }
    mention.end - 1
}

/// BFS over the undirected head-dependent graph.
fn shortest_path(heads: &[i32], from: usize, to: usize) -> Option<Vec<usize>> {
    if from == to {
        return Some(vec![from]);
    }
    let n = heads.len();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &h) in heads.iter().enumerate() {
        if h >= 0 {
            adjacency[i].push(h as usize);
            adjacency[h as usize].push(i);
        }
    }
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while let Some(p) = prev[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for &u in &adjacency[v] {
            if !seen[u] {
                seen[u] = true;
                prev[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    None
}

/// The meta pattern a sentence expresses for one designated (head, tail)
/// mention pair, regardless of surface order. Used to reduce test sentences
/// to local patterns for matching. `None` when the template exceeds the
/// length bound.
pub fn pair_meta_pattern(
    sentence: &Sentence,
    head_mention: usize,
    tail_mention: usize,
    word_vocab: &Vocab,
    config: &PatternConfig,
) -> Option<Pattern> {
    let hm = &sentence.mentions[head_mention];
    let tm = &sentence.mentions[tail_mention];
    let (first, second, p1, p2) = if hm.start <= tm.start {
        (hm, tm, PatternToken::Head, PatternToken::Tail)
    } else {
        (tm, hm, PatternToken::Tail, PatternToken::Head)
    };
    let template = meta_template(sentence, first, second, p1, p2, config)?;
    Some(Pattern::new(PatternKind::Meta, template, word_vocab))
}

/// Scores entity pairs; the trained distributional module acts as one.
pub trait PairScorer {
    fn score_pair(&self, pair: EntityPair) -> f64;
}

impl<F: Fn(EntityPair) -> f64> PairScorer for F {
    fn score_pair(&self, pair: EntityPair) -> f64 {
        self(pair)
    }
}

/// Reliability of one pattern for one relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityScore {
    /// Fraction of extracted pairs that are seeds; in [0, 1].
    pub seed_reliability: f64,
    /// Mean discriminator score over the extraction set, when one exists.
    pub distributional_bonus: Option<f64>,
    /// seed_reliability + lambda * bonus.
    pub combined: f64,
}

/// Fraction of a pattern's extracted pairs that are seed pairs.
pub fn seed_reliability(
    index: &PatternIndex,
    id: PatternId,
    spec: &RelationSpec,
) -> Result<f64> {
    let extracted = index.extracted(id);
    if extracted.is_empty() {
        return Err(Error::Invalid(format!(
            "pattern {} has an empty extraction set",
            id
        )));
    }
    let hits = extracted.iter().filter(|p| spec.is_seed(p)).count();
    Ok(hits as f64 / extracted.len() as f64)
}

/// Seed reliability plus the lambda-weighted mean discriminator score over
/// the extraction set. Without a discriminator the combined score equals the
/// seed reliability.
pub fn combined_reliability(
    index: &PatternIndex,
    id: PatternId,
    spec: &RelationSpec,
    discriminator: Option<&dyn PairScorer>,
    lambda: f64,
) -> Result<ReliabilityScore> {
    let seed = seed_reliability(index, id, spec)?;
    let bonus = discriminator.map(|d| {
        let extracted = index.extracted(id);
        let sum: f64 = extracted.iter().map(|&p| d.score_pair(p)).sum();
        sum / extracted.len() as f64
    });
    let combined = seed + lambda * bonus.unwrap_or(0.0);
    Ok(ReliabilityScore {
        seed_reliability: seed,
        distributional_bonus: bonus,
        combined,
    })
}

/// Selects the K patterns with the largest combined reliability. Ties break
/// toward higher support, then the lexicographically smaller canonical
/// string. Returns the selection in rank order; fewer than K candidates
/// saturate.
pub fn select_top_k(
    index: &PatternIndex,
    spec: &RelationSpec,
    discriminator: Option<&dyn PairScorer>,
    lambda: f64,
    k: usize,
) -> Result<Vec<PatternId>> {
    let mut scored: Vec<(PatternId, f64, usize)> = Vec::with_capacity(index.len());
    for id in index.ids() {
        let score = combined_reliability(index, id, spec, discriminator, lambda)?;
        scored.push((id, score.combined, index.support(id)));
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| index.pattern(a.0).canonical.cmp(&index.pattern(b.0).canonical))
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(k);
    Ok(scored.into_iter().map(|(id, _, _)| id).collect())
}

/// Union of the extraction sets of a pattern set, sorted and deduplicated.
pub fn extract_pairs(index: &PatternIndex, selected: &[PatternId]) -> Vec<EntityPair> {
    let set: BTreeSet<EntityPair> = selected
        .iter()
        .flat_map(|&id| index.extracted(id).iter().copied())
        .collect();
    set.into_iter().collect()
}

/// Groups per-relation selections for dumps: relation id -> ranked ids.
pub type SelectionMap = BTreeMap<usize, Vec<PatternId>>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_corpus;
    use std::io::Write;

    fn corpus_from(lines: &[&str]) -> Corpus {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{}", l).unwrap();
        }
        load_corpus(f.path()).unwrap().0
    }

    const BEIJING: &str = r#"{"tokens":["beijing",",","the","capital","of","china","attracts","visitors"],"mentions":[{"start":0,"end":1,"entity":"E:Beijing"},{"start":5,"end":6,"entity":"E:China"}],"dep_heads":[1,2,3,4,5,6,7,-1]}"#;

    fn permissive() -> PatternConfig {
        PatternConfig { context_window: 0, max_pattern_len: 12, min_support: 1 }
    }

    #[test]
    fn extracts_capital_of_pattern_both_kinds() {
        let corpus = corpus_from(&[BEIJING]);
        let index = extract_patterns(&corpus, &permissive());
        let canonicals: Vec<(&str, PatternKind)> = index
            .patterns()
            .iter()
            .map(|p| (p.canonical.as_str(), p.kind))
            .collect();
        assert!(canonicals.contains(&("[Head] , the capital of [Tail]", PatternKind::Meta)));
        // Chain dependencies make the path identical to the meta pattern.
        assert!(canonicals.contains(&("[Head] , the capital of [Tail]", PatternKind::Path)));
        // Reversed surface order emitted as its own candidate.
        assert!(canonicals.contains(&("[Tail] , the capital of [Head]", PatternKind::Meta)));

        let fwd = index
            .ids()
            .find(|&id| {
                index.pattern(id).canonical == "[Head] , the capital of [Tail]"
                    && index.pattern(id).kind == PatternKind::Meta
            })
            .unwrap();
        assert_eq!(index.extracted(fwd), &[EntityPair::new(0, 1)]);
    }

    #[test]
    fn single_mention_contributes_nothing() {
        let line = r#"{"tokens":["beijing","is","big"],"mentions":[{"start":0,"end":1,"entity":"E:Beijing"}]}"#;
        let corpus = corpus_from(&[line]);
        let index = extract_patterns(&corpus, &permissive());
        assert!(index.is_empty());
    }

    #[test]
    fn context_window_adds_outer_tokens() {
        let corpus = corpus_from(&[BEIJING]);
        let config = PatternConfig { context_window: 2, max_pattern_len: 12, min_support: 1 };
        let index = extract_patterns(&corpus, &config);
        assert!(index
            .patterns()
            .iter()
            .any(|p| p.canonical == "[Head] , the capital of [Tail] attracts visitors"));
    }

    #[test]
    fn over_long_templates_discarded() {
        let corpus = corpus_from(&[BEIJING]);
        let config = PatternConfig { context_window: 0, max_pattern_len: 4, min_support: 1 };
        let index = extract_patterns(&corpus, &config);
        assert!(index.is_empty());
    }

    #[test]
    fn min_support_prunes_rare_patterns() {
        let mk = |h: &str, t: &str| {
            format!(
                r#"{{"tokens":["{}","borders","{}"],"mentions":[{{"start":0,"end":1,"entity":"E:{}"}},{{"start":2,"end":3,"entity":"E:{}"}}]}}"#,
                h.to_lowercase(),
                t.to_lowercase(),
                h,
                t
            )
        };
        let lines = [mk("A", "B"), mk("C", "D"), mk("E", "F")];
        let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
        let corpus = corpus_from(&refs);

        let config = PatternConfig { context_window: 0, max_pattern_len: 10, min_support: 3 };
        let index = extract_patterns(&corpus, &config);
        // Both orientations of "[Head] borders [Tail]" survive with support 3.
        assert_eq!(index.len(), 2);
        assert!(index.ids().all(|id| index.support(id) == 3));

        let config = PatternConfig { min_support: 4, ..config };
        let index = extract_patterns(&corpus, &config);
        assert!(index.is_empty());
    }

    #[test]
    fn same_sentence_duplicates_collapse() {
        // The same pattern/pair twice in one sentence counts once.
        let line = r#"{"tokens":["a","x","b","a","x","b"],"mentions":[{"start":0,"end":1,"entity":"E:A"},{"start":2,"end":3,"entity":"E:B"},{"start":3,"end":4,"entity":"E:A"},{"start":5,"end":6,"entity":"E:B"}]}"#;
        let corpus = corpus_from(&[line]);
        let index = extract_patterns(&corpus, &permissive());
        let fwd = index
            .ids()
            .find(|&id| index.pattern(id).canonical == "[Head] x [Tail]")
            .unwrap();
        assert_eq!(index.extracted(fwd).len(), 1);
    }

    #[test]
    fn extraction_is_deterministic() {
        let corpus = corpus_from(&[BEIJING]);
        let a = extract_patterns(&corpus, &permissive());
        let b = extract_patterns(&corpus, &permissive());
        assert_eq!(a, b);
    }

    fn tiny_spec(seeds: &[(usize, usize)]) -> RelationSpec {
        RelationSpec::new(
            0,
            "r",
            seeds.iter().map(|&(h, t)| EntityPair::new(h, t)).collect(),
        )
    }

    /// Index with explicit extraction sets, for scoring tests.
    fn synthetic_index(sets: &[(&str, &[(usize, usize)])]) -> PatternIndex {
        let vocab = {
            let mut v = Vocab::new();
            for (name, _) in sets {
                v.intern(name);
            }
            v
        };
        let mut entries: Vec<(Pattern, Vec<EntityPair>)> = sets
            .iter()
            .map(|(name, pairs)| {
                let template = vec![
                    PatternToken::Head,
                    PatternToken::Word(vocab.id(name).unwrap()),
                    PatternToken::Tail,
                ];
                let mut pairs: Vec<EntityPair> =
                    pairs.iter().map(|&(h, t)| EntityPair::new(h, t)).collect();
                pairs.sort_unstable();
                (Pattern::new(PatternKind::Meta, template, &vocab), pairs)
            })
            .collect();
        entries.sort_by(|a, b| a.0.canonical.cmp(&b.0.canonical));
        let (patterns, extractions) = entries.into_iter().unzip();
        PatternIndex { patterns, extractions }
    }

    #[test]
    fn reliability_one_of_three() {
        let index = synthetic_index(&[("city", &[(0, 1), (2, 3), (4, 5)])]);
        let spec = tiny_spec(&[(0, 1)]);
        assert_eq!(seed_reliability(&index, 0, &spec).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn reliability_bounds() {
        let index = synthetic_index(&[("a", &[(0, 1), (2, 3)]), ("b", &[(8, 9)])]);
        let all_seeds = tiny_spec(&[(0, 1), (2, 3)]);
        assert_eq!(seed_reliability(&index, 0, &all_seeds).unwrap(), 1.0);
        assert_eq!(seed_reliability(&index, 1, &all_seeds).unwrap(), 0.0);
    }

    #[test]
    fn combined_degenerates_without_discriminator() {
        let index = synthetic_index(&[("a", &[(0, 1), (2, 3)])]);
        let spec = tiny_spec(&[(0, 1)]);
        let score = combined_reliability(&index, 0, &spec, None, 1.0).unwrap();
        assert_eq!(score.combined, score.seed_reliability);
        assert!(score.distributional_bonus.is_none());

        let scorer = |_: EntityPair| 0.7;
        let zero_lambda =
            combined_reliability(&index, 0, &spec, Some(&scorer), 0.0).unwrap();
        assert_eq!(zero_lambda.combined, zero_lambda.seed_reliability);
        assert_eq!(zero_lambda.distributional_bonus, Some(0.7));
    }

    #[test]
    fn combined_mean_bonus() {
        let index = synthetic_index(&[("a", &[(0, 1), (2, 3)])]);
        let spec = tiny_spec(&[(0, 1)]);
        // Scores 0.4 and 0.6 over two pairs, R = 0.5, lambda = 1 -> 1.0.
        let scorer = |p: EntityPair| if p.head == 0 { 0.4 } else { 0.6 };
        let score = combined_reliability(&index, 0, &spec, Some(&scorer), 1.0).unwrap();
        assert!((score.combined - 1.0).abs() < 1e-12);
    }

    #[test]
    fn top_k_saturates_and_breaks_ties() {
        let index = synthetic_index(&[
            ("alpha", &[(0, 1), (2, 3)]),
            ("beta", &[(0, 1), (2, 3)]),
            ("gamma", &[(0, 1), (2, 3), (4, 5)]),
        ]);
        let spec = tiny_spec(&[(0, 1), (2, 3), (4, 5)]);
        // gamma: R = 1 with support 3; alpha/beta: R = 1 with support 2.
        let picked = select_top_k(&index, &spec, None, 0.0, 2).unwrap();
        let canonicals: Vec<&str> =
            picked.iter().map(|&id| index.pattern(id).canonical.as_str()).collect();
        assert_eq!(canonicals, vec!["[Head] gamma [Tail]", "[Head] alpha [Tail]"]);

        // K beyond the candidate count returns everything.
        let all = select_top_k(&index, &spec, None, 0.0, 10).unwrap();
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn extract_pairs_unions_and_dedupes() {
        let index = synthetic_index(&[
            ("a", &[(0, 1), (2, 3)]),
            ("b", &[(2, 3), (4, 5)]),
        ]);
        assert!(extract_pairs(&index, &[]).is_empty());
        let ids: Vec<PatternId> = index.ids().collect();
        let union = extract_pairs(&index, &ids);
        assert_eq!(
            union,
            vec![EntityPair::new(0, 1), EntityPair::new(2, 3), EntityPair::new(4, 5)]
        );
    }
}
