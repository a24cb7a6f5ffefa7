//! Seeded synthetic-corpus generator with a ground-truth manifest.
//!
//! Each relation owns a disjoint entity pool split into head and tail
//! halves, a set of planted templates ("[Head] w1 w2 [Tail]"), and a set of
//! noise templates. True pairs are head-tail combinations expressed through
//! the planted templates. A noise template is a known trap for seed-only
//! pattern selection: it extracts one genuine seed pair (so its seed
//! reliability beats the planted templates') plus junk pairs that cross
//! relation pools, which a trained scorer rejects from co-occurrence
//! clustering alone. Noise wording borrows the next relation's template
//! words, so matching by token similarity confuses relations until the
//! noise is filtered out.
//!
//! Distractor sentences mention a single entity next to a role marker word
//! (head-side or tail-side, per relation). They give the embedding space an
//! asymmetry between head and tail entities and guarantee every declared
//! entity occurs in the corpus.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub relations: usize,
    /// Pool size per relation; half head entities, half tail entities.
    pub entities_per_relation: usize,
    pub pairs_per_relation: usize,
    pub seeds_per_relation: usize,
    pub templates_per_relation: usize,
    pub noise_templates_per_relation: usize,
    pub sentences_per_pair: usize,
    /// Requested single-mention filler sentences; the generator adds more
    /// if needed so every declared entity appears at least once.
    pub distractor_sentences: usize,
    pub rng_seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            relations: 5,
            entities_per_relation: 40,
            pairs_per_relation: 40,
            seeds_per_relation: 10,
            templates_per_relation: 5,
            noise_templates_per_relation: 5,
            sentences_per_pair: 2,
            distractor_sentences: 400,
            rng_seed: 42,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ManifestRelation {
    pub name: String,
    pub true_pairs: Vec<(String, String)>,
    pub seed_pairs: Vec<(String, String)>,
    /// True pairs withheld from the seed file.
    pub heldout_pairs: Vec<(String, String)>,
    pub planted_templates: Vec<String>,
    pub noise_templates: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthManifest {
    pub entity_count: usize,
    pub sentence_count: usize,
    pub relations: Vec<ManifestRelation>,
}

#[derive(Debug, Clone, Serialize)]
struct MentionOut {
    start: usize,
    end: usize,
    entity: String,
}

#[derive(Debug, Clone, Serialize)]
struct SentenceOut {
    tokens: Vec<String>,
    mentions: Vec<MentionOut>,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    sentences: Vec<SentenceOut>,
    /// (relation, head, tail) rows for the seed file.
    seeds: Vec<(String, String, String)>,
    pub manifest: SynthManifest,
}

#[derive(Debug, Clone)]
pub struct SynthPaths {
    pub corpus: PathBuf,
    pub seeds: PathBuf,
    pub manifest: PathBuf,
}

fn validate(spec: &SynthSpec) -> Result<()> {
    let fail = |msg: String| Err(Error::Config(msg));
    if spec.relations == 0 {
        return fail("relations must be at least 1".into());
    }
    if spec.entities_per_relation < 2 {
        return fail("entities_per_relation must be at least 2".into());
    }
    let half = spec.entities_per_relation / 2;
    let capacity = half * (spec.entities_per_relation - half);
    if spec.pairs_per_relation == 0 || spec.pairs_per_relation > capacity {
        return fail(format!(
            "pairs_per_relation must be in 1..={} for {} entities",
            capacity, spec.entities_per_relation
        ));
    }
    if spec.seeds_per_relation == 0 || spec.seeds_per_relation > spec.pairs_per_relation {
        return fail("seeds_per_relation must be in 1..=pairs_per_relation".into());
    }
    if spec.templates_per_relation == 0 {
        return fail("templates_per_relation must be at least 1".into());
    }
    if spec.sentences_per_pair == 0 {
        return fail("sentences_per_pair must be at least 1".into());
    }
    Ok(())
}

const MISC_WORDS: usize = 8;

fn misc_word(i: usize) -> String {
    format!("misc{}", i % MISC_WORDS)
}

/// The two middle words of planted template `k` of relation `r`.
fn template_words(r: usize, k: usize) -> (String, String) {
    (format!("r{}w{}", r, 2 * k), format!("r{}w{}", r, 2 * k + 1))
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);

    let head_count = spec.entities_per_relation / 2;
    let tail_count = spec.entities_per_relation - head_count;
    let entity_name = |r: usize, role: char, i: usize| format!("{}{}_{}", role, r, i);

    let mut sentences: Vec<SentenceOut> = Vec::new();
    let mut seeds: Vec<(String, String, String)> = Vec::new();
    let mut relations: Vec<ManifestRelation> = Vec::new();

    let two_mention_sentence = |head: &str, words: &[String], tail: &str| -> SentenceOut {
        let mut tokens = Vec::with_capacity(words.len() + 2);
        tokens.push(head.to_lowercase());
        tokens.extend(words.iter().cloned());
        tokens.push(tail.to_lowercase());
        SentenceOut {
            mentions: vec![
                MentionOut { start: 0, end: 1, entity: head.to_string() },
                MentionOut {
                    start: tokens.len() - 1,
                    end: tokens.len(),
                    entity: tail.to_string(),
                },
            ],
            tokens,
        }
    };

    let pool_heads: Vec<Vec<String>> = (0..spec.relations)
        .map(|r| (0..head_count).map(|i| entity_name(r, 'h', i)).collect())
        .collect();
    let pool_tails: Vec<Vec<String>> = (0..spec.relations)
        .map(|r| (0..tail_count).map(|i| entity_name(r, 't', i)).collect())
        .collect();

    for r in 0..spec.relations {
        let name = format!("rel{}", r);
        let heads = &pool_heads[r];
        let tails = &pool_tails[r];

        // True pairs: per round, one full head-to-tail matching from a
        // rotated seeded permutation, so rounds never repeat a pair and
        // every entity is used once pairs >= half the pool.
        let mut perm: Vec<usize> = (0..tail_count).collect();
        perm.shuffle(&mut rng);
        let mut true_pairs: Vec<(String, String)> = Vec::with_capacity(spec.pairs_per_relation);
        for i in 0..spec.pairs_per_relation {
            let round = i / head_count;
            let pos = i % head_count;
            let t = (perm[pos % tail_count] + round) % tail_count;
            true_pairs.push((heads[pos].clone(), tails[t].clone()));
        }

        // Seeds: a random subset of the true pairs.
        let mut pick: Vec<usize> = (0..spec.pairs_per_relation).collect();
        pick.shuffle(&mut rng);
        let mut seed_idx: Vec<usize> = pick[..spec.seeds_per_relation].to_vec();
        seed_idx.sort_unstable();
        let seed_pairs: Vec<(String, String)> =
            seed_idx.iter().map(|&i| true_pairs[i].clone()).collect();
        let heldout_pairs: Vec<(String, String)> = (0..spec.pairs_per_relation)
            .filter(|i| !seed_idx.contains(i))
            .map(|i| true_pairs[i].clone())
            .collect();

        // Planted templates and the pair sentences expressing them.
        let planted_templates: Vec<String> = (0..spec.templates_per_relation)
            .map(|k| {
                let (a, b) = template_words(r, k);
                format!("[Head] {} {} [Tail]", a, b)
            })
            .collect();
        for (i, (h, t)) in true_pairs.iter().enumerate() {
            for s in 0..spec.sentences_per_pair {
                let k = (i + s) % spec.templates_per_relation;
                let (a, b) = template_words(r, k);
                sentences.push(two_mention_sentence(h, &[a, b], t));
            }
        }

        // Noise templates: borrow the next relation's wording. Each
        // extracts a few genuine seed pairs (one third of its support, so
        // its seed reliability edges out the planted templates') plus twice
        // as many junk pairs whose tails come from the next relation's pool
        // and are therefore never true under any relation.
        let seeds_per_noise = 3.min(seed_pairs.len());
        let junk_per_noise = 2 * seeds_per_noise;
        let mut noise_templates = Vec::new();
        for j in 0..spec.noise_templates_per_relation {
            let donor = (r + 1) % spec.relations;
            let (a, b) = template_words(donor, j % spec.templates_per_relation);
            let words = vec![a, b, misc_word(j)];
            noise_templates.push(format!("[Head] {} {} {} [Tail]", words[0], words[1], words[2]));

            for s in 0..seeds_per_noise {
                let (sh, st) = &seed_pairs[(seeds_per_noise * j + s) % seed_pairs.len()];
                sentences.push(two_mention_sentence(sh, &words, st));
            }
            if spec.relations > 1 {
                let foreign = &pool_tails[donor];
                for junk in 0..junk_per_noise {
                    let head = &heads[(junk_per_noise * j + junk) % head_count];
                    let tail = &foreign[(junk_per_noise * j + junk) % tail_count];
                    sentences.push(two_mention_sentence(head, &words, tail));
                }
            } else if tail_count >= 2 {
                // Single-relation corpora fall back to tail-tail junk.
                for junk in 0..junk_per_noise {
                    let a_ix = (junk_per_noise * j + junk) % tail_count;
                    let b_ix = (a_ix + 1) % tail_count;
                    sentences.push(two_mention_sentence(&tails[a_ix], &words, &tails[b_ix]));
                }
            }
        }

        for (h, t) in &seed_pairs {
            seeds.push((name.clone(), h.clone(), t.clone()));
        }
        relations.push(ManifestRelation {
            name,
            true_pairs,
            seed_pairs,
            heldout_pairs,
            planted_templates,
            noise_templates,
        });
    }

    // Distractors: entity next to its role marker. Guarantees coverage of
    // every declared entity, then spends the requested budget round-robin.
    let all_entities: Vec<(usize, char, String)> = (0..spec.relations)
        .flat_map(|r| {
            let heads = (0..head_count).map(move |i| (r, 'h', entity_name(r, 'h', i)));
            let tails = (0..tail_count).map(move |i| (r, 't', entity_name(r, 't', i)));
            heads.chain(tails)
        })
        .collect();
    let distractor = |(r, role, name): &(usize, char, String), i: usize| -> SentenceOut {
        let marker = format!("{}mark{}", role, r);
        SentenceOut {
            tokens: vec![name.to_lowercase(), marker, misc_word(i)],
            mentions: vec![MentionOut { start: 0, end: 1, entity: name.clone() }],
        }
    };
    let mentioned: std::collections::HashSet<&str> = sentences
        .iter()
        .flat_map(|s| s.mentions.iter().map(|m| m.entity.as_str()))
        .collect();
    let unmentioned: Vec<(usize, char, String)> = all_entities
        .iter()
        .filter(|(_, _, name)| !mentioned.contains(name.as_str()))
        .cloned()
        .collect();
    for (i, e) in unmentioned.iter().enumerate() {
        sentences.push(distractor(e, i));
    }
    for i in 0..spec.distractor_sentences {
        let e = &all_entities[i % all_entities.len()];
        sentences.push(distractor(e, rng.gen_range(0..MISC_WORDS)));
    }

    sentences.shuffle(&mut rng);

    let manifest = SynthManifest {
        entity_count: all_entities.len(),
        sentence_count: sentences.len(),
        relations,
    };
    Ok(SynthData { sentences, seeds, manifest })
}

/// Generates and writes `corpus.jsonl`, `seeds.tsv` and `manifest.json`.
pub fn write_synthetic(spec: &SynthSpec, dir: impl AsRef<Path>) -> Result<SynthPaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let data = generate(spec)?;

    let corpus = dir.join("corpus.jsonl");
    {
        let mut f = fs::File::create(&corpus).map_err(|e| Error::io(&corpus, e))?;
        for s in &data.sentences {
            let line = serde_json::to_string(s)
                .map_err(|e| Error::Invalid(format!("serializing sentence: {}", e)))?;
            writeln!(f, "{}", line).map_err(|e| Error::io(&corpus, e))?;
        }
    }

    let seeds = dir.join("seeds.tsv");
    {
        let mut f = fs::File::create(&seeds).map_err(|e| Error::io(&seeds, e))?;
        for (r, h, t) in &data.seeds {
            writeln!(f, "{}\t{}\t{}", r, h, t).map_err(|e| Error::io(&seeds, e))?;
        }
    }

    let manifest = dir.join("manifest.json");
    {
        let f = fs::File::create(&manifest).map_err(|e| Error::io(&manifest, e))?;
        serde_json::to_writer_pretty(f, &data.manifest)
            .map_err(|e| Error::Invalid(format!("serializing manifest: {}", e)))?;
    }

    Ok(SynthPaths { corpus, seeds, manifest })
}

/// Reads back a manifest written by [`write_synthetic`].
pub fn read_manifest(path: impl AsRef<Path>) -> Result<SynthManifest> {
    let path = path.as_ref();
    let data = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&data).map_err(|e| Error::malformed(path, 1, e.to_string()))
}
