//! Co-training of a discrete textual-pattern selector and a translation-style
//! entity embedding scorer for weakly-supervised corpus-level relation
//! extraction.
//!
//! The pattern side selects, per target relation, the K patterns whose
//! extractions best match the seed pairs (plus, once a scorer exists, a
//! bonus from the distributional side). The distributional side trains
//! entity/word/relation vectors on the corpus co-occurrence network, the
//! seeds, and the pairs the selected patterns extract. Alternating the two
//! lets each module hand extra supervision to the other.

pub mod corpus;
pub mod cotrain;
pub mod dump;
pub mod embed;
pub mod error;
pub mod eval;
pub mod pattern;
pub mod pipeline;
pub mod sample;
pub mod synth;

pub use corpus::{Corpus, CooccurrenceNetwork, EntityPair, RelationSpec};
pub use embed::{EmbeddingStore, TrainConfig};
pub use error::{Error, Result};
pub use pattern::{Pattern, PatternIndex};
