//! Target-preserving data augmentation for aspect-based sentiment corpora.
//!
//! The library reads SemEval-style review XML into per-opinion records and
//! generates augmented variants in which the aspect expression survives
//! unchanged:
//!
//! * [`eda`] — synonym replacement, random insertion, random swap, and
//!   random deletion over target-masked sentences;
//! * [`adjusted`] — sense-disambiguated replacement/insertion (simplified
//!   Lesk over a greedy averaged-perceptron tagging) and the
//!   category-constrained target swap;
//! * [`backtranslate`] — left/right contexts routed through a pivot
//!   language while the target stays fixed, behind a translation cache;
//! * [`mixup`] — Beta(α, α)-weighted interpolation of zero-padded
//!   left/target/right embedding matrices and one-hot polarity vectors.
//!
//! Every stochastic step draws from per-record seeded streams
//! ([`seed::record_stream`]), so identical configurations yield
//! byte-identical artifacts. [`pipeline::run`] is the batch entry point the
//! `absa-augment` binary fronts.

pub mod adjusted;
pub mod backtranslate;
pub mod corpus;
pub mod eda;
pub mod lesk;
pub mod mixup;
pub mod pipeline;
pub mod seed;
pub mod tagger;
pub mod text;
pub mod wordnet;

pub use corpus::{AugmentedRecord, Method, OpinionRecord, Polarity};
pub use text::{MaskedSentence, TARGET_PLACEHOLDER};
pub use wordnet::{WnPos, WordNetDb};
