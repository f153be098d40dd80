//! Diachronic corpus mining over lemmatised vertical corpora.
//!
//! The pipeline runs parse → index → slice → query → report. A [`Corpus`] is parsed
//! from vertical text, a [`PositionalIndex`] maps lemmas to word positions,
//! [`slice_equal_mass`] cuts the dated documents into chronological bins of similar
//! token mass, and the query modules compute windowed collocation, Dice association
//! timelines and distributional semantic fields.

pub mod chrono;
pub mod colloc;
pub mod corpus;
pub mod dsm;
pub mod fixture;
pub mod index;
pub mod ratio;
pub mod report;
pub mod vertical;

pub use chrono::{slice_equal_mass, ChronoBin, DatePolicy, Slicing, YearConfig};
pub use colloc::{association_hits, association_table, dice_series, frequency_series, Hits, Scope};
pub use corpus::{Corpus, CorpusStats, DateSpec, Document, EraBounds, Fingerprint, LemmaGroup, SkipPolicy, Token};
pub use dsm::{cosine_neighbors, dsm_build, semantic_field, DsmConfig, DsmMatrix, Weighting};
pub use index::{DocSubset, PositionalIndex, Posting};
pub use ratio::Fraction;
pub use vertical::{parse_vertical, ParseMode, ParseOptions};
