//! Supervised word sense disambiguation over bigram features.
//!
//! The pipeline: load sense-tagged instances ([`corpus`]), count consecutive
//! word pairs and score them with contingency-table association statistics
//! ([`stats`]), select the top-ranked bigrams as binary features
//! ([`features`]), train decision trees, decision stumps, a Naive Bayes
//! bag-of-words classifier, and a majority baseline ([`learners`]), then
//! score predictions and emit per-task reports ([`eval`], [`experiment`]).

pub mod corpus;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod learners;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
