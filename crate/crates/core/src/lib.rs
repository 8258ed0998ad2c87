//! Zone-weighted, ontology-expanded relevance ranking for scholarly articles.
//!
//! The pipeline runs ingest → text analysis → indexing → search. Each
//! result gets a fuzzy relevance level ("Highly relevant", "Relevant",
//! "Somewhat relevant") rather than only a rank. The evaluation module
//! measures agreement between rankers and human judges.

pub mod engine;
pub mod eval;
pub mod exec;
pub mod fixtures;
pub mod index;
pub mod ingest;
pub mod ontology;
pub mod scoring;
pub mod text;
