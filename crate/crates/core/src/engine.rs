//! One configuration object for the whole pipeline and a facade tying the
//! modules together.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exec::Execution;
use crate::index::{self, BuildOptions, Index, IndexError, ResultList};
use crate::ingest::{self, Corpus, IngestConfig, IngestError, Ingester, LoadReport, RawArticle, ZonedDocument};
use crate::ontology::{expand_query, ExpandedQuery, OntologyConfig, OntologyError, TaxonomySet};
use crate::scoring::{self, ScoreBreakdown, ScoringConfig, ScoringError};
use crate::text::{PipelineConfig, TextError, TextPipeline};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid TOML config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON config: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub pipeline: PipelineConfig,
    pub ingest: IngestConfig,
    pub ontology: OntologyConfig,
    pub scoring: ScoringConfig,
}

impl EngineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Reads a `.json` file as JSON and anything else as TOML. Relative
    /// paths inside the file are resolved against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.pipeline.stopwords_file,
            &mut self.pipeline.abbreviations_file,
            &mut self.ontology.taxonomy_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.ingest.validate()?;
        self.scoring.validate()?;
        Ok(())
    }
}

/// Configured pipeline: ingest, expand, index, search.
#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    pipeline: Arc<TextPipeline>,
    ingester: Ingester,
    taxonomies: TaxonomySet,
    fingerprint: String,
    execution: Execution,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let pipeline = Arc::new(TextPipeline::from_config(&config.pipeline)?);
        let ingester = Ingester::new(config.ingest.clone(), Arc::clone(&pipeline))?;
        let taxonomies = TaxonomySet::from_config(&config.ontology, &pipeline)?;
        let fingerprint = fingerprint(&config, &pipeline, &taxonomies);
        Ok(Self {
            config,
            pipeline,
            ingester,
            taxonomies,
            fingerprint,
            execution: Execution::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn pipeline(&self) -> &Arc<TextPipeline> {
        &self.pipeline
    }

    pub fn taxonomies(&self) -> &TaxonomySet {
        &self.taxonomies
    }

    pub fn scoring(&self) -> &ScoringConfig {
        &self.config.scoring
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    /// SHA-256 over everything that changes indexing or scoring output.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn parse_document(&self, raw: &RawArticle) -> Result<ZonedDocument, IngestError> {
        self.ingester.parse_document(raw)
    }

    pub fn load_corpus(&self, dir: &Path) -> Result<(Corpus, LoadReport), IngestError> {
        ingest::load_corpus_with(dir, &self.ingester, self.execution)
    }

    pub fn expand(&self, query: &str) -> ExpandedQuery {
        expand_query(query, &self.taxonomies, &self.pipeline, &self.config.ontology)
    }

    pub fn build_index(&self, corpus: &Corpus, built_at: Option<u64>) -> Result<Index, IndexError> {
        index::build_index(
            corpus,
            self.taxonomies.vocabulary(),
            &self.fingerprint,
            BuildOptions {
                execution: self.execution,
                built_at,
            },
        )
    }

    /// Fails when `index` was built under a different configuration.
    pub fn check(&self, index: &Index) -> Result<(), IndexError> {
        if index.config_fingerprint != self.fingerprint {
            return Err(IndexError::ConfigMismatch {
                index: index.config_fingerprint.clone(),
                current: self.fingerprint.clone(),
            });
        }
        Ok(())
    }

    pub fn search(&self, index: &Index, query: &str) -> Result<ResultList, IndexError> {
        self.check(index)?;
        Ok(index::search(
            index,
            &self.expand(query),
            &self.config.scoring,
            self.execution,
        ))
    }

    pub fn search_direct(&self, corpus: &Corpus, query: &str) -> ResultList {
        index::search_direct(corpus, &self.expand(query), &self.config.scoring, self.execution)
    }

    /// Breakdown for one indexed document; `None` if the id is unknown.
    pub fn explain(&self, index: &Index, doc_id: &str, query: &str) -> Result<Option<ScoreBreakdown>, IndexError> {
        self.check(index)?;
        let Some(pos) = index.docs.iter().position(|d| d.id == doc_id) else {
            return Ok(None);
        };
        let eq = self.expand(query);
        let mut profiles = index.profiles(&eq);
        let profile = profiles
            .remove(&(pos as u32))
            .unwrap_or_else(|| scoring::OccurrenceProfile {
                doc_id: doc_id.to_string(),
                ..Default::default()
            });
        Ok(Some(scoring::score_document(&profile, &self.config.scoring)))
    }
}

fn fingerprint(config: &EngineConfig, pipeline: &TextPipeline, taxonomies: &TaxonomySet) -> String {
    let mut h = Sha256::new();
    for part in [
        pipeline.fingerprint_material(),
        serde_json::to_string(&config.ingest).expect("serializes"),
        taxonomies.fingerprint_material(),
        format!("max_depth={:?}", config.ontology.max_depth),
        config.scoring.fingerprint_material(),
    ] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
