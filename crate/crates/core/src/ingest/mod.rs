//! Article ingestion: raw text or tagged XML in, zoned and tokenized documents out.
//!
//! Plain text goes through line-oriented heuristics (see [`segment_zones`]);
//! XML that already marks its zones is taken at face value. Both paths share
//! the same finishing step, which carves an ersatz abstract out of the body
//! when no abstract exists and splits the body at the early/late boundary.

mod corpus;
mod segment;
mod xml;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{PositionedToken, TextPipeline};

pub use corpus::{load_corpus, load_corpus_with, LoadRecord, LoadReport, LoadStatus};
pub use segment::segment_zones;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("document {0:?} has no tokens after segmentation")]
    EmptyDocument(String),
    #[error("no .txt or .xml article files found in {0}")]
    NoDocumentsFound(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}: content is not valid UTF-8")]
    InvalidUtf8(PathBuf),
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("invalid pattern for {field}: {source}")]
    InvalidPattern {
        field: &'static str,
        #[source]
        source: regex::Error,
    },
    #[error("invalid ingest config: {0}")]
    InvalidConfig(String),
}

/// Structural region of an article used as a weighting context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZoneKind {
    Title,
    Abstract,
    ErsatzAbstract,
    Keywords,
    Caption,
    BodyEarly,
    BodyLate,
    References,
}

impl ZoneKind {
    pub const ALL: [ZoneKind; 8] = [
        ZoneKind::Title,
        ZoneKind::Abstract,
        ZoneKind::ErsatzAbstract,
        ZoneKind::Keywords,
        ZoneKind::Caption,
        ZoneKind::BodyEarly,
        ZoneKind::BodyLate,
        ZoneKind::References,
    ];

    pub fn is_body(self) -> bool {
        matches!(self, ZoneKind::BodyEarly | ZoneKind::BodyLate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ZoneKind::Title => "title",
            ZoneKind::Abstract => "abstract",
            ZoneKind::ErsatzAbstract => "ersatz_abstract",
            ZoneKind::Keywords => "keywords",
            ZoneKind::Caption => "caption",
            ZoneKind::BodyEarly => "body_early",
            ZoneKind::BodyLate => "body_late",
            ZoneKind::References => "references",
        }
    }
}

impl std::fmt::Display for ZoneKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArticleFormat {
    PlainText,
    TaggedXml,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawArticle {
    pub id: String,
    pub source_path: String,
    pub format: ArticleFormat,
    pub content: String,
}

impl RawArticle {
    pub fn plain(id: impl Into<String>, content: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            source_path: format!("{id}.txt"),
            id,
            format: ArticleFormat::PlainText,
            content: content.into(),
        }
    }

    pub fn xml(id: impl Into<String>, content: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            source_path: format!("{id}.xml"),
            id,
            format: ArticleFormat::TaggedXml,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zone {
    pub kind: ZoneKind,
    pub text: String,
    /// Ordinal of the caption within its document (captions only).
    pub caption_index: Option<u32>,
}

impl Zone {
    pub fn new(kind: ZoneKind, text: impl Into<String>) -> Self {
        Self {
            kind,
            text: text.into(),
            caption_index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZonedDocument {
    pub id: String,
    pub title: String,
    pub date: Option<String>,
    pub abstract_text: String,
    pub zones: Vec<Zone>,
    /// Non-stopword tokens of every zone, in document order.
    pub tokens: Vec<PositionedToken>,
}

impl ZonedDocument {
    pub fn zone(&self, kind: ZoneKind) -> Option<&Zone> {
        self.zones.iter().find(|z| z.kind == kind)
    }

    /// Serializes to the tagged XML schema accepted by [`Ingester::parse_document`].
    ///
    /// Reparsing the output with the same config reproduces the zones.
    pub fn to_tagged_xml(&self, config: &IngestConfig) -> String {
        xml::write_document(self, config)
    }
}

/// Documents sorted by id plus the id → source path manifest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<ZonedDocument>,
    manifest: BTreeMap<String, String>,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids. Documents are re-sorted by id.
    pub fn new(documents: Vec<(ZonedDocument, String)>) -> Result<Self, IngestError> {
        let mut manifest = BTreeMap::new();
        let mut docs = Vec::with_capacity(documents.len());
        for (doc, path) in documents {
            if manifest.insert(doc.id.clone(), path).is_some() {
                return Err(IngestError::DuplicateId(doc.id));
            }
            docs.push(doc);
        }
        docs.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(Self {
            documents: docs,
            manifest,
        })
    }

    pub fn documents(&self) -> &[ZonedDocument] {
        &self.documents
    }

    pub fn manifest(&self) -> &BTreeMap<String, String> {
        &self.manifest
    }

    pub fn get(&self, id: &str) -> Option<&ZonedDocument> {
        self.documents
            .binary_search_by(|d| d.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

/// Zone heuristics and body-boundary settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub abstract_pattern: String,
    pub keywords_pattern: String,
    pub caption_pattern: String,
    pub references_pattern: String,
    /// Section headings; they end an abstract and never become an ersatz abstract.
    pub heading_pattern: String,
    pub date_pattern: String,
    pub ersatz_max_words: usize,
    /// Paragraphs shorter than this (author lines, affiliations) are skipped
    /// when choosing the ersatz abstract.
    pub ersatz_min_words: usize,
    pub body_early_boundary: usize,
    /// Lines after the title searched for a publication year.
    pub header_lines: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            abstract_pattern: r"^(Abstract|ABSTRACT)\b".into(),
            keywords_pattern: r"^(Keywords|KEYWORDS|Key words|Key Words|Index Terms|INDEX TERMS)\b"
                .into(),
            caption_pattern: r"^(Fig\.?|Figure|FIGURE|FIG\.?|Table|TABLE)\s*\d".into(),
            references_pattern: r"^(References|REFERENCES|Bibliography|BIBLIOGRAPHY)$".into(),
            heading_pattern: r"^((\d+(\.\d+)*\.?|[IVX]+\.)\s+[A-Z][^.]{0,80}|[A-Z][A-Z0-9 ,&:\-]{2,80}|Introduction|Methods|Materials and Methods|Results|Discussion|Conclusions?|Acknowledge?ments)$".into(),
            date_pattern: r"\([^()]*?\b(1[5-9]\d\d|20\d\d)\b[^()]*\)".into(),
            ersatz_max_words: 300,
            ersatz_min_words: 10,
            body_early_boundary: 2000,
            header_lines: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledPatterns {
    pub abstract_re: Regex,
    pub keywords_re: Regex,
    pub caption_re: Regex,
    pub references_re: Regex,
    pub heading_re: Regex,
    pub date_re: Regex,
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.body_early_boundary == 0 {
            return Err(IngestError::InvalidConfig(
                "body_early_boundary must be positive".into(),
            ));
        }
        if self.ersatz_max_words == 0 {
            return Err(IngestError::InvalidConfig("ersatz_max_words must be positive".into()));
        }
        self.compile().map(|_| ())
    }

    pub(crate) fn compile(&self) -> Result<CompiledPatterns, IngestError> {
        let c = |field: &'static str, p: &str| {
            Regex::new(p).map_err(|source| IngestError::InvalidPattern { field, source })
        };
        Ok(CompiledPatterns {
            abstract_re: c("abstract_pattern", &self.abstract_pattern)?,
            keywords_re: c("keywords_pattern", &self.keywords_pattern)?,
            caption_re: c("caption_pattern", &self.caption_pattern)?,
            references_re: c("references_pattern", &self.references_pattern)?,
            heading_re: c("heading_pattern", &self.heading_pattern)?,
            date_re: c("date_pattern", &self.date_pattern)?,
        })
    }
}

/// Parses raw articles with a fixed config and text pipeline.
#[derive(Debug, Clone)]
pub struct Ingester {
    config: IngestConfig,
    patterns: CompiledPatterns,
    pipeline: Arc<TextPipeline>,
}

impl Ingester {
    pub fn new(config: IngestConfig, pipeline: Arc<TextPipeline>) -> Result<Self, IngestError> {
        config.validate()?;
        let patterns = config.compile()?;
        Ok(Self {
            config,
            patterns,
            pipeline,
        })
    }

    pub fn config(&self) -> &IngestConfig {
        &self.config
    }

    pub fn pipeline(&self) -> &Arc<TextPipeline> {
        &self.pipeline
    }

    pub fn parse_document(&self, raw: &RawArticle) -> Result<ZonedDocument, IngestError> {
        if raw.content.trim().is_empty() {
            return Err(IngestError::EmptyDocument(raw.id.clone()));
        }
        let (id, zones, date) = match raw.format {
            ArticleFormat::PlainText => {
                let zones = segment::segment_with(&raw.content, &self.config, &self.patterns);
                let date = segment::extract_date(&raw.content, &self.config, &self.patterns);
                (raw.id.clone(), zones, date)
            }
            ArticleFormat::TaggedXml => {
                let parsed = xml::parse_tagged(&raw.content)?;
                let zones = segment::finish_segments(parsed.segments, &self.config, &self.patterns);
                let id = parsed
                    .id
                    .filter(|s| !s.trim().is_empty())
                    .unwrap_or_else(|| raw.id.clone());
                (id, zones, parsed.date)
            }
        };
        let tokens = build_tokens(&zones, &self.pipeline);
        if tokens.is_empty() {
            return Err(IngestError::EmptyDocument(id));
        }
        let title = zones
            .iter()
            .find(|z| z.kind == ZoneKind::Title)
            .map(|z| collapse_ws(&z.text))
            .unwrap_or_default();
        let abstract_text = zones
            .iter()
            .find(|z| matches!(z.kind, ZoneKind::Abstract | ZoneKind::ErsatzAbstract))
            .map(|z| {
                let text = collapse_ws(&z.text);
                if z.kind == ZoneKind::Abstract {
                    strip_label(&text, &self.patterns.abstract_re)
                } else {
                    text
                }
            })
            .unwrap_or_default();
        Ok(ZonedDocument {
            id,
            title,
            date,
            abstract_text,
            zones,
            tokens,
        })
    }
}

/// Convenience wrapper using a one-off [`Ingester`].
pub fn parse_document(
    raw: &RawArticle,
    config: &IngestConfig,
    pipeline: Arc<TextPipeline>,
) -> Result<ZonedDocument, IngestError> {
    Ingester::new(config.clone(), pipeline)?.parse_document(raw)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn strip_label(text: &str, label: &Regex) -> String {
    match label.find(text) {
        Some(m) => text[m.end()..]
            .trim_start_matches(|c: char| c.is_whitespace() || matches!(c, '—' | '-' | '–' | ':' | '.'))
            .to_string(),
        None => text.to_string(),
    }
}

/// Tokenizes zones in order, assigning document-global sentence ids and body
/// word positions (counted before stopword removal).
pub fn build_tokens(zones: &[Zone], pipeline: &TextPipeline) -> Vec<PositionedToken> {
    let mut tokens = Vec::new();
    let mut sentence_base = 0u32;
    let mut body_words = 0u32;
    for zone in zones {
        let words = pipeline.analyze(&zone.text);
        let mut max_sentence = None;
        for w in words {
            max_sentence = Some(w.sentence);
            let body_word_position = if zone.kind.is_body() {
                body_words += 1;
                Some(body_words)
            } else {
                None
            };
            if w.is_stopword {
                continue;
            }
            tokens.push(PositionedToken {
                surface: w.surface,
                stem: w.stem,
                zone: zone.kind,
                zone_caption_index: zone.caption_index,
                body_word_position,
                sentence_id: sentence_base + w.sentence,
            });
        }
        if let Some(m) = max_sentence {
            sentence_base += m + 1;
        }
    }
    tokens
}
