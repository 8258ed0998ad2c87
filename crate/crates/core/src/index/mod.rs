//! Inverted index over a corpus and level-bucketed search.
//!
//! Postings keep full location data (zone, caption, sentence) rather than
//! precomputed scores, since scores depend on how the query expands. The
//! query-independent context annotations are computed once at build time
//! and stored per document.

mod format;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{self, Execution};
use crate::ingest::{Corpus, ZoneKind, ZonedDocument};
use crate::ontology::{ExpandedQuery, Vocabulary};
use crate::scoring::{
    ContextAnnotations, OccurrenceProfile, RelevanceLevel, ScoreBreakdown, ScoringConfig, TokenLocation,
};
use crate::text::make_match_units;

pub use format::{load_index, read_index, save_index, write_index, FORMAT_VERSION, MAGIC};

/// Words kept in result snippets.
pub const SNIPPET_WORDS: usize = 50;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("index format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("cannot parse index: {0}")]
    Parse(String),
    #[error("index was built with a different configuration (index {index}, current {current})")]
    ConfigMismatch { index: String, current: String },
    #[error("cannot index an empty corpus")]
    EmptyCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    /// Position of the document in the doc table (sorted by id).
    pub doc: u32,
    /// Index of the unit's first token among the document's tokens.
    pub token_index: u32,
    pub zone: ZoneKind,
    pub caption_index: Option<u32>,
    pub body_word_position: Option<u32>,
    pub sentence_id: u32,
}

impl Posting {
    fn location(&self) -> TokenLocation {
        TokenLocation {
            zone: self.zone,
            caption_index: self.caption_index,
            sentence_id: self.sentence_id,
        }
    }
}

/// Display fields and scoring annotations of one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocRecord {
    pub id: String,
    pub title: String,
    pub date: Option<String>,
    pub abstract_text: String,
    pub source_path: Option<String>,
    pub token_count: u32,
    pub annotations: ContextAnnotations,
}

impl DocRecord {
    pub fn snippet(&self) -> String {
        snippet(&self.abstract_text, SNIPPET_WORDS)
    }
}

fn snippet(text: &str, words: usize) -> String {
    let mut parts = text.split_whitespace();
    let head: Vec<&str> = parts.by_ref().take(words).collect();
    let mut s = head.join(" ");
    if parts.next().is_some() {
        s.push('…');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub document_count: u32,
    pub token_count: u64,
    /// Seconds since the Unix epoch; absent for reproducible builds.
    pub built_at: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    /// Unigram and bigram keys; each list sorted by (doc, token_index).
    pub postings: BTreeMap<String, Vec<Posting>>,
    pub docs: Vec<DocRecord>,
    pub stats: CorpusStats,
    pub config_fingerprint: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub execution: Execution,
    pub built_at: Option<u64>,
}

/// Indexes every unigram and same-sentence bigram of every document.
pub fn build_index(
    corpus: &Corpus,
    vocabulary: &Vocabulary,
    config_fingerprint: &str,
    options: BuildOptions,
) -> Result<Index, IndexError> {
    if corpus.is_empty() {
        return Err(IndexError::EmptyCorpus);
    }
    let docs = corpus.documents();
    let per_doc = exec::map_range(options.execution, 0..docs.len(), |i| {
        let doc = &docs[i];
        let record = DocRecord {
            id: doc.id.clone(),
            title: doc.title.clone(),
            date: doc.date.clone(),
            abstract_text: doc.abstract_text.clone(),
            source_path: corpus.manifest().get(&doc.id).cloned(),
            token_count: doc.tokens.len() as u32,
            annotations: ContextAnnotations::compute(&doc.tokens, vocabulary),
        };
        (record, doc_postings(i as u32, doc))
    });

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut records = Vec::with_capacity(per_doc.len());
    let mut token_count = 0u64;
    for (record, local) in per_doc {
        token_count += record.token_count as u64;
        records.push(record);
        for (key, list) in local {
            postings.entry(key).or_default().extend(list);
        }
    }
    Ok(Index {
        postings,
        stats: CorpusStats {
            document_count: records.len() as u32,
            token_count,
            built_at: options.built_at,
        },
        docs: records,
        config_fingerprint: config_fingerprint.to_string(),
    })
}

fn doc_postings(doc: u32, zd: &ZonedDocument) -> BTreeMap<String, Vec<Posting>> {
    let mut local: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    for unit in make_match_units(&zd.tokens) {
        let t = &zd.tokens[unit.first_token];
        local.entry(unit.key()).or_default().push(Posting {
            doc,
            token_index: unit.first_token as u32,
            zone: t.zone,
            caption_index: t.zone_caption_index,
            body_word_position: t.body_word_position,
            sentence_id: t.sentence_id,
        });
    }
    local
}

impl Index {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn document(&self, id: &str) -> Option<&DocRecord> {
        self.docs
            .binary_search_by(|d| d.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.docs[i])
    }

    pub fn postings(&self, key: &str) -> &[Posting] {
        self.postings.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Rebuilds each matching document's occurrence profile from postings.
    /// Terms of three or more words are matched as runs of unigram postings.
    pub fn profiles(&self, eq: &ExpandedQuery) -> BTreeMap<u32, OccurrenceProfile> {
        let mut raw: BTreeMap<u32, Vec<(usize, usize, &str)>> = BTreeMap::new();
        let mut locations: HashMap<(u32, u32), TokenLocation> = HashMap::new();
        for (term, _) in eq.terms() {
            let words: Vec<&str> = term.split(' ').collect();
            if words.len() <= 2 {
                for p in self.postings(term) {
                    raw.entry(p.doc)
                        .or_default()
                        .push((p.token_index as usize, words.len(), term));
                    locations.insert((p.doc, p.token_index), p.location());
                }
                continue;
            }
            let follow: Vec<HashMap<(u32, u32), u32>> = words[1..]
                .iter()
                .map(|w| {
                    self.postings(w)
                        .iter()
                        .map(|p| ((p.doc, p.token_index), p.sentence_id))
                        .collect()
                })
                .collect();
            for p in self.postings(words[0]) {
                let continues = follow
                    .iter()
                    .enumerate()
                    .all(|(k, next)| next.get(&(p.doc, p.token_index + k as u32 + 1)) == Some(&p.sentence_id));
                if continues {
                    raw.entry(p.doc)
                        .or_default()
                        .push((p.token_index as usize, words.len(), term));
                    locations.insert((p.doc, p.token_index), p.location());
                }
            }
        }
        raw.into_iter()
            .map(|(doc, matches)| {
                let record = &self.docs[doc as usize];
                let profile = OccurrenceProfile::from_matches(
                    &record.id,
                    eq.resolve_raw(matches),
                    eq,
                    &record.annotations,
                    |i| locations[&(doc, i as u32)],
                );
                (doc, profile)
            })
            .collect()
    }
}

/// One ranked hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub doc_id: String,
    pub title: String,
    pub date: Option<String>,
    pub abstract_snippet: String,
    pub total_score: f64,
    pub level: RelevanceLevel,
    pub breakdown: ScoreBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultList {
    pub query: String,
    pub results: Vec<SearchHit>,
    pub level_counts: BTreeMap<RelevanceLevel, usize>,
}

impl ResultList {
    /// Orders hits by level, then total descending, then doc id; drops
    /// NotRelevant.
    pub fn from_hits(query: &str, mut hits: Vec<SearchHit>) -> Self {
        hits.retain(|h| h.level.is_relevant());
        hits.sort_by(|a, b| {
            a.level
                .cmp(&b.level)
                .then(b.total_score.total_cmp(&a.total_score))
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        let mut level_counts = BTreeMap::new();
        for h in &hits {
            *level_counts.entry(h.level).or_insert(0) += 1;
        }
        Self {
            query: query.to_string(),
            results: hits,
            level_counts,
        }
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }
}

/// Scores every candidate document through the index.
pub fn search(index: &Index, eq: &ExpandedQuery, cfg: &ScoringConfig, execution: Execution) -> ResultList {
    let profiles: Vec<(u32, OccurrenceProfile)> = index.profiles(eq).into_iter().collect();
    let hits = exec::map(execution, &profiles, |(doc, profile)| {
        let record = &index.docs[*doc as usize];
        let breakdown = crate::scoring::score_document(profile, cfg);
        SearchHit {
            doc_id: record.id.clone(),
            title: record.title.clone(),
            date: record.date.clone(),
            abstract_snippet: record.snippet(),
            total_score: breakdown.total,
            level: breakdown.level,
            breakdown,
        }
    });
    ResultList::from_hits(&eq.query, hits)
}

/// Same ranking computed straight from the documents, without an index.
pub fn search_direct(corpus: &Corpus, eq: &ExpandedQuery, cfg: &ScoringConfig, execution: Execution) -> ResultList {
    let hits = exec::map(execution, corpus.documents(), |doc| {
        let breakdown = crate::scoring::score_direct(doc, eq, cfg);
        SearchHit {
            doc_id: doc.id.clone(),
            title: doc.title.clone(),
            date: doc.date.clone(),
            abstract_snippet: snippet(&doc.abstract_text, SNIPPET_WORDS),
            total_score: breakdown.total,
            level: breakdown.level,
            breakdown,
        }
    });
    ResultList::from_hits(&eq.query, hits)
}
