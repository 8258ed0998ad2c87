//! JSON shapes shared by `fuzzyrank search --format json` and the HTTP API.

use std::collections::BTreeMap;

use fuzzyrank_core::engine::Engine;
use fuzzyrank_core::index::{Index, IndexError, ResultList, SearchHit};
use fuzzyrank_core::scoring::{RelevanceLevel, ScoreBreakdown};
use serde::{Deserialize, Serialize};

pub const DEFAULT_LIMIT: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct SearchParams {
    pub q: Option<String>,
    pub level: Option<String>,
    pub offset: Option<usize>,
    pub limit: Option<usize>,
    #[serde(default)]
    pub explain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultItem {
    pub doc_id: String,
    pub title: String,
    pub date: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_: String,
    pub level: RelevanceLevel,
    pub level_label: String,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<ScoreBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub query: String,
    /// Hits after the level filter, before paging.
    pub total_hits: usize,
    pub offset: usize,
    pub limit: usize,
    pub results: Vec<ResultItem>,
    /// Hits per level before the level filter, keyed `high`/`medium`/`low`.
    pub level_counts: BTreeMap<RelevanceLevel, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentResponse {
    pub doc_id: String,
    pub title: String,
    pub date: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_: String,
    pub source_path: Option<String>,
    pub token_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<ScoreBreakdown>,
}

/// Why a request could not be answered.
#[derive(Debug)]
pub enum RequestError {
    BadRequest(String),
    NotFound(String),
    Index(IndexError),
}

impl std::fmt::Display for RequestError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RequestError::BadRequest(m) | RequestError::NotFound(m) => f.write_str(m),
            RequestError::Index(e) => write!(f, "{e}"),
        }
    }
}

fn item(hit: &SearchHit, explain: bool) -> ResultItem {
    ResultItem {
        doc_id: hit.doc_id.clone(),
        title: hit.title.clone(),
        date: hit.date.clone(),
        abstract_: hit.abstract_snippet.clone(),
        level: hit.level,
        level_label: hit.level.label().to_string(),
        score: hit.total_score,
        breakdown: explain.then(|| hit.breakdown.clone()),
    }
}

pub fn parse_level(s: &str) -> Result<RelevanceLevel, RequestError> {
    s.parse::<RelevanceLevel>().map_err(RequestError::BadRequest)
}

/// Filters and pages a result list.
pub fn shape(
    list: &ResultList,
    level: Option<RelevanceLevel>,
    offset: usize,
    limit: usize,
    explain: bool,
) -> SearchResponse {
    let filtered: Vec<&SearchHit> = list
        .results
        .iter()
        .filter(|h| level.is_none_or(|l| h.level == l))
        .collect();
    SearchResponse {
        query: list.query.clone(),
        total_hits: filtered.len(),
        offset,
        limit,
        results: filtered
            .iter()
            .skip(offset)
            .take(limit)
            .map(|h| item(h, explain))
            .collect(),
        level_counts: list.level_counts.clone(),
    }
}

pub fn search(engine: &Engine, index: &Index, params: &SearchParams) -> Result<SearchResponse, RequestError> {
    let q = params
        .q
        .as_deref()
        .map(str::trim)
        .filter(|q| !q.is_empty())
        .ok_or_else(|| RequestError::BadRequest("missing query parameter q".into()))?;
    let level = params
        .level
        .as_deref()
        .filter(|l| !l.is_empty())
        .map(parse_level)
        .transpose()?;
    let list = engine.search(index, q).map_err(RequestError::Index)?;
    Ok(shape(
        &list,
        level,
        params.offset.unwrap_or(0),
        params.limit.unwrap_or(DEFAULT_LIMIT),
        params.explain,
    ))
}

pub fn document(engine: &Engine, index: &Index, id: &str, q: Option<&str>) -> Result<DocumentResponse, RequestError> {
    let rec = index
        .document(id)
        .ok_or_else(|| RequestError::NotFound(format!("no document with id {id:?}")))?;
    let q = q.map(str::trim).filter(|q| !q.is_empty());
    let breakdown = match q {
        Some(q) => engine.explain(index, id, q).map_err(RequestError::Index)?,
        None => None,
    };
    Ok(DocumentResponse {
        doc_id: rec.id.clone(),
        title: rec.title.clone(),
        date: rec.date.clone(),
        abstract_: rec.abstract_text.clone(),
        source_path: rec.source_path.clone(),
        token_count: rec.token_count,
        query: q.map(str::to_string),
        level_label: breakdown.as_ref().map(|b| b.level.label().to_string()),
        breakdown,
    })
}
