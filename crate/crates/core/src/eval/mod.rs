//! Agreement measures between human judges, and between rankers and judges.
//!
//! Judgments follow a pile model: each judge places each article in exactly
//! one pile, either a (query, level) pile or the "relevant to neither" pile,
//! written with query [`ANY_QUERY`]. A judge who placed an article somewhere
//! other than query `q`'s piles implicitly judged it NotRelevant for `q`.

mod agreement;
mod compare;
mod synth;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::RelevanceLevel;

pub use agreement::{
    inter_judge_agreement, system_agreement, AgreementClass, AgreementReport, AgreementRow, AgreementRule,
    AgreementRules, Fraction, Side, SystemLevels, SystemPolicy,
};
pub use compare::{article_id_from_doc_id, compare_rankers, ComparisonReport, ComparisonRow, SystemScores};
pub use synth::{planted_corpus, PlantedArticle, PlantedCategory, PlantedCorpus, PLANTED_QUERY};

/// Query value of the "relevant to neither query" pile.
pub const ANY_QUERY: &str = "*";

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("duplicate judgment by {judge:?} for query {query:?}, article {article}")]
    DuplicateJudgment { judge: String, query: String, article: u32 },
    #[error("judgment refers to unknown article {0}")]
    UnknownArticle(u32),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("agreement needs at least 2 judges, found {0}")]
    InsufficientJudges(usize),
    #[error("system has no level for query {query:?}, article {article}")]
    CoverageGap { query: String, article: u32 },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] crate::ingest::IngestError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Judgment {
    pub judge_id: String,
    pub query: String,
    pub article_id: u32,
    pub level: RelevanceLevel,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentSet {
    pub judgments: Vec<Judgment>,
    /// Citation per article; empty when no citation list was supplied.
    pub articles: BTreeMap<u32, String>,
}

#[derive(Debug, Deserialize)]
struct JudgmentRow {
    judge_id: String,
    query: String,
    article_id: u32,
    level: String,
}

#[derive(Debug, Deserialize)]
struct CitationRow {
    article_id: u32,
    citation: String,
}

fn csv_reader(source: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source.as_bytes())
}

/// Reads `article_id,citation` rows.
pub fn parse_citations(source: &str) -> Result<BTreeMap<u32, String>, EvalError> {
    let mut out = BTreeMap::new();
    for (i, row) in csv_reader(source).deserialize::<CitationRow>().enumerate() {
        let row = row.map_err(|e| EvalError::Parse {
            line: i + 2,
            message: e.to_string(),
        })?;
        out.insert(row.article_id, row.citation);
    }
    Ok(out)
}

/// Parses `judge_id,query,article_id,level` rows. When `citations` is given,
/// every judged article must have one.
pub fn load_judgments(source: &str, citations: Option<&str>) -> Result<JudgmentSet, EvalError> {
    let articles = citations.map(parse_citations).transpose()?.unwrap_or_default();
    let mut seen = BTreeSet::new();
    let mut judgments = Vec::new();
    for (i, row) in csv_reader(source).deserialize::<JudgmentRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| EvalError::Parse {
            line,
            message: e.to_string(),
        })?;
        let level = row
            .level
            .parse::<RelevanceLevel>()
            .map_err(|message| EvalError::Parse { line, message })?;
        let query = row.query.to_lowercase();
        if query.is_empty() || row.judge_id.is_empty() {
            return Err(EvalError::Parse {
                line,
                message: "empty judge_id or query".into(),
            });
        }
        if citations.is_some() && !articles.contains_key(&row.article_id) {
            return Err(EvalError::UnknownArticle(row.article_id));
        }
        if !seen.insert((row.judge_id.clone(), query.clone(), row.article_id)) {
            return Err(EvalError::DuplicateJudgment {
                judge: row.judge_id,
                query,
                article: row.article_id,
            });
        }
        judgments.push(Judgment {
            judge_id: row.judge_id,
            query,
            article_id: row.article_id,
            level,
        });
    }
    Ok(JudgmentSet { judgments, articles })
}

impl JudgmentSet {
    /// The bundled three-judge study on 30 articles.
    pub fn study() -> Self {
        load_judgments(
            crate::fixtures::STUDY_JUDGMENTS_CSV,
            Some(crate::fixtures::STUDY_CITATIONS_CSV),
        )
        .expect("bundled study judgments are valid")
    }

    pub fn load_files(judgments: &std::path::Path, citations: Option<&std::path::Path>) -> Result<Self, EvalError> {
        let read = |p: &std::path::Path| {
            std::fs::read_to_string(p).map_err(|source| EvalError::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let j = read(judgments)?;
        let c = citations.map(read).transpose()?;
        load_judgments(&j, c.as_deref())
    }

    pub fn judges(&self) -> BTreeSet<&str> {
        self.judgments.iter().map(|j| j.judge_id.as_str()).collect()
    }

    /// Real queries, excluding the neither pile.
    pub fn queries(&self) -> BTreeSet<&str> {
        self.judgments
            .iter()
            .map(|j| j.query.as_str())
            .filter(|q| *q != ANY_QUERY)
            .collect()
    }

    /// Articles with at least one judgment.
    pub fn judged_articles(&self) -> BTreeSet<u32> {
        self.judgments.iter().map(|j| j.article_id).collect()
    }

    pub fn vote(&self, judge: &str, query: &str, article: u32) -> Option<RelevanceLevel> {
        self.judgments
            .iter()
            .find(|j| j.judge_id == judge && j.query == query && j.article_id == article)
            .map(|j| j.level)
    }

    /// The judge's level for `query`: their vote if they cast one, otherwise
    /// NotRelevant if they judged the article at all.
    pub fn effective_level(&self, judge: &str, query: &str, article: u32) -> Option<RelevanceLevel> {
        if let Some(l) = self.vote(judge, query, article) {
            return Some(l);
        }
        self.judgments
            .iter()
            .any(|j| j.judge_id == judge && j.article_id == article)
            .then_some(RelevanceLevel::NotRelevant)
    }

    /// Keeps judgments for the given queries and the neither pile. Votes for
    /// other queries become neither-pile votes, so effective levels for the
    /// kept queries are unchanged.
    pub fn restrict(&self, queries: &[String]) -> Self {
        let keep: BTreeSet<String> = queries.iter().map(|q| q.to_lowercase()).collect();
        let mut seen = BTreeSet::new();
        let mut judgments = Vec::new();
        for j in &self.judgments {
            let mut j = j.clone();
            if !keep.contains(&j.query) {
                j.query = ANY_QUERY.to_string();
                j.level = RelevanceLevel::NotRelevant;
            }
            if seen.insert((j.judge_id.clone(), j.query.clone(), j.article_id)) {
                judgments.push(j);
            }
        }
        Self {
            judgments,
            articles: self.articles.clone(),
        }
    }
}
