use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{system_agreement, EvalError, Fraction, JudgmentSet, SystemLevels, SystemPolicy};
use crate::engine::Engine;
use crate::exec;
use crate::ingest::Corpus;
use crate::scoring::{baseline_score, score_direct, RelevanceLevel};

/// Article number taken from the trailing digits of a document id, so that
/// `article07`, `a7` and `7` all map to article 7.
pub fn article_id_from_doc_id(doc_id: &str) -> Option<u32> {
    let digits: String = doc_id
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemScores {
    pub at_least_one_judge: Fraction,
    pub majority: Fraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub query: String,
    pub article_id: u32,
    pub doc_id: String,
    /// Effective level per judge id; judges who never saw the article are absent.
    pub judges: BTreeMap<String, RelevanceLevel>,
    pub fuzzy_level: RelevanceLevel,
    pub fuzzy_score: f64,
    pub baseline_level: RelevanceLevel,
    pub baseline_count: u32,
    pub fuzzy_matches_a_judge: bool,
    pub baseline_matches_a_judge: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub queries: Vec<String>,
    pub documents: usize,
    pub fuzzy: SystemScores,
    pub baseline: SystemScores,
    pub rows: Vec<ComparisonRow>,
    /// Documents whose id carries no article number known to the judgments.
    pub unmatched_documents: Vec<String>,
    pub note: String,
}

pub const COMPARISON_NOTE: &str = "Agreement is measured on the supplied corpus and judgments. \
It reproduces the measurement method; it is comparable to another study's figures only when run on that study's documents.";

/// Runs the zone-weighted scorer and the location-blind baseline over every
/// (query, judged article) pair and reports both agreement fractions.
pub fn compare_rankers(
    engine: &Engine,
    corpus: &Corpus,
    queries: &[String],
    js: &JudgmentSet,
) -> Result<ComparisonReport, EvalError> {
    let queries: Vec<String> = queries.iter().map(|q| q.trim().to_lowercase()).collect();
    let js = js.restrict(&queries);
    let judged = js.judged_articles();
    let judges: Vec<&str> = js.judges().into_iter().collect();

    let mut docs = Vec::new();
    let mut unmatched = Vec::new();
    for d in corpus.documents() {
        match article_id_from_doc_id(&d.id).filter(|a| judged.contains(a)) {
            Some(a) => docs.push((a, d)),
            None => unmatched.push(d.id.clone()),
        }
    }

    let mut fuzzy = SystemLevels::new();
    let mut baseline = SystemLevels::new();
    let mut rows = Vec::new();
    for q in &queries {
        let eq = engine.expand(q);
        let scored = exec::map(engine.execution(), &docs, |(article, doc)| {
            (
                *article,
                doc.id.clone(),
                score_direct(doc, &eq, engine.scoring()),
                baseline_score(doc, &eq),
            )
        });
        for (article, doc_id, f, b) in scored {
            let levels: BTreeMap<String, RelevanceLevel> = judges
                .iter()
                .filter_map(|j| js.effective_level(j, q, article).map(|l| (j.to_string(), l)))
                .collect();
            fuzzy.insert((q.clone(), article), f.level);
            baseline.insert((q.clone(), article), b.level);
            rows.push(ComparisonRow {
                query: q.clone(),
                article_id: article,
                doc_id,
                fuzzy_matches_a_judge: levels.values().any(|l| *l == f.level),
                baseline_matches_a_judge: levels.values().any(|l| *l == b.level),
                judges: levels,
                fuzzy_level: f.level,
                fuzzy_score: f.total,
                baseline_level: b.level,
                baseline_count: b.count,
            });
        }
    }

    let scores = |system: &SystemLevels| -> Result<SystemScores, EvalError> {
        Ok(SystemScores {
            at_least_one_judge: system_agreement(system, &js, SystemPolicy::AtLeastOneJudge)?,
            majority: system_agreement(system, &js, SystemPolicy::Majority)?,
        })
    };
    Ok(ComparisonReport {
        fuzzy: scores(&fuzzy)?,
        baseline: scores(&baseline)?,
        documents: docs.len(),
        queries,
        rows,
        unmatched_documents: unmatched,
        note: COMPARISON_NOTE.to_string(),
    })
}
