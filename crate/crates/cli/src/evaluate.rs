//! The `evaluate` report: judge agreement plus the two-ranker comparison.

use std::fmt::Write as _;

use fuzzyrank_core::engine::Engine;
use fuzzyrank_core::eval::{
    compare_rankers, inter_judge_agreement, AgreementReport, AgreementRules, ComparisonReport, EvalError, JudgmentSet,
    ANY_QUERY,
};
use fuzzyrank_core::ingest::Corpus;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub queries: Vec<String>,
    /// Pooled over all queries first, then one report per query.
    pub agreement: Vec<AgreementReport>,
    pub comparison: ComparisonReport,
    /// Corpus files that failed to load.
    pub load_failures: usize,
}

pub fn evaluate(
    engine: &Engine,
    corpus: &Corpus,
    judgments: &JudgmentSet,
    queries: &[String],
    load_failures: usize,
) -> Result<EvaluationReport, EvalError> {
    let queries: Vec<String> = if queries.is_empty() {
        judgments.queries().into_iter().map(str::to_string).collect()
    } else {
        queries.iter().map(|q| q.trim().to_lowercase()).collect()
    };
    let mut agreement = Vec::new();
    let scoped = judgments.restrict(&queries);
    for q in std::iter::once(ANY_QUERY).chain(queries.iter().map(String::as_str)) {
        agreement.push(inter_judge_agreement(&scoped, q, AgreementRules::default())?);
    }
    let comparison = compare_rankers(engine, corpus, &queries, judgments)?;
    Ok(EvaluationReport {
        queries,
        agreement,
        comparison,
        load_failures,
    })
}

impl EvaluationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "queries: {}", self.queries.join(", "));
        let _ = writeln!(s, "\njudge agreement (relevant: two of three, not relevant: unanimous)");
        for a in &self.agreement {
            let name = if a.query == ANY_QUERY {
                "all queries"
            } else {
                a.query.as_str()
            };
            let _ = writeln!(
                s,
                "  {name:<16} relevant {:<18} not relevant {}",
                a.relevant_agreement.to_string(),
                a.not_relevant_agreement
            );
        }
        let c = &self.comparison;
        let _ = writeln!(s, "\nranker agreement with judges over {} documents", c.documents);
        let _ = writeln!(s, "  {:<16} {:<22} majority", "", "any judge");
        for (name, scores) in [("zone-weighted", &c.fuzzy), ("term count", &c.baseline)] {
            let _ = writeln!(
                s,
                "  {name:<16} {:<22} {}",
                scores.at_least_one_judge.to_string(),
                scores.majority
            );
        }
        if !c.unmatched_documents.is_empty() {
            let _ = writeln!(s, "\nunjudged documents skipped: {}", c.unmatched_documents.join(", "));
        }
        if self.load_failures > 0 {
            let _ = writeln!(s, "files that failed to load: {}", self.load_failures);
        }
        let _ = writeln!(s, "\n{}", c.note);
        s
    }
}
