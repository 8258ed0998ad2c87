use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EvalError, JudgmentSet, ANY_QUERY};
use crate::scoring::RelevanceLevel;

/// A rate reported with its counts. An empty denominator reads as 1.0
/// (nothing to disagree about).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: u32,
    pub denominator: u32,
    pub value: f64,
}

impl Fraction {
    pub fn new(numerator: u32, denominator: u32) -> Self {
        let value = if denominator == 0 {
            1.0
        } else {
            numerator as f64 / denominator as f64
        };
        Self {
            numerator,
            denominator,
            value,
        }
    }

    pub fn percent(&self) -> f64 {
        self.value * 100.0
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} ({:.1}%)", self.numerator, self.denominator, self.percent())
    }
}

/// What counts as full agreement on one article.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementRule {
    /// At least two judges chose the same level.
    TwoOfThree,
    /// Every judge chose the same level.
    Unanimous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementRules {
    pub relevant: AgreementRule,
    pub not_relevant: AgreementRule,
}

impl Default for AgreementRules {
    fn default() -> Self {
        Self {
            relevant: AgreementRule::TwoOfThree,
            not_relevant: AgreementRule::Unanimous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Relevant,
    NotRelevant,
}

/// Largest number of judges sharing one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AgreementClass {
    Full3,
    Full2,
    Partial1,
}

impl AgreementClass {
    fn from_votes(votes: u32) -> Self {
        match votes {
            0 | 1 => AgreementClass::Partial1,
            2 => AgreementClass::Full2,
            _ => AgreementClass::Full3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub query: String,
    pub article_id: u32,
    pub side: Side,
    /// The level shared by the most judges (ties go to the higher level).
    pub category: RelevanceLevel,
    pub votes: u32,
    pub agreement_class: AgreementClass,
    pub full_agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    /// A query, or `*` for all queries pooled.
    pub query: String,
    pub judges: u32,
    pub rules: AgreementRules,
    pub relevant_agreement: Fraction,
    pub not_relevant_agreement: Fraction,
    pub rows: Vec<AgreementRow>,
}

fn is_full(votes: u32, judges: u32, rule: AgreementRule) -> bool {
    match rule {
        AgreementRule::TwoOfThree => votes >= 2,
        AgreementRule::Unanimous => votes >= judges,
    }
}

/// Inter-judge agreement for one query, or pooled over all queries when
/// `query` is `*`.
///
/// Relevant side: units are (query, article) pairs with at least one
/// High/Medium/Low vote; a unit agrees when enough judges chose the same
/// level. Not-relevant side: units are articles with at least one
/// NotRelevant judgment (the neither pile when pooled, effective levels for
/// a single query); a unit agrees when enough judges said NotRelevant.
pub fn inter_judge_agreement(
    js: &JudgmentSet,
    query: &str,
    rules: AgreementRules,
) -> Result<AgreementReport, EvalError> {
    let query = query.to_lowercase();
    let judges: Vec<&str> = js.judges().into_iter().collect();
    if judges.len() < 2 {
        return Err(EvalError::InsufficientJudges(judges.len()));
    }
    let n = judges.len() as u32;
    let pooled = query == ANY_QUERY;
    let queries: Vec<String> = if pooled {
        js.queries().into_iter().map(str::to_string).collect()
    } else {
        vec![query.clone()]
    };

    let mut rows = Vec::new();
    for q in &queries {
        let mut per_article: BTreeMap<u32, BTreeMap<RelevanceLevel, u32>> = BTreeMap::new();
        for j in js.judgments.iter().filter(|j| &j.query == q && j.level.is_relevant()) {
            *per_article.entry(j.article_id).or_default().entry(j.level).or_insert(0) += 1;
        }
        for (article, counts) in per_article {
            let (category, votes) = counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(l, c)| (*l, *c))
                .expect("non-empty");
            rows.push(AgreementRow {
                query: q.clone(),
                article_id: article,
                side: Side::Relevant,
                category,
                votes,
                agreement_class: AgreementClass::from_votes(votes),
                full_agreement: is_full(votes, n, rules.relevant),
            });
        }
    }

    let mut nr_votes: BTreeMap<u32, BTreeSet<&str>> = BTreeMap::new();
    if pooled {
        for j in js.judgments.iter().filter(|j| !j.level.is_relevant()) {
            nr_votes.entry(j.article_id).or_default().insert(&j.judge_id);
        }
    } else {
        for article in js.judged_articles() {
            for judge in &judges {
                if js.effective_level(judge, &query, article) == Some(RelevanceLevel::NotRelevant) {
                    nr_votes.entry(article).or_default().insert(judge);
                }
            }
        }
    }
    for (article, voters) in nr_votes {
        let votes = voters.len() as u32;
        rows.push(AgreementRow {
            query: query.clone(),
            article_id: article,
            side: Side::NotRelevant,
            category: RelevanceLevel::NotRelevant,
            votes,
            agreement_class: AgreementClass::from_votes(votes),
            full_agreement: is_full(votes, n, rules.not_relevant),
        });
    }

    let rate = |side: Side| {
        let units: Vec<&AgreementRow> = rows.iter().filter(|r| r.side == side).collect();
        Fraction::new(
            units.iter().filter(|r| r.full_agreement).count() as u32,
            units.len() as u32,
        )
    };
    Ok(AgreementReport {
        relevant_agreement: rate(Side::Relevant),
        not_relevant_agreement: rate(Side::NotRelevant),
        query,
        judges: n,
        rules,
        rows,
    })
}

/// A ranker's level for each (query, article) pair.
pub type SystemLevels = BTreeMap<(String, u32), RelevanceLevel>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemPolicy {
    /// The system's level equals at least one judge's level.
    AtLeastOneJudge,
    /// The system's level equals the level of at least two judges.
    Majority,
}

impl SystemPolicy {
    pub fn required(self) -> usize {
        match self {
            SystemPolicy::AtLeastOneJudge => 1,
            SystemPolicy::Majority => 2,
        }
    }
}

/// Fraction of judged (query, article) pairs on which the system matches
/// the judges per `policy`. Pairs cover every real query and every judged
/// article, using effective levels.
pub fn system_agreement(system: &SystemLevels, js: &JudgmentSet, policy: SystemPolicy) -> Result<Fraction, EvalError> {
    let judges: Vec<&str> = js.judges().into_iter().collect();
    let mut agree = 0;
    let mut total = 0;
    for q in js.queries() {
        for article in js.judged_articles() {
            let Some(level) = system.get(&(q.to_string(), article)) else {
                return Err(EvalError::CoverageGap {
                    query: q.to_string(),
                    article,
                });
            };
            let matching = judges
                .iter()
                .filter(|j| js.effective_level(j, q, article) == Some(*level))
                .count();
            total += 1;
            if matching >= policy.required() {
                agree += 1;
            }
        }
    }
    Ok(Fraction::new(agree, total))
}
