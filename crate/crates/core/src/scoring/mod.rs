//! Relevance scoring: zone weights, ontology match weights and the
//! cross-index context multiplier, plus the location-blind baseline.
//!
//! Every query-term occurrence contributes `zone_weight × factor` to the zone
//! component and `match_type_weight × factor` to the ontology component,
//! where `factor` is the context multiplier for occurrences inside a context
//! sentence and 1 elsewhere. References occurrences are recorded but never
//! scored.

mod level;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ZoneKind, ZonedDocument};
use crate::ontology::{ExpandedQuery, IndexKind, MatchType, PhraseMatch, Vocabulary};
use crate::text::PositionedToken;

pub use level::{assign_level, baseline_level, RelevanceLevel};

/// Captions with at least this many organism-name mentions are dampened.
pub const CAPTION_DAMPENING_MIN: u32 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("weight {name} must be a finite number >= 0, got {value}")]
    InvalidWeight { name: String, value: f64 },
    #[error("level thresholds must satisfy high > medium > 0 (high {high}, medium {medium})")]
    InvalidThresholds { high: f64, medium: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoneWeights {
    pub title: f64,
    pub keywords: f64,
    #[serde(rename = "abstract")]
    pub abstract_: f64,
    pub ersatz_abstract: f64,
    pub caption: f64,
    pub body_early: f64,
    pub body_late: f64,
    pub references: f64,
}

impl Default for ZoneWeights {
    fn default() -> Self {
        Self {
            title: 12.0,
            keywords: 12.0,
            abstract_: 10.0,
            ersatz_abstract: 9.0,
            caption: 8.0,
            body_early: 4.0,
            body_late: 2.0,
            references: 0.0,
        }
    }
}

impl ZoneWeights {
    pub fn get(&self, zone: ZoneKind) -> f64 {
        match zone {
            ZoneKind::Title => self.title,
            ZoneKind::Keywords => self.keywords,
            ZoneKind::Abstract => self.abstract_,
            ZoneKind::ErsatzAbstract => self.ersatz_abstract,
            ZoneKind::Caption => self.caption,
            ZoneKind::BodyEarly => self.body_early,
            ZoneKind::BodyLate => self.body_late,
            ZoneKind::References => self.references,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OntologyWeights {
    pub exact2: f64,
    pub exact1: f64,
    pub child: f64,
    pub parent: f64,
}

impl Default for OntologyWeights {
    fn default() -> Self {
        Self {
            exact2: 10.0,
            exact1: 5.0,
            child: 3.0,
            parent: 2.0,
        }
    }
}

impl OntologyWeights {
    pub fn get(&self, m: MatchType) -> f64 {
        match m {
            MatchType::Exact2 => self.exact2,
            MatchType::Exact1 => self.exact1,
            MatchType::Child => self.child,
            MatchType::Parent => self.parent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevelThresholds {
    pub high: f64,
    pub medium: f64,
}

impl Default for LevelThresholds {
    fn default() -> Self {
        Self {
            high: 24.0,
            medium: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelMode {
    #[default]
    ScoreThreshold,
    ZoneRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub zone_weights: ZoneWeights,
    pub caption_dampened_weight: f64,
    pub ontology_weights: OntologyWeights,
    pub context_multiplier: f64,
    pub level_thresholds: LevelThresholds,
    pub level_mode: LevelMode,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            zone_weights: ZoneWeights::default(),
            caption_dampened_weight: 3.0,
            ontology_weights: OntologyWeights::default(),
            context_multiplier: 5.0,
            level_thresholds: LevelThresholds::default(),
            level_mode: LevelMode::ScoreThreshold,
        }
    }
}

impl ScoringConfig {
    pub fn validate(&self) -> Result<(), ScoringError> {
        let z = &self.zone_weights;
        let o = &self.ontology_weights;
        let named = [
            ("zone_weights.title", z.title),
            ("zone_weights.keywords", z.keywords),
            ("zone_weights.abstract", z.abstract_),
            ("zone_weights.ersatz_abstract", z.ersatz_abstract),
            ("zone_weights.caption", z.caption),
            ("zone_weights.body_early", z.body_early),
            ("zone_weights.body_late", z.body_late),
            ("zone_weights.references", z.references),
            ("caption_dampened_weight", self.caption_dampened_weight),
            ("ontology_weights.exact2", o.exact2),
            ("ontology_weights.exact1", o.exact1),
            ("ontology_weights.child", o.child),
            ("ontology_weights.parent", o.parent),
            ("context_multiplier", self.context_multiplier),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(ScoringError::InvalidWeight {
                    name: name.to_string(),
                    value,
                });
            }
        }
        let LevelThresholds { high, medium } = self.level_thresholds;
        if !(high.is_finite() && medium.is_finite() && high > medium && medium > 0.0) {
            return Err(ScoringError::InvalidThresholds { high, medium });
        }
        Ok(())
    }

    pub fn fingerprint_material(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// Query-independent facts about a document that scoring needs: which
/// sentences mix vocabulary from two index kinds, and how many organism
/// names each caption holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextAnnotations {
    pub context_sentences: BTreeSet<u32>,
    pub caption_organism_counts: BTreeMap<u32, u32>,
}

impl ContextAnnotations {
    pub fn compute(tokens: &[PositionedToken], vocabulary: &Vocabulary) -> Self {
        let mut per_sentence: BTreeMap<u32, Vec<&[IndexKind]>> = BTreeMap::new();
        let mut caption_organism_counts = BTreeMap::new();
        let found = vocabulary.find(tokens);
        for m in &found {
            let tok = &tokens[m.start];
            per_sentence.entry(tok.sentence_id).or_default().push(&m.kinds);
            if tok.zone == ZoneKind::Caption && m.kinds.contains(&IndexKind::OrganismName) {
                if let Some(ci) = tok.zone_caption_index {
                    *caption_organism_counts.entry(ci).or_insert(0) += 1;
                }
            }
        }
        let context_sentences = per_sentence
            .into_iter()
            .filter(|(_, matches)| mixes_kinds(matches))
            .map(|(s, _)| s)
            .collect();
        Self {
            context_sentences,
            caption_organism_counts,
        }
    }

    pub fn caption_dampened(&self, caption: u32) -> bool {
        self.caption_organism_counts.get(&caption).copied().unwrap_or(0) >= CAPTION_DAMPENING_MIN
    }
}

/// True when two distinct matches can be assigned two different kinds.
fn mixes_kinds(matches: &[&[IndexKind]]) -> bool {
    for (i, a) in matches.iter().enumerate() {
        for b in &matches[i + 1..] {
            if a.iter().any(|ka| b.iter().any(|kb| ka != kb)) {
                return true;
            }
        }
    }
    false
}

/// One query-term occurrence in a document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Occurrence {
    pub term: String,
    pub token_index: usize,
    pub len: usize,
    pub zone: ZoneKind,
    pub caption_index: Option<u32>,
    pub sentence_id: u32,
    pub match_type: MatchType,
    pub index_kind: Option<IndexKind>,
    pub scored: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceProfile {
    pub doc_id: String,
    /// Scored occurrences per zone; References is never present.
    pub per_zone_counts: BTreeMap<ZoneKind, u32>,
    /// Organism-name mentions per caption, from the full vocabulary.
    pub per_caption_counts: BTreeMap<u32, u32>,
    /// Scored occurrences per match type.
    pub ontology_counts: BTreeMap<MatchType, u32>,
    pub context_sentences: BTreeSet<u32>,
    pub occurrences: Vec<Occurrence>,
}

/// Location of a token, as stored on a token or a posting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenLocation {
    pub zone: ZoneKind,
    pub caption_index: Option<u32>,
    pub sentence_id: u32,
}

impl From<&PositionedToken> for TokenLocation {
    fn from(t: &PositionedToken) -> Self {
        Self {
            zone: t.zone,
            caption_index: t.zone_caption_index,
            sentence_id: t.sentence_id,
        }
    }
}

impl OccurrenceProfile {
    /// Assembles a profile from resolved matches. `locate` maps a token index
    /// to its location; this is how the index rebuilds profiles from postings.
    pub fn from_matches<'q>(
        doc_id: &str,
        matches: impl IntoIterator<Item = (PhraseMatch, &'q str, MatchType)>,
        eq: &ExpandedQuery,
        annotations: &ContextAnnotations,
        locate: impl Fn(usize) -> TokenLocation,
    ) -> Self {
        let mut p = OccurrenceProfile {
            doc_id: doc_id.to_string(),
            per_caption_counts: annotations.caption_organism_counts.clone(),
            context_sentences: annotations.context_sentences.clone(),
            ..Default::default()
        };
        for (m, term, match_type) in matches {
            let loc = locate(m.start);
            let scored = loc.zone != ZoneKind::References;
            if scored {
                *p.per_zone_counts.entry(loc.zone).or_insert(0) += 1;
                *p.ontology_counts.entry(match_type).or_insert(0) += 1;
            }
            p.occurrences.push(Occurrence {
                term: term.to_string(),
                token_index: m.start,
                len: m.len,
                zone: loc.zone,
                caption_index: loc.caption_index,
                sentence_id: loc.sentence_id,
                match_type,
                index_kind: eq.index_kind_of.get(term).copied(),
                scored,
            });
        }
        p
    }

    pub fn scored(&self) -> impl Iterator<Item = &Occurrence> {
        self.occurrences.iter().filter(|o| o.scored)
    }

    pub fn scored_count(&self) -> u32 {
        self.per_zone_counts.values().sum()
    }
}

/// Finds and records every query-term occurrence in `doc`.
pub fn collect_occurrences(doc: &ZonedDocument, eq: &ExpandedQuery) -> OccurrenceProfile {
    let annotations = ContextAnnotations::compute(&doc.tokens, eq.vocabulary());
    collect_with_annotations(doc, eq, &annotations)
}

/// As [`collect_occurrences`] with precomputed annotations.
pub fn collect_with_annotations(
    doc: &ZonedDocument,
    eq: &ExpandedQuery,
    annotations: &ContextAnnotations,
) -> OccurrenceProfile {
    OccurrenceProfile::from_matches(&doc.id, eq.find(&doc.tokens), eq, annotations, |i| {
        TokenLocation::from(&doc.tokens[i])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub doc_id: String,
    pub zone_component: f64,
    pub ontology_component: f64,
    /// Number of occurrences that received the context multiplier.
    pub context_boost_applied_to: u32,
    pub total: f64,
    pub level: RelevanceLevel,
    /// Zone component split by zone.
    pub per_zone: BTreeMap<ZoneKind, f64>,
    /// Ontology component split by match type.
    pub per_match_type: BTreeMap<MatchType, f64>,
    pub occurrence_count: u32,
}

pub fn score_document(profile: &OccurrenceProfile, cfg: &ScoringConfig) -> ScoreBreakdown {
    let mut zone_component = 0.0;
    let mut ontology_component = 0.0;
    let mut boosted = 0;
    let mut per_zone: BTreeMap<ZoneKind, f64> = BTreeMap::new();
    let mut per_match_type: BTreeMap<MatchType, f64> = BTreeMap::new();
    for occ in profile.scored() {
        let factor = if profile.context_sentences.contains(&occ.sentence_id) {
            boosted += 1;
            cfg.context_multiplier
        } else {
            1.0
        };
        let dampened = occ.zone == ZoneKind::Caption
            && occ
                .caption_index
                .is_some_and(|c| profile.per_caption_counts.get(&c).copied().unwrap_or(0) >= CAPTION_DAMPENING_MIN);
        let zw = if dampened {
            cfg.caption_dampened_weight
        } else {
            cfg.zone_weights.get(occ.zone)
        };
        let z = zw * factor;
        let o = cfg.ontology_weights.get(occ.match_type) * factor;
        zone_component += z;
        ontology_component += o;
        *per_zone.entry(occ.zone).or_insert(0.0) += z;
        *per_match_type.entry(occ.match_type).or_insert(0.0) += o;
    }
    let total = zone_component + ontology_component;
    ScoreBreakdown {
        doc_id: profile.doc_id.clone(),
        zone_component,
        ontology_component,
        context_boost_applied_to: boosted,
        total,
        level: assign_level(total, cfg, profile),
        per_zone,
        per_match_type,
        occurrence_count: profile.scored_count(),
    }
}

/// Collect and score in one step.
pub fn score_direct(doc: &ZonedDocument, eq: &ExpandedQuery, cfg: &ScoringConfig) -> ScoreBreakdown {
    score_document(&collect_occurrences(doc, eq), cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineScore {
    pub count: u32,
    pub level: RelevanceLevel,
}

/// Location-blind count of query-term occurrences outside References, using
/// the same expansion and matching as the main scorer.
pub fn baseline_score(doc: &ZonedDocument, eq: &ExpandedQuery) -> BaselineScore {
    let count = eq
        .find(&doc.tokens)
        .iter()
        .filter(|(m, _, _)| doc.tokens[m.start].zone != ZoneKind::References)
        .count() as u32;
    BaselineScore {
        count,
        level: baseline_level(count),
    }
}
