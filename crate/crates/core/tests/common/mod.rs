//! Shared helpers for integration tests: a brute-force reference scorer and
//! random document generators.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use fuzzyrank_core::ingest::{build_tokens, Zone, ZoneKind, ZonedDocument};
use fuzzyrank_core::ontology::{ExpandedQuery, IndexKind, MatchType, TaxonomySet};
use fuzzyrank_core::scoring::RelevanceLevel;
use fuzzyrank_core::text::{PositionedToken, TextPipeline};
use rand::seq::SliceRandom;
use rand::Rng;

/// Scores a document by enumerating every token window. Shares nothing with
/// the library scorer except the tokens, the expansion map and the raw
/// taxonomy nodes; weights are written out literally.
pub struct Oracle {
    /// Every taxonomy name (space-joined stems) with its kinds.
    vocabulary: BTreeMap<String, BTreeSet<IndexKind>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleScore {
    pub zone: f64,
    pub ontology: f64,
    pub total: f64,
    pub level: RelevanceLevel,
}

fn zone_weight(z: ZoneKind) -> f64 {
    match z {
        ZoneKind::Title => 12.0,
        ZoneKind::Keywords => 12.0,
        ZoneKind::Abstract => 10.0,
        ZoneKind::ErsatzAbstract => 9.0,
        ZoneKind::Caption => 8.0,
        ZoneKind::BodyEarly => 4.0,
        ZoneKind::BodyLate => 2.0,
        ZoneKind::References => 0.0,
    }
}

fn match_weight(m: MatchType) -> f64 {
    match m {
        MatchType::Exact2 => 10.0,
        MatchType::Exact1 => 5.0,
        MatchType::Child => 3.0,
        MatchType::Parent => 2.0,
    }
}

/// Windows `[start, start + len)` whose stems spell a key and that lie in
/// one sentence.
fn windows<'k>(tokens: &[PositionedToken], keys: impl Iterator<Item = &'k String>) -> Vec<(usize, usize, &'k str)> {
    let mut out = Vec::new();
    for key in keys {
        let parts: Vec<&str> = key.split(' ').collect();
        let len = parts.len();
        for start in 0..tokens.len() {
            if start + len > tokens.len() {
                break;
            }
            let w = &tokens[start..start + len];
            if w.iter().all(|t| t.sentence_id == w[0].sentence_id) && w.iter().zip(&parts).all(|(t, p)| t.stem == *p) {
                out.push((start, len, key.as_str()));
            }
        }
    }
    out
}

/// Drops every window lying inside a strictly longer one.
fn longest_only(all: Vec<(usize, usize, &str)>) -> Vec<(usize, usize, &str)> {
    all.iter()
        .filter(|(s, l, _)| !all.iter().any(|(s2, l2, _)| l2 > l && s2 <= s && s + l <= s2 + l2))
        .copied()
        .collect()
}

impl Oracle {
    pub fn new(set: &TaxonomySet) -> Self {
        let mut vocabulary: BTreeMap<String, BTreeSet<IndexKind>> = BTreeMap::new();
        for t in set.taxonomies() {
            for n in t.nodes.values() {
                vocabulary.entry(n.name.clone()).or_default().insert(t.index_kind);
            }
        }
        Self { vocabulary }
    }

    pub fn score(&self, doc: &ZonedDocument, eq: &ExpandedQuery) -> OracleScore {
        let tokens = &doc.tokens;

        let vocab = longest_only(windows(tokens, self.vocabulary.keys()));
        let mut kinds_by_sentence: BTreeMap<u32, Vec<&BTreeSet<IndexKind>>> = BTreeMap::new();
        let mut organisms_by_caption: BTreeMap<u32, u32> = BTreeMap::new();
        for (s, _, key) in &vocab {
            let kinds = &self.vocabulary[*key];
            kinds_by_sentence.entry(tokens[*s].sentence_id).or_default().push(kinds);
            if tokens[*s].zone == ZoneKind::Caption && kinds.contains(&IndexKind::OrganismName) {
                *organisms_by_caption
                    .entry(tokens[*s].zone_caption_index.unwrap())
                    .or_default() += 1;
            }
        }
        let context: BTreeSet<u32> = kinds_by_sentence
            .iter()
            .filter(|(_, ks)| {
                (0..ks.len()).any(|i| (i + 1..ks.len()).any(|j| ks[i].iter().any(|a| ks[j].iter().any(|b| a != b))))
            })
            .map(|(s, _)| *s)
            .collect();

        let mut zone = 0.0;
        let mut ontology = 0.0;
        for (s, _, key) in longest_only(windows(tokens, eq.expansion.keys())) {
            let t = &tokens[s];
            if t.zone == ZoneKind::References {
                continue;
            }
            let factor = if context.contains(&t.sentence_id) { 5.0 } else { 1.0 };
            let dampened = t.zone == ZoneKind::Caption
                && organisms_by_caption
                    .get(&t.zone_caption_index.unwrap())
                    .copied()
                    .unwrap_or(0)
                    >= 2;
            let zw = if dampened { 3.0 } else { zone_weight(t.zone) };
            zone += zw * factor;
            ontology += match_weight(eq.expansion[key]) * factor;
        }
        let total = zone + ontology;
        let level = if total <= 0.0 {
            RelevanceLevel::NotRelevant
        } else if total >= 24.0 {
            RelevanceLevel::High
        } else if total >= 10.0 {
            RelevanceLevel::Medium
        } else {
            RelevanceLevel::Low
        };
        OracleScore {
            zone,
            ontology,
            total,
            level,
        }
    }
}

/// Phrases the generators draw from: taxonomy names of all three kinds,
/// overlapping multi-word names, and plain words.
pub const TAXON_PHRASES: &[&str] = &[
    "Allosaurus",
    "Allosaurus fragilis",
    "fragilis",
    "Allosauridae",
    "Theropoda",
    "Dinosauria",
    "Tyrannosaurus",
    "Tyrannosaurus rex",
    "Ginkgo",
    "Ginkgo biloba",
    "Jurassic",
    "Late Jurassic",
    "Kimmeridgian",
    "Utah",
    "Brazil",
    "Rio Grande do Sul",
];

pub const PLAIN_WORDS: &[&str] = &[
    "bone", "skull", "teeth", "large", "found", "near", "the", "of", "and", "in", "with", "layer", "quarry", "femur",
];

pub const QUERIES: &[&str] = &[
    "allosaurus",
    "Allosaurus fragilis",
    "theropoda",
    "allosauridae",
    "dinosauria",
    "jurassic",
    "late jurassic",
    "ginkgo",
    "utah",
    "brazil",
    "utah jurassic",
    "tyrannosaurus rex",
    "qwerty",
];

pub fn random_sentence(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(1..=6);
    let words: Vec<&str> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.4) {
                *TAXON_PHRASES.choose(rng).unwrap()
            } else {
                *PLAIN_WORDS.choose(rng).unwrap()
            }
        })
        .collect();
    format!("{}.", words.join(" "))
}

pub fn random_zones(rng: &mut impl Rng) -> Vec<(ZoneKind, String)> {
    let n = rng.gen_range(1..=5);
    (0..n)
        .map(|_| {
            let kind = *ZoneKind::ALL.choose(rng).unwrap();
            let sentences: Vec<String> = (0..rng.gen_range(1..=3)).map(|_| random_sentence(rng)).collect();
            (kind, sentences.join(" "))
        })
        .collect()
}

/// Builds a document from explicit zones, numbering captions in order.
pub fn make_doc(id: &str, zones: &[(ZoneKind, String)], pipeline: &TextPipeline) -> ZonedDocument {
    let mut caption = 0;
    let zones: Vec<Zone> = zones
        .iter()
        .map(|(k, t)| {
            let mut z = Zone::new(*k, t.clone());
            if *k == ZoneKind::Caption {
                z.caption_index = Some(caption);
                caption += 1;
            }
            z
        })
        .collect();
    ZonedDocument {
        id: id.into(),
        title: String::new(),
        date: None,
        abstract_text: String::new(),
        tokens: build_tokens(&zones, pipeline),
        zones,
    }
}

/// A random document of at most `max_tokens` tokens.
pub fn random_doc(rng: &mut impl Rng, pipeline: &TextPipeline, max_tokens: usize) -> ZonedDocument {
    loop {
        let doc = make_doc("r", &random_zones(rng), pipeline);
        if doc.tokens.len() <= max_tokens {
            return doc;
        }
    }
}
