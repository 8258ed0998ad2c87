//! Hierarchical vocabularies (organism names, geologic time, regions) and
//! query expansion over them.
//!
//! A query that names a taxonomy node is expanded to every descendant
//! ([`MatchType::Child`]) and every ancestor ([`MatchType::Parent`]). All
//! names pass through the same [`TextPipeline`] as document text, so matching
//! is symmetric. Inside a document a match nested in a longer matched term is
//! not counted on its own: "Allosaurus fragilis" is one species mention, not
//! also a genus mention.

mod matcher;
mod taxonomy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{MatchUnit, PositionedToken, TextPipeline};

pub use matcher::{suppress_nested, PhraseMatch, PhraseMatcher};
pub use taxonomy::{TaxNode, Taxonomy};

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("cycle in parent links through node {node:?}")]
    CycleDetected { node: String },
    #[error("duplicate normalized name {name:?} (nodes {first:?} and {second:?})")]
    DuplicateName {
        name: String,
        first: String,
        second: String,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("node {node:?} names unknown parent {parent:?}")]
    UnknownParent { node: String, parent: String },
    #[error("node {node:?} ({rank}) is not below its parent {parent:?} ({parent_rank})")]
    RankOrder {
        node: String,
        rank: String,
        parent: String,
        parent_rank: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexKind {
    OrganismName,
    GeologicTime,
    Region,
}

const ORGANISM_RANKS: &[&str] = &[
    "domain",
    "kingdom",
    "phylum",
    "subphylum",
    "class",
    "subclass",
    "superorder",
    "order",
    "suborder",
    "infraorder",
    "superfamily",
    "family",
    "subfamily",
    "tribe",
    "genus",
    "species",
    "subspecies",
];
const GEOLOGIC_RANKS: &[&str] = &["eon", "era", "subera", "period", "epoch", "age"];
const REGION_RANKS: &[&str] = &["continent", "country", "region", "city"];

impl IndexKind {
    pub const ALL: [IndexKind; 3] = [IndexKind::OrganismName, IndexKind::GeologicTime, IndexKind::Region];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexKind::OrganismName => "organism_name",
            IndexKind::GeologicTime => "geologic_time",
            IndexKind::Region => "region",
        }
    }

    /// Ranks from most general to most specific.
    pub fn ranks(self) -> &'static [&'static str] {
        match self {
            IndexKind::OrganismName => ORGANISM_RANKS,
            IndexKind::GeologicTime => GEOLOGIC_RANKS,
            IndexKind::Region => REGION_RANKS,
        }
    }

    pub fn rank_position(self, rank: &str) -> Option<usize> {
        let rank = rank.to_ascii_lowercase();
        self.ranks().iter().position(|r| *r == rank)
    }

    /// File name used when loading a taxonomy directory.
    pub fn file_name(self) -> &'static str {
        match self {
            IndexKind::OrganismName => "organisms.csv",
            IndexKind::GeologicTime => "geologic_time.csv",
            IndexKind::Region => "regions.csv",
        }
    }
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a document term relates to the query. Variants are ordered by
/// precedence: when one term qualifies several ways the first wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchType {
    Exact2,
    Exact1,
    Child,
    Parent,
}

impl MatchType {
    pub const ALL: [MatchType; 4] = [
        MatchType::Exact2,
        MatchType::Exact1,
        MatchType::Child,
        MatchType::Parent,
    ];

    /// Literal match type for a phrase of `words` normalized words.
    pub fn exact_for(words: usize) -> Self {
        if words >= 2 {
            MatchType::Exact2
        } else {
            MatchType::Exact1
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MatchType::Exact2 => "exact2",
            MatchType::Exact1 => "exact1",
            MatchType::Child => "child",
            MatchType::Parent => "parent",
        }
    }
}

impl fmt::Display for MatchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OntologyConfig {
    /// Directory holding organisms.csv, geologic_time.csv and regions.csv.
    /// The bundled taxonomies are used when unset.
    pub taxonomy_dir: Option<PathBuf>,
    /// Maximum hops for Child/Parent expansion; unlimited when unset.
    pub max_depth: Option<u32>,
}

/// Every taxonomy name with the index kinds it belongs to.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    matcher: PhraseMatcher,
    kinds: Vec<Vec<IndexKind>>,
}

/// A vocabulary term found in a document, after longest-match resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabMatch {
    pub start: usize,
    pub len: usize,
    pub term: String,
    pub kinds: Vec<IndexKind>,
}

impl Vocabulary {
    fn new(taxonomies: &[Taxonomy]) -> Self {
        let mut by_term: BTreeMap<&str, BTreeSet<IndexKind>> = BTreeMap::new();
        for t in taxonomies {
            for n in t.nodes.values() {
                by_term.entry(&n.name).or_default().insert(t.index_kind);
            }
        }
        let matcher = PhraseMatcher::new(by_term.keys().map(|s| s.to_string()));
        let kinds = by_term.values().map(|k| k.iter().copied().collect()).collect();
        Self { matcher, kinds }
    }

    pub fn kinds_of(&self, term: &str) -> &[IndexKind] {
        self.matcher
            .id_of(term)
            .map(|i| self.kinds[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn find(&self, tokens: &[PositionedToken]) -> Vec<VocabMatch> {
        self.matcher
            .find(tokens)
            .into_iter()
            .map(|m| VocabMatch {
                start: m.start,
                len: m.len,
                term: self.matcher.term(m.term).to_string(),
                kinds: self.kinds[m.term].clone(),
            })
            .collect()
    }
}

/// The three taxonomies used together, plus their merged vocabulary.
#[derive(Debug, Clone)]
pub struct TaxonomySet {
    taxonomies: Vec<Taxonomy>,
    vocabulary: Arc<Vocabulary>,
}

impl TaxonomySet {
    pub fn new(taxonomies: Vec<Taxonomy>) -> Self {
        let vocabulary = Arc::new(Vocabulary::new(&taxonomies));
        Self { taxonomies, vocabulary }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn bundled(pipeline: &TextPipeline) -> Self {
        let taxonomies = crate::fixtures::taxonomy_sources()
            .into_iter()
            .map(|(kind, src)| Taxonomy::parse(src, kind, pipeline).expect("bundled taxonomy is valid"))
            .collect();
        Self::new(taxonomies)
    }

    /// Loads `organisms.csv`, `geologic_time.csv` and `regions.csv` from `dir`.
    pub fn load_dir(dir: &Path, pipeline: &TextPipeline) -> Result<Self, OntologyError> {
        let taxonomies = IndexKind::ALL
            .into_iter()
            .map(|kind| load_taxonomy(&dir.join(kind.file_name()), kind, pipeline))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(taxonomies))
    }

    pub fn from_config(config: &OntologyConfig, pipeline: &TextPipeline) -> Result<Self, OntologyError> {
        match &config.taxonomy_dir {
            Some(dir) => Self::load_dir(dir, pipeline),
            None => Ok(Self::bundled(pipeline)),
        }
    }

    pub fn taxonomies(&self) -> &[Taxonomy] {
        &self.taxonomies
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn lookup(&self, term: &str) -> Vec<(&TaxNode, &Taxonomy)> {
        self.taxonomies
            .iter()
            .filter_map(|t| t.by_name(term).map(|n| (n, t)))
            .collect()
    }

    pub fn fingerprint_material(&self) -> String {
        self.taxonomies.iter().map(Taxonomy::fingerprint_material).collect()
    }
}

pub fn load_taxonomy(path: &Path, kind: IndexKind, pipeline: &TextPipeline) -> Result<Taxonomy, OntologyError> {
    Taxonomy::load(path, kind, pipeline)
}

/// All nodes whose normalized name equals `term`.
pub fn lookup<'a>(term: &str, taxonomies: &'a TaxonomySet) -> Vec<(&'a TaxNode, &'a Taxonomy)> {
    taxonomies.lookup(term)
}

/// Reference to a node in a [`TaxonomySet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRef {
    pub index_kind: IndexKind,
    pub id: String,
    pub name: String,
    pub rank: String,
}

/// A query's literal terms and their taxonomy expansion.
#[derive(Debug, Clone)]
pub struct ExpandedQuery {
    pub query: String,
    /// Normalized literal phrases: the whole query, plus any sub-runs that
    /// name a taxonomy node when the whole query does not.
    pub literal_units: Vec<Vec<String>>,
    pub query_node: Option<NodeRef>,
    /// Every matchable term, literal ones included.
    pub expansion: BTreeMap<String, MatchType>,
    pub index_kind_of: BTreeMap<String, IndexKind>,
    vocabulary: Arc<Vocabulary>,
    matcher: PhraseMatcher,
}

impl ExpandedQuery {
    pub fn is_empty(&self) -> bool {
        self.expansion.is_empty()
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn match_type(&self, term: &str) -> Option<MatchType> {
        self.expansion.get(term).copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, MatchType)> {
        self.expansion.iter().map(|(t, m)| (t.as_str(), *m))
    }

    /// Query term occurrences in `tokens` after longest-match resolution.
    pub fn find(&self, tokens: &[PositionedToken]) -> Vec<(PhraseMatch, &str, MatchType)> {
        self.resolve(self.matcher.find_all(tokens))
    }

    /// Applies longest-match resolution to raw occurrences given as
    /// `(start, len, term)` and attaches match types. Unknown terms are dropped.
    pub fn resolve_raw<'t>(
        &self,
        raw: impl IntoIterator<Item = (usize, usize, &'t str)>,
    ) -> Vec<(PhraseMatch, &str, MatchType)> {
        let matches = raw
            .into_iter()
            .filter_map(|(start, len, t)| self.matcher.id_of(t).map(|term| PhraseMatch { start, len, term }))
            .collect();
        self.resolve(matches)
    }

    fn resolve(&self, raw: Vec<PhraseMatch>) -> Vec<(PhraseMatch, &str, MatchType)> {
        suppress_nested(raw)
            .into_iter()
            .map(|m| {
                let term = self.matcher.term(m.term);
                (m, term, self.expansion[term])
            })
            .collect()
    }
}

fn insert_best(map: &mut BTreeMap<String, MatchType>, term: String, mt: MatchType) {
    map.entry(term)
        .and_modify(|cur| {
            if mt < *cur {
                *cur = mt
            }
        })
        .or_insert(mt);
}

/// Expands a free-text query against the taxonomies.
///
/// The whole normalized query is a literal term (Exact1 or Exact2 by its
/// length). If it names a node, that node's descendants and ancestors join as
/// Child and Parent terms. Otherwise multi-word queries are scanned left to
/// right for the longest runs that name nodes, and each such run is expanded
/// the same way.
pub fn expand_query(
    query: &str,
    taxonomies: &TaxonomySet,
    pipeline: &TextPipeline,
    config: &OntologyConfig,
) -> ExpandedQuery {
    let stems = pipeline.normalize_phrase(query);
    let mut literal_units = Vec::new();
    let mut expansion = BTreeMap::new();
    let mut index_kind_of = BTreeMap::new();
    let mut query_node = None;

    let mut expand = |phrase: &[String], expansion: &mut BTreeMap<String, MatchType>| -> bool {
        let term = phrase.join(" ");
        let hits = taxonomies.lookup(&term);
        for (node, tax) in &hits {
            index_kind_of.entry(term.clone()).or_insert(tax.index_kind);
            if query_node.is_none() {
                query_node = Some(NodeRef {
                    index_kind: tax.index_kind,
                    id: node.id.clone(),
                    name: node.name.clone(),
                    rank: node.rank.clone(),
                });
            }
            for d in tax.descendants(&node.id, config.max_depth) {
                insert_best(expansion, d.name.clone(), MatchType::Child);
                index_kind_of.entry(d.name.clone()).or_insert(tax.index_kind);
            }
            for a in tax.ancestors(&node.id, config.max_depth) {
                insert_best(expansion, a.name.clone(), MatchType::Parent);
                index_kind_of.entry(a.name.clone()).or_insert(tax.index_kind);
            }
        }
        !hits.is_empty()
    };

    if !stems.is_empty() {
        insert_best(&mut expansion, stems.join(" "), MatchType::exact_for(stems.len()));
        literal_units.push(stems.clone());
        if !expand(&stems, &mut expansion) && stems.len() > 1 {
            let mut i = 0;
            while i < stems.len() {
                let mut advanced = false;
                for len in (1..stems.len() - i + 1).rev() {
                    if len == stems.len() {
                        continue;
                    }
                    let run = &stems[i..i + len];
                    if expand(run, &mut expansion) {
                        insert_best(&mut expansion, run.join(" "), MatchType::exact_for(len));
                        literal_units.push(run.to_vec());
                        i += len;
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    i += 1;
                }
            }
        }
    }

    let matcher = PhraseMatcher::new(expansion.keys().cloned());
    ExpandedQuery {
        query: query.to_string(),
        literal_units,
        query_node,
        expansion,
        index_kind_of,
        vocabulary: Arc::clone(taxonomies.vocabulary()),
        matcher,
    }
}

/// Match type of the term spelled exactly by `unit`, if any.
pub fn classify_match(unit: &MatchUnit, eq: &ExpandedQuery) -> Option<MatchType> {
    eq.match_type(&unit.key())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::make_match_units;

    fn setup() -> (TaxonomySet, TextPipeline) {
        let p = TextPipeline::default();
        (TaxonomySet::bundled(&p), p)
    }

    fn expand(q: &str) -> ExpandedQuery {
        let (t, p) = setup();
        expand_query(q, &t, &p, &OntologyConfig::default())
    }

    #[test]
    fn lookup_genus_and_species() {
        let (t, p) = setup();
        let genus = t.lookup(&p.normalize_phrase("allosaurus").join(" "));
        assert_eq!(genus.len(), 1);
        assert_eq!(genus[0].0.rank, "Genus");
        let species = lookup(&p.normalize_phrase("Allosaurus fragilis").join(" "), &t);
        assert_eq!(species[0].0.rank, "Species");
        assert!(t.lookup("zzz").is_empty());
    }

    #[test]
    fn allosaurus_expansion() {
        let eq = expand("allosaurus");
        let (_, p) = setup();
        let n = |s: &str| p.normalize_phrase(s).join(" ");
        assert_eq!(eq.match_type(&n("allosaurus")), Some(MatchType::Exact1));
        assert_eq!(eq.match_type(&n("Allosaurus fragilis")), Some(MatchType::Child));
        assert_eq!(eq.match_type(&n("Allosaurus tendagurensis")), Some(MatchType::Child));
        for anc in [
            "Allosauridae",
            "Theropoda",
            "Saurischia",
            "Dinosauria",
            "Reptilia",
            "Chordata",
            "Animalia",
        ] {
            assert_eq!(eq.match_type(&n(anc)), Some(MatchType::Parent), "{anc}");
        }
        assert_eq!(eq.expansion.len(), 10);
        assert_eq!(eq.query_node.as_ref().unwrap().rank, "Genus");
        assert_eq!(eq.index_kind_of[&n("allosauridae")], IndexKind::OrganismName);
        // Siblings are not related.
        assert_eq!(eq.match_type(&n("Tyrannosaurus")), None);
    }

    #[test]
    fn depth_limit() {
        let (t, p) = setup();
        let cfg = OntologyConfig {
            max_depth: Some(1),
            ..Default::default()
        };
        let eq = expand_query("allosauridae", &t, &p, &cfg);
        assert_eq!(
            eq.match_type(&p.normalize_phrase("allosaurus").join(" ")),
            Some(MatchType::Child)
        );
        assert_eq!(
            eq.match_type(&p.normalize_phrase("allosaurus fragilis").join(" ")),
            None
        );
        assert_eq!(eq.expansion.len(), 3);
    }

    #[test]
    fn two_word_node_is_exact2() {
        let eq = expand("Upper Paleozoic");
        let lit = eq.literal_units[0].join(" ");
        assert_eq!(eq.match_type(&lit), Some(MatchType::Exact2));
        assert_eq!(eq.query_node.as_ref().unwrap().index_kind, IndexKind::GeologicTime);
        assert!(eq.expansion.values().any(|m| *m == MatchType::Child));
    }

    #[test]
    fn unknown_query_is_literal_only() {
        let eq = expand("qwerty");
        assert_eq!(eq.expansion.len(), 1);
        assert_eq!(
            eq.match_type("qwerti").or(eq.match_type("qwerty")),
            Some(MatchType::Exact1)
        );
        assert!(eq.query_node.is_none());
        assert!(expand("the").is_empty());
    }

    #[test]
    fn multiword_query_expands_node_runs() {
        let (_, p) = setup();
        let eq = expand("allosaurus jurassic");
        let n = |s: &str| p.normalize_phrase(s).join(" ");
        assert_eq!(eq.match_type(&n("allosaurus jurassic")), Some(MatchType::Exact2));
        assert_eq!(eq.match_type(&n("allosaurus")), Some(MatchType::Exact1));
        assert_eq!(eq.match_type(&n("jurassic")), Some(MatchType::Exact1));
        assert_eq!(eq.match_type(&n("late jurassic")), Some(MatchType::Child));
        assert_eq!(eq.literal_units.len(), 3);
    }

    #[test]
    fn classify_units() {
        let (_, p) = setup();
        let eq = expand("allosaurus");
        let doc = crate::ingest::build_tokens(
            &[crate::ingest::Zone::new(
                crate::ingest::ZoneKind::BodyEarly,
                "Allosaurus fragilis bones",
            )],
            &p,
        );
        let units = make_match_units(&doc);
        let classes: Vec<_> = units.iter().map(|u| classify_match(u, &eq)).collect();
        // units: allosaurus, allosaurus fragilis, fragilis, fragilis bone, bone
        assert_eq!(classes[0], Some(MatchType::Exact1));
        assert_eq!(classes[1], Some(MatchType::Child));
        assert_eq!(classes[2], None);
        // In running text the nested genus mention is suppressed.
        let found = eq.find(&doc);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].2, MatchType::Child);
    }

    #[test]
    fn vocabulary_kinds() {
        let (t, p) = setup();
        let v = t.vocabulary();
        let toks = crate::ingest::build_tokens(
            &[crate::ingest::Zone::new(
                crate::ingest::ZoneKind::BodyEarly,
                "Allosaurus from the Late Jurassic of Utah.",
            )],
            &p,
        );
        let found = v.find(&toks);
        let kinds: Vec<_> = found.iter().map(|m| m.kinds[0]).collect();
        assert_eq!(
            kinds,
            [IndexKind::OrganismName, IndexKind::GeologicTime, IndexKind::Region]
        );
        assert_eq!(v.kinds_of(&p.normalize_phrase("utah").join(" ")), [IndexKind::Region]);
    }

    #[test]
    fn weights_order_follows_precedence() {
        let mut m = BTreeMap::new();
        insert_best(&mut m, "x".into(), MatchType::Parent);
        insert_best(&mut m, "x".into(), MatchType::Exact1);
        insert_best(&mut m, "x".into(), MatchType::Child);
        assert_eq!(m["x"], MatchType::Exact1);
    }
}
