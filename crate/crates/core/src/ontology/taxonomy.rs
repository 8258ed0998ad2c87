use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IndexKind, OntologyError};
use crate::text::TextPipeline;

/// One taxonomy entry. `name` is the normalized (stopword-free, stemmed)
/// form used for matching; `label` keeps the spelling from the source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxNode {
    pub id: String,
    pub name: String,
    pub label: String,
    pub rank: String,
    pub parent: Option<String>,
    pub children: Vec<String>,
}

impl TaxNode {
    pub fn word_count(&self) -> usize {
        self.name.split(' ').count()
    }
}

/// A forest of [`TaxNode`]s of one index kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Taxonomy {
    pub index_kind: IndexKind,
    pub nodes: BTreeMap<String, TaxNode>,
    by_name: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct Row {
    id: String,
    name: String,
    rank: String,
    #[serde(default)]
    parent_id: Option<String>,
}

impl Taxonomy {
    pub fn empty(index_kind: IndexKind) -> Self {
        Self {
            index_kind,
            nodes: BTreeMap::new(),
            by_name: BTreeMap::new(),
        }
    }

    /// Parses `id,name,rank,parent_id` CSV. Parents may appear after their
    /// children. Ranks must belong to the kind's rank scale and strictly
    /// descend along parent links.
    pub fn parse(source: &str, index_kind: IndexKind, pipeline: &TextPipeline) -> Result<Self, OntologyError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(source.as_bytes());
        let mut tax = Self::empty(index_kind);
        for (i, record) in reader.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = record.map_err(|e| OntologyError::Parse {
                line,
                message: e.to_string(),
            })?;
            let parse_err = |message: String| OntologyError::Parse { line, message };
            if row.id.is_empty() {
                return Err(parse_err("empty id".into()));
            }
            if index_kind.rank_position(&row.rank).is_none() {
                return Err(parse_err(format!("unknown {index_kind} rank {:?}", row.rank)));
            }
            let name = pipeline.normalize_phrase(&row.name).join(" ");
            if name.is_empty() {
                return Err(parse_err(format!("name {:?} normalizes to nothing", row.name)));
            }
            if tax.nodes.contains_key(&row.id) {
                return Err(parse_err(format!("duplicate id {:?}", row.id)));
            }
            if let Some(first) = tax.by_name.get(&name) {
                return Err(OntologyError::DuplicateName {
                    name,
                    first: first.clone(),
                    second: row.id,
                });
            }
            tax.by_name.insert(name.clone(), row.id.clone());
            tax.nodes.insert(
                row.id.clone(),
                TaxNode {
                    id: row.id,
                    name,
                    label: row.name,
                    rank: row.rank,
                    parent: row.parent_id.filter(|p| !p.is_empty()),
                    children: Vec::new(),
                },
            );
        }
        tax.link()?;
        Ok(tax)
    }

    fn link(&mut self) -> Result<(), OntologyError> {
        for node in self.nodes.values() {
            if let Some(p) = &node.parent {
                if !self.nodes.contains_key(p) {
                    return Err(OntologyError::UnknownParent {
                        node: node.id.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        for start in self.nodes.keys() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(start.as_str());
            while let Some(id) = cur {
                if !seen.insert(id) {
                    return Err(OntologyError::CycleDetected { node: start.clone() });
                }
                cur = self.nodes[id].parent.as_deref();
            }
        }
        let kind = self.index_kind;
        let mut edges = Vec::new();
        for node in self.nodes.values() {
            if let Some(p) = &node.parent {
                let parent = &self.nodes[p];
                if kind.rank_position(&node.rank) <= kind.rank_position(&parent.rank) {
                    return Err(OntologyError::RankOrder {
                        node: node.id.clone(),
                        rank: node.rank.clone(),
                        parent: parent.id.clone(),
                        parent_rank: parent.rank.clone(),
                    });
                }
                edges.push((p.clone(), node.id.clone()));
            }
        }
        for (p, c) in edges {
            self.nodes.get_mut(&p).expect("checked above").children.push(c);
        }
        Ok(())
    }

    pub fn load(path: &Path, index_kind: IndexKind, pipeline: &TextPipeline) -> Result<Self, OntologyError> {
        let source = std::fs::read_to_string(path).map_err(|source| OntologyError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&source, index_kind, pipeline)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: &str) -> Option<&TaxNode> {
        self.nodes.get(id)
    }

    pub fn by_name(&self, normalized: &str) -> Option<&TaxNode> {
        self.by_name.get(normalized).map(|id| &self.nodes[id])
    }

    /// Ancestors nearest first, up to `max_depth` hops.
    pub fn ancestors(&self, id: &str, max_depth: Option<u32>) -> Vec<&TaxNode> {
        let mut out = Vec::new();
        let mut cur = self.nodes.get(id).and_then(|n| n.parent.as_deref());
        while let Some(pid) = cur {
            if max_depth.is_some_and(|d| out.len() as u32 >= d) {
                break;
            }
            let node = &self.nodes[pid];
            out.push(node);
            cur = node.parent.as_deref();
        }
        out
    }

    /// Descendants in breadth-first order, up to `max_depth` hops.
    pub fn descendants(&self, id: &str, max_depth: Option<u32>) -> Vec<&TaxNode> {
        let mut out = Vec::new();
        let Some(root) = self.nodes.get(id) else {
            return out;
        };
        let mut frontier: Vec<&TaxNode> = vec![root];
        let mut depth = 0u32;
        while !frontier.is_empty() && max_depth.is_none_or(|d| depth < d) {
            let next: Vec<&TaxNode> = frontier
                .iter()
                .flat_map(|n| n.children.iter().map(|c| &self.nodes[c]))
                .collect();
            out.extend(next.iter().copied());
            frontier = next;
            depth += 1;
        }
        out
    }

    /// Canonical text for config fingerprints.
    pub fn fingerprint_material(&self) -> String {
        let mut s = format!("kind={};", self.index_kind);
        for n in self.nodes.values() {
            s.push_str(&format!(
                "{}|{}|{}|{};",
                n.id,
                n.name,
                n.rank,
                n.parent.as_deref().unwrap_or("")
            ));
        }
        s
    }
}
