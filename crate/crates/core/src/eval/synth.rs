//! A generated 30-article corpus with planted relevance levels.
//!
//! Each article belongs to a category that fixes exactly where the query term
//! appears (title, abstract, a caption, early or late body). Three judges
//! agree with the planted level. The categories are chosen so that zone
//! placement matters: some articles with few mentions in prominent zones are
//! highly relevant, while some with several mentions late in the body are
//! not.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalError, Judgment, JudgmentSet, ANY_QUERY};
use crate::engine::Engine;
use crate::ingest::{Corpus, RawArticle};
use crate::scoring::RelevanceLevel;

pub const PLANTED_QUERY: &str = "allosaurus";
const TERM: &str = "allosaurus";
const JUDGES: [&str; 3] = ["j1", "j2", "j3"];
const BODY_PARAGRAPHS: usize = 24;
/// Paragraphs that stay well inside the first 2000 body words.
const EARLY_PARAGRAPHS: std::ops::Range<usize> = 1..8;
/// Paragraphs that start well past the 2000th body word.
const LATE_PARAGRAPHS: std::ops::Range<usize> = 21..24;

/// Words that appear in no bundled taxonomy.
const FILLER: &[&str] = &[
    "sample",
    "measurement",
    "sediment",
    "layer",
    "deposit",
    "analysis",
    "method",
    "result",
    "structure",
    "surface",
    "margin",
    "texture",
    "density",
    "pattern",
    "record",
    "section",
    "interval",
    "outcrop",
    "mineral",
    "grain",
    "matrix",
    "observation",
    "feature",
    "variation",
    "estimate",
    "proportion",
    "comparison",
    "profile",
    "thickness",
    "composition",
    "preservation",
    "orientation",
    "distribution",
    "material",
    "collection",
    "observed",
    "measured",
    "recorded",
    "described",
    "compared",
    "indicates",
    "suggests",
    "shows",
    "fine",
    "coarse",
    "thin",
    "thick",
    "dense",
    "broad",
    "narrow",
    "regular",
    "irregular",
    "distinct",
    "similar",
    "consistent",
    "variable",
    "moderate",
    "minor",
    "major",
    "lateral",
    "vertical",
    "internal",
    "external",
    "partial",
    "complete",
    "bone",
    "tooth",
    "fragment",
    "element",
    "shape",
    "length",
    "width",
    "angle",
    "ridge",
    "groove",
    "cavity",
    "canal",
    "process",
    "edge",
    "series",
    "group",
    "unit",
    "field",
    "site",
    "team",
    "study",
    "model",
    "data",
    "value",
    "range",
    "trend",
    "signal",
    "sequence",
    "phase",
    "stage",
    "event",
    "factor",
    "condition",
    "specimen",
    "isotope",
    "carbon",
    "oxygen",
    "ratio",
    "weight",
    "volume",
    "scale",
    "image",
    "plate",
    "slide",
    "cast",
    "mould",
    "imprint",
    "trace",
    "burrow",
    "track",
    "bed",
    "lens",
    "nodule",
    "crust",
    "vein",
    "fracture",
    "joint",
    "fold",
    "fault",
    "contact",
    "erosion",
    "transport",
    "burial",
    "exposure",
    "weathering",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlantedCategory {
    /// Title and abstract, once each.
    A,
    /// Abstract once, early body four times.
    B,
    /// One caption and early body once.
    C,
    /// Early body twice, late body once.
    D,
    /// Early body once, late body twice.
    E,
    /// Late body once.
    F,
    /// Late body three times.
    G,
    /// Only in the references.
    H,
}

/// Where the query term is planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub title: u32,
    pub abstract_: u32,
    pub caption: u32,
    pub body_early: u32,
    pub body_late: u32,
    pub references: u32,
}

impl PlantedCategory {
    pub const ALL: [PlantedCategory; 8] = [
        PlantedCategory::A,
        PlantedCategory::B,
        PlantedCategory::C,
        PlantedCategory::D,
        PlantedCategory::E,
        PlantedCategory::F,
        PlantedCategory::G,
        PlantedCategory::H,
    ];

    /// Articles of this category in the 30-article corpus.
    pub fn count(self) -> usize {
        match self {
            PlantedCategory::A => 4,
            PlantedCategory::B => 6,
            PlantedCategory::C => 2,
            PlantedCategory::D => 2,
            PlantedCategory::E => 4,
            PlantedCategory::F => 6,
            PlantedCategory::G => 2,
            PlantedCategory::H => 4,
        }
    }

    /// The judges' level.
    pub fn level(self) -> RelevanceLevel {
        match self {
            PlantedCategory::A | PlantedCategory::B => RelevanceLevel::High,
            PlantedCategory::C | PlantedCategory::D | PlantedCategory::E => RelevanceLevel::Medium,
            PlantedCategory::F | PlantedCategory::G => RelevanceLevel::Low,
            PlantedCategory::H => RelevanceLevel::NotRelevant,
        }
    }

    pub fn placement(self) -> Placement {
        let p = |title, abstract_, caption, body_early, body_late, references| Placement {
            title,
            abstract_,
            caption,
            body_early,
            body_late,
            references,
        };
        match self {
            PlantedCategory::A => p(1, 1, 0, 0, 0, 0),
            PlantedCategory::B => p(0, 1, 0, 4, 0, 0),
            PlantedCategory::C => p(0, 0, 1, 1, 0, 0),
            PlantedCategory::D => p(0, 0, 0, 2, 1, 0),
            PlantedCategory::E => p(0, 0, 0, 1, 2, 0),
            PlantedCategory::F => p(0, 0, 0, 0, 1, 0),
            PlantedCategory::G => p(0, 0, 0, 0, 3, 0),
            PlantedCategory::H => p(0, 0, 0, 0, 0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedArticle {
    pub doc_id: String,
    pub article_id: u32,
    pub category: PlantedCategory,
    pub level: RelevanceLevel,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCorpus {
    pub seed: u64,
    pub articles: Vec<PlantedArticle>,
    pub judgments: JudgmentSet,
}

struct Writer {
    rng: ChaCha8Rng,
}

impl Writer {
    fn word(&mut self) -> &'static str {
        FILLER[self.rng.gen_range(0..FILLER.len())]
    }

    fn words(&mut self, n: usize) -> Vec<&'static str> {
        (0..n).map(|_| self.word()).collect()
    }

    fn sentence_with(&mut self, planted: bool) -> String {
        let n = self.rng.gen_range(8..15);
        let mut w = self.words(n);
        if planted {
            let at = self.rng.gen_range(1..n);
            w[at] = TERM;
        }
        let mut s = w.join(" ");
        s[..1].make_ascii_uppercase();
        s.push('.');
        s
    }

    fn sentence(&mut self) -> String {
        self.sentence_with(false)
    }

    fn paragraph(&mut self, sentences: usize) -> Vec<String> {
        (0..sentences).map(|_| self.sentence()).collect()
    }

    fn title(&mut self, planted: bool) -> String {
        let mut w = self.words(5);
        if planted {
            w[2] = TERM;
        }
        let mut s = w.join(" ");
        s[..1].make_ascii_uppercase();
        s
    }
}

fn insert_planted(w: &mut Writer, paragraphs: &mut [Vec<String>], range: std::ops::Range<usize>, count: u32) {
    for _ in 0..count {
        let p = w.rng.gen_range(range.clone());
        let at = w.rng.gen_range(0..=paragraphs[p].len());
        let s = w.sentence_with(true);
        paragraphs[p].insert(at, s);
    }
}

fn article_text(w: &mut Writer, n: u32, placement: Placement) -> String {
    let mut out = String::new();
    out.push_str(&w.title(placement.title > 0));
    out.push('\n');
    out.push_str(&format!("Synthetic Series {n} ({})\n\n", 1990 + n));

    let mut abstract_ = w.paragraph(4);
    for _ in 0..placement.abstract_ {
        let at = w.rng.gen_range(0..=abstract_.len());
        let s = w.sentence_with(true);
        abstract_.insert(at, s);
    }
    out.push_str("Abstract. ");
    out.push_str(&abstract_.join(" "));
    out.push_str("\n\n");

    let mut paragraphs: Vec<Vec<String>> = (0..BODY_PARAGRAPHS).map(|_| w.paragraph(10)).collect();
    insert_planted(w, &mut paragraphs, EARLY_PARAGRAPHS, placement.body_early);
    insert_planted(w, &mut paragraphs, LATE_PARAGRAPHS, placement.body_late);

    for (i, p) in paragraphs.iter().enumerate() {
        out.push_str(&p.join(" "));
        out.push_str("\n\n");
        if i == 3 {
            let body = w.words(7).join(" ");
            let lead = if placement.caption > 0 {
                format!("Allosaurus {body}")
            } else {
                body
            };
            out.push_str(&format!("Fig. 1. {lead}.\n\n"));
        }
    }

    out.push_str("REFERENCES\n");
    for r in 0..4u32 {
        let mut t = w.words(6);
        if r < placement.references {
            t[1] = TERM;
        }
        out.push_str(&format!(
            "Author, A. ({}). {}. Journal {}: 1-10.\n",
            1980 + r,
            t.join(" "),
            r + 1
        ));
    }
    out
}

/// Generates the corpus deterministically from `seed`.
pub fn planted_corpus(seed: u64) -> PlantedCorpus {
    let mut w = Writer {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let mut categories: Vec<PlantedCategory> = PlantedCategory::ALL
        .iter()
        .flat_map(|c| std::iter::repeat_n(*c, c.count()))
        .collect();
    categories.shuffle(&mut w.rng);

    let mut articles = Vec::new();
    let mut judgments = Vec::new();
    let mut citations = std::collections::BTreeMap::new();
    for (i, category) in categories.into_iter().enumerate() {
        let n = i as u32 + 1;
        let level = category.level();
        let text = article_text(&mut w, n, category.placement());
        for j in JUDGES {
            judgments.push(Judgment {
                judge_id: j.to_string(),
                query: if level.is_relevant() { PLANTED_QUERY } else { ANY_QUERY }.to_string(),
                article_id: n,
                level,
            });
        }
        citations.insert(n, format!("Synthetic article {n} (category {category:?})"));
        articles.push(PlantedArticle {
            doc_id: format!("article{n:02}"),
            article_id: n,
            category,
            level,
            text,
        });
    }
    PlantedCorpus {
        seed,
        articles,
        judgments: JudgmentSet {
            judgments,
            articles: citations,
        },
    }
}

impl PlantedCorpus {
    pub fn corpus(&self, engine: &Engine) -> Result<Corpus, EvalError> {
        let docs = self
            .articles
            .iter()
            .map(|a| {
                let doc = engine.parse_document(&RawArticle::plain(&a.doc_id, &a.text))?;
                Ok((doc, format!("{}.txt", a.doc_id)))
            })
            .collect::<Result<Vec<_>, EvalError>>()?;
        Ok(Corpus::new(docs)?)
    }

    /// Writes `<doc_id>.txt` per article plus `judgments.csv` and
    /// `citations.csv`.
    pub fn write_to(&self, dir: &Path) -> Result<(), EvalError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| EvalError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        for a in &self.articles {
            let p = dir.join(format!("{}.txt", a.doc_id));
            std::fs::write(&p, &a.text).map_err(io(&p))?;
        }
        let mut j = String::from("judge_id,query,article_id,level\n");
        for x in &self.judgments.judgments {
            j.push_str(&format!("{},{},{},{}\n", x.judge_id, x.query, x.article_id, x.level));
        }
        let p = dir.join("judgments.csv");
        std::fs::write(&p, j).map_err(io(&p))?;
        let mut c = String::from("article_id,citation\n");
        for (id, cite) in &self.judgments.articles {
            c.push_str(&format!("{id},\"{cite}\"\n"));
        }
        let p = dir.join("citations.csv");
        std::fs::write(&p, c).map_err(io(&p))?;
        Ok(())
    }
}
