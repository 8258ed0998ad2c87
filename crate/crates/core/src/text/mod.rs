//! Text pipeline: tokenization, sentence splitting, stopword removal,
//! stemming and match-unit generation.
//!
//! Every operation here is a pure function, so documents and queries can be
//! normalized in parallel and the same pipeline applied to both sides keeps
//! matching symmetric.

mod sentence;
mod tokenize;

use std::collections::BTreeSet;
use std::path::PathBuf;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use sentence::SentenceSplitter;
pub use tokenize::{count_words, tokenize, RawToken};

use crate::ingest::ZoneKind;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("line {line}: list entry {entry:?} must be a single word")]
    InvalidEntry { line: usize, entry: String },
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Set of lowercase words dropped before matching.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl StopwordList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the one-word-per-line format; `#` starts a comment line.
    pub fn parse(source: &str) -> Result<Self, TextError> {
        Ok(Self {
            words: parse_word_list(source)?,
        })
    }

    pub fn contains(&self, word: &str) -> bool {
        if word.chars().any(char::is_uppercase) {
            self.words.contains(&word.to_lowercase())
        } else {
            self.words.contains(word)
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}

impl FromIterator<String> for StopwordList {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|w| w.to_lowercase()).collect(),
        }
    }
}

pub(crate) fn parse_word_list(source: &str) -> Result<BTreeSet<String>, TextError> {
    let mut words = BTreeSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.chars().any(char::is_whitespace) {
            return Err(TextError::InvalidEntry {
                line: idx + 1,
                entry: line.to_string(),
            });
        }
        words.insert(line.to_lowercase());
    }
    Ok(words)
}

/// Lowercases and reduces a word with the English (Porter2) Snowball stemmer.
///
/// The stemmer is iterated to its fixed point so that `stem(stem(w)) == stem(w)`
/// holds for every input; a single Porter pass is not idempotent on its own.
pub fn stem(word: &str) -> String {
    thread_local! {
        static STEMMER: Stemmer = Stemmer::create(Algorithm::English);
    }
    let mut current = word.to_lowercase();
    STEMMER.with(|s| {
        for _ in 0..16 {
            let next = s.stem(&current);
            if next == current || next.is_empty() {
                break;
            }
            current = next.into_owned();
        }
    });
    current
}

/// Anything carrying a surface form and a stem, for [`remove_stopwords`].
pub trait WordForms {
    fn surface(&self) -> &str;
    fn stem(&self) -> &str {
        self.surface()
    }
}

impl WordForms for &str {
    fn surface(&self) -> &str {
        self
    }
}

impl WordForms for String {
    fn surface(&self) -> &str {
        self
    }
}

impl WordForms for PositionedToken {
    fn surface(&self) -> &str {
        &self.surface
    }
    fn stem(&self) -> &str {
        &self.stem
    }
}

/// Order-preserving filter dropping words whose surface or stem is listed.
pub fn remove_stopwords<T: WordForms>(tokens: Vec<T>, list: &StopwordList) -> Vec<T> {
    tokens
        .into_iter()
        .filter(|t| !list.contains(t.surface()) && !list.contains(t.stem()))
        .collect()
}

/// A scored-candidate token with its location inside a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionedToken {
    pub surface: String,
    pub stem: String,
    pub zone: ZoneKind,
    pub zone_caption_index: Option<u32>,
    /// 1-based position among body words, counted before stopword removal.
    pub body_word_position: Option<u32>,
    pub sentence_id: u32,
}

/// A unigram or bigram of adjacent stems from one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchUnit {
    pub terms: Vec<String>,
    /// Index of the first token in the slice the unit was built from.
    pub first_token: usize,
}

impl MatchUnit {
    pub fn key(&self) -> String {
        self.terms.join(" ")
    }

    pub fn is_bigram(&self) -> bool {
        self.terms.len() == 2
    }
}

/// Emits every unigram and every same-sentence adjacent bigram, in token order.
pub fn make_match_units(tokens: &[PositionedToken]) -> Vec<MatchUnit> {
    let mut units = Vec::with_capacity(tokens.len() * 2);
    for (i, tok) in tokens.iter().enumerate() {
        units.push(MatchUnit {
            terms: vec![tok.stem.clone()],
            first_token: i,
        });
        if let Some(next) = tokens.get(i + 1) {
            if next.sentence_id == tok.sentence_id {
                units.push(MatchUnit {
                    terms: vec![tok.stem.clone(), next.stem.clone()],
                    first_token: i,
                });
            }
        }
    }
    units
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Disable to match exact lowercase surfaces.
    pub stemming: bool,
    /// Replaces the bundled stopword list.
    pub stopwords_file: Option<PathBuf>,
    /// Replaces the bundled sentence-splitter abbreviation list.
    pub abbreviations_file: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            stemming: true,
            stopwords_file: None,
            abbreviations_file: None,
        }
    }
}

/// One analysed word of a text fragment before zone attribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedWord {
    pub surface: String,
    pub stem: String,
    pub offset: usize,
    /// Sentence index relative to the analysed fragment.
    pub sentence: u32,
    pub is_stopword: bool,
}

#[derive(Debug, Clone)]
pub struct TextPipeline {
    stopwords: StopwordList,
    splitter: SentenceSplitter,
    stemming: bool,
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self {
            stopwords: crate::fixtures::default_stopwords(),
            splitter: SentenceSplitter::default(),
            stemming: true,
        }
    }
}

impl TextPipeline {
    pub fn new(stopwords: StopwordList, splitter: SentenceSplitter, stemming: bool) -> Self {
        Self {
            stopwords,
            splitter,
            stemming,
        }
    }

    pub fn from_config(config: &PipelineConfig) -> Result<Self, TextError> {
        let read = |path: &PathBuf| {
            std::fs::read_to_string(path).map_err(|source| TextError::Io {
                path: path.clone(),
                source,
            })
        };
        let stopwords = match &config.stopwords_file {
            Some(path) => StopwordList::parse(&read(path)?)?,
            None => crate::fixtures::default_stopwords(),
        };
        let splitter = match &config.abbreviations_file {
            Some(path) => SentenceSplitter::new(parse_word_list(&read(path)?)?),
            None => SentenceSplitter::default(),
        };
        Ok(Self::new(stopwords, splitter, config.stemming))
    }

    pub fn stopwords(&self) -> &StopwordList {
        &self.stopwords
    }

    pub fn splitter(&self) -> &SentenceSplitter {
        &self.splitter
    }

    pub fn stemming(&self) -> bool {
        self.stemming
    }

    pub fn normalize_word(&self, word: &str) -> String {
        if self.stemming {
            stem(word)
        } else {
            word.to_lowercase()
        }
    }

    pub fn is_stopword(&self, surface: &str, stem: &str) -> bool {
        self.stopwords.contains(surface) || self.stopwords.contains(stem)
    }

    /// Tokenizes, sentence-tags and stems a fragment, keeping stopwords flagged
    /// so callers can count word positions before removal.
    pub fn analyze(&self, text: &str) -> Vec<AnalyzedWord> {
        let spans = self.splitter.split(text);
        let mut out = Vec::new();
        let mut sentence = 0usize;
        for tok in tokenize(text) {
            while sentence + 1 < spans.len() && tok.offset >= spans[sentence].end {
                sentence += 1;
            }
            let stem = self.normalize_word(tok.surface);
            out.push(AnalyzedWord {
                is_stopword: self.is_stopword(tok.surface, &stem),
                surface: tok.surface.to_string(),
                stem,
                offset: tok.offset,
                sentence: sentence as u32,
            });
        }
        out
    }

    /// Normalized non-stopword stems of a phrase, as used for queries and
    /// taxonomy names.
    pub fn normalize_phrase(&self, text: &str) -> Vec<String> {
        self.analyze(text)
            .into_iter()
            .filter(|w| !w.is_stopword)
            .map(|w| w.stem)
            .collect()
    }

    /// A stable description of everything that changes normalization output.
    pub fn fingerprint_material(&self) -> String {
        let mut s = format!("stemming={};stop=", self.stemming);
        for w in self.stopwords.words() {
            s.push_str(w);
            s.push(',');
        }
        s.push_str(";abbr=");
        for a in self.splitter.abbreviations() {
            s.push_str(a);
            s.push(',');
        }
        s
    }
}
