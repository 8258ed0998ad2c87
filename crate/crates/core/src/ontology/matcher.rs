use std::collections::HashMap;

use crate::text::PositionedToken;

/// One occurrence of a known phrase over a token sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PhraseMatch {
    pub start: usize,
    pub len: usize,
    /// Index into the matcher's term list.
    pub term: usize,
}

impl PhraseMatch {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

/// Finds space-joined stem phrases as runs of consecutive same-sentence tokens.
#[derive(Debug, Clone, Default)]
pub struct PhraseMatcher {
    terms: Vec<String>,
    lookup: HashMap<String, usize>,
    max_len: usize,
}

impl PhraseMatcher {
    pub fn new<I: IntoIterator<Item = String>>(terms: I) -> Self {
        let mut m = Self::default();
        for t in terms {
            if t.is_empty() || m.lookup.contains_key(&t) {
                continue;
            }
            m.max_len = m.max_len.max(t.split(' ').count());
            m.lookup.insert(t.clone(), m.terms.len());
            m.terms.push(t);
        }
        m
    }

    pub fn term(&self, id: usize) -> &str {
        &self.terms[id]
    }

    pub fn id_of(&self, term: &str) -> Option<usize> {
        self.lookup.get(term).copied()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Every occurrence of every term, nested ones included, sorted.
    pub fn find_all(&self, tokens: &[PositionedToken]) -> Vec<PhraseMatch> {
        let mut out = Vec::new();
        let mut key = String::new();
        for start in 0..tokens.len() {
            key.clear();
            for len in 1..=self.max_len {
                let i = start + len - 1;
                if i >= tokens.len() || tokens[i].sentence_id != tokens[start].sentence_id {
                    break;
                }
                if len > 1 {
                    key.push(' ');
                }
                key.push_str(&tokens[i].stem);
                if let Some(&term) = self.lookup.get(key.as_str()) {
                    out.push(PhraseMatch { start, len, term });
                }
            }
        }
        out
    }

    /// Occurrences after longest-match resolution.
    pub fn find(&self, tokens: &[PositionedToken]) -> Vec<PhraseMatch> {
        suppress_nested(self.find_all(tokens))
    }
}

/// Drops every match whose span lies inside a strictly longer match.
/// Partial overlaps and disjoint matches are all kept.
pub fn suppress_nested(mut matches: Vec<PhraseMatch>) -> Vec<PhraseMatch> {
    matches.sort_unstable();
    matches.dedup();
    let max_len = matches.iter().map(|m| m.len).max().unwrap_or(0);
    let keep: Vec<bool> = matches
        .iter()
        .map(|m| {
            let lo = matches.partition_point(|o| o.start + max_len < m.end());
            let hi = matches.partition_point(|o| o.start <= m.start);
            !matches[lo..hi]
                .iter()
                .any(|o| o.len > m.len && o.start <= m.start && o.end() >= m.end())
        })
        .collect();
    matches
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ZoneKind;
    use proptest::prelude::*;

    fn toks(words: &[(&str, u32)]) -> Vec<PositionedToken> {
        words
            .iter()
            .map(|(w, s)| PositionedToken {
                surface: w.to_string(),
                stem: w.to_string(),
                zone: ZoneKind::BodyEarly,
                zone_caption_index: None,
                body_word_position: None,
                sentence_id: *s,
            })
            .collect()
    }

    #[test]
    fn nested_match_is_suppressed() {
        let m = PhraseMatcher::new(["allosaurus".to_string(), "allosaurus fragilis".to_string()]);
        let t = toks(&[("allosaurus", 0), ("fragilis", 0), ("allosaurus", 0)]);
        assert_eq!(m.find_all(&t).len(), 3);
        let found = m.find(&t);
        let terms: Vec<_> = found.iter().map(|x| m.term(x.term)).collect();
        assert_eq!(terms, ["allosaurus fragilis", "allosaurus"]);
    }

    #[test]
    fn partial_overlaps_both_count() {
        let m = PhraseMatcher::new(["upper paleozo".to_string(), "paleozo era".to_string()]);
        let t = toks(&[("upper", 0), ("paleozo", 0), ("era", 0)]);
        assert_eq!(m.find(&t).len(), 2);
    }

    #[test]
    fn phrases_do_not_cross_sentences() {
        let m = PhraseMatcher::new(["water lili".to_string()]);
        assert!(m.find(&toks(&[("water", 0), ("lili", 1)])).is_empty());
        assert_eq!(m.find(&toks(&[("water", 1), ("lili", 1)])).len(), 1);
    }

    #[test]
    fn three_word_terms() {
        let m = PhraseMatcher::new(["rio grand sul".to_string(), "rio".to_string()]);
        let found = m.find(&toks(&[("rio", 0), ("grand", 0), ("sul", 0)]));
        assert_eq!(
            found,
            vec![PhraseMatch {
                start: 0,
                len: 3,
                term: 0
            }]
        );
    }

    proptest! {
        #[test]
        fn suppression_matches_quadratic_definition(
            raw in prop::collection::vec((0usize..20, 1usize..4, 0usize..5), 0..30)
        ) {
            let matches: Vec<PhraseMatch> = raw.iter().map(|&(start, len, term)| PhraseMatch { start, len, term }).collect();
            let mut expected: Vec<PhraseMatch> = matches
                .iter()
                .filter(|m| !matches.iter().any(|o| o.len > m.len && o.start <= m.start && o.end() >= m.end()))
                .copied()
                .collect();
            expected.sort_unstable();
            expected.dedup();
            prop_assert_eq!(suppress_nested(matches), expected);
        }
    }
}
