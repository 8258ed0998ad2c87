use std::collections::BTreeSet;
use std::ops::Range;

/// Rule-based sentence splitter with a fixed abbreviation list.
///
/// Returned spans are contiguous byte ranges that partition the input; leading
/// and trailing whitespace is attached to the neighbouring sentence. Input with
/// no visible characters yields no spans.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceSplitter {
    abbreviations: BTreeSet<String>,
}

impl SentenceSplitter {
    pub fn new(abbreviations: impl IntoIterator<Item = String>) -> Self {
        Self {
            abbreviations: abbreviations.into_iter().map(|a| a.to_lowercase()).collect(),
        }
    }

    pub fn abbreviations(&self) -> &BTreeSet<String> {
        &self.abbreviations
    }

    pub fn split(&self, text: &str) -> Vec<Range<usize>> {
        if text.trim().is_empty() {
            return Vec::new();
        }
        let mut cuts = Vec::new();
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if c == '\n' {
                // Paragraph break: a newline followed by optional spaces and another newline.
                let mut j = i + 1;
                while j < chars.len() && chars[j].1 != '\n' && chars[j].1.is_whitespace() {
                    j += 1;
                }
                if j < chars.len() && chars[j].1 == '\n' {
                    cuts.push(pos);
                    i = j + 1;
                    continue;
                }
            }
            if matches!(c, '.' | '!' | '?') {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j].1, '"' | '\'' | ')' | ']' | '”' | '’') {
                    j += 1;
                }
                let at_end = j >= chars.len();
                let followed_by_space = !at_end && chars[j].1.is_whitespace();
                if followed_by_space && !(c == '.' && self.is_abbreviation(text, pos)) {
                    let mut k = j;
                    while k < chars.len() && chars[k].1.is_whitespace() {
                        k += 1;
                    }
                    if k < chars.len() && !chars[k].1.is_lowercase() {
                        cuts.push(chars[j].0);
                    }
                }
            }
            i += 1;
        }

        let mut spans = Vec::new();
        let mut start = 0;
        for cut in cuts {
            if text[start..cut].trim().is_empty() {
                continue;
            }
            spans.push(start..cut);
            start = cut;
        }
        if text[start..].trim().is_empty() {
            if let Some(last) = spans.last_mut() {
                last.end = text.len();
            }
        } else {
            spans.push(start..text.len());
        }
        // Leading whitespace-only prefix merges into the first sentence.
        if let Some(first) = spans.first_mut() {
            first.start = 0;
        }
        spans
    }

    /// True when the word ending right before the period at `dot` is a known
    /// abbreviation or a single-letter initial.
    fn is_abbreviation(&self, text: &str, dot: usize) -> bool {
        let before = &text[..dot];
        let word_start = before
            .char_indices()
            .rev()
            .find(|(_, c)| !c.is_alphabetic())
            .map(|(i, c)| i + c.len_utf8())
            .unwrap_or(0);
        let word = &before[word_start..];
        if word.is_empty() {
            return false;
        }
        if word.chars().count() == 1 {
            return true;
        }
        self.abbreviations.contains(&word.to_lowercase())
    }
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        Self::new(crate::fixtures::default_abbreviations())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(text: &str) -> Vec<&str> {
        SentenceSplitter::default()
            .split(text)
            .into_iter()
            .map(|r| text[r].trim())
            .collect()
    }

    #[test]
    fn two_plain_sentences() {
        assert_eq!(texts("A is here. B is there."), vec!["A is here.", "B is there."]);
    }

    #[test]
    fn figure_abbreviation_does_not_split() {
        assert_eq!(texts("See Fig. 4 for allosaurus."), vec!["See Fig. 4 for allosaurus."]);
    }

    #[test]
    fn empty_and_blank_inputs() {
        assert!(SentenceSplitter::default().split("").is_empty());
        assert!(SentenceSplitter::default().split("  \n ").is_empty());
    }

    #[test]
    fn et_al_and_initials() {
        assert_eq!(
            texts("Smith et al. described A. fragilis in detail. Later work followed."),
            vec!["Smith et al. described A. fragilis in detail.", "Later work followed."]
        );
    }

    #[test]
    fn blank_line_ends_sentence() {
        assert_eq!(
            texts("Heading without period\n\nNext paragraph."),
            vec!["Heading without period", "Next paragraph."]
        );
    }

    #[test]
    fn spans_partition_input() {
        let text = "  One. Two!  Three?\n\nFour ";
        let spans = SentenceSplitter::default().split(text);
        assert_eq!(spans.first().unwrap().start, 0);
        assert_eq!(spans.last().unwrap().end, text.len());
        for w in spans.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        assert_eq!(spans.len(), 4);
    }
}
