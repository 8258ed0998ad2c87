/// A token surface together with its byte offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken<'a> {
    pub surface: &'a str,
    pub offset: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '-'
}

/// Splits text into maximal runs of letters, digits and hyphens.
///
/// Leading and trailing hyphens are trimmed and runs that contain no letter or
/// digit (a bare `-` or `--`) are dropped, so hyphens only survive inside
/// compounds like `CO₂-enrichment`.
pub fn tokenize(text: &str) -> Vec<RawToken<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match (is_word_char(c), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push_trimmed(text, s, i, &mut out);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push_trimmed(text, s, text.len(), &mut out);
    }
    out
}

fn push_trimmed<'a>(text: &'a str, start: usize, end: usize, out: &mut Vec<RawToken<'a>>) {
    let run = &text[start..end];
    let trimmed_front = run.trim_start_matches('-');
    let lead = run.len() - trimmed_front.len();
    let trimmed = trimmed_front.trim_end_matches('-');
    if trimmed.chars().any(char::is_alphanumeric) {
        out.push(RawToken {
            surface: trimmed,
            offset: start + lead,
        });
    }
}

/// Counts tokens without allocating surfaces.
pub fn count_words(text: &str) -> usize {
    tokenize(text).len()
}
