use std::ops::Range;

use regex::Regex;

use super::{CompiledPatterns, IngestConfig, Zone, ZoneKind};
use crate::text::tokenize;

/// Zone candidates before ersatz carving and the early/late body split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SegKind {
    Title,
    Abstract,
    Keywords,
    Caption,
    Body,
    References,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Segment {
    pub kind: SegKind,
    pub text: String,
}

impl Segment {
    pub fn new(kind: SegKind, text: impl Into<String>) -> Self {
        Self {
            kind,
            text: text.into(),
        }
    }
}

/// Splits plain article text into zones using the configured line heuristics.
///
/// Never fails: text with no recognizable structure becomes a title plus body.
pub fn segment_zones(text: &str, config: &IngestConfig) -> Vec<Zone> {
    match config.compile() {
        Ok(p) => segment_with(text, config, &p),
        Err(_) => segment_with(
            text,
            &IngestConfig::default(),
            &IngestConfig::default().compile().expect("default patterns compile"),
        ),
    }
}

pub(crate) fn segment_with(text: &str, config: &IngestConfig, p: &CompiledPatterns) -> Vec<Zone> {
    finish_segments(classify_lines(text, p), config, p)
}

struct Line<'a> {
    range: Range<usize>,
    trimmed: &'a str,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if c == '\n' {
            out.push(Line {
                range: start..i + 1,
                trimmed: text[start..i].trim(),
            });
            start = i + 1;
        }
    }
    if start < text.len() {
        out.push(Line {
            range: start..text.len(),
            trimmed: text[start..].trim(),
        });
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Body,
    Abstract { has_content: bool },
    Keywords,
    Caption,
    References,
}

fn classify_lines(text: &str, p: &CompiledPatterns) -> Vec<Segment> {
    let lines = lines(text);
    let Some(title_idx) = lines.iter().position(|l| !l.trimmed.is_empty()) else {
        return Vec::new();
    };
    let mut segments = vec![Segment::new(SegKind::Title, lines[title_idx].trimmed)];

    // (kind, byte range) groups; consecutive lines of one group are contiguous.
    let mut groups: Vec<(SegKind, Range<usize>)> = Vec::new();
    let mut open_new = true;
    let mut mode = Mode::Body;
    let mut in_refs = false;
    let mut has_abstract = false;
    let mut has_keywords = false;

    for line in &lines[title_idx + 1..] {
        let t = line.trimmed;
        let rest_mode = if in_refs { Mode::References } else { Mode::Body };
        if t.is_empty() {
            match mode {
                Mode::Abstract { has_content: false } => {}
                Mode::Abstract { .. } | Mode::Keywords | Mode::Caption => {
                    mode = rest_mode;
                    open_new = true;
                }
                _ => {}
            }
            // Whitespace-only lines stay with the current group.
            if let Some(last) = groups.last_mut() {
                if !open_new {
                    last.1.end = line.range.end;
                }
            }
            continue;
        }

        let starts_new = if !in_refs && p.references_re.is_match(t) {
            in_refs = true;
            mode = Mode::References;
            true
        } else if p.caption_re.is_match(t) {
            mode = Mode::Caption;
            true
        } else if !in_refs && !has_keywords && p.keywords_re.is_match(t) {
            has_keywords = true;
            mode = Mode::Keywords;
            true
        } else if !in_refs && !has_abstract && p.abstract_re.is_match(t) {
            has_abstract = true;
            let after_label = p.abstract_re.replace(t, "");
            mode = Mode::Abstract {
                has_content: after_label.chars().any(char::is_alphanumeric),
            };
            true
        } else if matches!(
            mode,
            Mode::Abstract { has_content: true } | Mode::Caption | Mode::Keywords
        ) && p.heading_re.is_match(t)
        {
            mode = rest_mode;
            true
        } else {
            if let Mode::Abstract { .. } = mode {
                mode = Mode::Abstract { has_content: true };
            }
            false
        };

        let kind = match mode {
            Mode::Body => SegKind::Body,
            Mode::Abstract { .. } => SegKind::Abstract,
            Mode::Keywords => SegKind::Keywords,
            Mode::Caption => SegKind::Caption,
            Mode::References => SegKind::References,
        };
        match groups.last_mut() {
            Some(last) if !starts_new && !open_new && last.0 == kind => last.1.end = line.range.end,
            Some(last) if !starts_new && last.0 == kind && kind == SegKind::Body => last.1.end = line.range.end,
            _ => groups.push((kind, line.range.clone())),
        }
        open_new = false;
    }

    segments.extend(groups.into_iter().map(|(kind, r)| Segment::new(kind, &text[r])));
    segments
}

/// Paragraph byte ranges of `text`, split on blank lines.
fn paragraphs(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut line_start = 0;
    let mut prev_blank = false;
    for (i, c) in text.char_indices() {
        if c == '\n' {
            let blank = text[line_start..i].trim().is_empty();
            if blank && !prev_blank && line_start > start {
                out.push(start..line_start);
            }
            if blank {
                start = i + 1;
            }
            prev_blank = blank;
            line_start = i + 1;
        }
    }
    if start < text.len() {
        out.push(start..text.len());
    }
    out.retain(|r| !text[r.clone()].trim().is_empty());
    out
}

/// Byte offset where word number `n` (0-based) begins, if the text has that many.
fn word_start(text: &str, n: usize) -> Option<usize> {
    tokenize(text).get(n).map(|t| t.offset)
}

fn find_ersatz(segments: &[Segment], config: &IngestConfig, heading: &Regex) -> Option<(usize, Range<usize>)> {
    let mut fallback = None;
    for (si, seg) in segments.iter().enumerate() {
        if seg.kind != SegKind::Body {
            continue;
        }
        for para in paragraphs(&seg.text) {
            let t = seg.text[para.clone()].trim();
            if heading.is_match(t) {
                continue;
            }
            let words = tokenize(t).len();
            if words == 0 {
                continue;
            }
            if words >= config.ersatz_min_words {
                return Some((si, para));
            }
            if fallback.is_none() {
                fallback = Some((si, para));
            }
        }
    }
    fallback
}

/// Carves the ersatz abstract, splits body at the early/late boundary, trims
/// text and numbers captions.
pub(crate) fn finish_segments(mut segments: Vec<Segment>, config: &IngestConfig, p: &CompiledPatterns) -> Vec<Zone> {
    let mut ersatz_at = None;
    if !segments.iter().any(|s| s.kind == SegKind::Abstract) {
        if let Some((si, para)) = find_ersatz(&segments, config, &p.heading_re) {
            let text = std::mem::take(&mut segments[si].text);
            let para_text = &text[para.clone()];
            let cut = match word_start(para_text, config.ersatz_max_words) {
                Some(off) => para.start + off,
                None => para.end,
            };
            let before = Segment::new(SegKind::Body, &text[..para.start]);
            let after = Segment::new(SegKind::Body, &text[cut..]);
            let ersatz = text[para.start..cut].to_string();
            segments.splice(si..=si, [before, Segment::new(SegKind::Body, ersatz), after]);
            ersatz_at = Some(si + 1);
        }
    }

    let mut zones = Vec::new();
    let mut body_words = 0usize;
    let mut captions = 0u32;
    let boundary = config.body_early_boundary;
    for (si, seg) in segments.into_iter().enumerate() {
        let kind = match seg.kind {
            SegKind::Title => ZoneKind::Title,
            SegKind::Abstract => ZoneKind::Abstract,
            SegKind::Keywords => ZoneKind::Keywords,
            SegKind::Caption => ZoneKind::Caption,
            SegKind::References => ZoneKind::References,
            SegKind::Body if ersatz_at == Some(si) => ZoneKind::ErsatzAbstract,
            SegKind::Body => {
                let n = tokenize(&seg.text).len();
                if body_words >= boundary {
                    push_zone(&mut zones, ZoneKind::BodyLate, &seg.text, None);
                } else if body_words + n <= boundary {
                    push_zone(&mut zones, ZoneKind::BodyEarly, &seg.text, None);
                } else {
                    let off = word_start(&seg.text, boundary - body_words).expect("word exists");
                    push_zone(&mut zones, ZoneKind::BodyEarly, &seg.text[..off], None);
                    push_zone(&mut zones, ZoneKind::BodyLate, &seg.text[off..], None);
                }
                body_words += n;
                continue;
            }
        };
        let caption_index = (kind == ZoneKind::Caption).then(|| {
            captions += 1;
            captions - 1
        });
        if !push_zone(&mut zones, kind, &seg.text, caption_index) && kind == ZoneKind::Caption {
            captions -= 1;
        }
    }
    zones
}

fn push_zone(zones: &mut Vec<Zone>, kind: ZoneKind, text: &str, caption_index: Option<u32>) -> bool {
    let t = text.trim();
    if t.is_empty() {
        return false;
    }
    zones.push(Zone {
        kind,
        text: t.to_string(),
        caption_index,
    });
    true
}

/// First parenthesized year in the header block (title plus following lines,
/// stopping at the abstract or keywords line).
pub(crate) fn extract_date(text: &str, config: &IngestConfig, p: &CompiledPatterns) -> Option<String> {
    let mut header = String::new();
    for line in text
        .lines()
        .skip_while(|l| l.trim().is_empty())
        .take(config.header_lines + 1)
    {
        let t = line.trim();
        if !header.is_empty() && (p.abstract_re.is_match(t) || p.keywords_re.is_match(t)) {
            break;
        }
        header.push_str(t);
        header.push('\n');
    }
    p.date_re
        .captures(&header)
        .and_then(|c| c.get(1))
        .map(|m| m.as_str().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(zones: &[Zone]) -> Vec<ZoneKind> {
        zones.iter().map(|z| z.kind).collect()
    }

    fn seg(text: &str) -> Vec<Zone> {
        segment_zones(text, &IngestConfig::default())
    }

    // Sample in the style of an IEEE-like journal: abstract introduced by
    // "Abstract—" on the second block, index terms, numbered headings.
    const IEEE_STYLE: &str = "Studies on Ginkgo Leaf Stomata\n\
J. Doe and R. Roe (2003)\n\
\n\
Abstract—Stomatal density of fossil Ginkgo leaves tracks atmospheric carbon dioxide.\n\
We calibrate the proxy on living trees.\n\
\n\
Index Terms—ginkgo; stomata; paleoclimate\n\
\n\
1 INTRODUCTION\n\
\n\
Ginkgo biloba is a living fossil that survived since the Mesozoic.\n\
\n\
Fig. 3. Chart showing stomatal index against carbon dioxide.\n\
\n\
Further discussion of the leaves follows here.\n\
\n\
REFERENCES\n\
\n\
Royer, D. L. (2003). Ecological conservatism in Ginkgo.\n";

    // Vertebrate-paleontology style: label on its own line, keywords after.
    const JVP_STYLE: &str = "Multiple injury in a sub-adult Allosaurus\n\
\n\
ABSTRACT\n\
\n\
A sub-adult theropod shows healed fractures and infection in several bones.\n\
\n\
Key words: Allosaurus, pathology\n\
\n\
INTRODUCTION\n\
The Cleveland-Lloyd quarry yielded many specimens.\n\
Figure 2 Left scapula with callus.\n\
\n\
Bibliography\n\
Hanna 2002.\n";

    // Botany-journal style with no abstract at all.
    const NO_ABSTRACT: &str = "Ginkgo, a multivariate analysis package\n\
G. Bouxin\n\
\n\
Ginkgo is a package for multivariate analysis of vegetation tables that offers ordination and clustering methods to ecologists.\n\
\n\
The second paragraph describes installation.\n";

    #[test]
    fn ieee_style_zones() {
        let zones = seg(IEEE_STYLE);
        assert_eq!(
            kinds(&zones),
            vec![
                ZoneKind::Title,
                ZoneKind::BodyEarly,
                ZoneKind::Abstract,
                ZoneKind::Keywords,
                ZoneKind::BodyEarly,
                ZoneKind::Caption,
                ZoneKind::BodyEarly,
                ZoneKind::References,
            ]
        );
        assert!(zones[2].text.starts_with("Abstract—Stomatal"));
        assert!(zones[2].text.ends_with("living trees."));
        assert_eq!(
            zones[5].text,
            "Fig. 3. Chart showing stomatal index against carbon dioxide."
        );
        assert_eq!(zones[5].caption_index, Some(0));
        assert!(zones[7].text.starts_with("REFERENCES"));
        let p = IngestConfig::default().compile().unwrap();
        assert_eq!(
            extract_date(IEEE_STYLE, &IngestConfig::default(), &p).as_deref(),
            Some("2003")
        );
    }

    #[test]
    fn jvp_style_zones() {
        let zones = seg(JVP_STYLE);
        assert_eq!(
            kinds(&zones),
            vec![
                ZoneKind::Title,
                ZoneKind::Abstract,
                ZoneKind::Keywords,
                ZoneKind::BodyEarly,
                ZoneKind::Caption,
                ZoneKind::References,
            ]
        );
        assert!(zones[1].text.contains("healed fractures"));
        assert_eq!(zones[4].text, "Figure 2 Left scapula with callus.");
        assert_eq!(zones[5].text, "Bibliography\nHanna 2002.");
    }

    #[test]
    fn missing_abstract_uses_first_paragraph() {
        let zones = seg(NO_ABSTRACT);
        assert_eq!(
            kinds(&zones),
            vec![
                ZoneKind::Title,
                ZoneKind::BodyEarly,
                ZoneKind::ErsatzAbstract,
                ZoneKind::BodyEarly,
            ]
        );
        assert!(zones[2].text.starts_with("Ginkgo is a package"));
        assert_eq!(zones[1].text, "G. Bouxin");
    }

    #[test]
    fn ersatz_is_capped() {
        let config = IngestConfig {
            ersatz_max_words: 5,
            ersatz_min_words: 3,
            ..IngestConfig::default()
        };
        let zones = segment_zones("T\n\none two three four five six seven\n", &config);
        assert_eq!(
            kinds(&zones),
            vec![ZoneKind::Title, ZoneKind::ErsatzAbstract, ZoneKind::BodyEarly]
        );
        assert_eq!(zones[1].text, "one two three four five");
        assert_eq!(zones[2].text, "six seven");
    }

    #[test]
    fn title_only() {
        assert_eq!(kinds(&seg("Just a title\n\n   \n")), vec![ZoneKind::Title]);
        assert!(seg("").is_empty());
    }

    #[test]
    fn references_swallow_the_rest() {
        let zones = seg("T\n\nAbstract: x y z.\n\nREFERENCES\nA. 2001.\n\nB. 2002.\n");
        assert_eq!(
            kinds(&zones),
            vec![ZoneKind::Title, ZoneKind::Abstract, ZoneKind::References]
        );
        assert!(zones[2].text.ends_with("B. 2002."));
    }

    #[test]
    fn body_boundary_split_at_word() {
        let config = IngestConfig {
            body_early_boundary: 4,
            ..IngestConfig::default()
        };
        let zones = segment_zones("T\n\nAbstract: a.\n\nw1 w2 w3\n\nw4 w5 w6\n", &config);
        assert_eq!(
            kinds(&zones),
            vec![
                ZoneKind::Title,
                ZoneKind::Abstract,
                ZoneKind::BodyEarly,
                ZoneKind::BodyLate
            ]
        );
        assert_eq!(zones[2].text, "w1 w2 w3\n\nw4");
        assert_eq!(zones[3].text, "w5 w6");
    }

    #[test]
    fn every_visible_character_is_kept() {
        for sample in [IEEE_STYLE, JVP_STYLE, NO_ABSTRACT] {
            let zones = seg(sample);
            let joined: String = zones
                .iter()
                .flat_map(|z| z.text.chars())
                .filter(|c| !c.is_whitespace())
                .collect();
            let input: String = sample.chars().filter(|c| !c.is_whitespace()).collect();
            assert_eq!(joined, input);
        }
    }

    #[test]
    fn paragraphs_split_on_blank_lines() {
        let t = "a b\nc\n\n  \nd\n\ne";
        let ps: Vec<_> = paragraphs(t).into_iter().map(|r| t[r].trim().to_string()).collect();
        assert_eq!(ps, vec!["a b\nc", "d", "e"]);
    }
}
