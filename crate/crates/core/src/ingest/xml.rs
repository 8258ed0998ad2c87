use quick_xml::escape::escape;
use quick_xml::events::Event;
use quick_xml::Reader;

use super::segment::{SegKind, Segment};
use super::{IngestConfig, IngestError, ZoneKind, ZonedDocument};

pub(crate) struct ParsedXml {
    pub id: Option<String>,
    pub date: Option<String>,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Discard,
    Title,
    Date,
    Abstract,
    Keywords,
    Body,
    Caption,
    References,
}

/// Reads the minimal article schema. Unknown elements are transparent: their
/// text joins the enclosing known zone, or is dropped at article level.
pub(crate) fn parse_tagged(content: &str) -> Result<ParsedXml, IngestError> {
    let mut reader = Reader::from_str(content);
    reader.config_mut().check_end_names = true;

    let mut id = None;
    let mut date: Option<String> = None;
    let mut segments: Vec<Segment> = Vec::new();
    let mut stack: Vec<Target> = Vec::new();
    let mut buf = String::new();
    let mut seen_root = false;
    let mut seen_title = false;

    let flush = |segments: &mut Vec<Segment>, buf: &mut String, target: Target| {
        let kind = match target {
            Target::Title => SegKind::Title,
            Target::Abstract => SegKind::Abstract,
            Target::Keywords => SegKind::Keywords,
            Target::Body => SegKind::Body,
            Target::Caption => SegKind::Caption,
            Target::References => SegKind::References,
            Target::Discard | Target::Date => {
                buf.clear();
                return;
            }
        };
        if !buf.trim().is_empty() {
            segments.push(Segment::new(kind, std::mem::take(buf)));
        }
        buf.clear();
    };

    loop {
        let event = reader
            .read_event()
            .map_err(|e| IngestError::MalformedXml(format!("at byte {}: {e}", reader.error_position())))?;
        match event {
            Event::Start(e) => {
                let name = String::from_utf8_lossy(e.local_name().as_ref()).to_ascii_lowercase();
                let current = stack.last().copied();
                if !seen_root {
                    if name != "article" {
                        return Err(IngestError::MalformedXml(format!(
                            "root element must be <article>, found <{name}>"
                        )));
                    }
                    seen_root = true;
                    for attr in e.attributes().flatten() {
                        if attr.key.local_name().as_ref() == b"id" {
                            let v = attr
                                .unescape_value()
                                .map_err(|e| IngestError::MalformedXml(e.to_string()))?;
                            id = Some(v.into_owned());
                        }
                    }
                    stack.push(Target::Discard);
                    continue;
                }
                let next = match (current, name.as_str()) {
                    (Some(Target::Discard), "title") if !seen_title => {
                        seen_title = true;
                        Target::Title
                    }
                    (Some(Target::Discard), "date") => Target::Date,
                    (Some(Target::Discard), "abstract") => Target::Abstract,
                    (Some(Target::Discard), "keywords") => Target::Keywords,
                    (Some(Target::Discard), "body") => Target::Body,
                    (Some(Target::Discard), "references") => Target::References,
                    (Some(Target::Discard | Target::Body), "caption") => {
                        if current == Some(Target::Body) {
                            flush(&mut segments, &mut buf, Target::Body);
                        }
                        Target::Caption
                    }
                    (Some(t), _) => t,
                    (None, _) => Target::Discard,
                };
                stack.push(next);
            }
            Event::End(e) => {
                let name = String::from_utf8_lossy(e.local_name().as_ref()).to_ascii_lowercase();
                let Some(closing) = stack.pop() else {
                    return Err(IngestError::MalformedXml(format!("unexpected </{name}>")));
                };
                let parent = stack.last().copied();
                if parent == Some(closing) {
                    // Closing an unknown element nested inside a known zone.
                    if closing == Target::Body && name == "p" {
                        buf.push_str("\n\n");
                    } else if closing == Target::Body {
                        buf.push(' ');
                    }
                    continue;
                }
                match closing {
                    Target::Date => {
                        let d = buf.trim().to_string();
                        if date.is_none() && !d.is_empty() {
                            date = Some(d);
                        }
                        buf.clear();
                    }
                    other => flush(&mut segments, &mut buf, other),
                }
            }
            Event::Empty(_) => {}
            Event::Text(t) => {
                let text = t.unescape().map_err(|e| IngestError::MalformedXml(e.to_string()))?;
                match stack.last() {
                    Some(Target::Discard) | None => {}
                    Some(_) => buf.push_str(&text),
                }
            }
            Event::CData(c) => {
                if !matches!(stack.last(), Some(Target::Discard) | None) {
                    buf.push_str(&String::from_utf8_lossy(&c.into_inner()));
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !seen_root {
        return Err(IngestError::MalformedXml("no <article> element".into()));
    }
    if !stack.is_empty() {
        return Err(IngestError::MalformedXml("unclosed elements at end of input".into()));
    }
    Ok(ParsedXml { id, date, segments })
}

/// Writes zones in document order. Body-like zones (including the ersatz
/// abstract) become separate `<body>` elements so reparsing yields the same
/// segment boundaries.
pub(crate) fn write_document(doc: &ZonedDocument, _config: &IngestConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("<article id=\"{}\">\n", escape(&doc.id)));
    if let Some(d) = &doc.date {
        out.push_str(&format!("  <date>{}</date>\n", escape(d)));
    }
    for zone in &doc.zones {
        let text = escape(&zone.text);
        let line = match zone.kind {
            ZoneKind::Title => format!("  <title>{text}</title>\n"),
            ZoneKind::Abstract => format!("  <abstract>{text}</abstract>\n"),
            ZoneKind::Keywords => format!("  <keywords>{text}</keywords>\n"),
            ZoneKind::Caption => format!("  <body><caption>{text}</caption></body>\n"),
            ZoneKind::ErsatzAbstract | ZoneKind::BodyEarly | ZoneKind::BodyLate => {
                format!("  <body>{text}</body>\n")
            }
            ZoneKind::References => format!("  <references>{text}</references>\n"),
        };
        out.push_str(&line);
    }
    out.push_str("</article>\n");
    out
}
