use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArticleFormat, Corpus, IngestError, Ingester, RawArticle, ZonedDocument};
use crate::exec::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadStatus {
    Ok,
    Error,
}

/// One line of the load report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadRecord {
    pub path: String,
    pub status: LoadStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub records: Vec<LoadRecord>,
}

impl LoadReport {
    pub fn failures(&self) -> impl Iterator<Item = &LoadRecord> {
        self.records.iter().filter(|r| r.status == LoadStatus::Error)
    }

    /// JSON lines, one record per file.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn load_corpus(dir: &Path, ingester: &Ingester) -> Result<(Corpus, LoadReport), IngestError> {
    load_corpus_with(dir, ingester, Execution::default())
}

/// Loads every `.txt` and `.xml` file directly inside `dir`.
///
/// Per-file failures (unreadable, invalid UTF-8, malformed XML, empty,
/// duplicate id) are reported rather than aborting the load.
pub fn load_corpus_with(
    dir: &Path,
    ingester: &Ingester,
    execution: Execution,
) -> Result<(Corpus, LoadReport), IngestError> {
    let io_err = |source| IngestError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("txt") => ArticleFormat::PlainText,
            Some("xml") => ArticleFormat::TaggedXml,
            _ => continue,
        };
        if path.is_file() {
            files.push((path, format));
        }
    }
    if files.is_empty() {
        return Err(IngestError::NoDocumentsFound(dir.to_path_buf()));
    }
    files.sort();

    let parsed: Vec<Result<ZonedDocument, IngestError>> = exec::map(execution, &files, |(path, format)| {
        let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
            path: path.clone(),
            source,
        })?;
        let content = String::from_utf8(bytes).map_err(|_| IngestError::InvalidUtf8(path.clone()))?;
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        ingester.parse_document(&RawArticle {
            id,
            source_path: path.display().to_string(),
            format: *format,
            content,
        })
    });

    let mut report = LoadReport::default();
    let mut seen = BTreeSet::new();
    let mut docs = Vec::new();
    for ((path, _), result) in files.iter().zip(parsed) {
        let path_str = path.display().to_string();
        let result = result.and_then(|doc| {
            if seen.insert(doc.id.clone()) {
                Ok(doc)
            } else {
                Err(IngestError::DuplicateId(doc.id))
            }
        });
        match result {
            Ok(doc) => {
                report.records.push(LoadRecord {
                    path: path_str.clone(),
                    status: LoadStatus::Ok,
                    error: None,
                });
                docs.push((doc, path_str));
            }
            Err(e) => report.records.push(LoadRecord {
                path: path_str,
                status: LoadStatus::Error,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok((Corpus::new(docs)?, report))
}
