//! Data files bundled into the library: stopwords, abbreviations, the three
//! sample taxonomies and the relevance-judgment study data.

use crate::ontology::IndexKind;
use crate::text::StopwordList;

pub const STOPWORDS: &str = include_str!("../fixtures/stopwords.txt");
pub const ABBREVIATIONS: &str = include_str!("../fixtures/abbreviations.txt");
pub const ORGANISMS_CSV: &str = include_str!("../fixtures/taxonomy/organisms.csv");
pub const GEOLOGIC_TIME_CSV: &str = include_str!("../fixtures/taxonomy/geologic_time.csv");
pub const REGIONS_CSV: &str = include_str!("../fixtures/taxonomy/regions.csv");
/// Study judgments: three participants, queries "ginkgo" and "allosaurus", 30 articles.
pub const STUDY_JUDGMENTS_CSV: &str = include_str!("../fixtures/study_judgments.csv");
/// Bibliographic citations of the 30 study articles, keyed by article number.
pub const STUDY_CITATIONS_CSV: &str = include_str!("../fixtures/study_citations.csv");

pub fn default_stopwords() -> StopwordList {
    StopwordList::parse(STOPWORDS).expect("bundled stopword list is valid")
}

pub fn default_abbreviations() -> Vec<String> {
    crate::text::parse_word_list(ABBREVIATIONS)
        .expect("bundled abbreviation list is valid")
        .into_iter()
        .collect()
}

/// Bundled taxonomy sources paired with their index kind.
pub fn taxonomy_sources() -> [(IndexKind, &'static str); 3] {
    [
        (IndexKind::OrganismName, ORGANISMS_CSV),
        (IndexKind::GeologicTime, GEOLOGIC_TIME_CSV),
        (IndexKind::Region, REGIONS_CSV),
    ]
}
