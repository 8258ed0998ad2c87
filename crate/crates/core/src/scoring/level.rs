use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LevelMode, OccurrenceProfile, ScoringConfig};
use crate::ingest::ZoneKind;

/// Fuzzy relevance level. Ordered from most to least relevant, so sorting
/// ascending puts High first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceLevel {
    High,
    Medium,
    Low,
    NotRelevant,
}

impl RelevanceLevel {
    pub const ALL: [RelevanceLevel; 4] = [
        RelevanceLevel::High,
        RelevanceLevel::Medium,
        RelevanceLevel::Low,
        RelevanceLevel::NotRelevant,
    ];

    /// Display label; NotRelevant results are never shown.
    pub fn label(self) -> &'static str {
        match self {
            RelevanceLevel::High => "Highly relevant",
            RelevanceLevel::Medium => "Relevant",
            RelevanceLevel::Low => "Somewhat relevant",
            RelevanceLevel::NotRelevant => "Not relevant",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelevanceLevel::High => "high",
            RelevanceLevel::Medium => "medium",
            RelevanceLevel::Low => "low",
            RelevanceLevel::NotRelevant => "not_relevant",
        }
    }

    pub fn is_relevant(self) -> bool {
        self != RelevanceLevel::NotRelevant
    }
}

impl fmt::Display for RelevanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelevanceLevel {
    type Err = String;

    /// Accepts short names, one-letter codes and display labels.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "high" | "h" | "highly relevant" => RelevanceLevel::High,
            "medium" | "m" | "relevant" => RelevanceLevel::Medium,
            "low" | "l" | "somewhat relevant" => RelevanceLevel::Low,
            "not_relevant" | "none" | "n" | "not relevant" => RelevanceLevel::NotRelevant,
            _ => return Err(format!("unknown relevance level {s:?}")),
        })
    }
}

/// Maps a score to a level. In zone-rule mode the level follows where the
/// occurrences sit rather than the total; a zero total is NotRelevant in
/// both modes.
pub fn assign_level(total: f64, cfg: &ScoringConfig, profile: &OccurrenceProfile) -> RelevanceLevel {
    if total <= 0.0 {
        return RelevanceLevel::NotRelevant;
    }
    match cfg.level_mode {
        LevelMode::ScoreThreshold => {
            let t = &cfg.level_thresholds;
            if total >= t.high {
                RelevanceLevel::High
            } else if total >= t.medium {
                RelevanceLevel::Medium
            } else {
                RelevanceLevel::Low
            }
        }
        LevelMode::ZoneRule => {
            let count = |z: ZoneKind| profile.per_zone_counts.get(&z).copied().unwrap_or(0);
            let headline = count(ZoneKind::Title)
                + count(ZoneKind::Abstract)
                + count(ZoneKind::ErsatzAbstract)
                + count(ZoneKind::Keywords);
            let body = count(ZoneKind::BodyEarly) + count(ZoneKind::BodyLate);
            if headline > 0 || body >= 3 {
                RelevanceLevel::High
            } else if count(ZoneKind::Caption) > 0 || body == 2 {
                RelevanceLevel::Medium
            } else if profile.scored_count() > 0 {
                RelevanceLevel::Low
            } else {
                RelevanceLevel::NotRelevant
            }
        }
    }
}

/// Baseline step function: 0 → NotRelevant, 1–2 → Low, 3–4 → Medium, 5+ → High.
pub fn baseline_level(count: u32) -> RelevanceLevel {
    match count {
        0 => RelevanceLevel::NotRelevant,
        1 | 2 => RelevanceLevel::Low,
        3 | 4 => RelevanceLevel::Medium,
        _ => RelevanceLevel::High,
    }
}
