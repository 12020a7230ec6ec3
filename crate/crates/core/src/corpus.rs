//! Article ingestion and cleaning.
//!
//! Raw articles arrive as JSONL records `{id, date, title, body, source?, language?}`.
//! Cleaning strips agency boilerplate (bylines, editor credits, trailing
//! standards blocks) using a configurable regex list and collapses whitespace.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::store::CorpusStore;

/// Patterns removed from article bodies when no config overrides them.
pub const DEFAULT_CLEANING_PATTERNS: &[&str] = &[
    r"(?i)\((?:additional\s+)?(?:reporting|editing|writing|compiled|translated|graphic)\s+by[^)]*\)",
    r"(?s)Our Standards:.*$",
    r"(?m)^\s*By [A-Z][\w.'-]*(?: [A-Z][\w.'-]*){0,3}\s*$",
];

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("malformed date {0:?}")]
    MalformedDate(String),
    #[error("article {0:?} has an empty body after cleaning")]
    EmptyBody(String),
    #[error("article is missing required field `{0}`")]
    MissingField(&'static str),
    #[error("invalid cleaning pattern {pattern:?}: {source}")]
    BadPattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("invalid cleaning config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An article record as it appears in the input file, before validation.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct RawArticle {
    pub id: Option<String>,
    pub date: Option<String>,
    #[serde(default)]
    pub title: Option<String>,
    pub body: Option<String>,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub language: Option<String>,
}

/// One cleaned news article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: String,
    pub date: NaiveDate,
    pub title: String,
    pub body: String,
    pub source: String,
    pub language: String,
}

impl ArticleRecord {
    /// Text scanned for mentions: title, a newline, then body.
    pub fn text(&self) -> String {
        let mut s = String::with_capacity(self.title.len() + self.body.len() + 1);
        s.push_str(&self.title);
        s.push('\n');
        s.push_str(&self.body);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CorpusStats {
    pub article_count: usize,
    pub date_min: Option<NaiveDate>,
    pub date_max: Option<NaiveDate>,
    pub vocab_size: usize,
}

/// Outcome of one ingest run. Stats cover the whole store after the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    #[serde(flatten)]
    pub stats: CorpusStats,
    pub inserted: usize,
    pub skipped: usize,
    pub duplicates: usize,
}

/// Regex list applied to article bodies.
#[derive(Debug, Clone)]
pub struct CleaningRules {
    patterns: Vec<Regex>,
}

#[derive(Deserialize)]
struct CleaningConfigFile {
    cleaning: Option<CleaningSection>,
}

#[derive(Deserialize)]
struct CleaningSection {
    patterns: Vec<String>,
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self::from_patterns(DEFAULT_CLEANING_PATTERNS.iter().copied()).expect("built-in cleaning patterns compile")
    }
}

impl CleaningRules {
    pub fn from_patterns<I, S>(patterns: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let patterns = patterns
            .into_iter()
            .map(|p| {
                Regex::new(p.as_ref()).map_err(|source| CorpusError::BadPattern {
                    pattern: p.as_ref().to_string(),
                    source,
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { patterns })
    }

    /// Parses a TOML config. A missing `[cleaning]` table keeps the defaults.
    pub fn from_toml(text: &str) -> Result<Self, CorpusError> {
        let cfg: CleaningConfigFile = toml::from_str(text).map_err(|e| CorpusError::Config(e.to_string()))?;
        match cfg.cleaning {
            Some(section) => Self::from_patterns(section.patterns),
            None => Ok(Self::default()),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(Regex::as_str)
    }

    /// Removes boilerplate and normalizes whitespace until the text is stable.
    pub fn clean_text(&self, text: &str) -> String {
        let mut current = text.to_string();
        // each round either shrinks the text or terminates
        loop {
            let mut next = current.clone();
            for re in &self.patterns {
                if let std::borrow::Cow::Owned(s) = re.replace_all(&next, "") {
                    next = s;
                }
            }
            let next = normalize_whitespace(&next);
            if next == current {
                return next;
            }
            current = next;
        }
    }
}

/// Collapses runs of whitespace to a single space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parses an ISO-8601 date or datetime, keeping only the (UTC) calendar day.
pub fn parse_date(text: &str) -> Result<NaiveDate, CorpusError> {
    let t = text.trim();
    if let Ok(d) = NaiveDate::parse_from_str(t, "%Y-%m-%d") {
        return Ok(d);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(t) {
        return Ok(dt.with_timezone(&Utc).date_naive());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(t, fmt) {
            return Ok(dt.date());
        }
    }
    Err(CorpusError::MalformedDate(text.to_string()))
}

pub fn clean_article(raw: &RawArticle, rules: &CleaningRules) -> Result<ArticleRecord, CorpusError> {
    let id = raw.id.as_deref().ok_or(CorpusError::MissingField("id"))?;
    let date = raw.date.as_deref().ok_or(CorpusError::MissingField("date"))?;
    let body = raw.body.as_deref().ok_or(CorpusError::MissingField("body"))?;
    let date = parse_date(date)?;
    let body = rules.clean_text(body);
    if body.is_empty() {
        return Err(CorpusError::EmptyBody(id.to_string()));
    }
    Ok(ArticleRecord {
        id: id.to_string(),
        date,
        title: normalize_whitespace(raw.title.as_deref().unwrap_or("")),
        body,
        source: raw.source.clone().unwrap_or_default(),
        language: raw.language.clone().unwrap_or_default(),
    })
}

/// Re-cleans an already clean record. Used to check idempotence.
pub fn reclean(record: &ArticleRecord, rules: &CleaningRules) -> Result<ArticleRecord, CorpusError> {
    let raw = RawArticle {
        id: Some(record.id.clone()),
        date: Some(record.date.to_string()),
        title: Some(record.title.clone()),
        body: Some(record.body.clone()),
        source: Some(record.source.clone()),
        language: Some(record.language.clone()),
    };
    clean_article(&raw, rules)
}

/// Distinct case-sensitive tokens, split on anything that is not alphanumeric.
pub fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

pub fn compute_stats<'a>(articles: impl IntoIterator<Item = &'a ArticleRecord>) -> CorpusStats {
    let mut stats = CorpusStats::default();
    let mut vocab: HashSet<&str> = HashSet::new();
    for a in articles {
        stats.article_count += 1;
        stats.date_min = Some(stats.date_min.map_or(a.date, |d| d.min(a.date)));
        stats.date_max = Some(stats.date_max.map_or(a.date, |d| d.max(a.date)));
        vocab.extend(tokens(&a.title));
        vocab.extend(tokens(&a.body));
    }
    stats.vocab_size = vocab.len();
    stats
}

/// Reads a JSONL file, cleans every record and appends new ids to the store.
///
/// Per-record failures are logged and counted in `skipped`; a non-empty file
/// in which no line is a JSON object is a format error.
pub fn ingest(
    store: &mut CorpusStore,
    path: impl AsRef<Path>,
    rules: &CleaningRules,
) -> Result<IngestReport, CorpusError> {
    let path = path.as_ref();
    let file = fs::File::open(path)?;
    let lines: Vec<(usize, String)> = BufReader::new(file)
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .collect::<Result<_, _>>()?;
    let lines: Vec<_> = lines.into_iter().filter(|(_, l)| !l.trim().is_empty()).collect();

    enum Parsed {
        NotJson(String),
        Invalid(CorpusError),
        Ok(ArticleRecord),
    }

    let parsed: Vec<(usize, Parsed)> = lines
        .par_iter()
        .map(|(lineno, line)| {
            let p = match serde_json::from_str::<RawArticle>(line) {
                Err(e) => Parsed::NotJson(e.to_string()),
                Ok(raw) => match clean_article(&raw, rules) {
                    Ok(rec) => Parsed::Ok(rec),
                    Err(e) => Parsed::Invalid(e),
                },
            };
            (*lineno, p)
        })
        .collect();

    if !parsed.is_empty() && parsed.iter().all(|(_, p)| matches!(p, Parsed::NotJson(_))) {
        let message = match &parsed[0].1 {
            Parsed::NotJson(m) => format!("line {}: {m}", parsed[0].0),
            _ => unreachable!(),
        };
        return Err(CorpusError::Format {
            path: path.display().to_string(),
            message,
        });
    }

    let mut report = IngestReport {
        stats: CorpusStats::default(),
        inserted: 0,
        skipped: 0,
        duplicates: 0,
    };
    for (lineno, p) in parsed {
        match p {
            Parsed::NotJson(msg) => {
                log::warn!("{}:{lineno}: skipping unparseable record: {msg}", path.display());
                report.skipped += 1;
            }
            Parsed::Invalid(e) => {
                log::warn!("{}:{lineno}: skipping record: {e}", path.display());
                report.skipped += 1;
            }
            Parsed::Ok(rec) => {
                if store.insert_article(rec) {
                    report.inserted += 1;
                } else {
                    report.duplicates += 1;
                    report.skipped += 1;
                }
            }
        }
    }
    report.stats = store.corpus_stats();
    Ok(report)
}
