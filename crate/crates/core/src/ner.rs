//! Person-mention extraction and alias normalization.
//!
//! Two extractors are available: a gazetteer matcher (exact, case-sensitive,
//! longest match first) and a capitalization heuristic. Extracted surface forms
//! are grouped by an [`AliasTable`] that maps multi-token names onto their last
//! token whenever that token also occurs on its own, so "Donald Trump" and
//! "Trump" count as one person.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{parse_date, ArticleRecord};

#[derive(Debug, thiserror::Error)]
pub enum NerError {
    #[error("cannot build an alias table from an empty set of surfaces")]
    EmptyInput,
    #[error("line {line}: {message}")]
    Import { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One occurrence of a person name in one article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionEvent {
    pub article_id: String,
    pub date: NaiveDate,
    pub surface: String,
    pub canonical: String,
    /// Offset in characters into `title + "\n" + body`.
    pub char_offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Every occurrence counts.
    #[default]
    Occurrence,
    /// An article counts at most once per person.
    Article,
}

impl FromStr for CountMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "occurrence" => Ok(Self::Occurrence),
            "article" => Ok(Self::Article),
            other => Err(format!("unknown count mode {other:?} (expected occurrence|article)")),
        }
    }
}

/// Terms that are never persons.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stoplist(BTreeSet<String>);

const DEFAULT_STOPLIST: &str = include_str!("default_stoplist.txt");

impl Stoplist {
    /// Weekdays, months, agency names and common capitalized function words.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }

    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn contains(&self, term: &str) -> bool {
        self.0.contains(term)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn extend(&mut self, other: Stoplist) {
        self.0.extend(other.0);
    }
}

impl<S: Into<String>> FromIterator<S> for Stoplist {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

/// Reads a stoplist: one term per line, `#` starts a comment line.
pub fn load_stoplist(path: impl AsRef<Path>) -> Result<Stoplist, NerError> {
    Ok(Stoplist::parse(&fs::read_to_string(path)?))
}

/// Known person names, optionally with pre-seeded `alias -> canonical` pairs.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    names: BTreeSet<String>,
    seeds: Vec<(String, String)>,
    by_first_token: HashMap<String, Vec<String>>,
}

impl Gazetteer {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut g = Self::default();
        for n in names {
            g.names.insert(n.into());
        }
        g.reindex();
        g
    }

    /// Parses gazetteer lines: `Name` or `alias<TAB>canonical`.
    pub fn parse(text: &str) -> Self {
        let mut g = Self::default();
        for line in text.lines() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            match line.split_once('\t') {
                Some((alias, canonical)) => {
                    let (alias, canonical) = (alias.trim(), canonical.trim());
                    if alias.is_empty() || canonical.is_empty() {
                        continue;
                    }
                    g.names.insert(alias.to_string());
                    g.names.insert(canonical.to_string());
                    g.seeds.push((alias.to_string(), canonical.to_string()));
                }
                None => {
                    g.names.insert(line.trim().to_string());
                }
            }
        }
        g.reindex();
        g
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, NerError> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn seeds(&self) -> &[(String, String)] {
        &self.seeds
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn reindex(&mut self) {
        self.by_first_token.clear();
        for name in &self.names {
            let first = name_tokens(name).first().map(|t| &name[t.start..t.end]);
            if let Some(first) = first {
                self.by_first_token
                    .entry(first.to_string())
                    .or_default()
                    .push(name.clone());
            }
        }
        for candidates in self.by_first_token.values_mut() {
            // longest first, ties in lexical order
            candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Token {
    start: usize,
    end: usize,
    char_start: usize,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Word tokens: alphanumeric runs, joined across inner hyphens and
/// apostrophes, with a trailing possessive `'s` split off.
fn name_tokens(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].1.is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        let mut j = i + 1;
        loop {
            while j < chars.len() && chars[j].1.is_alphanumeric() {
                j += 1;
            }
            let joins = j + 1 < chars.len() && is_joiner(chars[j].1) && chars[j + 1].1.is_alphanumeric();
            if !joins {
                break;
            }
            let possessive = chars[j].1 != '-'
                && matches!(chars[j + 1].1, 's' | 'S')
                && chars.get(j + 2).is_none_or(|(_, c)| !c.is_alphanumeric());
            if possessive {
                break;
            }
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |(b, _)| *b);
        tokens.push(Token {
            start: chars[start].0,
            end,
            char_start: start,
        });
        i = j;
    }
    tokens
}

fn is_capitalized(token: &str) -> bool {
    let mut chars = token.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !first.is_uppercase() {
        return false;
    }
    // all-caps words (acronyms, datelines) are not names
    let rest: Vec<char> = chars.filter(|c| c.is_alphabetic()).collect();
    rest.is_empty() || rest.iter().any(|c| c.is_lowercase())
}

fn sentence_initial(text: &str, byte_start: usize) -> bool {
    match text[..byte_start]
        .chars()
        .rev()
        .find(|c| *c == '\n' || !c.is_whitespace())
    {
        None | Some('\n') => true,
        Some(c) => matches!(c, '.' | '!' | '?' | '"' | '\u{201C}' | ':'),
    }
}

/// Raw gazetteer or heuristic match before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceMatch {
    pub surface: String,
    pub char_offset: usize,
}

pub fn match_gazetteer(text: &str, gazetteer: &Gazetteer) -> Vec<SurfaceMatch> {
    let tokens = name_tokens(text);
    let mut out = Vec::new();
    let mut consumed_to = 0usize;
    for tok in &tokens {
        if tok.start < consumed_to {
            continue;
        }
        let Some(candidates) = gazetteer.by_first_token.get(&text[tok.start..tok.end]) else {
            continue;
        };
        let rest = &text[tok.start..];
        let hit = candidates
            .iter()
            .find(|name| rest.starts_with(name.as_str()) && ends_on_boundary(text, tok.start + name.len()));
        if let Some(name) = hit {
            out.push(SurfaceMatch {
                surface: name.clone(),
                char_offset: tok.char_start,
            });
            consumed_to = tok.start + name.len();
        }
    }
    out
}

fn ends_on_boundary(text: &str, byte_end: usize) -> bool {
    let mut after = text[byte_end..].chars();
    match after.next() {
        None => true,
        Some(c) if c.is_alphanumeric() => false,
        Some('-') => !after.next().is_some_and(char::is_alphanumeric),
        Some(_) => true,
    }
}

/// Capitalization heuristic: maximal runs of 1 to 4 capitalized tokens
/// separated by single-line whitespace. Stoplisted tokens are trimmed from
/// either end of a run.
pub fn match_heuristic(text: &str, stoplist: &Stoplist) -> Vec<SurfaceMatch> {
    const MAX_RUN: usize = 4;
    let tokens = name_tokens(text);
    let lowered: HashSet<&str> = tokens
        .iter()
        .map(|t| &text[t.start..t.end])
        .filter(|w| w.chars().next().is_some_and(char::is_lowercase))
        .collect();

    let mut runs: Vec<Vec<Token>> = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    for tok in tokens {
        let word = &text[tok.start..tok.end];
        if !is_capitalized(word) {
            if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            continue;
        }
        if let Some(prev) = current.last() {
            let gap = &text[prev.end..tok.start];
            let contiguous = !gap.is_empty() && gap.chars().all(|c| c.is_whitespace() && c != '\n');
            if !contiguous {
                runs.push(std::mem::take(&mut current));
            }
        }
        current.push(tok);
    }
    if !current.is_empty() {
        runs.push(current);
    }

    let mut out = Vec::new();
    for run in runs {
        if run.len() > MAX_RUN {
            continue;
        }
        let word = |t: &Token| &text[t.start..t.end];
        let mut lo = 0;
        let mut hi = run.len();
        while lo < hi && stoplist.contains(word(&run[lo])) {
            lo += 1;
        }
        while hi > lo && stoplist.contains(word(&run[hi - 1])) {
            hi -= 1;
        }
        if lo == hi {
            continue;
        }
        let kept = &run[lo..hi];
        if kept.len() == 1 {
            let w = word(&kept[0]);
            if sentence_initial(text, kept[0].start) && lowered.contains(w.to_lowercase().as_str()) {
                continue;
            }
        }
        let surface = &text[kept[0].start..kept[kept.len() - 1].end];
        if stoplist.contains(surface) {
            continue;
        }
        out.push(SurfaceMatch {
            surface: normalize_spaces(surface),
            char_offset: kept[0].char_start,
        });
    }
    out
}

fn normalize_spaces(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// How person names are found in article text.
#[derive(Debug, Clone, Default)]
pub enum Extractor {
    Gazetteer(Gazetteer),
    #[default]
    Heuristic,
    /// Finds nothing; used with imported mentions.
    Disabled,
}

/// Mentions in one article, with `canonical` still equal to `surface`.
///
/// Title is scanned before body; offsets are strictly increasing.
pub fn extract_mentions(article: &ArticleRecord, extractor: &Extractor, stoplist: &Stoplist) -> Vec<MentionEvent> {
    let text = article.text();
    let matches = match extractor {
        Extractor::Gazetteer(g) => match_gazetteer(&text, g),
        Extractor::Heuristic => match_heuristic(&text, stoplist),
        Extractor::Disabled => Vec::new(),
    };
    matches
        .into_iter()
        .filter(|m| !stoplist.contains(&m.surface))
        .map(|m| MentionEvent {
            article_id: article.id.clone(),
            date: article.date,
            canonical: m.surface.clone(),
            surface: m.surface,
            char_offset: m.char_offset,
        })
        .collect()
}

/// Surface-to-canonical name mapping plus the error stoplist.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    mapping: BTreeMap<String, String>,
    stoplist: Stoplist,
}

fn last_token(name: &str) -> Option<&str> {
    let mut parts = name.split_whitespace();
    let first = parts.next()?;
    Some(parts.last().unwrap_or(first))
}

/// Groups surfaces by the last-token rule.
pub fn build_alias_table<'a, I>(surfaces: I) -> Result<AliasTable, NerError>
where
    I: IntoIterator<Item = &'a str>,
{
    AliasTable::build(surfaces, &[], Stoplist::default())
}

impl AliasTable {
    /// Builds the table from observed surfaces, then applies seeded pairs,
    /// which take precedence over the last-token rule.
    pub fn build<'a, I>(surfaces: I, seeds: &[(String, String)], stoplist: Stoplist) -> Result<Self, NerError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let distinct: BTreeSet<&str> = surfaces.into_iter().collect();
        if distinct.is_empty() && seeds.is_empty() {
            return Err(NerError::EmptyInput);
        }
        let singles: HashSet<&str> = distinct
            .iter()
            .copied()
            .filter(|s| s.split_whitespace().count() == 1)
            .collect();

        let mut mapping = BTreeMap::new();
        for s in &distinct {
            let canonical = match last_token(s) {
                Some(last) if last != *s && singles.contains(last) => last,
                _ => s,
            };
            mapping.insert(s.to_string(), canonical.to_string());
        }
        for (alias, canonical) in seeds {
            mapping.insert(alias.clone(), canonical.clone());
            mapping.entry(canonical.clone()).or_insert_with(|| canonical.clone());
        }

        // resolve chains so that canonicals are fixed points
        let keys: Vec<String> = mapping.keys().cloned().collect();
        for key in keys {
            let mut seen = HashSet::new();
            let mut target = mapping[&key].clone();
            while let Some(next) = mapping.get(&target) {
                if *next == target || !seen.insert(target.clone()) {
                    break;
                }
                target = next.clone();
            }
            mapping.insert(key, target);
        }
        let canonicals: Vec<String> = mapping.values().cloned().collect();
        for c in canonicals {
            mapping.insert(c.clone(), c);
        }
        Ok(Self { mapping, stoplist })
    }

    /// Canonical form of a surface; unknown surfaces map to themselves.
    pub fn canonical<'a>(&'a self, surface: &'a str) -> &'a str {
        self.mapping.get(surface).map_or(surface, String::as_str)
    }

    pub fn is_stopped(&self, canonical: &str) -> bool {
        self.stoplist.contains(canonical)
    }

    pub fn stoplist(&self) -> &Stoplist {
        &self.stoplist
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.mapping.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

pub fn normalize(event: &MentionEvent, table: &AliasTable) -> MentionEvent {
    MentionEvent {
        canonical: table.canonical(&event.surface).to_string(),
        ..event.clone()
    }
}

/// Defaults to heuristic extraction, the built-in stoplist and occurrence
/// counting.
#[derive(Debug, Clone)]
pub struct ExtractConfig {
    pub extractor: Extractor,
    pub stoplist: Stoplist,
    pub count_mode: CountMode,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            extractor: Extractor::default(),
            stoplist: Stoplist::builtin(),
            count_mode: CountMode::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub events: Vec<MentionEvent>,
    pub aliases: AliasTable,
}

/// Full pipeline: extract, build aliases, normalize, drop stoplisted
/// canonicals and apply the count mode.
pub fn extract_corpus(articles: &[ArticleRecord], config: &ExtractConfig) -> Extraction {
    let raw: Vec<MentionEvent> = articles
        .par_iter()
        .flat_map_iter(|a| extract_mentions(a, &config.extractor, &config.stoplist))
        .collect();
    let seeds = match &config.extractor {
        Extractor::Gazetteer(g) => g.seeds().to_vec(),
        _ => Vec::new(),
    };
    finish(raw, &seeds, config.stoplist.clone(), config.count_mode)
}

fn finish(raw: Vec<MentionEvent>, seeds: &[(String, String)], stoplist: Stoplist, count_mode: CountMode) -> Extraction {
    let aliases =
        AliasTable::build(raw.iter().map(|e| e.surface.as_str()), seeds, stoplist.clone()).unwrap_or_else(|_| {
            AliasTable {
                mapping: BTreeMap::new(),
                stoplist,
            }
        });
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let events = raw
        .iter()
        .map(|e| normalize(e, &aliases))
        .filter(|e| !aliases.is_stopped(&e.canonical))
        .filter(|e| match count_mode {
            CountMode::Occurrence => true,
            CountMode::Article => seen.insert((e.article_id.clone(), e.canonical.clone())),
        })
        .collect();
    Extraction { events, aliases }
}

#[derive(Deserialize)]
struct ImportedMention {
    article_id: String,
    date: String,
    surface: String,
    #[serde(default)]
    char_offset: Option<usize>,
}

/// Reads externally extracted mentions (`{article_id, date, surface}` per
/// line) and runs them through the same alias and stoplist stages.
pub fn import_mentions<R: BufRead>(
    reader: R,
    stoplist: Stoplist,
    count_mode: CountMode,
) -> Result<Extraction, NerError> {
    let mut raw = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| NerError::Import { line: i + 1, message };
        let m: ImportedMention = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let date = parse_date(&m.date).map_err(|e| err(e.to_string()))?;
        let surface = normalize_spaces(&m.surface);
        if surface.is_empty() {
            return Err(err("empty surface".into()));
        }
        raw.push(MentionEvent {
            article_id: m.article_id,
            date,
            canonical: surface.clone(),
            surface,
            char_offset: m.char_offset.unwrap_or(0),
        });
    }
    raw.retain(|e| !stoplist.contains(&e.surface));
    Ok(finish(raw, &[], stoplist, count_mode))
}
