//! Zero-filled daily mention counts per person, window views and exact
//! rolling sums.
//!
//! A window with end date `t` and length `n` always covers the inclusive day
//! span `[t - n + 1, t]`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::ner::MentionEvent;
use crate::store::CorpusStore;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("empty date range: {start} is after {end}")]
    EmptyRange { start: NaiveDate, end: NaiveDate },
    #[error("requested {requested} is outside the available range {available}")]
    OutOfRange { requested: DateRange, available: String },
    #[error("unknown person {0:?}")]
    UnknownPerson(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("mention on {0} lies outside the series range")]
    EventOutOfRange(NaiveDate),
}

/// Inclusive span of calendar days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateRange {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateRange {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self, SeriesError> {
        if start > end {
            return Err(SeriesError::EmptyRange { start, end });
        }
        Ok(Self { start, end })
    }

    pub fn days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }

    pub fn contains_range(&self, other: &DateRange) -> bool {
        self.contains(other.start) && self.contains(other.end)
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start;
        (0..self.days() as u64).map(move |i| start + Days::new(i))
    }
}

impl fmt::Display for DateRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

fn out_of_range(requested: DateRange, available: Option<DateRange>) -> SeriesError {
    SeriesError::OutOfRange {
        requested,
        available: available.map_or_else(|| "(empty)".to_string(), |r| r.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Pearson,
    Cosine,
}

impl Method {
    /// Smallest window length for which the method can be defined.
    pub fn min_window(self) -> usize {
        match self {
            Method::Pearson => 2,
            Method::Cosine => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pearson => "pearson",
            Method::Cosine => "cosine",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pearson" => Ok(Method::Pearson),
            "cosine" => Ok(Method::Cosine),
            other => Err(format!("unknown method {other:?} (expected pearson|cosine)")),
        }
    }
}

/// The time parameter of the similarity measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    pub end_date: NaiveDate,
    pub n: usize,
    pub method: Method,
}

/// Window length used when none is given.
pub const DEFAULT_WINDOW: usize = 30;

impl WindowSpec {
    pub fn new(end_date: NaiveDate, n: usize, method: Method) -> Result<Self, SeriesError> {
        check_window(n, method)?;
        Ok(Self { end_date, n, method })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.end_date - Days::new(self.n as u64 - 1)
    }

    pub fn range(&self) -> DateRange {
        DateRange {
            start: self.start_date(),
            end: self.end_date,
        }
    }
}

pub fn check_window(n: usize, method: Method) -> Result<(), SeriesError> {
    if n < method.min_window() {
        return Err(SeriesError::InvalidWindow(format!(
            "n must be >= {} for {method}",
            method.min_window()
        )));
    }
    Ok(())
}

/// Daily mention counts for one canonical person, one entry per day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonSeries {
    pub person: String,
    pub start_date: NaiveDate,
    pub counts: Vec<u32>,
}

impl PersonSeries {
    pub fn end_date(&self) -> NaiveDate {
        self.start_date + Days::new(self.counts.len() as u64 - 1)
    }

    pub fn range(&self) -> DateRange {
        DateRange {
            start: self.start_date,
            end: self.end_date(),
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    fn index_of(&self, date: NaiveDate) -> usize {
        (date - self.start_date).num_days() as usize
    }

    /// Counts over an inclusive sub-range.
    pub fn slice(&self, range: DateRange) -> Result<&[u32], SeriesError> {
        if !self.range().contains_range(&range) {
            return Err(out_of_range(range, Some(self.range())));
        }
        Ok(&self.counts[self.index_of(range.start)..=self.index_of(range.end)])
    }

    /// The `n` daily counts ending at and including `w.end_date`.
    pub fn window_view(&self, w: &WindowSpec) -> Result<&[u32], SeriesError> {
        if w.n == 0 {
            return Err(SeriesError::InvalidWindow(format!("n = {}", w.n)));
        }
        let start = w
            .end_date
            .checked_sub_days(Days::new(w.n as u64 - 1))
            .ok_or_else(|| SeriesError::InvalidWindow(format!("n = {}", w.n)))?;
        self.slice(DateRange { start, end: w.end_date })
    }
}

/// One zero-filled series per person appearing in `events`.
pub fn build_daily_counts(
    events: &[MentionEvent],
    range: DateRange,
) -> Result<BTreeMap<String, PersonSeries>, SeriesError> {
    DateRange::new(range.start, range.end)?;
    let days = range.days();
    let mut out: BTreeMap<String, PersonSeries> = BTreeMap::new();
    for e in events {
        if !range.contains(e.date) {
            return Err(SeriesError::EventOutOfRange(e.date));
        }
        let series = out.entry(e.canonical.clone()).or_insert_with(|| PersonSeries {
            person: e.canonical.clone(),
            start_date: range.start,
            counts: vec![0; days],
        });
        series.counts[(e.date - range.start).num_days() as usize] += 1;
    }
    Ok(out)
}

/// Immutable index of all person series over the corpus date range.
#[derive(Debug, Clone, Default)]
pub struct SeriesIndex {
    range: Option<DateRange>,
    series: BTreeMap<String, PersonSeries>,
}

impl SeriesIndex {
    pub fn new(range: DateRange, events: &[MentionEvent]) -> Result<Self, SeriesError> {
        Ok(Self {
            range: Some(range),
            series: build_daily_counts(events, range)?,
        })
    }

    pub fn from_series(range: DateRange, series: impl IntoIterator<Item = PersonSeries>) -> Result<Self, SeriesError> {
        let mut map = BTreeMap::new();
        for s in series {
            if s.range() != range {
                return Err(out_of_range(s.range(), Some(range)));
            }
            map.insert(s.person.clone(), s);
        }
        Ok(Self {
            range: Some(range),
            series: map,
        })
    }

    /// Index over the store's mentions, spanning the corpus date range.
    pub fn from_store(store: &CorpusStore) -> Result<Self, SeriesError> {
        let stats = store.corpus_stats();
        let events = store.mentions().map(|m| m.events.as_slice()).unwrap_or(&[]);
        match (stats.date_min, stats.date_max) {
            (Some(lo), Some(hi)) => {
                // imported mentions may reference dates outside the article span
                let lo = events.iter().map(|e| e.date).min().map_or(lo, |d| d.min(lo));
                let hi = events.iter().map(|e| e.date).max().map_or(hi, |d| d.max(hi));
                Self::new(DateRange::new(lo, hi)?, events)
            }
            _ => match (events.iter().map(|e| e.date).min(), events.iter().map(|e| e.date).max()) {
                (Some(lo), Some(hi)) => Self::new(DateRange::new(lo, hi)?, events),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn range(&self) -> Option<DateRange> {
        self.range
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn persons(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn get(&self, person: &str) -> Result<&PersonSeries, SeriesError> {
        self.series
            .get(person)
            .ok_or_else(|| SeriesError::UnknownPerson(person.to_string()))
    }

    /// Resolves an optional query range against the index range.
    pub fn resolve_range(&self, requested: Option<DateRange>) -> Result<DateRange, SeriesError> {
        match (requested, self.range) {
            (None, Some(r)) => Ok(r),
            (Some(req), Some(r)) if r.contains_range(&req) => Ok(req),
            (Some(req), avail) => Err(out_of_range(req, avail)),
            (None, None) => Err(SeriesError::InvalidWindow("index is empty".into())),
        }
    }

    /// Persons by total mentions in `range`, descending, ties by name.
    pub fn top_k(&self, range: Option<DateRange>, k: usize) -> Result<Vec<(String, u64)>, SeriesError> {
        if self.series.is_empty() {
            return Ok(Vec::new());
        }
        let range = self.resolve_range(range)?;
        let mut totals: Vec<(String, u64)> = self
            .series
            .values()
            .map(|s| {
                let total = s.slice(range).map(|c| c.iter().map(|&v| u64::from(v)).sum());
                total.map(|t| (s.person.clone(), t))
            })
            .collect::<Result<_, _>>()?;
        totals.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        totals.truncate(k);
        Ok(totals)
    }

    /// Writes `date,person,count` rows, zero-filled, date-major.
    pub fn write_csv<W: Write>(&self, w: W, range: Option<DateRange>) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["date", "person", "count"])?;
        if self.series.is_empty() {
            return out.flush();
        }
        let range = self.resolve_range(range).map_err(io::Error::other)?;
        let offset = self.range.map_or(0, |r| (range.start - r.start).num_days() as usize);
        for (i, day) in range.iter().enumerate() {
            let day = day.to_string();
            for s in self.series.values() {
                out.write_record([day.as_str(), s.person.as_str(), &s.counts[offset + i].to_string()])?;
            }
        }
        out.flush()
    }
}

/// Σx and Σx² over a window of integer counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Moments {
    pub len: usize,
    pub sum: i128,
    pub sum_sq: i128,
}

impl Moments {
    pub fn from_window(values: &[u32]) -> Self {
        values.iter().fold(
            Self {
                len: values.len(),
                ..Self::default()
            },
            |m, &v| {
                let v = i128::from(v);
                Self {
                    sum: m.sum + v,
                    sum_sq: m.sum_sq + v * v,
                    ..m
                }
            },
        )
    }

    pub fn slide(&mut self, leaving: u32, entering: u32) {
        let (l, e) = (i128::from(leaving), i128::from(entering));
        self.sum += e - l;
        self.sum_sq += e * e - l * l;
    }

    /// `n·Σx² − (Σx)²`, zero exactly when the window is constant.
    pub fn scaled_variance(&self) -> i128 {
        self.len as i128 * self.sum_sq - self.sum * self.sum
    }
}

/// Window sums for a tracked pair of series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RollingStats {
    pub x: Moments,
    pub y: Moments,
    pub sum_xy: i128,
}

impl RollingStats {
    pub fn from_windows(x: &[u32], y: &[u32]) -> Self {
        assert_eq!(x.len(), y.len(), "window lengths differ");
        Self {
            x: Moments::from_window(x),
            y: Moments::from_window(y),
            sum_xy: cross_sum(x, y),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len
    }

    pub fn is_empty(&self) -> bool {
        self.x.len == 0
    }

    /// Moves the window one day: drops `leaving = (x, y)` and adds `entering`.
    pub fn slide(&mut self, leaving: (u32, u32), entering: (u32, u32)) {
        self.x.slide(leaving.0, entering.0);
        self.y.slide(leaving.1, entering.1);
        self.sum_xy += i128::from(entering.0) * i128::from(entering.1) - i128::from(leaving.0) * i128::from(leaving.1);
    }
}

pub fn cross_sum(x: &[u32], y: &[u32]) -> i128 {
    x.iter().zip(y).map(|(&a, &b)| i128::from(a) * i128::from(b)).sum()
}

/// Least-squares slope of log(count) against log(rank). Zero counts are
/// ignored; `None` with fewer than two usable points.
pub fn zipf_slope(counts_by_rank: &[u64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = counts_by_rank
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (((i + 1) as f64).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
