//! Windowed person-to-person similarity.
//!
//! Pearson correlation over the trailing `n`-day window is the main measure;
//! cosine similarity is kept as a comparison mode. A similarity is `None`
//! (undefined) when a window has zero variance (Pearson) or zero norm
//! (cosine), which is never the same thing as a correlation of 0.
//!
//! The count-based paths work on exact integer window sums, so sliding a
//! window accumulates no rounding error.

use std::io::{self, Read, Write};

use chrono::{Days, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::timeseries::{
    check_window, cross_sum, DateRange, Method, Moments, RollingStats, SeriesError, SeriesIndex, WindowSpec,
};

/// A similarity value; `None` means undefined.
pub type Similarity = Option<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimilarityError {
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("n must be >= {min} for {method} (got {n})")]
    TooShort { n: usize, min: usize, method: Method },
    #[error("duplicate person {0:?}")]
    DuplicatePerson(String),
    #[error("malformed matrix csv: {0}")]
    MalformedCsv(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn clamp_unit(r: f64) -> f64 {
    r.clamp(-1.0, 1.0)
}

fn check_lengths(x: &[f64], y: &[f64], method: Method) -> Result<(), SimilarityError> {
    if x.len() != y.len() {
        return Err(SimilarityError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < method.min_window() {
        return Err(SimilarityError::TooShort {
            n: x.len(),
            min: method.min_window(),
            method,
        });
    }
    Ok(())
}

/// Pearson correlation of two real vectors, computed from centered values.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Similarity, SimilarityError> {
    check_lengths(x, y, Method::Pearson)?;
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Ok(None);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Ok(None);
    }
    Ok(Some(clamp_unit(sxy / (sxx * syy).sqrt())))
}

pub fn cosine(x: &[f64], y: &[f64]) -> Result<Similarity, SimilarityError> {
    check_lengths(x, y, Method::Cosine)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let nx = x.iter().map(|a| a * a).sum::<f64>();
    let ny = y.iter().map(|b| b * b).sum::<f64>();
    if nx == 0.0 || ny == 0.0 {
        return Ok(None);
    }
    Ok(Some(clamp_unit(dot / (nx * ny).sqrt())))
}

pub fn similarity(x: &[f64], y: &[f64], method: Method) -> Result<Similarity, SimilarityError> {
    match method {
        Method::Pearson => pearson(x, y),
        Method::Cosine => cosine(x, y),
    }
}

/// Similarity from exact window sums.
pub fn from_moments(x: &Moments, y: &Moments, sum_xy: i128, method: Method) -> Similarity {
    match method {
        Method::Pearson => {
            let vx = x.scaled_variance();
            let vy = y.scaled_variance();
            if vx <= 0 || vy <= 0 {
                return None;
            }
            let cov = x.len as i128 * sum_xy - x.sum * y.sum;
            Some(clamp_unit(cov as f64 / (vx as f64 * vy as f64).sqrt()))
        }
        Method::Cosine => {
            if x.sum_sq == 0 || y.sum_sq == 0 {
                return None;
            }
            Some(clamp_unit(sum_xy as f64 / (x.sum_sq as f64 * y.sum_sq as f64).sqrt()))
        }
    }
}

pub fn from_stats(stats: &RollingStats, method: Method) -> Similarity {
    from_moments(&stats.x, &stats.y, stats.sum_xy, method)
}

/// Similarity of two count windows.
pub fn count_similarity(x: &[u32], y: &[u32], method: Method) -> Result<Similarity, SimilarityError> {
    if x.len() != y.len() {
        return Err(SimilarityError::LengthMismatch(x.len(), y.len()));
    }
    check_window(x.len(), method)?;
    Ok(from_stats(&RollingStats::from_windows(x, y), method))
}

/// Similarity of persons `a` and `b` in window `w`.
pub fn similarity_at(index: &SeriesIndex, a: &str, b: &str, w: &WindowSpec) -> Result<Similarity, SimilarityError> {
    check_window(w.n, w.method)?;
    let xa = index.get(a)?.window_view(w)?;
    let xb = index.get(b)?.window_view(w)?;
    count_similarity(xa, xb, w.method)
}

/// Similarity of a pair as a function of the window end date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub person_a: String,
    pub person_b: String,
    pub n: usize,
    pub method: Method,
    pub points: Vec<(NaiveDate, Similarity)>,
}

impl CorrelationSeries {
    /// Writes `end_date,value` with an empty value for undefined points.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["end_date", "value"])?;
        for (date, value) in &self.points {
            out.write_record([date.to_string(), value.map(|v| v.to_string()).unwrap_or_default()])?;
        }
        out.flush()
    }

    pub fn defined_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().filter_map(|p| p.1)
    }
}

/// Slides an `n`-day window across `range`, one point per end date where the
/// whole window lies inside `range`. `range` defaults to the index range.
pub fn correlation_over_time(
    index: &SeriesIndex,
    a: &str,
    b: &str,
    n: usize,
    range: Option<DateRange>,
    method: Method,
) -> Result<CorrelationSeries, SimilarityError> {
    if n < method.min_window() {
        return Err(SimilarityError::TooShort {
            n,
            min: method.min_window(),
            method,
        });
    }
    let sa = index.get(a)?;
    let sb = index.get(b)?;
    let range = index.resolve_range(range)?;
    let xa = sa.slice(range)?;
    let xb = sb.slice(range)?;
    if xa.len() < n {
        return Err(SimilarityError::TooShort {
            n: xa.len(),
            min: n,
            method,
        });
    }

    let mut stats = RollingStats::from_windows(&xa[..n], &xb[..n]);
    let mut points = Vec::with_capacity(xa.len() - n + 1);
    let first_end = range.start + Days::new(n as u64 - 1);
    points.push((first_end, from_stats(&stats, method)));
    for i in n..xa.len() {
        stats.slide((xa[i - n], xb[i - n]), (xa[i], xb[i]));
        points.push((first_end + Days::new((i - n + 1) as u64), from_stats(&stats, method)));
    }
    Ok(CorrelationSeries {
        person_a: a.to_string(),
        person_b: b.to_string(),
        n,
        method,
        points,
    })
}

/// Symmetric person-by-person matrix of similarities for one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub persons: Vec<String>,
    pub window: WindowSpec,
    /// Row-major, `persons.len()²` cells.
    pub cells: Vec<Similarity>,
}

impl SimilarityMatrix {
    pub fn size(&self) -> usize {
        self.persons.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Similarity {
        self.cells[i * self.size() + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Similarity]> {
        self.cells.chunks(self.size().max(1))
    }

    /// Cell values rounded to `decimals` places for display.
    pub fn rounded(&self, decimals: i32) -> Vec<Vec<Similarity>> {
        let scale = 10f64.powi(decimals);
        self.rows()
            .map(|row| row.iter().map(|c| c.map(|v| (v * scale).round() / scale)).collect())
            .collect()
    }

    /// CSV with a header row and a leading name column; undefined cells are empty.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![String::new()];
        header.extend(self.persons.iter().cloned());
        out.write_record(&header)?;
        for (name, row) in self.persons.iter().zip(self.rows()) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()));
            out.write_record(&rec)?;
        }
        out.flush()
    }
}

/// Parses the CSV produced by [`SimilarityMatrix::write_csv`].
pub fn read_matrix_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Similarity>), SimilarityError> {
    let bad = |m: String| SimilarityError::MalformedCsv(m);
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    let persons: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut cells = Vec::with_capacity(persons.len() * persons.len());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.get(0) != persons.get(i).map(String::as_str) {
            return Err(bad(format!("row {i} label does not match header")));
        }
        for field in rec.iter().skip(1) {
            cells.push(if field.is_empty() {
                None
            } else {
                Some(field.parse::<f64>().map_err(|e| bad(e.to_string()))?)
            });
        }
    }
    if cells.len() != persons.len() * persons.len() {
        return Err(bad("matrix is not square".into()));
    }
    Ok((persons, cells))
}

/// All-pairs similarity for one window.
///
/// Per-person window moments are computed once; each pair then only needs
/// its cross sum. Cells are independent, so parallel evaluation is
/// deterministic.
pub fn similarity_matrix(
    index: &SeriesIndex,
    persons: &[&str],
    w: &WindowSpec,
) -> Result<SimilarityMatrix, SimilarityError> {
    check_window(w.n, w.method)?;
    for (i, p) in persons.iter().enumerate() {
        if persons[..i].contains(p) {
            return Err(SimilarityError::DuplicatePerson(p.to_string()));
        }
    }
    let windows: Vec<&[u32]> = persons
        .iter()
        .map(|p| index.get(p).and_then(|s| s.window_view(w)))
        .collect::<Result<_, _>>()?;
    let moments: Vec<Moments> = windows.iter().map(|x| Moments::from_window(x)).collect();

    let size = persons.len();
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (i..size).map(move |j| (i, j))).collect();
    let values: Vec<Similarity> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let sxy = if i == j {
                moments[i].sum_sq
            } else {
                cross_sum(windows[i], windows[j])
            };
            let v = from_moments(&moments[i], &moments[j], sxy, w.method);
            // self-similarity is exactly one wherever it is defined
            if i == j {
                v.map(|_| 1.0)
            } else {
                v
            }
        })
        .collect();

    let mut cells = vec![None; size * size];
    for (&(i, j), v) in pairs.iter().zip(values) {
        cells[i * size + j] = v;
        cells[j * size + i] = v;
    }
    Ok(SimilarityMatrix {
        persons: persons.iter().map(|p| p.to_string()).collect(),
        window: *w,
        cells,
    })
}
