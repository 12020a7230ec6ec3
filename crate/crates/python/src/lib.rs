//! Python bindings. Dates cross the boundary as ISO `YYYY-MM-DD` strings and
//! undefined similarities as `None`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use chrono::NaiveDate;
use pyo3::exceptions::{PyKeyError, PyOSError, PyValueError};
use pyo3::prelude::*;

use inthenews_core::corpus::{self, CorpusError};
use inthenews_core::ner::{self, ExtractConfig, NerError};
use inthenews_core::projection::{self, ProjectionError};
use inthenews_core::similarity::{self as sim, SimilarityError};
use inthenews_core::store::{MentionSet, StoreError};
use inthenews_core::timeseries::SeriesError;
use inthenews_core::{
    CleaningRules, CorpusStore, CountMode, DateRange, Extractor, Gazetteer, Method, PersonSeries, Stoplist, WindowSpec,
    DEFAULT_WINDOW,
};

fn series_err(e: SeriesError) -> PyErr {
    match e {
        SeriesError::UnknownPerson(p) => PyKeyError::new_err(p),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn sim_err(e: SimilarityError) -> PyErr {
    match e {
        SimilarityError::Series(s) => series_err(s),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn store_err(e: StoreError) -> PyErr {
    if e.is_io() {
        PyOSError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn corpus_err(e: CorpusError) -> PyErr {
    match e {
        CorpusError::Io(io) => io.into(),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn ner_err(e: NerError) -> PyErr {
    match e {
        NerError::Io(io) => io.into(),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn projection_err(e: ProjectionError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn date(s: &str) -> PyResult<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| PyValueError::new_err(format!("bad date {s:?}, want YYYY-MM-DD")))
}

fn opt_date(s: Option<&str>) -> PyResult<Option<NaiveDate>> {
    s.map(date).transpose()
}

fn method(s: &str) -> PyResult<Method> {
    s.parse().map_err(PyValueError::new_err)
}

fn to_json_string<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Pearson correlation; `None` when either vector is constant.
#[pyfunction]
fn pearson(x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<f64>> {
    sim::pearson(&x, &y).map_err(sim_err)
}

/// Cosine similarity; `None` when either vector is all zeros.
#[pyfunction]
fn cosine(x: Vec<f64>, y: Vec<f64>) -> PyResult<Option<f64>> {
    sim::cosine(&x, &y).map_err(sim_err)
}

#[pyfunction]
#[pyo3(signature = (x, y, method = "pearson"))]
fn similarity(x: Vec<f64>, y: Vec<f64>, method: &str) -> PyResult<Option<f64>> {
    sim::similarity(&x, &y, self::method(method)?).map_err(sim_err)
}

/// `sqrt(2 (1 - s))`.
#[pyfunction]
fn similarity_to_distance(s: f64) -> f64 {
    projection::similarity_to_distance(s)
}

/// Classical MDS of a square distance matrix.
#[pyfunction]
#[pyo3(signature = (distances, persons = None, dim = 2))]
fn classical_mds(distances: Vec<Vec<f64>>, persons: Option<Vec<String>>, dim: usize) -> PyResult<Embedding> {
    let n = distances.len();
    if distances.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("distance matrix must be square"));
    }
    let persons = persons.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
    let dm = projection::DistanceMatrix::new(persons, distances.concat()).map_err(projection_err)?;
    embed(&dm, dim)
}

fn embed(dm: &projection::DistanceMatrix, dim: usize) -> PyResult<Embedding> {
    let e = projection::classical_mds(dm, dim).map_err(projection_err)?;
    let diagnostics = projection::diagnostics(&e, dm);
    Ok(Embedding { inner: e, diagnostics })
}

#[pyclass(module = "inthenews", frozen)]
struct Embedding {
    inner: inthenews_core::Embedding,
    diagnostics: projection::MdsDiagnostics,
}

#[pymethods]
impl Embedding {
    #[getter]
    fn persons(&self) -> Vec<String> {
        self.inner.persons.clone()
    }

    #[getter]
    fn coords(&self) -> Vec<Vec<f64>> {
        self.inner.coords.clone()
    }

    #[getter]
    fn stress(&self) -> f64 {
        self.inner.stress
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.degenerate
    }

    /// Diagnostics as a JSON string.
    fn diagnostics_json(&self) -> String {
        to_json_string(&self.diagnostics)
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<f64> {
        let n = self.inner.persons.len();
        if i >= n || j >= n {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.distance(i, j))
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    fn __len__(&self) -> usize {
        self.inner.persons.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Embedding(persons={}, stress={:.3e})",
            self.inner.persons.len(),
            self.inner.stress
        )
    }
}

#[pyclass(module = "inthenews", frozen)]
struct SimilarityMatrix {
    inner: inthenews_core::SimilarityMatrix,
}

#[pymethods]
impl SimilarityMatrix {
    #[getter]
    fn persons(&self) -> Vec<String> {
        self.inner.persons.clone()
    }

    /// Full-precision rows.
    #[getter]
    fn values(&self) -> Vec<Vec<Option<f64>>> {
        self.inner.rows().map(<[_]>::to_vec).collect()
    }

    fn rounded(&self, decimals: i32) -> Vec<Vec<Option<f64>>> {
        self.inner.rounded(decimals)
    }

    fn get(&self, a: &str, b: &str) -> PyResult<Option<f64>> {
        let pos = |p: &str| {
            self.inner
                .persons
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| PyKeyError::new_err(p.to_string()))
        };
        Ok(self.inner.get(pos(a)?, pos(b)?))
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    /// 2-D MDS layout of this matrix.
    #[pyo3(signature = (dim = 2))]
    fn mds(&self, dim: usize) -> PyResult<Embedding> {
        embed(&projection::to_distance(&self.inner), dim)
    }

    fn __len__(&self) -> usize {
        self.inner.persons.len()
    }
}

/// In-memory daily count series per person.
#[pyclass(module = "inthenews", frozen)]
struct SeriesIndex {
    inner: inthenews_core::SeriesIndex,
}

impl SeriesIndex {
    fn range_arg(&self, from: Option<&str>, to: Option<&str>) -> PyResult<Option<DateRange>> {
        let (from, to) = (opt_date(from)?, opt_date(to)?);
        if from.is_none() && to.is_none() {
            return Ok(None);
        }
        let full = self
            .inner
            .range()
            .ok_or_else(|| PyValueError::new_err("index is empty"))?;
        Ok(Some(
            DateRange::new(from.unwrap_or(full.start), to.unwrap_or(full.end)).map_err(series_err)?,
        ))
    }

    fn window(&self, end: Option<&str>, n: usize, method: &str) -> PyResult<WindowSpec> {
        let end = match opt_date(end)? {
            Some(d) => d,
            None => {
                self.inner
                    .range()
                    .ok_or_else(|| PyValueError::new_err("index is empty"))?
                    .end
            }
        };
        WindowSpec::new(end, n, self::method(method)?).map_err(series_err)
    }

    fn build_matrix(
        &self,
        persons: &[String],
        end: Option<&str>,
        n: usize,
        method: &str,
    ) -> PyResult<inthenews_core::SimilarityMatrix> {
        let w = self.window(end, n, method)?;
        let refs: Vec<&str> = persons.iter().map(String::as_str).collect();
        sim::similarity_matrix(&self.inner, &refs, &w).map_err(sim_err)
    }
}

#[pymethods]
impl SeriesIndex {
    /// Builds an index from `{person: counts}` all starting at `start`.
    #[staticmethod]
    fn from_counts(start: &str, counts: BTreeMap<String, Vec<u32>>) -> PyResult<Self> {
        let start = date(start)?;
        let len = counts.values().next().map_or(0, Vec::len);
        if len == 0 || counts.values().any(|c| c.len() != len) {
            return Err(PyValueError::new_err("all series must be non-empty and equally long"));
        }
        let end = start + chrono::Days::new(len as u64 - 1);
        let range = DateRange::new(start, end).map_err(series_err)?;
        let inner = inthenews_core::SeriesIndex::from_series(
            range,
            counts.into_iter().map(|(person, counts)| PersonSeries {
                person,
                start_date: start,
                counts,
            }),
        )
        .map_err(series_err)?;
        Ok(Self { inner })
    }

    fn persons(&self) -> Vec<String> {
        self.inner.persons().map(str::to_string).collect()
    }

    /// `(first_day, last_day)` or `None` for an empty index.
    fn range(&self) -> Option<(String, String)> {
        self.inner.range().map(|r| (r.start.to_string(), r.end.to_string()))
    }

    #[pyo3(signature = (person, start = None, end = None))]
    fn counts(&self, person: &str, start: Option<&str>, end: Option<&str>) -> PyResult<Vec<u32>> {
        let series = self.inner.get(person).map_err(series_err)?;
        let range = self
            .inner
            .resolve_range(self.range_arg(start, end)?)
            .map_err(series_err)?;
        Ok(series.slice(range).map_err(series_err)?.to_vec())
    }

    #[pyo3(signature = (k = 20, start = None, end = None))]
    fn top_k(&self, k: usize, start: Option<&str>, end: Option<&str>) -> PyResult<Vec<(String, u64)>> {
        self.inner.top_k(self.range_arg(start, end)?, k).map_err(series_err)
    }

    /// `[(end_date, value)]`, one point per window inside the range.
    #[pyo3(signature = (a, b, n = DEFAULT_WINDOW, start = None, end = None, method = "pearson"))]
    fn correlation(
        &self,
        a: &str,
        b: &str,
        n: usize,
        start: Option<&str>,
        end: Option<&str>,
        method: &str,
    ) -> PyResult<Vec<(String, Option<f64>)>> {
        let range = self.range_arg(start, end)?;
        let s = sim::correlation_over_time(&self.inner, a, b, n, range, self::method(method)?).map_err(sim_err)?;
        Ok(s.points.into_iter().map(|(d, v)| (d.to_string(), v)).collect())
    }

    #[pyo3(signature = (a, b, end = None, n = DEFAULT_WINDOW, method = "pearson"))]
    fn similarity_at(&self, a: &str, b: &str, end: Option<&str>, n: usize, method: &str) -> PyResult<Option<f64>> {
        let w = self.window(end, n, method)?;
        sim::similarity_at(&self.inner, a, b, &w).map_err(sim_err)
    }

    #[pyo3(signature = (persons, end = None, n = DEFAULT_WINDOW, method = "pearson"))]
    fn matrix(&self, persons: Vec<String>, end: Option<&str>, n: usize, method: &str) -> PyResult<SimilarityMatrix> {
        Ok(SimilarityMatrix {
            inner: self.build_matrix(&persons, end, n, method)?,
        })
    }

    #[pyo3(signature = (persons, end = None, n = DEFAULT_WINDOW, method = "pearson"))]
    fn mds(&self, persons: Vec<String>, end: Option<&str>, n: usize, method: &str) -> PyResult<Embedding> {
        if persons.len() < 3 {
            return Err(PyValueError::new_err("at least 3 persons are required"));
        }
        let m = self.build_matrix(&persons, end, n, method)?;
        embed(&projection::to_distance(&m), 2)
    }

    /// `date,person,count` CSV.
    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_csv(&mut buf, None)?;
        Ok(String::from_utf8(buf).expect("csv is utf-8"))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Articles and extracted mentions, persisted as one JSON file.
#[pyclass(module = "inthenews")]
struct Store {
    inner: CorpusStore,
}

#[pymethods]
impl Store {
    #[new]
    fn new() -> Self {
        Self {
            inner: CorpusStore::new(),
        }
    }

    #[staticmethod]
    fn open(path: PathBuf) -> PyResult<Self> {
        Ok(Self {
            inner: CorpusStore::open(path).map_err(store_err)?,
        })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(path).map_err(store_err)
    }

    /// Ingests a JSONL corpus; returns the report as a JSON string.
    #[pyo3(signature = (path, config = None))]
    fn ingest(&mut self, path: PathBuf, config: Option<PathBuf>) -> PyResult<String> {
        let rules = match config {
            Some(c) => CleaningRules::load(c).map_err(corpus_err)?,
            None => CleaningRules::default(),
        };
        let report = corpus::ingest(&mut self.inner, path, &rules).map_err(corpus_err)?;
        Ok(to_json_string(&report))
    }

    /// Extracts mentions, replacing earlier ones; returns the mention count.
    #[pyo3(signature = (gazetteer = None, stoplist = None, count_mode = "occurrence", heuristic = true, default_stoplist = true))]
    fn extract(
        &mut self,
        gazetteer: Option<PathBuf>,
        stoplist: Option<PathBuf>,
        count_mode: &str,
        heuristic: bool,
        default_stoplist: bool,
    ) -> PyResult<usize> {
        let extractor = match (gazetteer, heuristic) {
            (Some(g), _) => Extractor::Gazetteer(Gazetteer::load(g).map_err(ner_err)?),
            (None, true) => Extractor::Heuristic,
            (None, false) => Extractor::Disabled,
        };
        let mut stop = if default_stoplist {
            Stoplist::builtin()
        } else {
            Stoplist::default()
        };
        if let Some(p) = stoplist {
            stop.extend(ner::load_stoplist(p).map_err(ner_err)?);
        }
        let count_mode: CountMode = count_mode.parse().map_err(PyValueError::new_err)?;
        let x = ner::extract_corpus(
            self.inner.articles(),
            &ExtractConfig {
                extractor,
                stoplist: stop,
                count_mode,
            },
        );
        let n = x.events.len();
        self.inner.set_mentions(MentionSet {
            count_mode,
            events: x.events,
        });
        Ok(n)
    }

    #[getter]
    fn article_count(&self) -> usize {
        self.inner.article_count()
    }

    /// Corpus stats as a JSON string.
    fn stats(&self) -> String {
        to_json_string(&self.inner.corpus_stats())
    }

    /// Mention events as JSONL.
    fn mentions_jsonl(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.export_mentions(&mut buf)?;
        Ok(String::from_utf8(buf).expect("jsonl is utf-8"))
    }

    fn index(&self) -> PyResult<SeriesIndex> {
        Ok(SeriesIndex {
            inner: inthenews_core::SeriesIndex::from_store(&self.inner).map_err(series_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.article_count()
    }
}

#[pymodule]
fn inthenews(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_WINDOW", DEFAULT_WINDOW)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(similarity, m)?)?;
    m.add_function(wrap_pyfunction!(similarity_to_distance, m)?)?;
    m.add_function(wrap_pyfunction!(classical_mds, m)?)?;
    m.add_class::<Store>()?;
    m.add_class::<SeriesIndex>()?;
    m.add_class::<SimilarityMatrix>()?;
    m.add_class::<Embedding>()?;
    Ok(())
}
