//! Request dispatch for the read-only query API.
//!
//! Every endpoint is a pure function of the in-memory [`SeriesIndex`] and the
//! query string, so identical requests produce identical bytes.

use chrono::NaiveDate;
use serde::Serialize;

use inthenews_core::projection::{classical_mds, diagnostics, to_distance, MdsDiagnostics};
use inthenews_core::similarity::{correlation_over_time, similarity_matrix, Similarity, SimilarityError};
use inthenews_core::timeseries::SeriesError;
use inthenews_core::{DateRange, Method, SeriesIndex, WindowSpec, DEFAULT_WINDOW};

use crate::QueryLimits;

/// Rows returned by `/api/persons` when `limit` is absent.
pub const DEFAULT_PERSON_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: 400,
            code,
            message: message.into(),
        }
    }

    fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: 404,
            code,
            message: message.into(),
        }
    }

    pub fn into_response(self) -> ApiResponse {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            message: &'a str,
        }
        ApiResponse {
            status: self.status,
            body: serde_json::to_string(&Body {
                error: self.code,
                message: &self.message,
            })
            .expect("error body serializes"),
        }
    }
}

impl From<SeriesError> for ApiError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::UnknownPerson(_) => ApiError::not_found("unknown_person", e.to_string()),
            SeriesError::OutOfRange { .. } | SeriesError::EventOutOfRange(_) => {
                ApiError::bad("out_of_range", e.to_string())
            }
            SeriesError::EmptyRange { .. } => ApiError::bad("invalid_range", e.to_string()),
            SeriesError::InvalidWindow(_) => ApiError::bad("invalid_window", e.to_string()),
        }
    }
}

impl From<SimilarityError> for ApiError {
    fn from(e: SimilarityError) -> Self {
        match e {
            SimilarityError::Series(s) => s.into(),
            SimilarityError::DuplicatePerson(_) => ApiError::bad("duplicate_person", e.to_string()),
            SimilarityError::TooShort { .. } => ApiError::bad("invalid_window", e.to_string()),
            other => ApiError::bad("bad_request", other.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

struct Params(Vec<(String, String)>);

impl Params {
    fn parse(query: &str) -> Self {
        Self(
            form_urlencoded::parse(query.as_bytes())
                .map(|(k, v)| (k.into_owned(), v.into_owned()))
                .collect(),
        )
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .rev()
            .find(|(k, v)| k == key && !v.is_empty())
            .map(|(_, v)| v.as_str())
    }

    fn required(&self, key: &str) -> ApiResult<&str> {
        self.get(key)
            .ok_or_else(|| ApiError::bad("missing_parameter", format!("missing required parameter `{key}`")))
    }

    /// Comma-separated and/or repeated values.
    fn list(&self, key: &str) -> Vec<String> {
        self.0
            .iter()
            .filter(|(k, _)| k == key)
            .flat_map(|(_, v)| v.split(','))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }

    fn date(&self, key: &str) -> ApiResult<Option<NaiveDate>> {
        self.get(key)
            .map(|v| {
                NaiveDate::parse_from_str(v, "%Y-%m-%d")
                    .map_err(|_| ApiError::bad("invalid_date", format!("`{key}` must be YYYY-MM-DD, got {v:?}")))
            })
            .transpose()
    }

    fn usize(&self, key: &str) -> ApiResult<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| ApiError::bad("invalid_parameter", format!("`{key}` must be a non-negative integer")))
            })
            .transpose()
    }

    fn method(&self) -> ApiResult<Method> {
        self.get("method").map_or(Ok(Method::Pearson), |m| {
            m.parse().map_err(|e: String| ApiError::bad("invalid_parameter", e))
        })
    }
}

/// Shared state behind all endpoints.
#[derive(Debug, Clone)]
pub struct ApiState {
    index: SeriesIndex,
    limits: QueryLimits,
}

#[derive(Serialize)]
struct RangeOut {
    from: NaiveDate,
    to: NaiveDate,
}

impl From<DateRange> for RangeOut {
    fn from(r: DateRange) -> Self {
        Self {
            from: r.start,
            to: r.end,
        }
    }
}

#[derive(Serialize)]
struct PersonRow {
    person: String,
    total: u64,
}

#[derive(Serialize)]
struct PersonsOut {
    range: Option<RangeOut>,
    persons: Vec<PersonRow>,
}

#[derive(Serialize)]
struct CountPoint {
    date: NaiveDate,
    count: u32,
}

#[derive(Serialize)]
struct TimeseriesOut<'a> {
    person: &'a str,
    from: NaiveDate,
    to: NaiveDate,
    points: Vec<CountPoint>,
}

#[derive(Serialize)]
struct CorrelationPoint {
    end_date: NaiveDate,
    value: Similarity,
}

#[derive(Serialize)]
struct CorrelationOut<'a> {
    a: &'a str,
    b: &'a str,
    n: usize,
    method: Method,
    from: NaiveDate,
    to: NaiveDate,
    points: Vec<CorrelationPoint>,
}

#[derive(Serialize)]
struct MatrixOut {
    persons: Vec<String>,
    end: NaiveDate,
    n: usize,
    method: Method,
    values: Vec<Vec<Similarity>>,
}

#[derive(Serialize)]
struct Coord {
    person: String,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct MdsOut {
    persons: Vec<String>,
    end: NaiveDate,
    n: usize,
    method: Method,
    coords: Vec<Coord>,
    stress: f64,
    diagnostics: MdsDiagnostics,
}

fn json<T: Serialize>(value: &T) -> ApiResponse {
    ApiResponse {
        status: 200,
        body: serde_json::to_string(value).expect("payload serializes"),
    }
}

impl ApiState {
    pub fn new(index: SeriesIndex, limits: QueryLimits) -> Self {
        Self { index, limits }
    }

    pub fn index(&self) -> &SeriesIndex {
        &self.index
    }

    pub fn limits(&self) -> &QueryLimits {
        &self.limits
    }

    /// Dispatches one GET request. `query` is the raw query string without `?`.
    pub fn handle(&self, path: &str, query: &str) -> ApiResponse {
        let params = Params::parse(query);
        let result = match path.trim_end_matches('/') {
            "/api/persons" => self.persons(&params),
            "/api/timeseries" => self.timeseries(&params),
            "/api/correlation" => self.correlation(&params),
            "/api/matrix" => self.matrix(&params),
            "/api/mds" => self.mds(&params),
            _ => Err(ApiError::not_found("not_found", format!("no endpoint at {path}"))),
        };
        result.unwrap_or_else(ApiError::into_response)
    }

    fn query_range(&self, params: &Params) -> ApiResult<Option<DateRange>> {
        let (mut from, mut to) = (params.date("from")?, params.date("to")?);
        if let Some(r) = params.get("range") {
            let (a, b) = r
                .split_once("..")
                .ok_or_else(|| ApiError::bad("invalid_range", "`range` must look like FROM..TO"))?;
            let parse = |s: &str| {
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .map_err(|_| ApiError::bad("invalid_date", format!("bad date {s:?} in `range`")))
            };
            from = Some(parse(a)?);
            to = Some(parse(b)?);
        }
        if from.is_none() && to.is_none() {
            return Ok(None);
        }
        let Some(full) = self.index.range() else {
            return Err(ApiError::bad("out_of_range", "the store has no dated mentions"));
        };
        let range = DateRange::new(from.unwrap_or(full.start), to.unwrap_or(full.end))?;
        Ok(Some(range))
    }

    fn check_span(&self, range: DateRange) -> ApiResult<()> {
        if range.days() > self.limits.max_range_days {
            return Err(ApiError::bad(
                "range_too_large",
                format!(
                    "range spans {} days; the limit is {}",
                    range.days(),
                    self.limits.max_range_days
                ),
            ));
        }
        Ok(())
    }

    fn persons(&self, params: &Params) -> ApiResult<ApiResponse> {
        let range = self.query_range(params)?;
        let limit = params.usize("limit")?.unwrap_or(DEFAULT_PERSON_LIMIT);
        let all = self.index.top_k(range, usize::MAX)?;
        let prefix = params.get("q").map(str::to_lowercase);
        let persons = all
            .into_iter()
            .filter(|(p, _)| prefix.as_deref().is_none_or(|q| p.to_lowercase().starts_with(q)))
            .take(limit)
            .map(|(person, total)| PersonRow { person, total })
            .collect();
        let range = if self.index.is_empty() {
            None
        } else {
            Some(self.index.resolve_range(range)?.into())
        };
        Ok(json(&PersonsOut { range, persons }))
    }

    fn timeseries(&self, params: &Params) -> ApiResult<ApiResponse> {
        let person = params.required("person")?;
        let series = self.index.get(person)?;
        let range = self.index.resolve_range(self.query_range(params)?)?;
        self.check_span(range)?;
        let counts = series.slice(range)?;
        let points = range
            .iter()
            .zip(counts)
            .map(|(date, &count)| CountPoint { date, count })
            .collect();
        Ok(json(&TimeseriesOut {
            person,
            from: range.start,
            to: range.end,
            points,
        }))
    }

    fn correlation(&self, params: &Params) -> ApiResult<ApiResponse> {
        let a = params.required("a")?;
        let b = params.required("b")?;
        let n = params.usize("n")?.unwrap_or(DEFAULT_WINDOW);
        let method = params.method()?;
        self.index.get(a)?;
        self.index.get(b)?;
        if n < method.min_window() {
            return Err(ApiError::bad(
                "invalid_window",
                format!("n must be >= {} for {method}", method.min_window()),
            ));
        }
        let range = self.index.resolve_range(self.query_range(params)?)?;
        self.check_span(range)?;
        let series = correlation_over_time(&self.index, a, b, n, Some(range), method)?;
        Ok(json(&CorrelationOut {
            a,
            b,
            n,
            method,
            from: range.start,
            to: range.end,
            points: series
                .points
                .into_iter()
                .map(|(end_date, value)| CorrelationPoint { end_date, value })
                .collect(),
        }))
    }

    fn window(&self, params: &Params) -> ApiResult<WindowSpec> {
        let n = params.usize("n")?.unwrap_or(DEFAULT_WINDOW);
        let method = params.method()?;
        let end = match params.date("end")? {
            Some(d) => d,
            None => {
                self.index
                    .range()
                    .ok_or_else(|| ApiError::bad("out_of_range", "the store has no dated mentions"))?
                    .end
            }
        };
        Ok(WindowSpec::new(end, n, method)?)
    }

    fn person_list(&self, params: &Params, min: usize) -> ApiResult<Vec<String>> {
        let persons = params.list("persons");
        if persons.len() < min {
            return Err(ApiError::bad(
                "too_few_persons",
                format!("at least {min} persons are required, got {}", persons.len()),
            ));
        }
        if persons.len() > self.limits.max_persons_per_matrix {
            return Err(ApiError::bad(
                "too_many_persons",
                format!("at most {} persons are allowed", self.limits.max_persons_per_matrix),
            ));
        }
        for (i, p) in persons.iter().enumerate() {
            if persons[..i].contains(p) {
                return Err(ApiError::bad("duplicate_person", format!("{p:?} is listed twice")));
            }
        }
        for p in &persons {
            self.index.get(p)?;
        }
        Ok(persons)
    }

    fn matrix(&self, params: &Params) -> ApiResult<ApiResponse> {
        let persons = self.person_list(params, 2)?;
        let w = self.window(params)?;
        let refs: Vec<&str> = persons.iter().map(String::as_str).collect();
        let m = similarity_matrix(&self.index, &refs, &w)?;
        Ok(json(&MatrixOut {
            values: m.rounded(2),
            persons,
            end: w.end_date,
            n: w.n,
            method: w.method,
        }))
    }

    fn mds(&self, params: &Params) -> ApiResult<ApiResponse> {
        let persons = self.person_list(params, 3)?;
        let w = self.window(params)?;
        let refs: Vec<&str> = persons.iter().map(String::as_str).collect();
        let m = similarity_matrix(&self.index, &refs, &w)?;
        let d = to_distance(&m);
        let e = classical_mds(&d, 2).map_err(|e| ApiError::bad("bad_request", e.to_string()))?;
        let diag = diagnostics(&e, &d);
        Ok(json(&MdsOut {
            coords: persons
                .iter()
                .zip(&e.coords)
                .map(|(p, c)| Coord {
                    person: p.clone(),
                    x: c[0],
                    y: c[1],
                })
                .collect(),
            persons,
            end: w.end_date,
            n: w.n,
            method: w.method,
            stress: e.stress,
            diagnostics: diag,
        }))
    }
}
