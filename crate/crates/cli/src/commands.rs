use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use inthenews_core::corpus::{self, CorpusError};
use inthenews_core::ner::{self, load_stoplist, ExtractConfig, Extraction};
use inthenews_core::projection::{cells_to_distance, classical_mds, diagnostics, DistanceMatrix, MdsDiagnostics};
use inthenews_core::similarity::{read_matrix_csv, SimilarityError};
use inthenews_core::store::{MentionSet, StoreError};
use inthenews_core::synth::SyntheticCorpus;
use inthenews_core::timeseries::SeriesError;
use inthenews_core::{
    correlation_over_time, similarity_matrix, to_distance, CleaningRules, CorpusStore, CountMode, DateRange, Extractor,
    Gazetteer, Method, SeriesIndex, SimilarityMatrix, Stoplist, WindowSpec, DEFAULT_WINDOW,
};
use inthenews_service::{ApiState, QueryLimits};

#[derive(Debug)]
pub enum CliError {
    /// Bad input, unknown person, invalid window and the like.
    Domain(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Domain(e.to_string())
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<ner::NerError> for CliError {
    fn from(e: ner::NerError) -> Self {
        match e {
            ner::NerError::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SimilarityError> for CliError {
    fn from(e: SimilarityError) -> Self {
        CliError::Domain(e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

/// Person mention time series and windowed person similarity for news corpora.
#[derive(Debug, Parser)]
#[command(name = "inthenews", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean a JSONL corpus and add it to the store; prints corpus stats as JSON.
    Ingest(IngestArgs),
    /// Find person mentions in stored articles, replacing any previous mentions.
    Extract(ExtractArgs),
    /// Load externally extracted mentions ({article_id, date, surface} JSONL).
    ImportMentions(ImportArgs),
    /// Write stored articles or mentions as JSONL.
    Export(ExportArgs),
    /// Print corpus stats as JSON.
    Stats(StoreArg),
    /// Zero-filled daily counts as `date,person,count` CSV.
    Series(SeriesArgs),
    /// Similarity of two persons over time, one point per window end date.
    Correlate(CorrelateArgs),
    /// Pairwise similarity matrix for one window.
    Matrix(MatrixArgs),
    /// 2-D classical MDS layout of persons.
    Mds(MdsArgs),
    /// Most mentioned persons.
    Top(TopArgs),
    /// Run the HTTP query API.
    Serve(ServeArgs),
    /// Write a synthetic corpus and matching gazetteer.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
struct StoreArg {
    /// Store file.
    #[arg(long)]
    store: PathBuf,
}

#[derive(Debug, Args)]
struct OutputArg {
    /// Write to this file instead of stdout.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct RangeArgs {
    /// First day (YYYY-MM-DD); defaults to the start of the series.
    #[arg(long)]
    from: Option<NaiveDate>,
    /// Last day (YYYY-MM-DD); defaults to the end of the series.
    #[arg(long)]
    to: Option<NaiveDate>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// JSONL corpus with {id, date, title, body, source?, language?} records.
    corpus: PathBuf,
    #[command(flatten)]
    store: StoreArg,
    /// TOML file with `[cleaning] patterns = [...]`; defaults to built-in rules.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StoplistArgs {
    /// Extra stoplist, one term per line.
    #[arg(long)]
    stoplist: Option<PathBuf>,
    /// Do not include the built-in stoplist.
    #[arg(long)]
    no_default_stoplist: bool,
    /// Count every occurrence, or each person at most once per article.
    #[arg(long, value_enum, default_value = "occurrence")]
    count_mode: CountModeArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CountModeArg {
    Occurrence,
    Article,
}

impl From<CountModeArg> for CountMode {
    fn from(m: CountModeArg) -> Self {
        match m {
            CountModeArg::Occurrence => CountMode::Occurrence,
            CountModeArg::Article => CountMode::Article,
        }
    }
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[command(flatten)]
    store: StoreArg,
    /// Known names, one per line (`alias<TAB>canonical` seeds an alias).
    #[arg(long)]
    gazetteer: Option<PathBuf>,
    /// Without a gazetteer, find nothing instead of falling back to capitalized-run detection.
    #[arg(long)]
    no_heuristic: bool,
    #[command(flatten)]
    stoplist: StoplistArgs,
}

#[derive(Debug, Args)]
struct ImportArgs {
    /// JSONL mentions file.
    mentions: PathBuf,
    #[command(flatten)]
    store: StoreArg,
    #[command(flatten)]
    stoplist: StoplistArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportWhat {
    Articles,
    Mentions,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Jsonl,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long, value_enum, default_value = "articles")]
    what: ExportWhat,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: ExportFormat,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    #[command(flatten)]
    store: StoreArg,
    #[command(flatten)]
    range: RangeArgs,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Window length in days.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    n: usize,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, default_value = "pearson")]
    method: Method,
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct WindowArgs {
    /// Last day of the window; defaults to the end of the series.
    #[arg(long)]
    end: Option<NaiveDate>,
    /// Window length in days.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    n: usize,
    #[arg(long, default_value = "pearson")]
    method: Method,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    #[command(flatten)]
    store: StoreArg,
    /// Comma-separated person names.
    #[arg(long, value_delimiter = ',', required = true)]
    persons: Vec<String>,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct MdsArgs {
    /// Store file; required unless --matrix is given.
    #[arg(long, required_unless_present = "matrix")]
    store: Option<PathBuf>,
    /// Comma-separated person names.
    #[arg(long, value_delimiter = ',', required_unless_present = "matrix")]
    persons: Vec<String>,
    /// Lay out a similarity matrix CSV (as written by `matrix`) instead of querying a store.
    #[arg(long, conflicts_with_all = ["store", "persons"])]
    matrix: Option<PathBuf>,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct TopArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, value_enum, default_value = "csv")]
    out: Format,
    #[command(flatten)]
    output: OutputArg,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    /// TOML query limits (max_persons_per_matrix, max_range_days, cors_origins).
    #[arg(long)]
    limits: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FixtureKind {
    /// Two persons, independent then identical.
    Regime,
    /// Person i gets top/i mentions.
    Zipf,
    /// Independent uniform counts.
    Random,
}

#[derive(Debug, Args)]
struct FixtureArgs {
    #[arg(long, value_enum)]
    kind: FixtureKind,
    /// RNG seed; required for seeded kinds.
    #[arg(long)]
    seed: Option<u64>,
    /// Days (regime: days per phase).
    #[arg(long)]
    days: Option<usize>,
    /// Number of persons (zipf, random).
    #[arg(long, default_value_t = 20)]
    persons: usize,
    /// Mentions of the top person (zipf) or max daily count (random).
    #[arg(long, default_value_t = 1000)]
    top: u32,
    /// Directory receiving corpus.jsonl and gazetteer.txt.
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Extract(a) => extract(a),
        Command::ImportMentions(a) => import(a),
        Command::Export(a) => export(a),
        Command::Stats(a) => stats(a),
        Command::Series(a) => series(a),
        Command::Correlate(a) => correlate(a),
        Command::Matrix(a) => matrix(a),
        Command::Mds(a) => mds(a),
        Command::Top(a) => top(a),
        Command::Serve(a) => serve(a),
        Command::Fixture(a) => fixture(a),
    }
}

fn emit(output: &OutputArg, bytes: &[u8]) -> CliResult {
    match &output.output {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    emit(&OutputArg { output: None }, s.as_bytes())
}

fn open_index(store: &Path) -> CliResult<SeriesIndex> {
    Ok(SeriesIndex::from_store(&CorpusStore::open(store)?)?)
}

fn api_for(store: &Path) -> CliResult<ApiState> {
    Ok(ApiState::new(open_index(store)?, QueryLimits::default()))
}

/// Runs one API request and returns the body, mapping error statuses to exit 1.
fn api_call(api: &ApiState, path: &str, params: &[(&str, String)]) -> CliResult<Vec<u8>> {
    let query = form_urlencoded::Serializer::new(String::new())
        .extend_pairs(params.iter().map(|(k, v)| (*k, v.as_str())))
        .finish();
    let resp = api.handle(path, &query);
    if resp.status != 200 {
        let message = serde_json::from_str::<serde_json::Value>(&resp.body)
            .ok()
            .and_then(|v| v["message"].as_str().map(str::to_string))
            .unwrap_or(resp.body);
        return Err(CliError::Domain(message));
    }
    let mut body = resp.body.into_bytes();
    body.push(b'\n');
    Ok(body)
}

fn range_params(r: &RangeArgs) -> Vec<(&'static str, String)> {
    let mut p = Vec::new();
    if let Some(d) = r.from {
        p.push(("from", d.to_string()));
    }
    if let Some(d) = r.to {
        p.push(("to", d.to_string()));
    }
    p
}

fn resolve(index: &SeriesIndex, r: &RangeArgs) -> CliResult<DateRange> {
    let requested = match (r.from, r.to) {
        (None, None) => None,
        (from, to) => {
            let full = index
                .range()
                .ok_or_else(|| CliError::Domain("the store has no dated mentions".into()))?;
            Some(DateRange::new(from.unwrap_or(full.start), to.unwrap_or(full.end))?)
        }
    };
    Ok(index.resolve_range(requested)?)
}

fn ingest(a: IngestArgs) -> CliResult {
    let rules = match &a.config {
        Some(p) => CleaningRules::load(p)?,
        None => CleaningRules::default(),
    };
    let mut store = CorpusStore::open_or_create(&a.store.store)?;
    let report = corpus::ingest(&mut store, &a.corpus, &rules).map_err(|e| match e {
        CorpusError::Io(io) => CliError::Io(format!("{}: {io}", a.corpus.display())),
        other => other.into(),
    })?;
    store.save(&a.store.store)?;
    print_json(&report)
}

fn stoplist(a: &StoplistArgs) -> CliResult<Stoplist> {
    let mut s = if a.no_default_stoplist {
        Stoplist::default()
    } else {
        Stoplist::builtin()
    };
    if let Some(p) = &a.stoplist {
        s.extend(load_stoplist(p)?);
    }
    Ok(s)
}

#[derive(Serialize)]
struct PersonTotal {
    person: String,
    total: u64,
}

#[derive(Serialize)]
struct ExtractSummary {
    count_mode: CountMode,
    mentions: usize,
    persons: Vec<PersonTotal>,
}

fn store_extraction(path: &Path, mut store: CorpusStore, x: Extraction, count_mode: CountMode) -> CliResult {
    let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
    for e in &x.events {
        *totals.entry(&e.canonical).or_default() += 1;
    }
    let mut persons: Vec<PersonTotal> = totals
        .into_iter()
        .map(|(p, total)| PersonTotal {
            person: p.to_string(),
            total,
        })
        .collect();
    persons.sort_by(|a, b| b.total.cmp(&a.total).then_with(|| a.person.cmp(&b.person)));
    let summary = ExtractSummary {
        count_mode,
        mentions: x.events.len(),
        persons,
    };
    store.set_mentions(MentionSet {
        count_mode,
        events: x.events,
    });
    store.save(path)?;
    print_json(&summary)
}

fn extract(a: ExtractArgs) -> CliResult {
    let store = CorpusStore::open(&a.store.store)?;
    let extractor = match (&a.gazetteer, a.no_heuristic) {
        (Some(g), _) => Extractor::Gazetteer(Gazetteer::load(g)?),
        (None, false) => Extractor::Heuristic,
        (None, true) => Extractor::Disabled,
    };
    let count_mode = a.stoplist.count_mode.into();
    let config = ExtractConfig {
        extractor,
        stoplist: stoplist(&a.stoplist)?,
        count_mode,
    };
    let x = ner::extract_corpus(store.articles(), &config);
    store_extraction(&a.store.store, store, x, count_mode)
}

fn import(a: ImportArgs) -> CliResult {
    let store = CorpusStore::open(&a.store.store)?;
    let file = fs::File::open(&a.mentions).map_err(|e| CliError::Io(format!("{}: {e}", a.mentions.display())))?;
    let count_mode = a.stoplist.count_mode.into();
    let x = ner::import_mentions(BufReader::new(file), stoplist(&a.stoplist)?, count_mode)?;
    store_extraction(&a.store.store, store, x, count_mode)
}

fn export(a: ExportArgs) -> CliResult {
    let store = CorpusStore::open(&a.store.store)?;
    let ExportFormat::Jsonl = a.format;
    let mut buf = Vec::new();
    match a.what {
        ExportWhat::Articles => store.export_articles(&mut buf)?,
        ExportWhat::Mentions => store.export_mentions(&mut buf)?,
    }
    emit(&a.output, &buf)
}

fn stats(a: StoreArg) -> CliResult {
    print_json(&CorpusStore::open(&a.store)?.corpus_stats())
}

fn series(a: SeriesArgs) -> CliResult {
    let index = open_index(&a.store.store)?;
    let range = if index.is_empty() {
        None
    } else {
        Some(resolve(&index, &a.range)?)
    };
    let mut buf = Vec::new();
    index.write_csv(&mut buf, range)?;
    emit(&a.output, &buf)
}

fn correlate(a: CorrelateArgs) -> CliResult {
    let bytes = match a.out {
        Format::Json => {
            let mut p = vec![("a", a.a.clone()), ("b", a.b.clone()), ("n", a.n.to_string())];
            p.extend(range_params(&a.range));
            p.push(("method", a.method.to_string()));
            api_call(&api_for(&a.store.store)?, "/api/correlation", &p)?
        }
        Format::Csv => {
            let index = open_index(&a.store.store)?;
            index.get(&a.a)?;
            index.get(&a.b)?;
            let range = resolve(&index, &a.range)?;
            let s = correlation_over_time(&index, &a.a, &a.b, a.n, Some(range), a.method)?;
            let mut buf = Vec::new();
            s.write_csv(&mut buf)?;
            buf
        }
    };
    emit(&a.output, &bytes)
}

fn window_params(w: &WindowArgs) -> Vec<(&'static str, String)> {
    let mut p = Vec::new();
    if let Some(end) = w.end {
        p.push(("end", end.to_string()));
    }
    p.push(("n", w.n.to_string()));
    p.push(("method", w.method.to_string()));
    p
}

fn window_spec(index: &SeriesIndex, w: &WindowArgs) -> CliResult<WindowSpec> {
    let end = match w.end {
        Some(d) => d,
        None => {
            index
                .range()
                .ok_or_else(|| CliError::Domain("the store has no dated mentions".into()))?
                .end
        }
    };
    Ok(WindowSpec::new(end, w.n, w.method)?)
}

fn compute_matrix(store: &Path, persons: &[String], w: &WindowArgs) -> CliResult<SimilarityMatrix> {
    let index = open_index(store)?;
    let spec = window_spec(&index, w)?;
    let refs: Vec<&str> = persons.iter().map(String::as_str).collect();
    Ok(similarity_matrix(&index, &refs, &spec)?)
}

fn matrix(a: MatrixArgs) -> CliResult {
    let bytes = match a.out {
        Format::Json => {
            let mut p = vec![("persons", a.persons.join(","))];
            p.extend(window_params(&a.window));
            api_call(&api_for(&a.store.store)?, "/api/matrix", &p)?
        }
        Format::Csv => {
            let m = compute_matrix(&a.store.store, &a.persons, &a.window)?;
            let mut buf = Vec::new();
            m.write_csv(&mut buf)?;
            buf
        }
    };
    emit(&a.output, &bytes)
}

#[derive(Serialize)]
struct MatrixLayout {
    persons: Vec<String>,
    coords: Vec<[f64; 2]>,
    stress: f64,
    diagnostics: MdsDiagnostics,
}

fn mds(a: MdsArgs) -> CliResult {
    if let (Format::Json, Some(store)) = (a.out, &a.store) {
        let mut p = vec![("persons", a.persons.join(","))];
        p.extend(window_params(&a.window));
        let body = api_call(&api_for(store)?, "/api/mds", &p)?;
        return emit(&a.output, &body);
    }
    let distances: DistanceMatrix = match (&a.matrix, &a.store) {
        (Some(path), _) => {
            let file = fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let (persons, cells) = read_matrix_csv(BufReader::new(file))?;
            if persons.len() < 2 {
                return Err(CliError::Domain("matrix must list at least 2 persons".into()));
            }
            if cells.len() != persons.len() * persons.len() {
                return Err(CliError::Domain("matrix csv is not square".into()));
            }
            cells_to_distance(&persons, &cells)
        }
        (None, Some(store)) => {
            if a.persons.len() < 3 {
                return Err(CliError::Domain(format!(
                    "at least 3 persons are required, got {}",
                    a.persons.len()
                )));
            }
            to_distance(&compute_matrix(store, &a.persons, &a.window)?)
        }
        (None, None) => unreachable!("clap requires --store or --matrix"),
    };
    let e = classical_mds(&distances, 2).map_err(|e| CliError::Domain(e.to_string()))?;
    let diag = diagnostics(&e, &distances);
    log::info!("stress {}", diag.stress);
    let bytes = match a.out {
        Format::Csv => {
            let mut buf = Vec::new();
            e.write_csv(&mut buf)?;
            buf
        }
        Format::Json => {
            let layout = MatrixLayout {
                coords: e.coords.iter().map(|c| [c[0], c[1]]).collect(),
                persons: e.persons,
                stress: diag.stress,
                diagnostics: diag,
            };
            let mut s = serde_json::to_string(&layout).expect("serializable");
            s.push('\n');
            s.into_bytes()
        }
    };
    emit(&a.output, &bytes)
}

fn top(a: TopArgs) -> CliResult {
    let bytes = match a.out {
        Format::Json => {
            let mut p = vec![("limit", a.k.to_string())];
            p.extend(range_params(&a.range));
            api_call(&api_for(&a.store.store)?, "/api/persons", &p)?
        }
        Format::Csv => {
            let index = open_index(&a.store.store)?;
            let range = if index.is_empty() {
                None
            } else {
                Some(resolve(&index, &a.range)?)
            };
            let mut s = String::from("person,total\n");
            for (p, t) in index.top_k(range, a.k)? {
                s.push_str(&csv_field(&p));
                s.push(',');
                s.push_str(&t.to_string());
                s.push('\n');
            }
            s.into_bytes()
        }
    };
    emit(&a.output, &bytes)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn serve(a: ServeArgs) -> CliResult {
    let limits = match &a.limits {
        Some(p) => QueryLimits::load(p).map_err(|e| match e {
            inthenews_service::ConfigError::Io(e) => CliError::Io(format!("{}: {e}", p.display())),
            other => CliError::Domain(other.to_string()),
        })?,
        None => QueryLimits::default(),
    };
    let api = ApiState::new(open_index(&a.store.store)?, limits);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    eprintln!("serving {} on http://{}", a.store.store.display(), a.bind);
    rt.block_on(inthenews_service::serve(api, a.bind))?;
    Ok(())
}

fn fixture(a: FixtureArgs) -> CliResult {
    let need_seed = || {
        a.seed
            .ok_or_else(|| CliError::Domain("this fixture kind needs an explicit --seed".into()))
    };
    let corpus = match a.kind {
        FixtureKind::Regime => SyntheticCorpus::regime_switch(need_seed()?, a.days.unwrap_or(180)),
        FixtureKind::Zipf => SyntheticCorpus::zipf(a.persons, a.top, a.days.unwrap_or(365)),
        FixtureKind::Random => SyntheticCorpus::random(need_seed()?, a.persons, a.days.unwrap_or(365), a.top),
    };
    fs::create_dir_all(&a.out_dir)?;
    fs::write(a.out_dir.join("corpus.jsonl"), corpus.to_jsonl())?;
    fs::write(a.out_dir.join("gazetteer.txt"), corpus.gazetteer())?;
    print_json(&serde_json::json!({
        "corpus": a.out_dir.join("corpus.jsonl"),
        "gazetteer": a.out_dir.join("gazetteer.txt"),
        "persons": corpus.series.len(),
        "days": corpus.days,
    }))
}
