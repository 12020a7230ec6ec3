//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every expected value is computed here by an independent route (integer
//! closed forms, per-window recomputation, planted generators) rather than
//! by calling the code under test twice.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::Path;
use std::process::{Child, Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use inthenews_core::corpus::{clean_article, CleaningRules};
use inthenews_core::ner::{extract_corpus, normalize, AliasTable, ExtractConfig};
use inthenews_core::projection::{classical_mds, DistanceMatrix};
use inthenews_core::similarity::{cosine, count_similarity, pearson, read_matrix_csv};
use inthenews_core::synth::{default_start, SyntheticCorpus};
use inthenews_core::timeseries::zipf_slope;
use inthenews_core::{corpus::RawArticle, DateRange};
use inthenews_core::{
    correlation_over_time, similarity_matrix, Extractor, Gazetteer, Method, PersonSeries, SeriesIndex, Stoplist,
    WindowSpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Bytes printed by ingest+extract, the correlate CSV and the store file.
struct PipelineOutput {
    log: Vec<u8>,
    csv: Vec<u8>,
    store: Vec<u8>,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        // NaN comparisons are false and so fail
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

/// Closed-form Pearson over exact integer sums; only the final division is
/// floating point.
fn oracle_pearson(x: &[i64], y: &[i64]) -> Option<f64> {
    let n = x.len() as i128;
    let sx: i128 = x.iter().map(|&v| v as i128).sum();
    let sy: i128 = y.iter().map(|&v| v as i128).sum();
    let sxx: i128 = x.iter().map(|&v| (v as i128).pow(2)).sum();
    let syy: i128 = y.iter().map(|&v| (v as i128).pow(2)).sum();
    let sxy: i128 = x.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum();
    let vx = n * sxx - sx * sx;
    let vy = n * syy - sy * sy;
    if vx == 0 || vy == 0 {
        return None;
    }
    Some((n * sxy - sx * sy) as f64 / ((vx as f64) * (vy as f64)).sqrt())
}

fn oracle_cosine(x: &[i64], y: &[i64]) -> Option<f64> {
    let sxx: i128 = x.iter().map(|&v| (v as i128).pow(2)).sum();
    let syy: i128 = y.iter().map(|&v| (v as i128).pow(2)).sum();
    let sxy: i128 = x.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum();
    if sxx == 0 || syy == 0 {
        return None;
    }
    Some(sxy as f64 / ((sxx as f64) * (syy as f64)).sqrt())
}

fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => (a - b).abs() <= tol,
        _ => false,
    }
}

fn pearson_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut constant_cases = 0;
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let len = rng.random_range(2..=200);
        let hi = *[1u32, 3, 20, 1000].get(case % 4).unwrap();
        let mut x: Vec<u32> = (0..len).map(|_| rng.random_range(0..=hi)).collect();
        let y: Vec<u32> = (0..len).map(|_| rng.random_range(0..=hi)).collect();
        if case % 10 == 0 {
            let c = rng.random_range(0..=hi);
            x.iter_mut().for_each(|v| *v = c);
        }
        let xi: Vec<i64> = x.iter().map(|&v| v as i64).collect();
        let yi: Vec<i64> = y.iter().map(|&v| v as i64).collect();
        let expected = oracle_pearson(&xi, &yi);
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
        let got_f = pearson(&xf, &yf).map_err(|e| e.to_string())?;
        let got_c = count_similarity(&x, &y, Method::Pearson).map_err(|e| e.to_string())?;
        if x.iter().all(|&v| v == x[0]) {
            constant_cases += 1;
            ensure!(
                got_f.is_none() && got_c.is_none(),
                "case {case}: constant vector gave {got_f:?}/{got_c:?}"
            );
        }
        ensure!(
            close(got_f, expected, 1e-12),
            "case {case}: f64 path {got_f:?} vs {expected:?}"
        );
        ensure!(
            close(got_c, expected, 1e-12),
            "case {case}: count path {got_c:?} vs {expected:?}"
        );
        if let (Some(a), Some(b)) = (got_f, expected) {
            worst = worst.max((a - b).abs());
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    ensure!(constant_cases >= 100, "only {constant_cases} constant cases exercised");
    Ok(format!(
        "1000 pairs, max |err| {worst:.1e}, {constant_cases} constant → undefined, {elapsed:.2?}"
    ))
}

fn rolling_equals_naive() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let first = default_start();
    let range = DateRange::new(first, first + chrono::Days::new(399)).unwrap();
    let mut checked = 0usize;
    let mut undefined = 0usize;
    let mut worst = 0.0f64;
    for pair in 0..12 {
        // sparse pairs produce runs of all-zero windows
        let density = [0.03, 0.3, 1.0][pair % 3];
        let draw = |rng: &mut ChaCha8Rng| -> Vec<u32> {
            (0..400)
                .map(|_| {
                    if rng.random_bool(density) {
                        rng.random_range(0..=40)
                    } else {
                        0
                    }
                })
                .collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let index = SeriesIndex::from_series(
            range,
            [
                PersonSeries {
                    person: "A".into(),
                    start_date: first,
                    counts: a.clone(),
                },
                PersonSeries {
                    person: "B".into(),
                    start_date: first,
                    counts: b.clone(),
                },
            ],
        )
        .map_err(|e| e.to_string())?;
        for n in [7usize, 30, 120] {
            for method in [Method::Pearson, Method::Cosine] {
                let s = correlation_over_time(&index, "A", "B", n, None, method).map_err(|e| e.to_string())?;
                ensure!(s.points.len() == 400 - n + 1, "n={n}: {} points", s.points.len());
                for (k, (date, got)) in s.points.iter().enumerate() {
                    ensure!(
                        *date == first + chrono::Days::new((k + n - 1) as u64),
                        "n={n}: date at {k}"
                    );
                    let xi: Vec<i64> = a[k..k + n].iter().map(|&v| v as i64).collect();
                    let yi: Vec<i64> = b[k..k + n].iter().map(|&v| v as i64).collect();
                    let want = match method {
                        Method::Pearson => oracle_pearson(&xi, &yi),
                        Method::Cosine => oracle_cosine(&xi, &yi),
                    };
                    ensure!(
                        close(*got, want, 1e-9),
                        "pair {pair} n={n} {method} window {k}: {got:?} vs {want:?}"
                    );
                    if let (Some(g), Some(w)) = (got, want) {
                        worst = worst.max((g - w).abs());
                    } else {
                        undefined += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    ensure!(undefined > 0, "no undefined windows exercised");
    Ok(format!(
        "{checked} windows, max |err| {worst:.1e}, {undefined} undefined matched, {elapsed:.2?}"
    ))
}

fn shift_scale_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let len = rng.random_range(3..=100);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(0..=50) as f64).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.random_range(0..=50) as f64).collect();
        let alpha: f64 = rng.random_range(0.1..10.0);
        let beta: f64 = rng.random_range(-100.0..100.0);
        let t: Vec<f64> = x.iter().map(|v| alpha * v + beta).collect();
        let base = pearson(&x, &y).map_err(|e| e.to_string())?;
        let moved = pearson(&t, &y).map_err(|e| e.to_string())?;
        ensure!(
            close(base, moved, 1e-12),
            "case {case}: α={alpha} β={beta}: {base:?} vs {moved:?}"
        );
        if let (Some(a), Some(b)) = (base, moved) {
            worst = worst.max((a - b).abs());
        }
    }
    let x = [1.0, 2.0, 3.0, 4.0];
    let y = [4.0, 3.0, 2.0, 1.0];
    let shifted: Vec<f64> = x.iter().map(|v| v + 10.0).collect();
    let c0 = cosine(&x, &y).unwrap().unwrap();
    let c1 = cosine(&shifted, &y).unwrap().unwrap();
    ensure!(
        (c0 - c1).abs() > 0.1,
        "cosine unexpectedly shift invariant: {c0} vs {c1}"
    );
    let p0 = pearson(&x, &y).unwrap().unwrap();
    let p1 = pearson(&shifted, &y).unwrap().unwrap();
    ensure!((p0 - p1).abs() <= 1e-12, "pearson shift check {p0} vs {p1}");
    Ok(format!(
        "100 cases, max |err| {worst:.1e}; cosine shift {c0:.4} → {c1:.4}"
    ))
}

fn index_of(c: &SyntheticCorpus) -> SeriesIndex {
    let range = DateRange::new(c.start, c.date(c.days - 1)).unwrap();
    SeriesIndex::from_series(
        range,
        c.series.iter().map(|(p, counts)| PersonSeries {
            person: p.clone(),
            start_date: c.start,
            counts: counts.clone(),
        }),
    )
    .unwrap()
}

fn diff_variance(v: &[f64]) -> f64 {
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let m = d.iter().sum::<f64>() / d.len() as f64;
    d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / d.len() as f64
}

fn regime_switch() -> Outcome {
    let half = 180;
    let c = SyntheticCorpus::regime_switch(4, half);
    let (a, b) = (&c.series[0].1, &c.series[1].1);
    ensure!(
        a[..half] != b[..half] && a[half..] == b[half..],
        "fixture not as planted"
    );
    let index = index_of(&c);
    let s30 = correlation_over_time(&index, "Alder", "Birch", 30, None, Method::Pearson).map_err(|e| e.to_string())?;
    let s120 =
        correlation_over_time(&index, "Alder", "Birch", 120, None, Method::Pearson).map_err(|e| e.to_string())?;
    let switch = c.date(half);
    let mean = |it: Vec<f64>| it.iter().sum::<f64>() / it.len() as f64;
    let before = mean(
        s30.points
            .iter()
            .filter(|(d, _)| *d < switch)
            .filter_map(|(_, v)| *v)
            .collect(),
    );
    let after = mean(
        s30.points
            .iter()
            .filter(|(d, _)| *d >= switch + chrono::Days::new(29))
            .filter_map(|(_, v)| *v)
            .collect(),
    );
    ensure!(before < 0.2, "mean before switch {before}");
    ensure!(after > 0.8, "mean after switch {after}");
    let common_start = s120.points[0].0;
    let v30: Vec<f64> = s30
        .points
        .iter()
        .filter(|(d, _)| *d >= common_start)
        .map(|(_, v)| v.ok_or("undefined point"))
        .collect::<Result<_, _>>()?;
    let v120: Vec<f64> = s120
        .points
        .iter()
        .map(|(_, v)| v.ok_or("undefined point"))
        .collect::<Result<_, _>>()?;
    ensure!(v30.len() == v120.len(), "{} vs {} points", v30.len(), v120.len());
    let (d30, d120) = (diff_variance(&v30), diff_variance(&v120));
    ensure!(d120 < d30, "n=120 diff variance {d120} not below n=30 {d30}");
    Ok(format!(
        "mean before {before:.3}, after {after:.3}; diff var n=30 {d30:.2e} > n=120 {d120:.2e}"
    ))
}

fn matrix_contract() -> Outcome {
    let mut c = SyntheticCorpus::random(5, 9, 365, 6);
    // one silent person exercises undefined cells
    c.series[8].1.iter_mut().for_each(|v| *v = 0);
    let index = index_of(&c);
    let names: Vec<&str> = c.names().collect();
    let w = WindowSpec::new(c.date(364), 30, Method::Pearson).map_err(|e| e.to_string())?;
    let m = similarity_matrix(&index, &names, &w).map_err(|e| e.to_string())?;
    ensure!(m.size() == 9, "size {}", m.size());
    let mut defined = 0;
    for i in 0..9 {
        for j in 0..9 {
            let (a, b) = (m.get(i, j), m.get(j, i));
            ensure!(
                a.map(f64::to_bits) == b.map(f64::to_bits),
                "({i},{j}) not bit-symmetric"
            );
            if let Some(v) = a {
                ensure!((-1.0..=1.0).contains(&v), "({i},{j}) = {v}");
                defined += 1;
            }
        }
        match m.get(i, i) {
            Some(v) => ensure!(v == 1.0, "diagonal {i} = {v}"),
            None => ensure!(i == 8, "diagonal {i} undefined"),
        }
    }
    let mut csv = Vec::new();
    m.write_csv(&mut csv).map_err(|e| e.to_string())?;
    let (persons, cells) = read_matrix_csv(csv.as_slice()).map_err(|e| e.to_string())?;
    ensure!(persons == m.persons, "persons changed in round-trip");
    ensure!(
        cells
            .iter()
            .map(|c| c.map(f64::to_bits))
            .eq(m.cells.iter().map(|c| c.map(f64::to_bits))),
        "cells changed in round-trip"
    );
    ensure!(
        defined == 64,
        "{defined} defined cells, want 64 (silent person row and column undefined)"
    );
    Ok(format!(
        "9×9, {defined} defined cells, {} undefined, CSV round-trip bit-exact",
        81 - defined
    ))
}

fn zipf() -> Outcome {
    let persons = 50;
    let c = SyntheticCorpus::zipf(persons, 1000, 365);
    let rules = CleaningRules::default();
    let articles: Vec<_> = c
        .articles()
        .iter()
        .map(|a| clean_article(a, &rules))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let x = extract_corpus(
        &articles,
        &ExtractConfig {
            extractor: Extractor::Gazetteer(Gazetteer::parse(&c.gazetteer())),
            stoplist: Stoplist::builtin(),
            ..Default::default()
        },
    );
    let range = DateRange::new(c.start, c.date(c.days - 1)).unwrap();
    let index = SeriesIndex::new(range, &x.events).map_err(|e| e.to_string())?;
    let top = index.top_k(None, persons).map_err(|e| e.to_string())?;
    let planted: Vec<(String, u64)> = (1..=persons).map(|i| (format!("P{i:03}"), 1000 / i as u64)).collect();
    ensure!(
        top == planted,
        "top_k differs from planted ordering: {:?}",
        &top[..5.min(top.len())]
    );
    let counts: Vec<u64> = top.iter().map(|(_, t)| *t).collect();
    let slope = zipf_slope(&counts).ok_or("slope undefined")?;
    ensure!((slope + 1.0).abs() <= 0.15, "slope {slope}");
    Ok(format!("{persons} persons in planted order, log-log slope {slope:.4}"))
}

fn raw(id: &str, date: &str, body: &str) -> RawArticle {
    RawArticle {
        id: Some(id.into()),
        date: Some(date.into()),
        title: Some("World news".into()),
        body: Some(body.into()),
        source: None,
        language: None,
    }
}

fn alias_normalization() -> Outcome {
    let rules = CleaningRules::default();
    let articles: Vec<_> = [
        raw(
            "1",
            "2017-01-20",
            "Donald Trump was sworn in on Friday. Reuters reported that Trump spoke briefly.",
        ),
        raw(
            "2",
            "2017-01-21",
            "On Monday Trump met Theresa May. Officials said Donald Trump was pleased.",
        ),
        raw(
            "3",
            "2017-01-22",
            "Bill Clinton and Hillary Clinton attended. Clinton declined to comment.",
        ),
    ]
    .iter()
    .map(|a| clean_article(a, &rules))
    .collect::<Result<_, _>>()
    .map_err(|e| e.to_string())?;
    let mut stop = Stoplist::builtin();
    stop.extend(Stoplist::parse("World\nOfficials\n"));
    let x = extract_corpus(
        &articles,
        &ExtractConfig {
            stoplist: stop.clone(),
            ..Default::default()
        },
    );
    let t = &x.aliases;
    for (surface, canon) in [
        ("Donald Trump", "Trump"),
        ("Trump", "Trump"),
        ("Bill Clinton", "Clinton"),
        ("Hillary Clinton", "Clinton"),
        // "May" never occurs alone here, so no grouping
        ("Theresa May", "Theresa May"),
    ] {
        ensure!(
            t.canonical(surface) == canon,
            "{surface} → {} (want {canon})",
            t.canonical(surface)
        );
    }
    let trump: Vec<_> = x.events.iter().filter(|e| e.surface.contains("Trump")).collect();
    ensure!(trump.len() == 4, "{} Trump mentions", trump.len());
    ensure!(
        trump.iter().all(|e| e.canonical == "Trump"),
        "Trump mention not canonicalized"
    );
    for e in &x.events {
        let again = normalize(e, t);
        ensure!(&again == e, "normalize not idempotent on {e:?}");
        ensure!(
            t.canonical(&e.canonical) == e.canonical,
            "canonical {} maps further",
            e.canonical
        );
    }
    for term in ["Reuters", "Monday", "Friday", "On"] {
        ensure!(Stoplist::builtin().contains(term), "{term} not in built-in stoplist");
    }
    for term in stop.iter() {
        ensure!(
            !x.events.iter().any(|e| e.canonical == term || e.surface == term),
            "{term} extracted"
        );
        ensure!(!t.iter().any(|(s, c)| s == term || c == term), "{term} in alias table");
    }
    let range = DateRange::new(articles[0].date, articles[2].date).unwrap();
    let index = SeriesIndex::new(range, &x.events).map_err(|e| e.to_string())?;
    let persons: Vec<&str> = index.persons().collect();
    ensure!(persons == ["Clinton", "Theresa May", "Trump"], "persons {persons:?}");
    // seeds override the last-token rule
    let seeded = AliasTable::build(
        ["Donald Trump", "Trump", "Ivanka Trump"],
        &[("Ivanka Trump".to_string(), "Ivanka Trump".to_string())],
        Stoplist::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(seeded.canonical("Ivanka Trump") == "Ivanka Trump", "seed ignored");
    ensure!(seeded.canonical("Donald Trump") == "Trump", "rule broken by seed");
    Ok(format!("{} events, canonicals {persons:?}", x.events.len()))
}

fn check_recovery(points: &[Vec<f64>], tol: f64) -> Result<f64, String> {
    let names: Vec<String> = (0..points.len()).map(|i| format!("p{i}")).collect();
    let dm = DistanceMatrix::from_points(names, points).map_err(|e| e.to_string())?;
    let e = classical_mds(&dm, 2).map_err(|e| e.to_string())?;
    for i in 0..points.len() {
        for j in 0..points.len() {
            let want: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            let got = e.distance(i, j);
            ensure!((got - want).abs() <= tol, "d({i},{j}) {got} vs planted {want}");
        }
    }
    ensure!(e.stress <= tol, "stress {}", e.stress);
    Ok(e.stress)
}

fn mds_plant_and_recover() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let planted: Vec<Vec<f64>> = (0..10)
        .map(|_| vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
        .collect();
    let stress = check_recovery(&planted, 1e-6)?;

    let h = 3f64.sqrt() / 2.0;
    check_recovery(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]], 1e-6)?;
    let tri = DistanceMatrix::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0],
    )
    .map_err(|e| e.to_string())?;
    let e = classical_mds(&tri, 2).map_err(|e| e.to_string())?;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        ensure!(
            (e.distance(i, j) - 1.0).abs() <= 1e-6,
            "triangle side {i}{j} = {}",
            e.distance(i, j)
        );
    }
    ensure!(e.stress <= 1e-6, "triangle stress {}", e.stress);

    let two = DistanceMatrix::new(vec!["a".into(), "b".into()], vec![0.0, 2.0, 2.0, 0.0]).map_err(|e| e.to_string())?;
    let e = classical_mds(&two, 2).map_err(|e| e.to_string())?;
    let want = [[1.0, 0.0], [-1.0, 0.0]];
    for (got, want) in e.coords.iter().zip(want) {
        ensure!(
            (got[0] - want[0]).abs() <= 1e-9 && (got[1] - want[1]).abs() <= 1e-9,
            "2-point coords {:?}",
            e.coords
        );
    }
    ensure!(e.stress <= 1e-9, "2-point stress {}", e.stress);
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "10 planted points stress {stress:.1e}; triangle and 2-point exact; {elapsed:.2?}"
    ))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_inthenews")
}

fn run_ok(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(bin()).args(args).output().map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

fn pipeline(dir: &Path) -> Result<PipelineOutput, String> {
    let store = dir.join("store.json").display().to_string();
    let corpus = format!("{FIXTURES}/news.jsonl");
    let gaz = format!("{FIXTURES}/gazetteer.txt");
    let ingest = run_ok(&["ingest", &corpus, "--store", &store])?;
    let extract = run_ok(&["extract", "--store", &store, "--gazetteer", &gaz])?;
    let mut log = ingest;
    log.extend(extract);
    let csv = run_ok(&[
        "correlate",
        "--store",
        &store,
        "--a",
        "Merkel",
        "--b",
        "Schulz",
        "--n",
        "7",
        "--out",
        "csv",
    ])?;
    let store = std::fs::read(&store).map_err(|e| e.to_string())?;
    Ok(PipelineOutput { log, csv, store })
}

fn end_to_end_determinism() -> Outcome {
    let d1 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d2 = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = pipeline(d1.path())?;
    let b = pipeline(d2.path())?;
    ensure!(a.csv == b.csv, "correlate CSV differs between runs");
    ensure!(a.log == b.log, "ingest/extract output differs between runs");
    ensure!(a.store == b.store, "store bytes differ between runs");
    let lines = a.csv.iter().filter(|&&b| b == b'\n').count();
    ensure!(lines == 26, "{lines} CSV lines");
    Ok(format!(
        "two runs byte-identical ({} CSV bytes, {} store bytes)",
        a.csv.len(),
        a.store.len()
    ))
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn http_get(addr: SocketAddr, target: &str) -> Result<(u16, String), String> {
    let mut s = TcpStream::connect(addr).map_err(|e| e.to_string())?;
    s.set_read_timeout(Some(Duration::from_secs(10)))
        .map_err(|e| e.to_string())?;
    write!(
        s,
        "GET {target} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
    )
    .map_err(|e| e.to_string())?;
    let mut buf = String::new();
    s.read_to_string(&mut buf).map_err(|e| e.to_string())?;
    let (head, body) = buf.split_once("\r\n\r\n").ok_or("malformed response")?;
    let status = head.split(' ').nth(1).and_then(|c| c.parse().ok()).ok_or("no status")?;
    Ok((status, body.to_string()))
}

fn keys(v: &Value) -> Vec<&str> {
    let mut k: Vec<&str> = v
        .as_object()
        .map(|o| o.keys().map(String::as_str).collect())
        .unwrap_or_default();
    k.sort_unstable();
    k
}

fn is_date(v: &Value) -> bool {
    v.as_str().is_some_and(|s| s.parse::<chrono::NaiveDate>().is_ok())
}

fn is_sim(v: &Value) -> bool {
    v.is_null() || v.as_f64().is_some_and(|x| (-1.0..=1.0).contains(&x))
}

fn check_schema(path: &str, v: &Value) -> Result<(), String> {
    let all = |arr: &Value, f: &dyn Fn(&Value) -> bool| arr.as_array().is_some_and(|a| a.iter().all(f));
    let ok = match path {
        "/api/persons" => {
            keys(v) == ["persons", "range"]
                && keys(&v["range"]) == ["from", "to"]
                && all(&v["persons"], &|p| {
                    keys(p) == ["person", "total"] && p["person"].is_string() && p["total"].is_u64()
                })
        }
        "/api/timeseries" => {
            keys(v) == ["from", "person", "points", "to"]
                && is_date(&v["from"])
                && is_date(&v["to"])
                && all(&v["points"], &|p| {
                    keys(p) == ["count", "date"] && is_date(&p["date"]) && p["count"].is_u64()
                })
        }
        "/api/correlation" => {
            keys(v) == ["a", "b", "from", "method", "n", "points", "to"]
                && v["n"].is_u64()
                && all(&v["points"], &|p| {
                    keys(p) == ["end_date", "value"] && is_date(&p["end_date"]) && is_sim(&p["value"])
                })
        }
        "/api/matrix" => {
            let k = v["persons"].as_array().map_or(0, Vec::len);
            keys(v) == ["end", "method", "n", "persons", "values"]
                && is_date(&v["end"])
                && all(&v["values"], &|row| {
                    row.as_array().is_some_and(|r| r.len() == k && r.iter().all(is_sim))
                })
        }
        "/api/mds" => {
            keys(v) == ["coords", "diagnostics", "end", "method", "n", "persons", "stress"]
                && all(&v["coords"], &|c| {
                    keys(c) == ["person", "x", "y"] && c["x"].is_f64() && c["y"].is_f64()
                })
                && keys(&v["diagnostics"])
                    == [
                        "clamped_eigenvalues",
                        "degenerate",
                        "eigenvalues",
                        "imputed_cells",
                        "stress",
                    ]
        }
        _ => false,
    };
    ensure!(ok, "{path}: payload does not match schema: {v}");
    Ok(())
}

fn service_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    pipeline(dir.path())?;
    let store = dir.path().join("store.json").display().to_string();
    let port = TcpListener::bind("127.0.0.1:0")
        .and_then(|l| l.local_addr())
        .map_err(|e| e.to_string())?
        .port();
    let addr: SocketAddr = format!("127.0.0.1:{port}").parse().unwrap();
    let _server = Server(
        Command::new(bin())
            .args(["serve", "--store", &store, "--bind", &addr.to_string()])
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| e.to_string())?,
    );
    let deadline = Instant::now() + Duration::from_secs(10);
    while TcpStream::connect(addr).is_err() {
        ensure!(Instant::now() < deadline, "server did not start on {addr}");
        std::thread::sleep(Duration::from_millis(50));
    }
    let ok_cases = [
        ("/api/persons", "limit=3"),
        ("/api/timeseries", "person=Merkel&from=2018-01-01&to=2018-01-31"),
        ("/api/correlation", "a=Merkel&b=Schulz&n=7"),
        ("/api/matrix", "persons=Merkel,Schulz,Trump,Obama,Putin,May&n=14"),
        ("/api/mds", "persons=Merkel,Schulz,Trump,Obama&n=14"),
    ];
    for (path, q) in ok_cases {
        let target = format!("{path}?{q}");
        let (s1, b1) = http_get(addr, &target)?;
        let (s2, b2) = http_get(addr, &target)?;
        ensure!(s1 == 200, "{target}: status {s1}: {b1}");
        ensure!(b1 == b2 && s1 == s2, "{target}: repeated GET differs");
        let v: Value = serde_json::from_str(&b1).map_err(|e| format!("{target}: {e}"))?;
        check_schema(path, &v)?;
    }
    let (_, ts) = http_get(addr, "/api/timeseries?person=Merkel&from=2018-01-01&to=2018-01-31")?;
    let ts: Value = serde_json::from_str(&ts).unwrap();
    ensure!(ts["points"].as_array().unwrap().len() == 31, "timeseries length");
    let (_, c) = http_get(addr, "/api/correlation?a=Merkel&b=Schulz")?;
    let c: Value = serde_json::from_str(&c).unwrap();
    ensure!(
        c["n"] == 30 && c["method"] == "pearson",
        "defaults not echoed: n={} method={}",
        c["n"],
        c["method"]
    );

    let err_cases = [
        ("/api/timeseries?person=Nobody", 404, "unknown_person"),
        ("/api/correlation?a=Merkel&b=Nobody", 404, "unknown_person"),
        ("/api/correlation?a=Merkel&b=Schulz&n=1", 400, "invalid_window"),
        ("/api/matrix?persons=Merkel,Merkel", 400, "duplicate_person"),
        ("/api/matrix?persons=Merkel,Ghost", 404, "unknown_person"),
        ("/api/mds?persons=Merkel,Schulz", 400, "too_few_persons"),
        ("/api/persons?range=2018-02-01..2018-01-01", 400, "invalid_range"),
        ("/api/nothing", 404, "not_found"),
    ];
    for (target, status, code) in err_cases {
        let (s, body) = http_get(addr, target)?;
        ensure!(s == status, "{target}: status {s}, want {status}");
        let v: Value = serde_json::from_str(&body).map_err(|e| format!("{target}: {e}"))?;
        ensure!(
            keys(&v) == ["error", "message"] && v["error"] == code,
            "{target}: body {v}"
        );
    }
    Ok(format!(
        "5 endpoints schema-valid and idempotent over HTTP, {} error payloads",
        err_cases.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("pearson oracle equivalence", pearson_oracle),
        ("rolling equals naive", rolling_equals_naive),
        ("shift/scale invariance", shift_scale_invariance),
        ("regime-switch fixture", regime_switch),
        ("matrix contract", matrix_contract),
        ("zipf fixture", zipf),
        ("alias normalization", alias_normalization),
        ("mds plant-and-recover", mds_plant_and_recover),
        ("end-to-end determinism", end_to_end_determinism),
        ("service contract", service_contract),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
