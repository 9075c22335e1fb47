//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are fixed here and never loosened to make a run pass.

#[path = "../../core/tests/common/mod.rs"]
mod common;
mod support;

use std::collections::BTreeSet;
use std::future::Future;
use std::panic::AssertUnwindSafe;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::http::StatusCode;
use common::{oracle, Instrumented};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sere_core::datasource::replay::ReplayTransport;
use sere_core::datasource::{
    Corpus, DbpediaProvider, ErrorKind, LiveConfig, Provider, RetryPolicy, WikipediaProvider,
};
use sere_core::enrich::assign_categories;
use sere_core::output::{format_half_up, to_xml, XmlDocument};
use sere_core::relatedness::{score, wnd_distance};
use sere_core::{
    Concept, ExplorationResult, Explorer, Field, FieldSet, HitCounts, LanguageCode,
    PipelineConfig, RelatedEntity, RelatednessScore,
};
use support::{app_with, demo_app, facts, get, NoRelations};

const REL_TOLERANCE: f64 = 1e-12;
const FORMULA_BUDGET: Duration = Duration::from_secs(1);
const PROPERTY_BUDGET: Duration = Duration::from_secs(5);
const INDEX_BUDGET: Duration = Duration::from_secs(30);
const COLD_BUDGET: Duration = Duration::from_secs(1);
const CACHED_BUDGET: Duration = Duration::from_millis(10);
const PROPERTY_CASES: usize = 10_000;

type Outcome = Result<String, String>;

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn random_tuple(rng: &mut StdRng) -> (u64, u64, u64, u64) {
    let total = rng.gen_range(2..=1_000_000_000u64);
    let a = rng.gen_range(1..total);
    let b = rng.gen_range(1..total);
    let both = rng.gen_range(0..=a.min(b));
    (a, b, both, total)
}

fn distance(a: u64, b: u64, both: u64, total: u64) -> f64 {
    wnd_distance(&HitCounts::new(a, b, both, total).unwrap()).unwrap()
}

fn formula_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b, both, total) = random_tuple(&mut rng);
        let got = distance(a, b, both, total);
        let want = oracle::distance(a, b, both, total);
        if want.is_infinite() || got.is_infinite() {
            check(got.is_infinite() && want.is_infinite(), || {
                format!("({a},{b},{both},{total}): {got} vs {want}")
            })?;
            continue;
        }
        let err = if got == want { 0.0 } else { (got - want).abs() / want.abs() };
        worst = worst.max(err);
        check(err <= REL_TOLERANCE, || format!("({a},{b},{both},{total}): rel err {err:e}"))?;
    }
    check(distance(5, 5, 5, 100) == 0.0, || "self case is not 0.0".into())?;
    check(distance(1000, 100, 0, 1_000_000).is_infinite(), || {
        "zero co-occurrence is not infinite".into()
    })?;
    let derived = distance(1000, 100, 50, 1_000_000);
    check(format_half_up(derived, 6) == "0.325257", || format!("derived case {derived}"))?;
    let elapsed = started.elapsed();
    check(elapsed < FORMULA_BUDGET, || format!("took {}", ms(elapsed)))?;
    Ok(format!("1000 tuples, max rel err {worst:.1e}, {}", ms(elapsed)))
}

fn zero_rule() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..PROPERTY_CASES {
        let (a, b, _, total) = random_tuple(&mut rng);
        let s = score(&HitCounts::new(a, b, 0, total).unwrap()).unwrap();
        check(s.relatedness == 0.0, || format!("({a},{b},0,{total}) -> {}", s.relatedness))?;
    }
    Ok(format!("{PROPERTY_CASES} tuples with no co-occurrence score 0"))
}

fn symmetry_monotonicity() -> Outcome {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(99);
    let mut steps = 0;
    for _ in 0..PROPERTY_CASES {
        let (a, b, both, total) = random_tuple(&mut rng);
        let x = distance(a, b, both, total);
        let y = distance(b, a, both, total);
        check(x.to_bits() == y.to_bits(), || format!("asymmetric at ({a},{b},{both},{total})"))?;
        if both >= 1 && both < a.min(b) {
            steps += 1;
            let next = distance(a, b, both + 1, total);
            check(next < x || (next == 0.0 && x == 0.0), || {
                format!("not decreasing at ({a},{b},{both},{total}): {x} -> {next}")
            })?;
        }
    }
    let elapsed = started.elapsed();
    check(elapsed < PROPERTY_BUDGET, || format!("took {}", ms(elapsed)))?;
    Ok(format!("{PROPERTY_CASES} tuples, {steps} monotonicity steps, {}", ms(elapsed)))
}

fn index_equivalence() -> Outcome {
    let started = Instant::now();
    let text = common::random_corpus(11, 200);
    let corpus = Corpus::from_reader(text.as_bytes(), LanguageCode::EN).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("random.jsonl");
    std::fs::write(&path, &text).map_err(|e| e.to_string())?;
    let articles = oracle::load(&path);
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..100 {
        let phrase = common::random_phrase(&mut rng);
        let want: Vec<(usize, usize)> = articles
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                let n = oracle::occurrences(&a.text, &phrase);
                (n > 0).then_some((i, n))
            })
            .collect();
        let mut got = corpus.index().matches(&phrase);
        got.sort();
        check(got == want, || format!("phrase {phrase:?} differs"))?;
    }
    let elapsed = started.elapsed();
    check(elapsed < INDEX_BUDGET, || format!("took {}", ms(elapsed)))?;
    Ok(format!("100 phrases over 200 articles, {}", ms(elapsed)))
}

fn demo_explorer(config: PipelineConfig) -> Explorer {
    let provider = common::demo_provider();
    let mut explorer = Explorer::new(config).unwrap();
    explorer.register(LanguageCode::EN, provider.clone(), provider);
    explorer
}

fn golden() -> String {
    std::fs::read_to_string(support::fixture("golden/angela_merkel.xml")).unwrap()
}

async fn merkel(explorer: &Explorer) -> ExplorationResult {
    explorer
        .explore(LanguageCode::EN, "Angela Merkel", FieldSet::all())
        .await
        .unwrap()
}

fn worked_grouping() -> Result<(), String> {
    let entity = |title: &str, cats: &[&str]| RelatedEntity {
        concept: Concept::new(LanguageCode::EN, title).unwrap(),
        score: RelatednessScore {
            distance: 0.5,
            relatedness: 0.5,
            cooccurring: true,
        },
        origins: Default::default(),
        categories: cats.iter().map(|c| c.to_string()).collect(),
        assigned_category: None,
        snippets: vec![],
    };
    let mut entities = vec![
        entity("c1", &["X", "Y"]),
        entity("c2", &["X"]),
        entity("c3", &["Y", "Z"]),
        entity("c4", &["Y"]),
    ];
    let index = assign_categories(&mut entities);
    let assigned: Vec<_> = entities.iter().map(|e| e.assigned_category.clone()).collect();
    let index: Vec<_> = index.into_iter().map(|c| (c.name, c.count)).collect();
    check(
        assigned == [Some("Y"), Some("X"), Some("Y"), Some("Y")].map(|s| s.map(String::from))
            && index == [("Y".to_string(), 3), ("X".to_string(), 1)],
        || format!("worked grouping gave {assigned:?} / {index:?}"),
    )
}

async fn end_to_end() -> Outcome {
    worked_grouping()?;
    let result = merkel(&demo_explorer(PipelineConfig::default())).await;
    let expected = oracle::explore(&oracle::load(&common::demo_path()), "Angela Merkel");
    check(result.entities.len() == expected.entities.len(), || {
        format!("{} entities, oracle has {}", result.entities.len(), expected.entities.len())
    })?;
    for (got, want) in result.entities.iter().zip(&expected.entities) {
        check(got.concept.title == want.title, || {
            format!("rank order: {} vs {}", got.concept.title, want.title)
        })?;
        check((got.score.relatedness - want.relatedness).abs() < REL_TOLERANCE, || {
            format!("{}: sr {} vs {}", want.title, got.score.relatedness, want.relatedness)
        })?;
        check(got.assigned_category == want.category, || {
            format!("{}: category {:?} vs {:?}", want.title, got.assigned_category, want.category)
        })?;
        let tracks: Vec<(&str, &str)> = got
            .snippets
            .iter()
            .map(|s| (s.track.as_str(), s.text.as_str()))
            .collect();
        let want_tracks: Vec<(&str, &str)> =
            want.snippets.iter().map(|s| (s.0.as_str(), s.2.as_str())).collect();
        check(tracks == want_tracks, || format!("{}: snippets differ", want.title))?;
    }
    let xml = to_xml(&result);
    check(xml == golden(), || "XML differs from the golden file".into())?;
    Ok(format!("{} entities, golden XML byte-equal", result.entities.len()))
}

async fn latency() -> Outcome {
    let explorer = demo_explorer(PipelineConfig::default());
    let started = Instant::now();
    let cold = merkel(&explorer).await;
    let cold_time = started.elapsed();
    let started = Instant::now();
    let warm = merkel(&explorer).await;
    let warm_time = started.elapsed();
    check(cold_time < COLD_BUDGET, || format!("cold explore took {}", ms(cold_time)))?;
    check(warm_time < CACHED_BUDGET, || format!("cached explore took {}", ms(warm_time)))?;
    check(warm.from_cache && !cold.from_cache, || "cache flag not set".into())?;
    check(
        to_xml(&warm) == to_xml(&cold).replace("from_cache=\"false\"", "from_cache=\"true\""),
        || "cached XML differs beyond from_cache".into(),
    )?;
    Ok(format!("cold {}, cached {}", ms(cold_time), ms(warm_time)))
}

async fn join_all<T>(handles: Vec<tokio::task::JoinHandle<T>>) -> Vec<T> {
    let mut out = Vec::with_capacity(handles.len());
    for h in handles {
        out.push(h.await.unwrap());
    }
    out
}

async fn concurrency() -> Outcome {
    let sequential = merkel(&demo_explorer(PipelineConfig::default())).await;
    let shared = Arc::new(demo_explorer(PipelineConfig::default()));
    let handles = (0..16)
        .map(|_| {
            let e = shared.clone();
            tokio::spawn(async move { merkel(&e).await })
        })
        .collect();
    for mut result in join_all(handles).await {
        result.from_cache = false;
        result.generated_at = sequential.generated_at;
        check(result == sequential, || "a concurrent result differs".into())?;
    }

    let limit = 4;
    let instrumented = Arc::new(Instrumented::new(
        common::demo_provider(),
        Duration::from_millis(2),
    ));
    let mut explorer = Explorer::new(PipelineConfig {
        max_in_flight: limit,
        ..PipelineConfig::default()
    })
    .unwrap();
    explorer.register(LanguageCode::EN, instrumented.clone(), instrumented.clone());
    let explorer = Arc::new(explorer);
    let handles = ["Angela Merkel", "Euro", "Berlin", "Germany", "Helmut Kohl", "CDU"]
        .into_iter()
        .map(|t| {
            let e = explorer.clone();
            tokio::spawn(async move { e.explore(LanguageCode::EN, t, FieldSet::all()).await.is_ok() })
        })
        .collect();
    check(join_all(handles).await.into_iter().all(|ok| ok), || "an explore failed".into())?;
    let peak = instrumented.peak();
    check(peak <= limit, || format!("peak in-flight {peak} > {limit}"))?;
    Ok(format!("16 concurrent calls equal, peak in-flight {peak}/{limit}"))
}

async fn service_contract() -> Outcome {
    let app = demo_app();
    let reply = get(&app, "/api/explore?q=Angela%20Merkel").await;
    check(reply.status == StatusCode::OK, || format!("status {}", reply.status))?;
    let doc = XmlDocument::parse(&reply.body).map_err(|e| format!("schema: {e}"))?;
    check(doc.render() == reply.body, || "XML does not round-trip".into())?;

    let failing = app_with(Arc::new(NoRelations(common::demo_provider())));
    let cases = [
        (&app, "/api/explore", StatusCode::BAD_REQUEST, "missing_query"),
        (&app, "/api/explore?q=Euro&fields=sr,bogus", StatusCode::BAD_REQUEST, "unknown_field"),
        (&app, "/api/explore?q=Euro&format=yaml", StatusCode::BAD_REQUEST, "unknown_format"),
        (&app, "/api/explore?q=qqqq", StatusCode::NOT_FOUND, "no_match"),
        (&failing, "/api/explore?q=Euro", StatusCode::BAD_GATEWAY, "all_sources_failed"),
    ];
    for (app, uri, status, code) in cases {
        let reply = get(app, uri).await;
        check(
            reply.status == status && reply.body.contains(&format!("code=\"{code}\"")),
            || format!("{uri}: {} {}", reply.status, reply.body.trim()),
        )?;
    }

    // A fresh app, so every subset is computed cold and from_cache agrees.
    let app = demo_app();
    let mut responses = Vec::new();
    for mask in 0u8..32 {
        let names: Vec<&str> = Field::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, f)| f.as_str())
            .collect();
        let uri = format!("/api/explore?q=Angela%20Merkel&fields={}", names.join(","));
        let reply = get(&app, &uri).await;
        let parsed = XmlDocument::parse(&reply.body).map_err(|e| format!("{uri}: {e}"))?;
        let titles: Vec<String> = parsed.related.into_iter().map(|e| e.title).collect();
        responses.push((mask, facts(&reply.body), titles));
    }
    for (mask, small, titles) in &responses {
        check(titles == &responses[31].2, || format!("order changed for {mask:05b}"))?;
        for (other, large, _) in &responses {
            if mask & other == *mask {
                check(small.is_subset(large), || format!("{mask:05b} not within {other:05b}"))?;
            }
        }
    }
    Ok("schema-valid XML, 5 error cases, 32 field subsets monotone".into())
}

fn e<T>(r: Result<T, sere_core::datasource::ProviderError>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

async fn live_replay() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/replay");
    let mut exchanges = Vec::new();
    for dir in ["wikipedia", "dbpedia"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(root.join(dir))
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        for f in files {
            exchanges.extend(ReplayTransport::load_file(&f).map_err(|e| e.to_string())?);
        }
    }
    let transport = Arc::new(ReplayTransport::new(exchanges));
    let config = LiveConfig {
        retry: RetryPolicy {
            max_retries: 2,
            backoff: Duration::ZERO,
        },
        ..LiveConfig::default()
    };
    let wiki = WikipediaProvider::new(LanguageCode::EN, &config, transport.clone());
    let dbp = DbpediaProvider::new(LanguageCode::EN, &config, transport.clone());

    let found = e(wiki.search("Angela Merkel", 10).await)?;
    check(found.first().map(String::as_str) == Some("Angela Merkel"), || format!("{found:?}"))?;
    check(e(wiki.hit_count("Angela Merkel").await)? == 41234, || "hit count".into())?;
    let links = e(wiki.out_links("Angela Merkel").await)?;
    check(links.len() == 3, || format!("continuation lost links: {links:?}"))?;
    let before = transport.calls();
    let unstable = wiki.hit_count("Unstable").await.unwrap_err();
    check(
        unstable.kind == ErrorKind::Status(503) && transport.calls() - before == 3,
        || format!("503 handling: {unstable}"),
    )?;
    let truncated = wiki.hit_count("Truncated").await.unwrap_err();
    check(
        truncated.kind
            == ErrorKind::Malformed {
                field: "query.searchinfo.totalhits".into(),
            },
        || format!("malformed handling: {truncated}"),
    )?;
    let categories = e(dbp.categories("Angela Merkel").await)?;
    check(categories.len() == 3, || format!("{categories:?}"))?;
    check(e(dbp.narrower("Angela Merkel", 100).await)?.is_empty(), || "narrower".into())?;
    check(transport.misses() == 0, || format!("{} unrecorded requests", transport.misses()))?;
    Ok(format!("{} recorded exchanges replayed, 0 unrecorded", transport.calls()))
}

/// Runs a check as its own task so a panic reports FAIL instead of
/// aborting the run.
fn guarded<F>(runtime: &tokio::runtime::Runtime, f: F) -> Outcome
where
    F: Future<Output = Outcome> + Send + 'static,
{
    runtime
        .block_on(runtime.spawn(f))
        .unwrap_or_else(|e| Err(format!("panicked: {e}")))
}

fn sync(f: fn() -> Outcome) -> Outcome {
    std::panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()))
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(4)
        .enable_all()
        .build()
        .unwrap();
    let outcomes: Vec<(&str, Outcome)> = vec![
        ("formula_oracle", sync(formula_oracle)),
        ("zero_rule", sync(zero_rule)),
        ("symmetry_monotonicity", sync(symmetry_monotonicity)),
        ("index_equivalence", sync(index_equivalence)),
        ("end_to_end_fixture", guarded(&runtime, end_to_end())),
        ("latency", guarded(&runtime, latency())),
        ("concurrency", guarded(&runtime, concurrency())),
        ("service_contract", guarded(&runtime, service_contract())),
        ("live_client_replay", guarded(&runtime, live_replay())),
    ];
    let mut failed = BTreeSet::new();
    for (name, outcome) in &outcomes {
        match outcome {
            Ok(detail) => println!("PASS  {name:<22} {detail}"),
            Err(why) => {
                println!("FAIL  {name:<22} {why}");
                failed.insert(*name);
            }
        }
    }
    println!("{}/{} criteria passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
