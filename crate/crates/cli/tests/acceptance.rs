//! End-to-end acceptance suite. Prints one `PASS`/`FAIL` line per criterion
//! and exits nonzero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{golden, Fixtures};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use vocab_expander::{ModelRegistry, Session, SessionParams, SessionSnapshot};
use vocab_expander_cli::render_ranking;
use vocab_expander_service::{router, serve, AppState, SessionStore};

type Check = Result<(), String>;
type Criterion = (&'static str, fn(&Fixtures) -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const TOL: f64 = 1e-6;

fn params() -> SessionParams {
    SessionParams::with_models(["alpha", "beta"])
}

fn keys(records: Vec<vocab_expander::TermRecord>) -> Vec<String> {
    records.into_iter().map(|r| r.term).collect()
}

fn term(i: usize) -> String {
    format!("term_{i:03}")
}

fn knn_oracle(f: &Fixtures) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (id, raw) in f.paths.iter().map(|(id, _)| id).zip(&f.oracle.models) {
        let model = f.registry.get(id).unwrap();
        for _ in 0..100 {
            let query = raw.order.choose(&mut rng).unwrap();
            for k in [1, 5, 10, 50] {
                let got = model.top_k(query, k, &HashSet::new());
                let want = raw.brute_top_k(query, k, &BTreeSet::new());
                ensure!(
                    got.len() == want.len(),
                    "{id}/{query}/k={k}: length {} vs {}",
                    got.len(),
                    want.len()
                );
                for (g, (t, s)) in got.iter().zip(&want) {
                    ensure!(&g.term == t, "{id}/{query}/k={k}: {} vs {t}", g.term);
                    ensure!(
                        (g.score - s).abs() <= 1e-12,
                        "{id}/{query}/k={k}: {t} score"
                    );
                }
            }
        }
    }
    Ok(())
}

fn ensemble_averaging(f: &Fixtures) -> Check {
    let ensemble = f.registry.ensemble(&f.registry.ids()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // term_000..term_799 are in both vocabularies.
    for _ in 0..1000 {
        let (a, b) = (
            term(rng.random_range(0..800)),
            term(rng.random_range(0..800)),
        );
        let cosines: Vec<f64> = f
            .oracle
            .models
            .iter()
            .map(|m| m.cosine(&a, &b).unwrap())
            .collect();
        let want = cosines.iter().sum::<f64>() / cosines.len() as f64;
        let got = ensemble
            .similarity(&a, &b)
            .ok_or(format!("{a}/{b} undefined"))?;
        ensure!((got - want).abs() <= TOL, "{a}/{b}: {got} vs {want}");
        ensure!(
            Some(got) == ensemble.similarity(&b, &a),
            "{a}/{b} not symmetric"
        );
    }
    for id in f.registry.ids() {
        let single = f.registry.ensemble(std::slice::from_ref(&id)).unwrap();
        let model = f.registry.get(&id).unwrap();
        for _ in 0..200 {
            let (a, b) = (
                term(rng.random_range(0..800)),
                term(rng.random_range(0..800)),
            );
            ensure!(
                single.similarity(&a, &b) == model.similarity(&a, &b),
                "{id}: {a}/{b}"
            );
        }
    }
    Ok(())
}

fn compare_with_oracle(s: &Session, f: &Fixtures) -> Check {
    let (accepted, rejected) = (keys(s.accepted()), keys(s.rejected()));
    let p = s.params();
    let want = f.oracle.ranked(&accepted, &rejected, p.k, p.lambda);
    let got: BTreeSet<&str> = s.suggestions().keys().map(String::as_str).collect();
    let want_terms: BTreeSet<&str> = want.iter().map(|w| w.term.as_str()).collect();
    ensure!(got == want_terms, "suggested sets differ");
    for w in &want {
        let g = s.suggestion(&w.term).unwrap();
        ensure!(
            (g.score - w.score).abs() <= TOL,
            "{}: {} vs {}",
            w.term,
            g.score,
            w.score
        );
        ensure!(
            g.anchor == w.anchor,
            "{}: anchor {} vs {}",
            w.term,
            g.anchor,
            w.anchor
        );
    }
    Ok(())
}

fn scripted_session(f: &Fixtures) -> Result<Session, String> {
    let mut s = Session::new(params(), &f.registry).map_err(|e| e.to_string())?;
    for t in ["term_001", "term_021", "term_402", "term_850", "term_777"] {
        s.accept_term(t).map_err(|e| e.to_string())?;
    }
    let ranked: Vec<String> = s
        .ranked_suggestions()
        .iter()
        .map(|x| x.term.clone())
        .collect();
    for t in [&ranked[0], &ranked[5], "term_333"] {
        s.reject_term(t).map_err(|e| e.to_string())?;
    }
    Ok(s)
}

fn score_formula(f: &Fixtures) -> Check {
    ensure!(
        params().lambda == 0.5,
        "default lambda is {}",
        params().lambda
    );
    let s = scripted_session(f)?;
    ensure!(
        s.accepted().len() == 5 && s.rejected().len() == 3,
        "script did not apply"
    );
    ensure!(!s.suggestions().is_empty(), "no suggestions");
    let (accepted, rejected) = (keys(s.accepted()), keys(s.rejected()));
    for sug in s.suggestions().values() {
        let plus: f64 = accepted.iter().map(|a| f.oracle.p_hat(&sug.term, a)).sum();
        let minus: f64 = rejected.iter().map(|r| f.oracle.p_hat(&sug.term, r)).sum();
        let want = plus - 0.5 * minus;
        ensure!(
            (sug.score - want).abs() <= TOL,
            "{}: {} vs {want}",
            sug.term,
            sug.score
        );
    }
    compare_with_oracle(&s, f)
}

fn rejection_delta(f: &Fixtures) -> Check {
    let mut s = scripted_session(f)?;
    let before: BTreeMap<String, f64> = s
        .suggestions()
        .iter()
        .map(|(t, x)| (t.clone(), x.score))
        .collect();
    let r = s.ranked_suggestions()[2].term.clone();
    s.reject_term(&r).map_err(|e| e.to_string())?;
    ensure!(!s.suggestions().contains_key(&r), "{r} still suggested");
    ensure!(
        s.suggestions().len() == before.len() - 1,
        "suggested set changed beyond {r}"
    );
    for sug in s.suggestions().values() {
        let delta = sug.score - before[&sug.term];
        let want = -0.5 * f.oracle.p_hat(&sug.term, &r);
        ensure!(
            (delta - want).abs() <= TOL,
            "{}: delta {delta} vs {want}",
            sug.term
        );
    }
    Ok(())
}

fn anchor_and_display(f: &Fixtures) -> Check {
    let s = scripted_session(f)?;
    let accepted = keys(s.accepted());
    for sug in s.suggestions().values() {
        let want = f.oracle.anchor(&sug.term, &accepted);
        ensure!(
            sug.anchor == want,
            "{}: anchor {} vs {want}",
            sug.term,
            sug.anchor
        );
        ensure!(
            sug.below_threshold == (sug.score < 0.3),
            "{}: flag",
            sug.term
        );
    }
    let ranked = s.ranked_suggestions();
    for g in s.list_view() {
        ensure!(
            g.suggestions.len() <= 3,
            "group {} has {}",
            g.anchor,
            g.suggestions.len()
        );
        let want: Vec<&str> = ranked
            .iter()
            .filter(|x| x.anchor == g.anchor)
            .take(3)
            .map(|x| x.term.as_str())
            .collect();
        let got: Vec<&str> = g.suggestions.iter().map(|x| x.term.as_str()).collect();
        ensure!(got == want, "group {}: {got:?} vs {want:?}", g.anchor);
    }

    // A suggestion whose score equals the threshold is not dimmed; one ulp
    // above the score, it is.
    let probe = ranked[ranked.len() / 2].clone();
    for (threshold, dimmed) in [
        (probe.score, false),
        (probe.score.next_up(), true),
        (probe.score.next_down(), false),
    ] {
        let mut s = Session::new(
            SessionParams {
                display_threshold: threshold,
                ..params()
            },
            &f.registry,
        )
        .unwrap();
        for a in &accepted {
            s.accept_term(a).unwrap();
        }
        for r in keys(scripted_session(f)?.rejected()) {
            s.reject_term(&r).unwrap();
        }
        let got = s.suggestion(&probe.term).ok_or("probe vanished")?;
        ensure!(got.score == probe.score, "probe score changed");
        ensure!(
            got.below_threshold == dimmed,
            "threshold {threshold}: flag {}",
            got.below_threshold
        );
    }
    Ok(())
}

#[derive(Clone, Debug)]
enum Op {
    Accept(String),
    Reject(String),
    Remove(String),
}

fn apply(s: &mut Session, op: &Op) {
    match op {
        Op::Accept(t) => s.accept_term(t).unwrap(),
        Op::Reject(t) => s.reject_term(t).unwrap(),
        Op::Remove(t) => s.remove_accepted(t).unwrap(),
    }
}

fn replay(ops: &[Op], registry: &ModelRegistry) -> Session {
    let mut s = Session::new(params(), registry).unwrap();
    for op in ops {
        apply(&mut s, op);
    }
    s
}

fn disjoint(s: &Session) -> bool {
    let a: BTreeSet<String> = keys(s.accepted()).into_iter().collect();
    let r: BTreeSet<String> = keys(s.rejected()).into_iter().collect();
    let w: BTreeSet<&String> = s.suggestions().keys().collect();
    a.is_disjoint(&r) && w.iter().all(|t| !a.contains(*t) && !r.contains(*t))
}

fn state_machine(f: &Fixtures) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seq in 0..500 {
        let mut s = Session::new(params(), &f.registry).unwrap();
        let mut ops = Vec::new();
        for _ in 0..rng.random_range(1..10) {
            let accepted = keys(s.accepted());
            let suggested: Vec<String> = s.suggestions().keys().cloned().collect();
            let pick = |rng: &mut ChaCha8Rng| match suggested.choose(rng) {
                Some(t) if rng.random_bool(0.7) => t.clone(),
                _ => term(rng.random_range(0..1000)),
            };
            let op = match rng.random_range(0..10) {
                0..5 => Op::Accept(pick(&mut rng)),
                5..8 => {
                    let t = pick(&mut rng);
                    if accepted.contains(&t) {
                        continue;
                    }
                    Op::Reject(t)
                }
                _ => match accepted.choose(&mut rng) {
                    Some(t) => Op::Remove(t.clone()),
                    None => continue,
                },
            };
            apply(&mut s, &op);
            ops.push(op);
            ensure!(disjoint(&s), "sequence {seq}: overlap after {ops:?}");
        }
        ensure!(
            replay(&ops, &f.registry) == s,
            "sequence {seq}: replay differs for {ops:?}"
        );

        if let Some(target) = keys(s.accepted()).choose(&mut rng).cloned() {
            let mut removed = s.clone();
            removed.remove_accepted(&target).unwrap();
            let kept: Vec<Op> = ops
                .iter()
                .filter(|op| !matches!(op, Op::Accept(t) | Op::Reject(t) | Op::Remove(t) if *t == target))
                .cloned()
                .collect();
            ensure!(
                replay(&kept, &f.registry) == removed,
                "sequence {seq}: removing {target} differs from replay of {kept:?}"
            );
        }
    }
    Ok(())
}

fn round_trips(f: &Fixtures) -> Check {
    let s = scripted_session(f)?;
    let text = s.export_snapshot().to_json();
    let snap = SessionSnapshot::from_json(&text).map_err(|e| e.to_string())?;
    let back = Session::import_snapshot(&snap, &f.registry).map_err(|e| e.to_string())?;
    ensure!(back == s, "snapshot import differs");
    let strip = |mut v: Value| {
        v["session_id"] = Value::Null;
        v
    };
    ensure!(
        strip(serde_json::to_value(back.view()).unwrap())
            == strip(serde_json::to_value(s.view()).unwrap()),
        "snapshot view differs"
    );

    let list = s.export_term_list();
    let imported =
        Session::import_term_list(&list, params(), &f.registry).map_err(|e| e.to_string())?;
    let mut sequential = Session::new(params(), &f.registry).unwrap();
    for line in list.lines() {
        sequential.accept_term(line).unwrap();
    }
    ensure!(
        imported == sequential,
        "term list import differs from sequential accepts"
    );
    ensure!(
        keys(imported.accepted()) == keys(s.accepted()),
        "term list lost terms"
    );
    Ok(())
}

async fn spawn(state: Arc<AppState>) -> (String, tokio::task::JoinHandle<std::io::Result<()>>) {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    (base, tokio::spawn(serve(listener, router(state, None))))
}

async fn post(client: &reqwest::Client, url: String, body: Value) -> (u16, Value) {
    let resp = client
        .post(url)
        .header("content-type", "application/json")
        .body(body.to_string())
        .send()
        .await
        .unwrap();
    let status = resp.status().as_u16();
    (
        status,
        serde_json::from_str(&resp.text().await.unwrap()).unwrap(),
    )
}

async fn get(client: &reqwest::Client, url: String) -> Value {
    serde_json::from_str(&client.get(url).send().await.unwrap().text().await.unwrap()).unwrap()
}

const SCENARIO: &[(&str, &str)] = &[
    ("accept", "term_001"),
    ("accept", "term_021"),
    ("reject", "term_041"),
    ("accept", "Term 900"),
    ("reject", "term_002"),
    ("accept", "term_041"),
    ("accept", "unseen word"),
    ("remove", "term_021"),
    ("reject", "term_061"),
];

fn service_equivalence(f: &Fixtures) -> Check {
    let registry = Arc::new(f.registry.clone());
    let snapshots = tempfile::tempdir().unwrap();
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        let client = reqwest::Client::new();
        let store =
            SessionStore::persistent(snapshots.path(), &registry).map_err(|e| e.to_string())?;
        let state = Arc::new(AppState::new(registry.clone(), store, params()));
        let (base, handle) = spawn(state).await;

        let (status, created) = post(&client, format!("{base}/api/sessions"), json!({})).await;
        ensure!(status == 201, "create returned {status}");
        let id = created["session_id"].as_str().unwrap().to_owned();

        let mut local = Session::with_id(id.clone(), params(), &registry).unwrap();
        let mut last = Value::Null;
        for (op, t) in SCENARIO {
            let (status, remote) = post(
                &client,
                format!("{base}/api/sessions/{id}/{op}"),
                json!({ "term": t }),
            )
            .await;
            ensure!(status == 200, "{op} {t}: {status}");
            match *op {
                "accept" => local.accept_term(t),
                "reject" => local.reject_term(t),
                _ => local.remove_accepted(t),
            }
            .unwrap();
            ensure!(
                remote == serde_json::to_value(local.view()).unwrap(),
                "state differs after {op} {t}"
            );
            last = remote;
        }
        ensure!(
            get(&client, format!("{base}/api/sessions/{id}")).await == last,
            "GET differs"
        );

        handle.abort();
        let _ = handle.await;
        let store =
            SessionStore::persistent(snapshots.path(), &registry).map_err(|e| e.to_string())?;
        let (base, handle) =
            spawn(Arc::new(AppState::new(registry.clone(), store, params()))).await;
        let restored = get(&client, format!("{base}/api/sessions/{id}")).await;
        handle.abort();
        ensure!(restored == last, "state lost across restart");
        Ok(())
    })
}

fn batch_cli(f: &Fixtures) -> Check {
    let seeds = golden("seeds.txt");
    let args = ["--rounds", "0", "--top-n", "1000"];
    let a = f.expand(&seeds, &args);
    let b = f.expand(&seeds, &args);
    ensure!(
        a.status.success(),
        "expand failed: {}",
        String::from_utf8_lossy(&a.stderr)
    );
    ensure!(a.stdout == b.stdout, "identical invocations differ");

    let golden_path = golden("expand_rounds0.tsv");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden_path, &a.stdout).unwrap();
    }
    let want =
        std::fs::read(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    ensure!(
        a.stdout == want,
        "output differs from {}",
        golden_path.display()
    );

    let mut session = Session::new(params(), &f.registry).unwrap();
    session
        .accept_term_list(&std::fs::read_to_string(&seeds).unwrap())
        .unwrap();
    ensure!(
        String::from_utf8(a.stdout).unwrap() == render_ranking(&session, usize::MAX),
        "rounds=0 output is not the engine ranking"
    );
    Ok(())
}

fn main() -> ExitCode {
    let started = Instant::now();
    let fixtures = Fixtures::new();
    let criteria: &[Criterion] = &[
        ("knn oracle equivalence", knn_oracle),
        ("ensemble averaging", ensemble_averaging),
        ("score formula", score_formula),
        ("rejection delta", rejection_delta),
        ("anchor and display rules", anchor_and_display),
        ("state-machine properties", state_machine),
        ("round-trips", round_trips),
        ("service equivalence", service_equivalence),
        ("batch cli determinism", batch_cli),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| check(&fixtures))).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  {name} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
