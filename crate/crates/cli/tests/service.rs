mod common;

use numorph::service::{EditResponse, RowResponse, RowView, RowsResponse, StatsResponse, SuggestResponse};
use numorph::session::Session;
use numorph_core::wordlist::{Delimiter, ViolationKind};
use reqwest::{Client, StatusCode};
use serde_json::{json, Value};

async fn put(client: &Client, base: &str, id: &str, body: Value) -> reqwest::Response {
    client.put(format!("{base}/api/row/{id}")).json(&body).send().await.unwrap()
}

fn opacity(stats: &StatsResponse, language: &str) -> f64 {
    stats.languages.iter().find(|l| l.language == language).unwrap().stats.opacity
}

#[tokio::test(flavor = "multi_thread")]
async fn rows_and_single_row() {
    let base = common::spawn(common::sample_session()).await;
    let c = Client::new();
    let all: RowsResponse = c.get(format!("{base}/api/rows")).send().await.unwrap().json().await.unwrap();
    assert_eq!(all.rows.len(), 10);
    assert_eq!(all.revision, 0);
    let fr: RowsResponse = c
        .get(format!("{base}/api/rows?language=stan1290"))
        .send().await.unwrap().json().await.unwrap();
    assert_eq!(fr.rows.len(), 5);
    let one: RowResponse = c.get(format!("{base}/api/row/german-1")).send().await.unwrap().json().await.unwrap();
    assert_eq!(one.row.surface, "aI n s");
    assert_eq!(one.row.underlying, "aI n");
    let missing = c.get(format!("{base}/api/row/nope")).send().await.unwrap();
    assert_eq!(missing.status(), StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread")]
async fn edit_revalidates_and_updates_stats() {
    let base = common::spawn(common::sample_session()).await;
    let c = Client::new();
    let before: StatsResponse = c.get(format!("{base}/api/stats")).send().await.unwrap().json().await.unwrap();
    assert!((opacity(&before, "stan1295") - 7.0 / 6.0).abs() < 1e-12);

    // both occurrences of cognate 6 now read [ts I ç]
    let r = put(&c, &base, "german-32", json!({"segments": "ts v aI + U n -/d + d r aI + ts I ç"})).await;
    assert_eq!(r.status(), StatusCode::OK);
    let body: EditResponse = r.json().await.unwrap();
    assert_eq!(body.revision, 1);
    assert!(body.violations.is_empty());
    assert_eq!(body.row.surface, "ts v aI + U n + d r aI + ts I ç");

    let after: StatsResponse = c.get(format!("{base}/api/stats")).send().await.unwrap().json().await.unwrap();
    assert_eq!(after.revision, 1);
    assert!((opacity(&after, "stan1295") - 1.0).abs() < 1e-12);

    // a different underlying form for cognate 6
    let r = put(&c, &base, "german-32", json!({"segments": "ts v aI + U n -/d + d r aI + s I ç"})).await;
    let body: EditResponse = r.json().await.unwrap();
    assert!(body.violations.iter().any(|v| v.kind == ViolationKind::InconsistentUnderlying));
    let cog = c.get(format!("{base}/api/cognates")).send().await.unwrap();
    assert_eq!(cog.status(), StatusCode::CONFLICT);
    let v: Value = c.get(format!("{base}/api/validate")).send().await.unwrap().json().await.unwrap();
    assert_eq!(v["violations"][0]["kind"], "inconsistent-underlying");

    let undone: EditResponse = c.post(format!("{base}/api/undo")).send().await.unwrap().json().await.unwrap();
    assert_eq!(undone.row.segments, "ts v aI + U n -/d + d r aI + ts I ç");
    assert_eq!(undone.revision, 3);
}

#[tokio::test(flavor = "multi_thread")]
async fn rejected_edits() {
    let base = common::spawn(common::sample_session()).await;
    let c = Client::new();
    let r = put(&c, &base, "german-1", json!({"segments": "aI + + n"})).await;
    assert_eq!(r.status(), StatusCode::UNPROCESSABLE_ENTITY);
    let e: Value = r.json().await.unwrap();
    assert_eq!(e["error"], "parse");
    assert!(e["message"].as_str().unwrap().contains("row 2"));
    let r = put(&c, &base, "german-1", json!({"segments": "aI n + s"})).await;
    assert_eq!(r.status(), StatusCode::CONFLICT);
    let r = put(&c, &base, "german-1", json!({"cognates": "1 x"})).await;
    assert_eq!(r.status(), StatusCode::UNPROCESSABLE_ENTITY);
    let r = put(&c, &base, "nope", json!({"segments": "a"})).await;
    assert_eq!(r.status(), StatusCode::NOT_FOUND);
    let rows: RowsResponse = c.get(format!("{base}/api/rows")).send().await.unwrap().json().await.unwrap();
    assert_eq!(rows.revision, 0);
}

#[tokio::test(flavor = "multi_thread")]
async fn cognate_classes_with_alignments() {
    let base = common::spawn(common::sample_session()).await;
    let v: Value = Client::new()
        .get(format!("{base}/api/cognates?language=stan1295"))
        .send().await.unwrap().json().await.unwrap();
    let classes = v["classes"].as_array().unwrap();
    assert!(classes.iter().all(|c| c["language"] == "stan1295"));
    let ty = classes.iter().find(|c| c["cognate_id"] == 6).unwrap();
    assert_eq!(ty["underlying"], json!(["ts", "I", "ç"]));
    assert_eq!(ty["allomorphs"].as_array().unwrap().len(), 2);
    assert!(ty["rendered"].as_str().unwrap().contains("UNDERLYING"));
}

#[tokio::test(flavor = "multi_thread")]
async fn suggestions_are_proposals_only() {
    let base = common::spawn(common::sample_session()).await;
    let c = Client::new();
    // a freshly imported, unsegmented row
    let r = put(&c, &base, "german-21", json!({
        "segments": "aI n s U n ts v a n ts I ç", "cognates": "9", "morphemes": "TWENTYONE"
    }))
    .await;
    assert_eq!(r.status(), StatusCode::OK);
    let s: SuggestResponse = c
        .post(format!("{base}/api/suggest"))
        .json(&json!({"row_id": "german-21", "model": "affix", "level": "surface"}))
        .send().await.unwrap().json().await.unwrap();
    // "aI n s" is a word of its own
    assert!(s.boundaries.contains(&3));
    assert!(s.proposed_segments.starts_with("aI n s + "));
    assert_eq!(s.tokens.len(), 12);
    let row: RowResponse = c.get(format!("{base}/api/row/german-21")).send().await.unwrap().json().await.unwrap();
    assert_eq!(row.row.segments, "aI n s U n ts v a n ts I ç");

    let bad = c
        .post(format!("{base}/api/suggest"))
        .json(&json!({"row_id": "german-21", "model": "morfessor", "level": "surface"}))
        .send().await.unwrap();
    assert_eq!(bad.status(), StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test(flavor = "multi_thread")]
async fn save_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sample.tsv");
    std::fs::copy(common::SAMPLE, &path).unwrap();
    let base = common::spawn(Session::open(&path, Delimiter::Tab).unwrap()).await;
    let c = Client::new();
    put(&c, &base, "french-2", json!({"morphemes": "DEUX"})).await;
    let saved: Value = c.post(format!("{base}/api/save")).send().await.unwrap().json().await.unwrap();
    assert_eq!(saved["revision"], 1);
    let other = dir.path().join("copy.tsv");
    let r = c.post(format!("{base}/api/save")).json(&json!({"path": other})).send().await.unwrap();
    assert_eq!(r.status(), StatusCode::OK);
    for p in [&path, &other] {
        let reloaded = Session::open(p, Delimiter::Tab).unwrap();
        let served: RowsResponse = c.get(format!("{base}/api/rows")).send().await.unwrap().json().await.unwrap();
        let rows: Vec<RowView> = reloaded.snapshot().rows().iter().map(RowView::from).collect();
        assert_eq!(rows, served.rows);
    }
}
