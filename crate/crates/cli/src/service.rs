//! JSON-over-HTTP annotation service.
//!
//! One [`Session`] sits behind a read-write lock. Edits take the write lock
//! for the whole parse, replace and validate step, so they are serialized and
//! a reader never sees half an edit. Readers clone the current snapshot and
//! release the lock before doing any analysis.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use numorph_core::alignment::{align_class, build_cognate_classes, render_class, AlignmentMatrix};
use numorph_core::metrics::{all_stats, LanguageStats};
use numorph_core::models::{train_for, ModelKind, ModelOptions, TargetSize};
use numorph_core::segmentation::apply_cuts;
use numorph_core::wordlist::{
    serialize_segments, validate, Level, Violation, WordForm, Wordlist,
};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::RwLock;

use crate::session::{EditError, RowEdit, Session, SessionError};

pub struct AppState {
    session: RwLock<Session>,
    options: ModelOptions,
}

impl AppState {
    pub fn new(session: Session, options: ModelOptions) -> Arc<Self> {
        Arc::new(AppState {
            session: RwLock::new(session),
            options,
        })
    }

    async fn snapshot(&self) -> (u64, Arc<Wordlist>) {
        let s = self.session.read().await;
        (s.revision(), s.snapshot())
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl ToString) -> Self {
        ApiError {
            status,
            kind,
            message: message.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.kind,
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<EditError> for ApiError {
    fn from(e: EditError) -> Self {
        match e {
            EditError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not-found", e),
            EditError::Parse(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "parse", e),
            EditError::Length(_) => ApiError::new(StatusCode::CONFLICT, "length-mismatch", e),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e {
            SessionError::NoPath => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, "save", e)
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// A row as the client sees it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowView {
    pub id: String,
    pub language: String,
    pub concept: String,
    pub value: i64,
    pub form: String,
    pub segments: String,
    pub cognates: String,
    pub morphemes: String,
    /// Surface projection, morphs separated by " + ".
    pub surface: String,
    pub underlying: String,
}

impl From<&WordForm> for RowView {
    fn from(r: &WordForm) -> Self {
        let proj = |level| {
            r.morphs
                .iter()
                .map(|m| m.projection(level).join(" "))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        RowView {
            id: r.id.clone(),
            language: r.language.clone(),
            concept: r.concept.clone(),
            value: r.value,
            form: r.form.clone(),
            segments: r.segments(),
            cognates: r.cognates_field(),
            morphemes: r.morphemes_field(),
            surface: proj(Level::Surface),
            underlying: proj(Level::Underlying),
        }
    }
}

#[derive(Debug, Deserialize)]
struct LanguageFilter {
    language: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RowsResponse {
    pub revision: u64,
    pub rows: Vec<RowView>,
}

async fn rows(
    State(app): State<Arc<AppState>>,
    Query(q): Query<LanguageFilter>,
) -> ApiResult<RowsResponse> {
    let (revision, w) = app.snapshot().await;
    let rows = w
        .rows()
        .iter()
        .filter(|r| q.language.as_ref().is_none_or(|l| *l == r.language))
        .map(RowView::from)
        .collect();
    Ok(Json(RowsResponse { revision, rows }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RowResponse {
    pub revision: u64,
    pub row: RowView,
}

async fn row(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<RowResponse> {
    let (revision, w) = app.snapshot().await;
    let row = w
        .get(&id)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not-found", format!("unknown row {id:?}")))?;
    Ok(Json(RowResponse {
        revision,
        row: row.into(),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EditResponse {
    pub revision: u64,
    pub row: RowView,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

async fn put_row(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(edit): Json<RowEdit>,
) -> ApiResult<EditResponse> {
    let out = app.session.write().await.edit(&id, &edit)?;
    log::info!("revision {}: edited {id}", out.revision);
    Ok(Json(EditResponse {
        revision: out.revision,
        row: (&out.row).into(),
        violations: out.report.violations,
        warnings: out.report.warnings,
    }))
}

async fn undo(State(app): State<Arc<AppState>>) -> ApiResult<EditResponse> {
    let out = app
        .session
        .write()
        .await
        .undo()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "nothing-to-undo", "undo stack is empty"))?;
    Ok(Json(EditResponse {
        revision: out.revision,
        row: (&out.row).into(),
        violations: out.report.violations,
        warnings: out.report.warnings,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ValidateResponse {
    pub revision: u64,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

async fn validate_all(State(app): State<Arc<AppState>>) -> ApiResult<ValidateResponse> {
    let (revision, w) = app.snapshot().await;
    let report = validate(&w);
    Ok(Json(ValidateResponse {
        revision,
        violations: report.violations,
        warnings: report.warnings,
    }))
}

#[derive(Debug, Serialize)]
struct ClassView {
    language: String,
    cognate_id: u32,
    gloss: String,
    underlying: Vec<String>,
    allomorphs: Vec<Vec<String>>,
    rows: Vec<String>,
    matrix: AlignmentMatrix,
    rendered: String,
}

#[derive(Debug, Serialize)]
struct CognatesResponse {
    revision: u64,
    classes: Vec<ClassView>,
}

async fn cognates(
    State(app): State<Arc<AppState>>,
    Query(q): Query<LanguageFilter>,
) -> ApiResult<CognatesResponse> {
    let (revision, w) = app.snapshot().await;
    let classes = build_cognate_classes(&w)
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, "inconsistent-underlying", e))?;
    let classes = classes
        .into_iter()
        .filter(|c| q.language.as_ref().is_none_or(|l| *l == c.language))
        .map(|c| {
            let matrix = align_class(&c);
            ClassView {
                rendered: render_class(&c, &matrix),
                language: c.language.clone(),
                cognate_id: c.cognate_id,
                gloss: c.gloss.clone(),
                underlying: c.underlying.clone(),
                allomorphs: c.allomorphs.iter().cloned().collect(),
                rows: c.occurrences.iter().map(|o| o.row.clone()).collect(),
                matrix,
            }
        })
        .collect();
    Ok(Json(CognatesResponse { revision, classes }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsRow {
    pub language: String,
    #[serde(flatten)]
    pub stats: LanguageStats,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsResponse {
    pub revision: u64,
    pub languages: Vec<StatsRow>,
}

async fn stats(State(app): State<Arc<AppState>>) -> ApiResult<StatsResponse> {
    let (revision, w) = app.snapshot().await;
    let languages = all_stats(&w)
        .into_iter()
        .map(|(language, stats)| StatsRow { language, stats })
        .collect();
    Ok(Json(StatsResponse {
        revision,
        languages,
    }))
}

#[derive(Debug, Deserialize)]
pub struct SuggestRequest {
    pub row_id: String,
    pub model: String,
    pub level: String,
    #[serde(default)]
    pub target_size: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub revision: u64,
    pub row_id: String,
    pub model: String,
    pub level: String,
    pub tokens: Vec<String>,
    pub boundaries: Vec<usize>,
    /// Display form of the proposal, "a b + c".
    pub segmentation: String,
    /// The row's SEGMENTS with the proposed cuts in place of the current
    /// ones. Never applied by the server.
    pub proposed_segments: String,
}

async fn suggest(
    State(app): State<Arc<AppState>>,
    Json(req): Json<SuggestRequest>,
) -> ApiResult<SuggestResponse> {
    let bad = |m: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "bad-request", m);
    let kind: ModelKind = req.model.parse().map_err(bad)?;
    let level: Level = req.level.parse().map_err(bad)?;
    let mut options = app.options;
    if let Some(t) = &req.target_size {
        options.target = t.parse::<TargetSize>().map_err(bad)?;
    }
    let (revision, w) = app.snapshot().await;
    let row = w
        .get(&req.row_id)
        .cloned()
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "not-found", format!("unknown row {:?}", req.row_id)))?;
    let response = tokio::task::spawn_blocking(move || {
        let (_, trained) = train_for(&w, &row.language, level, kind, &options)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "model", e))?;
        let (tokens, _) = row.projection(level);
        let h = trained.segmenter.segment(&tokens);
        let proposed = apply_cuts(&row.morphs, level, &h.boundaries)
            .expect("model cuts lie inside the word");
        Ok::<_, ApiError>(SuggestResponse {
            revision,
            row_id: row.id.clone(),
            model: kind.to_string(),
            level: level.to_string(),
            segmentation: h.to_string(),
            boundaries: h.boundaries.iter().copied().collect(),
            tokens: h.tokens,
            proposed_segments: serialize_segments(&proposed),
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e))??;
    Ok(Json(response))
}

#[derive(Debug, Default, Deserialize)]
pub struct SaveRequest {
    pub path: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SaveResponse {
    pub revision: u64,
    pub path: PathBuf,
}

async fn save(
    State(app): State<Arc<AppState>>,
    body: Option<Json<SaveRequest>>,
) -> ApiResult<SaveResponse> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let mut s = app.session.write().await;
    let path = s.save(req.path.as_deref())?;
    log::info!("saved revision {} to {}", s.revision(), path.display());
    Ok(Json(SaveResponse {
        revision: s.revision(),
        path,
    }))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/rows", get(rows))
        .route("/api/row/{id}", get(row).put(put_row))
        .route("/api/validate", get(validate_all))
        .route("/api/cognates", get(cognates))
        .route("/api/stats", get(stats))
        .route("/api/suggest", post(suggest))
        .route("/api/save", post(save))
        .route("/api/undo", post(undo))
        .with_state(state)
}

/// Serves until the process receives Ctrl-C.
pub async fn serve(state: Arc<AppState>, listener: TcpListener) -> std::io::Result<()> {
    let addr: SocketAddr = listener.local_addr()?;
    log::info!("listening on http://{addr}");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
