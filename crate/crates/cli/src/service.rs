//! Local HTTP review service over one bundle.
//!
//! All bodies are JSON. Errors come back as `{"error": "..."}` with a 4xx
//! status. Requests that change selections must name the reviewer in the
//! `X-Selector` header.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::{Mutex, RwLock};
use tower_http::services::ServeDir;

use lexforge::store::{
    agreement_report, judge_bundle, ranking_metrics, ResourceBundle, StoreError, TargetKind, REVIEW_DEPTH,
};

pub const SELECTOR_HEADER: &str = "x-selector";

pub struct AppState {
    bundle: RwLock<ResourceBundle>,
    /// Where accepted changes are written; `None` keeps them in memory.
    path: Option<PathBuf>,
    writer: Mutex<()>,
}

impl AppState {
    pub fn new(bundle: ResourceBundle, path: Option<PathBuf>) -> Arc<Self> {
        Arc::new(Self {
            bundle: RwLock::new(bundle),
            path,
            writer: Mutex::new(()),
        })
    }

    pub async fn snapshot(&self) -> ResourceBundle {
        self.bundle.read().await.clone()
    }
}

pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self(StatusCode::BAD_REQUEST, message.into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match e {
            StoreError::UnknownTarget(_) => StatusCode::NOT_FOUND,
            StoreError::UnknownCandidate { .. } | StoreError::InsufficientData(_) => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self(status, e.to_string())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn selector(headers: &HeaderMap) -> Option<String> {
    headers
        .get(SELECTOR_HEADER)
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn kind_name(kind: TargetKind) -> &'static str {
    match kind {
        TargetKind::Entity => "entity",
        TargetKind::Relation => "relation",
    }
}

#[derive(Debug, Deserialize)]
pub struct TargetQuery {
    /// `entities`, `relations` or `all`.
    #[serde(default)]
    kind: Option<String>,
    /// `unreviewed` or `all`.
    #[serde(default)]
    filter: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct TargetSummary {
    pub id: String,
    pub kind: &'static str,
    pub candidates: usize,
    pub reviewed: bool,
    pub warnings: Vec<String>,
}

async fn list_targets(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Query(q): Query<TargetQuery>,
) -> ApiResult<Vec<TargetSummary>> {
    let (entities, relations) = match q.kind.as_deref().unwrap_or("all") {
        "all" => (true, true),
        "entities" => (true, false),
        "relations" => (false, true),
        other => return Err(ApiError::bad_request(format!("unknown kind {other:?}"))),
    };
    let unreviewed = match q.filter.as_deref().unwrap_or("all") {
        "all" => false,
        "unreviewed" => true,
        other => return Err(ApiError::bad_request(format!("unknown filter {other:?}"))),
    };
    let who = selector(&headers);
    let bundle = state.bundle.read().await;
    let reviewed = |target: &str| {
        bundle
            .selections
            .iter()
            .any(|s| s.target == target && who.as_deref().is_none_or(|w| s.selector == w))
    };
    let mut out = Vec::new();
    if entities {
        for (id, e) in bundle.entities.iter().filter(|(_, e)| !e.anonymous) {
            out.push(TargetSummary {
                id: id.clone(),
                kind: "entity",
                candidates: e.candidates.len().min(REVIEW_DEPTH),
                reviewed: reviewed(id),
                warnings: e.warnings.clone(),
            });
        }
    }
    if relations {
        for (id, r) in &bundle.relations {
            out.push(TargetSummary {
                id: id.clone(),
                kind: "relation",
                candidates: r.review_order().len().min(REVIEW_DEPTH),
                reviewed: reviewed(id),
                warnings: r.warnings.clone(),
            });
        }
    }
    if unreviewed {
        out.retain(|t| !t.reviewed);
    }
    Ok(Json(out))
}

#[derive(Debug, Serialize)]
pub struct CandidateView {
    pub rank: usize,
    pub id: usize,
    /// The realized name, or the plan with S and O placeholders.
    pub phrase: String,
    pub example: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pronoun_example: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub templates: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct CandidatesResponse {
    pub target: String,
    pub kind: &'static str,
    pub candidates: Vec<CandidateView>,
    /// Ranks marked by the requesting selector; `[]` means none was
    /// acceptable, absent means not reviewed yet.
    pub selection: Option<Vec<usize>>,
}

fn candidate_views(bundle: &ResourceBundle, target: &str) -> Result<(TargetKind, Vec<CandidateView>), ApiError> {
    let kind = bundle
        .target_kind(target)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown target {target}")))?;
    let order = bundle.review_order(target).unwrap_or_default();
    let views = order
        .into_iter()
        .take(REVIEW_DEPTH)
        .enumerate()
        .map(|(i, id)| match kind {
            TargetKind::Entity => {
                let c = &bundle.entities[target].candidates[id];
                CandidateView {
                    rank: i + 1,
                    id,
                    phrase: c.realized.clone(),
                    example: c.example.clone(),
                    pronoun_example: Some(c.pronoun_example.clone()),
                    templates: None,
                }
            }
            TargetKind::Relation => {
                let c = &bundle.relations[target].candidates[id];
                CandidateView {
                    rank: i + 1,
                    id,
                    phrase: c.pattern.clone(),
                    example: c.example.clone(),
                    pronoun_example: None,
                    templates: Some(c.templates.clone()),
                }
            }
        })
        .collect();
    Ok((kind, views))
}

async fn get_candidates(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Path(target): Path<String>,
) -> ApiResult<CandidatesResponse> {
    let bundle = state.bundle.read().await;
    let (kind, candidates) = candidate_views(&bundle, &target)?;
    let selection = selector(&headers).and_then(|who| bundle.marks_of(&who).remove(&target)).map(|m| m.into_iter().collect());
    Ok(Json(CandidatesResponse {
        target,
        kind: kind_name(kind),
        candidates,
        selection,
    }))
}

/// Exactly one of `rank`, `candidate` or `none: true`.
#[derive(Debug, Deserialize)]
pub struct SelectionRequest {
    #[serde(default)]
    pub rank: Option<usize>,
    #[serde(default)]
    pub candidate: Option<usize>,
    #[serde(default)]
    pub none: bool,
    /// Drop the selector's earlier marks on the target first.
    #[serde(default = "default_replace")]
    pub replace: bool,
}

fn default_replace() -> bool {
    true
}

async fn post_selection(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    Path(target): Path<String>,
    Json(req): Json<SelectionRequest>,
) -> ApiResult<Value> {
    let who = selector(&headers).ok_or_else(|| ApiError::bad_request("missing X-Selector header"))?;
    let given = usize::from(req.rank.is_some()) + usize::from(req.candidate.is_some()) + usize::from(req.none);
    if given != 1 {
        return Err(ApiError::bad_request("give exactly one of rank, candidate or none"));
    }
    let _writer = state.writer.lock().await;
    let mut next = state.bundle.read().await.clone();
    let candidate = match (req.rank, req.candidate) {
        (Some(rank), _) => {
            let order = next
                .review_order(&target)
                .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown target {target}")))?;
            let id = rank
                .checked_sub(1)
                .filter(|&r| r < REVIEW_DEPTH)
                .and_then(|r| order.get(r).copied())
                .ok_or_else(|| ApiError(StatusCode::UNPROCESSABLE_ENTITY, format!("target {target} has no rank {rank}")))?;
            Some(id)
        }
        (None, c) => c,
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let selection = next.record_selection(&target, candidate, &who, req.replace, timestamp)?.clone();
    if let Some(path) = &state.path {
        next.save(path)?;
    }
    *state.bundle.write().await = next;
    Ok(Json(serde_json::to_value(selection).expect("selection serializes")))
}

#[derive(Debug, Deserialize)]
pub struct AgreementQuery {
    gold: Option<String>,
    other: Option<String>,
}

async fn get_agreement(State(state): State<Arc<AppState>>, Query(q): Query<AgreementQuery>) -> ApiResult<Value> {
    let bundle = state.bundle.read().await;
    let (gold, other) = match (q.gold, q.other) {
        (Some(g), Some(o)) => (g, o),
        (None, None) => match bundle.selectors().as_slice() {
            [a, b] => (a.clone(), b.clone()),
            _ => return Err(ApiError::bad_request("name the gold and other selectors")),
        },
        _ => return Err(ApiError::bad_request("give both gold and other")),
    };
    let report = agreement_report(&bundle, &gold, &other)?;
    Ok(Json(serde_json::to_value(report).expect("report serializes")))
}

#[derive(Debug, Deserialize)]
pub struct MetricsQuery {
    gold: String,
}

async fn get_metrics(State(state): State<Arc<AppState>>, Query(q): Query<MetricsQuery>) -> ApiResult<Value> {
    let bundle = state.bundle.read().await;
    Ok(Json(json!({
        "gold": q.gold,
        "names": ranking_metrics(&judge_bundle(&bundle, TargetKind::Entity, &q.gold)),
        "plans": ranking_metrics(&judge_bundle(&bundle, TargetKind::Relation, &q.gold)),
    })))
}

async fn get_bundle(State(state): State<Arc<AppState>>) -> ApiResult<ResourceBundle> {
    Ok(Json(state.snapshot().await))
}

/// The API under `/api/v1`, plus static files from `static_dir` at `/`.
pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/targets", get(list_targets))
        .route("/targets/{id}/candidates", get(get_candidates))
        .route("/targets/{id}/selection", post(post_selection))
        .route("/agreement", get(get_agreement))
        .route("/metrics", get(get_metrics))
        .route("/bundle", get(get_bundle));
    let app = Router::new().nest("/api/v1", api).with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}
