//! JSON-over-HTTP service for the explorer UI.
//!
//! The only state is the roster store: uploaded rosters are immutable and
//! looked up by the token returned from `POST /roster`.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tilerank_core::grid::linspace;
use tilerank_core::regions::RegionSet;
use tilerank_core::tile::{all_placements, gamma_curve, prior_grid_overlay, CurveKind};
use tower_http::services::ServeDir;

use crate::compute::{self, CorrelateParams};
use crate::render::region_labels;
use crate::roster::{parse_roster, Roster, RosterFormat};

#[derive(Default)]
pub struct AppState {
    rosters: RwLock<HashMap<String, Arc<Roster>>>,
}

impl AppState {
    fn insert(&self, roster: Roster) -> String {
        let mut map = self.rosters.write().expect("roster store lock");
        loop {
            let token = format!("{:016x}", rand::random::<u64>());
            if !map.contains_key(&token) {
                map.insert(token.clone(), Arc::new(roster));
                return token;
            }
        }
    }

    fn get(&self, token: &str) -> Result<Arc<Roster>, ApiError> {
        self.rosters
            .read()
            .expect("roster store lock")
            .get(token)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("unknown roster token `{token}`")))
    }
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    Internal(String),
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error) = match self {
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(ErrorBody { error })).into_response()
    }
}

impl From<anyhow::Error> for ApiError {
    fn from(e: anyhow::Error) -> Self {
        ApiError::BadRequest(format!("{e:#}"))
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> anyhow::Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(ApiError::from)
}

fn check_res(res: usize, max: usize) -> Result<(), ApiError> {
    if !(2..=max).contains(&res) {
        return Err(ApiError::BadRequest(format!("res {res} must be between 2 and {max}")));
    }
    Ok(())
}

const MAX_RES: usize = 1001;
const MAX_SAMPLES: usize = 200_000;

#[derive(Deserialize)]
struct UploadQuery {
    format: Option<String>,
    /// Positive prior to shift every entity to.
    shift_to: Option<f64>,
}

#[derive(Serialize)]
struct UploadResponse {
    token: String,
    #[serde(flatten)]
    roster: Roster,
}

async fn upload(
    State(state): State<Arc<AppState>>,
    query: Result<Query<UploadQuery>, QueryRejection>,
    headers: HeaderMap,
    body: String,
) -> ApiResult<UploadResponse> {
    let Query(q) = query?;
    let format = match q.format.as_deref().map(str::to_ascii_lowercase).as_deref() {
        Some("csv") => RosterFormat::Csv,
        Some("json") => RosterFormat::Json,
        Some(other) => return Err(ApiError::BadRequest(format!("unknown roster format `{other}`"))),
        None => match headers.get("content-type").and_then(|v| v.to_str().ok()) {
            Some(ct) if ct.contains("json") => RosterFormat::Json,
            Some(ct) if ct.contains("csv") => RosterFormat::Csv,
            _ => RosterFormat::sniff(&body),
        },
    };
    let roster = parse_roster(&body, format, q.shift_to).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let token = state.insert(roster.clone());
    Ok(Json(UploadResponse { token, roster }))
}

#[derive(Deserialize)]
struct TokenQuery {
    token: String,
}

async fn get_roster(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TokenQuery>, QueryRejection>,
) -> ApiResult<Roster> {
    let Query(q) = query?;
    Ok(Json((*state.get(&q.token)?).clone()))
}

#[derive(Deserialize)]
struct TileQuery {
    token: String,
    entity: Option<String>,
    #[serde(default = "default_tile_res")]
    res: usize,
    /// `value` (default) or `rank`.
    kind: Option<String>,
}

fn default_tile_res() -> usize {
    101
}

async fn tile(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TileQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    check_res(q.res, MAX_RES)?;
    let roster = state.get(&q.token)?;
    let rank = match q.kind.as_deref() {
        None | Some("value") => false,
        Some("rank") => true,
        Some(other) => return Err(ApiError::BadRequest(format!("unknown tile kind `{other}`"))),
    };
    let grid = blocking(move || {
        if rank {
            compute::entity_rank_tile(&roster, q.entity.as_deref(), q.res)
        } else {
            compute::entity_value_tile(&roster, q.entity.as_deref(), q.res)
        }
    })
    .await?;
    Ok(Json(grid).into_response())
}

#[derive(Deserialize)]
struct RegionsQuery {
    token: String,
    #[serde(default = "one")]
    rank: usize,
    /// Lattice size of the optional label raster.
    res: Option<usize>,
    /// Negative prior to view the roster at.
    priors: Option<f64>,
}

fn one() -> usize {
    1
}

#[derive(Serialize)]
struct Raster {
    a: Vec<f64>,
    b: Vec<f64>,
    /// `labels[i][j]`: index of the entity owning `(a[i], b[j])`, or null.
    labels: Vec<Vec<Option<usize>>>,
}

#[derive(Serialize)]
struct RegionsResponse {
    rank: usize,
    #[serde(flatten)]
    regions: RegionSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    raster: Option<Raster>,
}

async fn regions(
    State(state): State<Arc<AppState>>,
    query: Result<Query<RegionsQuery>, QueryRejection>,
) -> ApiResult<RegionsResponse> {
    let Query(q) = query?;
    if let Some(res) = q.res {
        check_res(res, MAX_RES)?;
    }
    let roster = state.get(&q.token)?;
    let out = blocking(move || {
        let set = compute::regions(&roster, q.rank, q.priors)?;
        let raster = q.res.map(|res| {
            let axis = linspace(res);
            let labels = region_labels(&set, q.rank, &axis, &axis);
            Raster { a: axis.clone(), b: axis, labels }
        });
        Ok(RegionsResponse { rank: q.rank, regions: set, raster })
    })
    .await?;
    Ok(Json(out))
}

#[derive(Deserialize)]
struct CorrelateQuery {
    target: String,
    n: Option<usize>,
    seed: Option<u64>,
    res: Option<usize>,
    alpha: Option<f64>,
    fixed_priors: Option<f64>,
}

async fn correlate(query: Result<Query<CorrelateQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let d = CorrelateParams::default();
    let params = CorrelateParams {
        n: q.n.unwrap_or(d.n),
        seed: q.seed.unwrap_or(d.seed),
        res: q.res.unwrap_or(d.res),
        alpha: q.alpha.unwrap_or(d.alpha),
        fixed_neg_prior: q.fixed_priors,
    };
    check_res(params.res, MAX_RES)?;
    if params.n > MAX_SAMPLES {
        return Err(ApiError::BadRequest(format!("n {} exceeds {MAX_SAMPLES}", params.n)));
    }
    let target = compute::parse_target(&q.target)?;
    let grid = blocking(move || compute::correlate(&target, &params)).await?;
    Ok(Json(grid).into_response())
}

#[derive(Deserialize)]
struct RocQuery {
    a: f64,
    b: f64,
    priors: Option<f64>,
    token: Option<String>,
}

async fn roc(
    State(state): State<Arc<AppState>>,
    query: Result<Query<RocQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let roster = match &q.token {
        Some(t) => Some(state.get(t)?),
        None => None,
    };
    let c = tilerank_core::TileCoord::new(q.a, q.b).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let pencil = compute::roc(c, q.priors, roster.as_deref())?;
    Ok(Json(pencil).into_response())
}

#[derive(Deserialize)]
struct PlacementsQuery {
    priors: Option<f64>,
}

async fn placements(query: Result<Query<PlacementsQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let priors = q.priors.map(compute::priors_from_neg).transpose()?;
    let list = all_placements(priors).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    Ok(Json(list).into_response())
}

#[derive(Deserialize)]
struct CurvesQuery {
    kind: String,
    param: f64,
    #[serde(default = "default_curve_n")]
    n: usize,
}

fn default_curve_n() -> usize {
    129
}

async fn curves(query: Result<Query<CurvesQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let kind = match q.kind.to_ascii_lowercase().as_str() {
        "gamma_pi" | "pi" => CurveKind::GammaPi,
        "gamma_tau" | "tau" => CurveKind::GammaTau,
        other => return Err(ApiError::BadRequest(format!("unknown curve kind `{other}` (gamma_pi or gamma_tau)"))),
    };
    if q.n > 100_000 {
        return Err(ApiError::BadRequest(format!("n {} is too large", q.n)));
    }
    let curve = gamma_curve(kind, q.param, q.n).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    Ok(Json(curve).into_response())
}

#[derive(Deserialize)]
struct PriorGridQuery {
    priors: f64,
    #[serde(default = "default_step")]
    step: f64,
}

fn default_step() -> f64 {
    0.1
}

async fn prior_grid(query: Result<Query<PriorGridQuery>, QueryRejection>) -> Result<Response, ApiError> {
    let Query(q) = query?;
    let priors = compute::priors_from_neg(q.priors)?;
    if q.step < 1e-3 {
        return Err(ApiError::BadRequest(format!("step {} is too small", q.step)));
    }
    let lines = prior_grid_overlay(priors, q.step).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    Ok(Json(lines).into_response())
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/roster", post(upload).get(get_roster))
        .route("/tile", get(tile))
        .route("/regions", get(regions))
        .route("/correlate", get(correlate))
        .route("/roc", get(roc))
        .route("/placements", get(placements))
        .route("/curves", get(curves))
        .route("/prior_grid", get(prior_grid))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { ApiError::NotFound("no such endpoint".into()) }),
    }
}

pub async fn serve(host: &str, port: u16, static_dir: Option<PathBuf>) -> anyhow::Result<()> {
    let app = router(Arc::new(AppState::default()), static_dir);
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
