//! Read-only HTTP API over a front, with an optional live mode that runs the
//! optimizer in the background and publishes a snapshot at each checkpoint.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::thread::JoinHandle;
use std::time::Instant;

use anyhow::Result;
use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use greenfront::engine::{run_with_progress, Checkpoint, EvMogaConfig};
use greenfront::export::{FrontEntry, FrontExport, RunMetadata};
use greenfront::market_data::AssetUniverse;
use greenfront::portfolio::Bounds;
use greenfront::preferences::{
    filter_region, reference_vectors, GreenLabel, PreferenceFilter, ProfileConfig, ReferenceVectors, RiskLabel,
};
use greenfront::report::{evaluate_profile, ProfileResult};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Clone, Debug, Default, Serialize)]
pub struct LiveStatus {
    pub running: bool,
    pub k_max: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub error: Option<String>,
}

struct Snapshot {
    front: Arc<FrontExport>,
    refs: ReferenceVectors,
}

struct Shared {
    snapshot: Option<Snapshot>,
    live: Option<LiveStatus>,
}

/// State shared by all handlers.
#[derive(Clone)]
pub struct AppState {
    shared: Arc<RwLock<Shared>>,
    profiles: Arc<ProfileConfig>,
}

impl AppState {
    /// Serves a precomputed front.
    pub fn from_front(front: FrontExport, profiles: ProfileConfig) -> Result<Self> {
        profiles.validate()?;
        let state = AppState {
            shared: Arc::new(RwLock::new(Shared {
                snapshot: None,
                live: None,
            })),
            profiles: Arc::new(profiles),
        };
        state.publish(front)?;
        Ok(state)
    }

    /// Starts the optimizer on a background thread. Endpoints answer from the
    /// latest checkpoint snapshot; `/front` returns 503 until the first one.
    pub fn live(
        universe: AssetUniverse,
        bounds: Bounds,
        cfg: EvMogaConfig,
        profiles: ProfileConfig,
    ) -> Result<(Self, JoinHandle<()>)> {
        profiles.validate()?;
        cfg.validate()?;
        let state = AppState {
            shared: Arc::new(RwLock::new(Shared {
                snapshot: None,
                live: Some(LiveStatus {
                    running: true,
                    k_max: cfg.k_max,
                    ..LiveStatus::default()
                }),
            })),
            profiles: Arc::new(profiles),
        };
        let worker = state.clone();
        let handle = std::thread::spawn(move || {
            let start = Instant::now();
            let mut seen = Vec::new();
            let outcome = run_with_progress(&universe, &bounds, &cfg, &mut |cp, archive| {
                seen.push(cp.clone());
                let meta = RunMetadata {
                    seed: cfg.seed,
                    config: cfg.clone(),
                    bounds: bounds.clone(),
                    evaluations: cp.evaluations,
                    iterations: cp.iteration,
                    wall_time_secs: start.elapsed().as_secs_f64(),
                    checkpoints: seen.clone(),
                };
                let published = FrontExport::from_archive(&universe, archive, meta)
                    .map_err(anyhow::Error::from)
                    .and_then(|f| worker.publish(f));
                let mut shared = worker.shared.write().expect("state lock");
                if let Some(live) = shared.live.as_mut() {
                    live.checkpoints.push(cp.clone());
                    if let Err(e) = published {
                        live.error = Some(e.to_string());
                    }
                }
            });
            let mut shared = worker.shared.write().expect("state lock");
            if let Some(live) = shared.live.as_mut() {
                live.running = false;
                if let Err(e) = outcome {
                    live.error = Some(e.to_string());
                }
            }
        });
        Ok((state, handle))
    }

    fn publish(&self, front: FrontExport) -> Result<()> {
        let refs = reference_vectors(
            &front.entries,
            self.profiles.green_percentiles(),
            self.profiles.risk_percentiles(),
        )?;
        self.shared.write().expect("state lock").snapshot = Some(Snapshot {
            front: Arc::new(front),
            refs,
        });
        Ok(())
    }

    fn snapshot(&self) -> Option<(Arc<FrontExport>, ReferenceVectors)> {
        let shared = self.shared.read().expect("state lock");
        shared.snapshot.as_ref().map(|s| (Arc::clone(&s.front), s.refs))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/front", get(get_front))
        .route("/profiles", get(get_profiles))
        .route("/filter", post(post_filter))
        .route("/representatives", get(get_representatives))
        .route("/status", get(get_status))
        .with_state(state)
}

/// Binds `addr` and serves until the process is stopped.
pub fn serve(addr: &str, state: AppState) -> Result<()> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(state)).await?;
        Ok(())
    })
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "status": "error", "message": message.into() }))).into_response()
}

fn not_ready() -> Response {
    (
        StatusCode::SERVICE_UNAVAILABLE,
        Json(json!({ "status": "not_ready", "message": "no front available yet" })),
    )
        .into_response()
}

async fn get_front(State(state): State<AppState>) -> Response {
    match state.snapshot() {
        Some((front, _)) => Json(&*front).into_response(),
        None => not_ready(),
    }
}

async fn get_profiles(State(state): State<AppState>) -> Response {
    let Some((_, refs)) = state.snapshot() else {
        return not_ready();
    };
    let p = &state.profiles;
    Json(json!({
        "green": p.green,
        "risk": p.risk,
        "p_g": {
            "weak": refs.p_g[0],
            "moderate": refs.p_g[1],
            "strong": refs.p_g[2],
        },
        "p_r": {
            "conservative": refs.p_r[0],
            "cautious": refs.p_r[1],
            "aggressive": refs.p_r[2],
        },
    }))
    .into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilterRequest {
    p_g: f64,
    p_r: f64,
}

async fn post_filter(State(state): State<AppState>, body: Bytes) -> Response {
    let req: FilterRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("expected {{\"p_g\": number, \"p_r\": number}}: {e}")),
    };
    let filter = match PreferenceFilter::new(req.p_g, req.p_r) {
        Ok(f) => f,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let Some((front, _)) = state.snapshot() else {
        return not_ready();
    };
    let ids = filter_region(&front.entries, filter).ids();
    if ids.is_empty() {
        return (
            StatusCode::CONFLICT,
            Json(json!({ "status": "empty_region", "ids": ids, "p_g": filter.p_g, "p_r": filter.p_r })),
        )
            .into_response();
    }
    Json(json!({ "status": "ok", "ids": ids, "p_g": filter.p_g, "p_r": filter.p_r })).into_response()
}

#[derive(Serialize)]
struct RepresentativesBody<'a> {
    opt: &'a FrontEntry,
    min_var: &'a FrontEntry,
    min_emi: &'a FrontEntry,
    max_ret: &'a FrontEntry,
}

async fn get_representatives(State(state): State<AppState>, Query(q): Query<HashMap<String, String>>) -> Response {
    let green: GreenLabel = match q.get("green").map(|s| s.parse()) {
        Some(Ok(g)) => g,
        Some(Err(e)) => return error(StatusCode::BAD_REQUEST, e.to_string()),
        None => return error(StatusCode::BAD_REQUEST, "missing query parameter 'green'"),
    };
    let risk: RiskLabel = match q.get("risk").map(|s| s.parse()) {
        Some(Ok(r)) => r,
        Some(Err(e)) => return error(StatusCode::BAD_REQUEST, e.to_string()),
        None => return error(StatusCode::BAD_REQUEST, "missing query parameter 'risk'"),
    };
    let Some((front, refs)) = state.snapshot() else {
        return not_ready();
    };
    match evaluate_profile(&front, &refs, green, risk) {
        Ok(ProfileResult::Region { filter, ids, reps }) => Json(json!({
            "status": "ok",
            "green": green,
            "risk": risk,
            "p_g": filter.p_g,
            "p_r": filter.p_r,
            "region_size": ids.len(),
            "representatives": RepresentativesBody {
                opt: reps.opt,
                min_var: reps.min_var,
                min_emi: reps.min_emi,
                max_ret: reps.max_ret,
            },
        }))
        .into_response(),
        Ok(ProfileResult::Empty { filter }) => (
            StatusCode::CONFLICT,
            Json(json!({
                "status": "empty_region",
                "green": green,
                "risk": risk,
                "p_g": filter.p_g,
                "p_r": filter.p_r,
                "region_size": 0,
            })),
        )
            .into_response(),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn get_status(State(state): State<AppState>) -> Response {
    let shared = state.shared.read().expect("state lock");
    let entries = shared.snapshot.as_ref().map(|s| s.front.entries.len());
    match &shared.live {
        None => Json(json!({
            "mode": "static",
            "running": false,
            "archive_size": entries,
        }))
        .into_response(),
        Some(live) => Json(json!({
            "mode": "live",
            "running": live.running,
            "k_max": live.k_max,
            "iteration": live.checkpoints.last().map(|c| c.iteration),
            "archive_size": entries,
            "checkpoints": live.checkpoints,
            "error": live.error,
        }))
        .into_response(),
    }
}
