//! Reward/advantage HTTP service.
//!
//! Endpoints:
//! - `POST /score` — parse, validate, predict, and reward each candidate
//!   against a seed molecule; invalid candidates score 0.0 and leave the
//!   generation history untouched.
//! - `POST /advantages` — group-relative advantage normalization.
//! - `POST /objective` — clipped-ratio surrogate objective over supplied
//!   log-probabilities.
//! - `GET /health` — configuration hash and history occupancy.
//!
//! Malformed JSON bodies yield 400 with the deserialization path; valid JSON
//! failing semantic checks yields 422. Bad input never produces a 500.
//! Histories are partitioned by optional session key so concurrent training
//! runs do not cross-penalize; per-session updates serialize on one lock.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::{Deserialize, Serialize};

use pepforge_core::chem::{parse_smiles, validate_valence, MolGraph};
use pepforge_core::grpo::{advantages, surrogate_objective, GrpoConfig, RolloutGroup};
use pepforge_core::properties::{PropertyPredictor, PropertyTriple, SurrogatePredictor};
use pepforge_core::reward::{score_with_canonical, GenerationHistory, RewardBreakdown};

use crate::config::AppConfig;

pub struct ServiceState {
    pub config: AppConfig,
    pub config_hash: String,
    predictor: SurrogatePredictor,
    sessions: Mutex<BTreeMap<String, GenerationHistory>>,
}

impl ServiceState {
    pub fn new(config: AppConfig) -> ServiceState {
        let config_hash = config.hash();
        let predictor = SurrogatePredictor::new(config.surrogate);
        ServiceState {
            config,
            config_hash,
            predictor,
            sessions: Mutex::new(BTreeMap::new()),
        }
    }

    fn history_len(&self) -> (usize, usize) {
        let sessions = self.sessions.lock().expect("sessions lock");
        let entries = sessions.values().map(|h| h.len()).sum();
        (sessions.len(), entries)
    }
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/score", post(score_handler))
        .route("/advantages", post(advantages_handler))
        .route("/objective", post(objective_handler))
        .route("/health", get(health_handler))
        .with_state(state)
}

/// Binds and serves until the task is aborted.
pub async fn serve(config: AppConfig) -> anyhow::Result<()> {
    let bind = config.bind.clone();
    let state = Arc::new(ServiceState::new(config));
    let listener = tokio::net::TcpListener::bind(&bind).await?;
    println!("listening on {} (config {})", listener.local_addr()?, &state.config_hash[..12]);
    axum::serve(listener, router(state)).await?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

enum ApiError {
    /// Malformed body (400) with the deserialization path.
    BadRequest(String),
    /// Well-formed but semantically invalid (422).
    Unprocessable(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error) = match self {
            ApiError::BadRequest(error) => (StatusCode::BAD_REQUEST, error),
            ApiError::Unprocessable(error) => (StatusCode::UNPROCESSABLE_ENTITY, error),
        };
        (status, axum::Json(ErrorBody { error })).into_response()
    }
}

/// `axum::Json` with rejections mapped onto 400 + field path.
struct Body<T>(T);

impl<S, T> FromRequest<S> for Body<T>
where
    axum::Json<T>: FromRequest<S, Rejection = JsonRejection>,
    S: Send + Sync,
{
    type Rejection = ApiError;

    async fn from_request(req: axum::extract::Request, state: &S) -> Result<Self, Self::Rejection> {
        match axum::Json::<T>::from_request(req, state).await {
            Ok(axum::Json(value)) => Ok(Body(value)),
            Err(rejection) => Err(ApiError::BadRequest(rejection.body_text())),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScoreRequest {
    pub seed_smiles: String,
    pub candidates: Vec<CandidateInput>,
    #[serde(default)]
    pub session: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CandidateInput {
    pub smiles: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateResult {
    pub valid: bool,
    /// Dense reward value: the breakdown total, or 0.0 when invalid.
    pub reward: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub breakdown: Option<RewardBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub props: Option<PropertyTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ScoreResponse {
    results: Vec<CandidateResult>,
}

/// Scores one candidate SMILES against a parsed seed. Invalid candidates
/// report the failure and do not touch the history.
pub fn score_candidate(
    seed: &MolGraph,
    smiles: &str,
    predictor: &dyn PropertyPredictor,
    history: &mut GenerationHistory,
    config: &AppConfig,
) -> CandidateResult {
    let invalid = |error: String| CandidateResult {
        valid: false,
        reward: 0.0,
        breakdown: None,
        props: None,
        error: Some(error),
    };
    let graph = match parse_smiles(smiles) {
        Ok(g) => g,
        Err(e) => return invalid(e.to_string()),
    };
    let verdict = validate_valence(&graph);
    if !verdict.valid {
        let atoms: Vec<String> = verdict.failures().map(|a| a.atom.to_string()).collect();
        return invalid(format!("valence failure at atom(s) {}", atoms.join(", ")));
    }
    let props = match predictor.predict_graph(&graph) {
        Ok(p) if p.is_finite() => p,
        Ok(_) => return invalid("predictor returned non-finite values".to_string()),
        Err(e) => return invalid(e.to_string()),
    };
    let canonical = pepforge_core::chem::canonical_smiles(&graph);
    let breakdown = score_with_canonical(seed, &graph, &canonical, &props, history, &config.reward);
    CandidateResult {
        valid: true,
        reward: breakdown.total,
        breakdown: Some(breakdown),
        props: Some(props),
        error: None,
    }
}

async fn score_handler(
    State(state): State<Arc<ServiceState>>,
    Body(request): Body<ScoreRequest>,
) -> Result<axum::Json<ScoreResponse>, ApiError> {
    let seed = parse_smiles(&request.seed_smiles)
        .map_err(|e| ApiError::Unprocessable(format!("seed_smiles: {e}")))?;
    if !validate_valence(&seed).valid {
        return Err(ApiError::Unprocessable(
            "seed_smiles fails valence".to_string(),
        ));
    }
    let session = request.session.clone().unwrap_or_default();
    let mut sessions = state.sessions.lock().expect("sessions lock");
    let history = sessions
        .entry(session)
        .or_insert_with(|| GenerationHistory::new(state.config.reward.history_capacity));
    let results = request
        .candidates
        .iter()
        .map(|c| score_candidate(&seed, &c.smiles, &state.predictor, history, &state.config))
        .collect();
    Ok(axum::Json(ScoreResponse { results }))
}

#[derive(Debug, Deserialize)]
struct AdvantagesRequest {
    rewards: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct AdvantagesResponse {
    advantages: Vec<f64>,
}

async fn advantages_handler(
    Body(request): Body<AdvantagesRequest>,
) -> Result<axum::Json<AdvantagesResponse>, ApiError> {
    let advantages =
        advantages(&request.rewards).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    Ok(axum::Json(AdvantagesResponse { advantages }))
}

#[derive(Debug, Deserialize)]
struct ObjectiveRequest {
    rewards: Vec<f64>,
    logp_theta: Vec<Vec<f64>>,
    logp_old: Vec<Vec<f64>>,
    logp_ref: Vec<Vec<f64>>,
    epsilon: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ObjectiveResponse {
    objective: f64,
    advantages: Vec<f64>,
}

async fn objective_handler(
    State(state): State<Arc<ServiceState>>,
    Body(request): Body<ObjectiveRequest>,
) -> Result<axum::Json<ObjectiveResponse>, ApiError> {
    let cfg = GrpoConfig {
        epsilon: request.epsilon.unwrap_or(state.config.grpo.epsilon),
        beta: request.beta.unwrap_or(state.config.grpo.beta),
    };
    cfg.validate().map_err(ApiError::Unprocessable)?;
    let group = RolloutGroup {
        rewards: request.rewards,
        logp_theta: request.logp_theta,
        logp_old: request.logp_old,
        logp_ref: request.logp_ref,
    };
    let adv = advantages(&group.rewards).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let objective =
        surrogate_objective(&group, &adv, &cfg).map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    Ok(axum::Json(ObjectiveResponse {
        objective,
        advantages: adv,
    }))
}

#[derive(Debug, Serialize)]
struct HealthResponse {
    config_hash: String,
    sessions: usize,
    history_entries: usize,
}

async fn health_handler(State(state): State<Arc<ServiceState>>) -> axum::Json<HealthResponse> {
    let (sessions, history_entries) = state.history_len();
    axum::Json(HealthResponse {
        config_hash: state.config_hash.clone(),
        sessions,
        history_entries,
    })
}
