//! JSON-over-HTTP read views of the aggregate store plus an ingest endpoint.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::NaiveDate;
use eap_core::aggregate::{AggregateStore, CorpusStats, DailyScore, RankEntry};
use eap_core::analyzer::AnalyzerResources;
use eap_core::ingest::{replay, DedupStore, ReplayPlan, ReplaySummary};
use eap_core::model::{parse_region, Emotion, RegionCode};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub const DEFAULT_MAX_BODY: usize = 16 * 1024 * 1024;

/// Shared handles behind every request.
#[derive(Clone)]
pub struct AppState {
    pub store: Arc<AggregateStore>,
    pub dedup: Arc<DedupStore>,
    pub resources: Arc<AnalyzerResources>,
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("expected a YYYY-MM-DD date in `{param}`, got {value:?}")]
    BadDate { param: &'static str, value: String },
    #[error("`from` ({from}) is after `to` ({to})")]
    BadRange { from: NaiveDate, to: NaiveDate },
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("malformed query string: {0}")]
    BadQuery(String),
    #[error("{detail}")]
    Body { status: StatusCode, detail: String },
    #[error("every line was rejected")]
    AllRejected(ReplaySummary),
    #[error("ingest failed: {0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownRegion(_) => StatusCode::NOT_FOUND,
            ApiError::Body { status, .. } => *status,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::BadDate { .. } => "bad-date",
            ApiError::BadRange { .. } => "bad-range",
            ApiError::UnknownRegion(_) => "unknown-region",
            ApiError::BadQuery(_) => "bad-query",
            ApiError::Body { status, .. } if *status == StatusCode::PAYLOAD_TOO_LARGE => {
                "too-large"
            }
            ApiError::Body { .. } => "bad-body",
            ApiError::AllRejected(_) => "all-rejected",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code(), "detail": self.to_string() });
        if let ApiError::AllRejected(summary) = &self {
            body["summary"] = serde_json::to_value(summary).unwrap_or(Value::Null);
        }
        (self.status(), Json(body)).into_response()
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::BadQuery(r.body_text())
    }
}

impl From<BytesRejection> for ApiError {
    fn from(r: BytesRejection) -> Self {
        ApiError::Body {
            status: r.status(),
            detail: r.body_text(),
        }
    }
}

fn parse_date(param: &'static str, value: Option<&str>) -> Result<NaiveDate, ApiError> {
    let value = value.unwrap_or_default();
    NaiveDate::parse_from_str(value, "%Y-%m-%d").map_err(|_| ApiError::BadDate {
        param,
        value: value.to_string(),
    })
}

#[derive(Debug, Deserialize)]
pub struct DateQuery {
    date: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct RangeQuery {
    from: Option<String>,
    to: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvinceEntry {
    pub region: RegionCode,
    pub score: Option<f64>,
    pub alarm: bool,
    /// 1-based position in the global rank; provinces only.
    pub rank: Option<usize>,
    /// 0 is gray (alarm or no data), 1..=5 are increasingly dark blues.
    pub color_bucket: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryPayload {
    pub date: NaiveDate,
    pub national_average: Option<f64>,
    pub alarm_threshold: f64,
    pub provinces: Vec<ProvinceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourRow {
    pub hour: u8,
    /// Emotion name to ratio; every value is null when the hour has no
    /// emotional tweets.
    pub ratios: BTreeMap<Emotion, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyPayload {
    pub region: RegionCode,
    pub date: NaiveDate,
    pub hours: Vec<HourRow>,
}

/// Quintile bucket of `score` among all defined scores of the day.
pub fn color_bucket(day: &DailyScore, defined: &[f64]) -> u8 {
    match day.score {
        Some(score) if !day.alarm => {
            let lower = defined.iter().filter(|s| **s < score).count();
            1 + (5 * lower / defined.len()) as u8
        }
        _ => 0,
    }
}

async fn summary(
    State(state): State<AppState>,
    query: Result<Query<DateQuery>, QueryRejection>,
) -> Result<Json<SummaryPayload>, ApiError> {
    let date = parse_date("date", query?.date.as_deref())?;
    let view = state.store.view();
    let days = view.daily_scores(date);
    let rank = view.global_rank(date);
    let defined: Vec<f64> = days.iter().filter_map(|d| d.score).collect();
    let provinces = days
        .iter()
        .map(|d| ProvinceEntry {
            region: d.region,
            score: d.score,
            alarm: d.alarm,
            rank: rank
                .iter()
                .position(|r| r.region == d.region)
                .map(|i| i + 1),
            color_bucket: color_bucket(d, &defined),
        })
        .collect();
    Ok(Json(SummaryPayload {
        date,
        national_average: view.national_average(date),
        alarm_threshold: view.config().alarm_threshold,
        provinces,
    }))
}

async fn rank(
    State(state): State<AppState>,
    query: Result<Query<DateQuery>, QueryRejection>,
) -> Result<Json<Vec<RankEntry>>, ApiError> {
    let date = parse_date("date", query?.date.as_deref())?;
    Ok(Json(state.store.view().global_rank(date)))
}

async fn hourly(
    State(state): State<AppState>,
    Path(code): Path<String>,
    query: Result<Query<DateQuery>, QueryRejection>,
) -> Result<Json<HourlyPayload>, ApiError> {
    let region = parse_region(&code).map_err(|_| ApiError::UnknownRegion(code))?;
    let date = parse_date("date", query?.date.as_deref())?;
    let rows = state.store.view().hourly_ratios(region, date);
    let hours = rows
        .iter()
        .enumerate()
        .map(|(hour, row)| HourRow {
            hour: hour as u8,
            ratios: Emotion::EMOTIONAL
                .iter()
                .map(|e| (*e, row.map(|r| r[e.index()])))
                .collect(),
        })
        .collect();
    Ok(Json(HourlyPayload {
        region,
        date,
        hours,
    }))
}

async fn stats(
    State(state): State<AppState>,
    query: Result<Query<RangeQuery>, QueryRejection>,
) -> Result<Json<CorpusStats>, ApiError> {
    let q = query?;
    let from = parse_date("from", q.from.as_deref())?;
    let to = parse_date("to", q.to.as_deref())?;
    if from > to {
        return Err(ApiError::BadRange { from, to });
    }
    Ok(Json(state.store.view().corpus_stats(from, to)))
}

async fn ingest(
    State(state): State<AppState>,
    body: Result<Bytes, BytesRejection>,
) -> Result<Json<ReplaySummary>, ApiError> {
    let body = body?;
    let summary = tokio::task::spawn_blocking(move || {
        replay(
            body.as_ref(),
            &ReplayPlan::unthrottled(),
            &state.resources,
            &state.dedup,
            &*state.store,
        )
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
    .map_err(|e| ApiError::Internal(e.to_string()))?;
    if summary.read > 0 && summary.rejected == summary.read {
        return Err(ApiError::AllRejected(summary));
    }
    Ok(Json(summary))
}

async fn not_found() -> Response {
    let body = json!({ "error": "not-found", "detail": "no such endpoint" });
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

/// Builds the service. Ingest bodies above `max_body` bytes get 413.
pub fn router(state: AppState, max_body: usize) -> Router {
    Router::new()
        .route("/api/v1/summary", get(summary))
        .route("/api/v1/rank", get(rank))
        .route("/api/v1/region/{code}/hourly", get(hourly))
        .route("/api/v1/stats", get(stats))
        .route(
            "/api/v1/ingest",
            post(ingest).layer(DefaultBodyLimit::max(max_body)),
        )
        .fallback(not_found)
        .with_state(state)
}
