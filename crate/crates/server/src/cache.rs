//! The location-cache service: the writable interface to the current global
//! entity→POI state. Devices PUT heartbeats; the checker GETs snapshots.

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, put};
use axum::{Json, Router};
use spacecheck_core::store::{EntityLocation, LocationStore, UpdateOutcome};

use crate::api::{ErrorBody, LocationRecord, LocationUpdate, SnapshotDto, UpdateResponse};

pub fn router(store: Arc<LocationStore>) -> Router {
    Router::new()
        .route("/locations", get(get_snapshot))
        .route("/locations/:entity_id", put(put_location).get(get_location))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(store)
}

async fn put_location(
    State(store): State<Arc<LocationStore>>,
    Path(entity_id): Path<String>,
    Json(body): Json<LocationUpdate>,
) -> Response {
    let loc = EntityLocation {
        entity_id,
        poi_id: body.poi,
        timestamp: body.ts,
    };
    match store.update(loc) {
        Ok(UpdateOutcome::Applied) => Json(UpdateResponse {
            status: "applied".into(),
        })
        .into_response(),
        Ok(UpdateOutcome::Stale) => Json(UpdateResponse {
            status: "stale".into(),
        })
        .into_response(),
        Err(e) => (
            StatusCode::BAD_REQUEST,
            Json(ErrorBody {
                error: e.to_string(),
                position: None,
            }),
        )
            .into_response(),
    }
}

async fn get_snapshot(State(store): State<Arc<LocationStore>>) -> Json<SnapshotDto> {
    Json(SnapshotDto::from(&store.snapshot()))
}

async fn get_location(
    State(store): State<Arc<LocationStore>>,
    Path(entity_id): Path<String>,
) -> Response {
    match store.get(&entity_id) {
        Some(loc) => Json(LocationRecord {
            poi: loc.poi_id,
            ts: loc.timestamp,
        })
        .into_response(),
        None => (
            StatusCode::NOT_FOUND,
            Json(ErrorBody {
                error: format!("no location for entity `{entity_id}`"),
                position: None,
            }),
        )
            .into_response(),
    }
}
