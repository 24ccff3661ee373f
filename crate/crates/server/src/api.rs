//! Wire-level request/response bodies shared by the services, their clients,
//! and the replay harness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use spacecheck_core::store::{EntityLocation, Snapshot};

/// Body of `PUT /locations/{entity_id}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocationUpdate {
    pub poi: String,
    pub ts: i64,
}

/// One entity's record as served by the cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocationRecord {
    pub poi: String,
    pub ts: i64,
}

/// Wire form of a whole-store snapshot.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SnapshotDto {
    pub snapshot_ts: i64,
    pub entities: BTreeMap<String, LocationRecord>,
}

impl From<&Snapshot> for SnapshotDto {
    fn from(snap: &Snapshot) -> Self {
        SnapshotDto {
            snapshot_ts: snap.snapshot_ts,
            entities: snap
                .entities
                .iter()
                .map(|(id, loc)| {
                    (
                        id.clone(),
                        LocationRecord {
                            poi: loc.poi_id.clone(),
                            ts: loc.timestamp,
                        },
                    )
                })
                .collect(),
        }
    }
}

impl From<SnapshotDto> for Snapshot {
    fn from(dto: SnapshotDto) -> Self {
        Snapshot {
            snapshot_ts: dto.snapshot_ts,
            entities: dto
                .entities
                .into_iter()
                .map(|(id, rec)| {
                    (
                        id.clone(),
                        EntityLocation {
                            entity_id: id,
                            poi_id: rec.poi,
                            timestamp: rec.ts,
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpdateResponse {
    /// `applied` or `stale`.
    pub status: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    #[default]
    Boolean,
    Points,
}

fn default_presence_prop() -> String {
    "taxi".to_string()
}

/// Body of `POST /check`. When `snapshot` is absent the checker fetches the
/// current state from its configured location cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRequest {
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<SnapshotDto>,
    #[serde(default)]
    pub mode: CheckMode,
    #[serde(default = "default_presence_prop")]
    pub presence_prop: String,
}

impl CheckRequest {
    pub fn boolean(formula: impl Into<String>) -> Self {
        CheckRequest {
            formula: formula.into(),
            snapshot: None,
            mode: CheckMode::Boolean,
            presence_prop: default_presence_prop(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub satisfied: bool,
    /// Point ids where the formula holds; present iff the request asked for
    /// `points` mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<String>>,
    pub compute_ms: f64,
    pub wait_ms: f64,
    /// Version hash of the model the service was started with.
    pub model_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    /// Byte offset for formula syntax errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub requests: u64,
    pub errors: u64,
    /// Requests picked up by a worker so far.
    pub started: u64,
    pub p50_compute_ms: f64,
    pub p95_compute_ms: f64,
}
