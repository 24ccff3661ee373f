//! The model-checker service.
//!
//! The model is loaded once at startup and shared immutably. Requests are
//! admitted into a bounded FIFO queue and picked up by a fixed pool of worker
//! threads; `wait_ms` covers enqueue to pickup, `compute_ms` covers applying
//! the snapshot and evaluating the formula. A full queue turns new requests
//! away with 503 rather than letting latency grow without bound.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use crossbeam_channel::{Receiver, Sender, TrySendError};
use spacecheck_core::model::ClosureModel;
use spacecheck_core::slcs::{self, Formula};
use spacecheck_core::store::Snapshot;

use crate::api::{
    CheckMode, CheckRequest, CheckResult, ErrorBody, MetricsSnapshot, SnapshotDto,
};

#[derive(Debug, Clone)]
pub struct CheckerConfig {
    pub workers: usize,
    pub queue_depth: usize,
    /// Base URL of the location-cache service, used when a request carries no
    /// inline snapshot.
    pub cache_url: Option<String>,
    pub formula_cache_capacity: usize,
}

impl Default for CheckerConfig {
    fn default() -> Self {
        CheckerConfig {
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4),
            queue_depth: 1024,
            cache_url: None,
            formula_cache_capacity: 256,
        }
    }
}

struct Job {
    snapshot: Snapshot,
    formula: Arc<Formula>,
    mode: CheckMode,
    presence_prop: String,
    enqueued: Instant,
    reply: tokio::sync::oneshot::Sender<CheckResult>,
}

#[derive(Default)]
struct Metrics {
    requests: AtomicU64,
    errors: AtomicU64,
    started: AtomicU64,
    compute_ms: Mutex<Vec<f64>>,
}

impl Metrics {
    fn record_compute(&self, ms: f64) {
        let mut samples = self.compute_ms.lock().unwrap();
        if samples.len() >= 10_000 {
            samples.remove(0);
        }
        samples.push(ms);
    }

    fn snapshot(&self) -> MetricsSnapshot {
        let mut samples = self.compute_ms.lock().unwrap().clone();
        samples.sort_by(f64::total_cmp);
        let pick = |q: f64| {
            if samples.is_empty() {
                0.0
            } else {
                samples[((samples.len() - 1) as f64 * q) as usize]
            }
        };
        MetricsSnapshot {
            requests: self.requests.load(Ordering::Relaxed),
            errors: self.errors.load(Ordering::Relaxed),
            started: self.started.load(Ordering::Relaxed),
            p50_compute_ms: pick(0.50),
            p95_compute_ms: pick(0.95),
        }
    }
}

/// Least-recently-used cache of parsed formulas, keyed by source text.
struct FormulaCache {
    capacity: usize,
    stamp: u64,
    entries: HashMap<String, (Arc<Formula>, u64)>,
}

impl FormulaCache {
    fn new(capacity: usize) -> Self {
        FormulaCache {
            capacity: capacity.max(1),
            stamp: 0,
            entries: HashMap::new(),
        }
    }

    fn get_or_parse(&mut self, text: &str) -> Result<Arc<Formula>, slcs::ParseError> {
        self.stamp += 1;
        if let Some((f, used)) = self.entries.get_mut(text) {
            *used = self.stamp;
            return Ok(Arc::clone(f));
        }
        let parsed = Arc::new(slcs::parse(text)?);
        if self.entries.len() >= self.capacity {
            if let Some(victim) = self
                .entries
                .iter()
                .min_by_key(|(_, (_, used))| *used)
                .map(|(k, _)| k.clone())
            {
                self.entries.remove(&victim);
            }
        }
        self.entries
            .insert(text.to_string(), (Arc::clone(&parsed), self.stamp));
        Ok(parsed)
    }
}

struct Inner {
    model: ClosureModel,
    tx: Sender<Job>,
    metrics: Metrics,
    formula_cache: Mutex<FormulaCache>,
    cache_url: Option<String>,
    http: reqwest::Client,
}

/// Handle to a running checker; cheap to clone. Dropping every handle closes
/// the queue and lets the workers exit.
#[derive(Clone)]
pub struct CheckerService {
    inner: Arc<Inner>,
}

impl CheckerService {
    pub fn new(model: ClosureModel, config: CheckerConfig) -> Self {
        let (tx, rx) = crossbeam_channel::bounded::<Job>(config.queue_depth.max(1));
        let inner = Arc::new(Inner {
            model,
            tx,
            metrics: Metrics::default(),
            formula_cache: Mutex::new(FormulaCache::new(config.formula_cache_capacity)),
            cache_url: config.cache_url,
            http: reqwest::Client::new(),
        });
        for i in 0..config.workers.max(1) {
            let rx: Receiver<Job> = rx.clone();
            let inner = Arc::clone(&inner);
            std::thread::Builder::new()
                .name(format!("checker-worker-{i}"))
                .spawn(move || worker_loop(rx, inner))
                .expect("spawn worker");
        }
        CheckerService { inner }
    }

    pub fn model_version(&self) -> &str {
        self.inner.model.version()
    }

    pub fn metrics(&self) -> MetricsSnapshot {
        self.inner.metrics.snapshot()
    }

    pub fn router(&self) -> Router {
        Router::new()
            .route("/check", post(handle_check))
            .route("/healthz", get(|| async { "ok" }))
            .route("/metrics", get(handle_metrics))
            .with_state(self.clone())
    }
}

fn worker_loop(rx: Receiver<Job>, inner: Arc<Inner>) {
    while let Ok(job) = rx.recv() {
        inner.metrics.started.fetch_add(1, Ordering::Relaxed);
        let wait_ms = job.enqueued.elapsed().as_secs_f64() * 1e3;
        let t0 = Instant::now();
        let (model, _unknown) = match job.snapshot.to_valuation(&inner.model, &job.presence_prop) {
            Ok(ok) => ok,
            Err(_) => unreachable!("valuation over the model's own space"),
        };
        let sat = slcs::sat(&model, &job.formula);
        let compute_ms = t0.elapsed().as_secs_f64() * 1e3;
        inner.metrics.record_compute(compute_ms);
        let points = match job.mode {
            CheckMode::Boolean => None,
            CheckMode::Points => Some(
                sat.iter()
                    .map(|i| model.space().point_id(i).to_string())
                    .collect(),
            ),
        };
        let result = CheckResult {
            satisfied: !sat.is_empty(),
            points,
            compute_ms,
            wait_ms,
            model_version: inner.model.version().to_string(),
        };
        // receiver may have hung up (client gone); nothing to do then
        let _ = job.reply.send(result);
    }
}

fn error_response(status: StatusCode, error: String, position: Option<usize>) -> Response {
    (status, Json(ErrorBody { error, position })).into_response()
}

async fn handle_check(
    State(service): State<CheckerService>,
    Json(req): Json<CheckRequest>,
) -> Response {
    let inner = &service.inner;
    inner.metrics.requests.fetch_add(1, Ordering::Relaxed);

    let formula = {
        let mut cache = inner.formula_cache.lock().unwrap();
        match cache.get_or_parse(&req.formula) {
            Ok(f) => f,
            Err(e) => {
                inner.metrics.errors.fetch_add(1, Ordering::Relaxed);
                return error_response(StatusCode::BAD_REQUEST, e.to_string(), Some(e.position));
            }
        }
    };

    let snapshot: Snapshot = match req.snapshot {
        Some(dto) => dto.into(),
        None => match &inner.cache_url {
            Some(url) => match fetch_snapshot(&inner.http, url).await {
                Ok(snap) => snap,
                Err(e) => {
                    inner.metrics.errors.fetch_add(1, Ordering::Relaxed);
                    return error_response(StatusCode::BAD_GATEWAY, e, None);
                }
            },
            None => {
                inner.metrics.errors.fetch_add(1, Ordering::Relaxed);
                return error_response(
                    StatusCode::BAD_REQUEST,
                    "request has no snapshot and no location cache is configured".into(),
                    None,
                );
            }
        },
    };

    let (reply_tx, reply_rx) = tokio::sync::oneshot::channel();
    let job = Job {
        snapshot,
        formula,
        mode: req.mode,
        presence_prop: req.presence_prop,
        enqueued: Instant::now(),
        reply: reply_tx,
    };
    match inner.tx.try_send(job) {
        Ok(()) => {}
        Err(TrySendError::Full(_)) | Err(TrySendError::Disconnected(_)) => {
            inner.metrics.errors.fetch_add(1, Ordering::Relaxed);
            return error_response(
                StatusCode::SERVICE_UNAVAILABLE,
                "admission queue is full".into(),
                None,
            );
        }
    }
    match reply_rx.await {
        Ok(result) => Json(result).into_response(),
        Err(_) => {
            inner.metrics.errors.fetch_add(1, Ordering::Relaxed);
            error_response(StatusCode::INTERNAL_SERVER_ERROR, "worker dropped".into(), None)
        }
    }
}

async fn fetch_snapshot(http: &reqwest::Client, base: &str) -> Result<Snapshot, String> {
    let url = format!("{}/locations", base.trim_end_matches('/'));
    let resp = http
        .get(&url)
        .send()
        .await
        .map_err(|e| format!("location cache unreachable: {e}"))?;
    if !resp.status().is_success() {
        return Err(format!("location cache answered {}", resp.status()));
    }
    let dto: SnapshotDto = resp
        .json()
        .await
        .map_err(|e| format!("bad snapshot from location cache: {e}"))?;
    Ok(dto.into())
}

async fn handle_metrics(State(service): State<CheckerService>) -> Json<MetricsSnapshot> {
    Json(service.metrics())
}
