//! Closure models: a space graph plus a valuation from proposition names to
//! point sets.
//!
//! The graph and the static (category/name) propositions are effectively
//! constant while a system runs; only presence propositions churn. The two
//! layers are kept separate so refreshing presence is cheap and never touches
//! the shared space. A content hash versions the whole model so callers can
//! tell which state a result was computed against.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::bitset::PointSet;
use crate::space::{SpaceError, SpaceGraph, SpaceGraphBuilder};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("model file line {line}: {msg}")]
    File { line: usize, msg: String },
}

/// Immutable world state for the checker: space + valuation + version hash.
#[derive(Debug, Clone)]
pub struct ClosureModel {
    space: Arc<SpaceGraph>,
    static_valuation: Arc<BTreeMap<String, PointSet>>,
    dynamic_valuation: BTreeMap<String, PointSet>,
    version: String,
}

impl ClosureModel {
    pub fn new(
        space: SpaceGraph,
        valuation: BTreeMap<String, PointSet>,
    ) -> Result<Self, ModelError> {
        let space = Arc::new(space);
        for set in valuation.values() {
            if set.domain_len() != space.len() {
                return Err(SpaceError::ForeignPointSet {
                    set: set.domain_len(),
                    space: space.len(),
                }
                .into());
            }
        }
        let mut model = Self {
            space,
            static_valuation: Arc::new(valuation),
            dynamic_valuation: BTreeMap::new(),
            version: String::new(),
        };
        model.version = model.compute_version();
        Ok(model)
    }

    pub fn space(&self) -> &SpaceGraph {
        &self.space
    }

    pub fn shared_space(&self) -> Arc<SpaceGraph> {
        Arc::clone(&self.space)
    }

    /// Content hash of space plus valuation (both layers).
    pub fn version(&self) -> &str {
        &self.version
    }

    /// Satisfaction set of a bare proposition. Unknown propositions denote
    /// the empty set; a dynamic (presence) layer entry shadows a static one.
    pub fn proposition(&self, name: &str) -> PointSet {
        self.dynamic_valuation
            .get(name)
            .or_else(|| self.static_valuation.get(name))
            .cloned()
            .unwrap_or_else(|| self.space.empty_set())
    }

    pub fn proposition_names(&self) -> impl Iterator<Item = &str> {
        self.static_valuation
            .keys()
            .chain(self.dynamic_valuation.keys())
            .map(|s| s.as_str())
    }

    /// Total number of (proposition, point) assignments across both layers.
    pub fn assignment_count(&self) -> usize {
        let statics: usize = self
            .static_valuation
            .iter()
            .filter(|(name, _)| !self.dynamic_valuation.contains_key(*name))
            .map(|(_, s)| s.count())
            .sum();
        statics + self.dynamic_valuation.values().map(|s| s.count()).sum::<usize>()
    }

    /// Returns a model sharing this one's space and static valuation, with
    /// `prop` bound to `points` in the dynamic layer. The version hash is
    /// recomputed to cover the new binding.
    pub fn with_presence(&self, prop: &str, points: PointSet) -> Result<Self, ModelError> {
        if points.domain_len() != self.space.len() {
            return Err(SpaceError::ForeignPointSet {
                set: points.domain_len(),
                space: self.space.len(),
            }
            .into());
        }
        let mut next = self.clone();
        next.dynamic_valuation.insert(prop.to_string(), points);
        next.version = next.compute_version();
        Ok(next)
    }

    fn compute_version(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_text().as_bytes());
        let digest = hasher.finalize();
        let mut out = String::with_capacity(32);
        for byte in &digest[..16] {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    /// Deterministic text form: points in index order, edges and propositions
    /// sorted. Also the on-disk model format.
    pub fn canonical_text(&self) -> String {
        let space = &self.space;
        let mut out = String::new();
        let _ = writeln!(out, "points {}", space.len());
        let _ = writeln!(out, "symmetric {}", space.is_symmetric());
        for id in space.point_ids() {
            let _ = writeln!(out, "point {id}");
        }
        for a in 0..space.len() {
            for &b in space.successors(a) {
                let b = b as usize;
                if space.is_symmetric() && a > b {
                    continue; // each undirected edge once
                }
                let _ = writeln!(out, "edge {} {}", space.point_id(a), space.point_id(b));
            }
        }
        let mut props: BTreeMap<&str, &PointSet> = BTreeMap::new();
        for (name, set) in self.static_valuation.iter() {
            props.insert(name, set);
        }
        for (name, set) in self.dynamic_valuation.iter() {
            props.insert(name, set);
        }
        for (name, set) in props {
            let _ = write!(out, "prop {name}");
            for idx in set.iter() {
                let _ = write!(out, " {}", space.point_id(idx));
            }
            let _ = writeln!(out);
        }
        out
    }

    /// Parses the line-oriented model format produced by [`canonical_text`]:
    /// a `points N` header, `symmetric`, `point`, `edge` and `prop` lines.
    /// Blank lines and `#` comments are skipped.
    ///
    /// [`canonical_text`]: ClosureModel::canonical_text
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let err = |line: usize, msg: String| ModelError::File { line, msg };
        let mut declared_points: Option<usize> = None;
        let mut symmetric = true;
        let mut points: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String)> = Vec::new();
        let mut props: BTreeMap<String, Vec<String>> = BTreeMap::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let keyword = parts.next().unwrap();
            match keyword {
                "points" => {
                    let n = parts
                        .next()
                        .ok_or_else(|| err(line, "missing point count".into()))?;
                    declared_points = Some(
                        n.parse()
                            .map_err(|_| err(line, format!("bad point count `{n}`")))?,
                    );
                }
                "symmetric" => {
                    let v = parts
                        .next()
                        .ok_or_else(|| err(line, "missing true|false".into()))?;
                    symmetric = match v {
                        "true" => true,
                        "false" => false,
                        other => return Err(err(line, format!("expected true|false, got `{other}`"))),
                    };
                }
                "point" => {
                    let id = parts
                        .next()
                        .ok_or_else(|| err(line, "missing point id".into()))?;
                    points.push(id.to_string());
                }
                "edge" => {
                    let a = parts
                        .next()
                        .ok_or_else(|| err(line, "missing edge endpoint".into()))?;
                    let b = parts
                        .next()
                        .ok_or_else(|| err(line, "missing edge endpoint".into()))?;
                    edges.push((a.to_string(), b.to_string()));
                }
                "prop" => {
                    let name = parts
                        .next()
                        .ok_or_else(|| err(line, "missing proposition name".into()))?;
                    props
                        .entry(name.to_string())
                        .or_default()
                        .extend(parts.map(|s| s.to_string()));
                }
                other => return Err(err(line, format!("unknown directive `{other}`"))),
            }
        }

        if let Some(n) = declared_points {
            if n != points.len() {
                return Err(err(
                    0,
                    format!("header declares {n} points, found {}", points.len()),
                ));
            }
        }

        let mut builder = SpaceGraphBuilder::new(symmetric);
        for id in &points {
            builder.add_point(id.clone())?;
        }
        for (a, b) in &edges {
            builder.add_edge(a, b)?;
        }
        let space = builder.build();
        let mut valuation = BTreeMap::new();
        for (name, ids) in props {
            let set = space.set_of_ids(ids.iter().map(|s| s.as_str()))?;
            valuation.insert(name, set);
        }
        Self::new(space, valuation)
    }
}
