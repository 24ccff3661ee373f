//! Building accessibility graphs and presence traces from POI catalogs and
//! raw trajectory data, plus a seeded synthetic generator for large models.
//!
//! The pipeline: map each trajectory sample onto the POIs within a matching
//! radius (a presence), then connect POIs visited consecutively by at least
//! one entity. The result is a symmetric accessibility graph over which a
//! closure model is built.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitset::PointSet;
use crate::model::{ClosureModel, ModelError};
use crate::space::{SpaceGraph, SpaceGraphBuilder};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Default presence-matching radius in meters.
pub const DEFAULT_RADIUS_M: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("poi catalog is empty")]
    EmptyCatalog,
    #[error("matching radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("poi `{id}`: latitude {lat} / longitude {lon} out of range")]
    BadCoordinate { id: String, lat: f64, lon: f64 },
    #[error("duplicate poi id `{0}`")]
    DuplicatePoi(String),
    #[error("unparseable timestamp `{0}` (expected epoch seconds or YYYY-MM-DD HH:MM:SS)")]
    BadTimestamp(String),
    #[error("line {0}: expected {1} fields")]
    ShortRow(usize, usize),
    #[error("infeasible synthesis: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A point of interest; its category becomes a proposition of the model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poi {
    pub id: String,
    pub name: String,
    pub category: String,
    pub lat: f64,
    pub lon: f64,
}

/// One GPS fix of a moving entity.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub entity_id: String,
    pub timestamp: i64,
    pub lat: f64,
    pub lon: f64,
}

/// Timestamped record that an entity was within the matching radius of a POI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresenceEvent {
    pub entity_id: String,
    pub timestamp: i64,
    pub poi_id: String,
}

/// Great-circle distance in meters between two WGS84 coordinates given as
/// (latitude, longitude) degrees.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let a = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().atan2((1.0 - a).sqrt())
}

/// Accepts epoch seconds or `YYYY-MM-DD HH:MM:SS` (normalized to UTC).
pub fn parse_timestamp(text: &str) -> Result<i64, IngestError> {
    let text = text.trim();
    if let Ok(epoch) = text.parse::<i64>() {
        return Ok(epoch);
    }
    chrono::NaiveDateTime::parse_from_str(text, "%Y-%m-%d %H:%M:%S")
        .map(|dt| dt.and_utc().timestamp())
        .map_err(|_| IngestError::BadTimestamp(text.to_string()))
}

/// Matches every sample against the catalog: a presence is recorded for each
/// POI strictly closer than `radius_m`. Runs of the same (entity, POI) pair
/// over adjacent samples collapse to the first hit. Output is sorted by
/// (entity, timestamp) regardless of input order.
pub fn match_presences(
    pois: &[Poi],
    samples: &[TrajectorySample],
    radius_m: f64,
) -> Result<Vec<PresenceEvent>, IngestError> {
    if pois.is_empty() {
        return Err(IngestError::EmptyCatalog);
    }
    if radius_m <= 0.0 {
        return Err(IngestError::BadRadius(radius_m));
    }
    let mut ordered: Vec<&TrajectorySample> = samples.iter().collect();
    ordered.sort_by(|a, b| {
        (&a.entity_id, a.timestamp, a.lat.to_bits(), a.lon.to_bits()).cmp(&(
            &b.entity_id,
            b.timestamp,
            b.lat.to_bits(),
            b.lon.to_bits(),
        ))
    });

    let mut out = Vec::new();
    let mut current_entity: Option<&str> = None;
    let mut previous_hits: HashSet<usize> = HashSet::new();
    for sample in ordered {
        if current_entity != Some(sample.entity_id.as_str()) {
            current_entity = Some(sample.entity_id.as_str());
            previous_hits.clear();
        }
        let mut hits = HashSet::new();
        for (i, poi) in pois.iter().enumerate() {
            if haversine_m(sample.lat, sample.lon, poi.lat, poi.lon) < radius_m {
                hits.insert(i);
                if !previous_hits.contains(&i) {
                    out.push(PresenceEvent {
                        entity_id: sample.entity_id.clone(),
                        timestamp: sample.timestamp,
                        poi_id: poi.id.clone(),
                    });
                }
            }
        }
        previous_hits = hits;
    }
    Ok(out)
}

/// Connects every pair of POIs visited consecutively by one entity with an
/// undirected edge. POIs appearing in the trace but never in a transition
/// stay as isolated nodes. Points are ordered by id so equal inputs produce
/// identical graphs.
pub fn build_accessibility(presences: &[PresenceEvent]) -> SpaceGraph {
    let mut poi_ids: BTreeSet<&str> = BTreeSet::new();
    let mut per_entity: BTreeMap<&str, Vec<&PresenceEvent>> = BTreeMap::new();
    for p in presences {
        poi_ids.insert(&p.poi_id);
        per_entity.entry(&p.entity_id).or_default().push(p);
    }
    let index: BTreeMap<&str, usize> = poi_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i))
        .collect();
    let mut builder = SpaceGraphBuilder::new(true);
    for id in &poi_ids {
        builder.add_point(*id).unwrap();
    }
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for events in per_entity.values_mut() {
        events.sort_by_key(|e| e.timestamp);
        for pair in events.windows(2) {
            if pair[0].poi_id == pair[1].poi_id {
                continue;
            }
            let a = index[pair[0].poi_id.as_str()];
            let b = index[pair[1].poi_id.as_str()];
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                builder.add_edge_by_index(key.0, key.1).unwrap();
            }
        }
    }
    builder.build()
}

/// Builds a closure model over an accessibility graph: the space comes from
/// the presences, extended with any catalog POIs never visited; each POI
/// contributes its id as a proposition and joins its category's proposition.
pub fn model_from_catalog(
    pois: &[Poi],
    presences: &[PresenceEvent],
) -> Result<ClosureModel, IngestError> {
    if pois.is_empty() {
        return Err(IngestError::EmptyCatalog);
    }
    let graph = build_accessibility(presences);
    // re-register everything, catalog POIs included, in sorted order
    let mut ids: BTreeSet<&str> = pois.iter().map(|p| p.id.as_str()).collect();
    ids.extend(graph.point_ids());
    let mut builder = SpaceGraphBuilder::new(true);
    for id in &ids {
        builder.add_point(*id).unwrap();
    }
    for a in 0..graph.len() {
        for &b in graph.successors(a) {
            let b = b as usize;
            if a < b {
                builder.add_edge(graph.point_id(a), graph.point_id(b)).unwrap();
            }
        }
    }
    let space = builder.build();
    let mut valuation: BTreeMap<String, PointSet> = BTreeMap::new();
    for poi in pois {
        let idx = match space.point_index(&poi.id) {
            Some(i) => i,
            None => continue,
        };
        valuation
            .entry(poi.category.clone())
            .or_insert_with(|| space.empty_set())
            .insert(idx);
        valuation
            .entry(poi.id.clone())
            .or_insert_with(|| space.empty_set())
            .insert(idx);
    }
    Ok(ClosureModel::new(space, valuation)?)
}

/// Category pool used by the synthetic generator. The first eight mirror the
/// categories referenced by the bundled demo properties.
pub const SYNTH_CATEGORIES: [&str; 24] = [
    "TRANSPORTSUBWAY",
    "TRANSPORTBUSSTOP",
    "HEALTHHOSPITAL",
    "DEPARTMENTSTORE",
    "ACCOMMOHOTEL",
    "FOODRESTAURANT",
    "TOURISTATTRACTION",
    "TOURISTZOO",
    "CATEGORY09",
    "CATEGORY10",
    "CATEGORY11",
    "CATEGORY12",
    "CATEGORY13",
    "CATEGORY14",
    "CATEGORY15",
    "CATEGORY16",
    "CATEGORY17",
    "CATEGORY18",
    "CATEGORY19",
    "CATEGORY20",
    "CATEGORY21",
    "CATEGORY22",
    "CATEGORY23",
    "CATEGORY24",
];

/// Deterministic connected random symmetric model: exactly `nodes` points,
/// `edges` undirected edges, and `props` (category, point) assignments drawn
/// from [`SYNTH_CATEGORIES`]. The same seed reproduces the same version hash.
pub fn synth_model(
    nodes: usize,
    edges: usize,
    props: usize,
    seed: u64,
) -> Result<ClosureModel, IngestError> {
    if nodes == 0 {
        return Err(IngestError::Infeasible("need at least one node".into()));
    }
    if nodes > 1 && edges < nodes - 1 {
        return Err(IngestError::Infeasible(format!(
            "{edges} edges cannot connect {nodes} nodes (need at least {})",
            nodes - 1
        )));
    }
    let max_edges = nodes * (nodes - 1) / 2;
    if edges > max_edges {
        return Err(IngestError::Infeasible(format!(
            "{edges} edges exceed the {max_edges} possible on {nodes} nodes"
        )));
    }
    if props > nodes * SYNTH_CATEGORIES.len() {
        return Err(IngestError::Infeasible(format!(
            "{props} assignments exceed {} categories over {nodes} nodes",
            SYNTH_CATEGORIES.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = SpaceGraphBuilder::new(true);
    for i in 0..nodes {
        builder.add_point(format!("p{i}")).unwrap();
    }
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    // random attachment spanning tree keeps the graph connected
    for i in 1..nodes {
        let parent = rng.gen_range(0..i);
        used.insert((parent.min(i), parent.max(i)));
    }
    while used.len() < edges {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b {
            used.insert((a.min(b), a.max(b)));
        }
    }
    for &(a, b) in &used {
        builder.add_edge_by_index(a, b).unwrap();
    }
    let space = builder.build();

    let mut assigned: HashSet<(usize, usize)> = HashSet::new();
    let mut valuation: BTreeMap<String, PointSet> = BTreeMap::new();
    while assigned.len() < props {
        let point = rng.gen_range(0..nodes);
        let cat = rng.gen_range(0..SYNTH_CATEGORIES.len());
        if assigned.insert((cat, point)) {
            valuation
                .entry(SYNTH_CATEGORIES[cat].to_string())
                .or_insert_with(|| space.empty_set())
                .insert(point);
        }
    }
    Ok(ClosureModel::new(space, valuation)?)
}

// ---------------------------------------------------------------------------
// CSV formats

/// POI CSV with header `id,name,category,lat,lon`.
pub fn read_poi_csv(text: &str) -> Result<Vec<Poi>, IngestError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for row in reader.deserialize::<Poi>() {
        let poi = row?;
        if !(-90.0..=90.0).contains(&poi.lat) || !(-180.0..=180.0).contains(&poi.lon) {
            return Err(IngestError::BadCoordinate {
                id: poi.id,
                lat: poi.lat,
                lon: poi.lon,
            });
        }
        if !ids.insert(poi.id.clone()) {
            return Err(IngestError::DuplicatePoi(poi.id));
        }
        out.push(poi);
    }
    Ok(out)
}

/// Trajectory CSV: `entity_id,timestamp,<coord>,<coord>`, headerless or with
/// a header row. Coordinates are read as (lat, lon) unless `lon_first` is
/// set, which matches the usual taxi-trace layout.
pub fn read_trajectory_csv(text: &str, lon_first: bool) -> Result<Vec<TrajectorySample>, IngestError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if lineno == 0 && line.starts_with("entity_id") {
            continue; // optional header
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
        if fields.len() < 4 {
            return Err(IngestError::ShortRow(lineno + 1, 4));
        }
        let (x, y): (f64, f64) = (
            fields[2]
                .parse()
                .map_err(|_| IngestError::ShortRow(lineno + 1, 4))?,
            fields[3]
                .parse()
                .map_err(|_| IngestError::ShortRow(lineno + 1, 4))?,
        );
        let (lat, lon) = if lon_first { (y, x) } else { (x, y) };
        out.push(TrajectorySample {
            entity_id: fields[0].to_string(),
            timestamp: parse_timestamp(fields[1])?,
            lat,
            lon,
        });
    }
    Ok(out)
}

/// Presence CSV with header `entity_id,timestamp,poi_id`.
pub fn write_presence_csv(presences: &[PresenceEvent]) -> String {
    let mut out = String::from("entity_id,timestamp,poi_id\n");
    for p in presences {
        out.push_str(&format!("{},{},{}\n", p.entity_id, p.timestamp, p.poi_id));
    }
    out
}

pub fn read_presence_csv(text: &str) -> Result<Vec<PresenceEvent>, IngestError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize::<PresenceEvent>() {
        out.push(row?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poi(id: &str, lat: f64, lon: f64) -> Poi {
        Poi {
            id: id.to_string(),
            name: id.to_string(),
            category: "CAT".to_string(),
            lat,
            lon,
        }
    }

    fn sample(entity: &str, ts: i64, lat: f64, lon: f64) -> TrajectorySample {
        TrajectorySample {
            entity_id: entity.to_string(),
            timestamp: ts,
            lat,
            lon,
        }
    }

    #[test]
    fn haversine_basics() {
        assert_eq!(haversine_m(39.9, 116.4, 39.9, 116.4), 0.0);
        // one degree of longitude along the equator
        let d = haversine_m(0.0, 0.0, 0.0, 1.0);
        let analytic = 2.0 * std::f64::consts::PI * EARTH_RADIUS_M / 360.0;
        assert!((d - analytic).abs() / analytic < 0.001, "got {d}");
        assert!((d - 111_195.0).abs() < 120.0);
    }

    #[test]
    fn haversine_is_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (a, b) = (
                (rng.gen_range(-89.0..89.0), rng.gen_range(-179.0..179.0)),
                (rng.gen_range(-89.0..89.0), rng.gen_range(-179.0..179.0)),
            );
            let ab = haversine_m(a.0, a.1, b.0, b.1);
            let ba = haversine_m(b.0, b.1, a.0, a.1);
            assert_eq!(ab, ba);
            assert!(ab >= 0.0);
        }
    }

    #[test]
    fn sample_on_poi_matches_once() {
        let pois = vec![poi("A", 39.9, 116.4)];
        let samples = vec![sample("t1", 0, 39.9, 116.4)];
        let got = match_presences(&pois, &samples, DEFAULT_RADIUS_M).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].poi_id, "A");
    }

    #[test]
    fn boundary_distance_is_excluded() {
        // place the sample a bit away, then use its exact distance as radius:
        // the comparison is strict, so nothing matches
        let pois = vec![poi("A", 39.9, 116.4)];
        let s = sample("t1", 0, 39.90008, 116.4);
        let d = haversine_m(s.lat, s.lon, 39.9, 116.4);
        assert!(d > 0.0);
        let got = match_presences(&pois, &[s.clone()], d).unwrap();
        assert!(got.is_empty());
        let got = match_presences(&pois, &[s], d * 1.0001).unwrap();
        assert_eq!(got.len(), 1);
    }

    #[test]
    fn stepwise_trace_yields_ordered_presences() {
        let pois = vec![
            poi("Tsinghua", 40.0000, 116.3260),
            poi("BusStopA", 39.9990, 116.3200),
            poi("Peking", 39.9870, 116.3050),
        ];
        let samples = vec![
            sample("taxiA", 100, 40.0000, 116.3260),
            sample("taxiA", 200, 39.9990, 116.3200),
            sample("taxiA", 300, 39.9870, 116.3050),
        ];
        let got = match_presences(&pois, &samples, DEFAULT_RADIUS_M).unwrap();
        let ids: Vec<&str> = got.iter().map(|p| p.poi_id.as_str()).collect();
        assert_eq!(ids, ["Tsinghua", "BusStopA", "Peking"]);
    }

    #[test]
    fn consecutive_duplicates_collapse_to_first() {
        let pois = vec![poi("A", 10.0, 10.0)];
        let samples = vec![
            sample("e", 0, 10.0, 10.0),
            sample("e", 10, 10.0, 10.0),
            sample("e", 20, 10.0, 10.0),
            sample("e", 30, 20.0, 20.0), // away
            sample("e", 40, 10.0, 10.0), // back again
        ];
        let got = match_presences(&pois, &samples, 10.0).unwrap();
        let ts: Vec<i64> = got.iter().map(|p| p.timestamp).collect();
        assert_eq!(ts, [0, 40]);
    }

    #[test]
    fn overlapping_pois_each_get_a_presence() {
        let pois = vec![poi("A", 10.0, 10.0), poi("B", 10.00001, 10.0)];
        let samples = vec![sample("e", 0, 10.000005, 10.0)];
        let got = match_presences(&pois, &samples, 50.0).unwrap();
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn matching_is_input_order_invariant_and_radius_monotone() {
        let pois = vec![poi("A", 10.0, 10.0), poi("B", 10.001, 10.0)];
        let mut samples = vec![
            sample("e2", 5, 10.0, 10.0),
            sample("e1", 0, 10.001, 10.0),
            sample("e1", 9, 10.0, 10.0),
        ];
        let a = match_presences(&pois, &samples, 40.0).unwrap();
        samples.reverse();
        let b = match_presences(&pois, &samples, 40.0).unwrap();
        assert_eq!(a, b);
        // a wider radius can merge a presence into an earlier streak, but it
        // never loses the (entity, poi) visit
        let narrow = match_presences(&pois, &samples, 40.0).unwrap();
        let wide = match_presences(&pois, &samples, 400.0).unwrap();
        for p in &narrow {
            assert!(
                wide.iter().any(|w| w.entity_id == p.entity_id
                    && w.poi_id == p.poi_id
                    && w.timestamp <= p.timestamp),
                "visit lost when radius grew: {p:?}"
            );
        }
    }

    fn presence(entity: &str, ts: i64, poi: &str) -> PresenceEvent {
        PresenceEvent {
            entity_id: entity.to_string(),
            timestamp: ts,
            poi_id: poi.to_string(),
        }
    }

    #[test]
    fn stepwise_edges_only() {
        let g = build_accessibility(&[
            presence("e", 0, "A"),
            presence("e", 1, "B"),
            presence("e", 2, "C"),
        ]);
        assert_eq!(g.len(), 3);
        assert_eq!(g.relation_size(), 4); // A-B, B-C, both directions
        let a = g.point_index("A").unwrap();
        let c = g.point_index("C").unwrap();
        assert!(!g.successors(a).contains(&(c as u32)));
    }

    #[test]
    fn single_presence_keeps_isolated_node() {
        let g = build_accessibility(&[presence("e", 0, "A")]);
        assert_eq!(g.len(), 1);
        assert_eq!(g.relation_size(), 0);
    }

    #[test]
    fn opposite_traversals_share_one_edge() {
        let g = build_accessibility(&[
            presence("e1", 0, "A"),
            presence("e1", 1, "B"),
            presence("e2", 0, "B"),
            presence("e2", 1, "A"),
        ]);
        assert_eq!(g.relation_size(), 2);
    }

    #[test]
    fn synth_tiny() {
        let m = synth_model(2, 1, 0, 3).unwrap();
        assert_eq!(m.space().len(), 2);
        assert_eq!(m.space().relation_size(), 2);
        assert_eq!(m.assignment_count(), 0);
    }

    #[test]
    fn synth_counts_and_determinism() {
        let m1 = synth_model(300, 900, 750, 42).unwrap();
        assert_eq!(m1.space().len(), 300);
        assert_eq!(m1.space().relation_size(), 1800);
        assert_eq!(m1.assignment_count(), 750);
        let m2 = synth_model(300, 900, 750, 42).unwrap();
        assert_eq!(m1.version(), m2.version());
        let m3 = synth_model(300, 900, 750, 43).unwrap();
        assert_ne!(m1.version(), m3.version());
    }

    #[test]
    fn synth_refuses_infeasible() {
        assert!(synth_model(10, 8, 0, 1).is_err()); // cannot connect
        assert!(synth_model(4, 7, 0, 1).is_err()); // too many edges
        assert!(synth_model(1, 0, 100, 1).is_err()); // too many assignments
    }

    #[test]
    fn timestamps_both_formats() {
        assert_eq!(parse_timestamp("1202233200").unwrap(), 1_202_233_200);
        assert_eq!(
            parse_timestamp("2008-02-05 19:00:00").unwrap(),
            1_202_238_000
        );
        assert!(parse_timestamp("not a time").is_err());
    }

    #[test]
    fn csv_roundtrips() {
        let pois = read_poi_csv("id,name,category,lat,lon\nA,Station A,TRANSPORTSUBWAY,39.9,116.4\n").unwrap();
        assert_eq!(pois.len(), 1);
        assert!(read_poi_csv("id,name,category,lat,lon\nA,x,C,91.0,0\n").is_err());
        assert!(read_poi_csv("id,name,category,lat,lon\nA,x,C,0,0\nA,y,C,1,1\n").is_err());

        let lonlat = read_trajectory_csv("t1,2008-02-05 19:00:00,116.4,39.9\n", true).unwrap();
        assert_eq!(lonlat[0].lat, 39.9);
        let latlon = read_trajectory_csv("entity_id,timestamp,lat,lon\nt1,0,39.9,116.4\n", false).unwrap();
        assert_eq!(latlon[0].lat, 39.9);

        let presences = vec![presence("e", 7, "A")];
        let text = write_presence_csv(&presences);
        assert_eq!(read_presence_csv(&text).unwrap(), presences);
    }

    #[test]
    fn model_from_catalog_keeps_unvisited_pois() {
        let pois = vec![poi("A", 0.0, 0.0), poi("B", 1.0, 1.0), poi("Z", 5.0, 5.0)];
        let presences = vec![presence("e", 0, "A"), presence("e", 1, "B")];
        let m = model_from_catalog(&pois, &presences).unwrap();
        assert_eq!(m.space().len(), 3);
        assert_eq!(m.space().relation_size(), 2);
        assert_eq!(m.proposition("CAT").count(), 3);
        assert_eq!(m.proposition("Z").count(), 1);
    }
}
