//! Current global entity→POI state, fed by device heartbeats.
//!
//! Heartbeats can arrive out of order over the network, so updates apply
//! last-writer-wins by device timestamp (ties overwrite). Snapshots are
//! immutable copies; turning a snapshot into a presence proposition on a
//! model is how the checker sees the world.

use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::model::{ClosureModel, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("entity id must not be empty")]
    EmptyEntity,
    #[error("poi id must not be empty")]
    EmptyPoi,
}

/// Where one entity last reported itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityLocation {
    pub entity_id: String,
    pub poi_id: String,
    /// Device timestamp, epoch seconds.
    pub timestamp: i64,
}

/// Outcome of an update against the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    Applied,
    /// A strictly newer record for the entity already exists.
    Stale,
}

/// Immutable capture of the whole store at one instant.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub snapshot_ts: i64,
    pub entities: BTreeMap<String, EntityLocation>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Binds `presence_prop` on `model` to exactly the POIs occupied by the
    /// snapshot's entities. POIs unknown to the model are skipped; the count
    /// of skipped entities is returned alongside the new model.
    pub fn to_valuation(
        &self,
        model: &ClosureModel,
        presence_prop: &str,
    ) -> Result<(ClosureModel, usize), ModelError> {
        let space = model.space();
        let mut points = space.empty_set();
        let mut unknown = 0usize;
        for loc in self.entities.values() {
            match space.point_index(&loc.poi_id) {
                Some(idx) => {
                    points.insert(idx);
                }
                None => unknown += 1,
            }
        }
        Ok((model.with_presence(presence_prop, points)?, unknown))
    }
}

/// Linearizable in-memory location store. An optional staleness horizon
/// drops entities unseen for `h` seconds from snapshots.
#[derive(Debug, Default)]
pub struct LocationStore {
    inner: Mutex<BTreeMap<String, EntityLocation>>,
    staleness_horizon: Option<i64>,
}

impl LocationStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_staleness_horizon(horizon_secs: i64) -> Self {
        Self {
            inner: Mutex::new(BTreeMap::new()),
            staleness_horizon: Some(horizon_secs),
        }
    }

    pub fn update(&self, loc: EntityLocation) -> Result<UpdateOutcome, StoreError> {
        if loc.entity_id.is_empty() {
            return Err(StoreError::EmptyEntity);
        }
        if loc.poi_id.is_empty() {
            return Err(StoreError::EmptyPoi);
        }
        let mut map = self.inner.lock().unwrap();
        match map.get(&loc.entity_id) {
            Some(existing) if existing.timestamp > loc.timestamp => Ok(UpdateOutcome::Stale),
            _ => {
                map.insert(loc.entity_id.clone(), loc);
                Ok(UpdateOutcome::Applied)
            }
        }
    }

    pub fn get(&self, entity_id: &str) -> Option<EntityLocation> {
        self.inner.lock().unwrap().get(entity_id).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.lock().unwrap().is_empty()
    }

    /// Atomic copy of the current state, stamped `snapshot_ts`. Entities
    /// older than the staleness horizon (when configured) are left out.
    pub fn snapshot_at(&self, snapshot_ts: i64) -> Snapshot {
        let map = self.inner.lock().unwrap();
        let entities = map
            .iter()
            .filter(|(_, loc)| match self.staleness_horizon {
                Some(h) => loc.timestamp >= snapshot_ts - h,
                None => true,
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Snapshot {
            snapshot_ts,
            entities,
        }
    }

    /// Snapshot stamped with the current wall clock.
    pub fn snapshot(&self) -> Snapshot {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0);
        self.snapshot_at(now)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn loc(entity: &str, poi: &str, ts: i64) -> EntityLocation {
        EntityLocation {
            entity_id: entity.to_string(),
            poi_id: poi.to_string(),
            timestamp: ts,
        }
    }

    #[test]
    fn last_writer_wins() {
        let store = LocationStore::new();
        assert_eq!(store.update(loc("e", "A", 10)).unwrap(), UpdateOutcome::Applied);
        // older timestamp loses, store unchanged
        assert_eq!(store.update(loc("e", "B", 5)).unwrap(), UpdateOutcome::Stale);
        assert_eq!(store.get("e").unwrap().poi_id, "A");
        // equal timestamp overwrites
        assert_eq!(store.update(loc("e", "C", 10)).unwrap(), UpdateOutcome::Applied);
        assert_eq!(store.get("e").unwrap().poi_id, "C");
    }

    #[test]
    fn rejects_malformed() {
        let store = LocationStore::new();
        assert!(store.update(loc("", "A", 1)).is_err());
        assert!(store.update(loc("e", "", 1)).is_err());
    }

    #[test]
    fn snapshots_are_immutable_copies() {
        let store = LocationStore::new();
        assert!(store.snapshot_at(0).is_empty());
        store.update(loc("e1", "A", 1)).unwrap();
        store.update(loc("e2", "B", 1)).unwrap();
        let snap = store.snapshot_at(2);
        assert_eq!(snap.len(), 2);
        store.update(loc("e1", "Z", 9)).unwrap();
        store.update(loc("e3", "C", 9)).unwrap();
        assert_eq!(snap.len(), 2);
        assert_eq!(snap.entities["e1"].poi_id, "A");
    }

    #[test]
    fn update_order_does_not_matter_for_distinct_timestamps() {
        let updates = vec![
            loc("a", "P1", 3),
            loc("a", "P2", 1),
            loc("b", "P3", 7),
            loc("b", "P4", 2),
            loc("c", "P5", 5),
        ];
        let mut orderings = vec![updates.clone()];
        let mut rev = updates.clone();
        rev.reverse();
        orderings.push(rev);
        let mut rotated = updates.clone();
        rotated.rotate_left(2);
        orderings.push(rotated);

        let mut snaps = Vec::new();
        for ord in orderings {
            let store = LocationStore::new();
            for u in ord {
                store.update(u).unwrap();
            }
            snaps.push(store.snapshot_at(100));
        }
        assert_eq!(snaps[0], snaps[1]);
        assert_eq!(snaps[0], snaps[2]);
    }

    #[test]
    fn staleness_horizon_hides_old_entities() {
        let store = LocationStore::with_staleness_horizon(60);
        store.update(loc("old", "A", 0)).unwrap();
        store.update(loc("new", "B", 95)).unwrap();
        let snap = store.snapshot_at(100);
        assert_eq!(snap.len(), 1);
        assert!(snap.entities.contains_key("new"));
    }

    #[test]
    fn valuation_from_snapshot() {
        let model = fixtures::mini_city();
        let store = LocationStore::new();

        let empty = store.snapshot_at(0);
        let (m, unknown) = empty.to_valuation(&model, "bike").unwrap();
        assert!(m.proposition("bike").is_empty());
        assert_eq!(unknown, 0);

        store.update(loc("bike1", "museum", 1)).unwrap();
        store.update(loc("bike2", "museum", 1)).unwrap();
        store.update(loc("bike3", "nowhere", 1)).unwrap();
        let snap = store.snapshot_at(5);
        let (m, unknown) = snap.to_valuation(&model, "bike").unwrap();
        // two entities share the POI; unknown POIs are counted, not fatal
        assert_eq!(m.proposition("bike").count(), 1);
        assert_eq!(unknown, 1);
        let museum = model.space().point_index("museum").unwrap();
        assert!(m.proposition("bike").contains(museum));
        // the source model is untouched
        assert!(model.proposition("bike").is_empty());
    }
}
