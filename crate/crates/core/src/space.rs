//! Quasi-discrete closure spaces induced by graphs.
//!
//! A graph whose edges form a binary relation over its nodes induces a
//! closure space: the closure of a set adds every relation-successor of a
//! member. On symmetric graphs (the usual accessibility graphs) the
//! direction does not matter. The space is immutable after construction and
//! can be shared freely across concurrent evaluations.

use std::collections::HashMap;

use crate::bitset::PointSet;

#[derive(Debug, thiserror::Error)]
pub enum SpaceError {
    #[error("duplicate point id `{0}`")]
    DuplicatePoint(String),
    #[error("unknown point id `{0}`")]
    UnknownPoint(String),
    #[error("self-loop on point `{0}` is not allowed")]
    SelfLoop(String),
    #[error("point set belongs to a space with {set} points, this space has {space}")]
    ForeignPointSet { set: usize, space: usize },
}

/// Which flavor of boundary to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryVariant {
    /// `C(A) \ I(A)`
    Full,
    /// `A \ I(A)`
    Interior,
    /// `C(A) \ A`
    Closure,
}

/// A finite set of points plus a binary edge relation, with points addressed
/// both by a stable string id and by a dense integer index.
#[derive(Debug, Clone)]
pub struct SpaceGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    symmetric: bool,
    edge_count: usize,
}

/// Incremental builder; the finished graph is immutable.
#[derive(Debug, Default)]
pub struct SpaceGraphBuilder {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    symmetric: bool,
}

impl SpaceGraphBuilder {
    pub fn new(symmetric: bool) -> Self {
        Self {
            symmetric,
            ..Default::default()
        }
    }

    /// Registers a point, returning its dense index. Re-adding an existing id
    /// is an error.
    pub fn add_point(&mut self, id: impl Into<String>) -> Result<usize, SpaceError> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(SpaceError::DuplicatePoint(id));
        }
        let idx = self.ids.len();
        self.index.insert(id.clone(), idx);
        self.ids.push(id);
        Ok(idx)
    }

    /// Registers a point if new, otherwise returns the existing index.
    pub fn ensure_point(&mut self, id: &str) -> usize {
        match self.index.get(id) {
            Some(&i) => i,
            None => {
                let idx = self.ids.len();
                self.index.insert(id.to_string(), idx);
                self.ids.push(id.to_string());
                idx
            }
        }
    }

    pub fn add_edge(&mut self, from: &str, to: &str) -> Result<(), SpaceError> {
        let a = *self
            .index
            .get(from)
            .ok_or_else(|| SpaceError::UnknownPoint(from.to_string()))?;
        let b = *self
            .index
            .get(to)
            .ok_or_else(|| SpaceError::UnknownPoint(to.to_string()))?;
        if a == b {
            return Err(SpaceError::SelfLoop(from.to_string()));
        }
        self.edges.push((a, b));
        Ok(())
    }

    pub fn add_edge_by_index(&mut self, a: usize, b: usize) -> Result<(), SpaceError> {
        if a == b {
            return Err(SpaceError::SelfLoop(self.ids[a].clone()));
        }
        assert!(a < self.ids.len() && b < self.ids.len());
        self.edges.push((a, b));
        Ok(())
    }

    pub fn contains_point(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn build(self) -> SpaceGraph {
        let n = self.ids.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        let push = |s: &mut Vec<Vec<u32>>, a: usize, b: u32| {
            if !s[a].contains(&b) {
                s[a].push(b);
            }
        };
        for &(a, b) in &self.edges {
            push(&mut succ, a, b as u32);
            push(&mut pred, b, a as u32);
            if self.symmetric {
                push(&mut succ, b, a as u32);
                push(&mut pred, a, b as u32);
            }
        }
        for v in succ.iter_mut().chain(pred.iter_mut()) {
            v.sort_unstable();
        }
        let edge_count = succ.iter().map(|v| v.len()).sum();
        SpaceGraph {
            ids: self.ids,
            index: self.index,
            succ,
            pred,
            symmetric: self.symmetric,
            edge_count,
        }
    }
}

impl SpaceGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of directed adjacency entries (a symmetric edge counts twice).
    pub fn relation_size(&self) -> usize {
        self.edge_count
    }

    pub fn point_id(&self, idx: usize) -> &str {
        &self.ids[idx]
    }

    pub fn point_ids(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(|s| s.as_str())
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn successors(&self, idx: usize) -> &[u32] {
        &self.succ[idx]
    }

    pub fn predecessors(&self, idx: usize) -> &[u32] {
        &self.pred[idx]
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Resolves string ids into a set.
    pub fn set_of_ids<'a>(
        &self,
        ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<PointSet, SpaceError> {
        let mut set = self.empty_set();
        for id in ids {
            let idx = self
                .point_index(id)
                .ok_or_else(|| SpaceError::UnknownPoint(id.to_string()))?;
            set.insert(idx);
        }
        Ok(set)
    }

    fn check_domain(&self, a: &PointSet) -> Result<(), SpaceError> {
        if a.domain_len() != self.len() {
            return Err(SpaceError::ForeignPointSet {
                set: a.domain_len(),
                space: self.len(),
            });
        }
        Ok(())
    }

    /// Closure `C(A) = A ∪ { x : some member of A has x as a relation
    /// successor }`. On symmetric spaces this is direction-invariant.
    pub fn closure(&self, a: &PointSet) -> Result<PointSet, SpaceError> {
        self.check_domain(a)?;
        let mut out = a.clone();
        for p in a.iter() {
            for &s in &self.succ[p] {
                out.insert(s as usize);
            }
        }
        Ok(out)
    }

    /// Interior `I(A) = complement(C(complement(A)))`.
    pub fn interior(&self, a: &PointSet) -> Result<PointSet, SpaceError> {
        self.check_domain(a)?;
        Ok(self.closure(&a.complement())?.complement())
    }

    pub fn boundary(&self, a: &PointSet, variant: BoundaryVariant) -> Result<PointSet, SpaceError> {
        self.check_domain(a)?;
        Ok(match variant {
            BoundaryVariant::Full => self.closure(a)?.difference(&self.interior(a)?),
            BoundaryVariant::Interior => a.difference(&self.interior(a)?),
            BoundaryVariant::Closure => self.closure(a)?.difference(a),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Symmetric line graph a–b–c–d.
    fn line4() -> SpaceGraph {
        let mut b = SpaceGraphBuilder::new(true);
        for id in ["a", "b", "c", "d"] {
            b.add_point(id).unwrap();
        }
        b.add_edge("a", "b").unwrap();
        b.add_edge("b", "c").unwrap();
        b.add_edge("c", "d").unwrap();
        b.build()
    }

    fn ids(space: &SpaceGraph, set: &PointSet) -> Vec<String> {
        set.iter().map(|i| space.point_id(i).to_string()).collect()
    }

    #[test]
    fn closure_on_line() {
        let g = line4();
        let a = g.set_of_ids(["a"]).unwrap();
        assert_eq!(ids(&g, &g.closure(&a).unwrap()), ["a", "b"]);
        // axioms at the edges of the lattice
        assert!(g.closure(&g.empty_set()).unwrap().is_empty());
        assert_eq!(g.closure(&g.full_set()).unwrap(), g.full_set());
    }

    #[test]
    fn interior_on_line() {
        let g = line4();
        let a = g.set_of_ids(["a", "b", "c"]).unwrap();
        assert_eq!(ids(&g, &g.interior(&a).unwrap()), ["a", "b"]);
        assert_eq!(g.interior(&g.full_set()).unwrap(), g.full_set());
        assert!(g.interior(&g.empty_set()).unwrap().is_empty());
    }

    #[test]
    fn boundaries_on_line() {
        let g = line4();
        let ab = g.set_of_ids(["a", "b"]).unwrap();
        assert_eq!(
            ids(&g, &g.boundary(&ab, BoundaryVariant::Closure).unwrap()),
            ["c"]
        );
        let b = g.set_of_ids(["b"]).unwrap();
        assert_eq!(
            ids(&g, &g.boundary(&b, BoundaryVariant::Full).unwrap()),
            ["a", "b", "c"]
        );
        for v in [
            BoundaryVariant::Full,
            BoundaryVariant::Interior,
            BoundaryVariant::Closure,
        ] {
            assert!(g.boundary(&g.empty_set(), v).unwrap().is_empty());
        }
    }

    #[test]
    fn directed_closure_follows_successors() {
        let mut b = SpaceGraphBuilder::new(false);
        b.add_point("x").unwrap();
        b.add_point("y").unwrap();
        b.add_edge("x", "y").unwrap();
        let g = b.build();
        let x = g.set_of_ids(["x"]).unwrap();
        let y = g.set_of_ids(["y"]).unwrap();
        assert_eq!(g.closure(&x).unwrap(), g.full_set());
        assert_eq!(g.closure(&y).unwrap(), y);
    }

    #[test]
    fn rejects_bad_input() {
        let mut b = SpaceGraphBuilder::new(true);
        b.add_point("a").unwrap();
        assert!(matches!(b.add_point("a"), Err(SpaceError::DuplicatePoint(_))));
        assert!(matches!(b.add_edge("a", "a"), Err(SpaceError::SelfLoop(_))));
        assert!(matches!(b.add_edge("a", "zz"), Err(SpaceError::UnknownPoint(_))));
        let g = b.build();
        let foreign = PointSet::empty(7);
        assert!(matches!(
            g.closure(&foreign),
            Err(SpaceError::ForeignPointSet { .. })
        ));
    }

    /// Random symmetric graph plus two random subsets of its points.
    fn arb_graph_and_sets() -> impl Strategy<Value = (SpaceGraph, PointSet, PointSet)> {
        (2usize..50)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec((0..n, 0..n), 0..2 * n),
                    proptest::collection::vec(any::<bool>(), n),
                    proptest::collection::vec(any::<bool>(), n),
                )
            })
            .prop_map(|(n, edges, abits, bbits)| {
                let mut builder = SpaceGraphBuilder::new(true);
                for i in 0..n {
                    builder.add_point(format!("p{i}")).unwrap();
                }
                for (a, b) in edges {
                    if a != b {
                        builder.add_edge_by_index(a, b).unwrap();
                    }
                }
                let g = builder.build();
                let pick = |bits: Vec<bool>| {
                    PointSet::from_indices(
                        n,
                        bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
                    )
                };
                (g, pick(abits), pick(bbits))
            })
    }

    proptest! {
        #[test]
        fn closure_axioms((g, a, b) in arb_graph_and_sets()) {
            let ca = g.closure(&a).unwrap();
            let cb = g.closure(&b).unwrap();
            prop_assert!(g.closure(&g.empty_set()).unwrap().is_empty());
            prop_assert!(a.is_subset(&ca));
            prop_assert_eq!(g.closure(&a.union(&b)).unwrap(), ca.union(&cb));
        }

        #[test]
        fn boundary_partition((g, a, _b) in arb_graph_and_sets()) {
            let full = g.boundary(&a, BoundaryVariant::Full).unwrap();
            let inner = g.boundary(&a, BoundaryVariant::Interior).unwrap();
            let outer = g.boundary(&a, BoundaryVariant::Closure).unwrap();
            prop_assert_eq!(full, inner.union(&outer));
            prop_assert!(!inner.intersects(&outer));
        }

        #[test]
        fn interior_closure_sandwich((g, a, _b) in arb_graph_and_sets()) {
            let i = g.interior(&a).unwrap();
            let c = g.closure(&a).unwrap();
            prop_assert!(i.is_subset(&a));
            prop_assert!(a.is_subset(&c));
            // quasi-discrete closure need not be idempotent, only monotone
            prop_assert!(c.is_subset(&g.closure(&c).unwrap()));
        }

        #[test]
        fn symmetric_adjacency((g, _a, _b) in arb_graph_and_sets()) {
            for x in 0..g.len() {
                let cx = g.closure(&PointSet::from_indices(g.len(), [x])).unwrap();
                for y in 0..g.len() {
                    if x == y { continue; }
                    let cy = g.closure(&PointSet::from_indices(g.len(), [y])).unwrap();
                    prop_assert_eq!(cx.contains(y), cy.contains(x));
                }
            }
        }
    }
}
