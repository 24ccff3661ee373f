//! Global-set model checking.
//!
//! `sat` computes, for a formula, the exact set of points where it holds.
//! The boolean verdict of `check` is non-emptiness of that set. Evaluation
//! never mutates the model; subformula results are memoized per call, so
//! concurrent evaluations against a shared model need no synchronization.

use std::collections::HashMap;

use crate::bitset::PointSet;
use crate::model::ClosureModel;
use crate::space::SpaceGraph;

use super::ast::Formula;

/// Satisfaction set of `f` over `model`.
pub fn sat(model: &ClosureModel, f: &Formula) -> PointSet {
    let core = f.desugar();
    let mut eval = Evaluator {
        model,
        memo: HashMap::new(),
    };
    eval.eval(&core)
}

/// True iff the satisfaction set is non-empty.
pub fn check(model: &ClosureModel, f: &Formula) -> bool {
    !sat(model, f).is_empty()
}

struct Evaluator<'m> {
    model: &'m ClosureModel,
    memo: HashMap<Formula, PointSet>,
}

impl Evaluator<'_> {
    fn eval(&mut self, f: &Formula) -> PointSet {
        if let Some(hit) = self.memo.get(f) {
            return hit.clone();
        }
        let space = self.model.space();
        let result = match f {
            Formula::Prop(name) => self.model.proposition(name),
            Formula::Top => space.full_set(),
            Formula::Not(a) => self.eval(a).complement(),
            Formula::And(a, b) => self.eval(a).intersect(&self.eval(b)),
            Formula::Close(a) => {
                let inner = self.eval(a);
                space.closure(&inner).expect("set built from this space")
            }
            Formula::Surround(a, b) => {
                let sat_a = self.eval(a);
                let sat_b = self.eval(b);
                surround(space, &sat_a, &sat_b)
            }
            // sat() desugars up front; handle sugar anyway so the evaluator
            // is total on raw trees.
            other => self.eval(&other.desugar()),
        };
        self.memo.insert(f.clone(), result.clone());
        result
    }
}

/// `Sat(φ S ψ) = Sat(φ) \ Bad`, with `Bad` the least fixpoint of
/// `B ↦ B₀ ∪ (pre(B) ∩ Sat(¬ψ))` where `B₀ = Sat(¬φ ∧ ¬ψ)` and `pre(B)`
/// holds the points whose closure meets `B`. Computed by backward flooding
/// along predecessor edges, linear in the relation size.
fn surround(space: &SpaceGraph, sat_a: &PointSet, sat_b: &PointSet) -> PointSet {
    let not_b = sat_b.complement();
    let seed = sat_a.complement().intersect(&not_b);
    let mut bad = seed.clone();
    let mut worklist: Vec<usize> = seed.iter().collect();
    while let Some(x) = worklist.pop() {
        for &p in space.predecessors(x) {
            let p = p as usize;
            if not_b.contains(p) && bad.insert(p) {
                worklist.push(p);
            }
        }
    }
    sat_a.difference(&bad)
}
