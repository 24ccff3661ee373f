//! Brute-force reference semantics for small models.
//!
//! The production evaluator decides `φ S ψ` with a linear-time backward
//! flood; this module decides it by exhaustive walk enumeration instead, and
//! evaluates every other connective by naive recursion without caching. The
//! two implementations share nothing but the formula type, so agreement on
//! random inputs is meaningful evidence. Enumeration is exponential-ish, so
//! models are refused above a small point bound.

use crate::bitset::PointSet;
use crate::model::ClosureModel;

use super::ast::Formula;

/// Largest model the oracle accepts by default.
pub const DEFAULT_ORACLE_BOUND: usize = 12;

#[derive(Debug, thiserror::Error)]
#[error("model has {points} points, oracle refuses more than {bound}")]
pub struct OracleTooLarge {
    pub points: usize,
    pub bound: usize,
}

pub fn oracle_sat(model: &ClosureModel, f: &Formula) -> Result<PointSet, OracleTooLarge> {
    oracle_sat_bounded(model, f, DEFAULT_ORACLE_BOUND)
}

pub fn oracle_sat_bounded(
    model: &ClosureModel,
    f: &Formula,
    bound: usize,
) -> Result<PointSet, OracleTooLarge> {
    let points = model.space().len();
    if points > bound {
        return Err(OracleTooLarge { points, bound });
    }
    Ok(eval(model, &f.desugar()))
}

fn eval(model: &ClosureModel, f: &Formula) -> PointSet {
    let space = model.space();
    let n = space.len();
    match f {
        Formula::Prop(name) => model.proposition(name),
        Formula::Top => PointSet::full(n),
        Formula::Not(a) => eval(model, a).complement(),
        Formula::And(a, b) => eval(model, a).intersect(&eval(model, b)),
        Formula::Close(a) => {
            let inner = eval(model, a);
            let mut out = inner.clone();
            for x in inner.iter() {
                for &s in space.successors(x) {
                    out.insert(s as usize);
                }
            }
            out
        }
        Formula::Surround(a, b) => {
            let sat_a = eval(model, a);
            let sat_b = eval(model, b);
            let mut out = PointSet::empty(n);
            for x in sat_a.iter() {
                if sat_b.contains(x) {
                    // a walk must start outside ψ, so x cannot escape
                    out.insert(x);
                    continue;
                }
                if !escapes(model, &sat_a, &sat_b, x) {
                    out.insert(x);
                }
            }
            out
        }
        other => eval(model, &other.desugar()),
    }
}

/// Is there a walk `x = x₀, …, x_k` along the relation with every `x_i`
/// outside ψ and `x_k` outside both φ and ψ? Walks need never revisit a
/// point (membership constraints are per point), so a DFS with a visited set
/// over at most |X| points is exhaustive.
fn escapes(model: &ClosureModel, sat_a: &PointSet, sat_b: &PointSet, x: usize) -> bool {
    let space = model.space();
    let mut visited = vec![false; space.len()];
    visited[x] = true;
    let mut stack = vec![x];
    while let Some(y) = stack.pop() {
        if !sat_a.contains(y) && !sat_b.contains(y) {
            return true;
        }
        for &z in space.successors(y) {
            let z = z as usize;
            if !visited[z] && !sat_b.contains(z) {
                visited[z] = true;
                stack.push(z);
            }
        }
    }
    false
}
