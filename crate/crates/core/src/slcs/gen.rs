//! Seeded generators for randomized cross-checks of the two evaluators.

use rand::Rng;
use std::collections::BTreeMap;

use crate::model::ClosureModel;
use crate::space::SpaceGraphBuilder;

use super::ast::Formula;

/// Random formula over the core connectives only, up to `depth` levels of
/// nesting.
pub fn random_core_formula(rng: &mut impl Rng, depth: usize, props: &[&str]) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return if rng.gen_ratio(1, 1 + props.len() as u32) {
            Formula::Top
        } else {
            Formula::prop(props[rng.gen_range(0..props.len())])
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(random_core_formula(rng, depth - 1, props)),
        1 => Formula::and(
            random_core_formula(rng, depth - 1, props),
            random_core_formula(rng, depth - 1, props),
        ),
        2 => Formula::close(random_core_formula(rng, depth - 1, props)),
        _ => Formula::surround(
            random_core_formula(rng, depth - 1, props),
            random_core_formula(rng, depth - 1, props),
        ),
    }
}

/// Random symmetric model with up to `max_points` points, around `max_edges`
/// candidate edges, and each proposition held at each point with chance 1/3.
pub fn random_model(
    rng: &mut impl Rng,
    max_points: usize,
    max_edges: usize,
    props: &[&str],
) -> ClosureModel {
    let n = rng.gen_range(1..=max_points);
    let mut builder = SpaceGraphBuilder::new(true);
    for i in 0..n {
        builder.add_point(format!("x{i}")).unwrap();
    }
    if n > 1 {
        for _ in 0..rng.gen_range(0..=max_edges) {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                builder.add_edge_by_index(a, b).unwrap();
            }
        }
    }
    let space = builder.build();
    let mut valuation = BTreeMap::new();
    for name in props {
        let members = (0..n).filter(|_| rng.gen_ratio(1, 3));
        let set = crate::bitset::PointSet::from_indices(n, members);
        valuation.insert(name.to_string(), set);
    }
    ClosureModel::new(space, valuation).unwrap()
}
