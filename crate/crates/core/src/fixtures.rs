//! Bundled fixture model, demo properties, and the golden expectations the
//! test suites check against.

use serde::{Deserialize, Serialize};

use crate::model::ClosureModel;

/// Line-oriented model file for the bundled mini-city fixture.
pub const MINI_CITY_MODEL: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/mini-city.model"));

/// Golden expectations for [`MINI_CITY_MODEL`], frozen from the brute-force
/// oracle. Regenerate with `REGEN_GOLDEN=1 cargo test -p spacecheck-core
/// --test golden_mini_city`.
pub const MINI_CITY_GOLDEN: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../fixtures/golden_mini_city.json"
));

/// Reachability goal over the mini-city: a bike can reach the main square
/// through non-bridge points, where bus stops on the way count only when
/// another bike is parked there.
pub const BIKE_REACH_MAIN_SQUARE: &str = "bike R(!bridge | (bus_stop & bike)) main_square";

/// Demo properties over synthesized city models (see
/// [`crate::ingest::synth_model`]); `taxi` is the dynamic presence
/// proposition.
pub const TAXI_REACH_STORE: &str = "taxi R(!HEALTHHOSPITAL | ((TRANSPORTSUBWAY | TRANSPORTBUSSTOP) & taxi)) DEPARTMENTSTORE";
pub const TAXI_VICINITY: &str =
    "taxi & N2 (ACCOMMOHOTEL | HEALTHHOSPITAL) & N (FOODRESTAURANT)";
pub const TAXI_TOURIST_CORRIDOR: &str =
    "taxi & N2 (TOURISTATTRACTION & TRANSPORTSUBWAY) T TOURISTZOO";

/// Resolves the well-known property names accepted wherever a formula is
/// expected (`p1`..`p3` for the taxi demos, `bike_reach` for the mini-city).
pub fn named_formula(name: &str) -> Option<&'static str> {
    match name {
        "p1" | "P1" => Some(TAXI_REACH_STORE),
        "p2" | "P2" => Some(TAXI_VICINITY),
        "p3" | "P3" => Some(TAXI_TOURIST_CORRIDOR),
        "bike_reach" => Some(BIKE_REACH_MAIN_SQUARE),
        _ => None,
    }
}

/// The bundled mini-city model.
pub fn mini_city() -> ClosureModel {
    ClosureModel::parse(MINI_CITY_MODEL).expect("bundled fixture parses")
}

/// One frozen scenario: bikes at the listed points, expected verdict and
/// satisfaction set for [`BIKE_REACH_MAIN_SQUARE`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenScenario {
    pub name: String,
    pub bikes: Vec<String>,
    pub satisfied: bool,
    pub points: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenFile {
    pub model_version: String,
    pub formula: String,
    pub scenarios: Vec<GoldenScenario>,
}

impl GoldenFile {
    pub fn bundled() -> Self {
        serde_json::from_str(MINI_CITY_GOLDEN).expect("bundled golden file parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_parses_with_expected_shape() {
        let m = mini_city();
        assert_eq!(m.space().len(), 8);
        assert_eq!(m.space().relation_size(), 16);
        assert_eq!(m.proposition("bridge").count(), 2);
        assert_eq!(m.proposition("bus_stop").count(), 2);
        assert!(m.proposition("bike").is_empty());
    }

    #[test]
    fn fixture_version_is_stable() {
        // reparsing the same text must reproduce the same version, and the
        // version is pinned by the golden file
        let a = mini_city();
        let b = ClosureModel::parse(MINI_CITY_MODEL).unwrap();
        assert_eq!(a.version(), b.version());
        assert_eq!(a.version(), GoldenFile::bundled().model_version);
    }

    #[test]
    fn named_formulas_parse() {
        for name in ["p1", "p2", "p3", "bike_reach"] {
            let text = named_formula(name).unwrap();
            crate::slcs::parse(text).unwrap();
        }
        assert!(named_formula("nope").is_none());
    }
}
