//! Bundled example maps.

use crate::mapfile::parse_map;
use crate::pamap::PAMap;

/// Text of the bundled example map.
pub const SIGMA_EXAMPLE: &str = include_str!("../fixtures/sigma_example.map");

/// The bundled example map: identity on the line, slope-4 Markov on the branch.
pub fn sigma_example() -> PAMap {
    parse_map(SIGMA_EXAMPLE).expect("bundled fixture parses")
}
