#![allow(dead_code)]

use sigmarot::gen::{seeded_markov_map, GenConfig};
use sigmarot::mapfile::parse_map;
use sigmarot::PAMap;

/// Identity on the line. The branch has a fixed piece near the bottom, a
/// single point passing through the copy-1 attachment, a fold over copy 2
/// and a piece climbing copy 3 halfway.
pub const TWO_COMPONENTS: &str = "\
attach = 0
line:
  0 -> L 0
  1 -> L 1
branch:
  0 -> L 0
  1/8 -> B 0 1/8
  1/4 -> L 0
  3/8 -> L 2
  1/2 -> B 2 1
  5/8 -> L 2
  3/4 -> L 3
  7/8 -> B 3 5/8
  1 -> L 3
";

/// Two vertices: the attachment, fixed, and the top half, which climbs one
/// copy up onto itself.
pub const TWO_VERTEX: &str = "\
attach = 0
line:
  0 -> L 0
  1 -> L 1
branch:
  0 -> L 0
  1/2 -> L 1
  1 -> B 1 1
";

pub fn map(text: &str) -> PAMap {
    parse_map(text).expect("valid test map")
}

/// The randomized corpus shared by the suites.
pub fn random_maps(count: u64, offset: u64) -> Vec<(u64, PAMap)> {
    let cfg = GenConfig::default();
    (offset..offset + count).map(|s| (s, seeded_markov_map(s, &cfg))).collect()
}
