//! Seeded random Markov maps.
//!
//! The branch is cut into a grid of `M` equal pieces. Every grid point maps
//! to a grid point of some branch or to a line point with the same
//! denominator, and the attachment maps into the line. Vertex endpoints
//! therefore map to grid heights, so the map is Markov, and the line
//! region never climbs a branch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pamap::PAMap;
use crate::rational::{int, rat, Rational};
use crate::space::Point;

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Inclusive range of the branch grid size `M`.
    pub grid: (i64, i64),
    /// Inclusive range of copies hit by branch images.
    pub copies: (i64, i64),
    /// Inclusive range of the line translation `k0`.
    pub line_shift: (i64, i64),
    /// Largest bump of the line map.
    pub bump: i64,
    /// Probability that a grid point maps to the line.
    pub line_image: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            grid: (3, 6),
            copies: (-1, 2),
            line_shift: (-1, 1),
            bump: 2,
            line_image: 0.25,
        }
    }
}

/// A random Markov map. The line map is a translation by `k0`, or has one
/// bump of height `j` at the middle of the period, so the line rotation
/// interval is `[k0, k0]`, `[k0, k0 + j]` or `[k0 - j, k0]`.
pub fn random_markov_map<R: Rng>(rng: &mut R, cfg: &GenConfig) -> PAMap {
    let c = if rng.gen_bool(0.25) { rat(1, 2) } else { Rational::default() };
    let k0 = rng.gen_range(cfg.line_shift.0..=cfg.line_shift.1);
    let base = &c + int(k0);
    let mut line = vec![(c.clone(), Point::Line(base.clone()))];
    match rng.gen_range(0..3) {
        0 => {}
        kind => {
            let j = rng.gen_range(1..=cfg.bump);
            let j = if kind == 1 { j } else { -j };
            line.push((&c + rat(1, 2), Point::Line(&base + rat(1, 2) + int(j))));
        }
    }
    line.push((&c + int(1), Point::Line(&base + int(1))));

    let m = rng.gen_range(cfg.grid.0..=cfg.grid.1);
    let mut branch = vec![(Rational::default(), Point::Line(base))];
    for k in 1..=m {
        let j = rng.gen_range(cfg.copies.0..=cfg.copies.1);
        let image = if rng.gen_bool(cfg.line_image) {
            Point::Line(int(j) + &c + rat(rng.gen_range(0..m), m))
        } else {
            Point::Branch {
                copy: j,
                height: rat(rng.gen_range(1..=m), m),
            }
        };
        branch.push((rat(k, m), image));
    }
    PAMap::new(c, line, branch).expect("generated maps are valid")
}

/// `random_markov_map` with a ChaCha generator seeded by `seed`.
pub fn seeded_markov_map(seed: u64, cfg: &GenConfig) -> PAMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_markov_map(&mut rng, cfg)
}
