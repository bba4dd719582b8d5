mod common;

use proptest::prelude::*;

use sigmarot::covering::{chain_fixed_point, check_step};
use sigmarot::cycles::{cycle_mean_range, cyclic_components};
use sigmarot::dynamics::{compute_reach, partition_xf, rho_bounds, verify_partition, Region};
use sigmarot::gen::{seeded_markov_map, GenConfig};
use sigmarot::oracle::simple_cycle_extremes;
use sigmarot::pamap::PowerShift;
use sigmarot::par::Execution;
use sigmarot::rational::{int, one, rat};
use sigmarot::rotset::{forward_cut, MarkovSystem};
use sigmarot::{PAMap, Point};

fn random_map(seed: u64) -> PAMap {
    seeded_markov_map(seed, &GenConfig::default())
}

fn point(m: &PAMap, on_line: bool, copy: i64, num: i64, den: i64) -> Point {
    let s = rat(num.rem_euclid(den + 1), den);
    if on_line {
        Point::Line(int(copy) + s)
    } else {
        m.sigma().branch_point(copy, s)
    }
}

/// A random walk in the graph that returns to its first vertex, if one
/// turns up within `picks.len()` steps.
fn closed_walk(sys: &MarkovSystem, start: usize, picks: &[usize]) -> Option<Vec<usize>> {
    let g = &sys.graph;
    let mut v = start;
    let mut walk = Vec::new();
    for &k in picks {
        let out: Vec<usize> = g.out_edges(v).collect();
        if out.is_empty() {
            return None;
        }
        let e = out[k % out.len()];
        walk.push(e);
        v = g.edges[e].to;
        if v == start {
            return Some(walk);
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_one_commutes_with_translation(
        seed in 0u64..500, on_line: bool, copy in -3i64..3, num in 0i64..64, den in 1i64..64,
        k in -5i64..5, n in 1usize..6,
    ) {
        let m = random_map(seed);
        let x = point(&m, on_line, copy, num, den);
        prop_assert_eq!(m.iterate(&x.translate(k), n), m.iterate(&x, n).translate(k));
    }

    #[test]
    fn rho_translation_laws(seed in 0u64..500, on_line: bool, num in 0i64..32, den in 1i64..32, k in -4i64..4) {
        let m = random_map(seed);
        let x = point(&m, on_line, 0, num, den);
        let a = rho_bounds(&m, &x, 300);
        prop_assert_eq!(&rho_bounds(&m, &x.translate(k), 300), &a);
        let b = rho_bounds(&m.shifted(k), &x, 300);
        prop_assert_eq!(b.lower, &a.lower + int(k));
        prop_assert_eq!(b.upper, &a.upper + int(k));
        prop_assert_eq!(b.exact, a.exact);
    }

    #[test]
    fn rho_power_law(seed in 0u64..500, on_line: bool, num in 0i64..32, den in 1i64..32, n in 1usize..4, p in -3i64..3) {
        let m = random_map(seed);
        let x = point(&m, on_line, 0, num, den);
        let r = rho_bounds(&m, &x, 400);
        prop_assume!(r.exact);
        let g = PowerShift { map: &m, power: n, shift: -p };
        let rg = rho_bounds(&g, &x, 400);
        prop_assert!(rg.exact);
        prop_assert_eq!(rg.lower, &r.lower * int(n as i64) - int(p));
    }

    #[test]
    fn partition_matches_sampling(seed in 0u64..500, num in 0i64..10_000) {
        let m = random_map(seed);
        let reach = compute_reach(&m, 64);
        let part = partition_xf(&m, &reach).unwrap();
        prop_assert!(verify_partition(&m, &part).is_empty());
        let region = Region::new(&m, &reach);
        let s = &reach.height + (one() - &reach.height) * rat(num, 10_000);
        let y = m.evaluate(&m.sigma().branch_point(0, s.clone()));
        if let Some((j, _)) = region.coords(&y) {
            let i = part.locate(&s);
            prop_assert!(i.is_some(), "height {} maps into copy {} but lies in no piece", s, j);
            prop_assert_eq!(part.displacements[i.unwrap()], j);
        }
    }

    #[test]
    fn line_region_absorbs(seed in 0u64..500, num in 0i64..64, den in 1i64..64) {
        let m = random_map(seed);
        let reach = compute_reach(&m, 64);
        prop_assert!(reach.exact);
        prop_assert!(reach.height <= one());
        let s = &reach.height * rat(num.rem_euclid(den + 1), den);
        let y = m.evaluate(&m.sigma().branch_point(0, s));
        prop_assert!(m.sigma().height(&y) <= reach.height);
        let z = m.evaluate(&Point::Line(rat(num, den)));
        prop_assert!(m.sigma().height(&z) <= reach.height);
    }

    #[test]
    fn forward_cut_is_monotone(seed in 0u64..500, a in 0i64..=16, b in 0i64..=16) {
        let sys = MarkovSystem::build(random_map(seed), 64).unwrap();
        let h = sys.reach.height.clone();
        let at = |k: i64| &h + (one() - &h) * rat(k, 16);
        let (lo, hi) = (a.min(b), a.max(b));
        let (c_lo, e1) = forward_cut(&sys, &at(lo), 64);
        let (c_hi, e2) = forward_cut(&sys, &at(hi), 64);
        prop_assert!(e1 && e2);
        prop_assert!(c_lo >= at(lo));
        prop_assert!(c_lo <= c_hi);
    }

    #[test]
    fn karp_agrees_with_enumeration(seed in 0u64..2_000) {
        let sys = MarkovSystem::build(random_map(seed), 64).unwrap();
        let g = &sys.graph;
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ranges = cycle_mean_range(g, None, exec);
            prop_assert_eq!(ranges.len(), cyclic_components(g, None).len());
            for r in ranges {
                prop_assume!(r.vertices.len() <= 12);
                let (lo, hi) = simple_cycle_extremes(g, &r.vertices).unwrap();
                prop_assert_eq!(&r.min, &lo);
                prop_assert_eq!(&r.max, &hi);
            }
        }
    }

    #[test]
    fn chain_additivity(seed in 0u64..500, start in 0usize..64, picks in prop::collection::vec(0usize..16, 2..12), cut in 0usize..12) {
        let sys = MarkovSystem::build(random_map(seed), 64).unwrap();
        let g = &sys.graph;
        prop_assume!(!g.is_empty());
        let mut v = start % g.len();
        let mut walk = Vec::new();
        for &k in &picks {
            let out: Vec<usize> = g.out_edges(v).collect();
            if out.is_empty() {
                break;
            }
            let e = out[k % out.len()];
            walk.push(e);
            v = g.edges[e].to;
        }
        prop_assume!(walk.len() >= 2);
        let k = 1 + cut % (walk.len() - 1);
        let a = sys.chain_of_walk(&walk[..k]).unwrap();
        let b = sys.chain_of_walk(&walk[k..]).unwrap();
        let ab = a.concat(&b).unwrap();
        prop_assert_eq!(&ab, &sys.chain_of_walk(&walk).unwrap());
        prop_assert_eq!(ab.length(), a.length() + b.length());
        prop_assert_eq!(ab.weight(), a.weight() + b.weight());
        let t = ab.translate(3);
        prop_assert_eq!((t.length(), t.weight()), (ab.length(), ab.weight()));
        for s in ab.steps() {
            prop_assert!(check_step(&sys.map, &sys.region, s));
        }
    }

    #[test]
    fn closed_chains_have_periodic_points(seed in 0u64..500, start in 0usize..64, picks in prop::collection::vec(0usize..16, 1..10), power in 1usize..3) {
        let sys = MarkovSystem::build(random_map(seed), 64).unwrap();
        prop_assume!(!sys.graph.is_empty());
        let walk = closed_walk(&sys, start % sys.graph.len(), &picks);
        prop_assume!(walk.is_some());
        let c = sys.chain_of_walk(&walk.unwrap()).unwrap().power(power).unwrap();
        prop_assert_eq!(c.weight() % power as i64, 0);
        let fp = chain_fixed_point(&sys.map, &sys.region, &c).unwrap();
        prop_assert!(fp.exact);
        prop_assert_eq!(fp.period, c.length());
        prop_assert_eq!(fp.shift, c.weight());
        prop_assert_eq!(sys.map.iterate(&fp.point, fp.period), fp.point.translate(fp.shift));
        let mut y = fp.point.clone();
        for s in c.steps() {
            y = sys.map.iterate(&y, s.power);
            let (j, h) = sys.region.coords(&y).expect("stage point in the branch region");
            prop_assert_eq!(j, s.target.copy);
            prop_assert!(s.target.contains_height(&h));
        }
    }
}

#[test]
fn partition_left_ends_map_to_the_bottom() {
    for (_, m) in common::random_maps(40, 0) {
        let part = partition_xf(&m, &compute_reach(&m, 64)).unwrap();
        for (x, p) in part.segments.iter().zip(&part.displacements) {
            let y = m.evaluate(&m.sigma().branch_point(0, x.lo.clone()));
            assert_eq!(y, m.sigma().branch_point(*p, part.h.clone()));
        }
    }
}
