//! Rotation sets: the interval carried by the line, the stage intervals
//! read off the Markov graph, and periodic points realizing rationals.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::circle::{envelope_rotations, line_periodic_point};
use crate::covering::{chain_fixed_point, horseshoe_schedule, Chain, CoverStep, Move};
use crate::cycles::{cycle_mean_range, local_edges, max_mean_cycle, min_mean_cycle, CycleRange};
use crate::dynamics::{compute_reach, partition_xf, rho_bounds, Partition, Reach, Region};
use crate::error::{Error, Result};
use crate::markov::{build_markov_graph, edge_step, markov_partition, MarkovGraph};
use crate::pamap::PAMap;
use crate::par::{self, Execution};
use crate::rational::{ceil_i64, fmt_signed, floor_i64, int, Rational};
use crate::space::{BranchSegment, Point};

/// Closed interval of rationals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Whether some integer lies in the interval.
    pub fn contains_integer(&self) -> bool {
        int(ceil_i64(&self.lo)) <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_signed(&self.lo), fmt_signed(&self.hi))
    }
}

/// Disjoint, sorted union of closed intervals.
pub fn merge(mut v: Vec<Interval>) -> Vec<Interval> {
    v.sort();
    let mut out: Vec<Interval> = Vec::new();
    for i in v {
        match out.last_mut() {
            Some(last) if i.lo <= last.hi => {
                if i.hi > last.hi {
                    last.hi = i.hi;
                }
            }
            _ => out.push(i),
        }
    }
    out
}

/// Tuning knobs shared by the rotation-set computations.
#[derive(Clone, Debug)]
pub struct RotConfig {
    pub reach_cap: usize,
    /// Largest period tried for the monotone envelopes.
    pub q_cap: usize,
    /// Iterations per orbit in sampled (approximate) modes.
    pub iters: usize,
    /// Orbits sampled in approximate modes.
    pub samples: usize,
    pub exec: Execution,
}

impl Default for RotConfig {
    fn default() -> Self {
        RotConfig {
            reach_cap: crate::dynamics::DEFAULT_REACH_CAP,
            q_cap: 64,
            iters: 2000,
            samples: 64,
            exec: Execution::default(),
        }
    }
}

/// Rotation interval of the line region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRotation {
    pub interval: Interval,
    pub exact: bool,
}

/// Rotation interval of the line region. Exact through the monotone
/// envelopes of `F|R` when the line is invariant; otherwise sampled.
pub fn rot_r(m: &PAMap, cfg: &RotConfig) -> LineRotation {
    if let Some((lo, hi)) = envelope_rotations(m, cfg.q_cap) {
        let exact = lo.exact && hi.exact;
        return LineRotation {
            interval: Interval::new(lo.lower, hi.upper),
            exact,
        };
    }
    let c = m.sigma().attach().clone();
    let n = cfg.samples.max(1) as i64;
    let pts: Vec<Point> = (0..n).map(|k| Point::Line(&c + Rational::new(k.into(), n.into()))).collect();
    let b = par::map(cfg.exec, &pts, |p| rho_bounds(m, p, cfg.iters));
    let lo = b.iter().map(|r| r.lower.clone()).min().unwrap_or_default();
    let hi = b.iter().map(|r| r.upper.clone()).max().unwrap_or_default();
    LineRotation {
        interval: Interval::new(lo, hi),
        exact: false,
    }
}

/// A map with an exact Markov partition of its branch region.
#[derive(Clone, Debug)]
pub struct MarkovSystem {
    pub map: PAMap,
    pub reach: Reach,
    pub region: Region,
    pub partition: Partition,
    pub graph: MarkovGraph,
    /// Covering behind each edge, source on copy 0.
    pub steps: Vec<CoverStep>,
}

impl MarkovSystem {
    pub fn build(map: PAMap, reach_cap: usize) -> Result<Self> {
        let reach = compute_reach(&map, reach_cap);
        if !reach.exact {
            return Err(Error::InexactReach { cap: reach_cap });
        }
        let partition = partition_xf(&map, &reach)?;
        let vertices = markov_partition(&map, &partition).map_err(Error::NotMarkov)?;
        let graph = build_markov_graph(&map, &partition, vertices);
        let region = Region::new(&map, &reach);
        let steps = graph
            .edges
            .iter()
            .map(|e| edge_step(&map, &region, &graph, e))
            .collect();
        Ok(MarkovSystem {
            map,
            reach,
            region,
            partition,
            graph,
            steps,
        })
    }

    /// Chain following a walk of edges, starting on copy 0.
    pub fn chain_of_walk(&self, walk: &[usize]) -> Result<Chain> {
        let mut offset = 0;
        let mut steps = Vec::with_capacity(walk.len());
        for &e in walk {
            let s = self.steps[e].translate(offset);
            offset = s.target.copy;
            steps.push(s);
        }
        Chain::new(steps)
    }

    /// Net weight of a walk.
    pub fn walk_weight(&self, walk: &[usize]) -> i64 {
        walk.iter().map(|&e| self.graph.edges[e].weight).sum()
    }
}

/// One stage of the nested decomposition.
#[derive(Clone, Debug)]
pub struct Stage {
    /// 1-based index `i` of `X_i`.
    pub index: usize,
    pub displacement: i64,
    /// Top of the invariant region swept out before this stage.
    pub cut: Rational,
    pub cut_exact: bool,
    /// Vertices above the cut.
    pub kept: Vec<bool>,
    /// Components of the kept graph reachable from `X_i`.
    pub ranges: Vec<CycleRange>,
    pub components: Vec<Interval>,
}

impl Stage {
    pub fn interval(&self) -> Option<Interval> {
        let lo = self.components.first()?.lo.clone();
        let hi = self.components.last()?.hi.clone();
        Some(Interval::new(lo, hi))
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }
}

/// Largest height reached by the forward orbit of `[h, start]`.
pub fn forward_cut(sys: &MarkovSystem, start: &Rational, cap: usize) -> (Rational, bool) {
    let sigma = sys.map.sigma();
    let h = &sys.reach.height;
    let mut s = start.clone();
    for _ in 0..cap {
        let seg = BranchSegment {
            copy: 0,
            lo: h.clone(),
            hi: s.clone(),
        };
        let top = sys
            .map
            .image_of_segment(&seg)
            .iter()
            .flat_map(|(a, b)| [sigma.height(a), sigma.height(b)])
            .max()
            .unwrap_or_default();
        if top <= s {
            return (s, true);
        }
        s = top;
    }
    (s, false)
}

pub fn stages(sys: &MarkovSystem, cfg: &RotConfig) -> Result<Vec<Stage>> {
    let g = &sys.graph;
    let mut out: Vec<Stage> = Vec::new();
    let mut cut = sys.reach.height.clone();
    let mut cut_exact = true;
    for i in 0..sys.partition.len() {
        if i > 0 {
            let prev = &sys.partition.segments[i - 1];
            let start = cut.clone().max(prev.hi.clone());
            let (c, ok) = forward_cut(sys, &start, cfg.reach_cap);
            cut = c;
            cut_exact &= ok;
        }
        if let Some(v) = g
            .vertices
            .iter()
            .find(|v| v.segment.lo < cut && cut < v.segment.hi)
        {
            return Err(Error::Stage(format!(
                "cut {cut} of stage {} falls inside vertex {}",
                i + 1,
                v.segment
            )));
        }
        let kept: Vec<bool> = g.vertices.iter().map(|v| v.segment.hi > cut).collect();
        let mut seen = vec![false; g.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (v, vx) in g.vertices.iter().enumerate() {
            if vx.part == i && kept[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for e in g.out_edges(v) {
                let w = g.edges[e].to;
                if kept[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let ranges: Vec<CycleRange> = cycle_mean_range(g, Some(&kept), cfg.exec)
            .into_iter()
            .filter(|r| r.vertices.iter().any(|&v| seen[v]))
            .collect();
        let components = merge(
            ranges
                .iter()
                .map(|r| Interval::new(r.min.clone(), r.max.clone()))
                .collect(),
        );
        out.push(Stage {
            index: i + 1,
            displacement: sys.partition.displacements[i],
            cut: cut.clone(),
            cut_exact,
            kept,
            ranges,
            components,
        });
    }
    Ok(out)
}

/// Where an interval of the rotation set comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Line,
    Stage(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledInterval {
    pub source: Source,
    pub interval: Interval,
}

impl LabeledInterval {
    pub fn label(&self) -> String {
        match self.source {
            Source::Line => "I0".into(),
            Source::Stage(i) => format!("I{i}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RotationSet {
    pub line: LineRotation,
    pub stages: Vec<Stage>,
    pub labeled: Vec<LabeledInterval>,
    /// Connected components of the union, sorted.
    pub components: Vec<Interval>,
    pub exact: bool,
}

impl RotationSet {
    pub fn contains(&self, x: &Rational) -> bool {
        self.components.iter().any(|c| c.contains(x))
    }
}

/// `Rot(F)` as the union of the line interval and the stage intervals.
pub fn rotation_set(sys: &MarkovSystem, cfg: &RotConfig) -> Result<RotationSet> {
    let line = rot_r(&sys.map, cfg);
    let st = stages(sys, cfg)?;
    let mut labeled = vec![LabeledInterval {
        source: Source::Line,
        interval: line.interval.clone(),
    }];
    let mut exact = line.exact;
    for s in &st {
        exact &= s.cut_exact;
        if let Some(iv) = s.interval() {
            labeled.push(LabeledInterval {
                source: Source::Stage(s.index),
                interval: iv,
            });
        }
    }
    let components = merge(labeled.iter().map(|l| l.interval.clone()).collect());
    Ok(RotationSet {
        line,
        stages: st,
        labeled,
        components,
        exact,
    })
}

/// Union of the line interval and every cycle-mean range of the full graph.
pub fn full_graph_union(sys: &MarkovSystem, line: &LineRotation, exec: Execution) -> Vec<Interval> {
    let mut v: Vec<Interval> = cycle_mean_range(&sys.graph, None, exec)
        .into_iter()
        .map(|r| Interval::new(r.min, r.max))
        .collect();
    v.push(line.interval.clone());
    merge(v)
}

/// Rotation set estimated from sampled orbits, for maps without an exact
/// Markov structure.
pub fn approximate_rotation_set(m: &PAMap, reach: &Reach, cfg: &RotConfig) -> RotationSet {
    let line = rot_r(m, cfg);
    let h = &reach.height;
    let n = cfg.samples.max(1) as i64;
    let sigma = m.sigma();
    let pts: Vec<Point> = (0..n)
        .map(|k| {
            let t = Rational::new((2 * k + 1).into(), (2 * n).into());
            sigma.branch_point(0, h + (Rational::one() - h) * t)
        })
        .collect();
    let b = par::map(cfg.exec, &pts, |p| rho_bounds(m, p, cfg.iters));
    let mut labeled = vec![LabeledInterval {
        source: Source::Line,
        interval: line.interval.clone(),
    }];
    if let (Some(lo), Some(hi)) = (
        b.iter().map(|r| r.lower.clone()).min(),
        b.iter().map(|r| r.upper.clone()).max(),
    ) {
        labeled.push(LabeledInterval {
            source: Source::Stage(1),
            interval: Interval::new(lo, hi),
        });
    }
    let hull = merge(labeled.iter().map(|l| l.interval.clone()).collect());
    let components = match (hull.first(), hull.last()) {
        (Some(a), Some(z)) => vec![Interval::new(a.lo.clone(), z.hi.clone())],
        _ => Vec::new(),
    };
    RotationSet {
        line,
        stages: Vec::new(),
        labeled,
        components,
        exact: false,
    }
}

/// Reduced rationals `p/q` with `q <= max_den` lying in the set.
pub fn rationals_in(components: &[Interval], max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for c in components {
        for q in 1..=max_den {
            let qq = int(q);
            let p0 = ceil_i64(&(&c.lo * &qq));
            let p1 = floor_i64(&(&c.hi * &qq));
            for p in p0..=p1 {
                if p.gcd(&q) == 1 {
                    out.push(Rational::new(p.into(), q.into()));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// How a periodic point was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Fixed point of `F^q - p` on the invariant line.
    Line,
    /// A Markov cycle whose mean is exactly `p/q`.
    Cycle,
    /// Horseshoe chain between two loops of a component.
    Horseshoe,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub rho: Rational,
    pub point: Point,
    /// `F^period(point) = point + shift`.
    pub period: usize,
    pub shift: i64,
    pub route: Route,
}

fn reduce(p: i64, q: i64) -> (i64, i64) {
    let g = p.gcd(&q).max(1);
    let (p, q) = (p / g, q / g);
    if q < 0 {
        (-p, -q)
    } else {
        (p, q)
    }
}

fn bfs_path(g: &MarkovGraph, comp: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
    if from == to {
        return Some(Vec::new());
    }
    let inside = |v: usize| comp.binary_search(&v).is_ok();
    let mut prev: Vec<Option<usize>> = vec![None; g.len()];
    let mut seen = vec![false; g.len()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for e in g.out_edges(v) {
            let w = g.edges[e].to;
            if inside(w) && !seen[w] {
                seen[w] = true;
                prev[w] = Some(e);
                if w == to {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while let Some(e) = prev[cur] {
                        path.push(e);
                        cur = g.edges[e].from;
                    }
                    path.reverse();
                    return Some(path);
                }
                q.push_back(w);
            }
        }
    }
    None
}

/// Weights of walks from a base vertex, layer by layer: `layers[k][u]`
/// holds the weights of walks `v -> u` of length `k` inside `comp`.
struct WalkTable {
    comp: Vec<usize>,
    local: Vec<(usize, usize, i128)>,
    layers: Vec<Vec<BTreeSet<i64>>>,
}

impl WalkTable {
    fn new(g: &MarkovGraph, comp: &[usize], v: usize) -> Self {
        let (local, _) = local_edges(g, comp, |w| w as i128);
        let mut first = vec![BTreeSet::new(); comp.len()];
        first[v].insert(0i64);
        WalkTable {
            comp: comp.to_vec(),
            local,
            layers: vec![first],
        }
    }

    fn grow(&mut self) {
        let last = self.layers.last().expect("base layer");
        let mut next = vec![BTreeSet::new(); self.comp.len()];
        for &(a, b, w) in &self.local {
            for x in &last[a] {
                next[b].insert(x + w as i64);
            }
        }
        self.layers.push(next);
    }

    /// A walk `v -> v` of length `ell` and weight `w`, as global edge ids.
    fn walk(&self, g: &MarkovGraph, v: usize, ell: usize, w: i64) -> Vec<usize> {
        let idx = |x: usize| self.comp.binary_search(&x).ok();
        let mut out = Vec::with_capacity(ell);
        let (mut cur, mut cw) = (v, w);
        for k in (1..=ell).rev() {
            let e = g
                .edges
                .iter()
                .enumerate()
                .find(|(_, e)| {
                    idx(e.to) == Some(cur)
                        && idx(e.from).is_some_and(|a| self.layers[k - 1][a].contains(&(cw - e.weight)))
                })
                .map(|(i, _)| i)
                .expect("weight recorded in the table");
            out.push(e);
            cw -= g.edges[e].weight;
            cur = idx(g.edges[e].from).expect("inside component");
        }
        out.reverse();
        out
    }
}

/// Two loops at a common vertex of equal length `ell` whose weights
/// `a <= p ell / q <= b` are as close as the table allows, minimizing the
/// length of the resulting horseshoe chain.
fn bracket_loops(sys: &MarkovSystem, range: &CycleRange, p: i64, q: i64) -> Option<(Vec<usize>, i64, Vec<usize>, i64, i64)> {
    let g = &sys.graph;
    let max_len = (2 * range.vertices.len() + 8).min(48);
    let mut tables: Vec<WalkTable> = (0..range.vertices.len())
        .map(|lv| WalkTable::new(g, &range.vertices, lv))
        .collect();
    // (cost, vertex, length, a, b); the chain is never shorter than `ell`
    let mut best: Option<(i64, usize, usize, i64, i64)> = None;
    for ell in 1..=max_len {
        if best.as_ref().is_some_and(|b| b.0 <= ell as i64) {
            break;
        }
        for (lv, table) in tables.iter_mut().enumerate() {
            table.grow();
            let ws = &table.layers[ell][lv];
            let target = p * ell as i64;
            let a = ws.range(..=Integer::div_floor(&target, &q)).next_back().copied();
            let b = ws.range(Integer::div_ceil(&target, &q)..).next().copied();
            let (Some(a), Some(b)) = (a, b) else { continue };
            let (_, qq) = reduce(target, q);
            let cost = if a * q == target || b * q == target {
                ell as i64
            } else {
                ell as i64 * (b - a) * qq
            };
            if best.as_ref().is_none_or(|x| cost < x.0) {
                best = Some((cost, lv, ell, a, b));
            }
        }
    }
    let (_, lv, ell, a, b) = best?;
    let table = &tables[lv];
    Some((table.walk(g, lv, ell, a), a, table.walk(g, lv, ell, b), b, ell as i64))
}

/// Two loops at a common vertex from the extreme cycles of `range`: the
/// minimum cycle, and a detour through enough turns of the maximum cycle.
fn extreme_loops(sys: &MarkovSystem, range: &CycleRange, p: i64, q: i64) -> Result<(Vec<usize>, i64, Vec<usize>, i64, i64)> {
    let g = &sys.graph;
    let c1 = &range.min_cycle;
    let c2 = &range.max_cycle;
    let v = g.edges[c1[0]].from;
    let u = g.edges[c2[0]].from;
    let miss = || Error::NotFound("component is not strongly connected".into());
    let p1 = bfs_path(g, &range.vertices, v, u).ok_or_else(miss)?;
    let p2 = bfs_path(g, &range.vertices, u, v).ok_or_else(miss)?;
    let (w1, l1) = (sys.walk_weight(c1), c1.len() as i64);
    let (w2, l2) = (sys.walk_weight(c2), c2.len() as i64);
    let (wc, lc) = (sys.walk_weight(&p1) + sys.walk_weight(&p2), (p1.len() + p2.len()) as i64);
    let den = w2 * q - p * l2;
    let num = p * lc - wc * q;
    let s = if num < 0 { 1 } else { num / den + 1 }.max(1);
    let mut omega2 = p1.clone();
    for _ in 0..s {
        omega2.extend_from_slice(c2);
    }
    omega2.extend_from_slice(&p2);
    let l2s = s * l2 + lc;
    let w2s = s * w2 + wc;
    let block1: Vec<usize> = c1.iter().copied().cycle().take((l1 * l2s) as usize).collect();
    let block2: Vec<usize> = omega2.iter().copied().cycle().take((l2s * l1) as usize).collect();
    Ok((block1, w1 * l2s, block2, w2s * l1, l1 * l2s))
}

/// Closed walk with mean `p/q` following the horseshoe schedule of two
/// loops at a common vertex.
fn horseshoe_walk(sys: &MarkovSystem, range: &CycleRange, p: i64, q: i64) -> Result<Vec<usize>> {
    let (block1, m1, block2, m2, ell) = match bracket_loops(sys, range, p, q) {
        Some(b) => b,
        None => extreme_loops(sys, range, p, q)?,
    };
    let (pp, qq) = reduce(p * ell, q);
    let mut walk = Vec::new();
    for mv in horseshoe_schedule(m1, m2, pp, qq)? {
        match mv {
            Move::II | Move::IJ => walk.extend_from_slice(&block1),
            Move::JJ | Move::JI => walk.extend_from_slice(&block2),
        }
    }
    Ok(walk)
}

/// A point of the branch region with `F^{kq}(x) = x + kp`, built from the
/// Markov graph. `region` restricts the vertices used.
pub fn find_periodic_mod1(sys: &MarkovSystem, p: i64, q: i64, region: Option<&BranchSegment>) -> Result<PeriodicPoint> {
    if q < 1 {
        return Err(Error::NotFound(format!("denominator {q} must be positive")));
    }
    let (p, q) = reduce(p, q);
    let r = Rational::new(p.into(), q.into());
    let keep: Option<Vec<bool>> = region.map(|seg| {
        sys.graph
            .vertices
            .iter()
            .map(|v| seg.lo <= v.segment.lo && v.segment.hi <= seg.hi)
            .collect()
    });
    let ranges = cycle_mean_range(&sys.graph, keep.as_deref(), Execution::Sequential);
    let range = ranges
        .iter()
        .find(|c| c.min <= r && r <= c.max)
        .ok_or_else(|| Error::NotFound(format!("{} is not a cycle mean of the Markov graph", fmt_signed(&r))))?;
    let (walk, route) = if r == range.min || r == range.max {
        let (local, ids) = local_edges(&sys.graph, &range.vertices, |w| w as i128 * q as i128 - p as i128);
        let n = range.vertices.len();
        let found = if r == range.min {
            min_mean_cycle(n, &local)
        } else {
            max_mean_cycle(n, &local)
        };
        let (mu, cyc) = found.ok_or_else(|| Error::NotFound("no cycle of the required mean".into()))?;
        if !mu.is_zero() {
            return Err(Error::Certificate(format!("transformed cycle mean {mu} is not zero")));
        }
        (cyc.into_iter().map(|i| ids[i]).collect::<Vec<_>>(), Route::Cycle)
    } else {
        (horseshoe_walk(sys, range, p, q)?, Route::Horseshoe)
    };
    let chain = sys.chain_of_walk(&walk)?;
    let fp = chain_fixed_point(&sys.map, &sys.region, &chain)?;
    if !fp.exact || fp.shift as i128 * q as i128 != p as i128 * fp.period as i128 {
        return Err(Error::Certificate(format!(
            "chain gives shift {} over {} iterates",
            fp.shift, fp.period
        )));
    }
    Ok(PeriodicPoint {
        rho: r,
        point: fp.point,
        period: fp.period,
        shift: fp.shift,
        route,
    })
}

/// A periodic point of rotation number `r`, from the Markov graph when
/// possible and otherwise from the invariant line.
pub fn periodic_point(m: &PAMap, sys: Option<&MarkovSystem>, line: &LineRotation, r: &Rational) -> Result<PeriodicPoint> {
    let p = crate::rational::as_i64(&(r * Rational::from_integer(r.denom().clone())))
        .ok_or_else(|| Error::NotFound(format!("{r} is too large")))?;
    let q = crate::rational::as_i64(&Rational::from_integer(r.denom().clone()))
        .ok_or_else(|| Error::NotFound(format!("{r} is too large")))?;
    let mut last = None;
    if let Some(sys) = sys {
        match find_periodic_mod1(sys, p, q, None) {
            Ok(pp) => return Ok(pp),
            Err(e) => last = Some(e),
        }
    }
    if line.interval.contains(r) {
        if let Some(pt) = line_periodic_point(m, p, q as usize) {
            return Ok(PeriodicPoint {
                rho: r.clone(),
                point: pt,
                period: q as usize,
                shift: p,
                route: Route::Line,
            });
        }
    }
    Err(last.unwrap_or_else(|| Error::NotFound(format!("no periodic point with rotation number {}", fmt_signed(r)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sigma_example;
    use crate::rational::{rat, zero};

    fn fixture() -> MarkovSystem {
        MarkovSystem::build(sigma_example(), 64).unwrap()
    }

    #[test]
    fn fixture_rotation_set() {
        let sys = fixture();
        let cfg = RotConfig::default();
        let rs = rotation_set(&sys, &cfg).unwrap();
        assert_eq!(rs.line.interval, Interval::point(zero()));
        assert!(rs.exact);
        let labels: Vec<String> = rs.labeled.iter().map(|l| format!("{} = {}", l.label(), l.interval)).collect();
        assert_eq!(labels, vec!["I0 = [0, 0]", "I1 = [0, +1]"]);
        assert_eq!(rs.components, vec![Interval::new(zero(), int(1))]);
        assert_eq!(full_graph_union(&sys, &rs.line, cfg.exec), rs.components);
        // stage 2 sits above the cut swept by stage 1 and is empty
        assert_eq!(rs.stages.len(), 2);
        assert!(rs.stages[1].interval().is_none());
    }

    #[test]
    fn fixture_periodic_points() {
        let sys = fixture();
        let one = find_periodic_mod1(&sys, 1, 1, None).unwrap();
        assert_eq!(one.point, Point::Branch { copy: 0, height: int(1) });
        let zero_pt = find_periodic_mod1(&sys, 0, 1, None).unwrap();
        assert_eq!(zero_pt.point, Point::Line(zero()));
        let half = find_periodic_mod1(&sys, 1, 2, None).unwrap();
        assert_eq!(half.route, Route::Horseshoe);
        assert_eq!((half.shift, half.period), (1, 2));
        assert_eq!(sys.map.iterate(&half.point, 2), half.point.translate(1));
        for (p, q) in [(1, 3), (2, 3), (3, 7), (5, 8)] {
            let pp = find_periodic_mod1(&sys, p, q, None).unwrap();
            let rb = rho_bounds(&sys.map, &pp.point, 10_000);
            assert!(rb.exact);
            assert_eq!(rb.lower, rat(p, q));
        }
        assert!(find_periodic_mod1(&sys, 3, 2, None).is_err());
    }

    #[test]
    fn rationals_listing() {
        let r = rationals_in(&[Interval::new(zero(), int(1))], 3);
        assert_eq!(r, vec![zero(), rat(1, 3), rat(1, 2), rat(2, 3), int(1)]);
    }
}
