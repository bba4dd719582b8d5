//! Orbits, displacement, the reach of the line region, the branch region
//! `X_F`, its partition into displacement classes, and itineraries.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pamap::{Degree1Map, PAMap};
use crate::rational::{int, Rational};
use crate::space::{BranchSegment, Point, Sigma};

pub const DEFAULT_REACH_CAP: usize = 64;

/// `r(F^n(p)) - r(p)`, where `r` retracts onto the line.
pub fn displacement<M: Degree1Map + ?Sized>(m: &M, p: &Point, n: usize) -> Rational {
    let mut q = p.clone();
    for _ in 0..n {
        q = m.apply(&q);
    }
    m.sigma().retract(&q) - m.sigma().retract(p)
}

/// Enclosure of the rotation number of one orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoBounds {
    pub lower: Rational,
    pub upper: Rational,
    pub exact: bool,
    pub iterations: usize,
    /// `(first index, period)` of the detected cycle modulo translations.
    pub cycle: Option<(usize, usize)>,
}

impl RhoBounds {
    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.then_some(&self.lower)
    }
}

/// Denominators above this many bits are rounded to a dyadic grid.
pub const ORBIT_BITS: u64 = 128;

/// Rounds `p` to a multiple of `2^-ORBIT_BITS/2` when its coordinate
/// carries more than `ORBIT_BITS` bits of denominator.
fn coarsen(sigma: &Sigma, p: &Point) -> Option<Point> {
    let big = |x: &Rational| x.denom().bits() > ORBIT_BITS;
    let round = |x: &Rational| {
        let scale = Rational::from_integer(BigInt::one() << (ORBIT_BITS / 2));
        (x * &scale).round() / scale
    };
    match p {
        Point::Line(x) if big(x) => Some(Point::Line(round(x))),
        Point::Branch { copy, height } if big(height) => {
            Some(sigma.branch_point(*copy, round(height).min(Rational::one())))
        }
        _ => None,
    }
}

/// Iterates up to `n` times. If the orbit returns to a translate of an
/// earlier point the rotation number is exact; otherwise the bounds are the
/// extremes of `d_k / k` over `k` in `[n/2, n]`. Orbits whose coordinates
/// outgrow `ORBIT_BITS` continue as rounded pseudo-orbits, and from then on
/// no cycle is claimed.
pub fn rho_bounds<M: Degree1Map + ?Sized>(m: &M, p: &Point, n: usize) -> RhoBounds {
    let sigma = m.sigma();
    let r0 = sigma.retract(p);
    let mut seen: HashMap<Point, (usize, i64)> = HashMap::new();
    let (q0, k0) = sigma.normalize(p);
    seen.insert(q0, (0, k0));
    let mut y = p.clone();
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    let start = (n / 2).max(1);
    let mut rounded = false;
    for i in 1..=n {
        y = m.apply(&y);
        if let Some(c) = coarsen(sigma, &y) {
            y = c;
            rounded = true;
        }
        if !rounded {
            let (q, k) = sigma.normalize(&y);
            if let Some(&(j, kj)) = seen.get(&q) {
                let rho = Rational::new((k - kj).into(), ((i - j) as i64).into());
                return RhoBounds {
                    lower: rho.clone(),
                    upper: rho,
                    exact: true,
                    iterations: i,
                    cycle: Some((j, i - j)),
                };
            }
            seen.insert(q, (i, k));
        }
        if i >= start {
            let v = (sigma.retract(&y) - &r0) / int(i as i64);
            if lower.as_ref().is_none_or(|l| &v < l) {
                lower = Some(v.clone());
            }
            if upper.as_ref().is_none_or(|u| &v > u) {
                upper = Some(v);
            }
        }
    }
    RhoBounds {
        lower: lower.unwrap_or_default(),
        upper: upper.unwrap_or_default(),
        exact: false,
        iterations: n,
        cycle: None,
    }
}

/// Height of the branch part of the line region `T_R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reach {
    pub height: Rational,
    pub exact: bool,
    /// Number of growth steps before the height stabilized.
    pub rounds: usize,
}

/// Smallest invariant connected set containing the line: grows the branch
/// height `h` by images of the line and of `[0, h]` until it stabilizes.
pub fn compute_reach(m: &PAMap, cap: usize) -> Reach {
    let sigma = m.sigma();
    let line_max = m
        .line_breaks()
        .iter()
        .map(|b| sigma.height(&b.image))
        .max()
        .unwrap_or_default();
    let mut h = Rational::zero();
    let mut rounds = 0;
    for _ in 0..cap {
        let mut next = h.clone().max(line_max.clone());
        for b in m.branch_breaks() {
            if b.at <= h {
                next = next.max(sigma.height(&b.image));
            }
        }
        next = next.max(sigma.height(&m.evaluate(&sigma.branch_point(0, h.clone()))));
        if next == h {
            return Reach {
                height: h,
                exact: true,
                rounds,
            };
        }
        h = next;
        rounds += 1;
    }
    Reach {
        height: h,
        exact: false,
        rounds,
    }
}

/// `X_F = [h, 1]` on copy 0, or `None` when the line region fills the branch.
pub fn compute_xf(reach: &Reach) -> Option<BranchSegment> {
    (reach.height < Rational::one()).then(|| BranchSegment {
        copy: 0,
        lo: reach.height.clone(),
        hi: Rational::one(),
    })
}

/// Whether `T_R` is invariant and meets `X_F` in a single point. With a
/// single branch per integer this reduces to the reach being exact and the
/// images of `T_R` staying below `h` on every branch.
pub fn is_sigma_like(m: &PAMap, reach: &Reach) -> bool {
    if !reach.exact {
        return false;
    }
    let sigma = m.sigma();
    let h = &reach.height;
    let line_ok = m.line_breaks().iter().all(|b| &sigma.height(&b.image) <= h);
    let seg = BranchSegment {
        copy: 0,
        lo: Rational::zero(),
        hi: h.clone(),
    };
    let branch_ok = m
        .image_of_segment(&seg)
        .iter()
        .all(|(a, b)| &sigma.height(a) <= h && &sigma.height(b) <= h);
    line_ok && branch_ok
}

/// Membership test for translates of the branch region.
#[derive(Clone, Debug)]
pub struct Region {
    pub sigma: Sigma,
    pub h: Rational,
}

impl Region {
    pub fn new(m: &PAMap, reach: &Reach) -> Self {
        Region {
            sigma: m.sigma().clone(),
            h: reach.height.clone(),
        }
    }

    /// `(j, s)` when `p` is the point of `X_F + j` at height `s`.
    pub fn coords(&self, p: &Point) -> Option<(i64, Rational)> {
        self.sigma
            .branch_coords(p)
            .filter(|(_, s)| s >= &self.h)
    }

    /// Height of the retraction of `p` onto `X_F + copy`.
    pub fn retracted_height(&self, p: &Point, copy: i64) -> Rational {
        match self.coords(p) {
            Some((j, s)) if j == copy => s,
            _ => self.h.clone(),
        }
    }
}

/// Parameter windows of a branch segment whose images meet `X_F + copy`.
#[derive(Clone, Debug)]
pub(crate) struct Window {
    pub copy: i64,
    /// Hull of heights mapping to height `>= h`.
    pub closed: (Rational, Rational),
    /// Closure of heights mapping to height `> h`.
    pub open: Option<(Rational, Rational)>,
}

pub(crate) fn windows(m: &PAMap, region: &Region, lo: &Rational, hi: &Rational) -> Vec<Window> {
    let sigma = m.sigma();
    let h = &region.h;
    let mut out = Vec::new();
    let seg = BranchSegment {
        copy: 0,
        lo: lo.clone(),
        hi: hi.clone(),
    };
    for piece in m.pieces(&seg, 1) {
        let g = sigma.geodesic(&piece.start, &piece.end);
        let len = g.length();
        let (a, b) = &piece.dom;
        let to_dom = |d: &Rational| {
            if len.is_zero() {
                a.clone()
            } else {
                a + (b - a) * d / &len
            }
        };
        let to_dom_hi = |d: &Rational| {
            if len.is_zero() {
                b.clone()
            } else {
                a + (b - a) * d / &len
            }
        };
        let mut copies: Vec<i64> = Vec::new();
        for p in [&piece.start, &piece.end] {
            if let Some((j, _)) = sigma.branch_coords(p) {
                copies.push(j);
            }
        }
        for leg in &g.legs {
            match leg {
                crate::space::Leg::Branch { copy, .. } => copies.push(*copy),
                crate::space::Leg::Line { from, to } if h.is_zero() => {
                    let (x, y) = if from <= to { (from, to) } else { (to, from) };
                    let c = sigma.attach();
                    let j0 = crate::rational::ceil_i64(&(x - c));
                    let j1 = crate::rational::floor_i64(&(y - c));
                    copies.extend(j0..=j1);
                }
                _ => {}
            }
        }
        copies.sort_unstable();
        copies.dedup();
        for j in copies {
            if let Some((d0, d1)) = g.copy_window(sigma, j, h, false) {
                let open = g
                    .copy_window(sigma, j, h, true)
                    .map(|(e0, e1)| (to_dom(&e0), to_dom_hi(&e1)));
                out.push(Window {
                    copy: j,
                    closed: (to_dom(&d0), to_dom_hi(&d1)),
                    open,
                });
            }
        }
    }
    out
}

/// The partition `X_1 < X_2 < ... < X_N` of the part of `X_F` that returns
/// to `X_F + Z`, with displacements `p_i` (`F(X_i)` lies in `X_F + p_i` up to
/// excursions into the line region).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub h: Rational,
    pub segments: Vec<BranchSegment>,
    pub displacements: Vec<i64>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Index (0-based) of the piece containing height `s`.
    pub fn locate(&self, s: &Rational) -> Option<usize> {
        self.segments.iter().position(|x| x.contains_height(s))
    }
}

pub fn partition_xf(m: &PAMap, reach: &Reach) -> Result<Partition> {
    if !reach.exact {
        return Err(Error::InexactReach {
            cap: reach.rounds,
        });
    }
    let region = Region::new(m, reach);
    let h = reach.height.clone();
    let mut part = Partition {
        h: h.clone(),
        segments: Vec::new(),
        displacements: Vec::new(),
    };
    if h >= Rational::one() {
        return Ok(part);
    }
    let ws = windows(m, &region, &h, &Rational::one());
    let first = ws.iter().min_by(|x, y| x.closed.0.cmp(&y.closed.0));
    let Some(first) = first else {
        return Ok(part);
    };
    let mut a = first.closed.0.clone();
    let mut p = first.copy;
    loop {
        let mut z = Rational::one();
        for w in &ws {
            if let Some((o0, o1)) = &w.open {
                if w.copy != p && o1 > &a {
                    if o0 < &a {
                        return Err(Error::Partition(format!(
                            "copy {} is entered before {a}",
                            w.copy
                        )));
                    }
                    z = z.min(o0.clone());
                }
            }
        }
        let b = ws
            .iter()
            .filter(|w| w.copy == p && w.closed.0 <= z && w.closed.1 >= a)
            .map(|w| w.closed.1.clone().min(z.clone()))
            .max()
            .ok_or_else(|| Error::Partition(format!("no return to copy {p} after {a}")))?;
        part.segments.push(BranchSegment {
            copy: 0,
            lo: a.clone(),
            hi: b.clone(),
        });
        part.displacements.push(p);
        if let Some(w) = ws
            .iter()
            .find(|w| w.closed.0 <= b && w.closed.1 > b && w.copy != p)
        {
            return Err(Error::Partition(format!(
                "window of copy {} straddles {b}",
                w.copy
            )));
        }
        match ws
            .iter()
            .filter(|w| w.closed.0 > b)
            .min_by(|x, y| x.closed.0.cmp(&y.closed.0))
        {
            Some(w) => {
                a = w.closed.0.clone();
                p = w.copy;
            }
            None => break,
        }
    }
    Ok(part)
}

/// Checks the defining properties of a partition and lists violations.
pub fn verify_partition(m: &PAMap, part: &Partition) -> Vec<String> {
    let mut bad = Vec::new();
    let region = Region {
        sigma: m.sigma().clone(),
        h: part.h.clone(),
    };
    let h = &part.h;
    let n = part.len();
    for i in 0..n {
        let x = &part.segments[i];
        let p = part.displacements[i];
        if i + 1 < n {
            if x.hi >= part.segments[i + 1].lo {
                bad.push(format!("X{} and X{} are not ordered", i + 1, i + 2));
            }
            if p == part.displacements[i + 1] {
                bad.push(format!("X{} and X{} share displacement {p}", i + 1, i + 2));
            }
        }
        for w in windows(m, &region, &x.lo, &x.hi) {
            if w.copy != p && w.open.is_some() {
                bad.push(format!("F(X{}) enters copy {} above h", i + 1, w.copy));
            }
        }
        let start = region.sigma.branch_point(p, h.clone());
        if m.evaluate(&region.sigma.branch_point(0, x.lo.clone())) != start {
            bad.push(format!("F(min X{}) is not min X_F + {p}", i + 1));
        }
        if x.hi < Rational::one() && m.evaluate(&region.sigma.branch_point(0, x.hi.clone())) != start {
            bad.push(format!("F(max X{}) is not min X_F + {p}", i + 1));
        }
    }
    let mut gaps: Vec<(Rational, Rational, bool, bool)> = Vec::new();
    let mut prev = (h.clone(), true);
    for x in &part.segments {
        gaps.push((prev.0.clone(), x.lo.clone(), prev.1, false));
        prev = (x.hi.clone(), false);
    }
    gaps.push((prev.0, Rational::one(), prev.1, true));
    for (g0, g1, lo_closed, hi_closed) in gaps {
        if g0 > g1 || (g0 == g1 && !(lo_closed && hi_closed)) {
            continue;
        }
        for w in windows(m, &region, &g0, &g1) {
            let (l, r) = &w.closed;
            let left_ok = if lo_closed { r >= &g0 } else { r > &g0 };
            let right_ok = if hi_closed { l <= &g1 } else { l < &g1 };
            if left_ok && right_ok {
                bad.push(format!("gap [{g0}, {g1}] maps into copy {}", w.copy));
            }
        }
    }
    bad
}

/// How an orbit leaves the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Escape {
    /// Into the line region.
    LineRegion,
    /// Into `X_F + j` but outside every `X_i + j`.
    Dustbin,
}

/// Symbols `1..=N` visited by an orbit, with the copy index reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Itinerary {
    pub symbols: Vec<usize>,
    /// `copies[k]` is the copy of `F^k(x)` minus the copy of `x`.
    pub copies: Vec<i64>,
    /// `(start, period)` once the orbit repeats modulo translations.
    pub cycle: Option<(usize, usize)>,
    pub escape: Option<(usize, Escape)>,
}

pub fn itinerary(m: &PAMap, part: &Partition, x: &Point, n: usize) -> Itinerary {
    let region = Region {
        sigma: m.sigma().clone(),
        h: part.h.clone(),
    };
    let mut it = Itinerary {
        symbols: Vec::new(),
        copies: Vec::new(),
        cycle: None,
        escape: None,
    };
    let mut seen: HashMap<Point, usize> = HashMap::new();
    let mut y = x.clone();
    let mut base: Option<i64> = None;
    for k in 0..=n {
        let Some((j, s)) = region.coords(&y) else {
            it.escape = Some((k, Escape::LineRegion));
            return it;
        };
        if s == part.h && part.locate(&s).is_none() {
            it.escape = Some((k, Escape::LineRegion));
            return it;
        }
        let Some(i) = part.locate(&s) else {
            it.escape = Some((k, Escape::Dustbin));
            return it;
        };
        let b = *base.get_or_insert(j);
        it.symbols.push(i + 1);
        it.copies.push(j - b);
        let key = y.translate(-j);
        if let Some(&start) = seen.get(&key) {
            it.cycle = Some((start, k - start));
            return it;
        }
        seen.insert(key, k);
        y = m.evaluate(&y);
    }
    it
}

/// Rotation number read off an itinerary: exact on a detected cycle,
/// otherwise bounds from the tail window. `None` if the orbit escaped.
pub fn rho_from_itinerary(it: &Itinerary, part: &Partition) -> Option<RhoBounds> {
    if it.escape.is_some() || it.symbols.is_empty() {
        return None;
    }
    let p = |k: usize| part.displacements[it.symbols[k] - 1];
    if let Some((start, len)) = it.cycle {
        let w: i64 = (start..start + len).map(p).sum();
        let rho = Rational::new(w.into(), (len as i64).into());
        return Some(RhoBounds {
            lower: rho.clone(),
            upper: rho,
            exact: true,
            iterations: it.symbols.len() - 1,
            cycle: it.cycle,
        });
    }
    let total = it.symbols.len() - 1;
    if total == 0 {
        return None;
    }
    let mut sum = 0i64;
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for k in 0..total {
        sum += p(k);
        let nk = k + 1;
        if nk >= (total / 2).max(1) {
            let v = Rational::new(sum.into(), (nk as i64).into());
            if lower.as_ref().is_none_or(|l| &v < l) {
                lower = Some(v.clone());
            }
            if upper.as_ref().is_none_or(|u| &v > u) {
                upper = Some(v);
            }
        }
    }
    Some(RhoBounds {
        lower: lower?,
        upper: upper?,
        exact: false,
        iterations: total,
        cycle: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sigma_example;
    use crate::pamap::PowerShift;
    use crate::rational::{rat, zero};

    fn b(copy: i64, s: Rational) -> Point {
        Point::Branch { copy, height: s }
    }

    #[test]
    fn fixture_reach_and_partition() {
        let m = sigma_example();
        let r = compute_reach(&m, DEFAULT_REACH_CAP);
        assert_eq!(r.height, zero());
        assert!(r.exact);
        assert!(is_sigma_like(&m, &r));
        assert_eq!(compute_xf(&r), Some(BranchSegment { copy: 0, lo: zero(), hi: int(1) }));
        let part = partition_xf(&m, &r).unwrap();
        assert_eq!(
            part.segments,
            vec![
                BranchSegment { copy: 0, lo: zero(), hi: rat(1, 2) },
                BranchSegment { copy: 0, lo: rat(3, 4), hi: int(1) },
            ]
        );
        assert_eq!(part.displacements, vec![0, 1]);
        assert!(verify_partition(&m, &part).is_empty());
    }

    #[test]
    fn reach_grows_in_two_rounds() {
        let m = PAMap::new(
            zero(),
            vec![
                (zero(), Point::Line(zero())),
                (rat(1, 2), b(0, rat(1, 3))),
                (int(1), Point::Line(int(1))),
            ],
            vec![
                (zero(), Point::Line(zero())),
                (rat(1, 3), b(1, rat(1, 2))),
                (int(1), b(0, int(1))),
            ],
        )
        .unwrap();
        let r = compute_reach(&m, DEFAULT_REACH_CAP);
        assert_eq!(r.height, rat(1, 2));
        assert!(r.exact);
        assert_eq!(r.rounds, 2);
    }

    #[test]
    fn expanding_orbits_stay_small() {
        let m = PAMap::new(
            zero(),
            vec![(zero(), Point::Line(zero())), (int(1), Point::Line(int(1)))],
            vec![
                (zero(), Point::Line(zero())),
                (rat(1, 3), b(0, int(1))),
                (int(1), b(0, rat(1, 2))),
            ],
        )
        .unwrap();
        let x = b(0, rat(1, 1_000_003));
        let r = rho_bounds(&m, &x, 3000);
        assert!(!r.exact);
        assert_eq!((r.lower, r.upper), (zero(), zero()));
        let mut y = x;
        for _ in 0..400 {
            y = m.apply(&y);
            y = coarsen(m.sigma(), &y).unwrap_or(y);
            if let Point::Branch { height, .. } = &y {
                assert!(height.denom().bits() <= ORBIT_BITS);
            }
        }
    }

    #[test]
    fn fixture_rotation_numbers() {
        let m = sigma_example();
        let e = b(0, int(1));
        let r = rho_bounds(&m, &e, 100);
        assert!(r.exact);
        assert_eq!(r.lower, int(1));
        assert_eq!(rho_bounds(&m, &Point::Line(rat(1, 3)), 10).lower, zero());
        let g = PowerShift { map: &m, power: 3, shift: -1 };
        assert_eq!(rho_bounds(&g, &e, 100).lower, int(2));
        assert_eq!(displacement(&m, &e, 5), int(5));
    }

    #[test]
    fn fixture_itineraries() {
        let m = sigma_example();
        let part = partition_xf(&m, &compute_reach(&m, 64)).unwrap();
        let it = itinerary(&m, &part, &b(0, int(1)), 10);
        assert_eq!(it.symbols, vec![2, 2]);
        assert_eq!(it.copies, vec![0, 1]);
        assert_eq!(it.cycle, Some((0, 1)));
        assert_eq!(rho_from_itinerary(&it, &part).unwrap().lower, int(1));
        let hand = Itinerary { symbols: vec![2], copies: vec![0], cycle: Some((0, 1)), escape: None };
        assert_eq!(rho_from_itinerary(&hand, &part).unwrap().lower, int(1));
        let gone = itinerary(&m, &part, &b(0, rat(5, 8)), 10);
        assert_eq!(gone.escape, Some((0, Escape::Dustbin)));
    }
}
