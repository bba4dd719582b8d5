//! The lifted sigma graph: a real line with one unit branch attached at
//! every point `n + c`.
//!
//! Points are kept in canonical form: a branch point at height 0 is stored
//! as the line point it is glued to.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{floor_i64, int, one, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Line(Rational),
    Branch { copy: i64, height: Rational },
}

impl Point {
    pub fn line(x: Rational) -> Point {
        Point::Line(x)
    }

    /// Translation by the deck transformation `k`.
    pub fn translate(&self, k: i64) -> Point {
        match self {
            Point::Line(x) => Point::Line(x + int(k)),
            Point::Branch { copy, height } => Point::Branch {
                copy: copy + k,
                height: height.clone(),
            },
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Point::Line(_))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line(x) => write!(f, "L {x}"),
            Point::Branch { copy, height } => write!(f, "B {copy} {height}"),
        }
    }
}

/// Parses `L <x>` or `B <copy> <height>` (heights in `(0, 1]`, or `0`).
pub fn parse_point(text: &str) -> std::result::Result<(char, Vec<Rational>), String> {
    let mut it = text.split_whitespace();
    let tag = it.next().ok_or("empty point")?;
    let nums: Vec<Rational> = it.map(parse_rational).collect::<std::result::Result<_, _>>()?;
    match (tag, nums.len()) {
        ("L", 1) => Ok(('L', nums)),
        ("B", 2) => {
            if !nums[0].is_integer() {
                return Err(format!("branch copy must be an integer in `{text}`"));
            }
            Ok(('B', nums))
        }
        _ => Err(format!("expected `L x` or `B n s`, got `{text}`")),
    }
}

/// Closed segment `{Branch(copy, s) : lo <= s <= hi}` of one branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchSegment {
    pub copy: i64,
    pub lo: Rational,
    pub hi: Rational,
}

impl BranchSegment {
    pub fn new(copy: i64, lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() || hi > one() || lo > hi {
            return Err(Error::InvalidSegment(format!(
                "[{lo}, {hi}] is not a subsegment of [0, 1]"
            )));
        }
        Ok(BranchSegment { copy, lo, hi })
    }

    pub fn translate(&self, k: i64) -> Self {
        BranchSegment {
            copy: self.copy + k,
            lo: self.lo.clone(),
            hi: self.hi.clone(),
        }
    }

    pub fn at_copy(&self, copy: i64) -> Self {
        BranchSegment {
            copy,
            ..self.clone()
        }
    }

    pub fn contains_height(&self, s: &Rational) -> bool {
        &self.lo <= s && s <= &self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn same_heights(&self, other: &BranchSegment) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }
}

impl fmt::Display for BranchSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "[{}, {}]", self.lo, self.hi)
        } else {
            write!(f, "[{}, {}]{:+}", self.lo, self.hi, self.copy)
        }
    }
}

/// One monotone piece of a geodesic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Leg {
    Branch { copy: i64, from: Rational, to: Rational },
    Line { from: Rational, to: Rational },
}

impl Leg {
    pub fn length(&self) -> Rational {
        match self {
            Leg::Branch { from, to, .. } | Leg::Line { from, to } => (to - from).abs(),
        }
    }

    /// Coordinate (height or line position) at arc distance `d` from the start.
    fn coord_at(&self, d: &Rational) -> Rational {
        let (from, to) = match self {
            Leg::Branch { from, to, .. } | Leg::Line { from, to } => (from, to),
        };
        if to >= from {
            from + d
        } else {
            from - d
        }
    }
}

/// The unique arc between two points of the tree, as a list of nonempty legs.
#[derive(Clone, Debug)]
pub struct Geodesic {
    pub legs: Vec<Leg>,
    pub start: Point,
    pub end: Point,
}

/// The space itself, determined by the attachment offset `c` in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sigma {
    attach: Rational,
}

impl Sigma {
    pub fn new(attach: Rational) -> Result<Self> {
        if attach.is_negative() || attach >= one() {
            return Err(Error::InvalidPoint(format!(
                "attachment offset {attach} is outside [0, 1)"
            )));
        }
        Ok(Sigma { attach })
    }

    pub fn standard() -> Self {
        Sigma {
            attach: Rational::zero(),
        }
    }

    pub fn attach(&self) -> &Rational {
        &self.attach
    }

    /// The point of copy `n` at height `s`, canonicalized.
    pub fn branch_point(&self, copy: i64, height: Rational) -> Point {
        if height.is_zero() {
            self.attachment(copy)
        } else {
            Point::Branch { copy, height }
        }
    }

    /// Line point where copy `n` is glued.
    pub fn attachment(&self, copy: i64) -> Point {
        Point::Line(int(copy) + &self.attach)
    }

    /// Builds a point from its parsed text form.
    pub fn point_from_parts(&self, tag: char, nums: &[Rational]) -> Result<Point> {
        match tag {
            'L' => Ok(Point::Line(nums[0].clone())),
            _ => {
                let copy = floor_i64(&nums[0]);
                let h = nums[1].clone();
                if h.is_negative() || h > one() {
                    return Err(Error::InvalidPoint(format!("height {h} outside [0, 1]")));
                }
                Ok(self.branch_point(copy, h))
            }
        }
    }

    pub fn parse_point(&self, text: &str) -> Result<Point> {
        let (tag, nums) = parse_point(text).map_err(Error::InvalidPoint)?;
        self.point_from_parts(tag, &nums)
    }

    pub fn is_canonical(&self, p: &Point) -> bool {
        match p {
            Point::Line(_) => true,
            Point::Branch { height, .. } => height.is_positive() && height <= &one(),
        }
    }

    pub fn canonicalize(&self, p: Point) -> Point {
        match p {
            Point::Branch { copy, height } if height.is_zero() => self.attachment(copy),
            other => other,
        }
    }

    /// Nearest-point retraction onto the line.
    pub fn retract(&self, p: &Point) -> Rational {
        match p {
            Point::Line(x) => x.clone(),
            Point::Branch { copy, .. } => int(*copy) + &self.attach,
        }
    }

    /// `(copy, height)` if `p` lies on a closed branch (attachment points count
    /// as height 0).
    pub fn branch_coords(&self, p: &Point) -> Option<(i64, Rational)> {
        match p {
            Point::Branch { copy, height } => Some((*copy, height.clone())),
            Point::Line(x) => {
                let u = x - &self.attach;
                u.is_integer().then(|| (floor_i64(&u), Rational::zero()))
            }
        }
    }

    pub fn height(&self, p: &Point) -> Rational {
        match p {
            Point::Line(_) => Rational::zero(),
            Point::Branch { height, .. } => height.clone(),
        }
    }

    /// Translate `p` into the fundamental domain: returns `(q, k)` with
    /// `p = q + k`, `q` a line point in `[c, c+1)` or a point of copy 0.
    pub fn normalize(&self, p: &Point) -> (Point, i64) {
        match p {
            Point::Line(x) => {
                let k = floor_i64(&(x - &self.attach));
                (Point::Line(x - int(k)), k)
            }
            Point::Branch { copy, height } => (
                Point::Branch {
                    copy: 0,
                    height: height.clone(),
                },
                *copy,
            ),
        }
    }

    pub fn geodesic(&self, p: &Point, q: &Point) -> Geodesic {
        let mut legs = Vec::with_capacity(3);
        match (p, q) {
            (
                Point::Branch { copy: a, height: s },
                Point::Branch { copy: b, height: t },
            ) if a == b => {
                if s != t {
                    legs.push(Leg::Branch {
                        copy: *a,
                        from: s.clone(),
                        to: t.clone(),
                    });
                }
            }
            _ => {
                if let Point::Branch { copy, height } = p {
                    legs.push(Leg::Branch {
                        copy: *copy,
                        from: height.clone(),
                        to: Rational::zero(),
                    });
                }
                let (x, y) = (self.retract(p), self.retract(q));
                if x != y {
                    legs.push(Leg::Line { from: x, to: y });
                }
                if let Point::Branch { copy, height } = q {
                    legs.push(Leg::Branch {
                        copy: *copy,
                        from: Rational::zero(),
                        to: height.clone(),
                    });
                }
            }
        }
        Geodesic {
            legs,
            start: p.clone(),
            end: q.clone(),
        }
    }

    /// Length of the geodesic from `p` to `q`.
    pub fn path_length(&self, p: &Point, q: &Point) -> Rational {
        self.geodesic(p, q).length()
    }

    /// Point at fraction `t` in `[0, 1]` of the geodesic from `p` to `q`.
    pub fn geodesic_eval(&self, p: &Point, q: &Point, t: &Rational) -> Result<Point> {
        if t.is_negative() || t > &one() {
            return Err(Error::InvalidPoint(format!("parameter {t} outside [0, 1]")));
        }
        Ok(self.geodesic(p, q).point_at_fraction(self, t))
    }

    /// Nearest-point retraction onto the segment `x`, for points of `x` or of
    /// the component of the complement that contains the line.
    pub fn retract_to_segment(&self, p: &Point, x: &BranchSegment) -> Result<Point> {
        if let Some((copy, s)) = self.branch_coords(p) {
            if copy == x.copy && s > x.hi {
                return Err(Error::InvalidPoint(format!(
                    "{p} lies beyond the far end of {x}"
                )));
            }
            if copy == x.copy && s >= x.lo {
                return Ok(p.clone());
            }
        }
        Ok(self.branch_point(x.copy, x.lo.clone()))
    }

    pub fn segment_point(&self, seg: &BranchSegment, height: &Rational) -> Point {
        self.branch_point(seg.copy, height.clone())
    }
}

impl Geodesic {
    pub fn length(&self) -> Rational {
        self.legs.iter().map(Leg::length).sum()
    }

    pub fn point_at(&self, sigma: &Sigma, d: &Rational) -> Point {
        let mut rest = d.clone();
        for (i, leg) in self.legs.iter().enumerate() {
            let len = leg.length();
            if rest <= len || i + 1 == self.legs.len() {
                let c = leg.coord_at(&rest);
                return match leg {
                    Leg::Branch { copy, .. } => sigma.branch_point(*copy, c),
                    Leg::Line { .. } => Point::Line(c),
                };
            }
            rest -= len;
        }
        self.start.clone()
    }

    pub fn point_at_fraction(&self, sigma: &Sigma, t: &Rational) -> Point {
        if t.is_zero() {
            return self.start.clone();
        }
        if t == &one() {
            return self.end.clone();
        }
        self.point_at(sigma, &(self.length() * t))
    }

    /// Arc position of `target` on this geodesic, if it lies on it.
    pub fn locate(&self, sigma: &Sigma, target: &Point) -> Option<Rational> {
        if self.legs.is_empty() {
            return (target == &self.start).then(Rational::zero);
        }
        let coords = sigma.branch_coords(target);
        let mut offset = Rational::zero();
        for leg in &self.legs {
            match leg {
                Leg::Branch { copy, from, to } => {
                    if let Some((c, s)) = &coords {
                        if c == copy && between(s, from, to) {
                            return Some(&offset + (s - from).abs());
                        }
                    }
                }
                Leg::Line { from, to } => {
                    if let Point::Line(x) = target {
                        if between(x, from, to) {
                            return Some(&offset + (x - from).abs());
                        }
                    }
                }
            }
            offset += leg.length();
        }
        None
    }

    /// Closed hull of arc positions whose point lies on branch `copy` at
    /// height `>= level` (or `> level` when `strict`; the closure is returned).
    /// With `level == 0` a line leg through the attachment point counts.
    pub fn copy_window(
        &self,
        sigma: &Sigma,
        copy: i64,
        level: &Rational,
        strict: bool,
    ) -> Option<(Rational, Rational)> {
        if self.legs.is_empty() {
            let (c, s) = sigma.branch_coords(&self.start)?;
            let ok = c == copy && if strict { &s > level } else { &s >= level };
            return ok.then(|| (Rational::zero(), Rational::zero()));
        }
        let mut hull: Option<(Rational, Rational)> = None;
        let mut add = |a: Rational, b: Rational| {
            hull = Some(match hull.take() {
                None => (a, b),
                Some((x, y)) => (x.min(a), y.max(b)),
            });
        };
        let mut offset = Rational::zero();
        for leg in &self.legs {
            let len = leg.length();
            match leg {
                Leg::Branch { copy: c, from, to } if *c == copy => {
                    let top = from.max(to);
                    let ok = if strict { top > level } else { top >= level };
                    if ok {
                        if from >= to {
                            let reach = (from - level).min(len.clone());
                            add(offset.clone(), &offset + reach);
                        } else {
                            let skip = (level - from).max(Rational::zero());
                            add(&offset + skip, &offset + &len);
                        }
                    }
                }
                Leg::Line { from, to } if !strict && level.is_zero() => {
                    let x = int(copy) + sigma.attach();
                    if between(&x, from, to) {
                        let d = &offset + (&x - from).abs();
                        add(d.clone(), d);
                    }
                }
                _ => {}
            }
            offset += len;
        }
        hull
    }

    /// Maximum height along the arc (attained at an endpoint).
    pub fn max_height(&self, sigma: &Sigma) -> Rational {
        sigma.height(&self.start).max(sigma.height(&self.end))
    }
}

fn between(x: &Rational, a: &Rational, b: &Rational) -> bool {
    (a <= x && x <= b) || (b <= x && x <= a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, zero};

    fn b(copy: i64, s: Rational) -> Point {
        Point::Branch { copy, height: s }
    }

    #[test]
    fn retraction_and_lengths() {
        let sg = Sigma::standard();
        assert_eq!(sg.retract(&b(1, rat(1, 3))), int(1));
        assert_eq!(sg.path_length(&b(1, rat(1, 3)), &Point::Line(rat(5, 2))), rat(11, 6));
        assert_eq!(sg.path_length(&b(0, rat(1, 2)), &b(0, rat(1, 4))), rat(1, 4));
        assert_eq!(sg.path_length(&b(0, rat(1, 2)), &b(2, rat(1, 4))), rat(11, 4));
    }

    #[test]
    fn geodesic_midpoint_passes_through_attachment() {
        let sg = Sigma::standard();
        let m = sg
            .geodesic_eval(&b(0, rat(1, 2)), &Point::Line(rat(1, 2)), &rat(1, 2))
            .unwrap();
        assert_eq!(m, Point::Line(zero()));
    }

    #[test]
    fn canonical_height_zero() {
        let sg = Sigma::new(rat(1, 3)).unwrap();
        assert_eq!(sg.branch_point(2, zero()), Point::Line(rat(7, 3)));
        assert!(!sg.is_canonical(&b(0, zero())));
        assert_eq!(sg.branch_coords(&Point::Line(rat(-2, 3))), Some((-1, zero())));
        assert_eq!(sg.branch_coords(&Point::Line(rat(1, 2))), None);
    }

    #[test]
    fn segment_retraction() {
        let sg = Sigma::standard();
        let x = BranchSegment::new(0, rat(1, 4), rat(3, 4)).unwrap();
        assert_eq!(sg.retract_to_segment(&b(0, rat(1, 2)), &x).unwrap(), b(0, rat(1, 2)));
        assert_eq!(sg.retract_to_segment(&Point::Line(int(3)), &x).unwrap(), b(0, rat(1, 4)));
        assert_eq!(sg.retract_to_segment(&b(0, rat(1, 8)), &x).unwrap(), b(0, rat(1, 4)));
        assert!(sg.retract_to_segment(&b(0, rat(7, 8)), &x).is_err());
    }

    #[test]
    fn locate_and_windows() {
        let sg = Sigma::standard();
        let g = sg.geodesic(&b(0, one()), &b(1, rat(1, 2)));
        assert_eq!(g.length(), rat(5, 2));
        assert_eq!(g.locate(&sg, &Point::Line(int(1))), Some(int(2)));
        assert_eq!(g.locate(&sg, &b(1, rat(1, 4))), Some(rat(9, 4)));
        assert_eq!(g.copy_window(&sg, 0, &rat(1, 4), false), Some((zero(), rat(3, 4))));
        assert_eq!(g.copy_window(&sg, 1, &zero(), true), Some((int(2), rat(5, 2))));
        let line = sg.geodesic(&Point::Line(rat(-1, 2)), &Point::Line(rat(3, 2)));
        assert_eq!(line.copy_window(&sg, 1, &zero(), false), Some((rat(3, 2), rat(3, 2))));
        assert_eq!(line.copy_window(&sg, 1, &zero(), true), None);
    }
}
