//! Piecewise-affine degree-one maps of the lifted sigma graph.
//!
//! A map is given on the fundamental domain by break points on the line
//! segment `[c, c+1]` and on the branch `[0, 1]` of copy 0. Between two
//! consecutive breaks the map runs at constant speed along the geodesic
//! joining their images. Everything else follows from `F(x + k) = F(x) + k`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{ceil_i64, floor_i64, int, Rational};
use crate::space::{BranchSegment, Geodesic, Leg, Point, Sigma};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Break {
    pub at: Rational,
    pub image: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Line,
    Branch,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::Line => "line",
            Block::Branch => "branch",
        })
    }
}

/// A reason why a candidate map is not a well-defined degree-one map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    TooFewBreaks { block: Block },
    NotIncreasing { block: Block, index: usize },
    DomainEnds { block: Block },
    NonCanonicalImage { block: Block, index: usize },
    Seam { at_start: Point, at_end: Point },
    Attachment { branch: Point, line: Point },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::TooFewBreaks { block } => write!(f, "{block} block needs at least two breaks"),
            Diagnostic::NotIncreasing { block, index } => {
                write!(f, "{block} break {index} is not strictly increasing")
            }
            Diagnostic::DomainEnds { block } => write!(f, "{block} breaks must start and end at the domain ends"),
            Diagnostic::NonCanonicalImage { block, index } => {
                write!(f, "{block} image {index} has a height outside [0, 1]")
            }
            Diagnostic::Seam { at_start, at_end } => write!(
                f,
                "seam mismatch: image of c+1 is {at_end} but image of c plus one is {}",
                at_start.translate(1)
            ),
            Diagnostic::Attachment { branch, line } => write!(
                f,
                "discontinuity at the attachment: branch height 0 maps to {branch}, line maps to {line}"
            ),
        }
    }
}

/// `F^n` restricted to a parameter interval: as the parameter runs over
/// `dom`, the image runs at constant speed along the geodesic `start -> end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPiece {
    pub dom: (Rational, Rational),
    pub start: Point,
    pub end: Point,
}

/// Solutions of `F^n(x) = y` in a segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preimage {
    Isolated(Point),
    /// A whole interval maps onto the target; its endpoints are reported.
    Flat { lo: Point, hi: Point },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAMap {
    sigma: Sigma,
    line: Vec<Break>,
    branch: Vec<Break>,
}

impl PAMap {
    /// Assembles a map without checking it; see [`PAMap::validate`].
    pub fn from_parts(
        attach: Rational,
        line: Vec<(Rational, Point)>,
        branch: Vec<(Rational, Point)>,
    ) -> Result<Self> {
        let sigma = Sigma::new(attach)?;
        let mk = |v: Vec<(Rational, Point)>| -> Vec<Break> {
            v.into_iter()
                .map(|(at, image)| Break {
                    at,
                    image: sigma.canonicalize(image),
                })
                .collect()
        };
        Ok(PAMap {
            line: mk(line),
            branch: mk(branch),
            sigma,
        })
    }

    /// Assembles and validates a map.
    pub fn new(
        attach: Rational,
        line: Vec<(Rational, Point)>,
        branch: Vec<(Rational, Point)>,
    ) -> Result<Self> {
        let m = Self::from_parts(attach, line, branch)?;
        let d = m.validate();
        if d.is_empty() {
            Ok(m)
        } else {
            Err(Error::InvalidMap(d))
        }
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let c = self.sigma.attach().clone();
        let blocks = [
            (Block::Line, &self.line, c.clone(), &c + Rational::one()),
            (Block::Branch, &self.branch, Rational::zero(), Rational::one()),
        ];
        for (block, breaks, lo, hi) in blocks {
            if breaks.len() < 2 {
                out.push(Diagnostic::TooFewBreaks { block });
                continue;
            }
            for i in 1..breaks.len() {
                if breaks[i].at <= breaks[i - 1].at {
                    out.push(Diagnostic::NotIncreasing { block, index: i });
                }
            }
            if breaks[0].at != lo || breaks[breaks.len() - 1].at != hi {
                out.push(Diagnostic::DomainEnds { block });
            }
            for (i, b) in breaks.iter().enumerate() {
                if let Point::Branch { height, .. } = &b.image {
                    if !height.is_positive() || height > &Rational::one() {
                        out.push(Diagnostic::NonCanonicalImage { block, index: i });
                    }
                }
            }
        }
        if self.line.len() >= 2 {
            let first = &self.line[0].image;
            let last = &self.line[self.line.len() - 1].image;
            if &first.translate(1) != last {
                out.push(Diagnostic::Seam {
                    at_start: first.clone(),
                    at_end: last.clone(),
                });
            }
            if let Some(b0) = self.branch.first() {
                if b0.image != *first {
                    out.push(Diagnostic::Attachment {
                        branch: b0.image.clone(),
                        line: first.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    pub fn line_breaks(&self) -> &[Break] {
        &self.line
    }

    pub fn branch_breaks(&self) -> &[Break] {
        &self.branch
    }

    /// `F + k`.
    pub fn shifted(&self, k: i64) -> PAMap {
        let sh = |v: &[Break]| {
            v.iter()
                .map(|b| Break {
                    at: b.at.clone(),
                    image: b.image.translate(k),
                })
                .collect()
        };
        PAMap {
            sigma: self.sigma.clone(),
            line: sh(&self.line),
            branch: sh(&self.branch),
        }
    }

    /// True when the line is invariant, i.e. every line break maps to the line.
    pub fn line_invariant(&self) -> bool {
        self.line.iter().all(|b| b.image.is_line())
    }

    fn piece_index(breaks: &[Break], x: &Rational) -> usize {
        let j = breaks.partition_point(|b| &b.at <= x);
        j.saturating_sub(1).min(breaks.len() - 2)
    }

    fn eval_in(&self, breaks: &[Break], x: &Rational) -> Point {
        let j = Self::piece_index(breaks, x);
        let (a, b) = (&breaks[j], &breaks[j + 1]);
        if x == &a.at {
            return a.image.clone();
        }
        if x == &b.at {
            return b.image.clone();
        }
        let t = (x - &a.at) / (&b.at - &a.at);
        self.sigma
            .geodesic(&a.image, &b.image)
            .point_at_fraction(&self.sigma, &t)
    }

    pub fn evaluate(&self, p: &Point) -> Point {
        match p {
            Point::Line(x) => {
                let k = floor_i64(&(x - self.sigma.attach()));
                self.eval_in(&self.line, &(x - int(k))).translate(k)
            }
            Point::Branch { copy, height } => self.eval_in(&self.branch, height).translate(*copy),
        }
    }

    pub fn iterate(&self, p: &Point, n: usize) -> Point {
        let mut q = p.clone();
        for _ in 0..n {
            q = self.evaluate(&q);
        }
        q
    }

    /// Arc positions along `g` where `F` has a break point, strictly inside.
    fn cut_positions(&self, g: &Geodesic) -> Vec<Rational> {
        let mut cuts = Vec::new();
        let mut offset = Rational::zero();
        for leg in &g.legs {
            match leg {
                Leg::Branch { from, to, .. } => {
                    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
                    for b in &self.branch {
                        if lo < &b.at && &b.at < hi {
                            cuts.push(&offset + (&b.at - from).abs());
                        }
                    }
                }
                Leg::Line { from, to } => {
                    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
                    for b in &self.line[..self.line.len() - 1] {
                        let k0 = ceil_i64(&(lo - &b.at));
                        let k1 = floor_i64(&(hi - &b.at));
                        for k in k0..=k1 {
                            let u = &b.at + int(k);
                            if lo < &u && &u < hi {
                                cuts.push(&offset + (&u - from).abs());
                            }
                        }
                    }
                }
            }
            offset += leg.length();
        }
        cuts.sort();
        cuts.dedup();
        cuts
    }

    /// Applies `F` to a piece, splitting it where `F` is not affine.
    pub fn push_forward(&self, piece: &PathPiece) -> Vec<PathPiece> {
        let g = self.sigma.geodesic(&piece.start, &piece.end);
        let len = g.length();
        if len.is_zero() {
            let y = self.evaluate(&piece.start);
            return vec![PathPiece {
                dom: piece.dom.clone(),
                start: y.clone(),
                end: y,
            }];
        }
        let mut marks = vec![Rational::zero()];
        marks.extend(self.cut_positions(&g));
        marks.push(len.clone());
        let (t0, t1) = &piece.dom;
        let span = t1 - t0;
        let images: Vec<Point> = marks
            .iter()
            .enumerate()
            .map(|(i, d)| {
                if i == 0 {
                    self.evaluate(&piece.start)
                } else if i + 1 == marks.len() {
                    self.evaluate(&piece.end)
                } else {
                    self.evaluate(&g.point_at(&self.sigma, d))
                }
            })
            .collect();
        let param = |d: &Rational| t0 + &span * d / &len;
        (0..marks.len() - 1)
            .map(|i| PathPiece {
                dom: (
                    if i == 0 { t0.clone() } else { param(&marks[i]) },
                    if i + 2 == marks.len() { t1.clone() } else { param(&marks[i + 1]) },
                ),
                start: images[i].clone(),
                end: images[i + 1].clone(),
            })
            .collect()
    }

    fn iterate_pieces(&self, mut pieces: Vec<PathPiece>, n: usize) -> Vec<PathPiece> {
        for _ in 0..n {
            pieces = pieces.iter().flat_map(|p| self.push_forward(p)).collect();
        }
        pieces
    }

    /// `F^n` on a branch segment, parametrized by height.
    pub fn pieces(&self, seg: &BranchSegment, n: usize) -> Vec<PathPiece> {
        let id = PathPiece {
            dom: (seg.lo.clone(), seg.hi.clone()),
            start: self.sigma.branch_point(seg.copy, seg.lo.clone()),
            end: self.sigma.branch_point(seg.copy, seg.hi.clone()),
        };
        self.iterate_pieces(vec![id], n)
    }

    /// `F^n` on the line interval `[lo, hi]`, parametrized by position.
    pub fn line_pieces(&self, lo: &Rational, hi: &Rational, n: usize) -> Vec<PathPiece> {
        let id = PathPiece {
            dom: (lo.clone(), hi.clone()),
            start: Point::Line(lo.clone()),
            end: Point::Line(hi.clone()),
        };
        self.iterate_pieces(vec![id], n)
    }

    /// Arcs whose union is exactly `F(seg)`.
    pub fn image_of_segment(&self, seg: &BranchSegment) -> Vec<(Point, Point)> {
        self.pieces(seg, 1)
            .into_iter()
            .map(|p| (p.start, p.end))
            .collect()
    }

    /// All `x` in `seg` with `F^n(x) = target`, sorted by height.
    pub fn preimages_in_segment(&self, target: &Point, seg: &BranchSegment, n: usize) -> Vec<Preimage> {
        let mut flats: Vec<(Rational, Rational)> = Vec::new();
        let mut isolated: Vec<Rational> = Vec::new();
        for piece in self.pieces(seg, n) {
            let g = self.sigma.geodesic(&piece.start, &piece.end);
            let len = g.length();
            let (t0, t1) = &piece.dom;
            if len.is_zero() {
                if &piece.start == target {
                    match flats.last_mut() {
                        Some(last) if &last.1 == t0 => last.1 = t1.clone(),
                        _ => flats.push((t0.clone(), t1.clone())),
                    }
                }
            } else if let Some(d) = g.locate(&self.sigma, target) {
                isolated.push(t0 + (t1 - t0) * d / len);
            }
        }
        isolated.sort();
        isolated.dedup();
        isolated.retain(|t| !flats.iter().any(|(a, b)| a <= t && t <= b));
        let pt = |t: Rational| self.sigma.branch_point(seg.copy, t);
        let mut out: Vec<(Rational, Preimage)> = isolated
            .into_iter()
            .map(|t| (t.clone(), Preimage::Isolated(pt(t))))
            .collect();
        out.extend(flats.into_iter().map(|(a, b)| {
            (
                a.clone(),
                Preimage::Flat {
                    lo: pt(a),
                    hi: pt(b),
                },
            )
        }));
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out.into_iter().map(|(_, p)| p).collect()
    }
}

/// A continuous degree-one self-map of the lifted sigma graph.
pub trait Degree1Map: Sync {
    fn sigma(&self) -> &Sigma;
    fn apply(&self, p: &Point) -> Point;
}

impl Degree1Map for PAMap {
    fn sigma(&self) -> &Sigma {
        &self.sigma
    }

    fn apply(&self, p: &Point) -> Point {
        self.evaluate(p)
    }
}

/// `x -> F^power(x) + shift`.
#[derive(Clone, Copy, Debug)]
pub struct PowerShift<'a> {
    pub map: &'a PAMap,
    pub power: usize,
    pub shift: i64,
}

impl Degree1Map for PowerShift<'_> {
    fn sigma(&self) -> &Sigma {
        self.map.sigma()
    }

    fn apply(&self, p: &Point) -> Point {
        self.map.iterate(p, self.power).translate(self.shift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sigma_example;
    use crate::rational::{rat, zero};

    fn b(copy: i64, s: Rational) -> Point {
        Point::Branch { copy, height: s }
    }

    #[test]
    fn fixture_values() {
        let m = sigma_example();
        assert!(m.validate().is_empty());
        assert_eq!(m.evaluate(&b(0, rat(1, 8))), b(0, rat(1, 2)));
        assert_eq!(m.evaluate(&b(0, rat(3, 8))), b(0, rat(1, 2)));
        assert_eq!(m.evaluate(&b(0, rat(5, 8))), Point::Line(rat(1, 2)));
        assert_eq!(m.evaluate(&b(0, rat(7, 8))), b(1, rat(1, 2)));
        assert_eq!(m.evaluate(&b(3, rat(7, 8))), b(4, rat(1, 2)));
        assert_eq!(m.evaluate(&Point::Line(rat(-7, 3))), Point::Line(rat(-7, 3)));
    }

    #[test]
    fn seam_and_attachment_are_diagnosed() {
        let bad = PAMap::from_parts(
            zero(),
            vec![(zero(), Point::Line(zero())), (int(1), Point::Line(int(2)))],
            vec![(zero(), Point::Line(rat(1, 2))), (int(1), b(0, int(1)))],
        )
        .unwrap();
        let d = bad.validate();
        assert!(d.iter().any(|x| matches!(x, Diagnostic::Seam { .. })));
        assert!(d.iter().any(|x| matches!(x, Diagnostic::Attachment { .. })));
        assert!(PAMap::new(
            zero(),
            vec![(zero(), Point::Line(zero())), (int(1), Point::Line(int(2)))],
            vec![(zero(), Point::Line(zero())), (int(1), b(0, int(1)))],
        )
        .is_err());
    }

    #[test]
    fn image_and_preimages() {
        let m = sigma_example();
        let seg = BranchSegment::new(0, zero(), rat(1, 2)).unwrap();
        let arcs = m.image_of_segment(&seg);
        assert_eq!(arcs.len(), 2);
        let pre = m.preimages_in_segment(&b(0, rat(1, 2)), &seg, 1);
        assert_eq!(
            pre,
            vec![Preimage::Isolated(b(0, rat(1, 8))), Preimage::Isolated(b(0, rat(3, 8)))]
        );
        let full = BranchSegment::new(0, zero(), int(1)).unwrap();
        let two = m.preimages_in_segment(&Point::Line(zero()), &full, 2);
        for p in &two {
            if let Preimage::Isolated(x) = p {
                assert_eq!(m.iterate(x, 2), Point::Line(zero()));
            }
        }
    }

    #[test]
    fn flat_preimage_interval() {
        let m = PAMap::new(
            zero(),
            vec![(zero(), Point::Line(zero())), (int(1), Point::Line(int(1)))],
            vec![
                (zero(), Point::Line(zero())),
                (rat(1, 2), Point::Line(zero())),
                (int(1), b(0, int(1))),
            ],
        )
        .unwrap();
        let full = BranchSegment::new(0, zero(), int(1)).unwrap();
        let pre = m.preimages_in_segment(&Point::Line(zero()), &full, 1);
        assert_eq!(
            pre,
            vec![Preimage::Flat {
                lo: Point::Line(zero()),
                hi: b(0, rat(1, 2))
            }]
        );
    }
}
