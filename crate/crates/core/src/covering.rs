//! Covering relations between branch segments, chains of coverings, and
//! the periodic points they force.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::dynamics::Region;
use crate::error::{Error, Result};
use crate::pamap::{PAMap, Preimage};
use crate::pl::Pl;
use crate::rational::{from_f64, Rational};
use crate::space::{BranchSegment, Point};

/// Knot budget for exact composition before switching to bisection.
pub const KNOT_CAP: usize = 200_000;
/// Residual accepted by the bisection fallback.
pub const BISECTION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Positive,
    Negative,
}

/// `F^power(source)` covers `target`. With a positive orientation there are
/// `x <= y` in the source with `F^power(x)` retracting to `min target` and
/// `F^power(y)` retracting to `max target`; negative swaps the roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverStep {
    pub source: BranchSegment,
    pub target: BranchSegment,
    pub power: usize,
    pub orientation: Orientation,
    /// Source heights `(x, y)` certifying the covering.
    pub witness: (Rational, Rational),
}

impl CoverStep {
    pub fn translation(&self) -> i64 {
        self.target.copy - self.source.copy
    }

    pub fn translate(&self, k: i64) -> CoverStep {
        CoverStep {
            source: self.source.translate(k),
            target: self.target.translate(k),
            ..self.clone()
        }
    }
}

impl fmt::Display for CoverStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.orientation {
            Orientation::Positive => "=>",
            Orientation::Negative => "=>-",
        };
        write!(f, "{} {arrow}^{} {}", self.source, self.power, self.target)
    }
}

fn check_inside(region: &Region, seg: &BranchSegment) -> Result<()> {
    if seg.lo < region.h || seg.hi > Rational::one() || seg.lo > seg.hi {
        return Err(Error::InvalidSegment(format!(
            "{seg} is not inside the branch region [{}, 1]",
            region.h
        )));
    }
    Ok(())
}

/// Height profile `t -> height of r_X(F^n(t) - shift)` for `t` in `source`
/// (heights of copy 0), where `r_X` retracts onto `X_F`.
pub fn profile(m: &PAMap, region: &Region, source: &BranchSegment, shift: i64, n: usize) -> Pl {
    let sigma = m.sigma();
    let h = &region.h;
    let seg = source.at_copy(0);
    let mut samples: Vec<(Rational, Rational)> = Vec::new();
    for piece in m.pieces(&seg, n) {
        let g = sigma.geodesic(&piece.start, &piece.end);
        let len = g.length();
        let (a, b) = &piece.dom;
        if len.is_zero() {
            let v = region.retracted_height(&piece.start, shift);
            samples.push((a.clone(), v.clone()));
            samples.push((b.clone(), v));
            continue;
        }
        let mut marks = vec![Rational::zero()];
        let mut offset = Rational::zero();
        for leg in &g.legs {
            let l = leg.length();
            if let crate::space::Leg::Branch { copy, from, to } = leg {
                if *copy == shift {
                    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
                    if lo < h && h < hi {
                        marks.push(&offset + (h - from).abs());
                    }
                }
            }
            offset += l;
            marks.push(offset.clone());
        }
        for d in marks {
            let t = a + (b - a) * &d / &len;
            let v = region.retracted_height(&g.point_at(sigma, &d), shift);
            samples.push((t, v));
        }
    }
    Pl::from_samples(samples)
}

fn find_witness(phi: &Pl, target: &BranchSegment, orientation: Orientation) -> Option<(Rational, Rational)> {
    let (x, y) = match orientation {
        Orientation::Positive => (phi.first_at_most(&target.lo)?, phi.last_at_least(&target.hi)?),
        Orientation::Negative => (phi.first_at_least(&target.hi)?, phi.last_at_most(&target.lo)?),
    };
    (x <= y).then_some((x, y))
}

fn covers_oriented(
    m: &PAMap,
    region: &Region,
    source: &BranchSegment,
    target: &BranchSegment,
    n: usize,
    orientations: &[Orientation],
) -> Result<Option<CoverStep>> {
    check_inside(region, source)?;
    check_inside(region, target)?;
    let shift = target.copy - source.copy;
    let phi = profile(m, region, source, shift, n);
    for &o in orientations {
        if let Some(witness) = find_witness(&phi, target, o) {
            return Ok(Some(CoverStep {
                source: source.clone(),
                target: target.clone(),
                power: n,
                orientation: o,
                witness,
            }));
        }
    }
    Ok(None)
}

/// Positive covering of `target + p` by `F^n(source)`.
pub fn positively_covers(
    m: &PAMap,
    region: &Region,
    source: &BranchSegment,
    target: &BranchSegment,
    p: i64,
    n: usize,
) -> Result<Option<CoverStep>> {
    covers_oriented(m, region, source, &target.translate(p), n, &[Orientation::Positive])
}

/// Covering of `target + p` in either orientation, positive preferred.
pub fn covers(
    m: &PAMap,
    region: &Region,
    source: &BranchSegment,
    target: &BranchSegment,
    p: i64,
    n: usize,
) -> Result<Option<CoverStep>> {
    covers_oriented(
        m,
        region,
        source,
        &target.translate(p),
        n,
        &[Orientation::Positive, Orientation::Negative],
    )
}

/// Re-checks a step's witnesses by direct evaluation.
pub fn check_step(m: &PAMap, region: &Region, step: &CoverStep) -> bool {
    let sigma = m.sigma();
    let phi = |t: &Rational| {
        let x = sigma.branch_point(step.source.copy, t.clone());
        region.retracted_height(&m.iterate(&x, step.power), step.target.copy)
    };
    let (x, y) = &step.witness;
    if x > y || !step.source.contains_height(x) || !step.source.contains_height(y) {
        return false;
    }
    match step.orientation {
        Orientation::Positive => phi(x) <= step.target.lo && phi(y) >= step.target.hi,
        Orientation::Negative => phi(x) >= step.target.hi && phi(y) <= step.target.lo,
    }
}

/// A sequence of coverings `I_0 => I_1 => ... => I_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    start: BranchSegment,
    steps: Vec<CoverStep>,
}

impl Chain {
    pub fn new(steps: Vec<CoverStep>) -> Result<Chain> {
        let first = steps
            .first()
            .ok_or_else(|| Error::Chain("a chain needs at least one step".into()))?;
        let start = first.source.clone();
        for (i, w) in steps.windows(2).enumerate() {
            if w[0].target != w[1].source {
                return Err(Error::Chain(format!(
                    "step {} ends at {} but step {} starts at {}",
                    i + 1,
                    w[0].target,
                    i + 2,
                    w[1].source
                )));
            }
        }
        Ok(Chain { start, steps })
    }

    /// The empty chain at `start`.
    pub fn identity(start: BranchSegment) -> Chain {
        Chain {
            start,
            steps: Vec::new(),
        }
    }

    pub fn steps(&self) -> &[CoverStep] {
        &self.steps
    }

    pub fn start(&self) -> &BranchSegment {
        &self.start
    }

    pub fn end(&self) -> &BranchSegment {
        self.steps.last().map(|s| &s.target).unwrap_or(&self.start)
    }

    /// Total number of iterates `L`.
    pub fn length(&self) -> usize {
        self.steps.iter().map(|s| s.power).sum()
    }

    /// Net translation `W`.
    pub fn weight(&self) -> i64 {
        self.end().copy - self.start.copy
    }

    /// Returns to a translate of its start.
    pub fn is_closed(&self) -> bool {
        self.end().same_heights(&self.start)
    }

    pub fn translate(&self, k: i64) -> Chain {
        Chain {
            start: self.start.translate(k),
            steps: self.steps.iter().map(|s| s.translate(k)).collect(),
        }
    }

    /// `self` followed by the translate of `other` that starts where `self` ends.
    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        if !self.end().same_heights(&other.start) {
            return Err(Error::Chain(format!(
                "cannot concatenate: {} does not match {}",
                self.end(),
                other.start
            )));
        }
        let k = self.end().copy - other.start.copy;
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().map(|s| s.translate(k)));
        Ok(Chain {
            start: self.start.clone(),
            steps,
        })
    }

    /// `n`-fold concatenation of a closed chain.
    pub fn power(&self, n: usize) -> Result<Chain> {
        if !self.is_closed() {
            return Err(Error::Chain("only closed chains have powers".into()));
        }
        let mut out = Chain::identity(self.start.clone());
        for _ in 0..n {
            out = out.concat(self)?;
        }
        Ok(out)
    }
}

/// A point with `F^period(x) = x + shift` that follows a closed chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainPoint {
    pub point: Point,
    pub period: usize,
    pub shift: i64,
    /// True when the point was solved exactly; otherwise `residual` bounds
    /// the distance between `F^period(x)` and `x + shift`.
    pub exact: bool,
    pub residual: Rational,
}

fn pull_back(phi: &Pl, witness: &(Rational, Rational), k: &(Rational, Rational), o: Orientation) -> Option<(Rational, Rational)> {
    let (x, y) = witness;
    let (lo, hi) = k;
    let w = phi.restrict(x, y);
    match o {
        Orientation::Positive => {
            let a = w.last_at_most(lo)?;
            let b = phi.restrict(&a, y).first_at_least(hi)?;
            Some((a, b))
        }
        Orientation::Negative => {
            let a = w.last_at_least(hi)?;
            let b = phi.restrict(&a, y).first_at_most(lo)?;
            Some((a, b))
        }
    }
}

/// Fixed point of a closed chain: some `x` in the start interval with
/// `F^{n_1 + ... + n_i}(x)` in the `i`-th interval for every `i` and
/// `F^L(x) = x + W`.
pub fn chain_fixed_point(m: &PAMap, region: &Region, chain: &Chain) -> Result<ChainPoint> {
    if !chain.is_closed() || chain.steps.is_empty() {
        return Err(Error::Chain("fixed points need a closed, nonempty chain".into()));
    }
    let sigma = m.sigma();
    let phis: Vec<Pl> = chain
        .steps
        .iter()
        .map(|s| profile(m, region, &s.source, s.translation(), s.power))
        .collect();
    let k_steps = chain.steps.len();
    let mut ks: Vec<(Rational, Rational)> = vec![(Rational::zero(), Rational::zero()); k_steps + 1];
    let last = &chain.steps[k_steps - 1].target;
    ks[k_steps] = (last.lo.clone(), last.hi.clone());
    for i in (0..k_steps).rev() {
        let s = &chain.steps[i];
        ks[i] = pull_back(&phis[i], &s.witness, &ks[i + 1], s.orientation)
            .ok_or(Error::EmptyPullback { step: i + 1 })?;
    }
    let period = chain.length();
    let shift = chain.weight();

    let mut composite = Some(phis[0].restrict(&ks[0].0, &ks[0].1));
    for i in 1..k_steps {
        let Some(r) = composite.take() else { break };
        let outer = phis[i].restrict(&ks[i].0, &ks[i].1);
        let next = Pl::compose(&outer, &r);
        composite = (next.len() <= KNOT_CAP).then_some(next);
    }

    let (t, exact) = match composite.and_then(|r| r.first_fixed_point(&Rational::zero())) {
        Some(t) => (t, true),
        None => (bisect(&phis, &ks)?, false),
    };
    let x = sigma.branch_point(chain.start.copy, t);

    let mut y = x.clone();
    for s in &chain.steps {
        y = m.iterate(&y, s.power);
        match region.coords(&y) {
            Some((j, h)) if j == s.target.copy && s.target.contains_height(&h) => {}
            _ if !exact => {}
            _ => {
                return Err(Error::Certificate(format!(
                    "orbit of {x} leaves {} after a step",
                    s.target
                )))
            }
        }
    }
    let expected = x.translate(shift);
    let residual = sigma.path_length(&y, &expected);
    if exact && !residual.is_zero() {
        return Err(Error::Certificate(format!(
            "F^{period}({x}) = {y}, expected {expected}"
        )));
    }
    Ok(ChainPoint {
        point: x,
        period,
        shift,
        exact,
        residual,
    })
}

fn bisect(phis: &[Pl], ks: &[(Rational, Rational)]) -> Result<Rational> {
    let psi = |t: &Rational| {
        let mut v = t.clone();
        for (i, phi) in phis.iter().enumerate() {
            v = phi.eval(&v).max(ks[i + 1].0.clone()).min(ks[i + 1].1.clone());
        }
        v - t
    };
    let tol = from_f64(BISECTION_TOLERANCE);
    let (mut lo, mut hi) = ks[0].clone();
    let mut f_lo = psi(&lo);
    if f_lo.is_zero() {
        return Ok(lo);
    }
    if psi(&hi).is_zero() {
        return Ok(hi);
    }
    for _ in 0..10_000 {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        let f = psi(&mid);
        if f.abs() <= tol {
            return Ok(mid);
        }
        if f.is_negative() == f_lo.is_negative() {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    Err(Error::NotFound("bisection did not converge".into()))
}

/// One move of the horseshoe schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// `I => I + m1`
    II,
    /// `I => J + m1`
    IJ,
    /// `J => J + m2`
    JJ,
    /// `J => I + m2`
    JI,
}

/// Moves realizing rotation number `p/q` from the two loops of a horseshoe
/// with displacements `m1 <= p/q <= m2`.
pub fn horseshoe_schedule(m1: i64, m2: i64, p: i64, q: i64) -> Result<Vec<Move>> {
    if q < 1 || p < m1 * q || p > m2 * q {
        return Err(Error::Chain(format!("{p}/{q} is not in [{m1}, {m2}]")));
    }
    if p == m2 * q {
        return Ok(vec![Move::JJ]);
    }
    let p1 = p - m1 * q;
    if p1 == 0 {
        return Ok(vec![Move::II]);
    }
    let m21 = m2 - m1;
    let mut out = vec![Move::II; (m21 * q - 1 - p1) as usize];
    out.push(Move::IJ);
    out.extend(std::iter::repeat_n(Move::JJ, (p1 - 1) as usize));
    out.push(Move::JI);
    Ok(out)
}

/// Builds the chain of the horseshoe schedule from the four coverings
/// `I => I + m1`, `I => J + m1`, `J => J + m2`, `J => I + m2` under `F^n`.
#[allow(clippy::too_many_arguments)]
pub fn horseshoe_chain(
    m: &PAMap,
    region: &Region,
    i: &BranchSegment,
    j: &BranchSegment,
    m1: i64,
    m2: i64,
    n: usize,
    p: i64,
    q: i64,
) -> Result<Chain> {
    let schedule = horseshoe_schedule(m1, m2, p, q)?;
    let need = |src: &BranchSegment, dst: &BranchSegment, k: i64| -> Result<CoverStep> {
        positively_covers(m, region, src, dst, k, n)?
            .ok_or_else(|| Error::NoCovering(format!("{src} does not cover {} under F^{n}", dst.translate(k))))
    };
    let mut cache: [Option<CoverStep>; 4] = Default::default();
    let mut steps = Vec::with_capacity(schedule.len());
    let mut offset = if schedule[0] == Move::JJ || schedule[0] == Move::JI {
        j.copy
    } else {
        i.copy
    };
    for mv in schedule {
        let idx = mv as usize;
        if cache[idx].is_none() {
            cache[idx] = Some(match mv {
                Move::II => need(&i.at_copy(0), &i.at_copy(0), m1)?,
                Move::IJ => need(&i.at_copy(0), &j.at_copy(0), m1)?,
                Move::JJ => need(&j.at_copy(0), &j.at_copy(0), m2)?,
                Move::JI => need(&j.at_copy(0), &i.at_copy(0), m2)?,
            });
        }
        let step = cache[idx].as_ref().expect("filled above").translate(offset);
        offset = step.target.copy;
        steps.push(step);
    }
    Chain::new(steps)
}

/// Result of the anchor search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anchor {
    pub point: Point,
    pub exact: bool,
    pub iterations: usize,
}

/// Leftmost `a` in `x1` with `F(a) = a + q1` reachable by backward
/// iteration from `min x1`: `a_{i+1} = min {x in [a_i, y] : F(x) - q1 = a_i}`
/// where `y` is the fixed point of the one-step chain `x1 => x1 + q1`.
pub fn leftmost_anchor(m: &PAMap, region: &Region, x1: &BranchSegment, q1: i64, cap: usize) -> Result<Anchor> {
    let sigma = m.sigma();
    let step = positively_covers(m, region, x1, x1, q1, 1)?
        .ok_or_else(|| Error::NoCovering(format!("{x1} does not cover itself plus {q1}")))?;
    let y = chain_fixed_point(m, region, &Chain::new(vec![step])?)?;
    let (_, y_height) = region
        .coords(&y.point)
        .ok_or_else(|| Error::NotFound("fixed point left the branch region".into()))?;
    let g = |t: &Rational| -> Option<Rational> {
        let v = m.evaluate(&sigma.branch_point(0, t.clone()));
        region.coords(&v).and_then(|(j, s)| (j == q1).then_some(s))
    };
    let piece_of = |t: &Rational| {
        let br = m.branch_breaks();
        br.partition_point(|b| &b.at <= t).saturating_sub(1).min(br.len() - 2)
    };
    let mut seq: Vec<Rational> = vec![x1.lo.clone()];
    for it in 0..cap {
        let a = seq.last().expect("nonempty").clone();
        let seg = crate::space::BranchSegment {
            copy: 0,
            lo: a.clone(),
            hi: y_height.clone(),
        };
        let target = sigma.branch_point(q1, a.clone());
        let next = m
            .preimages_in_segment(&target, &seg, 1)
            .into_iter()
            .map(|p| match p {
                Preimage::Isolated(x) | Preimage::Flat { lo: x, .. } => sigma.height(&x),
            })
            .min()
            .ok_or_else(|| Error::NotFound(format!("no preimage of {a} in [{a}, {y_height}]")))?;
        if next == a {
            return Ok(Anchor {
                point: sigma.branch_point(0, a),
                exact: true,
                iterations: it,
            });
        }
        seq.push(next.clone());
        if seq.len() >= 3 {
            let n = seq.len();
            let (a0, a1, a2) = (&seq[n - 3], &seq[n - 2], &seq[n - 1]);
            if piece_of(a0) == piece_of(a2) && piece_of(a1) == piece_of(a2) && a1 != a2 {
                // G(a1) = a0 and G(a2) = a1 fix the affine branch through them.
                let slope = (a1 - a0) / (a2 - a1);
                if slope > Rational::one() {
                    let star = (a0 - &slope * a1) / (Rational::one() - &slope);
                    if star >= *a2 && star <= y_height && piece_of(&star) == piece_of(a2) && g(&star) == Some(star.clone()) {
                        return Ok(Anchor {
                            point: sigma.branch_point(0, star),
                            exact: true,
                            iterations: it + 1,
                        });
                    }
                }
            }
        }
    }
    let last = seq.last().expect("nonempty").clone();
    Ok(Anchor {
        point: sigma.branch_point(0, last),
        exact: false,
        iterations: cap,
    })
}
