//! Degree-one lifts of the line restriction `F|R`, their monotone
//! envelopes, and exact rotation numbers of nondecreasing lifts.

use num_traits::{One, Zero};

use crate::dynamics::RhoBounds;
use crate::pamap::PAMap;
use crate::pl::Pl;
use crate::rational::{ceil_i64, floor_i64, int, Rational};
use crate::space::Point;

/// Knot budget for iterated lifts.
pub const LIFT_KNOT_CAP: usize = 1_000_000;

/// A continuous map `f` of the real line with `f(x + 1) = f(x) + 1`, stored
/// on one period `[c, c + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    c: Rational,
    pl: Pl,
}

impl Lift {
    pub fn new(c: Rational, pl: Pl) -> Self {
        Lift { c, pl }
    }

    /// `F|R` when the line is invariant.
    pub fn from_map(m: &PAMap) -> Option<Lift> {
        let knots = m
            .line_breaks()
            .iter()
            .map(|b| match &b.image {
                Point::Line(y) => Some((b.at.clone(), y.clone())),
                Point::Branch { .. } => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Lift {
            c: m.sigma().attach().clone(),
            pl: Pl::new(knots),
        })
    }

    pub fn period_start(&self) -> &Rational {
        &self.c
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        self.pl.knots()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let k = floor_i64(&(x - &self.c));
        self.pl.eval(&(x - int(k))) + int(k)
    }

    /// Knots of the periodic extension strictly inside `(lo, hi)`.
    fn knots_between(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let base = &self.pl.knots()[..self.pl.len() - 1];
        let k0 = floor_i64(&(lo - &self.c)) - 1;
        let k1 = ceil_i64(&(hi - &self.c)) + 1;
        for k in k0..=k1 {
            for (u, _) in base {
                let x = u + int(k);
                if lo < &x && &x < hi {
                    out.push(x);
                }
            }
        }
        out.sort();
        out
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &Lift, inner: &Lift) -> Lift {
        let mut samples = Vec::new();
        for w in inner.pl.knots().windows(2) {
            let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
            samples.push((t0.clone(), outer.eval(v0)));
            if v0 == v1 {
                continue;
            }
            let (lo, hi) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
            let mut mids: Vec<(Rational, Rational)> = outer
                .knots_between(lo, hi)
                .into_iter()
                .map(|s| {
                    let t = t0 + (t1 - t0) * (&s - v0) / (v1 - v0);
                    let v = outer.eval(&s);
                    (t, v)
                })
                .collect();
            if v0 > v1 {
                mids.reverse();
            }
            samples.extend(mids);
        }
        let (t, v) = inner.pl.knots().last().expect("nonempty");
        samples.push((t.clone(), outer.eval(v)));
        Lift {
            c: inner.c.clone(),
            pl: Pl::from_samples(samples),
        }
    }

    /// `n`-th iterate, or `None` past the knot budget.
    pub fn power(&self, n: usize) -> Option<Lift> {
        let mut out = self.clone();
        for _ in 1..n {
            out = Lift::compose(self, &out);
            if out.pl.len() > LIFT_KNOT_CAP {
                return None;
            }
        }
        Some(out)
    }

    fn envelope(&self, upper: bool) -> Lift {
        let vals: Vec<&Rational> = self.pl.knots().iter().map(|k| &k.1).collect();
        let vmin = vals.iter().min().map(|v| (*v).clone()).unwrap_or_default();
        let vmax = vals.iter().max().map(|v| (*v).clone()).unwrap_or_default();
        let spread = ceil_i64(&(&vmax - &vmin)) + 2;
        let mut levels: Vec<Rational> = Vec::new();
        for v in &vals {
            for k in -spread..=spread {
                levels.push(*v + int(k));
            }
        }
        levels.sort();
        levels.dedup();
        let mut cand: Vec<Rational> = self.pl.knots().iter().map(|k| k.0.clone()).collect();
        for w in self.pl.knots().windows(2) {
            let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
            if v0 == v1 {
                continue;
            }
            let (lo, hi) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
            for l in &levels {
                if lo < l && l < hi {
                    cand.push(t0 + (t1 - t0) * (l - v0) / (v1 - v0));
                }
            }
        }
        let samples = cand
            .into_iter()
            .map(|x| {
                let v = if upper { self.window_max(&x) } else { self.window_min(&x) };
                (x, v)
            })
            .collect();
        Lift {
            c: self.c.clone(),
            pl: Pl::from_samples(samples),
        }
    }

    /// `max f` over `[x - 1, x]`.
    pub fn window_max(&self, x: &Rational) -> Rational {
        let lo = x - Rational::one();
        self.knots_between(&lo, x)
            .iter()
            .map(|u| self.eval(u))
            .fold(self.eval(x), |a, b| a.max(b))
    }

    /// `min f` over `[x, x + 1]`.
    pub fn window_min(&self, x: &Rational) -> Rational {
        let hi = x + Rational::one();
        self.knots_between(x, &hi)
            .iter()
            .map(|u| self.eval(u))
            .fold(self.eval(x), |a, b| a.min(b))
    }

    /// `x -> max { f(y) : y <= x }`.
    pub fn upper_envelope(&self) -> Lift {
        self.envelope(true)
    }

    /// `x -> min { f(y) : y >= x }`.
    pub fn lower_envelope(&self) -> Lift {
        self.envelope(false)
    }

    /// Smallest `x` in `[c, c + 1]` with `f(x) = x + p`.
    pub fn first_solution(&self, p: i64) -> Option<Rational> {
        self.pl.first_fixed_point(&int(p))
    }

    /// Range of `f(x) - x` over a period.
    fn drift_range(&self) -> (Rational, Rational) {
        let d: Vec<Rational> = self.pl.knots().iter().map(|(t, v)| v - t).collect();
        let lo = d.iter().min().cloned().unwrap_or_default();
        let hi = d.iter().max().cloned().unwrap_or_default();
        (lo, hi)
    }
}

/// Rotation number of a nondecreasing lift. For each `q` up to `q_cap`,
/// `f^q(x) - x` ranges over an interval of length below one; when it
/// contains an integer `p`, the rotation number is exactly `p/q`. Otherwise
/// every such range gives bounds.
pub fn monotone_rotation(f: &Lift, q_cap: usize) -> RhoBounds {
    let mut pow = f.clone();
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    let mut done = 0;
    for q in 1..=q_cap {
        let (lo, hi) = pow.drift_range();
        let p = ceil_i64(&lo);
        if int(p) <= hi {
            let rho = Rational::new(p.into(), (q as i64).into());
            return RhoBounds {
                lower: rho.clone(),
                upper: rho,
                exact: true,
                iterations: q,
                cycle: None,
            };
        }
        let qq = int(q as i64);
        let (l, u) = (lo / &qq, hi / &qq);
        if lower.as_ref().is_none_or(|x| &l > x) {
            lower = Some(l);
        }
        if upper.as_ref().is_none_or(|x| &u < x) {
            upper = Some(u);
        }
        done = q;
        if q < q_cap {
            pow = Lift::compose(f, &pow);
            if pow.pl.len() > LIFT_KNOT_CAP {
                break;
            }
        }
    }
    RhoBounds {
        lower: lower.unwrap_or_default(),
        upper: upper.unwrap_or_default(),
        exact: false,
        iterations: done,
        cycle: None,
    }
}

/// A line point with `F^q(x) = x + p`, when the line is invariant.
pub fn line_periodic_point(m: &PAMap, p: i64, q: usize) -> Option<Point> {
    let f = Lift::from_map(m)?;
    let (dmin, dmax) = f.drift_range();
    let a = f.c.clone();
    let b = &a + int(1);
    let search = RootSearch { f: &f, p: int(p), q, dmin, dmax };
    let x = search.first(&a, &b, a.clone(), b.clone(), 0)?;
    let pt = Point::Line(x);
    (m.iterate(&pt, q) == pt.translate(p)).then_some(pt)
}

/// Leftmost root of `f^q(x) = x + p`, refining `f^k` piece by piece and
/// discarding pieces whose remaining drift cannot reach `x + p`.
struct RootSearch<'a> {
    f: &'a Lift,
    p: Rational,
    q: usize,
    dmin: Rational,
    dmax: Rational,
}

impl RootSearch<'_> {
    /// `f^k` is affine on `[a, b]` with values `ya`, `yb`.
    fn first(&self, a: &Rational, b: &Rational, ya: Rational, yb: Rational, k: usize) -> Option<Rational> {
        let left = ya.clone() - a - &self.p;
        let right = yb.clone() - b - &self.p;
        if k == self.q {
            if left.is_zero() {
                return Some(a.clone());
            }
            if (left < Rational::zero()) == (right < Rational::zero()) && !right.is_zero() {
                return None;
            }
            return Some(a + (b - a) * &left / (&left - &right));
        }
        let rest = int((self.q - k) as i64);
        let (lo, hi) = if ya <= yb { (&ya, &yb) } else { (&yb, &ya) };
        if lo + &rest * &self.dmin > b + &self.p || hi + &rest * &self.dmax < a + &self.p {
            return None;
        }
        if ya == yb {
            let v = self.f.eval(&ya);
            return self.first(a, b, v.clone(), v, k + 1);
        }
        let mut ys = vec![ya.clone()];
        let mut mids = self.f.knots_between(lo, hi);
        if ya > yb {
            mids.reverse();
        }
        ys.extend(mids);
        ys.push(yb.clone());
        let at = |y: &Rational| a + (b - a) * (y - &ya) / (&yb - &ya);
        for w in ys.windows(2) {
            let (x0, x1) = (at(&w[0]), at(&w[1]));
            if let Some(x) = self.first(&x0, &x1, self.f.eval(&w[0]), self.f.eval(&w[1]), k + 1) {
                return Some(x);
            }
        }
        None
    }
}

/// Rotation numbers of the lower and upper envelopes of `F|R`.
pub fn envelope_rotations(m: &PAMap, q_cap: usize) -> Option<(RhoBounds, RhoBounds)> {
    let f = Lift::from_map(m)?;
    Some((
        monotone_rotation(&f.lower_envelope(), q_cap),
        monotone_rotation(&f.upper_envelope(), q_cap),
    ))
}

/// True when `f` is nondecreasing on a period.
pub fn is_monotone(f: &Lift) -> bool {
    f.knots().windows(2).all(|w| w[0].1 <= w[1].1)
}
