//! Continuous piecewise-linear real functions with exact knots.

use num_traits::Zero;

use crate::rational::Rational;

/// Continuous piecewise-linear function on `[knots[0].0, knots[last].0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pl {
    knots: Vec<(Rational, Rational)>,
}

fn solve(t0: &Rational, v0: &Rational, t1: &Rational, v1: &Rational, level: &Rational) -> Rational {
    t0 + (t1 - t0) * (level - v0) / (v1 - v0)
}

impl Pl {
    /// Knots must have strictly increasing abscissae.
    pub fn new(knots: Vec<(Rational, Rational)>) -> Self {
        debug_assert!(!knots.is_empty());
        debug_assert!(knots.windows(2).all(|w| w[0].0 < w[1].0));
        Pl { knots }
    }

    /// Builds from unsorted samples that may repeat abscissae.
    pub fn from_samples(mut knots: Vec<(Rational, Rational)>) -> Self {
        knots.sort_by(|a, b| a.0.cmp(&b.0));
        knots.dedup_by(|a, b| a.0 == b.0);
        Pl::new(knots).simplified()
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn lo(&self) -> &Rational {
        &self.knots[0].0
    }

    pub fn hi(&self) -> &Rational {
        &self.knots[self.knots.len() - 1].0
    }

    /// Value at `t`; clamps outside the domain.
    pub fn eval(&self, t: &Rational) -> Rational {
        let k = &self.knots;
        if t <= &k[0].0 {
            return k[0].1.clone();
        }
        if t >= &k[k.len() - 1].0 {
            return k[k.len() - 1].1.clone();
        }
        let j = k.partition_point(|(x, _)| x <= t) - 1;
        let (t0, v0) = &k[j];
        let (t1, v1) = &k[j + 1];
        if t == t0 {
            return v0.clone();
        }
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Removes knots that lie on the segment joining their neighbours.
    pub fn simplified(mut self) -> Self {
        if self.knots.len() <= 2 {
            return self;
        }
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(self.knots.len());
        for kn in self.knots.drain(..) {
            while out.len() >= 2 {
                let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
                let lhs = (&b.1 - &a.1) * (&kn.0 - &a.0);
                let rhs = (&kn.1 - &a.1) * (&b.0 - &a.0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(kn);
        }
        Pl { knots: out }
    }

    /// Restriction to `[lo, hi]`, which must lie inside the domain.
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Pl {
        let mut out = vec![(lo.clone(), self.eval(lo))];
        for (t, v) in &self.knots {
            if lo < t && t < hi {
                out.push((t.clone(), v.clone()));
            }
        }
        if hi > lo {
            out.push((hi.clone(), self.eval(hi)));
        }
        Pl { knots: out }
    }

    /// `outer ∘ inner` on the domain of `inner`.
    pub fn compose(outer: &Pl, inner: &Pl) -> Pl {
        let mut ts: Vec<Rational> = Vec::with_capacity(inner.knots.len() * 2);
        for w in inner.knots.windows(2) {
            let ((t0, v0), (t1, v1)) = (&w[0], &w[1]);
            ts.push(t0.clone());
            if v0 == v1 {
                continue;
            }
            let (lo, hi) = if v0 < v1 { (v0, v1) } else { (v1, v0) };
            let start = outer.knots.partition_point(|(s, _)| s <= lo);
            let mut mids: Vec<Rational> = outer.knots[start..]
                .iter()
                .take_while(|(s, _)| s < hi)
                .map(|(s, _)| solve(t0, v0, t1, v1, s))
                .collect();
            if v0 > v1 {
                mids.reverse();
            }
            ts.extend(mids);
        }
        ts.push(inner.hi().clone());
        let knots = ts
            .into_iter()
            .map(|t| {
                let v = outer.eval(&inner.eval(&t));
                (t, v)
            })
            .collect::<Vec<_>>();
        let mut knots = knots;
        knots.dedup_by(|a, b| a.0 == b.0);
        Pl { knots }.simplified()
    }

    fn segments(&self) -> impl DoubleEndedIterator<Item = (&Rational, &Rational, &Rational, &Rational)> {
        self.knots
            .windows(2)
            .map(|w| (&w[0].0, &w[0].1, &w[1].0, &w[1].1))
    }

    /// Smallest `t` with `f(t) <= level`.
    pub fn first_at_most(&self, level: &Rational) -> Option<Rational> {
        if &self.knots[0].1 <= level {
            return Some(self.knots[0].0.clone());
        }
        self.segments()
            .find(|s| s.3 <= level)
            .map(|(t0, v0, t1, v1)| solve(t0, v0, t1, v1, level))
    }

    /// Smallest `t` with `f(t) >= level`.
    pub fn first_at_least(&self, level: &Rational) -> Option<Rational> {
        if &self.knots[0].1 >= level {
            return Some(self.knots[0].0.clone());
        }
        self.segments()
            .find(|s| s.3 >= level)
            .map(|(t0, v0, t1, v1)| solve(t0, v0, t1, v1, level))
    }

    /// Largest `t` with `f(t) <= level`.
    pub fn last_at_most(&self, level: &Rational) -> Option<Rational> {
        let last = &self.knots[self.knots.len() - 1];
        if &last.1 <= level {
            return Some(last.0.clone());
        }
        self.segments()
            .rev()
            .find(|s| s.1 <= level)
            .map(|(t0, v0, t1, v1)| solve(t0, v0, t1, v1, level))
    }

    /// Largest `t` with `f(t) >= level`.
    pub fn last_at_least(&self, level: &Rational) -> Option<Rational> {
        let last = &self.knots[self.knots.len() - 1];
        if &last.1 >= level {
            return Some(last.0.clone());
        }
        self.segments()
            .rev()
            .find(|s| s.1 >= level)
            .map(|(t0, v0, t1, v1)| solve(t0, v0, t1, v1, level))
    }

    /// Smallest `t` with `f(t) = t + shift`.
    pub fn first_fixed_point(&self, shift: &Rational) -> Option<Rational> {
        let g = |t: &Rational, v: &Rational| v - t - shift;
        let (t0, v0) = &self.knots[0];
        if g(t0, v0).is_zero() {
            return Some(t0.clone());
        }
        for (t0, v0, t1, v1) in self.segments() {
            let (a, b) = (g(t0, v0), g(t1, v1));
            if b.is_zero() {
                return Some(t1.clone());
            }
            if (a < Rational::zero()) != (b < Rational::zero()) {
                return Some(solve(t0, &a, t1, &b, &Rational::zero()));
            }
        }
        None
    }

    pub fn min_value(&self) -> Rational {
        self.knots.iter().map(|k| &k.1).min().cloned().unwrap_or_default()
    }

    pub fn max_value(&self) -> Rational {
        self.knots.iter().map(|k| &k.1).max().cloned().unwrap_or_default()
    }
}
