//! Batch rotation-number estimates over a deterministic grid of points.

use std::fmt::Write as _;

use num_traits::One;

use crate::dynamics::{rho_bounds, RhoBounds};
use crate::pamap::PAMap;
use crate::par::{self, Execution};
use crate::rational::Rational;
use crate::space::Point;

/// First half on the branch region `[h, 1]` of copy 0 (midpoints of equal
/// cells), the rest on one period of the line.
pub fn sweep_points(m: &PAMap, h: &Rational, samples: usize) -> Vec<Point> {
    let sigma = m.sigma();
    let nb = samples.div_ceil(2);
    let nl = samples - nb;
    let width = Rational::one() - h;
    let mid = |k: usize, n: usize| Rational::new((2 * k as i64 + 1).into(), (2 * n as i64).into());
    let mut out = Vec::with_capacity(samples);
    if width > Rational::default() {
        out.extend((0..nb).map(|k| sigma.branch_point(0, h + &width * mid(k, nb))));
    } else {
        out.extend((0..nb).map(|k| Point::Line(sigma.attach() + mid(k, nb))));
    }
    out.extend((0..nl).map(|k| Point::Line(sigma.attach() + mid(k, nl))));
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub point: Point,
    pub bounds: RhoBounds,
}

pub fn sweep(m: &PAMap, points: &[Point], iters: usize, exec: Execution) -> Vec<SweepRow> {
    par::map(exec, points, |p| SweepRow {
        point: p.clone(),
        bounds: rho_bounds(m, p, iters),
    })
}

/// CSV with header `point,lower,upper,exact`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("point,lower,upper,exact\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.point, r.bounds.lower, r.bounds.upper, r.bounds.exact);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sigma_example;

    #[test]
    fn grid_and_csv() {
        let m = sigma_example();
        let pts = sweep_points(&m, &Rational::default(), 5);
        assert_eq!(pts.len(), 5);
        assert_eq!(pts.iter().filter(|p| p.is_line()).count(), 2);
        let rows = sweep(&m, &pts, 100, Execution::Sequential);
        let csv = sweep_csv(&rows);
        assert_eq!(csv.lines().count(), 6);
        assert_eq!(rows, sweep(&m, &pts, 100, Execution::Parallel));
    }
}
