use std::collections::BTreeSet;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use sigmarot::analysis::{analyze, AnalysisConfig};
use sigmarot::cycles::{cycle_mean_range, CycleRange};
use sigmarot::dynamics::rho_bounds;
use sigmarot::markov::MarkovGraph;
use sigmarot::oracle::{closed_walk_means, simple_cycle_extremes};
use sigmarot::par::Execution;
use sigmarot::rational::{fmt_signed, int, parse_rational};
use sigmarot::rotset::{periodic_point, rotation_set, Interval, MarkovSystem, RotConfig, Route};
use sigmarot::sweep::{sweep, sweep_csv, sweep_points};
use sigmarot::{PAMap, Rational};

/// What a command produced: human text, a machine-readable report, and
/// whether every reported quantity is exact.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub exact: bool,
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub reach_cap: usize,
    pub iters: Option<usize>,
    pub max_den: i64,
    pub exec: Execution,
}

impl Settings {
    fn rot(&self) -> RotConfig {
        let mut cfg = RotConfig {
            reach_cap: self.reach_cap,
            exec: self.exec,
            ..RotConfig::default()
        };
        if let Some(n) = self.iters {
            cfg.iters = n;
        }
        cfg
    }

    fn iters_or(&self, n: usize) -> usize {
        self.iters.unwrap_or(n)
    }
}

fn q(x: &Rational) -> Value {
    Value::String(fmt_signed(x))
}

fn interval_json(i: &Interval) -> Value {
    json!([q(&i.lo), q(&i.hi)])
}

fn union_text(v: &[Interval]) -> String {
    if v.is_empty() {
        return "empty".into();
    }
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" u ")
}

/// `+ k` or `- k`.
fn plus(k: i64) -> String {
    if k < 0 {
        format!("- {}", -k)
    } else {
        format!("+ {k}")
    }
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Line => "line",
        Route::Cycle => "cycle",
        Route::Horseshoe => "horseshoe",
    }
}

fn graph_json(g: &MarkovGraph) -> Value {
    json!({
        "vertices": g.vertices.iter().map(|v| json!({
            "lo": q(&v.segment.lo), "hi": q(&v.segment.hi), "part": v.part + 1,
        })).collect::<Vec<_>>(),
        "edges": g.edges.iter().map(|e| json!([e.from, e.to, e.weight])).collect::<Vec<_>>(),
    })
}

pub fn analyze_cmd(m: PAMap, s: &Settings) -> Result<Outcome> {
    let cfg = AnalysisConfig {
        rot: s.rot(),
        max_den: s.max_den,
    };
    let a = analyze(m, &cfg)?;
    let mut t = String::new();
    let r = &a.reach;
    let _ = writeln!(
        t,
        "reach: h = {} ({}, {} rounds)",
        r.height,
        if r.exact { "exact" } else { "not stabilized" },
        r.rounds
    );
    match &a.xf {
        Some(x) => {
            let _ = writeln!(t, "X_F: [{}, {}]", x.lo, x.hi);
        }
        None => t.push_str("X_F: empty\n"),
    }
    let _ = writeln!(t, "sigma-like: {}", if a.sigma_like { "yes" } else { "no" });
    let mut part_json = Value::Null;
    if let Some(p) = &a.partition {
        let _ = writeln!(t, "partition (N = {}):", p.len());
        for (i, (x, d)) in p.segments.iter().zip(&p.displacements).enumerate() {
            let _ = writeln!(t, "  X{} = [{}, {}]  p{} = {}", i + 1, x.lo, x.hi, i + 1, fmt_signed(&int(*d)));
        }
        part_json = json!(p
            .segments
            .iter()
            .zip(&p.displacements)
            .map(|(x, d)| json!({"lo": q(&x.lo), "hi": q(&x.hi), "p": d}))
            .collect::<Vec<_>>());
    }
    let mut graph = Value::Null;
    if let Some(sys) = &a.system {
        let _ = writeln!(t, "Markov graph: {} vertices, {} edges", sys.graph.len(), sys.graph.edges.len());
        graph = graph_json(&sys.graph);
    }
    if let Some(why) = &a.issue {
        let _ = writeln!(t, "exact route unavailable: {why}");
    }
    let rs = &a.rotation;
    t.push_str("rotation set:\n");
    for l in &rs.labeled {
        let _ = writeln!(t, "  {} = {}", l.label(), l.interval);
    }
    let _ = writeln!(t, "  Rot(F) = {}", union_text(&rs.components));
    let _ = writeln!(t, "periodic points (denominator <= {}):", s.max_den);
    let mut realized = Vec::new();
    for r in &a.realized {
        match &r.result {
            Ok(p) => {
                let _ = writeln!(
                    t,
                    "  {}: {}  F^{}(x) = x {} ({})",
                    fmt_signed(&r.rho),
                    p.point,
                    p.period,
                    plus(p.shift),
                    route_name(p.route)
                );
                realized.push(json!({
                    "rho": q(&r.rho), "point": p.point.to_string(), "period": p.period,
                    "shift": p.shift, "route": route_name(p.route),
                }));
            }
            Err(e) => {
                let _ = writeln!(t, "  {}: not realized: {e}", fmt_signed(&r.rho));
                realized.push(json!({"rho": q(&r.rho), "error": e}));
            }
        }
    }
    let exact = a.exact();
    let _ = writeln!(t, "status: {}", if exact { "exact" } else { "approximate" });
    let report = json!({
        "reach": {"height": q(&r.height), "exact": r.exact, "rounds": r.rounds},
        "xf": a.xf.as_ref().map(|x| json!([q(&x.lo), q(&x.hi)])),
        "sigma_like": a.sigma_like,
        "partition": part_json,
        "graph": graph,
        "issue": a.issue,
        "rotation": {
            "line": {"interval": interval_json(&rs.line.interval), "exact": rs.line.exact},
            "intervals": rs.labeled.iter().map(|l| json!({
                "label": l.label(), "interval": interval_json(&l.interval),
            })).collect::<Vec<_>>(),
            "components": rs.components.iter().map(interval_json).collect::<Vec<_>>(),
            "exact": rs.exact,
        },
        "realized": realized,
        "exact": exact,
    });
    Ok(Outcome {
        text: t,
        json: report,
        exact,
    })
}

pub fn rho_cmd(m: &PAMap, point: &str, s: &Settings) -> Result<Outcome> {
    let x = m.sigma().parse_point(point)?;
    let n = s.iters_or(10_000);
    let b = rho_bounds(m, &x, n);
    let text = match (&b.cycle, b.exact) {
        (Some((start, period)), true) => format!(
            "rho({x}) = {} (exact: the orbit repeats mod 1 with period {period} from step {start})\n",
            fmt_signed(&b.lower)
        ),
        _ => format!(
            "rho({x}) in [{}, {}] (estimated over iterations {}..={n})\n",
            fmt_signed(&b.lower),
            fmt_signed(&b.upper),
            (n / 2).max(1)
        ),
    };
    Ok(Outcome {
        text,
        json: json!({
            "point": x.to_string(), "lower": q(&b.lower), "upper": q(&b.upper),
            "exact": b.exact, "iterations": b.iterations, "cycle": b.cycle,
        }),
        exact: b.exact,
    })
}

pub fn periodic_cmd(m: PAMap, ratio: &str, s: &Settings) -> Result<Outcome> {
    let r = parse_rational(ratio).map_err(anyhow::Error::msg).context("rotation number")?;
    let cfg = s.rot();
    let sys = MarkovSystem::build(m.clone(), s.reach_cap)?;
    let rs = rotation_set(&sys, &cfg)?;
    if !rs.contains(&r) {
        bail!(
            "not found: {} is outside Rot(F) = {}",
            fmt_signed(&r),
            union_text(&rs.components)
        );
    }
    let p = periodic_point(&m, Some(&sys), &rs.line, &r)?;
    let verified = m.iterate(&p.point, p.period) == p.point.translate(p.shift);
    if !verified {
        bail!("certificate failed: F^{}({}) != x + {}", p.period, p.point, p.shift);
    }
    let text = format!(
        "x = {}\nF^{}(x) = x {} (verified by exact iteration)\nroute: {}\n",
        p.point,
        p.period,
        plus(p.shift),
        route_name(p.route)
    );
    Ok(Outcome {
        text,
        json: json!({
            "rho": q(&r), "point": p.point.to_string(), "period": p.period,
            "shift": p.shift, "route": route_name(p.route), "verified": verified,
        }),
        exact: rs.exact,
    })
}

pub fn graph_cmd(m: PAMap, s: &Settings) -> Result<(String, Value)> {
    let sys = MarkovSystem::build(m, s.reach_cap)?;
    Ok((sys.graph.to_dot(), graph_json(&sys.graph)))
}

pub fn sweep_cmd(m: PAMap, samples: usize, s: &Settings) -> Result<(String, Outcome)> {
    if samples == 0 {
        bail!("at least one sample is needed");
    }
    let n = s.iters_or(10_000);
    let cfg = AnalysisConfig {
        rot: s.rot(),
        max_den: 1,
    };
    let a = analyze(m.clone(), &cfg)?;
    let h = a.reach.height.clone();
    let rows = sweep(&m, &sweep_points(&m, &h, samples), n, s.exec);
    let slack = Rational::new(2.into(), (n as i64).into());
    let inside = |x: &Rational, tol: &Rational| {
        a.rotation
            .components
            .iter()
            .any(|c| &(&c.lo - tol) <= x && x <= &(&c.hi + tol))
    };
    let mut outside = 0;
    let mut estimated = 0;
    for r in &rows {
        let tol = if r.bounds.exact { int(0) } else { slack.clone() };
        estimated += usize::from(!r.bounds.exact);
        if !inside(&r.bounds.lower, &tol) || !inside(&r.bounds.upper, &tol) {
            outside += 1;
        }
    }
    let text = format!(
        "{} rows ({} exact, {estimated} estimated over {n} iterations); {outside} outside Rot(F) = {}\n",
        rows.len(),
        rows.len() - estimated,
        union_text(&a.rotation.components)
    );
    Ok((
        sweep_csv(&rows),
        Outcome {
            text,
            json: json!({
                "rows": rows.len(), "estimated": estimated, "outside": outside,
                "rotation": a.rotation.components.iter().map(interval_json).collect::<Vec<_>>(),
            }),
            exact: estimated == 0 && outside == 0 && a.exact(),
        },
    ))
}

/// Comparison of one component's extreme cycle means against brute force.
#[derive(Debug)]
pub struct ComponentCheck {
    pub vertices: Vec<usize>,
    pub karp: (Rational, Rational),
    pub simple: Option<(Rational, Rational)>,
    pub walk_means: BTreeSet<Rational>,
    pub pass: bool,
}

/// Checks each range against simple-cycle enumeration and closed walks of
/// length at most `max_len`: the extremes must agree and no walk mean may
/// leave the range.
pub fn oracle_verdict(g: &MarkovGraph, ranges: &[CycleRange], max_len: usize) -> Vec<ComponentCheck> {
    ranges
        .iter()
        .map(|r| {
            let simple = (r.vertices.len() <= 20).then(|| simple_cycle_extremes(g, &r.vertices)).flatten();
            let walk_means = closed_walk_means(g, &r.vertices, max_len);
            let within = walk_means.iter().all(|x| &r.min <= x && x <= &r.max);
            let agree = simple.as_ref().is_none_or(|(lo, hi)| lo == &r.min && hi == &r.max);
            ComponentCheck {
                vertices: r.vertices.clone(),
                karp: (r.min.clone(), r.max.clone()),
                simple,
                walk_means,
                pass: within && agree,
            }
        })
        .collect()
}

pub fn oracle_cmd(m: PAMap, max_len: usize, s: &Settings) -> Result<Outcome> {
    let sys = MarkovSystem::build(m, s.reach_cap)?;
    let ranges = cycle_mean_range(&sys.graph, None, s.exec);
    let checks = oracle_verdict(&sys.graph, &ranges, max_len);
    let mut t = String::new();
    let mut comps = Vec::new();
    for c in &checks {
        let means: Vec<String> = c.walk_means.iter().map(fmt_signed).collect();
        let _ = writeln!(t, "component {:?}:", c.vertices);
        let _ = writeln!(t, "  cycle-mean range [{}, {}]", fmt_signed(&c.karp.0), fmt_signed(&c.karp.1));
        if let Some((lo, hi)) = &c.simple {
            let _ = writeln!(t, "  simple cycles   [{}, {}]", fmt_signed(lo), fmt_signed(hi));
        }
        let _ = writeln!(t, "  closed walks of length <= {max_len}: {}", means.join(" "));
        let _ = writeln!(t, "  {}", if c.pass { "PASS" } else { "FAIL" });
        comps.push(json!({
            "vertices": c.vertices,
            "range": [q(&c.karp.0), q(&c.karp.1)],
            "simple": c.simple.as_ref().map(|(a, b)| json!([q(a), q(b)])),
            "walk_means": means,
            "pass": c.pass,
        }));
    }
    let pass = checks.iter().all(|c| c.pass);
    let _ = writeln!(t, "{}", if pass { "PASS" } else { "FAIL" });
    if !pass {
        bail!("{t}oracle disagrees with the cycle-mean range");
    }
    Ok(Outcome {
        text: t,
        json: json!({"components": comps, "pass": pass}),
        exact: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use sigmarot::fixtures::sigma_example;
    use sigmarot::rational::rat;

    #[test]
    fn corrupted_range_fails() {
        let sys = MarkovSystem::build(sigma_example(), 64).unwrap();
        let mut ranges = cycle_mean_range(&sys.graph, None, Execution::Sequential);
        assert!(oracle_verdict(&sys.graph, &ranges, 3).iter().all(|c| c.pass));
        ranges[0].max = rat(1, 2);
        let checks = oracle_verdict(&sys.graph, &ranges, 3);
        assert!(!checks[0].pass);
    }

    #[test]
    fn fixture_oracle_attains_endpoints() {
        let sys = MarkovSystem::build(sigma_example(), 64).unwrap();
        let ranges = cycle_mean_range(&sys.graph, None, Execution::Sequential);
        let c = &oracle_verdict(&sys.graph, &ranges, 3)[0];
        assert!(c.walk_means.contains(&int(0)) && c.walk_means.contains(&int(1)));
    }
}
