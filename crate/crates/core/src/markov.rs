//! Markov partitions of the branch region and their transition graphs.

use std::collections::BTreeSet;

use num_traits::One;

use crate::covering::{covers, CoverStep};
use crate::dynamics::{Partition, Region};
use crate::pamap::PAMap;
use crate::rational::Rational;
use crate::space::{BranchSegment, Leg};

/// A closed piece of some `X_i` on which `F` is affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub segment: BranchSegment,
    /// 0-based index of the partition element containing the vertex.
    pub part: usize,
}

/// `F(from) ⊇ to + weight`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovGraph {
    pub vertices: Vec<Vertex>,
    /// Sorted by `(from, to, weight)`.
    pub edges: Vec<Edge>,
}

impl MarkovGraph {
    pub fn from_edges(vertices: Vec<Vertex>, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        MarkovGraph { vertices, edges }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Indices of edges leaving `v`.
    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.edges.partition_point(|e| e.from < v);
        (start..self.edges.len()).take_while(move |&i| self.edges[i].from == v)
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph markov {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!(
                "  v{i} [label=\"[{}, {}] (X{})\"];\n",
                v.segment.lo,
                v.segment.hi,
                v.part + 1
            ));
        }
        for e in &self.edges {
            s.push_str(&format!("  v{} -> v{} [label=\"{}\"];\n", e.from, e.to, e.weight));
        }
        s.push_str("}\n");
        s
    }
}

/// Refines each `X_i` at the break points of `F` and checks the Markov
/// condition: every vertex endpoint maps to a vertex endpoint, into the line
/// region, or to a point of `X_F + j` outside all vertices.
pub fn markov_partition(m: &PAMap, part: &Partition) -> Result<Vec<Vertex>, Vec<String>> {
    let mut vertices = Vec::new();
    for (i, x) in part.segments.iter().enumerate() {
        if x.is_degenerate() {
            vertices.push(Vertex {
                segment: x.clone(),
                part: i,
            });
            continue;
        }
        let mut cuts = vec![x.lo.clone()];
        for b in m.branch_breaks() {
            if x.lo < b.at && b.at < x.hi {
                cuts.push(b.at.clone());
            }
        }
        cuts.push(x.hi.clone());
        for w in cuts.windows(2) {
            vertices.push(Vertex {
                segment: BranchSegment {
                    copy: 0,
                    lo: w[0].clone(),
                    hi: w[1].clone(),
                },
                part: i,
            });
        }
    }
    let region = Region {
        sigma: m.sigma().clone(),
        h: part.h.clone(),
    };
    let ends: BTreeSet<Rational> = vertices
        .iter()
        .flat_map(|v| [v.segment.lo.clone(), v.segment.hi.clone()])
        .collect();
    let mut bad = Vec::new();
    for e in &ends {
        let y = m.evaluate(&m.sigma().branch_point(0, e.clone()));
        if let Some((_, s)) = region.coords(&y) {
            if s == part.h || ends.contains(&s) {
                continue;
            }
            if let Some(v) = vertices
                .iter()
                .find(|v| v.segment.lo < s && s < v.segment.hi)
            {
                bad.push(format!(
                    "F({e}) = {y} falls inside vertex [{}, {}]",
                    v.segment.lo, v.segment.hi
                ));
            }
        }
    }
    if bad.is_empty() {
        Ok(vertices)
    } else {
        Err(bad)
    }
}

/// Height interval of `X_F + j` met by the arc `F(v)`, for every `j`.
fn image_windows(m: &PAMap, region: &Region, v: &Vertex) -> Vec<(i64, Rational, Rational)> {
    let sigma = m.sigma();
    let a = m.evaluate(&sigma.branch_point(0, v.segment.lo.clone()));
    let b = m.evaluate(&sigma.branch_point(0, v.segment.hi.clone()));
    let g = sigma.geodesic(&a, &b);
    let mut copies: Vec<i64> = [&a, &b]
        .iter()
        .filter_map(|p| sigma.branch_coords(p).map(|c| c.0))
        .collect();
    for leg in &g.legs {
        match leg {
            Leg::Branch { copy, .. } => copies.push(*copy),
            Leg::Line { from, to } if region.h == Rational::default() => {
                let (x, y) = if from <= to { (from, to) } else { (to, from) };
                let c = sigma.attach();
                copies.extend(crate::rational::ceil_i64(&(x - c))..=crate::rational::floor_i64(&(y - c)));
            }
            _ => {}
        }
    }
    copies.sort_unstable();
    copies.dedup();
    let mut out = Vec::new();
    for j in copies {
        if let Some((d0, d1)) = g.copy_window(sigma, j, &region.h, false) {
            let s0 = sigma.height(&g.point_at(sigma, &d0));
            let s1 = sigma.height(&g.point_at(sigma, &d1));
            let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
            out.push((j, lo, hi.min(Rational::one())));
        }
    }
    out
}

/// Transition graph: an edge `A -> B` of weight `j` whenever `F(A)`
/// contains `B + j`.
pub fn build_markov_graph(m: &PAMap, part: &Partition, vertices: Vec<Vertex>) -> MarkovGraph {
    let region = Region {
        sigma: m.sigma().clone(),
        h: part.h.clone(),
    };
    let mut edges = Vec::new();
    for (ia, a) in vertices.iter().enumerate() {
        for (j, lo, hi) in image_windows(m, &region, a) {
            for (ib, b) in vertices.iter().enumerate() {
                if lo <= b.segment.lo && b.segment.hi <= hi {
                    edges.push(Edge {
                        from: ia,
                        to: ib,
                        weight: j,
                    });
                }
            }
        }
    }
    MarkovGraph::from_edges(vertices, edges)
}

/// The covering `A => B + j` behind an edge, with `A` on copy 0.
pub fn edge_step(m: &PAMap, region: &Region, g: &MarkovGraph, e: &Edge) -> CoverStep {
    let a = &g.vertices[e.from].segment;
    let b = &g.vertices[e.to].segment;
    covers(m, region, a, b, e.weight, 1)
        .expect("vertices lie in the branch region")
        .expect("an edge is a covering")
}
