//! Strongly connected components and extreme cycle means (Karp).

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::markov::MarkovGraph;
use crate::par::{self, Execution};
use crate::rational::Rational;

/// Extreme cycle means of one strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRange {
    /// Vertices of the component, sorted.
    pub vertices: Vec<usize>,
    pub min: Rational,
    pub max: Rational,
    /// Edge indices (into the graph) of a cycle attaining `min`.
    pub min_cycle: Vec<usize>,
    pub max_cycle: Vec<usize>,
}

/// Components that carry at least one cycle, restricted to `keep` when given.
/// Ordered by smallest vertex.
pub fn cyclic_components(g: &MarkovGraph, keep: Option<&[bool]>) -> Vec<Vec<usize>> {
    let kept = |v: usize| keep.is_none_or(|k| k[v]);
    let mut pg: DiGraph<usize, ()> = DiGraph::with_capacity(g.len(), g.edges.len());
    let nodes: Vec<_> = (0..g.len()).map(|v| pg.add_node(v)).collect();
    for e in &g.edges {
        if kept(e.from) && kept(e.to) {
            pg.add_edge(nodes[e.from], nodes[e.to], ());
        }
    }
    let mut out: Vec<Vec<usize>> = tarjan_scc(&pg)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| pg[n]).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| {
            c.iter().all(|&v| kept(v))
                && (c.len() > 1 || g.edges.iter().any(|e| e.from == c[0] && e.to == c[0]))
        })
        .collect();
    out.sort();
    out
}

/// Minimum cycle mean of a strongly connected graph on `n` vertices with
/// integer-weighted edges `(u, v, w)` (Karp's recurrence).
pub fn karp_min_mean(n: usize, edges: &[(usize, usize, i128)]) -> Option<Rational> {
    if n == 0 || edges.is_empty() {
        return None;
    }
    let mut d: Vec<Vec<Option<i128>>> = vec![vec![None; n]; n + 1];
    d[0][0] = Some(0);
    for k in 1..=n {
        for &(u, v, w) in edges {
            if let Some(du) = d[k - 1][u] {
                let cand = du + w;
                if d[k][v].is_none_or(|x| cand < x) {
                    d[k][v] = Some(cand);
                }
            }
        }
    }
    let mut best: Option<Rational> = None;
    for v in 0..n {
        let Some(dn) = d[n][v] else { continue };
        let mut worst: Option<Rational> = None;
        for (k, row) in d.iter().enumerate().take(n) {
            if let Some(dk) = row[v] {
                let val = Rational::new((dn - dk).into(), ((n - k) as i128).into());
                if worst.as_ref().is_none_or(|x| &val > x) {
                    worst = Some(val);
                }
            }
        }
        if let Some(w) = worst {
            if best.as_ref().is_none_or(|b| &w < b) {
                best = Some(w);
            }
        }
    }
    best
}

/// A cycle (list of indices into `edges`) all of whose edges have reduced
/// weight zero under potentials, i.e. a cycle of mean `num/den` when that is
/// the minimum mean. Depth-first from the lowest vertex, edges in order.
pub fn tight_cycle(n: usize, edges: &[(usize, usize, i128)], num: i128, den: i128) -> Option<Vec<usize>> {
    let red: Vec<i128> = edges.iter().map(|e| e.2 * den - num).collect();
    let mut pot = vec![0i128; n];
    for _ in 0..n {
        let mut changed = false;
        for (i, &(u, v, _)) in edges.iter().enumerate() {
            if pot[u] + red[i] < pot[v] {
                pot[v] = pot[u] + red[i];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        if pot[u] + red[i] == pot[v] {
            adj[u].push(i);
        }
    }
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut path: Vec<usize> = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < adj[v].len() {
                let ei = adj[v][*next];
                *next += 1;
                let w = edges[ei].1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        path.push(ei);
                        stack.push((w, 0));
                    }
                    1 => {
                        let pos = path.iter().position(|&e| edges[e].0 == w).unwrap_or(path.len());
                        let mut cyc: Vec<usize> = path[pos..].to_vec();
                        cyc.push(ei);
                        return Some(cyc);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
                path.pop();
            }
        }
    }
    None
}

/// Minimum mean and a cycle attaining it (edge indices into `edges`).
pub fn min_mean_cycle(n: usize, edges: &[(usize, usize, i128)]) -> Option<(Rational, Vec<usize>)> {
    let mu = karp_min_mean(n, edges)?;
    let num: i128 = mu.numer().try_into().ok()?;
    let den: i128 = mu.denom().try_into().ok()?;
    let cyc = tight_cycle(n, edges, num, den)?;
    Some((mu, cyc))
}

/// Maximum mean and a cycle attaining it.
pub fn max_mean_cycle(n: usize, edges: &[(usize, usize, i128)]) -> Option<(Rational, Vec<usize>)> {
    let neg: Vec<_> = edges.iter().map(|&(u, v, w)| (u, v, -w)).collect();
    let (mu, cyc) = min_mean_cycle(n, &neg)?;
    Some((-mu, cyc))
}

/// Local copy of a component: `(edges with local endpoints, global edge ids)`.
pub(crate) fn local_edges(
    g: &MarkovGraph,
    comp: &[usize],
    weight: impl Fn(i64) -> i128,
) -> (Vec<(usize, usize, i128)>, Vec<usize>) {
    let idx = |v: usize| comp.binary_search(&v).ok();
    let mut local = Vec::new();
    let mut ids = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if let (Some(a), Some(b)) = (idx(e.from), idx(e.to)) {
            local.push((a, b, weight(e.weight)));
            ids.push(i);
        }
    }
    (local, ids)
}

fn range_of(g: &MarkovGraph, comp: Vec<usize>) -> CycleRange {
    let (local, ids) = local_edges(g, &comp, |w| w as i128);
    let (min, cmin) = min_mean_cycle(comp.len(), &local).expect("component has a cycle");
    let (max, cmax) = max_mean_cycle(comp.len(), &local).expect("component has a cycle");
    CycleRange {
        vertices: comp,
        min,
        max,
        min_cycle: cmin.into_iter().map(|i| ids[i]).collect(),
        max_cycle: cmax.into_iter().map(|i| ids[i]).collect(),
    }
}

/// `[min, max]` of cycle means for every cyclic component of the graph
/// (optionally restricted to the vertices flagged in `keep`).
pub fn cycle_mean_range(g: &MarkovGraph, keep: Option<&[bool]>, exec: Execution) -> Vec<CycleRange> {
    let comps = cyclic_components(g, keep);
    par::map(exec, &comps, |c| range_of(g, c.clone()))
}

/// Mean of a cycle given by edge indices.
pub fn cycle_mean(g: &MarkovGraph, cycle: &[usize]) -> Rational {
    let w: i64 = cycle.iter().map(|&i| g.edges[i].weight).sum();
    Rational::new(w.into(), (cycle.len() as i64).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{Edge, Vertex};
    use crate::rational::{int, rat};
    use crate::space::BranchSegment;

    fn graph(n: usize, e: &[(usize, usize, i64)]) -> MarkovGraph {
        let vs = (0..n)
            .map(|_| Vertex {
                segment: BranchSegment { copy: 0, lo: int(0), hi: int(1) },
                part: 0,
            })
            .collect();
        MarkovGraph::from_edges(
            vs,
            e.iter().map(|&(from, to, weight)| Edge { from, to, weight }).collect(),
        )
    }

    #[test]
    fn karp_on_small_graph() {
        let g = graph(3, &[(0, 1, 1), (1, 0, 0), (1, 2, 3), (2, 1, 2), (2, 2, -1)]);
        let r = cycle_mean_range(&g, None, Execution::Sequential);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].min, int(-1));
        assert_eq!(r[0].max, rat(5, 2));
        assert_eq!(cycle_mean(&g, &r[0].min_cycle), int(-1));
        assert_eq!(cycle_mean(&g, &r[0].max_cycle), rat(5, 2));
    }

    #[test]
    fn components_respect_mask() {
        let g = graph(3, &[(0, 0, 0), (1, 2, 1), (2, 1, 0)]);
        assert_eq!(cyclic_components(&g, None), vec![vec![0], vec![1, 2]]);
        assert_eq!(cyclic_components(&g, Some(&[true, true, false])), vec![vec![0]]);
    }
}
