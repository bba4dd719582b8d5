//! Brute-force cycle enumeration used to cross-check Karp's algorithm.

use std::collections::{BTreeMap, BTreeSet};

use crate::cycles::local_edges;
use crate::markov::MarkovGraph;
use crate::rational::Rational;

/// Means of all closed walks of length `1..=max_len` inside `comp`.
pub fn closed_walk_means(g: &MarkovGraph, comp: &[usize], max_len: usize) -> BTreeSet<Rational> {
    let (local, _) = local_edges(g, comp, |w| w as i128);
    let n = comp.len();
    let mut out = BTreeSet::new();
    for s in 0..n {
        let mut layer: Vec<BTreeSet<i128>> = vec![BTreeSet::new(); n];
        layer[s].insert(0);
        for len in 1..=max_len {
            let mut next: Vec<BTreeSet<i128>> = vec![BTreeSet::new(); n];
            for &(u, v, w) in &local {
                for x in &layer[u] {
                    next[v].insert(x + w);
                }
            }
            for w in &next[s] {
                out.insert(Rational::new((*w).into(), (len as i128).into()));
            }
            layer = next;
        }
    }
    out
}

/// Means of all closed walks of length at most `max_len`, over the whole graph.
pub fn oracle_cycle_enumeration(g: &MarkovGraph, max_len: usize) -> BTreeSet<Rational> {
    let all: Vec<usize> = (0..g.len()).collect();
    closed_walk_means(g, &all, max_len)
}

/// Exhaustive `(min, max)` mean over simple cycles inside `comp`, by dynamic
/// programming over vertex subsets. Intended for components of at most ~16
/// vertices.
pub fn simple_cycle_extremes(g: &MarkovGraph, comp: &[usize]) -> Option<(Rational, Rational)> {
    let (local, _) = local_edges(g, comp, |w| w as i128);
    let n = comp.len();
    assert!(n <= 20, "component too large for subset enumeration");
    let mut adj: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n];
    for &(u, v, w) in &local {
        adj[u].push((v, w));
    }
    let mut best: Option<(Rational, Rational)> = None;
    let mut note = |w: i128, len: usize| {
        let m = Rational::new(w.into(), (len as i128).into());
        best = Some(match best.take() {
            None => (m.clone(), m),
            Some((a, b)) => (a.min(m.clone()), b.max(m)),
        });
    };
    for s in 0..n {
        // paths from s through vertices > s: mask over vertices, set of weights per endpoint
        let mut paths: BTreeMap<(u32, usize), BTreeSet<i128>> = BTreeMap::new();
        paths.entry((1 << s, s)).or_default().insert(0);
        let mut frontier: Vec<(u32, usize)> = vec![(1 << s, s)];
        while let Some(key) = frontier.pop() {
            let weights = paths[&key].clone();
            let (mask, v) = key;
            let len = mask.count_ones() as usize;
            for &(w, ew) in &adj[v] {
                if w == s {
                    for x in &weights {
                        note(x + ew, len);
                    }
                } else if w > s && mask & (1 << w) == 0 {
                    let nk = (mask | (1 << w), w);
                    let entry = paths.entry(nk).or_default();
                    let before = entry.len();
                    entry.extend(weights.iter().map(|x| x + ew));
                    if entry.len() != before {
                        frontier.push(nk);
                    }
                }
            }
        }
    }
    best
}

/// All simple cycles (as edge-index lists), each listed once starting from
/// its smallest vertex. Stops after `limit` cycles.
pub fn simple_cycles(g: &MarkovGraph, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in 0..g.len() {
        let mut on_path = vec![false; g.len()];
        let mut path: Vec<usize> = Vec::new();
        dfs(g, s, s, &mut on_path, &mut path, &mut out, limit);
        if out.len() >= limit {
            break;
        }
    }
    out
}

fn dfs(
    g: &MarkovGraph,
    s: usize,
    v: usize,
    on_path: &mut [bool],
    path: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    limit: usize,
) {
    on_path[v] = true;
    for ei in g.out_edges(v) {
        if out.len() >= limit {
            break;
        }
        let w = g.edges[ei].to;
        if w == s {
            let mut c = path.clone();
            c.push(ei);
            out.push(c);
        } else if w > s && !on_path[w] {
            path.push(ei);
            dfs(g, s, w, on_path, path, out, limit);
            path.pop();
        }
    }
    on_path[v] = false;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{Edge, Vertex};
    use crate::rational::int;
    use crate::space::BranchSegment;

    #[test]
    fn enumerations_agree_on_a_triangle() {
        let vs = (0..3)
            .map(|_| Vertex { segment: BranchSegment { copy: 0, lo: int(0), hi: int(1) }, part: 0 })
            .collect();
        let e = [(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 0, -2), (1, 0, 0)];
        let g = MarkovGraph::from_edges(vs, e.iter().map(|&(from, to, weight)| Edge { from, to, weight }).collect());
        let cyc = simple_cycles(&g, 100);
        assert_eq!(cyc.len(), 3);
        let ext = simple_cycle_extremes(&g, &[0, 1, 2]).unwrap();
        assert_eq!(ext, (int(-2), int(1)));
        let walks = oracle_cycle_enumeration(&g, 3);
        assert_eq!(walks.first(), Some(&int(-2)));
        assert_eq!(walks.last(), Some(&int(1)));
    }
}
