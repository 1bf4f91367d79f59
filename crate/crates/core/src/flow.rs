//! Vertex-disjoint paths by unit-capacity max-flow on the split graph.
//!
//! Each window vertex `v` becomes `v_in -> v_out` with capacity 1. Indices
//! follow sorted token order and augmenting paths are found by BFS, so
//! results are reproducible.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::Result;
use crate::graph::LazyGraph;
use crate::token::VertexToken;

const INF: i32 = i32::MAX / 4;

struct Net {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
}

impl Net {
    fn new(n: usize) -> Self {
        Net {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, c: i32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        seen
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via: Vec<Option<usize>> = vec![None; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            if u == t {
                break;
            }
            for &e in &self.head[u] {
                let w = self.to[e];
                if self.cap[e] > 0 && !seen[w] {
                    seen[w] = true;
                    via[w] = Some(e);
                    q.push_back(w);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut cur = t;
        while let Some(e) = via[cur] {
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            cur = self.to[e ^ 1];
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub value: usize,
    /// Vertex-disjoint source-to-sink paths, one per unit of flow.
    pub paths: Vec<Vec<VertexToken>>,
    /// Minimum vertex separator, present when the flow ran to completion.
    pub separator: Option<Vec<VertexToken>>,
}

/// Maximum number of vertex-disjoint paths inside `window` from `sources`
/// to `sinks`, stopping early once `limit` paths are found. A vertex in both
/// sets counts as a trivial path.
pub fn disjoint_paths(
    g: &LazyGraph,
    window: &BTreeSet<VertexToken>,
    sources: &BTreeSet<VertexToken>,
    sinks: &BTreeSet<VertexToken>,
    limit: Option<usize>,
) -> Result<FlowResult> {
    let verts: Vec<&VertexToken> = window.iter().collect();
    let index: HashMap<&VertexToken, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = verts.len();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Net::new(2 * n + 2);
    for (i, v) in verts.iter().enumerate() {
        if sources.contains(*v) {
            net.add(s, 2 * i, INF);
        }
    }
    for (i, v) in verts.iter().enumerate() {
        net.add(2 * i, 2 * i + 1, 1);
        for w in g.neighbors(v)? {
            if let Some(&j) = index.get(&w) {
                net.add(2 * i + 1, 2 * j, INF);
            }
        }
        if sinks.contains(*v) {
            net.add(2 * i + 1, t, INF);
        }
    }
    let mut value = 0;
    while limit.is_none_or(|l| value < l) && net.augment(s, t) {
        value += 1;
    }
    let separator = if limit.is_some_and(|l| value >= l) {
        None
    } else {
        let seen = net.reachable(s);
        Some(
            (0..n)
                .filter(|&i| seen[2 * i] && !seen[2 * i + 1])
                .map(|i| verts[i].clone())
                .collect(),
        )
    };
    // Decompose: flow on an edge e is the reverse capacity net.cap[e ^ 1]
    // for forward edges.
    let mut used = vec![false; net.to.len()];
    let mut paths = Vec::new();
    for &e0 in &net.head[s] {
        if e0 % 2 != 0 || net.cap[e0 ^ 1] == 0 {
            continue;
        }
        let mut flow_left = net.cap[e0 ^ 1];
        while flow_left > 0 {
            flow_left -= 1;
            let mut path = Vec::new();
            let mut node = net.to[e0];
            loop {
                let i = node / 2;
                path.push(verts[i].clone());
                // node is v_in; move to v_out then to the next v_in or t
                let out = 2 * i + 1;
                let mut next = None;
                for &e in &net.head[out] {
                    if e % 2 == 0 && !used[e] && net.cap[e ^ 1] > 0 {
                        next = Some(e);
                        break;
                    }
                }
                let Some(e) = next else { break };
                if net.to[e] != t {
                    used[e] = true;
                }
                if net.to[e] == t {
                    break;
                }
                node = net.to[e];
            }
            paths.push(path);
        }
    }
    Ok(FlowResult {
        value,
        paths,
        separator,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ball;

    fn set(v: &[&str]) -> BTreeSet<VertexToken> {
        v.iter().map(|s| VertexToken::from(*s)).collect()
    }

    #[test]
    fn tree_has_singleton_cut() {
        let g = LazyGraph::regular_tree(3);
        let w = ball(&g, &g.root(), 4).unwrap().vertices;
        let r = disjoint_paths(&g, &w, &set(&["0.1.0", "0.1"]), &set(&["1.0.1", "2"]), None).unwrap();
        assert_eq!(r.value, 1);
        // the cut nearest the sources
        assert_eq!(r.separator.unwrap(), vec![VertexToken::from("0.1")]);
        let r = disjoint_paths(&g, &w, &set(&["e", "0", "0.1"]), &set(&["e", "1", "1.0"]), None).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.separator.unwrap(), vec![VertexToken::from("e")]);
    }

    #[test]
    fn square_rows_have_many_rungs() {
        let g = LazyGraph::square();
        let w = ball(&g, &g.root(), 12).unwrap().vertices;
        let a: BTreeSet<_> = (0..8).map(|x| crate::token::coord2(x, 0)).collect();
        let b: BTreeSet<_> = (0..8).map(|x| crate::token::coord2(x, 1)).collect();
        let r = disjoint_paths(&g, &w, &a, &b, Some(5)).unwrap();
        assert_eq!(r.value, 5);
        assert_eq!(r.paths.len(), 5);
        for p in &r.paths {
            assert_eq!(p.len(), 2, "{p:?}");
        }
        let mut all: Vec<_> = r.paths.iter().flatten().collect();
        let before = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), before);
    }

    #[test]
    fn shared_vertex_is_a_trivial_path() {
        let g = LazyGraph::square();
        let w = ball(&g, &g.root(), 3).unwrap().vertices;
        let r = disjoint_paths(&g, &w, &set(&["0,0"]), &set(&["0,0"]), None).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.paths, vec![vec![VertexToken::from("0,0")]]);
    }
}
