//! Breadth-first search, balls and capped distances.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LazyGraph;
use crate::token::VertexToken;

#[derive(Clone, Debug, Default)]
pub struct Bfs {
    pub dist: HashMap<VertexToken, usize>,
    pub parent: HashMap<VertexToken, VertexToken>,
    pub order: Vec<VertexToken>,
    /// Smallest depth at which an import frontier vertex was expanded.
    /// Anything at or beyond `min_frontier + 1` may be inexact.
    pub min_frontier: Option<usize>,
}

impl Bfs {
    pub fn path_to(&self, v: &VertexToken) -> Option<Vec<VertexToken>> {
        if !self.dist.contains_key(v) {
            return None;
        }
        let mut out = vec![v.clone()];
        let mut cur = v;
        while let Some(p) = self.parent.get(cur) {
            out.push(p.clone());
            cur = p;
        }
        out.reverse();
        Some(out)
    }

    fn exact_up_to(&self) -> usize {
        self.min_frontier.map_or(usize::MAX, |f| f + 1)
    }
}

/// Multi-source BFS up to depth `cap`, restricted to vertices accepted by
/// `allow` (sources are always included). Neighbors are visited in sorted
/// order so parents are the lexicographically first discoverers.
pub fn bfs<F>(g: &LazyGraph, sources: &[VertexToken], cap: usize, allow: F) -> Result<Bfs>
where
    F: Fn(&VertexToken) -> bool,
{
    let mut out = Bfs::default();
    let mut queue = VecDeque::new();
    for s in sources {
        g.validate(s)?;
        if !out.dist.contains_key(s) {
            out.dist.insert(s.clone(), 0);
            out.order.push(s.clone());
            queue.push_back(s.clone());
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = out.dist[&u];
        if du >= cap {
            continue;
        }
        if g.is_frontier(&u) {
            out.min_frontier = Some(out.min_frontier.map_or(du, |m| m.min(du)));
        }
        for w in g.neighbors(&u)? {
            if out.dist.contains_key(&w) || !allow(&w) {
                continue;
            }
            out.dist.insert(w.clone(), du + 1);
            out.parent.insert(w.clone(), u.clone());
            out.order.push(w.clone());
            queue.push_back(w);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dist {
    Exact(usize),
    Exceeds(usize),
}

impl Dist {
    pub fn exact(self) -> Option<usize> {
        match self {
            Dist::Exact(d) => Some(d),
            Dist::Exceeds(_) => None,
        }
    }
}

/// Distance if at most `cap`.
pub fn dist(g: &LazyGraph, u: &VertexToken, v: &VertexToken, cap: usize) -> Result<Dist> {
    g.validate(v)?;
    if u == v {
        g.validate(u)?;
        return Ok(Dist::Exact(0));
    }
    // Bidirectional search would be faster; balls here stay small.
    let mut seen: HashMap<VertexToken, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    g.validate(u)?;
    seen.insert(u.clone(), 0);
    queue.push_back(u.clone());
    let mut min_frontier: Option<usize> = None;
    while let Some(x) = queue.pop_front() {
        let dx = seen[&x];
        if dx >= cap {
            break;
        }
        if g.is_frontier(&x) && min_frontier.is_none() {
            min_frontier = Some(dx);
        }
        for w in g.neighbors(&x)? {
            if seen.contains_key(&w) {
                continue;
            }
            if &w == v {
                let d = dx + 1;
                if min_frontier.is_some_and(|f| f + 1 < d) {
                    return Err(Error::WindowExhausted(format!("distance {u}-{v} crosses the import frontier")));
                }
                return Ok(Dist::Exact(d));
            }
            seen.insert(w.clone(), dx + 1);
            queue.push_back(w);
        }
    }
    if min_frontier.is_some() {
        return Err(Error::WindowExhausted(format!("distance {u}-{v} undecided inside the import")));
    }
    Ok(Dist::Exceeds(cap))
}

/// Lexicographically tie-broken shortest path from `from` to the first
/// vertex satisfying `is_target`, moving only through allowed vertices.
pub fn shortest_path<F, T>(
    g: &LazyGraph,
    from: &VertexToken,
    cap: usize,
    allow: F,
    is_target: T,
) -> Result<Option<Vec<VertexToken>>>
where
    F: Fn(&VertexToken) -> bool,
    T: Fn(&VertexToken) -> bool,
{
    g.validate(from)?;
    if is_target(from) {
        return Ok(Some(vec![from.clone()]));
    }
    let mut parent: HashMap<VertexToken, VertexToken> = HashMap::new();
    let mut depth: HashMap<VertexToken, usize> = HashMap::new();
    depth.insert(from.clone(), 0);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(x) = queue.pop_front() {
        let dx = depth[&x];
        if dx >= cap {
            continue;
        }
        for w in g.neighbors(&x)? {
            if depth.contains_key(&w) {
                continue;
            }
            let hit = is_target(&w);
            if !hit && !allow(&w) {
                continue;
            }
            depth.insert(w.clone(), dx + 1);
            parent.insert(w.clone(), x.clone());
            if hit {
                let mut path = vec![w.clone()];
                let mut cur = &w;
                while let Some(p) = parent.get(cur) {
                    path.push(p.clone());
                    cur = p;
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(w);
        }
    }
    Ok(None)
}

/// Explicit vertex and edge sets. Edges are stored with the smaller token first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: BTreeSet<VertexToken>,
    pub edges: BTreeSet<(VertexToken, VertexToken)>,
}

impl Subgraph {
    pub fn add_edge(&mut self, a: &VertexToken, b: &VertexToken) {
        self.vertices.insert(a.clone());
        self.vertices.insert(b.clone());
        let e = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.edges.insert(e);
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A ball together with its induced edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteWindow {
    pub center: VertexToken,
    pub radius: usize,
    pub vertices: BTreeSet<VertexToken>,
    pub edges: BTreeSet<(VertexToken, VertexToken)>,
    pub frontier: BTreeSet<VertexToken>,
}

impl FiniteWindow {
    pub fn contains(&self, v: &VertexToken) -> bool {
        self.vertices.contains(v)
    }
}

pub fn ball(g: &LazyGraph, center: &VertexToken, radius: usize) -> Result<FiniteWindow> {
    let b = bfs(g, std::slice::from_ref(center), radius, |_| true)?;
    if b.exact_up_to() <= radius {
        return Err(Error::WindowExhausted(format!(
            "ball of radius {radius} around {center} reaches the import frontier"
        )));
    }
    let vertices: BTreeSet<VertexToken> = b.order.iter().cloned().collect();
    let mut edges = BTreeSet::new();
    for u in &vertices {
        for w in g.neighbors(u)? {
            if u < &w && vertices.contains(&w) {
                edges.insert((u.clone(), w));
            }
        }
    }
    let frontier = b
        .dist
        .iter()
        .filter(|(_, &d)| d == radius)
        .map(|(v, _)| v.clone())
        .collect();
    Ok(FiniteWindow {
        center: center.clone(),
        radius,
        vertices,
        edges,
        frontier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Family, Import};

    #[test]
    fn tiny_balls() {
        let w = ball(&LazyGraph::hex(), &"0,0".into(), 0).unwrap();
        assert_eq!(w.vertices.len(), 1);
        assert!(w.edges.is_empty());
        assert_eq!(w.frontier.len(), 1);
        let w = ball(&LazyGraph::square(), &"0,0".into(), 2).unwrap();
        assert_eq!(w.vertices.len(), 13);
    }

    #[test]
    fn tree_ball_sizes() {
        let g = LazyGraph::regular_tree(3);
        for r in 1..=10usize {
            let w = ball(&g, &g.root(), r).unwrap();
            assert_eq!(w.vertices.len(), 3 * (1 << r) - 2);
        }
    }

    #[test]
    fn distances() {
        let g = LazyGraph::square();
        assert_eq!(dist(&g, &"0,0".into(), &"3,4".into(), 10).unwrap(), Dist::Exact(7));
        assert_eq!(dist(&g, &"0,0".into(), &"3,4".into(), 6).unwrap(), Dist::Exceeds(6));
        assert_eq!(dist(&g, &"5,5".into(), &"5,5".into(), 0).unwrap(), Dist::Exact(0));
    }

    #[test]
    fn import_frontier_is_reported() {
        let imp = Import::parse("a: b\nb: a c\nc: b\nfrontier: c\nroot: a\n").unwrap();
        let g = LazyGraph::from_import(imp, crate::graph::FamilySpec::simple("window_import"));
        assert!(matches!(g.family(), Family::WindowImport(_)));
        assert_eq!(ball(&g, &"a".into(), 2).unwrap().vertices.len(), 3);
        assert!(matches!(ball(&g, &"a".into(), 3), Err(Error::WindowExhausted(_))));
        assert_eq!(dist(&g, &"a".into(), &"c".into(), 5).unwrap(), Dist::Exact(2));
    }

    #[test]
    fn shortest_path_tie_break() {
        let g = LazyGraph::square();
        let p = shortest_path(&g, &"0,0".into(), 10, |_| true, |v| v.as_str() == "1,1")
            .unwrap()
            .unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1].as_str(), "0,1");
    }
}
