//! Patterns and the maps that realize them in a host.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::token::{coord2, parse_coord2, VertexToken};

fn edge(a: &VertexToken, b: &VertexToken) -> (VertexToken, VertexToken) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// A finite simple graph to be found in the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub vertices: Vec<VertexToken>,
    pub edges: Vec<(VertexToken, VertexToken)>,
}

impl Pattern {
    /// Sorts vertices and normalizes edges to `(smaller, larger)`.
    pub fn new(vertices: impl IntoIterator<Item = VertexToken>, edges: impl IntoIterator<Item = (VertexToken, VertexToken)>) -> Self {
        let vertices: BTreeSet<VertexToken> = vertices.into_iter().collect();
        let edges: BTreeSet<(VertexToken, VertexToken)> = edges.into_iter().map(|(a, b)| edge(&a, &b)).collect();
        Pattern {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn adjacency(&self) -> BTreeMap<VertexToken, Vec<VertexToken>> {
        let mut adj: BTreeMap<VertexToken, Vec<VertexToken>> =
            self.vertices.iter().map(|v| (v.clone(), Vec::new())).collect();
        for (a, b) in &self.edges {
            adj.entry(a.clone()).or_default().push(b.clone());
            adj.entry(b.clone()).or_default().push(a.clone());
        }
        for l in adj.values_mut() {
            l.sort();
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency().values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, a: &VertexToken, b: &VertexToken) -> bool {
        self.edges.binary_search(&edge(a, b)).is_ok()
    }

    /// All-pairs distances by BFS from each vertex.
    pub fn distances(&self) -> HashMap<(VertexToken, VertexToken), usize> {
        let adj = self.adjacency();
        let mut out = HashMap::new();
        for s in &self.vertices {
            let mut d: HashMap<&VertexToken, usize> = HashMap::from([(s, 0)]);
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for w in &adj[u] {
                    if !d.contains_key(w) {
                        d.insert(w, d[u] + 1);
                        q.push_back(w);
                    }
                }
            }
            for (t, dt) in d {
                out.insert((s.clone(), t.clone()), dt);
            }
        }
        out
    }

    /// Proper 2-colouring, `None` if the pattern is not bipartite. Each
    /// component's least vertex gets colour 0.
    pub fn bipartition(&self) -> Option<BTreeMap<VertexToken, u8>> {
        let adj = self.adjacency();
        let mut colour: BTreeMap<VertexToken, u8> = BTreeMap::new();
        for s in &self.vertices {
            if colour.contains_key(s) {
                continue;
            }
            colour.insert(s.clone(), 0);
            let mut q = VecDeque::from([s.clone()]);
            while let Some(u) = q.pop_front() {
                let cu = colour[&u];
                for w in &adj[&u] {
                    match colour.get(w) {
                        Some(&cw) if cw == cu => return None,
                        Some(_) => {}
                        None => {
                            colour.insert(w.clone(), 1 - cu);
                            q.push_back(w.clone());
                        }
                    }
                }
            }
        }
        Some(colour)
    }
}

/// Brick-wall fragment on `x in [0, 2 cols]`, `y in [0, rows)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridFragment {
    pub rows: usize,
    pub cols: usize,
}

impl GridFragment {
    pub fn new(rows: usize, cols: usize) -> Self {
        GridFragment { rows, cols }
    }

    pub fn width(&self) -> i64 {
        2 * self.cols as i64
    }

    /// Whether the vertical edge `(x, y) - (x, y + 1)` belongs to the fragment.
    pub fn has_up(&self, x: i64, y: i64) -> bool {
        (x + y).rem_euclid(2) == 0 && y + 1 < self.rows as i64 && (0..=self.width()).contains(&x) && y >= 0
    }

    pub fn has_down(&self, x: i64, y: i64) -> bool {
        y > 0 && self.has_up(x, y - 1)
    }

    pub fn pattern(&self) -> Pattern {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for y in 0..self.rows as i64 {
            for x in 0..=self.width() {
                vs.push(coord2(x, y));
                if x < self.width() {
                    es.push((coord2(x, y), coord2(x + 1, y)));
                }
                if self.has_up(x, y) {
                    es.push((coord2(x, y), coord2(x, y + 1)));
                }
            }
        }
        Pattern::new(vs, es)
    }

    pub fn coords(v: &VertexToken) -> Option<(i64, i64)> {
        parse_coord2(v.as_str())
    }
}

/// Host path realizing the pattern edge `u - v` (with `u < v`), running
/// from the image of `u` to the image of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePath {
    pub u: VertexToken,
    pub v: VertexToken,
    pub path: Vec<VertexToken>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionMap {
    pub branch: BTreeMap<VertexToken, VertexToken>,
    pub edge_paths: Vec<EdgePath>,
}

impl SubdivisionMap {
    /// Adds a path for `a - b`, reversing it when needed so it runs from
    /// the smaller pattern token.
    pub fn push_path(&mut self, a: &VertexToken, b: &VertexToken, mut path: Vec<VertexToken>) {
        if a > b {
            path.reverse();
        }
        let (u, v) = edge(a, b);
        self.edge_paths.push(EdgePath { u, v, path });
    }

    pub fn sort(&mut self) {
        self.edge_paths.sort_by(|x, y| (&x.u, &x.v).cmp(&(&y.u, &y.v)));
    }

    pub fn path(&self, a: &VertexToken, b: &VertexToken) -> Option<Vec<VertexToken>> {
        let (u, v) = edge(a, b);
        let ep = self.edge_paths.iter().find(|e| e.u == u && e.v == v)?;
        let mut p = ep.path.clone();
        if a > b {
            p.reverse();
        }
        Some(p)
    }

    /// All host vertices used by the map.
    pub fn image(&self) -> BTreeSet<VertexToken> {
        let mut s: BTreeSet<VertexToken> = self.branch.values().cloned().collect();
        for e in &self.edge_paths {
            s.extend(e.path.iter().cloned());
        }
        s
    }

    pub fn max_path_len(&self) -> usize {
        self.edge_paths.iter().map(|e| e.path.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

/// Host edge `a - b` with `a` in the branch set of `u` and `b` in that of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub u: VertexToken,
    pub v: VertexToken,
    pub a: VertexToken,
    pub b: VertexToken,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub branch_sets: BTreeMap<VertexToken, BTreeSet<VertexToken>>,
    pub edge_witness: Vec<EdgeWitness>,
}

impl MinorModel {
    /// Records a witness, orienting it so that `u < v`.
    pub fn witness(&mut self, u: &VertexToken, v: &VertexToken, a: &VertexToken, b: &VertexToken) {
        let w = if u <= v {
            EdgeWitness { u: u.clone(), v: v.clone(), a: a.clone(), b: b.clone() }
        } else {
            EdgeWitness { u: v.clone(), v: u.clone(), a: b.clone(), b: a.clone() }
        };
        self.edge_witness.push(w);
    }

    pub fn sort(&mut self) {
        self.edge_witness.sort_by(|x, y| (&x.u, &x.v).cmp(&(&y.u, &y.v)));
    }

    /// Singleton branch sets and one-edge witnesses from a subdivision whose
    /// paths all have length one.
    pub fn from_unit_subdivision(map: &SubdivisionMap) -> Option<Self> {
        let mut m = MinorModel::default();
        for (p, h) in &map.branch {
            m.branch_sets.insert(p.clone(), BTreeSet::from([h.clone()]));
        }
        for e in &map.edge_paths {
            let [a, b] = e.path.as_slice() else { return None };
            m.witness(&e.u, &e.v, a, b);
        }
        m.sort();
        Some(m)
    }
}
