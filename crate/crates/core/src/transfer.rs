//! Metric constructions: coarse-embedding constants, moving a grid minor
//! across a coarse embedding, upgrading minors to subdivisions, the
//! capacity count behind tree-like refutations, and two demonstration minors.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ball, bfs, dist, shortest_path, tree_dist, tree_token, tree_word, Dist, Family, FamilySpec, LazyGraph};
use crate::model::{GridFragment, MinorModel, Pattern, SubdivisionMap};
use crate::rays::{equivalent_bundle, Ray};
use crate::token::{coord2, coord3, parse_coord2, VertexToken};

pub type VertexMap = BTreeMap<VertexToken, VertexToken>;

/// The identity map on a vertex set.
pub fn identity_on<'a>(vertices: impl IntoIterator<Item = &'a VertexToken>) -> VertexMap {
    vertices.into_iter().map(|v| (v.clone(), v.clone())).collect()
}

/// The brick wall is a subgraph of the hex, square and triangular families
/// with the same tokens, so a fragment maps onto itself.
pub fn identity_fragment(g: &LazyGraph, frag: GridFragment) -> Result<SubdivisionMap> {
    let p = frag.pattern();
    let mut m = SubdivisionMap::default();
    for v in &p.vertices {
        g.validate(v)?;
        m.branch.insert(v.clone(), v.clone());
    }
    for (a, b) in &p.edges {
        if !g.adjacent(a, b)? {
            return Err(Error::InvalidArgument(format!("{} does not contain the brick wall", g.spec())));
        }
        m.push_path(a, b, vec![a.clone(), b.clone()]);
    }
    m.sort();
    Ok(m)
}

/// Radius of the smallest ball around `center` containing `image`.
pub fn covering_radius(g: &LazyGraph, center: &VertexToken, image: &BTreeSet<VertexToken>) -> Result<usize> {
    g.validate(center)?;
    let mut left: HashSet<&VertexToken> = image.iter().collect();
    let mut radius = 0;
    let mut frontier = vec![center.clone()];
    let mut seen: HashSet<VertexToken> = HashSet::from([center.clone()]);
    left.remove(center);
    while !left.is_empty() {
        if frontier.is_empty() {
            return Err(Error::InvalidArgument(format!("image is not connected to {center}")));
        }
        radius += 1;
        let mut next = Vec::new();
        for u in &frontier {
            for w in g.neighbors(u)? {
                if seen.insert(w.clone()) {
                    left.remove(&w);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    Ok(radius)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoarseEmbedding {
    pub map: VertexMap,
    pub center: VertexToken,
    /// Radius of the window in the source graph.
    pub window: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
}

impl CoarseEmbedding {
    pub fn image(&self, v: &VertexToken) -> Result<&VertexToken> {
        self.map
            .get(v)
            .ok_or_else(|| Error::WindowExhausted(format!("embedding undefined at {v}")))
    }
}

/// Witnesses `L` and `K` for `phi: G -> H` on `ball(g, center, radius)`.
pub fn embedding_constants(
    phi: &VertexMap,
    g: &LazyGraph,
    h: &LazyGraph,
    center: &VertexToken,
    radius: usize,
) -> Result<CoarseEmbedding> {
    let win = ball(g, center, radius)?;
    let mut map = VertexMap::new();
    for v in &win.vertices {
        let w = phi
            .get(v)
            .ok_or_else(|| Error::InvalidArgument(format!("map undefined at window vertex {v}")))?;
        h.validate(w)?;
        map.insert(v.clone(), w.clone());
    }
    let cap = 2 * radius + 2;
    let steps: Vec<usize> = win
        .edges
        .par_iter()
        .map(|(a, b)| match dist(h, &map[a], &map[b], cap)? {
            Dist::Exact(d) => Ok(d),
            Dist::Exceeds(_) => Err(Error::WindowExhausted(format!("image of edge {a}-{b} is farther than {cap}"))),
        })
        .collect::<Result<_>>()?;
    let l = steps.into_iter().max().unwrap_or(0);
    if l == 0 {
        return Err(Error::Degenerate("the map collapses every window edge (L = 0)".into()));
    }
    let mut pre: HashMap<&VertexToken, Vec<&VertexToken>> = HashMap::new();
    for (v, w) in &map {
        pre.entry(w).or_default().push(v);
    }
    let verts: Vec<&VertexToken> = win.vertices.iter().collect();
    let ks: Vec<usize> = verts
        .par_iter()
        .map(|x| -> Result<usize> {
            let near = bfs(h, std::slice::from_ref(&map[*x]), 2 * l, |_| true)?;
            let partners: Vec<&VertexToken> = near
                .order
                .iter()
                .filter_map(|w| pre.get(w))
                .flatten()
                .copied()
                .collect();
            let mut worst = 0;
            for y in partners {
                let d = match dist(g, x, y, 2 * radius)? {
                    Dist::Exact(d) => d,
                    Dist::Exceeds(c) => c,
                };
                worst = worst.max(d);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let k = ks.into_iter().max().unwrap_or(0);
    if k >= 2 * radius {
        return Err(Error::Degenerate(format!(
            "K = {k} reaches the window diameter {}; no bound is witnessed",
            2 * radius
        )));
    }
    Ok(CoarseEmbedding {
        map,
        center: center.clone(),
        window: radius,
        l,
        k,
    })
}

/// Self-embedding of the brick wall scaling coordinates by an odd factor.
/// Vertical edges become zigzags through the next column (the previous one
/// on the last column).
fn dilated_path(s: i64, a: (i64, i64), b: (i64, i64), last_col: i64) -> Vec<VertexToken> {
    let (ax, ay) = (s * a.0, s * a.1);
    if a.1 == b.1 {
        let (lo, hi) = (ax.min(s * b.0), ax.max(s * b.0));
        let mut p: Vec<VertexToken> = (lo..=hi).map(|x| coord2(x, ay)).collect();
        if ax > lo {
            p.reverse();
        }
        return p;
    }
    let side = if a.0 == last_col { ax - 1 } else { ax + 1 };
    let (y0, y1) = (ay.min(s * b.1), ay.max(s * b.1));
    let mut p = vec![coord2(ax, y0)];
    let mut y = y0;
    while y < y1 {
        p.push(coord2(ax, y + 1));
        if y + 1 == y1 {
            break;
        }
        p.push(coord2(side, y + 1));
        p.push(coord2(side, y + 2));
        p.push(coord2(ax, y + 2));
        y += 2;
    }
    if ay > y0 {
        p.reverse();
    }
    p
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sparsified {
    pub map: SubdivisionMap,
    pub fragment: GridFragment,
    pub factor: usize,
    /// Largest pattern distance between vertices whose images are within
    /// `K`, observed on the fragment.
    pub m: usize,
}

/// Largest pattern distance among pairs whose images lie within `k`.
pub fn divergence_constant(g: &LazyGraph, f: &SubdivisionMap, pattern: &Pattern, k: usize) -> Result<usize> {
    let mut pre: HashMap<&VertexToken, &VertexToken> = HashMap::new();
    for (p, h) in &f.branch {
        pre.insert(h, p);
    }
    let adj = pattern.adjacency();
    let verts: Vec<&VertexToken> = pattern.vertices.iter().collect();
    let ms: Vec<usize> = verts
        .par_iter()
        .map(|x| -> Result<usize> {
            let near = bfs(g, std::slice::from_ref(&f.branch[*x]), k, |_| true)?;
            let want: HashSet<&VertexToken> = near.order.iter().filter_map(|w| pre.get(w).copied()).collect();
            // pattern BFS until every partner is reached
            let mut d: HashMap<&VertexToken, usize> = HashMap::from([(*x, 0)]);
            let mut queue = std::collections::VecDeque::from([*x]);
            let mut left = want.len() - usize::from(want.contains(*x));
            let mut best = 0;
            while let Some(u) = queue.pop_front() {
                if left == 0 {
                    break;
                }
                for w in &adj[u] {
                    if d.contains_key(w) {
                        continue;
                    }
                    let dw = d[u] + 1;
                    d.insert(w, dw);
                    if want.contains(w) {
                        best = best.max(dw);
                        left -= 1;
                    }
                    queue.push_back(w);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(ms.into_iter().max().unwrap_or(0))
}

/// Composes `f` (on `big`) with the least odd dilation that exceeds the
/// observed divergence constant and pushes branch images more than `2k`
/// apart, giving a subdivision of `small` inside the image of `f`.
pub fn sparsify(g: &LazyGraph, f: &SubdivisionMap, big: GridFragment, small: GridFragment, k: usize) -> Result<Sparsified> {
    let big_pattern = big.pattern();
    let m = divergence_constant(g, f, &big_pattern, k)?;
    let mut s = if m % 2 == 0 { m + 1 } else { m + 2 };
    let small_pattern = small.pattern();
    loop {
        let need_rows = s * (small.rows - 1) + 1;
        let need_cols = (s * 2 * small.cols).div_ceil(2);
        if need_rows > big.rows || need_cols > big.cols {
            return Err(Error::FragmentTooSmall {
                factor: s,
                needed_rows: need_rows,
                needed_cols: need_cols,
                rows: big.rows,
                cols: big.cols,
            });
        }
        let mut map = SubdivisionMap::default();
        let si = s as i64;
        for v in &small_pattern.vertices {
            let (x, y) = GridFragment::coords(v).expect("fragment token");
            let img = &f.branch[&coord2(si * x, si * y)];
            map.branch.insert(v.clone(), img.clone());
        }
        for (a, b) in &small_pattern.edges {
            let ca = GridFragment::coords(a).expect("fragment token");
            let cb = GridFragment::coords(b).expect("fragment token");
            let route = dilated_path(si, ca, cb, small.width());
            let mut path: Vec<VertexToken> = vec![f.branch[&route[0]].clone()];
            for w in route.windows(2) {
                let seg = f
                    .path(&w[0], &w[1])
                    .ok_or_else(|| Error::InvalidArgument(format!("subdivision lacks the edge {}-{}", w[0], w[1])))?;
                path.extend(seg.into_iter().skip(1));
            }
            map.push_path(a, b, path);
        }
        map.sort();
        let images: HashSet<&VertexToken> = map.branch.values().collect();
        let mut spread = true;
        for v in map.branch.values() {
            let near = bfs(g, std::slice::from_ref(v), 2 * k, |_| true)?;
            if near.order.iter().any(|w| w != v && images.contains(w)) {
                spread = false;
                break;
            }
        }
        if spread {
            return Ok(Sparsified {
                map,
                fragment: small,
                factor: s,
                m,
            });
        }
        s += 2;
    }
}

/// Internals of a transfer, kept for inspection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferTrace {
    /// Pattern vertices on the side containing the least token.
    pub u_side: BTreeSet<VertexToken>,
    /// Host walk for each pattern edge, from the smaller token.
    pub walks: Vec<(VertexToken, VertexToken, Vec<VertexToken>)>,
    pub shortest_paths: usize,
}

fn pair(a: &VertexToken, b: &VertexToken) -> (VertexToken, VertexToken) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Branch sets of `pattern` in `h` from a sparsified subdivision in `g`.
/// Walks may repeat vertices; only their vertex sets are used.
pub fn transfer_minor(
    emb: &CoarseEmbedding,
    gmap: &SubdivisionMap,
    pattern: &Pattern,
    g: &LazyGraph,
    h: &LazyGraph,
) -> Result<(MinorModel, TransferTrace)> {
    let colour = pattern
        .bipartition()
        .ok_or_else(|| Error::InvalidArgument("pattern is not bipartite".into()))?;
    let mut cache: HashMap<(VertexToken, VertexToken), Vec<VertexToken>> = HashMap::new();
    let mut p_xy = |x: &VertexToken, y: &VertexToken| -> Result<Vec<VertexToken>> {
        let key = pair(x, y);
        if !cache.contains_key(&key) {
            let (a, b) = (emb.image(&key.0)?, emb.image(&key.1)?);
            let p = shortest_path(h, a, emb.l, |_| true, |v| v == b)?
                .ok_or_else(|| Error::WindowExhausted(format!("no path of length {} joins {a} and {b}", emb.l)))?;
            cache.insert(key.clone(), p);
        }
        let mut p = cache[&key].clone();
        if x > y {
            p.reverse();
        }
        Ok(p)
    };

    let mut trace = TransferTrace::default();
    let mut walks: BTreeMap<(VertexToken, VertexToken), (Vec<VertexToken>, Vec<Vec<VertexToken>>)> = BTreeMap::new();
    for (a, b) in &pattern.edges {
        let route = gmap
            .path(a, b)
            .ok_or_else(|| Error::InvalidArgument(format!("subdivision lacks a path for {a}-{b}")))?;
        let mut walk = vec![emb.image(&route[0])?.clone()];
        let mut pieces = Vec::new();
        for w in route.windows(2) {
            let p = p_xy(&w[0], &w[1])?;
            walk.extend(p.iter().skip(1).cloned());
            pieces.push(p);
        }
        trace.walks.push((a.clone(), b.clone(), walk.clone()));
        walks.insert((a.clone(), b.clone()), (walk, pieces));
    }
    trace.shortest_paths = cache.len();

    let adj = pattern.adjacency();
    let mut sets: BTreeMap<VertexToken, BTreeSet<VertexToken>> = BTreeMap::new();
    let k = emb.k;
    for (u, &c) in &colour {
        if c != 0 {
            continue;
        }
        trace.u_side.insert(u.clone());
        let gu = &gmap.branch[u];
        let close: HashSet<VertexToken> = bfs(g, std::slice::from_ref(gu), k, |_| true)?.order.into_iter().collect();
        let mut set = BTreeSet::from([emb.image(gu)?.clone()]);
        for v in &adj[u] {
            let route = gmap.path(u, v).expect("checked above");
            let (_, pieces) = &walks[&pair(u, v)];
            let forward = u < v;
            // the run of consecutive pairs near g(u) starting at g(u)
            for i in 0..route.len() - 1 {
                if !close.contains(&route[i]) || !close.contains(&route[i + 1]) {
                    break;
                }
                let idx = if forward { i } else { route.len() - 2 - i };
                set.extend(pieces[idx].iter().cloned());
            }
        }
        sets.insert(u.clone(), set);
    }

    let mut model = MinorModel::default();
    let mut v_sets: BTreeMap<VertexToken, BTreeSet<VertexToken>> = BTreeMap::new();
    for (v, &c) in &colour {
        if c == 0 {
            continue;
        }
        let start = emb.image(&gmap.branch[v])?.clone();
        let mut set = BTreeSet::from([start]);
        for u in &adj[v] {
            let (walk, _) = &walks[&pair(u, v)];
            let mut from_v: Vec<&VertexToken> = walk.iter().collect();
            if u < v {
                from_v.reverse();
            }
            let vu = &sets[u];
            let hit = from_v.iter().position(|t| vu.contains(*t)).ok_or_else(|| {
                Error::InternalPathClash(format!("walk {v}-{u} never enters the branch set of {u}"))
            })?;
            if hit == 0 {
                return Err(Error::DisjointnessViolation {
                    a: u.to_string(),
                    b: v.to_string(),
                    token: from_v[0].clone(),
                });
            }
            set.extend(from_v[..hit].iter().map(|t| (*t).clone()));
            model.witness(u, v, from_v[hit], from_v[hit - 1]);
        }
        v_sets.insert(v.clone(), set);
    }
    sets.extend(v_sets);

    let mut owner: HashMap<&VertexToken, &VertexToken> = HashMap::new();
    for (p, set) in &sets {
        for t in set {
            if let Some(q) = owner.insert(t, p) {
                return Err(Error::DisjointnessViolation {
                    a: q.to_string(),
                    b: p.to_string(),
                    token: t.clone(),
                });
            }
        }
    }
    model.branch_sets = sets;
    model.sort();
    Ok((model, trace))
}

/// Path inside `set` between two of its vertices.
fn path_within(h: &LazyGraph, set: &BTreeSet<VertexToken>, a: &VertexToken, b: &VertexToken) -> Result<Vec<VertexToken>> {
    shortest_path(h, a, set.len(), |w| set.contains(w), |w| w == b)?
        .ok_or_else(|| Error::InternalPathClash(format!("{a} and {b} are not connected in their branch set")))
}

/// Turns a minor model of a pattern with maximum degree at most 3 into a
/// subdivision: each branch set contributes a hub and up to three disjoint
/// legs to its witness endpoints.
pub fn minor_to_subdivision(h: &LazyGraph, pattern: &Pattern, model: &MinorModel) -> Result<SubdivisionMap> {
    if pattern.max_degree() > 3 {
        return Err(Error::InvalidArgument("pattern has a vertex of degree above 3".into()));
    }
    let mut ends: BTreeMap<&VertexToken, Vec<(&VertexToken, &VertexToken)>> = BTreeMap::new();
    let mut witness: BTreeMap<(&VertexToken, &VertexToken), (&VertexToken, &VertexToken)> = BTreeMap::new();
    for w in &model.edge_witness {
        if witness.contains_key(&(&w.u, &w.v)) {
            continue;
        }
        witness.insert((&w.u, &w.v), (&w.a, &w.b));
        ends.entry(&w.u).or_default().push((&w.v, &w.a));
        ends.entry(&w.v).or_default().push((&w.u, &w.b));
    }
    // legs[(u, v)] runs from the hub of u to the endpoint of the u-v witness in B_u
    let mut legs: HashMap<(VertexToken, VertexToken), Vec<VertexToken>> = HashMap::new();
    let mut map = SubdivisionMap::default();
    for u in &pattern.vertices {
        let set = model
            .branch_sets
            .get(u)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::InvalidArgument(format!("no branch set for {u}")))?;
        let list = ends.get(u).cloned().unwrap_or_default();
        let hub = match list.as_slice() {
            [] => set.iter().next().expect("nonempty").clone(),
            [(v, a)] => {
                legs.insert((u.clone(), (*v).clone()), vec![(*a).clone()]);
                (*a).clone()
            }
            [(v1, a1), (v2, a2)] => {
                let p = path_within(h, set, a1, a2)?;
                let mid = p.len() / 2;
                let mut l1 = p[..=mid].to_vec();
                l1.reverse();
                legs.insert((u.clone(), (*v1).clone()), l1);
                legs.insert((u.clone(), (*v2).clone()), p[mid..].to_vec());
                p[mid].clone()
            }
            [(v1, a1), (v2, a2), (v3, a3)] => {
                let p = path_within(h, set, a1, a2)?;
                let on: HashMap<&VertexToken, usize> = p.iter().enumerate().map(|(i, t)| (t, i)).collect();
                let q = shortest_path(h, a3, set.len(), |w| set.contains(w), |w| on.contains_key(w))?
                    .ok_or_else(|| Error::InternalPathClash(format!("branch set of {u} is disconnected")))?;
                let hub = q.last().expect("nonempty").clone();
                let at = on[&hub];
                let mut l1 = p[..=at].to_vec();
                l1.reverse();
                let mut l3 = q.clone();
                l3.reverse();
                legs.insert((u.clone(), (*v1).clone()), l1);
                legs.insert((u.clone(), (*v2).clone()), p[at..].to_vec());
                legs.insert((u.clone(), (*v3).clone()), l3);
                hub
            }
            _ => return Err(Error::InvalidArgument(format!("{u} has more than three witnesses"))),
        };
        map.branch.insert(u.clone(), hub);
    }
    for (a, b) in &pattern.edges {
        let mut path = legs
            .get(&(a.clone(), b.clone()))
            .cloned()
            .ok_or_else(|| Error::InvalidArgument(format!("edge {a}-{b} has no witness")))?;
        let mut back = legs[&(b.clone(), a.clone())].clone();
        back.reverse();
        path.extend(back);
        map.push_path(a, b, path);
    }
    map.sort();
    let report = crate::verify::verify_subdivision(h, pattern, &map);
    if let Some(v) = report.violations.first() {
        return Err(Error::InternalPathClash(format!("{}: {}", v.rule, v.message)));
    }
    Ok(map)
}

/// Vertex map to a tree with claimed distortion constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QIToTree {
    pub map: VertexMap,
    pub gamma: f64,
    pub c: f64,
    pub tree: FamilySpec,
}

impl QIToTree {
    /// `(i, z)` goes to the vertex at signed position `z` on a bi-infinite
    /// path, realized as the 2-regular tree.
    pub fn natural_cylinder(n: usize, window: &BTreeSet<VertexToken>) -> Self {
        let map = window
            .iter()
            .map(|v| {
                let (_, z) = parse_coord2(v.as_str()).expect("cylinder token");
                (v.clone(), line_vertex(z))
            })
            .collect();
        QIToTree {
            map,
            gamma: 1.0,
            c: (n / 2) as f64,
            tree: FamilySpec::parse("regular_tree:2").expect("valid spec"),
        }
    }

    pub fn identity(g: &LazyGraph, window: &BTreeSet<VertexToken>) -> Self {
        QIToTree {
            map: identity_on(window),
            gamma: 1.0,
            c: 0.0,
            tree: g.spec().clone(),
        }
    }

    /// Projection of a planar lattice onto its x-axis. Not a quasi-isometry.
    pub fn collapse(window: &BTreeSet<VertexToken>) -> Self {
        let map = window
            .iter()
            .filter_map(|v| parse_coord2(v.as_str()).map(|(x, _)| (v.clone(), line_vertex(x))))
            .collect();
        QIToTree {
            map,
            gamma: 1.0,
            c: 0.0,
            tree: FamilySpec::parse("regular_tree:2").expect("valid spec"),
        }
    }

    pub fn tree_graph(&self) -> Result<LazyGraph> {
        LazyGraph::from_spec(&self.tree)
    }

    pub fn image(&self, v: &VertexToken) -> Result<&VertexToken> {
        self.map
            .get(v)
            .ok_or_else(|| Error::WindowExhausted(format!("tree map undefined at {v}")))
    }

    /// `floor(gamma + c)`, the forcing radius of the infinitary argument.
    pub fn slack(&self) -> usize {
        (self.gamma + self.c).floor().max(0.0) as usize
    }
}

/// Vertex at signed position `z` of the 2-regular tree.
pub fn line_vertex(z: i64) -> VertexToken {
    let first = if z > 0 { 0 } else { 1 };
    let word: Vec<usize> = (0..z.unsigned_abs() as usize).map(|k| (first + k) % 2).collect();
    tree_token(&word)
}

/// Distance in a tree family, by word arithmetic for regular trees.
pub fn tree_distance(t: &LazyGraph, a: &VertexToken, b: &VertexToken) -> Result<usize> {
    if let Family::RegularTree { d } = t.family() {
        let wa = tree_word(a.as_str(), *d).ok_or_else(|| t.validate(a).unwrap_err())?;
        let wb = tree_word(b.as_str(), *d).ok_or_else(|| t.validate(b).unwrap_err())?;
        return Ok(tree_dist(&wa, &wb));
    }
    match dist(t, a, b, 1 << 16)? {
        Dist::Exact(d) => Ok(d),
        Dist::Exceeds(c) => Err(Error::WindowExhausted(format!("tree distance {a}-{b} exceeds {c}"))),
    }
}

/// Window with integer ids for repeated BFS.
struct IndexedWindow<'a> {
    verts: Vec<&'a VertexToken>,
    adj: Vec<Vec<u32>>,
}

impl<'a> IndexedWindow<'a> {
    fn new(g: &LazyGraph, window: &'a BTreeSet<VertexToken>) -> Result<Self> {
        let verts: Vec<&VertexToken> = window.iter().collect();
        let id: HashMap<&VertexToken, u32> = verts.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        let adj = verts
            .iter()
            .map(|v| Ok(g.neighbors(v)?.iter().filter_map(|w| id.get(w).copied()).collect()))
            .collect::<Result<_>>()?;
        Ok(IndexedWindow { verts, adj })
    }

    fn distances(&self, s: usize) -> Vec<u32> {
        let mut d = vec![u32::MAX; self.verts.len()];
        d[s] = 0;
        let mut q = std::collections::VecDeque::from([s as u32]);
        while let Some(u) = q.pop_front() {
            for &w in &self.adj[u as usize] {
                if d[w as usize] == u32::MAX {
                    d[w as usize] = d[u as usize] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    }
}

/// Checks both distortion inequalities for every pair of window vertices
/// joined inside the window.
pub fn check_qi(g: &LazyGraph, qi: &QIToTree, window: &BTreeSet<VertexToken>) -> Result<()> {
    let t = qi.tree_graph()?;
    let idx = IndexedWindow::new(g, window)?;
    let images: Vec<&VertexToken> = idx.verts.iter().map(|v| qi.image(v)).collect::<Result<_>>()?;
    let words: Option<Vec<Vec<usize>>> = match t.family() {
        Family::RegularTree { d } => images.iter().map(|v| tree_word(v.as_str(), *d)).collect(),
        _ => None,
    };
    const EPS: f64 = 1e-9;
    let n = idx.verts.len();
    let found: Vec<Option<Error>> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Option<Error>> {
            let dg = idx.distances(i);
            for j in i + 1..n {
                if dg[j] == u32::MAX {
                    continue;
                }
                let dt = match &words {
                    Some(w) => tree_dist(&w[i], &w[j]),
                    None => tree_distance(&t, images[i], images[j])?,
                };
                let (d, dtf) = (dg[j] as f64, dt as f64);
                if dtf > qi.gamma * d + qi.c + EPS || d / qi.gamma - qi.c > dtf + EPS {
                    return Ok(Some(Error::QiViolation {
                        u: idx.verts[i].clone(),
                        v: idx.verts[j].clone(),
                        dg: dg[j] as usize,
                        dt,
                    }));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    match found.into_iter().flatten().next() {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Ball-size bound for a graph of maximum degree `d`.
pub fn moore_bound(d: usize, radius: usize) -> usize {
    let mut total: usize = 1;
    let mut layer: usize = d;
    for _ in 0..radius {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(d.saturating_sub(1).max(1));
    }
    total
}

/// Largest number of window vertices whose images share an `r`-ball of the
/// tree. Checked against the ball-size bound of the host's degree.
pub fn qi_tree_capacity(g: &LazyGraph, qi: &QIToTree, r: usize, window: &BTreeSet<VertexToken>) -> Result<usize> {
    let t = qi.tree_graph()?;
    let mut mult: BTreeMap<&VertexToken, usize> = BTreeMap::new();
    for v in window {
        *mult.entry(qi.image(v)?).or_default() += 1;
    }
    let mut count: HashMap<VertexToken, usize> = HashMap::new();
    for (p, m) in &mult {
        for w in bfs(&t, std::slice::from_ref(*p), r, |_| true)?.order {
            *count.entry(w).or_default() += m;
        }
    }
    let b = count.into_values().max().unwrap_or(0);
    if let Some(d) = g.degree_bound() {
        let rho = (qi.gamma * (2 * r) as f64 + qi.gamma * qi.c).floor() as usize;
        let bound = moore_bound(d, rho);
        if b > bound {
            return Err(Error::SelfCheck(format!("capacity {b} exceeds the ball bound {bound} at radius {rho}")));
        }
    }
    Ok(b)
}

/// A requested family of pairwise disjoint rays heading into one end,
/// either certified by explicit rays or shown unattainable at the window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RayFamily {
    Certified {
        rays: Vec<Ray>,
    },
    Unattainable {
        requested: usize,
        achieved: usize,
        separator: Option<Vec<VertexToken>>,
    },
}

impl RayFamily {
    pub fn size(&self) -> usize {
        match self {
            RayFamily::Certified { rays } => rays.len(),
            RayFamily::Unattainable { requested, .. } => *requested,
        }
    }
}

/// Tries to build `k` disjoint rays into one visible end.
pub fn request_family(g: &LazyGraph, k: usize, depth: usize) -> Result<RayFamily> {
    match equivalent_bundle(g, k, depth) {
        Ok(rays) => Ok(RayFamily::Certified { rays }),
        Err(Error::NotFound { achieved, separator, .. }) => Ok(RayFamily::Unattainable {
            requested: k,
            achieved,
            separator,
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefutationWitness {
    pub family_size: usize,
    pub family: RayFamily,
    /// The window is `ball(root, window_radius)`.
    pub window_radius: usize,
    /// Tree geodesic from the image of the root; `tree_vertex` and
    /// `next_vertex` are consecutive on it.
    pub tree_ray: Vec<VertexToken>,
    pub tree_vertex: VertexToken,
    pub next_vertex: VertexToken,
    pub forcing_radius: usize,
    /// Window vertices whose images lie within the forcing radius of
    /// `tree_vertex`. Every path from the root to the far side meets it.
    pub crowding_set: Vec<VertexToken>,
    /// Capacity at the forcing radius.
    pub bound: usize,
    pub threshold: usize,
    /// `(radius, capacity)` at other radii, for context.
    pub capacity: Vec<(usize, usize)>,
}

/// Largest tree step taken by a window edge.
pub fn max_image_step(g: &LazyGraph, qi: &QIToTree, window: &BTreeSet<VertexToken>) -> Result<usize> {
    let t = qi.tree_graph()?;
    let mut s = 0;
    for u in window {
        for w in g.neighbors(u)? {
            if u < &w && window.contains(&w) {
                s = s.max(tree_distance(&t, qi.image(u)?, qi.image(&w)?)?);
            }
        }
    }
    Ok(s)
}

/// Window vertices split by a tree edge `t - t_next`: those within `r` of
/// `t` (the crowding set) and those whose images lie beyond `t_next`.
pub fn split_by_tree_edge(
    qi: &QIToTree,
    t: &VertexToken,
    t_next: &VertexToken,
    r: usize,
    window: &BTreeSet<VertexToken>,
) -> Result<(BTreeSet<VertexToken>, BTreeSet<VertexToken>)> {
    let tg = qi.tree_graph()?;
    let mut crowd = BTreeSet::new();
    let mut far = BTreeSet::new();
    for v in window {
        let img = qi.image(v)?;
        let d = tree_distance(&tg, img, t)?;
        if d <= r {
            crowd.insert(v.clone());
        } else if tree_distance(&tg, img, t_next)? < d {
            far.insert(v.clone());
        }
    }
    Ok((crowd, far))
}

/// Finite form of the counting argument against half-grids in tree-like
/// graphs: a tree vertex on a tree ray whose preimage neighborhood
/// separates the root from the far side of the window yet holds fewer
/// vertices than the family has rays.
pub fn refute_half_grid(g: &LazyGraph, qi: &QIToTree, family: &RayFamily, depth: usize) -> Result<RefutationWitness> {
    let root = g.root();
    let win = ball(g, &root, depth)?;
    let window = &win.vertices;
    check_qi(g, qi, window)?;
    let t = qi.tree_graph()?;
    let s = max_image_step(g, qi, window)?;
    let r = qi.slack().min(s / 2);
    let b = qi_tree_capacity(g, qi, r, window)?;
    let k = family.size();
    if k <= b {
        return Err(Error::NotRefuted {
            family: k,
            bound: b,
            threshold: b + 1,
        });
    }
    let start = qi.image(&root)?.clone();
    let aim = match family {
        RayFamily::Certified { rays } if !rays.is_empty() => {
            let last = rays[0].prefix.last().expect("nonempty ray");
            qi.image(last)?.clone()
        }
        _ => {
            let mut best: Option<(usize, &VertexToken)> = None;
            for v in window {
                let d = tree_distance(&t, &start, qi.image(v)?)?;
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, v));
                }
            }
            qi.image(best.expect("nonempty window").1)?.clone()
        }
    };
    let span = tree_distance(&t, &start, &aim)?;
    let tree_ray = shortest_path(&t, &start, span, |_| true, |v| v == &aim)?
        .ok_or_else(|| Error::WindowExhausted("no tree geodesic toward the far images".into()))?;
    if tree_ray.len() < 3 {
        return Err(Error::WindowExhausted("tree ray is too short to split".into()));
    }
    let mid = tree_ray.len() / 2;
    let (tv, tn) = (tree_ray[mid].clone(), tree_ray[mid + 1].clone());
    let (crowd, far) = split_by_tree_edge(qi, &tv, &tn, r, window)?;
    if crowd.contains(&root) || far.contains(&root) {
        return Err(Error::WindowExhausted("the root is not on the near side".into()));
    }
    if !far.iter().any(|v| win.frontier.contains(v)) {
        return Err(Error::WindowExhausted("the far side does not reach the window boundary".into()));
    }
    for u in window {
        if crowd.contains(u) || far.contains(u) {
            continue;
        }
        for w in g.neighbors(u)? {
            if far.contains(&w) {
                return Err(Error::SelfCheck(format!("edge {u}-{w} jumps over the crowding set")));
            }
        }
    }
    let mut radii = vec![0, 1, qi.slack()];
    radii.dedup();
    let capacity = radii
        .into_iter()
        .map(|rr| Ok((rr, qi_tree_capacity(g, qi, rr, window)?)))
        .collect::<Result<_>>()?;
    Ok(RefutationWitness {
        family_size: k,
        family: family.clone(),
        window_radius: depth,
        tree_ray,
        tree_vertex: tv,
        next_vertex: tn,
        forcing_radius: r,
        crowding_set: crowd.into_iter().collect(),
        bound: b,
        threshold: b + 1,
        capacity,
    })
}

/// Pattern of the `m`-cycle times a path on `length` vertices.
pub fn cylinder_pattern(m: usize, length: usize) -> Pattern {
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for z in 0..length as i64 {
        for i in 0..m as i64 {
            vs.push(coord2(i, z));
            es.push((coord2(i, z), coord2((i + 1) % m as i64, z)));
            if z + 1 < length as i64 {
                es.push((coord2(i, z), coord2(i, z + 1)));
            }
        }
    }
    Pattern::new(vs, es)
}

/// Minor of a piece of `cylinder(m)` in `cylinder(n)`: in every slice the
/// arc `0..=n-m` is contracted to the branch set of cycle vertex 0.
pub fn chain_minor(m: usize, n: usize, length: usize) -> Result<(Pattern, MinorModel)> {
    if m < 3 || m > n || length == 0 {
        return Err(Error::InvalidArgument("chain_minor needs 3 <= m <= n and length >= 1".into()));
    }
    let pattern = cylinder_pattern(m, length);
    let shift = (n - m) as i64;
    let rep = |i: i64| if i == 0 { 0 } else { i + shift };
    let mut model = MinorModel::default();
    for z in 0..length as i64 {
        for i in 0..m as i64 {
            let set: BTreeSet<VertexToken> = if i == 0 {
                (0..=shift).map(|a| coord2(a, z)).collect()
            } else {
                BTreeSet::from([coord2(i + shift, z)])
            };
            model.branch_sets.insert(coord2(i, z), set);
        }
    }
    for z in 0..length as i64 {
        for i in 0..m as i64 {
            let j = (i + 1) % m as i64;
            let a = if i == 0 { coord2(shift, z) } else { coord2(rep(i), z) };
            model.witness(&coord2(i, z), &coord2(j, z), &a, &coord2(rep(j), z));
            if z + 1 < length as i64 {
                model.witness(&coord2(i, z), &coord2(i, z + 1), &coord2(rep(i), z), &coord2(rep(i), z + 1));
            }
        }
    }
    model.sort();
    Ok((pattern, model))
}

pub fn clique_pattern(n: usize) -> Pattern {
    let vs: Vec<VertexToken> = (0..n).map(|i| VertexToken::new(i.to_string())).collect();
    let mut es = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            es.push((vs[i].clone(), vs[j].clone()));
        }
    }
    Pattern::new(vs, es)
}

/// `K_n` in the cubic lattice on two layers: branch set `i` is row `x = i`
/// of layer 0 joined to column `y = i` of layer 1, and sets `i < j` touch
/// along the edge `(j, i, 1) - (j, i, 0)`.
pub fn clique_minor_cubic(n: usize) -> Result<(Pattern, MinorModel)> {
    if n == 0 {
        return Err(Error::InvalidArgument("clique size must be at least 1".into()));
    }
    let pattern = clique_pattern(n);
    let mut model = MinorModel::default();
    let tok = |i: usize| VertexToken::new(i.to_string());
    if n == 1 {
        model.branch_sets.insert(tok(0), BTreeSet::from([coord3(0, 0, 0)]));
        return Ok((pattern, model));
    }
    let n64 = n as i64;
    for i in 0..n64 {
        let mut set = BTreeSet::new();
        for t in 0..n64 {
            set.insert(coord3(i, t, 0));
            set.insert(coord3(t, i, 1));
        }
        model.branch_sets.insert(tok(i as usize), set);
    }
    for i in 0..n64 {
        for j in i + 1..n64 {
            model.witness(&tok(i as usize), &tok(j as usize), &coord3(j, i, 1), &coord3(j, i, 0));
        }
    }
    model.sort();
    Ok((pattern, model))
}
