//! Rotation systems, face tracing and the two sides of a double ray.
//!
//! Faces are traced with the face on the left: from the dart `u -> x` the
//! walk continues to the neighbor of `x` just before `u` in counterclockwise
//! order. The face traced from `v -> w` occupies the sector between `w` and
//! its counterclockwise successor at `v`.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs, dist, Dist, LazyGraph, Subgraph};
use crate::rays::DoubleRay;
use crate::token::VertexToken;

pub const DEFAULT_FACE_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceWalk {
    /// Closed walk in canonical form, first vertex not repeated at the end.
    pub vertices: Vec<VertexToken>,
    pub length: usize,
}

fn position(rot: &[VertexToken], v: &VertexToken) -> Result<usize> {
    rot.iter()
        .position(|x| x == v)
        .ok_or_else(|| Error::InvalidArgument(format!("{v} is not in the rotation")))
}

/// Traces the face to the left of the dart `u -> v`.
pub fn trace_face(g: &LazyGraph, u: &VertexToken, v: &VertexToken, cap: usize) -> Result<Vec<VertexToken>> {
    let mut walk = vec![u.clone()];
    let (mut a, mut b) = (u.clone(), v.clone());
    loop {
        let rot = g.rotation(&b)?;
        let i = position(&rot, &a)?;
        let w = rot[(i + rot.len() - 1) % rot.len()].clone();
        (a, b) = (b, w);
        if &a == u && &b == v {
            return Ok(walk);
        }
        walk.push(a.clone());
        if walk.len() > cap {
            return Err(Error::UnboundedFace { start: u.clone(), cap });
        }
    }
}

/// Least rotation of the closed walk, over both directions.
pub fn canonical_face(walk: &[VertexToken]) -> Vec<VertexToken> {
    let n = walk.len();
    let mut best: Option<Vec<VertexToken>> = None;
    let mut rev: Vec<VertexToken> = walk.to_vec();
    rev.reverse();
    for seq in [walk.to_vec(), rev] {
        for s in 0..n {
            let cand: Vec<VertexToken> = (0..n).map(|k| seq[(s + k) % n].clone()).collect();
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    }
    best.unwrap_or_default()
}

/// All distinct faces through `v`.
pub fn face_walks_at(g: &LazyGraph, v: &VertexToken, cap: usize) -> Result<Vec<FaceWalk>> {
    let mut faces = BTreeSet::new();
    for w in g.rotation(v)? {
        let walk = trace_face(g, v, &w, cap)?;
        let length = walk.len();
        faces.insert(FaceWalk {
            vertices: canonical_face(&walk),
            length,
        });
    }
    Ok(faces.into_iter().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
    #[serde(rename = "ON")]
    On,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
            Side::On => Side::On,
        }
    }
}

/// Darts `v -> w` whose left faces lie on `side` of the walk `pred -> v -> succ`.
/// Side A is the left side of the oriented walk.
pub fn side_darts(
    g: &LazyGraph,
    pred: &VertexToken,
    v: &VertexToken,
    succ: &VertexToken,
    side: Side,
) -> Result<Vec<VertexToken>> {
    let rot = g.rotation(v)?;
    let n = rot.len();
    let (ip, is) = (position(&rot, pred)?, position(&rot, succ)?);
    let (from, to) = match side {
        Side::A => (is, ip),
        Side::B => (ip, is),
        Side::On => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    let mut k = from;
    while k != to {
        out.push(rot[k].clone());
        k = (k + 1) % n;
    }
    Ok(out)
}

/// Neighbors of `v` strictly inside the `side` sector of `pred -> v -> succ`.
pub fn side_neighbors(
    g: &LazyGraph,
    pred: &VertexToken,
    v: &VertexToken,
    succ: &VertexToken,
    side: Side,
) -> Result<Vec<VertexToken>> {
    let darts = side_darts(g, pred, v, succ, side)?;
    Ok(darts.into_iter().skip(1).collect())
}

/// A double ray fixing the reference for side classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideMap {
    pub ray: DoubleRay,
}

impl SideMap {
    pub fn new(ray: DoubleRay) -> Self {
        SideMap { ray }
    }
}

/// Classifies `v` by flooding from it while avoiding the ray. The first
/// layer of the flood that touches the ray decides, provided all its contacts
/// agree, none is at a materialized end, and both ends lie farther away than
/// the contact. Otherwise the window is too small to decide.
pub fn side_of(g: &LazyGraph, sm: &SideMap, v: &VertexToken, cap: usize) -> Result<Side> {
    let verts = sm.ray.vertices();
    let index: HashMap<&VertexToken, usize> = verts.iter().enumerate().map(|(i, x)| (x, i)).collect();
    if index.contains_key(v) {
        return Ok(Side::On);
    }
    g.validate(v)?;
    let last = verts.len() - 1;
    let mut seen: HashSet<VertexToken> = HashSet::from([v.clone()]);
    let mut layer = vec![v.clone()];
    for depth in 0..=cap {
        let mut verdict: Option<Side> = None;
        let mut next = Vec::new();
        for x in &layer {
            for w in g.neighbors(x)? {
                if let Some(&k) = index.get(&w) {
                    if k == 0 || k == last {
                        return Err(Error::WindowExhausted(format!("flood from {v} reaches the end of the ray")));
                    }
                    let s = if side_neighbors(g, &verts[k - 1], &w, &verts[k + 1], Side::A)?.contains(x) {
                        Side::A
                    } else {
                        Side::B
                    };
                    if verdict.is_some_and(|p| p != s) {
                        return Err(Error::WindowExhausted(format!("flood from {v} touches both sides")));
                    }
                    verdict = Some(s);
                } else if seen.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        if let Some(s) = verdict {
            for end in [&verts[0], &verts[last]] {
                if let Dist::Exact(_) = dist(g, v, end, depth + 2)? {
                    return Err(Error::WindowExhausted(format!("{v} is too close to the end {end}")));
                }
            }
            return Ok(s);
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    Err(Error::WindowExhausted(format!("no contact with the ray within {cap} steps of {v}")))
}

/// Union of the faces on `side` incident with `ray.vertices()[k]` for the
/// given indices. Indices at the two materialized ends are skipped because
/// their sectors are undetermined, and faces through an end vertex are
/// dropped because they may reach past it.
pub fn incident_face_subgraph(
    g: &LazyGraph,
    ray: &DoubleRay,
    indices: impl IntoIterator<Item = usize>,
    side: Side,
    cap: usize,
) -> Result<Subgraph> {
    let verts = ray.vertices();
    let mut out = Subgraph::default();
    let mut seen_faces: HashSet<Vec<VertexToken>> = HashSet::new();
    for k in indices {
        if k == 0 || k + 1 >= verts.len() {
            continue;
        }
        for w in side_darts(g, &verts[k - 1], &verts[k], &verts[k + 1], side)? {
            let walk = trace_face(g, &verts[k], &w, cap)?;
            if walk.contains(&verts[0]) || walk.contains(&verts[verts.len() - 1]) {
                continue;
            }
            if !seen_faces.insert(canonical_face(&walk)) {
                continue;
            }
            for i in 0..walk.len() {
                out.add_edge(&walk[i], &walk[(i + 1) % walk.len()]);
            }
        }
    }
    Ok(out)
}

/// Connected pieces of a window after deleting the ray, used to check that
/// the ray splits it into exactly two sides.
pub fn side_classes(g: &LazyGraph, window: &BTreeSet<VertexToken>, ray: &DoubleRay) -> Result<Vec<BTreeSet<VertexToken>>> {
    let on: HashSet<VertexToken> = ray.vertices().into_iter().collect();
    let mut seen: HashSet<VertexToken> = HashSet::new();
    let mut out = Vec::new();
    for v in window {
        if on.contains(v) || seen.contains(v) {
            continue;
        }
        let b = bfs(g, std::slice::from_ref(v), usize::MAX, |w| window.contains(w) && !on.contains(w))?;
        let comp: BTreeSet<VertexToken> = b.order.into_iter().collect();
        seen.extend(comp.iter().cloned());
        out.push(comp);
    }
    Ok(out)
}
