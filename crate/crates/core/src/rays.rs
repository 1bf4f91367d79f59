//! Rays, double rays, combs, disjoint bundles and divergence certificates,
//! all materialized to finite depth.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::disjoint_paths;
use crate::graph::{ball, bfs, shortest_path, Family, LazyGraph};
use crate::token::{parse_ints, VertexToken};

/// Deterministic rule producing the next ray vertex from the current one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "params", rename_all = "snake_case")]
pub enum Extender {
    /// Add a fixed integer vector to the coordinates (after an optional
    /// `prefix|` part, which is kept).
    Translate { step: Vec<i64> },
    /// Tree words: append the letter after the current last letter in the
    /// given cycle.
    Alternate { letters: Vec<usize> },
}

impl Extender {
    fn next(&self, v: &VertexToken) -> Option<VertexToken> {
        match self {
            Extender::Translate { step } => {
                let s = v.as_str();
                let (head, coords) = match s.split_once('|') {
                    Some((h, c)) => (Some(h), c),
                    None => (None, s),
                };
                let xs = parse_ints(coords)?;
                if xs.len() != step.len() {
                    return None;
                }
                let moved: Vec<String> = xs.iter().zip(step).map(|(a, b)| (a + b).to_string()).collect();
                let body = moved.join(",");
                Some(VertexToken::new(match head {
                    Some(h) => format!("{h}|{body}"),
                    None => body,
                }))
            }
            Extender::Alternate { letters } => {
                if letters.len() < 2 {
                    return None;
                }
                let s = v.as_str();
                let last = if s == "e" {
                    None
                } else {
                    s.rsplit('.').next().and_then(|l| l.parse::<usize>().ok())
                };
                let next = match last.and_then(|l| letters.iter().position(|&x| x == l)) {
                    Some(p) => letters[(p + 1) % letters.len()],
                    None => letters[0],
                };
                if Some(next) == last {
                    return None;
                }
                Some(VertexToken::new(if s == "e" {
                    next.to_string()
                } else {
                    format!("{s}.{next}")
                }))
            }
        }
    }
}

/// One-way infinite path: a materialized prefix plus an optional rule.
/// Without a rule the ray is truncated at its prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ray {
    pub prefix: Vec<VertexToken>,
    pub extender: Option<Extender>,
}

impl Ray {
    pub fn explicit(prefix: Vec<VertexToken>) -> Self {
        Ray { prefix, extender: None }
    }

    pub fn with_rule(g: &LazyGraph, start: VertexToken, rule: Extender, len: usize) -> Result<Self> {
        g.validate(&start)?;
        let mut r = Ray {
            prefix: vec![start],
            extender: Some(rule),
        };
        r.extend_to(g, len)?;
        Ok(r)
    }

    pub fn len(&self) -> usize {
        self.prefix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn origin(&self) -> &VertexToken {
        &self.prefix[0]
    }

    /// Materializes at least `len` vertices. Truncated rays fail with
    /// `WindowExhausted` when asked for more than they hold.
    pub fn extend_to(&mut self, g: &LazyGraph, len: usize) -> Result<()> {
        if self.prefix.len() >= len {
            return Ok(());
        }
        let Some(rule) = self.extender.clone() else {
            return Err(Error::WindowExhausted(format!(
                "truncated ray holds {} vertices, {len} requested",
                self.prefix.len()
            )));
        };
        let mut seen: HashSet<VertexToken> = self.prefix.iter().cloned().collect();
        while self.prefix.len() < len {
            let cur = self.prefix.last().expect("nonempty ray");
            let next = rule
                .next(cur)
                .ok_or_else(|| Error::InvalidArgument(format!("extender {rule:?} undefined at {cur}")))?;
            if !g.adjacent(cur, &next)? || !seen.insert(next.clone()) {
                return Err(Error::InvalidArgument(format!("extender {rule:?} is not a ray step at {cur}")));
            }
            self.prefix.push(next);
        }
        Ok(())
    }

    /// Materializes as far as possible up to `len`, never failing on truncation.
    pub fn extend_best_effort(&mut self, g: &LazyGraph, len: usize) -> Result<()> {
        if self.extender.is_some() {
            self.extend_to(g, len)
        } else {
            Ok(())
        }
    }

    pub fn is_path(&self, g: &LazyGraph) -> Result<bool> {
        is_path(g, &self.prefix)
    }
}

pub fn is_path(g: &LazyGraph, walk: &[VertexToken]) -> Result<bool> {
    let distinct: HashSet<&VertexToken> = walk.iter().collect();
    if distinct.len() != walk.len() {
        return Ok(false);
    }
    for w in walk.windows(2) {
        if !g.adjacent(&w[0], &w[1])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two rays joined at their origins. `center_path` runs from the negative
/// origin to the positive origin and is empty when the origins coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleRay {
    pub negative: Ray,
    pub positive: Ray,
    pub center_path: Vec<VertexToken>,
}

impl DoubleRay {
    /// Vertices from the far negative end to the far positive end.
    pub fn vertices(&self) -> Vec<VertexToken> {
        let mut out: Vec<VertexToken> = self.negative.prefix.iter().rev().cloned().collect();
        if !self.center_path.is_empty() {
            out.extend(self.center_path[1..].iter().cloned());
        }
        out.extend(self.positive.prefix[1..].iter().cloned());
        out
    }

    /// Index of the negative origin in `vertices()`.
    pub fn origin_index(&self) -> usize {
        self.negative.prefix.len() - 1
    }

    pub fn extend_to(&mut self, g: &LazyGraph, len: usize) -> Result<()> {
        self.negative.extend_to(g, len)?;
        self.positive.extend_to(g, len)
    }

    pub fn is_valid(&self, g: &LazyGraph) -> Result<bool> {
        let origins_ok = if self.center_path.is_empty() {
            self.negative.origin() == self.positive.origin()
        } else {
            self.center_path.first() == Some(self.negative.origin())
                && self.center_path.last() == Some(self.positive.origin())
        };
        Ok(origins_ok && is_path(g, &self.vertices())?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Prov {
    Neg,
    Center,
    Pos,
}

/// Joins two rays into a double ray. The origins are connected by a
/// shortest path through `allowed` (any vertex when `None`), then cycles in
/// the concatenation are excised keeping first occurrences.
pub fn merge_to_double_ray(
    g: &LazyGraph,
    r_plus: &Ray,
    r_minus: &Ray,
    allowed: Option<&BTreeSet<VertexToken>>,
    cap: usize,
) -> Result<DoubleRay> {
    if r_plus.is_empty() || r_minus.is_empty() {
        return Err(Error::InvalidArgument("cannot merge an empty ray".into()));
    }
    let (a, b) = (r_minus.origin(), r_plus.origin());
    let center = if a == b {
        Vec::new()
    } else {
        let ok = |v: &VertexToken| allowed.is_none_or(|s| s.contains(v));
        shortest_path(g, a, cap, ok, |v| v == b)?
            .ok_or_else(|| Error::WindowExhausted(format!("no path joins ray origins {a} and {b}")))?
    };
    let mut items: Vec<(VertexToken, Prov)> = r_minus.prefix.iter().rev().map(|t| (t.clone(), Prov::Neg)).collect();
    if center.len() > 2 {
        items.extend(center[1..center.len() - 1].iter().map(|t| (t.clone(), Prov::Center)));
    }
    items.extend(r_plus.prefix.iter().map(|t| (t.clone(), Prov::Pos)));

    // (token, provenance of kept occurrence, provenance of latest repeat)
    let mut out: Vec<(VertexToken, Prov, Prov)> = Vec::new();
    let mut at: HashMap<VertexToken, usize> = HashMap::new();
    for (tok, prov) in items {
        if let Some(&p) = at.get(&tok) {
            for (dropped, _, _) in out.drain(p + 1..) {
                at.remove(&dropped);
            }
            out[p].2 = prov;
        } else {
            at.insert(tok.clone(), out.len());
            out.push((tok, prov, prov));
        }
    }
    let neg_end = out
        .iter()
        .rposition(|(_, p, _)| *p == Prov::Neg)
        .expect("negative ray contributes the first vertex");
    let pos_start = (neg_end..out.len())
        .find(|&i| out[i].1 == Prov::Pos || out[i].2 == Prov::Pos)
        .ok_or_else(|| Error::WindowExhausted("positive ray vanished while merging".into()))?;
    let toks: Vec<VertexToken> = out.into_iter().map(|(t, _, _)| t).collect();
    let negative = Ray {
        prefix: toks[..=neg_end].iter().rev().cloned().collect(),
        extender: r_minus.extender.clone().filter(|_| toks[0] == *r_minus.prefix.last().unwrap()),
    };
    let positive = Ray {
        prefix: toks[pos_start..].to_vec(),
        extender: r_plus.extender.clone().filter(|_| toks.last() == r_plus.prefix.last()),
    };
    let center_path = if pos_start == neg_end {
        Vec::new()
    } else {
        toks[neg_end..=pos_start].to_vec()
    };
    let dr = DoubleRay {
        negative,
        positive,
        center_path,
    };
    if !dr.is_valid(g)? {
        return Err(Error::WindowExhausted("merged walk is not a path".into()));
    }
    Ok(dr)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tooth {
    /// Starts on the spine, ends at `tooth`.
    pub path: Vec<VertexToken>,
    pub tooth: VertexToken,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comb {
    pub spine: Ray,
    pub teeth: Vec<Tooth>,
}

/// Spine through `allowed` from near `target[0]` to near the last target,
/// then up to `t` teeth chosen greedily along the spine with strictly
/// increasing target index. Teeth run through allowed non-spine vertices.
pub fn comb_from(
    g: &LazyGraph,
    allowed: &BTreeSet<VertexToken>,
    target: &[VertexToken],
    t: usize,
    tooth_cap: usize,
) -> Result<Comb> {
    let tindex: HashMap<&VertexToken, usize> = target.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut anchors = Vec::new();
    for v in target {
        if let Some(w) = g.neighbors(v)?.into_iter().find(|w| allowed.contains(w)) {
            anchors.push(w);
        }
    }
    let (Some(start), Some(end)) = (anchors.first(), anchors.last()) else {
        return Err(Error::not_found("comb spine: subgraph does not touch the target", 0));
    };
    let spine = shortest_path(g, start, allowed.len() + 1, |v| allowed.contains(v), |v| v == end)?
        .ok_or_else(|| Error::not_found("comb spine: subgraph is disconnected", 0))?;
    let on_spine: HashSet<&VertexToken> = spine.iter().collect();
    let mut blocked: HashSet<VertexToken> = HashSet::new();
    let mut teeth = Vec::new();
    let mut last: Option<usize> = None;
    for s in &spine {
        if teeth.len() == t {
            break;
        }
        // layered BFS; in the first layer holding usable targets take the
        // smallest target index
        let mut parent: HashMap<VertexToken, VertexToken> = HashMap::new();
        let mut seen: HashSet<VertexToken> = HashSet::from([s.clone()]);
        let mut layer = vec![s.clone()];
        let mut found: Option<(usize, VertexToken)> = None;
        for _ in 0..tooth_cap {
            let mut next = Vec::new();
            for u in &layer {
                for w in g.neighbors(u)? {
                    if seen.contains(&w) {
                        continue;
                    }
                    if let Some(&k) = tindex.get(&w) {
                        if last.is_none_or(|l| k > l) && !blocked.contains(&w) {
                            if found.as_ref().is_none_or(|(fk, _)| k < *fk) {
                                parent.insert(w.clone(), u.clone());
                                found = Some((k, w.clone()));
                            }
                        }
                        continue;
                    }
                    if allowed.contains(&w) && !on_spine.contains(&w) && !blocked.contains(&w) {
                        seen.insert(w.clone());
                        parent.insert(w.clone(), u.clone());
                        next.push(w);
                    }
                }
            }
            if found.is_some() || next.is_empty() {
                break;
            }
            layer = next;
        }
        if let Some((k, tooth)) = found {
            let mut path = vec![tooth.clone()];
            let mut cur = &tooth;
            while cur != s {
                cur = &parent[cur];
                path.push(cur.clone());
            }
            path.reverse();
            for v in &path[1..] {
                blocked.insert(v.clone());
            }
            last = Some(k);
            teeth.push(Tooth { path, tooth });
        }
    }
    if teeth.len() < t {
        return Err(Error::not_found(format!("{t} comb teeth"), teeth.len()));
    }
    Ok(Comb {
        spine: Ray::explicit(spine),
        teeth,
    })
}

/// The family's preferred pairs of opposite rays from the root.
pub fn opposite_rays(g: &LazyGraph, len: usize) -> Result<Vec<(Ray, Ray)>> {
    let root = g.root();
    let tr = |v: Vec<i64>| Extender::Translate { step: v };
    let steps: Vec<(Extender, Extender)> = match g.family() {
        Family::Hex | Family::HalfGrid | Family::ApexHub | Family::TwoStorey => {
            vec![(tr(vec![1, 0]), tr(vec![-1, 0]))]
        }
        Family::Square | Family::Triangular => vec![
            (tr(vec![1, 0]), tr(vec![-1, 0])),
            (tr(vec![0, 1]), tr(vec![0, -1])),
        ],
        Family::Cubic => vec![(tr(vec![1, 0, 0]), tr(vec![-1, 0, 0]))],
        Family::Cylinder { .. } => vec![(tr(vec![0, 1]), tr(vec![0, -1]))],
        Family::RegularTree { .. } => vec![(
            Extender::Alternate { letters: vec![0, 1] },
            Extender::Alternate { letters: vec![1, 0] },
        )],
        Family::WindowImport(_) => Vec::new(),
    };
    steps
        .into_iter()
        .map(|(a, b)| Ok((Ray::with_rule(g, root.clone(), a, len)?, Ray::with_rule(g, root.clone(), b, len)?)))
        .collect()
}

/// The family's canonical geodesic ray from the root, if it has one.
pub fn canonical_ray(g: &LazyGraph, len: usize) -> Result<Ray> {
    match opposite_rays(g, len)?.into_iter().next() {
        Some((r, _)) => Ok(r),
        None => Err(Error::not_found("canonical ray (family has no builtin ray rule)", 0)),
    }
}

/// Smallest sphere radius around the root with at least `k` vertices.
fn start_radius(dist: &HashMap<VertexToken, usize>, k: usize, depth: usize) -> usize {
    (1..depth)
        .find(|&r| dist.values().filter(|&&d| d == r).count() >= k)
        .unwrap_or(1)
}

/// `k` rays pairwise disjoint over the window `ball(root, depth)`, from a
/// sphere near the root to the sphere of radius `depth`.
pub fn disjoint_rays(g: &LazyGraph, k: usize, depth: usize) -> Result<Vec<Ray>> {
    if k == 0 || depth == 0 {
        return Err(Error::InvalidArgument("disjoint_rays needs k >= 1 and depth >= 1".into()));
    }
    if k == 1 {
        if let Ok(r) = canonical_ray(g, depth + 1) {
            return Ok(vec![r]);
        }
    }
    let root = g.root();
    let b = bfs(g, std::slice::from_ref(&root), depth, |_| true)?;
    let window: BTreeSet<VertexToken> = b.order.iter().cloned().collect();
    let s = start_radius(&b.dist, k, depth);
    let sources: BTreeSet<_> = b.dist.iter().filter(|(_, &d)| d == s).map(|(v, _)| v.clone()).collect();
    let sinks: BTreeSet<_> = b.dist.iter().filter(|(_, &d)| d == depth).map(|(v, _)| v.clone()).collect();
    let window: BTreeSet<_> = window.into_iter().filter(|v| b.dist[v] >= s).collect();
    let fr = disjoint_paths(g, &window, &sources, &sinks, Some(k))?;
    if fr.value < k {
        return Err(Error::NotFound {
            what: format!("{k} disjoint rays to depth {depth}"),
            achieved: fr.value,
            separator: fr.separator,
        });
    }
    Ok(fr.paths.into_iter().map(Ray::explicit).collect())
}

/// Components of `ball(root, depth)` minus `ball(root, depth / 2)` that
/// reach the outer sphere: the ends visible in the window.
pub fn end_components(g: &LazyGraph, depth: usize) -> Result<Vec<BTreeSet<VertexToken>>> {
    let root = g.root();
    let b = bfs(g, std::slice::from_ref(&root), depth, |_| true)?;
    let inner = depth / 2;
    let mut outer: Vec<&VertexToken> = b.dist.iter().filter(|(_, &d)| d > inner).map(|(v, _)| v).collect();
    outer.sort();
    let mut seen: HashSet<VertexToken> = HashSet::new();
    let mut comps = Vec::new();
    for v in outer {
        if seen.contains(v) {
            continue;
        }
        let c = bfs(g, std::slice::from_ref(v), usize::MAX, |w| b.dist.get(w).is_some_and(|&d| d > inner))?;
        let comp: BTreeSet<VertexToken> = c.order.into_iter().collect();
        seen.extend(comp.iter().cloned());
        if comp.iter().any(|w| b.dist[w] == depth) {
            comps.push(comp);
        }
    }
    Ok(comps)
}

/// `k` disjoint rays that all head into the same visible end, so that any
/// two are joined by the paths of that end.
pub fn equivalent_bundle(g: &LazyGraph, k: usize, depth: usize) -> Result<Vec<Ray>> {
    if k == 0 || depth < 2 {
        return Err(Error::InvalidArgument("equivalent_bundle needs k >= 1 and depth >= 2".into()));
    }
    let root = g.root();
    let b = bfs(g, std::slice::from_ref(&root), depth, |_| true)?;
    let s = start_radius(&b.dist, k, depth / 2);
    let sources: BTreeSet<_> = b.dist.iter().filter(|(_, &d)| d == s).map(|(v, _)| v.clone()).collect();
    let mut best: Option<(usize, Option<Vec<VertexToken>>)> = None;
    for comp in end_components(g, depth)? {
        let sinks: BTreeSet<_> = comp.iter().filter(|v| b.dist[*v] == depth).cloned().collect();
        let window: BTreeSet<_> = b.order.iter().filter(|v| b.dist[*v] >= s).cloned().collect();
        let fr = disjoint_paths(g, &window, &sources, &sinks, Some(k))?;
        if fr.value >= k {
            return Ok(fr.paths.into_iter().map(Ray::explicit).collect());
        }
        if best.as_ref().is_none_or(|(v, _)| fr.value > *v) {
            best = Some((fr.value, fr.separator));
        }
    }
    let (achieved, separator) = best.unwrap_or((0, None));
    Err(Error::NotFound {
        what: format!("{k} disjoint rays into one end at depth {depth}"),
        achieved,
        separator,
    })
}

/// `k` disjoint paths between the materialized vertex sets of two rays
/// inside `ball(root, depth)`. On failure the error carries a minimum
/// separator.
pub fn equivalent(g: &LazyGraph, r1: &Ray, r2: &Ray, k: usize, depth: usize) -> Result<Vec<Vec<VertexToken>>> {
    let mut r1 = r1.clone();
    let mut r2 = r2.clone();
    r1.extend_best_effort(g, depth + 1)?;
    r2.extend_best_effort(g, depth + 1)?;
    let root = g.root();
    let mut window = ball(g, &root, depth)?.vertices;
    let a: BTreeSet<VertexToken> = r1.prefix.iter().cloned().collect();
    let b: BTreeSet<VertexToken> = r2.prefix.iter().cloned().collect();
    window.extend(a.iter().cloned());
    window.extend(b.iter().cloned());
    let fr = disjoint_paths(g, &window, &a, &b, None)?;
    if fr.value < k {
        return Err(Error::NotFound {
            what: format!("{k} disjoint connecting paths"),
            achieved: fr.value,
            separator: fr.separator,
        });
    }
    Ok(fr.paths.into_iter().take(k).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    /// Number of prefix vertices of each ray taken into account.
    pub window_radius: usize,
}

/// Rows `(n, i, j, w)`: every vertex of `r1[i..w]` is at distance more than
/// `n` from every vertex of `r2[j..w]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceCertificate {
    pub rows: Vec<ScaleRow>,
}

impl DivergenceCertificate {
    pub fn reaches(&self) -> usize {
        self.rows.last().map_or(0, |r| r.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub n: usize,
    pub u: VertexToken,
    pub v: VertexToken,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Divergence {
    Certificate(DivergenceCertificate),
    Failure {
        witness: FailureWitness,
        partial: DivergenceCertificate,
    },
}

impl Divergence {
    pub fn certificate(&self) -> Option<&DivergenceCertificate> {
        match self {
            Divergence::Certificate(c) => Some(c),
            Divergence::Failure { .. } => None,
        }
    }
}

/// Depth to which rays are deepened before checking a given scale.
pub fn divergence_depth(scale: usize) -> usize {
    2 * scale + 8
}

/// Builds the canonical certificate up to `scale`, or the first scale at
/// which even the deepest materialized vertices are close.
pub fn check_divergence(g: &LazyGraph, r1: &Ray, r2: &Ray, scale: usize) -> Result<Divergence> {
    let want = divergence_depth(scale);
    let mut r1 = r1.clone();
    let mut r2 = r2.clone();
    r1.extend_best_effort(g, want)?;
    r2.extend_best_effort(g, want)?;
    let w = r1.len().min(r2.len()).min(want);
    if w < scale + 2 {
        return Err(Error::WindowExhausted(format!(
            "rays hold {w} vertices, scale {scale} needs at least {}",
            scale + 2
        )));
    }
    let far = scale + 1;
    let targets: HashMap<&VertexToken, usize> = r2.prefix[..w].iter().enumerate().map(|(j, v)| (v, j)).collect();
    let rows: Vec<Vec<usize>> = r1.prefix[..w]
        .par_iter()
        .map(|u| -> Result<Vec<usize>> {
            let b = bfs(g, std::slice::from_ref(u), scale, |_| true)?;
            let mut row = vec![far; w];
            for (v, &j) in &targets {
                if let Some(&d) = b.dist.get(*v) {
                    row[j] = d;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    // suf[i][j] = min over i' >= i, j' >= j
    let mut suf = vec![vec![far; w + 1]; w + 1];
    for i in (0..w).rev() {
        for j in (0..w).rev() {
            suf[i][j] = rows[i][j].min(suf[i + 1][j]).min(suf[i][j + 1]);
        }
    }
    let mut cert = DivergenceCertificate::default();
    let (mut pi, mut pj) = (0usize, 0usize);
    for n in 1..=scale {
        let hit = (0..w).find(|&k| suf[pi.max(k)][pj.max(k)] > n);
        let Some(k) = hit else {
            let (i0, j0) = (pi.max(w - 1), pj.max(w - 1));
            let mut best: Option<(usize, usize, usize)> = None;
            for (i, row) in rows.iter().enumerate().skip(i0) {
                for (j, &d) in row.iter().enumerate().skip(j0) {
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, i, j));
                    }
                }
            }
            let (d, i, j) = best.expect("nonempty tails");
            return Ok(Divergence::Failure {
                witness: FailureWitness {
                    n,
                    u: r1.prefix[i].clone(),
                    v: r2.prefix[j].clone(),
                    d,
                },
                partial: cert,
            });
        };
        let (ki, kj) = (pi.max(k), pj.max(k));
        let i = (pi..=ki).find(|&i| suf[i][kj] > n).expect("ki qualifies");
        let j = (pj..=kj).find(|&j| suf[i][j] > n).expect("kj qualifies");
        cert.rows.push(ScaleRow {
            n,
            i,
            j,
            window_radius: w,
        });
        (pi, pj) = (i, j);
    }
    Ok(Divergence::Certificate(cert))
}

/// Greedy growth of two rays from distinct root neighbors, each step moving
/// one sphere outward to the candidate farthest from the other ray's head.
fn greedy_pair(
    g: &LazyGraph,
    a: &VertexToken,
    b: &VertexToken,
    len: usize,
    root_dist: &HashMap<VertexToken, usize>,
    effort: &mut usize,
) -> Result<Option<(Ray, Ray)>> {
    let root = g.root();
    let mut r1 = vec![root.clone(), a.clone()];
    let mut r2 = vec![root, b.clone()];
    let mut used: HashSet<VertexToken> = r1.iter().chain(r2.iter()).cloned().collect();
    while r1.len() < len || r2.len() < len {
        for turn in 0..2 {
            if *effort == 0 {
                return Ok(None);
            }
            *effort -= 1;
            let (me, other) = if turn == 0 { (&mut r1, &r2) } else { (&mut r2, &r1) };
            let head = me.last().unwrap().clone();
            let dh = root_dist.get(&head).copied();
            let probe = bfs(g, std::slice::from_ref(other.last().unwrap()), 8, |_| true)?;
            let mut best: Option<(usize, VertexToken)> = None;
            for w in g.neighbors(&head)? {
                if used.contains(&w) {
                    continue;
                }
                if let (Some(dh), Some(dw)) = (dh, root_dist.get(&w)) {
                    if *dw != dh + 1 {
                        continue;
                    }
                }
                let sep = probe.dist.get(&w).copied().unwrap_or(9);
                if best.as_ref().is_none_or(|(s, _)| sep > *s) {
                    best = Some((sep, w));
                }
            }
            let Some((_, w)) = best else { return Ok(None) };
            used.insert(w.clone());
            me.push(w);
        }
    }
    Ok(Some((Ray::explicit(r1), Ray::explicit(r2))))
}

/// Searches for a pair of rays with a certificate reaching `scale`:
/// builtin opposite rays first, then greedy growth from pairs of root
/// neighbors. `effort` bounds the greedy extension steps. Failure means the
/// search was exhausted, not that no pair exists.
pub fn diverging_pair(g: &LazyGraph, scale: usize, effort: usize) -> Result<(Ray, Ray, DivergenceCertificate)> {
    if scale == 0 {
        return Err(Error::InvalidArgument("scale must be at least 1".into()));
    }
    let len = divergence_depth(scale);
    let mut best = 0;
    for (r1, r2) in opposite_rays(g, len)? {
        match check_divergence(g, &r1, &r2, scale)? {
            Divergence::Certificate(c) => return Ok((r1, r2, c)),
            Divergence::Failure { partial, .. } => best = best.max(partial.reaches()),
        }
    }
    let root = g.root();
    let root_dist = bfs(g, std::slice::from_ref(&root), len, |_| true)?.dist;
    let nbrs = g.neighbors(&root)?;
    let mut effort = effort;
    'outer: for (x, a) in nbrs.iter().enumerate() {
        for b in &nbrs[x + 1..] {
            let Some((r1, r2)) = greedy_pair(g, a, b, len, &root_dist, &mut effort)? else {
                if effort == 0 {
                    break 'outer;
                }
                continue;
            };
            match check_divergence(g, &r1, &r2, scale) {
                Ok(Divergence::Certificate(c)) => return Ok((r1, r2, c)),
                Ok(Divergence::Failure { partial, .. }) => best = best.max(partial.reaches()),
                Err(Error::WindowExhausted(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Err(Error::not_found(format!("diverging pair at scale {scale}"), best))
}
