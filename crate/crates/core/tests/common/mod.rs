//! Golden artifacts, naive oracles and single-token mutations shared by the
//! integration tests. The oracles follow the definitions directly and share
//! no code with the verifiers.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use gridweaver::commands::{
    cmd_demo_chain, cmd_demo_clique, cmd_demo_two_storey, cmd_diverge, cmd_refute, cmd_transfer, cmd_weave, Artifact,
    EmbeddingChoice, TreeMapChoice,
};
use gridweaver::config::Caps;
use gridweaver::graph::{ball, dist, Dist, FamilySpec, LazyGraph};
use gridweaver::rays::end_components;
use gridweaver::token::{parse_coord2, parse_coord3, parse_int};
use gridweaver::transfer::{QIToTree, RayFamily};
use gridweaver::VertexToken;

pub fn spec(s: &str) -> FamilySpec {
    FamilySpec::parse(s).unwrap()
}

/// One artifact per command, all from fixed arguments.
pub fn goldens() -> Vec<(&'static str, Artifact)> {
    let caps = Caps::default();
    let (minor, sub) = cmd_transfer(&EmbeddingChoice::HexInSquare, 2, 2, &caps).unwrap();
    vec![
        ("weave", cmd_weave(&spec("square"), 4, 3, None, &caps).unwrap()),
        ("diverge", cmd_diverge(&spec("square"), &caps).unwrap()),
        ("transfer-minor", minor),
        ("transfer-subdivision", sub),
        ("refute", cmd_refute(&spec("cylinder:4"), 5, 12, &TreeMapChoice::Natural, &caps).unwrap()),
        ("demo-chain", cmd_demo_chain(4, 6, 4, &caps).unwrap()),
        ("demo-clique", cmd_demo_clique(4, &caps).unwrap()),
        ("demo-two-storey", cmd_demo_two_storey(4, 3, &caps).unwrap()),
    ]
}

fn host(a: &Artifact) -> Option<LazyGraph> {
    LazyGraph::from_spec(a.host()).ok()
}

fn within(g: &LazyGraph, a: &VertexToken, b: &VertexToken, cap: usize) -> Option<usize> {
    match dist(g, a, b, cap).ok()? {
        Dist::Exact(d) => Some(d),
        Dist::Exceeds(_) => None,
    }
}

fn connected(g: &LazyGraph, set: &BTreeSet<VertexToken>) -> bool {
    let Some(s) = set.iter().next() else { return false };
    let mut seen = HashSet::from([s.clone()]);
    let mut q = VecDeque::from([s.clone()]);
    while let Some(u) = q.pop_front() {
        for w in g.neighbors(&u).unwrap_or_default() {
            if set.contains(&w) && seen.insert(w.clone()) {
                q.push_back(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Whether the artifact satisfies every invariant of its kind.
pub fn oracle(a: &Artifact) -> bool {
    let Some(g) = host(a) else { return false };
    let valid = |t: &VertexToken| g.validate(t).is_ok();
    let adj = |x: &VertexToken, y: &VertexToken| valid(x) && valid(y) && g.neighbors(x).unwrap().contains(y);
    match a {
        Artifact::Subdivision { pattern, map, .. } => {
            let images: Vec<&VertexToken> = pattern.vertices.iter().filter_map(|v| map.branch.get(v)).collect();
            if images.len() != pattern.vertices.len() || map.branch.len() != images.len() {
                return false;
            }
            let branch_set: HashSet<&VertexToken> = images.iter().copied().collect();
            if branch_set.len() != images.len() || !images.iter().all(|t| valid(t)) {
                return false;
            }
            if map.edge_paths.len() != pattern.edges.len() {
                return false;
            }
            let mut internal = HashSet::new();
            for (u, v) in &pattern.edges {
                let found: Vec<_> = map.edge_paths.iter().filter(|e| &e.u == u && &e.v == v).collect();
                let [e] = found.as_slice() else { return false };
                let p = &e.path;
                if p.len() < 2 || p[0] != map.branch[u] || p[p.len() - 1] != map.branch[v] {
                    return false;
                }
                if p.windows(2).any(|w| !adj(&w[0], &w[1])) {
                    return false;
                }
                if p.iter().collect::<HashSet<_>>().len() != p.len() {
                    return false;
                }
                for t in &p[1..p.len() - 1] {
                    if branch_set.contains(t) || !internal.insert(t.clone()) {
                        return false;
                    }
                }
            }
            true
        }
        Artifact::Minor { pattern, model, .. } => {
            if model.branch_sets.len() != pattern.vertices.len() {
                return false;
            }
            let mut owner = HashSet::new();
            for v in &pattern.vertices {
                let Some(set) = model.branch_sets.get(v) else { return false };
                if set.is_empty() || !set.iter().all(valid) || !connected(&g, set) {
                    return false;
                }
                for t in set {
                    if !owner.insert(t.clone()) {
                        return false;
                    }
                }
            }
            let witnessed: HashSet<(&VertexToken, &VertexToken)> =
                model.edge_witness.iter().map(|w| (&w.u, &w.v)).collect();
            for w in &model.edge_witness {
                let (Some(bu), Some(bv)) = (model.branch_sets.get(&w.u), model.branch_sets.get(&w.v)) else {
                    return false;
                };
                if !pattern.has_edge(&w.u, &w.v) || !bu.contains(&w.a) || !bv.contains(&w.b) || !adj(&w.a, &w.b) {
                    return false;
                }
            }
            pattern.edges.iter().all(|(u, v)| witnessed.contains(&(u, v)))
        }
        Artifact::Divergence { rays, certificate, .. } => {
            let rows = &certificate.rows;
            if rows.is_empty() {
                return false;
            }
            let need = rows.iter().map(|r| r.window_radius).max().unwrap();
            let mut rs = rays.clone();
            for r in &mut rs {
                if r.prefix.windows(2).any(|w| !adj(&w[0], &w[1]))
                    || r.prefix.iter().collect::<HashSet<_>>().len() != r.prefix.len()
                    || !r.prefix.iter().all(valid)
                {
                    return false;
                }
                if r.extend_best_effort(&g, need).is_err() {
                    return false;
                }
            }
            for w in rows.windows(2) {
                if w[1].n <= w[0].n || w[1].i < w[0].i || w[1].j < w[0].j {
                    return false;
                }
            }
            rows.iter().all(|row| {
                let w = row.window_radius;
                if w > rs[0].len() || w > rs[1].len() || row.i >= w || row.j >= w {
                    return false;
                }
                rs[0].prefix[row.i..w]
                    .iter()
                    .all(|x| rs[1].prefix[row.j..w].iter().all(|y| within(&g, x, y, row.n).is_none()))
            })
        }
        Artifact::Refutation { qi, witness: w, .. } => refutation_oracle(&g, qi, w),
    }
}

fn refutation_oracle(g: &LazyGraph, qi: &QIToTree, w: &gridweaver::transfer::RefutationWitness) -> bool {
    let root = g.root();
    let Ok(win) = ball(g, &root, w.window_radius) else { return false };
    let Ok(t) = qi.tree_graph() else { return false };
    if !win.vertices.iter().all(|v| qi.map.contains_key(v)) {
        return false;
    }
    let td = |a: &VertexToken, b: &VertexToken| within(&t, a, b, 4 * w.window_radius + 64);
    if !t.neighbors(&w.tree_vertex).map(|n| n.contains(&w.next_vertex)).unwrap_or(false) {
        return false;
    }
    let r = w.forcing_radius;
    if r as f64 > qi.gamma + qi.c {
        return false;
    }
    let mut crowd = BTreeSet::new();
    let mut far = BTreeSet::new();
    for v in &win.vertices {
        let img = &qi.map[v];
        let (Some(d0), Some(d1)) = (td(img, &w.tree_vertex), td(img, &w.next_vertex)) else { return false };
        if d0 <= r {
            crowd.insert(v.clone());
        } else if d1 < d0 {
            far.insert(v.clone());
        }
    }
    let claimed: BTreeSet<VertexToken> = w.crowding_set.iter().cloned().collect();
    if claimed != crowd || claimed.len() != w.crowding_set.len() {
        return false;
    }
    if crowd.contains(&root) || far.contains(&root) || !far.iter().any(|v| win.frontier.contains(v)) {
        return false;
    }
    for u in win.vertices.iter().filter(|u| !crowd.contains(*u) && !far.contains(*u)) {
        if g.neighbors(u).unwrap().iter().any(|x| far.contains(x)) {
            return false;
        }
    }
    // capacity by brute force over tree vertices near the images
    let images: Vec<&VertexToken> = win.vertices.iter().map(|v| &qi.map[v]).collect();
    let mut centers: BTreeSet<VertexToken> = BTreeSet::new();
    for img in images.iter().collect::<BTreeSet<_>>() {
        centers.extend(ball(&t, img, r).unwrap().vertices);
    }
    let cap = centers
        .iter()
        .map(|c| images.iter().filter(|i| td(i, c).is_some_and(|d| d <= r)).count())
        .max()
        .unwrap_or(0);
    if cap != w.bound || w.threshold != cap + 1 || w.family_size <= cap || w.family.size() != w.family_size {
        return false;
    }
    match &w.family {
        RayFamily::Certified { rays } => {
            let mut seen = HashSet::new();
            rays.iter().all(|r| {
                r.prefix.windows(2).all(|p| g.neighbors(&p[0]).unwrap_or_default().contains(&p[1]))
                    && r.prefix.iter().all(|v| seen.insert(v.clone()))
            })
        }
        RayFamily::Unattainable { requested, achieved, separator } => {
            let Some(sep) = separator else { return false };
            let set: BTreeSet<&VertexToken> = sep.iter().collect();
            if achieved >= requested || set.len() != sep.len() || sep.len() != *achieved || set.contains(&root) {
                return false;
            }
            if !sep.iter().all(|v| g.validate(v).is_ok()) {
                return false;
            }
            let depth = w.window_radius;
            let d_root = |v: &VertexToken| within(g, &root, v, depth);
            // vertices reachable from the root without the separator
            let mut seen = HashSet::from([root.clone()]);
            let mut q = VecDeque::from([root.clone()]);
            while let Some(u) = q.pop_front() {
                for x in g.neighbors(&u).unwrap() {
                    if !set.contains(&x) && d_root(&x).is_some() && seen.insert(x.clone()) {
                        q.push_back(x);
                    }
                }
            }
            end_components(g, depth).unwrap().iter().any(|comp| {
                comp.iter()
                    .filter(|v| d_root(v) == Some(depth))
                    .all(|v| !seen.contains(v))
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Far,
    Malformed,
    Collide,
}

pub struct Mutation {
    pub site: String,
    pub kind: Kind,
    pub artifact: Artifact,
}

/// A valid token of the same shape far from everything used.
fn far_token(t: &VertexToken) -> VertexToken {
    let s = t.as_str();
    if let Some((h, rest)) = s.split_once('|') {
        if let Some((x, y)) = parse_coord2(rest) {
            return VertexToken::new(format!("{h}|{},{}", x + 1000, y + 1000));
        }
    }
    if let Some((x, y, z)) = parse_coord3(s) {
        return VertexToken::new(format!("{},{},{}", x + 1000, y + 1000, z + 1000));
    }
    if let Some((x, y)) = parse_coord2(s) {
        // keep the first coordinate so cylinder tokens stay in range
        return VertexToken::new(format!("{x},{}", y + 1000));
    }
    if let Some(n) = parse_int(s) {
        return VertexToken::new((n + 1000).to_string());
    }
    // tree word: append a long alternating tail
    let last = s.rsplit('.').next().and_then(|l| l.parse::<usize>().ok());
    let (a, b) = if last == Some(0) { (1, 0) } else { (0, 1) };
    let tail: Vec<String> = (0..40).map(|k| if k % 2 == 0 { a } else { b }.to_string()).collect();
    if s == "e" {
        VertexToken::new(tail.join("."))
    } else {
        VertexToken::new(format!("{s}.{}", tail.join(".")))
    }
}

type Site<'a> = (String, &'a VertexToken);

fn sites(a: &Artifact) -> Vec<Site<'_>> {
    let mut out = Vec::new();
    match a {
        Artifact::Subdivision { map, .. } => {
            for (p, h) in &map.branch {
                out.push((format!("branch[{p}]"), h));
            }
            for (k, e) in map.edge_paths.iter().enumerate() {
                for (i, t) in e.path.iter().enumerate() {
                    out.push((format!("path[{k}][{i}]"), t));
                }
            }
        }
        Artifact::Minor { model, .. } => {
            for (p, set) in &model.branch_sets {
                for t in set {
                    out.push((format!("set[{p}]:{t}"), t));
                }
            }
            for (k, w) in model.edge_witness.iter().enumerate() {
                out.push((format!("witness[{k}].a"), &w.a));
                out.push((format!("witness[{k}].b"), &w.b));
            }
        }
        Artifact::Divergence { rays, .. } => {
            for (r, ray) in rays.iter().enumerate() {
                for (i, t) in ray.prefix.iter().enumerate() {
                    out.push((format!("ray[{r}][{i}]"), t));
                }
            }
        }
        Artifact::Refutation { witness, .. } => {
            for (i, t) in witness.crowding_set.iter().enumerate() {
                out.push((format!("crowding[{i}]"), t));
            }
            out.push(("tree_vertex".into(), &witness.tree_vertex));
            out.push(("next_vertex".into(), &witness.next_vertex));
            if let RayFamily::Unattainable { separator: Some(s), .. } = &witness.family {
                for (i, t) in s.iter().enumerate() {
                    out.push((format!("separator[{i}]"), t));
                }
            }
        }
    }
    out
}

fn replace(a: &Artifact, site: &str, new: VertexToken) -> Artifact {
    let mut a = a.clone();
    let idx = |s: &str, pre: &str| -> Vec<usize> {
        s.strip_prefix(pre)
            .unwrap()
            .split(|c| c == '[' || c == ']')
            .filter(|p| !p.is_empty())
            .map(|p| p.parse().unwrap())
            .collect()
    };
    match &mut a {
        Artifact::Subdivision { map, .. } => {
            if let Some(p) = site.strip_prefix("branch[").and_then(|s| s.strip_suffix(']')) {
                map.branch.insert(VertexToken::new(p), new);
            } else {
                let ix = idx(site, "path");
                map.edge_paths[ix[0]].path[ix[1]] = new;
            }
        }
        Artifact::Minor { model, .. } => {
            if let Some(rest) = site.strip_prefix("set[") {
                let (p, t) = rest.split_once("]:").unwrap();
                let set = model.branch_sets.get_mut(&VertexToken::new(p)).unwrap();
                set.remove(&VertexToken::new(t));
                set.insert(new);
            } else {
                let (head, field) = site.rsplit_once('.').unwrap();
                let k = idx(head, "witness")[0];
                match field {
                    "a" => model.edge_witness[k].a = new,
                    _ => model.edge_witness[k].b = new,
                }
            }
        }
        Artifact::Divergence { rays, .. } => {
            let ix = idx(site, "ray");
            rays[ix[0]].prefix[ix[1]] = new;
        }
        Artifact::Refutation { witness, .. } => match site {
            "tree_vertex" => witness.tree_vertex = new,
            "next_vertex" => witness.next_vertex = new,
            s if s.starts_with("crowding") => witness.crowding_set[idx(s, "crowding")[0]] = new,
            s => {
                if let RayFamily::Unattainable { separator: Some(sep), .. } = &mut witness.family {
                    sep[idx(s, "separator")[0]] = new;
                }
            }
        },
    }
    a
}

/// Every site gets a far token, a malformed token, and the next distinct
/// token used elsewhere in the artifact. Divergence certificates also get
/// their last scale raised past the distance of the row's first vertices.
pub fn mutations(a: &Artifact) -> Vec<Mutation> {
    let s = sites(a);
    let distinct: Vec<&VertexToken> = {
        let set: BTreeSet<&VertexToken> = s.iter().map(|(_, t)| *t).collect();
        set.into_iter().collect()
    };
    let mut out = Vec::new();
    for (site, t) in &s {
        let pos = distinct.iter().position(|d| d == t).unwrap();
        let other = distinct[(pos + 1) % distinct.len()].clone();
        for (kind, new) in [
            (Kind::Far, far_token(t)),
            (Kind::Malformed, VertexToken::new("?bad")),
            (Kind::Collide, other),
        ] {
            if &new == *t {
                continue;
            }
            out.push(Mutation {
                site: site.clone(),
                kind,
                artifact: replace(a, site, new),
            });
        }
    }
    if let Artifact::Divergence { certificate, .. } = a {
        let mut b = a.clone();
        if let Artifact::Divergence { certificate: c, .. } = &mut b {
            let last = c.rows.last_mut().unwrap();
            last.n = last.n.max(last.i + last.j + 1);
        }
        if certificate.rows.last() != {
            let Artifact::Divergence { certificate: c, .. } = &b else { unreachable!() };
            c.rows.last()
        } {
            out.push(Mutation {
                site: "certificate.last.n".into(),
                kind: Kind::Far,
                artifact: b,
            });
        }
    }
    out
}
