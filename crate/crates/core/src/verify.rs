//! Independent checkers. Each re-derives its facts from the graph oracle and
//! the certificate alone and reports violations instead of failing.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{ball, bfs, LazyGraph};
use crate::model::{MinorModel, Pattern, SubdivisionMap};
use crate::rays::{end_components, is_path, Comb, DivergenceCertificate, Ray};
use crate::transfer::{check_qi, max_image_step, qi_tree_capacity, split_by_tree_edge, QIToTree, RayFamily, RefutationWitness};
use crate::token::VertexToken;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub witness: Vec<String>,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    pub stats: BTreeMap<String, usize>,
}

impl CheckReport {
    pub fn rules(&self) -> BTreeSet<&str> {
        self.violations.iter().map(|v| v.rule.as_str()).collect()
    }

    pub fn has(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    /// Merges another report, prefixing its stats.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        self.violations.extend(other.violations);
        self.violations.sort();
        self.violations.dedup();
        for (k, v) in other.stats {
            self.stats.insert(format!("{prefix}.{k}"), v);
        }
        self.ok = self.violations.is_empty();
    }
}

#[derive(Default)]
pub(crate) struct Collector {
    violations: Vec<Violation>,
    stats: BTreeMap<String, usize>,
}

impl Collector {
    pub(crate) fn flag<I, T>(&mut self, rule: &str, witness: I, message: impl Into<String>)
    where
        I: IntoIterator<Item = T>,
        T: ToString,
    {
        self.violations.push(Violation {
            rule: rule.to_string(),
            witness: witness.into_iter().map(|t| t.to_string()).collect(),
            message: message.into(),
        });
    }

    pub(crate) fn stat(&mut self, key: &str, value: usize) {
        self.stats.insert(key.to_string(), value);
    }

    pub(crate) fn finish(mut self) -> CheckReport {
        self.violations.sort();
        self.violations.dedup();
        CheckReport {
            ok: self.violations.is_empty(),
            violations: self.violations,
            stats: self.stats,
        }
    }
}

/// Validates each token once, flagging malformed ones. Returns the valid set.
fn well_formed<'a>(g: &LazyGraph, c: &mut Collector, tokens: impl IntoIterator<Item = &'a VertexToken>) -> HashSet<VertexToken> {
    let mut ok = HashSet::new();
    let mut bad = HashSet::new();
    for t in tokens {
        if ok.contains(t) || bad.contains(t) {
            continue;
        }
        match g.validate(t) {
            Ok(()) => {
                ok.insert(t.clone());
            }
            Err(e) => {
                c.flag("malformed-token", [t], e.to_string());
                bad.insert(t.clone());
            }
        }
    }
    ok
}

fn adjacent(g: &LazyGraph, valid: &HashSet<VertexToken>, a: &VertexToken, b: &VertexToken) -> bool {
    valid.contains(a) && valid.contains(b) && g.adjacent(a, b).unwrap_or(false)
}

pub fn verify_subdivision(g: &LazyGraph, pattern: &Pattern, map: &SubdivisionMap) -> CheckReport {
    let mut c = Collector::default();
    let pverts: BTreeSet<&VertexToken> = pattern.vertices.iter().collect();
    let valid = well_formed(
        g,
        &mut c,
        map.branch.values().chain(map.edge_paths.iter().flat_map(|e| e.path.iter())),
    );

    for v in &pattern.vertices {
        if !map.branch.contains_key(v) {
            c.flag("coverage", [v], "pattern vertex has no branch image");
        }
    }
    for v in map.branch.keys() {
        if !pverts.contains(v) {
            c.flag("coverage", [v], "branch image given for a non-pattern vertex");
        }
    }
    let mut owner: BTreeMap<&VertexToken, &VertexToken> = BTreeMap::new();
    for (p, h) in &map.branch {
        if let Some(q) = owner.insert(h, p) {
            c.flag("branch-injective", [q, p, h], format!("{q} and {p} share the image {h}"));
        }
    }

    let mut seen_edges: BTreeMap<(&VertexToken, &VertexToken), usize> = BTreeMap::new();
    for e in &map.edge_paths {
        *seen_edges.entry((&e.u, &e.v)).or_default() += 1;
        if !pattern.has_edge(&e.u, &e.v) || e.u > e.v {
            c.flag("coverage", [&e.u, &e.v], "path given for a non-edge or with unnormalized ends");
        }
    }
    for (a, b) in &pattern.edges {
        match seen_edges.get(&(a, b)) {
            None => c.flag("coverage", [a, b], "pattern edge has no path"),
            Some(&n) if n > 1 => c.flag("coverage", [a, b], format!("pattern edge has {n} paths")),
            _ => {}
        }
    }

    // endpoint and adjacency checks are independent per path
    let per_path: Vec<Vec<Violation>> = map
        .edge_paths
        .par_iter()
        .map(|e| {
            let mut local = Collector::default();
            let (Some(first), Some(last)) = (e.path.first(), e.path.last()) else {
                local.flag("path-endpoints", [&e.u, &e.v], "empty path");
                return local.violations;
            };
            if map.branch.get(&e.u) != Some(first) || map.branch.get(&e.v) != Some(last) {
                local.flag(
                    "path-endpoints",
                    [&e.u, &e.v, first, last],
                    format!("path for {}-{} runs {first}..{last}", e.u, e.v),
                );
            }
            if e.path.len() < 2 {
                local.flag("path-endpoints", [&e.u, &e.v], "path has no edge");
            }
            for w in e.path.windows(2) {
                if !adjacent(g, &valid, &w[0], &w[1]) {
                    local.flag("path-adjacency", [&w[0], &w[1]], format!("{} and {} are not adjacent", w[0], w[1]));
                }
            }
            let mut inside = HashSet::new();
            for t in &e.path {
                if !inside.insert(t) {
                    local.flag("path-simple", [&e.u, &e.v, t], format!("{t} repeats on the path"));
                }
            }
            local.violations
        })
        .collect();
    c.violations.extend(per_path.into_iter().flatten());

    let images: HashSet<&VertexToken> = map.branch.values().collect();
    let mut internal_owner: HashMap<&VertexToken, (&VertexToken, &VertexToken)> = HashMap::new();
    let mut internal_count = 0;
    for e in &map.edge_paths {
        if e.path.len() < 3 {
            continue;
        }
        for t in &e.path[1..e.path.len() - 1] {
            internal_count += 1;
            if images.contains(t) {
                c.flag("internal-branch-clash", [&e.u, &e.v, t], format!("internal vertex {t} is a branch image"));
            }
            if let Some((a, b)) = internal_owner.insert(t, (&e.u, &e.v)) {
                if (a, b) != (&e.u, &e.v) {
                    c.flag(
                        "internal-disjointness",
                        [t],
                        format!("{t} is internal to the paths of {a}-{b} and {}-{}", e.u, e.v),
                    );
                }
            }
        }
    }
    c.stat("pattern_vertices", pattern.vertices.len());
    c.stat("pattern_edges", pattern.edges.len());
    c.stat("edge_paths", map.edge_paths.len());
    c.stat("internal_vertices", internal_count);
    c.finish()
}

pub fn verify_minor(g: &LazyGraph, pattern: &Pattern, model: &MinorModel) -> CheckReport {
    let mut c = Collector::default();
    let valid = well_formed(
        g,
        &mut c,
        model
            .branch_sets
            .values()
            .flatten()
            .chain(model.edge_witness.iter().flat_map(|w| [&w.a, &w.b])),
    );
    for v in &pattern.vertices {
        match model.branch_sets.get(v) {
            None => c.flag("coverage", [v], "pattern vertex has no branch set"),
            Some(s) if s.is_empty() => c.flag("coverage", [v], "branch set is empty"),
            _ => {}
        }
    }
    for v in model.branch_sets.keys() {
        if pattern.vertices.binary_search(v).is_err() {
            c.flag("coverage", [v], "branch set given for a non-pattern vertex");
        }
    }
    let mut owner: HashMap<&VertexToken, &VertexToken> = HashMap::new();
    for (p, set) in &model.branch_sets {
        for t in set {
            if let Some(q) = owner.insert(t, p) {
                c.flag("branch-disjointness", [q, p, t], format!("{t} lies in the sets of {q} and {p}"));
            }
        }
    }
    for (p, set) in &model.branch_sets {
        let Some(s) = set.iter().next() else { continue };
        if !valid.contains(s) {
            continue;
        }
        let reach = match bfs(g, std::slice::from_ref(s), usize::MAX, |w| set.contains(w)) {
            Ok(b) => b.dist.len(),
            Err(_) => 0,
        };
        if reach != set.len() {
            c.flag(
                "branch-connectivity",
                [p],
                format!("branch set of {p} has {} vertices, {reach} reachable from {s}", set.len()),
            );
        }
    }
    let mut witnessed: BTreeSet<(&VertexToken, &VertexToken)> = BTreeSet::new();
    for w in &model.edge_witness {
        if !pattern.has_edge(&w.u, &w.v) || w.u > w.v {
            c.flag("coverage", [&w.u, &w.v], "witness for a non-edge or with unnormalized ends");
        }
        witnessed.insert((&w.u, &w.v));
        let in_u = model.branch_sets.get(&w.u).is_some_and(|s| s.contains(&w.a));
        let in_v = model.branch_sets.get(&w.v).is_some_and(|s| s.contains(&w.b));
        if !in_u || !in_v {
            c.flag(
                "witness-membership",
                [&w.u, &w.v, &w.a, &w.b],
                format!("witness {}-{} is not in the sets of {}-{}", w.a, w.b, w.u, w.v),
            );
        }
        if !adjacent(g, &valid, &w.a, &w.b) {
            c.flag("witness-edge", [&w.a, &w.b], format!("{} and {} are not adjacent", w.a, w.b));
        }
    }
    for (a, b) in &pattern.edges {
        if !witnessed.contains(&(a, b)) {
            c.flag("coverage", [a, b], "pattern edge has no witness");
        }
    }
    c.stat("pattern_vertices", pattern.vertices.len());
    c.stat("pattern_edges", pattern.edges.len());
    c.stat("branch_vertices", model.branch_sets.values().map(BTreeSet::len).sum());
    c.finish()
}

pub fn verify_comb(g: &LazyGraph, comb: &Comb, target: &Ray) -> CheckReport {
    let mut c = Collector::default();
    let spine = &comb.spine.prefix;
    let valid = well_formed(
        g,
        &mut c,
        spine.iter().chain(comb.teeth.iter().flat_map(|t| t.path.iter())),
    );
    for w in spine.windows(2) {
        if !adjacent(g, &valid, &w[0], &w[1]) {
            c.flag("path-adjacency", [&w[0], &w[1]], "spine step is not an edge");
        }
    }
    let spine_at: HashMap<&VertexToken, usize> = spine.iter().enumerate().map(|(i, v)| (v, i)).collect();
    if spine_at.len() != spine.len() {
        c.flag("path-simple", spine.iter().take(1), "spine repeats a vertex");
    }
    let on_target: HashSet<&VertexToken> = target.prefix.iter().collect();
    let mut used: HashMap<&VertexToken, usize> = HashMap::new();
    let mut tooth_at: HashMap<&VertexToken, usize> = HashMap::new();
    let mut last_pos: Option<usize> = None;
    for (k, t) in comb.teeth.iter().enumerate() {
        if t.path.last() != Some(&t.tooth) || !on_target.contains(&t.tooth) {
            c.flag("teeth-on-target", [&t.tooth], format!("tooth {k} does not end on the target"));
        }
        if let Some(j) = tooth_at.insert(&t.tooth, k) {
            c.flag("teeth-distinct", [&t.tooth], format!("teeth {j} and {k} share {}", t.tooth));
        }
        for w in t.path.windows(2) {
            if !adjacent(g, &valid, &w[0], &w[1]) {
                c.flag("path-adjacency", [&w[0], &w[1]], format!("tooth {k} step is not an edge"));
            }
        }
        match t.path.first().and_then(|s| spine_at.get(s)) {
            Some(&pos) => {
                if last_pos.is_some_and(|l| pos <= l) {
                    c.flag("teeth-order", [&t.path[0]], format!("tooth {k} does not advance along the spine"));
                }
                last_pos = Some(pos);
            }
            None => c.flag("tooth-spine-contact", t.path.iter().take(1), format!("tooth {k} does not start on the spine")),
        }
        for v in t.path.iter().skip(1) {
            if spine_at.contains_key(v) {
                c.flag("tooth-spine-contact", [v], format!("tooth {k} meets the spine again at {v}"));
            }
        }
        for v in &t.path {
            if let Some(j) = used.insert(v, k) {
                if j != k {
                    c.flag("teeth-disjoint", [v], format!("teeth {j} and {k} share {v}"));
                } else {
                    c.flag("path-simple", [v], format!("tooth {k} repeats {v}"));
                }
            }
        }
    }
    c.stat("spine", spine.len());
    c.stat("teeth", comb.teeth.len());
    c.finish()
}

/// Recomputes every row with a multi-source search from the tail of `r1`.
pub fn verify_divergence_cert(g: &LazyGraph, r1: &Ray, r2: &Ray, cert: &DivergenceCertificate) -> CheckReport {
    let mut c = Collector::default();
    let need = cert.rows.iter().map(|r| r.window_radius).max().unwrap_or(0);
    let mut a = r1.clone();
    let mut b = r2.clone();
    if a.extend_best_effort(g, need).is_err() || b.extend_best_effort(g, need).is_err() {
        c.flag("bound", ["rays"], "rays cannot be materialized to the window");
        return c.finish();
    }
    for pair in cert.rows.windows(2) {
        let (p, q) = (&pair[0], &pair[1]);
        if q.n <= p.n || q.i < p.i || q.j < p.j {
            c.flag(
                "monotone",
                [p.n, q.n],
                format!("rows n={} and n={} are not nested ({},{}) -> ({},{})", p.n, q.n, p.i, p.j, q.i, q.j),
            );
        }
    }
    let valid = well_formed(g, &mut c, a.prefix.iter().chain(b.prefix.iter()));
    for (name, r) in [("first", &a), ("second", &b)] {
        let mut seen = HashSet::new();
        for v in &r.prefix {
            if !seen.insert(v) {
                c.flag("ray-path", [v], format!("{name} ray revisits {v}"));
            }
        }
        for w in r.prefix.windows(2) {
            if !adjacent(g, &valid, &w[0], &w[1]) {
                c.flag("ray-path", [&w[0], &w[1]], format!("{name} ray steps along a non-edge {}-{}", w[0], w[1]));
            }
        }
    }
    let checked: Vec<Option<Violation>> = cert
        .rows
        .par_iter()
        .map(|row| {
            let w = row.window_radius;
            if w > a.len() || w > b.len() || row.i >= w || row.j >= w {
                return Some(Violation {
                    rule: "bound".into(),
                    witness: vec![row.n.to_string()],
                    message: format!("row n={} indexes past the materialized rays", row.n),
                });
            }
            let sources = &a.prefix[row.i..w];
            if sources.iter().any(|v| !valid.contains(v)) {
                return None;
            }
            let tails: HashSet<&VertexToken> = b.prefix[row.j..w].iter().collect();
            let reach = bfs(g, sources, row.n, |_| true).ok()?;
            let close = b.prefix[row.j..w].iter().find(|v| reach.dist.contains_key(*v));
            close.map(|v| Violation {
                rule: "bound".into(),
                witness: vec![row.n.to_string(), v.to_string()],
                message: format!(
                    "row n={}: {v} is within distance {} of the tail of the first ray ({} tail vertices)",
                    row.n,
                    reach.dist[v],
                    tails.len()
                ),
            })
        })
        .collect();
    c.violations.extend(checked.into_iter().flatten());
    c.stat("rows", cert.rows.len());
    c.finish()
}

/// A pair of vertex sets, meant to cover a window with no edge from
/// `a \ b` to `b \ a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub a: BTreeSet<VertexToken>,
    pub b: BTreeSet<VertexToken>,
}

impl Separation {
    pub fn order(&self) -> usize {
        self.a.intersection(&self.b).count()
    }
}

/// Components of `side` inside the window, with their window neighborhoods.
fn components_with_boundary(
    g: &LazyGraph,
    window: &BTreeSet<VertexToken>,
    side: &BTreeSet<VertexToken>,
) -> Vec<(BTreeSet<VertexToken>, BTreeSet<VertexToken>)> {
    let mut seen: HashSet<&VertexToken> = HashSet::new();
    let mut out = Vec::new();
    for v in side {
        if seen.contains(v) {
            continue;
        }
        let Ok(b) = bfs(g, std::slice::from_ref(v), usize::MAX, |w| side.contains(w)) else {
            continue;
        };
        let comp: BTreeSet<VertexToken> = b.order.into_iter().collect();
        for x in &comp {
            if let Some(s) = side.get(x) {
                seen.insert(s);
            }
        }
        let mut nb = BTreeSet::new();
        for x in &comp {
            for w in g.neighbors(x).unwrap_or_default() {
                if window.contains(&w) && !comp.contains(&w) {
                    nb.insert(w);
                }
            }
        }
        out.push((comp, nb));
    }
    out
}

/// Separation checks plus tightness, all scoped to `window`: the
/// neighborhoods of components are taken inside the window, so an infinite
/// separator is never reported tight.
pub fn verify_separation_tight(g: &LazyGraph, sep: &Separation, window: &BTreeSet<VertexToken>) -> CheckReport {
    let mut c = Collector::default();
    let valid = well_formed(g, &mut c, sep.a.iter().chain(sep.b.iter()).chain(window.iter()));
    for v in window {
        if !sep.a.contains(v) && !sep.b.contains(v) {
            c.flag("separation-cover", [v], format!("{v} is in neither side"));
        }
    }
    let a_only: BTreeSet<VertexToken> = sep.a.difference(&sep.b).filter(|v| window.contains(*v)).cloned().collect();
    let b_only: BTreeSet<VertexToken> = sep.b.difference(&sep.a).filter(|v| window.contains(*v)).cloned().collect();
    for v in &a_only {
        if !valid.contains(v) {
            continue;
        }
        for w in g.neighbors(v).unwrap_or_default() {
            if b_only.contains(&w) {
                c.flag("separation-edge", [v, &w], format!("edge {v}-{w} crosses the separation"));
            }
        }
    }
    let mid: BTreeSet<VertexToken> = sep.a.intersection(&sep.b).filter(|v| window.contains(*v)).cloned().collect();
    let tight_a = components_with_boundary(g, window, &a_only).into_iter().any(|(_, nb)| nb == mid);
    let tight_b = components_with_boundary(g, window, &b_only).into_iter().any(|(_, nb)| nb == mid);
    if !tight_a || !tight_b {
        let missing = if tight_a { "B" } else { "A" };
        c.flag(
            "tightness",
            mid.iter().take(4),
            format!(
                "no component on side {missing} sees all {} separator vertices inside the window of {} vertices",
                mid.len(),
                window.len()
            ),
        );
    }
    c.stat("order", sep.order());
    c.stat("window", window.len());
    c.finish()
}

/// A family of `requested` rays is ruled out inside the window when fewer
/// vertices cut some visible end off from the root.
fn check_unattainable(
    g: &LazyGraph,
    c: &mut Collector,
    root: &VertexToken,
    depth: usize,
    requested: usize,
    achieved: usize,
    separator: Option<&[VertexToken]>,
) {
    let Some(sep) = separator else {
        c.flag("family-size", [requested], "unattainable family without a separator");
        return;
    };
    let set: BTreeSet<&VertexToken> = sep.iter().collect();
    if achieved >= requested || set.len() != achieved || set.len() != sep.len() {
        c.flag(
            "family-size",
            [requested, achieved, sep.len()],
            format!("separator of {} vertices does not bound {requested} rays", sep.len()),
        );
        return;
    }
    if set.contains(root) {
        c.flag("family-size", [root], "separator contains the root");
        return;
    }
    let (Ok(from_root), Ok(ends)) = (
        bfs(g, std::slice::from_ref(root), depth, |_| true),
        end_components(g, depth),
    ) else {
        c.flag("family-size", sep.iter(), "window cannot be materialized");
        return;
    };
    let reach = match bfs(g, std::slice::from_ref(root), depth, |v| !set.contains(v) && from_root.dist.contains_key(v)) {
        Ok(b) => b,
        Err(e) => {
            c.flag("family-size", sep.iter(), e.to_string());
            return;
        }
    };
    let cut = ends.iter().any(|comp| {
        comp.iter()
            .filter(|v| from_root.dist.get(*v) == Some(&depth))
            .all(|v| !reach.dist.contains_key(v))
    });
    if !cut {
        c.flag("family-size", sep.iter(), "separator leaves every visible end reachable from the root");
    }
}

/// Rechecks a refutation witness from the map alone.
pub fn verify_refutation(g: &LazyGraph, qi: &QIToTree, w: &RefutationWitness) -> CheckReport {
    let mut c = Collector::default();
    let root = g.root();
    let window = match ball(g, &root, w.window_radius) {
        Ok(b) => b,
        Err(e) => {
            c.flag("separator", [&root], e.to_string());
            return c.finish();
        }
    };
    let t = match qi.tree_graph() {
        Ok(t) => t,
        Err(e) => {
            c.flag("forcing-radius", Vec::<String>::new(), e.to_string());
            return c.finish();
        }
    };
    if let Err(e) = check_qi(g, qi, &window.vertices) {
        c.flag("forcing-radius", Vec::<String>::new(), e.to_string());
        return c.finish();
    }
    match max_image_step(g, qi, &window.vertices) {
        Ok(s) if w.forcing_radius <= qi.slack() && w.forcing_radius <= s / 2 => {}
        Ok(s) => c.flag(
            "forcing-radius",
            [w.forcing_radius],
            format!("radius {} exceeds min({}, {})", w.forcing_radius, qi.slack(), s / 2),
        ),
        Err(e) => c.flag("forcing-radius", [w.forcing_radius], e.to_string()),
    }
    match qi_tree_capacity(g, qi, w.forcing_radius, &window.vertices) {
        Ok(b) if b == w.bound && w.threshold == b + 1 => {}
        Ok(b) => c.flag("bound", [b, w.bound], format!("capacity is {b}, witness claims {} (threshold {})", w.bound, w.threshold)),
        Err(e) => c.flag("bound", [w.bound], e.to_string()),
    }
    if w.family_size <= w.bound || w.family.size() != w.family_size {
        c.flag("family-size", [w.family_size, w.bound], "family does not exceed the capacity");
    }
    if let RayFamily::Certified { rays } = &w.family {
        let mut seen = HashSet::new();
        for r in rays {
            if !is_path(g, &r.prefix).unwrap_or(false) {
                c.flag("family-size", r.prefix.iter().take(2), "family member is not a path");
            }
            for v in &r.prefix {
                if !seen.insert(v) {
                    c.flag("family-size", [v], format!("rays share {v}"));
                }
            }
        }
    }
    if let RayFamily::Unattainable { requested, achieved, separator } = &w.family {
        check_unattainable(g, &mut c, &root, w.window_radius, *requested, *achieved, separator.as_deref());
    }
    if !t.adjacent(&w.tree_vertex, &w.next_vertex).unwrap_or(false) {
        c.flag("separator", [&w.tree_vertex, &w.next_vertex], "tree vertices are not adjacent");
    }
    let (crowd, far) = match split_by_tree_edge(qi, &w.tree_vertex, &w.next_vertex, w.forcing_radius, &window.vertices) {
        Ok(x) => x,
        Err(e) => {
            c.flag("crowding-set", [&w.tree_vertex], e.to_string());
            return c.finish();
        }
    };
    let claimed: BTreeSet<VertexToken> = w.crowding_set.iter().cloned().collect();
    for v in claimed.symmetric_difference(&crowd) {
        c.flag("crowding-set", [v], format!("{v} is misclassified"));
    }
    if crowd.len() > w.bound {
        c.flag("crowding-set", [crowd.len()], "crowding set exceeds the capacity");
    }
    if crowd.contains(&root) || far.contains(&root) {
        c.flag("root-near", [&root], "the root is not on the near side");
    }
    if !far.iter().any(|v| window.frontier.contains(v)) {
        c.flag("separator", [&w.next_vertex], "the far side does not reach the window boundary");
    }
    for u in &window.vertices {
        if crowd.contains(u) || far.contains(u) {
            continue;
        }
        for x in g.neighbors(u).unwrap_or_default() {
            if far.contains(&x) {
                c.flag("separator", [u, &x], format!("edge {u}-{x} avoids the crowding set"));
            }
        }
    }
    c.stat("crowding", crowd.len());
    c.stat("far", far.len());
    c.stat("window", window.vertices.len());
    c.finish()
}
