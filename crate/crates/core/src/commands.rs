//! Artifact-producing commands shared by the CLI and the Python bindings.
//! Every command verifies its own output before returning it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{Caps, RunConfig};
use crate::error::{Error, Result, StageExt};
use crate::graph::{ball, Family, FamilySpec, LazyGraph};
use crate::model::{GridFragment, MinorModel, Pattern, SubdivisionMap};
use crate::rays::{diverging_pair, DivergenceCertificate, Ray};
use crate::token::{coord2, VertexToken};
use crate::transfer::{
    chain_minor, clique_minor_cubic, covering_radius, embedding_constants, identity_fragment, identity_on,
    minor_to_subdivision, refute_half_grid, request_family, sparsify, transfer_minor, QIToTree, RefutationWitness,
    VertexMap,
};
use crate::verify::{verify_divergence_cert, verify_minor, verify_refutation, verify_subdivision, CheckReport, Violation};
use crate::weaver::{weave, weave_two_storey, WeaveOpts};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Artifact {
    Subdivision {
        meta: RunConfig,
        host: FamilySpec,
        pattern: Pattern,
        map: SubdivisionMap,
    },
    Minor {
        meta: RunConfig,
        host: FamilySpec,
        pattern: Pattern,
        model: MinorModel,
    },
    Divergence {
        meta: RunConfig,
        host: FamilySpec,
        rays: [Ray; 2],
        certificate: DivergenceCertificate,
    },
    Refutation {
        meta: RunConfig,
        host: FamilySpec,
        qi: QIToTree,
        witness: RefutationWitness,
    },
}

impl Artifact {
    pub fn meta(&self) -> &RunConfig {
        match self {
            Artifact::Subdivision { meta, .. }
            | Artifact::Minor { meta, .. }
            | Artifact::Divergence { meta, .. }
            | Artifact::Refutation { meta, .. } => meta,
        }
    }

    pub fn meta_mut(&mut self) -> &mut RunConfig {
        match self {
            Artifact::Subdivision { meta, .. }
            | Artifact::Minor { meta, .. }
            | Artifact::Divergence { meta, .. }
            | Artifact::Refutation { meta, .. } => meta,
        }
    }

    pub fn host(&self) -> &FamilySpec {
        match self {
            Artifact::Subdivision { host, .. }
            | Artifact::Minor { host, .. }
            | Artifact::Divergence { host, .. }
            | Artifact::Refutation { host, .. } => host,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifacts serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn report_error(rule: &str, message: String) -> CheckReport {
    CheckReport {
        ok: false,
        violations: vec![Violation {
            rule: rule.into(),
            witness: Vec::new(),
            message,
        }],
        stats: BTreeMap::new(),
    }
}

/// Rechecks an artifact against its host. Total: problems become violations.
pub fn verify_artifact(a: &Artifact) -> CheckReport {
    let g = match LazyGraph::from_spec(a.host()) {
        Ok(g) => g,
        Err(e) => return report_error("host", e.to_string()),
    };
    match a {
        Artifact::Subdivision { pattern, map, .. } => verify_subdivision(&g, pattern, map),
        Artifact::Minor { pattern, model, .. } => verify_minor(&g, pattern, model),
        Artifact::Divergence { rays, certificate, .. } => {
            let mut r = verify_divergence_cert(&g, &rays[0], &rays[1], certificate);
            if certificate.rows.is_empty() {
                r.violations.push(Violation {
                    rule: "bound".into(),
                    witness: Vec::new(),
                    message: "empty certificate".into(),
                });
                r.ok = false;
            }
            r
        }
        Artifact::Refutation { qi, witness, .. } => verify_refutation(&g, qi, witness),
    }
}

/// Parses and verifies artifact text.
pub fn verify_text(text: &str) -> CheckReport {
    match Artifact::from_json(text) {
        Ok(a) => verify_artifact(&a),
        Err(e) => report_error("parse", e.to_string()),
    }
}

fn self_checked(a: Artifact) -> Result<Artifact> {
    let r = verify_artifact(&a);
    match r.violations.first() {
        None => Ok(a),
        Some(v) => Err(Error::SelfCheck(format!("{}: {}", v.rule, v.message))).stage("self_check"),
    }
}

fn graph(spec: &FamilySpec) -> Result<LazyGraph> {
    LazyGraph::from_spec(spec)
}

pub fn cmd_weave(spec: &FamilySpec, rows: usize, cols: usize, budget: Option<usize>, caps: &Caps) -> Result<Artifact> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    let g = graph(spec)?;
    let opts = WeaveOpts {
        teeth_budget: budget,
        scale: caps.scale,
        effort: caps.effort,
        face_cap: caps.face_cap,
        ..WeaveOpts::default()
    };
    caps.check_window(crate::weaver::weave_depth(budget.unwrap_or(4 * cols), rows), "weave")
        .stage("window")?;
    let out = weave(&g, rows, cols, &opts)?;
    let meta = RunConfig::new("weave", Some(spec.clone()), caps.clone())
        .param("rows", rows)
        .param("cols", cols)
        .param("teeth_budget", out.teeth_budget);
    self_checked(Artifact::Subdivision {
        meta,
        host: spec.clone(),
        pattern: out.pattern,
        map: out.map,
    })
}

pub fn cmd_diverge(spec: &FamilySpec, caps: &Caps) -> Result<Artifact> {
    let g = graph(spec)?;
    caps.check_window(crate::rays::divergence_depth(caps.scale), "diverge")
        .stage("window")?;
    let (r1, r2, certificate) = diverging_pair(&g, caps.scale, caps.effort).stage("diverging_pair")?;
    let meta = RunConfig::new("diverge", Some(spec.clone()), caps.clone()).param("reaches", certificate.reaches());
    self_checked(Artifact::Divergence {
        meta,
        host: spec.clone(),
        rays: [r1, r2],
        certificate,
    })
}

/// A coarse embedding read from a file: `map` must cover
/// `ball(source, center, radius)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub source: FamilySpec,
    pub target: FamilySpec,
    pub center: VertexToken,
    pub radius: usize,
    pub map: VertexMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EmbeddingChoice {
    HexInSquare,
    SquareIdentity,
    HexIdentity,
    File(EmbeddingFile),
}

impl EmbeddingChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EmbeddingChoice::HexInSquare => "hex-in-square",
            EmbeddingChoice::SquareIdentity => "square-identity",
            EmbeddingChoice::HexIdentity => "hex-identity",
            EmbeddingChoice::File(_) => "file",
        }
    }

    fn graphs(&self) -> Result<(FamilySpec, FamilySpec)> {
        let (s, t) = match self {
            EmbeddingChoice::HexInSquare => ("hex", "square"),
            EmbeddingChoice::SquareIdentity => ("square", "square"),
            EmbeddingChoice::HexIdentity => ("hex", "hex"),
            EmbeddingChoice::File(f) => return Ok((f.source.clone(), f.target.clone())),
        };
        Ok((FamilySpec::simple(s), FamilySpec::simple(t)))
    }

    fn map_on(&self, window: &std::collections::BTreeSet<VertexToken>) -> VertexMap {
        match self {
            EmbeddingChoice::File(f) => f.map.clone(),
            _ => identity_on(window),
        }
    }
}

/// Subdivision of a fragment in the source graph: the identity on the
/// plane lattices, the weaver elsewhere.
fn source_fragment(g: &LazyGraph, frag: GridFragment, caps: &Caps) -> Result<SubdivisionMap> {
    match g.family() {
        Family::Hex | Family::Square | Family::Triangular => identity_fragment(g, frag),
        _ => {
            let opts = WeaveOpts {
                scale: caps.scale,
                effort: caps.effort,
                face_cap: caps.face_cap,
                ..WeaveOpts::default()
            };
            Ok(weave(g, frag.rows, frag.cols, &opts)?.map)
        }
    }
}

/// Minor artifact in the target graph, plus the subdivision obtained from it.
pub fn cmd_transfer(choice: &EmbeddingChoice, rows: usize, cols: usize, caps: &Caps) -> Result<(Artifact, Artifact)> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    let (gs, hs) = choice.graphs()?;
    let (g, h) = (graph(&gs)?, graph(&hs)?);
    let small = GridFragment::new(rows, cols);
    if small.pattern().max_degree() > 3 {
        return Err(Error::InvalidArgument("pattern degree above 3".into()));
    }
    let (probe_center, probe_radius) = match choice {
        EmbeddingChoice::File(f) => (f.center.clone(), f.radius),
        _ => (g.root(), 8),
    };
    caps.check_window(probe_radius, "embedding window").stage("embedding")?;
    let probe_win = ball(&g, &probe_center, probe_radius).stage("embedding")?;
    let probe = embedding_constants(&choice.map_on(&probe_win.vertices), &g, &h, &probe_center, probe_radius)
        .stage("embedding")?;
    let mut factor = if probe.k == 0 { 1 } else { (probe.k + 1) | 1 };
    for _ in 0..32 {
        let big = GridFragment::new(factor * (rows - 1) + 1, factor * cols);
        let f = source_fragment(&g, big, caps).stage("sparsify")?;
        let emb = match choice {
            EmbeddingChoice::File(_) => probe.clone(),
            _ => {
                let center = coord2(big.cols as i64, (big.rows / 2) as i64);
                let radius = covering_radius(&g, &center, &f.image()).stage("embedding")? + 1;
                caps.check_window(radius, "embedding window").stage("embedding")?;
                let win = ball(&g, &center, radius).stage("embedding")?;
                embedding_constants(&choice.map_on(&win.vertices), &g, &h, &center, radius).stage("embedding")?
            }
        };
        let sp = match sparsify(&g, &f, big, small, emb.k) {
            Ok(sp) => sp,
            Err(Error::FragmentTooSmall { factor: need, .. }) => {
                factor = need.max(factor + 2);
                continue;
            }
            Err(e) => return Err(e).stage("sparsify"),
        };
        let pattern = small.pattern();
        let (model, _) = transfer_minor(&emb, &sp.map, &pattern, &g, &h).stage("transfer")?;
        let sub = minor_to_subdivision(&h, &pattern, &model).stage("upgrade")?;
        let meta = RunConfig::new("transfer", Some(gs.clone()), caps.clone())
            .param("embedding", choice.name())
            .param("target", serde_json::to_value(&hs)?)
            .param("rows", rows)
            .param("cols", cols)
            .param("L", emb.l)
            .param("K", emb.k)
            .param("M", sp.m)
            .param("factor", sp.factor)
            .param("window_center", emb.center.as_str())
            .param("window_radius", emb.window);
        let minor = self_checked(Artifact::Minor {
            meta: meta.clone(),
            host: hs.clone(),
            pattern: pattern.clone(),
            model,
        })?;
        let subdivision = self_checked(Artifact::Subdivision {
            meta,
            host: hs.clone(),
            pattern,
            map: sub,
        })?;
        return Ok((minor, subdivision));
    }
    Err(Error::WindowExhausted("no dilation factor fits".into())).stage("sparsify")
}

#[derive(Clone, Debug, PartialEq)]
pub enum TreeMapChoice {
    Natural,
    Identity,
    Collapse,
    File(QIToTree),
}

pub fn cmd_refute(spec: &FamilySpec, rays: usize, depth: usize, choice: &TreeMapChoice, caps: &Caps) -> Result<Artifact> {
    let g = graph(spec)?;
    if rays == 0 || depth < 2 {
        return Err(Error::InvalidArgument("need --rays >= 1 and --depth >= 2".into()));
    }
    match (choice, g.family()) {
        (TreeMapChoice::Natural, Family::Cylinder { .. }) => {}
        (TreeMapChoice::Natural, _) => {
            return Err(Error::InvalidArgument("the natural tree map is defined on cylinders".into()))
        }
        (TreeMapChoice::Identity, Family::RegularTree { .. }) => {}
        (TreeMapChoice::Identity, _) => {
            return Err(Error::InvalidArgument("the identity tree map needs a tree host".into()))
        }
        _ => {}
    }
    caps.check_window(depth, "refutation window").stage("window")?;
    let window = ball(&g, &g.root(), depth).stage("window")?.vertices;
    let qi = match choice {
        TreeMapChoice::Natural => {
            let Family::Cylinder { n } = g.family() else { unreachable!() };
            QIToTree::natural_cylinder(*n, &window)
        }
        TreeMapChoice::Identity => QIToTree::identity(&g, &window),
        TreeMapChoice::Collapse => QIToTree::collapse(&window),
        TreeMapChoice::File(q) => q.clone(),
    };
    let family = request_family(&g, rays, depth).stage("ray_family")?;
    let witness = refute_half_grid(&g, &qi, &family, depth).stage("refute")?;
    let name = match choice {
        TreeMapChoice::Natural => "natural",
        TreeMapChoice::Identity => "identity",
        TreeMapChoice::Collapse => "collapse",
        TreeMapChoice::File(_) => "file",
    };
    let meta = RunConfig::new("refute", Some(spec.clone()), caps.clone())
        .param("rays", rays)
        .param("depth", depth)
        .param("tree_qi", name);
    self_checked(Artifact::Refutation {
        meta,
        host: spec.clone(),
        qi,
        witness,
    })
}

pub fn cmd_demo_chain(m: usize, n: usize, length: usize, caps: &Caps) -> Result<Artifact> {
    let (pattern, model) = chain_minor(m, n, length)?;
    let host = FamilySpec::parse(&format!("cylinder:{n}"))?;
    let meta = RunConfig::new("demo chain", Some(host.clone()), caps.clone())
        .param("m", m)
        .param("n", n)
        .param("length", length);
    self_checked(Artifact::Minor {
        meta,
        host,
        pattern,
        model,
    })
}

pub fn cmd_demo_clique(n: usize, caps: &Caps) -> Result<Artifact> {
    let (pattern, model) = clique_minor_cubic(n)?;
    let host = FamilySpec::simple("cubic");
    let meta = RunConfig::new("demo clique", Some(host.clone()), caps.clone()).param("n", n);
    self_checked(Artifact::Minor {
        meta,
        host,
        pattern,
        model,
    })
}

pub fn cmd_demo_two_storey(rows: usize, cols: usize, caps: &Caps) -> Result<Artifact> {
    let map = weave_two_storey(rows, cols)?;
    let host = FamilySpec::simple("two_storey");
    let meta = RunConfig::new("demo two-storey", Some(host.clone()), caps.clone())
        .param("rows", rows)
        .param("cols", cols);
    self_checked(Artifact::Subdivision {
        meta,
        host,
        pattern: GridFragment::new(rows, cols).pattern(),
        map,
    })
}

fn quote(t: &VertexToken) -> String {
    format!("\"{}\"", t.as_str().replace('"', "\\\""))
}

/// Image subgraph as DOT, for subdivisions and minors.
pub fn to_dot(a: &Artifact) -> Option<String> {
    let mut out = String::from("graph image {\n  node [shape=point];\n");
    match a {
        Artifact::Subdivision { map, .. } => {
            for b in map.branch.values() {
                let _ = writeln!(out, "  {} [shape=circle, label=\"\", width=0.12];", quote(b));
            }
            for e in &map.edge_paths {
                for w in e.path.windows(2) {
                    let _ = writeln!(out, "  {} -- {};", quote(&w[0]), quote(&w[1]));
                }
            }
        }
        Artifact::Minor { model, .. } => {
            let g = LazyGraph::from_spec(a.host()).ok()?;
            for (i, (p, set)) in model.branch_sets.iter().enumerate() {
                let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label={};", quote(p));
                for v in set {
                    let _ = writeln!(out, "    {};", quote(v));
                    for w in g.neighbors(v).unwrap_or_default() {
                        if v < &w && set.contains(&w) {
                            let _ = writeln!(out, "    {} -- {};", quote(v), quote(&w));
                        }
                    }
                }
                out.push_str("  }\n");
            }
            for w in &model.edge_witness {
                let _ = writeln!(out, "  {} -- {} [style=bold];", quote(&w.a), quote(&w.b));
            }
        }
        _ => return None,
    }
    out.push_str("}\n");
    Some(out)
}
