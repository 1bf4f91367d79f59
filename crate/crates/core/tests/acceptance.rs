//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always reach stdout; panics on an unexpected failure.

mod common;

use std::collections::{HashMap, HashSet, VecDeque};
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use gridweaver::graph::{ball, storey_token, Family, LazyGraph};
use gridweaver::model::GridFragment;
use gridweaver::rays::{check_divergence, disjoint_rays, diverging_pair, equivalent, Extender, Ray};
use gridweaver::token::coord2;
use gridweaver::transfer::{
    chain_minor, clique_minor_cubic, covering_radius, embedding_constants, identity_fragment, identity_on,
    minor_to_subdivision, qi_tree_capacity, refute_half_grid, request_family, sparsify, transfer_minor, QIToTree,
    RayFamily,
};
use gridweaver::verify::{verify_divergence_cert, verify_minor, verify_refutation, verify_subdivision};
use gridweaver::weaver::{weave, weave_two_storey, WeaveOpts, WeaveOutput};
use gridweaver::{Error, VertexToken};

const WEAVE_TIME_LIMIT: Duration = Duration::from_secs(60);
const APEX_SCALE: usize = 5;
const APEX_EFFORT: usize = 10_000;
const APEX_SPHERES: usize = 20;
const APEX_SAME_SPHERE_MAX: usize = 2;
const SQUARE_CERT_SCALE: usize = 24;
const EMBEDDING_RADIUS: usize = 8;
const TWO_STOREY_SCALE: usize = 3;
const ROW_GAP: usize = 2;
const ROW_SCALE: usize = 8;
const CYLINDER_RAYS: usize = 5;
const CYLINDER_DEPTH: usize = 30;
const TREE_BALL_RADII: usize = 10;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn weave_timed(g: &LazyGraph, rows: usize, cols: usize) -> Result<(WeaveOutput, Duration), String> {
    let t = Instant::now();
    let out = weave(g, rows, cols, &WeaveOpts::default()).map_err(|e| format!("{}: {e}", g.spec()))?;
    Ok((out, t.elapsed()))
}

fn weaves() -> Result<Vec<(WeaveOutput, Duration, LazyGraph)>, String> {
    [(LazyGraph::hex(), 5, 5), (LazyGraph::square(), 7, 7), (LazyGraph::triangular(), 7, 7)]
        .into_iter()
        .map(|(g, r, c)| weave_timed(&g, r, c).map(|(o, t)| (o, t, g)))
        .collect()
}

fn c1_weave_soundness(ws: &[(WeaveOutput, Duration, LazyGraph)]) -> Outcome {
    let mut notes = Vec::new();
    for (out, t, g) in ws {
        ensure(*t <= WEAVE_TIME_LIMIT, format!("{} took {t:?}", g.spec()))?;
        let r = verify_subdivision(g, &out.pattern, &out.map);
        ensure(r.ok, format!("{}: {:?}", g.spec(), r.rules()))?;
        notes.push(format!("{} {}x{} in {:.2?}", g.spec(), out.fragment.rows, out.fragment.cols, t));
    }
    let hex = &ws[0].0;
    ensure(hex.map.max_path_len() == 1, "hex paths are not all single edges")?;
    Ok(notes.join(", "))
}

/// BFS spheres by a local queue, independent of the library search.
fn spheres(g: &LazyGraph, radius: usize) -> Vec<Vec<VertexToken>> {
    let root = g.root();
    let mut d: HashMap<VertexToken, usize> = HashMap::from([(root.clone(), 0)]);
    let mut out = vec![vec![root.clone()]];
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        let du = d[&u];
        if du == radius {
            continue;
        }
        for w in g.neighbors(&u).unwrap() {
            if !d.contains_key(&w) {
                d.insert(w.clone(), du + 1);
                if out.len() <= du + 1 {
                    out.push(Vec::new());
                }
                out[du + 1].push(w.clone());
                q.push_back(w);
            }
        }
    }
    out
}

fn c2_apex_counterexample() -> Outcome {
    let g = LazyGraph::new(Family::ApexHub);
    match diverging_pair(&g, APEX_SCALE, APEX_EFFORT) {
        Err(Error::NotFound { .. }) => {}
        other => return Err(format!("expected NotFound, got {other:?}")),
    }
    let sph = spheres(&g, APEX_SPHERES);
    let mut pairs = 0usize;
    for (k, s) in sph.iter().enumerate() {
        let members: HashSet<&VertexToken> = s.iter().collect();
        for u in s {
            // closed 2-ball of u
            let mut near: HashSet<VertexToken> = HashSet::from([u.clone()]);
            for w in g.neighbors(u).unwrap() {
                near.extend(g.neighbors(&w).unwrap());
                near.insert(w);
            }
            let missing = members.iter().filter(|v| !near.contains(**v)).count();
            ensure(missing == 0, format!("sphere {k}: {u} is farther than {APEX_SAME_SPHERE_MAX} from {missing} vertices"))?;
            pairs += s.len() - 1;
        }
    }
    Ok(format!(
        "NotFound at scale {APEX_SCALE}; {} same-sphere ordered pairs up to sphere {APEX_SPHERES} all within {APEX_SAME_SPHERE_MAX}",
        pairs
    ))
}

fn c3_square_certificate() -> Outcome {
    let g = LazyGraph::square();
    let (r1, r2, cert) = diverging_pair(&g, SQUARE_CERT_SCALE, 10_000).map_err(|e| e.to_string())?;
    ensure(cert.reaches() == SQUARE_CERT_SCALE, format!("reaches {}", cert.reaches()))?;
    let r = verify_divergence_cert(&g, &r1, &r2, &cert);
    ensure(r.ok, format!("{:?}", r.violations))?;
    let nested = cert.rows.windows(2).all(|w| w[1].n > w[0].n && w[1].i >= w[0].i && w[1].j >= w[0].j);
    ensure(nested, "rows are not nested")?;
    Ok(format!("{} rows recomputed, nesting holds", cert.rows.len()))
}

fn c4_transfer() -> Outcome {
    let (g, h) = (LazyGraph::hex(), LazyGraph::square());
    let w8 = ball(&g, &g.root(), EMBEDDING_RADIUS).map_err(|e| e.to_string())?;
    let e8 = embedding_constants(&identity_on(&w8.vertices), &g, &h, &g.root(), EMBEDDING_RADIUS).map_err(|e| e.to_string())?;
    ensure(e8.l == 1, format!("L = {}", e8.l))?;
    let small = GridFragment::new(4, 4);
    let mut factor = (e8.k + 1) | 1;
    let sp = loop {
        let big = GridFragment::new(factor * (small.rows - 1) + 1, factor * small.cols);
        let f = identity_fragment(&g, big).map_err(|e| e.to_string())?;
        match sparsify(&g, &f, big, small, e8.k) {
            Ok(sp) => break (sp, f),
            Err(Error::FragmentTooSmall { factor: need, .. }) if need > factor => factor = need,
            Err(e) => return Err(e.to_string()),
        }
    };
    let (sp, f) = sp;
    let center = coord2(sp.factor as i64 * small.cols as i64, (sp.factor * (small.rows - 1) / 2) as i64);
    let radius = covering_radius(&g, &center, &f.image()).map_err(|e| e.to_string())? + 1;
    let win = ball(&g, &center, radius).map_err(|e| e.to_string())?;
    let emb = embedding_constants(&identity_on(&win.vertices), &g, &h, &center, radius).map_err(|e| e.to_string())?;
    ensure(emb.k == e8.k, format!("K differs between windows: {} vs {}", e8.k, emb.k))?;
    let pattern = small.pattern();
    let (model, _) = transfer_minor(&emb, &sp.map, &pattern, &g, &h).map_err(|e| e.to_string())?;
    let rm = verify_minor(&h, &pattern, &model);
    ensure(rm.ok, format!("minor: {:?}", rm.rules()))?;
    let sub = minor_to_subdivision(&h, &pattern, &model).map_err(|e| e.to_string())?;
    let rs = verify_subdivision(&h, &pattern, &sub);
    ensure(rs.ok, format!("subdivision: {:?}", rs.rules()))?;
    let tiny = GridFragment::new(2, 2);
    let f2 = identity_fragment(&g, tiny).map_err(|e| e.to_string())?;
    match transfer_minor(&e8, &f2, &tiny.pattern(), &g, &h) {
        Err(Error::DisjointnessViolation { .. }) => {}
        other => return Err(format!("unsparsified 2x2 gave {:?}", other.map(|_| ()))),
    }
    Ok(format!(
        "L = {}, K = {} on radius {EMBEDDING_RADIUS}; dilation {}; minor and subdivision verify; unsparsified 2x2 collides",
        e8.l, e8.k, sp.factor
    ))
}

fn c5_two_storey() -> Outcome {
    let (rows, cols) = (6, 6);
    let g = LazyGraph::new(Family::TwoStorey);
    let map = weave_two_storey(rows, cols).map_err(|e| e.to_string())?;
    let r = verify_subdivision(&g, &GridFragment::new(rows, cols).pattern(), &map);
    ensure(r.ok, format!("{:?}", r.rules()))?;
    // the two pattern rows lying on row 0 of each storey
    let h = (rows / 2) as i64;
    let row = |y: i64| -> Ray {
        Ray {
            prefix: (0..=2 * cols as i64).map(|x| map.branch[&coord2(x, y)].clone()).collect(),
            extender: Some(Extender::Translate { step: vec![1, 0] }),
        }
    };
    let (a, b) = (row(h), row(h - 1));
    ensure(a.prefix.iter().all(|v| v.as_str().starts_with("0|") && v.as_str().ends_with(",0")), "upper row is not on storey 0")?;
    ensure(b.prefix.iter().all(|v| v.as_str().starts_with("1|") && v.as_str().ends_with(",0")), "lower row is not on storey 1")?;
    ensure(a.prefix[0] == storey_token(0, h % 2, 0), "unexpected row origin")?;
    match check_divergence(&g, &a, &b, TWO_STOREY_SCALE).map_err(|e| e.to_string())? {
        gridweaver::rays::Divergence::Failure { witness, .. } => Ok(format!(
            "6x6 verifies; matched rows fail divergence at n = {} ({} and {} at distance {})",
            witness.n, witness.u, witness.v, witness.d
        )),
        gridweaver::rays::Divergence::Certificate(_) => Err("matched rows diverge".into()),
    }
}

fn row_rays(out: &WeaveOutput, i: usize, j: usize) -> (Ray, Ray) {
    let h = (out.fragment.rows / 2) as i64;
    let width = 2 * out.fragment.cols as i64;
    let li = out.levels[&(i as i64 - h)].vertices();
    let lj = out.levels[&(j as i64 - h)].vertices();
    let si = &out.map.branch[&coord2(0, i as i64)];
    let sj = &out.map.branch[&coord2(width, j as i64)];
    let pi = li.iter().position(|v| v == si).unwrap();
    let pj = lj.iter().position(|v| v == sj).unwrap();
    (
        Ray::explicit(li[pi..].to_vec()),
        Ray::explicit(lj[..=pj].iter().rev().cloned().collect()),
    )
}

fn c6_far_rows_diverge(ws: &[(WeaveOutput, Duration, LazyGraph)]) -> Outcome {
    let mut checked = 0;
    for (out, _, g) in ws {
        let rows = out.fragment.rows;
        let pairs: Vec<(usize, usize)> = (0..rows)
            .flat_map(|i| (0..rows).map(move |j| (i, j)))
            .filter(|(i, j)| i.abs_diff(*j) >= ROW_GAP)
            .collect();
        let bad: Vec<String> = pairs
            .par_iter()
            .filter_map(|&(i, j)| {
                let (a, b) = row_rays(out, i, j);
                match check_divergence(g, &a, &b, ROW_SCALE) {
                    Ok(d) if d.certificate().is_some() => None,
                    Ok(_) => Some(format!("{} rows {i},{j}", g.spec())),
                    Err(e) => Some(format!("{} rows {i},{j}: {e}", g.spec())),
                }
            })
            .collect();
        ensure(bad.is_empty(), bad.join("; "))?;
        checked += pairs.len();
    }
    Ok(format!("{checked} ordered row pairs with gap >= {ROW_GAP} certified at scale {ROW_SCALE}"))
}

/// Returns (passed, detail). The certified family of five rays does not
/// exist in cylinder(4); the check reports that instead of hiding it.
fn c7_refutation() -> (bool, String) {
    let g = LazyGraph::cylinder(4);
    let window = match ball(&g, &g.root(), CYLINDER_DEPTH) {
        Ok(w) => w.vertices,
        Err(e) => return (false, e.to_string()),
    };
    let qi = QIToTree::natural_cylinder(4, &window);
    let family = match request_family(&g, CYLINDER_RAYS, CYLINDER_DEPTH) {
        Ok(f) => f,
        Err(e) => return (false, e.to_string()),
    };
    let certified = matches!(family, RayFamily::Certified { .. });
    let (achieved, sep) = match &family {
        RayFamily::Unattainable { achieved, separator, .. } => (*achieved, separator.clone().unwrap_or_default()),
        RayFamily::Certified { rays } => (rays.len(), Vec::new()),
    };
    let w = match refute_half_grid(&g, &qi, &family, CYLINDER_DEPTH) {
        Ok(w) => w,
        Err(e) => return (false, format!("refutation failed: {e}")),
    };
    let report = verify_refutation(&g, &qi, &w);
    let tree = LazyGraph::regular_tree(3);
    let rays = disjoint_rays(&tree, 2, 8).unwrap();
    let tree_sep = match equivalent(&tree, &rays[0], &rays[1], 2, 8) {
        Err(Error::NotFound { separator: Some(s), .. }) => Some(s.len()),
        _ => None,
    };
    let refuted = report.ok && w.bound == 4 && w.bound < CYLINDER_RAYS;
    let detail = format!(
        "capacity b = {} < {CYLINDER_RAYS}, tree vertex {}, crowding set {:?}, witness verifies: {}; \
         regular_tree(3) rays separated by {:?} vertex; a certified family of {CYLINDER_RAYS} disjoint rays into one end \
         does not exist at depth {CYLINDER_DEPTH} (max {achieved}, Menger separator {:?})",
        w.bound, w.tree_vertex, w.crowding_set, report.ok, tree_sep, sep
    );
    (certified && refuted && tree_sep == Some(1), detail)
}

fn c8_capacity() -> Outcome {
    let g = LazyGraph::regular_tree(3);
    let window = ball(&g, &g.root(), 6).map_err(|e| e.to_string())?.vertices;
    let qi = QIToTree::identity(&g, &window);
    let b0 = qi_tree_capacity(&g, &qi, 0, &window).map_err(|e| e.to_string())?;
    let b1 = qi_tree_capacity(&g, &qi, 1, &window).map_err(|e| e.to_string())?;
    ensure((b0, b1) == (1, 4), format!("b(0) = {b0}, b(1) = {b1}"))?;
    let sph = spheres(&g, TREE_BALL_RADII);
    let mut total = 0;
    for (r, s) in sph.iter().enumerate() {
        total += s.len();
        ensure(total == 3 * (1 << r) - 2, format!("ball {r} has {total} vertices"))?;
    }
    Ok(format!("b(0) = 1, b(1) = 4; ball sizes 3*2^r - 2 for r <= {TREE_BALL_RADII}"))
}

fn c9_demos() -> Outcome {
    let (p, m) = chain_minor(6, 9, 10).map_err(|e| e.to_string())?;
    ensure(verify_minor(&LazyGraph::cylinder(9), &p, &m).ok, "chain (6, 9, 10)")?;
    let (p, m) = clique_minor_cubic(6).map_err(|e| e.to_string())?;
    ensure(verify_minor(&LazyGraph::new(Family::Cubic), &p, &m).ok, "clique 6")?;
    for n in 3..=7 {
        let (_, m) = chain_minor(n, n, 4).map_err(|e| e.to_string())?;
        let identity = m.branch_sets.iter().all(|(k, s)| s.len() == 1 && s.contains(k))
            && m.edge_witness.iter().all(|w| w.a == w.u && w.b == w.v);
        ensure(identity, format!("chain ({n}, {n}) is not the identity"))?;
    }
    Ok("chain (6, 9, 10) and K_6 verify; chain (m, m) is the identity for m in 3..=7".into())
}

fn c10_mutations() -> Outcome {
    let mut total = 0;
    let mut breaking = 0;
    for (name, golden) in common::goldens() {
        let results: Vec<(bool, bool, String)> = common::mutations(&golden)
            .par_iter()
            .map(|m| {
                (
                    common::oracle(&m.artifact),
                    gridweaver::commands::verify_artifact(&m.artifact).ok,
                    m.site.clone(),
                )
            })
            .collect();
        for (o, v, site) in &results {
            ensure(o == v || *o, format!("{name}: {site} breaks an invariant but verifies"))?;
            ensure(o == v, format!("{name}: {site} keeps the invariants but is rejected"))?;
        }
        total += results.len();
        breaking += results.iter().filter(|r| !r.0).count();
    }
    Ok(format!("{total} single-token mutations over 8 goldens, all {breaking} invariant-breaking ones rejected"))
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("weave-hex", vec!["weave", "--graph", "hex", "--rows", "5", "--cols", "5"]),
        ("weave-square", vec!["weave", "--graph", "square", "--rows", "7", "--cols", "7"]),
        ("weave-tri", vec!["weave", "--graph", "triangular", "--rows", "7", "--cols", "7"]),
        ("diverge", vec!["diverge", "--graph", "square", "--scale", "24"]),
        ("transfer", vec!["transfer", "--embedding", "hex-in-square", "--rows", "4", "--cols", "4"]),
        ("refute", vec!["refute", "--graph", "cylinder:4", "--rays", "5", "--depth", "30", "--tree-qi", "natural"]),
        ("chain", vec!["demo", "chain", "--m", "6", "--n", "9", "--length", "10"]),
        ("clique", vec!["demo", "clique", "--n", "6"]),
        ("two-storey", vec!["demo", "two-storey", "--rows", "6", "--cols", "6"]),
    ];
    let bin = env!("CARGO_BIN_EXE_gridweaver");
    let mut files = 0;
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{name}-{k}.json"));
            let mut cmd = Command::new(bin);
            cmd.args(args).arg("--out").arg(&out);
            if *name == "transfer" {
                cmd.arg("--subdivision-out").arg(dir.path().join(format!("{name}-{k}.sub.json")));
            }
            let status = cmd.env_remove("GRIDWEAVER_CAP").status().map_err(|e| e.to_string())?;
            ensure(status.code() == Some(0), format!("{name}: exit {:?}", status.code()))?;
            outputs.push(out);
        }
        let read = |p: &std::path::Path| std::fs::read(p).map_err(|e| e.to_string());
        // outputs differ only in the recorded output paths, so compare with those normalized
        let norm = |p: &std::path::Path, k: usize| -> Result<Vec<u8>, String> {
            let text = String::from_utf8(read(p)?).map_err(|e| e.to_string())?;
            Ok(text.replace(&format!("{name}-{k}."), &format!("{name}-N.")).into_bytes())
        };
        ensure(norm(&outputs[0], 0)? == norm(&outputs[1], 1)?, format!("{name}: outputs differ"))?;
        files += 1;
        if *name == "transfer" {
            let a = norm(&dir.path().join(format!("{name}-0.sub.json")), 0)?;
            let b = norm(&dir.path().join(format!("{name}-1.sub.json")), 1)?;
            ensure(a == b, "transfer subdivision outputs differ")?;
            files += 1;
        }
        let report = Command::new(bin).arg("verify").arg(&outputs[0]).output().map_err(|e| e.to_string())?;
        ensure(report.status.code() == Some(0), format!("{name}: output does not verify"))?;
    }
    Ok(format!("{files} artifacts byte-identical across two runs (output paths normalized) and verified by the CLI"))
}

fn line(n: usize, name: &str, pass: bool, detail: &str) -> String {
    format!("criterion {n:>2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" })
}

fn main() {
    let ws = weaves();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    let mut record = |n: usize, name: &str, o: Outcome| {
        let (pass, detail) = match o {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed.push(n);
        }
        lines.push(line(n, name, pass, &detail));
    };
    match &ws {
        Ok(ws) => {
            record(1, "weave soundness", c1_weave_soundness(ws));
        }
        Err(e) => record(1, "weave soundness", Err(e.clone())),
    }
    record(2, "apex hub counterexample", c2_apex_counterexample());
    record(3, "divergence certificates", c3_square_certificate());
    record(4, "transfer end to end", c4_transfer());
    record(5, "two-storey example", c5_two_storey());
    match &ws {
        Ok(ws) => record(6, "far rows diverge", c6_far_rows_diverge(ws)),
        Err(e) => record(6, "far rows diverge", Err(e.clone())),
    }
    let (pass7, detail7) = c7_refutation();
    record(7, "half-grid refutation", if pass7 { Ok(detail7.clone()) } else { Err(detail7.clone()) });
    record(8, "capacity sanity", c8_capacity());
    record(9, "demos", c9_demos());
    record(10, "mutation hardening", c10_mutations());
    record(11, "determinism", c11_determinism());
    drop(record);
    for l in &lines {
        println!("{l}");
    }
    // Criterion 7 asks for a certified family of five disjoint rays in
    // cylinder(4), which has only four. Its failure is expected as long as
    // the refutation part holds; everything else must pass.
    let seven_as_expected = detail7.contains("witness verifies: true")
        && detail7.contains("separated by Some(1) vertex")
        && detail7.contains("max 4,");
    assert!(seven_as_expected, "criterion 7: {detail7}");
    failed.retain(|&n| n != 7);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
