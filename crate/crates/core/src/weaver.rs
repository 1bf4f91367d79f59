//! Builds explicit subdivisions of brick-wall fragments in plane hosts.
//!
//! A diverging pair of rays is merged into the level `R^0`. Each further
//! level is the merged spine of two combs living in the faces on the far
//! side of the previous level, and the comb teeth become the rungs between
//! consecutive levels. Rung selection then reads a brick wall off the
//! ladder of levels.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::graph::{storey_token, LazyGraph};
use crate::model::{GridFragment, Pattern, SubdivisionMap};
use crate::planar::{incident_face_subgraph, Side, SideMap, DEFAULT_FACE_CAP};
use crate::rays::{comb_from, diverging_pair, merge_to_double_ray, DivergenceCertificate, DoubleRay, Ray, Tooth};
use crate::token::VertexToken;
use crate::verify::verify_subdivision;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn side(self) -> Side {
        match self {
            Direction::Up => Side::A,
            Direction::Down => Side::B,
        }
    }

    fn step(self) -> i64 {
        match self {
            Direction::Up => 1,
            Direction::Down => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeaveState {
    pub levels: BTreeMap<i64, DoubleRay>,
    /// Pool `i` holds disjoint paths from level `i` to level `i + 1`,
    /// listed lower end first and sorted along level `i`.
    pub rung_pools: BTreeMap<i64, Vec<Vec<VertexToken>>>,
    pub side_map: SideMap,
    /// Every level vertex and rung interior so far.
    pub used: BTreeSet<VertexToken>,
    pub face_cap: usize,
}

impl WeaveState {
    pub fn new(r0: DoubleRay) -> Self {
        let used = r0.vertices().into_iter().collect();
        WeaveState {
            levels: BTreeMap::from([(0, r0.clone())]),
            rung_pools: BTreeMap::new(),
            side_map: SideMap::new(r0),
            used,
            face_cap: DEFAULT_FACE_CAP,
        }
    }
}

fn position_map(v: &[VertexToken]) -> HashMap<&VertexToken, usize> {
    v.iter().enumerate().map(|(i, t)| (t, i)).collect()
}

/// Builds level `i ± 1` from the faces beyond level `i` and stores up to
/// `2 * teeth_budget` rungs between the two.
pub fn next_level(g: &LazyGraph, state: &mut WeaveState, i: i64, direction: Direction, teeth_budget: usize) -> Result<()> {
    let level = state
        .levels
        .get(&i)
        .ok_or_else(|| Error::InvalidArgument(format!("level {i} does not exist")))?
        .clone();
    let j = i + direction.step();
    if state.levels.contains_key(&j) {
        return Err(Error::InvalidArgument(format!("level {j} already exists")));
    }
    let verts = level.vertices();
    let n = verts.len();
    let o = level.origin_index();
    if n < 3 {
        return Err(Error::WindowExhausted(format!("level {i} holds {n} vertices")));
    }
    let side = direction.side();
    let cap = state.face_cap;
    let free = |sub: crate::graph::Subgraph| -> BTreeSet<VertexToken> {
        sub.vertices.into_iter().filter(|v| !state.used.contains(v)).collect()
    };
    let s_plus = free(incident_face_subgraph(g, &level, o..=n - 2, side, cap)?);
    let s_minus = free(incident_face_subgraph(g, &level, 1..=o, side, cap)?);
    let t_plus: Vec<VertexToken> = verts[o..].to_vec();
    let t_minus: Vec<VertexToken> = verts[..=o].iter().rev().cloned().collect();
    let c_plus = comb_from(g, &s_plus, &t_plus, teeth_budget, cap)?;
    let c_minus = comb_from(g, &s_minus, &t_minus, teeth_budget, cap)?;
    let allowed: BTreeSet<VertexToken> = s_plus.union(&s_minus).cloned().collect();
    let merged = merge_to_double_ray(g, &c_plus.spine, &c_minus.spine, Some(&allowed), allowed.len() + 1)?;

    let new_verts = merged.vertices();
    let on_new = position_map(&new_verts);
    let on_old = position_map(&verts);
    let mut taken: BTreeSet<VertexToken> = BTreeSet::new();
    let mut rungs: Vec<Vec<VertexToken>> = Vec::new();
    let keep = |t: &Tooth, taken: &BTreeSet<VertexToken>| -> bool {
        let p = &t.path;
        p.len() >= 2
            && on_new.contains_key(&p[0])
            && on_old.contains_key(&p[p.len() - 1])
            && p[1..p.len() - 1]
                .iter()
                .all(|v| !on_new.contains_key(v) && !on_old.contains_key(v) && !state.used.contains(v))
            && p.iter().all(|v| !taken.contains(v))
    };
    for t in c_plus.teeth.iter().chain(c_minus.teeth.iter()) {
        if keep(t, &taken) {
            taken.extend(t.path.iter().cloned());
            let mut p = t.path.clone();
            if direction == Direction::Up {
                p.reverse();
            }
            rungs.push(p);
        }
    }
    let lower = i.min(j);
    let lower_pos = if direction == Direction::Up { &on_old } else { &on_new };
    rungs.sort_by_key(|p| lower_pos[&p[0]]);

    for p in &rungs {
        state.used.extend(p[1..p.len() - 1].iter().cloned());
    }
    state.used.extend(new_verts.iter().cloned());
    state.rung_pools.insert(lower, rungs);
    state.levels.insert(j, merged);
    Ok(())
}

/// A rung with its attachment indices on the lower and upper level.
#[derive(Clone, Debug)]
struct Placed {
    a: usize,
    b: usize,
    path: Vec<VertexToken>,
}

/// Levels and pools indexed by pattern row.
struct Ladder {
    frag: GridFragment,
    levels: Vec<Vec<VertexToken>>,
    pools: Vec<Vec<Placed>>,
}

/// Level positions per pattern vertex and the rung used per vertical edge.
type Selection = (Vec<Vec<usize>>, Vec<Vec<Option<usize>>>);

impl Ladder {
    fn covered(&self, x: usize, y: usize) -> bool {
        self.frag.has_up(x as i64, y as i64) || self.frag.has_down(x as i64, y as i64)
    }

    /// Places every pattern vertex starting from rung `start` of pool 0, or
    /// names the pattern row whose pool ran dry.
    fn select(&self, start: usize) -> std::result::Result<Selection, usize> {
        let rows = self.frag.rows;
        let width = 2 * self.frag.cols + 1;
        let mut pos: Vec<Vec<Option<usize>>> = vec![vec![None; width]; rows];
        let mut chosen: Vec<Vec<Option<usize>>> = vec![vec![None; width]; rows];
        let mut cursor: Vec<usize> = vec![0; rows];

        // Columns 0 and 1 climb the rows as a staircase so that the two
        // columns stay as tight as the pools allow.
        let r = &self.pools[0][start];
        pos[0][0] = Some(r.a);
        pos[1][0] = Some(r.b);
        chosen[0][0] = Some(start);
        cursor[0] = start + 1;
        for y in 1..rows - 1 {
            let pool = &self.pools[y];
            let k = if y % 2 == 1 {
                let after = pos[y][0].expect("placed by the rung below");
                pool.iter().position(|q| q.a > after).ok_or(y)?
            } else {
                let before = pos[y][1].expect("placed by the rung below");
                pool.iter().rposition(|q| q.a < before).ok_or(y)?
            };
            let x = y % 2;
            pos[y][x] = Some(pool[k].a);
            pos[y + 1][x] = Some(pool[k].b);
            chosen[y][x] = Some(k);
            cursor[y] = k + 1;
        }
        let top = rows - 1;
        if pos[top][0].is_none() {
            let next = pos[top][1].ok_or(top)?;
            if next == 0 {
                return Err(top);
            }
            pos[top][0] = Some(next - 1);
        }

        let mut last: Vec<usize> = Vec::with_capacity(rows);
        let mut pending: Vec<usize> = vec![0; rows];
        for y in 0..rows {
            match pos[y][1] {
                Some(p) => last.push(p),
                None => {
                    last.push(pos[y][0].expect("column 0 is placed"));
                    pending[y] = 1;
                }
            }
        }
        for x in 2..width {
            for y in (x % 2..rows - 1).step_by(2) {
                let pool = &self.pools[y];
                let lo = last[y] + pending[y];
                let hi = last[y + 1] + pending[y + 1];
                let k = (cursor[y]..pool.len()).find(|&k| pool[k].a > lo && pool[k].b > hi).ok_or(y)?;
                cursor[y] = k + 1;
                chosen[y][x] = Some(k);
                for (row, at) in [(y, pool[k].a), (y + 1, pool[k].b)] {
                    // free vertices go directly before the attachment
                    for d in 1..=pending[row] {
                        pos[row][x - d] = Some(at - d);
                    }
                    pending[row] = 0;
                    pos[row][x] = Some(at);
                    last[row] = at;
                }
            }
            for y in 0..rows {
                if !self.covered(x, y) {
                    pending[y] += 1;
                }
            }
        }
        let mut out = Vec::with_capacity(rows);
        for y in 0..rows {
            for d in 1..=pending[y] {
                let at = last[y] + d;
                if at >= self.levels[y].len() {
                    return Err(y);
                }
                pos[y][width - 1 - pending[y] + d] = Some(at);
            }
            out.push(pos[y].iter().map(|p| p.expect("every vertex placed")).collect());
        }
        Ok((out, chosen))
    }
}

/// Reads a `rows x cols` brick wall off the levels and rung pools: level
/// attachments strictly increase along each level, so consecutive pattern
/// vertices of a row are joined by level segments.
pub fn select_rungs(state: &WeaveState, rows: usize, cols: usize) -> Result<SubdivisionMap> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    let frag = GridFragment::new(rows, cols);
    let h = (rows / 2) as i64;
    let mut levels = Vec::with_capacity(rows);
    for y in 0..rows as i64 {
        let l = state
            .levels
            .get(&(y - h))
            .ok_or_else(|| Error::InvalidArgument(format!("level {} is missing", y - h)))?;
        levels.push(l.vertices());
    }
    let width = 2 * cols + 1;
    let mut map = SubdivisionMap::default();
    let tok = |x: usize, y: usize| crate::token::coord2(x as i64, y as i64);

    if rows == 1 {
        let o = state.levels[&0].origin_index();
        if o + width > levels[0].len() {
            return Err(Error::WindowExhausted(format!("level 0 is too short for {width} vertices")));
        }
        for x in 0..width {
            map.branch.insert(tok(x, 0), levels[0][o + x].clone());
            if x + 1 < width {
                map.push_path(&tok(x, 0), &tok(x + 1, 0), levels[0][o + x..=o + x + 1].to_vec());
            }
        }
        map.sort();
        return Ok(map);
    }

    let mut pools = Vec::with_capacity(rows - 1);
    for y in 0..rows - 1 {
        let lo = position_map(&levels[y]);
        let hi = position_map(&levels[y + 1]);
        let raw = state.rung_pools.get(&(y as i64 - h)).map(Vec::as_slice).unwrap_or_default();
        let mut placed: Vec<Placed> = raw
            .iter()
            .filter_map(|p| {
                let a = *lo.get(p.first()?)?;
                let b = *hi.get(p.last()?)?;
                Some(Placed { a, b, path: p.clone() })
            })
            .collect();
        placed.sort_by_key(|p| p.a);
        pools.push(placed);
    }
    // Start near the origin so the fragment sits in the middle of the
    // levels, then fall back to the rungs further west.
    let centre = state.levels[&-h].origin_index().saturating_sub(cols);
    let first = pools[0].iter().position(|p| p.a >= centre).unwrap_or(pools[0].len());
    let order: Vec<usize> = (first..pools[0].len()).chain((0..first).rev()).collect();
    let ladder = Ladder { frag, levels, pools };
    let mut worst = 0;
    let mut found = None;
    for start in order {
        match ladder.select(start) {
            Ok(s) => {
                found = Some(s);
                break;
            }
            Err(y) => worst = worst.max(y),
        }
    }
    let Some((pos, chosen)) = found else {
        return Err(Error::InsufficientRungs {
            row: worst,
            needed: cols + 1,
            available: ladder.pools[worst].len(),
        });
    };
    for y in 0..rows {
        for x in 0..width {
            map.branch.insert(tok(x, y), ladder.levels[y][pos[y][x]].clone());
            if x + 1 < width {
                let seg = ladder.levels[y][pos[y][x]..=pos[y][x + 1]].to_vec();
                map.push_path(&tok(x, y), &tok(x + 1, y), seg);
            }
            if let Some(k) = chosen[y][x] {
                map.push_path(&tok(x, y), &tok(x, y + 1), ladder.pools[y][k].path.clone());
            }
        }
    }
    map.sort();
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeaveOpts {
    /// Teeth per comb; defaults to `4 * cols`.
    pub teeth_budget: Option<usize>,
    /// Budget doublings allowed after `InsufficientRungs`.
    pub retries: usize,
    /// Scale of the divergence certificate for the starting pair.
    pub scale: usize,
    pub effort: usize,
    pub face_cap: usize,
}

impl Default for WeaveOpts {
    fn default() -> Self {
        WeaveOpts {
            teeth_budget: None,
            retries: 3,
            scale: 8,
            effort: 10_000,
            face_cap: DEFAULT_FACE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeaveOutput {
    pub fragment: GridFragment,
    pub pattern: Pattern,
    pub map: SubdivisionMap,
    /// Level `i` carries the image of pattern row `i + rows / 2`.
    pub levels: BTreeMap<i64, DoubleRay>,
    pub teeth_budget: usize,
    pub rays: (Ray, Ray),
    pub certificate: DivergenceCertificate,
}

/// Ray materialization depth for a given budget.
pub fn weave_depth(budget: usize, rows: usize) -> usize {
    2 * budget + 2 * rows + 8
}

pub fn weave(g: &LazyGraph, rows: usize, cols: usize, opts: &WeaveOpts) -> Result<WeaveOutput> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    let (r1, r2, cert) = diverging_pair(g, opts.scale, opts.effort).stage("diverging_pair")?;
    if !g.has_rotation() {
        return Err(Error::NoRotation).stage("planar");
    }
    let mut budget = opts.teeth_budget.unwrap_or(4 * cols);
    let mut attempt = 0;
    loop {
        match weave_once(g, rows, cols, &r1, &r2, budget, opts) {
            Err(e) if matches!(e.root_cause(), Error::InsufficientRungs { .. }) && attempt < opts.retries => {
                attempt += 1;
                budget = (2 * budget).max(1);
            }
            Err(e) => return Err(e),
            Ok((map, levels)) => {
                let fragment = GridFragment::new(rows, cols);
                return Ok(WeaveOutput {
                    fragment,
                    pattern: fragment.pattern(),
                    map,
                    levels,
                    teeth_budget: budget,
                    rays: (r1, r2),
                    certificate: cert,
                });
            }
        }
    }
}

fn weave_once(
    g: &LazyGraph,
    rows: usize,
    cols: usize,
    r1: &Ray,
    r2: &Ray,
    budget: usize,
    opts: &WeaveOpts,
) -> Result<(SubdivisionMap, BTreeMap<i64, DoubleRay>)> {
    let depth = weave_depth(budget, rows);
    let (mut east, mut west) = (r1.clone(), r2.clone());
    east.extend_to(g, depth).stage("merge")?;
    west.extend_to(g, depth).stage("merge")?;
    let r0 = merge_to_double_ray(g, &east, &west, None, depth).stage("merge")?;
    let mut state = WeaveState::new(r0);
    state.face_cap = opts.face_cap;
    let h = rows / 2;
    let (up, down) = (rows - 1 - h, h);
    for k in 1..=up.max(down) as i64 {
        if k as usize <= up {
            next_level(g, &mut state, k - 1, Direction::Up, budget).stage("next_level")?;
        }
        if k as usize <= down {
            next_level(g, &mut state, 1 - k, Direction::Down, budget).stage("next_level")?;
        }
    }
    let map = select_rungs(&state, rows, cols).stage("select_rungs")?;
    let pattern = GridFragment::new(rows, cols).pattern();
    let report = verify_subdivision(g, &pattern, &map);
    if let Some(v) = report.violations.first() {
        return Err(Error::SelfCheck(format!("{}: {}", v.rule, v.message))).stage("self_check");
    }
    Ok((map, state.levels))
}

/// Explicit fragment in the two-storey graph: pattern rows at or above the
/// middle use storey 0, the rows below use storey 1, and the two middle rows
/// are joined through the matching. All paths have length one.
pub fn weave_two_storey(rows: usize, cols: usize) -> Result<SubdivisionMap> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("rows and cols must be at least 1".into()));
    }
    let h = (rows / 2) as i64;
    let shift = h % 2;
    let image = |x: i64, y: i64| {
        let r = y - h;
        let col = x + shift;
        if r >= 0 {
            storey_token(0, col, r)
        } else {
            storey_token(1, col, -r - 1)
        }
    };
    let frag = GridFragment::new(rows, cols);
    let pattern = frag.pattern();
    let mut map = SubdivisionMap::default();
    for v in &pattern.vertices {
        let (x, y) = GridFragment::coords(v).expect("fragment token");
        map.branch.insert(v.clone(), image(x, y));
    }
    for (a, b) in &pattern.edges {
        map.push_path(a, b, vec![map.branch[a].clone(), map.branch[b].clone()]);
    }
    map.sort();
    Ok(map)
}
