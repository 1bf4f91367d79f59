//! Lazily generated locally finite graphs.

pub mod import;
pub mod lattice;
pub mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::token::{coord2, coord3, parse_coord2, parse_coord3, parse_int, VertexToken};

pub use import::Import;
pub use search::{ball, bfs, dist, shortest_path, Bfs, Dist, FiniteWindow, Subgraph};

use lattice::{hex_dirs, hex_dist, hex_sphere, square_dirs, triangular_dirs};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    Hex,
    HalfGrid,
    Square,
    Triangular,
    Cubic,
    ApexHub,
    TwoStorey,
    Cylinder { n: usize },
    RegularTree { d: usize },
    WindowImport(Arc<Import>),
}

/// Serializable description of a family: `{"family": "cylinder", "params": {"n": 4}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

impl FamilySpec {
    pub fn simple(name: &str) -> Self {
        FamilySpec {
            family: name.to_owned(),
            params: BTreeMap::new(),
        }
    }

    fn with(name: &str, key: &str, value: impl Into<Value>) -> Self {
        let mut s = Self::simple(name);
        s.params.insert(key.to_owned(), value.into());
        s
    }

    fn usize_param(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| Error::InvalidArgument(format!("family {} needs integer param {key:?}", self.family)))
    }

    /// Accepts a JSON object or the short forms `hex`, `cylinder:4`,
    /// `regular_tree:3`, `import:path[:rotation.json]`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let (name, arg) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        let name = name.replace('-', "_");
        let num = |a: Option<&str>| -> Result<u64> {
            a.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("{name} needs a numeric parameter")))
        };
        Ok(match name.as_str() {
            "cylinder" => Self::with("cylinder", "n", num(arg)?),
            "regular_tree" | "tree" => Self::with("regular_tree", "d", num(arg)?),
            "import" | "window_import" => {
                let arg = arg.ok_or_else(|| Error::InvalidArgument("import needs a path".into()))?;
                match arg.split_once(':') {
                    Some((p, r)) => {
                        let mut s = Self::with("window_import", "path", p);
                        s.params.insert("rotation".into(), Value::from(r));
                        s
                    }
                    None => Self::with("window_import", "path", arg),
                }
            }
            other => {
                if arg.is_some() {
                    return Err(Error::InvalidArgument(format!("family {other} takes no parameter")));
                }
                Self::simple(other)
            }
        })
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family)?;
        for v in self.params.values() {
            match v {
                Value::String(s) => write!(f, ":{s}")?,
                other => write!(f, ":{other}")?,
            }
        }
        Ok(())
    }
}

/// Neighbor oracle plus metadata. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct LazyGraph {
    family: Family,
    spec: FamilySpec,
}

fn malformed(token: &str, family: &Family) -> Error {
    Error::MalformedToken {
        token: token.to_owned(),
        family: family.name().to_owned(),
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Hex => "hex",
            Family::HalfGrid => "half_grid",
            Family::Square => "square",
            Family::Triangular => "triangular",
            Family::Cubic => "cubic",
            Family::ApexHub => "apex_hub",
            Family::TwoStorey => "two_storey",
            Family::Cylinder { .. } => "cylinder",
            Family::RegularTree { .. } => "regular_tree",
            Family::WindowImport(_) => "window_import",
        }
    }
}

/// Parsed vertex of a tree family: the reduced word.
pub fn tree_word(tok: &str, d: usize) -> Option<Vec<usize>> {
    if tok == "e" {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for part in tok.split('.') {
        let l = parse_int(part)?;
        if l < 0 || l as usize >= d || out.last() == Some(&(l as usize)) {
            return None;
        }
        out.push(l as usize);
    }
    Some(out)
}

pub fn tree_token(word: &[usize]) -> VertexToken {
    if word.is_empty() {
        return VertexToken::from("e");
    }
    let parts: Vec<String> = word.iter().map(|l| l.to_string()).collect();
    VertexToken::new(parts.join("."))
}

/// Tree distance between two reduced words.
pub fn tree_dist(a: &[usize], b: &[usize]) -> usize {
    let lcp = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    a.len() + b.len() - 2 * lcp
}

fn parse_storey(tok: &str) -> Option<(u8, i64, i64)> {
    let (s, rest) = tok.split_once('|')?;
    let s = match s {
        "0" => 0,
        "1" => 1,
        _ => return None,
    };
    let (x, y) = parse_coord2(rest)?;
    (y >= 0).then_some((s, x, y))
}

pub fn storey_token(s: u8, x: i64, y: i64) -> VertexToken {
    VertexToken::new(format!("{s}|{x},{y}"))
}

impl LazyGraph {
    pub fn new(family: Family) -> Self {
        let spec = match &family {
            Family::Cylinder { n } => FamilySpec::with("cylinder", "n", *n as u64),
            Family::RegularTree { d } => FamilySpec::with("regular_tree", "d", *d as u64),
            Family::WindowImport(_) => FamilySpec::simple("window_import"),
            f => FamilySpec::simple(f.name()),
        };
        LazyGraph { family, spec }
    }

    pub fn hex() -> Self {
        Self::new(Family::Hex)
    }
    pub fn square() -> Self {
        Self::new(Family::Square)
    }
    pub fn triangular() -> Self {
        Self::new(Family::Triangular)
    }
    pub fn cylinder(n: usize) -> Self {
        Self::new(Family::Cylinder { n })
    }
    pub fn regular_tree(d: usize) -> Self {
        Self::new(Family::RegularTree { d })
    }

    pub fn from_import(imp: Import, spec: FamilySpec) -> Self {
        LazyGraph {
            family: Family::WindowImport(Arc::new(imp)),
            spec,
        }
    }

    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        let family = match spec.family.replace('-', "_").as_str() {
            "hex" => Family::Hex,
            "half_grid" => Family::HalfGrid,
            "square" => Family::Square,
            "triangular" => Family::Triangular,
            "cubic" => Family::Cubic,
            "apex_hub" => Family::ApexHub,
            "two_storey" => Family::TwoStorey,
            "cylinder" => {
                let n = spec.usize_param("n")?;
                if n < 3 {
                    return Err(Error::InvalidArgument("cylinder needs n >= 3".into()));
                }
                Family::Cylinder { n }
            }
            "regular_tree" => {
                let d = spec.usize_param("d")?;
                if d < 2 {
                    return Err(Error::InvalidArgument("regular_tree needs d >= 2".into()));
                }
                Family::RegularTree { d }
            }
            "window_import" => {
                let path = spec
                    .params
                    .get("path")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::InvalidArgument("window_import needs a path".into()))?;
                let rot = spec.params.get("rotation").and_then(Value::as_str).map(PathBuf::from);
                let imp = Import::load(&PathBuf::from(path), rot.as_deref())?;
                return Ok(Self::from_import(imp, spec.clone()));
            }
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        };
        Ok(Self::new(family))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn root(&self) -> VertexToken {
        match &self.family {
            Family::Cubic => coord3(0, 0, 0),
            Family::TwoStorey => storey_token(0, 0, 0),
            Family::RegularTree { .. } => VertexToken::from("e"),
            Family::WindowImport(imp) => imp.root.clone(),
            _ => coord2(0, 0),
        }
    }

    /// `None` means unbounded (apex hubs).
    pub fn degree_bound(&self) -> Option<usize> {
        match &self.family {
            Family::Hex | Family::HalfGrid => Some(3),
            Family::Square | Family::TwoStorey | Family::Cylinder { .. } => Some(4),
            Family::Triangular | Family::Cubic => Some(6),
            Family::ApexHub => None,
            Family::RegularTree { d } => Some(*d),
            Family::WindowImport(imp) => Some(imp.max_degree()),
        }
    }

    /// Uniform bound on bounded face lengths, for plane families.
    pub fn codegree_bound(&self) -> Option<usize> {
        match &self.family {
            Family::Hex => Some(6),
            Family::Square => Some(4),
            Family::Triangular => Some(3),
            _ => None,
        }
    }

    pub fn has_rotation(&self) -> bool {
        match &self.family {
            Family::Hex | Family::HalfGrid | Family::Square | Family::Triangular => true,
            Family::WindowImport(imp) => imp.rotation.is_some(),
            _ => false,
        }
    }

    /// Frontier vertices of an import have incomplete neighbor lists.
    pub fn is_frontier(&self, v: &VertexToken) -> bool {
        match &self.family {
            Family::WindowImport(imp) => imp.frontier.contains(v),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.family, Family::WindowImport(_))
    }

    /// Rejects tokens that do not name a vertex.
    pub fn validate(&self, v: &VertexToken) -> Result<()> {
        let s = v.as_str();
        let ok = match &self.family {
            Family::Hex | Family::Square | Family::Triangular => parse_coord2(s).is_some(),
            Family::HalfGrid => parse_coord2(s).is_some_and(|(_, y)| y >= 0),
            Family::Cubic => parse_coord3(s).is_some(),
            Family::ApexHub => parse_coord2(s).is_some() || parse_int(s).is_some_and(|n| n >= 1),
            Family::TwoStorey => parse_storey(s).is_some(),
            Family::Cylinder { n } => {
                parse_coord2(s).is_some_and(|(i, _)| i >= 0 && (i as usize) < *n)
            }
            Family::RegularTree { d } => tree_word(s, *d).is_some(),
            Family::WindowImport(imp) => imp.adjacency.contains_key(v),
        };
        if ok {
            Ok(())
        } else {
            Err(malformed(s, &self.family))
        }
    }

    fn offsets2(&self, x: i64, y: i64, dirs: &[(i64, i64)]) -> Vec<VertexToken> {
        dirs.iter().map(|(dx, dy)| coord2(x + dx, y + dy)).collect()
    }

    /// Neighbors in counterclockwise order for plane families, arbitrary
    /// deterministic order otherwise.
    fn raw_neighbors(&self, v: &VertexToken) -> Result<Vec<VertexToken>> {
        let s = v.as_str();
        let bad = || malformed(s, &self.family);
        Ok(match &self.family {
            Family::Hex => {
                let (x, y) = parse_coord2(s).ok_or_else(bad)?;
                self.offsets2(x, y, &hex_dirs(x, y))
            }
            Family::HalfGrid => {
                let (x, y) = parse_coord2(s).ok_or_else(bad)?;
                if y < 0 {
                    return Err(bad());
                }
                hex_dirs(x, y)
                    .iter()
                    .filter(|(_, dy)| y + dy >= 0)
                    .map(|(dx, dy)| coord2(x + dx, y + dy))
                    .collect()
            }
            Family::Square => {
                let (x, y) = parse_coord2(s).ok_or_else(bad)?;
                self.offsets2(x, y, &square_dirs())
            }
            Family::Triangular => {
                let (x, y) = parse_coord2(s).ok_or_else(bad)?;
                self.offsets2(x, y, &triangular_dirs())
            }
            Family::Cubic => {
                let (x, y, z) = parse_coord3(s).ok_or_else(bad)?;
                vec![
                    coord3(x + 1, y, z),
                    coord3(x - 1, y, z),
                    coord3(x, y + 1, z),
                    coord3(x, y - 1, z),
                    coord3(x, y, z + 1),
                    coord3(x, y, z - 1),
                ]
            }
            Family::ApexHub => {
                if let Some((x, y)) = parse_coord2(s) {
                    let mut out = self.offsets2(x, y, &hex_dirs(x, y));
                    let n = hex_dist((0, 0), (x, y));
                    if n >= 1 {
                        out.push(VertexToken::new(n.to_string()));
                    }
                    out
                } else {
                    let n = parse_int(s).filter(|&n| n >= 1).ok_or_else(bad)?;
                    hex_sphere(n).into_iter().map(|(x, y)| coord2(x, y)).collect()
                }
            }
            Family::TwoStorey => {
                let (st, x, y) = parse_storey(s).ok_or_else(bad)?;
                let mut out: Vec<VertexToken> = hex_dirs(x, y)
                    .iter()
                    .filter(|(_, dy)| y + dy >= 0)
                    .map(|(dx, dy)| storey_token(st, x + dx, y + dy))
                    .collect();
                out.push(storey_token(1 - st, x, y));
                out
            }
            Family::Cylinder { n } => {
                let n = *n as i64;
                let (i, z) = parse_coord2(s).filter(|(i, _)| (0..n).contains(i)).ok_or_else(bad)?;
                vec![
                    coord2((i + 1).rem_euclid(n), z),
                    coord2(i, z + 1),
                    coord2((i - 1).rem_euclid(n), z),
                    coord2(i, z - 1),
                ]
            }
            Family::RegularTree { d } => {
                let w = tree_word(s, *d).ok_or_else(bad)?;
                let mut out = Vec::with_capacity(*d);
                if !w.is_empty() {
                    out.push(tree_token(&w[..w.len() - 1]));
                }
                for l in 0..*d {
                    if w.last() != Some(&l) {
                        let mut c = w.clone();
                        c.push(l);
                        out.push(tree_token(&c));
                    }
                }
                out
            }
            Family::WindowImport(imp) => imp.adjacency.get(v).cloned().ok_or_else(bad)?,
        })
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: &VertexToken) -> Result<Vec<VertexToken>> {
        let mut out = self.raw_neighbors(v)?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn adjacent(&self, u: &VertexToken, v: &VertexToken) -> Result<bool> {
        Ok(self.neighbors(u)?.binary_search(v).is_ok())
    }

    /// Counterclockwise cyclic order of the neighbors of `v`.
    pub fn rotation(&self, v: &VertexToken) -> Result<Vec<VertexToken>> {
        match &self.family {
            Family::Hex | Family::HalfGrid | Family::Square | Family::Triangular => self.raw_neighbors(v),
            Family::WindowImport(imp) => {
                let rot = imp.rotation.as_ref().ok_or(Error::NoRotation)?;
                match rot.get(v) {
                    Some(order) => Ok(order.clone()),
                    None => {
                        self.validate(v)?;
                        Err(Error::NoRotation)
                    }
                }
            }
            _ => Err(Error::NoRotation),
        }
    }

    pub fn degree(&self, v: &VertexToken) -> Result<usize> {
        Ok(self.neighbors(v)?.len())
    }
}
