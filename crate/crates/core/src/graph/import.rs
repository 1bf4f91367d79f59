//! Finite graphs read from an adjacency-list file.
//!
//! ```text
//! # comment
//! a: b c
//! b: a
//! c: a
//! frontier: b c
//! root: a
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::token::VertexToken;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    pub adjacency: BTreeMap<VertexToken, Vec<VertexToken>>,
    pub frontier: BTreeSet<VertexToken>,
    pub root: VertexToken,
    pub rotation: Option<BTreeMap<VertexToken, Vec<VertexToken>>>,
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.contains(char::is_whitespace) && !s.ends_with(':')
}

impl Import {
    pub fn parse(text: &str) -> Result<Self> {
        let mut adjacency: BTreeMap<VertexToken, Vec<VertexToken>> = BTreeMap::new();
        let mut frontier = BTreeSet::new();
        let mut root = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Import(format!("line {}: missing ':'", lineno + 1)))?;
            let head = head.trim();
            let items: Vec<&str> = rest.split_whitespace().collect();
            if let Some(bad) = items.iter().find(|s| !valid_token(s)) {
                return Err(Error::Import(format!("line {}: bad token {bad:?}", lineno + 1)));
            }
            match head {
                "frontier" => frontier.extend(items.iter().map(|s| VertexToken::from(*s))),
                "root" => {
                    let [r] = items.as_slice() else {
                        return Err(Error::Import(format!("line {}: root takes one token", lineno + 1)));
                    };
                    root = Some(VertexToken::from(*r));
                }
                tok => {
                    if !valid_token(tok) {
                        return Err(Error::Import(format!("line {}: bad token {tok:?}", lineno + 1)));
                    }
                    let entry = adjacency.entry(VertexToken::from(tok)).or_default();
                    entry.extend(items.iter().map(|s| VertexToken::from(*s)));
                }
            }
        }
        // Tokens that appear only as neighbors are still vertices.
        let mentioned: Vec<VertexToken> = adjacency.values().flatten().cloned().collect();
        for t in mentioned {
            adjacency.entry(t).or_default();
        }
        for list in adjacency.values_mut() {
            list.sort();
            list.dedup();
        }
        for (u, list) in &adjacency {
            for v in list {
                if v == u {
                    return Err(Error::Import(format!("self-loop at {u}")));
                }
                if adjacency[v].binary_search(u).is_err() {
                    return Err(Error::Import(format!("asymmetric edge {u} -> {v}")));
                }
            }
        }
        if adjacency.is_empty() {
            return Err(Error::Import("no vertices".into()));
        }
        for f in &frontier {
            if !adjacency.contains_key(f) {
                return Err(Error::Import(format!("frontier token {f} is not a vertex")));
            }
        }
        let root = match root {
            Some(r) if adjacency.contains_key(&r) => r,
            Some(r) => return Err(Error::Import(format!("root {r} is not a vertex"))),
            None => adjacency.keys().next().cloned().expect("nonempty"),
        };
        Ok(Import {
            adjacency,
            frontier,
            root,
            rotation: None,
        })
    }

    pub fn load(path: &Path, rotation: Option<&Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut imp = Self::parse(&text)?;
        if let Some(rp) = rotation {
            let rot: BTreeMap<VertexToken, Vec<VertexToken>> =
                serde_json::from_str(&std::fs::read_to_string(rp)?)?;
            imp.set_rotation(rot)?;
        }
        Ok(imp)
    }

    /// Installs a rotation after checking each cyclic order is a permutation
    /// of the neighbor list. Frontier vertices may list only their known
    /// neighbors.
    pub fn set_rotation(&mut self, rot: BTreeMap<VertexToken, Vec<VertexToken>>) -> Result<()> {
        for (v, order) in &rot {
            let Some(nbrs) = self.adjacency.get(v) else {
                return Err(Error::Import(format!("rotation names unknown vertex {v}")));
            };
            let mut s = order.clone();
            s.sort();
            if &s != nbrs {
                return Err(Error::Import(format!("rotation at {v} is not a permutation of its neighbors")));
            }
        }
        self.rotation = Some(rot);
        Ok(())
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.values().map(Vec::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_symmetrizes_mentions() {
        let imp = Import::parse("a: b c\nb: a\nc: a\nfrontier: c\nroot: a\n").unwrap();
        assert_eq!(imp.adjacency.len(), 3);
        assert_eq!(imp.root.as_str(), "a");
        assert!(imp.frontier.contains(&VertexToken::from("c")));
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(Import::parse("a: b\nb:\n"), Err(Error::Import(_))));
    }

    #[test]
    fn rejects_bad_rotation() {
        let mut imp = Import::parse("a: b c\nb: a\nc: a\n").unwrap();
        let mut rot = BTreeMap::new();
        rot.insert(VertexToken::from("a"), vec![VertexToken::from("b")]);
        assert!(imp.set_rotation(rot).is_err());
    }
}
