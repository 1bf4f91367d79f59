use std::fmt;

use serde::{Deserialize, Serialize};

/// Canonical string name of a vertex. Ordering is plain byte order on the
/// string, which every sorted neighbor list and tie-break relies on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexToken(String);

impl VertexToken {
    pub fn new(s: impl Into<String>) -> Self {
        VertexToken(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for VertexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for VertexToken {
    fn from(s: &str) -> Self {
        VertexToken(s.to_owned())
    }
}

impl From<String> for VertexToken {
    fn from(s: String) -> Self {
        VertexToken(s)
    }
}

impl AsRef<str> for VertexToken {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

pub fn coord2(x: i64, y: i64) -> VertexToken {
    VertexToken(format!("{x},{y}"))
}

pub fn coord3(x: i64, y: i64, z: i64) -> VertexToken {
    VertexToken(format!("{x},{y},{z}"))
}

/// Parses one canonical decimal integer: no sign other than a leading `-`,
/// no leading zeros, no `-0`.
pub fn parse_int(s: &str) -> Option<i64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    if s.starts_with('-') && digits == "0" {
        return None;
    }
    s.parse().ok()
}

/// Comma-separated canonical integers, e.g. `"3,-4"`.
pub fn parse_ints(s: &str) -> Option<Vec<i64>> {
    s.split(',').map(parse_int).collect()
}

pub fn parse_coord2(s: &str) -> Option<(i64, i64)> {
    match parse_ints(s)?.as_slice() {
        [x, y] => Some((*x, *y)),
        _ => None,
    }
}

pub fn parse_coord3(s: &str) -> Option<(i64, i64, i64)> {
    match parse_ints(s)?.as_slice() {
        [x, y, z] => Some((*x, *y, *z)),
        _ => None,
    }
}

/// Lexicographically sorted tokens with duplicates removed.
pub fn sorted(mut v: Vec<VertexToken>) -> Vec<VertexToken> {
    v.sort();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ints() {
        assert_eq!(parse_int("0"), Some(0));
        assert_eq!(parse_int("-12"), Some(-12));
        assert_eq!(parse_int("-0"), None);
        assert_eq!(parse_int("007"), None);
        assert_eq!(parse_int("+3"), None);
        assert_eq!(parse_int(""), None);
        assert_eq!(parse_coord2("3,-4"), Some((3, -4)));
        assert_eq!(parse_coord2("3,-4,1"), None);
    }

    #[test]
    fn ordering_is_string_order() {
        let mut v = vec![coord2(2, 0), coord2(-1, 0), coord2(10, 0)];
        v.sort();
        let s: Vec<_> = v.iter().map(|t| t.as_str()).collect();
        assert_eq!(s, ["-1,0", "10,0", "2,0"]);
    }
}
