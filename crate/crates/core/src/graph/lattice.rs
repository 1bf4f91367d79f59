//! Integer-lattice families and the closed-form brick-wall metric.

/// Counterclockwise direction order used by every planar rotation:
/// E, NE, N, W, SW, S.
pub const CCW_DIRS: [(i64, i64); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

pub fn hex_has_up(x: i64, y: i64) -> bool {
    (x + y).rem_euclid(2) == 0
}

/// Brick-wall neighbors in counterclockwise order starting east.
pub fn hex_dirs(x: i64, y: i64) -> [(i64, i64); 3] {
    if hex_has_up(x, y) {
        [(1, 0), (0, 1), (-1, 0)]
    } else {
        [(1, 0), (-1, 0), (0, -1)]
    }
}

pub fn square_dirs() -> [(i64, i64); 4] {
    [(1, 0), (0, 1), (-1, 0), (0, -1)]
}

pub fn triangular_dirs() -> [(i64, i64); 6] {
    CCW_DIRS
}

/// Distance from the origin in the brick wall.
fn hex_dist0(x: i64, y: i64) -> i64 {
    let ax = x.abs();
    let (vert, floor) = if y >= 0 { (y, (y - 1).max(0)) } else { (-y, -y) };
    let mut h = ax.max(floor);
    if (h - ax).rem_euclid(2) != 0 {
        h += 1;
    }
    vert + h
}

/// Exact brick-wall distance between two lattice points.
///
/// Translations by even vectors and the reflection `(x, y) -> (x + 1, -y)`
/// are automorphisms; the latter moves odd points to even ones.
pub fn hex_dist(a: (i64, i64), b: (i64, i64)) -> i64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    if (a.0 + a.1).rem_euclid(2) == 0 {
        hex_dist0(dx, dy)
    } else {
        hex_dist0(dx, -dy)
    }
}

/// Lattice points at brick-wall distance exactly `n` from the origin.
pub fn hex_sphere(n: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for x in -n..=n {
        for y in -n..=n {
            if hex_dist0(x, y) == n {
                out.push((x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn bfs_hex(src: (i64, i64), r: i64) -> HashMap<(i64, i64), i64> {
        let mut d = HashMap::new();
        d.insert(src, 0);
        let mut q = VecDeque::from([src]);
        while let Some(p) = q.pop_front() {
            let dp = d[&p];
            if dp == r {
                continue;
            }
            for (dx, dy) in hex_dirs(p.0, p.1) {
                let n = (p.0 + dx, p.1 + dy);
                d.entry(n).or_insert_with(|| {
                    q.push_back(n);
                    dp + 1
                });
            }
        }
        d
    }

    #[test]
    fn closed_form_matches_bfs() {
        for src in [(0, 0), (1, 0), (-3, 2), (2, -5)] {
            let d = bfs_hex(src, 14);
            for (p, dp) in &d {
                assert_eq!(hex_dist(src, *p), *dp, "src {src:?} to {p:?}");
            }
            // everything inside the square box at distance <= 14 was reached
            for x in -6..=6 {
                for y in -6..=6 {
                    let p = (src.0 + x, src.1 + y);
                    let cf = hex_dist(src, p);
                    if cf <= 14 {
                        assert_eq!(d.get(&p), Some(&cf));
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_sizes() {
        let d = bfs_hex((0, 0), 12);
        for n in 0..=12 {
            let want = d.values().filter(|&&v| v == n).count();
            assert_eq!(hex_sphere(n).len(), want);
        }
    }
}
