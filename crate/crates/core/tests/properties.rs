use proptest::prelude::*;

use gridweaver::graph::lattice::hex_dist;
use gridweaver::graph::{dist, Dist, FamilySpec, LazyGraph};
use gridweaver::model::GridFragment;
use gridweaver::graph::storey_token;
use gridweaver::token::{coord2, coord3};
use gridweaver::transfer::{line_vertex, moore_bound};
use gridweaver::VertexToken;

fn family(spec: &str) -> LazyGraph {
    LazyGraph::from_spec(&FamilySpec::parse(spec).unwrap()).unwrap()
}

fn plane() -> impl Strategy<Value = VertexToken> {
    (-40i64..40, -40i64..40).prop_map(|(x, y)| coord2(x, y))
}

fn tree_word(d: usize) -> impl Strategy<Value = VertexToken> {
    prop::collection::vec(0..d, 0..12).prop_map(move |raw| {
        let mut w: Vec<usize> = Vec::new();
        for l in raw {
            if w.last() != Some(&l) {
                w.push(l);
            }
        }
        gridweaver::graph::tree_token(&w)
    })
}

fn tokens(spec: &str) -> BoxedStrategy<VertexToken> {
    match spec {
        "hex" | "square" | "triangular" => plane().boxed(),
        "half_grid" => (-40i64..40, 0i64..40).prop_map(|(x, y)| coord2(x, y)).boxed(),
        "cubic" => (-20i64..20, -20i64..20, -20i64..20).prop_map(|(x, y, z)| coord3(x, y, z)).boxed(),
        "apex_hub" => prop_oneof![
            plane(),
            (1i64..30).prop_map(|n| VertexToken::new(n.to_string()))
        ]
        .boxed(),
        "two_storey" => (0u8..2, -40i64..40, 0i64..40).prop_map(|(s, x, y)| storey_token(s, x, y)).boxed(),
        "cylinder:5" => (0i64..5, -40i64..40).prop_map(|(i, z)| coord2(i, z)).boxed(),
        "regular_tree:3" => tree_word(3).boxed(),
        "regular_tree:2" => tree_word(2).boxed(),
        other => panic!("no strategy for {other}"),
    }
}

const FAMILIES: [&str; 10] = [
    "hex",
    "half_grid",
    "square",
    "triangular",
    "cubic",
    "apex_hub",
    "two_storey",
    "cylinder:5",
    "regular_tree:3",
    "regular_tree:2",
];

#[test]
fn adjacency_is_symmetric_and_bounded() {
    for spec in FAMILIES {
        let g = family(spec);
        let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(1000));
        runner
            .run(&tokens(spec), |v| {
                let ns = g.neighbors(&v).unwrap();
                prop_assert!(!ns.contains(&v), "{spec}: loop at {v}");
                if let Some(d) = g.degree_bound() {
                    prop_assert!(ns.len() <= d, "{spec}: degree {} at {v}", ns.len());
                }
                for w in &ns {
                    prop_assert!(g.validate(w).is_ok(), "{spec}: neighbor {w} of {v} is malformed");
                    prop_assert!(g.neighbors(w).unwrap().contains(&v), "{spec}: {v} -> {w} not symmetric");
                }
                if g.has_rotation() {
                    let mut rot = g.rotation(&v).unwrap();
                    rot.sort();
                    prop_assert_eq!(rot, ns);
                }
                Ok(())
            })
            .unwrap_or_else(|e| panic!("{spec}: {e}"));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn triangle_inequality(a in (-6i64..6, -6i64..6), b in (-6i64..6, -6i64..6), c in (-6i64..6, -6i64..6), which in 0usize..4) {
        let g = family(["hex", "square", "triangular", "apex_hub"][which]);
        let (a, b, c) = (coord2(a.0, a.1), coord2(b.0, b.1), coord2(c.0, c.1));
        let d = |u: &VertexToken, v: &VertexToken| match dist(&g, u, v, 64).unwrap() {
            Dist::Exact(d) => d,
            Dist::Exceeds(_) => unreachable!("plane windows are connected"),
        };
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
    }

    #[test]
    fn hex_distance_formula(x in -8i64..8, y in -8i64..8) {
        let g = LazyGraph::hex();
        let bfs = dist(&g, &coord2(0, 0), &coord2(x, y), 64).unwrap().exact().unwrap();
        prop_assert_eq!(bfs as i64, hex_dist((0, 0), (x, y)));
    }

    #[test]
    fn line_vertices_are_isometric(a in -30i64..30, b in -30i64..30) {
        let t = LazyGraph::regular_tree(2);
        let d = dist(&t, &line_vertex(a), &line_vertex(b), 128).unwrap().exact().unwrap();
        prop_assert_eq!(d as i64, (a - b).abs());
    }

    #[test]
    fn fragments_are_bipartite_and_subcubic(rows in 1usize..9, cols in 1usize..9) {
        let p = GridFragment::new(rows, cols).pattern();
        prop_assert!(p.max_degree() <= 3);
        let colour = p.bipartition().unwrap();
        for (a, b) in &p.edges {
            prop_assert_ne!(colour[a], colour[b]);
        }
        prop_assert_eq!(p.vertices.len(), rows * (2 * cols + 1));
    }

    #[test]
    fn tree_balls_meet_moore(r in 0usize..7) {
        let g = LazyGraph::regular_tree(3);
        let n = gridweaver::graph::ball(&g, &g.root(), r).unwrap().vertices.len();
        prop_assert_eq!(n, moore_bound(3, r));
    }
}
