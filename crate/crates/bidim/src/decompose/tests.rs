use super::*;
use crate::graph::Edge;
use crate::model::verify_red_minor_model;
use crate::oracle::{brute_society_depth, connected_graphs_up_to_iso, exact_bidimensionality, red_sets_up_to_iso};
use crate::rendition::{Cell, Rendition, Slot, Society, Surface};
use proptest::prelude::*;

fn graph(n: u32, edges: &[Edge]) -> AnnotatedGraph {
    AnnotatedGraph::from_edges(1..=n, edges).unwrap()
}

fn vs(v: &[Vertex]) -> VSet {
    v.iter().copied().collect()
}

/// Components of `g - s` by repeated search over an adjacency list.
fn components_oracle(g: &AnnotatedGraph, s: &VSet) -> Vec<VSet> {
    let mut left: VSet = g.vertices().filter(|v| !s.contains(v)).collect();
    let mut out = Vec::new();
    while let Some(&start) = left.iter().next() {
        let mut comp = VSet::from([start]);
        let mut frontier = vec![start];
        while let Some(u) = frontier.pop() {
            for w in g.neighbors(u) {
                if !s.contains(&w) && comp.insert(w) {
                    frontier.push(w);
                }
            }
        }
        left.retain(|v| !comp.contains(v));
        out.push(comp);
    }
    out
}

fn balanced_oracle(g: &AnnotatedGraph, x: &VSet, s: &VSet) -> bool {
    components_oracle(g, s).iter().all(|c| 3 * c.intersection(x).count() <= 2 * x.len())
}

/// Linkedness by enumerating vertex subsets as bitmasks.
fn linked_oracle(g: &AnnotatedGraph, x: &VSet, k: usize) -> bool {
    let vs: Vec<Vertex> = g.vertices().collect();
    !x.is_empty()
        && (0u32..1 << vs.len()).filter(|m| m.count_ones() as usize <= k).all(|m| {
            let s: VSet = (0..vs.len()).filter(|i| m >> i & 1 == 1).map(|i| vs[i]).collect();
            !balanced_oracle(g, x, &s)
        })
}

#[test]
fn single_bag_has_adhesion_zero() {
    let g = AnnotatedGraph::cycle(5);
    let td = TreeDecomposition::single(g.vertex_set());
    assert!(validate_tree_decomposition(&g, &td).is_valid());
    assert_eq!(td.adhesion(), 0);
    assert_eq!(td.width(), 4);
}

#[test]
fn path_of_two_bags() {
    let g = AnnotatedGraph::path(3);
    let td = TreeDecomposition::path(vec![vs(&[1, 2]), vs(&[2, 3])]);
    assert!(validate_tree_decomposition(&g, &td).is_valid());
    assert_eq!((td.adhesion(), td.width()), (1, 1));
}

#[test]
fn scattered_occurrence_is_rejected() {
    let g = AnnotatedGraph::path(3);
    let td = TreeDecomposition::path(vec![vs(&[1, 2]), vs(&[2, 3]), vs(&[1, 3])]);
    let rep = validate_tree_decomposition(&g, &td);
    assert!(rep.has(Kind::Interval));
    let td = TreeDecomposition::path(vec![vs(&[1, 2])]);
    let rep = validate_tree_decomposition(&g, &td);
    assert!(rep.has(Kind::VertexCover) && rep.has(Kind::EdgeCover));
    let mut cyclic = TreeDecomposition::path(vec![vs(&[1, 2]), vs(&[2, 3]), vs(&[2])]);
    cyclic.edges.push((0, 2));
    assert!(validate_tree_decomposition(&g, &cyclic).has(Kind::NotATree));
}

#[test]
fn torso_without_red_beyond_adds_no_red() {
    let g = AnnotatedGraph::path(4).with_red([1]).unwrap();
    let td = TreeDecomposition::path(vec![vs(&[1, 2]), vs(&[2, 3]), vs(&[3, 4])]);
    let t = annotated_torso(&g, &td, 0).unwrap();
    assert_eq!(t.red(), &vs(&[1]));
    assert_eq!(annotated_torso(&g, &td, 2).unwrap().red(), &vs(&[3]));
    assert_eq!(annotated_torso(&g, &td, 1).unwrap().red(), &vs(&[2]));
    assert_eq!(annotated_torso(&g, &td, 3), Err(Error::UnknownNode(3)));
}

#[test]
fn hidden_red_marks_the_adhesion() {
    let g = graph(5, &[(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (4, 5)]).with_red([5]).unwrap();
    let td = TreeDecomposition::path(vec![vs(&[1, 2, 3]), vs(&[2, 3, 4]), vs(&[4, 5])]);
    assert!(validate_tree_decomposition(&g, &td).is_valid());
    let t = annotated_torso(&g, &td, 0).unwrap();
    assert_eq!(t.red(), &vs(&[2, 3]));
    assert!(t.has_edge(2, 3));
}

#[test]
fn star_decomposition_of_k4_has_clique_torsos() {
    let g = AnnotatedGraph::complete(4);
    let td = TreeDecomposition::graft(vs(&[1, 2, 3]), vec![TreeDecomposition::single(vs(&[1, 2, 3, 4]))], Vec::new());
    assert!(validate_tree_decomposition(&g, &td).is_valid());
    for t in 0..td.len() {
        let h = annotated_torso(&g, &td, t).unwrap();
        let bag: Vec<Vertex> = td.bags[t].iter().copied().collect();
        let expected = bag.len() * (bag.len() - 1) / 2;
        assert_eq!(h.m(), expected);
        for (i, &u) in bag.iter().enumerate() {
            for &v in &bag[i + 1..] {
                assert!(h.has_edge(u, v));
            }
        }
    }
}

#[test]
fn torso_adds_missing_adhesion_edges() {
    let g = AnnotatedGraph::cycle(4);
    let td = TreeDecomposition::path(vec![vs(&[1, 2, 4]), vs(&[2, 3, 4])]);
    let h = annotated_torso(&g, &td, 0).unwrap();
    assert!(h.has_edge(2, 4) && !g.has_edge(2, 4));
}

#[test]
fn path_of_nine_has_a_middle_separator() {
    let g = AnnotatedGraph::path(9);
    let x = g.vertex_set();
    assert_eq!(balanced_separator(&g, &x, 1), Err(Error::SizeBound { size: 9, bound: 4 }));
    assert!(!is_linked(&g, &x, 1, (2, 3), 12).unwrap());
    assert!(balanced_oracle(&g, &x, &vs(&[5])));
    match balanced_separator(&g, &x, 3).unwrap() {
        Balance::Separator(s) => assert!(s.len() <= 3 && balanced_oracle(&g, &x, &s)),
        Balance::Linked(_) => panic!("P9 has a balanced separator"),
    }
}

#[test]
fn clique_is_linked() {
    let g = AnnotatedGraph::complete(5);
    let x = vs(&[1, 2, 3, 4]);
    match balanced_separator(&g, &x, 1).unwrap() {
        Balance::Linked(c) => assert_eq!((c.k, c.alpha), (1, (2, 3))),
        Balance::Separator(s) => panic!("found {s:?}"),
    }
    assert!(linked_oracle(&g, &x, 1));
}

#[test]
fn empty_set_has_empty_separator() {
    let g = AnnotatedGraph::complete(4);
    assert_eq!(balanced_separator(&g, &VSet::new(), 1).unwrap(), Balance::Separator(VSet::new()));
    assert!(!is_linked(&g, &VSet::new(), 1, (2, 3), 12).unwrap());
}

#[test]
fn clique_on_k_plus_two_is_linked_at_one_half() {
    for k in 1..=3 {
        let g = AnnotatedGraph::complete(k as u32 + 2);
        assert!(is_linked(&g, &g.vertex_set(), k, (1, 2), 12).unwrap() == (k == 1));
        assert!(is_linked(&g, &g.vertex_set(), k, (1, k + 2), 12).unwrap());
    }
}

#[test]
fn single_edge_society() {
    let s = Society::new(AnnotatedGraph::path(2), vec![1, 2]);
    let ld = linear_decomposition_from_depth(&s, 1).unwrap();
    assert_eq!(ld.bags.len(), 2);
    assert!(ld.adhesion() <= 1);
    assert!(validate_linear_decomposition(&s, &ld).is_valid());
}

#[test]
fn cycle_society_has_adhesion_two() {
    let s = Society::new(AnnotatedGraph::cycle(6), (1..=6).collect());
    assert_eq!(brute_society_depth(&s, 12).unwrap(), 2);
    let ld = linear_decomposition_from_depth(&s, 2).unwrap();
    let adh = ld.bags.windows(2).map(|w| w[0].intersection(&w[1]).count()).max().unwrap();
    assert!(adh <= 2);
    assert!(validate_linear_decomposition(&s, &ld).is_valid());
}

#[test]
fn deep_society_is_rejected() {
    let g = graph(6, &[(1, 4), (2, 5), (3, 6)]);
    let s = Society::new(g, (1..=6).collect());
    let d = brute_society_depth(&s, 12).unwrap();
    assert_eq!(d, 3);
    assert_eq!(linear_decomposition_from_depth(&s, d - 1), Err(Error::DepthExceeded { depth: 3, k: 2 }));
    assert!(linear_decomposition_from_depth(&s, d).is_ok());
}

#[test]
fn interior_vertices_land_in_an_interval() {
    let g = graph(6, &[(1, 5), (5, 3), (2, 6), (6, 4), (5, 6)]);
    let s = Society::new(g, vec![1, 2, 3, 4]);
    let ld = linear_decomposition_from_depth(&s, 4).unwrap();
    assert!(validate_linear_decomposition(&s, &ld).is_valid());
    let mut broken = ld.clone();
    broken.bags[1].remove(&1);
    broken.bags[0].insert(4);
    assert!(!validate_linear_decomposition(&s, &broken).is_valid());
}

fn triangle_embedding() -> (AnnotatedGraph, NearEmbedding) {
    let g = AnnotatedGraph::complete(3);
    let cell = Cell::new(vec![1, 2, 3], g.edges());
    let rotation = (1..=3).map(|v| (v, vec![Slot::Cell(0)])).collect();
    let rendition = Rendition { surface: Surface::Sphere, cells: vec![cell], boundary: Vec::new(), rotation };
    (g, NearEmbedding { apex: VSet::new(), rendition, vortices: Vec::new() })
}

#[test]
fn planar_graph_is_a_zero_near_embedding() {
    let (g, ne) = triangle_embedding();
    assert!(verify_near_embedding(&g, &ne, 0).is_valid());
}

#[test]
fn red_vertex_in_the_embedded_part_is_flagged() {
    let (g, ne) = triangle_embedding();
    let g = g.with_red([2]).unwrap();
    let rep = verify_near_embedding(&g, &ne, 0);
    assert_eq!(rep.kinds(), vec![Kind::RedCondition]);
    let ne = NearEmbedding { apex: vs(&[2]), ..ne };
    let rep = verify_near_embedding(&g, &ne, 0);
    assert!(rep.has(Kind::ApexBound) && rep.has(Kind::Embedding));
}

fn hub_graph() -> AnnotatedGraph {
    graph(5, &[(1, 2), (2, 3), (3, 4), (4, 1), (5, 1), (5, 3)]).with_red([5]).unwrap()
}

#[test]
fn vortex_layout_confines_red() {
    let g = hub_graph();
    let ne = vortex_layout(&g).unwrap();
    assert_eq!(ne.rendition.cells[0].nodes, vec![1, 2, 3, 4]);
    assert!(verify_near_embedding(&g, &ne, 4).is_valid());
    assert!(verify_near_embedding(&g, &ne, 0).has(Kind::VortexCount));
}

#[test]
fn permuted_vortex_decomposition_is_flagged() {
    let g = hub_graph();
    let mut ne = vortex_layout(&g).unwrap();
    let ld = &mut ne.vortices[0].decomposition;
    ld.boundary.swap(1, 2);
    ld.bags.swap(1, 2);
    assert!(verify_near_embedding(&g, &ne, 4).has(Kind::CyclicOrder));
}

#[test]
fn all_red_graph_goes_to_the_apex_set() {
    let g = AnnotatedGraph::path(3).with_red([1, 2, 3]).unwrap();
    let ne = vortex_layout(&g).unwrap();
    assert_eq!(ne.apex, g.vertex_set());
    assert!(verify_near_embedding(&g, &ne, 3).is_valid());
}

fn decompose(g: &AnnotatedGraph, k: usize) -> GlobalOutcome {
    local_to_global(g, k, &VSet::new(), &BruteOracle { cap: 12 }, &Bounds::desk(k)).unwrap()
}

fn assert_sound(g: &AnnotatedGraph, k: usize, x: &VSet, out: &GlobalOutcome) {
    match out {
        GlobalOutcome::RedGrid(m) => assert!(verify_red_minor_model(g, m).unwrap().is_valid()),
        GlobalOutcome::Decomposition(d) => {
            let rep = check_global(g, x, d, &Bounds::desk(k)).unwrap();
            assert!(rep.is_valid(), "{rep}");
        }
    }
}

#[test]
fn small_graph_is_one_bag() {
    let g = AnnotatedGraph::path(3).with_red([2]).unwrap();
    match decompose(&g, 2) {
        GlobalOutcome::Decomposition(d) => {
            assert_eq!(d.td, TreeDecomposition::single(g.vertex_set()));
            assert_sound(&g, 2, &VSet::new(), &GlobalOutcome::Decomposition(d));
        }
        other => panic!("{other:?}"),
    }
    let out = local_to_global(&g, 2, &vs(&[1]), &RejectingOracle, &Bounds::desk(2)).unwrap();
    assert!(matches!(out, GlobalOutcome::Decomposition(_)));
}

#[test]
fn blocks_joined_at_a_cut_vertex() {
    let g = graph(7, &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 6), (6, 7), (7, 4)]).with_red([1]).unwrap();
    let x = vs(&[1]);
    let out = local_to_global(&g, 2, &x, &BruteOracle { cap: 12 }, &Bounds::desk(2)).unwrap();
    assert_sound(&g, 2, &x, &out);
    let GlobalOutcome::Decomposition(d) = out else { panic!("no red grid") };
    assert!(d.td.len() > 1);
    assert!(d.td.adhesion() <= Bounds::desk(2).adhesion_bound());
}

#[test]
fn red_grid_is_reported() {
    let mesh = crate::grids::make_grid(3, 3).unwrap();
    let g = mesh.graph();
    let g = g.clone().with_red(g.vertex_set()).unwrap();
    let out = decompose(&g, 2);
    assert!(matches!(out, GlobalOutcome::RedGrid(_)));
    assert_sound(&g, 2, &VSet::new(), &out);
}

#[test]
fn red_reached_through_a_cut_vertex_is_lifted() {
    let mut g = AnnotatedGraph::cycle(4);
    for v in 1..=4 {
        g.add_edge(v, v + 4).unwrap();
    }
    let g = g.with_red(5..=8).unwrap();
    let out = decompose(&g, 2);
    let GlobalOutcome::RedGrid(m) = &out else { panic!("expected a red grid, got {out:?}") };
    assert!(m.base.branch.values().all(|b| b.len() == 2));
    assert_sound(&g, 2, &VSet::new(), &out);
}

#[test]
fn rejecting_oracle_stops_at_a_linked_set() {
    let g = AnnotatedGraph::complete(5);
    let err = local_to_global(&g, 2, &VSet::new(), &RejectingOracle, &Bounds::desk(2)).unwrap_err();
    assert!(matches!(err, Error::OracleFailure(_)));
    let wide = local_to_global(&g, 2, &g.vertex_set(), &BruteOracle { cap: 12 }, &Bounds::desk(2));
    assert_eq!(wide, Err(Error::SizeBound { size: 5, bound: 4 }));
}

#[test]
fn red_free_side_becomes_a_leaf() {
    let g = AnnotatedGraph::complete(6).with_red([1]).unwrap();
    let out = decompose(&g, 2);
    assert_sound(&g, 2, &VSet::new(), &out);
    let GlobalOutcome::Decomposition(d) = out else { panic!("one red vertex cannot give a grid") };
    assert_eq!(d.td.leaves.len(), 1);
}

#[test]
fn dichotomy_on_graphs_up_to_five_vertices() {
    for n in 1..=5 {
        for g0 in connected_graphs_up_to_iso(n) {
            for g in red_sets_up_to_iso(&g0) {
                let out = decompose(&g, 2);
                assert_sound(&g, 2, &VSet::new(), &out);
                let grid = exact_bidimensionality(&g, 2, 12).unwrap() >= 2;
                assert_eq!(matches!(out, GlobalOutcome::RedGrid(_)), grid, "{g:?}");
            }
        }
    }
}

#[test]
fn desk_bounds() {
    let b = Bounds::desk(2);
    assert_eq!((b.link, b.x_bound()), (1, 4));
    assert_eq!(paper_breadth(2), 63);
    assert_eq!(paper_breadth(4), 3 * (16 * 47 - 24 + 10) / 2);
}

fn arb_graph(max_n: u32) -> impl Strategy<Value = AnnotatedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        (Just(n), proptest::collection::vec((1..=n, 1..=n), 0..(2 * n as usize + 2)), proptest::collection::btree_set(1..=n, 0..=n as usize))
    })
    .prop_map(|(n, edges, red)| {
        let mut g = AnnotatedGraph::from_edges(1..=n, &[]).unwrap();
        for (u, v) in edges {
            if u != v {
                g.add_edge(u, v).unwrap();
            }
        }
        g.with_red(red).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn separator_agrees_with_linkedness(g in arb_graph(10), k in 1usize..=2, seed in any::<u64>()) {
        let vs: Vec<Vertex> = g.vertices().collect();
        let size = (seed as usize % (3 * k + 2)).min(vs.len());
        let x: VSet = vs.iter().copied().cycle().skip(seed as usize % vs.len()).take(size).collect();
        let linked = linked_oracle(&g, &x, k);
        prop_assert_eq!(is_linked(&g, &x, k, (2, 3), 12).unwrap(), linked);
        match balanced_separator(&g, &x, k).unwrap() {
            Balance::Separator(s) => {
                prop_assert!(!linked);
                prop_assert!(s.len() <= k && balanced_oracle(&g, &x, &s));
            }
            Balance::Linked(_) => prop_assert!(linked),
        }
    }

    #[test]
    fn trees_are_never_linked(parents in proptest::collection::vec(any::<u32>(), 1..9), pick in any::<u16>()) {
        let n = parents.len() as u32 + 1;
        let edges: Vec<Edge> = parents.iter().enumerate().map(|(i, p)| (i as u32 + 2, p % (i as u32 + 1) + 1)).collect();
        let g = graph(n, &edges);
        let x: VSet = (1..=n).filter(|v| pick >> (v % 16) & 1 == 1).collect();
        prop_assert!(!is_linked(&g, &x, 1, (2, 3), 12).unwrap());
    }

    #[test]
    fn linear_decomposition_holds_its_bounds(g in arb_graph(8), cut in 1usize..=8) {
        let omega: Vec<Vertex> = g.vertices().take(cut).collect();
        let s = Society::new(g, omega);
        let depth = brute_society_depth(&s, 12).unwrap();
        let ld = linear_decomposition_from_depth(&s, depth).unwrap();
        prop_assert!(validate_linear_decomposition(&s, &ld).is_valid());
        let adh = ld.bags.windows(2).map(|w| w[0].intersection(&w[1]).count()).max().unwrap_or(0);
        prop_assert!(adh <= depth);
    }

    #[test]
    fn torso_red_is_monotone(g in arb_graph(8), extra in 1u32..=8, parents in proptest::collection::vec(any::<u32>(), 0..4)) {
        let mut bags = vec![g.vertex_set()];
        let mut edges = Vec::new();
        for (i, p) in parents.iter().enumerate() {
            let parent = *p as usize % (i + 1);
            let bag: VSet = bags[parent].iter().copied().filter(|v| (v + i as u32) % 3 != 0).collect();
            bags.push(bag);
            edges.push((parent, i + 1));
        }
        let td = TreeDecomposition { bags, edges, root: 0, leaves: Default::default() };
        prop_assume!(validate_tree_decomposition(&g, &td).is_valid());
        let extra = (extra - 1) % g.n() as u32 + 1;
        let mut more = g.clone();
        more.set_red(extra).unwrap();
        for t in 0..td.len() {
            let a = annotated_torso(&g, &td, t).unwrap();
            let b = annotated_torso(&more, &td, t).unwrap();
            prop_assert!(a.red().is_subset(b.red()));
        }
    }
}
