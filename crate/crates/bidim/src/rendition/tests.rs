use super::*;
use crate::error::Error;
use crate::graph::{edge, AnnotatedGraph, VSet};
use crate::grids::{make_cylindrical_mesh, make_grid};
use crate::report::Kind;

fn grid(n: usize, disk: bool) -> (AnnotatedGraph, Rendition) {
    let m = make_grid(n, n).unwrap();
    let g = m.graph();
    (g.clone(), grid_drawing(&m.horizontal, g.edges(), disk).build())
}

/// Cylindrical mesh with `m` cycles of length `n` and a vortex inside the
/// first cycle: a hub joined to every inner-cycle vertex.
fn cylinder(n: usize, m: usize) -> (AnnotatedGraph, Rendition, crate::grids::CylindricalMesh) {
    let cm = make_cylindrical_mesh(n, m).unwrap();
    let mut g = cm.graph();
    let hub = (n * m + 1) as u32;
    let spokes: Vec<_> = cm.cycles[0].iter().map(|&v| edge(v, hub)).collect();
    for &(u, v) in &spokes {
        g.add_edge(u, v).unwrap();
    }
    let plain: Vec<_> = g.edges().filter(|e| !spokes.contains(e)).collect();
    let rho = annulus_drawing(&cm.cycles, plain, Some((VSet::from([hub]), spokes))).build();
    (g, rho, cm)
}

#[test]
fn triangle_in_one_cell_is_valid() {
    let g = AnnotatedGraph::cycle(3);
    let rho = Rendition {
        surface: Surface::Disk,
        cells: vec![Cell::new(vec![1, 2, 3], g.edges())],
        boundary: vec![1, 2, 3],
        rotation: [(1, vec![Slot::Cell(0), Slot::Outer]), (2, vec![Slot::Cell(0), Slot::Outer]), (3, vec![Slot::Cell(0), Slot::Outer])]
            .into_iter()
            .collect(),
    };
    let rep = validate_rendition(&g, &rho);
    assert!(rep.is_valid(), "{rep}");
}

#[test]
fn shared_edge_violates_r2() {
    let g = AnnotatedGraph::path(2);
    let rho = Rendition {
        surface: Surface::Sphere,
        cells: vec![Cell::new(vec![1, 2], [(1, 2)]), Cell::new(vec![1, 2], [(1, 2)])],
        boundary: vec![],
        rotation: [(1, vec![Slot::Cell(0), Slot::Cell(1)]), (2, vec![Slot::Cell(1), Slot::Cell(0)])].into_iter().collect(),
    };
    assert!(validate_rendition(&g, &rho).has(Kind::R2));
}

#[test]
fn five_mutually_touching_cells_are_not_realizable() {
    // One node per pair of cells: the radial map subdivides K5.
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let mut g = AnnotatedGraph::new();
    let mut cells: Vec<Cell> = Vec::new();
    let mut rotation = std::collections::BTreeMap::new();
    for c in 0..5 {
        let nodes: Vec<u32> = pairs.iter().enumerate().filter(|(_, p)| p.0 == c || p.1 == c).map(|(i, _)| i as u32 + 1).collect();
        let hub = 100 + c as u32;
        let edges: Vec<_> = nodes.iter().map(|&v| edge(v, hub)).collect();
        for &(u, v) in &edges {
            g.add_edge(u, v).unwrap();
        }
        cells.push(Cell::vortex(nodes, edges, VSet::from([hub])));
    }
    for (i, p) in pairs.iter().enumerate() {
        rotation.insert(i as u32 + 1, vec![Slot::Cell(p.0), Slot::Cell(p.1)]);
    }
    let rho = Rendition { surface: Surface::Sphere, cells, boundary: vec![], rotation };
    let rep = validate_rendition(&g, &rho);
    assert_eq!(rep.kinds(), vec![Kind::Realizability], "{rep}");
}

#[test]
fn drawn_grids_are_valid_in_disk_and_sphere() {
    for disk in [true, false] {
        let (g, rho) = grid(4, disk);
        let rep = validate_rendition(&g, &rho);
        assert!(rep.is_valid(), "{rep}");
    }
    let (g, rho, _) = cylinder(5, 3);
    let rep = validate_rendition(&g, &rho);
    assert!(rep.is_valid(), "{rep}");
}

#[test]
fn swapped_rotation_breaks_realizability() {
    let (g, mut rho) = grid(3, false);
    rho.rotation.get_mut(&5).unwrap().swap(0, 1);
    assert!(validate_rendition(&g, &rho).has(Kind::Realizability));
}

#[test]
fn blankness() {
    let (g, rho, _) = cylinder(4, 3);
    assert!(is_blank(&rho, &g));
    let hub = 13;
    assert!(is_blank(&rho, &g.clone().with_red([hub]).unwrap()));
    assert!(!is_blank(&rho, &g.with_red([1]).unwrap()));
}

#[test]
fn face_disk_holds_the_pendant_inside() {
    let m = make_grid(3, 3).unwrap();
    let mut g = m.graph();
    g.add_edge(1, 10).unwrap();
    let mut d = grid_drawing(&m.horizontal, g.edges(), true);
    d.place(10, 0.4, -0.3);
    let rho = d.build();
    assert!(validate_rendition(&g, &rho).is_valid());
    let disk = cycle_disk(&rho, &[1, 2, 5, 4]).unwrap();
    let pendant = rho.edge_cells()[&(1, 10)];
    assert!(disk.cells.contains(&pendant));
    let outside = rho.edge_cells()[&(5, 6)];
    assert!(!disk.cells.contains(&outside));
    let h = crop(&g, &rho, &disk);
    assert!(h.contains(10));
    assert!(!h.contains(9));
    let sub = restrict(&rho, &disk);
    let rep = validate_rendition(&h, &sub);
    assert!(rep.is_valid(), "{rep}");
}

#[test]
fn nested_cycles_give_nested_disks() {
    let (_, rho, cm) = cylinder(6, 4);
    let disks: Vec<_> = cm.cycles.iter().map(|c| cycle_disk(&rho, c).unwrap()).collect();
    for w in disks.windows(2) {
        assert!(w[0].cells.is_subset(&w[1].cells));
        assert!(w[0].cells.len() < w[1].cells.len());
    }
    let vortex = rho.vortices().next().unwrap();
    assert!(disks[0].cells.contains(&vortex));
}

#[test]
fn sphere_disk_takes_the_smaller_side() {
    let (_, rho) = grid(4, false);
    let d = cycle_disk(&rho, &[1, 2, 6, 5]).unwrap();
    assert!(d.cells.len() <= 4);
    let avoid = VSet::from([16]);
    let d2 = cycle_disk_avoiding(&rho, &[1, 2, 3, 4, 8, 12, 16, 15, 14, 13, 9, 5], &avoid).unwrap();
    let far = rho.edge_cells()[&(15, 16)];
    assert!(!d2.cells.contains(&far));
}

#[test]
fn paths_in_a_vortex_are_not_grounded() {
    let (_, rho, cm) = cylinder(4, 3);
    let hub = 13;
    let r = trace(&rho, &[cm.cycles[0][0], hub, cm.cycles[0][2]], false);
    assert!(matches!(r, Err(Error::NotGrounded(_))));
    let r = trace(&rho, &[1, 2], false).unwrap();
    assert_eq!(r.steps.len(), 1);
    assert!(!is_grounded(&rho, &[(1, 13)].into_iter().collect()));
    assert!(is_grounded(&rho, &cm.cycles[1].windows(2).map(|w| edge(w[0], w[1])).collect()));
}

#[test]
fn cycle_society_has_depth_two() {
    for n in 4..9 {
        let s = Society::new(AnnotatedGraph::cycle(n), (1..=n).collect());
        assert_eq!(society_depth(&s), 2);
    }
    let triangle = Society::new(AnnotatedGraph::cycle(3), vec![1, 2, 3]);
    assert_eq!(society_depth(&triangle), 1);
}

#[test]
fn star_society_has_depth_one() {
    let g = AnnotatedGraph::from_edges([], &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
    assert_eq!(society_depth(&Society::new(g, vec![2, 3, 4, 5])), 1);
    assert_eq!(society_depth(&Society::new(AnnotatedGraph::path(2), vec![1, 2])), 1);
}

fn chords() -> (Society, Transaction, Transaction) {
    // Boundary 1..8 on a cycle, chords 1-6 and 2-5 (planar), 1-5 and 2-6 (crosscap).
    let mut g = AnnotatedGraph::cycle(8);
    for (u, v) in [(1, 9), (9, 6), (2, 10), (10, 5), (1, 11), (11, 5), (2, 12), (12, 6)] {
        g.add_edge(u, v).unwrap();
    }
    let s = Society::new(g, (1..=8).collect());
    let planar = Transaction::new(vec![vec![1, 9, 6], vec![2, 10, 5]]);
    let cross = Transaction::new(vec![vec![1, 11, 5], vec![2, 12, 6]]);
    (s, planar, cross)
}

#[test]
fn classification_by_endpoint_order() {
    let (s, planar, cross) = chords();
    let c = classify_transaction(&s, &planar).unwrap();
    assert_eq!((c.monotone, c.kind), (true, TransactionKind::Planar));
    let c = classify_transaction(&s, &cross).unwrap();
    assert_eq!((c.monotone, c.kind), (true, TransactionKind::Crosscap));
    let single = Transaction::new(vec![vec![1, 9, 6]]);
    let c = classify_transaction(&s, &single).unwrap();
    assert_eq!((c.monotone, c.kind), (true, TransactionKind::Planar));
    for t in [&planar, &cross] {
        let a = classify_transaction(&s, t).unwrap();
        let b = classify_transaction(&s.reversed(), t).unwrap();
        let mut rev = t.clone();
        rev.paths.reverse();
        let c = classify_transaction(&s, &rev).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.monotone, a.kind, a.handle.is_some()), (c.monotone, c.kind, c.handle.is_some()));
    }
}

#[test]
fn handle_transactions_are_detected() {
    // Boundary 1..12: R = {1-6, 2-5} and Q = {4-9 ... } alternate as R1 Q1 R2 Q2.
    let mut g = AnnotatedGraph::cycle(12);
    let chords = [vec![1, 20, 7], vec![2, 21, 6], vec![4, 22, 10], vec![5, 23, 9]];
    let chords: Vec<Vec<u32>> = chords.to_vec();
    for p in &chords {
        for w in p.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
    }
    let s = Society::new(g, (1..=12).collect());
    let t = Transaction::new(vec![chords[0].clone(), chords[1].clone(), chords[2].clone(), chords[3].clone()]);
    let _ = t;
    // Endpoints in order: 1R 2R 4Q 5Q 6R 7R 9Q 10Q -> runs R1 Q1 R2 Q2.
    let t = Transaction::new(chords.clone());
    let c = classify_transaction(&s, &t).unwrap();
    assert_eq!(c.handle, Some((vec![0, 1], vec![2, 3])));
    let planar = Transaction::new(vec![chords[0].clone(), chords[1].clone()]);
    assert!(classify_transaction(&s, &planar).unwrap().handle.is_none());
}

#[test]
fn non_transactions_are_rejected() {
    let (s, _, _) = chords();
    let bad = Transaction::new(vec![vec![1, 2]]);
    let ok = classify_transaction(&s, &bad);
    assert!(ok.is_ok());
    let shared = Transaction::new(vec![vec![1, 9, 6], vec![1, 11, 5]]);
    assert!(matches!(classify_transaction(&s, &shared), Err(Error::NotATransaction(_))));
}

#[test]
fn strips_of_two_chords() {
    let mut g = AnnotatedGraph::new();
    for (u, v) in [(1, 5), (5, 4), (2, 6), (6, 3)] {
        g.add_edge(u, v).unwrap();
    }
    let s = Society::new(g, vec![1, 2, 3, 4]);
    let t = Transaction::new(vec![vec![1, 5, 4], vec![2, 6, 3]]);
    let h = strip(&s, &t, 1).unwrap();
    assert_eq!(h.vertex_set(), VSet::from([1, 2, 3, 4, 5, 6]));
    assert_eq!(h.m(), 4);
    assert!(matches!(strip(&s, &t, 2), Err(Error::OutOfRange(_))));
}

#[test]
fn pendant_on_a_middle_path_lies_in_both_neighbouring_strips() {
    let mut g = AnnotatedGraph::new();
    let paths = vec![vec![1, 11, 6], vec![2, 12, 5], vec![3, 13, 4]];
    for p in &paths {
        for w in p.windows(2) {
            g.add_edge(w[0], w[1]).unwrap();
        }
    }
    g.add_edge(12, 20).unwrap();
    g.add_edge(11, 12).unwrap();
    let s = Society::new(g, (1..=6).collect());
    let t = Transaction::new(paths);
    let h1 = strip(&s, &t, 1).unwrap();
    let h2 = strip(&s, &t, 2).unwrap();
    assert!(h1.has_edge(12, 20) && h2.has_edge(12, 20));
    assert!(h1.has_edge(11, 12));
    let society = strip_society(&s, &t).unwrap();
    let mut union = h1.clone();
    for (u, v) in h2.edges() {
        union.add_edge(u, v).unwrap();
    }
    for v in h2.vertices() {
        union.add_vertex(v);
    }
    assert_eq!(union.edge_set(), society.graph.edge_set());
    assert_eq!(union.vertex_set(), society.graph.vertex_set());
    assert_eq!(society.omega, vec![1, 2, 3, 4, 5, 6]);
}

#[test]
fn container_and_exposure_on_a_cylinder() {
    let (g, rho, cm) = cylinder(8, 3);
    // Two transaction paths crossing the annulus on the left and right via the vortex hub are
    // not grounded; radial paths along rails 1 and 2 end on the inner cycle instead.
    let outer = cm.cycles.last().unwrap();
    let p1: Vec<u32> = vec![outer[1], cm.cycles[1][1], cm.cycles[1][2], outer[2]];
    let p2: Vec<u32> = vec![outer[5], cm.cycles[1][5], cm.cycles[1][6], outer[6]];
    let cont = container(&rho, &p1, &p2).unwrap();
    let vortex = rho.vortices().next().unwrap();
    assert!(cont.contains(&vortex));
    assert!(!is_rho_flat(&rho, &[p1.clone(), p2.clone()]).unwrap());
    let q1: Vec<u32> = vec![outer[1], cm.cycles[1][1], cm.cycles[1][2], outer[2]];
    let q2: Vec<u32> = vec![outer[3], outer[4]];
    let _ = q2;
    let q3: Vec<u32> = vec![outer[0], cm.cycles[1][0], cm.cycles[1][7], cm.cycles[1][6], cm.cycles[1][5], cm.cycles[1][4], cm.cycles[1][3], outer[3]];
    assert!(is_rho_flat(&rho, &[q1.clone(), q3.clone()]).is_ok());
    assert!(!is_exposed(&g, &rho, &cm.cycles[0], &[p1.clone()]).unwrap());
    let through: Vec<u32> = vec![outer[0], cm.cycles[1][0], cm.cycles[0][0], cm.cycles[0][1], cm.cycles[1][1], outer[1]];
    let _ = through;
    let (a, b) = residual_vortices(&rho, &cm.cycles[1], &p1, &p2).unwrap();
    assert!(a.is_disjoint(&b));
    assert!(!a.contains(&vortex) && !b.contains(&vortex));
}

#[test]
fn paths_through_a_flat_centre_are_exposed() {
    let cm = make_cylindrical_mesh(8, 3).unwrap();
    let mut g = cm.graph();
    let hub = 25;
    for &v in &cm.cycles[0] {
        g.add_edge(v, hub).unwrap();
    }
    let mut d = annulus_drawing(&cm.cycles, g.edges(), None);
    d.place(hub, 0.0, 0.0);
    let rho = d.build();
    assert!(validate_rendition(&g, &rho).is_valid());
    let c = &cm.cycles;
    let across = vec![c[2][0], c[1][0], c[0][0], hub, c[0][4], c[1][4], c[2][4]];
    assert!(is_exposed(&g, &rho, &c[0], &[across.clone()]).unwrap());
    let left = vec![c[2][2], c[1][2], c[1][3], c[2][3]];
    let right = vec![c[2][6], c[1][6], c[1][7], c[2][7]];
    assert!(!is_exposed(&g, &rho, &c[0], &[left.clone()]).unwrap());
    let cont = container(&rho, &left, &right).unwrap();
    let hub_cell = rho.edge_cells()[&edge(c[0][0], hub)];
    assert!(cont.contains(&hub_cell));
    assert!(is_rho_flat(&rho, &[left.clone(), right.clone()]).unwrap());
    let (a, b) = residual_vortices(&rho, &c[1], &left, &right).unwrap();
    let inner = cycle_disk(&rho, &c[1]).unwrap();
    let all: std::collections::BTreeSet<usize> = a.union(&b).chain(cont.intersection(&inner.cells)).copied().collect();
    assert_eq!(all, inner.cells);
    assert!(a.is_empty() && b.is_empty());
}
