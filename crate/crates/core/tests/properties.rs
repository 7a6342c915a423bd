use std::collections::BTreeSet;

use panel_lattices::cog::{local_development, scwol_homology, scwol_iso, upper_link};
use panel_lattices::geometry::{scwol_of_incidence, verify_generalized_ngon};
use panel_lattices::hjelmslev::{substructure_closure, HLine, HPoint, HjelmslevPlane};
use panel_lattices::homology::{a2_kernel_check, difference_matrix};
use panel_lattices::singer::{canonical_base_flag, slanted_quadrangle, LineLabel};
use panel_lattices::*;
use proptest::prelude::*;
use proptest::sample::subsequence;

fn singer_set(q: u64) -> OrderedDifferenceSet {
    let plane = classical_plane(q).unwrap();
    let (p, l) = canonical_base_flag(&plane);
    extract_difference_set(&plane, p, l).unwrap()
}

/// A random ordering of the sorted set, translated so that `δ(0) = 0`.
fn ordering(q: u64) -> impl Strategy<Value = OrderedDifferenceSet> {
    let d = singer_set(q);
    let k = d.len();
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |p| d.reordered(&p).unwrap().normalized())
}

fn three_orderings() -> impl Strategy<Value = (u64, [OrderedDifferenceSet; 3])> {
    prop_oneof![Just(2u64), Just(3), Just(4)]
        .prop_flat_map(|q| (Just(q), [ordering(q), ordering(q), ordering(q)]))
}

fn bijection(q: u64) -> impl Strategy<Value = Vec<LineLabel>> {
    Just(LineLabel::all(q as u32)).prop_shuffle()
}

fn extracted(c: &ComplexOfGroups) -> Presentation {
    fundamental_group_presentation(c, c.canonical_tree().unwrap()).unwrap()
}

fn plane_for(q: u64) -> HjelmslevPlane {
    HjelmslevPlane::from_difference_set(q, &singer_set(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn a2_extraction_matches_builder((q, [a, b, c]) in three_orderings()) {
        let complex = build_a2_complex(q, &a, &b, &c).unwrap();
        let built = a2_cyclic_lattice(q, &a, &b, &c).unwrap();
        prop_assert!(extracted(&complex).equivalent_form(built.presentation()));
    }

    #[test]
    fn a2_h1_is_kernel_of_difference_matrix((q, [a, b, c]) in three_orderings()) {
        let l = a2_cyclic_lattice(q, &a, &b, &c).unwrap();
        let r = a2_kernel_check(&l);
        prop_assert!(r.passed(), "{}", r);
        let n = q * q + q + 1;
        let h1 = h1_of_presentation(l.presentation());
        prop_assert_eq!(h1.free_rank, 0);
        prop_assert!(h1.torsion_u64().iter().all(|&d| n % d == 0));
    }

    #[test]
    fn a2_relation_matrix_shape((q, [a, b, c]) in three_orderings()) {
        let l = a2_cyclic_lattice(q, &a, &b, &c).unwrap();
        let p = l.presentation();
        prop_assert_eq!(p.generators().len(), 3);
        prop_assert_eq!(p.relators().len() as u64, 3 + q);
        let d = difference_matrix(&l).unwrap();
        prop_assert_eq!((d.rows(), d.cols()), (q as usize, 3));
    }

    #[test]
    fn c2_extraction_matches_builder(
        (q, l, l2) in prop_oneof![Just(3u64), Just(4)]
            .prop_flat_map(|q| (Just(q), bijection(q), bijection(q)))
    ) {
        let bundle = slanted_quadrangle(q).unwrap();
        let two = build_c2_two_panel_complex(q, &bundle, &bundle, &l, &l2).unwrap();
        prop_assert!(extracted(&two).equivalent_form(c2_two_panel_lattice(q, &l, &l2).unwrap().presentation()));
        let one = build_c2_one_panel_complex(q, &bundle, &bundle, &l, &l2).unwrap();
        prop_assert!(extracted(&one).equivalent_form(c2_one_panel_lattice(q, &l, &l2).unwrap().presentation()));
    }

    #[test]
    fn relator_letters_are_declared((q, [a, b, c]) in three_orderings()) {
        let l = a2_cyclic_lattice(q, &a, &b, &c).unwrap();
        let p = l.presentation();
        let n = p.generators().len();
        prop_assert!(p.relators().iter().all(|r| r.letters().iter().all(|x| x.gen < n)));
        let t = building_graph_template(&l);
        let classes: BTreeSet<&str> = t.classes.iter().map(|c| c.name.as_str()).collect();
        prop_assert!(t.edges.iter().all(|e| e.from < t.classes.len() && e.to < t.classes.len()));
        prop_assert_eq!(classes.len(), t.classes.len());
    }

    #[test]
    fn adjacency_depends_on_k1_minus_j1(q in 2u64..=3, c in 0u64..400, pi in 0usize..400, li in 0usize..400) {
        let h = plane_for(q);
        let n = h.modulus();
        let c = c % n;
        let p = h.points()[pi % h.points().len()];
        let l = h.lines()[li % h.lines().len()];
        let p2 = HPoint { j1: (p.j1 + c) % n, ..p };
        let l2 = HLine { k1: (l.k1 + c) % n, ..l };
        prop_assert_eq!(h.adjacency(p, l), h.adjacency(p2, l2));
        let table = |p, l| h.is_adjacent(h.point_index(p).unwrap(), h.line_index(l).unwrap());
        prop_assert_eq!(table(p, l), table(p2, l2));
    }

    #[test]
    fn closure_is_idempotent_and_monotone(
        q in 2u64..=3,
        picks in subsequence((0usize..52).collect::<Vec<_>>(), 1..5),
        extra in 0usize..52,
    ) {
        let h = plane_for(q);
        let pts = h.points();
        let seeds: Vec<HPoint> = picks.iter().map(|&i| pts[i % pts.len()]).collect();
        let (ps, ls) = substructure_closure(&h, &seeds);
        let closed: Vec<HPoint> = ps.iter().copied().collect();
        prop_assert_eq!(substructure_closure(&h, &closed), (ps.clone(), ls.clone()));
        let mut more = seeds.clone();
        more.push(pts[extra % pts.len()]);
        let (ps2, ls2) = substructure_closure(&h, &more);
        prop_assert!(ps.is_subset(&ps2) && ls.is_subset(&ls2));
    }

    #[test]
    fn random_incidence_flag_counts(
        lines in proptest::collection::vec(subsequence((0usize..8).collect::<Vec<_>>(), 1..5), 1..8)
    ) {
        let i = IncidenceStructure::from_lines(8, &lines).unwrap();
        let check = verify_generalized_ngon(&i, 3);
        if let Some(g) = check.metrics.as_ref().and_then(|m| m.girth) {
            prop_assert_eq!(g % 2, 0);
        }
        if let (true, Some((s, t))) = (check.passed(), check.order) {
            prop_assert_eq!(i.flags().len(), i.num_points() * (t + 1));
            prop_assert_eq!(i.flags().len(), i.num_lines() * (s + 1));
        }
    }
}

#[test]
fn primitive_elements_generate_the_multiplicative_group() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25] {
        let f = make_field(q).unwrap();
        let g = f.primitive_element();
        let powers: BTreeSet<u32> = (0..q - 1).map(|k| f.pow(g, k).code()).collect();
        assert_eq!(powers.len() as u64, q - 1, "q={q}");
        assert!(!powers.contains(&0));
    }
}

#[test]
fn singer_cycles_are_regular() {
    for q in 2..=5u64 {
        let plane = classical_plane(q).unwrap();
        let n = plane.modulus() as usize;
        let on_points = plane.cycle_on_points();
        let on_lines = plane.cycle_on_lines();
        for (perm, size) in [(&on_points[..], plane.structure().num_points()), (on_lines, plane.structure().num_lines())] {
            let mut orbit = BTreeSet::new();
            let mut x = 0;
            for _ in 0..n {
                orbit.insert(x);
                x = perm[x];
            }
            assert_eq!(x, 0, "q={q}: cycle has order n");
            assert_eq!(orbit.len(), size, "q={q}: regular");
        }
    }
}

#[test]
fn slanted_quadrangle_degrees() {
    for q in 3..=5u64 {
        let b = slanted_quadrangle(q).unwrap();
        let s = b.slanted();
        assert!((0..s.num_points()).all(|p| s.lines_through(p).len() == q as usize + 2));
        assert!((0..s.num_lines()).all(|l| s.points_on(l).len() == q as usize));
    }
}

#[test]
fn upper_link_sizes_match_coset_counts() {
    let d = OrderedDifferenceSet::parse_planar("0,1,3,9").unwrap();
    let a2 = build_a2_complex(3, &d, &d, &d).unwrap();
    let b = slanted_quadrangle(3).unwrap();
    let id = LineLabel::all(3);
    let one = build_c2_one_panel_complex(3, &b, &b, &id, &id).unwrap();
    let two = build_c2_two_panel_complex(3, &b, &b, &id, &id).unwrap();
    for c in [a2, one, two] {
        let s = c.scwol();
        for v in 0..s.num_vertices() {
            if s.edges_into(v).is_empty() {
                continue;
            }
            let Ok(link) = upper_link(&c, v) else { continue };
            let expected: usize = s
                .edges_into(v)
                .iter()
                .map(|&a| c.group(v).order() / c.psi_image(a).len())
                .sum();
            assert_eq!(link.num_vertices(), expected, "{}", s.vertex_name(v));
        }
    }
}

#[test]
fn local_development_at_a2_vertex_is_a_cone() {
    for (q, text) in [(2, "0,1,3"), (3, "0,1,3,9")] {
        let d = OrderedDifferenceSet::parse_planar(text).unwrap();
        let c = build_a2_complex(q, &d, &d, &d).unwrap();
        let v = c.vertex("v1").unwrap();
        let dev = local_development(&c, v).unwrap();
        let cone = scwol_of_incidence(classical_plane(q).unwrap().structure()).cone("v1");
        assert!(scwol_iso(&dev, &cone).is_some(), "q={q}");
    }
}

#[test]
fn quotient_homology() {
    let ranks = |s: &Scwol| scwol_homology(s).iter().map(|g| g.free_rank).collect::<Vec<_>>();
    for (q, text) in [(2u64, "0,1,3"), (3, "0,1,3,9")] {
        let d = OrderedDifferenceSet::parse_planar(text).unwrap();
        let c = build_a2_complex(q, &d, &d, &d).unwrap();
        assert_eq!(ranks(c.scwol()), vec![1, 0, q as usize]);
    }
    let b = slanted_quadrangle(3).unwrap();
    let id = LineLabel::all(3);
    let one = build_c2_one_panel_complex(3, &b, &b, &id, &id).unwrap();
    let two = build_c2_two_panel_complex(3, &b, &b, &id, &id).unwrap();
    for c in [one, two] {
        let h = scwol_homology(c.scwol());
        assert_eq!(h[0], AbelianGroupDescription::free(1));
        assert!(h[1..].iter().all(AbelianGroupDescription::is_trivial));
    }
}

#[test]
fn perfect_lattice_at_q5() {
    let sorted = OrderedDifferenceSet::parse_planar("0,1,3,8,12,18").unwrap();
    let d1 = sorted.clone();
    let d2 = OrderedDifferenceSet::new(31, vec![0, 1, 3, 8, 18, 12]).unwrap();
    let d3 = OrderedDifferenceSet::new(31, vec![0, 1, 3, 12, 8, 18]).unwrap();
    let l = a2_cyclic_lattice(5, &d1, &d2, &d3).unwrap();
    assert!(is_perfect(l.presentation()));
    assert!(!is_perfect(a2_cyclic_lattice(5, &sorted, &sorted, &sorted).unwrap().presentation()));
}
