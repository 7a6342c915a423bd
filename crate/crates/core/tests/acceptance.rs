//! Acceptance criteria. Each prints a single `PASS`/`FAIL` line with its
//! runtime and bound; the process fails if any criterion does.

use std::time::{Duration, Instant};

use panel_lattices::cog::{scwol_iso, upper_link};
use panel_lattices::geometry::{complete_bipartite, scwol_of_incidence, verify_generalized_ngon};
use panel_lattices::hjelmslev::{
    choose_m, cmsz_tally, iota_report, qp_discrimination, substructure_closure,
    substructure_closure_with, HLine, HPoint, HjelmslevPlane, Schedule,
};
use panel_lattices::homology::{a2_kernel_check, c2_h1_check, smith_normal_form};
use panel_lattices::singer::{
    canonical_base_flag, equivalent_under_affine, slanted_quadrangle, LineLabel,
};
use panel_lattices::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        if !ok {
            self.failures.push(name.into());
        }
    }
}

fn criterion(id: u32, title: &str, bound: Duration, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome { failures: Vec::new() };
    body(&mut out);
    let took = start.elapsed();
    if took > bound {
        out.failures.push(format!("runtime {took:.2?} exceeds {bound:?}"));
    }
    let status = if out.failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {id} [{status}] {title} ({took:.2?}, bound {bound:?})");
    for f in &out.failures {
        println!("    failed: {f}");
    }
    out.failures.is_empty()
}

fn ds(text: &str) -> OrderedDifferenceSet {
    OrderedDifferenceSet::parse_planar(text).unwrap()
}

fn singer_set(q: u64) -> OrderedDifferenceSet {
    let plane = classical_plane(q).unwrap();
    let (p, l) = canonical_base_flag(&plane);
    extract_difference_set(&plane, p, l).unwrap()
}

/// Orderings keeping `0` in front: identity, reversed tail, rotated tail.
fn orderings(d: &OrderedDifferenceSet) -> Vec<OrderedDifferenceSet> {
    let k = d.len();
    let rev: Vec<usize> = std::iter::once(0).chain((1..k).rev()).collect();
    let rot: Vec<usize> = std::iter::once(0).chain((2..k).chain([1])).collect();
    [(0..k).collect::<Vec<_>>(), rev, rot]
        .iter()
        .map(|p| d.reordered(p).unwrap())
        .collect()
}

fn label_bijections(q: u64) -> Vec<Vec<LineLabel>> {
    let id = LineLabel::all(q as u32);
    let mut rev = id.clone();
    rev.reverse();
    let mut rot = id.clone();
    rot.rotate_left(1);
    vec![id, rev, rot]
}

fn criterion_1_difference_sets() -> bool {
    criterion(1, "difference sets from Singer cycles", Duration::from_secs(1), |out| {
        for q in 2..=5 {
            let d = singer_set(q);
            out.check(format!("q={q} planar"), verify_planar_difference_set(&d).passed());
        }
        out.check("q=2 ~ {0,1,3}", equivalent_under_affine(&singer_set(2), &ds("0,1,3")));
        out.check("q=3 ~ {0,1,3,9}", equivalent_under_affine(&singer_set(3), &ds("0,1,3,9")));
    })
}

fn criterion_2_plane_axioms() -> bool {
    criterion(2, "classical planes and Singer cycles", Duration::from_secs(5), |out| {
        for q in 2..=5u64 {
            let plane = classical_plane(q).unwrap();
            let r = plane.verify();
            out.check(format!("q={q} report: {:?}", r.failures().collect::<Vec<_>>()), r.passed());
            let c = verify_generalized_ngon(plane.structure(), 3);
            let m = c.metrics.as_ref();
            out.check(format!("q={q} diameter 3"), m.is_some_and(|m| m.diameter == 3));
            out.check(format!("q={q} girth 6"), m.is_some_and(|m| m.girth == Some(6)));
            out.check(format!("q={q} order"), c.order == Some((q as usize, q as usize)));
        }
    })
}

fn criterion_3_quadrangles() -> bool {
    criterion(3, "slanted symplectic quadrangles", Duration::from_secs(30), |out| {
        for q in 3..=5u64 {
            let b = slanted_quadrangle(q).unwrap();
            let r = b.verify();
            out.check(format!("q={q} report: {:?}", r.failures().collect::<Vec<_>>()), r.passed());
            let c = verify_generalized_ngon(b.slanted(), 4);
            out.check(format!("q={q} 4-gon"), c.passed());
            out.check(
                format!("q={q} order (q-1, q+1)"),
                c.order == Some((q as usize - 1, q as usize + 1)),
            );
            let elements: Vec<usize> = (0..b.group_order()).collect();
            let regular = (0..b.slanted().num_points())
                .all(|p| {
                    let orbit: std::collections::BTreeSet<usize> =
                        elements.iter().map(|&g| b.act_on_point(g, p)).collect();
                    orbit.len() == b.group_order()
                })
                && b.group_order() == b.slanted().num_points();
            out.check(format!("q={q} regular on points"), regular);
            for label in b.labels() {
                let line = b.representative(label).unwrap();
                let brute = b.brute_force_stabilizer(line);
                out.check(
                    format!("q={q} {label} stabiliser"),
                    b.line_stabilizer(line).ok() == Some(brute.clone()),
                );
                if q % 2 == 1 {
                    out.check(
                        format!("q={q} {label} formula"),
                        b.prime_formula_stabilizer(label) == Some(brute),
                    );
                }
            }
        }
    })
}

fn extracted(c: &ComplexOfGroups) -> Presentation {
    fundamental_group_presentation(c, c.canonical_tree().unwrap()).unwrap()
}

fn criterion_4_presentation_crosscheck() -> bool {
    criterion(4, "extraction equals direct builders", Duration::from_secs(10), |out| {
        for (q, text) in [(2, "0,1,3"), (3, "0,1,3,9")] {
            let sets = orderings(&ds(text));
            for (a, b, c) in [(0, 0, 0), (1, 0, 0), (0, 2, 1), (2, 1, 2)] {
                let (a, b, c) = (&sets[a], &sets[b], &sets[c]);
                let complex = build_a2_complex(q, a, b, c).unwrap();
                let built = a2_cyclic_lattice(q, a, b, c).unwrap();
                out.check(
                    format!("A2 q={q} {a} {b} {c}"),
                    extracted(&complex).equivalent_form(built.presentation()),
                );
            }
        }
        for q in [3u64, 4] {
            let bundle = slanted_quadrangle(q).unwrap();
            let bij = label_bijections(q);
            for (l, l2) in [(0, 0), (0, 1), (2, 1)] {
                let (l, l2) = (&bij[l], &bij[l2]);
                let two = build_c2_two_panel_complex(q, &bundle, &bundle, l, l2).unwrap();
                let built = c2_two_panel_lattice(q, l, l2).unwrap();
                out.check(
                    format!("two-panel q={q}"),
                    extracted(&two).equivalent_form(built.presentation()),
                );
                let one = build_c2_one_panel_complex(q, &bundle, &bundle, l, l2).unwrap();
                let built = c2_one_panel_lattice(q, l, l2).unwrap();
                out.check(
                    format!("one-panel q={q}"),
                    extracted(&one).equivalent_form(built.presentation()),
                );
            }
        }
    })
}

fn criterion_5_local_developments() -> bool {
    criterion(5, "upper links are polygon scwols", Duration::from_secs(60), |out| {
        for (q, text) in [(2, "0,1,3"), (3, "0,1,3,9")] {
            let d = ds(text);
            let c = build_a2_complex(q, &d, &d, &d).unwrap();
            let v1 = c.vertex("v1").unwrap();
            let link = upper_link(&c, v1).unwrap();
            let target = scwol_of_incidence(classical_plane(q).unwrap().structure());
            out.check(format!("A2 q={q} v1"), scwol_iso(&link, &target).is_some());
        }
        let q = 3;
        let b = slanted_quadrangle(q).unwrap();
        let id = LineLabel::all(q as u32);
        let c = build_c2_one_panel_complex(q, &b, &b, &id, &id).unwrap();
        let target = scwol_of_incidence(&complete_bipartite(q as usize));
        for j in 0..q as usize + 2 {
            let v = c.vertex(&format!("v{j}")).unwrap();
            let link = upper_link(&c, v).unwrap();
            out.check(format!("one-panel v{j}"), scwol_iso(&link, &target).is_some());
        }
    })
}

fn criterion_6_hjelmslev() -> bool {
    criterion(6, "level-2 Hjelmslev planes", Duration::from_secs(120), |out| {
        for q in [2u64, 3, 4] {
            let d = singer_set(q);
            let h = HjelmslevPlane::from_difference_set(q, &d).unwrap();
            let size = (q * q * (q * q + q + 1)) as usize;
            out.check(format!("q={q} |P2|"), h.points().len() == size && h.lines().len() == size);
            let t = cmsz_tally(&h);
            let one = std::collections::BTreeSet::from([1]);
            let qs = std::collections::BTreeSet::from([q as usize]);
            out.check(
                format!("q={q} cmsz {:?} {:?} {:?} {:?}", t.points_distinct, t.points_same, t.lines_distinct, t.lines_same),
                t.points_distinct == one && t.points_same == qs && t.lines_distinct == one && t.lines_same == qs,
            );
            let m = choose_m(h.difference_set(), h.modulus()).unwrap();
            out.check(format!("q={q} iota"), iota_report(&h, m).unwrap().passed());
            let disc = qp_discrimination(&h).unwrap();
            out.check(
                format!("q={q} closure {} points, want {}", disc.closure_points, q * q + q + 1),
                disc.closure_points == (q * q + q + 1) as usize,
            );
            out.check(format!("q={q} discrimination: {}", disc.report), disc.report.passed());
        }
    })
}

fn criterion_7_homology() -> bool {
    criterion(7, "first homology and rational Betti numbers", Duration::from_secs(30), |out| {
        let h1 = |p: &LatticeSpec| h1_of_presentation(p.presentation());
        let d2 = ds("0,1,3");
        let gamma2 = a2_cyclic_lattice(2, &d2, &d2, &d2).unwrap();
        out.check("H1(Gamma2)", h1(&gamma2) == AbelianGroupDescription::homocyclic(7, 2));
        let d2r = d2.reordered(&[0, 2, 1]).unwrap();
        let gamma2r = a2_cyclic_lattice(2, &d2r, &d2, &d2).unwrap();
        out.check("H1(Gamma2')", h1(&gamma2r) == AbelianGroupDescription::homocyclic(7, 1));
        let d3 = ds("0,1,3,9");
        let gamma3 = a2_cyclic_lattice(3, &d3, &d3, &d3).unwrap();
        out.check("H1(Gamma3)", h1(&gamma3) == AbelianGroupDescription::homocyclic(13, 2));

        for q in [2u64, 3, 4] {
            let sets = orderings(&singer_set(q));
            for (a, b, c) in [(0, 0, 0), (1, 0, 2), (2, 1, 0), (1, 2, 1)] {
                let l = a2_cyclic_lattice(q, &sets[a], &sets[b], &sets[c]).unwrap();
                let r = a2_kernel_check(&l);
                out.check(format!("q={q} ({a},{b},{c}) H1 = ker D: {r}"), r.passed());
            }
        }

        for q in [3u64, 5] {
            let id = LineLabel::all(q as u32);
            let l = c2_one_panel_lattice(q, &id, &id).unwrap();
            let r = c2_h1_check(q, &l);
            out.check(
                format!("one-panel q={q}: {}", r.get("h1").map_or("", |c| c.detail.as_str())),
                r.passed(),
            );
        }

        for (q, text) in [(2, "0,1,3"), (3, "0,1,3,9")] {
            let d = ds(text);
            let c = build_a2_complex(q, &d, &d, &d).unwrap();
            let b = rational_betti_from_quotient(c.scwol());
            out.check(format!("A2 q={q} Betti {b:?}"), b == [1, 0, q as usize]);
        }
        for q in [3u64, 4] {
            let bundle = slanted_quadrangle(q).unwrap();
            let id = LineLabel::all(q as u32);
            let one = build_c2_one_panel_complex(q, &bundle, &bundle, &id, &id).unwrap();
            let two = build_c2_two_panel_complex(q, &bundle, &bundle, &id, &id).unwrap();
            for (name, c) in [("one-panel", one), ("two-panel", two)] {
                let b = rational_betti_from_quotient(c.scwol());
                out.check(format!("{name} q={q} Betti {b:?}"), b == [1, 0, 0]);
            }
        }
    })
}

/// Determinant by cofactor expansion along the first row.
fn det(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

/// Invariant factors as ratios of successive gcds of `k x k` minors.
fn minors_oracle(a: &[Vec<i64>]) -> Vec<i64> {
    let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
    let mut g_prev = 1;
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = 0;
        for rows in combinations(r, k) {
            for cols in combinations(c, k) {
                let m: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
                g = gcd(g, det(&m));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / g_prev);
        g_prev = g;
    }
    out
}

fn snf_diagonal(a: &[Vec<i64>]) -> Vec<i64> {
    let m = IntegerMatrix::from_rows_with_cols(a, a.first().map_or(0, Vec::len));
    smith_normal_form(&m)
        .diagonal
        .iter()
        .map(|d| i64::try_from(d).unwrap())
        .collect()
}

fn criterion_8_property_suites() -> bool {
    criterion(8, "Smith form, closure and translation properties", Duration::from_secs(120), |out| {
        // Every 3x3 matrix over {-1, 0, 1}.
        let mut grid_ok = true;
        for code in 0..3usize.pow(9) {
            let mut c = code;
            let a: Vec<Vec<i64>> = (0..3)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let v = (c % 3) as i64 - 1;
                            c /= 3;
                            v
                        })
                        .collect()
                })
                .collect();
            grid_ok &= snf_diagonal(&a) == minors_oracle(&a);
        }
        out.check("3x3 grid", grid_ok);

        let config = Config {
            cases: 2000,
            failure_persistence: None,
            ..Config::default()
        };
        let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[7; 32]);
        let mut runner = TestRunner::new_with_rng(config, rng);
        let strategy = (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r)
        });
        let random = runner.run(&strategy, |a| {
            prop_assert_eq!(snf_diagonal(&a), minors_oracle(&a));
            Ok(())
        });
        out.check(format!("random up to 5x5: {random:?}"), random.is_ok());

        for (q, text) in [(2u64, "0,1,3"), (3, "0,1,3,9")] {
            let h = HjelmslevPlane::from_difference_set(q, &ds(text)).unwrap();
            let n = h.modulus();
            let mut invariant = true;
            for shift in 0..n {
                for &p in h.points() {
                    for &l in h.lines() {
                        let p2 = HPoint { j1: (p.j1 + shift) % n, ..p };
                        let l2 = HLine { k1: (l.k1 + shift) % n, ..l };
                        invariant &= h.adjacency(p, l) == h.adjacency(p2, l2);
                    }
                }
            }
            out.check(format!("q={q} translation invariance"), invariant);

            let pts = h.points();
            let mut stable = true;
            for seeds in [vec![pts[0], pts[5]], vec![pts[1], pts[9], pts[14]], vec![pts[2], pts[pts.len() / 2], pts[pts.len() - 1]]] {
                let (ps, ls) = substructure_closure(&h, &seeds);
                let pv: Vec<HPoint> = ps.iter().copied().collect();
                let lv: Vec<HLine> = ls.iter().copied().collect();
                let again = substructure_closure_with(&h, &pv, &lv, Schedule::Batched);
                let eager = substructure_closure_with(&h, &seeds, &[], Schedule::Eager);
                let smaller = substructure_closure(&h, &seeds[..seeds.len() - 1]);
                stable &= again == (ps.clone(), ls.clone())
                    && eager == (ps.clone(), ls.clone())
                    && smaller.0.is_subset(&ps)
                    && smaller.1.is_subset(&ls);
            }
            out.check(format!("q={q} closure idempotent and monotone"), stable);
        }
    })
}

fn main() {
    let results = [
        criterion_1_difference_sets(),
        criterion_2_plane_axioms(),
        criterion_3_quadrangles(),
        criterion_4_presentation_crosscheck(),
        criterion_5_local_developments(),
        criterion_6_hjelmslev(),
        criterion_7_homology(),
        criterion_8_property_suites(),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed} of {} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
