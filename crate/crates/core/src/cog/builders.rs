use std::collections::{BTreeSet, HashMap};

use super::complex::ComplexOfGroups;
use super::scwol::ScwolBuilder;
use super::CogError;
use crate::group::FiniteGroup;
use crate::presentation::Word;
use crate::singer::{LineLabel, OrderedDifferenceSet, SymplecticQuadrangleBundle};

/// Which of the built complexes a [`ComplexOfGroups`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComplexKind {
    A2,
    C2TwoPanel,
    C2OnePanel,
}

/// Collects vertices, edges, compositions, groups, morphisms and twists by
/// name before handing them to [`ComplexOfGroups::new`].
#[derive(Default)]
struct Draft {
    scwol: ScwolBuilder,
    vertices: HashMap<String, usize>,
    edges: HashMap<String, usize>,
    groups: Vec<FiniteGroup>,
    morphisms: Vec<Vec<Word>>,
    twists: HashMap<(usize, usize), Word>,
}

impl Draft {
    fn vertex(&mut self, name: &str, group: FiniteGroup) {
        let id = self.scwol.vertex(name);
        self.vertices.insert(name.to_string(), id);
        self.groups.push(group);
    }

    fn trivial(&mut self, name: &str) {
        self.vertex(name, FiniteGroup::trivial(name));
    }

    /// Edge `target <- source` with `psi` given by generator images.
    fn edge(&mut self, target: &str, source: &str, images: Vec<Word>) {
        let name = format!("{target}<-{source}");
        let id = self
            .scwol
            .edge(name.clone(), self.vertices[source], self.vertices[target]);
        self.edges.insert(name, id);
        self.morphisms.push(images);
    }

    fn plain_edge(&mut self, target: &str, source: &str) {
        self.edge(target, source, Vec::new());
    }

    /// Declares `(top <- mid) o (mid <- bottom) = top <- bottom`.
    fn compose(&mut self, top: &str, mid: &str, bottom: &str, twist: Option<Word>) {
        let a = self.edges[&format!("{top}<-{mid}")];
        let b = self.edges[&format!("{mid}<-{bottom}")];
        let ab = self.edges[&format!("{top}<-{bottom}")];
        self.scwol.compose(a, b, ab);
        if let Some(w) = twist {
            self.twists.insert((a, b), w);
        }
    }

    fn finish(self, tree: &[String], principal: &[&str]) -> Result<ComplexOfGroups, CogError> {
        let tree_ids: Vec<usize> = tree.iter().map(|n| self.edges[n]).collect();
        let principal_ids = principal.iter().map(|n| self.vertices[*n]).collect();
        let scwol = self.scwol.build()?;
        ComplexOfGroups::new(scwol, self.groups, self.morphisms, self.twists)?
            .with_principal(principal_ids)
            .with_tree(tree_ids)
    }
}

/// The A2 complex on three cyclic Singer groups `Z/n` generated by `s1, s2,
/// s3`.
///
/// Vertices `v1, v2, v3, e1, e2, e3, f0, ..., fq`; edges `va<-eb` for
/// `a != b`, then per `j` the edges `va<-fj` and `eb<-fj`. The twist on
/// `(va<-eb, eb<-fj)` is `s_a^(-d_a(j))` when `b - a = 2 mod 3` and trivial
/// otherwise. The attached tree is `v1<-e2, v1<-e3, v2<-e3, v2<-e1, v3<-e1`
/// and all `e3<-fj`.
pub fn build_a2_complex(
    q: u64,
    ds1: &OrderedDifferenceSet,
    ds2: &OrderedDifferenceSet,
    ds3: &OrderedDifferenceSet,
) -> Result<ComplexOfGroups, CogError> {
    let n = q * q + q + 1;
    let sets = [ds1, ds2, ds3];
    if sets.iter().any(|d| d.modulus() != n || d.len() as u64 != q + 1) {
        return Err(CogError::ModulusMismatch {
            expected: n,
            found: sets.iter().map(|d| d.modulus()).collect(),
        });
    }
    let mut d = Draft::default();
    for a in 1..=3 {
        d.vertex(
            &format!("v{a}"),
            FiniteGroup::cyclic(format!("S{a}"), format!("s{a}"), n as usize),
        );
    }
    for b in 1..=3 {
        d.trivial(&format!("e{b}"));
    }
    for j in 0..=q {
        d.trivial(&format!("f{j}"));
    }
    for a in 1..=3 {
        for b in 1..=3 {
            if a != b {
                d.plain_edge(&format!("v{a}"), &format!("e{b}"));
            }
        }
    }
    for j in 0..=q {
        let f = format!("f{j}");
        for a in 1..=3 {
            d.plain_edge(&format!("v{a}"), &f);
        }
        for b in 1..=3 {
            d.plain_edge(&format!("e{b}"), &f);
        }
    }
    for j in 0..=q as usize {
        let f = format!("f{j}");
        for a in 1..=3usize {
            for b in 1..=3usize {
                if a == b {
                    continue;
                }
                let twist = ((b + 3 - a) % 3 == 2)
                    .then(|| Word::power_of(0, -(sets[a - 1].entries()[j] as i64)))
                    .filter(|w| !w.is_empty());
                d.compose(&format!("v{a}"), &format!("e{b}"), &f, twist);
            }
        }
    }
    let mut tree: Vec<String> = ["v1<-e2", "v1<-e3", "v2<-e3", "v2<-e1", "v3<-e1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    tree.extend((0..=q).map(|j| format!("e3<-f{j}")));
    d.finish(&tree, &["v1", "v2", "v3"])
}

fn check_bundles(
    q: u64,
    bundle: &SymplecticQuadrangleBundle,
    bundle2: &SymplecticQuadrangleBundle,
    lambda: &[LineLabel],
    lambda2: &[LineLabel],
) -> Result<(), CogError> {
    if bundle.order() != q || bundle2.order() != q {
        return Err(CogError::OrderMismatch(bundle.order(), bundle2.order()));
    }
    for (name, l, b) in [("lambda", lambda, bundle), ("lambda'", lambda2, bundle2)] {
        let labels: BTreeSet<LineLabel> = b.labels().into_iter().collect();
        let given: BTreeSet<LineLabel> = l.iter().copied().collect();
        if l.len() != labels.len() || given != labels {
            return Err(CogError::BadBijection(format!(
                "{name} has {} entries, {} distinct, over {} labels",
                l.len(),
                given.len(),
                labels.len()
            )));
        }
    }
    Ok(())
}

/// An abstract copy of `(F_q, +)`: `<name | name^q>` for prime `q`, and
/// `(Z/2)^e` on `name.0, ...` for `q = 2^e`.
fn abstract_stabilizer(q: u64, name: &str) -> FiniteGroup {
    if q.is_multiple_of(2) {
        let e = q.trailing_zeros() as usize;
        FiniteGroup::elementary_abelian_2(name, (0..e).map(|i| format!("{name}.{i}")).collect())
    } else {
        FiniteGroup::cyclic(name, name, q as usize)
    }
}

/// The complex whose fundamental group acts regularly on two types of
/// panels.
///
/// Vertices `v, v', w, e, e', e0.., f0..` with `G_v = S`, `G_v' = S'`,
/// `G_w = <c | c^(q+2)>` and `G_ej` an abstract copy of the stabiliser,
/// embedded in `S` and `S'` at the lines `lambda(j)` and `lambda'(j)`. The
/// only twists are `c^j` on `(w<-e, e<-fj)`. The attached tree is `w<-e,
/// w<-e', v<-e, v'<-e'` with all `w<-fj` and `ej<-fj`.
pub fn build_c2_two_panel_complex(
    q: u64,
    bundle: &SymplecticQuadrangleBundle,
    bundle2: &SymplecticQuadrangleBundle,
    lambda: &[LineLabel],
    lambda2: &[LineLabel],
) -> Result<ComplexOfGroups, CogError> {
    check_bundles(q, bundle, bundle2, lambda, lambda2)?;
    let mut d = Draft::default();
    d.vertex("v", bundle.singer_group("")?);
    d.vertex("v'", bundle2.singer_group("'")?);
    d.vertex("w", FiniteGroup::cyclic("C", "c", q as usize + 2));
    d.trivial("e");
    d.trivial("e'");
    let jn = q as usize + 2;
    for j in 0..jn {
        d.vertex(&format!("e{j}"), abstract_stabilizer(q, &format!("u{j}")));
    }
    for j in 0..jn {
        d.trivial(&format!("f{j}"));
    }
    d.plain_edge("w", "e");
    d.plain_edge("w", "e'");
    d.plain_edge("v", "e");
    d.plain_edge("v'", "e'");
    for j in 0..jn {
        let ej = format!("e{j}");
        d.edge("v", &ej, bundle.stabilizer_words(lambda[j])?);
        d.edge("v'", &ej, bundle2.stabilizer_words(lambda2[j])?);
    }
    for j in 0..jn {
        let f = format!("f{j}");
        for t in ["v", "v'", "w", "e", "e'"] {
            d.plain_edge(t, &f);
        }
        d.plain_edge(&format!("e{j}"), &f);
    }
    for j in 0..jn {
        let f = format!("f{j}");
        let ej = format!("e{j}");
        let c = Some(Word::power_of(0, j as i64)).filter(|w| !w.is_empty());
        d.compose("w", "e", &f, c);
        d.compose("w", "e'", &f, None);
        d.compose("v", "e", &f, None);
        d.compose("v'", "e'", &f, None);
        d.compose("v", &ej, &f, None);
        d.compose("v'", &ej, &f, None);
    }
    let mut tree: Vec<String> = ["w<-e", "w<-e'", "v<-e", "v'<-e'"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for j in 0..jn {
        tree.push(format!("w<-f{j}"));
        tree.push(format!("e{j}<-f{j}"));
    }
    d.finish(&tree, &["v", "v'", "w"])
}

/// The simple complex whose fundamental group acts regularly on one type of
/// panel.
///
/// Vertices `v, v', e` and per `j` the vertices `vj, ej, e'j, fj`, with
/// `G_v = S`, `G_v' = S'`, `G_vj = S_lambda(j) x S'_lambda'(j)`,
/// `G_ej = S_lambda(j)` and `G_e'j = S'_lambda'(j)` as abstract groups. All
/// twists are trivial. The attached tree is `v<-e, v'<-e` with all `v<-ej,
/// vj<-ej, vj<-e'j, ej<-fj`.
pub fn build_c2_one_panel_complex(
    q: u64,
    bundle: &SymplecticQuadrangleBundle,
    bundle2: &SymplecticQuadrangleBundle,
    lambda: &[LineLabel],
    lambda2: &[LineLabel],
) -> Result<ComplexOfGroups, CogError> {
    check_bundles(q, bundle, bundle2, lambda, lambda2)?;
    let mut d = Draft::default();
    d.vertex("v", bundle.singer_group("")?);
    d.vertex("v'", bundle2.singer_group("'")?);
    d.trivial("e");
    let jn = q as usize + 2;
    let k = if q.is_multiple_of(2) { q.trailing_zeros() as usize } else { 1 };
    for j in 0..jn {
        let h = abstract_stabilizer(q, &format!("g{j}"));
        let h2 = abstract_stabilizer(q, &format!("g{j}'"));
        d.vertex(&format!("v{j}"), h.direct_product(&h2, format!("V{j}")));
        d.vertex(&format!("e{j}"), abstract_stabilizer(q, &format!("h{j}")));
        d.vertex(&format!("e'{j}"), abstract_stabilizer(q, &format!("h{j}'")));
        d.trivial(&format!("f{j}"));
    }
    d.plain_edge("v", "e");
    d.plain_edge("v'", "e");
    let first: Vec<Word> = (0..k).map(Word::gen).collect();
    let second: Vec<Word> = (k..2 * k).map(Word::gen).collect();
    for j in 0..jn {
        let (vj, ej, ej2, f) = (
            format!("v{j}"),
            format!("e{j}"),
            format!("e'{j}"),
            format!("f{j}"),
        );
        d.edge("v", &ej, bundle.stabilizer_words(lambda[j])?);
        d.edge(&vj, &ej, first.clone());
        d.edge("v'", &ej2, bundle2.stabilizer_words(lambda2[j])?);
        d.edge(&vj, &ej2, second.clone());
        for t in ["v", "v'", vj.as_str(), "e", ej.as_str(), ej2.as_str()] {
            d.plain_edge(t, &f);
        }
    }
    for j in 0..jn {
        let (vj, ej, ej2, f) = (
            format!("v{j}"),
            format!("e{j}"),
            format!("e'{j}"),
            format!("f{j}"),
        );
        d.compose("v", "e", &f, None);
        d.compose("v'", "e", &f, None);
        d.compose("v", &ej, &f, None);
        d.compose(&vj, &ej, &f, None);
        d.compose("v'", &ej2, &f, None);
        d.compose(&vj, &ej2, &f, None);
    }
    let mut tree: Vec<String> = vec!["v<-e".into(), "v'<-e".into()];
    for j in 0..jn {
        tree.push(format!("v<-e{j}"));
        tree.push(format!("v{j}<-e{j}"));
        tree.push(format!("v{j}<-e'{j}"));
        tree.push(format!("e{j}<-f{j}"));
    }
    d.finish(&tree, &["v", "v'"])
}
