use std::collections::{BTreeSet, HashMap};

use super::scwol::Scwol;
use super::CogError;
use crate::group::FiniteGroup;
use crate::presentation::{Presentation, Word};

/// A complex of finite groups over a scwol.
///
/// Each edge `a` carries the images of the generators of `G_{i(a)}` as words
/// in the generators of `G_{t(a)}`; each composable pair `(a, b)` may carry a
/// twist word in the generators of `G_{t(a)}` (absent means trivial). Words
/// are kept formally so that extracted presentations retain the shape in which
/// the data was entered.
#[derive(Debug, Clone)]
pub struct ComplexOfGroups {
    scwol: Scwol,
    groups: Vec<FiniteGroup>,
    morphisms: Vec<Vec<Word>>,
    twists: HashMap<(usize, usize), Word>,
    principal: Vec<usize>,
    tree: Option<Vec<usize>>,
    morphism_tables: Vec<Vec<usize>>,
    twist_elements: HashMap<(usize, usize), usize>,
}

impl ComplexOfGroups {
    /// Validates the data: generator names are globally unique, every
    /// `psi_a` is a well-defined injective homomorphism, twists sit on
    /// composable pairs, `psi_a psi_b = Ad(g_{a,b}) psi_{ab}`, and the cocycle
    /// condition `psi_a(g_{b,c}) g_{a,bc} = g_{a,b} g_{ab,c}` holds on
    /// composable triples.
    pub fn new(
        scwol: Scwol,
        groups: Vec<FiniteGroup>,
        morphisms: Vec<Vec<Word>>,
        twists: HashMap<(usize, usize), Word>,
    ) -> Result<Self, CogError> {
        if groups.len() != scwol.num_vertices() {
            return Err(CogError::VertexCount {
                groups: groups.len(),
                vertices: scwol.num_vertices(),
            });
        }
        if morphisms.len() != scwol.num_edges() {
            return Err(CogError::EdgeCount {
                morphisms: morphisms.len(),
                edges: scwol.num_edges(),
            });
        }
        let mut names = BTreeSet::new();
        for g in &groups {
            for n in g.generator_names() {
                if !names.insert(n.clone()) {
                    return Err(CogError::DuplicateGenerator(n.clone()));
                }
            }
        }
        let word_ok = |w: &Word, g: &FiniteGroup| {
            w.letters().iter().all(|l| l.gen < g.generator_names().len())
        };
        let mut morphism_tables = Vec::with_capacity(morphisms.len());
        for (a, images) in morphisms.iter().enumerate() {
            let src = &groups[scwol.initial(a)];
            let dst = &groups[scwol.terminal(a)];
            if images.len() != src.generator_names().len() || !images.iter().all(|w| word_ok(w, dst)) {
                return Err(CogError::BadMorphism(scwol.edge(a).name.clone()));
            }
            let elems: Vec<usize> = images.iter().map(|w| dst.eval(w)).collect();
            let table = src
                .homomorphism_table(dst, &elems)
                .ok_or_else(|| CogError::NotHomomorphism(scwol.edge(a).name.clone()))?;
            let image: BTreeSet<usize> = table.iter().copied().collect();
            if image.len() != src.order() {
                return Err(CogError::NotInjective(scwol.edge(a).name.clone()));
            }
            morphism_tables.push(table);
        }
        let mut twist_elements = HashMap::new();
        for (&(a, b), w) in &twists {
            if scwol.compose(a, b).is_none() {
                return Err(CogError::TwistNotComposable(a, b));
            }
            let g = &groups[scwol.terminal(a)];
            if !word_ok(w, g) {
                return Err(CogError::BadTwist(a, b));
            }
            twist_elements.insert((a, b), g.eval(w));
        }
        let principal = (0..scwol.num_vertices()).collect();
        let c = ComplexOfGroups {
            scwol,
            groups,
            morphisms,
            twists,
            principal,
            tree: None,
            morphism_tables,
            twist_elements,
        };
        c.check_compatibility()?;
        Ok(c)
    }

    fn check_compatibility(&self) -> Result<(), CogError> {
        let s = &self.scwol;
        for &(a, b, ab) in s.composable_pairs() {
            let gv = &self.groups[s.terminal(a)];
            let g = self.twist(a, b);
            for x in 0..self.groups[s.initial(b)].order() {
                let lhs = self.psi(a, self.psi(b, x));
                let rhs = gv.mul(gv.mul(g, self.psi(ab, x)), gv.inv(g));
                if lhs != rhs {
                    return Err(CogError::Incompatible(a, b));
                }
            }
        }
        for &(a, b, ab) in s.composable_pairs() {
            for &(b2, c, bc) in s.composable_pairs() {
                if b2 != b {
                    continue;
                }
                let gv = &self.groups[s.terminal(a)];
                let abc = s.compose(a, bc).expect("associative scwol");
                debug_assert_eq!(Some(abc), s.compose(ab, c));
                let lhs = gv.mul(self.psi(a, self.twist(b, c)), self.twist(a, bc));
                let rhs = gv.mul(self.twist(a, b), self.twist(ab, c));
                if lhs != rhs {
                    return Err(CogError::Cocycle(a, b, c));
                }
            }
        }
        Ok(())
    }

    /// Restricts generator elimination during presentation extraction to the
    /// vertex groups outside `principal`.
    pub fn with_principal(mut self, principal: Vec<usize>) -> Self {
        self.principal = principal;
        self
    }

    /// Records a preferred maximal tree, checked on attachment.
    pub fn with_tree(mut self, tree: Vec<usize>) -> Result<Self, CogError> {
        check_spanning_tree(&self.scwol, &tree)?;
        self.tree = Some(tree);
        Ok(self)
    }

    pub fn canonical_tree(&self) -> Option<&[usize]> {
        self.tree.as_deref()
    }

    pub fn scwol(&self) -> &Scwol {
        &self.scwol
    }

    pub fn group(&self, v: usize) -> &FiniteGroup {
        &self.groups[v]
    }

    pub fn groups(&self) -> &[FiniteGroup] {
        &self.groups
    }

    pub fn principal(&self) -> &[usize] {
        &self.principal
    }

    /// Images of the generators of `G_{i(a)}` under `psi_a`.
    pub fn morphism_words(&self, a: usize) -> &[Word] {
        &self.morphisms[a]
    }

    /// `psi_a` on elements.
    pub fn psi(&self, a: usize, x: usize) -> usize {
        self.morphism_tables[a][x]
    }

    /// Sorted image `psi_a(G_{i(a)})`.
    pub fn psi_image(&self, a: usize) -> Vec<usize> {
        let mut v = self.morphism_tables[a].clone();
        v.sort_unstable();
        v
    }

    pub fn twist_word(&self, a: usize, b: usize) -> Option<&Word> {
        self.twists.get(&(a, b))
    }

    /// Twist `g_{a,b}` as an element of `G_{t(a)}`.
    pub fn twist(&self, a: usize, b: usize) -> usize {
        self.twist_elements.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn vertex(&self, name: &str) -> Result<usize, CogError> {
        self.scwol
            .vertex_index(name)
            .ok_or_else(|| CogError::UnknownVertex(name.to_string()))
    }

    pub fn edge(&self, name: &str) -> Result<usize, CogError> {
        self.scwol
            .edge_index(name)
            .ok_or_else(|| CogError::UnknownEdge(name.to_string()))
    }

    /// Edge indices for a list of edge names.
    pub fn edges_named(&self, names: &[String]) -> Result<Vec<usize>, CogError> {
        names.iter().map(|n| self.edge(n)).collect()
    }

    fn generator_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.groups.len());
        let mut acc = 0;
        for g in &self.groups {
            off.push(acc);
            acc += g.generator_names().len();
        }
        off
    }
}

/// Name of the generator attached to edge `a` outside the tree.
pub fn edge_generator_name(edge_name: &str) -> String {
    format!("k[{edge_name}]")
}

fn check_spanning_tree(s: &Scwol, tree: &[usize]) -> Result<(), CogError> {
    let n = s.num_vertices();
    let distinct: BTreeSet<usize> = tree.iter().copied().collect();
    if distinct.len() != tree.len() || tree.iter().any(|&a| a >= s.num_edges()) {
        return Err(CogError::NotASpanningTree("repeated or unknown edge".into()));
    }
    if n == 0 || tree.len() != n - 1 {
        return Err(CogError::NotASpanningTree(format!(
            "{} edges for {} vertices",
            tree.len(),
            n
        )));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &a in tree {
        let (u, v) = (find(&mut parent, s.initial(a)), find(&mut parent, s.terminal(a)));
        if u == v {
            return Err(CogError::NotASpanningTree(format!(
                "edge {} closes a cycle",
                s.edge(a).name
            )));
        }
        parent[u] = v;
    }
    Ok(())
}

/// Presentation of the fundamental group with respect to a maximal tree.
///
/// Generators are the vertex-group generators and one `k[a]` per edge outside
/// the tree. Relators are the vertex-group relators, `k_a k_b k_ab^-1
/// g_{a,b}^-1` for composable pairs and `k_a s k_a^-1 psi_a(s)^-1` for
/// generators `s` of `G_{i(a)}`, with `k_a = 1` on tree edges. The result is
/// then normalised:
///
/// 1. each `k[a]` (in edge order, repeated to a fixpoint) is eliminated
///    through the first relator containing it exactly once;
/// 2. generators of vertex groups outside the principal set are eliminated
///    the same way;
/// 3. relators that are words in a single principal group, trivial there and
///    not among its defining relators are dropped;
/// 4. relators are free-reduced and deduplicated up to rotation and
///    inversion.
pub fn fundamental_group_presentation(
    c: &ComplexOfGroups,
    tree: &[usize],
) -> Result<Presentation, CogError> {
    let s = &c.scwol;
    check_spanning_tree(s, tree)?;
    let in_tree: BTreeSet<usize> = tree.iter().copied().collect();
    let offsets = c.generator_offsets();
    let mut names: Vec<String> = c
        .groups
        .iter()
        .flat_map(|g| g.generator_names().iter().cloned())
        .collect();
    let mut k_gen: HashMap<usize, usize> = HashMap::new();
    for a in 0..s.num_edges() {
        if !in_tree.contains(&a) {
            k_gen.insert(a, names.len());
            names.push(edge_generator_name(&s.edge(a).name));
        }
    }
    let k = |a: usize| k_gen.get(&a).map_or_else(Word::empty, |&g| Word::gen(g));
    let global = |v: usize, w: &Word| w.map_generators(|g| offsets[v] + g);

    let mut relators = Vec::new();
    for (v, g) in c.groups.iter().enumerate() {
        relators.extend(g.relators().iter().map(|r| global(v, r)));
    }
    for &(a, b, ab) in s.composable_pairs() {
        let g = c
            .twists
            .get(&(a, b))
            .map_or_else(Word::empty, |w| global(s.terminal(a), w));
        relators.push(Word::product([&k(a), &k(b), &k(ab).inverse(), &g.inverse()]));
    }
    for a in 0..s.num_edges() {
        let src = s.initial(a);
        for (i, image) in c.morphisms[a].iter().enumerate() {
            let gen = Word::gen(offsets[src] + i);
            let img = global(s.terminal(a), image);
            relators.push(Word::product([&k(a), &gen, &k(a).inverse(), &img.inverse()]));
        }
    }
    let relators: Vec<Word> = relators
        .into_iter()
        .map(|r| r.free_reduce())
        .filter(|r| !r.is_empty())
        .collect();
    let mut p = Presentation::new(names, relators)?;

    let k_names: Vec<String> = (0..s.num_edges())
        .filter(|a| !in_tree.contains(a))
        .map(|a| edge_generator_name(&s.edge(a).name))
        .collect();
    eliminate_to_fixpoint(&mut p, &k_names);

    let principal: BTreeSet<usize> = c.principal.iter().copied().collect();
    let secondary: Vec<String> = (0..s.num_vertices())
        .filter(|v| !principal.contains(v))
        .flat_map(|v| c.groups[v].generator_names().iter().cloned())
        .collect();
    eliminate_to_fixpoint(&mut p, &secondary);

    drop_local_consequences(&mut p, c, &principal);
    p.tidy();
    Ok(p)
}

fn eliminate_to_fixpoint(p: &mut Presentation, names: &[String]) {
    loop {
        let mut progress = false;
        for n in names {
            if let Some(g) = p.generator_index(n) {
                if p.eliminate(g).is_some() {
                    progress = true;
                }
            }
        }
        if !progress {
            break;
        }
    }
}

fn drop_local_consequences(p: &mut Presentation, c: &ComplexOfGroups, principal: &BTreeSet<usize>) {
    let mut owner: HashMap<String, (usize, usize)> = HashMap::new();
    for &v in principal {
        for (i, n) in c.groups[v].generator_names().iter().enumerate() {
            owner.insert(n.clone(), (v, i));
        }
    }
    let gens = p.generators().to_vec();
    let mut defining: BTreeSet<String> = BTreeSet::new();
    for &v in principal {
        let g = &c.groups[v];
        let local = g.presentation();
        for r in g.relators() {
            let w = r.map_generators(|i| p.generator_index(&local.generators()[i]).unwrap_or(usize::MAX));
            if w.letters().iter().all(|l| l.gen != usize::MAX) {
                if let Some(cr) = p.canonical_relator(&w) {
                    defining.insert(cr);
                }
            }
        }
    }
    let keep: Vec<Word> = p
        .relators()
        .iter()
        .filter(|r| {
            let r = &r.cyclic_reduce();
            let owners: BTreeSet<usize> = r
                .letters()
                .iter()
                .filter_map(|l| owner.get(&gens[l.gen]).map(|&(v, _)| v))
                .collect();
            let all_owned = r.letters().iter().all(|l| owner.contains_key(&gens[l.gen]));
            if !all_owned || owners.len() != 1 {
                return true;
            }
            let v = *owners.iter().next().unwrap();
            let local = r.map_generators(|g| owner[&gens[g]].1);
            if c.groups[v].eval(&local) != 0 {
                return true;
            }
            p.canonical_relator(r).is_some_and(|cr| defining.contains(&cr))
        })
        .cloned()
        .collect();
    *p = Presentation::new(gens, keep).expect("generators unchanged");
}
