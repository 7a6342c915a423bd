//! Direct builders for the lattice presentations, and the coset-graph
//! templates describing the buildings they act on.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ffield::prime_power;
use crate::presentation::{Presentation, PresentationError, Word};
use crate::singer::{
    singer_presentation, stabilizer_words, verify_planar_difference_set, LineLabel,
    OrderedDifferenceSet, SingerError,
};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("difference set {0} does not start at 0")]
    UnnormalizedDifferenceSet(usize),
    #[error("ordered sets have sizes {0:?}, expected {1} each")]
    SizeMismatch(Vec<usize>, usize),
    #[error("difference sets have moduli {found:?}, expected {expected}")]
    ModulusMismatch { expected: u64, found: Vec<u64> },
    #[error("difference set {0} is not planar")]
    NotPlanar(usize),
    #[error("d_{0}(0) is not the identity")]
    NonIdentityBase(usize),
    #[error("generator {0} appears in more than one group")]
    DuplicateGenerator(String),
    #[error("no presentation is available for q = {0}")]
    UnsupportedOrder(u64),
    #[error("{0}")]
    BadBijection(String),
    #[error("bad template: {0}")]
    Template(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Singer(#[from] SingerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeFamily {
    A2General,
    A2Cyclic,
    C2TwoPanel,
    C2OnePanel,
}

impl LatticeFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            LatticeFamily::A2General => "a2-general",
            LatticeFamily::A2Cyclic => "a2-cyclic",
            LatticeFamily::C2TwoPanel => "c2-two-panel",
            LatticeFamily::C2OnePanel => "c2-one-panel",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        [
            LatticeFamily::A2General,
            LatticeFamily::A2Cyclic,
            LatticeFamily::C2TwoPanel,
            LatticeFamily::C2OnePanel,
        ]
        .into_iter()
        .find(|f| f.as_str() == text)
    }
}

impl fmt::Display for LatticeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The data a lattice was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeInput {
    DifferenceSets([OrderedDifferenceSet; 3]),
    /// Three group presentations and the ordered sets `d_a` as words in them.
    Groups {
        groups: [Presentation; 3],
        orderings: [Vec<Word>; 3],
    },
    Bijections {
        lambda: Vec<LineLabel>,
        lambda2: Vec<LineLabel>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    family: LatticeFamily,
    q: u64,
    input: LatticeInput,
    presentation: Presentation,
}

impl LatticeSpec {
    pub fn family(&self) -> LatticeFamily {
        self.family
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn input(&self) -> &LatticeInput {
        &self.input
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn difference_sets(&self) -> Option<&[OrderedDifferenceSet; 3]> {
        match &self.input {
            LatticeInput::DifferenceSets(d) => Some(d),
            _ => None,
        }
    }

    /// `q^2 + q + 1` for the cyclic A2 family.
    pub fn modulus(&self) -> Option<u64> {
        self.difference_sets().map(|d| d[0].modulus())
    }

    pub fn bijections(&self) -> Option<(&[LineLabel], &[LineLabel])> {
        match &self.input {
            LatticeInput::Bijections { lambda, lambda2 } => Some((lambda, lambda2)),
            _ => None,
        }
    }

    /// Which presentation statement this lattice instantiates.
    pub fn instantiates(&self) -> &'static str {
        match (self.family, self.q.is_multiple_of(2)) {
            (LatticeFamily::A2General, _) => "A2 lattice from three Singer groups and ordered difference sets",
            (LatticeFamily::A2Cyclic, _) => "A2 lattice from cyclic Singer groups",
            (LatticeFamily::C2TwoPanel, false) => "two-panel C2 lattice, Heisenberg Singer groups",
            (LatticeFamily::C2TwoPanel, true) => "two-panel C2 lattice, elementary abelian Singer groups",
            (LatticeFamily::C2OnePanel, false) => "one-panel C2 lattice, Heisenberg Singer groups",
            (LatticeFamily::C2OnePanel, true) => "one-panel C2 lattice, elementary abelian Singer groups",
        }
    }

    /// Key-value report block: family, order, counts and the statement
    /// instantiated.
    pub fn report_block(&self) -> String {
        format!(
            "family = {}\nq = {}\ngenerators = {}\nrelators = {}\ninstantiates = {}\n",
            self.family,
            self.q,
            self.presentation.generators().len(),
            self.presentation.relators().len(),
            self.instantiates()
        )
    }
}

fn check_difference_sets(q: u64, sets: [&OrderedDifferenceSet; 3]) -> Result<(), LatticeError> {
    let n = q * q + q + 1;
    if sets.iter().any(|d| d.modulus() != n) {
        return Err(LatticeError::ModulusMismatch {
            expected: n,
            found: sets.iter().map(|d| d.modulus()).collect(),
        });
    }
    if sets.iter().any(|d| d.len() as u64 != q + 1) {
        return Err(LatticeError::SizeMismatch(
            sets.iter().map(|d| d.len()).collect(),
            q as usize + 1,
        ));
    }
    for (i, d) in sets.iter().enumerate() {
        if d.entries()[0] != 0 {
            return Err(LatticeError::UnnormalizedDifferenceSet(i + 1));
        }
        if !verify_planar_difference_set(d).passed() {
            return Err(LatticeError::NotPlanar(i + 1));
        }
    }
    Ok(())
}

/// `<s1, s2, s3 | s_a^n, s1^d1(j) s2^d2(j) s3^d3(j) for j = 1..q>`.
pub fn a2_cyclic_lattice(
    q: u64,
    ds1: &OrderedDifferenceSet,
    ds2: &OrderedDifferenceSet,
    ds3: &OrderedDifferenceSet,
) -> Result<LatticeSpec, LatticeError> {
    let sets = [ds1, ds2, ds3];
    check_difference_sets(q, sets)?;
    let n = (q * q + q + 1) as i64;
    let mut relators: Vec<Word> = (0..3).map(|a| Word::power_of(a, n)).collect();
    for j in 1..=q as usize {
        let parts: Vec<Word> = (0..3)
            .map(|a| Word::power_of(a, sets[a].entries()[j] as i64))
            .collect();
        relators.push(Word::product(&parts));
    }
    let presentation = Presentation::new(vec!["s1".into(), "s2".into(), "s3".into()], relators)?;
    Ok(LatticeSpec {
        family: LatticeFamily::A2Cyclic,
        q,
        input: LatticeInput::DifferenceSets([ds1.clone(), ds2.clone(), ds3.clone()]),
        presentation,
    })
}

/// The free product of the three groups modulo `d1(j) d2(j) d3(j)` for
/// `j >= 1`. Each `orderings[a]` is a list of words in `groups[a]` whose first
/// entry is the empty word.
pub fn a2_general_lattice(
    groups: [Presentation; 3],
    orderings: [Vec<Word>; 3],
) -> Result<LatticeSpec, LatticeError> {
    let len = orderings[0].len();
    if orderings.iter().any(|o| o.len() != len) || len < 3 {
        return Err(LatticeError::SizeMismatch(
            orderings.iter().map(Vec::len).collect(),
            len.max(3),
        ));
    }
    for (a, o) in orderings.iter().enumerate() {
        if !o[0].free_reduce().is_empty() {
            return Err(LatticeError::NonIdentityBase(a + 1));
        }
    }
    let mut names: Vec<String> = Vec::new();
    let mut offsets = [0usize; 3];
    for (a, g) in groups.iter().enumerate() {
        offsets[a] = names.len();
        for n in g.generators() {
            if names.contains(n) {
                return Err(LatticeError::DuplicateGenerator(n.clone()));
            }
            names.push(n.clone());
        }
    }
    let global = |a: usize, w: &Word| w.map_generators(|g| offsets[a] + g);
    let mut relators: Vec<Word> = Vec::new();
    for (a, g) in groups.iter().enumerate() {
        relators.extend(g.relators().iter().map(|r| global(a, r)));
    }
    for j in 1..len {
        let parts: Vec<Word> = (0..3).map(|a| global(a, &orderings[a][j])).collect();
        relators.push(Word::product(&parts));
    }
    let presentation = Presentation::new(names, relators)?;
    Ok(LatticeSpec {
        family: LatticeFamily::A2General,
        q: len as u64 - 1,
        input: LatticeInput::Groups { groups, orderings },
        presentation,
    })
}

/// Checks that `q` has a Singer group presentation and that both maps are
/// bijections onto the line labels.
fn check_bijections(q: u64, lambda: &[LineLabel], lambda2: &[LineLabel]) -> Result<(), LatticeError> {
    match prime_power(q) {
        Some((2, _)) if q > 2 => {}
        Some((_, 1)) if q > 2 => {}
        Some(_) => return Err(LatticeError::UnsupportedOrder(q)),
        None => return Err(SingerError::NotPrimePower(q).into()),
    }
    let labels: BTreeSet<LineLabel> = LineLabel::all(q as u32).into_iter().collect();
    for (name, l) in [("lambda", lambda), ("lambda'", lambda2)] {
        let given: BTreeSet<LineLabel> = l.iter().copied().collect();
        if l.len() != labels.len() || given != labels {
            return Err(LatticeError::BadBijection(format!(
                "{name} has {} entries, {} distinct, over {} labels",
                l.len(),
                given.len(),
                labels.len()
            )));
        }
    }
    Ok(())
}

/// Generators and relators of `S * S'` on names with no suffix and suffix `'`.
fn singer_pair(q: u64) -> Result<(Vec<String>, Vec<Word>, usize), LatticeError> {
    let s = singer_presentation(q, "")?;
    let s2 = singer_presentation(q, "'")?;
    let k = s.generators().len();
    let mut names = s.generators().to_vec();
    names.extend(s2.generators().iter().cloned());
    let mut relators = s.relators().to_vec();
    relators.extend(s2.relators().iter().map(|r| r.map_generators(|g| g + k)));
    Ok((names, relators, k))
}

/// `<S, S', c | c^(q+2), c^j psi'_j(s) c^-j = psi_j(s)>`, one relator per `j`
/// and stabiliser generator `s`. This is the form read off the complex of
/// groups; replacing `c` by `c^-1` gives the form `c^j psi_j(s) c^-j =
/// psi'_j(s)`.
pub fn c2_two_panel_lattice(
    q: u64,
    lambda: &[LineLabel],
    lambda2: &[LineLabel],
) -> Result<LatticeSpec, LatticeError> {
    check_bijections(q, lambda, lambda2)?;
    let (mut names, mut relators, k) = singer_pair(q)?;
    let c = names.len();
    names.push("c".into());
    relators.push(Word::power_of(c, q as i64 + 2));
    for j in 0..q as usize + 2 {
        let w = stabilizer_words(q, lambda[j])?;
        let w2 = stabilizer_words(q, lambda2[j])?;
        let cj = Word::power_of(c, j as i64);
        for (s, s2) in w.iter().zip(&w2) {
            let s2 = s2.map_generators(|g| g + k);
            relators.push(Word::product([&cj, &s2, &cj.inverse(), &s.inverse()]).free_reduce());
        }
    }
    Ok(LatticeSpec {
        family: LatticeFamily::C2TwoPanel,
        q,
        input: LatticeInput::Bijections {
            lambda: lambda.to_vec(),
            lambda2: lambda2.to_vec(),
        },
        presentation: Presentation::new(names, relators)?,
    })
}

/// `<S, S' | [S_lambda(j), S'_lambda'(j)] = 1>`, one commutator per `j` and
/// pair of stabiliser generators.
pub fn c2_one_panel_lattice(
    q: u64,
    lambda: &[LineLabel],
    lambda2: &[LineLabel],
) -> Result<LatticeSpec, LatticeError> {
    check_bijections(q, lambda, lambda2)?;
    let (names, mut relators, k) = singer_pair(q)?;
    for j in 0..q as usize + 2 {
        let w = stabilizer_words(q, lambda[j])?;
        let w2 = stabilizer_words(q, lambda2[j])?;
        for s in &w {
            for s2 in &w2 {
                let s2 = s2.map_generators(|g| g + k);
                relators.push(Word::commutator(s, &s2));
            }
        }
    }
    Ok(LatticeSpec {
        family: LatticeFamily::C2OnePanel,
        q,
        input: LatticeInput::Bijections {
            lambda: lambda.to_vec(),
            lambda2: lambda2.to_vec(),
        },
        presentation: Presentation::new(names, relators)?,
    })
}

/// A coset space `Gamma / H`, with `H` named and given by generating words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexClass {
    pub name: String,
    pub generators: Vec<String>,
}

/// Edges `(g A, g B)` for all `g`, by class index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRule {
    pub from: usize,
    pub to: usize,
}

/// The graph whose flag complex is the building: vertex classes are coset
/// spaces and each rule joins `g A` to `g B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildingGraphTemplate {
    pub family: LatticeFamily,
    pub classes: Vec<VertexClass>,
    pub edges: Vec<EdgeRule>,
}

impl BuildingGraphTemplate {
    pub fn new(
        family: LatticeFamily,
        classes: Vec<VertexClass>,
        edges: Vec<EdgeRule>,
    ) -> Result<Self, LatticeError> {
        if let Some(e) = edges.iter().find(|e| e.from >= classes.len() || e.to >= classes.len()) {
            return Err(LatticeError::Template(format!(
                "edge ({}, {}) names an undeclared class",
                e.from, e.to
            )));
        }
        Ok(BuildingGraphTemplate {
            family,
            classes,
            edges,
        })
    }

    /// Edge rules rendered as `(gA, gB)`.
    pub fn rules(&self) -> Vec<String> {
        self.edges
            .iter()
            .map(|e| format!("(g{}, g{})", self.classes[e.from].name, self.classes[e.to].name))
            .collect()
    }

    /// ```text
    /// template a2-cyclic
    /// class S1 : s1
    /// edge S1 S2
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = format!("template {}\n", self.family);
        for c in &self.classes {
            s.push_str(&format!("class {} : {}\n", c.name, c.generators.join(" ; ")));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {}\n",
                self.classes[e.from].name, self.classes[e.to].name
            ));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, LatticeError> {
        let bad = |m: String| LatticeError::Template(m);
        let mut family = None;
        let mut classes: Vec<VertexClass> = Vec::new();
        let mut edges = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("template") => {
                    let f = parts.next().unwrap_or_default();
                    family = Some(LatticeFamily::parse(f).ok_or_else(|| bad(format!("family {f}")))?);
                }
                Some("class") => {
                    let rest = line["class".len()..].trim();
                    let (name, gens) = rest.split_once(':').ok_or_else(|| bad(line.to_string()))?;
                    classes.push(VertexClass {
                        name: name.trim().to_string(),
                        generators: gens
                            .split(';')
                            .map(str::trim)
                            .filter(|g| !g.is_empty())
                            .map(String::from)
                            .collect(),
                    });
                }
                Some("edge") => {
                    let mut idx = || {
                        let n = parts.next().ok_or_else(|| bad(line.to_string()))?;
                        classes
                            .iter()
                            .position(|c| c.name == n)
                            .ok_or_else(|| bad(format!("undeclared class {n}")))
                    };
                    let from = idx()?;
                    let to = idx()?;
                    edges.push(EdgeRule { from, to });
                }
                _ => return Err(bad(line.to_string())),
            }
        }
        let family = family.ok_or_else(|| bad("missing template line".into()))?;
        Self::new(family, classes, edges)
    }
}

fn words_to_strings(p: &Presentation, words: &[Word]) -> Vec<String> {
    words.iter().map(|w| p.render_compact(w)).collect()
}

/// Vertex classes and edge rules of the building graph. For A2 the sets
/// are assumed normalised so that `d1(0) d2(0) d3(0) = 1`, giving the
/// symmetric rules `(gS1, gS2), (gS2, gS3), (gS3, gS1)`. For the one-panel
/// C2 family the classes are `Gamma/S`, `Gamma/S'` and one class per `j`
/// for the vertex group `S_lambda(j) x S'_lambda'(j)`.
pub fn building_graph_template(l: &LatticeSpec) -> BuildingGraphTemplate {
    let p = l.presentation();
    let class = |name: String, generators: Vec<String>| VertexClass { name, generators };
    let edge = |from, to| EdgeRule { from, to };
    let (classes, edges) = match l.family {
        LatticeFamily::A2Cyclic => (
            (1..=3)
                .map(|a| class(format!("S{a}"), vec![format!("s{a}")]))
                .collect(),
            vec![edge(0, 1), edge(1, 2), edge(2, 0)],
        ),
        LatticeFamily::A2General => {
            let LatticeInput::Groups { groups, .. } = &l.input else {
                unreachable!("general lattices carry their groups")
            };
            (
                groups
                    .iter()
                    .enumerate()
                    .map(|(a, g)| class(format!("S{}", a + 1), g.generators().to_vec()))
                    .collect(),
                vec![edge(0, 1), edge(1, 2), edge(2, 0)],
            )
        }
        LatticeFamily::C2TwoPanel => {
            let k = (p.generators().len() - 1) / 2;
            (
                vec![
                    class("S".into(), p.generators()[..k].to_vec()),
                    class("S'".into(), p.generators()[k..2 * k].to_vec()),
                    class("<c>".into(), vec!["c".into()]),
                ],
                vec![edge(0, 1), edge(0, 2), edge(1, 2)],
            )
        }
        LatticeFamily::C2OnePanel => {
            let k = p.generators().len() / 2;
            let mut classes = vec![
                class("S".into(), p.generators()[..k].to_vec()),
                class("S'".into(), p.generators()[k..].to_vec()),
            ];
            let mut edges = vec![edge(0, 1)];
            let (lambda, lambda2) = l.bijections().expect("C2 lattices carry bijections");
            for (j, (&a, &b)) in lambda.iter().zip(lambda2).enumerate() {
                let w = stabilizer_words(l.q, a).expect("validated order");
                let w2: Vec<Word> = stabilizer_words(l.q, b)
                    .expect("validated order")
                    .iter()
                    .map(|w| w.map_generators(|g| g + k))
                    .collect();
                let mut gens = words_to_strings(p, &w);
                gens.extend(words_to_strings(p, &w2));
                classes.push(class(format!("V{j}"), gens));
                edges.push(edge(0, j + 2));
                edges.push(edge(1, j + 2));
            }
            (classes, edges)
        }
    };
    BuildingGraphTemplate::new(l.family, classes, edges).expect("rules use declared classes")
}
