//! Finite groups as explicit multiplication tables.
//!
//! Elements are `0..order` with `0` the identity. Each group carries named
//! generators and defining relators so that it can contribute to presentations
//! of fundamental groups; [`FiniteGroup::presentation_order`] confirms by coset
//! enumeration that the relators really define the tabulated group.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::presentation::{Letter, Presentation, PresentationError, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("element 0 is not the identity")]
    IdentityNotZero,
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("generators do not generate the group (span {span} of {order})")]
    NotGenerating { span: usize, order: usize },
    #[error("relator {0} does not evaluate to the identity")]
    RelatorFails(usize),
    #[error("generator count {names} does not match element count {elements}")]
    GeneratorMismatch { names: usize, elements: usize },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// A finite group with a full multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    generator_names: Vec<String>,
    generator_elements: Vec<usize>,
    relators: Vec<Word>,
}

/// Associativity is checked exhaustively up to this order.
const ASSOCIATIVITY_CHECK_LIMIT: usize = 160;

impl FiniteGroup {
    /// Builds a group from a multiplication function on `0..order`.
    ///
    /// Relator letters index into `generator_names`.
    pub fn from_fn(
        name: impl Into<String>,
        order: usize,
        mul: impl Fn(usize, usize) -> usize,
        generator_names: Vec<String>,
        generator_elements: Vec<usize>,
        relators: Vec<Word>,
    ) -> Result<Self, GroupError> {
        if generator_names.len() != generator_elements.len() {
            return Err(GroupError::GeneratorMismatch {
                names: generator_names.len(),
                elements: generator_elements.len(),
            });
        }
        // Validates names and letters.
        Presentation::new(generator_names.clone(), relators.clone())?;
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                table[a * order + b] = mul(a, b) as u32;
            }
        }
        let mut g = FiniteGroup {
            name: name.into(),
            order,
            table,
            inverse: vec![0; order],
            generator_names,
            generator_elements,
            relators,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&mut self) -> Result<(), GroupError> {
        let n = self.order;
        if (0..n).any(|a| self.mul(0, a) != a || self.mul(a, 0) != a) {
            return Err(GroupError::IdentityNotZero);
        }
        if n <= ASSOCIATIVITY_CHECK_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(GroupError::NotAssociative(a, b, c));
                        }
                    }
                }
            }
        }
        for a in 0..n {
            let inv = (0..n).find(|&b| self.mul(a, b) == 0).ok_or(GroupError::NoInverse(a))?;
            if self.mul(inv, a) != 0 {
                return Err(GroupError::NoInverse(a));
            }
            self.inverse[a] = inv as u32;
        }
        let span = self.subgroup(&self.generator_elements).len();
        if span != n {
            return Err(GroupError::NotGenerating { span, order: n });
        }
        for (i, r) in self.relators.iter().enumerate() {
            if self.eval(r) != 0 {
                return Err(GroupError::RelatorFails(i));
            }
        }
        Ok(())
    }

    pub fn trivial(name: impl Into<String>) -> Self {
        FiniteGroup::from_fn(name, 1, |_, _| 0, vec![], vec![], vec![]).unwrap()
    }

    /// `<gen | gen^n>`.
    pub fn cyclic(name: impl Into<String>, gen: impl Into<String>, n: usize) -> Self {
        assert!(n >= 1);
        let gens = if n == 1 { vec![] } else { vec![gen.into()] };
        let elems = if n == 1 { vec![] } else { vec![1] };
        let rels = if n == 1 {
            vec![]
        } else {
            vec![Word::power_of(0, n as i64)]
        };
        FiniteGroup::from_fn(name, n, |a, b| (a + b) % n, gens, elems, rels).unwrap()
    }

    /// `(Z/2)^k` with one generator per coordinate, relators the squares and
    /// pairwise commutators.
    pub fn elementary_abelian_2(name: impl Into<String>, gens: Vec<String>) -> Self {
        let k = gens.len();
        let elems = (0..k).map(|i| 1usize << i).collect();
        FiniteGroup::from_fn(name, 1 << k, |a, b| a ^ b, gens, elems, abelian_relators(k, 2))
            .unwrap()
    }

    /// Direct product; generators of `self` precede those of `other`.
    pub fn direct_product(&self, other: &FiniteGroup, name: impl Into<String>) -> Self {
        let (m, n) = (self.order, other.order);
        let mut names = self.generator_names.clone();
        names.extend(other.generator_names.iter().cloned());
        let mut elems: Vec<usize> = self.generator_elements.iter().map(|&g| g * n).collect();
        elems.extend(other.generator_elements.iter().copied());
        let k = self.generator_names.len();
        let mut rels = self.relators.clone();
        rels.extend(other.relators.iter().map(|r| r.map_generators(|g| g + k)));
        for a in 0..k {
            for b in 0..other.generator_names.len() {
                rels.push(Word::commutator(&Word::gen(a), &Word::gen(k + b)));
            }
        }
        FiniteGroup::from_fn(
            name,
            m * n,
            |x, y| self.mul(x / n, y / n) * n + other.mul(x % n, y % n),
            names,
            elems,
            rels,
        )
        .unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_elements(&self) -> &[usize] {
        &self.generator_elements
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn presentation(&self) -> Presentation {
        Presentation::new(self.generator_names.clone(), self.relators.clone()).unwrap()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Evaluates a word in the local generators.
    pub fn eval(&self, w: &Word) -> usize {
        w.letters().iter().fold(0, |acc, l| {
            let g = self.generator_elements[l.gen];
            self.mul(acc, if l.inv { self.inv(g) } else { g })
        })
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    /// Left cosets `gH` of a subgroup, each sorted, ordered by least element.
    pub fn left_cosets(&self, subgroup: &[usize]) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order];
        let mut out = Vec::new();
        for g in 0..self.order {
            if assigned[g] {
                continue;
            }
            let mut coset: Vec<usize> = subgroup.iter().map(|&h| self.mul(g, h)).collect();
            coset.sort_unstable();
            for &x in &coset {
                assigned[x] = true;
            }
            out.push(coset);
        }
        out
    }

    /// Element-level image table of the homomorphism sending local generator
    /// `i` to `images[i]` in `target`. Fails if the assignment is not
    /// well defined.
    pub fn homomorphism_table(&self, target: &FiniteGroup, images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order];
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (i, &g) in self.generator_elements.iter().enumerate() {
                let y = self.mul(x, g);
                let fy = target.mul(map[x], images[i]);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        // Checking generator steps from every element makes the map a
        // homomorphism on a generating set, hence everywhere.
        Some(map)
    }

    /// Order of the group defined by the stored relators, by coset
    /// enumeration; `None` if enumeration exceeds `limit` cosets.
    pub fn presentation_order(&self, limit: usize) -> Option<usize> {
        coset_enumeration(self.generator_names.len(), &self.relators, &[], limit)
    }
}

/// Squares (or `p`-th powers) of `k` generators and their pairwise commutators.
pub fn abelian_relators(k: usize, p: usize) -> Vec<Word> {
    let mut rels: Vec<Word> = (0..k).map(|i| Word::power_of(i, p as i64)).collect();
    for a in 0..k {
        for b in a + 1..k {
            rels.push(Word::commutator(&Word::gen(a), &Word::gen(b)));
        }
    }
    rels
}

/// Index of the subgroup generated by `subgroup` in the group presented on
/// `ngens` generators by `relators`, via HLT coset enumeration with
/// coincidence processing. Returns `None` once more than `limit` cosets have
/// been defined.
pub fn coset_enumeration(
    ngens: usize,
    relators: &[Word],
    subgroup: &[Word],
    limit: usize,
) -> Option<usize> {
    let mut e = Enumerator::new(2 * ngens, limit);
    let col = |l: &Letter| 2 * l.gen + l.inv as usize;
    let rels: Vec<Vec<usize>> = relators
        .iter()
        .map(|r| r.cyclic_reduce().letters().iter().map(col).collect())
        .filter(|r: &Vec<usize>| !r.is_empty())
        .collect();
    let subs: Vec<Vec<usize>> = subgroup
        .iter()
        .map(|r| r.free_reduce().letters().iter().map(col).collect())
        .collect();
    for w in &subs {
        e.scan_and_fill(0, w)?;
    }
    let mut c = 0;
    while c < e.table.len() {
        if e.alive(c) {
            for r in &rels {
                if !e.alive(c) {
                    break;
                }
                e.scan_and_fill(c, r)?;
            }
            if e.alive(c) {
                for x in 0..e.ncols {
                    if e.table[c][x].is_none() {
                        e.define(c, x)?;
                    }
                }
            }
        }
        c += 1;
    }
    Some((0..e.table.len()).filter(|&i| e.alive(i)).count())
}

struct Enumerator {
    ncols: usize,
    limit: usize,
    table: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Enumerator {
    fn new(ncols: usize, limit: usize) -> Self {
        Enumerator {
            ncols,
            limit,
            table: vec![vec![None; ncols]],
            parent: vec![0],
            queue: VecDeque::new(),
        }
    }

    fn alive(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn define(&mut self, c: usize, x: usize) -> Option<()> {
        if self.table.len() >= self.limit {
            return None;
        }
        let d = self.table.len();
        self.table.push(vec![None; self.ncols]);
        self.parent.push(d);
        self.table[c][x] = Some(d);
        self.table[d][x ^ 1] = Some(c);
        Some(())
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Option<()> {
        if w.is_empty() {
            return Some(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() - 1;
        loop {
            while i <= j {
                match self.table[f][w[i]] {
                    Some(n) => {
                        f = n;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Some(());
            }
            while j >= i {
                match self.table[b][w[j] ^ 1] {
                    Some(n) => {
                        b = n;
                        if j == 0 {
                            // i == 0 as well; the whole word scanned backwards.
                            self.coincidence(f, b);
                            return Some(());
                        }
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i {
                self.coincidence(f, b);
                return Some(());
            } else if i == j {
                self.table[f][w[i]] = Some(b);
                self.table[b][w[i] ^ 1] = Some(f);
                return Some(());
            } else {
                self.define(f, w[i])?;
            }
        }
    }

    fn merge(&mut self, k: usize, l: usize) {
        let k = self.rep(k);
        let l = self.rep(l);
        if k == l {
            return;
        }
        let (lo, hi) = if k < l { (k, l) } else { (l, k) };
        self.parent[hi] = lo;
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.merge(a, b);
        while let Some(g) = self.queue.pop_front() {
            for x in 0..self.ncols {
                if let Some(d) = self.table[g][x] {
                    self.table[d][x ^ 1] = None;
                    let mu = self.rep(g);
                    let nu = self.rep(d);
                    if let Some(t) = self.table[mu][x] {
                        self.merge(nu, t);
                    } else if let Some(t) = self.table[nu][x ^ 1] {
                        self.merge(mu, t);
                    } else {
                        self.table[mu][x] = Some(nu);
                        self.table[nu][x ^ 1] = Some(mu);
                    }
                }
            }
        }
    }
}

/// Distinct elements reachable as products of the given elements; mostly a
/// convenience for tests and orbit computations.
pub fn closure<T: Clone + Eq + std::hash::Hash + Ord>(
    identity: T,
    generators: &[T],
    mul: impl Fn(&T, &T) -> T,
) -> Vec<T> {
    let mut seen: HashSet<T> = HashSet::new();
    seen.insert(identity.clone());
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let set: BTreeSet<T> = seen.into_iter().collect();
    set.into_iter().collect()
}
