//! Words over named generators and finite group presentations.
//!
//! The text form is a `generators a b c` header followed by one relator per
//! line, letters separated by whitespace and written `a` or `a^-1`. The parser
//! also accepts `a^k` for any nonzero integer `k`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("generator name `{0}` is not a single token")]
    BadGeneratorName(String),
    #[error("relator {relator} uses generator index {index} but only {count} exist")]
    LetterOutOfRange {
        relator: usize,
        index: usize,
        count: usize,
    },
    #[error("malformed letter `{0}`")]
    BadLetter(String),
    #[error("missing `generators` header")]
    MissingHeader,
}

/// A generator or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize) -> Self {
        Letter { gen, inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// A word in generator indices; not automatically reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g)])
    }

    /// `g^k`, with negative `k` giving inverse letters.
    pub fn power_of(g: usize, k: i64) -> Self {
        let letter = Letter {
            gen: g,
            inv: k < 0,
        };
        Word(vec![letter; k.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn product<'a>(parts: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut v = Vec::new();
        for p in parts {
            v.extend_from_slice(&p.0);
        }
        Word(v)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// Commutator `a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        Word::product([a, b, &a.inverse(), &b.inverse()])
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Free and cyclic reduction.
    pub fn cyclic_reduce(&self) -> Word {
        let w = self.free_reduce().0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    /// Number of letters equal to `g` or `g^-1`.
    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|l| l.gen == g).count()
    }

    pub fn uses(&self, g: usize) -> bool {
        self.0.iter().any(|l| l.gen == g)
    }

    /// Replaces every occurrence of `g` by `image` (and `g^-1` by its inverse).
    pub fn substitute(&self, g: usize, image: &Word) -> Word {
        let inv = image.inverse();
        let mut v = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if l.gen == g {
                v.extend_from_slice(if l.inv { &inv.0 } else { &image.0 });
            } else {
                v.push(l);
            }
        }
        Word(v)
    }

    /// Applies `f` to every generator index.
    pub fn map_generators(&self, mut f: impl FnMut(usize) -> usize) -> Word {
        Word(
            self.0
                .iter()
                .map(|l| Letter {
                    gen: f(l.gen),
                    inv: l.inv,
                })
                .collect(),
        )
    }

    /// Exponent sum of each of the first `n` generators.
    pub fn exponent_sums(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for l in &self.0 {
            v[l.gen] += if l.inv { -1 } else { 1 };
        }
        v
    }
}

fn letter_name(names: &[String], l: Letter) -> String {
    if l.inv {
        format!("{}^-1", names[l.gen])
    } else {
        names[l.gen].clone()
    }
}

/// Renders a word letter by letter; the empty word is `1`.
pub fn word_to_string(names: &[String], w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.0.iter()
        .map(|&l| letter_name(names, l))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders a word with runs collapsed to powers, e.g. `s1^3 s2^-2`.
pub fn word_to_compact_string(names: &[String], w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.0.len() {
        let l = w.0[i];
        let mut j = i;
        while j < w.0.len() && w.0[j] == l {
            j += 1;
        }
        let k = (j - i) as i64 * if l.inv { -1 } else { 1 };
        parts.push(if k == 1 {
            names[l.gen].clone()
        } else {
            format!("{}^{}", names[l.gen], k)
        });
        i = j;
    }
    parts.join(" ")
}

/// Parses whitespace-separated letters `name`, `name^-1` or `name^k`.
pub fn parse_word(names: &[String], text: &str) -> Result<Word, PresentationError> {
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut v = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "1" {
            continue;
        }
        let (name, k) = match tok.rsplit_once('^') {
            Some((name, exp)) => {
                let k: i64 = exp
                    .parse()
                    .map_err(|_| PresentationError::BadLetter(tok.to_string()))?;
                if k == 0 {
                    return Err(PresentationError::BadLetter(tok.to_string()));
                }
                (name, k)
            }
            None => (tok, 1),
        };
        let g = *index
            .get(name)
            .ok_or_else(|| PresentationError::UnknownGenerator(name.to_string()))?;
        v.extend(Word::power_of(g, k).0);
    }
    Ok(Word(v))
}

/// A finite presentation `<generators | relators>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, PresentationError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if g.is_empty() || g.contains(char::is_whitespace) || g.contains('^') || g == "1" {
                return Err(PresentationError::BadGeneratorName(g.clone()));
            }
            if !seen.insert(g.as_str()) {
                return Err(PresentationError::DuplicateGenerator(g.clone()));
            }
        }
        for (r, w) in relators.iter().enumerate() {
            if let Some(l) = w.0.iter().find(|l| l.gen >= generators.len()) {
                return Err(PresentationError::LetterOutOfRange {
                    relator: r,
                    index: l.gen,
                    count: generators.len(),
                });
            }
        }
        Ok(Presentation {
            generators,
            relators,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }

    pub fn word(&self, text: &str) -> Result<Word, PresentationError> {
        parse_word(&self.generators, text)
    }

    pub fn render(&self, w: &Word) -> String {
        word_to_string(&self.generators, w)
    }

    pub fn render_compact(&self, w: &Word) -> String {
        word_to_compact_string(&self.generators, w)
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    pub fn relation_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.exponent_sums(self.generators.len()))
            .collect()
    }

    /// Canonical representative of a relator up to cyclic permutation and
    /// inversion, rendered with generator names; `None` for words that
    /// reduce to the identity.
    ///
    /// Among all rotations of the cyclically reduced word and of its inverse,
    /// the lexicographically least by `(generator name, inverse flag)` wins.
    pub fn canonical_relator(&self, w: &Word) -> Option<String> {
        let r = w.cyclic_reduce();
        if r.is_empty() {
            return None;
        }
        let key = |l: &Letter| (self.generators[l.gen].as_str(), l.inv);
        let mut best: Option<Vec<Letter>> = None;
        for cand in [r.clone(), r.inverse()] {
            let n = cand.len();
            for s in 0..n {
                let rot: Vec<Letter> = cand.0[s..].iter().chain(&cand.0[..s]).copied().collect();
                let better = match &best {
                    None => true,
                    Some(b) => rot.iter().map(key).lt(b.iter().map(key)),
                };
                if better {
                    best = Some(rot);
                }
            }
        }
        best.map(|b| word_to_string(&self.generators, &Word(b)))
    }

    /// Set of canonical relators, the identity dropped.
    pub fn canonical_relator_set(&self) -> BTreeSet<String> {
        self.relators
            .iter()
            .filter_map(|r| self.canonical_relator(r))
            .collect()
    }

    /// Same generator set and same canonical relator set.
    pub fn equivalent_form(&self, other: &Presentation) -> bool {
        let a: BTreeSet<&String> = self.generators.iter().collect();
        let b: BTreeSet<&String> = other.generators.iter().collect();
        a == b && self.canonical_relator_set() == other.canonical_relator_set()
    }

    /// Free-reduces every relator, drops trivial ones and removes duplicates
    /// up to cyclic permutation and inversion, keeping first occurrences.
    pub fn tidy(&mut self) {
        let mut seen = BTreeSet::new();
        let rels = std::mem::take(&mut self.relators);
        for r in rels {
            let r = r.free_reduce();
            if let Some(c) = self.canonical_relator(&r) {
                if seen.insert(c) {
                    self.relators.push(r);
                }
            }
        }
    }

    /// Tietze elimination of generator `g` using the first relator in which
    /// it occurs exactly once. Returns the eliminating word on success.
    pub fn eliminate(&mut self, g: usize) -> Option<Word> {
        let pos = self.relators.iter().position(|r| r.occurrences(g) == 1)?;
        let r = self.relators.remove(pos);
        let at = r.0.iter().position(|l| l.gen == g).unwrap();
        let u = Word(r.0[..at].to_vec());
        let v = Word(r.0[at + 1..].to_vec());
        let image = if r.0[at].inv {
            v.concat(&u)
        } else {
            u.inverse().concat(&v.inverse())
        }
        .free_reduce();
        for rel in &mut self.relators {
            if rel.uses(g) {
                *rel = rel.substitute(g, &image).free_reduce();
            }
        }
        self.remove_unused_generator(g);
        Some(image)
    }

    /// Removes generator `g`, which must not occur in any relator, and
    /// renumbers the rest.
    fn remove_unused_generator(&mut self, g: usize) {
        debug_assert!(self.relators.iter().all(|r| !r.uses(g)));
        self.generators.remove(g);
        for r in &mut self.relators {
            *r = r.map_generators(|x| if x > g { x - 1 } else { x });
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("generators {}\n", self.generators.join(" "));
        for r in &self.relators {
            s.push_str(&word_to_string(&self.generators, r));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PresentationError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or(PresentationError::MissingHeader)?;
        let rest = header
            .strip_prefix("generators")
            .ok_or(PresentationError::MissingHeader)?;
        let generators: Vec<String> = rest.split_whitespace().map(String::from).collect();
        let mut relators = Vec::new();
        for l in lines {
            relators.push(parse_word(&generators, l)?);
        }
        Presentation::new(generators, relators)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.render_compact(r)).collect();
        write!(f, "< {} | {} >", self.generators.join(", "), rels.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_and_cyclic_reduction() {
        let n = names(&["a", "b"]);
        let w = parse_word(&n, "a b b^-1 a^-1 a").unwrap();
        assert_eq!(word_to_string(&n, &w.free_reduce()), "a");
        let w = parse_word(&n, "b^-1 a a b").unwrap();
        assert_eq!(word_to_string(&n, &w.cyclic_reduce()), "a a");
    }

    #[test]
    fn powers_parse() {
        let n = names(&["s"]);
        let w = parse_word(&n, "s^3 s^-1").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(word_to_compact_string(&n, &w), "s^3 s^-1");
        assert!(parse_word(&n, "s^0").is_err());
        assert!(parse_word(&n, "t").is_err());
    }

    #[test]
    fn canonical_relator_is_rotation_and_inversion_invariant() {
        let p = Presentation::from_text("generators x y z\nz y x\n").unwrap();
        let a = p.canonical_relator(&p.word("x z y").unwrap());
        let b = p.canonical_relator(&p.word("y^-1 z^-1 x^-1").unwrap());
        assert_eq!(a, b);
        assert_eq!(a.as_deref(), Some("x z y"));
        assert_eq!(p.canonical_relator(&p.word("x x^-1").unwrap()), None);
    }

    #[test]
    fn elimination_substitutes() {
        let mut p = Presentation::from_text("generators a b k\nk a^-1\nk k b\n").unwrap();
        let image = p.eliminate(2).unwrap();
        assert_eq!(image, Word::gen(0));
        assert_eq!(p.generators(), &["a", "b"]);
        assert_eq!(p.render(&p.relators()[0]), "a a b");
    }

    #[test]
    fn elimination_of_inverse_occurrence() {
        // u k^-1 v = 1 gives k = v u.
        let mut p = Presentation::from_text("generators a b k\na k^-1 b\n").unwrap();
        let image = p.eliminate(2).unwrap();
        assert_eq!(word_to_string(&names(&["a", "b"]), &image), "b a");
    }

    #[test]
    fn text_round_trip() {
        let text = "generators s1 s2\ns1 s1 s2^-1\ns2 s2 s2\n";
        let p = Presentation::from_text(text).unwrap();
        assert_eq!(p.to_text(), text);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(Presentation::new(names(&["a", "a"]), vec![]).is_err());
        assert!(Presentation::new(names(&["a^"]), vec![]).is_err());
        assert!(Presentation::new(names(&["a"]), vec![Word::gen(1)]).is_err());
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..3, any::<bool>()), 0..12)
            .prop_map(|v| Word(v.into_iter().map(|(gen, inv)| Letter { gen, inv }).collect()))
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(w in word_strategy()) {
            let r = w.free_reduce();
            prop_assert_eq!(r.free_reduce(), r.clone());
            prop_assert!(w.concat(&w.inverse()).free_reduce().is_empty());
            prop_assert_eq!(w.exponent_sums(3), r.exponent_sums(3));
        }

        #[test]
        fn canonical_form_invariant(w in word_strategy(), s in 0usize..12) {
            let p = Presentation::new(names(&["a", "b", "c"]), vec![]).unwrap();
            let n = w.len().max(1);
            let s = s % n;
            let rot = if w.is_empty() { w.clone() } else {
                Word(w.0[s..].iter().chain(&w.0[..s]).copied().collect())
            };
            prop_assert_eq!(p.canonical_relator(&w), p.canonical_relator(&rot));
            prop_assert_eq!(p.canonical_relator(&w), p.canonical_relator(&w.inverse()));
        }
    }
}
