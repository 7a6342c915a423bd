use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScwolError {
    #[error("edge `{0}` is a loop")]
    Loop(String),
    #[error("vertex index {0} out of range")]
    UnknownVertex(usize),
    #[error("edge index {0} out of range")]
    UnknownEdge(usize),
    #[error("edges {0} and {1} are not composable")]
    NotComposable(usize, usize),
    #[error("composite of ({a}, {b}) must run from i(b) to t(a)")]
    BadComposite { a: usize, b: usize },
    #[error("composable pair ({0}, {1}) has no composite")]
    MissingComposite(usize, usize),
    #[error("composite of ({0}, {1}) given twice")]
    DuplicateComposite(usize, usize),
    #[error("composition is not associative on ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("malformed scwol text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScwolEdge {
    pub name: String,
    /// Initial vertex `i(a)`.
    pub source: usize,
    /// Terminal vertex `t(a)`.
    pub target: usize,
}

/// A small category without loops.
///
/// Edges point from `i(a)` to `t(a)`; a pair `(a, b)` is composable when
/// `i(a) = t(b)`, and its composite `ab` runs from `i(b)` to `t(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scwol {
    vertices: Vec<String>,
    edges: Vec<ScwolEdge>,
    composition: HashMap<(usize, usize), usize>,
    pairs: Vec<(usize, usize, usize)>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default)]
pub struct ScwolBuilder {
    vertices: Vec<String>,
    edges: Vec<ScwolEdge>,
    composites: Vec<(usize, usize, usize)>,
}

impl ScwolBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: impl Into<String>) -> usize {
        self.vertices.push(name.into());
        self.vertices.len() - 1
    }

    /// Adds an edge from `source` to `target`.
    pub fn edge(&mut self, name: impl Into<String>, source: usize, target: usize) -> usize {
        self.edges.push(ScwolEdge {
            name: name.into(),
            source,
            target,
        });
        self.edges.len() - 1
    }

    /// Declares `ab` as the composite of `a` after `b`.
    pub fn compose(&mut self, a: usize, b: usize, ab: usize) {
        self.composites.push((a, b, ab));
    }

    pub fn build(self) -> Result<Scwol, ScwolError> {
        let nv = self.vertices.len();
        let ne = self.edges.len();
        let mut in_edges = vec![Vec::new(); nv];
        let mut out_edges = vec![Vec::new(); nv];
        for (k, e) in self.edges.iter().enumerate() {
            for v in [e.source, e.target] {
                if v >= nv {
                    return Err(ScwolError::UnknownVertex(v));
                }
            }
            if e.source == e.target {
                return Err(ScwolError::Loop(e.name.clone()));
            }
            in_edges[e.target].push(k);
            out_edges[e.source].push(k);
        }
        let mut composition = HashMap::new();
        for &(a, b, ab) in &self.composites {
            for x in [a, b, ab] {
                if x >= ne {
                    return Err(ScwolError::UnknownEdge(x));
                }
            }
            let (ea, eb, eab) = (&self.edges[a], &self.edges[b], &self.edges[ab]);
            if ea.source != eb.target {
                return Err(ScwolError::NotComposable(a, b));
            }
            if eab.source != eb.source || eab.target != ea.target {
                return Err(ScwolError::BadComposite { a, b });
            }
            if composition.insert((a, b), ab).is_some() {
                return Err(ScwolError::DuplicateComposite(a, b));
            }
        }
        let mut pairs = Vec::new();
        for b in 0..ne {
            for &a in &out_edges[self.edges[b].target] {
                let ab = *composition
                    .get(&(a, b))
                    .ok_or(ScwolError::MissingComposite(a, b))?;
                pairs.push((a, b, ab));
            }
        }
        let s = Scwol {
            vertices: self.vertices,
            edges: self.edges,
            composition,
            pairs,
            in_edges,
            out_edges,
        };
        for &(a, b, ab) in &s.pairs {
            for &c in &s.in_edges[s.edges[b].source] {
                let bc = s.composition[&(b, c)];
                if s.composition[&(ab, c)] != s.composition[&(a, bc)] {
                    return Err(ScwolError::NotAssociative(a, b, c));
                }
            }
        }
        Ok(s)
    }
}

impl Scwol {
    /// The scwol with one vertex and no edges.
    pub fn point(name: impl Into<String>) -> Scwol {
        let mut b = ScwolBuilder::new();
        b.vertex(name);
        b.build().unwrap()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edge(&self, a: usize) -> &ScwolEdge {
        &self.edges[a]
    }

    pub fn edges(&self) -> &[ScwolEdge] {
        &self.edges
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn initial(&self, a: usize) -> usize {
        self.edges[a].source
    }

    pub fn terminal(&self, a: usize) -> usize {
        self.edges[a].target
    }

    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.composition.get(&(a, b)).copied()
    }

    /// All composable pairs as `(a, b, ab)`, ordered by `b` then `a`.
    pub fn composable_pairs(&self) -> &[(usize, usize, usize)] {
        &self.pairs
    }

    /// Edges with terminal vertex `v`.
    pub fn edges_into(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Edges with initial vertex `v`.
    pub fn edges_from(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// All `k`-chains of composable edges, listed bottom-up: `[e1, ..., ek]`
    /// with `t(e_m) = i(e_{m+1})`. For `k = 0` the list is empty; the
    /// 0-chains are the vertices.
    pub fn chains(&self, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return Vec::new();
        }
        let mut chains: Vec<Vec<usize>> = (0..self.edges.len()).map(|a| vec![a]).collect();
        for _ in 1..k {
            let mut next = Vec::new();
            for c in &chains {
                let top = *c.last().unwrap();
                for &a in &self.out_edges[self.edges[top].target] {
                    let mut d = c.clone();
                    d.push(a);
                    next.push(d);
                }
            }
            chains = next;
        }
        chains
    }

    /// Length of the longest chain of composable edges.
    pub fn dimension(&self) -> usize {
        if self.edges.is_empty() {
            return 0;
        }
        // Longest path in a DAG by memoised depth.
        let mut depth: Vec<Option<usize>> = vec![None; self.vertices.len()];
        fn down(s: &Scwol, v: usize, depth: &mut Vec<Option<usize>>) -> usize {
            if let Some(d) = depth[v] {
                return d;
            }
            let d = s.in_edges[v]
                .iter()
                .map(|&a| 1 + down(s, s.edges[a].source, depth))
                .max()
                .unwrap_or(0);
            depth[v] = Some(d);
            d
        }
        (0..self.vertices.len())
            .map(|v| down(self, v, &mut depth))
            .max()
            .unwrap_or(0)
    }

    /// Join `self * other`: all vertices of both, all edges of both, and one
    /// edge from each vertex of `self` to each vertex of `other`.
    pub fn join(&self, other: &Scwol) -> Scwol {
        let n1 = self.num_vertices();
        let n2 = other.num_vertices();
        let mut b = ScwolBuilder::new();
        for v in &self.vertices {
            b.vertex(v.clone());
        }
        for v in &other.vertices {
            b.vertex(v.clone());
        }
        let e1 = self.num_edges();
        for e in &self.edges {
            b.edge(e.name.clone(), e.source, e.target);
        }
        for e in &other.edges {
            b.edge(e.name.clone(), n1 + e.source, n1 + e.target);
        }
        let e2 = other.num_edges();
        let join_edge = |u: usize, w: usize| e1 + e2 + u * n2 + w;
        for u in 0..n1 {
            for w in 0..n2 {
                b.edge(
                    format!("{}->{}", self.vertices[u], other.vertices[w]),
                    u,
                    n1 + w,
                );
            }
        }
        for &(a, bb, ab) in &self.pairs {
            b.compose(a, bb, ab);
        }
        for &(a, bb, ab) in &other.pairs {
            b.compose(e1 + a, e1 + bb, e1 + ab);
        }
        for (k, e) in self.edges.iter().enumerate() {
            for w in 0..n2 {
                b.compose(join_edge(e.target, w), k, join_edge(e.source, w));
            }
        }
        for (k, e) in other.edges.iter().enumerate() {
            for u in 0..n1 {
                b.compose(e1 + k, join_edge(u, e.source), join_edge(u, e.target));
            }
        }
        b.build().expect("joins of scwols are scwols")
    }

    /// Cone with apex `apex` placed above: `self * {apex}`.
    pub fn cone(&self, apex: &str) -> Scwol {
        self.join(&Scwol::point(apex))
    }

    /// Line-oriented text: `vertex <name>`, `edge <name> <i> <t>`,
    /// `compose <a> <b> <ab>`.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "scwol vertices {} edges {}\n",
            self.num_vertices(),
            self.num_edges()
        );
        for v in &self.vertices {
            let _ = writeln!(s, "vertex {v}");
        }
        for e in &self.edges {
            let _ = writeln!(s, "edge {} {} {}", e.name, e.source, e.target);
        }
        for &(a, b, ab) in &self.pairs {
            let _ = writeln!(s, "compose {a} {b} {ab}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Scwol, ScwolError> {
        let mut b = ScwolBuilder::new();
        let err = |line: usize, reason: &str| ScwolError::Parse {
            line: line + 1,
            reason: reason.into(),
        };
        for (n, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["scwol", ..] => {}
                ["vertex", name] => {
                    b.vertex(*name);
                }
                ["edge", name, i, t] => {
                    let i = i.parse().map_err(|_| err(n, "bad initial vertex"))?;
                    let t = t.parse().map_err(|_| err(n, "bad terminal vertex"))?;
                    b.edge(*name, i, t);
                }
                ["compose", a, c, ab] => {
                    let parse = |s: &str| s.parse::<usize>().map_err(|_| err(n, "bad edge index"));
                    b.compose(parse(a)?, parse(c)?, parse(ab)?);
                }
                _ => return Err(err(n, "unrecognised line")),
            }
        }
        b.build()
    }

    /// Multiset of `(in-degree, out-degree)` pairs, a cheap isomorphism
    /// invariant.
    pub fn degree_profile(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for v in 0..self.num_vertices() {
            *m.entry((self.in_edges[v].len(), self.out_edges[v].len()))
                .or_insert(0) += 1;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Barycentric subdivision of a single edge: vertices x, y and the
    /// midpoint m with m -> x, m -> y.
    fn segment() -> Scwol {
        let mut b = ScwolBuilder::new();
        let x = b.vertex("x");
        let y = b.vertex("y");
        let m = b.vertex("m");
        b.edge("x<-m", m, x);
        b.edge("y<-m", m, y);
        b.build().unwrap()
    }

    #[test]
    fn rejects_loops_and_missing_composites() {
        let mut b = ScwolBuilder::new();
        let v = b.vertex("v");
        b.edge("a", v, v);
        assert!(matches!(b.build(), Err(ScwolError::Loop(_))));

        let mut b = ScwolBuilder::new();
        let (u, v, w) = (b.vertex("u"), b.vertex("v"), b.vertex("w"));
        b.edge("a", v, w);
        b.edge("b", u, v);
        assert_eq!(b.clone().build().unwrap_err(), ScwolError::MissingComposite(0, 1));
        b.edge("ab", u, w);
        b.compose(0, 1, 2);
        let s = b.build().unwrap();
        assert_eq!(s.composable_pairs(), &[(0, 1, 2)]);
        assert_eq!(s.dimension(), 2);
    }

    #[test]
    fn bad_composite_endpoints() {
        let mut b = ScwolBuilder::new();
        let (u, v, w) = (b.vertex("u"), b.vertex("v"), b.vertex("w"));
        b.edge("a", v, w);
        b.edge("b", u, v);
        b.edge("c", v, w);
        b.compose(0, 1, 2);
        assert_eq!(b.build().unwrap_err(), ScwolError::BadComposite { a: 0, b: 1 });
    }

    #[test]
    fn cone_over_segment_is_two_triangles() {
        let c = segment().cone("apex");
        assert_eq!(c.num_vertices(), 4);
        assert_eq!(c.num_edges(), 2 + 3);
        assert_eq!(c.composable_pairs().len(), 2);
        assert_eq!(c.chains(2).len(), 2);
        assert_eq!(c.dimension(), 2);
    }

    #[test]
    fn text_round_trip() {
        let c = segment().cone("apex");
        let t = c.to_text();
        let back = Scwol::from_text(&t).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), t);
    }

    #[test]
    fn join_of_points() {
        let j = Scwol::point("a").join(&Scwol::point("b"));
        assert_eq!(j.num_edges(), 1);
        assert_eq!(j.initial(0), 0);
        assert_eq!(j.terminal(0), 1);
    }
}
