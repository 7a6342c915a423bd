//! Incidence structures, their bipartite incidence graphs and the
//! generalised-polygon axioms.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::cog::{Scwol, ScwolBuilder};
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("flag ({point}, {line}) out of range for {points} points and {lines} lines")]
    FlagOutOfRange {
        point: usize,
        line: usize,
        points: usize,
        lines: usize,
    },
    #[error("duplicate flag ({0}, {1})")]
    DuplicateFlag(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
    #[error("malformed incidence text at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Points `0..num_points`, lines `0..num_lines` and a set of flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceStructure {
    num_points: usize,
    num_lines: usize,
    flags: Vec<(usize, usize)>,
    point_lines: Vec<Vec<usize>>,
    line_points: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    /// Flags are stored sorted; duplicates and out-of-range indices are errors.
    pub fn new(
        num_points: usize,
        num_lines: usize,
        flags: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GeometryError> {
        let mut flags: Vec<(usize, usize)> = flags.into_iter().collect();
        for &(p, l) in &flags {
            if p >= num_points || l >= num_lines {
                return Err(GeometryError::FlagOutOfRange {
                    point: p,
                    line: l,
                    points: num_points,
                    lines: num_lines,
                });
            }
        }
        flags.sort_unstable();
        if let Some(w) = flags.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::DuplicateFlag(w[0].0, w[0].1));
        }
        let mut point_lines = vec![Vec::new(); num_points];
        let mut line_points = vec![Vec::new(); num_lines];
        for &(p, l) in &flags {
            point_lines[p].push(l);
            line_points[l].push(p);
        }
        Ok(IncidenceStructure {
            num_points,
            num_lines,
            flags,
            point_lines,
            line_points,
        })
    }

    /// Builds a structure from the point sets of its lines.
    pub fn from_lines(num_points: usize, lines: &[Vec<usize>]) -> Result<Self, GeometryError> {
        let flags = lines
            .iter()
            .enumerate()
            .flat_map(|(l, pts)| pts.iter().map(move |&p| (p, l)));
        IncidenceStructure::new(num_points, lines.len(), flags)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.num_lines
    }

    pub fn flags(&self) -> &[(usize, usize)] {
        &self.flags
    }

    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    pub fn points_on(&self, l: usize) -> &[usize] {
        &self.line_points[l]
    }

    pub fn incident(&self, p: usize, l: usize) -> bool {
        self.point_lines[p].binary_search(&l).is_ok()
    }

    /// Dual structure: lines become points and vice versa.
    pub fn dual(&self) -> IncidenceStructure {
        IncidenceStructure::new(
            self.num_lines,
            self.num_points,
            self.flags.iter().map(|&(p, l)| (l, p)),
        )
        .unwrap()
    }

    /// `points n lines m` then one `flag p l` per line, flags sorted. Lines
    /// starting with `#` are ignored when parsing.
    pub fn to_text(&self) -> String {
        let mut s = format!("points {} lines {}\n", self.num_points, self.num_lines);
        for &(p, l) in &self.flags {
            let _ = writeln!(s, "flag {p} {l}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GeometryError> {
        let err = |line: usize, reason: &str| GeometryError::Parse {
            line: line + 1,
            reason: reason.into(),
        };
        let mut header = None;
        let mut flags = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                [first, ..] if first.starts_with('#') => {}
                ["points", p, "lines", l] if header.is_none() => {
                    let p = p.parse().map_err(|_| err(n, "bad point count"))?;
                    let l = l.parse().map_err(|_| err(n, "bad line count"))?;
                    header = Some((p, l));
                }
                ["flag", p, l] if header.is_some() => {
                    let p = p.parse().map_err(|_| err(n, "bad point index"))?;
                    let l = l.parse().map_err(|_| err(n, "bad line index"))?;
                    flags.push((p, l));
                }
                _ => return Err(err(n, "unrecognised line")),
            }
        }
        let (p, l) = header.ok_or_else(|| err(0, "missing header"))?;
        IncidenceStructure::new(p, l, flags)
    }
}

/// The `k`-gon with every point on every line: `k` points, `k` lines.
/// Its incidence graph is `K_{k,k}`, a generalised 2-gon.
pub fn complete_bipartite(k: usize) -> IncidenceStructure {
    IncidenceStructure::new(k, k, (0..k).flat_map(|p| (0..k).map(move |l| (p, l)))).unwrap()
}

/// The Fano plane on the lines `{i, i+1, i+3} mod 7`.
pub fn fano_plane() -> IncidenceStructure {
    let lines: Vec<Vec<usize>> = (0..7)
        .map(|i| {
            let mut l = vec![i, (i + 1) % 7, (i + 3) % 7];
            l.sort_unstable();
            l
        })
        .collect();
    IncidenceStructure::from_lines(7, &lines).unwrap()
}

/// Undirected bipartite graph: vertices `0..points` are point-vertices,
/// `points..points+lines` are line-vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    num_points: usize,
    num_lines: usize,
    adjacency: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn num_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency[..self.num_points].iter().map(Vec::len).sum()
    }

    pub fn partition_sizes(&self) -> (usize, usize) {
        (self.num_points, self.num_lines)
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn is_point_vertex(&self, v: usize) -> bool {
        v < self.num_points
    }
}

pub fn incidence_graph(i: &IncidenceStructure) -> BipartiteGraph {
    let np = i.num_points;
    let mut adjacency = vec![Vec::new(); np + i.num_lines];
    for &(p, l) in &i.flags {
        adjacency[p].push(np + l);
        adjacency[np + l].push(p);
    }
    BipartiteGraph {
        num_points: np,
        num_lines: i.num_lines,
        adjacency,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphMetrics {
    pub diameter: usize,
    /// `None` for forests.
    pub girth: Option<usize>,
}

/// Breadth-first search from `root`, returning eccentricity (or `None` if
/// some vertex is unreachable) and the shortest cycle through any non-tree
/// edge seen.
fn bfs_from(g: &BipartiteGraph, root: usize) -> (Option<usize>, Option<usize>) {
    let n = g.num_vertices();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut ecc = 0;
    let mut cycle: Option<usize> = None;
    while let Some(u) = queue.pop_front() {
        ecc = ecc.max(dist[u]);
        for &w in &g.adjacency[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if parent[u] != w {
                let len = dist[u] + dist[w] + 1;
                cycle = Some(cycle.map_or(len, |c| c.min(len)));
            }
        }
    }
    let connected = dist.iter().all(|&d| d != usize::MAX);
    (connected.then_some(ecc), cycle)
}

/// Exact diameter and girth by BFS from every vertex.
pub fn graph_metrics(g: &BipartiteGraph) -> Result<GraphMetrics, GeometryError> {
    if g.num_vertices() == 0 {
        return Err(GeometryError::Empty);
    }
    let results: Vec<(Option<usize>, Option<usize>)> = (0..g.num_vertices())
        .into_par_iter()
        .map(|v| bfs_from(g, v))
        .collect();
    let mut diameter = 0;
    let mut girth: Option<usize> = None;
    for (ecc, cyc) in results {
        diameter = diameter.max(ecc.ok_or(GeometryError::Disconnected)?);
        if let Some(c) = cyc {
            girth = Some(girth.map_or(c, |g| g.min(c)));
        }
    }
    if let Some(gi) = girth {
        assert!(gi % 2 == 0, "bipartite graph with odd girth {gi}");
    }
    Ok(GraphMetrics { diameter, girth })
}

/// Outcome of [`verify_generalized_ngon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonCheck {
    pub n: usize,
    pub metrics: Option<GraphMetrics>,
    /// `(s, t)`: lines have `s + 1` points and points lie on `t + 1` lines.
    pub order: Option<(usize, usize)>,
    pub thick: bool,
    pub report: VerificationReport,
}

impl PolygonCheck {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Checks diameter `n` and girth `2n` of the incidence graph, and reports
/// order and thickness.
pub fn verify_generalized_ngon(i: &IncidenceStructure, n: usize) -> PolygonCheck {
    let mut report = VerificationReport::new(format!("generalised {n}-gon"));
    let g = incidence_graph(i);
    let metrics = graph_metrics(&g).ok();
    match metrics {
        Some(m) => {
            report.check("diameter", m.diameter == n, format!("{} (want {n})", m.diameter));
            let shown = m.girth.map_or("none".to_string(), |x| x.to_string());
            report.check("girth", m.girth == Some(2 * n), format!("{shown} (want {})", 2 * n));
        }
        None => {
            report.check("connected", false, "incidence graph is empty or disconnected");
        }
    }
    let line_sizes: BTreeSet<usize> = i.line_points.iter().map(Vec::len).collect();
    let point_degrees: BTreeSet<usize> = i.point_lines.iter().map(Vec::len).collect();
    let order = match (line_sizes.len(), point_degrees.len()) {
        (1, 1) => {
            let s1 = *line_sizes.iter().next().unwrap();
            let t1 = *point_degrees.iter().next().unwrap();
            (s1 >= 1 && t1 >= 1).then(|| (s1 - 1, t1 - 1))
        }
        _ => None,
    };
    let thick = g.adjacency.iter().all(|a| a.len() >= 3);
    if let Some((s, t)) = order {
        report.check(
            "flag-count",
            i.flags.len() == i.num_points * (t + 1) && i.flags.len() == i.num_lines * (s + 1),
            format!("{} flags", i.flags.len()),
        );
        if report.passed() {
            assert_eq!(i.flags.len(), i.num_points * (t + 1));
            assert_eq!(i.flags.len(), i.num_lines * (s + 1));
        }
    }
    PolygonCheck {
        n,
        metrics,
        order,
        thick,
        report,
    }
}

/// The scwol `Z(I)`: vertices are points, lines and flags (named `p*`, `l*`,
/// `f*`), with edges from each flag to its point and to its line.
pub fn scwol_of_incidence(i: &IncidenceStructure) -> Scwol {
    let mut b = ScwolBuilder::new();
    for p in 0..i.num_points {
        b.vertex(format!("p{p}"));
    }
    for l in 0..i.num_lines {
        b.vertex(format!("l{l}"));
    }
    let base = i.num_points + i.num_lines;
    for (k, _) in i.flags.iter().enumerate() {
        b.vertex(format!("f{k}"));
    }
    for (k, &(p, l)) in i.flags.iter().enumerate() {
        b.edge(format!("p{p}<-f{k}"), base + k, p);
        b.edge(format!("l{l}<-f{k}"), base + k, i.num_points + l);
    }
    b.build().expect("height-one scwols have no composable pairs")
}
