//! Level-2 Hjelmslev planes around a vertex of a cyclic A2 building.
//!
//! Points are pairs `(j1, j3)` standing for `s1^j1 s3^j3 v2` with
//! `j3 not in -D`, lines are pairs `(k1, k2)` standing for `s1^k1 s2^k2 v3`
//! with `k2 not in D`. The projection `psi` keeps the first coordinate.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::ffield::{is_prime, prime_power};
use crate::geometry::{verify_generalized_ngon, GeometryError, IncidenceStructure};
use crate::report::VerificationReport;
use crate::singer::{verify_planar_difference_set, OrderedDifferenceSet};

#[derive(Debug, Error)]
pub enum HjelmslevError {
    #[error("difference sets must share modulus q^2+q+1 = {0}")]
    ModulusMismatch(u64),
    #[error("the three difference sets are not equal as sets")]
    DifferentSets,
    #[error("difference set {0} is not planar")]
    NotPlanar(usize),
    #[error("no residue avoids D and -D")]
    NoAdmissibleM,
    #[error("m = {0} lies in D or -D")]
    InvalidM(u64),
    #[error("no four points in general position")]
    NoQuadrangleFound,
    #[error("{0:?} is not an element of the plane")]
    UnknownElement(HjelmslevElement),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HPoint {
    pub j1: u64,
    pub j3: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HLine {
    pub k1: u64,
    pub k2: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HjelmslevElement {
    Point(HPoint),
    Line(HLine),
}

/// A point `s1^x v3` or line `s1^x v2` of the projective plane around `v1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseElement {
    Point(u64),
    Line(u64),
}

/// Which adjacency predicate fills the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// The closed formula for equal difference sets.
    Cyclic,
    /// Conditions (C1) and (C2) evaluated with the ordered sets.
    General,
}

/// Order in which [`substructure_closure_with`] visits pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Collect everything one round produces, then insert.
    Batched,
    /// Insert immediately, visiting pairs from the highest index down.
    Eager,
}

type Bits = Vec<u64>;

fn bits_new(n: usize) -> Bits {
    vec![0; n.div_ceil(64)]
}

fn bit(b: &Bits, i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(b: &mut Bits, i: usize, v: bool) {
    if v {
        b[i / 64] |= 1 << (i % 64);
    } else {
        b[i / 64] &= !(1 << (i % 64));
    }
}

fn common(a: &Bits, b: &Bits) -> (usize, Option<usize>) {
    let mut count = 0;
    let mut first = None;
    for (w, (x, y)) in a.iter().zip(b).enumerate() {
        let z = x & y;
        if z != 0 && first.is_none() {
            first = Some(w * 64 + z.trailing_zeros() as usize);
        }
        count += z.count_ones() as usize;
    }
    (count, first)
}

#[derive(Debug, Clone)]
pub struct HjelmslevPlane {
    q: u64,
    n: u64,
    delta: Vec<u64>,
    in_delta: Vec<bool>,
    orderings: [OrderedDifferenceSet; 3],
    points: Vec<HPoint>,
    lines: Vec<HLine>,
    point_index: HashMap<HPoint, usize>,
    line_index: HashMap<HLine, usize>,
    /// Per point, the adjacent lines.
    point_adj: Vec<Bits>,
    /// Per line, the adjacent points.
    line_adj: Vec<Bits>,
}

impl HjelmslevPlane {
    /// The plane for three ordered sets with a common underlying set, using
    /// the cyclic adjacency formula.
    pub fn new(q: u64, sets: [&OrderedDifferenceSet; 3]) -> Result<Self, HjelmslevError> {
        Self::with_criterion(q, sets, Criterion::Cyclic)
    }

    /// All three ordered sets equal to `d`.
    pub fn from_difference_set(q: u64, d: &OrderedDifferenceSet) -> Result<Self, HjelmslevError> {
        Self::new(q, [d, d, d])
    }

    pub fn with_criterion(
        q: u64,
        sets: [&OrderedDifferenceSet; 3],
        criterion: Criterion,
    ) -> Result<Self, HjelmslevError> {
        let n = q * q + q + 1;
        if sets.iter().any(|d| d.modulus() != n || d.len() as u64 != q + 1) {
            return Err(HjelmslevError::ModulusMismatch(n));
        }
        for (i, d) in sets.iter().enumerate() {
            if !verify_planar_difference_set(d).passed() {
                return Err(HjelmslevError::NotPlanar(i + 1));
            }
        }
        let delta = sets[0].sorted().entries().to_vec();
        if sets.iter().any(|d| d.sorted().entries() != delta) {
            return Err(HjelmslevError::DifferentSets);
        }
        let mut in_delta = vec![false; n as usize];
        for &d in &delta {
            in_delta[d as usize] = true;
        }
        let neg = |x: u64| (n - x) % n;
        let mut points = Vec::new();
        let mut lines = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if !in_delta[neg(b) as usize] {
                    points.push(HPoint { j1: a, j3: b });
                }
                if !in_delta[b as usize] {
                    lines.push(HLine { k1: a, k2: b });
                }
            }
        }
        let point_index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let line_index = lines.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut h = HjelmslevPlane {
            q,
            n,
            delta,
            in_delta,
            orderings: [sets[0].clone(), sets[1].clone(), sets[2].clone()],
            point_adj: vec![bits_new(lines.len()); points.len()],
            line_adj: vec![bits_new(points.len()); lines.len()],
            points,
            lines,
            point_index,
            line_index,
        };
        let rows: Vec<Vec<usize>> = (0..h.points.len())
            .into_par_iter()
            .map(|pi| {
                let p = h.points[pi];
                (0..h.lines.len())
                    .filter(|&li| match criterion {
                        Criterion::Cyclic => h.adjacency(p, h.lines[li]),
                        Criterion::General => h.adjacency_general(p, h.lines[li]),
                    })
                    .collect()
            })
            .collect();
        for (pi, row) in rows.into_iter().enumerate() {
            for li in row {
                h.set_adjacent(pi, li, true);
            }
        }
        Ok(h)
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    /// The common underlying set, sorted.
    pub fn difference_set(&self) -> &[u64] {
        &self.delta
    }

    pub fn points(&self) -> &[HPoint] {
        &self.points
    }

    pub fn lines(&self) -> &[HLine] {
        &self.lines
    }

    pub fn point_index(&self, p: HPoint) -> Option<usize> {
        self.point_index.get(&p).copied()
    }

    pub fn line_index(&self, l: HLine) -> Option<usize> {
        self.line_index.get(&l).copied()
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.n - b % self.n) % self.n
    }

    fn in_delta(&self, x: u64) -> bool {
        self.in_delta[(x % self.n) as usize]
    }

    /// `k1 - j1 in D` and some `n` lies in `(k2 - D) & (-j3 - D) & (k1 - j1 - D)`.
    pub fn adjacency(&self, p: HPoint, l: HLine) -> bool {
        let d = self.sub(l.k1, p.j1);
        if !self.in_delta(d) {
            return false;
        }
        let minus_j3 = self.sub(0, p.j3);
        self.delta.iter().any(|&e| {
            let m = self.sub(l.k2, e);
            self.in_delta(self.sub(minus_j3, m)) && self.in_delta(self.sub(d, m))
        })
    }

    /// Conditions (C1) and (C2) in exponent form: `k1 - j1 = d1(j)`, and some
    /// `i` has `n = d2(j) - d2(i)` in `k2 - D` with `d3(i) - d3(j) - j3` in
    /// `D`.
    pub fn adjacency_general(&self, p: HPoint, l: HLine) -> bool {
        let [o1, o2, o3] = &self.orderings;
        let d = self.sub(l.k1, p.j1);
        let Some(j) = o1.entries().iter().position(|&x| x == d) else {
            return false;
        };
        let (d2, d3) = (o2.entries()[j], o3.entries()[j]);
        (0..o2.len()).any(|i| {
            let m = self.sub(d2, o2.entries()[i]);
            let e3 = o3.entries()[i];
            o2.contains(self.sub(l.k2, m))
                && o3.contains(self.sub(self.sub(e3, d3), p.j3))
        })
    }

    /// Table lookup, reflecting any [`Self::flip_adjacency`].
    pub fn is_adjacent(&self, point: usize, line: usize) -> bool {
        bit(&self.point_adj[point], line)
    }

    fn set_adjacent(&mut self, point: usize, line: usize, v: bool) {
        set_bit(&mut self.point_adj[point], line, v);
        set_bit(&mut self.line_adj[line], point, v);
    }

    /// Toggles one entry of the adjacency table.
    pub fn flip_adjacency(&mut self, point: usize, line: usize) {
        let v = !self.is_adjacent(point, line);
        self.set_adjacent(point, line, v);
    }

    pub fn psi(&self, e: HjelmslevElement) -> u64 {
        match e {
            HjelmslevElement::Point(p) => p.j1,
            HjelmslevElement::Line(l) => l.k1,
        }
    }

    pub fn psi_base(&self, e: HjelmslevElement) -> BaseElement {
        match e {
            HjelmslevElement::Point(p) => BaseElement::Point(p.j1),
            HjelmslevElement::Line(l) => BaseElement::Line(l.k1),
        }
    }

    /// `s1^x v3 -> s1^x s3^-m v2` and `s1^x v2 -> s1^x s2^m v3`.
    pub fn iota(&self, x: BaseElement, m: u64) -> Result<HjelmslevElement, HjelmslevError> {
        let m = m % self.n;
        if self.in_delta(m) || self.in_delta(self.sub(0, m)) {
            return Err(HjelmslevError::InvalidM(m));
        }
        Ok(match x {
            BaseElement::Point(s) => HjelmslevElement::Point(HPoint {
                j1: s % self.n,
                j3: self.sub(0, m),
            }),
            BaseElement::Line(t) => HjelmslevElement::Line(HLine {
                k1: t % self.n,
                k2: m,
            }),
        })
    }

    /// Incidence in the base plane: `t - s in D`.
    pub fn base_incident(&self, point: u64, line: u64) -> bool {
        self.in_delta(self.sub(line, point))
    }

    /// The base plane, line `t` holding the points `t - D`.
    pub fn base_plane(&self) -> Result<IncidenceStructure, HjelmslevError> {
        let lines: Vec<Vec<usize>> = (0..self.n)
            .map(|t| self.delta.iter().map(|&d| self.sub(t, d) as usize).collect())
            .collect();
        Ok(IncidenceStructure::from_lines(self.n as usize, &lines)?)
    }

    /// The adjacency table as an incidence structure.
    pub fn to_incidence(&self) -> Result<IncidenceStructure, HjelmslevError> {
        let flags = (0..self.points.len())
            .flat_map(|p| (0..self.lines.len()).filter(move |&l| self.is_adjacent(p, l)).map(move |l| (p, l)));
        Ok(IncidenceStructure::new(self.points.len(), self.lines.len(), flags)?)
    }

    /// Point and line coordinates followed by the incidence text.
    pub fn export(&self) -> Result<String, HjelmslevError> {
        let mut s = format!("# q = {}, D = {:?}\n", self.q, self.delta);
        for (i, p) in self.points.iter().enumerate() {
            s.push_str(&format!("# point {i} = ({}, {})\n", p.j1, p.j3));
        }
        for (i, l) in self.lines.iter().enumerate() {
            s.push_str(&format!("# line {i} = ({}, {})\n", l.k1, l.k2));
        }
        s.push_str(&self.to_incidence()?.to_text());
        Ok(s)
    }
}

/// The smallest residue outside `D` and `-D`.
pub fn choose_m(delta: &[u64], n: u64) -> Result<u64, HjelmslevError> {
    let bad: BTreeSet<u64> = delta
        .iter()
        .flat_map(|&d| [d % n, (n - d % n) % n])
        .collect();
    (0..n).find(|m| !bad.contains(m)).ok_or(HjelmslevError::NoAdmissibleM)
}

/// Observed numbers of common neighbours, split by whether the two
/// elements have the same image under `psi`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CmszTally {
    pub points_distinct: BTreeSet<usize>,
    pub points_same: BTreeSet<usize>,
    pub lines_distinct: BTreeSet<usize>,
    pub lines_same: BTreeSet<usize>,
    /// Up to ten offending pairs per category.
    pub violations: Vec<String>,
}

fn tally_side(
    rows: &[Bits],
    psi: &(dyn Fn(usize) -> u64 + Sync),
    q: usize,
    kind: &str,
) -> (BTreeSet<usize>, BTreeSet<usize>, Vec<String>) {
    let parts: Vec<(BTreeSet<usize>, BTreeSet<usize>, Vec<String>)> = (0..rows.len())
        .into_par_iter()
        .map(|a| {
            let (mut distinct, mut same, mut bad) = (BTreeSet::new(), BTreeSet::new(), Vec::new());
            for b in a + 1..rows.len() {
                let (c, _) = common(&rows[a], &rows[b]);
                let eq = psi(a) == psi(b);
                if eq {
                    same.insert(c);
                } else {
                    distinct.insert(c);
                }
                if c != if eq { q } else { 1 } && bad.len() < 10 {
                    bad.push(format!("{kind} {a}, {b}: {c} common"));
                }
            }
            (distinct, same, bad)
        })
        .collect();
    let mut out = (BTreeSet::new(), BTreeSet::new(), Vec::new());
    for (d, s, b) in parts {
        out.0.extend(d);
        out.1.extend(s);
        if out.2.len() < 10 {
            out.2.extend(b.into_iter().take(10 - out.2.len()));
        }
    }
    out
}

pub fn cmsz_tally(h: &HjelmslevPlane) -> CmszTally {
    let q = h.q as usize;
    let (pd, ps, mut bad) = tally_side(&h.point_adj, &|i| h.points[i].j1, q, "points");
    let (ld, ls, bad2) = tally_side(&h.line_adj, &|i| h.lines[i].k1, q, "lines");
    bad.extend(bad2);
    CmszTally {
        points_distinct: pd,
        points_same: ps,
        lines_distinct: ld,
        lines_same: ls,
        violations: bad,
    }
}

/// Two points with different `psi` images share one line and two with equal
/// images share `q`; dually for lines.
pub fn cmsz_counts(h: &HjelmslevPlane) -> VerificationReport {
    let t = cmsz_tally(h);
    let q = h.q as usize;
    let mut r = VerificationReport::new(format!("common neighbours, q={}", h.q));
    let one = BTreeSet::from([1]);
    let qs = BTreeSet::from([q]);
    r.check("points-distinct-psi", t.points_distinct == one, format!("{:?}", t.points_distinct));
    r.check("points-same-psi", t.points_same == qs, format!("{:?}", t.points_same));
    r.check("lines-distinct-psi", t.lines_distinct == one, format!("{:?}", t.lines_distinct));
    r.check("lines-same-psi", t.lines_same == qs, format!("{:?}", t.lines_same));
    if !t.violations.is_empty() {
        r.check("violations", false, t.violations.join("; "));
    }
    r
}

/// `psi o iota = id`, and `iota` maps flags to adjacent pairs and non-flags
/// to non-adjacent pairs.
pub fn iota_report(h: &HjelmslevPlane, m: u64) -> Result<VerificationReport, HjelmslevError> {
    let mut r = VerificationReport::new(format!("splitting map, q={}, m={m}", h.q));
    let mut section = true;
    let mut preserved = true;
    for s in 0..h.n {
        let p = h.iota(BaseElement::Point(s), m)?;
        let l = h.iota(BaseElement::Line(s), m)?;
        section &= h.psi_base(p) == BaseElement::Point(s) && h.psi_base(l) == BaseElement::Line(s);
        let HjelmslevElement::Point(p) = p else { unreachable!() };
        let pi = h.point_index(p).ok_or(HjelmslevError::UnknownElement(HjelmslevElement::Point(p)))?;
        for t in 0..h.n {
            let HjelmslevElement::Line(l) = h.iota(BaseElement::Line(t), m)? else { unreachable!() };
            let li = h.line_index(l).ok_or(HjelmslevError::UnknownElement(HjelmslevElement::Line(l)))?;
            preserved &= h.is_adjacent(pi, li) == h.base_incident(s, t);
        }
    }
    r.check("psi-iota-identity", section, format!("{} points and lines", h.n));
    r.check("incidence-preserved", preserved, format!("{} pairs", h.n * h.n));
    Ok(r)
}

pub fn substructure_closure(h: &HjelmslevPlane, seeds: &[HPoint]) -> (BTreeSet<HPoint>, BTreeSet<HLine>) {
    substructure_closure_with(h, seeds, &[], Schedule::Batched)
}

/// Adds the unique common line of every two points with distinct `psi`
/// images and the unique common point of every two such lines, until
/// nothing changes. Unknown seeds are ignored.
pub fn substructure_closure_with(
    h: &HjelmslevPlane,
    points: &[HPoint],
    lines: &[HLine],
    schedule: Schedule,
) -> (BTreeSet<HPoint>, BTreeSet<HLine>) {
    let mut ps: BTreeSet<usize> = points.iter().filter_map(|&p| h.point_index(p)).collect();
    let mut ls: BTreeSet<usize> = lines.iter().filter_map(|&l| h.line_index(l)).collect();
    let meet = |rows: &[Bits], a: usize, b: usize| match common(&rows[a], &rows[b]) {
        (1, x) => x,
        _ => None,
    };
    loop {
        let mut changed = false;
        match schedule {
            Schedule::Batched => {
                let pv: Vec<usize> = ps.iter().copied().collect();
                let lv: Vec<usize> = ls.iter().copied().collect();
                let mut new_lines = Vec::new();
                let mut new_points = Vec::new();
                for (i, &a) in pv.iter().enumerate() {
                    for &b in &pv[i + 1..] {
                        if h.points[a].j1 != h.points[b].j1 {
                            new_lines.extend(meet(&h.point_adj, a, b));
                        }
                    }
                }
                for (i, &a) in lv.iter().enumerate() {
                    for &b in &lv[i + 1..] {
                        if h.lines[a].k1 != h.lines[b].k1 {
                            new_points.extend(meet(&h.line_adj, a, b));
                        }
                    }
                }
                for l in new_lines {
                    changed |= ls.insert(l);
                }
                for p in new_points {
                    changed |= ps.insert(p);
                }
            }
            Schedule::Eager => {
                let pv: Vec<usize> = ps.iter().rev().copied().collect();
                for (i, &a) in pv.iter().enumerate() {
                    for &b in &pv[i + 1..] {
                        if h.points[a].j1 != h.points[b].j1 {
                            if let Some(l) = meet(&h.point_adj, a, b) {
                                changed |= ls.insert(l);
                            }
                        }
                    }
                }
                let lv: Vec<usize> = ls.iter().rev().copied().collect();
                for (i, &a) in lv.iter().enumerate() {
                    for &b in &lv[i + 1..] {
                        if h.lines[a].k1 != h.lines[b].k1 {
                            if let Some(p) = meet(&h.line_adj, a, b) {
                                changed |= ps.insert(p);
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (
        ps.into_iter().map(|i| h.points[i]).collect(),
        ls.into_iter().map(|i| h.lines[i]).collect(),
    )
}

/// The lexicographically first four base points with no three on a line.
pub fn general_position_quadruple(h: &HjelmslevPlane) -> Result<[u64; 4], HjelmslevError> {
    let n = h.n;
    let collinear = |a: u64, b: u64, c: u64| {
        (0..n).any(|t| h.base_incident(a, t) && h.base_incident(b, t) && h.base_incident(c, t))
    };
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if collinear(a, b, c) {
                    continue;
                }
                for d in c + 1..n {
                    if !collinear(a, b, d) && !collinear(a, c, d) && !collinear(b, c, d) {
                        return Ok([a, b, c, d]);
                    }
                }
            }
        }
    }
    Err(HjelmslevError::NoQuadrangleFound)
}

/// Outcome of [`qp_discrimination`].
#[derive(Debug, Clone)]
pub struct Discrimination {
    pub m: u64,
    pub base_points: [u64; 4],
    pub closure_points: usize,
    pub closure_lines: usize,
    pub report: VerificationReport,
    /// Drawn only when `q` is prime.
    pub conclusion: Option<String>,
}

/// Closes the `iota` images of four base points in general position and
/// checks that the result is a projective plane of order `p`, the
/// characteristic, inside the image of `iota` and strictly smaller than the
/// whole plane. For prime `q` the closure is the whole image.
pub fn qp_discrimination(h: &HjelmslevPlane) -> Result<Discrimination, HjelmslevError> {
    let m = choose_m(&h.delta, h.n)?;
    let base = general_position_quadruple(h)?;
    let seeds: Vec<HPoint> = base
        .iter()
        .map(|&s| match h.iota(BaseElement::Point(s), m) {
            Ok(HjelmslevElement::Point(p)) => Ok(p),
            Ok(_) => unreachable!(),
            Err(e) => Err(e),
        })
        .collect::<Result<_, _>>()?;
    let (ps, ls) = substructure_closure(h, &seeds);
    let (ps2, ls2) = substructure_closure_with(h, &seeds, &[], Schedule::Eager);
    let mut r = VerificationReport::new(format!("substructure of four points, q={}", h.q));
    let p = prime_power(h.q).map_or(h.q, |(p, _)| p as u64);
    let plane_size = (p * p + p + 1) as usize;
    r.check(
        "schedules-agree",
        ps == ps2 && ls == ls2,
        format!("{} / {} points", ps.len(), ps2.len()),
    );
    r.check(
        "closure-points",
        ps.len() == plane_size,
        format!("{} (want {plane_size})", ps.len()),
    );
    r.check(
        "closure-lines",
        ls.len() == plane_size,
        format!("{} (want {plane_size})", ls.len()),
    );
    let image_points: BTreeSet<HPoint> = (0..h.n)
        .map(|s| HPoint {
            j1: s,
            j3: h.sub(0, m),
        })
        .collect();
    let image_lines: BTreeSet<HLine> = (0..h.n).map(|t| HLine { k1: t, k2: m }).collect();
    if p == h.q {
        r.check(
            "closure-is-image",
            ps == image_points && ls == image_lines,
            format!("m = {m}"),
        );
    } else {
        r.check(
            "closure-in-image",
            ps.is_subset(&image_points) && ls.is_subset(&image_lines),
            format!("m = {m}, image has {} points", image_points.len()),
        );
    }
    let pv: Vec<HPoint> = ps.iter().copied().collect();
    let lv: Vec<HLine> = ls.iter().copied().collect();
    let mut flags = Vec::new();
    for (i, &p) in pv.iter().enumerate() {
        let pi = h.point_index(p).expect("closure stays in the plane");
        for (j, &l) in lv.iter().enumerate() {
            if h.is_adjacent(pi, h.line_index(l).expect("closure stays in the plane")) {
                flags.push((i, j));
            }
        }
    }
    let induced = IncidenceStructure::new(pv.len(), lv.len(), flags)?;
    let check = verify_generalized_ngon(&induced, 3);
    let p = p as usize;
    r.check(
        "projective-plane",
        check.passed() && check.order == Some((p, p)),
        format!("order {:?}", check.order),
    );
    r.check(
        "proper-subset",
        ps.len() < h.points.len(),
        format!("{} of {}", ps.len(), h.points.len()),
    );
    let conclusion = (is_prime(h.q) && r.passed()).then(|| {
        format!(
            "the substructure generated by four points in general position is a projective plane \
             of order {}, so the building is not the one of PSL3(Q_{})",
            h.q, h.q
        )
    });
    Ok(Discrimination {
        m,
        base_points: base,
        closure_points: ps.len(),
        closure_lines: ls.len(),
        report: r,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(q: u64, text: &str) -> HjelmslevPlane {
        HjelmslevPlane::from_difference_set(q, &OrderedDifferenceSet::parse_planar(text).unwrap()).unwrap()
    }

    /// Brute-force version of the cyclic formula: enumerate `n` over all
    /// residues and test the three memberships directly.
    fn adjacency_oracle(n: u64, delta: &[u64], p: HPoint, l: HLine) -> bool {
        let has = |x: u64| delta.contains(&(x % n));
        let d = (l.k1 + n - p.j1) % n;
        has(d)
            && (0..n).any(|m| {
                let in_a = delta.iter().any(|&e| (l.k2 + n - e) % n == m);
                let in_b = delta.iter().any(|&e| (2 * n - p.j3 - e) % n == m);
                let in_c = delta.iter().any(|&e| (d + n - e) % n == m);
                in_a && in_b && in_c
            })
    }

    #[test]
    fn sizes() {
        for (q, t) in [(2, "0,1,3"), (3, "0,1,3,9")] {
            let h = plane(q, t);
            let expect = (q * q * (q * q + q + 1)) as usize;
            assert_eq!(h.points().len(), expect);
            assert_eq!(h.lines().len(), expect);
        }
    }

    #[test]
    fn formula_matches_oracle() {
        let h = plane(2, "0,1,3");
        for &p in h.points() {
            for &l in h.lines() {
                assert_eq!(h.adjacency(p, l), adjacency_oracle(7, &[0, 1, 3], p, l));
            }
        }
        let p = HPoint { j1: 0, j3: 1 };
        let l = HLine { k1: 0, k2: 2 };
        assert_eq!(h.adjacency(p, l), adjacency_oracle(7, &[0, 1, 3], p, l));
        assert!(!h.adjacency(p, HLine { k1: 2, k2: 2 }));
    }

    #[test]
    fn general_agrees_with_cyclic_for_aligned_orderings() {
        let d = OrderedDifferenceSet::parse_planar("0,1,3").unwrap();
        let a = HjelmslevPlane::new(2, [&d, &d, &d]).unwrap();
        let b = HjelmslevPlane::with_criterion(2, [&d, &d, &d], Criterion::General).unwrap();
        assert_eq!(a.to_incidence().unwrap(), b.to_incidence().unwrap());
    }

    #[test]
    fn choose_m_examples() {
        assert_eq!(choose_m(&[0, 1, 3], 7).unwrap(), 2);
        assert_eq!(choose_m(&[0, 1, 3, 9], 13).unwrap(), 2);
        assert!(matches!(choose_m(&[0, 1, 2], 3), Err(HjelmslevError::NoAdmissibleM)));
    }

    #[test]
    fn iota_rejects_bad_m() {
        let h = plane(2, "0,1,3");
        assert!(matches!(h.iota(BaseElement::Point(0), 1), Err(HjelmslevError::InvalidM(1))));
        assert!(matches!(h.iota(BaseElement::Point(0), 6), Err(HjelmslevError::InvalidM(6))));
        assert!(iota_report(&h, 2).unwrap().passed());
    }

    #[test]
    fn cmsz_and_fault() {
        let mut h = plane(2, "0,1,3");
        assert!(cmsz_counts(&h).passed());
        h.flip_adjacency(0, 0);
        let r = cmsz_counts(&h);
        assert!(!r.passed());
    }

    #[test]
    fn closure_small_cases() {
        let h = plane(2, "0,1,3");
        let p = h.points()[0];
        let (ps, ls) = substructure_closure(&h, &[p]);
        assert_eq!(ps.len(), 1);
        assert!(ls.is_empty());
        let m = choose_m(h.difference_set(), 7).unwrap();
        let a = HPoint { j1: 0, j3: 7 - m };
        let b = HPoint { j1: 1, j3: 7 - m };
        let (ps, ls) = substructure_closure(&h, &[a, b]);
        assert_eq!((ps.len(), ls.len()), (2, 1));
    }

    #[test]
    fn discrimination_q2() {
        let h = plane(2, "0,1,3");
        let d = qp_discrimination(&h).unwrap();
        assert!(d.report.passed(), "{}", d.report);
        assert_eq!((d.closure_points, d.closure_lines), (7, 7));
        assert!(d.conclusion.is_some());
    }

    #[test]
    fn discrimination_q4_closes_to_prime_subplane() {
        let h = plane(4, "0,1,4,14,16");
        let d = qp_discrimination(&h).unwrap();
        assert!(d.report.passed(), "{}", d.report);
        assert_eq!((d.closure_points, d.closure_lines), (7, 7));
        assert!(d.report.get("closure-in-image").is_some());
        assert!(d.conclusion.is_none());
    }

    #[test]
    fn unequal_sets_rejected() {
        let d = OrderedDifferenceSet::parse_planar("0,1,3").unwrap();
        let e = OrderedDifferenceSet::parse_planar("0,1,5").unwrap();
        assert!(matches!(
            HjelmslevPlane::new(2, [&d, &e, &d]),
            Err(HjelmslevError::DifferentSets)
        ));
    }

    #[test]
    fn export_round_trips() {
        let h = plane(2, "0,1,3");
        let text = h.export().unwrap();
        let back = IncidenceStructure::from_text(&text).unwrap();
        assert_eq!(back, h.to_incidence().unwrap());
    }
}
