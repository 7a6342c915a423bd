//! Singer polygons: classical projective planes with their cyclic Singer
//! groups and difference sets, and slanted symplectic quadrangles with the
//! group `E`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ffield::{is_prime, prime_power, FieldElement, FieldError, FieldSpec};
use crate::geometry::{verify_generalized_ngon, GeometryError, IncidenceStructure};
use crate::group::{abelian_relators, FiniteGroup, GroupError};
use crate::presentation::{Presentation, Word};
use crate::report::VerificationReport;

/// Largest plane order accepted by [`classical_plane`].
pub const MAX_PLANE_ORDER: u64 = 64;
/// Largest quadrangle order accepted by [`slanted_quadrangle`].
pub const MAX_QUADRANGLE_ORDER: u64 = 16;

#[derive(Debug, Error)]
pub enum SingerError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("order {q} exceeds the configured maximum {max}")]
    OrderTooLarge { q: u64, max: u64 },
    #[error("point {point} is not incident with line {line}")]
    NotIncident { point: usize, line: usize },
    #[error("order {0} is not supported here")]
    UnsupportedOrder(u64),
    #[error("line {0} is not a line representative")]
    NotARepresentative(usize),
    #[error("invalid difference set: {0}")]
    InvalidDifferenceSet(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn check_order(q: u64, max: u64) -> Result<(u32, u32), SingerError> {
    let (p, e) = prime_power(q).ok_or(SingerError::NotPrimePower(q))?;
    if q > max {
        return Err(SingerError::OrderTooLarge { q, max });
    }
    Ok((p, e))
}

// ---------------------------------------------------------------------------
// Projective planes

/// PG(2, q) realised on `GF(q^3)^x / GF(q)^x`, with the Singer cycle given by
/// multiplication with a primitive element `w`. Point `k` is the class of
/// `w^k`.
#[derive(Debug, Clone)]
pub struct SingerPlane {
    q: u64,
    cubic: FieldSpec,
    structure: IncidenceStructure,
    line_cycle: Vec<usize>,
}

/// Builds the classical plane of order `q`.
///
/// Lines are the kernels of `x -> Tr(a x)` for `a` in `GF(q^3)^x`, where `Tr`
/// is the trace to `GF(q)`, sorted by their point sets.
pub fn classical_plane(q: u64) -> Result<SingerPlane, SingerError> {
    let (p, e) = check_order(q, MAX_PLANE_ORDER)?;
    let cubic = FieldSpec::with_degree(p, 3 * e)?;
    let n = (q * q + q + 1) as usize;
    let trace = |y: FieldElement| {
        let yq = cubic.pow(y, q);
        let yqq = cubic.pow(yq, q);
        cubic.add(cubic.add(y, yq), yqq)
    };
    let on_base: Vec<bool> = (0..n).map(|k| trace(cubic.exp(k as u64)).is_zero()).collect();
    let mut lines: Vec<Vec<usize>> = (0..n)
        .map(|m| (0..n).filter(|&k| on_base[(k + m) % n]).collect())
        .collect();
    lines.sort();
    lines.dedup();
    debug_assert_eq!(lines.len(), n);
    let index: HashMap<&[usize], usize> =
        lines.iter().enumerate().map(|(i, l)| (l.as_slice(), i)).collect();
    let line_cycle = lines
        .iter()
        .map(|l| {
            let mut s: Vec<usize> = l.iter().map(|&k| (k + 1) % n).collect();
            s.sort_unstable();
            index[s.as_slice()]
        })
        .collect();
    let structure = IncidenceStructure::from_lines(n, &lines)?;
    Ok(SingerPlane {
        q,
        cubic,
        structure,
        line_cycle,
    })
}

impl SingerPlane {
    pub fn order(&self) -> u64 {
        self.q
    }

    /// `n = q^2 + q + 1`.
    pub fn modulus(&self) -> u64 {
        self.q * self.q + self.q + 1
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    /// The field `GF(q^3)`.
    pub fn cubic_field(&self) -> &FieldSpec {
        &self.cubic
    }

    /// Representative `w^k` of point `k`.
    pub fn point_label(&self, k: usize) -> FieldElement {
        self.cubic.exp(k as u64)
    }

    /// The Singer cycle on points: `k -> k + 1`.
    pub fn cycle_on_points(&self) -> Vec<usize> {
        let n = self.modulus() as usize;
        (0..n).map(|k| (k + 1) % n).collect()
    }

    /// The Singer cycle on lines.
    pub fn cycle_on_lines(&self) -> &[usize] {
        &self.line_cycle
    }

    /// `sigma^k` applied to a line.
    pub fn shift_line(&self, line: usize, k: u64) -> usize {
        let mut l = line;
        for _ in 0..k % self.modulus() {
            l = self.line_cycle[l];
        }
        l
    }

    /// Plane axioms, order, and regularity of the cycle on points and lines.
    pub fn verify(&self) -> VerificationReport {
        let mut r = VerificationReport::new(format!("classical plane of order {}", self.q));
        let poly = verify_generalized_ngon(&self.structure, 3);
        let q = self.q as usize;
        r.check(
            "order",
            poly.order == Some((q, q)),
            format!("{:?}", poly.order),
        );
        r.absorb("3-gon", poly.report);
        let n = self.modulus() as usize;
        let points = self.cycle_on_points();
        let powers: Vec<usize> = (0..n).collect();
        let on_points = verify_regular_action(&powers, |&k, x| (x + k) % n, n);
        r.absorb("points", on_points);
        let mut line_powers = vec![(0..n).collect::<Vec<usize>>()];
        for k in 1..n {
            let prev = &line_powers[k - 1];
            line_powers.push(prev.iter().map(|&l| self.line_cycle[l]).collect());
        }
        let on_lines = verify_regular_action(&line_powers, |perm, l| perm[l], n);
        r.absorb("lines", on_lines);
        let wraps = (0..n).all(|l| self.line_cycle[line_powers[n - 1][l]] == l)
            && (0..n).all(|x| points[(x + n - 1) % n] == x);
        r.check("cycle-order", wraps, format!("sigma^{n} = 1"));
        let preserves = self.structure.flags().iter().all(|&(p, l)| {
            self.structure.incident(points[p], self.line_cycle[l])
        });
        r.check("cycle-is-collineation", preserves, "");
        r
    }

    /// Key-value metadata accompanying the incidence text.
    pub fn metadata(&self, d: &OrderedDifferenceSet) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "cubic_modulus = {}", self.cubic.modulus_string());
        let _ = writeln!(s, "primitive = {}", self.cubic.primitive_element());
        let _ = writeln!(s, "modulus = {}", d.modulus());
        let _ = writeln!(s, "difference_set = {}", d.entries_string());
        s
    }
}

/// First point of the first line.
pub fn canonical_base_flag(plane: &SingerPlane) -> (usize, usize) {
    (plane.structure.points_on(0)[0], 0)
}

// ---------------------------------------------------------------------------
// Difference sets

/// An ordered difference set `delta(0), ..., delta(q)` modulo `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderedDifferenceSet {
    modulus: u64,
    entries: Vec<u64>,
}

impl OrderedDifferenceSet {
    /// Requires distinct residues below `modulus`; the difference property is
    /// checked separately by [`verify_planar_difference_set`].
    pub fn new(modulus: u64, entries: Vec<u64>) -> Result<Self, SingerError> {
        if modulus == 0 {
            return Err(SingerError::InvalidDifferenceSet("modulus 0".into()));
        }
        if let Some(x) = entries.iter().find(|&&x| x >= modulus) {
            return Err(SingerError::InvalidDifferenceSet(format!(
                "{x} is not reduced mod {modulus}"
            )));
        }
        let distinct: BTreeSet<u64> = entries.iter().copied().collect();
        if distinct.len() != entries.len() {
            return Err(SingerError::InvalidDifferenceSet("repeated entry".into()));
        }
        Ok(OrderedDifferenceSet { modulus, entries })
    }

    /// Reads `0,1,3`, taking the modulus `q^2 + q + 1` with `q + 1` entries.
    pub fn parse_planar(text: &str) -> Result<Self, SingerError> {
        let entries = text
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SingerError::InvalidDifferenceSet(format!("`{text}`: {e}")))?;
        if entries.is_empty() {
            return Err(SingerError::InvalidDifferenceSet("empty".into()));
        }
        let q = entries.len() as u64 - 1;
        OrderedDifferenceSet::new(q * q + q + 1, entries)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.entries.contains(&(x % self.modulus))
    }

    /// Translate with `delta(0) = 0`, order kept.
    pub fn normalized(&self) -> Self {
        let t = self.entries.first().copied().unwrap_or(0);
        let n = self.modulus;
        OrderedDifferenceSet {
            modulus: n,
            entries: self.entries.iter().map(|&x| (x + n - t) % n).collect(),
        }
    }

    pub fn sorted(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.sort_unstable();
        OrderedDifferenceSet {
            modulus: self.modulus,
            entries,
        }
    }

    /// Reorders the sorted entries: position `i` receives sorted entry
    /// `perm[i]`.
    pub fn reordered(&self, perm: &[usize]) -> Result<Self, SingerError> {
        let sorted = self.sorted().entries;
        let seen: BTreeSet<usize> = perm.iter().copied().collect();
        if perm.len() != sorted.len() || seen.len() != perm.len() || perm.iter().any(|&i| i >= sorted.len()) {
            return Err(SingerError::InvalidDifferenceSet(format!(
                "{perm:?} is not a permutation of {} entries",
                sorted.len()
            )));
        }
        Ok(OrderedDifferenceSet {
            modulus: self.modulus,
            entries: perm.iter().map(|&i| sorted[i]).collect(),
        })
    }

    pub fn entries_string(&self) -> String {
        self.entries
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for OrderedDifferenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) mod {}", self.entries_string(), self.modulus)
    }
}

/// `{ d mod n : base_point is incident with sigma^d(base_line) }`, ascending.
pub fn extract_difference_set(
    plane: &SingerPlane,
    base_point: usize,
    base_line: usize,
) -> Result<OrderedDifferenceSet, SingerError> {
    let s = &plane.structure;
    if base_point >= s.num_points() || base_line >= s.num_lines() || !s.incident(base_point, base_line) {
        return Err(SingerError::NotIncident {
            point: base_point,
            line: base_line,
        });
    }
    let n = plane.modulus();
    let mut entries = Vec::new();
    let mut line = base_line;
    for d in 0..n {
        if s.incident(base_point, line) {
            entries.push(d);
        }
        line = plane.line_cycle[line];
    }
    OrderedDifferenceSet::new(n, entries)
}

/// Every nonzero residue is exactly one difference of two entries.
pub fn verify_planar_difference_set(d: &OrderedDifferenceSet) -> VerificationReport {
    let n = d.modulus;
    let mut r = VerificationReport::new(format!("planar difference set {d}"));
    let mut count = vec![0usize; n as usize];
    for &a in &d.entries {
        for &b in &d.entries {
            if a != b {
                count[((a + n - b) % n) as usize] += 1;
            }
        }
    }
    let missing: Vec<u64> = (1..n).filter(|&x| count[x as usize] == 0).collect();
    let repeated: Vec<u64> = (1..n).filter(|&x| count[x as usize] > 1).collect();
    r.check("every-difference", missing.is_empty(), format!("missing {missing:?}"));
    r.check("unique-difference", repeated.is_empty(), format!("repeated {repeated:?}"));
    r
}

/// Whether `t A + s = B` as sets for some unit `t` and shift `s` mod `n`.
pub fn equivalent_under_affine(a: &OrderedDifferenceSet, b: &OrderedDifferenceSet) -> bool {
    let n = a.modulus;
    if n != b.modulus || a.len() != b.len() {
        return false;
    }
    let target: BTreeSet<u64> = b.entries.iter().copied().collect();
    let gcd = |mut x: u64, mut y: u64| {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    (1..n.max(2)).filter(|&t| gcd(t, n) == 1).any(|t| {
        (0..n).any(|s| {
            a.entries
                .iter()
                .all(|&x| target.contains(&((t * x + s) % n)))
        })
    }) || (n == 1 && a.entries == b.entries)
}

/// Checks that `action` is a regular action of `elements` on `0..domain`:
/// the sizes agree, images stay in the domain, one orbit covers everything
/// and no point is fixed by two distinct elements.
pub fn verify_regular_action<G>(
    elements: &[G],
    action: impl Fn(&G, usize) -> usize,
    domain: usize,
) -> VerificationReport {
    let mut r = VerificationReport::new("regular action");
    r.check(
        "size",
        elements.len() == domain,
        format!("{} elements on {domain} points", elements.len()),
    );
    let mut closed = true;
    let mut free = true;
    let mut orbit = vec![false; domain];
    for x in 0..domain {
        let mut seen = vec![false; domain];
        for g in elements {
            let y = action(g, x);
            if y >= domain {
                closed = false;
                continue;
            }
            if std::mem::replace(&mut seen[y], true) {
                free = false;
            }
            if x == 0 {
                orbit[y] = true;
            }
        }
    }
    r.check("closed", closed, "");
    let reached = orbit.iter().filter(|&&b| b).count();
    r.check("transitive", domain > 0 && reached == domain, format!("orbit of 0 has {reached} points"));
    r.check("free", free, "");
    r
}

// ---------------------------------------------------------------------------
// Symplectic quadrangles

/// A vector of `GF(q)^4` as element codes.
pub type Vector4 = [u32; 4];

/// A 4x4 matrix over `GF(q)` as element codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mat4(pub [[u32; 4]; 4]);

impl Mat4 {
    pub fn identity() -> Self {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        Mat4(m)
    }

    pub fn mul(&self, other: &Mat4, f: &FieldSpec) -> Mat4 {
        let mut m = [[0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = FieldElement::ZERO;
                for k in 0..4 {
                    let t = f.mul(f.element(self.0[i][k]), f.element(other.0[k][j]));
                    acc = f.add(acc, t);
                }
                *cell = acc.code();
            }
        }
        Mat4(m)
    }

    pub fn apply(&self, v: &Vector4, f: &FieldSpec) -> Vector4 {
        let mut out = [0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = FieldElement::ZERO;
            for k in 0..4 {
                acc = f.add(acc, f.mul(f.element(self.0[i][k]), f.element(v[k])));
            }
            *o = acc.code();
        }
        out
    }

    pub fn pow(&self, k: u64, f: &FieldSpec) -> Mat4 {
        (0..k).fold(Mat4::identity(), |acc, _| acc.mul(self, f))
    }
}

/// `x(a)`.
pub fn x_matrix(f: &FieldSpec, a: FieldElement) -> Mat4 {
    let mut m = Mat4::identity();
    m.0[0][1] = a.code();
    m.0[2][3] = f.neg(a).code();
    m
}

/// `y(b)`.
pub fn y_matrix(b: FieldElement) -> Mat4 {
    let mut m = Mat4::identity();
    m.0[0][2] = b.code();
    m.0[1][3] = b.code();
    m
}

/// `z(c)`.
pub fn z_matrix(c: FieldElement) -> Mat4 {
    let mut m = Mat4::identity();
    m.0[0][3] = c.code();
    m
}

/// `h(u, v) = u0 v3 - u3 v0 + u1 v2 - u2 v1`.
pub fn symplectic_form(f: &FieldSpec, u: &Vector4, v: &Vector4) -> FieldElement {
    let e = |c: u32| f.element(c);
    let t1 = f.sub(f.mul(e(u[0]), e(v[3])), f.mul(e(u[3]), e(v[0])));
    let t2 = f.sub(f.mul(e(u[1]), e(v[2])), f.mul(e(u[2]), e(v[1])));
    f.add(t1, t2)
}

/// Scales `v` so that its first nonzero coordinate is 1.
fn normalize(f: &FieldSpec, v: &Vector4) -> Vector4 {
    let lead = v.iter().copied().find(|&c| c != 0).expect("nonzero vector");
    let inv = f.inv(f.element(lead)).expect("nonzero");
    v.map(|c| f.mul(f.element(c), inv).code())
}

/// A line representative through `p1`: `[a:b]` for a point of the projective
/// line, or the hyperbolic line `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineLabel {
    Projective { a: u32, b: u32 },
    Zero,
}

impl LineLabel {
    /// `[0:1]`, then `[1:b]` for `b` in code order, then `0`.
    pub fn all(q: u32) -> Vec<LineLabel> {
        let mut v = vec![LineLabel::Projective { a: 0, b: 1 }];
        v.extend((0..q).map(|b| LineLabel::Projective { a: 1, b }));
        v.push(LineLabel::Zero);
        v
    }

    pub fn parse(text: &str) -> Option<LineLabel> {
        let t = text.trim();
        if t == "0" {
            return Some(LineLabel::Zero);
        }
        let inner = t.strip_prefix('[')?.strip_suffix(']')?;
        let (a, b) = inner.split_once(':')?;
        Some(LineLabel::Projective {
            a: a.trim().parse().ok()?,
            b: b.trim().parse().ok()?,
        })
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineLabel::Projective { a, b } => write!(f, "[{a}:{b}]"),
            LineLabel::Zero => f.write_str("0"),
        }
    }
}

/// `W(q)`, its Payne derivative `W(q)` at `p0 = (1,0,0,0)`, and the group `E`
/// of matrices `x(a) y(b) z(c)`.
///
/// Slanted points are the points `(x, y, z, 1)`, indexed by `x q^2 + y q + z`
/// on codes; the element `x(a) y(b) z(c)` of `E` is indexed by
/// `a q^2 + b q + c`. The label `[a:b]` names the line through `p1 = (0,0,0,1)`
/// and `(0, b, -a, 1)`, which is the line stabilised by the matrices with
/// first row `(1, fa, fb, 0)`.
#[derive(Debug, Clone)]
pub struct SymplecticQuadrangleBundle {
    q: u32,
    field: FieldSpec,
    ambient_points: Vec<Vector4>,
    ambient: IncidenceStructure,
    p0: usize,
    slanted: IncidenceStructure,
    slanted_to_ambient: Vec<usize>,
    hyperbolic_lines: Vec<usize>,
    line_index: HashMap<Vec<usize>, usize>,
    representatives: Vec<(LineLabel, usize)>,
}

/// Builds `W(q)` and its slanted form for a prime power `q > 2`.
pub fn slanted_quadrangle(q: u64) -> Result<SymplecticQuadrangleBundle, SingerError> {
    check_order(q, MAX_QUADRANGLE_ORDER)?;
    if q <= 2 {
        return Err(SingerError::UnsupportedOrder(q));
    }
    let field = FieldSpec::new(q)?;
    let qq = q as u32;

    let mut ambient_points = Vec::new();
    for code in 1..(qq as u64).pow(4) {
        let mut v = [0u32; 4];
        let mut c = code;
        for i in (0..4).rev() {
            v[i] = (c % q) as u32;
            c /= q;
        }
        if v.iter().copied().find(|&x| x != 0) == Some(1) {
            ambient_points.push(v);
        }
    }
    let point_index: HashMap<Vector4, usize> =
        ambient_points.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let np = ambient_points.len();
    let h = |i: usize, j: usize| symplectic_form(&field, &ambient_points[i], &ambient_points[j]);
    let perp: Vec<Vec<usize>> = (0..np)
        .map(|i| (0..np).filter(|&j| h(i, j).is_zero()).collect())
        .collect();

    // Totally isotropic lines through each collinear pair.
    let mut lines: BTreeSet<Vec<usize>> = BTreeSet::new();
    for i in 0..np {
        for &j in &perp[i] {
            if j <= i {
                continue;
            }
            let (u, w) = (&ambient_points[i], &ambient_points[j]);
            let mut pts = vec![i];
            for t in field.elements() {
                let v: Vector4 = std::array::from_fn(|k| {
                    field.add(field.element(w[k]), field.mul(t, field.element(u[k]))).code()
                });
                pts.push(point_index[&normalize(&field, &v)]);
            }
            pts.sort_unstable();
            lines.insert(pts);
        }
    }
    let ambient_lines: Vec<Vec<usize>> = lines.into_iter().collect();
    let ambient = IncidenceStructure::from_lines(np, &ambient_lines)?;

    let p0 = point_index[&[1, 0, 0, 0]];
    let mut slanted_to_ambient = Vec::with_capacity((qq as usize).pow(3));
    for x in 0..qq {
        for y in 0..qq {
            for z in 0..qq {
                slanted_to_ambient.push(point_index[&normalize(&field, &[x, y, z, 1])]);
            }
        }
    }
    let mut ambient_to_slanted = vec![usize::MAX; np];
    for (s, &a) in slanted_to_ambient.iter().enumerate() {
        ambient_to_slanted[a] = s;
    }
    let restrict = |pts: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = pts
            .iter()
            .filter(|&&a| ambient_to_slanted[a] != usize::MAX)
            .map(|&a| ambient_to_slanted[a])
            .collect();
        v.sort_unstable();
        v
    };

    let mut slanted_lines: BTreeSet<Vec<usize>> = BTreeSet::new();
    for l in &ambient_lines {
        if !l.contains(&p0) {
            slanted_lines.insert(restrict(l));
        }
    }
    // {p0, r}^perp-perp minus p0, from the definition.
    let mut hyperbolic: BTreeSet<Vec<usize>> = BTreeSet::new();
    let perp0: BTreeSet<usize> = perp[p0].iter().copied().collect();
    for &r in &slanted_to_ambient {
        let common: Vec<usize> = perp[r].iter().copied().filter(|s| perp0.contains(s)).collect();
        let pp: Vec<usize> = (0..np)
            .filter(|&x| x != p0 && common.iter().all(|&s| h(x, s).is_zero()))
            .collect();
        hyperbolic.insert(restrict(&pp));
    }
    slanted_lines.extend(hyperbolic.iter().cloned());
    let slanted_lines: Vec<Vec<usize>> = slanted_lines.into_iter().collect();
    let line_index: HashMap<Vec<usize>, usize> = slanted_lines
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    let hyperbolic_lines = hyperbolic.iter().map(|l| line_index[l]).collect();
    let slanted = IncidenceStructure::from_lines(slanted_to_ambient.len(), &slanted_lines)?;

    let mut bundle = SymplecticQuadrangleBundle {
        q: qq,
        field,
        ambient_points,
        ambient,
        p0,
        slanted,
        slanted_to_ambient,
        hyperbolic_lines,
        line_index,
        representatives: Vec::new(),
    };
    let f = &bundle.field;
    let mut reps = Vec::new();
    for label in LineLabel::all(qq) {
        let marker = match label {
            LineLabel::Projective { a, b } => bundle.slanted_point(&[0, b, f.neg(f.element(a)).code(), 1]),
            LineLabel::Zero => bundle.slanted_point(&[1, 0, 0, 1]),
        };
        let line = bundle
            .slanted
            .lines_through(0)
            .iter()
            .copied()
            .find(|&l| bundle.slanted.incident(marker, l))
            .expect("a line joins two slanted points on a line through p1");
        reps.push((label, line));
    }
    bundle.representatives = reps;
    Ok(bundle)
}

impl SymplecticQuadrangleBundle {
    pub fn order(&self) -> u64 {
        self.q as u64
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// `W(q)` on all points of `PG(3, q)`.
    pub fn ambient(&self) -> &IncidenceStructure {
        &self.ambient
    }

    pub fn ambient_point(&self, i: usize) -> Vector4 {
        self.ambient_points[i]
    }

    /// Index of `p0` among the ambient points.
    pub fn p0(&self) -> usize {
        self.p0
    }

    /// Index of `p1 = (0,0,0,1)` among the slanted points.
    pub fn p1(&self) -> usize {
        0
    }

    pub fn slanted(&self) -> &IncidenceStructure {
        &self.slanted
    }

    /// Ambient index of a slanted point.
    pub fn slanted_to_ambient(&self, s: usize) -> usize {
        self.slanted_to_ambient[s]
    }

    /// Slanted lines of the form `{p0, r}^perp-perp \ {p0}`.
    pub fn hyperbolic_lines(&self) -> &[usize] {
        &self.hyperbolic_lines
    }

    /// Index of the slanted point `(x, y, z, 1)`.
    pub fn slanted_point(&self, v: &Vector4) -> usize {
        debug_assert_eq!(v[3], 1);
        let q = self.q as usize;
        v[0] as usize * q * q + v[1] as usize * q + v[2] as usize
    }

    fn slanted_vector(&self, s: usize) -> Vector4 {
        let q = self.q as usize;
        [(s / (q * q)) as u32, ((s / q) % q) as u32, (s % q) as u32, 1]
    }

    /// Line labels and their representatives, in [`LineLabel::all`] order.
    pub fn representatives(&self) -> &[(LineLabel, usize)] {
        &self.representatives
    }

    pub fn labels(&self) -> Vec<LineLabel> {
        self.representatives.iter().map(|r| r.0).collect()
    }

    pub fn representative(&self, label: LineLabel) -> Option<usize> {
        self.representatives.iter().find(|r| r.0 == label).map(|r| r.1)
    }

    pub fn label_of(&self, line: usize) -> Option<LineLabel> {
        self.representatives.iter().find(|r| r.1 == line).map(|r| r.0)
    }

    // -- the group E -------------------------------------------------------

    pub fn group_order(&self) -> usize {
        (self.q as usize).pow(3)
    }

    /// `(a, b, c)` codes with element `x(a) y(b) z(c)`.
    pub fn triple(&self, g: usize) -> (u32, u32, u32) {
        let q = self.q as usize;
        ((g / (q * q)) as u32, ((g / q) % q) as u32, (g % q) as u32)
    }

    pub fn element(&self, a: u32, b: u32, c: u32) -> usize {
        let q = self.q as usize;
        a as usize * q * q + b as usize * q + c as usize
    }

    pub fn matrix(&self, g: usize) -> Mat4 {
        let f = &self.field;
        let (a, b, c) = self.triple(g);
        x_matrix(f, f.element(a))
            .mul(&y_matrix(f.element(b)), f)
            .mul(&z_matrix(f.element(c)), f)
    }

    /// Inverse of [`Self::matrix`]: `a = M01`, `b = M02`, `c = M03 - ab`.
    /// Returns `None` for matrices outside the family.
    pub fn decompose(&self, m: &Mat4) -> Option<usize> {
        let f = &self.field;
        let (a, b) = (f.element(m.0[0][1]), f.element(m.0[0][2]));
        let c = f.sub(f.element(m.0[0][3]), f.mul(a, b));
        let g = self.element(a.code(), b.code(), c.code());
        (self.matrix(g) == *m).then_some(g)
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.decompose(&self.matrix(g).mul(&self.matrix(h), &self.field))
            .expect("E is closed under multiplication")
    }

    pub fn act_on_point(&self, g: usize, s: usize) -> usize {
        let v = self.matrix(g).apply(&self.slanted_vector(s), &self.field);
        self.slanted_point(&v)
    }

    pub fn act_on_line(&self, g: usize, l: usize) -> usize {
        let mut pts: Vec<usize> = self
            .slanted
            .points_on(l)
            .iter()
            .map(|&s| self.act_on_point(g, s))
            .collect();
        pts.sort_unstable();
        self.line_index[&pts]
    }

    /// `{g in E : g(line) = line}` by exhaustion.
    pub fn brute_force_stabilizer(&self, line: usize) -> Vec<usize> {
        (0..self.group_order())
            .filter(|&g| self.act_on_line(g, line) == line)
            .collect()
    }

    /// The stabiliser of a representative from the matrix family: the
    /// matrices with first row `(1, fa, fb, 0)` for `[a:b]`, and `z(f)` for
    /// `0`, with `f` over the field. Sorted element indices.
    pub fn line_stabilizer(&self, line: usize) -> Result<Vec<usize>, SingerError> {
        let label = self.label_of(line).ok_or(SingerError::NotARepresentative(line))?;
        let f = &self.field;
        let mut v: Vec<usize> = f
            .elements()
            .map(|t| match label {
                LineLabel::Projective { a, b } => {
                    let (fa, fb) = (f.mul(t, f.element(a)), f.mul(t, f.element(b)));
                    let c = f.neg(f.mul(fa, fb));
                    self.element(fa.code(), fb.code(), c.code())
                }
                LineLabel::Zero => self.element(0, 0, t.code()),
            })
            .collect();
        v.sort_unstable();
        Ok(v)
    }

    /// For odd prime `q`: the cyclic group generated by `x^a y^b z^(-ab/2)`
    /// for `[a:b]` and by `z` for `0`, where `x = x(1)`, `y = y(1)`,
    /// `z = z(2)`.
    pub fn prime_formula_stabilizer(&self, label: LineLabel) -> Option<Vec<usize>> {
        if self.q.is_multiple_of(2) || !is_prime(self.q as u64) {
            return None;
        }
        let f = &self.field;
        let gen = match label {
            LineLabel::Projective { a, b } => {
                let k = half_product_exponent(self.q, a, b);
                let x = x_matrix(f, f.one()).pow(a as u64, f);
                let y = y_matrix(f.one()).pow(b as u64, f);
                let z = z_matrix(f.from_int(2)).pow(k as u64, f);
                x.mul(&y, f).mul(&z, f)
            }
            LineLabel::Zero => z_matrix(f.from_int(2)),
        };
        let g = self.decompose(&gen)?;
        let mut v = vec![0];
        let mut cur = g;
        while cur != 0 {
            v.push(cur);
            cur = self.mul(cur, g);
        }
        v.sort_unstable();
        Some(v)
    }

    /// Whether `q` admits the finite presentations used for lattices: odd
    /// primes and powers of two.
    pub fn has_presentation(&self) -> bool {
        self.q.is_multiple_of(2) || is_prime(self.q as u64)
    }

    /// `E` as a finite group with a presentation. For odd prime `q` the
    /// generators are `x, y` with `z = x y x^-1 y^-1`; for `q = 2^e` they are
    /// `x(f_i), y(f_i), z(f_i)` for the basis `f_i = X^i`, named `x0, ...`.
    /// Every name carries `suffix`.
    pub fn singer_group(&self, suffix: &str) -> Result<FiniteGroup, SingerError> {
        if !self.has_presentation() {
            return Err(SingerError::UnsupportedOrder(self.q as u64));
        }
        let order = self.group_order();
        let table: Vec<usize> = (0..order * order)
            .map(|k| self.mul(k / order, k % order))
            .collect();
        let presentation = singer_presentation(self.q as u64, suffix)?;
        let elems = if self.q % 2 == 1 {
            vec![self.element(1, 0, 0), self.element(0, 1, 0)]
        } else {
            let e = self.field.degree() as usize;
            let mut elems = Vec::new();
            for k in 0..3 {
                for i in 0..e {
                    let mut t = [0u32; 3];
                    t[k] = 1 << i;
                    elems.push(self.element(t[0], t[1], t[2]));
                }
            }
            elems
        };
        let names = presentation.generators().to_vec();
        let rels = presentation.relators().to_vec();
        Ok(FiniteGroup::from_fn(
            format!("E{suffix}"),
            order,
            |a, b| table[a * order + b],
            names,
            elems,
            rels,
        )?)
    }

    /// Generators of the stabiliser of `label` as words in the generators of
    /// [`Self::singer_group`]: one word for odd prime `q`, and the images of
    /// the basis `f_i` for `q = 2^e`.
    pub fn stabilizer_words(&self, label: LineLabel) -> Result<Vec<Word>, SingerError> {
        stabilizer_words(self.q as u64, label)
    }

    /// Every claim about the construction: sizes, the generalised quadrangle
    /// property, the action of `E`, and the line stabilisers.
    pub fn verify(&self) -> VerificationReport {
        let q = self.q as usize;
        let f = &self.field;
        let mut r = VerificationReport::new(format!("slanted symplectic quadrangle, q={q}"));

        let amb = verify_generalized_ngon(&self.ambient, 4);
        r.check("ambient-order", amb.order == Some((q, q)), format!("{:?}", amb.order));
        r.absorb("ambient", amb.report);
        let not_collinear = (0..self.ambient_points.len())
            .filter(|&i| !symplectic_form(f, &self.ambient_points[self.p0], &self.ambient_points[i]).is_zero())
            .count();
        r.check(
            "points-off-p0",
            not_collinear == q * q * q && self.slanted.num_points() == q * q * q,
            format!("{not_collinear} points not collinear with p0"),
        );
        r.check(
            "line-count",
            self.slanted.num_lines() == q * q * (q + 2),
            format!("{} lines", self.slanted.num_lines()),
        );
        let poly = verify_generalized_ngon(&self.slanted, 4);
        r.check(
            "order",
            poly.order == Some((q - 1, q + 1)),
            format!("{:?}", poly.order),
        );
        r.absorb("slanted", poly.report);

        let basis: Vec<Vector4> = (0..4)
            .map(|i| std::array::from_fn(|k| u32::from(k == i)))
            .collect();
        let gens_symplectic = f.elements().all(|t| {
            [x_matrix(f, t), y_matrix(t), z_matrix(t)].iter().all(|m| {
                basis.iter().all(|u| {
                    basis.iter().all(|v| {
                        symplectic_form(f, &m.apply(u, f), &m.apply(v, f)) == symplectic_form(f, u, v)
                    })
                })
            })
        });
        r.check("generators-preserve-form", gens_symplectic, "x(a), y(b), z(c)");
        let order = self.group_order();
        let group: Vec<usize> = (0..order).collect();
        let regular = verify_regular_action(&group, |&g, s| self.act_on_point(g, s), self.slanted.num_points());
        r.absorb("points", regular);
        let fixes_p0 = group.iter().all(|&g| {
            normalize(f, &self.matrix(g).apply(&self.ambient_points[self.p0], f))
                == self.ambient_points[self.p0]
        });
        r.check("fixes-p0", fixes_p0, "");
        let abelian = (0..order).all(|g| (0..order).all(|h| self.mul(g, h) == self.mul(h, g)));
        r.check(
            "abelian-iff-even",
            abelian == q.is_multiple_of(2),
            format!("abelian = {abelian}"),
        );
        if q % 2 == 1 {
            let one = f.one();
            let x = x_matrix(f, one);
            let y = y_matrix(one);
            let comm = x
                .mul(&y, f)
                .mul(&x_matrix(f, f.neg(one)), f)
                .mul(&y_matrix(f.neg(one)), f);
            r.check("commutator-is-z2", comm == z_matrix(f.from_int(2)), "[x, y] = z(2)");
        }

        r.check(
            "representatives-through-p1",
            self.representatives.len() == q + 2
                && self.slanted.lines_through(0).len() == q + 2
                && self
                    .representatives
                    .iter()
                    .map(|x| x.1)
                    .collect::<BTreeSet<_>>()
                    .len()
                    == q + 2,
            format!("{} representatives", self.representatives.len()),
        );
        let mut orbit_of: BTreeMap<usize, usize> = BTreeMap::new();
        let mut transversal = true;
        for &(_, l) in &self.representatives {
            for g in 0..order {
                let image = self.act_on_line(g, l);
                if let Some(&prev) = orbit_of.get(&image) {
                    transversal &= prev == l;
                }
                orbit_of.insert(image, l);
            }
        }
        r.check(
            "representatives-are-transversal",
            transversal && orbit_of.len() == self.slanted.num_lines(),
            format!("{} lines reached", orbit_of.len()),
        );
        for &(label, l) in &self.representatives {
            let brute = self.brute_force_stabilizer(l);
            let family = self.line_stabilizer(l).expect("representative");
            r.check(
                format!("stabilizer-{label}"),
                brute == family && brute.len() == q,
                format!("{} elements", brute.len()),
            );
            if let Some(formula) = self.prime_formula_stabilizer(label) {
                r.check(format!("prime-formula-{label}"), formula == brute, "");
            }
        }
        if let Some(l0) = self.representative(LineLabel::Zero) {
            let z: Vec<usize> = f.elements().map(|t| self.element(0, 0, t.code())).collect();
            let mut z = z;
            z.sort_unstable();
            r.check("stabilizer-l0-is-z", self.brute_force_stabilizer(l0) == z, "{z(f)}");
            r.check(
                "l0-is-hyperbolic",
                self.hyperbolic_lines.contains(&l0),
                "",
            );
        }
        r
    }

    /// Key-value metadata accompanying the incidence text.
    pub fn metadata(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "modulus = {}", self.field.modulus_string());
        let _ = writeln!(s, "primitive = {}", self.field.primitive_element());
        let _ = writeln!(s, "p0 = (1,0,0,0)");
        let _ = writeln!(s, "p1 = (0,0,0,1)");
        for (label, l) in &self.representatives {
            let _ = writeln!(s, "representative {label} = {l}");
        }
        s
    }
}

fn commutator_word() -> Word {
    Word::commutator(&Word::gen(0), &Word::gen(1))
}

/// `-ab/2 mod q` as a residue in `0..q`, for odd prime `q`.
fn half_product_exponent(q: u32, a: u32, b: u32) -> u32 {
    let q = q as u64;
    let inv2 = q.div_ceil(2);
    let ab = (a as u64 * b as u64) % q;
    ((q - ab) % q * inv2 % q) as u32
}

/// The presentation of `E` used by [`SymplecticQuadrangleBundle::singer_group`]:
/// `<x, y | x^p, y^p, z^p, [x, z], [y, z]>` with `z = x y x^-1 y^-1` for odd
/// prime `q`, and `(Z/2)^(3e)` on `x0.., y0.., z0..` for `q = 2^e`.
pub fn singer_presentation(q: u64, suffix: &str) -> Result<Presentation, SingerError> {
    let (p, e) = prime_power(q).ok_or(SingerError::NotPrimePower(q))?;
    let (names, rels) = if p == 2 {
        let e = e as usize;
        let names = ["x", "y", "z"]
            .iter()
            .flat_map(|l| (0..e).map(move |i| format!("{l}{i}{suffix}")))
            .collect();
        (names, abelian_relators(3 * e, 2))
    } else if e == 1 {
        let p = p as i64;
        let z = commutator_word();
        let rels = vec![
            Word::power_of(0, p),
            Word::power_of(1, p),
            z.pow(p),
            Word::commutator(&Word::gen(0), &z),
            Word::commutator(&Word::gen(1), &z),
        ];
        (vec![format!("x{suffix}"), format!("y{suffix}")], rels)
    } else {
        return Err(SingerError::UnsupportedOrder(q));
    };
    Ok(Presentation::new(names, rels).expect("well-formed names"))
}

/// Stabiliser generators as words in the Singer group generators, without
/// building the geometry.
pub fn stabilizer_words(q: u64, label: LineLabel) -> Result<Vec<Word>, SingerError> {
    let (p, e) = prime_power(q).ok_or(SingerError::NotPrimePower(q))?;
    if p == 2 {
        let f = FieldSpec::new(q)?;
        let e = e as usize;
        let bits = |c: u32, offset: usize| -> Vec<Word> {
            (0..e).filter(|i| c >> i & 1 == 1).map(|i| Word::gen(offset + i)).collect()
        };
        let words = (0..e)
            .map(|i| {
                let fi = f.element(1 << i);
                match label {
                    LineLabel::Projective { a, b } => {
                        let fa = f.mul(fi, f.element(a));
                        let fb = f.mul(fi, f.element(b));
                        let c = f.mul(fa, fb);
                        let mut parts = bits(fa.code(), 0);
                        parts.extend(bits(fb.code(), e));
                        parts.extend(bits(c.code(), 2 * e));
                        Word::product(&parts)
                    }
                    LineLabel::Zero => Word::gen(2 * e + i),
                }
            })
            .collect();
        Ok(words)
    } else if e == 1 {
        let w = match label {
            LineLabel::Projective { a, b } => {
                let k = half_product_exponent(p, a, b);
                Word::product([
                    &Word::power_of(0, a as i64),
                    &Word::power_of(1, b as i64),
                    &commutator_word().pow(k as i64),
                ])
            }
            LineLabel::Zero => commutator_word(),
        };
        Ok(vec![w])
    } else {
        Err(SingerError::UnsupportedOrder(q))
    }
}
