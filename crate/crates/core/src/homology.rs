//! Integral linear algebra and the computable homology invariants:
//! Smith normal form, abelianisations of presentations, kernels over `Z/n`
//! and rational Betti numbers of finite scwols.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cog::{scwol_homology, Scwol};
use crate::ffield::prime_power;
use crate::lattices::{LatticeFamily, LatticeSpec};
use crate::presentation::Presentation;
use crate::report::VerificationReport;

/// Dense matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// # Panics
    /// If the rows have different lengths.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`IntegerMatrix::from_rows`], with an explicit column count so
    /// that matrices without rows keep their width.
    pub fn from_rows_with_cols<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntegerMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scaled_identity(n: usize, s: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::from(s));
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + f * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + f * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    /// Plain text, one row per line, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let rows: Vec<Vec<BigInt>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<BigInt>().map_err(|e| format!("{t}: {e}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix".into());
        }
        Ok(Self::from_rows_with_cols(&rows, cols))
    }
}

/// `left * m * right = diag(diagonal, 0, ...)`, with `left`, `right`
/// unimodular and the nonzero diagonal a divisibility chain of positive
/// integers.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub diagonal: Vec<BigInt>,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// The diagonal matrix `S` with the shape of the input.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntegerMatrix {
        let mut s = IntegerMatrix::zeros(rows, cols);
        for (i, d) in self.diagonal.iter().enumerate() {
            s.set(i, i, d.clone());
        }
        s
    }

    /// Recomputes `left * m * right` and compares with the diagonal form.
    pub fn reassembles(&self, m: &IntegerMatrix) -> bool {
        self.left.mul(m).mul(&self.right) == self.diagonal_matrix(m.rows(), m.cols())
    }
}

fn min_abs_entry(a: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithNormalForm {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut left = IntegerMatrix::identity(r);
    let mut right = IntegerMatrix::identity(c);
    let mut t = 0;
    while t < r.min(c) {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            break;
        };
        a.swap_rows(t, pi);
        left.swap_rows(t, pi);
        a.swap_cols(t, pj);
        right.swap_cols(t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let f = -a.get(i, t).div_floor(a.get(t, t));
                a.add_row(i, t, &f);
                left.add_row(i, t, &f);
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let f = -a.get(t, j).div_floor(a.get(t, t));
                a.add_col(j, t, &f);
                right.add_col(j, t, &f);
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // Bring the smallest remainder in row or column t to the pivot.
                let mut best = (t, t);
                for i in t + 1..r {
                    let x = a.get(i, t);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..c {
                    let x = a.get(t, j);
                    if !x.is_zero() && x.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                a.swap_rows(t, best.0);
                left.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                right.swap_cols(t, best.1);
                continue;
            }
            let pivot = a.get(t, t).clone();
            let bad = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    left.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    let diagonal = (0..r.min(c))
        .map(|i| a.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithNormalForm {
        diagonal,
        left,
        right,
    }
}

/// Finitely generated abelian group `Z^r + Z/d1 + ... + Z/dk` with
/// `d1 | d2 | ... | dk` and each `d > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroupDescription {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroupDescription {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroupDescription {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// `(Z/m)^k`.
    pub fn homocyclic(m: u64, k: usize) -> Self {
        AbelianGroupDescription {
            free_rank: 0,
            torsion: if m > 1 { vec![BigInt::from(m); k] } else { Vec::new() },
        }
    }

    /// Normalises an arbitrary list of cyclic orders into invariant factors.
    pub fn from_cyclic_orders(free_rank: usize, orders: &[BigInt]) -> Self {
        let nonzero: Vec<Vec<BigInt>> = orders
            .iter()
            .filter(|d| !d.is_zero())
            .map(|d| vec![d.abs()])
            .collect();
        let extra_free = orders.iter().filter(|d| d.is_zero()).count();
        if nonzero.is_empty() {
            return Self::free(free_rank + extra_free);
        }
        // The cokernel of a diagonal matrix with these entries.
        let mut m = IntegerMatrix::zeros(nonzero.len(), nonzero.len());
        for (i, d) in nonzero.iter().enumerate() {
            m.set(i, i, d[0].clone());
        }
        let snf = smith_normal_form(&m);
        AbelianGroupDescription {
            free_rank: free_rank + extra_free,
            torsion: snf.diagonal.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    /// Cokernel of the map whose image is spanned by the rows of `m`.
    pub fn cokernel_of_rows(m: &IntegerMatrix) -> Self {
        let snf = smith_normal_form(m);
        AbelianGroupDescription {
            free_rank: m.cols() - snf.rank(),
            torsion: snf.diagonal.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Order of the group, if finite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
    }
}

impl fmt::Display for AbelianGroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let mut j = i;
            while j < self.torsion.len() && &self.torsion[j] == d {
                j += 1;
            }
            parts.push(if j - i == 1 {
                format!("Z/{d}")
            } else {
                format!("(Z/{d})^{}", j - i)
            });
            i = j;
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Abelianisation of a presented group.
pub fn h1_of_presentation(p: &Presentation) -> AbelianGroupDescription {
    let rows = p.relation_matrix();
    let m = IntegerMatrix::from_rows_with_cols(&rows, p.generators().len());
    AbelianGroupDescription::cokernel_of_rows(&m)
}

/// True iff the abelianisation is trivial.
pub fn is_perfect(p: &Presentation) -> bool {
    h1_of_presentation(p).is_trivial()
}

/// Largest `n^cols` handled by exhaustive enumeration.
pub const EXHAUSTIVE_KERNEL_LIMIT: u64 = 1_000_000;

/// Which algorithm [`kernel_mod_n`] used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMethod {
    Exhaustive,
    Smith,
}

/// Isomorphism type of `{x in (Z/n)^cols : D x = 0}`, by enumeration when
/// `n^cols` is at most [`EXHAUSTIVE_KERNEL_LIMIT`], otherwise from the Smith
/// form of `D` stacked over `n I`.
pub fn kernel_mod_n(d: &IntegerMatrix, n: u64) -> AbelianGroupDescription {
    kernel_mod_n_with_method(d, n).0
}

pub fn kernel_mod_n_with_method(d: &IntegerMatrix, n: u64) -> (AbelianGroupDescription, KernelMethod) {
    let size = (n as u128).checked_pow(d.cols() as u32);
    if size.is_some_and(|s| s <= EXHAUSTIVE_KERNEL_LIMIT as u128) {
        (kernel_mod_n_exhaustive(d, n), KernelMethod::Exhaustive)
    } else {
        (kernel_mod_n_smith(d, n), KernelMethod::Smith)
    }
}

/// Kernel via the Smith form of `[D; n I]`.
pub fn kernel_mod_n_smith(d: &IntegerMatrix, n: u64) -> AbelianGroupDescription {
    let stacked = d.stack(&IntegerMatrix::scaled_identity(d.cols(), n as i64));
    AbelianGroupDescription::cokernel_of_rows(&stacked)
}

fn reduce_mod(d: &IntegerMatrix, n: u64) -> Vec<Vec<u64>> {
    let nb = BigInt::from(n);
    (0..d.rows())
        .map(|i| {
            d.row(i)
                .iter()
                .map(|x| x.mod_floor(&nb).to_u64().unwrap())
                .collect()
        })
        .collect()
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Kernel by enumerating all of `(Z/n)^cols`. The group type is read off the
/// sizes of the `p^k`-torsion subgroups, so no Smith form is involved.
pub fn kernel_mod_n_exhaustive(d: &IntegerMatrix, n: u64) -> AbelianGroupDescription {
    let cols = d.cols();
    let rows = reduce_mod(d, n);
    let total = n.pow(cols as u32);
    let decode = |mut code: u64| {
        let mut x = vec![0u64; cols];
        for xi in x.iter_mut() {
            *xi = code % n;
            code /= n;
        }
        x
    };
    let kernel: Vec<Vec<u64>> = (0..total)
        .into_par_iter()
        .map(decode)
        .filter(|x| {
            rows.iter()
                .all(|r| r.iter().zip(x).map(|(a, b)| a * b % n).sum::<u64>() % n == 0)
        })
        .collect();
    let mut orders = Vec::new();
    for (p, e) in factorize(n) {
        // counts[k] = |K[p^k]|
        let mut counts = vec![1u64];
        for k in 1..=e {
            let m = p.pow(k);
            let c = kernel
                .iter()
                .filter(|x| x.iter().all(|&xi| xi * m % n == 0))
                .count() as u64;
            counts.push(c);
        }
        // Number of cyclic factors of order at least p^k is log_p(c_k / c_{k-1}).
        let at_least: Vec<u32> = (1..=e as usize)
            .map(|k| {
                let ratio = counts[k] / counts[k - 1];
                ratio.ilog(p)
            })
            .collect();
        for k in 1..=e as usize {
            let next = if k < e as usize { at_least[k] } else { 0 };
            for _ in 0..at_least[k - 1] - next {
                orders.push(BigInt::from(p.pow(k as u32)));
            }
        }
    }
    AbelianGroupDescription::from_cyclic_orders(0, &orders)
}

/// Free ranks of the integral homology of a finite scwol.
pub fn rational_betti_from_quotient(s: &Scwol) -> Vec<usize> {
    scwol_homology(s).iter().map(|h| h.free_rank).collect()
}

/// The `(q x 3)` matrix of exponents `delta_alpha(j)` for `j = 1..q`.
pub fn difference_matrix(spec: &LatticeSpec) -> Option<IntegerMatrix> {
    let sets = spec.difference_sets()?;
    let q = sets[0].entries().len() - 1;
    let rows: Vec<Vec<i64>> = (1..=q)
        .map(|j| sets.iter().map(|d| d.entries()[j] as i64).collect())
        .collect();
    Some(IntegerMatrix::from_rows_with_cols(&rows, 3))
}

/// Compares the first homology of a one-panel C2 lattice with `(F_q, +)^6`:
/// `(Z/q)^6` for prime `q` and `(Z/2)^(6e)` for `q = 2^e`.
pub fn c2_h1_check(q: u64, spec: &LatticeSpec) -> VerificationReport {
    let mut r = VerificationReport::new(format!("one-panel C2 first homology, q={q}"));
    let h1 = h1_of_presentation(spec.presentation());
    let expected = match prime_power(q) {
        Some((p, e)) => AbelianGroupDescription::homocyclic(p as u64, 6 * e as usize),
        None => {
            r.check("order", false, format!("{q} is not a prime power"));
            return r;
        }
    };
    r.check(
        "family",
        spec.family() == LatticeFamily::C2OnePanel,
        format!("{:?}", spec.family()),
    );
    r.check("h1", h1 == expected, format!("computed {h1}, expected {expected}"));
    r
}

/// Tabulates `H_1` against `ker D` for an A2 cyclic lattice.
pub fn a2_kernel_check(spec: &LatticeSpec) -> VerificationReport {
    let mut r = VerificationReport::new("first homology against the difference matrix kernel");
    let h1 = h1_of_presentation(spec.presentation());
    match (difference_matrix(spec), spec.modulus()) {
        (Some(d), Some(n)) => {
            let (k, method) = kernel_mod_n_with_method(&d, n);
            r.check(
                "h1-equals-kernel",
                h1 == k,
                format!("H1 = {h1}, ker = {k} ({method:?})"),
            );
            let divides = h1
                .torsion
                .iter()
                .all(|t| BigInt::from(n).is_multiple_of(t));
            r.check("torsion-divides-n", divides && h1.free_rank == 0, format!("n = {n}"));
            r.check(
                "perfect-iff-injective",
                is_perfect(spec.presentation()) == k.is_trivial(),
                format!("perfect = {}", h1.is_trivial()),
            );
        }
        _ => {
            r.check("family", false, "not an A2 cyclic lattice");
        }
    }
    r
}

/// Counts invariant factors by value, e.g. `{7: 2}` for `(Z/7)^2`.
pub fn torsion_multiset(g: &AbelianGroupDescription) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for t in g.torsion_u64() {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntegerMatrix {
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntegerMatrix::from_rows(&v)
    }

    fn diag(s: &SmithNormalForm) -> Vec<i64> {
        s.diagonal.iter().map(|d| d.to_i64().unwrap()).collect()
    }

    #[test]
    fn small_smith_forms() {
        let id = IntegerMatrix::identity(3);
        assert_eq!(diag(&smith_normal_form(&id)), vec![1, 1, 1]);
        let z = IntegerMatrix::zeros(2, 3);
        assert!(smith_normal_form(&z).diagonal.is_empty());
        let a = m(&[&[2, 4], &[6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag(&s), vec![2, 4]);
        assert!(s.reassembles(&a));
    }

    #[test]
    fn cokernels() {
        let g = AbelianGroupDescription::cokernel_of_rows(&m(&[&[7, 0, 0], &[0, 7, 0], &[0, 0, 7], &[1, 1, 1]]));
        assert_eq!(g, AbelianGroupDescription::homocyclic(7, 2));
        assert_eq!(g.to_string(), "(Z/7)^2");
        let free = AbelianGroupDescription::cokernel_of_rows(&IntegerMatrix::zeros(0, 2));
        assert_eq!(free.to_string(), "Z^2");
        assert_eq!(AbelianGroupDescription::trivial().to_string(), "0");
    }

    #[test]
    fn cyclic_orders_normalise() {
        let g = AbelianGroupDescription::from_cyclic_orders(
            1,
            &[BigInt::from(2), BigInt::from(3), BigInt::from(4)],
        );
        assert_eq!(g.torsion_u64(), vec![2, 12]);
        assert_eq!(g.free_rank, 1);
    }

    #[test]
    fn presentations_abelianise() {
        let free = Presentation::from_text("generators a\n").unwrap();
        assert_eq!(h1_of_presentation(&free), AbelianGroupDescription::free(1));
        assert!(!is_perfect(&free));
        let s3 = Presentation::from_text("generators a b\na^3\nb^2\na b a b\n").unwrap();
        assert_eq!(h1_of_presentation(&s3).torsion_u64(), vec![2]);
        let trivial = Presentation::from_text("generators a b\na\nb\n").unwrap();
        assert!(is_perfect(&trivial));
    }

    #[test]
    fn kernels_mod_n() {
        let zero = IntegerMatrix::zeros(2, 3);
        assert_eq!(kernel_mod_n(&zero, 7), AbelianGroupDescription::homocyclic(7, 3));
        assert_eq!(kernel_mod_n_smith(&zero, 7), AbelianGroupDescription::homocyclic(7, 3));
        let d = m(&[&[1, 1, 1], &[3, 3, 3]]);
        assert_eq!(kernel_mod_n(&d, 7), AbelianGroupDescription::homocyclic(7, 2));
        // Mixed torsion: x = 2y in Z/12 has kernel of x -> 2x equal to Z/2.
        let d = m(&[&[2]]);
        assert_eq!(kernel_mod_n_exhaustive(&d, 12).torsion_u64(), vec![2]);
        assert_eq!(kernel_mod_n_smith(&d, 12).torsion_u64(), vec![2]);
        let d = m(&[&[4, 6]]);
        assert_eq!(kernel_mod_n_exhaustive(&d, 8), kernel_mod_n_smith(&d, 8));
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = m(&[&[1, -2], &[30, 4]]);
        assert_eq!(IntegerMatrix::from_text(&a.to_text()).unwrap(), a);
        assert!(IntegerMatrix::from_text("1 2\n3\n").is_err());
    }

    /// gcd of all k x k minors, by cofactor expansion.
    fn det(a: &[Vec<i64>]) -> i64 {
        let n = a.len();
        if n == 1 {
            return a[0][0];
        }
        let mut s = 0;
        for j in 0..n {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            s += sign * a[0][j] * det(&minor);
        }
        s
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Invariant factors from determinantal divisors.
    fn minors_oracle(a: &[Vec<i64>]) -> Vec<i64> {
        let r = a.len();
        let c = a.first().map_or(0, Vec::len);
        let mut divisors = vec![1i64];
        for k in 1..=r.min(c) {
            let mut g = 0i64;
            for rs in subsets(r, k) {
                for cs in subsets(c, k) {
                    let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                    g = g.gcd(&det(&sub));
                }
            }
            if g == 0 {
                break;
            }
            divisors.push(g);
        }
        divisors.windows(2).map(|w| w[1] / w[0]).collect()
    }

    fn check_against_oracle(rows: &[Vec<i64>]) {
        let a = IntegerMatrix::from_rows(rows);
        let s = smith_normal_form(&a);
        assert_eq!(diag(&s), minors_oracle(rows), "{rows:?}");
        assert!(s.reassembles(&a));
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn smith_matches_minors_on_all_2x2() {
        for code in 0..19i64.pow(4) {
            let mut c = code;
            let mut e = [0i64; 4];
            for x in e.iter_mut() {
                *x = c % 19 - 9;
                c /= 19;
            }
            check_against_oracle(&[vec![e[0], e[1]], vec![e[2], e[3]]]);
        }
    }

    #[test]
    fn smith_matches_minors_on_all_sign_3x3() {
        for code in 0..3i64.pow(9) {
            let mut c = code;
            let mut rows = vec![vec![0i64; 3]; 3];
            for i in 0..9 {
                rows[i / 3][i % 3] = c % 3 - 1;
                c /= 3;
            }
            check_against_oracle(&rows);
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-9i64..=9, c), r)
        })
    }

    proptest! {
        #[test]
        fn smith_matches_minors(rows in matrix_strategy()) {
            check_against_oracle(&rows);
        }

        #[test]
        fn kernel_paths_agree(
            rows in prop::collection::vec(prop::collection::vec(0i64..12, 3), 1..4),
            n in prop::sample::select(vec![2u64, 6, 7, 8, 12, 13, 21]),
        ) {
            let d = IntegerMatrix::from_rows(&rows);
            prop_assert_eq!(kernel_mod_n_exhaustive(&d, n), kernel_mod_n_smith(&d, n));
        }
    }
}
