//! Exact arithmetic in GF(p^e).
//!
//! A field is fixed by its characteristic and the lexicographically smallest
//! irreducible monic polynomial of the requested degree. Elements are encoded
//! as integers `sum c_i p^i` over their power-basis coefficients, so the
//! integer order on codes is the coefficient-lexicographic order with the
//! leading coefficient most significant.

use std::fmt;

use thiserror::Error;

/// Largest field order accepted by [`FieldSpec`]. Internal cubic extensions
/// of the configured plane orders stay below this.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

const ADD_TABLE_LIMIT: u32 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field order {q} exceeds the supported maximum {max}")]
    TooLarge { q: u64, max: u64 },
    #[error("operation {0:?} needs a second operand")]
    MissingOperand(FieldOp),
    #[error("code {code} is not an element of a field of order {q}")]
    OutOfRange { code: u64, q: u32 },
}

/// An element of some [`FieldSpec`], stored by its integer code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Power-basis coefficients, constant term first.
    pub fn coefficients(self, field: &FieldSpec) -> Vec<u32> {
        let mut out = Vec::with_capacity(field.e as usize);
        let mut c = self.0;
        for _ in 0..field.e {
            out.push(c % field.p);
            c /= field.p;
        }
        out
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
}

/// A finite field GF(p^e) with precomputed logarithm tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus_string())
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

/// Builds GF(q) with the canonical modulus.
pub fn make_field(q: u64) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(q)
}

/// Applies one of the four basic operations.
pub fn field_arith(
    field: &FieldSpec,
    op: FieldOp,
    a: FieldElement,
    b: Option<FieldElement>,
) -> Result<FieldElement, FieldError> {
    match op {
        FieldOp::Add => Ok(field.add(a, b.ok_or(FieldError::MissingOperand(op))?)),
        FieldOp::Mul => Ok(field.mul(a, b.ok_or(FieldError::MissingOperand(op))?)),
        FieldOp::Neg => Ok(field.neg(a)),
        FieldOp::Inv => field.inv(a),
    }
}

/// Returns `(p, e)` with `p^e = n`, if `n` is a prime power.
pub fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if p * p > n {
        return u32::try_from(n).ok().map(|n| (n, 1));
    }
    let mut m = n;
    let mut e = 0;
    while m.is_multiple_of(p) {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p as u32, e))
}

pub fn is_prime(n: u64) -> bool {
    matches!(prime_power(n), Some((_, 1)))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` over Z/p; both are
/// coefficient vectors, constant term first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let v = (r[shift + i] + p - (lead * c) % p) % p;
                r[shift + i] = v;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree at most `deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len().saturating_sub(1);
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut c = low;
            for _ in 0..d {
                divisor.push((c % p as u64) as u32);
                c /= p as u64;
            }
            divisor.push(1);
            if poly_rem(poly, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Self::with_degree(p, e)
    }

    /// GF(p^e) for a prime `p`.
    pub fn with_degree(p: u32, e: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) || e == 0 {
            return Err(FieldError::NotPrimePower(
                (p as u64).saturating_pow(e.max(1)),
            ));
        }
        let q64 = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if q64 > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge {
                q: q64,
                max: MAX_FIELD_ORDER,
            });
        }
        let q = q64 as u32;
        let modulus = smallest_irreducible(p, e);
        let mut field = FieldSpec {
            p,
            e,
            q,
            modulus,
            primitive: FieldElement::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            add: None,
        };
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add = Some(table);
        }
        field.primitive = field.find_primitive();
        let g = field.primitive.0;
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for k in 0..q - 1 {
            exp.push(x);
            log[x as usize] = k;
            x = field.slow_mul(x, g);
        }
        field.exp = exp;
        field.log = log;
        Ok(field)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first; length `e + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            let term = match i {
                0 => coeff,
                1 => format!("{coeff}x"),
                _ => format!("{coeff}x^{i}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The element with the given code.
    ///
    /// # Panics
    /// If `code >= q`.
    pub fn element(&self, code: u32) -> FieldElement {
        assert!(code < self.q, "code {code} out of range for GF({})", self.q);
        FieldElement(code)
    }

    pub fn try_element(&self, code: u64) -> Result<FieldElement, FieldError> {
        if code < self.q as u64 {
            Ok(FieldElement(code as u32))
        } else {
            Err(FieldError::OutOfRange { code, q: self.q })
        }
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<FieldElement, FieldError> {
        let mut code = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.p {
                return Err(FieldError::OutOfRange {
                    code: c as u64,
                    q: self.q,
                });
            }
            code = code * self.p as u64 + c as u64;
        }
        self.try_element(code)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        match &self.add {
            Some(t) => FieldElement(t[(a.0 * self.q + b.0) as usize]),
            None => FieldElement(self.add_digits(a.0, b.0)),
        }
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u32;
        let mut place = 1u32;
        let mut x = a.0;
        for _ in 0..self.e {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * place;
            x /= self.p;
            place = place.wrapping_mul(self.p);
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElement(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        if k == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let n = (self.q - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (k % n)) % n;
        FieldElement(self.exp[l as usize])
    }

    /// Discrete logarithm to the base [`FieldSpec::primitive_element`].
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    /// `g^k` for the primitive element `g`.
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.q as u64 - 1)) as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FieldElement) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != FieldElement::ONE {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Smallest element (by code) of multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> FieldElement {
        self.primitive
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let ca = FieldElement(a).coefficients(self);
        let cb = FieldElement(b).coefficients(self);
        let mut prod = vec![0u32; (2 * self.e) as usize];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, p);
        let mut code = 0u32;
        for &c in r.iter().rev() {
            code = code * p + c;
        }
        code
    }

    fn slow_pow(&self, a: u32, mut k: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn find_primitive(&self) -> FieldElement {
        let n = (self.q - 1) as u64;
        let factors = prime_factors(n);
        for g in 1..self.q {
            if factors.iter().all(|&r| self.slow_pow(g, n / r) != 1) {
                return FieldElement(g);
            }
        }
        unreachable!("every finite field has a primitive element")
    }
}

/// Lexicographically smallest irreducible monic polynomial of degree `e`,
/// comparing coefficient sequences from the leading term down.
fn smallest_irreducible(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for low in 0..count {
        let mut poly = Vec::with_capacity(e as usize + 1);
        let mut c = low;
        for _ in 0..e {
            poly.push((c % p as u64) as u32);
            c /= p as u64;
        }
        poly.push(1);
        if is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prime_fields_use_x() {
        let f = make_field(7).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (7, 1));
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.modulus_string(), "x");
    }

    #[test]
    fn gf4_modulus() {
        let f = make_field(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.modulus_string(), "x^2+x+1");
    }

    #[test]
    fn gf8_and_gf9_moduli() {
        // Degree 3 over F_2: x^3+x+1 precedes x^3+x^2+1.
        assert_eq!(make_field(8).unwrap().modulus(), &[1, 1, 0, 1]);
        // Degree 2 over F_3: x^2+1 is the first irreducible.
        assert_eq!(make_field(9).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn non_prime_powers_rejected() {
        for n in [0, 1, 6, 10, 12, 15, 18, 20] {
            assert_eq!(make_field(n).unwrap_err(), FieldError::NotPrimePower(n));
        }
    }

    #[test]
    fn small_products() {
        let f3 = make_field(3).unwrap();
        assert_eq!(f3.mul(f3.element(2), f3.element(2)), f3.one());
        let f4 = make_field(4).unwrap();
        let x = f4.element(2);
        assert_eq!(f4.mul(x, x).coefficients(&f4), vec![1, 1]);
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for q in [2, 3, 4, 5, 8, 9, 27] {
            let f = make_field(q).unwrap();
            assert_eq!(f.inv(f.one()).unwrap(), f.one());
            assert_eq!(f.inv(f.zero()), Err(FieldError::DivisionByZero));
        }
    }

    #[test]
    fn arith_dispatch() {
        let f = make_field(5).unwrap();
        let a = f.element(3);
        assert_eq!(field_arith(&f, FieldOp::Neg, a, None).unwrap(), f.element(2));
        assert_eq!(field_arith(&f, FieldOp::Inv, a, None).unwrap(), f.element(2));
        assert_eq!(
            field_arith(&f, FieldOp::Add, a, Some(f.element(4))).unwrap(),
            f.element(2)
        );
        assert!(field_arith(&f, FieldOp::Mul, a, None).is_err());
    }

    fn order_by_iteration(f: &FieldSpec, a: u32) -> u32 {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = f.slow_mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn primitive_elements_are_smallest_of_full_order() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 64, 125] {
            let f = make_field(q).unwrap();
            let g = f.primitive_element().code();
            assert_eq!(order_by_iteration(&f, g), q as u32 - 1, "q={q}");
            for smaller in 1..g {
                assert!(order_by_iteration(&f, smaller) < q as u32 - 1);
            }
        }
        assert_eq!(make_field(2).unwrap().primitive_element().code(), 1);
        assert_eq!(make_field(7).unwrap().primitive_element().code(), 3);
        assert_eq!(make_field(4).unwrap().primitive_element().code(), 2);
    }

    #[test]
    fn log_tables_agree_with_polynomial_multiplication() {
        for q in [4u64, 9, 16, 27, 64, 125, 343, 512] {
            let f = make_field(q).unwrap();
            for a in 0..f.order() {
                for b in (0..f.order()).step_by(7) {
                    assert_eq!(
                        f.mul(FieldElement(a), FieldElement(b)).0,
                        f.slow_mul(a, b),
                        "q={q} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn irreducibility_by_hand() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(!is_irreducible(&[0, 1, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!is_irreducible(&[2, 0, 1], 3));
        assert!(is_irreducible(&[1, 0, 1], 3));
    }

    #[test]
    fn large_orders_rejected() {
        assert!(matches!(
            make_field(1 << 21),
            Err(FieldError::TooLarge { .. })
        ));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25] {
            let f = make_field(q).unwrap();
            for a in f.elements() {
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for b in f.elements() {
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    fn small_field() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25])
    }

    proptest! {
        #[test]
        fn field_axioms(q in small_field(), a in 0u32..25, b in 0u32..25, c in 0u32..25) {
            let f = make_field(q).unwrap();
            let n = f.order();
            let (a, b, c) = (FieldElement(a % n), FieldElement(b % n), FieldElement(c % n));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.add(a, b), f.add(b, a));
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }

        #[test]
        fn primitive_generates_everything(q in small_field()) {
            let f = make_field(q).unwrap();
            let g = f.primitive_element();
            let mut seen = vec![false; f.order() as usize];
            let mut x = f.one();
            for _ in 0..f.order() - 1 {
                seen[x.code() as usize] = true;
                x = f.mul(x, g);
            }
            prop_assert_eq!(x, f.one());
            prop_assert!(seen[1..].iter().all(|&s| s));
        }
    }
}
