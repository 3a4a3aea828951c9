//! Arithmetic in F_{q²} for q = p^a, with F_q embedded as the fixed field of
//! the Frobenius x ↦ x^q.
//!
//! Elements are polynomials over F_p of degree < 2a modulo a fixed monic
//! irreducible. Every selection rule (modulus, generator) is "lexicographically
//! least, comparing coefficients from the constant term upward", and the
//! element index is chosen so that integer order on indices *is* that order:
//! the constant coefficient is the most significant base-p digit.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_Q: u64 = 32;

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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

/// Polynomial over F_p as coefficient vector, constant term first.
type Poly = Vec<u32>;

fn trim(mut f: Poly) -> Poly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Remainder of `f` modulo the monic polynomial `m`.
fn poly_rem(f: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r: Poly = f.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                r[idx] = (r[idx] + p - (lead * mk) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn poly_mul(f: &[u32], g: &[u32], p: u32) -> Poly {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + a * b) % p;
        }
    }
    out
}

/// Monic polynomials of exact degree `deg` in lexicographic order (constant term first).
fn monic_polys(p: u32, deg: usize) -> impl Iterator<Item = Poly> {
    let count = (p as u64).pow(deg as u32);
    (0..count).map(move |idx| {
        let mut coeffs = vec![0u32; deg + 1];
        let mut rest = idx;
        for k in (0..deg).rev() {
            coeffs[k] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[deg] = 1;
        coeffs
    })
}

/// Irreducibility by exhaustive search for a monic factor of degree ≤ deg/2.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|g| !trim(poly_rem(f, &g, p)).is_empty()))
}

/// An element of F_{q²}, addressed by its index in the field's canonical order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct FieldData {
    p: u32,
    a: u32,
    q: u32,
    degree: usize,
    size: u32,
    modulus: Poly,
    generator: FieldElement,
    exp: Vec<u32>,
    log: Vec<u32>,
    frobenius: Vec<u32>,
    trace: Vec<u32>,
}

/// The field F_{q²} together with its defining data. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldData>);

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p())
            .field("a", &self.a())
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.a() == other.a() && self.0.modulus == other.0.modulus
    }
}

impl Eq for FieldSpec {}

/// Wire form of a [`FieldSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpecWire {
    pub p: u32,
    pub a: u32,
    pub modulus: Vec<u32>,
}

/// Builds F_{q²} for q = p^a with the default size limit.
pub fn make_field(p: u64, a: u32) -> Result<FieldSpec> {
    make_field_limited(p, a, DEFAULT_MAX_Q)
}

pub fn make_field_limited(p: u64, a: u32, max_q: u64) -> Result<FieldSpec> {
    if !is_prime(p) {
        return Err(Error::Input(format!("{p} is not prime")));
    }
    if a == 0 {
        return Err(Error::Input("exponent a must be positive".into()));
    }
    let q = p
        .checked_pow(a)
        .filter(|&q| q <= max_q)
        .ok_or_else(|| Error::Resource(format!("q = {p}^{a} exceeds the limit {max_q}")))?;
    // Tables are indexed by u32 and sized q²; keep well inside that.
    if q > 1 << 12 {
        return Err(Error::Resource(format!("q = {q} is too large for table-driven arithmetic")));
    }
    let p = p as u32;
    let degree = 2 * a as usize;
    let modulus = monic_polys(p, degree)
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists");
    Ok(FieldSpec::with_modulus(p, a, q as u32, modulus))
}

impl FieldSpec {
    fn with_modulus(p: u32, a: u32, q: u32, modulus: Poly) -> FieldSpec {
        let degree = 2 * a as usize;
        let size = q * q;
        let order = (size - 1) as u64;
        let to_poly = |idx: u32| -> Poly { index_to_coeffs(idx, p, degree) };
        let mul_poly = |x: &Poly, y: &Poly| trim(poly_rem(&poly_mul(x, y, p), &modulus, p));
        let pow_poly = |x: &Poly, mut e: u64| {
            let mut base = x.clone();
            let mut acc: Poly = vec![1];
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_poly(&acc, &base);
                }
                base = mul_poly(&base, &base);
                e >>= 1;
            }
            acc
        };
        let factors = prime_factors(order);
        let generator = (1..size)
            .find(|&idx| {
                let x = to_poly(idx);
                factors.iter().all(|r| pow_poly(&x, order / r) != vec![1])
            })
            .expect("F_{q²}* is cyclic");
        let g = to_poly(generator);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; size as usize];
        let mut cur: Poly = vec![1];
        for k in 0..order as u32 {
            let idx = coeffs_to_index(&cur, p, degree);
            exp.push(idx);
            log[idx as usize] = k;
            cur = mul_poly(&cur, &g);
        }
        let mut spec = FieldSpec(Arc::new(FieldData {
            p,
            a,
            q,
            degree,
            size,
            modulus,
            generator: FieldElement(generator),
            exp,
            log,
            frobenius: Vec::new(),
            trace: Vec::new(),
        }));
        let frobenius: Vec<u32> = spec.elements().map(|x| spec.pow(x, q as u64).0).collect();
        let trace: Vec<u32> = spec
            .elements()
            .map(|x| {
                let mut acc = FieldElement::ZERO;
                let mut y = x;
                for _ in 0..degree {
                    acc = spec.add(acc, y);
                    y = spec.pow(y, p as u64);
                }
                let c = spec.coeffs(acc);
                debug_assert!(c[1..].iter().all(|&v| v == 0));
                c[0]
            })
            .collect();
        let data = Arc::get_mut(&mut spec.0).expect("freshly built field is unshared");
        data.frobenius = frobenius;
        data.trace = trace;
        spec
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn a(&self) -> u32 {
        self.0.a
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Number of elements, q².
    pub fn size(&self) -> u32 {
        self.0.size
    }

    /// The defining polynomial, constant term first, monic of degree 2a.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Least multiplicative generator of F_{q²}*.
    pub fn generator(&self) -> FieldElement {
        self.0.generator
    }

    pub fn to_wire(&self) -> FieldSpecWire {
        FieldSpecWire {
            p: self.p(),
            a: self.a(),
            modulus: self.0.modulus.clone(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(self.0.exp[0])
    }

    /// All q² elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.0.size).map(FieldElement)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        index_to_coeffs(x.0, self.0.p, self.0.degree)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.0.degree || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::Structural(format!(
                "expected {} coefficients below {}, got {coeffs:?}",
                self.0.degree, self.0.p
            )));
        }
        Ok(FieldElement(coeffs_to_index(coeffs, self.0.p, self.0.degree)))
    }

    /// Validates an element index against this field.
    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.0.size {
            Ok(FieldElement(index))
        } else {
            Err(Error::Structural(format!(
                "element index {index} outside a field of size {}",
                self.0.size
            )))
        }
    }

    /// The constant polynomial k mod p.
    pub fn from_int(&self, k: i64) -> FieldElement {
        let mut c = vec![0u32; self.0.degree];
        c[0] = k.rem_euclid(self.0.p as i64) as u32;
        FieldElement(coeffs_to_index(&c, self.0.p, self.0.degree))
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let p = self.0.p;
        if p == 2 {
            return FieldElement(x.0 ^ y.0);
        }
        let (mut a, mut b) = (x.0, y.0);
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.0.degree {
            out += ((a % p + b % p) % p) * w;
            a /= p;
            b /= p;
            w *= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        let p = self.0.p;
        if p == 2 {
            return x;
        }
        let mut a = x.0;
        let mut out = 0u32;
        let mut w = 1u32;
        for _ in 0..self.0.degree {
            out += ((p - a % p) % p) * w;
            a /= p;
            w *= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.is_zero() || y.is_zero() {
            return FieldElement::ZERO;
        }
        let order = self.0.size - 1;
        let k = (self.0.log[x.0 as usize] + self.0.log[y.0 as usize]) % order;
        FieldElement(self.0.exp[k as usize])
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::Domain("zero has no inverse in F_{q²}".into()));
        }
        let order = self.0.size - 1;
        let k = (order - self.0.log[x.0 as usize]) % order;
        Ok(FieldElement(self.0.exp[k as usize]))
    }

    /// x^e by square-and-multiply.
    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// x^k for any integer k (x must be nonzero when k < 0).
    pub fn pow_signed(&self, x: FieldElement, k: i64) -> FieldElement {
        let order = (self.0.size - 1) as i64;
        if x.is_zero() {
            return if k == 0 { self.one() } else { x };
        }
        self.pow(x, k.rem_euclid(order) as u64)
    }

    /// x ↦ x^q, the generator of Gal(F_{q²}/F_q).
    pub fn frobenius_q(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.0.frobenius[x.0 as usize])
    }

    /// Absolute trace F_{q²} → F_p, returned as a residue in 0..p.
    pub fn trace(&self, x: FieldElement) -> u32 {
        self.0.trace[x.0 as usize]
    }

    /// Membership in F_q = {x : x^q = x}.
    pub fn in_subfield(&self, x: FieldElement) -> bool {
        self.frobenius_q(x) == x
    }

    /// F_q in canonical order.
    pub fn subfield_elements(&self) -> Vec<FieldElement> {
        self.elements().filter(|&x| self.in_subfield(x)).collect()
    }

    /// {e : e^q = -e}.
    pub fn skew_elements(&self) -> Vec<FieldElement> {
        self.elements()
            .filter(|&e| self.frobenius_q(e) == self.neg(e))
            .collect()
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, x: FieldElement) -> u64 {
        assert!(!x.is_zero());
        let order = (self.0.size - 1) as u64;
        let l = self.0.log[x.0 as usize] as u64;
        order / num_integer::gcd(order, l)
    }

    /// The element α = g^{q-1} of multiplicative order q + 1.
    pub fn find_alpha(&self) -> FieldElement {
        let alpha = self.pow(self.generator(), (self.q() - 1) as u64);
        assert_eq!(self.order_of(alpha), (self.q() + 1) as u64);
        alpha
    }

    pub fn format(&self, x: FieldElement) -> String {
        let c = self.coeffs(x);
        let terms: Vec<String> = c
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(k, &v)| match (k, v) {
                (0, v) => v.to_string(),
                (1, 1) => "t".to_string(),
                (1, v) => format!("{v}t"),
                (k, 1) => format!("t^{k}"),
                (k, v) => format!("{v}t^{k}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

fn coeffs_to_index(c: &[u32], p: u32, degree: usize) -> u32 {
    (0..degree).fold(0u32, |acc, k| acc * p + c.get(k).copied().unwrap_or(0))
}

fn index_to_coeffs(mut idx: u32, p: u32, degree: usize) -> Vec<u32> {
    let mut c = vec![0u32; degree];
    for k in (0..degree).rev() {
        c[k] = idx % p;
        idx /= p;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Irreducibility oracle by root/factor search independent of `is_irreducible`:
    /// f has no factor of degree ≤ deg/2 iff no product of two monic polys equals it.
    fn irreducible_by_products(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            for g in monic_polys(p, d) {
                for h in monic_polys(p, deg - d) {
                    if poly_mul(&g, &h, p) == f {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn modulus_q2() {
        assert_eq!(make_field(2, 1).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn modulus_q3() {
        let oracle = monic_polys(3, 2).find(|f| irreducible_by_products(f, 3)).unwrap();
        assert_eq!(oracle, vec![1, 0, 1]);
        assert_eq!(make_field(3, 1).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn modulus_q4() {
        // 16 monic quartics over F_2, constant term compared first.
        let oracle = monic_polys(2, 4).find(|f| irreducible_by_products(f, 2)).unwrap();
        assert_eq!(oracle, vec![1, 0, 0, 1, 1]);
        assert_eq!(make_field(2, 2).unwrap().modulus(), &[1, 0, 0, 1, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(make_field(4, 1), Err(Error::Input(_))));
        assert!(matches!(make_field(1, 1), Err(Error::Input(_))));
        assert!(matches!(make_field(2, 6), Err(Error::Resource(_))));
        assert!(make_field_limited(2, 6, 64).is_ok());
    }

    #[test]
    fn frobenius_in_f4() {
        let f = make_field(2, 1).unwrap();
        let t = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.frobenius_q(t), f.from_coeffs(&[1, 1]).unwrap());
        for x in f.elements() {
            assert_eq!(f.frobenius_q(f.frobenius_q(x)), x);
        }
    }

    #[test]
    fn alpha_in_f4() {
        let f = make_field(2, 1).unwrap();
        let alpha = f.find_alpha();
        assert_eq!(f.coeffs(alpha), vec![0, 1]);
        assert_eq!(f.pow(alpha, 3), f.one());
        assert_ne!(alpha, f.one());
    }

    #[test]
    fn alpha_properties_all_supported_q() {
        for (p, a) in [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (31, 1)] {
            let f = make_field(p, a).unwrap();
            let q = f.q() as u64;
            let alpha = f.find_alpha();
            assert_eq!(f.pow(alpha, q + 1), f.one());
            assert_eq!(f.frobenius_q(alpha), f.inv(alpha).unwrap());
        }
    }

    #[test]
    fn generator_has_full_order_exhaustively() {
        for (p, a) in [(2, 1), (2, 2), (3, 1), (2, 3), (5, 1)] {
            let f = make_field(p, a).unwrap();
            let g = f.generator();
            let mut seen = std::collections::HashSet::new();
            let mut x = f.one();
            for _ in 0..f.size() - 1 {
                assert!(seen.insert(x));
                x = f.mul(x, g);
            }
            assert_eq!(x, f.one());
            assert_eq!(seen.len() as u32, f.size() - 1);
        }
    }

    #[test]
    fn fixed_field_and_skew_elements() {
        for (p, a) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)] {
            let f = make_field(p, a).unwrap();
            let q = f.q() as usize;
            assert_eq!(f.subfield_elements().len(), q);
            let skew = f.skew_elements();
            assert_eq!(skew.len(), q);
            assert!(skew.contains(&f.zero()));
            if p == 2 {
                assert_eq!(skew, f.subfield_elements());
            }
        }
    }

    #[test]
    fn trace_lands_in_prime_field_and_is_additive() {
        let f = make_field(3, 2).unwrap();
        for x in f.elements() {
            for y in f.elements().step_by(7) {
                assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % 3);
            }
        }
        assert!(f.elements().any(|x| f.trace(x) != 0));
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        let f = make_field(3, 1).unwrap();
        for x in f.elements() {
            assert_eq!(f.add(x, f.neg(x)), f.zero());
            if !x.is_zero() {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
            }
            for y in f.elements() {
                for z in f.elements() {
                    assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                }
            }
        }
    }

    #[test]
    fn element_index_matches_lexicographic_order() {
        let f = make_field(3, 1).unwrap();
        let all: Vec<Vec<u32>> = f.elements().map(|x| f.coeffs(x)).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    use proptest::prelude::*;

    proptest! {
        #[test]
        fn frobenius_is_a_field_automorphism(x in 0u32..256, y in 0u32..256) {
            let f = make_field(2, 4).unwrap();
            let (x, y) = (FieldElement(x), FieldElement(y));
            prop_assert_eq!(f.frobenius_q(f.add(x, y)), f.add(f.frobenius_q(x), f.frobenius_q(y)));
            prop_assert_eq!(f.frobenius_q(f.mul(x, y)), f.mul(f.frobenius_q(x), f.frobenius_q(y)));
        }

        #[test]
        fn frobenius_is_automorphism_odd(x in 0u32..81, y in 0u32..81) {
            let f = make_field(3, 2).unwrap();
            let (x, y) = (FieldElement(x), FieldElement(y));
            prop_assert_eq!(f.frobenius_q(f.add(x, y)), f.add(f.frobenius_q(x), f.frobenius_q(y)));
            prop_assert_eq!(f.frobenius_q(f.mul(x, y)), f.mul(f.frobenius_q(x), f.frobenius_q(y)));
        }
    }
}
