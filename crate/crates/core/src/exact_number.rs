//! Exact arithmetic in the cyclotomic fields Q(ζ_4) and Q(ζ_p), p an odd prime.
//!
//! Values live in the power basis `1, ζ, …, ζ^{φ(n)-1}` reduced modulo the
//! n-th cyclotomic polynomial, so two values are equal exactly when their
//! coefficient vectors are. Rationals are `num_rational::BigRational`, which
//! keeps every value in lowest terms with a positive denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn is_odd_prime(n: u32) -> bool {
    n >= 3 && n % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Checks that `n` is a supported conductor: 4 or an odd prime.
pub fn validate_conductor(n: u32) -> Result<()> {
    if n == 4 || is_odd_prime(n) {
        Ok(())
    } else {
        Err(Error::Input(format!(
            "unsupported conductor {n}: expected 4 or an odd prime"
        )))
    }
}

/// Euler totient restricted to the supported conductors.
pub fn phi(n: u32) -> usize {
    if n == 4 {
        2
    } else {
        (n - 1) as usize
    }
}

/// An exact element of Q(ζ_n).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CyclotomicNumber {
    conductor: u32,
    coeffs: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn zero(n: u32) -> Self {
        CyclotomicNumber {
            conductor: n,
            coeffs: vec![Rational::zero(); phi(n)],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rational(n, Rational::one())
    }

    pub fn from_rational(n: u32, r: Rational) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(n: u32, k: i64) -> Self {
        Self::from_rational(n, Rational::from_integer(BigInt::from(k)))
    }

    /// Builds a value from power-basis coefficients, validating length and conductor.
    pub fn from_coeffs(n: u32, coeffs: Vec<Rational>) -> Result<Self> {
        validate_conductor(n)?;
        if coeffs.len() != phi(n) {
            return Err(Error::Structural(format!(
                "conductor {n} needs {} coefficients, got {}",
                phi(n),
                coeffs.len()
            )));
        }
        Ok(CyclotomicNumber { conductor: n, coeffs })
    }

    /// ζ_n^k reduced to the power basis.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        let mut full = vec![Rational::zero(); n as usize];
        full[k.rem_euclid(n as i64) as usize] = Rational::one();
        Self::reduce(n, full)
    }

    /// Reduces a vector indexed by exponents mod n (length n) to the power basis.
    fn reduce(n: u32, mut full: Vec<Rational>) -> Self {
        debug_assert_eq!(full.len(), n as usize);
        let coeffs = if n == 4 {
            // ζ² = -1
            let c3 = full.pop().unwrap();
            let c2 = full.pop().unwrap();
            vec![&full[0] - c2, &full[1] - c3]
        } else {
            // ζ^{p-1} = -(1 + ζ + … + ζ^{p-2})
            let top = full.pop().unwrap();
            if top.is_zero() {
                full
            } else {
                full.into_iter().map(|c| c - &top).collect()
            }
        };
        CyclotomicNumber { conductor: n, coeffs }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Returns the value as a rational if it lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(Error::Structural(format!(
                "conductor mismatch: {} vs {}",
                self.conductor, other.conductor
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Self) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub_unchecked(&self, other: &Self) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.conductor;
        if self.is_zero() || other.is_zero() {
            return Self::zero(n);
        }
        if let Some(r) = self.as_rational() {
            return other.scale(r);
        }
        if let Some(r) = other.as_rational() {
            return self.scale(r);
        }
        if n == 4 {
            let (a0, a1) = (&self.coeffs[0], &self.coeffs[1]);
            let (b0, b1) = (&other.coeffs[0], &other.coeffs[1]);
            return CyclotomicNumber {
                conductor: 4,
                coeffs: vec![a0 * b0 - a1 * b1, a0 * b1 + a1 * b0],
            };
        }
        let len = n as usize;
        let mut full = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % len;
                full[k] += a * b;
            }
        }
        Self::reduce(n, full)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Applies the Galois automorphism ζ ↦ ζ^k (k coprime to the conductor).
    pub fn galois(&self, k: u32) -> Self {
        let n = self.conductor as usize;
        let mut full = vec![Rational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                full[(j * k as usize) % n] += c;
            }
        }
        Self::reduce(self.conductor, full)
    }

    /// Complex conjugation, i.e. ζ ↦ ζ^{n-1}.
    pub fn conjugate(&self) -> Self {
        if self.as_rational().is_some() {
            return self.clone();
        }
        self.galois(self.conductor - 1)
    }

    /// x · conj(x).
    pub fn norm_squared(&self) -> Self {
        self.mul_unchecked(&self.conjugate())
    }

    /// Multiplicative inverse via the product of the nontrivial Galois conjugates.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(self.conductor, r.recip()));
        }
        let n = self.conductor;
        let mut others = Self::one(n);
        for k in 2..n {
            if n == 4 && k == 2 {
                continue;
            }
            others = others.mul_unchecked(&self.galois(k));
        }
        let norm = self.mul_unchecked(&others);
        let norm = norm
            .as_rational()
            .expect("field norm of a cyclotomic number is rational")
            .clone();
        Ok(others.scale(&norm.recip()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Evaluates at ζ_n = exp(2πi/n) in double precision.
    pub fn to_complex(&self) -> (f64, f64) {
        let n = self.conductor as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let theta = std::f64::consts::TAU * k as f64 / n;
            re += v * theta.cos();
            im += v * theta.sin();
        }
        (re, im)
    }

    /// Float export rounded to `digits` decimal places (at most 15).
    pub fn embed_float(&self, digits: u32) -> (f64, f64) {
        let (re, im) = self.to_complex();
        let scale = 10f64.powi(digits.min(15) as i32);
        let round = |x: f64| {
            let r = (x * scale).round() / scale;
            if r == 0.0 {
                0.0
            } else {
                r
            }
        };
        (round(re), round(im))
    }
}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    let z = if k == 1 {
                        format!("z{}", self.conductor)
                    } else {
                        format!("z{}^{k}", self.conductor)
                    };
                    if mag.is_one() {
                        write!(f, "{z}")?
                    } else {
                        write!(f, "{mag}*{z}")?
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// Operator sugar for values already known to share a conductor (matrix entries,
// character values). Mismatched conductors are a programming error here; use
// the `checked_*` methods at API boundaries.

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: Self) -> CyclotomicNumber {
        self.checked_add(rhs).expect("conductor mismatch")
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: Self) -> CyclotomicNumber {
        self.checked_sub(rhs).expect("conductor mismatch")
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: Self) -> CyclotomicNumber {
        self.checked_mul(rhs).expect("conductor mismatch")
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

#[derive(Serialize, Deserialize)]
struct CyclotomicWire {
    conductor: u32,
    coeffs: Vec<[String; 2]>,
}

impl Serialize for CyclotomicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicWire {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| [c.numer().to_string(), c.denom().to_string()])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CyclotomicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CyclotomicWire::deserialize(d)?;
        let coeffs = wire
            .coeffs
            .iter()
            .map(|[n, m]| {
                let n: BigInt = n.parse().map_err(D::Error::custom)?;
                let m: BigInt = m.parse().map_err(D::Error::custom)?;
                if m.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(n, m))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CyclotomicNumber::from_coeffs(wire.conductor, coeffs).map_err(D::Error::custom)
    }
}
