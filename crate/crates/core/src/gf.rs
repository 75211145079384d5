//! Arithmetic in GF(2^l), 4 <= l <= 12, in polynomial basis.
//!
//! Elements are packed into a `u16`: bit `i` is the coefficient of `x^i`, where
//! `x` is a root of the field's primitive polynomial. Multiplication, inversion
//! and exponentiation go through exp/log tables.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MIN_DEGREE: u32 = 4;
pub const MAX_DEGREE: u32 = 12;

/// A packed element of GF(2^l).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn value(self) -> u16 {
        self.0
    }
}

impl BitXor for FieldElement {
    type Output = FieldElement;

    #[inline]
    fn bitxor(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for FieldElement {
    #[inline]
    fn bitxor_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl FromStr for FieldElement {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let s = s.strip_prefix("0x").unwrap_or(s);
        u16::from_str_radix(s, 16).map(FieldElement)
    }
}

/// A concrete GF(2^l) with its tables. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldCtx {
    degree: u32,
    prim_poly: u32,
    order: usize,
    // exp[i] = alpha^i for 0 <= i < 2 * order, so a sum of two logs indexes directly.
    exp: Vec<u16>,
    // log[0] is unused.
    log: Vec<u16>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({self})")
    }
}

impl fmt::Display for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})/prim_poly={:x}", self.degree, self.prim_poly)
    }
}

impl FromStr for FieldCtx {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 0,
            msg: format!("bad field descriptor `{s}`"),
        };
        let rest = s.trim().strip_prefix("GF(2^").ok_or_else(bad)?;
        let (deg, rest) = rest.split_once(")/prim_poly=").ok_or_else(bad)?;
        let degree: u32 = deg.parse().map_err(|_| bad())?;
        let poly = u32::from_str_radix(rest, 16).map_err(|_| bad())?;
        FieldCtx::with_poly(degree, poly)
    }
}

/// Builds GF(2^l) from the smallest primitive polynomial of degree `l`.
pub fn make_field(l: u32) -> Result<FieldCtx> {
    FieldCtx::new(l)
}

/// Returns the lexicographically smallest primitive polynomial of degree `l`.
pub fn smallest_primitive_poly(l: u32) -> Result<u32> {
    check_degree(l)?;
    let lo = (1u32 << l) | 1;
    let hi = 1u32 << (l + 1);
    (lo..hi)
        .step_by(2)
        .find(|&p| build_tables(l, p).is_some())
        .ok_or(Error::NoPrimitivePolynomial(l))
}

fn check_degree(l: u32) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&l) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree(l))
    }
}

/// Powers of `x` modulo `poly`; `None` unless `x` has order exactly 2^l - 1.
fn build_tables(l: u32, poly: u32) -> Option<(Vec<u16>, Vec<u16>)> {
    let order = (1usize << l) - 1;
    let mut exp = vec![0u16; 2 * order];
    let mut log = vec![0u16; 1 << l];
    let mut x: u32 = 1;
    for (i, slot) in exp.iter_mut().take(order).enumerate() {
        if i > 0 && x == 1 {
            return None;
        }
        *slot = x as u16;
        log[x as usize] = i as u16;
        x <<= 1;
        if x & (1 << l) != 0 {
            x ^= poly;
        }
    }
    if x != 1 {
        return None;
    }
    for i in order..2 * order {
        exp[i] = exp[i - order];
    }
    Some((exp, log))
}

impl FieldCtx {
    pub fn new(l: u32) -> Result<Self> {
        let poly = smallest_primitive_poly(l)?;
        Self::with_poly(l, poly)
    }

    /// Builds the field from an explicit polynomial, verifying that it is primitive.
    pub fn with_poly(l: u32, prim_poly: u32) -> Result<Self> {
        check_degree(l)?;
        if prim_poly >> l != 1 {
            return Err(Error::NoPrimitivePolynomial(l));
        }
        let (exp, log) = build_tables(l, prim_poly).ok_or(Error::NoPrimitivePolynomial(l))?;
        Ok(FieldCtx {
            degree: l,
            prim_poly,
            order: (1usize << l) - 1,
            exp,
            log,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// Multiplicative group order, 2^l - 1.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of field elements, 2^l.
    pub fn size(&self) -> usize {
        self.order + 1
    }

    /// The primitive element, the class of `x`.
    pub fn primitive(&self) -> FieldElement {
        FieldElement(self.exp[1])
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as usize) < self.size()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.size() as u16).map(FieldElement)
    }

    /// `alpha^i` for any (possibly negative) exponent.
    #[inline]
    pub fn exp(&self, i: i64) -> FieldElement {
        FieldElement(self.exp[i.rem_euclid(self.order as i64) as usize])
    }

    #[inline]
    pub fn log(&self, a: FieldElement) -> Option<usize> {
        if a.is_zero() {
            None
        } else {
            Some(self.log[a.0 as usize] as usize)
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.exp[s])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        match self.log(a) {
            None => Err(Error::ZeroInverse),
            Some(0) => Ok(FieldElement::ONE),
            Some(k) => Ok(FieldElement(self.exp[self.order - k])),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k`, with the exponent reduced modulo 2^l - 1 for nonzero `a`.
    pub fn pow(&self, a: FieldElement, k: i64) -> FieldElement {
        match self.log(a) {
            None if k == 0 => FieldElement::ONE,
            None => FieldElement::ZERO,
            Some(e) => self.exp(e as i64 * k.rem_euclid(self.order as i64)),
        }
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// The `t`-fold Frobenius image `a^(2^t)`.
    pub fn frobenius(&self, a: FieldElement, t: u32) -> FieldElement {
        match self.log(a) {
            None => FieldElement::ZERO,
            Some(e) => {
                let shift = (1u64 << (t % self.degree)) % self.order as u64;
                self.exp((e as u64 * shift % self.order as u64) as i64)
            }
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElement) -> Option<usize> {
        let e = self.log(a)?;
        Some(self.order / gcd(e, self.order))
    }

    /// `beta = alpha^((2^l - 1) / n)`, an element of multiplicative order exactly `n`.
    pub fn nth_root(&self, n: usize) -> Result<FieldElement> {
        if n == 0 || !self.order.is_multiple_of(n) {
            return Err(Error::LengthNotDivisor {
                n,
                l: self.degree,
            });
        }
        Ok(self.exp((self.order / n) as i64))
    }

    /// Whether `a` lies in the subfield GF(2^m).
    pub fn in_subfield(&self, a: FieldElement, m: u32) -> bool {
        self.frobenius(a, m) == a
    }

    /// Field trace down to GF(2^m) for `m | l`.
    pub fn trace_to(&self, a: FieldElement, m: u32) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        let mut t = 0;
        while t < self.degree {
            acc ^= self.frobenius(a, t);
            t += m;
        }
        acc
    }
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
