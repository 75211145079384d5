//! Bilinear algorithms for cyclic convolution over GF(2) coefficients.
//!
//! An algorithm of length `L` with `t` products computes
//! `a ⊛ b = Q (R a ∘ P b)` where `a` is the constant operand (folded into
//! precomputed constants by the transform) and `b` the data operand.
//!
//! Odd lengths split `x^L + 1` into irreducible factors and recombine with
//! CRT idempotents. Powers of two work in `y = x + 1`, where the product mod
//! `y^L` has a leading term scaled by `a(1)`; when `a(1) = 1` those products
//! are free. Composite lengths use the Agarwal–Cooley nesting.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::binary::BinaryMatrix;
use crate::error::{Error, Result};
use crate::gf::{gcd, FieldCtx, FieldElement};
use crate::poly2;
use crate::text::{parse_field, LineReader};

pub const MAX_CONV_LENGTH: usize = 12;

// Thirteen symmetric products for a 5-term by 5-term polynomial product.
const POLY5_MASKS: [u64; 13] = [1, 2, 3, 8, 13, 16, 17, 22, 23, 24, 27, 29, 31];
const POLY3_MASKS: [u64; 6] = [1, 2, 4, 3, 5, 6];

// Fifteen symmetric products for multiplication modulo x^6 + x^3 + 1.
const PHI9: u64 = 0b100_1001;
const PHI9_MASKS: [u64; 15] = [1, 3, 8, 9, 13, 20, 24, 27, 31, 33, 35, 38, 44, 50, 60];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearConvAlgorithm {
    length: usize,
    p: BinaryMatrix,
    r: BinaryMatrix,
    q: BinaryMatrix,
}

impl BilinearConvAlgorithm {
    pub fn new(length: usize, p: BinaryMatrix, r: BinaryMatrix, q: BinaryMatrix) -> Result<Self> {
        let t = p.rows();
        let dims_ok = p.cols() == length
            && r.cols() == length
            && r.rows() == t
            && q.rows() == length
            && q.cols() == t;
        if !dims_ok {
            return Err(Error::Construction(format!(
                "inconsistent shapes for length {length}: P {}x{}, R {}x{}, Q {}x{}",
                p.rows(),
                p.cols(),
                r.rows(),
                r.cols(),
                q.rows(),
                q.cols()
            )));
        }
        let alg = BilinearConvAlgorithm { length, p, r, q };
        alg.verify()?;
        Ok(alg)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn p(&self) -> &BinaryMatrix {
        &self.p
    }

    pub fn r(&self) -> &BinaryMatrix {
        &self.r
    }

    pub fn q(&self) -> &BinaryMatrix {
        &self.q
    }

    /// Number of pointwise products `t`.
    pub fn mult_count(&self) -> usize {
        self.p.rows()
    }

    /// Products whose `R` row is all ones.
    pub fn unit_products(&self) -> usize {
        (0..self.r.rows())
            .filter(|&k| self.r.row_weight(k) == self.length)
            .count()
    }

    /// Products left after the all-ones rows of `R` collapse to 1, which
    /// happens whenever the constant operand sums to 1.
    pub fn nontrivial_mults(&self) -> usize {
        self.mult_count() - self.unit_products()
    }

    /// Checks the bilinear identity on every pair of unit vectors, which
    /// settles it over every extension of GF(2).
    pub fn verify(&self) -> Result<()> {
        let n = self.length;
        for i in 0..n {
            for j in 0..n {
                for o in 0..n {
                    let mut bit = false;
                    for k in 0..self.mult_count() {
                        bit ^= self.q.get(o, k) && self.r.get(k, i) && self.p.get(k, j);
                    }
                    if bit != ((i + j) % n == o) {
                        return Err(Error::Construction(format!(
                            "length-{n} algorithm fails at a_{i} b_{j} -> out_{o}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn convolve(&self, ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let ra = self.r.apply(a)?;
        let pb = self.p.apply(b)?;
        let prod: Vec<_> = ra.iter().zip(&pb).map(|(&x, &y)| ctx.mul(x, y)).collect();
        self.q.apply(&prod)
    }
}

impl fmt::Display for BilinearConvAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conv L={} t={}", self.length, self.mult_count())?;
        writeln!(f, "P")?;
        write!(f, "{}", self.p)?;
        writeln!(f, "R")?;
        write!(f, "{}", self.r)?;
        writeln!(f, "Q")?;
        write!(f, "{}", self.q)
    }
}

impl FromStr for BilinearConvAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rd = LineReader::new(s);
        let header = rd.expect("conv")?;
        let length: usize = parse_field(&rd, header, "L")?;
        let t: usize = parse_field(&rd, header, "t")?;
        let read = |rd: &mut LineReader<'_>, tag: &str, rows: usize| -> Result<BinaryMatrix> {
            rd.expect(tag)?;
            let mut body = String::new();
            for _ in 0..rows {
                body.push_str(rd.next_line()?);
                body.push('\n');
            }
            body.parse()
        };
        let p = read(&mut rd, "P", t)?;
        let r = read(&mut rd, "R", t)?;
        let q = read(&mut rd, "Q", length)?;
        if !rd.is_done() {
            return Err(rd.error("trailing input after algorithm"));
        }
        BilinearConvAlgorithm::new(length, p, r, q)
    }
}

/// Bilinear map `out = Q (R u ∘ P v)` with arbitrary input and output sizes.
#[derive(Clone, Debug)]
struct Bil {
    r: BinaryMatrix,
    p: BinaryMatrix,
    q: BinaryMatrix,
}

impl Bil {
    fn single() -> Bil {
        let one = BinaryMatrix::identity(1);
        Bil {
            r: one.clone(),
            p: one.clone(),
            q: one,
        }
    }

    fn products(&self) -> usize {
        self.p.rows()
    }

    fn symmetric(masks: &[u64], n: usize, q: BinaryMatrix) -> Bil {
        let u = BinaryMatrix::from_fn(masks.len(), n, |k, i| masks[k] >> i & 1 == 1);
        Bil { r: u.clone(), p: u, q }
    }

    fn pre(&self, rm: &BinaryMatrix, pm: &BinaryMatrix) -> Bil {
        Bil {
            r: self.r.mul(rm).expect("pre-composition shape"),
            p: self.p.mul(pm).expect("pre-composition shape"),
            q: self.q.clone(),
        }
    }

    fn post(&self, qm: &BinaryMatrix) -> Bil {
        Bil {
            r: self.r.clone(),
            p: self.p.clone(),
            q: qm.mul(&self.q).expect("post-composition shape"),
        }
    }

    /// Sum of bilinear maps sharing input and output sizes.
    fn sum(parts: &[Bil]) -> Bil {
        let stack = |f: fn(&Bil) -> &BinaryMatrix| {
            BinaryMatrix::vstack(&parts.iter().map(|b| f(b).clone()).collect::<Vec<_>>()).expect("stack shape")
        };
        let q_t = BinaryMatrix::vstack(&parts.iter().map(|b| b.q.transpose()).collect::<Vec<_>>()).expect("stack shape");
        Bil {
            r: stack(|b| &b.r),
            p: stack(|b| &b.p),
            q: q_t.transpose(),
        }
    }
}

fn embed(out_len: usize, in_len: usize, offset: usize) -> BinaryMatrix {
    BinaryMatrix::from_fn(out_len, in_len, |r, c| r == c + offset)
}

fn window(len: usize, n: usize, start: usize) -> BinaryMatrix {
    BinaryMatrix::from_fn(len, n, |r, c| c == r + start)
}

fn product_target(n: usize) -> impl Fn(usize, usize, usize) -> bool {
    move |o, i, j| i + j == o && o < 2 * n - 1
}

/// Solves for `Q` given symmetric product masks over `n` inputs and a
/// symmetric target tensor `target(o, i, j)`.
fn solve_symmetric(masks: &[u64], n: usize, outputs: usize, target: impl Fn(usize, usize, usize) -> bool) -> Result<Bil> {
    assert!(n * (n + 1) / 2 <= 64 && masks.len() <= 64);
    let tri = |f: &dyn Fn(usize, usize) -> bool| {
        let mut v = 0u64;
        let mut bit = 0;
        for i in 0..n {
            for j in i..n {
                if f(i, j) {
                    v |= 1 << bit;
                }
                bit += 1;
            }
        }
        v
    };
    let mut pivots: Vec<Option<(u64, u64)>> = vec![None; 64];
    let reduce = |pivots: &[Option<(u64, u64)>], mut v: u64, mut c: u64| {
        while v != 0 {
            let b = 63 - v.leading_zeros() as usize;
            match pivots[b] {
                Some((pv, pc)) => {
                    v ^= pv;
                    c ^= pc;
                }
                None => return (v, c),
            }
        }
        (0, c)
    };
    for (k, &m) in masks.iter().enumerate() {
        let v = tri(&|i, j| m >> i & 1 == 1 && m >> j & 1 == 1);
        let (v, c) = reduce(&pivots, v, 1 << k);
        if v != 0 {
            pivots[63 - v.leading_zeros() as usize] = Some((v, c));
        }
    }
    let mut q = BinaryMatrix::zeros(outputs, masks.len());
    for o in 0..outputs {
        let goal = tri(&|i, j| target(o, i, j));
        // reduce(goal) = goal + sum of selected products; zero residue means solved
        let (res, combo) = reduce(&pivots, goal, 0);
        if res != 0 {
            return Err(Error::Construction(format!("masks {masks:?} do not span output {o}")));
        }
        for k in 0..masks.len() {
            q.set(o, k, combo >> k & 1 == 1);
        }
    }
    Ok(Bil::symmetric(masks, n, q))
}

fn schoolbook(n: usize) -> Bil {
    let r = BinaryMatrix::from_fn(n * n, n, |k, c| k / n == c);
    let p = BinaryMatrix::from_fn(n * n, n, |k, c| k % n == c);
    let q = BinaryMatrix::from_fn(2 * n - 1, n * n, |o, k| k / n + k % n == o);
    Bil { r, p, q }
}

fn karatsuba(n: usize, h: usize, lo: &Bil, hi: &Bil) -> Bil {
    let out = 2 * n - 1;
    let low = window(h, n, 0);
    let high = window(n - h, n, h);
    let mid = BinaryMatrix::from_fn(h, n, |r, c| c == r || c == r + h);
    let m0 = lo.pre(&low, &low);
    let m1 = lo.pre(&mid, &mid);
    let m2 = hi.pre(&high, &high);
    let e0 = BinaryMatrix::from_fn(out, 2 * h - 1, |r, c| r == c || r == c + h);
    let e1 = embed(out, 2 * h - 1, h);
    let l2 = 2 * (n - h) - 1;
    let e2 = BinaryMatrix::from_fn(out, l2, |r, c| r == c + h || r == c + 2 * h);
    Bil::sum(&[m0.post(&e0), m1.post(&e1), m2.post(&e2)])
}

struct Builder {
    poly: HashMap<usize, Bil>,
    short: HashMap<usize, Bil>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            poly: HashMap::new(),
            short: HashMap::new(),
        }
    }

    /// Fewest-product algorithm for the full product of two `n`-term polynomials.
    fn poly_mul(&mut self, n: usize) -> Result<Bil> {
        if let Some(b) = self.poly.get(&n) {
            return Ok(b.clone());
        }
        let mut best = if n == 1 { Bil::single() } else { schoolbook(n) };
        let table: Option<&[u64]> = match n {
            3 => Some(&POLY3_MASKS),
            5 => Some(&POLY5_MASKS),
            _ => None,
        };
        if let Some(masks) = table {
            let b = solve_symmetric(masks, n, 2 * n - 1, product_target(n))?;
            if b.products() < best.products() {
                best = b;
            }
        }
        for h in n.div_ceil(2)..n {
            if 3 * h > 2 * n {
                break;
            }
            let lo = self.poly_mul(h)?;
            let hi = self.poly_mul(n - h)?;
            let b = karatsuba(n, h, &lo, &hi);
            if b.products() < best.products() {
                best = b;
            }
        }
        self.poly.insert(n, best.clone());
        Ok(best)
    }

    /// Product of two `n`-term polynomials truncated mod `y^n`.
    fn short_mul(&mut self, n: usize) -> Result<Bil> {
        if let Some(b) = self.short.get(&n) {
            return Ok(b.clone());
        }
        let full = self.poly_mul(n)?;
        let mut best = full.post(&window(n, 2 * n - 1, 0));
        if n > 1 {
            let h = n.div_ceil(2);
            let rest = n - h;
            let head = self.poly_mul(h)?;
            let tail = self.short_mul(rest)?;
            let low_h = window(h, n, 0);
            let low_r = window(rest, n, 0);
            let high = window(rest, n, h);
            let b = Bil::sum(&[
                head.pre(&low_h, &low_h).post(&window(n, 2 * h - 1, 0)),
                tail.pre(&low_r, &high).post(&embed(n, rest, h)),
                tail.pre(&high, &low_r).post(&embed(n, rest, h)),
            ]);
            if b.products() < best.products() {
                best = b;
            }
        }
        self.short.insert(n, best.clone());
        Ok(best)
    }

    /// Multiplication modulo an irreducible `f`.
    fn mod_mul(&mut self, f: u64) -> Result<Bil> {
        let d = poly2::degree(f).unwrap() as usize;
        if f == PHI9 {
            return solve_symmetric(&PHI9_MASKS, d, d, |o, i, j| poly2::rem(1 << (i + j), f) >> o & 1 == 1);
        }
        let red = BinaryMatrix::from_fn(d, 2 * d - 1, |r, c| poly2::rem(1 << c, f) >> r & 1 == 1);
        Ok(self.poly_mul(d)?.post(&red))
    }

    fn odd_cyclic(&mut self, len: usize) -> Result<Bil> {
        let modulus = (1u64 << len) | 1;
        let mut parts = Vec::new();
        for f in poly2::factor_squarefree(modulus) {
            let d = poly2::degree(f).unwrap() as usize;
            let red = BinaryMatrix::from_fn(d, len, |r, c| poly2::rem(1 << c, f) >> r & 1 == 1);
            let cofactor = poly2::divrem(modulus, f).0;
            let inv = poly2::inverse_mod(cofactor, f)
                .ok_or_else(|| Error::Construction(format!("x^{len} + 1 is not squarefree")))?;
            let idem = poly2::rem(poly2::mul(cofactor, inv), modulus);
            let lift =
                BinaryMatrix::from_fn(len, d, |r, c| poly2::rem(poly2::mul(1 << c, idem), modulus) >> r & 1 == 1);
            parts.push(self.mod_mul(f)?.pre(&red, &red).post(&lift));
        }
        Ok(Bil::sum(&parts))
    }

    fn pow2_cyclic(&mut self, len: usize) -> Result<Bil> {
        // x^j = (y + 1)^j, binomial coefficients mod 2 by Lucas
        let pascal = BinaryMatrix::from_fn(len, len, |i, j| i & j == i);
        let ones = BinaryMatrix::from_fn(len, len, |_, _| true);
        let lead = Bil {
            r: ones,
            p: pascal.clone(),
            q: BinaryMatrix::identity(len),
        };
        let short = self.short_mul(len - 1)?;
        let tail = short
            .pre(&window(len - 1, len, 1).mul(&pascal)?, &window(len - 1, len, 0).mul(&pascal)?)
            .post(&embed(len, len - 1, 1));
        Ok(Bil::sum(&[lead, tail]).post(&pascal))
    }
}

/// CRT index map `j -> (j mod l1, j mod l2)`, flattened row-major.
fn crt_permutation(l1: usize, l2: usize) -> BinaryMatrix {
    let n = l1 * l2;
    BinaryMatrix::from_fn(n, n, |r, c| r == (c % l1) * l2 + c % l2)
}

/// Nests two algorithms of coprime lengths into one of the product length.
pub fn agarwal_cooley(a: &BilinearConvAlgorithm, b: &BilinearConvAlgorithm) -> Result<BilinearConvAlgorithm> {
    let (l1, l2) = (a.length, b.length);
    if gcd(l1, l2) != 1 {
        return Err(Error::NotCoprime(vec![l1, l2]));
    }
    let pi = crt_permutation(l1, l2);
    let p = a.p.kron(&b.p).mul(&pi)?;
    let r = a.r.kron(&b.r).mul(&pi)?;
    let q = pi.transpose().mul(&a.q.kron(&b.q))?;
    BilinearConvAlgorithm::new(l1 * l2, p, r, q)
}

/// The algorithm used for each supported length `1..=12`.
pub fn bilinear_algorithm(length: usize) -> Result<BilinearConvAlgorithm> {
    let mut builder = Builder::new();
    let bil = match length {
        1 => Bil::single(),
        2 | 4 | 8 => builder.pow2_cyclic(length)?,
        3 | 5 | 7 | 9 | 11 => builder.odd_cyclic(length)?,
        6 | 10 | 12 => {
            let (l1, l2) = match length {
                6 => (2, 3),
                10 => (2, 5),
                _ => (3, 4),
            };
            return agarwal_cooley(&bilinear_algorithm(l1)?, &bilinear_algorithm(l2)?);
        }
        _ => return Err(Error::ConvLength(length)),
    };
    BilinearConvAlgorithm::new(length, bil.p, bil.r, bil.q)
}

/// Cyclic convolution through the bilinear algorithm of matching length.
pub fn cyclic_convolve(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> Result<Vec<FieldElement>> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    bilinear_algorithm(a.len())?.convolve(ctx, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::oracle::naive_cyclic_convolution;
    use proptest::prelude::*;

    #[test]
    fn every_length_builds_and_verifies() {
        for len in 1..=MAX_CONV_LENGTH {
            let alg = bilinear_algorithm(len).unwrap();
            assert_eq!(alg.length(), len);
            alg.verify().unwrap();
        }
        assert_eq!(bilinear_algorithm(0), Err(Error::ConvLength(0)));
        assert_eq!(bilinear_algorithm(13), Err(Error::ConvLength(13)));
    }

    #[test]
    fn product_counts() {
        let effective: Vec<usize> = (1..=12).map(|l| bilinear_algorithm(l).unwrap().nontrivial_mults()).collect();
        assert_eq!(effective, vec![0, 1, 3, 5, 9, 10, 12, 19, 18, 28, 39, 32]);
        let total: Vec<usize> = (1..=12).map(|l| bilinear_algorithm(l).unwrap().mult_count()).collect();
        assert_eq!(total, vec![1, 3, 4, 9, 10, 12, 13, 27, 19, 30, 40, 36]);
    }

    #[test]
    fn pascal_is_an_involution() {
        for len in [2, 4, 8] {
            let t = BinaryMatrix::from_fn(len, len, |i, j| i & j == i);
            assert_eq!(t.mul(&t).unwrap(), BinaryMatrix::identity(len));
        }
    }

    #[test]
    fn polynomial_products() {
        let mut b = Builder::new();
        let counts: Vec<usize> = (1..=10).map(|n| b.poly_mul(n).unwrap().products()).collect();
        assert_eq!(counts, vec![1, 3, 6, 9, 13, 18, 24, 27, 35, 39]);
        assert_eq!(b.short_mul(3).unwrap().products(), 5);
        assert_eq!(b.short_mul(7).unwrap().products(), 19);
        let f = b.mod_mul(PHI9).unwrap();
        assert_eq!(f.products(), 15);
        assert!(solve_symmetric(&[1, 2], 2, 3, product_target(2)).is_err());
    }

    #[test]
    fn coprimality_is_required() {
        let a = bilinear_algorithm(2).unwrap();
        let b = bilinear_algorithm(4).unwrap();
        assert_eq!(agarwal_cooley(&a, &b), Err(Error::NotCoprime(vec![2, 4])));
    }

    #[test]
    fn text_round_trip() {
        for len in [1, 5, 8, 12] {
            let alg = bilinear_algorithm(len).unwrap();
            let text = alg.to_string();
            assert!(text.starts_with(&format!("conv L={len} t={}", alg.mult_count())));
            assert_eq!(text.parse::<BilinearConvAlgorithm>().unwrap(), alg);
        }
        let mut broken = bilinear_algorithm(3).unwrap().to_string();
        broken = broken.replacen("Q\n1", "Q\n0", 1);
        assert!(broken.parse::<BilinearConvAlgorithm>().is_err());
    }

    proptest! {
        #[test]
        fn matches_direct_convolution(
            len in 1usize..=12,
            l in 4u32..=12,
            raw_a in prop::collection::vec(any::<u16>(), 12),
            raw_b in prop::collection::vec(any::<u16>(), 12),
        ) {
            let ctx = make_field(l).unwrap();
            let mask = (ctx.size() - 1) as u16;
            let a: Vec<_> = raw_a[..len].iter().map(|&v| FieldElement(v & mask)).collect();
            let b: Vec<_> = raw_b[..len].iter().map(|&v| FieldElement(v & mask)).collect();
            prop_assert_eq!(
                cyclic_convolve(&ctx, &a, &b).unwrap(),
                naive_cyclic_convolution(&ctx, &a, &b).unwrap()
            );
        }
    }
}
