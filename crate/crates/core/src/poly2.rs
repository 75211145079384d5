//! Polynomials over GF(2) packed into a `u64` (bit i = coefficient of x^i).

pub fn degree(p: u64) -> Option<u32> {
    (p != 0).then(|| 63 - p.leading_zeros())
}

pub fn mul(a: u64, b: u64) -> u64 {
    let mut acc = 0;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    acc
}

pub fn divrem(a: u64, b: u64) -> (u64, u64) {
    let db = degree(b).expect("division by zero polynomial");
    let (mut q, mut r) = (0u64, a);
    while let Some(dr) = degree(r) {
        if dr < db {
            break;
        }
        q |= 1 << (dr - db);
        r ^= b << (dr - db);
    }
    (q, r)
}

pub fn rem(a: u64, b: u64) -> u64 {
    divrem(a, b).1
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m, rem(a, m));
    let (mut s0, mut s1) = (0u64, 1u64);
    while r1 != 0 {
        let (q, r) = divrem(r0, r1);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s0 ^ mul(q, s1));
    }
    (r0 == 1).then(|| rem(s0, m))
}

/// Irreducible factors of a squarefree polynomial, by trial division in
/// increasing order of the packed value.
pub fn factor_squarefree(mut p: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while degree(p).is_some_and(|dp| dp > 0) {
        if degree(d).unwrap() > degree(p).unwrap() {
            break;
        }
        let (q, r) = divrem(p, d);
        if r == 0 {
            factors.push(d);
            p = q;
        } else {
            d += 1;
        }
    }
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_of_x_l_plus_one() {
        assert_eq!(factor_squarefree((1 << 3) | 1), vec![0b11, 0b111]);
        assert_eq!(factor_squarefree((1 << 7) | 1), vec![0b11, 0b1011, 0b1101]);
        assert_eq!(factor_squarefree((1 << 9) | 1), vec![0b11, 0b111, 0b1001001]);
        let f11 = factor_squarefree((1 << 11) | 1);
        assert_eq!(f11, vec![0b11, 0x7ff]);
        for l in [3u32, 5, 7, 9, 11] {
            let fs = factor_squarefree((1 << l) | 1);
            assert_eq!(fs.iter().fold(1, |acc, &f| mul(acc, f)), (1 << l) | 1);
        }
    }

    #[test]
    fn inverses() {
        let m = 0b1001001;
        for a in 1..64u64 {
            let inv = inverse_mod(a, m).unwrap();
            assert_eq!(rem(mul(a, inv), m), 1);
        }
        assert_eq!(inverse_mod(0b11, 0b101), None);
    }
}
