//! Cyclotomic cosets, normal bases of subfields, Good–Thomas index maps and
//! coprime factorizations of transform lengths.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{gcd, FieldCtx, FieldElement};

/// Orbit of an index under doubling modulo `N`, in the order `rep * 2^t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicCoset {
    pub representative: usize,
    pub elements: Vec<usize>,
}

impl CyclotomicCoset {
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

impl fmt::Display for CyclotomicCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Partition of `0..n` into cyclotomic cosets, sorted by representative.
pub fn cyclotomic_cosets(n: usize) -> Result<Vec<CyclotomicCoset>> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::EvenLength(n));
    }
    let mut seen = vec![false; n];
    let mut cosets = Vec::new();
    for rep in 0..n {
        if seen[rep] {
            continue;
        }
        let mut elements = Vec::new();
        let mut e = rep;
        loop {
            seen[e] = true;
            elements.push(e);
            e = (2 * e) % n;
            if e == rep {
                break;
            }
        }
        cosets.push(CyclotomicCoset {
            representative: rep,
            elements,
        });
    }
    Ok(cosets)
}

/// Rank over GF(2) of bit-packed vectors.
pub fn gf2_rank(vectors: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Frobenius conjugates `gamma^(2^0), ..., gamma^(2^(m-1))`.
pub fn conjugates(ctx: &FieldCtx, gamma: FieldElement, m: u32) -> Vec<FieldElement> {
    (0..m).map(|t| ctx.frobenius(gamma, t)).collect()
}

pub fn is_normal_element(ctx: &FieldCtx, gamma: FieldElement, m: u32) -> bool {
    if !ctx.in_subfield(gamma, m) {
        return false;
    }
    let packed: Vec<u64> = conjugates(ctx, gamma, m)
        .into_iter()
        .map(|c| c.0 as u64)
        .collect();
    gf2_rank(&packed) == m as usize
}

/// Smallest packed element of GF(2^m) inside `ctx` whose conjugates form a basis.
pub fn normal_basis_generator(ctx: &FieldCtx, m: u32) -> Result<FieldElement> {
    let l = ctx.degree();
    if m == 0 || !l.is_multiple_of(m) {
        return Err(Error::SubfieldDegree { m, l });
    }
    ctx.elements()
        .skip(1)
        .find(|&g| is_normal_element(ctx, g, m))
        .ok_or_else(|| Error::Construction(format!("no normal element for GF(2^{m})")))
}

pub fn mod_inverse(a: usize, m: usize) -> Option<usize> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i64 % m as i64, m as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i64) as usize)
}

fn pairwise_coprime(factors: &[usize]) -> bool {
    factors.iter().all(|&f| f >= 2)
        && factors
            .iter()
            .enumerate()
            .all(|(i, &a)| factors[i + 1..].iter().all(|&b| gcd(a, b) == 1))
}

/// Good–Thomas input and output index maps for pairwise coprime factors.
///
/// Multi-indices are flattened row-major with the first factor most
/// significant. `input_index[flat(n_1..n_s)] = sum n_i * (N / N_i) mod N` and
/// `output_index[flat(k_1..k_s)]` is the CRT solution with `k mod N_i = k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodThomasMap {
    pub factors: Vec<usize>,
    pub input_index: Vec<usize>,
    pub output_index: Vec<usize>,
}

impl GoodThomasMap {
    pub fn len(&self) -> usize {
        self.input_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input_index.is_empty()
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&i, &f)| acc * f + i)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut multi = vec![0; self.factors.len()];
        for (slot, &f) in multi.iter_mut().zip(&self.factors).rev() {
            *slot = flat % f;
            flat /= f;
        }
        multi
    }

    pub fn input(&self, multi: &[usize]) -> usize {
        self.input_index[self.flatten(multi)]
    }

    pub fn output(&self, multi: &[usize]) -> usize {
        self.output_index[self.flatten(multi)]
    }

    pub fn is_bijection(&self) -> bool {
        is_permutation(&self.input_index) && is_permutation(&self.output_index)
    }
}

pub fn is_permutation(map: &[usize]) -> bool {
    let mut hit = vec![false; map.len()];
    for &v in map {
        if v >= map.len() || hit[v] {
            return false;
        }
        hit[v] = true;
    }
    true
}

/// Builds the map by applying the two-factor construction recursively.
pub fn good_thomas_map(factors: &[usize]) -> Result<GoodThomasMap> {
    if factors.is_empty() || (factors.len() > 1 && !pairwise_coprime(factors)) {
        return Err(Error::NotCoprime(factors.to_vec()));
    }
    if factors.len() == 1 {
        let n = factors[0];
        if n == 0 {
            return Err(Error::NotCoprime(factors.to_vec()));
        }
        return Ok(GoodThomasMap {
            factors: factors.to_vec(),
            input_index: (0..n).collect(),
            output_index: (0..n).collect(),
        });
    }
    let n1 = factors[0];
    let rest = good_thomas_map(&factors[1..])?;
    let r = rest.len();
    let n = n1 * r;
    // k = k1 * (R^-1 mod N1) * R + k_rest * (N1^-1 mod R) * N1  (mod N)
    let e1 = r * mod_inverse(r % n1, n1).expect("coprime") % n;
    let e2 = n1 * mod_inverse(n1 % r, r).expect("coprime") % n;
    let mut input_index = Vec::with_capacity(n);
    let mut output_index = Vec::with_capacity(n);
    for i1 in 0..n1 {
        for j in 0..r {
            input_index.push((i1 * r + rest.input_index[j] * n1) % n);
            output_index.push((i1 * e1 + rest.output_index[j] * e2) % n);
        }
    }
    Ok(GoodThomasMap {
        factors: factors.to_vec(),
        input_index,
        output_index,
    })
}

/// Prime-power factorization as `(p^e)` units, ascending.
pub fn prime_power_units(mut n: usize) -> Vec<usize> {
    let mut units = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut q = 1;
            while n.is_multiple_of(p) {
                n /= p;
                q *= p;
            }
            units.push(q);
        }
        p += 1;
    }
    if n > 1 {
        units.push(n);
    }
    units
}

fn set_partitions(items: &[usize]) -> Vec<Vec<usize>> {
    // Each partition as the list of block products.
    fn go(items: &[usize], blocks: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some((&first, rest)) = items.split_first() else {
            out.push(blocks.clone());
            return;
        };
        for i in 0..blocks.len() {
            blocks[i] *= first;
            go(rest, blocks, out);
            blocks[i] /= first;
        }
        blocks.push(first);
        go(rest, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(items, &mut Vec::new(), &mut out);
    out
}

/// All pairwise coprime factorizations of `n` with factors in `2..=max_factor`.
///
/// Only multi-factor lists are returned, except when `n` is a prime power: then
/// the singleton `[n]` is the only candidate. Each list is ascending and the
/// result is sorted lexicographically.
pub fn coprime_decompositions(n: usize, max_factor: usize) -> Vec<Vec<usize>> {
    if n < 2 {
        return Vec::new();
    }
    let units = prime_power_units(n);
    if units.len() == 1 {
        return if n <= max_factor { vec![vec![n]] } else { Vec::new() };
    }
    let mut out: Vec<Vec<usize>> = set_partitions(&units)
        .into_iter()
        .filter(|p| p.len() >= 2 && p.iter().all(|&f| f <= max_factor))
        .map(|mut p| {
            p.sort_unstable();
            p
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// `N = f1 x f2 x ...`
pub fn format_decomposition(n: usize, factors: &[usize]) -> String {
    let parts: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
    format!("{n} = {}", parts.join(" x "))
}

/// Divisors of `2^l - 1` greater than one, ascending.
pub fn transform_lengths(l: u32) -> Vec<usize> {
    let order = (1usize << l) - 1;
    (2..=order).filter(|d| order.is_multiple_of(*d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn cosets_mod_15() {
        let cosets = cyclotomic_cosets(15).unwrap();
        let elems: Vec<Vec<usize>> = cosets.iter().map(|c| c.elements.clone()).collect();
        assert_eq!(
            elems,
            vec![
                vec![0],
                vec![1, 2, 4, 8],
                vec![3, 6, 12, 9],
                vec![5, 10],
                vec![7, 14, 13, 11]
            ]
        );
        assert_eq!(cyclotomic_cosets(1).unwrap()[0].elements, vec![0]);
        let sizes: Vec<usize> = cyclotomic_cosets(7).unwrap().iter().map(|c| c.size()).collect();
        assert_eq!(sizes, vec![1, 3, 3]);
        assert_eq!(cyclotomic_cosets(16), Err(Error::EvenLength(16)));
    }

    #[test]
    fn cosets_partition_and_close_under_doubling() {
        for l in 4..=12u32 {
            for n in transform_lengths(l) {
                let cosets = cyclotomic_cosets(n).unwrap();
                let mut all: Vec<usize> = cosets.iter().flat_map(|c| c.elements.clone()).collect();
                assert_eq!(all.len(), n);
                all.sort_unstable();
                assert!(all.iter().enumerate().all(|(i, &e)| i == e));
                for c in &cosets {
                    assert_eq!(2 * c.elements.last().unwrap() % n, c.representative);
                    assert_eq!(l as usize % c.size(), 0);
                    assert_eq!(c.representative, *c.elements.iter().min().unwrap());
                }
            }
        }
    }

    #[test]
    fn normal_bases() {
        let ctx = make_field(4).unwrap();
        assert_eq!(normal_basis_generator(&ctx, 1).unwrap(), FieldElement::ONE);
        let g2 = normal_basis_generator(&ctx, 2).unwrap();
        assert_eq!(ctx.element_order(g2), Some(3));
        assert_eq!(g2 ^ ctx.square(g2), FieldElement::ONE);
        let g4 = normal_basis_generator(&ctx, 4).unwrap();
        let conj: Vec<u64> = conjugates(&ctx, g4, 4).iter().map(|c| c.0 as u64).collect();
        assert_eq!(gf2_rank(&conj), 4);
        // exhaustive: nothing smaller passes the rank test
        for x in 1..g4.0 {
            assert!(!is_normal_element(&ctx, FieldElement(x), 4));
        }
        assert!(matches!(
            normal_basis_generator(&ctx, 3),
            Err(Error::SubfieldDegree { m: 3, l: 4 })
        ));
    }

    #[test]
    fn normal_bases_all_subfields() {
        for l in 4..=12u32 {
            let ctx = make_field(l).unwrap();
            for m in (1..=l).filter(|m| l % m == 0) {
                let g = normal_basis_generator(&ctx, m).unwrap();
                assert!(ctx.in_subfield(g, m));
                assert!(is_normal_element(&ctx, g, m));
                // a normal element of GF(2^m) has absolute trace 1
                let tr = conjugates(&ctx, g, m).into_iter().fold(FieldElement::ZERO, |a, b| a ^ b);
                assert_eq!(tr, FieldElement::ONE);
            }
        }
    }

    #[test]
    fn good_thomas_two_factor() {
        let map = good_thomas_map(&[3, 5]).unwrap();
        assert_eq!(map.input(&[1, 1]), 8);
        assert_eq!(map.output(&[1, 0]), 10);
        assert!(map.is_bijection());
        let single = good_thomas_map(&[7]).unwrap();
        assert_eq!(single.input_index, (0..7).collect::<Vec<_>>());
        assert_eq!(single.output_index, (0..7).collect::<Vec<_>>());
        assert!(matches!(good_thomas_map(&[3, 6]), Err(Error::NotCoprime(_))));
    }

    #[test]
    fn good_thomas_multi_factor_matches_closed_form() {
        let factors = [5, 7, 9, 13];
        let map = good_thomas_map(&factors).unwrap();
        let n: usize = factors.iter().product();
        for flat in 0..n {
            let multi = map.unflatten(flat);
            assert_eq!(map.flatten(&multi), flat);
            let direct: usize = multi
                .iter()
                .zip(&factors)
                .map(|(&i, &f)| i * (n / f))
                .sum::<usize>()
                % n;
            assert_eq!(map.input_index[flat], direct);
            let k = map.output_index[flat];
            for (&ki, &f) in multi.iter().zip(&factors) {
                assert_eq!(k % f, ki);
            }
        }
    }

    #[test]
    fn decompositions() {
        assert_eq!(
            coprime_decompositions(255, 200),
            vec![vec![3, 5, 17], vec![3, 85], vec![5, 51], vec![15, 17]]
        );
        let d4095 = coprime_decompositions(4095, 200);
        assert_eq!(d4095.len(), 10);
        assert!(d4095.contains(&vec![5, 7, 9, 13]));
        assert!(d4095.contains(&vec![63, 65]));
        assert_eq!(coprime_decompositions(31, 200), vec![vec![31]]);
        assert_eq!(coprime_decompositions(127, 100), Vec::<Vec<usize>>::new());
        assert_eq!(
            coprime_decompositions(1023, 200),
            vec![vec![3, 11, 31], vec![11, 93], vec![31, 33]]
        );
        assert_eq!(format_decomposition(15, &[3, 5]), "15 = 3 x 5");
    }

    #[test]
    fn decompositions_are_valid() {
        for l in 4..=12u32 {
            for n in transform_lengths(l) {
                for d in coprime_decompositions(n, n) {
                    assert_eq!(d.iter().product::<usize>(), n);
                    assert!(d.len() == 1 || pairwise_coprime(&d));
                }
            }
        }
    }
}
