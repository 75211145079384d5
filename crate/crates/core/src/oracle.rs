//! Brute-force references: the direct DFT and the direct cyclic convolution.
//!
//! These stay quadratic and share no code with the fast paths.

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};

/// `F_k = sum_n f_n alpha^(n k)`, evaluated term by term.
pub fn naive_dft(ctx: &FieldCtx, alpha: FieldElement, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let n = f.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenLength(n));
    }
    if ctx.element_order(alpha) != Some(n) {
        return Err(Error::RootOrder {
            value: alpha.0 as u32,
            order: n,
        });
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let step = ctx.pow(alpha, k as i64);
        let mut w = FieldElement::ONE;
        let mut acc = FieldElement::ZERO;
        for &fj in f {
            acc ^= ctx.mul(fj, w);
            w = ctx.mul(w, step);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `out_k = sum_j a_j b_((k - j) mod L)`.
pub fn naive_cyclic_convolution(
    ctx: &FieldCtx,
    a: &[FieldElement],
    b: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    Ok((0..n)
        .map(|k| {
            (0..n).fold(FieldElement::ZERO, |acc, j| {
                acc ^ ctx.mul(a[j], b[(k + n - j) % n])
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut impl Rng, ctx: &FieldCtx, n: usize) -> Vec<FieldElement> {
        (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
    }

    #[test]
    fn dft_of_scaled_delta_is_constant() {
        let ctx = make_field(4).unwrap();
        let alpha = ctx.nth_root(15).unwrap();
        let mut f = vec![FieldElement::ZERO; 15];
        f[0] = FieldElement(0x9);
        assert_eq!(naive_dft(&ctx, alpha, &f).unwrap(), vec![FieldElement(0x9); 15]);
    }

    #[test]
    fn dft_rejects_bad_lengths() {
        let ctx = make_field(4).unwrap();
        let alpha = ctx.nth_root(15).unwrap();
        assert_eq!(
            naive_dft(&ctx, FieldElement::ONE, &[FieldElement::ONE; 2]),
            Err(Error::EvenLength(2))
        );
        assert!(matches!(
            naive_dft(&ctx, alpha, &[FieldElement::ONE; 5]),
            Err(Error::RootOrder { .. })
        ));
    }

    #[test]
    fn dft_linear_and_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (l, n) in [(4, 15), (6, 63), (8, 51), (9, 73)] {
            let ctx = make_field(l).unwrap();
            let alpha = ctx.nth_root(n).unwrap();
            let f = rand_vec(&mut rng, &ctx, n);
            let g = rand_vec(&mut rng, &ctx, n);
            let fg: Vec<_> = f.iter().zip(&g).map(|(&a, &b)| a ^ b).collect();
            let lhs = naive_dft(&ctx, alpha, &fg).unwrap();
            let rhs: Vec<_> = naive_dft(&ctx, alpha, &f)
                .unwrap()
                .into_iter()
                .zip(naive_dft(&ctx, alpha, &g).unwrap())
                .map(|(a, b)| a ^ b)
                .collect();
            assert_eq!(lhs, rhs);
            // N odd, so N * x = x in characteristic 2 and no scaling is needed
            let back = naive_dft(&ctx, ctx.inv(alpha).unwrap(), &naive_dft(&ctx, alpha, &f).unwrap()).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn convolution_small_cases() {
        let ctx = make_field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = rand_vec(&mut rng, &ctx, 6);
        let mut delta = vec![FieldElement::ZERO; 6];
        delta[0] = FieldElement::ONE;
        assert_eq!(naive_cyclic_convolution(&ctx, &delta, &b).unwrap(), b);
        let (a0, a1, b0, b1) = (FieldElement(3), FieldElement(17), FieldElement(9), FieldElement(30));
        let out = naive_cyclic_convolution(&ctx, &[a0, a1], &[b0, b1]).unwrap();
        assert_eq!(out[0], ctx.mul(a0, b0) ^ ctx.mul(a1, b1));
        assert_eq!(out[1], ctx.mul(a0, b1) ^ ctx.mul(a1, b0));
        assert!(naive_cyclic_convolution(&ctx, &[a0], &[b0, b1]).is_err());
    }

    #[test]
    fn convolution_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (l, n) in [(4, 5), (6, 9), (6, 7), (8, 17)] {
            let ctx = make_field(l).unwrap();
            let alpha = ctx.nth_root(n).unwrap();
            let a = rand_vec(&mut rng, &ctx, n);
            let b = rand_vec(&mut rng, &ctx, n);
            let conv = naive_cyclic_convolution(&ctx, &a, &b).unwrap();
            let lhs = naive_dft(&ctx, alpha, &conv).unwrap();
            let fa = naive_dft(&ctx, alpha, &a).unwrap();
            let fb = naive_dft(&ctx, alpha, &b).unwrap();
            let rhs: Vec<_> = fa.iter().zip(&fb).map(|(&x, &y)| ctx.mul(x, y)).collect();
            assert_eq!(lhs, rhs);
        }
    }
}
