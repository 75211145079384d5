//! Cyclotomic FFT in the bilinear form `F = A Q (c ∘ P f')`.
//!
//! `f' = Π f` groups the input by cyclotomic coset. Per coset of size `m`,
//! the normal-basis expansion turns the coset's share of the DFT into an
//! `m`-point cyclic convolution with the conjugates of a normal element, and
//! the binary matrix `A` maps the convolution outputs to the spectrum.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::binary::{naive_compile, AdditionProgram, BinaryMatrix, GfMatrix};
use crate::convolution::{bilinear_algorithm, BilinearConvAlgorithm};
use crate::cse::{cse_reduce, cse_reduce_blockdiag, CseConfig};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::structure::{conjugates, cyclotomic_cosets, normal_basis_generator, CyclotomicCoset};

/// Entrywise identity checks run up to this length; beyond it, random probes.
pub const FULL_CHECK_LIMIT: usize = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// CSE on the product `A Q`.
    Joint,
    /// CSE on `Q` block by block, then on `A`.
    Split,
}

impl Scheme {
    pub fn number(self) -> u8 {
        match self {
            Scheme::Joint => 1,
            Scheme::Split => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Scheme::Joint),
            "2" => Ok(Scheme::Split),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown scheme `{other}`"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComplexityReport {
    pub mult: usize,
    pub add: usize,
    pub total: usize,
}

impl ComplexityReport {
    /// One multiplication in GF(2^l) weighs as much as `2l - 1` additions.
    pub fn new(l: u32, mult: usize, add: usize) -> Self {
        ComplexityReport {
            mult,
            add,
            total: (2 * l as usize - 1) * mult + add,
        }
    }
}

impl fmt::Display for ComplexityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mult={} add={} total={}", self.mult, self.add, self.total)
    }
}

/// One coset's share of the transform.
#[derive(Clone, Debug)]
pub struct CfftBlock {
    pub coset: CyclotomicCoset,
    pub gamma: FieldElement,
    /// `(γ, γ^(2^(m-1)), ..., γ^2)`, the constant operand of the convolution.
    pub b: Vec<FieldElement>,
    pub conv: BilinearConvAlgorithm,
}

#[derive(Clone, Debug)]
pub struct CfftPrograms {
    pub scheme: Scheme,
    /// Achieved additive counts of both schemes, when both were run.
    pub scheme_adds: [Option<usize>; 2],
    pub pre: AdditionProgram,
    pub post: AdditionProgram,
}

#[derive(Clone, Debug)]
pub struct CfftPlan {
    ctx: FieldCtx,
    n: usize,
    alpha: FieldElement,
    perm: Vec<usize>,
    blocks: Vec<CfftBlock>,
    consts: Vec<FieldElement>,
    a: BinaryMatrix,
    programs: Option<CfftPrograms>,
}

/// The executable part of a plan: everything needed to run it, nothing more.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfftKernel {
    pub ctx: FieldCtx,
    pub n: usize,
    pub alpha: FieldElement,
    pub scheme: Option<Scheme>,
    pub perm: Vec<usize>,
    pub consts: Vec<FieldElement>,
    pub pre: AdditionProgram,
    pub post: AdditionProgram,
}

/// `L[r][c] = b[(r - c) mod m]`.
fn circulant(b: &[FieldElement]) -> GfMatrix {
    let m = b.len();
    GfMatrix::from_fn(m, m, |r, c| b[(r + m - c) % m])
}

pub fn build_cfft(ctx: &FieldCtx, n: usize) -> Result<CfftPlan> {
    if n == 0 || !ctx.order().is_multiple_of(n) {
        return Err(Error::LengthNotDivisor {
            n,
            l: ctx.degree(),
        });
    }
    let alpha = ctx.nth_root(n)?;
    let cosets = cyclotomic_cosets(n)?;
    let mut algs: BTreeMap<usize, BilinearConvAlgorithm> = BTreeMap::new();
    let mut bases: BTreeMap<usize, Vec<FieldElement>> = BTreeMap::new();
    let mut blocks = Vec::with_capacity(cosets.len());
    let mut perm = Vec::with_capacity(n);
    let mut consts = Vec::new();
    let mut a = BinaryMatrix::zeros(n, n);
    let mut col0 = 0;
    for coset in cosets {
        let m = coset.size();
        if let std::collections::btree_map::Entry::Vacant(e) = algs.entry(m) {
            e.insert(bilinear_algorithm(m)?);
            let gamma = normal_basis_generator(ctx, m as u32)?;
            let conj = conjugates(ctx, gamma, m as u32);
            let b: Vec<_> = (0..m).map(|t| conj[(m - t) % m]).collect();
            bases.insert(m, b);
        }
        let conv = algs[&m].clone();
        let b = bases[&m].clone();
        // A_i = V_i L_i^{-1}, with V_i[k][j] = alpha^(s_j k)
        let l_inv = circulant(&b).invert(ctx)?;
        for k in 0..n {
            for c in 0..m {
                let mut acc = FieldElement::ZERO;
                for (j, &s) in coset.elements.iter().enumerate() {
                    acc ^= ctx.mul(ctx.pow(alpha, (s * k % n) as i64), l_inv[(j, c)]);
                }
                match acc.0 {
                    0 => {}
                    1 => a.set(k, col0 + c, true),
                    _ => {
                        return Err(Error::NonBinary {
                            row: k,
                            col: col0 + c,
                        })
                    }
                }
            }
        }
        let c_i = conv.r().apply(&b)?;
        consts.extend(c_i);
        perm.extend(coset.elements.iter().copied());
        blocks.push(CfftBlock {
            gamma: b[0],
            b,
            conv,
            coset,
        });
        col0 += m;
    }
    Ok(CfftPlan {
        ctx: ctx.clone(),
        n,
        alpha,
        perm,
        blocks,
        consts,
        a,
        programs: None,
    })
}

impl CfftPlan {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> FieldElement {
        self.alpha
    }

    /// `f'[i] = f[perm[i]]`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn blocks(&self) -> &[CfftBlock] {
        &self.blocks
    }

    pub fn consts(&self) -> &[FieldElement] {
        &self.consts
    }

    pub fn a(&self) -> &BinaryMatrix {
        &self.a
    }

    pub fn programs(&self) -> Option<&CfftPrograms> {
        self.programs.as_ref()
    }

    pub fn scheme(&self) -> Option<Scheme> {
        self.programs.as_ref().map(|p| p.scheme)
    }

    pub fn p_blocks(&self) -> Vec<BinaryMatrix> {
        self.blocks.iter().map(|b| b.conv.p().clone()).collect()
    }

    pub fn q_blocks(&self) -> Vec<BinaryMatrix> {
        self.blocks.iter().map(|b| b.conv.q().clone()).collect()
    }

    pub fn p(&self) -> BinaryMatrix {
        BinaryMatrix::block_diag(&self.p_blocks())
    }

    pub fn q(&self) -> BinaryMatrix {
        BinaryMatrix::block_diag(&self.q_blocks())
    }

    pub fn aq(&self) -> BinaryMatrix {
        self.a.mul(&self.q()).expect("A and Q conform")
    }

    /// Block-diagonal `L` over GF(2^l).
    pub fn l_matrix(&self) -> GfMatrix {
        let mut l = GfMatrix::zeros(self.n, self.n);
        let mut off = 0;
        for blk in &self.blocks {
            let c = circulant(&blk.b);
            let m = blk.b.len();
            for r in 0..m {
                for col in 0..m {
                    l[(off + r, off + col)] = c[(r, col)];
                }
            }
            off += m;
        }
        l
    }

    /// Checks `A L Π = V`, entrywise up to [`FULL_CHECK_LIMIT`] and on
    /// `probes` seeded random entries above.
    pub fn check_identity(&self, probes: usize, seed: u64) -> Result<()> {
        use rand::{Rng, SeedableRng};
        let n = self.n;
        let l = self.l_matrix();
        let mut pos_of = vec![0; n];
        for (i, &src) in self.perm.iter().enumerate() {
            pos_of[src] = i;
        }
        let entry = |k: usize, col: usize| {
            // (A L Π)[k][col] = sum_r A[k][r] L[r][pos_of[col]]
            let p = pos_of[col];
            self.a
                .row_ones(k)
                .fold(FieldElement::ZERO, |acc, r| acc ^ l[(r, p)])
        };
        let check = |k: usize, col: usize| {
            let want = self.ctx.pow(self.alpha, (k * col % n) as i64);
            if entry(k, col) != want {
                return Err(Error::Construction(format!("A L Π differs from V at ({k}, {col})")));
            }
            Ok(())
        };
        if n <= FULL_CHECK_LIMIT {
            for k in 0..n {
                for col in 0..n {
                    check(k, col)?;
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..probes {
                check(rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    /// Number of constants different from 1.
    pub fn mult_count(&self) -> usize {
        self.consts.iter().filter(|&&c| c != FieldElement::ONE).count()
    }

    /// Achieved counts once optimized; left-to-right chains before that.
    pub fn complexity(&self) -> ComplexityReport {
        let add = match &self.programs {
            Some(p) => p.pre.add_count() + p.post.add_count(),
            None => self.p().naive_add_count() + self.aq().naive_add_count(),
        };
        ComplexityReport::new(self.ctx.degree(), self.mult_count(), add)
    }

    pub fn optimize(&self, scheme: Scheme, cfg: &CseConfig) -> CfftPlan {
        let pre = cse_reduce_blockdiag(&self.p_blocks(), cfg);
        let post = self.post_program(scheme, cfg);
        let mut scheme_adds = [None, None];
        scheme_adds[scheme.number() as usize - 1] = Some(pre.add_count() + post.add_count());
        self.with_programs(CfftPrograms {
            scheme,
            scheme_adds,
            pre,
            post,
        })
    }

    /// Runs both schemes and keeps the one with fewer additions; ties go to
    /// scheme 1.
    pub fn optimize_best(&self, cfg: &CseConfig) -> CfftPlan {
        let pre = cse_reduce_blockdiag(&self.p_blocks(), cfg);
        let joint = self.post_program(Scheme::Joint, cfg);
        let split = self.post_program(Scheme::Split, cfg);
        let base = pre.add_count();
        let adds = [Some(base + joint.add_count()), Some(base + split.add_count())];
        let (scheme, post) = if split.add_count() < joint.add_count() {
            (Scheme::Split, split)
        } else {
            (Scheme::Joint, joint)
        };
        self.with_programs(CfftPrograms {
            scheme,
            scheme_adds: adds,
            pre,
            post,
        })
    }

    fn post_program(&self, scheme: Scheme, cfg: &CseConfig) -> AdditionProgram {
        match scheme {
            Scheme::Joint => cse_reduce(&self.aq(), cfg),
            Scheme::Split => {
                let q = cse_reduce_blockdiag(&self.q_blocks(), cfg);
                let a = cse_reduce(&self.a, cfg);
                AdditionProgram::chain(&q, &a).expect("Q outputs feed A")
            }
        }
    }

    fn with_programs(&self, programs: CfftPrograms) -> CfftPlan {
        CfftPlan {
            programs: Some(programs),
            ..self.clone()
        }
    }

    pub fn kernel(&self) -> CfftKernel {
        let (scheme, pre, post) = match &self.programs {
            Some(p) => (Some(p.scheme), p.pre.clone(), p.post.clone()),
            None => (None, naive_compile(&self.p()), naive_compile(&self.aq())),
        };
        CfftKernel {
            ctx: self.ctx.clone(),
            n: self.n,
            alpha: self.alpha,
            scheme,
            perm: self.perm.clone(),
            consts: self.consts.clone(),
            pre,
            post,
        }
    }

    pub fn execute(&self, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.kernel().execute(f)
    }
}

impl CfftKernel {
    /// Checks that the pieces fit together.
    pub fn validate(&self) -> Result<()> {
        let fits = self.perm.len() == self.n
            && self.pre.num_inputs() == self.n
            && self.pre.num_outputs() == self.consts.len()
            && self.post.num_inputs() == self.consts.len()
            && self.post.num_outputs() == self.n;
        if !fits {
            return Err(Error::Construction(format!("kernel pieces do not fit for N={}", self.n)));
        }
        if !crate::structure::is_permutation(&self.perm) {
            return Err(Error::Construction("input map is not a permutation".into()));
        }
        Ok(())
    }

    pub fn execute(&self, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if f.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: f.len(),
            });
        }
        let permuted: Vec<_> = self.perm.iter().map(|&i| f[i]).collect();
        let mut x = self.pre.run(&permuted)?;
        for (xi, &c) in x.iter_mut().zip(&self.consts) {
            *xi = self.ctx.mul(*xi, c);
        }
        self.post.run(&x)
    }

    pub fn complexity(&self) -> ComplexityReport {
        let mult = self.consts.iter().filter(|&&c| c != FieldElement::ONE).count();
        ComplexityReport::new(self.ctx.degree(), mult, self.pre.add_count() + self.post.add_count())
    }
}

pub fn optimize_cfft(plan: &CfftPlan, scheme: Scheme, cfg: &CseConfig) -> CfftPlan {
    plan.optimize(scheme, cfg)
}

pub fn exec_cfft(plan: &CfftPlan, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    plan.execute(f)
}

pub fn cfft_complexity(plan: &CfftPlan) -> ComplexityReport {
    plan.complexity()
}
