//! Prime-factor composition of CFFTs via Good–Thomas index maps.
//!
//! The input is scattered into an s-dimensional array, one sub-transform is
//! applied along every axis in turn, and the result is gathered through the
//! CRT output map. No twiddle factors appear.

use std::collections::BTreeMap;

use crate::cfft::{build_cfft, CfftKernel, CfftPlan, ComplexityReport, Scheme};
use crate::cse::CseConfig;
use crate::error::{Error, Result};
use crate::gf::{gcd, FieldCtx, FieldElement};
use crate::reference::ReferenceTables;
use crate::structure::{coprime_decompositions, good_thomas_map, is_permutation, GoodThomasMap};

pub const DEFAULT_MAX_FACTOR: usize = 200;

#[derive(Clone, Debug)]
pub struct PlanConfig {
    pub cse: CseConfig,
    pub max_factor: usize,
    /// Fixed scheme, or `None` to keep the better of the two.
    pub scheme: Option<Scheme>,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            cse: CseConfig::default(),
            max_factor: DEFAULT_MAX_FACTOR,
            scheme: None,
        }
    }
}

/// Optimized CFFT plans keyed by length, built on first use.
#[derive(Clone, Debug)]
pub struct SubPlanCache {
    ctx: FieldCtx,
    cfg: PlanConfig,
    plans: BTreeMap<usize, CfftPlan>,
}

impl SubPlanCache {
    pub fn new(ctx: &FieldCtx, cfg: &PlanConfig) -> Self {
        SubPlanCache {
            ctx: ctx.clone(),
            cfg: cfg.clone(),
            plans: BTreeMap::new(),
        }
    }

    pub fn get(&mut self, n: usize) -> Result<&CfftPlan> {
        if n > self.cfg.max_factor {
            return Err(Error::FactorTooLarge {
                factor: n,
                max: self.cfg.max_factor,
            });
        }
        if !self.plans.contains_key(&n) {
            let plan = build_cfft(&self.ctx, n)?;
            let plan = match self.cfg.scheme {
                Some(s) => plan.optimize(s, &self.cfg.cse),
                None => plan.optimize_best(&self.cfg.cse),
            };
            self.plans.insert(n, plan);
        }
        Ok(&self.plans[&n])
    }
}

#[derive(Clone, Debug)]
pub struct PfcftPlan {
    ctx: FieldCtx,
    n: usize,
    map: GoodThomasMap,
    subs: Vec<CfftPlan>,
    report: ComplexityReport,
}

/// Executable form of a PFCFT plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfcftKernel {
    pub ctx: FieldCtx,
    pub n: usize,
    pub map: GoodThomasMap,
    pub subs: Vec<CfftKernel>,
}

fn check_factors(ctx: &FieldCtx, n: usize, factors: &[usize]) -> Result<()> {
    if factors.is_empty() || factors.iter().product::<usize>() != n {
        return Err(Error::BadFactorization {
            n,
            factors: factors.to_vec(),
        });
    }
    if factors.len() > 1 {
        for (i, &a) in factors.iter().enumerate() {
            if a < 2 || factors[i + 1..].iter().any(|&b| gcd(a, b) != 1) {
                return Err(Error::NotCoprime(factors.to_vec()));
            }
        }
    }
    for &f in factors {
        if !ctx.order().is_multiple_of(f) {
            return Err(Error::LengthNotDivisor {
                n: f,
                l: ctx.degree(),
            });
        }
    }
    Ok(())
}

pub fn build_pfcft(ctx: &FieldCtx, n: usize, factors: &[usize], cfg: &PlanConfig) -> Result<PfcftPlan> {
    let mut cache = SubPlanCache::new(ctx, cfg);
    build_pfcft_cached(&mut cache, n, factors)
}

pub fn build_pfcft_cached(cache: &mut SubPlanCache, n: usize, factors: &[usize]) -> Result<PfcftPlan> {
    let ctx = cache.ctx.clone();
    check_factors(&ctx, n, factors)?;
    let map = good_thomas_map(factors)?;
    let subs = factors
        .iter()
        .map(|&f| cache.get(f).cloned())
        .collect::<Result<Vec<_>>>()?;
    let reports: Vec<_> = subs.iter().map(|s| s.complexity()).collect();
    let report = pfcft_complexity(factors, &reports, ctx.degree());
    Ok(PfcftPlan {
        ctx,
        n,
        map,
        subs,
        report,
    })
}

/// `mult = Σ (N/N_i) mult_i`, `add = Σ (N/N_i) add_i`, total by the weight formula.
pub fn pfcft_complexity(factors: &[usize], subs: &[ComplexityReport], l: u32) -> ComplexityReport {
    let n: usize = factors.iter().product();
    let (mult, add) = factors
        .iter()
        .zip(subs)
        .fold((0, 0), |(m, a), (&f, r)| (m + n / f * r.mult, a + n / f * r.add));
    ComplexityReport::new(l, mult, add)
}

/// Where sub-transform costs come from when ranking decompositions.
pub enum SubReports<'a> {
    /// Published per-length counts.
    Reference(&'a ReferenceTables),
    /// Counts of plans optimized by this build.
    Achieved(&'a mut SubPlanCache),
}

impl SubReports<'_> {
    fn report(&mut self, len: usize, l: u32) -> Result<ComplexityReport> {
        match self {
            SubReports::Reference(t) => t.cfft_report(len, l),
            SubReports::Achieved(cache) => Ok(cache.get(len)?.complexity()),
        }
    }
}

/// Costs of every admissible decomposition, best first: by total, then
/// fewer factors, then lexicographic factor lists. Decompositions whose
/// sub-reports are unavailable are skipped.
pub fn rank_decompositions(
    l: u32,
    n: usize,
    max_factor: usize,
    mut source: SubReports<'_>,
) -> Vec<(Vec<usize>, ComplexityReport)> {
    let mut ranked = Vec::new();
    'outer: for factors in coprime_decompositions(n, max_factor) {
        let mut reports = Vec::with_capacity(factors.len());
        for &f in &factors {
            match source.report(f, l) {
                Ok(r) => reports.push(r),
                Err(_) => continue 'outer,
            }
        }
        let report = pfcft_complexity(&factors, &reports, l);
        ranked.push((factors, report));
    }
    ranked.sort_by(|(fa, ra), (fb, rb)| {
        (ra.total, fa.len())
            .cmp(&(rb.total, fb.len()))
            .then_with(|| fa.cmp(fb))
    });
    ranked
}

pub fn best_decomposition(
    l: u32,
    n: usize,
    max_factor: usize,
    source: SubReports<'_>,
) -> Result<(Vec<usize>, ComplexityReport)> {
    rank_decompositions(l, n, max_factor, source)
        .into_iter()
        .next()
        .ok_or(Error::NoDecomposition(n))
}

impl PfcftPlan {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[usize] {
        &self.map.factors
    }

    pub fn map(&self) -> &GoodThomasMap {
        &self.map
    }

    pub fn sub_plans(&self) -> &[CfftPlan] {
        &self.subs
    }

    pub fn complexity(&self) -> ComplexityReport {
        self.report
    }

    pub fn alpha(&self) -> FieldElement {
        self.ctx.nth_root(self.n).expect("plan length divides the field order")
    }

    pub fn kernel(&self) -> PfcftKernel {
        PfcftKernel {
            ctx: self.ctx.clone(),
            n: self.n,
            map: self.map.clone(),
            subs: self.subs.iter().map(|s| s.kernel()).collect(),
        }
    }

    pub fn execute(&self, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.kernel().execute(f)
    }
}

impl PfcftKernel {
    pub fn validate(&self) -> Result<()> {
        if self.map.len() != self.n || self.map.factors.len() != self.subs.len() {
            return Err(Error::Construction(format!("kernel pieces do not fit for N={}", self.n)));
        }
        if !is_permutation(&self.map.input_index) || !is_permutation(&self.map.output_index) {
            return Err(Error::Construction("index map is not a bijection".into()));
        }
        for (sub, &f) in self.subs.iter().zip(&self.map.factors) {
            if sub.n != f {
                return Err(Error::Construction(format!("sub-transform of length {} for factor {f}", sub.n)));
            }
            sub.validate()?;
        }
        Ok(())
    }

    pub fn complexity(&self) -> ComplexityReport {
        let reports: Vec<_> = self.subs.iter().map(|s| s.complexity()).collect();
        pfcft_complexity(&self.map.factors, &reports, self.ctx.degree())
    }

    pub fn execute(&self, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.execute_with(f, |axis, line| self.subs[axis].execute(line))
    }

    /// Runs the index maps with `sub(axis, line)` as the transform along each axis.
    pub fn execute_with<S>(&self, f: &[FieldElement], sub: S) -> Result<Vec<FieldElement>>
    where
        S: Fn(usize, &[FieldElement]) -> Result<Vec<FieldElement>> + Sync,
    {
        if f.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: f.len(),
            });
        }
        let factors = &self.map.factors;
        let mut x: Vec<FieldElement> = self.map.input_index.iter().map(|&i| f[i]).collect();
        let mut inner = self.n;
        for (axis, &len) in factors.iter().enumerate() {
            inner /= len;
            let outer = self.n / (len * inner);
            // line (o, i) holds x[o * len * inner + j * inner + i] for j < len
            let line_at = |line: usize| {
                let (o, i) = (line / inner, line % inner);
                o * len * inner + i
            };
            let count = outer * inner;
            let transform = |line: usize| -> Result<Vec<FieldElement>> {
                let base = line_at(line);
                let data: Vec<_> = (0..len).map(|j| x[base + j * inner]).collect();
                sub(axis, &data)
            };
            #[cfg(feature = "parallel")]
            let results: Vec<Vec<FieldElement>> = {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(transform).collect::<Result<_>>()?
            };
            #[cfg(not(feature = "parallel"))]
            let results: Vec<Vec<FieldElement>> = (0..count).map(transform).collect::<Result<_>>()?;
            for (line, out) in results.into_iter().enumerate() {
                if out.len() != len {
                    return Err(Error::Dimension {
                        expected: len,
                        got: out.len(),
                    });
                }
                let base = line_at(line);
                for (j, v) in out.into_iter().enumerate() {
                    x[base + j * inner] = v;
                }
            }
        }
        let mut out = vec![FieldElement::ZERO; self.n];
        for (flat, &k) in self.map.output_index.iter().enumerate() {
            out[k] = x[flat];
        }
        Ok(out)
    }
}

pub fn exec_pfcft(plan: &PfcftPlan, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
    plan.execute(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::oracle::naive_dft;
    use crate::reference::reference_tables;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quick() -> PlanConfig {
        PlanConfig {
            cse: CseConfig {
                restarts: 1,
                ..CseConfig::default()
            },
            ..PlanConfig::default()
        }
    }

    fn random(rng: &mut ChaCha8Rng, ctx: &FieldCtx, n: usize) -> Vec<FieldElement> {
        (0..n).map(|_| FieldElement(rng.gen_range(0..ctx.size()) as u16)).collect()
    }

    #[test]
    fn formula_examples() {
        let t = reference_tables();
        let r = pfcft_complexity(&[3, 5], &[t.cfft_report(3, 4).unwrap(), t.cfft_report(5, 4).unwrap()], 4);
        assert_eq!(r, ComplexityReport::new(4, 20, 81));
        assert_eq!(r.total, 221);
        let r = pfcft_complexity(&[65, 63], &[ComplexityReport::new(12, 165, 883), ComplexityReport::new(12, 97, 791)], 12);
        assert_eq!((r.mult, r.add, r.total), (16700, 107044, 491144));
        let r = pfcft_complexity(&[23, 89], &[ComplexityReport::new(11, 84, 335), ComplexityReport::new(11, 336, 2085)], 11);
        assert_eq!((r.mult, r.add, r.total), (15204, 77770, 397054));
    }

    #[test]
    fn best_decomposition_from_reference() {
        let t = reference_tables();
        let (f, r) = best_decomposition(8, 255, 200, SubReports::Reference(t)).unwrap();
        assert_eq!((f, r.total), (vec![3, 85], 15366));
        let (f, r) = best_decomposition(10, 1023, 200, SubReports::Reference(t)).unwrap();
        assert_eq!((f, r.total), (vec![31, 33], 108724));
        let (f, _) = best_decomposition(5, 31, 200, SubReports::Reference(t)).unwrap();
        assert_eq!(f, vec![31]);
        assert_eq!(
            best_decomposition(7, 127, 200, SubReports::Reference(t)),
            Err(Error::NoDecomposition(127))
        );
    }

    #[test]
    fn rejects_bad_factor_lists() {
        let ctx = make_field(4).unwrap();
        assert!(matches!(build_pfcft(&ctx, 15, &[3, 6], &quick()), Err(Error::BadFactorization { .. })));
        assert!(matches!(build_pfcft(&ctx, 9, &[3, 3], &quick()), Err(Error::NotCoprime(_))));
        let ctx8 = make_field(8).unwrap();
        let tight = PlanConfig {
            max_factor: 50,
            ..quick()
        };
        assert!(matches!(build_pfcft(&ctx8, 255, &[3, 85], &tight), Err(Error::FactorTooLarge { .. })));
        let ctx6 = make_field(6).unwrap();
        assert!(matches!(build_pfcft(&ctx6, 15, &[3, 5], &quick()), Err(Error::LengthNotDivisor { .. })));
    }

    #[test]
    fn fifteen_point_plan() {
        let ctx = make_field(4).unwrap();
        let plan = build_pfcft(&ctx, 15, &[3, 5], &quick()).unwrap();
        let subs = plan.sub_plans();
        let r = plan.complexity();
        assert_eq!(r.mult, 5 * subs[0].complexity().mult + 3 * subs[1].complexity().mult);
        assert_eq!(r.add, 5 * subs[0].complexity().add + 3 * subs[1].complexity().add);
        assert_eq!(plan.execute(&[FieldElement::ZERO; 15]).unwrap(), vec![FieldElement::ZERO; 15]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random(&mut rng, &ctx, 15);
            assert_eq!(plan.execute(&f).unwrap(), naive_dft(&ctx, plan.alpha(), &f).unwrap());
        }
    }

    #[test]
    fn decompositions_agree() {
        let ctx = make_field(8).unwrap();
        let cfg = quick();
        let mut cache = SubPlanCache::new(&ctx, &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random(&mut rng, &ctx, 255);
        let want = naive_dft(&ctx, ctx.nth_root(255).unwrap(), &f).unwrap();
        for factors in [vec![3, 5, 17], vec![3, 85], vec![15, 17], vec![5, 51], vec![85, 3], vec![17, 5, 3]] {
            let plan = build_pfcft_cached(&mut cache, 255, &factors).unwrap();
            assert_eq!(plan.execute(&f).unwrap(), want, "{factors:?}");
        }
    }

    #[test]
    fn naive_sub_transforms_through_the_same_maps() {
        let ctx = make_field(6).unwrap();
        let plan = build_pfcft(&ctx, 63, &[9, 7], &quick()).unwrap();
        let kernel = plan.kernel();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = random(&mut rng, &ctx, 63);
        let via_naive = kernel
            .execute_with(&f, |axis, line| {
                let len = kernel.map.factors[axis];
                naive_dft(&ctx, ctx.nth_root(len).unwrap(), line)
            })
            .unwrap();
        assert_eq!(via_naive, naive_dft(&ctx, plan.alpha(), &f).unwrap());
        assert_eq!(kernel.execute(&f).unwrap(), via_naive);
    }

    #[test]
    fn prime_length_is_a_single_cfft() {
        let ctx = make_field(5).unwrap();
        let plan = build_pfcft(&ctx, 31, &[31], &quick()).unwrap();
        assert_eq!(plan.factors(), &[31]);
        assert_eq!(plan.complexity(), plan.sub_plans()[0].complexity());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random(&mut rng, &ctx, 31);
        assert_eq!(plan.execute(&f).unwrap(), plan.sub_plans()[0].execute(&f).unwrap());
    }

    #[test]
    fn achieved_ranking_uses_cache() {
        let ctx = make_field(6).unwrap();
        let cfg = quick();
        let mut cache = SubPlanCache::new(&ctx, &cfg);
        let ranked = rank_decompositions(6, 63, 200, SubReports::Achieved(&mut cache));
        assert_eq!(ranked.len(), 1);
        assert_eq!(ranked[0].0, vec![7, 9]);
        let plan = build_pfcft_cached(&mut cache, 63, &ranked[0].0).unwrap();
        assert_eq!(plan.complexity(), ranked[0].1);
    }
}
