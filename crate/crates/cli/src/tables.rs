use std::collections::BTreeMap;
use std::fmt;

use anyhow::Result;
use pfcft::cfft::{build_cfft, ComplexityReport};
use pfcft::convolution::bilinear_algorithm;
use pfcft::cse::{cse_reduce, CseConfig};
use pfcft::make_field;
use pfcft::pfcft::{pfcft_complexity, PlanConfig, SubPlanCache};
use pfcft::reference::{reference_tables, PfcftReference};

/// One printed line: a label and its counts.
pub struct TableRow {
    pub label: String,
    pub mult: usize,
    pub add: usize,
    pub total: usize,
}

impl TableRow {
    fn new(label: impl Into<String>, r: ComplexityReport) -> Self {
        TableRow {
            label: label.into(),
            mult: r.mult,
            add: r.add,
            total: r.total,
        }
    }
}

impl fmt::Display for TableRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<22} {:>7} {:>8} {:>9}", self.label, self.mult, self.add, self.total)
    }
}

fn smallest_degree(n: usize) -> Option<u32> {
    (4..=12).find(|&l| ((1usize << l) - 1).is_multiple_of(n))
}

fn pfcft_label(r: &PfcftReference) -> String {
    format!("{} = {}", r.n, r.label())
}

fn pfcft_formula(r: &PfcftReference) -> Option<ComplexityReport> {
    let t = reference_tables();
    let subs: Option<Vec<_>> = r.factors.iter().map(|&f| t.cfft_report(f, r.l).ok()).collect();
    Some(pfcft_complexity(&r.factors, &subs?, r.l))
}

fn delta(ours: usize, theirs: usize) -> String {
    format!("{:+}", ours as i64 - theirs as i64)
}

pub fn formula(l_min: u32, l_max: u32) {
    let t = reference_tables();
    println!("Short cyclic convolutions (reference)");
    println!("{:>3} {:>6} {:>7} {:>7} {:>7}", "L", "mult", "add(Q)", "add(P)", "total");
    for c in &t.conv {
        println!("{:>3} {:>6} {:>7} {:>7} {:>7}", c.length, c.mult, c.add_q, c.add_p, c.add_total);
    }
    println!();
    println!("CFFTs (reference)");
    println!("{:>5} {:>3} {:>6} {:>9} {:>9}", "N", "l", "mult", "scheme 1", "scheme 2");
    for c in &t.cfft {
        let Some(l) = smallest_degree(c.length).filter(|l| (l_min..=l_max).contains(l)) else {
            continue;
        };
        let mark = |s: usize| if c.add[s] == c.best_add() { "*" } else { " " };
        println!(
            "{:>5} {:>3} {:>6} {:>8}{} {:>8}{}",
            c.length,
            l,
            c.mult,
            c.add[0],
            mark(0),
            c.add[1],
            mark(1)
        );
    }
    println!();
    println!("PFCFTs from the formula over reference CFFT costs");
    println!(
        "{:<22} {:>7} {:>8} {:>9}   printed (mult, add, total)",
        "decomposition", "mult", "add", "total"
    );
    for r in t.pfcft.iter().filter(|r| (l_min..=l_max).contains(&r.l)) {
        let Some(rep) = pfcft_formula(r) else { continue };
        let printed = (r.mult, r.add, r.total);
        let same = printed == (rep.mult, rep.add, rep.total);
        println!(
            "{}   ({}, {}, {}){}",
            TableRow::new(pfcft_label(r), rep),
            r.mult,
            r.add,
            r.total,
            if same { "" } else { "  differs" }
        );
    }
}

pub fn achieved(l_min: u32, l_max: u32, cfg: &PlanConfig) -> Result<()> {
    let t = reference_tables();
    println!("Short cyclic convolutions (this build vs reference)");
    println!(
        "{:>3} {:>6} {:>7} {:>7} {:>7} {:>9} {:>6}",
        "L", "mult", "add(Q)", "add(P)", "total", "ref mult", "Δadd"
    );
    let cse: &CseConfig = &cfg.cse;
    for len in 2..=12 {
        let alg = bilinear_algorithm(len)?;
        let q = cse_reduce(alg.q(), cse).add_count();
        let p = cse_reduce(alg.p(), cse).add_count();
        let reference = t.conv(len);
        println!(
            "{:>3} {:>6} {:>7} {:>7} {:>7} {:>9} {:>6}",
            len,
            alg.nontrivial_mults(),
            q,
            p,
            q + p,
            reference.map_or("-".into(), |c| c.mult.to_string()),
            reference.map_or("-".into(), |c| delta(q + p, c.add_total)),
        );
    }
    println!();
    println!("CFFTs (this build vs reference)");
    println!(
        "{:>5} {:>3} {:>6} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "N", "l", "mult", "scheme 1", "scheme 2", "ref mult", "ref add", "Δadd"
    );
    for c in &t.cfft {
        let Some(l) = smallest_degree(c.length).filter(|l| (l_min..=l_max).contains(l)) else {
            continue;
        };
        let plan = build_cfft(&make_field(l)?, c.length)?.optimize_best(cse);
        let adds = plan.programs().expect("optimized").scheme_adds;
        let r = plan.complexity();
        println!(
            "{:>5} {:>3} {:>6} {:>9} {:>9} {:>9} {:>9} {:>6}",
            c.length,
            l,
            r.mult,
            adds[0].unwrap_or_default(),
            adds[1].unwrap_or_default(),
            c.mult,
            c.best_add(),
            delta(r.add, c.best_add())
        );
    }
    println!();
    println!("PFCFTs (this build vs printed)");
    println!(
        "{:<22} {:>7} {:>8} {:>9} {:>9} {:>8}",
        "decomposition", "mult", "add", "total", "Δadd", "Δtotal"
    );
    let mut caches: BTreeMap<u32, SubPlanCache> = BTreeMap::new();
    for r in t.pfcft.iter().filter(|r| (l_min..=l_max).contains(&r.l)) {
        let ctx = make_field(r.l)?;
        let cache = caches.entry(r.l).or_insert_with(|| SubPlanCache::new(&ctx, cfg));
        let subs = r
            .factors
            .iter()
            .map(|&f| cache.get(f).map(|p| p.complexity()))
            .collect::<pfcft::Result<Vec<_>>>()?;
        let rep = pfcft_complexity(&r.factors, &subs, r.l);
        println!(
            "{} {:>9} {:>8}",
            TableRow::new(pfcft_label(r), rep),
            delta(rep.add, r.add),
            delta(rep.total, r.total)
        );
    }
    Ok(())
}
