//! Line-oriented plan files.
//!
//! ```text
//! cfft N=15 field=GF(2^4) scheme=2 mult=16 add=80
//! field GF(2^4)/prim_poly=13
//! alpha 2
//! perm 0 1 2 4 8 ...
//! consts 1 1 9 ...
//! pre
//! program inputs=15 steps=.. outputs=..
//! ...
//! end
//! post
//! ...
//! ```
//!
//! A PFCFT file carries its index maps followed by one embedded CFFT section
//! per factor.

use std::fmt::{self, Write};
use std::str::FromStr;

use crate::binary::AdditionProgram;
use crate::cfft::{CfftKernel, CfftPlan, ComplexityReport, Scheme};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::pfcft::{PfcftKernel, PfcftPlan};
use crate::reference::parse_factors;
use crate::structure::GoodThomasMap;
use crate::text::{header_field, parse_field, parse_list, LineReader};

/// A loaded plan, ready to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanFile {
    Cfft(CfftKernel),
    Pfcft(PfcftKernel),
}

impl PlanFile {
    pub fn n(&self) -> usize {
        match self {
            PlanFile::Cfft(k) => k.n,
            PlanFile::Pfcft(k) => k.n,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        match self {
            PlanFile::Cfft(k) => &k.ctx,
            PlanFile::Pfcft(k) => &k.ctx,
        }
    }

    pub fn factors(&self) -> Vec<usize> {
        match self {
            PlanFile::Cfft(k) => vec![k.n],
            PlanFile::Pfcft(k) => k.map.factors.clone(),
        }
    }

    pub fn complexity(&self) -> ComplexityReport {
        match self {
            PlanFile::Cfft(k) => k.complexity(),
            PlanFile::Pfcft(k) => k.complexity(),
        }
    }

    pub fn execute(&self, f: &[FieldElement]) -> Result<Vec<FieldElement>> {
        match self {
            PlanFile::Cfft(k) => k.execute(f),
            PlanFile::Pfcft(k) => k.execute(f),
        }
    }
}

impl From<&CfftPlan> for PlanFile {
    fn from(p: &CfftPlan) -> Self {
        PlanFile::Cfft(p.kernel())
    }
}

impl From<&PfcftPlan> for PlanFile {
    fn from(p: &PfcftPlan) -> Self {
        PlanFile::Pfcft(p.kernel())
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn field_name(ctx: &FieldCtx) -> String {
    format!("GF(2^{})", ctx.degree())
}

fn write_cfft(out: &mut String, k: &CfftKernel) {
    let r = k.complexity();
    let scheme = k.scheme.map_or("-".to_string(), |s| s.to_string());
    let _ = writeln!(
        out,
        "cfft N={} field={} scheme={scheme} mult={} add={}",
        k.n,
        field_name(&k.ctx),
        r.mult,
        r.add
    );
    let _ = writeln!(out, "field {}", k.ctx);
    let _ = writeln!(out, "alpha {}", k.alpha);
    let _ = writeln!(out, "perm {}", join(&k.perm));
    let _ = writeln!(out, "consts {}", join(&k.consts));
    out.push_str("pre\n");
    k.pre.write_text(out);
    out.push_str("post\n");
    k.post.write_text(out);
}

fn write_pfcft(out: &mut String, k: &PfcftKernel) {
    let r = k.complexity();
    let factors: Vec<String> = k.map.factors.iter().map(|f| f.to_string()).collect();
    let _ = writeln!(
        out,
        "pfcft N={} field={} factors={} mult={} add={} total={}",
        k.n,
        field_name(&k.ctx),
        factors.join("x"),
        r.mult,
        r.add,
        r.total
    );
    let _ = writeln!(out, "field {}", k.ctx);
    let _ = writeln!(out, "input {}", join(&k.map.input_index));
    let _ = writeln!(out, "output {}", join(&k.map.output_index));
    for (i, sub) in k.subs.iter().enumerate() {
        let _ = writeln!(out, "sub {i}");
        write_cfft(out, sub);
    }
}

fn read_field(rd: &mut LineReader<'_>, header: &str) -> Result<FieldCtx> {
    let line = rd.expect("field")?;
    let ctx: FieldCtx = line.parse().map_err(|_| rd.error(format!("bad field `{line}`")))?;
    let named = header_field(header, "field").unwrap_or_default();
    if named != field_name(&ctx) {
        return Err(rd.error(format!("header field `{named}` disagrees with `{line}`")));
    }
    Ok(ctx)
}

fn check_counts(rd: &LineReader<'_>, header: &str, got: ComplexityReport) -> Result<()> {
    let mult: usize = parse_field(rd, header, "mult")?;
    let add: usize = parse_field(rd, header, "add")?;
    if (mult, add) != (got.mult, got.add) {
        return Err(rd.error(format!(
            "header claims mult={mult} add={add} but the body has mult={} add={}",
            got.mult, got.add
        )));
    }
    Ok(())
}

fn read_cfft(rd: &mut LineReader<'_>) -> Result<CfftKernel> {
    let header = rd.expect("cfft")?;
    let n: usize = parse_field(rd, header, "N")?;
    let scheme = match header_field(header, "scheme") {
        Some("-") => None,
        Some(s) => Some(s.parse::<Scheme>().map_err(|_| rd.error(format!("bad scheme `{s}`")))?),
        None => return Err(rd.error("missing `scheme=`")),
    };
    let ctx = read_field(rd, header)?;
    let alpha_text = rd.expect("alpha")?;
    let alpha: FieldElement = alpha_text.parse().map_err(|_| rd.error("bad alpha"))?;
    if ctx.element_order(alpha) != Some(n) {
        return Err(rd.error(format!("alpha {alpha} does not have order {n}")));
    }
    let perm_text = rd.expect("perm")?;
    let perm: Vec<usize> = parse_list(rd, perm_text)?;
    let consts_text = rd.expect("consts")?;
    let consts: Vec<FieldElement> = parse_list(rd, consts_text)?;
    if consts.iter().any(|&c| !ctx.contains(c)) {
        return Err(rd.error("constant outside the field"));
    }
    rd.expect("pre")?;
    let pre = AdditionProgram::read_text(rd)?;
    rd.expect("post")?;
    let post = AdditionProgram::read_text(rd)?;
    let kernel = CfftKernel {
        ctx,
        n,
        alpha,
        scheme,
        perm,
        consts,
        pre,
        post,
    };
    kernel.validate().map_err(|e| rd.error(e.to_string()))?;
    check_counts(rd, header, kernel.complexity())?;
    Ok(kernel)
}

fn read_pfcft(rd: &mut LineReader<'_>) -> Result<PfcftKernel> {
    let header = rd.expect("pfcft")?;
    let n: usize = parse_field(rd, header, "N")?;
    let factors_text = header_field(header, "factors").ok_or_else(|| rd.error("missing `factors=`"))?;
    let factors = parse_factors(factors_text).map_err(|_| rd.error(format!("bad factors `{factors_text}`")))?;
    let ctx = read_field(rd, header)?;
    let input_text = rd.expect("input")?;
    let input_index = parse_list(rd, input_text)?;
    let output_text = rd.expect("output")?;
    let output_index = parse_list(rd, output_text)?;
    let mut subs = Vec::with_capacity(factors.len());
    for i in 0..factors.len() {
        let idx = rd.expect("sub")?;
        if idx != i.to_string() {
            return Err(rd.error(format!("expected `sub {i}`")));
        }
        let sub = read_cfft(rd)?;
        if sub.ctx != ctx {
            return Err(rd.error("sub-plan uses a different field"));
        }
        subs.push(sub);
    }
    let kernel = PfcftKernel {
        ctx,
        n,
        map: GoodThomasMap {
            factors,
            input_index,
            output_index,
        },
        subs,
    };
    kernel.validate().map_err(|e| rd.error(e.to_string()))?;
    check_counts(rd, header, kernel.complexity())?;
    Ok(kernel)
}

impl fmt::Display for PlanFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        match self {
            PlanFile::Cfft(k) => write_cfft(&mut out, k),
            PlanFile::Pfcft(k) => write_pfcft(&mut out, k),
        }
        f.write_str(&out)
    }
}

impl FromStr for PlanFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rd = LineReader::new(s);
        let plan = match rd.peek().and_then(|l| l.split_whitespace().next()) {
            Some("cfft") => PlanFile::Cfft(read_cfft(&mut rd)?),
            Some("pfcft") => PlanFile::Pfcft(read_pfcft(&mut rd)?),
            _ => return Err(rd.error("expected a `cfft` or `pfcft` header")),
        };
        if !rd.is_done() {
            return Err(rd.error("trailing input after plan"));
        }
        Ok(plan)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfft::build_cfft;
    use crate::cse::CseConfig;
    use crate::gf::make_field;
    use crate::oracle::naive_dft;
    use crate::pfcft::{build_pfcft, PlanConfig};

    fn cfg() -> PlanConfig {
        PlanConfig {
            cse: CseConfig {
                restarts: 1,
                ..CseConfig::default()
            },
            ..PlanConfig::default()
        }
    }

    #[test]
    fn cfft_round_trip() {
        let ctx = make_field(4).unwrap();
        let plan = build_cfft(&ctx, 15).unwrap().optimize_best(&cfg().cse);
        let file = PlanFile::from(&plan);
        let text = file.to_string();
        assert!(text.starts_with(&format!(
            "cfft N=15 field=GF(2^4) scheme={} mult={} add={}",
            plan.scheme().unwrap(),
            plan.complexity().mult,
            plan.complexity().add
        )));
        let back: PlanFile = text.parse().unwrap();
        assert_eq!(back, file);
        let unoptimized = PlanFile::from(&build_cfft(&ctx, 5).unwrap());
        assert_eq!(unoptimized.to_string().parse::<PlanFile>().unwrap(), unoptimized);
    }

    #[test]
    fn pfcft_round_trip_runs() {
        let ctx = make_field(6).unwrap();
        let plan = build_pfcft(&ctx, 63, &[9, 7], &cfg()).unwrap();
        let text = PlanFile::from(&plan).to_string();
        assert!(text.starts_with("pfcft N=63 field=GF(2^6) factors=9x7"));
        let loaded: PlanFile = text.parse().unwrap();
        assert_eq!(loaded.factors(), vec![9, 7]);
        assert_eq!(loaded.complexity(), plan.complexity());
        let f: Vec<_> = (0..63).map(|i| FieldElement((i * 7 % 64) as u16)).collect();
        assert_eq!(loaded.execute(&f).unwrap(), naive_dft(&ctx, plan.alpha(), &f).unwrap());
    }

    #[test]
    fn rejects_damage() {
        let ctx = make_field(4).unwrap();
        let text = PlanFile::from(&build_pfcft(&ctx, 15, &[3, 5], &cfg()).unwrap()).to_string();
        let no_sub = text.replacen("sub 1", "sub 7", 1);
        assert!(no_sub.parse::<PlanFile>().is_err());
        let bad_map = text.replacen("input 0 ", "input 1 ", 1);
        assert!(bad_map.parse::<PlanFile>().is_err());
        let bad_field = text.replace("prim_poly=13", "prim_poly=19");
        assert!(bad_field.parse::<PlanFile>().is_err());
        assert!(text[..text.len() / 2].parse::<PlanFile>().is_err());
        assert!("fft N=3".parse::<PlanFile>().is_err());
        let lied = text.replacen("mult=20", "mult=19", 1);
        assert!(lied.parse::<PlanFile>().is_err());
    }
}
