//! Browser bindings: decomposition costs, CFFT matrix views and transforms.
//!
//! Each exported function has a plain Rust twin returning `Result<_, String>`
//! so it can be exercised without a JS host.

use std::fmt::Write;

use pfcft::binary::BinaryMatrix;
use pfcft::cfft::{build_cfft, Scheme};
use pfcft::cse::CseConfig;
use pfcft::oracle::naive_dft;
use pfcft::pfcft::{build_pfcft, rank_decompositions, PlanConfig, SubReports, DEFAULT_MAX_FACTOR};
use pfcft::reference::reference_tables;
use pfcft::structure::format_decomposition;
use pfcft::{make_field, FieldCtx, FieldElement};
use wasm_bindgen::prelude::*;

/// Largest length the matrix view will build.
pub const VIEW_LIMIT: usize = 255;

fn field_for(n: usize, l: u32) -> Result<FieldCtx, String> {
    let l = if l == 0 {
        (4..=12)
            .find(|&l| ((1usize << l) - 1).is_multiple_of(n.max(1)))
            .ok_or_else(|| format!("{n} divides no 2^l - 1 with 4 <= l <= 12"))?
    } else {
        l
    };
    make_field(l).map_err(|e| e.to_string())
}

fn quick_config() -> PlanConfig {
    PlanConfig {
        cse: CseConfig {
            restarts: 1,
            ..CseConfig::default()
        },
        ..PlanConfig::default()
    }
}

/// Ranked decompositions of `n` under published sub-transform costs, one per line.
pub fn decompositions_text(n: usize, l: u32) -> Result<String, String> {
    let ctx = field_for(n, l)?;
    let ranked = rank_decompositions(
        ctx.degree(),
        n,
        DEFAULT_MAX_FACTOR,
        SubReports::Reference(reference_tables()),
    );
    if ranked.is_empty() {
        return Err(format!("no tabulated decomposition of {n}"));
    }
    let mut out = String::new();
    for (factors, r) in ranked {
        let _ = writeln!(out, "{:<20} {r}", format_decomposition(n, &factors));
    }
    Ok(out)
}

fn bitmap(m: &BinaryMatrix) -> String {
    let mut out = String::with_capacity(m.rows() * (m.cols() + 1));
    for r in 0..m.rows() {
        out.extend((0..m.cols()).map(|c| if m.get(r, c) { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

/// Everything the matrix panel shows for one CFFT.
#[wasm_bindgen]
pub struct CfftView {
    n: usize,
    field: String,
    mult: usize,
    adds: [usize; 2],
    a: String,
    p: String,
    q: String,
}

#[wasm_bindgen]
impl CfftView {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> String {
        self.field.clone()
    }

    pub fn mult(&self) -> usize {
        self.mult
    }

    /// Additions after CSE under scheme 1 or 2.
    pub fn add(&self, scheme: u8) -> usize {
        self.adds[usize::from(scheme == 2)]
    }

    /// `a`, `p` or `q` as rows of 0/1 characters.
    pub fn matrix(&self, which: &str) -> String {
        match which {
            "a" => self.a.clone(),
            "p" => self.p.clone(),
            "q" => self.q.clone(),
            _ => String::new(),
        }
    }
}

pub fn cfft_view_native(n: usize, l: u32) -> Result<CfftView, String> {
    if n > VIEW_LIMIT {
        return Err(format!("matrix view is limited to N <= {VIEW_LIMIT}"));
    }
    let ctx = field_for(n, l)?;
    let plan = build_cfft(&ctx, n).map_err(|e| e.to_string())?;
    let cse = quick_config().cse;
    let adds = [Scheme::Joint, Scheme::Split].map(|s| plan.optimize(s, &cse).complexity().add);
    Ok(CfftView {
        n,
        field: ctx.to_string(),
        mult: plan.mult_count(),
        adds,
        a: bitmap(plan.a()),
        p: bitmap(&plan.p()),
        q: bitmap(&plan.q()),
    })
}

/// Transforms hex input (whitespace separated, zero padded to `n`) and checks
/// the result against the direct DFT.
pub fn transform_text(n: usize, l: u32, input: &str) -> Result<String, String> {
    let ctx = field_for(n, l)?;
    let mut f = Vec::with_capacity(n);
    for tok in input.split_whitespace() {
        let v: FieldElement = tok
            .parse()
            .map_err(|_| format!("`{tok}` is not a hex element"))?;
        if !ctx.contains(v) {
            return Err(format!("{v} is outside {ctx}"));
        }
        f.push(v);
    }
    if f.len() > n {
        return Err(format!("{} values for a length-{n} transform", f.len()));
    }
    f.resize(n, FieldElement(0));
    let cfg = quick_config();
    let factors = rank_decompositions(
        ctx.degree(),
        n,
        cfg.max_factor,
        SubReports::Reference(reference_tables()),
    )
    .into_iter()
    .next()
    .map_or_else(|| vec![n], |(f, _)| f);
    let plan = build_pfcft(&ctx, n, &factors, &cfg).map_err(|e| e.to_string())?;
    let out = plan.execute(&f).map_err(|e| e.to_string())?;
    let direct = naive_dft(&ctx, plan.alpha(), &f).map_err(|e| e.to_string())?;
    let mut text = format!(
        "{}  {}  {}\n",
        format_decomposition(n, &factors),
        plan.complexity(),
        if out == direct {
            "matches direct DFT"
        } else {
            "DIFFERS from direct DFT"
        }
    );
    for chunk in out.chunks(16) {
        let row: Vec<String> = chunk.iter().map(|x| x.to_string()).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    Ok(text)
}

#[wasm_bindgen]
pub fn decompositions(n: usize, l: u32) -> Result<String, JsValue> {
    decompositions_text(n, l).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn cfft_view(n: usize, l: u32) -> Result<CfftView, JsValue> {
    cfft_view_native(n, l).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn transform(n: usize, l: u32, input: &str) -> Result<String, JsValue> {
    transform_text(n, l, input).map_err(|e| JsValue::from_str(&e))
}
