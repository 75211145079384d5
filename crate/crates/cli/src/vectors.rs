//! Vectors as text: one hex element per line, index ascending.

use anyhow::{bail, Context, Result};
use pfcft::{FieldCtx, FieldElement};

pub fn parse(text: &str, ctx: &FieldCtx) -> Result<Vec<FieldElement>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: FieldElement = line
            .parse()
            .ok()
            .with_context(|| format!("line {}: `{line}` is not a hex element", i + 1))?;
        if !ctx.contains(v) {
            bail!("line {}: {v} is outside {ctx}", i + 1);
        }
        out.push(v);
    }
    Ok(out)
}

pub fn format(v: &[FieldElement]) -> String {
    v.iter().map(|x| format!("{x}\n")).collect()
}
