//! Published operation counts, shipped as a data file.

use std::sync::OnceLock;

use crate::cfft::ComplexityReport;
use crate::error::{Error, Result};
use crate::text::LineReader;

const REFERENCE_TEXT: &str = include_str!("../data/reference_tables.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvReference {
    pub length: usize,
    pub mult: usize,
    pub add_q: usize,
    pub add_p: usize,
    pub add_total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfftReference {
    pub length: usize,
    pub mult: usize,
    /// Additions under scheme 1 and scheme 2.
    pub add: [usize; 2],
}

impl CfftReference {
    pub fn best_add(&self) -> usize {
        self.add[0].min(self.add[1])
    }

    pub fn report(&self, l: u32) -> ComplexityReport {
        ComplexityReport::new(l, self.mult, self.best_add())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PfcftReference {
    pub n: usize,
    pub l: u32,
    pub factors: Vec<usize>,
    pub mult: usize,
    pub add: usize,
    pub total: usize,
}

impl PfcftReference {
    pub fn label(&self) -> String {
        self.factors
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceTables {
    pub conv: Vec<ConvReference>,
    pub cfft: Vec<CfftReference>,
    pub pfcft: Vec<PfcftReference>,
}

impl ReferenceTables {
    pub fn conv(&self, length: usize) -> Option<&ConvReference> {
        self.conv.iter().find(|c| c.length == length)
    }

    pub fn cfft(&self, length: usize) -> Option<&CfftReference> {
        self.cfft.iter().find(|c| c.length == length)
    }

    pub fn cfft_report(&self, length: usize, l: u32) -> Result<ComplexityReport> {
        self.cfft(length)
            .map(|c| c.report(l))
            .ok_or(Error::MissingReference(length))
    }

    pub fn pfcft_rows(&self, n: usize) -> impl Iterator<Item = &PfcftReference> {
        self.pfcft.iter().filter(move |r| r.n == n)
    }
}

pub fn parse_reference(text: &str) -> Result<ReferenceTables> {
    let mut rd = LineReader::new(text);
    let mut tables = ReferenceTables::default();
    while !rd.is_done() {
        let line = rd.next_line()?;
        let mut toks = line.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        let rest: Vec<&str> = toks.collect();
        let nums = |from: usize, count: usize| -> Result<Vec<usize>> {
            if rest.len() != from + count {
                return Err(Error::Parse {
                    line: rd.line_no(),
                    msg: format!("expected {} fields in `{line}`", from + count + 1),
                });
            }
            rest[from..]
                .iter()
                .map(|t| {
                    t.parse().map_err(|_| Error::Parse {
                        line: rd.line_no(),
                        msg: format!("bad number `{t}`"),
                    })
                })
                .collect()
        };
        match kind {
            "conv" => {
                let v = nums(0, 5)?;
                tables.conv.push(ConvReference {
                    length: v[0],
                    mult: v[1],
                    add_q: v[2],
                    add_p: v[3],
                    add_total: v[4],
                });
            }
            "cfft" => {
                let v = nums(0, 4)?;
                tables.cfft.push(CfftReference {
                    length: v[0],
                    mult: v[1],
                    add: [v[2], v[3]],
                });
            }
            "pfcft" => {
                if rest.len() != 6 {
                    return Err(rd.error(format!("expected 7 fields in `{line}`")));
                }
                let factors = parse_factors(rest[2]).map_err(|_| rd.error(format!("bad factors `{}`", rest[2])))?;
                let n: usize = rest[0].parse().map_err(|_| rd.error("bad length"))?;
                let l: u32 = rest[1].parse().map_err(|_| rd.error("bad degree"))?;
                let v: Vec<usize> = rest[3..]
                    .iter()
                    .map(|t| t.parse().map_err(|_| rd.error(format!("bad number `{t}`"))))
                    .collect::<Result<_>>()?;
                tables.pfcft.push(PfcftReference {
                    n,
                    l,
                    factors,
                    mult: v[0],
                    add: v[1],
                    total: v[2],
                });
            }
            other => return Err(rd.error(format!("unknown record `{other}`"))),
        }
    }
    Ok(tables)
}

/// Parses `3x5x17` or `3,5,17`.
pub fn parse_factors(s: &str) -> Result<Vec<usize>> {
    s.split(['x', ',', '*'])
        .map(|t| {
            t.trim().parse().map_err(|_| Error::Parse {
                line: 0,
                msg: format!("bad factor `{t}`"),
            })
        })
        .collect()
}

/// The shipped tables, parsed once.
pub fn reference_tables() -> &'static ReferenceTables {
    static TABLES: OnceLock<ReferenceTables> = OnceLock::new();
    TABLES.get_or_init(|| parse_reference(REFERENCE_TEXT).expect("shipped reference tables parse"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_tables_load() {
        let t = reference_tables();
        assert_eq!(t.conv.len(), 11);
        assert_eq!(t.cfft.len(), 22);
        assert_eq!(t.pfcft.len(), 21);
        assert_eq!(t.cfft(15).unwrap().best_add(), 80);
        assert_eq!(t.cfft(17).unwrap().best_add(), 153);
        assert_eq!(t.cfft_report(3, 4).unwrap(), ComplexityReport::new(4, 1, 6));
        assert_eq!(t.cfft_report(255, 8), Err(Error::MissingReference(255)));
        assert_eq!(t.pfcft_rows(4095).count(), 10);
        assert_eq!(t.pfcft_rows(255).nth(1).unwrap().label(), "3x85");
    }

    #[test]
    fn conv_totals_add_up() {
        for c in &reference_tables().conv {
            assert_eq!(c.add_q + c.add_p, c.add_total, "L={}", c.length);
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_reference("conv 2 1 2").is_err());
        assert!(parse_reference("cfft 3 x 6 6").is_err());
        assert!(parse_reference("pfcft 15 4 3y5 20 81 221").is_err());
        assert!(parse_reference("table 1").is_err());
        assert_eq!(parse_factors("3,5x17").unwrap(), vec![3, 5, 17]);
    }
}
