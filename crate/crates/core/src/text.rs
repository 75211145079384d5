//! Line-oriented reader shared by the plan and program parsers.

use crate::error::{Error, Result};

pub struct LineReader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> LineReader<'a> {
    /// Skips blank lines and `#` comments.
    pub fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        LineReader { lines, pos: 0 }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|&(_, l)| l)
    }

    pub fn line_no(&self) -> usize {
        self.lines
            .get(self.pos)
            .or(self.lines.last())
            .map_or(0, |&(n, _)| n)
    }

    pub fn next_line(&mut self) -> Result<&'a str> {
        let line = self
            .lines
            .get(self.pos)
            .map(|&(_, l)| l)
            .ok_or_else(|| self.error("unexpected end of input"))?;
        self.pos += 1;
        Ok(line)
    }

    pub fn is_done(&self) -> bool {
        self.pos >= self.lines.len()
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line_no(),
            msg: msg.into(),
        }
    }

    /// Consumes a line that must start with `keyword`, returning the remainder.
    pub fn expect(&mut self, keyword: &str) -> Result<&'a str> {
        let line_no = self.line_no();
        let line = self.next_line()?;
        match line.strip_prefix(keyword) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim()),
            _ => Err(Error::Parse {
                line: line_no,
                msg: format!("expected `{keyword}`, found `{line}`"),
            }),
        }
    }
}

/// Looks up `key=value` in a whitespace-separated header.
pub fn header_field<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    header
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix(key)?.strip_prefix('='))
}

pub fn parse_field<T: std::str::FromStr>(r: &LineReader<'_>, header: &str, key: &str) -> Result<T> {
    header_field(header, key)
        .ok_or_else(|| r.error(format!("missing `{key}=` in `{header}`")))?
        .parse()
        .map_err(|_| r.error(format!("bad value for `{key}` in `{header}`")))
}

pub fn parse_list<T: std::str::FromStr>(r: &LineReader<'_>, body: &str) -> Result<Vec<T>> {
    body.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| r.error(format!("bad list entry `{tok}`"))))
        .collect()
}
