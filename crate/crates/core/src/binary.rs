//! Dense GF(2) matrices, matrices over GF(2^l), and straight-line XOR programs.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::text::{parse_field, LineReader};

/// Dense row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        BinaryMatrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_fn(rows.len(), cols, |r, c| rows[r].as_ref()[c] != 0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.bits[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.bits[r * self.stride + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row_words(r).iter().all(|&w| w == 0)
    }

    /// `y = M x` where addition is XOR.
    pub fn apply<T: Copy + Default + BitXor<Output = T>>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row_ones(r).fold(T::default(), |acc, c| acc ^ x[c]))
            .collect())
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = BinaryMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let ones: Vec<usize> = self.row_ones(r).collect();
            let dst = out.row_words_mut(r);
            for k in ones {
                for (d, s) in dst.iter_mut().zip(rhs.row_words(k)) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &BinaryMatrix) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for r1 in 0..self.rows {
            for c1 in self.row_ones(r1) {
                for r2 in 0..rhs.rows {
                    for c2 in rhs.row_ones(r2) {
                        out.set(r1 * rhs.rows + r2, c1 * rhs.cols + c2, true);
                    }
                }
            }
        }
        out
    }

    pub fn block_diag(blocks: &[BinaryMatrix]) -> BinaryMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = BinaryMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in b.row_ones(r) {
                    out.set(r0 + r, c0 + c, true);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[BinaryMatrix]) -> Result<BinaryMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut out = BinaryMatrix::zeros(blocks.iter().map(|b| b.rows).sum(), cols);
        let mut r0 = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    got: b.cols,
                });
            }
            for r in 0..b.rows {
                out.row_words_mut(r0 + r).copy_from_slice(b.row_words(r));
            }
            r0 += b.rows;
        }
        Ok(out)
    }

    /// `out[i] = self[perm[i]]`.
    pub fn permute_rows(&self, perm: &[usize]) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(perm.len(), self.cols);
        for (i, &src) in perm.iter().enumerate() {
            out.row_words_mut(i).copy_from_slice(self.row_words(src));
        }
        out
    }

    /// `out[:, i] = self[:, perm[i]]`.
    pub fn permute_cols(&self, perm: &[usize]) -> BinaryMatrix {
        BinaryMatrix::from_fn(self.rows, perm.len(), |r, c| self.get(r, perm[c]))
    }

    /// Additions used by left-to-right XOR chains, one chain per row.
    pub fn naive_add_count(&self) -> usize {
        (0..self.rows).map(|r| self.row_weight(r).saturating_sub(1)).sum()
    }
}

impl fmt::Display for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for (i, line) in s.lines().map(str::trim).filter(|l| !l.is_empty()).enumerate() {
            let row = line
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse {
                        line: i + 1,
                        msg: format!("unexpected `{ch}` in matrix row"),
                    }),
                })
                .collect::<Result<Vec<u8>>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "ragged matrix rows".into(),
                    });
                }
            }
            rows.push(row);
        }
        Ok(BinaryMatrix::from_rows(&rows))
    }
}

/// Dense matrix over GF(2^l).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl GfMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GfMatrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        GfMatrix { rows, cols, data }
    }

    pub fn diag(d: &[FieldElement]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_binary(m: &BinaryMatrix) -> Self {
        Self::from_fn(m.rows(), m.cols(), |r, c| FieldElement(m.get(r, c) as u16))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, ctx: &FieldCtx, rhs: &GfMatrix) -> Result<GfMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = GfMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let p = ctx.mul(a, rhs[(k, c)]);
                    out[(r, c)] ^= p;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, ctx: &FieldCtx, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(FieldElement::ZERO, |acc, (&a, &b)| acc ^ ctx.mul(a, b))
            })
            .collect())
    }

    /// Gauss–Jordan inverse over GF(2^l).
    pub fn invert(&self, ctx: &FieldCtx) -> Result<GfMatrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = GfMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or(Error::Singular)?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let scale = ctx.inv(a[(col, col)])?;
            a.scale_row(ctx, col, scale);
            inv.scale_row(ctx, col, scale);
            for r in 0..n {
                let f = a[(r, col)];
                if r != col && !f.is_zero() {
                    a.add_scaled_row(ctx, r, col, f);
                    inv.add_scaled_row(ctx, r, col, f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn scale_row(&mut self, ctx: &FieldCtx, r: usize, s: FieldElement) {
        for c in 0..self.cols {
            self[(r, c)] = ctx.mul(self[(r, c)], s);
        }
    }

    // row[dst] ^= f * row[src]
    fn add_scaled_row(&mut self, ctx: &FieldCtx, dst: usize, src: usize, f: FieldElement) {
        for c in 0..self.cols {
            let v = ctx.mul(f, self[(src, c)]);
            self[(dst, c)] ^= v;
        }
    }

    pub fn permute_rows(&self, perm: &[usize]) -> GfMatrix {
        GfMatrix::from_fn(perm.len(), self.cols, |r, c| self[(perm[r], c)])
    }

    pub fn permute_cols(&self, perm: &[usize]) -> GfMatrix {
        GfMatrix::from_fn(self.rows, perm.len(), |r, c| self[(r, perm[c])])
    }

    /// Converts to a binary matrix, failing at the first entry outside {0, 1}.
    pub fn to_binary(&self) -> Result<BinaryMatrix> {
        let mut m = BinaryMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                match self[(r, c)].0 {
                    0 => {}
                    1 => m.set(r, c, true),
                    _ => return Err(Error::NonBinary { row: r, col: c }),
                }
            }
        }
        Ok(m)
    }
}

impl std::ops::Index<(usize, usize)> for GfMatrix {
    type Output = FieldElement;

    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for GfMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut FieldElement {
        &mut self.data[r * self.cols + c]
    }
}

/// A value referenced by a program step or output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Input(usize),
    Step(usize),
    /// The zero constant; only valid as an output.
    Zero,
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Input(i) => write!(f, "x{i}"),
            Operand::Step(i) => write!(f, "t{i}"),
            Operand::Zero => write!(f, "0"),
        }
    }
}

impl FromStr for Operand {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.parse::<usize>().map_err(|_| format!("bad operand `{s}`"));
        match s {
            "0" => Ok(Operand::Zero),
            _ if s.starts_with('x') => Ok(Operand::Input(num(&s[1..])?)),
            _ if s.starts_with('t') => Ok(Operand::Step(num(&s[1..])?)),
            _ => Err(format!("bad operand `{s}`")),
        }
    }
}

/// Straight-line XOR program: each step XORs two earlier values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditionProgram {
    num_inputs: usize,
    steps: Vec<(Operand, Operand)>,
    outputs: Vec<Operand>,
}

impl AdditionProgram {
    /// Validates that every step references inputs or strictly earlier steps.
    pub fn new(num_inputs: usize, steps: Vec<(Operand, Operand)>, outputs: Vec<Operand>) -> Result<Self> {
        let check = |op: Operand, defined: usize, allow_zero: bool| -> Result<()> {
            match op {
                Operand::Input(i) if i < num_inputs => Ok(()),
                Operand::Step(j) if j < defined => Ok(()),
                Operand::Zero if allow_zero => Ok(()),
                _ => Err(Error::MalformedProgram(format!(
                    "operand {op} out of scope at step {defined}"
                ))),
            }
        };
        for (k, &(a, b)) in steps.iter().enumerate() {
            check(a, k, false)?;
            check(b, k, false)?;
        }
        for &o in &outputs {
            check(o, steps.len(), true)?;
        }
        Ok(AdditionProgram {
            num_inputs,
            steps,
            outputs,
        })
    }

    pub fn identity(n: usize) -> Self {
        AdditionProgram {
            num_inputs: n,
            steps: Vec::new(),
            outputs: (0..n).map(Operand::Input).collect(),
        }
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn steps(&self) -> &[(Operand, Operand)] {
        &self.steps
    }

    pub fn outputs(&self) -> &[Operand] {
        &self.outputs
    }

    pub fn add_count(&self) -> usize {
        self.steps.len()
    }

    /// Evaluates the program on any XOR-closed value type.
    pub fn run<T: Copy + Default + BitXor<Output = T>>(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.num_inputs {
            return Err(Error::Dimension {
                expected: self.num_inputs,
                got: x.len(),
            });
        }
        let mut vals: Vec<T> = Vec::with_capacity(self.steps.len());
        let get = |vals: &[T], op: Operand| match op {
            Operand::Input(i) => x[i],
            Operand::Step(j) => vals[j],
            Operand::Zero => T::default(),
        };
        for &(a, b) in &self.steps {
            let v = get(&vals, a) ^ get(&vals, b);
            vals.push(v);
        }
        Ok(self.outputs.iter().map(|&o| get(&vals, o)).collect())
    }

    /// The linear map computed by the program, obtained by symbolic evaluation.
    pub fn to_matrix(&self) -> BinaryMatrix {
        let stride = self.num_inputs.div_ceil(64);
        let unit = |i: usize| {
            let mut v = vec![0u64; stride];
            v[i / 64] |= 1 << (i % 64);
            v
        };
        let mut vals: Vec<Vec<u64>> = Vec::with_capacity(self.steps.len());
        let resolve = |vals: &[Vec<u64>], op: Operand| match op {
            Operand::Input(i) => unit(i),
            Operand::Step(j) => vals[j].clone(),
            Operand::Zero => vec![0; stride],
        };
        for &(a, b) in &self.steps {
            let mut v = resolve(&vals, a);
            for (d, s) in v.iter_mut().zip(resolve(&vals, b)) {
                *d ^= s;
            }
            vals.push(v);
        }
        let mut m = BinaryMatrix::zeros(self.outputs.len(), self.num_inputs);
        for (r, &o) in self.outputs.iter().enumerate() {
            m.row_words_mut(r).copy_from_slice(&resolve(&vals, o));
        }
        m
    }

    /// Feeds the outputs of `first` into `second`. Steps that XOR with zero or
    /// with themselves are folded away.
    pub fn chain(first: &AdditionProgram, second: &AdditionProgram) -> Result<AdditionProgram> {
        if second.num_inputs != first.outputs.len() {
            return Err(Error::Dimension {
                expected: first.outputs.len(),
                got: second.num_inputs,
            });
        }
        let mut steps = first.steps.clone();
        let mut resolved: Vec<Operand> = Vec::with_capacity(second.steps.len());
        let lookup = |resolved: &[Operand], op: Operand| match op {
            Operand::Input(i) => first.outputs[i],
            Operand::Step(j) => resolved[j],
            Operand::Zero => Operand::Zero,
        };
        for &(a, b) in &second.steps {
            let (a, b) = (lookup(&resolved, a), lookup(&resolved, b));
            let op = match (a, b) {
                (Operand::Zero, o) | (o, Operand::Zero) => o,
                _ if a == b => Operand::Zero,
                _ => {
                    steps.push((a, b));
                    Operand::Step(steps.len() - 1)
                }
            };
            resolved.push(op);
        }
        let outputs = second.outputs.iter().map(|&o| lookup(&resolved, o)).collect();
        AdditionProgram::new(first.num_inputs, steps, outputs)
    }

    /// Runs independent programs side by side on disjoint input/output ranges.
    pub fn block_diag(programs: &[AdditionProgram]) -> AdditionProgram {
        let mut steps = Vec::new();
        let mut outputs = Vec::new();
        let mut in_off = 0;
        for p in programs {
            let step_off = steps.len();
            let shift = |op: Operand| match op {
                Operand::Input(i) => Operand::Input(i + in_off),
                Operand::Step(j) => Operand::Step(j + step_off),
                Operand::Zero => Operand::Zero,
            };
            steps.extend(p.steps.iter().map(|&(a, b)| (shift(a), shift(b))));
            outputs.extend(p.outputs.iter().map(|&o| shift(o)));
            in_off += p.num_inputs;
        }
        AdditionProgram {
            num_inputs: in_off,
            steps,
            outputs,
        }
    }

    pub fn write_text(&self, out: &mut String) {
        use std::fmt::Write;
        let _ = writeln!(
            out,
            "program inputs={} steps={} outputs={}",
            self.num_inputs,
            self.steps.len(),
            self.outputs.len()
        );
        for (k, (a, b)) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "t{k} = {a} ^ {b}");
        }
        for (i, o) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "y{i} = {o}");
        }
        out.push_str("end\n");
    }

    pub(crate) fn read_text(r: &mut LineReader<'_>) -> Result<AdditionProgram> {
        let header = r.expect("program")?;
        let num_inputs: usize = parse_field(r, header, "inputs")?;
        let num_steps: usize = parse_field(r, header, "steps")?;
        let num_outputs: usize = parse_field(r, header, "outputs")?;
        let mut steps = Vec::with_capacity(num_steps);
        for k in 0..num_steps {
            let line = r.next_line()?;
            let parsed = (|| {
                let (lhs, rhs) = line.split_once('=')?;
                if lhs.trim() != format!("t{k}") {
                    return None;
                }
                let (a, b) = rhs.split_once('^')?;
                Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
            })();
            steps.push(parsed.ok_or_else(|| r.error(format!("bad step `{line}`")))?);
        }
        let mut outputs = Vec::with_capacity(num_outputs);
        for i in 0..num_outputs {
            let line = r.next_line()?;
            let parsed = line
                .split_once('=')
                .filter(|(lhs, _)| lhs.trim() == format!("y{i}"))
                .and_then(|(_, rhs)| rhs.trim().parse().ok());
            outputs.push(parsed.ok_or_else(|| r.error(format!("bad output `{line}`")))?);
        }
        r.expect("end")?;
        AdditionProgram::new(num_inputs, steps, outputs)
    }
}

impl fmt::Display for AdditionProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_text(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for AdditionProgram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut r = LineReader::new(s);
        let p = AdditionProgram::read_text(&mut r)?;
        if !r.is_done() {
            return Err(r.error("trailing input after program"));
        }
        Ok(p)
    }
}

/// One left-to-right XOR chain per row.
pub fn naive_compile(m: &BinaryMatrix) -> AdditionProgram {
    let mut steps = Vec::new();
    let mut outputs = Vec::with_capacity(m.rows());
    for r in 0..m.rows() {
        let mut acc: Option<Operand> = None;
        for c in m.row_ones(r) {
            acc = Some(match acc {
                None => Operand::Input(c),
                Some(prev) => {
                    steps.push((prev, Operand::Input(c)));
                    Operand::Step(steps.len() - 1)
                }
            });
        }
        outputs.push(acc.unwrap_or(Operand::Zero));
    }
    AdditionProgram {
        num_inputs: m.cols(),
        steps,
        outputs,
    }
}

pub fn run_program(p: &AdditionProgram, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
    p.run(x)
}

pub fn apply_matrix(m: &BinaryMatrix, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
    m.apply(x)
}
