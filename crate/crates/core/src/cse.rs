//! Randomized common-subexpression elimination for binary matrix-vector products.
//!
//! Greedy pair extraction: repeatedly pick the pair of signals that occurs
//! together in the most rows, materialize their XOR as a new signal and
//! substitute it in every row that contains both. Ties between equally frequent
//! pairs are broken uniformly at random, so independent restarts explore
//! different extraction orders; the shortest program wins.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::binary::{AdditionProgram, BinaryMatrix, Operand};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CseConfig {
    pub seed: u64,
    /// Independent randomized runs; at least one is always made.
    pub restarts: usize,
    /// Cap on extraction rounds per run.
    pub max_passes: usize,
    /// A run stops extracting once it tracks more live pairs than this.
    pub pair_budget: usize,
}

impl Default for CseConfig {
    fn default() -> Self {
        CseConfig {
            seed: 0,
            restarts: 8,
            max_passes: usize::MAX,
            pair_budget: 4_000_000,
        }
    }
}

impl CseConfig {
    pub fn with_seed(seed: u64) -> Self {
        CseConfig {
            seed,
            ..Default::default()
        }
    }
}

const UNBUCKETED: u32 = u32::MAX;

#[inline]
fn pair_key(a: u32, b: u32) -> u64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    ((lo as u64) << 32) | hi as u64
}

/// Co-occurrence counts of signal pairs, with pairs of count >= 2 bucketed by count.
#[derive(Clone, Default)]
struct PairTable {
    slots: FxHashMap<u64, (u32, u32)>,
    buckets: Vec<Vec<u64>>,
    max: usize,
}

impl PairTable {
    fn unbucket(&mut self, count: u32, pos: u32) {
        let bucket = &mut self.buckets[count as usize];
        bucket.swap_remove(pos as usize);
        if let Some(&moved) = bucket.get(pos as usize) {
            self.slots.get_mut(&moved).expect("bucketed pair").1 = pos;
        }
    }

    fn bucket(&mut self, key: u64, count: u32) -> u32 {
        if count < 2 {
            return UNBUCKETED;
        }
        let c = count as usize;
        if self.buckets.len() <= c {
            self.buckets.resize_with(c + 1, Vec::new);
        }
        self.buckets[c].push(key);
        self.max = self.max.max(c);
        (self.buckets[c].len() - 1) as u32
    }

    fn inc(&mut self, a: u32, b: u32) {
        let key = pair_key(a, b);
        let (count, pos) = self.slots.get(&key).copied().unwrap_or((0, UNBUCKETED));
        if pos != UNBUCKETED {
            self.unbucket(count, pos);
        }
        let pos = self.bucket(key, count + 1);
        self.slots.insert(key, (count + 1, pos));
    }

    fn dec(&mut self, a: u32, b: u32) {
        let key = pair_key(a, b);
        let Some(&(count, pos)) = self.slots.get(&key) else {
            return;
        };
        if pos != UNBUCKETED {
            self.unbucket(count, pos);
        }
        if count <= 1 {
            self.slots.remove(&key);
        } else {
            let pos = self.bucket(key, count - 1);
            self.slots.insert(key, (count - 1, pos));
        }
    }

    fn pick_max(&mut self, rng: &mut impl Rng) -> Option<(u32, u32)> {
        while self.max >= 2 && self.buckets[self.max].is_empty() {
            self.max -= 1;
        }
        if self.max < 2 {
            return None;
        }
        let bucket = &self.buckets[self.max];
        let key = bucket[rng.gen_range(0..bucket.len())];
        Some(((key >> 32) as u32, key as u32))
    }
}

/// Row of signal ids as a growable bitset.
#[derive(Clone)]
struct SignalRow(Vec<u64>);

impl SignalRow {
    fn contains(&self, s: u32) -> bool {
        self.0
            .get(s as usize / 64)
            .is_some_and(|w| (w >> (s % 64)) & 1 == 1)
    }

    fn insert(&mut self, s: u32) {
        let w = s as usize / 64;
        if self.0.len() <= w {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (s % 64);
    }

    fn remove(&mut self, s: u32) {
        if let Some(w) = self.0.get_mut(s as usize / 64) {
            *w &= !(1 << (s % 64));
        }
    }

    fn members(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (wi, &w) in self.0.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push((wi * 64) as u32 + w.trailing_zeros());
                w &= w - 1;
            }
        }
        out
    }
}

#[derive(Clone)]
struct CseState {
    cols: usize,
    rows: Vec<SignalRow>,
    pairs: PairTable,
}

impl CseState {
    fn new(m: &BinaryMatrix) -> Self {
        let mut pairs = PairTable::default();
        let rows: Vec<SignalRow> = (0..m.rows())
            .map(|r| SignalRow(m.row_words(r).to_vec()))
            .collect();
        for row in &rows {
            let members = row.members();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    pairs.inc(a, b);
                }
            }
        }
        CseState {
            cols: m.cols(),
            rows,
            pairs,
        }
    }

    fn operand(&self, signal: u32) -> Operand {
        let s = signal as usize;
        if s < self.cols {
            Operand::Input(s)
        } else {
            Operand::Step(s - self.cols)
        }
    }

    fn run(mut self, cfg: &CseConfig, rng: &mut impl Rng) -> AdditionProgram {
        let mut steps: Vec<(Operand, Operand)> = Vec::new();
        while steps.len() < cfg.max_passes && self.pairs.slots.len() <= cfg.pair_budget {
            let Some((a, b)) = self.pairs.pick_max(rng) else {
                break;
            };
            let fresh = (self.cols + steps.len()) as u32;
            steps.push((self.operand(a), self.operand(b)));
            for r in 0..self.rows.len() {
                if !(self.rows[r].contains(a) && self.rows[r].contains(b)) {
                    continue;
                }
                for x in self.rows[r].members() {
                    if x != a && x != b {
                        self.pairs.dec(a, x);
                        self.pairs.dec(b, x);
                        self.pairs.inc(fresh, x);
                    }
                }
                self.pairs.dec(a, b);
                let row = &mut self.rows[r];
                row.remove(a);
                row.remove(b);
                row.insert(fresh);
            }
        }
        // Whatever remains is summed with plain chains.
        let mut outputs = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut acc: Option<Operand> = None;
            for s in row.members() {
                let op = self.operand(s);
                acc = Some(match acc {
                    None => op,
                    Some(prev) => {
                        steps.push((prev, op));
                        Operand::Step(steps.len() - 1)
                    }
                });
            }
            outputs.push(acc.unwrap_or(Operand::Zero));
        }
        AdditionProgram::new(self.cols, steps, outputs).expect("extraction yields a well-formed program")
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Reduces `M x` to a short XOR program; deterministic for a fixed `(M, cfg)`.
pub fn cse_reduce(m: &BinaryMatrix, cfg: &CseConfig) -> AdditionProgram {
    let start = CseState::new(m);
    let run = |restart: usize| {
        let mut rng = restart_rng(cfg.seed, restart);
        (start.clone().run(cfg, &mut rng), restart)
    };
    let restarts = cfg.restarts.max(1);
    #[cfg(feature = "parallel")]
    let results: Vec<(AdditionProgram, usize)> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(AdditionProgram, usize)> = (0..restarts).map(run).collect();
    results
        .into_iter()
        .min_by_key(|(p, restart)| (p.add_count(), *restart))
        .map(|(p, _)| p)
        .expect("at least one restart")
}

/// Reduces each diagonal block independently; identical blocks share one run.
pub fn cse_reduce_blockdiag(blocks: &[BinaryMatrix], cfg: &CseConfig) -> AdditionProgram {
    let mut cache: HashMap<&BinaryMatrix, AdditionProgram> = HashMap::new();
    let programs: Vec<AdditionProgram> = blocks
        .iter()
        .map(|b| cache.entry(b).or_insert_with(|| cse_reduce(b, cfg)).clone())
        .collect();
    AdditionProgram::block_diag(&programs)
}
