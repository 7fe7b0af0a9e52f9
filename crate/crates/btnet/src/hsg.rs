//! Hitting-set generators and the memorizing network built from them.
//!
//! A memorizer for a partial function `f` on `N` points hashes each input to
//! `z = C0(x)` in `[0, R)`, looks up an `a`-bit word `w` that depends only on
//! which of `T` intervals `z` falls in, and outputs `φ(Y_z)` where `Y_z` is a
//! `log Q`-bit integer read from a k-wise uniform generator seeded by
//! `hash(w)`. The words are found by a per-interval search so that the output
//! agrees with `f` on every domain point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng as _;

use crate::affine::AffineMap2;
use crate::bits::Bits;
use crate::circuit::{Circuit, Form, GateId};
use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::gadgets::{self, Interval, LookupTable, Term};
use crate::learn::data::{empirical_errors, Dataset};
use crate::network::{Layer, Network};
use crate::rng::{self, Rng};

/// `x ↦ bit0(Σ_j p_j z^j)` over GF(2^n), seeded by `k` field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KwiseGen {
    ctx: FieldCtx,
    k: usize,
}

impl KwiseGen {
    pub fn new(ctx: FieldCtx, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        Ok(KwiseGen { ctx, k })
    }

    pub fn with_seed(n: usize, k: usize, seed: u64) -> Result<Self> {
        Self::new(FieldCtx::with_seed(n, seed)?, k)
    }

    pub fn field(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Output length exponent: the generator has `2^n` coordinates.
    pub fn log_len(&self) -> usize {
        self.ctx.degree()
    }

    pub fn seed_len(&self) -> usize {
        self.k * self.ctx.degree()
    }

    /// Field coefficients `p_j` from consecutive `n`-bit blocks of `u`.
    pub fn coeffs(&self, u: &Bits) -> Vec<u64> {
        let n = self.ctx.degree();
        (0..self.k)
            .map(|j| (0..n).fold(0u64, |acc, b| acc | (u.get(j * n + b) as u64) << b))
            .collect()
    }

    #[inline]
    pub fn bit(&self, coeffs: &[u64], z: u64) -> bool {
        crate::field::field_horner(&self.ctx, coeffs, z) & 1 == 1
    }
}

/// Coordinate `z` of the generator on seed `u`.
pub fn kwise_output_bit(g: &KwiseGen, u: &Bits, z: u64) -> Result<bool> {
    if u.len() != g.seed_len() {
        return Err(Error::Shape {
            expected: g.seed_len(),
            got: u.len(),
        });
    }
    if g.log_len() < 64 && z >> g.log_len() != 0 {
        return Err(Error::InvalidArgument(format!(
            "coordinate {z} outside [0, 2^{})",
            g.log_len()
        )));
    }
    Ok(g.bit(&g.coeffs(u), z))
}

/// Affine map from `a`-bit words to `r`-bit generator seeds, rows as masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineHash {
    a: usize,
    rows: Vec<u128>,
    offset: Vec<bool>,
}

impl AffineHash {
    pub fn new(a: usize, rows: Vec<u128>, offset: Vec<bool>) -> Result<Self> {
        if a > 128 {
            return Err(Error::InvalidArgument(format!(
                "hash input width {a} exceeds 128"
            )));
        }
        if rows.len() != offset.len() {
            return Err(Error::Shape {
                expected: rows.len(),
                got: offset.len(),
            });
        }
        let mask = width_mask(a);
        Ok(AffineHash {
            a,
            rows: rows.into_iter().map(|r| r & mask).collect(),
            offset,
        })
    }

    /// A uniformly random member of the family of affine maps.
    pub fn random(a: usize, r: usize, rng: &mut Rng) -> Result<Self> {
        let rows = (0..r).map(|_| rng.random::<u128>()).collect();
        let offset = (0..r).map(|_| rng.random::<bool>()).collect();
        Self::new(a, rows, offset)
    }

    pub fn input_len(&self) -> usize {
        self.a
    }

    pub fn output_len(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u128] {
        &self.rows
    }

    pub fn offsets(&self) -> &[bool] {
        &self.offset
    }

    pub fn apply(&self, w: u128) -> Bits {
        let bits: Vec<bool> = self
            .rows
            .iter()
            .zip(&self.offset)
            .map(|(&r, &c)| ((r & w).count_ones() & 1 == 1) ^ c)
            .collect();
        Bits::from_bools(&bits)
    }

    /// `hash(w)` split into the generator's field coefficients.
    pub fn coeffs(&self, gen: &KwiseGen, w: u128) -> Vec<u64> {
        let n = gen.ctx.degree();
        (0..gen.k)
            .map(|j| {
                (0..n).fold(0u64, |acc, b| {
                    let t = j * n + b;
                    let bit = ((self.rows[t] & w).count_ones() & 1 == 1) ^ self.offset[t];
                    acc | (bit as u64) << b
                })
            })
            .collect()
    }

    pub fn to_map(&self) -> AffineMap2 {
        let rows = self
            .rows
            .iter()
            .map(|&r| Bits::from_bools(&(0..self.a).map(|j| (r >> j) & 1 == 1).collect::<Vec<_>>()))
            .collect();
        AffineMap2::new(self.a, rows, Bits::from_bools(&self.offset)).expect("shapes agree")
    }
}

fn width_mask(a: usize) -> u128 {
    if a >= 128 {
        u128::MAX
    } else {
        (1u128 << a) - 1
    }
}

/// A conjunction of literals `y_index = value` over distinct coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjunction {
    literals: Vec<(u64, bool)>,
}

impl Conjunction {
    pub fn new(mut literals: Vec<(u64, bool)>) -> Result<Self> {
        literals.sort_unstable();
        if literals.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument(
                "repeated coordinate in conjunction".into(),
            ));
        }
        Ok(Conjunction { literals })
    }

    pub fn literals(&self) -> &[(u64, bool)] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn accepts(&self, y: impl Fn(u64) -> bool) -> bool {
        self.literals.iter().all(|&(i, v)| y(i) == v)
    }
}

/// `log2 P(V(y) = 1)` for `y ~ Ber(α)^R`.
pub fn conjunction_accept_prob(v: &Conjunction, alpha: f64) -> f64 {
    let (ones, zeros) =
        v.literals.iter().fold(
            (0u64, 0u64),
            |(o, z), &(_, b)| {
                if b {
                    (o + 1, z)
                } else {
                    (o, z + 1)
                }
            },
        );
    let term = |count: u64, p: f64| {
        if count == 0 {
            0.0
        } else {
            count as f64 * p.log2()
        }
    };
    term(ones, alpha) + term(zeros, 1.0 - alpha)
}

/// Tolerance on log-space probability comparisons.
pub const LOG_TOL: f64 = 1e-12;

/// Greedy breakpoints: each block ends at the first literal that pushes its
/// acceptance probability to at most `ε^(1/T)`, with `log2 ε` one less than the
/// conjunction's log-acceptance. Remaining blocks are empty and `ℓ_T = R`.
pub fn choose_breakpoints(v: &Conjunction, alpha: f64, t: usize, range: u64) -> Vec<u64> {
    let log_eps = conjunction_accept_prob(v, alpha) - 1.0;
    let cut = log_eps / t as f64;
    let lit = |b: bool| {
        if b {
            alpha.log2()
        } else {
            (1.0 - alpha).log2()
        }
    };
    let mut points = vec![0u64];
    let mut acc = 0.0;
    for &(z, b) in &v.literals {
        if points.len() == t {
            break;
        }
        acc += lit(b);
        if acc <= cut + LOG_TOL {
            points.push(z + 1);
            acc = 0.0;
        }
    }
    points.resize(t + 1, range);
    points
}

/// Derived sizes of the memorizer for `N` points of which `N_1` are ones.
#[derive(Clone, Debug, PartialEq)]
pub struct HsgParams {
    pub points: usize,
    pub ones: usize,
    /// `log2 R = 2 ⌈log2 N⌉`.
    pub log_range: usize,
    /// `log2 Q`, a power of two with `Q ≥ 4 R²`.
    pub log_q: usize,
    /// Field degree `n = log2 R + log2 log2 Q`.
    pub field_degree: usize,
    pub k: usize,
    /// Number of blocks `T`.
    pub blocks: usize,
    /// Hash input width `a`.
    pub word_len: usize,
    /// `log2 ε`.
    pub log2_eps: f64,
    /// `log2 ε0` with `ε0 = ε^(1/T) / (2R)`.
    pub log2_eps0: f64,
    /// `⌊α Q⌋`; a coordinate reads 1 iff `Y ≤ threshold`.
    pub threshold: u128,
}

impl HsgParams {
    pub fn new(points: usize, ones: usize, k: usize) -> Result<Self> {
        if ones == 0 || ones >= points {
            return Err(Error::InvalidArgument(
                "generator parameters need 0 < N_1 < N".into(),
            ));
        }
        let log_range = gadgets::hashed_width(points);
        let log_q = (2 + 2 * log_range).next_power_of_two();
        if log_q > 64 {
            return Err(Error::InvalidArgument(format!(
                "N = {points} needs log Q = {log_q} > 64"
            )));
        }
        let field_degree = log_range + log_q.trailing_zeros() as usize;
        if field_degree > 64 {
            return Err(Error::InvalidArgument("field degree exceeds 64".into()));
        }
        let alpha = ones as f64 / points as f64;
        let zeros = points - ones;
        let log2_eps = ones as f64 * alpha.log2() + zeros as f64 * (1.0 - alpha).log2() - 1.0;
        let inv = -log2_eps;
        let blocks = (inv.powf(0.75).ceil() as usize).max(1).next_power_of_two();
        let log2_eps0 = log2_eps / blocks as f64 - 1.0 - log_range as f64;
        // Smallest a with 2^a > R / ε0.
        let word_len = ((log_range as f64 - log2_eps0 + LOG_TOL).floor() as usize) + 1;
        if word_len > 128 {
            return Err(Error::InvalidArgument(format!(
                "word length {word_len} exceeds 128"
            )));
        }
        let threshold = ((ones as u128) << log_q) / points as u128;
        Ok(HsgParams {
            points,
            ones,
            log_range,
            log_q,
            field_degree,
            k,
            blocks,
            word_len,
            log2_eps,
            log2_eps0,
            threshold,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.ones as f64 / self.points as f64
    }

    pub fn range(&self) -> u64 {
        1u64 << self.log_range
    }

    pub fn seed_len(&self) -> usize {
        self.k * self.field_degree
    }

    fn index_shift(&self) -> usize {
        self.log_q.trailing_zeros() as usize
    }

    /// `φ(Y_z)` on the coordinates `z·log Q + i`, deciding from the top bit
    /// down and stopping at the first bit that differs from the threshold.
    pub fn phi_bit(&self, gen: &KwiseGen, coeffs: &[u64], z: u64) -> bool {
        let s = self.index_shift();
        for i in (0..self.log_q).rev() {
            let y = gen.bit(coeffs, (z << s) | i as u64);
            let t = (self.threshold >> i) & 1 == 1;
            if y != t {
                return !y;
            }
        }
        true
    }

    /// The full integer `Y_z`.
    pub fn y_value(&self, gen: &KwiseGen, coeffs: &[u64], z: u64) -> u128 {
        let s = self.index_shift();
        (0..self.log_q).fold(0u128, |acc, i| {
            acc | (gen.bit(coeffs, (z << s) | i as u64) as u128) << i
        })
    }
}

/// The hard-coded witness: hash, per-block words and breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsgSeed {
    pub hash: AffineHash,
    pub words: Vec<u128>,
    pub breakpoints: Vec<u64>,
}

impl HsgSeed {
    pub fn block_of(&self, z: u64) -> usize {
        self.breakpoints
            .windows(2)
            .position(|w| w[0] <= z && z < w[1])
            .expect("coordinate below R")
    }

    pub fn lookup_table(&self) -> LookupTable {
        let a = self.hash.input_len();
        LookupTable {
            breakpoints: self.breakpoints.clone(),
            words: self
                .words
                .iter()
                .map(|&w| Bits::from_bools(&(0..a).map(|j| (w >> j) & 1 == 1).collect::<Vec<_>>()))
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let a = self.hash.input_len();
        let bitstring = |v: u128| -> String {
            (0..a)
                .map(|j| if (v >> j) & 1 == 1 { '1' } else { '0' })
                .collect()
        };
        let mut s = String::new();
        let _ = writeln!(s, "hsg-seed v1");
        let _ = writeln!(s, "hash {} {}", a, self.hash.output_len());
        for (r, c) in self.hash.rows.iter().zip(&self.hash.offset) {
            let _ = writeln!(s, "{} {}", bitstring(*r), *c as u8);
        }
        let _ = writeln!(s, "blocks {}", self.words.len());
        for &w in &self.words {
            let _ = writeln!(s, "{}", bitstring(w));
        }
        let bp: Vec<String> = self.breakpoints.iter().map(|b| b.to_string()).collect();
        let _ = writeln!(s, "breakpoints {}", bp.join(" "));
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .map(|(n, l)| (n + 1, l.trim()))
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("missing {what}"),
                })
        };
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.into(),
        };
        let parse_bits = |line: usize, s: &str| -> Result<u128> {
            s.chars()
                .enumerate()
                .try_fold(0u128, |acc, (j, c)| match c {
                    '0' => Ok(acc),
                    '1' => Ok(acc | 1u128 << j),
                    _ => Err(perr(line, "bad bit character")),
                })
        };
        let (n, head) = next("header")?;
        if head != "hsg-seed v1" {
            return Err(perr(n, "expected `hsg-seed v1`"));
        }
        let (n, h) = next("hash line")?;
        let dims: Vec<usize> = h
            .strip_prefix("hash ")
            .ok_or_else(|| perr(n, "expected `hash a r`"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(n, "bad integer")))
            .collect::<Result<_>>()?;
        let [a, r] = dims[..] else {
            return Err(perr(n, "expected two integers"));
        };
        let mut rows = Vec::with_capacity(r);
        let mut offset = Vec::with_capacity(r);
        for _ in 0..r {
            let (n, l) = next("hash row")?;
            let (bits, c) = l
                .split_once(' ')
                .ok_or_else(|| perr(n, "expected `row offset`"))?;
            if bits.len() != a {
                return Err(perr(n, "hash row has the wrong width"));
            }
            rows.push(parse_bits(n, bits)?);
            offset.push(c.trim() == "1");
        }
        let (n, b) = next("blocks line")?;
        let t: usize = b
            .strip_prefix("blocks ")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| perr(n, "expected `blocks T`"))?;
        let mut words = Vec::with_capacity(t);
        for _ in 0..t {
            let (n, l) = next("block word")?;
            words.push(parse_bits(n, l)?);
        }
        let (n, bp) = next("breakpoints")?;
        let breakpoints = bp
            .strip_prefix("breakpoints ")
            .ok_or_else(|| perr(n, "expected `breakpoints …`"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(n, "bad breakpoint")))
            .collect::<Result<Vec<u64>>>()?;
        Ok(HsgSeed {
            hash: AffineHash::new(a, rows, offset)?,
            words,
            breakpoints,
        })
    }
}

/// Knobs of the seed search.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub seed: u64,
    /// Hash resamples before giving up.
    pub max_retries: usize,
    /// Words scanned per block before resampling the hash.
    pub block_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            seed: 0,
            max_retries: gadgets::DEFAULT_RETRIES,
            block_budget: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Hash resamples used (0 when the first hash works).
    pub hash_retries: usize,
    /// Words scanned per block on the successful attempt.
    pub scans: Vec<u64>,
}

fn block_accepts(
    params: &HsgParams,
    gen: &KwiseGen,
    hash: &AffineHash,
    w: u128,
    literals: &[(u64, bool)],
) -> bool {
    let coeffs = hash.coeffs(gen, w);
    literals
        .iter()
        .all(|&(z, b)| params.phi_bit(gen, &coeffs, z) == b)
}

/// Expected hits above which a fruitless scan counts as structural.
const UNREACHABLE_HITS: f64 = 4096.0;
/// Same, once the scan has covered every word.
const UNREACHABLE_FULL_SCAN_HITS: f64 = 16.0;

fn literal_log2_prob(lits: &[(u64, bool)], alpha: f64) -> f64 {
    lits.iter()
        .map(|&(_, b)| {
            if b {
                alpha.log2()
            } else {
                (1.0 - alpha).log2()
            }
        })
        .sum()
}

/// Finds a hash and one word per block so that the generator satisfies `v`.
///
/// Gives up early when a block stays unhit far beyond its expected rate: low
/// independence orders make the generator affine in its coordinate, so some
/// label patterns on linearly dependent coordinates are unreachable.
pub fn search_seed(
    v: &Conjunction,
    params: &HsgParams,
    gen: &KwiseGen,
    breakpoints: &[u64],
    config: &SearchConfig,
) -> Result<(HsgSeed, SearchStats)> {
    search(v, params, gen, breakpoints, config).map_err(|e| match e {
        SearchFailure::Unreachable(m) | SearchFailure::Exhausted(m) => Error::SearchBudget(m),
        SearchFailure::Other(e) => e,
    })
}

enum SearchFailure {
    Unreachable(String),
    Exhausted(String),
    Other(Error),
}

impl From<Error> for SearchFailure {
    fn from(e: Error) -> Self {
        SearchFailure::Other(e)
    }
}

fn search(
    v: &Conjunction,
    params: &HsgParams,
    gen: &KwiseGen,
    breakpoints: &[u64],
    config: &SearchConfig,
) -> std::result::Result<(HsgSeed, SearchStats), SearchFailure> {
    let a = params.word_len;
    let space = if a >= 128 { u128::MAX } else { 1u128 << a };
    let budget = (config.block_budget as u128).min(space) as u64;
    let blocks: Vec<Vec<(u64, bool)>> = breakpoints
        .windows(2)
        .map(|w| {
            v.literals()
                .iter()
                .copied()
                .filter(|&(z, _)| w[0] <= z && z < w[1])
                .collect()
        })
        .collect();
    let mut failures = Vec::new();
    for retry in 0..config.max_retries {
        let mut r = rng::stream(config.seed, &[0x4a5, retry as u64]);
        let hash = AffineHash::random(a, params.seed_len(), &mut r)?;
        let mut words = Vec::with_capacity(blocks.len());
        let mut scans = Vec::with_capacity(blocks.len());
        let mut failed = None;
        for (i, lits) in blocks.iter().enumerate() {
            if lits.is_empty() {
                words.push(0);
                scans.push(0);
                continue;
            }
            let start = r.random::<u128>() & width_mask(a);
            let hit = (0..budget).find_map(|t| {
                let w = start.wrapping_add(t as u128) & width_mask(a);
                block_accepts(params, gen, &hash, w, lits).then_some((w, t + 1))
            });
            match hit {
                Some((w, t)) => {
                    words.push(w);
                    scans.push(t);
                }
                None => {
                    failed = Some(i);
                    break;
                }
            }
        }
        match failed {
            None => {
                let seed = HsgSeed {
                    hash,
                    words,
                    breakpoints: breakpoints.to_vec(),
                };
                return Ok((
                    seed,
                    SearchStats {
                        hash_retries: retry,
                        scans,
                    },
                ));
            }
            Some(i) => {
                let msg = format!(
                    "attempt {retry}: block {i} ({} literals) had 0 hits in {budget} words; earlier blocks needed {scans:?}",
                    blocks[i].len()
                );
                // A miss this far below expectation means the generator cannot
                // reach the block at all, whatever the hash.
                let expected = budget as f64 * literal_log2_prob(&blocks[i], params.alpha()).exp2();
                let full_scan = budget as u128 == space;
                if expected >= UNREACHABLE_HITS
                    || (full_scan && expected >= UNREACHABLE_FULL_SCAN_HITS)
                {
                    return Err(SearchFailure::Unreachable(format!(
                        "block unreachable by this generator ({expected:.0} hits expected); {msg}"
                    )));
                }
                failures.push(msg);
            }
        }
    }
    Err(SearchFailure::Exhausted(format!(
        "{} hash attempts failed; {}",
        config.max_retries,
        failures.last().map_or("", String::as_str)
    )))
}

/// Checks `V(G(σ)) = 1` by evaluating the generator on every literal.
pub fn verify_seed(v: &Conjunction, params: &HsgParams, gen: &KwiseGen, seed: &HsgSeed) -> bool {
    v.literals().iter().all(|&(z, b)| {
        let coeffs = seed.hash.coeffs(gen, seed.words[seed.block_of(z)]);
        params.phi_bit(gen, &coeffs, z) == b
    })
}

/// Algebraic normal form of one generator coordinate as a function of the
/// hash input `w` and the coordinate variables `z`: an XOR of products of
/// linear forms. Each atom is `(z-forms, w-form)`; the empty z-form list
/// never occurs and a zero w-form stands for a pure product of z-forms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Anf {
    atoms: BTreeSet<(Vec<u64>, u128)>,
    pure_z: u64,
    pure_w: u128,
    constant: bool,
}

impl Anf {
    fn toggle(&mut self, mut zs: Vec<u64>, w: u128) {
        zs.sort_unstable();
        zs.dedup();
        match (zs.len(), w) {
            (0, 0) => self.constant ^= true,
            (0, w) => self.pure_w ^= w,
            (1, 0) => self.pure_z ^= zs[0],
            _ => {
                let key = (zs, w);
                if !self.atoms.remove(&key) {
                    self.atoms.insert(key);
                }
            }
        }
    }
}

/// Precomputed linear structure of `(w, z') ↦ G0(hash(w))_{z'}`.
struct LinearStructure<'a> {
    gen: &'a KwiseGen,
    hash: &'a AffineHash,
    /// `frob[m][s]`: bit `s` of `z'^(2^m)` as a mask over the bits of `z'`.
    frob: Vec<Vec<u64>>,
    /// `bit0(x^e mod E)` for small `e`.
    low_bit: Vec<bool>,
}

impl<'a> LinearStructure<'a> {
    fn new(gen: &'a KwiseGen, hash: &'a AffineHash) -> Self {
        let n = gen.ctx.degree();
        let max_m = usize::BITS as usize - gen.k.leading_zeros() as usize;
        let frob = (0..max_m)
            .map(|m| {
                let table = gen.ctx.frobenius_table(m as u32);
                (0..n)
                    .map(|s| (0..n).fold(0u64, |acc, b| acc | ((table[b] >> s) & 1) << b))
                    .collect()
            })
            .collect();
        let low_bit = (0..(max_m + 1) * n + 1)
            .map(|e| gen.ctx.x_pow(e as u128) & 1 == 1)
            .collect();
        LinearStructure {
            gen,
            hash,
            frob,
            low_bit,
        }
    }

    /// `bit0(p_j · x^t)` as an affine form over `w`.
    fn lambda(&self, j: usize, t: usize) -> (u128, bool) {
        let n = self.gen.ctx.degree();
        (0..n)
            .filter(|&b| self.low_bit[b + t])
            .fold((0u128, false), |(m, c), b| {
                let row = j * n + b;
                (m ^ self.hash.rows[row], c ^ self.hash.offset[row])
            })
    }

    /// ANF of the coordinate whose bit `b` is the affine form `zprime[b]`
    /// over the z variables.
    fn anf(&self, zprime: &[(u64, bool)]) -> Anf {
        let n = self.gen.ctx.degree();
        let mut anf = Anf::default();
        let (m0, c0) = self.lambda(0, 0);
        anf.toggle(Vec::new(), m0);
        if c0 {
            anf.toggle(Vec::new(), 0);
        }
        // Affine form over z of bit s of z'^(2^m).
        let factor = |m: usize, s: usize| -> (u64, bool) {
            let mask = self.frob[m][s];
            (0..n)
                .filter(|&b| (mask >> b) & 1 == 1)
                .fold((0u64, false), |(l, c), b| {
                    (l ^ zprime[b].0, c ^ zprime[b].1)
                })
        };
        for j in 1..self.gen.k {
            let ms: Vec<usize> = (0..usize::BITS as usize)
                .filter(|&m| (j >> m) & 1 == 1)
                .collect();
            let c = ms.len();
            let mut idx = vec![0usize; c];
            loop {
                let t: usize = idx.iter().sum();
                let (mw, dw) = self.lambda(j, t);
                let factors: Vec<(u64, bool)> =
                    ms.iter().zip(&idx).map(|(&m, &s)| factor(m, s)).collect();
                // Expand Π (L_q ⊕ c_q) · (M ⊕ d) over subsets of linear parts.
                for subset in 0u32..1 << c {
                    let mut zs = Vec::new();
                    let mut keep = true;
                    for (q, &(l, cq)) in factors.iter().enumerate() {
                        if (subset >> q) & 1 == 1 {
                            if l == 0 {
                                keep = false;
                            }
                            zs.push(l);
                        } else if !cq {
                            keep = false;
                        }
                    }
                    if !keep {
                        continue;
                    }
                    if mw != 0 {
                        anf.toggle(zs.clone(), mw);
                    }
                    if dw {
                        anf.toggle(zs, 0);
                    }
                }
                // Next index tuple.
                let mut q = 0;
                while q < c {
                    idx[q] += 1;
                    if idx[q] < n {
                        break;
                    }
                    idx[q] = 0;
                    q += 1;
                }
                if q == c {
                    break;
                }
            }
        }
        anf
    }
}

/// Where the generator's variables live in a circuit.
enum Vars<'a> {
    /// Network inputs: `w` at columns `0..a`, `z` at `a..a+n`.
    Inputs { a: usize },
    /// Materialized gates.
    Gates { w: &'a [GateId], z: &'a [GateId] },
}

fn linear_parity(circuit: &mut Circuit, vars: &Vars, z: u64, w: u128, flip: bool) -> Form {
    match vars {
        Vars::Inputs { a } => {
            let d = circuit.input_dim();
            let mut row = Bits::zeros(d);
            for j in 0..*a {
                if (w >> j) & 1 == 1 {
                    row.set(j, true);
                }
            }
            for j in 0..d - a {
                if (z >> j) & 1 == 1 {
                    row.set(a + j, true);
                }
            }
            circuit.parity_of_inputs(&row, flip)
        }
        Vars::Gates { w: wg, z: zg } => {
            let mut gates: Vec<GateId> = (0..wg.len())
                .filter(|&j| (w >> j) & 1 == 1)
                .map(|j| wg[j])
                .collect();
            gates.extend((0..zg.len()).filter(|&j| (z >> j) & 1 == 1).map(|j| zg[j]));
            circuit.parity_of_gates(&gates, flip)
        }
    }
}

/// Adds gates computing the coordinate with ANF `anf` and returns its form.
fn anf_form(circuit: &mut Circuit, vars: &Vars, anf: &Anf) -> Form {
    let mut gates = Vec::with_capacity(anf.atoms.len() + 1);
    for (zs, w) in &anf.atoms {
        let mut forms: Vec<Form> = zs
            .iter()
            .map(|&l| linear_parity(circuit, vars, l, 0, false))
            .collect();
        if *w != 0 {
            forms.push(linear_parity(circuit, vars, 0, *w, false));
        }
        gates.push(circuit.and(&forms));
    }
    let pure = linear_parity(circuit, vars, anf.pure_z, anf.pure_w, anf.constant);
    if gates.is_empty() {
        return pure;
    }
    let mut flip = false;
    if pure.is_constant() {
        flip = pure.constant_term() == 1;
    } else {
        gates.push(circuit.materialize(&pure));
    }
    circuit.parity_of_gates(&gates, flip)
}

/// Network on inputs `(w, z)` (`a + n` bits) computing `G0(hash(w))_z`.
pub fn kwise_compile(gen: &KwiseGen, hash: &AffineHash) -> Result<Network> {
    if hash.output_len() != gen.seed_len() {
        return Err(Error::Shape {
            expected: gen.seed_len(),
            got: hash.output_len(),
        });
    }
    let (a, n) = (hash.input_len(), gen.ctx.degree());
    let structure = LinearStructure::new(gen, hash);
    let zprime: Vec<(u64, bool)> = (0..n).map(|b| (1u64 << b, false)).collect();
    let anf = structure.anf(&zprime);
    let mut circuit = Circuit::new(a + n, false);
    let form = anf_form(&mut circuit, &Vars::Inputs { a }, &anf);
    let out = circuit.materialize(&form);
    circuit.build(&[out])
}

/// Partial Boolean function given by its graph on distinct points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFunction {
    input_dim: usize,
    points: Vec<(Bits, bool)>,
}

impl PartialFunction {
    pub fn new(input_dim: usize, points: Vec<(Bits, bool)>) -> Result<Self> {
        let mut seen = std::collections::HashMap::new();
        for (x, y) in &points {
            if x.len() != input_dim {
                return Err(Error::Shape {
                    expected: input_dim,
                    got: x.len(),
                });
            }
            if let Some(prev) = seen.insert(x.clone(), *y) {
                if prev != *y {
                    return Err(Error::Inconsistent {
                        input: x.to_string(),
                    });
                }
                return Err(Error::InvalidArgument(format!("point {x} listed twice")));
            }
        }
        Ok(PartialFunction { input_dim, points })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn points(&self) -> &[(Bits, bool)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.points.iter().filter(|(_, y)| *y).count()
    }

    pub fn domain(&self) -> Vec<Bits> {
        self.points.iter().map(|(x, _)| x.clone()).collect()
    }

    /// True when `net` agrees with the function on every domain point.
    pub fn agrees(&self, net: &Network) -> bool {
        self.points
            .iter()
            .all(|(x, y)| net.evaluate(x).map(|o| o.get(0) == *y).unwrap_or(false))
    }
}

/// Staircase points `0^i 1^(d−i)` for `i = 0..=d`, labeled by parity: every
/// memorizer of it needs at least `d²` weights.
pub fn staircase_parity(d: usize) -> PartialFunction {
    let points = (0..=d)
        .map(|i| {
            let x = Bits::from_bools(&(0..d).map(|j| j >= i).collect::<Vec<_>>());
            let y = (d - i) % 2 == 1;
            (x, y)
        })
        .collect();
    PartialFunction::new(d, points).expect("staircase points are distinct")
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemorizerConfig {
    /// Independence order tried first.
    pub k: usize,
    /// Highest order tried when a block proves unreachable.
    pub max_k: usize,
    pub seed: u64,
    pub max_retries: usize,
    pub block_budget: u64,
    /// Use a `±1` sign layer as the first layer.
    pub ternary_first_layer: bool,
    pub sign_factor: f64,
}

impl Default for MemorizerConfig {
    fn default() -> Self {
        MemorizerConfig {
            k: 3,
            max_k: 6,
            seed: 0,
            max_retries: gadgets::DEFAULT_RETRIES,
            block_budget: 1 << 22,
            ternary_first_layer: false,
            sign_factor: gadgets::SIGN_WIDTH_FACTOR,
        }
    }
}

/// Reference terms of the weight bound `log C(N,N1) + log C(N,N1)^(3/4) polylog N
/// + d0² log N`, without constants.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTerms {
    pub log2_binom: f64,
    pub lower_order: f64,
    pub input_term: f64,
}

impl BoundTerms {
    pub fn new(points: usize, ones: usize, input_dim: usize) -> Self {
        let log2_binom = log2_binomial(points as u64, ones as u64);
        let log_n = (points.max(2) as f64).log2();
        BoundTerms {
            log2_binom,
            lower_order: log2_binom.powf(0.75),
            input_term: (input_dim * input_dim) as f64 * log_n,
        }
    }
}

/// `log2 C(n, k)` via log-gamma-free summation.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).log2() - ((i + 1) as f64).log2())
        .sum()
}

#[derive(Clone, Debug)]
pub struct MemorizerReport {
    pub network: Network,
    pub constant: bool,
    pub params: Option<HsgParams>,
    pub seed: Option<HsgSeed>,
    pub stats: SearchStats,
    pub bound: BoundTerms,
    /// Set only after checking every domain point.
    pub consistent: bool,
}

impl MemorizerReport {
    pub fn depth(&self) -> usize {
        self.network.depth()
    }

    pub fn dims(&self) -> &[usize] {
        self.network.dims()
    }

    pub fn weights(&self) -> usize {
        self.network.size().weights
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let dims: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "depth {}", self.depth());
        let _ = writeln!(s, "dims {}", dims.join(" "));
        let _ = writeln!(s, "weights {}", self.weights());
        let _ = writeln!(s, "consistent {}", self.consistent);
        let _ = writeln!(s, "constant_shortcut {}", self.constant);
        let _ = writeln!(s, "bound_log2_binom {:.3}", self.bound.log2_binom);
        let _ = writeln!(s, "bound_lower_order {:.3}", self.bound.lower_order);
        let _ = writeln!(s, "bound_input_term {:.3}", self.bound.input_term);
        if let Some(p) = &self.params {
            let _ = writeln!(
                s,
                "log_range {} log_q {} field_degree {} k {} blocks {} word_len {} log2_eps {:.3}",
                p.log_range, p.log_q, p.field_degree, p.k, p.blocks, p.word_len, p.log2_eps
            );
        }
        let _ = writeln!(s, "hash_retries {}", self.stats.hash_retries);
        if let Some(seed) = &self.seed {
            s.push_str(&seed.to_text());
        }
        s
    }
}

fn constant_network(input_dim: usize, value: bool) -> Network {
    let mut l = Layer::zeros(1, input_dim.max(1), false);
    l.set_bias(0, value as i64);
    Network::new(vec![l]).expect("constant network is well formed")
}

/// Builds a network that agrees with `f` on its whole domain.
pub fn build_memorizer(f: &PartialFunction, config: &MemorizerConfig) -> Result<MemorizerReport> {
    let (n, ones, d0) = (f.len(), f.ones(), f.input_dim());
    if n == 0 {
        return Err(Error::InvalidArgument("empty domain".into()));
    }
    let bound = BoundTerms::new(n, ones, d0);
    if ones == 0 || ones == n {
        let network = constant_network(d0, ones == n);
        let consistent = f.agrees(&network);
        return Ok(MemorizerReport {
            network,
            constant: true,
            params: None,
            seed: None,
            stats: SearchStats::default(),
            bound,
            consistent,
        });
    }
    let mut params = HsgParams::new(n, ones, config.k)?;
    let domain = f.domain();
    let mut circuit = Circuit::new(d0, config.ternary_first_layer);

    // Injective preprocessing and the gates carrying z = C0(x).
    let (zs, z_gates): (Vec<u64>, Vec<GateId>) = if config.ternary_first_layer {
        let sign = gadgets::find_sign_matrix(
            &domain,
            config.seed,
            config.sign_factor,
            config.max_retries,
        )?;
        let signs: Vec<Bits> = domain.iter().map(|x| sign.apply(x)).collect();
        let c0 = gadgets::find_injective_linear(
            &signs,
            rng::derive(config.seed, &[1]),
            config.max_retries,
        )?;
        let c0 = pad_map(c0, params.log_range);
        let sign_gates: Vec<GateId> = (0..sign.width())
            .map(|i| {
                let layer = &sign.layer;
                let d = layer.inputs();
                let plus =
                    Bits::from_bools(&(0..d).map(|j| layer.weight(i, j) == 1).collect::<Vec<_>>());
                let minus =
                    Bits::from_bools(&(0..d).map(|j| layer.weight(i, j) == -1).collect::<Vec<_>>());
                circuit.input_gate(&plus, Some(&minus), 1, 0)
            })
            .collect();
        let z_gates = c0
            .rows()
            .iter()
            .zip(c0.offset().iter())
            .map(|(row, flip)| {
                let sel: Vec<GateId> = (0..row.len())
                    .filter(|&j| row.get(j))
                    .map(|j| sign_gates[j])
                    .collect();
                let form = circuit.parity_of_gates(&sel, flip);
                if form.is_constant() {
                    circuit.constant(form.constant_term() == 1)
                } else {
                    circuit.materialize(&form)
                }
            })
            .collect();
        (
            signs.iter().map(|s| c0.apply(s).to_u64()).collect(),
            z_gates,
        )
    } else {
        let c0 = gadgets::find_injective_linear(&domain, config.seed, config.max_retries)?;
        let c0 = pad_map(c0, params.log_range);
        let z_gates = gadgets::affine_bits(&mut circuit, &c0);
        (
            domain.iter().map(|x| c0.apply(x).to_u64()).collect(),
            z_gates,
        )
    };

    let v = Conjunction::new(
        zs.iter()
            .zip(f.points())
            .map(|(&z, (_, y))| (z, *y))
            .collect(),
    )?;
    let breakpoints = choose_breakpoints(&v, params.alpha(), params.blocks, params.range());
    let search_config = SearchConfig {
        seed: rng::derive(config.seed, &[3]),
        max_retries: config.max_retries,
        block_budget: config.block_budget,
    };
    let mut k = config.k;
    let (gen, seed, stats) = loop {
        params = HsgParams::new(n, ones, k)?;
        let gen = KwiseGen::with_seed(params.field_degree, k, rng::derive(config.seed, &[2]))?;
        match search(&v, &params, &gen, &breakpoints, &search_config) {
            Ok((seed, stats)) => break (gen, seed, stats),
            Err(SearchFailure::Unreachable(_)) if k < config.max_k => k += 1,
            Err(SearchFailure::Unreachable(m) | SearchFailure::Exhausted(m)) => {
                return Err(Error::SearchBudget(m))
            }
            Err(SearchFailure::Other(e)) => return Err(e),
        }
    };
    if !verify_seed(&v, &params, &gen, &seed) {
        return Err(Error::Internal(
            "seed search returned an unverified seed".into(),
        ));
    }

    let w_gates = gadgets::lookup_gates(&mut circuit, &z_gates, &seed.lookup_table());
    let out = generator_output(&mut circuit, &params, &gen, &seed.hash, &w_gates, &z_gates);
    let network = circuit.build(&[out])?;
    if !f.agrees(&network) {
        return Err(Error::Internal(
            "compiled memorizer disagrees with the function".into(),
        ));
    }
    Ok(MemorizerReport {
        network,
        constant: false,
        params: Some(params),
        seed: Some(seed),
        stats,
        bound,
        consistent: true,
    })
}

/// Interpolator `teacher ⊕ memorizer(flips)` for a consistent dataset.
#[derive(Clone, Debug)]
pub struct InterpolatorReport {
    pub network: Network,
    pub memorizer: MemorizerReport,
    /// Distinct training points whose label disagrees with the teacher.
    pub flips: usize,
    pub points: usize,
}

impl InterpolatorReport {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let dims: Vec<String> = self.network.dims().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(s, "interpolator_depth {}", self.network.depth());
        let _ = writeln!(s, "interpolator_dims {}", dims.join(" "));
        let _ = writeln!(s, "interpolator_weights {}", self.network.size().weights);
        let _ = writeln!(s, "points {} flips {}", self.points, self.flips);
        let _ = writeln!(s, "training_errors 0");
        s.push_str("memorizer:\n");
        s.push_str(&self.memorizer.summary());
        s
    }
}

/// Memorizes the flip function `y ⊕ teacher(x)` of a consistent dataset and
/// composes it with the teacher by XOR, so the result fits every sample.
pub fn build_dataset_interpolator(
    teacher: &Network,
    s: &Dataset,
    config: &MemorizerConfig,
) -> Result<InterpolatorReport> {
    if teacher.output_dim() != 1 {
        return Err(Error::Shape {
            expected: 1,
            got: teacher.output_dim(),
        });
    }
    if teacher.input_dim() != s.input_dim() {
        return Err(Error::Shape {
            expected: teacher.input_dim(),
            got: s.input_dim(),
        });
    }
    let points = s.distinct()?;
    let flips: Vec<(Bits, bool)> = points
        .iter()
        .map(|(x, y)| Ok((x.clone(), *y != teacher.evaluate(x)?.get(0))))
        .collect::<Result<_>>()?;
    let f = PartialFunction::new(s.input_dim(), flips)?;
    let memorizer = build_memorizer(&f, config)?;
    let network = gadgets::xor_compose(teacher, &memorizer.network)?;
    if empirical_errors(&network, s)? != 0 {
        return Err(Error::Internal(
            "interpolator misfits a training sample".into(),
        ));
    }
    Ok(InterpolatorReport {
        network,
        flips: f.ones(),
        points: f.len(),
        memorizer,
    })
}

/// Ensures the preprocessing map has exactly `width` outputs.
fn pad_map(map: AffineMap2, width: usize) -> AffineMap2 {
    if map.output_dim() == width {
        return map;
    }
    let d = map.input_dim();
    let mut rows = map.rows().to_vec();
    let mut offset = map.offset().to_bools();
    rows.resize(width, Bits::zeros(d));
    offset.resize(width, false);
    AffineMap2::new(d, rows, Bits::from_bools(&offset)).expect("shapes agree")
}

/// Adds `φ(Y_z)` over the word gates `w` and coordinate gates `z`.
fn generator_output(
    circuit: &mut Circuit,
    params: &HsgParams,
    gen: &KwiseGen,
    hash: &AffineHash,
    w_gates: &[GateId],
    z_gates: &[GateId],
) -> GateId {
    let level = w_gates
        .iter()
        .chain(z_gates)
        .map(|&g| circuit.level(g))
        .max()
        .unwrap_or(1);
    let z_hi: Vec<GateId> = z_gates.iter().map(|&g| circuit.lift(g, level)).collect();
    let w_hi: Vec<GateId> = w_gates.iter().map(|&g| circuit.lift(g, level)).collect();
    let vars = Vars::Gates { w: &w_hi, z: &z_hi };
    let structure = LinearStructure::new(gen, hash);
    let shift = params.log_q.trailing_zeros() as usize;
    let n = params.field_degree;

    let terms: Vec<Term> = gadgets::dyadic_terms(0, params.threshold + 1, params.log_q);
    let mut y_forms: BTreeMap<usize, Form> = BTreeMap::new();
    let mut term_forms = Vec::with_capacity(terms.len());
    for term in &terms {
        let mut lits = Vec::with_capacity(term.len());
        for &(i, v) in term {
            let y = y_forms.entry(i).or_insert_with(|| {
                let zprime: Vec<(u64, bool)> = (0..n)
                    .map(|b| {
                        if b < shift {
                            (0, (i >> b) & 1 == 1)
                        } else {
                            (1u64 << (b - shift), false)
                        }
                    })
                    .collect();
                let anf = structure.anf(&zprime);
                anf_form(circuit, &vars, &anf)
            });
            lits.push(if v { y.clone() } else { y.negated() });
        }
        term_forms.push(if lits.is_empty() {
            Form::constant(1)
        } else {
            Form::gate(circuit.and(&lits))
        });
    }
    let any_constant = term_forms.iter().any(|f| f.is_constant());
    if any_constant {
        return circuit.constant(true);
    }
    circuit.or(&term_forms)
}

/// Interval helper re-exported for callers that build lookups by hand.
pub fn block_interval(seed: &HsgSeed, i: usize) -> Interval {
    Interval {
        lo: seed.breakpoints[i],
        hi: seed.breakpoints[i + 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_prob_examples() {
        let empty = Conjunction::new(vec![]).unwrap();
        assert_eq!(conjunction_accept_prob(&empty, 0.3), 0.0);
        let half = Conjunction::new((0..8).map(|i| (i, i % 2 == 0)).collect()).unwrap();
        assert!((conjunction_accept_prob(&half, 0.5) + 8.0).abs() < 1e-12);
        let mixed = Conjunction::new((0..10).map(|i| (i, i < 3)).collect()).unwrap();
        let want = (0.3f64.powi(3) * 0.7f64.powi(7)).log2();
        assert!((conjunction_accept_prob(&mixed, 0.3) - want).abs() < 1e-12);
    }

    #[test]
    fn single_block_breakpoints() {
        let v = Conjunction::new(vec![(3, true), (9, false)]).unwrap();
        assert_eq!(choose_breakpoints(&v, 0.5, 1, 16), vec![0, 16]);
    }

    #[test]
    fn k1_is_constant_in_z() {
        let g = KwiseGen::with_seed(5, 1, 0).unwrap();
        let u = Bits::from_u64(0b10110, 5);
        for z in 0..32 {
            assert!(!kwise_output_bit(&g, &u, z).unwrap());
        }
    }

    #[test]
    fn seed_text_roundtrip() {
        let mut r = rng::stream(1, &[]);
        let hash = AffineHash::random(7, 9, &mut r).unwrap();
        let seed = HsgSeed {
            hash,
            words: vec![5, 0, 127, 3],
            breakpoints: vec![0, 3, 3, 9, 16],
        };
        assert_eq!(HsgSeed::from_text(&seed.to_text()).unwrap(), seed);
    }

    #[test]
    fn staircase_labels() {
        let f = staircase_parity(3);
        let labels: Vec<(String, bool)> = f
            .points()
            .iter()
            .map(|(x, y)| (x.to_string(), *y))
            .collect();
        assert_eq!(labels[0], ("111".to_string(), true));
        assert_eq!(labels[3], ("000".to_string(), false));
    }

    #[test]
    fn compiled_generator_matches_direct_evaluation() {
        for (n, k, a) in [
            (3usize, 3usize, 4usize),
            (4, 2, 3),
            (4, 3, 3),
            (3, 4, 3),
            (2, 1, 2),
        ] {
            let gen = KwiseGen::with_seed(n, k, 7).unwrap();
            let mut r = rng::stream(9, &[n as u64, k as u64]);
            let hash = AffineHash::random(a, gen.seed_len(), &mut r).unwrap();
            let net = kwise_compile(&gen, &hash).unwrap();
            for w in 0..1u128 << a {
                let coeffs = hash.coeffs(&gen, w);
                for z in 0..1u64 << n {
                    let x = Bits::from_u64(w as u64 | z << a, a + n);
                    let want = gen.bit(&coeffs, z);
                    assert_eq!(
                        net.evaluate(&x).unwrap().get(0),
                        want,
                        "n={n} k={k} w={w} z={z}"
                    );
                }
            }
        }
    }

    #[test]
    fn memorizes_small_functions() {
        let mut r = rng::stream(3, &[]);
        for trial in 0..6 {
            let d = 6;
            let n = 12;
            let mut xs: Vec<u64> = (0..1u64 << d).collect();
            use rand::seq::SliceRandom;
            xs.shuffle(&mut r);
            let points = xs[..n]
                .iter()
                .map(|&x| (Bits::from_u64(x, d), r.random::<bool>()))
                .collect();
            let f = PartialFunction::new(d, points).unwrap();
            let config = MemorizerConfig {
                seed: trial,
                ..Default::default()
            };
            let report = build_memorizer(&f, &config).unwrap();
            assert!(report.consistent);
            assert!(f.agrees(&report.network));
        }
    }

    #[test]
    fn constant_labels_give_constant_network() {
        let points = (0..4).map(|x| (Bits::from_u64(x, 3), true)).collect();
        let f = PartialFunction::new(3, points).unwrap();
        let report = build_memorizer(&f, &MemorizerConfig::default()).unwrap();
        assert!(report.constant);
        assert_eq!(report.dims(), &[3, 1]);
    }
}
