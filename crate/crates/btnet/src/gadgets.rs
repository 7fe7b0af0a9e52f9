//! Explicit threshold-network constructions: parity and affine layers, the XOR
//! gadget and XOR composition, interval-comparison DNFs, constant-on-intervals
//! lookups, lowering of integer-weight circuits, and injective preprocessing.

use std::collections::{BTreeSet, HashSet};

use rand::Rng as _;

use crate::affine::AffineMap2;
use crate::bits::Bits;
use crate::circuit::{Circuit, Form, GateId, LtCircuit, LtLayer};
use crate::error::{Error, Result};
use crate::network::{Layer, Network};
use crate::rng;

/// Default number of attempts for randomized searches.
pub const DEFAULT_RETRIES: usize = 64;

/// Constant `c` in the sign-matrix width `⌈c √d0 log2 N⌉`, chosen from the
/// calibration sweep in the integration tests.
pub const SIGN_WIDTH_FACTOR: f64 = 2.0;

/// One neuron of a hand-built layer: row over the inputs, scalar and bias.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Neuron {
    row: Bits,
    scale: i8,
    bias: i64,
}

impl Neuron {
    fn zero(d: usize) -> Self {
        Neuron {
            row: Bits::zeros(d),
            scale: 0,
            bias: 0,
        }
    }

    /// `1[γ s + b > 0]` with `s = row·x ∈ [0, popcount(row)]`, with constant
    /// neurons folded into `γ = 0`.
    fn new(row: Bits, scale: i8, bias: i64) -> Self {
        let hi = row.count_ones() as i64;
        let (a, b) = (bias, scale as i64 * hi + bias);
        let d = row.len();
        if a.max(b) <= 0 {
            Neuron::zero(d)
        } else if a.min(b) > 0 {
            Neuron {
                row: Bits::zeros(d),
                scale: 0,
                bias: 1,
            }
        } else {
            Neuron { row, scale, bias }
        }
    }
}

fn layer_from(neurons: &[Neuron], inputs: usize) -> Layer {
    let mut layer = Layer::zeros(neurons.len(), inputs, false);
    for (i, n) in neurons.iter().enumerate() {
        for j in 0..inputs {
            if n.row.get(j) {
                layer.set_weight(i, j, 1);
            }
        }
        layer.set_scale(i, n.scale);
        layer.set_bias(i, n.bias);
    }
    layer
}

/// Block of exactly `d + 2` neurons whose sum plus `offset` is
/// `parity(row·x ⊕ flip)` on a `d`-bit input.
///
/// With `s = row·x + flip ∈ [0, m]`, `Σ_{odd i ≤ m} (1[s ≥ i] + 1[s ≤ i])`
/// equals `⌈m/2⌉ + parity(s)`, since for odd `i` both indicators fire only when
/// `s = i`. The constant `flip` plays the role of a padded input fixed to 1.
fn parity_block(row: &Bits, flip: bool, d: usize) -> (Vec<Neuron>, i64) {
    let c = flip as i64;
    let m = d as i64 + c;
    let mut neurons = Vec::with_capacity(d + 2);
    for i in (1..=m).step_by(2) {
        // 1[s ≥ i] = 1[row·x + c − i + 1 > 0]
        neurons.push(Neuron::new(row.clone(), 1, c - i + 1));
        // 1[s ≤ i] = 1[−row·x − c + i + 1 > 0]
        neurons.push(Neuron::new(row.clone(), -1, i + 1 - c));
    }
    neurons.resize(d + 2, Neuron::zero(d));
    (neurons, -((m + 1) / 2))
}

/// The depth-one parity layer and its summation offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityLayer {
    pub layer: Layer,
    pub offset: i64,
}

impl ParityLayer {
    /// Completes the layer with the summing output neuron.
    pub fn to_network(&self) -> Network {
        let width = self.layer.outputs();
        let mut out = Layer::zeros(1, width, false);
        for j in 0..width {
            out.set_weight(0, j, 1);
        }
        out.set_scale(0, 1);
        out.set_bias(0, self.offset);
        Network::new(vec![self.layer.clone(), out]).expect("parity network is well formed")
    }
}

pub fn parity_network(d: usize) -> ParityLayer {
    let row = Bits::from_bools(&vec![true; d]);
    let (neurons, offset) = parity_block(&row, false, d);
    ParityLayer {
        layer: layer_from(&neurons, d),
        offset,
    }
}

/// Depth-two network computing `x ↦ A x + c (mod 2)` with hidden width
/// exactly `d′ (d + 2)`.
pub fn affine_network(map: &AffineMap2) -> Network {
    let (d, dout) = (map.input_dim(), map.output_dim());
    let mut hidden = Vec::with_capacity(dout * (d + 2));
    let mut offsets = Vec::with_capacity(dout);
    for (row, flip) in map.rows().iter().zip(map.offset().iter()) {
        let (block, off) = parity_block(row, flip, d);
        hidden.extend(block);
        offsets.push(off);
    }
    let width = hidden.len();
    let first = layer_from(&hidden, d);
    let mut out = Layer::zeros(dout, width, false);
    for (i, &off) in offsets.iter().enumerate() {
        for j in i * (d + 2)..(i + 1) * (d + 2) {
            out.set_weight(i, j, 1);
        }
        out.set_scale(i, 1);
        out.set_bias(i, off);
    }
    Network::new(vec![first, out]).expect("affine network is well formed")
}

/// Two inputs, hidden biases `(0, 2)` with scalars `(+1, −1)`, output bias −1.
pub fn xor_gadget() -> Network {
    let mut hidden = Layer::zeros(2, 2, false);
    for i in 0..2 {
        for j in 0..2 {
            hidden.set_weight(i, j, 1);
        }
    }
    hidden.set_scale(0, 1);
    hidden.set_bias(0, 0);
    hidden.set_scale(1, -1);
    hidden.set_bias(1, 2);
    let mut out = Layer::zeros(1, 2, false);
    out.set_weight(0, 0, 1);
    out.set_weight(0, 1, 1);
    out.set_scale(0, 1);
    out.set_bias(0, -1);
    Network::new(vec![hidden, out]).expect("xor gadget is well formed")
}

fn identity_layer() -> Layer {
    let mut l = Layer::zeros(1, 1, false);
    l.set_weight(0, 0, 1);
    l.set_scale(0, 1);
    l
}

/// Width-one identity on one bit, `depth` layers deep.
pub fn identity_chain(depth: usize) -> Result<Network> {
    if depth == 0 {
        return Err(Error::InvalidArgument(
            "identity chain needs depth ≥ 1".into(),
        ));
    }
    Network::new(vec![identity_layer(); depth])
}

/// Appends identity layers to a single-output network.
fn elongate(net: &Network, depth: usize) -> Vec<Layer> {
    let mut layers = net.layers().to_vec();
    layers.resize(depth, identity_layer());
    layers
}

/// `h1 ⊕ h2` on a shared input: both networks side by side (the shallower one
/// elongated by an identity chain) followed by the XOR gadget.
pub fn xor_compose(h1: &Network, h2: &Network) -> Result<Network> {
    if h1.input_dim() != h2.input_dim() {
        return Err(Error::Shape {
            expected: h1.input_dim(),
            got: h2.input_dim(),
        });
    }
    for h in [h1, h2] {
        if h.output_dim() != 1 {
            return Err(Error::Shape {
                expected: 1,
                got: h.output_dim(),
            });
        }
    }
    let depth = h1.depth().max(h2.depth());
    let (a, b) = (elongate(h1, depth), elongate(h2, depth));
    let ternary = h1.is_ternary_first() || h2.is_ternary_first();
    let mut layers = Vec::with_capacity(depth + 2);
    for l in 0..depth {
        let (la, lb) = (&a[l], &b[l]);
        let (ra, rb) = (la.outputs(), lb.outputs());
        // The first layer shares the input; later layers are block diagonal.
        let (inputs, col_b) = if l == 0 {
            (la.inputs(), 0)
        } else {
            (la.inputs() + lb.inputs(), la.inputs())
        };
        let mut layer = Layer::zeros(ra + rb, inputs, l == 0 && ternary);
        for (src, row_off, col_off) in [(la, 0, 0), (lb, ra, col_b)] {
            for i in 0..src.outputs() {
                for j in 0..src.inputs() {
                    let w = src.weight(i, j);
                    if w != 0 {
                        layer.set_weight(row_off + i, col_off + j, w);
                    }
                }
                layer.set_scale(row_off + i, src.scale(i));
                layer.set_bias(row_off + i, src.bias(i));
            }
        }
        layers.push(layer);
    }
    layers.extend(xor_gadget().into_layers());
    if h1.has_wide_bias() || h2.has_wide_bias() {
        Network::new_wide(layers)
    } else {
        Network::new(layers)
    }
}

/// Half-open interval `[lo, hi)` inside `[0, R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64, range: u64) -> Result<Self> {
        if lo > hi || hi > range {
            return Err(Error::InvalidArgument(format!(
                "interval [{lo}, {hi}) not inside [0, {range})"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, z: u64) -> bool {
        self.lo <= z && z < self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }
}

/// A conjunction of literals `z_i = v`, sorted by bit index.
pub type Term = Vec<(usize, bool)>;

/// Terms covering `[lo, hi)` over `bits`-bit integers (bit `i` weighs `2^i`).
///
/// The interval is split greedily into aligned dyadic blocks `[v, v + 2^k)`;
/// each block is the conjunction fixing bits `k..bits` to those of `v`. At most
/// `2 bits` blocks are needed.
pub fn dyadic_terms(lo: u128, hi: u128, bits: usize) -> Vec<Term> {
    let mut terms = Vec::new();
    let mut v = lo;
    while v < hi {
        let mut k = if v == 0 {
            bits
        } else {
            (v.trailing_zeros() as usize).min(bits)
        };
        while v + (1u128 << k) > hi {
            k -= 1;
        }
        terms.push((k..bits).map(|j| (j, (v >> j) & 1 == 1)).collect());
        v += 1u128 << k;
    }
    terms
}

/// Terms of a DNF for membership in `interval` over `bits`-bit integers.
pub fn interval_terms(interval: Interval, bits: usize) -> Vec<Term> {
    dyadic_terms(interval.lo as u128, interval.hi as u128, bits)
}

/// Depth-two AND/OR circuit for the indicator of `interval` on `log2 R` bits.
pub fn comparison_dnf(interval: Interval, range: u64) -> Result<LtCircuit> {
    if !range.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "R = {range} is not a power of two"
        )));
    }
    Interval::new(interval.lo, interval.hi, range)?;
    let bits = range.trailing_zeros() as usize;
    let terms = interval_terms(interval, bits);
    let mut and = LtLayer {
        weights: Vec::new(),
        thresholds: Vec::new(),
    };
    for t in &terms {
        let mut row = vec![0i64; bits];
        let mut pos = 0;
        for &(i, v) in t {
            row[i] = if v { 1 } else { -1 };
            pos += v as i64;
        }
        and.weights.push(row);
        and.thresholds.push(pos);
    }
    if terms.is_empty() {
        and.weights.push(vec![0; bits]);
        and.thresholds.push(1);
    }
    let or = LtLayer {
        weights: vec![vec![1; and.weights.len()]],
        thresholds: vec![1],
    };
    LtCircuit::new(bits, vec![and, or])
}

/// Declared term-count bound `c log² R` with `c = 2` (at least one term).
pub const DNF_TERM_FACTOR: usize = 2;

pub fn dnf_term_bound(log_range: usize) -> usize {
    (DNF_TERM_FACTOR * log_range * log_range).max(1)
}

/// Adds an AND gate per DNF term over materialized bit gates.
fn term_gate(circuit: &mut Circuit, bits: &[GateId], term: &Term) -> GateId {
    let forms: Vec<Form> = term
        .iter()
        .map(|&(i, v)| {
            if v {
                Form::gate(bits[i])
            } else {
                Form::not(bits[i])
            }
        })
        .collect();
    if forms.is_empty() {
        // The always-true term, one level above the bits.
        let level = bits.iter().map(|&g| circuit.level(g)).max().unwrap_or(1) + 1;
        return circuit.positive_at(&Form::constant(1), level.max(2));
    }
    circuit.and(&forms)
}

/// Breakpoints `0 = ℓ_0 ≤ … ≤ ℓ_T = R` and one `a`-bit word per interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LookupTable {
    pub breakpoints: Vec<u64>,
    pub words: Vec<Bits>,
}

impl LookupTable {
    pub fn validate(&self, range: u64) -> Result<()> {
        let t = self.words.len();
        if !t.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "T = {t} is not a power of two"
            )));
        }
        if self.breakpoints.len() != t + 1
            || self.breakpoints[0] != 0
            || self.breakpoints[t] != range
            || self.breakpoints.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidArgument(format!(
                "breakpoints {:?} must rise from 0 to {range}",
                self.breakpoints
            )));
        }
        let a = self.words[0].len();
        if self.words.iter().any(|w| w.len() != a) {
            return Err(Error::InvalidArgument(
                "table words differ in length".into(),
            ));
        }
        Ok(())
    }

    pub fn word_len(&self) -> usize {
        self.words[0].len()
    }

    /// Direct lookup by scanning the breakpoints.
    pub fn lookup(&self, z: u64) -> &Bits {
        let j = self
            .breakpoints
            .windows(2)
            .position(|w| w[0] <= z && z < w[1]);
        &self.words[j.expect("z lies below R")]
    }
}

/// Adds the lookup stages on top of materialized `z` bit gates and returns
/// the output word gates `g(z)`; the result sits four levels above `z`.
pub fn lookup_gates(circuit: &mut Circuit, z_bits: &[GateId], table: &LookupTable) -> Vec<GateId> {
    let t = table.words.len();
    let log_t = t.trailing_zeros() as usize;
    let bits = z_bits.len();
    let base = z_bits.iter().map(|&g| circuit.level(g)).max().unwrap_or(1);
    let intervals: Vec<Interval> = table
        .breakpoints
        .windows(2)
        .map(|w| Interval { lo: w[0], hi: w[1] })
        .collect();
    // Bits of the interval index j*, each an OR over the terms of its intervals.
    let mut index_bits = Vec::with_capacity(log_t);
    for b in 0..log_t {
        let mut terms = BTreeSet::new();
        for (j, iv) in intervals.iter().enumerate() {
            if (j >> b) & 1 == 1 {
                terms.extend(interval_terms(*iv, bits));
            }
        }
        let gates: Vec<Form> = terms
            .iter()
            .map(|term| {
                let g = term_gate(circuit, z_bits, term);
                Form::gate(circuit.lift(g, base + 1))
            })
            .collect();
        let g = circuit.positive_at(&Form::sum(&gates), base + 2);
        index_bits.push(g);
    }
    // Indicators j* = j for nonempty intervals.
    let mut selected = Vec::with_capacity(t);
    for (j, iv) in intervals.iter().enumerate() {
        if iv.is_empty() {
            continue;
        }
        let forms: Vec<Form> = (0..log_t)
            .map(|b| {
                if (j >> b) & 1 == 1 {
                    Form::gate(index_bits[b])
                } else {
                    Form::not(index_bits[b])
                }
            })
            .collect();
        let mut f = Form::sum(&forms);
        f.add_const(1 - log_t as i64);
        selected.push((j, circuit.positive_at(&f, base + 3)));
    }
    (0..table.word_len())
        .map(|b| {
            let forms: Vec<Form> = selected
                .iter()
                .filter(|&&(j, _)| table.words[j].get(b))
                .map(|&(_, g)| Form::gate(g))
                .collect();
            circuit.positive_at(&Form::sum(&forms), base + 4)
        })
        .collect()
}

/// Level-2 gates materializing the bits of `map(x)`.
pub fn affine_bits(circuit: &mut Circuit, map: &AffineMap2) -> Vec<GateId> {
    map.rows()
        .iter()
        .zip(map.offset().iter())
        .map(|(row, flip)| {
            let f = circuit.parity_of_inputs(row, flip);
            circuit.positive_at(&f, 2)
        })
        .collect()
}

/// Depth-6 network computing `x ↦ (g(C0(x)), C0(x))` where `g` is constant on
/// each interval `[ℓ_j, ℓ_(j+1))`.
pub fn interval_lookup_network(table: &LookupTable, map: &AffineMap2) -> Result<Network> {
    let bits = map.output_dim();
    if bits >= 64 {
        return Err(Error::InvalidArgument("log R must be below 64".into()));
    }
    table.validate(1u64 << bits)?;
    let mut circuit = Circuit::new(map.input_dim(), false);
    let z = affine_bits(&mut circuit, map);
    let mut outs = lookup_gates(&mut circuit, &z, table);
    outs.extend(z);
    let outs: Vec<GateId> = outs.into_iter().map(|g| circuit.lift(g, 6)).collect();
    circuit.build(&outs)
}

/// `c1 ∘ c0` as a network of depth `depth(c1) + 1`.
pub fn lt_to_btn(c0: &AffineMap2, c1: &LtCircuit) -> Result<Network> {
    if c0.output_dim() != c1.input_dim() {
        return Err(Error::Shape {
            expected: c1.input_dim(),
            got: c0.output_dim(),
        });
    }
    let mut circuit = Circuit::new(c0.input_dim(), false);
    let z: Vec<Form> = c0
        .rows()
        .iter()
        .zip(c0.offset().iter())
        .map(|(row, flip)| circuit.parity_of_inputs(row, flip))
        .collect();
    let outs = c1.compile_into(&mut circuit, &z);
    let depth = c1.depth() + 1;
    let outs: Vec<GateId> = outs.into_iter().map(|g| circuit.lift(g, depth)).collect();
    circuit.build(&outs)
}

/// `2 ⌈log2 N⌉`.
pub fn hashed_width(n: usize) -> usize {
    2 * ceil_log2(n)
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn injective_on<T: Eq + std::hash::Hash>(images: impl Iterator<Item = T>, n: usize) -> bool {
    let mut seen = HashSet::with_capacity(n);
    images.into_iter().all(|v| seen.insert(v))
}

/// A linear map into `2⌈log2 N⌉` bits that is injective on `domain`.
///
/// When the target is at least as wide as the input the zero-padded identity
/// is returned; otherwise random matrices are drawn from per-attempt streams.
pub fn find_injective_linear(domain: &[Bits], seed: u64, retries: usize) -> Result<AffineMap2> {
    let d = domain.first().map_or(0, Bits::len);
    let width = hashed_width(domain.len());
    if width >= d {
        let rows = (0..width)
            .map(|i| {
                let mut r = Bits::zeros(d);
                if i < d {
                    r.set(i, true);
                }
                r
            })
            .collect();
        return AffineMap2::new(d, rows, Bits::zeros(width));
    }
    for attempt in 0..retries {
        let mut r = rng::stream(seed, &[0x11, attempt as u64]);
        let map = AffineMap2::random(d, width, false, &mut r);
        if injective_on(domain.iter().map(|x| map.apply(x)), domain.len()) {
            return Ok(map);
        }
    }
    Err(Error::SearchBudget(format!(
        "no injective linear map into {width} bits after {retries} attempts"
    )))
}

/// First layer `x ↦ 1[W x > 0]` with `W ∈ {±1}` that is injective on a domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignMatrix {
    pub layer: Layer,
}

impl SignMatrix {
    pub fn apply(&self, x: &Bits) -> Bits {
        self.layer.apply(x)
    }

    pub fn width(&self) -> usize {
        self.layer.outputs()
    }
}

/// Width `⌈c √d0 log2 N⌉`, at least one.
pub fn sign_width(d0: usize, n: usize, factor: f64) -> usize {
    let log_n = (n.max(2) as f64).log2();
    ((factor * (d0 as f64).sqrt() * log_n).ceil() as usize).max(1)
}

pub fn find_sign_matrix(
    domain: &[Bits],
    seed: u64,
    factor: f64,
    retries: usize,
) -> Result<SignMatrix> {
    let d = domain.first().map_or(0, Bits::len);
    let width = sign_width(d, domain.len(), factor);
    for attempt in 0..retries {
        let mut r = rng::stream(seed, &[0x51, attempt as u64]);
        let mut layer = Layer::zeros(width, d, true);
        for i in 0..width {
            for j in 0..d {
                layer.set_weight(i, j, if r.random::<bool>() { 1 } else { -1 });
            }
            layer.set_scale(i, 1);
        }
        let m = SignMatrix { layer };
        if injective_on(domain.iter().map(|x| m.apply(x)), domain.len()) {
            return Ok(m);
        }
    }
    Err(Error::SearchBudget(format!(
        "no injective sign matrix of width {width} after {retries} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Mode;

    #[test]
    fn parity_offsets() {
        assert_eq!(parity_network(3).offset, -2);
        let id = parity_network(1).to_network();
        assert!(!id.eval_bit(0) && id.eval_bit(1));
        assert_eq!(parity_network(5).layer.outputs(), 7);
    }

    #[test]
    fn xor_truth_table() {
        let t = xor_gadget().output_table(Mode::Sequential).unwrap();
        assert_eq!(t, vec![false, true, true, false]);
    }

    #[test]
    fn interval_examples() {
        let c = comparison_dnf(Interval { lo: 2, hi: 5 }, 8).unwrap();
        let at = |z: u64| c.evaluate(&Bits::from_u64(z, 3)).unwrap().get(0);
        assert!(at(4) && !at(5) && !at(1));
        let all = comparison_dnf(Interval { lo: 0, hi: 8 }, 8).unwrap();
        assert!((0..8).all(|z| all.evaluate(&Bits::from_u64(z, 3)).unwrap().get(0)));
        let first = comparison_dnf(Interval { lo: 0, hi: 1 }, 8).unwrap();
        assert!((0..8).all(|z| first.evaluate(&Bits::from_u64(z, 3)).unwrap().get(0) == (z == 0)));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(
            [1, 2, 3, 4, 5, 32, 33].map(ceil_log2),
            [0, 1, 2, 2, 3, 5, 6]
        );
    }

    #[test]
    fn single_point_maps() {
        let x = [Bits::parse("1011").unwrap()];
        let m = find_injective_linear(&x, 0, 4).unwrap();
        assert_eq!(m.output_dim(), 0);
        let s = find_sign_matrix(&x, 0, 1.0, 4).unwrap();
        assert_eq!(s.width(), 2);
    }
}
