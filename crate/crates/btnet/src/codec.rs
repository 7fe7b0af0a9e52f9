//! Description-length codec for networks.
//!
//! Hidden neurons are first put in a canonical order, sorted by
//! `(bias, scale)`. Each layer then costs one bit per weight plus either a
//! per-neuron list of biases and scales (narrowing layers, and always the
//! output layer) or a multiplicity table over all `(bias, scale)` pairs
//! (widening layers), whichever the layer shape selects.
//!
//! Stream layout, most significant bit first:
//!
//! ```text
//! version:4  depth_known:1  ternary:1  wide:1
//! gamma(w + 1)  [gamma(L) unless depth is known]
//! d_0 … d_L, each in ⌈log2(w + 1)⌉ bits
//! per layer: weights (2 bits each in a ternary first layer),
//!            then biases/scales in the branch chosen by d_l < d_(l−1)
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{bias_range, Layer, Network};

pub const VERSION: u8 = 1;

/// Calibrated constants of the length bound `w + c·√w·log2(w+2) + c0`.
pub const BOUND_C: f64 = 12.0;
pub const BOUND_C0: f64 = 64.0;

/// Cap on individualization leaves during canonicalization.
const LEAF_CAP: usize = 256;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    /// `v` in exactly `width` bits, most significant first.
    pub fn write(&mut self, v: u64, width: usize) {
        debug_assert!(
            width >= 64 || v >> width == 0,
            "{v} does not fit in {width} bits"
        );
        for k in (0..width).rev() {
            self.bits.push((v >> k) & 1 == 1);
        }
    }

    /// Elias gamma code of `v ≥ 1`.
    pub fn gamma(&mut self, v: u64) {
        assert!(v >= 1, "gamma code needs a positive value");
        let len = 64 - v.leading_zeros() as usize;
        self.write(0, len - 1);
        self.write(v, len);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }
}

pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        BitReader { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    fn malformed(&self, msg: &str) -> Error {
        Error::Malformed {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    pub fn bit(&mut self) -> Result<bool> {
        let b = *self
            .bits
            .get(self.pos)
            .ok_or_else(|| self.malformed("unexpected end of stream"))?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read(&mut self, width: usize) -> Result<u64> {
        if width > 64 {
            return Err(self.malformed("field wider than 64 bits"));
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.bit()? as u64;
        }
        Ok(v)
    }

    pub fn gamma(&mut self) -> Result<u64> {
        let mut zeros = 0;
        while !self.bit()? {
            zeros += 1;
            if zeros >= 64 {
                return Err(self.malformed("gamma code too long"));
            }
        }
        let rest = self.read(zeros)?;
        Ok((1u64 << zeros) | rest)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

/// Bits needed to write any value in `0..n`.
pub fn width_for(n: u64) -> usize {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as usize
    }
}

// ---- canonical order ----

/// `(neighbor index or color, weight)` pairs.
type Edges = Vec<(usize, i8)>;

struct Graph {
    /// `ins[l][i]`: nonzero incoming weights of neuron `i` in layer `l+1`.
    ins: Vec<Vec<Vec<(usize, i8)>>>,
    /// `outs[l][i]`: nonzero outgoing weights of neuron `i` in layer `l+1`.
    outs: Vec<Vec<Vec<(usize, i8)>>>,
    keys: Vec<Vec<(i64, i8)>>,
}

impl Graph {
    fn new(net: &Network) -> Self {
        let depth = net.depth();
        let mut ins = Vec::with_capacity(depth);
        let mut outs: Vec<Vec<Vec<(usize, i8)>>> = net.dims()[1..]
            .iter()
            .map(|&d| vec![Vec::new(); d])
            .collect();
        let mut keys = Vec::with_capacity(depth);
        for (l, layer) in net.layers().iter().enumerate() {
            let mut rows = Vec::with_capacity(layer.outputs());
            for i in 0..layer.outputs() {
                let row: Vec<(usize, i8)> = (0..layer.inputs())
                    .map(|j| (j, layer.weight(i, j)))
                    .filter(|&(_, w)| w != 0)
                    .collect();
                if l > 0 {
                    for &(j, w) in &row {
                        outs[l - 1][j].push((i, w));
                    }
                }
                rows.push(row);
            }
            ins.push(rows);
            keys.push(
                (0..layer.outputs())
                    .map(|i| (layer.bias(i), layer.scale(i)))
                    .collect(),
            );
        }
        Graph { ins, outs, keys }
    }

    fn hidden(&self) -> usize {
        self.ins.len() - 1
    }

    fn initial_colors(&self) -> Vec<Vec<usize>> {
        (0..self.hidden()).map(|l| ranks(&self.keys[l])).collect()
    }

    /// Color refinement until the partition is stable.
    fn refine(&self, mut colors: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
        let h = self.hidden();
        let classes = |c: &Vec<Vec<usize>>| {
            c.iter()
                .map(|v| v.iter().max().map_or(0, |m| m + 1))
                .sum::<usize>()
        };
        loop {
            let before = classes(&colors);
            let mut next = Vec::with_capacity(h);
            for l in 0..h {
                let sigs: Vec<(usize, Edges, Edges)> = (0..colors[l].len())
                    .map(|i| {
                        let mut inn: Vec<(usize, i8)> = self.ins[l][i]
                            .iter()
                            .map(|&(j, w)| (if l == 0 { j } else { colors[l - 1][j] }, w))
                            .collect();
                        inn.sort_unstable();
                        let mut out: Vec<(usize, i8)> = self.outs[l][i]
                            .iter()
                            .map(|&(k, w)| (if l + 1 == h { k } else { colors[l + 1][k] }, w))
                            .collect();
                        out.sort_unstable();
                        (colors[l][i], inn, out)
                    })
                    .collect();
                next.push(ranks(&sigs));
            }
            colors = next;
            if classes(&colors) == before {
                return colors;
            }
        }
    }

    fn twins(&self, l: usize, a: usize, b: usize) -> bool {
        self.keys[l][a] == self.keys[l][b]
            && self.ins[l][a] == self.ins[l][b]
            && self.outs[l][a] == self.outs[l][b]
    }
}

fn ranks<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items
        .iter()
        .map(|x| sorted.binary_search(x).expect("present"))
        .collect()
}

fn first_split(colors: &[Vec<usize>]) -> Option<(usize, Vec<usize>)> {
    for (l, c) in colors.iter().enumerate() {
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &k) in c.iter().enumerate() {
            members.entry(k).or_default().push(i);
        }
        if let Some(class) = members.into_values().find(|m| m.len() > 1) {
            return Some((l, class));
        }
    }
    None
}

fn individualize(colors: &[Vec<usize>], l: usize, v: usize) -> Vec<Vec<usize>> {
    let mut out = colors.to_vec();
    let keyed: Vec<(usize, bool)> = colors[l]
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i != v))
        .collect();
    out[l] = ranks(&keyed);
    out
}

fn apply_order(net: &Network, colors: &[Vec<usize>]) -> Result<Network> {
    let mut out = net.clone();
    for (l, c) in colors.iter().enumerate() {
        let mut perm: Vec<usize> = (0..c.len()).collect();
        perm.sort_by_key(|&i| (c[i], i));
        out = out.permute_hidden(l + 1, &perm)?;
    }
    Ok(out)
}

struct Search<'a> {
    net: &'a Network,
    graph: Graph,
    leaves: usize,
    best: Option<(Vec<bool>, Network)>,
}

impl Search<'_> {
    fn run(&mut self, colors: Vec<Vec<usize>>) -> Result<()> {
        let colors = self.graph.refine(colors);
        let Some((l, class)) = first_split(&colors) else {
            self.leaves += 1;
            let cand = apply_order(self.net, &colors)?;
            let bits = encode_layers(&cand, true);
            if self.best.as_ref().is_none_or(|(b, _)| bits < *b) {
                self.best = Some((bits, cand));
            }
            return Ok(());
        };
        let all_twins = class.iter().all(|&i| self.graph.twins(l, class[0], i));
        for (n, &v) in class.iter().enumerate() {
            if n > 0 && (all_twins || self.leaves >= LEAF_CAP) {
                break;
            }
            self.run(individualize(&colors, l, v))?;
        }
        Ok(())
    }
}

/// Reorders hidden neurons into canonical order. Every layer ends up sorted
/// by `(bias, scale)`; ties are resolved by color refinement and, where that
/// is not enough, by picking the smallest encoding over individualizations.
pub fn canonicalize(net: &Network) -> Result<Network> {
    if net.depth() < 2 {
        return Ok(net.clone());
    }
    let graph = Graph::new(net);
    let start = graph.initial_colors();
    let mut search = Search {
        net,
        graph,
        leaves: 0,
        best: None,
    };
    search.run(start)?;
    Ok(search.best.expect("at least one leaf").1)
}

/// True when every hidden layer is sorted by `(bias, scale)`.
pub fn is_canonical_order(net: &Network) -> bool {
    net.layers()[..net.depth() - 1].iter().all(|l| {
        (1..l.outputs()).all(|i| (l.bias(i - 1), l.scale(i - 1)) <= (l.bias(i), l.scale(i)))
    })
}

// ---- encoding ----

fn scale_code(g: i8) -> u64 {
    (g + 1) as u64
}

fn layer_payload(w: &mut BitWriter, layer: &Layer, is_output: bool, wide: bool) {
    let (d_in, d_out) = (layer.inputs(), layer.outputs());
    let ternary = layer.is_ternary();
    for i in 0..d_out {
        for j in 0..d_in {
            match (ternary, layer.weight(i, j)) {
                (false, v) => w.push(v == 1),
                (true, 0) => w.write(0b00, 2),
                (true, 1) => w.write(0b01, 2),
                (true, _) => w.write(0b11, 2),
            }
        }
    }
    let (lo, hi) = bias_range(d_in, wide);
    let span = (hi - lo + 1) as u64;
    if is_output || d_out < d_in {
        let bw = width_for(span);
        for i in 0..d_out {
            w.write((layer.bias(i) - lo) as u64, bw);
            w.write(scale_code(layer.scale(i)), 2);
        }
    } else {
        let mut counts: BTreeMap<(i64, i8), u64> = BTreeMap::new();
        for i in 0..d_out {
            *counts.entry((layer.bias(i), layer.scale(i))).or_insert(0) += 1;
        }
        let mw = width_for(d_out as u64 + 1);
        for b in lo..=hi {
            for g in [-1i8, 0, 1] {
                w.write(counts.get(&(b, g)).copied().unwrap_or(0), mw);
            }
        }
    }
}

fn encode_layers(net: &Network, depth_known: bool) -> Vec<bool> {
    let mut w = BitWriter::new();
    let weights = net.size().weights as u64;
    w.write(VERSION as u64, 4);
    w.push(depth_known);
    w.push(net.is_ternary_first());
    w.push(net.has_wide_bias());
    w.gamma(weights + 1);
    if !depth_known {
        w.gamma(net.depth() as u64);
    }
    let dw = width_for(weights + 1);
    for &d in net.dims() {
        w.write(d as u64, dw);
    }
    let depth = net.depth();
    for (l, layer) in net.layers().iter().enumerate() {
        layer_payload(&mut w, layer, l + 1 == depth, net.has_wide_bias());
    }
    w.into_bits()
}

/// Bit encoding of a canonical network.
pub fn encode(net: &Network, depth_known: bool) -> Result<Vec<bool>> {
    if !is_canonical_order(net) {
        return Err(Error::InvalidArgument(
            "encode needs a canonical network; call canonicalize first".into(),
        ));
    }
    Ok(encode_layers(net, depth_known))
}

/// Inverse of [`encode`]; `depth` must be supplied iff it was omitted.
pub fn decode(bits: &[bool], depth: Option<usize>) -> Result<Network> {
    let mut r = BitReader::new(bits);
    let version = r.read(4)?;
    if version != VERSION as u64 {
        return Err(Error::Malformed {
            offset: 0,
            msg: format!("unsupported version {version}"),
        });
    }
    let depth_known = r.bit()?;
    let ternary = r.bit()?;
    let wide = r.bit()?;
    let weights = r.gamma()? - 1;
    if weights > r.remaining() as u64 {
        return Err(Error::Malformed {
            offset: r.position(),
            msg: format!("stream too short for {weights} weights"),
        });
    }
    let depth = match (depth_known, depth) {
        (true, Some(l)) => l,
        (true, None) => {
            return Err(Error::Malformed {
                offset: r.position(),
                msg: "stream omits the depth but none was supplied".into(),
            })
        }
        (false, _) => r.gamma()? as usize,
    };
    if depth == 0 || depth > weights as usize {
        return Err(Error::Malformed {
            offset: r.position(),
            msg: format!("depth {depth} is impossible for {weights} weights"),
        });
    }
    let dw = width_for(weights + 1);
    let mut dims = Vec::with_capacity(depth + 1);
    for _ in 0..=depth {
        let at = r.position();
        let d = r.read(dw)? as usize;
        if d == 0 {
            return Err(Error::Malformed {
                offset: at,
                msg: "zero width".into(),
            });
        }
        dims.push(d);
    }
    if crate::network::size_stats(&dims).weights as u64 != weights {
        return Err(Error::Malformed {
            offset: r.position(),
            msg: "dims disagree with the weight count".into(),
        });
    }
    let mut layers = Vec::with_capacity(depth);
    for l in 0..depth {
        let (d_in, d_out) = (dims[l], dims[l + 1]);
        let tern = ternary && l == 0;
        let mut layer = Layer::zeros(d_out, d_in, tern);
        for i in 0..d_out {
            for j in 0..d_in {
                let v = if tern {
                    let at = r.position();
                    match r.read(2)? {
                        0b00 => 0,
                        0b01 => 1,
                        0b11 => -1,
                        _ => {
                            return Err(Error::Malformed {
                                offset: at,
                                msg: "bad ternary weight".into(),
                            })
                        }
                    }
                } else {
                    r.bit()? as i8
                };
                layer.set_weight(i, j, v);
            }
        }
        let (lo, hi) = bias_range(d_in, wide);
        let span = (hi - lo + 1) as u64;
        let read_scale = |r: &mut BitReader| -> Result<i8> {
            let at = r.position();
            match r.read(2)? {
                c @ 0..=2 => Ok(c as i8 - 1),
                _ => Err(Error::Malformed {
                    offset: at,
                    msg: "bad scale code".into(),
                }),
            }
        };
        if l + 1 == depth || d_out < d_in {
            let bw = width_for(span);
            for i in 0..d_out {
                let at = r.position();
                let b = r.read(bw)?;
                if b >= span {
                    return Err(Error::Malformed {
                        offset: at,
                        msg: "bias out of range".into(),
                    });
                }
                layer.set_bias(i, lo + b as i64);
                layer.set_scale(i, read_scale(&mut r)?);
            }
        } else {
            let mw = width_for(d_out as u64 + 1);
            let mut i = 0;
            for b in lo..=hi {
                for g in [-1i8, 0, 1] {
                    let at = r.position();
                    let count = r.read(mw)? as usize;
                    if i + count > d_out {
                        return Err(Error::Malformed {
                            offset: at,
                            msg: "multiplicities exceed the width".into(),
                        });
                    }
                    for _ in 0..count {
                        layer.set_bias(i, b);
                        layer.set_scale(i, g);
                        i += 1;
                    }
                }
            }
            if i != d_out {
                return Err(Error::Malformed {
                    offset: r.position(),
                    msg: "multiplicities do not cover the width".into(),
                });
            }
        }
        layers.push(layer);
    }
    if r.remaining() != 0 {
        return Err(Error::Malformed {
            offset: r.position(),
            msg: "trailing bits".into(),
        });
    }
    if wide {
        Network::new_wide(layers)
    } else {
        Network::new(layers)
    }
}

/// Bytes of a `.btnbits` file: MSB-first payload, zero padding, and a final
/// 3-bit field holding the pad length.
pub fn to_bytes(bits: &[bool]) -> Vec<u8> {
    let pad = (8 - (bits.len() + 3) % 8) % 8;
    let mut all: Vec<bool> = bits.to_vec();
    all.extend(std::iter::repeat_n(false, pad));
    all.extend((0..3).rev().map(|k| (pad >> k) & 1 == 1));
    all.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect()
}

pub fn from_bytes(bytes: &[u8]) -> Result<Vec<bool>> {
    let bits: Vec<bool> = bytes
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |k| (b >> k) & 1 == 1))
        .collect();
    if bits.len() < 8 {
        return Err(Error::Malformed {
            offset: bits.len(),
            msg: "file shorter than one byte".into(),
        });
    }
    let n = bits.len();
    let pad = bits[n - 3..]
        .iter()
        .fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let Some(payload) = (n - 3).checked_sub(pad) else {
        return Err(Error::Malformed {
            offset: n - 3,
            msg: format!("pad length {pad} exceeds the file"),
        });
    };
    if bits[payload..n - 3].iter().any(|&b| b) {
        return Err(Error::Malformed {
            offset: payload,
            msg: "nonzero padding".into(),
        });
    }
    Ok(bits[..payload].to_vec())
}

/// Measured length against `w + c·√w·log2(w+2) + c0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthCheck {
    pub bits: usize,
    pub weights: usize,
    pub bound: f64,
}

impl LengthCheck {
    pub fn within(&self) -> bool {
        self.bits as f64 <= self.bound
    }
}

pub fn length_bound(weights: usize) -> f64 {
    let w = weights as f64;
    w + BOUND_C * w.sqrt() * (w + 2.0).log2() + BOUND_C0
}

pub fn length_bound_check(net: &Network) -> Result<LengthCheck> {
    let canon = canonicalize(net)?;
    let bits = encode(&canon, false)?.len();
    let weights = net.size().weights;
    Ok(LengthCheck {
        bits,
        weights,
        bound: length_bound(weights),
    })
}
