//! Layered binary threshold networks.
//!
//! Layer `l` maps `h ↦ 1[γ ⊙ (W h) + b > 0]` with a strict inequality. Weights
//! are binary, except that the first layer may be ternary. Biases live in
//! `{-d+1, …, d}` where `d` is the fan-in (or `{-2d+1, …, 2d}` for networks
//! produced by converting outgoing-scaled networks), and scalars in `{-1, 0, 1}`.

use crate::bits::{words_for, Bits};
use crate::error::{Error, Result};
use crate::exec::{self, Mode};

/// Largest input width for which whole truth tables are materialized.
pub const MAX_TABLE_INPUTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Layer {
    inputs: usize,
    outputs: usize,
    stride: usize,
    plus: Vec<u64>,
    /// Mask of `-1` entries; empty for binary layers.
    minus: Vec<u64>,
    bias: Vec<i64>,
    scale: Vec<i8>,
}

impl Layer {
    pub fn zeros(outputs: usize, inputs: usize, ternary: bool) -> Self {
        let stride = words_for(inputs);
        Layer {
            inputs,
            outputs,
            stride,
            plus: vec![0; outputs * stride],
            minus: if ternary {
                vec![0; outputs * stride]
            } else {
                Vec::new()
            },
            bias: vec![0; outputs],
            scale: vec![0; outputs],
        }
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn is_ternary(&self) -> bool {
        !self.minus.is_empty()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> i8 {
        let (w, m) = (i * self.stride + (j >> 6), 1u64 << (j & 63));
        if self.plus[w] & m != 0 {
            1
        } else if self.is_ternary() && self.minus[w] & m != 0 {
            -1
        } else {
            0
        }
    }

    /// Sets `W[i][j]`. Panics on `-1` for a binary layer.
    pub fn set_weight(&mut self, i: usize, j: usize, v: i8) {
        let (w, m) = (i * self.stride + (j >> 6), 1u64 << (j & 63));
        self.plus[w] &= !m;
        if self.is_ternary() {
            self.minus[w] &= !m;
        }
        match v {
            1 => self.plus[w] |= m,
            0 => {}
            -1 => {
                assert!(self.is_ternary(), "-1 weight in a binary layer");
                self.minus[w] |= m;
            }
            _ => panic!("weight {v} outside {{-1,0,1}}"),
        }
    }

    pub fn bias(&self, i: usize) -> i64 {
        self.bias[i]
    }

    pub fn set_bias(&mut self, i: usize, b: i64) {
        self.bias[i] = b;
    }

    pub fn scale(&self, i: usize) -> i8 {
        self.scale[i]
    }

    pub fn set_scale(&mut self, i: usize, g: i8) {
        self.scale[i] = g;
    }

    pub fn biases(&self) -> &[i64] {
        &self.bias
    }

    pub fn scales(&self) -> &[i8] {
        &self.scale
    }

    pub fn row_plus(&self, i: usize) -> &[u64] {
        &self.plus[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_minus(&self, i: usize) -> Option<&[u64]> {
        self.is_ternary()
            .then(|| &self.minus[i * self.stride..(i + 1) * self.stride])
    }

    /// Number of `+1` and `-1` entries in row `i`.
    pub fn row_counts(&self, i: usize) -> (usize, usize) {
        let p = self
            .row_plus(i)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum();
        let n = self
            .row_minus(i)
            .map_or(0, |r| r.iter().map(|w| w.count_ones() as usize).sum());
        (p, n)
    }

    #[inline]
    fn dot(&self, i: usize, x: &[u64]) -> i64 {
        let row = self.row_plus(i);
        let mut s: i64 = row
            .iter()
            .zip(x)
            .map(|(a, b)| (a & b).count_ones() as i64)
            .sum();
        if let Some(neg) = self.row_minus(i) {
            s -= neg
                .iter()
                .zip(x)
                .map(|(a, b)| (a & b).count_ones() as i64)
                .sum::<i64>();
        }
        s
    }

    /// Pre-activation `γ_i (W_i · x) + b_i`.
    pub fn preactivation(&self, i: usize, x: &Bits) -> i64 {
        self.scale[i] as i64 * self.dot(i, x.words()) + self.bias[i]
    }

    /// One layer map on an input of the right width.
    pub fn apply(&self, x: &Bits) -> Bits {
        debug_assert_eq!(x.len(), self.inputs);
        let mut out = Bits::zeros(self.outputs);
        for i in 0..self.outputs {
            if self.preactivation(i, x) > 0 {
                out.set(i, true);
            }
        }
        out
    }

    /// Reorders rows (neurons) so that new row `k` is old row `perm[k]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Layer {
        let mut out = Layer::zeros(self.outputs, self.inputs, self.is_ternary());
        for (k, &src) in perm.iter().enumerate() {
            out.plus[k * self.stride..(k + 1) * self.stride].copy_from_slice(self.row_plus(src));
            if let Some(m) = self.row_minus(src) {
                out.minus[k * self.stride..(k + 1) * self.stride].copy_from_slice(m);
            }
            out.bias[k] = self.bias[src];
            out.scale[k] = self.scale[src];
        }
        out
    }

    /// Reorders columns so that new column `k` is old column `perm[k]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Layer {
        let mut out = self.clone();
        for i in 0..self.outputs {
            for (k, &src) in perm.iter().enumerate() {
                out.set_weight(i, k, self.weight(i, src));
            }
        }
        out
    }
}

/// Weight, neuron and parameter counts of an architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeStats {
    pub weights: usize,
    pub neurons: usize,
    pub params: usize,
}

pub fn size_stats(dims: &[usize]) -> SizeStats {
    let weights = dims.windows(2).map(|w| w[0] * w[1]).sum();
    let neurons = dims.iter().skip(1).sum::<usize>();
    SizeStats {
        weights,
        neurons,
        params: weights + 2 * neurons,
    }
}

/// Number of parameter vectors of an architecture under the standard alphabets,
/// or `None` if it overflows `u128`.
pub fn parameter_space_size(dims: &[usize], ternary_first: bool) -> Option<u128> {
    let mut total: u128 = 1;
    for (l, w) in dims.windows(2).enumerate() {
        let (fan_in, width) = (w[0] as u32, w[1] as u32);
        let per_weight: u128 = if l == 0 && ternary_first { 3 } else { 2 };
        let per_neuron = per_weight
            .checked_pow(fan_in)?
            .checked_mul(2 * fan_in as u128)?
            .checked_mul(3)?;
        total = total.checked_mul(per_neuron.checked_pow(width)?)?;
    }
    Some(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Network {
    dims: Vec<usize>,
    layers: Vec<Layer>,
    wide_bias: bool,
}

impl Network {
    /// Assembles and validates a network from its layers.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        Self::build(layers, false)
    }

    /// Like [`Network::new`] but with biases allowed in `{-2d+1, …, 2d}`.
    pub fn new_wide(layers: Vec<Layer>) -> Result<Self> {
        Self::build(layers, true)
    }

    fn build(layers: Vec<Layer>, wide_bias: bool) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::InvalidNetwork("depth must be at least 1".into()))?;
        let mut dims = vec![first.inputs];
        for l in &layers {
            dims.push(l.outputs);
        }
        let net = Network {
            dims,
            layers,
            wide_bias,
        };
        net.validate()?;
        Ok(net)
    }

    /// All-zero network of the given architecture (every neuron outputs 0).
    pub fn zeros(dims: &[usize], ternary_first: bool) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidNetwork("need at least two dims".into()));
        }
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(l, w)| Layer::zeros(w[1], w[0], l == 0 && ternary_first))
            .collect();
        Self::new(layers)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::InvalidNetwork("zero-width layer".into()));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.inputs != self.dims[l] {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} expects {} inputs but the previous width is {}",
                    l + 1,
                    layer.inputs,
                    self.dims[l]
                )));
            }
            if l > 0 && layer.is_ternary() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} is ternary; only the first layer may be",
                    l + 1
                )));
            }
            let (lo, hi) = self.bias_range(l + 1);
            for i in 0..layer.outputs {
                let b = layer.bias[i];
                if b < lo || b > hi {
                    return Err(Error::InvalidNetwork(format!(
                        "bias {b} of neuron {i} in layer {} outside [{lo}, {hi}]",
                        l + 1
                    )));
                }
                if !(-1..=1).contains(&layer.scale[i]) {
                    return Err(Error::InvalidNetwork(format!(
                        "scalar {} of neuron {i} in layer {} outside {{-1,0,1}}",
                        layer.scale[i],
                        l + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Closed bias range of layer `l` (1-based).
    pub fn bias_range(&self, l: usize) -> (i64, i64) {
        bias_range(self.dims[l - 1], self.wide_bias)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn is_ternary_first(&self) -> bool {
        self.layers[0].is_ternary()
    }

    pub fn has_wide_bias(&self) -> bool {
        self.wide_bias
    }

    /// Layer `l`, 1-based.
    pub fn layer(&self, l: usize) -> &Layer {
        &self.layers[l - 1]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn into_layers(self) -> Vec<Layer> {
        self.layers
    }

    pub fn size(&self) -> SizeStats {
        size_stats(&self.dims)
    }

    pub fn evaluate(&self, x: &Bits) -> Result<Bits> {
        if x.len() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                got: x.len(),
            });
        }
        let mut h = self.layers[0].apply(x);
        for layer in &self.layers[1..] {
            h = layer.apply(&h);
        }
        Ok(h)
    }

    /// Single layer map, `l` 1-based.
    pub fn evaluate_layer(&self, l: usize, a: &Bits) -> Result<Bits> {
        if l == 0 || l > self.depth() {
            return Err(Error::InvalidArgument(format!(
                "layer index {l} outside 1..={}",
                self.depth()
            )));
        }
        if a.len() != self.dims[l - 1] {
            return Err(Error::Shape {
                expected: self.dims[l - 1],
                got: a.len(),
            });
        }
        Ok(self.layers[l - 1].apply(a))
    }

    /// Evaluates on the input whose bit `i` is bit `i` of `x`.
    pub fn eval_index(&self, x: u64) -> Bits {
        self.evaluate(&Bits::from_u64(x, self.dims[0]))
            .expect("width matches by construction")
    }

    /// First output bit on input index `x`.
    pub fn eval_bit(&self, x: u64) -> bool {
        self.eval_index(x).get(0)
    }

    /// Outputs on every input `0..2^d0`, in index order.
    pub fn truth_table(&self, mode: Mode) -> Result<Vec<Bits>> {
        self.check_table_size()?;
        Ok(exec::map_range(mode, 1usize << self.dims[0], |x| {
            self.eval_index(x as u64)
        }))
    }

    /// First output bit on every input `0..2^d0`.
    pub fn output_table(&self, mode: Mode) -> Result<Vec<bool>> {
        self.check_table_size()?;
        Ok(exec::map_range(mode, 1usize << self.dims[0], |x| {
            self.eval_bit(x as u64)
        }))
    }

    fn check_table_size(&self) -> Result<()> {
        if self.dims[0] > MAX_TABLE_INPUTS {
            return Err(Error::InvalidArgument(format!(
                "input width {} exceeds the truth-table cap {MAX_TABLE_INPUTS}",
                self.dims[0]
            )));
        }
        Ok(())
    }

    /// Evaluates many inputs.
    pub fn evaluate_many(&self, inputs: &[Bits], mode: Mode) -> Result<Vec<Bits>> {
        exec::map_slice(mode, inputs, |x| self.evaluate(x))
            .into_iter()
            .collect()
    }

    /// Permutes the neurons of hidden layer `l` (1-based, `l < L`), keeping the
    /// function: new neuron `k` is old neuron `perm[k]`.
    pub fn permute_hidden(&self, l: usize, perm: &[usize]) -> Result<Network> {
        if l == 0 || l >= self.depth() {
            return Err(Error::InvalidArgument(format!("layer {l} is not hidden")));
        }
        if perm.len() != self.dims[l] {
            return Err(Error::Shape {
                expected: self.dims[l],
                got: perm.len(),
            });
        }
        let mut layers = self.layers.clone();
        layers[l - 1] = layers[l - 1].permute_rows(perm);
        layers[l] = layers[l].permute_cols(perm);
        Network::build(layers, self.wide_bias)
    }
}

/// Bias range for fan-in `d`.
pub fn bias_range(fan_in: usize, wide: bool) -> (i64, i64) {
    let d = fan_in as i64;
    if wide {
        (-2 * d + 1, 2 * d)
    } else {
        (-d + 1, d)
    }
}
