//! Outgoing-scaled networks (scalar applied after the threshold) and their
//! conversion to ordinary threshold networks.
//!
//! An outgoing-scaled neuron emits `γ_i · 1[W_i a + b_i > 0] ∈ {-1, 0, 1}`.
//! Writing each such output as `a_j − s_j` with `s_j = 1[γ_j = -1]` lets the
//! next layer absorb the shift into its bias, so every layer can be rewritten
//! over `{0,1}` activations at the price of a doubled bias range.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::network::{Layer, Network};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObtnNetwork {
    dims: Vec<usize>,
    layers: Vec<Layer>,
}

impl ObtnNetwork {
    /// Biases use the standard range; conversion doubles it.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        // Reuse the alphabet and shape checks of the ordinary network.
        let net = Network::new(layers)?;
        Ok(ObtnNetwork {
            dims: net.dims().to_vec(),
            layers: net.into_layers(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Layer outputs in `{-1, 0, 1}`.
    pub fn evaluate(&self, x: &[i8]) -> Result<Vec<i8>> {
        if x.len() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                got: x.len(),
            });
        }
        let mut h = x.to_vec();
        for layer in &self.layers {
            h = (0..layer.outputs())
                .map(|i| {
                    let dot: i64 = h
                        .iter()
                        .enumerate()
                        .map(|(j, &v)| layer.weight(i, j) as i64 * v as i64)
                        .sum();
                    if dot + layer.bias(i) > 0 {
                        layer.scale(i)
                    } else {
                        0
                    }
                })
                .collect();
        }
        Ok(h)
    }

    pub fn eval_index(&self, x: u64) -> Vec<i8> {
        let bits: Vec<i8> = (0..self.dims[0]).map(|j| ((x >> j) & 1) as i8).collect();
        self.evaluate(&bits).expect("width matches by construction")
    }
}

/// Converts to an ordinary network `h` with `h(x) = g(x) + s`, where `s` is
/// returned alongside and `s_i = 1` exactly for final neurons with `γ_i = -1`.
pub fn obtn_to_btn(g: &ObtnNetwork) -> (Network, Bits) {
    let mut shift: Vec<bool> = vec![false; g.dims[0]];
    let mut out = Vec::with_capacity(g.layers.len());
    for layer in &g.layers {
        let mut conv = Layer::zeros(layer.outputs(), layer.inputs(), layer.is_ternary());
        let mut next_shift = vec![false; layer.outputs()];
        for i in 0..layer.outputs() {
            // Pre-activation over shifted inputs: W(a - s) + b.
            let mut b = layer.bias(i);
            for (j, &s) in shift.iter().enumerate() {
                let w = layer.weight(i, j);
                conv.set_weight(i, j, w);
                if s {
                    b -= w as i64;
                }
            }
            match layer.scale(i) {
                1 => {
                    conv.set_scale(i, 1);
                    conv.set_bias(i, b);
                }
                -1 => {
                    // -1[v > 0] = 1[-v + 1 > 0] - 1, with v = W a + b.
                    conv.set_scale(i, -1);
                    conv.set_bias(i, 1 - b);
                    next_shift[i] = true;
                }
                _ => {
                    conv.set_scale(i, 0);
                    conv.set_bias(i, 0);
                }
            }
        }
        out.push(conv);
        shift = next_shift;
    }
    let net = Network::new_wide(out).expect("converted biases stay within the widened range");
    (net, Bits::from_bools(&shift))
}
