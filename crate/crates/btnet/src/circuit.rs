//! A small threshold-circuit compiler.
//!
//! Gates are arranged in levels. A level-1 gate reads the network input
//! directly through a `{0, ±1}` row with a neuron scalar. A gate at level
//! `l > 1` is `1[Σ w_j g_j + b > 0]` over gates at level `l − 1` with arbitrary
//! integer weights. [`Circuit::build`] lowers this to a [`Network`] by giving
//! every gate as many plain copies as its largest positive fan-out weight and as
//! many negated copies as its largest negative one, so each integer weight
//! becomes a run of unit weights.
//!
//! Identical gates are shared, and gates that skip levels are carried forward
//! through memoized identity chains.

use std::collections::{BTreeMap, HashMap};

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::network::{Layer, Network};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Input { plus: Bits, minus: Bits, scale: i8 },
    Threshold { terms: Vec<(GateId, i64)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Gate {
    level: usize,
    kind: Kind,
    bias: i64,
}

/// Integer linear combination of gates plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Form {
    terms: BTreeMap<GateId, i64>,
    constant: i64,
}

impl Form {
    pub fn constant(k: i64) -> Self {
        Form {
            terms: BTreeMap::new(),
            constant: k,
        }
    }

    pub fn gate(g: GateId) -> Self {
        let mut f = Form::constant(0);
        f.terms.insert(g, 1);
        f
    }

    /// `1 − g`.
    pub fn not(g: GateId) -> Self {
        let mut f = Form::constant(1);
        f.terms.insert(g, -1);
        f
    }

    pub fn sum<'a>(forms: impl IntoIterator<Item = &'a Form>) -> Self {
        let mut acc = Form::constant(0);
        for f in forms {
            acc.add_scaled(f, 1);
        }
        acc
    }

    pub fn add_scaled(&mut self, other: &Form, k: i64) {
        for (&g, &w) in &other.terms {
            let e = self.terms.entry(g).or_insert(0);
            *e += k * w;
            if *e == 0 {
                self.terms.remove(&g);
            }
        }
        self.constant += k * other.constant;
    }

    pub fn add_const(&mut self, k: i64) {
        self.constant += k;
    }

    /// `1 − self`, for a 0/1-valued form.
    pub fn negated(&self) -> Form {
        let mut f = Form::constant(1);
        f.add_scaled(self, -1);
        f
    }

    pub fn terms(&self) -> impl Iterator<Item = (GateId, i64)> + '_ {
        self.terms.iter().map(|(&g, &w)| (g, w))
    }

    pub fn constant_term(&self) -> i64 {
        self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, values: &[bool]) -> i64 {
        self.constant + self.terms().map(|(g, w)| w * values[g] as i64).sum::<i64>()
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    input_dim: usize,
    ternary: bool,
    gates: Vec<Gate>,
    index: HashMap<Gate, GateId>,
}

/// Forces a neuron whose pre-activation `γ s + b` ranges over `s ∈ [lo, hi]`
/// into the legal bias range, replacing constant neurons by `γ = 0`.
fn normalize(scale: i8, lo: i64, hi: i64, bias: i64) -> (i8, i64) {
    let (a, b) = (scale as i64 * lo + bias, scale as i64 * hi + bias);
    if a.max(b) <= 0 {
        (0, 0)
    } else if a.min(b) > 0 {
        (0, 1)
    } else {
        (scale, bias)
    }
}

impl Circuit {
    pub fn new(input_dim: usize, ternary: bool) -> Self {
        Circuit {
            input_dim,
            ternary,
            gates: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn level(&self, g: GateId) -> usize {
        self.gates[g].level
    }

    fn intern(&mut self, gate: Gate) -> GateId {
        if let Some(&id) = self.index.get(&gate) {
            return id;
        }
        let id = self.gates.len();
        self.gates.push(gate.clone());
        self.index.insert(gate, id);
        id
    }

    /// Level-1 gate `1[γ (plus·x − minus·x) + b > 0]`.
    pub fn input_gate(
        &mut self,
        plus: &Bits,
        minus: Option<&Bits>,
        scale: i8,
        bias: i64,
    ) -> GateId {
        assert_eq!(plus.len(), self.input_dim);
        let minus = minus
            .cloned()
            .unwrap_or_else(|| Bits::zeros(self.input_dim));
        assert!(
            self.ternary || minus.count_ones() == 0,
            "negative input weights need a ternary first layer"
        );
        self.intern(Gate {
            level: 1,
            kind: Kind::Input {
                plus: plus.clone(),
                minus,
                scale,
            },
            bias,
        })
    }

    /// The input coordinate `x_j`.
    pub fn input_bit(&mut self, j: usize) -> GateId {
        let mut row = Bits::zeros(self.input_dim);
        row.set(j, true);
        self.input_gate(&row, None, 1, 0)
    }

    /// A constant gate at level 1.
    pub fn constant(&mut self, value: bool) -> GateId {
        let zero = Bits::zeros(self.input_dim);
        self.input_gate(&zero, None, 0, value as i64)
    }

    /// Carries `g` forward to `level` through identity gates.
    pub fn lift(&mut self, g: GateId, level: usize) -> GateId {
        let mut cur = g;
        assert!(self.level(g) <= level, "cannot lift downwards");
        while self.level(cur) < level {
            let next = self.level(cur) + 1;
            cur = self.intern(Gate {
                level: next,
                kind: Kind::Threshold {
                    terms: vec![(cur, 1)],
                },
                bias: 0,
            });
        }
        cur
    }

    /// `1[form > 0]` at the lowest possible level.
    pub fn positive(&mut self, form: &Form) -> GateId {
        match form.terms().map(|(g, _)| self.level(g)).max() {
            Some(top) => self.positive_at(form, top + 1),
            None => self.constant(form.constant > 0),
        }
    }

    /// `1[form > 0]` at exactly `level`.
    pub fn positive_at(&mut self, form: &Form, level: usize) -> GateId {
        assert!(level >= 2, "threshold gates start at level 2");
        let mut terms: BTreeMap<GateId, i64> = BTreeMap::new();
        for (g, w) in form.terms() {
            let lifted = self.lift(g, level - 1);
            *terms.entry(lifted).or_insert(0) += w;
        }
        terms.retain(|_, w| *w != 0);
        self.intern(Gate {
            level,
            kind: Kind::Threshold {
                terms: terms.into_iter().collect(),
            },
            bias: form.constant,
        })
    }

    /// Materializes a 0/1-valued form as a gate.
    pub fn materialize(&mut self, form: &Form) -> GateId {
        if form.constant == 0 && form.terms.len() == 1 {
            if let Some((g, 1)) = form.terms().next() {
                return g;
            }
        }
        self.positive(form)
    }

    /// AND of 0/1-valued forms.
    pub fn and(&mut self, forms: &[Form]) -> GateId {
        let mut f = Form::sum(forms);
        f.add_const(1 - forms.len() as i64);
        self.positive(&f)
    }

    /// OR of 0/1-valued forms.
    pub fn or(&mut self, forms: &[Form]) -> GateId {
        self.positive(&Form::sum(forms))
    }

    /// Parity of `row·x ⊕ flip` as a form over level-1 threshold gates, using
    /// `parity(s) = Σ_{t=1..m} (−1)^(t+1) 1[s ≥ t]` for `s ∈ [0, m]`.
    pub fn parity_of_inputs(&mut self, row: &Bits, flip: bool) -> Form {
        let m = row.count_ones() as i64;
        let mut f = Form::constant(0);
        for t in 1..=m {
            let g = self.input_gate(row, None, 1, 1 - t);
            f.add_scaled(&Form::gate(g), if t % 2 == 1 { 1 } else { -1 });
        }
        if flip {
            f.negated()
        } else {
            f
        }
    }

    /// Parity of a sum `s ∈ [0, m]` given as a form, one level above it.
    pub fn parity_of_sum(&mut self, sum: &Form, m: usize, flip: bool) -> Form {
        let mut f = Form::constant(0);
        for t in 1..=m as i64 {
            let mut shifted = sum.clone();
            shifted.add_const(1 - t);
            let g = self.positive(&shifted);
            f.add_scaled(&Form::gate(g), if t % 2 == 1 { 1 } else { -1 });
        }
        if flip {
            f.negated()
        } else {
            f
        }
    }

    /// Parity of a set of gates (with multiplicity cancelling).
    pub fn parity_of_gates(&mut self, gates: &[GateId], flip: bool) -> Form {
        let mut counts: BTreeMap<GateId, usize> = BTreeMap::new();
        for &g in gates {
            *counts.entry(g).or_insert(0) += 1;
        }
        let odd: Vec<GateId> = counts
            .into_iter()
            .filter(|&(_, c)| c % 2 == 1)
            .map(|(g, _)| g)
            .collect();
        if odd.is_empty() {
            return Form::constant(flip as i64);
        }
        if odd.len() == 1 {
            return if flip {
                Form::not(odd[0])
            } else {
                Form::gate(odd[0])
            };
        }
        let sum = Form::sum(
            odd.iter()
                .map(|&g| Form::gate(g))
                .collect::<Vec<_>>()
                .iter(),
        );
        self.parity_of_sum(&sum, odd.len(), flip)
    }

    /// Values of every gate on input `x` under the circuit semantics.
    pub fn evaluate_all(&self, x: &Bits) -> Vec<bool> {
        let mut vals = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let pre = match &gate.kind {
                Kind::Input {
                    plus, minus, scale, ..
                } => {
                    let dot = |r: &Bits| -> i64 {
                        r.words()
                            .iter()
                            .zip(x.words())
                            .map(|(a, b)| (a & b).count_ones() as i64)
                            .sum()
                    };
                    *scale as i64 * (dot(plus) - dot(minus)) + gate.bias
                }
                Kind::Threshold { terms } => {
                    terms.iter().map(|&(g, w)| w * vals[g] as i64).sum::<i64>() + gate.bias
                }
            };
            vals.push(pre > 0);
        }
        vals
    }

    /// Lowers the circuit to a network whose outputs are `outputs` in order,
    /// all carried to the deepest output level.
    pub fn build(&mut self, outputs: &[GateId]) -> Result<Network> {
        let depth = outputs
            .iter()
            .map(|&g| self.level(g))
            .max()
            .ok_or_else(|| Error::InvalidArgument("circuit has no outputs".into()))?;
        let outs: Vec<GateId> = outputs.iter().map(|&g| self.lift(g, depth)).collect();

        let n = self.gates.len();
        let (mut pos_need, mut neg_need) = (vec![0usize; n], vec![0usize; n]);
        let mut live = vec![false; n];
        for &g in &outs {
            live[g] = true;
        }
        for g in (0..n).rev() {
            if !live[g] {
                continue;
            }
            if let Kind::Threshold { terms } = &self.gates[g].kind {
                for &(h, w) in terms {
                    live[h] = true;
                    let need = if w > 0 { &mut pos_need } else { &mut neg_need };
                    need[h] = need[h].max(w.unsigned_abs() as usize);
                }
            }
        }

        // Column layout: plain copies of a gate, then its negated copies.
        let mut by_level: Vec<Vec<GateId>> = vec![Vec::new(); depth + 1];
        for g in 0..n {
            if live[g] && self.gates[g].level < depth {
                by_level[self.gates[g].level].push(g);
            }
        }
        let (mut pos_start, mut neg_start) = (vec![0usize; n], vec![0usize; n]);
        let mut widths = vec![self.input_dim];
        for level_gates in by_level.iter().take(depth).skip(1) {
            let mut col = 0;
            for &g in level_gates {
                pos_start[g] = col;
                col += pos_need[g];
                neg_start[g] = col;
                col += neg_need[g];
            }
            widths.push(col.max(1));
        }
        widths.push(outs.len());

        let mut layers = Vec::with_capacity(depth);
        for l in 1..=depth {
            let ternary = l == 1 && self.ternary;
            let mut layer = Layer::zeros(widths[l], widths[l - 1], ternary);
            let emit: Vec<(GateId, usize, usize)> = if l < depth {
                by_level[l]
                    .iter()
                    .map(|&g| (g, pos_need[g], neg_need[g]))
                    .collect()
            } else {
                outs.iter().map(|&g| (g, 1, 0)).collect()
            };
            let mut row_idx = 0;
            for (g, pos, neg) in emit {
                let (row_plus, row_minus, scale, bias) =
                    self.neuron(g, &pos_start, &neg_start, widths[l - 1]);
                for copy in 0..pos + neg {
                    let negated = copy >= pos;
                    for j in 0..widths[l - 1] {
                        let w = row_plus.get(j) as i8 - row_minus.get(j) as i8;
                        if w != 0 {
                            layer.set_weight(row_idx, j, w);
                        }
                    }
                    let (s, b) = if negated {
                        (-scale, 1 - bias)
                    } else {
                        (scale, bias)
                    };
                    layer.set_scale(row_idx, s);
                    layer.set_bias(row_idx, b);
                    row_idx += 1;
                }
            }
            layers.push(layer);
        }
        Network::new(layers).map_err(|e| {
            Error::Internal(format!("circuit lowering produced an invalid network: {e}"))
        })
    }

    /// Row, scalar and bias of the plain neuron realizing gate `g`.
    fn neuron(
        &self,
        g: GateId,
        pos_start: &[usize],
        neg_start: &[usize],
        fan_in: usize,
    ) -> (Bits, Bits, i8, i64) {
        let gate = &self.gates[g];
        let (mut plus, mut minus, scale, bias, lo, hi) = match &gate.kind {
            Kind::Input {
                plus, minus, scale, ..
            } => (
                plus.clone(),
                minus.clone(),
                *scale,
                gate.bias,
                -(minus.count_ones() as i64),
                plus.count_ones() as i64,
            ),
            Kind::Threshold { terms } => {
                let mut plus = Bits::zeros(fan_in);
                let mut bias = gate.bias;
                for &(h, w) in terms {
                    let start = if w > 0 {
                        pos_start[h]
                    } else {
                        bias += w;
                        neg_start[h]
                    };
                    for c in start..start + w.unsigned_abs() as usize {
                        plus.set(c, true);
                    }
                }
                let hi = plus.count_ones() as i64;
                (plus, Bits::zeros(fan_in), 1, bias, 0, hi)
            }
        };
        let (scale, bias) = normalize(scale, lo, hi, bias);
        if scale == 0 {
            plus = Bits::zeros(fan_in);
            minus = Bits::zeros(fan_in);
        }
        (plus, minus, scale, bias)
    }
}

/// Layered threshold circuit with unrestricted integer weights. Gate `i` of a
/// layer outputs `1[Σ_j W_ij z_j ≥ θ_i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtCircuit {
    input_dim: usize,
    layers: Vec<LtLayer>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtLayer {
    pub weights: Vec<Vec<i64>>,
    pub thresholds: Vec<i64>,
}

impl LtCircuit {
    pub fn new(input_dim: usize, layers: Vec<LtLayer>) -> Result<Self> {
        let mut width = input_dim;
        for layer in &layers {
            if layer.weights.len() != layer.thresholds.len() {
                return Err(Error::Shape {
                    expected: layer.weights.len(),
                    got: layer.thresholds.len(),
                });
            }
            if let Some(r) = layer.weights.iter().find(|r| r.len() != width) {
                return Err(Error::Shape {
                    expected: width,
                    got: r.len(),
                });
            }
            width = layer.weights.len();
        }
        if layers.is_empty() {
            return Err(Error::InvalidArgument(
                "circuit needs at least one layer".into(),
            ));
        }
        Ok(LtCircuit { input_dim, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.thresholds.len())
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[LtLayer] {
        &self.layers
    }

    /// Sum of absolute weights.
    pub fn size(&self) -> u64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().flatten())
            .map(|w| w.unsigned_abs())
            .sum()
    }

    pub fn evaluate(&self, z: &Bits) -> Result<Bits> {
        if z.len() != self.input_dim {
            return Err(Error::Shape {
                expected: self.input_dim,
                got: z.len(),
            });
        }
        let mut cur = z.to_bools();
        for layer in &self.layers {
            cur = layer
                .weights
                .iter()
                .zip(&layer.thresholds)
                .map(|(row, &t)| {
                    row.iter()
                        .zip(&cur)
                        .map(|(&w, &v)| w * v as i64)
                        .sum::<i64>()
                        >= t
                })
                .collect();
        }
        Ok(Bits::from_bools(&cur))
    }

    /// Adds the circuit on top of the given 0/1 input forms and returns the
    /// output gates.
    pub fn compile_into(&self, circuit: &mut Circuit, inputs: &[Form]) -> Vec<GateId> {
        assert_eq!(inputs.len(), self.input_dim);
        let mut cur: Vec<Form> = inputs.to_vec();
        let mut gates = Vec::new();
        for layer in &self.layers {
            gates = layer
                .weights
                .iter()
                .zip(&layer.thresholds)
                .map(|(row, &t)| {
                    let mut f = Form::constant(1 - t);
                    for (w, z) in row.iter().zip(&cur) {
                        if *w != 0 {
                            f.add_scaled(z, *w);
                        }
                    }
                    circuit.positive(&f)
                })
                .collect();
            cur = gates.iter().map(|&g| Form::gate(g)).collect();
        }
        gates
    }
}
