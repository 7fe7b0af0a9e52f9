//! Exhaustive search over network parameters, carried out on neuron output
//! columns rather than raw parameter vectors.
//!
//! A column is the bitmask of a neuron's outputs over a fixed list of at most
//! 64 input points. Since a layer's function only depends on the multiset of
//! its input columns, layers are explored as sorted column tuples, which makes
//! both exact posterior counting and min-size search cheap at small widths.

use std::collections::{BTreeMap, HashMap};

use rand::Rng as _;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::learn::data::{DataDistribution, Dataset, Hypothesis};
use crate::network::{bias_range, parameter_space_size, size_stats, Layer, Network};
use crate::rng::{self, Rng};

/// Default cap on `|Θ|` for exact posterior enumeration.
pub const DEFAULT_ENUM_CAP: u128 = 100_000_000;

/// Largest fan-in the column search will enumerate.
pub const MAX_FAN_IN: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeuronParams {
    /// Bit `j` set iff the weight on input `j` is 1.
    pub weights: u64,
    pub bias: i64,
    pub scale: i8,
}

/// Visits every neuron over `inputs` in canonical order (weights ascending,
/// then bias ascending, then scale in `−1, 0, 1` order) with its column.
fn for_each_neuron(inputs: &[u64], m: usize, mut visit: impl FnMut(u64, NeuronParams)) {
    let p = inputs.len();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let (lo, hi) = bias_range(p, false);
    let mut at_least = vec![0u64; p + 2];
    for weights in 0..1u64 << p {
        // at_least[k] = points whose selected-input count is ≥ k.
        let mut counts = vec![0u8; m];
        for (j, &c) in inputs.iter().enumerate() {
            if (weights >> j) & 1 == 1 {
                let mut c = c;
                while c != 0 {
                    counts[c.trailing_zeros() as usize] += 1;
                    c &= c - 1;
                }
            }
        }
        at_least.iter_mut().for_each(|v| *v = 0);
        for (t, &s) in counts.iter().enumerate() {
            for v in at_least.iter_mut().take(s as usize + 1) {
                *v |= 1 << t;
            }
        }
        let ge = |k: i64| -> u64 {
            if k <= 0 {
                full
            } else if k as usize > p {
                0
            } else {
                at_least[k as usize]
            }
        };
        for bias in lo..=hi {
            for scale in [-1i8, 0, 1] {
                let col = match scale {
                    1 => ge(1 - bias),
                    -1 => full & !ge(bias),
                    _ => {
                        if bias > 0 {
                            full
                        } else {
                            0
                        }
                    }
                };
                visit(
                    col,
                    NeuronParams {
                        weights,
                        bias,
                        scale,
                    },
                );
            }
        }
    }
}

/// Work units charged for one neuron enumeration.
fn neuron_cost(p: usize) -> u64 {
    (1u64 << p) * (2 * p as u64 + 1) * 3
}

/// Sorted multisets of size `k` drawn from `0..n`, passed to `visit`.
fn multisets(n: usize, k: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), visit);
}

fn coordinate_columns(points: &[Bits]) -> Vec<u64> {
    let d = points.first().map_or(0, Bits::len);
    (0..d)
        .map(|j| {
            points
                .iter()
                .enumerate()
                .fold(0u64, |acc, (t, x)| acc | (x.get(j) as u64) << t)
        })
        .collect()
}

/// Number of functions realized by each truth table under the uniform prior
/// over parameters of a fixed architecture.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionPrior {
    dims: Vec<usize>,
    total: u128,
    /// `(truth table over 0..2^d0, number of parameter vectors)`.
    entries: Vec<(u64, u128)>,
}

impl FunctionPrior {
    /// Counts all parameter vectors of `dims` by the function they compute.
    pub fn enumerate(dims: &[usize], cap: u128) -> Result<Self> {
        if dims.len() < 2 || *dims.last().expect("nonempty") != 1 {
            return Err(Error::InvalidArgument(
                "student must have at least one layer and one output".into(),
            ));
        }
        if dims[0] > 6 {
            return Err(Error::InvalidArgument(
                "exact posterior needs d0 ≤ 6".into(),
            ));
        }
        if dims
            .iter()
            .skip(1)
            .take(dims.len() - 2)
            .any(|&w| w > MAX_FAN_IN)
            || dims.contains(&0)
        {
            return Err(Error::InvalidArgument(
                "hidden widths must be in 1..=20".into(),
            ));
        }
        let size = parameter_space_size(dims, false).unwrap_or(u128::MAX);
        if size > cap {
            return Err(Error::EnumerationCap { size, cap });
        }
        let m = 1usize << dims[0];
        let points: Vec<Bits> = (0..m as u64).map(|x| Bits::from_u64(x, dims[0])).collect();
        let mut states: HashMap<Vec<u64>, u128> = HashMap::new();
        states.insert(coordinate_columns(&points), 1);
        for &width in &dims[1..] {
            let mut next: HashMap<Vec<u64>, u128> = HashMap::new();
            for (cols, count) in &states {
                let mut hist: BTreeMap<u64, u128> = BTreeMap::new();
                for_each_neuron(cols, m, |c, _| *hist.entry(c).or_insert(0) += 1);
                let entries: Vec<(u64, u128)> = hist.into_iter().collect();
                multisets(entries.len(), width, &mut |idx| {
                    // Ordered tuples mapping to this multiset: k! / Π mult! of them.
                    let mut ways = count * (1..=width as u128).product::<u128>();
                    let mut run = 1u128;
                    for i in 0..idx.len() {
                        ways *= entries[idx[i]].1;
                        if i > 0 && idx[i] == idx[i - 1] {
                            run += 1;
                            ways /= run;
                        } else {
                            run = 1;
                        }
                    }
                    let key: Vec<u64> = idx.iter().map(|&i| entries[i].0).collect();
                    *next.entry(key).or_insert(0) += ways;
                });
            }
            states = next;
        }
        let mut entries: Vec<(u64, u128)> = states.into_iter().map(|(k, v)| (k[0], v)).collect();
        entries.sort_unstable();
        let total = entries.iter().map(|e| e.1).sum();
        if total != size {
            return Err(Error::Internal(format!(
                "counted {total} parameter vectors, expected {size}"
            )));
        }
        Ok(FunctionPrior {
            dims: dims.to_vec(),
            total,
            entries,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn entries(&self) -> &[(u64, u128)] {
        &self.entries
    }

    /// `L_D` of each entry, in entry order.
    pub fn risks(&self, dist: &DataDistribution) -> Vec<f64> {
        self.entries
            .iter()
            .map(|&(f, _)| dist.risk_of_table(|x| (f >> x) & 1 == 1))
            .collect()
    }

    /// Exact posterior given a dataset, with per-entry risks precomputed.
    pub fn posterior(&self, s: &Dataset, risks: &[f64]) -> Result<PosteriorSummary> {
        if s.input_dim() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                got: s.input_dim(),
            });
        }
        let Ok(points) = s.distinct() else {
            return Ok(PosteriorSummary {
                inconsistent: true,
                interpolating: 0,
                total: self.total,
                mean_risk: None,
            });
        };
        let (mut seen, mut ones) = (0u64, 0u64);
        for (x, y) in &points {
            let i = x.to_u64();
            seen |= 1 << i;
            ones |= (*y as u64) << i;
        }
        let (mut count, mut weighted) = (0u128, 0.0);
        for (&(f, c), &r) in self.entries.iter().zip(risks) {
            if f & seen == ones {
                count += c;
                weighted += c as f64 * r;
            }
        }
        Ok(PosteriorSummary {
            inconsistent: false,
            interpolating: count,
            total: self.total,
            mean_risk: (count > 0).then(|| weighted / count as f64),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSummary {
    /// The dataset was inconsistent; the rule outputs the marker.
    pub inconsistent: bool,
    /// Parameter vectors that interpolate, `p_S · |Θ|`.
    pub interpolating: u128,
    pub total: u128,
    /// Posterior mean of `L_D`; `None` when nothing interpolates.
    pub mean_risk: Option<f64>,
}

impl PosteriorSummary {
    pub fn p_s(&self) -> f64 {
        self.interpolating as f64 / self.total as f64
    }
}

/// Exact posterior summary for `dims` on `s` under `dist`.
pub fn posterior_enumerate(
    s: &Dataset,
    dims: &[usize],
    dist: &DataDistribution,
    cap: u128,
) -> Result<PosteriorSummary> {
    let prior = FunctionPrior::enumerate(dims, cap)?;
    let risks = prior.risks(dist);
    prior.posterior(s, &risks)
}

/// A parameter vector drawn uniformly from the standard alphabets.
pub fn random_network(dims: &[usize], r: &mut Rng) -> Result<Network> {
    let layers = dims
        .windows(2)
        .map(|w| {
            let (fan_in, width) = (w[0], w[1]);
            let (lo, hi) = bias_range(fan_in, false);
            let mut l = Layer::zeros(width, fan_in, false);
            for i in 0..width {
                for j in 0..fan_in {
                    l.set_weight(i, j, r.random::<bool>() as i8);
                }
                l.set_bias(i, r.random_range(lo..=hi));
                l.set_scale(i, r.random_range(-1i8..=1));
            }
            l
        })
        .collect();
    Network::new(layers)
}

/// Rejection sampling from the uniform prior conditioned on `L_S = 0`.
pub fn posterior_sample(
    s: &Dataset,
    dims: &[usize],
    seed: u64,
    max_draws: u64,
) -> Result<Hypothesis> {
    let Ok(points) = s.distinct() else {
        return Ok(Hypothesis::Star);
    };
    let mut r = rng::stream(seed, &[0x9057]);
    for _ in 0..max_draws {
        let net = random_network(dims, &mut r)?;
        let mut ok = true;
        for (x, y) in &points {
            if net.evaluate(x)?.get(0) != *y {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(Hypothesis::Net(net));
        }
    }
    Err(Error::MaxDraws {
        draws: max_draws,
        estimate: 0.0,
    })
}

/// Limits of the min-size search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest weight count to try.
    pub max_weights: usize,
    /// Cap on neuron enumeration work.
    pub max_work: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_weights: 64,
            max_work: 2_000_000_000,
        }
    }
}

/// Architectures `(d0, d1, …, d_(L−1), 1)` with `w(d) ≤ max_w`, sorted by
/// weight count and then lexicographically.
pub fn architectures(d0: usize, depth: usize, max_w: usize) -> Vec<Vec<usize>> {
    fn rec(dims: &mut Vec<usize>, depth: usize, max_w: usize, out: &mut Vec<Vec<usize>>) {
        let used = size_stats(dims).weights;
        if dims.len() == depth {
            let prev = *dims.last().expect("nonempty");
            if used + prev <= max_w {
                let mut d = dims.clone();
                d.push(1);
                out.push(d);
            }
            return;
        }
        let prev = *dims.last().expect("nonempty");
        let mut w = 1;
        // Every later layer adds at least one weight per unit of this width.
        while used + prev * w + w + (depth - dims.len() - 1) <= max_w {
            dims.push(w);
            rec(dims, depth, max_w, out);
            dims.pop();
            w += 1;
        }
    }
    let mut out = Vec::new();
    if depth >= 1 {
        rec(&mut vec![d0], depth, max_w, &mut out);
    }
    out.sort_by_key(|d| (size_stats(d).weights, d.clone()));
    out
}

struct Node {
    cols: Vec<u64>,
    parent: usize,
    params: Vec<NeuronParams>,
}

struct Work {
    used: u64,
    cap: u64,
}

impl Work {
    fn charge(&mut self, units: u64) -> Result<()> {
        self.used += units;
        if self.used > self.cap {
            return Err(Error::Budget(format!(
                "min-size search exceeded {} work units",
                self.cap
            )));
        }
        Ok(())
    }
}

fn search_architecture(
    base: &[u64],
    m: usize,
    dims: &[usize],
    target: u64,
    work: &mut Work,
) -> Result<Option<Network>> {
    let depth = dims.len() - 1;
    let mut layers: Vec<Vec<Node>> = vec![vec![Node {
        cols: base.to_vec(),
        parent: 0,
        params: Vec::new(),
    }]];
    for l in 1..=depth {
        let width = dims[l];
        let mut next: Vec<Node> = Vec::new();
        let mut index: HashMap<Vec<u64>, ()> = HashMap::new();
        for (pi, node) in layers[l - 1].iter().enumerate() {
            if node.cols.len() > MAX_FAN_IN {
                return Err(Error::Budget(
                    "fan-in too large for exhaustive search".into(),
                ));
            }
            work.charge(neuron_cost(node.cols.len()))?;
            let mut first: BTreeMap<u64, NeuronParams> = BTreeMap::new();
            for_each_neuron(&node.cols, m, |c, p| {
                first.entry(c).or_insert(p);
            });
            if l == depth {
                if let Some(&p) = first.get(&target) {
                    let mut path = vec![(pi, vec![p])];
                    let mut at = pi;
                    for k in (1..l).rev() {
                        let n = &layers[k][at];
                        path.push((n.parent, n.params.clone()));
                        at = n.parent;
                    }
                    path.reverse();
                    return assemble(dims, &path).map(Some);
                }
                continue;
            }
            let choices: Vec<(u64, NeuronParams)> = first.into_iter().collect();
            let mut pending = Vec::new();
            multisets(choices.len(), width, &mut |idx| {
                let cols: Vec<u64> = idx.iter().map(|&i| choices[i].0).collect();
                if index.insert(cols.clone(), ()).is_none() {
                    pending.push(Node {
                        cols,
                        parent: pi,
                        params: idx.iter().map(|&i| choices[i].1).collect(),
                    });
                }
            });
            work.charge(pending.len() as u64)?;
            next.extend(pending);
        }
        layers.push(next);
    }
    Ok(None)
}

fn assemble(dims: &[usize], path: &[(usize, Vec<NeuronParams>)]) -> Result<Network> {
    let layers = path
        .iter()
        .enumerate()
        .map(|(l, (_, params))| {
            let mut layer = Layer::zeros(dims[l + 1], dims[l], false);
            for (i, p) in params.iter().enumerate() {
                for j in 0..dims[l] {
                    layer.set_weight(i, j, ((p.weights >> j) & 1) as i8);
                }
                layer.set_bias(i, p.bias);
                layer.set_scale(i, p.scale);
            }
            layer
        })
        .collect();
    Network::new(layers)
}

/// A depth-`depth` interpolator of minimum weight count, or the marker when
/// `s` is inconsistent. Minimality holds because every architecture with a
/// smaller weight count was searched exhaustively first.
pub fn min_size_interpolator(
    s: &Dataset,
    depth: usize,
    budget: SearchBudget,
) -> Result<Hypothesis> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let Ok(mut points) = s.distinct() else {
        return Ok(Hypothesis::Star);
    };
    if points.len() > 64 {
        return Err(Error::InvalidArgument(
            "min-size search handles at most 64 distinct inputs".into(),
        ));
    }
    let d0 = s.input_dim();
    if d0 > MAX_FAN_IN {
        return Err(Error::InvalidArgument(
            "input width too large for exhaustive search".into(),
        ));
    }
    // Canonical point order makes the result independent of sample order.
    points.sort_by(|a, b| a.0.words().cmp(b.0.words()));
    let m = points.len();
    let xs: Vec<Bits> = points.iter().map(|(x, _)| x.clone()).collect();
    let base = coordinate_columns(&xs);
    let base = if base.is_empty() { vec![0; d0] } else { base };
    let target = points
        .iter()
        .enumerate()
        .fold(0u64, |acc, (t, (_, y))| acc | (*y as u64) << t);
    let mut work = Work {
        used: 0,
        cap: budget.max_work,
    };
    for dims in architectures(d0, depth, budget.max_weights) {
        if let Some(net) = search_architecture(&base, m, &dims, target, &mut work)? {
            return Ok(Hypothesis::Net(net));
        }
    }
    Err(Error::Budget(format!(
        "no interpolator with at most {} weights",
        budget.max_weights
    )))
}
