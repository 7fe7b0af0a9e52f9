//! Input distributions with label noise, datasets and risks.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::exec::Mode;
use crate::network::{Network, MAX_TABLE_INPUTS};
use crate::rng::{self, Rng};

/// Tolerance on probability mass sums.
pub const PMF_TOL: f64 = 1e-12;

/// How labels are corrupted.
#[derive(Clone, Debug, PartialEq)]
pub enum Noise {
    /// Every label flips independently with probability `ε★`.
    Independent(f64),
    /// Point `x` flips with probability `flip[x]`; the marginal rate is `ε★`.
    Arbitrary { eps: f64, flip: Vec<f64> },
}

impl Noise {
    pub fn eps(&self) -> f64 {
        match self {
            Noise::Independent(e) => *e,
            Noise::Arbitrary { eps, .. } => *eps,
        }
    }

    fn flip_prob(&self, x: usize) -> f64 {
        match self {
            Noise::Independent(e) => *e,
            Noise::Arbitrary { flip, .. } => flip[x],
        }
    }
}

/// Deterministic flip mask with marginal rate exactly `eps`: the heaviest
/// points flip surely, one boundary point flips with fractional probability,
/// and ties in mass are broken by a seeded shuffle.
pub fn arbitrary_mask(pmf: &[f64], eps: f64, seed: u64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..pmf.len()).collect();
    order.shuffle(&mut rng::stream(seed, &[0xad]));
    order.sort_by(|&a, &b| pmf[b].total_cmp(&pmf[a]));
    let mut flip = vec![0.0; pmf.len()];
    let mut left = eps;
    for x in order {
        if left <= 0.0 || pmf[x] == 0.0 {
            continue;
        }
        if pmf[x] <= left + PMF_TOL {
            flip[x] = 1.0;
            left -= pmf[x];
        } else {
            flip[x] = left / pmf[x];
            left = 0.0;
        }
    }
    flip
}

/// Input marginal, teacher and noise model.
#[derive(Clone, Debug, PartialEq)]
pub struct DataDistribution {
    input_dim: usize,
    pmf: Vec<f64>,
    teacher: Network,
    noise: Noise,
    teacher_table: Vec<bool>,
}

impl DataDistribution {
    pub fn new(pmf: Vec<f64>, teacher: Network, noise: Noise) -> Result<Self> {
        let d = teacher.input_dim();
        if d > MAX_TABLE_INPUTS {
            return Err(Error::InvalidArgument(format!(
                "input width {d} exceeds the enumeration cap {MAX_TABLE_INPUTS}"
            )));
        }
        if teacher.output_dim() != 1 {
            return Err(Error::Shape {
                expected: 1,
                got: teacher.output_dim(),
            });
        }
        if pmf.len() != 1 << d {
            return Err(Error::Shape {
                expected: 1 << d,
                got: pmf.len(),
            });
        }
        if pmf.iter().any(|&p| !(0.0..=1.0).contains(&p))
            || (pmf.iter().sum::<f64>() - 1.0).abs() > PMF_TOL * pmf.len() as f64
        {
            return Err(Error::InvalidArgument(
                "marginal must be a probability vector".into(),
            ));
        }
        let eps = noise.eps();
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::InvalidArgument(format!(
                "noise rate {eps} outside [0, 1/2]"
            )));
        }
        if let Noise::Arbitrary { flip, .. } = &noise {
            let rate: f64 = flip.iter().zip(&pmf).map(|(q, p)| q * p).sum();
            if flip.len() != pmf.len() || (rate - eps).abs() > 1e-9 {
                return Err(Error::InvalidArgument(
                    "flip mask does not have marginal rate ε★".into(),
                ));
            }
        }
        let teacher_table = teacher.output_table(Mode::Sequential)?;
        Ok(DataDistribution {
            input_dim: d,
            pmf,
            teacher,
            noise,
            teacher_table,
        })
    }

    pub fn uniform(teacher: Network, noise: Noise) -> Result<Self> {
        let d = teacher.input_dim();
        if d > MAX_TABLE_INPUTS {
            return Err(Error::InvalidArgument(format!(
                "input width {d} exceeds the enumeration cap {MAX_TABLE_INPUTS}"
            )));
        }
        let n = 1usize << d;
        Self::new(vec![1.0 / n as f64; n], teacher, noise)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn teacher(&self) -> &Network {
        &self.teacher
    }

    pub fn teacher_label(&self, x: usize) -> bool {
        self.teacher_table[x]
    }

    pub fn noise(&self) -> &Noise {
        &self.noise
    }

    pub fn eps(&self) -> f64 {
        self.noise.eps()
    }

    /// `P(Y ≠ h★(x) | X = x)`.
    pub fn flip_prob(&self, x: usize) -> f64 {
        self.noise.flip_prob(x)
    }

    /// Peak marginal probability.
    pub fn d_max(&self) -> f64 {
        self.pmf.iter().copied().fold(0.0, f64::max)
    }

    /// Risk of a predictor given as a truth table over all inputs.
    pub fn risk_of_table(&self, table: impl Fn(usize) -> bool) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(x, &p)| {
                let q = self.flip_prob(x);
                p * if table(x) == self.teacher_table[x] {
                    q
                } else {
                    1.0 - q
                }
            })
            .sum()
    }
}

/// Labeled samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    input_dim: usize,
    samples: Vec<(Bits, bool)>,
}

impl Dataset {
    pub fn new(input_dim: usize, samples: Vec<(Bits, bool)>) -> Result<Self> {
        if let Some((x, _)) = samples.iter().find(|(x, _)| x.len() != input_dim) {
            return Err(Error::Shape {
                expected: input_dim,
                got: x.len(),
            });
        }
        Ok(Dataset { input_dim, samples })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn samples(&self) -> &[(Bits, bool)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// First input carrying both labels, if any.
    pub fn conflict(&self) -> Option<&Bits> {
        let mut seen: HashMap<&Bits, bool> = HashMap::with_capacity(self.samples.len());
        for (x, y) in &self.samples {
            if let Some(&prev) = seen.get(x) {
                if prev != *y {
                    return Some(x);
                }
            } else {
                seen.insert(x, *y);
            }
        }
        None
    }

    pub fn is_consistent(&self) -> bool {
        self.conflict().is_none()
    }

    /// Distinct inputs with their labels, in order of first appearance.
    pub fn distinct(&self) -> Result<Vec<(Bits, bool)>> {
        if let Some(x) = self.conflict() {
            return Err(Error::Inconsistent {
                input: x.to_string(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        Ok(self
            .samples
            .iter()
            .filter(|(x, _)| seen.insert(x.clone()))
            .cloned()
            .collect())
    }

    /// Text form: one `<bits> <label>` line per sample.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (x, y) in &self.samples {
            let _ = writeln!(s, "{x} {}", *y as u8);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        let mut dim = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.into(),
            };
            let mut parts = line.split_whitespace();
            let (Some(bits), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err("expected `<bits> <label>`"));
            };
            let x = Bits::parse(bits).ok_or_else(|| err("input must be a 0/1 string"))?;
            let y = match label {
                "0" => false,
                "1" => true,
                _ => return Err(err("label must be 0 or 1")),
            };
            if *dim.get_or_insert(x.len()) != x.len() {
                return Err(err("inputs have different lengths"));
            }
            samples.push((x, y));
        }
        Ok(Dataset {
            input_dim: dim.unwrap_or(0),
            samples,
        })
    }
}

/// Draws `n` i.i.d. samples.
pub fn sample_dataset(dist: &DataDistribution, n: usize, seed: u64) -> Result<Dataset> {
    let mut r = rng::stream(seed, &[0xda7a]);
    sample_with(dist, n, &mut r)
}

pub(crate) fn sample_with(dist: &DataDistribution, n: usize, r: &mut Rng) -> Result<Dataset> {
    let index =
        WeightedIndex::new(dist.pmf()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let d = dist.input_dim();
    let samples = (0..n)
        .map(|_| {
            let x = index.sample(r);
            let flip = r.random::<f64>() < dist.flip_prob(x);
            (Bits::from_u64(x as u64, d), dist.teacher_label(x) ^ flip)
        })
        .collect();
    Dataset::new(d, samples)
}

/// Output of a learning rule: a network, or the marker for inconsistent data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Net(Network),
    Star,
}

impl Hypothesis {
    pub fn network(&self) -> Option<&Network> {
        match self {
            Hypothesis::Net(n) => Some(n),
            Hypothesis::Star => None,
        }
    }

    /// Prediction; the marker predicts 0 everywhere.
    pub fn predict(&self, x: &Bits) -> Result<bool> {
        match self {
            Hypothesis::Net(n) => Ok(n.evaluate(x)?.get(0)),
            Hypothesis::Star => Ok(false),
        }
    }
}

/// Number of training mistakes.
pub fn empirical_errors(h: &Network, s: &Dataset) -> Result<usize> {
    let mut errors = 0;
    for (x, y) in s.samples() {
        if h.evaluate(x)?.get(0) != *y {
            errors += 1;
        }
    }
    Ok(errors)
}

/// `L_S(h)`; zero for an empty dataset.
pub fn empirical_risk(h: &Network, s: &Dataset) -> Result<f64> {
    if s.is_empty() {
        return Ok(0.0);
    }
    Ok(empirical_errors(h, s)? as f64 / s.len() as f64)
}

/// `L_D(h)` summed exactly over the support.
pub fn population_risk_exact(h: &Hypothesis, dist: &DataDistribution) -> Result<f64> {
    match h {
        Hypothesis::Star => Ok(dist.risk_of_table(|_| false)),
        Hypothesis::Net(net) => {
            if net.input_dim() != dist.input_dim() {
                return Err(Error::Shape {
                    expected: dist.input_dim(),
                    got: net.input_dim(),
                });
            }
            let table = net.output_table(Mode::default())?;
            Ok(dist.risk_of_table(|x| table[x]))
        }
    }
}

/// Monte-Carlo estimate of `L_D(h)` with its standard error.
pub fn population_risk_mc(
    h: &Hypothesis,
    dist: &DataDistribution,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let s = sample_dataset(dist, samples, seed)?;
    let mut errors = 0usize;
    for (x, y) in s.samples() {
        if h.predict(x)? != *y {
            errors += 1;
        }
    }
    let p = errors as f64 / samples.max(1) as f64;
    Ok((p, (p * (1.0 - p) / samples.max(1) as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Layer;

    pub(crate) fn majority3() -> Network {
        let mut l = Layer::zeros(1, 3, false);
        for j in 0..3 {
            l.set_weight(0, j, 1);
        }
        l.set_scale(0, 1);
        l.set_bias(0, -1);
        Network::new(vec![l]).unwrap()
    }

    #[test]
    fn noiseless_labels_match_teacher() {
        let d = DataDistribution::uniform(majority3(), Noise::Independent(0.0)).unwrap();
        let s = sample_dataset(&d, 200, 1).unwrap();
        for (x, y) in s.samples() {
            assert_eq!(*y, majority3().evaluate(x).unwrap().get(0));
        }
        assert_eq!(
            population_risk_exact(&Hypothesis::Net(majority3()), &d).unwrap(),
            0.0
        );
    }

    #[test]
    fn flip_rate_within_tolerance() {
        let d = DataDistribution::uniform(majority3(), Noise::Independent(0.2)).unwrap();
        let n = 100_000;
        let s = sample_dataset(&d, n, 2).unwrap();
        let flips = empirical_errors(&majority3(), &s).unwrap() as f64 / n as f64;
        let sigma = (0.2f64 * 0.8 / n as f64).sqrt();
        assert!((flips - 0.2).abs() < 4.0 * sigma);
    }

    #[test]
    fn arbitrary_mask_has_exact_rate() {
        let pmf = vec![0.4, 0.3, 0.2, 0.1];
        let flip = arbitrary_mask(&pmf, 0.25, 0);
        let rate: f64 = flip.iter().zip(&pmf).map(|(q, p)| q * p).sum();
        assert!((rate - 0.25).abs() < 1e-12);
        assert_eq!(flip[1..], [0.0, 0.0, 0.0]);
    }

    #[test]
    fn dataset_text_roundtrip_and_consistency() {
        let s = Dataset::parse("# c\n101 1\n011 0\n101 1\n").unwrap();
        assert!(s.is_consistent());
        assert_eq!(Dataset::parse(&s.to_text()).unwrap(), s);
        let bad = Dataset::parse("10 1\n10 0\n").unwrap();
        assert!(!bad.is_consistent());
        assert!(matches!(
            Dataset::parse("10 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
