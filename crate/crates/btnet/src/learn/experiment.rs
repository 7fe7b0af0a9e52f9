//! Teacher/noise/learner experiments and their CSV tables.
//!
//! Config files are `key = value` lines with `#` comments:
//!
//! ```text
//! learner = posterior          # posterior | minsize | zero
//! teacher = majority           # majority | random <seed> | file <path>
//! teacher_dims = 3,1           # architecture of a random teacher
//! input_dim = 3
//! marginal = uniform           # uniform | table p0 p1 ...
//! noise = independent          # independent | arbitrary
//! eps = 0.1,0.2,0.3,0.4
//! n = 10
//! trials = 200
//! seed = 7
//! student = 3,1,2,1            # posterior learner architecture
//! depth = 2                    # minsize learner depth
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::learn::curves::CurvePoint;
use crate::learn::data::{arbitrary_mask, sample_with, DataDistribution, Hypothesis, Noise};
use crate::learn::population_risk_exact;
use crate::learn::prob::eps_tr_exact;
use crate::learn::search::{
    min_size_interpolator, posterior_sample, random_network, FunctionPrior, SearchBudget,
    DEFAULT_ENUM_CAP,
};
use crate::network::{Layer, Network};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LearnerKind {
    Posterior,
    MinSize,
    /// Always predicts 0.
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TeacherSpec {
    /// `1[Σ x > d0/2]` style majority neuron.
    Majority,
    Random {
        seed: u64,
        dims: Vec<usize>,
    },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum MarginalSpec {
    Uniform,
    Table(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    Independent,
    Arbitrary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub learner: LearnerKind,
    pub teacher: TeacherSpec,
    pub input_dim: usize,
    pub marginal: MarginalSpec,
    pub noise: NoiseKind,
    pub eps: Vec<f64>,
    pub n: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub student: Vec<usize>,
    pub depth: usize,
    pub enum_cap: u128,
    pub max_draws: u64,
    /// Dataset draws per trial before giving up on a consistent one.
    pub max_resample: usize,
    pub budget: SearchBudget,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            learner: LearnerKind::Posterior,
            teacher: TeacherSpec::Majority,
            input_dim: 3,
            marginal: MarginalSpec::Uniform,
            noise: NoiseKind::Independent,
            eps: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            n: vec![10],
            trials: 100,
            seed: 0,
            student: vec![3, 1, 2, 1],
            depth: 2,
            enum_cap: DEFAULT_ENUM_CAP,
            max_draws: 1_000_000,
            max_resample: 10_000,
            budget: SearchBudget::default(),
        }
    }
}

fn list<T: std::str::FromStr>(v: &str) -> Option<Vec<T>> {
    v.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl ExperimentConfig {
    /// Parses the key-value format; relative teacher paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut teacher_dims = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected `key = value`".into()))?;
            let bad = || err(format!("bad value for `{key}`: {value}"));
            match key {
                "learner" => {
                    c.learner = match value {
                        "posterior" => LearnerKind::Posterior,
                        "minsize" => LearnerKind::MinSize,
                        "zero" => LearnerKind::Zero,
                        _ => return Err(bad()),
                    }
                }
                "teacher" => {
                    let mut parts = value.splitn(2, ' ');
                    c.teacher = match (parts.next(), parts.next().map(str::trim)) {
                        (Some("majority"), None) => TeacherSpec::Majority,
                        (Some("random"), Some(s)) => TeacherSpec::Random {
                            seed: s.parse().map_err(|_| bad())?,
                            dims: Vec::new(),
                        },
                        (Some("file"), Some(p)) => {
                            let p = PathBuf::from(p);
                            TeacherSpec::File(match base {
                                Some(b) if p.is_relative() => b.join(p),
                                _ => p,
                            })
                        }
                        _ => return Err(bad()),
                    }
                }
                "teacher_dims" => teacher_dims = Some(list(value).ok_or_else(bad)?),
                "input_dim" => c.input_dim = value.parse().map_err(|_| bad())?,
                "marginal" => {
                    c.marginal = if value == "uniform" {
                        MarginalSpec::Uniform
                    } else if let Some(rest) = value.strip_prefix("table") {
                        MarginalSpec::Table(
                            rest.split_whitespace()
                                .map(|t| t.parse().map_err(|_| bad()))
                                .collect::<Result<_>>()?,
                        )
                    } else {
                        return Err(bad());
                    }
                }
                "noise" => {
                    c.noise = match value {
                        "independent" => NoiseKind::Independent,
                        "arbitrary" => NoiseKind::Arbitrary,
                        _ => return Err(bad()),
                    }
                }
                "eps" => c.eps = list(value).ok_or_else(bad)?,
                "n" => c.n = list(value).ok_or_else(bad)?,
                "trials" => c.trials = value.parse().map_err(|_| bad())?,
                "seed" => c.seed = value.parse().map_err(|_| bad())?,
                "student" => c.student = list(value).ok_or_else(bad)?,
                "depth" => c.depth = value.parse().map_err(|_| bad())?,
                "enum_cap" => c.enum_cap = value.parse().map_err(|_| bad())?,
                "max_draws" => c.max_draws = value.parse().map_err(|_| bad())?,
                "max_resample" => c.max_resample = value.parse().map_err(|_| bad())?,
                "max_weights" => c.budget.max_weights = value.parse().map_err(|_| bad())?,
                "max_work" => c.budget.max_work = value.parse().map_err(|_| bad())?,
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        if let TeacherSpec::Random { dims, .. } = &mut c.teacher {
            *dims = teacher_dims.unwrap_or_else(|| vec![c.input_dim, 1]);
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.eps.is_empty() || self.n.is_empty() {
            return bad("eps and n grids must be nonempty");
        }
        if self.eps.iter().any(|e| !(0.0..=0.5).contains(e)) {
            return bad("every ε★ must lie in [0, 1/2]");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n.contains(&0) {
            return bad("sample sizes must be positive");
        }
        if self.learner == LearnerKind::Posterior && self.student.first() != Some(&self.input_dim) {
            return bad("student input width must equal input_dim");
        }
        Ok(())
    }

    pub fn teacher_network(&self) -> Result<Network> {
        let net = match &self.teacher {
            TeacherSpec::Majority => {
                let d = self.input_dim;
                let mut l = Layer::zeros(1, d, false);
                for j in 0..d {
                    l.set_weight(0, j, 1);
                }
                l.set_scale(0, 1);
                l.set_bias(0, -((d as i64) / 2));
                Network::new(vec![l])?
            }
            TeacherSpec::Random { seed, dims } => {
                random_network(dims, &mut rng::stream(*seed, &[0x7e]))?
            }
            TeacherSpec::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidArgument(format!("cannot read teacher {}: {e}", p.display()))
                })?;
                crate::btn_format::parse_btn(&text)?
            }
        };
        if net.input_dim() != self.input_dim || net.output_dim() != 1 {
            return Err(Error::InvalidArgument(
                "teacher must map input_dim bits to one bit".into(),
            ));
        }
        Ok(net)
    }

    pub fn distribution(&self, eps: f64) -> Result<DataDistribution> {
        let teacher = self.teacher_network()?;
        let pmf = match &self.marginal {
            MarginalSpec::Uniform => {
                let n = 1usize << self.input_dim;
                vec![1.0 / n as f64; n]
            }
            MarginalSpec::Table(p) => p.clone(),
        };
        let noise = match self.noise {
            NoiseKind::Independent => Noise::Independent(eps),
            NoiseKind::Arbitrary => Noise::Arbitrary {
                eps,
                flip: arbitrary_mask(&pmf, eps, self.seed),
            },
        };
        DataDistribution::new(pmf, teacher, noise)
    }
}

/// One row of the experiment table.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub eps: f64,
    pub n: usize,
    /// Trials that produced a risk value.
    pub trials: usize,
    pub mean_risk: f64,
    pub stderr: f64,
    pub eps_tr: f64,
    pub curve: CurvePoint,
    /// Fraction of sampled datasets that were inconsistent.
    pub inconsistent_frac: f64,
    /// Trials whose learner returned an error.
    pub failures: Vec<String>,
}

pub const CSV_HEADER: &str =
    "eps_star,n,trials,mean_risk,stderr,eps_tr,bayes,independent_curve,arbitrary_bound,trivial,inconsistent_frac";

pub fn to_csv(rows: &[ExperimentRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10},{:.10}",
            r.eps,
            r.n,
            r.trials,
            r.mean_risk,
            r.stderr,
            r.eps_tr,
            r.curve.bayes,
            r.curve.independent,
            r.curve.arbitrary,
            r.curve.trivial,
            r.inconsistent_frac
        );
    }
    s
}

enum Learner {
    Exact(FunctionPrior, Vec<f64>),
    Sampled(Vec<usize>, u64),
    MinSize(usize, SearchBudget),
    Zero,
}

struct Trial {
    risk: Option<f64>,
    draws: usize,
    inconsistent: usize,
    error: Option<String>,
}

fn run_trial(
    learner: &Learner,
    dist: &DataDistribution,
    n: usize,
    max_resample: usize,
    seed: u64,
) -> Trial {
    let mut r = rng::stream(seed, &[]);
    let mut inconsistent = 0;
    for draw in 1..=max_resample {
        let s = match sample_with(dist, n, &mut r) {
            Ok(s) => s,
            Err(e) => {
                return Trial {
                    risk: None,
                    draws: draw,
                    inconsistent,
                    error: Some(e.to_string()),
                }
            }
        };
        if !s.is_consistent() {
            inconsistent += 1;
            continue;
        }
        let outcome = match learner {
            Learner::Exact(prior, risks) => prior.posterior(&s, risks).map(|p| {
                // With no interpolator any posterior is admissible; use the 0 predictor.
                p.mean_risk.unwrap_or_else(|| dist.risk_of_table(|_| false))
            }),
            Learner::Sampled(dims, max_draws) => {
                posterior_sample(&s, dims, rng::derive(seed, &[1]), *max_draws)
                    .and_then(|h| population_risk_exact(&h, dist))
            }
            Learner::MinSize(depth, budget) => min_size_interpolator(&s, *depth, *budget)
                .and_then(|h| population_risk_exact(&h, dist)),
            Learner::Zero => population_risk_exact(&Hypothesis::Star, dist),
        };
        return match outcome {
            Ok(risk) => Trial {
                risk: Some(risk),
                draws: draw,
                inconsistent,
                error: None,
            },
            Err(e) => Trial {
                risk: None,
                draws: draw,
                inconsistent,
                error: Some(e.to_string()),
            },
        };
    }
    Trial {
        risk: None,
        draws: max_resample,
        inconsistent,
        error: Some(format!("no consistent dataset in {max_resample} draws")),
    }
}

/// Runs every `(ε★, N)` cell; trials within a cell run under `mode` with
/// streams derived from `(seed, cell, trial)`, so output is deterministic.
pub fn run_experiment(config: &ExperimentConfig, mode: Mode) -> Result<Vec<ExperimentRow>> {
    config.validate()?;
    let learner = match config.learner {
        LearnerKind::Posterior => {
            match FunctionPrior::enumerate(&config.student, config.enum_cap) {
                Ok(p) => Learner::Exact(p, Vec::new()),
                Err(Error::EnumerationCap { .. }) => {
                    Learner::Sampled(config.student.clone(), config.max_draws)
                }
                Err(e) => return Err(e),
            }
        }
        LearnerKind::MinSize => Learner::MinSize(config.depth, config.budget),
        LearnerKind::Zero => Learner::Zero,
    };
    let mut rows = Vec::new();
    for (ei, &eps) in config.eps.iter().enumerate() {
        let dist = config.distribution(eps)?;
        let learner = match &learner {
            Learner::Exact(p, _) => Learner::Exact(p.clone(), p.risks(&dist)),
            Learner::Sampled(d, m) => Learner::Sampled(d.clone(), *m),
            Learner::MinSize(d, b) => Learner::MinSize(*d, *b),
            Learner::Zero => Learner::Zero,
        };
        for (ni, &n) in config.n.iter().enumerate() {
            let trials = exec::map_range(mode, config.trials, |t| {
                let seed = rng::derive(config.seed, &[ei as u64, ni as u64, t as u64]);
                run_trial(&learner, &dist, n, config.max_resample, seed)
            });
            let risks: Vec<f64> = trials.iter().filter_map(|t| t.risk).collect();
            let k = risks.len();
            let mean = if k == 0 {
                f64::NAN
            } else {
                risks.iter().sum::<f64>() / k as f64
            };
            let var = if k < 2 {
                0.0
            } else {
                risks.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1) as f64
            };
            let draws: usize = trials.iter().map(|t| t.draws).sum();
            let inconsistent: usize = trials.iter().map(|t| t.inconsistent).sum();
            let eps_tr = eps_tr_exact(&dist, n).unwrap_or(f64::NAN);
            rows.push(ExperimentRow {
                eps,
                n,
                trials: k,
                mean_risk: mean,
                stderr: (var / k.max(1) as f64).sqrt(),
                eps_tr,
                curve: CurvePoint::new(eps)?,
                inconsistent_frac: inconsistent as f64 / draws.max(1) as f64,
                failures: trials.into_iter().filter_map(|t| t.error).collect(),
            });
        }
    }
    Ok(rows)
}
