//! Exact consistency probabilities via exponential generating functions.
//!
//! A dataset is consistent iff, for every input, its copies were either all
//! flipped or none was. Grouping samples by input, the probability factorizes
//! into a product of per-point series `Σ_k (p t)^k / k! · (q^k + (1−q)^k)`,
//! and `N!` times the coefficient of `t^N` is `P(consistent)`.

use crate::error::{Error, Result};
use crate::learn::data::{sample_with, DataDistribution};
use crate::rng;

/// Largest support handled exactly.
pub const EXACT_SUPPORT_CAP: usize = 1024;
/// Largest sample size handled exactly.
pub const EXACT_N_CAP: usize = 128;

fn mul_trunc(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

struct Series {
    /// Per-point consistency series.
    g: Vec<Vec<f64>>,
    /// Per-point series with the first sample fixed at the point and flipped.
    h: Vec<Vec<f64>>,
    mass: Vec<f64>,
}

fn series(dist: &DataDistribution, n: usize) -> Result<Series> {
    let support: Vec<usize> = (0..dist.pmf().len())
        .filter(|&x| dist.pmf()[x] > 0.0)
        .collect();
    if support.len() > EXACT_SUPPORT_CAP || n > EXACT_N_CAP {
        return Err(Error::InvalidArgument(format!(
            "exact computation needs support ≤ {EXACT_SUPPORT_CAP} and N ≤ {EXACT_N_CAP}; use the Monte-Carlo estimate"
        )));
    }
    let len = n + 1;
    let mut g = Vec::with_capacity(support.len());
    let mut h = Vec::with_capacity(support.len());
    let mut mass = Vec::with_capacity(support.len());
    for &x in &support {
        let (p, q) = (dist.pmf()[x], dist.flip_prob(x));
        let mut term = 1.0; // p^k / k!
        let mut gx = Vec::with_capacity(len);
        let mut hx = Vec::with_capacity(len);
        let (mut qk, mut rk) = (1.0, 1.0);
        for k in 0..len {
            if k > 0 {
                term *= p / k as f64;
                qk *= q;
                rk *= 1.0 - q;
            }
            gx.push(term * if k == 0 { 1.0 } else { qk + rk });
            hx.push(term * qk * q);
        }
        g.push(gx);
        h.push(hx);
        mass.push(p);
    }
    Ok(Series { g, h, mass })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `P(S is inconsistent)` for `N` i.i.d. samples.
pub fn inconsistency_prob_exact(dist: &DataDistribution, n: usize) -> Result<f64> {
    Ok(1.0 - consistency_prob(dist, n)?)
}

fn consistency_prob(dist: &DataDistribution, n: usize) -> Result<f64> {
    let s = series(dist, n)?;
    let mut prod = vec![0.0; n + 1];
    prod[0] = 1.0;
    for gx in &s.g {
        prod = mul_trunc(&prod, gx, n + 1);
    }
    Ok((factorial(n) * prod[n]).clamp(0.0, 1.0))
}

/// `ε̂_tr = P(Y_1 ≠ h★(X_1) | S consistent)`.
pub fn eps_tr_exact(dist: &DataDistribution, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("ε̂_tr needs N ≥ 1".into()));
    }
    let s = series(dist, n)?;
    let m = s.g.len();
    let len = n;
    // prefix[i] = Π_{y<i} g_y, suffix[i] = Π_{y≥i} g_y, truncated to t^(N−1).
    let mut one = vec![0.0; len];
    one[0] = 1.0;
    let mut prefix = vec![one.clone()];
    for gx in &s.g {
        let next = mul_trunc(prefix.last().expect("nonempty"), gx, len);
        prefix.push(next);
    }
    let mut suffix = vec![one; m + 1];
    for i in (0..m).rev() {
        suffix[i] = mul_trunc(&suffix[i + 1], &s.g[i], len);
    }
    let mut joint = 0.0;
    for i in 0..m {
        let others = mul_trunc(&prefix[i], &suffix[i + 1], len);
        let with_first = mul_trunc(&others, &s.h[i], len);
        joint += s.mass[i] * with_first[n - 1];
    }
    joint *= factorial(n - 1);
    let cons = consistency_prob(dist, n)?;
    if cons <= 0.0 {
        return Err(Error::Internal(
            "consistency probability underflowed".into(),
        ));
    }
    Ok(joint / cons)
}

/// Monte-Carlo estimates with standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub eps_tr: f64,
    pub eps_tr_stderr: f64,
    pub inconsistency: f64,
    pub inconsistency_stderr: f64,
}

/// Estimates `ε̂_tr` and `P(inconsistent)` from `draws` sampled datasets.
pub fn consistency_mc(
    dist: &DataDistribution,
    n: usize,
    draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    let mut r = rng::stream(seed, &[0x3c]);
    let (mut consistent, mut flipped) = (0usize, 0usize);
    for _ in 0..draws {
        let s = sample_with(dist, n, &mut r)?;
        if s.is_consistent() {
            consistent += 1;
            let (x, y) = &s.samples()[0];
            if *y != dist.teacher_label(x.to_u64() as usize) {
                flipped += 1;
            }
        }
    }
    let se = |p: f64, k: usize| (p * (1.0 - p) / k.max(1) as f64).sqrt();
    let eps_tr = flipped as f64 / consistent.max(1) as f64;
    let inc = 1.0 - consistent as f64 / draws.max(1) as f64;
    Ok(McEstimate {
        eps_tr,
        eps_tr_stderr: se(eps_tr, consistent),
        inconsistency: inc,
        inconsistency_stderr: se(inc, draws),
    })
}
