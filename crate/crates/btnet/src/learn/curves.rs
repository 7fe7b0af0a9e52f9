//! Closed-form risk curves and the helper function `φ`.

use crate::error::{Error, Result};

/// `H(ε) = −ε log2 ε − (1−ε) log2(1−ε)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "entropy argument {eps} outside [0, 1]"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(eps) + term(1.0 - eps))
}

fn check_phi(eps: f64, t: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) || t <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "φ needs 0 < ε < 1/2 and t > 0, got ({eps}, {t})"
        )));
    }
    Ok(())
}

/// `φ_ε(t) = ε^t / (ε^t + (1−ε)^t)`: the posterior flip probability of a point
/// seen `t` times with agreeing labels.
pub fn phi(eps: f64, t: f64) -> Result<f64> {
    check_phi(eps, t)?;
    Ok(1.0 / (1.0 + (1.0 / eps - 1.0).powf(t)))
}

fn phi_slope(eps: f64, t: f64) -> f64 {
    let r = 1.0 / eps - 1.0;
    let rt = r.powf(t);
    -rt * r.ln() / ((1.0 + rt) * (1.0 + rt))
}

/// Tangent line of `φ` at `t = 1`, a lower bound by convexity.
pub fn phi_tangent_bound(eps: f64, t: f64) -> Result<f64> {
    check_phi(eps, t)?;
    Ok(eps + phi_slope(eps, 1.0) * (t - 1.0))
}

/// One row of the overfitting taxonomy at noise level `ε★`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub eps: f64,
    pub bayes: f64,
    /// `2ε(1−ε)`.
    pub independent: f64,
    /// `1 − 2^(−H(ε))`.
    pub arbitrary: f64,
    pub trivial: f64,
}

impl CurvePoint {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&eps) {
            return Err(Error::InvalidArgument(format!(
                "ε★ = {eps} outside [0, 1/2]"
            )));
        }
        Ok(CurvePoint {
            eps,
            bayes: eps,
            independent: 2.0 * eps * (1.0 - eps),
            arbitrary: 1.0 - (-binary_entropy(eps)?).exp2(),
            trivial: 0.5,
        })
    }

    /// Clean-domain risks `L_D0` of the three noisy curves.
    pub fn clean(&self) -> Option<(f64, f64, f64)> {
        if self.eps >= 0.5 {
            return None;
        }
        let f = |l| noisy_to_clean(l, self.eps).ok().map(|c| c.value);
        Some((f(self.bayes)?, f(self.independent)?, f(self.arbitrary)?))
    }
}

pub fn tempered_curves(grid: &[f64]) -> Result<Vec<CurvePoint>> {
    grid.iter().map(|&e| CurvePoint::new(e)).collect()
}

/// `n + 1` evenly spaced noise levels on `[0, 1/2]`.
pub fn eps_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| 0.5 * i as f64 / n as f64).collect()
}

/// `1 − Q^(−H(ε))`, the arbitrary-noise bound for `Q`-level quantization.
pub fn high_quantization_bound(eps: f64, q: f64) -> Result<f64> {
    if q < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "quantization level {q} below 2"
        )));
    }
    Ok(1.0 - q.powf(-binary_entropy(eps)?))
}

/// Curve plus a user-supplied additive slack, for bounds whose lower-order
/// constants are not pinned down.
pub fn bound_family(curve: f64, slack: f64) -> f64 {
    (curve + slack).min(1.0)
}

/// A clean-domain risk, flagged when it had to be clamped into `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CleanRisk {
    pub value: f64,
    pub clamped: bool,
}

/// `L_D0 = (L_D − ε★) / (1 − 2ε★)`.
pub fn noisy_to_clean(risk: f64, eps: f64) -> Result<CleanRisk> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidArgument(format!(
            "ε★ = {eps} must lie in [0, 1/2)"
        )));
    }
    let v = (risk - eps) / (1.0 - 2.0 * eps);
    let clamped = !(0.0..=1.0).contains(&v);
    Ok(CleanRisk {
        value: v.clamp(0.0, 1.0),
        clamped,
    })
}

/// `L_D = ε★ + (1 − 2ε★) L_D0`.
pub fn clean_to_noisy(clean: f64, eps: f64) -> f64 {
    eps + (1.0 - 2.0 * eps) * clean
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert!((phi(0.3, 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert!((phi(0.25, 2.0).unwrap() - 0.1).abs() < 1e-15);
        let p = CurvePoint::new(0.5).unwrap();
        assert!((p.independent - 0.5).abs() < 1e-15 && (p.arbitrary - 0.5).abs() < 1e-15);
        let z = CurvePoint::new(0.0).unwrap();
        assert_eq!((z.bayes, z.independent, z.arbitrary), (0.0, 0.0, 0.0));
        assert!(
            (high_quantization_bound(0.2, 2.0).unwrap() - CurvePoint::new(0.2).unwrap().arbitrary)
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn clean_conversion() {
        assert_eq!(noisy_to_clean(0.2, 0.2).unwrap().value, 0.0);
        assert!((noisy_to_clean(0.32, 0.2).unwrap().value - 0.2).abs() < 1e-12);
        assert!((noisy_to_clean(0.5, 0.3).unwrap().value - 0.5).abs() < 1e-12);
        assert!(noisy_to_clean(0.1, 0.2).unwrap().clamped);
        assert!(noisy_to_clean(0.3, 0.5).is_err());
    }
}
