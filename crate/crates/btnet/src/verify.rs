//! Runtime self-checks: every construction against an independent oracle.
//!
//! Quick mode keeps each suite exhaustive but small enough to finish in
//! seconds; full mode widens the grids.

use std::time::Instant;

use rand::Rng as _;

use crate::affine::AffineMap2;
use crate::bits::Bits;
use crate::codec;
use crate::gadgets::{self, Interval};
use crate::hsg::{self, KwiseGen, MemorizerConfig, PartialFunction};
use crate::learn::{self, search::random_network, DataDistribution, Noise};
use crate::network::{Layer, Network};
use crate::obtn::{obtn_to_btn, ObtnNetwork};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = std::result::Result<String, String>;

/// Exhaustive comparison of a single-output network with `oracle`.
pub fn check_against(
    net: &Network,
    oracle: impl Fn(u64) -> bool,
) -> std::result::Result<(), String> {
    for x in 0..1u64 << net.input_dim() {
        if net.eval_bit(x) != oracle(x) {
            return Err(format!("disagrees at input {x:0w$b}", w = net.input_dim()));
        }
    }
    Ok(())
}

fn parity(quick: bool) -> Check {
    let max_d = if quick { 10 } else { 12 };
    for d in 1..=max_d {
        check_against(&gadgets::parity_network(d).to_network(), |x| {
            x.count_ones() % 2 == 1
        })
        .map_err(|e| format!("d = {d}: {e}"))?;
    }
    Ok(format!("d ≤ {max_d}"))
}

fn xor_gadget(_: bool) -> Check {
    check_against(&gadgets::xor_gadget(), |x| x == 1 || x == 2)?;
    Ok("4 rows".into())
}

fn comparison(quick: bool) -> Check {
    let max_bits = if quick { 6 } else { 8 };
    let mut count = 0usize;
    for bits in 0..=max_bits {
        let range = 1u64 << bits;
        for lo in 0..=range {
            for hi in lo..=range {
                let c = gadgets::comparison_dnf(Interval { lo, hi }, range)
                    .map_err(|e| e.to_string())?;
                for z in 0..range {
                    let got = c
                        .evaluate(&Bits::from_u64(z, bits))
                        .map_err(|e| e.to_string())?
                        .get(0);
                    if got != (lo <= z && z < hi) {
                        return Err(format!("[{lo}, {hi}) over R = {range} wrong at {z}"));
                    }
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} intervals, R ≤ {}", 1 << max_bits))
}

fn affine(quick: bool) -> Check {
    let trials = if quick { 20 } else { 100 };
    let mut r = rng::stream(0xaf, &[]);
    for t in 0..trials {
        let (d, dout) = (r.random_range(1..=8), r.random_range(1..=8));
        let map = AffineMap2::random(d, dout, true, &mut r);
        let net = gadgets::affine_network(&map);
        for x in 0..1u64 << d {
            if net.eval_index(x).to_u64() != map.apply_u64(x) {
                return Err(format!("map {t} ({d} → {dout}) wrong at {x}"));
            }
        }
    }
    Ok(format!("{trials} maps"))
}

fn random_dims(r: &mut Rng, d0: usize) -> Vec<usize> {
    let depth = r.random_range(1..=3);
    let mut dims = vec![d0];
    dims.extend((1..depth).map(|_| r.random_range(1..=4)));
    dims.push(1);
    dims
}

fn xor_compose(quick: bool) -> Check {
    let trials = if quick { 20 } else { 200 };
    let mut r = rng::stream(0x40, &[]);
    for t in 0..trials {
        let d0 = r.random_range(1..=8);
        let h1 = random_network(&random_dims(&mut r, d0), &mut r).map_err(|e| e.to_string())?;
        let h2 = random_network(&random_dims(&mut r, d0), &mut r).map_err(|e| e.to_string())?;
        let h = gadgets::xor_compose(&h1, &h2).map_err(|e| e.to_string())?;
        check_against(&h, |x| h1.eval_bit(x) ^ h2.eval_bit(x))
            .map_err(|e| format!("pair {t}: {e}"))?;
    }
    Ok(format!("{trials} pairs"))
}

fn kwise(_: bool) -> Check {
    let (n, k) = (4, 3);
    let gen = KwiseGen::with_seed(n, k, 7).map_err(|e| e.to_string())?;
    let coords = 1usize << n;
    let outputs: Vec<u32> = (0..1u64 << (n * k))
        .map(|u| {
            let coeffs = gen.coeffs(&Bits::from_u64(u, n * k));
            (0..coords as u64).fold(0, |acc, z| acc | (gen.bit(&coeffs, z) as u32) << z)
        })
        .collect();
    let want = outputs.len() / 8;
    for a in 0..coords {
        for b in a + 1..coords {
            for c in b + 1..coords {
                let mut counts = [0usize; 8];
                for o in &outputs {
                    counts[((o >> a & 1) | (o >> b & 1) << 1 | (o >> c & 1) << 2) as usize] += 1;
                }
                if counts.iter().any(|&m| m != want) {
                    return Err(format!("coordinates ({a}, {b}, {c}): {counts:?}"));
                }
            }
        }
    }
    Ok(format!("n = {n}, k = {k}, all {} seeds", outputs.len()))
}

fn random_partial(r: &mut Rng, d0: usize, n: usize) -> PartialFunction {
    let mut xs: Vec<u64> = (0..1u64 << d0).collect();
    for i in 0..n {
        let j = r.random_range(i..xs.len());
        xs.swap(i, j);
    }
    let points = xs[..n]
        .iter()
        .map(|&x| (Bits::from_u64(x, d0), r.random::<bool>()))
        .collect();
    PartialFunction::new(d0, points).expect("distinct points")
}

fn memorizer(quick: bool) -> Check {
    let trials = if quick { 5 } else { 30 };
    let mut r = rng::stream(0x3e, &[]);
    for t in 0..trials {
        let d0 = r.random_range(2..=8);
        let n = r.random_range(1..=(1usize << d0).min(16));
        let f = random_partial(&mut r, d0, n);
        let config = MemorizerConfig {
            seed: t,
            ..MemorizerConfig::default()
        };
        let report = hsg::build_memorizer(&f, &config).map_err(|e| format!("function {t}: {e}"))?;
        if !report.consistent || !f.agrees(&report.network) {
            return Err(format!("function {t} not memorized"));
        }
    }
    Ok(format!("{trials} partial functions"))
}

fn codec_roundtrip(quick: bool) -> Check {
    let trials = if quick { 50 } else { 500 };
    let mut r = rng::stream(0xc0, &[]);
    for t in 0..trials {
        let d0 = r.random_range(1..=6);
        let net = random_network(&random_dims(&mut r, d0), &mut r).map_err(|e| e.to_string())?;
        let canon = codec::canonicalize(&net).map_err(|e| e.to_string())?;
        let bits = codec::encode(&canon, false).map_err(|e| e.to_string())?;
        let back = codec::decode(&bits, None).map_err(|e| format!("net {t}: {e}"))?;
        if back != canon {
            return Err(format!("net {t}: parameters changed"));
        }
        check_against(&back, |x| net.eval_bit(x)).map_err(|e| format!("net {t}: {e}"))?;
        let check = codec::length_bound_check(&net).map_err(|e| e.to_string())?;
        if !check.within() {
            return Err(format!(
                "net {t}: {} bits > bound {:.1}",
                check.bits, check.bound
            ));
        }
    }
    Ok(format!("{trials} networks"))
}

fn dale(quick: bool) -> Check {
    let trials = if quick { 20 } else { 100 };
    let mut r = rng::stream(0xda, &[]);
    for t in 0..trials {
        let d0 = r.random_range(1..=6);
        let mut dims = random_dims(&mut r, d0);
        *dims.last_mut().expect("nonempty") = r.random_range(1..=3);
        let layers: Vec<Layer> = random_network(&dims, &mut r)
            .map_err(|e| e.to_string())?
            .into_layers();
        let g = ObtnNetwork::new(layers).map_err(|e| e.to_string())?;
        let (h, s) = obtn_to_btn(&g);
        let last = g.layers().last().expect("nonempty");
        for i in 0..s.len() {
            if s.get(i) != (last.scale(i) == -1) {
                return Err(format!(
                    "net {t}: shift on output {i} does not track its scalar"
                ));
            }
        }
        for x in 0..1u64 << d0 {
            let gx = g.eval_index(x);
            let hx = h.eval_index(x);
            for (i, &v) in gx.iter().enumerate() {
                if hx.get(i) as i8 != v + s.get(i) as i8 {
                    return Err(format!("net {t}: output {i} wrong at {x}"));
                }
            }
        }
    }
    Ok(format!("{trials} networks"))
}

fn closed_forms(_: bool) -> Check {
    let e = |r: crate::Result<f64>| r.map_err(|e| e.to_string());
    for eps in learn::curves::eps_grid(101) {
        let lhs = 1.0 - (-e(learn::binary_entropy(eps))?).exp2();
        let rhs = 1.0 - eps.powf(eps) * (1.0 - eps).powf(1.0 - eps);
        if (lhs - rhs).abs() > 1e-12 {
            return Err(format!("entropy identity off at ε = {eps}"));
        }
        if eps < 0.5 {
            for clean in [0.0, 0.1, 0.3, 0.5] {
                let back = learn::noisy_to_clean(learn::clean_to_noisy(clean, eps), eps)
                    .map_err(|e| e.to_string())?;
                if (back.value - clean).abs() > 1e-12 {
                    return Err(format!("noisy/clean round trip off at ε = {eps}"));
                }
            }
        }
        if eps > 0.0 && eps < 0.5 {
            let ts: Vec<f64> = (1..=40).map(|i| i as f64 * 0.1).collect();
            let vals = ts
                .iter()
                .map(|&t| e(learn::phi(eps, t)))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if vals.windows(2).any(|w| w[1] > w[0])
                || vals.windows(3).any(|w| w[0] + w[2] < 2.0 * w[1] - 1e-12)
            {
                return Err(format!("φ not decreasing and convex at ε = {eps}"));
            }
            for (&t, &v) in ts.iter().zip(&vals) {
                if v < e(learn::phi_tangent_bound(eps, t))? - 1e-12 {
                    return Err(format!("tangent bound fails at ε = {eps}, t = {t}"));
                }
            }
        }
    }
    Ok("101-point grid".into())
}

fn probability(quick: bool) -> Check {
    let max_n = if quick { 8 } else { 12 };
    let mut teacher = Layer::zeros(1, 3, false);
    teacher.set_weight(0, 0, 1);
    teacher.set_scale(0, 1);
    let teacher = Network::new(vec![teacher]).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for eps in [0.05, 0.2, 0.4] {
        let dist = DataDistribution::uniform(teacher.clone(), Noise::Independent(eps))
            .map_err(|e| e.to_string())?;
        for n in 1..=max_n {
            let tr = learn::eps_tr_exact(&dist, n).map_err(|e| e.to_string())?;
            let inc = learn::inconsistency_prob_exact(&dist, n).map_err(|e| e.to_string())?;
            let bound = 0.5 * (n * n) as f64 * dist.d_max();
            if tr > eps + 1e-12 || inc > bound + 1e-12 {
                return Err(format!(
                    "ε = {eps}, N = {n}: ε̂_tr = {tr}, P(inconsistent) = {inc}"
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (ε, N) cells"))
}

type Suite = (&'static str, fn(bool) -> Check);

const SUITES: &[Suite] = &[
    ("parity networks", parity),
    ("xor gadget", xor_gadget),
    ("comparison dnf", comparison),
    ("affine networks", affine),
    ("xor composition", xor_compose),
    ("k-wise uniformity", kwise),
    ("memorizer", memorizer),
    ("codec", codec_roundtrip),
    ("dale conversion", dale),
    ("closed forms", closed_forms),
    ("probability bounds", probability),
];

/// Runs every suite in order.
pub fn run(quick: bool) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .map(|&(name, suite)| {
            let start = Instant::now();
            let result = suite(quick);
            let seconds = start.elapsed().as_secs_f64();
            let (passed, detail) = match result {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteOutcome {
                name,
                passed,
                detail,
                seconds,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutated_gadget_is_caught() {
        let mut layers = gadgets::xor_gadget().into_layers();
        layers[1].set_bias(0, 0);
        let broken = Network::new(layers).unwrap();
        assert!(check_against(&broken, |x| x == 1 || x == 2).is_err());
        assert!(check_against(&gadgets::xor_gadget(), |x| x == 1 || x == 2).is_ok());
    }

    #[test]
    fn quick_suites_pass() {
        for outcome in run(true) {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
