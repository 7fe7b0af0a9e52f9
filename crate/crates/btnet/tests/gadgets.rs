use std::collections::HashSet;

use btnet::gadgets::{
    dnf_term_bound, find_injective_linear, find_sign_matrix, identity_chain, interval_terms,
    sign_width, xor_compose, Interval, SIGN_WIDTH_FACTOR,
};
use btnet::network::bias_range;
use btnet::{Bits, Layer, Mode, Network};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(r: &mut ChaCha8Rng, d0: usize) -> Network {
    let depth = r.random_range(1..=3);
    let mut dims = vec![d0];
    dims.extend((1..depth).map(|_| r.random_range(1..=4)));
    dims.push(1);
    let layers = dims
        .windows(2)
        .map(|w| {
            let (lo, hi) = bias_range(w[0], false);
            let mut l = Layer::zeros(w[1], w[0], false);
            for i in 0..w[1] {
                for j in 0..w[0] {
                    l.set_weight(i, j, r.random_range(0..=1));
                }
                l.set_bias(i, r.random_range(lo..=hi));
                l.set_scale(i, r.random_range(-1..=1));
            }
            l
        })
        .collect();
    Network::new(layers).unwrap()
}

fn distinct_points(r: &mut ChaCha8Rng, d0: usize, n: usize) -> Vec<Bits> {
    let mut seen = HashSet::new();
    while seen.len() < n {
        seen.insert(r.random_range(0..1u64 << d0));
    }
    let mut v: Vec<u64> = seen.into_iter().collect();
    v.sort_unstable();
    v.into_iter().map(|x| Bits::from_u64(x, d0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn xor_compose_is_commutative_and_self_cancelling(seed: u64, d0 in 1usize..=6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_net(&mut r, d0), random_net(&mut r, d0));
        let ab = xor_compose(&a, &b).unwrap().output_table(Mode::Sequential).unwrap();
        let ba = xor_compose(&b, &a).unwrap().output_table(Mode::Sequential).unwrap();
        prop_assert_eq!(&ab, &ba);
        let aa = xor_compose(&a, &a).unwrap().output_table(Mode::Sequential).unwrap();
        prop_assert!(aa.iter().all(|&y| !y));
    }

    #[test]
    fn dyadic_cover_is_exact_and_small(bits in 1usize..=16, a: u64, b: u64) {
        let range = 1u64 << bits;
        let (lo, hi) = { let (x, y) = (a % (range + 1), b % (range + 1)); (x.min(y), x.max(y)) };
        let terms = interval_terms(Interval { lo, hi }, bits);
        prop_assert!(terms.len() <= 2 * bits.max(1));
        prop_assert!(terms.len() <= dnf_term_bound(bits));
        // Terms are disjoint dyadic blocks, so their sizes must add up.
        let covered: u64 = terms.iter().map(|t| 1u64 << (bits - t.len())).sum();
        prop_assert_eq!(covered, hi - lo);
        for probe in [lo, hi.saturating_sub(1), (lo + hi) / 2] {
            if probe < range {
                let hit = terms.iter().any(|t| t.iter().all(|&(j, v)| (probe >> j & 1 == 1) == v));
                prop_assert_eq!(hit, lo <= probe && probe < hi);
            }
        }
    }
}

#[test]
fn identity_chain_passes_its_input() {
    for depth in 1..=5 {
        let net = identity_chain(depth).unwrap();
        assert_eq!(net.depth(), depth);
        assert!(!net.eval_bit(0) && net.eval_bit(1));
    }
}

#[test]
fn injective_linear_maps() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for t in 0..50 {
        let d0 = r.random_range(4..=20);
        let n = r.random_range(2..=64usize.min(1 << d0));
        let domain = distinct_points(&mut r, d0, n);
        let map = find_injective_linear(&domain, t, 64).unwrap();
        let images: HashSet<Bits> = domain.iter().map(|x| map.apply(x)).collect();
        assert_eq!(images.len(), n, "trial {t}");
    }
}

/// Sweep behind the sign-layer width constant: with the default factor a
/// random `±1` matrix is injective on random point sets within a handful of
/// draws (half the factor already needs dozens on some sets), while a much
/// narrower layer keeps failing.
#[test]
fn sign_width_calibration() {
    let mut r = ChaCha8Rng::seed_from_u64(17);
    let mut worst_attempts = 0;
    for d0 in [4, 8, 12, 16, 24, 32] {
        for n in [16, 64, 256] {
            if n > 1 << d0 {
                continue;
            }
            for seed in 0..8 {
                let domain = distinct_points(&mut r, d0, n);
                let attempts = (1..=64)
                    .find(|&k| find_sign_matrix(&domain, seed, SIGN_WIDTH_FACTOR, k).is_ok())
                    .unwrap_or_else(|| {
                        panic!(
                            "d0 {d0} N {n}: width {} never injective",
                            sign_width(d0, n, SIGN_WIDTH_FACTOR)
                        )
                    });
                worst_attempts = worst_attempts.max(attempts);
            }
        }
    }
    assert!(worst_attempts <= 8, "needed {worst_attempts} attempts");
    let domain = distinct_points(&mut r, 16, 256);
    assert!(find_sign_matrix(&domain, 0, 0.25, 64).is_err());
}
