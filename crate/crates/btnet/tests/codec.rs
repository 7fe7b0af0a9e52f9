use btnet::codec::{self, canonicalize, decode, encode, length_bound, length_bound_check};
use btnet::network::bias_range;
use btnet::{Layer, Mode, Network};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(
    r: &mut ChaCha8Rng,
    d0: usize,
    depth: usize,
    max_width: usize,
    ternary: bool,
    wide: bool,
) -> Network {
    let mut dims = vec![d0];
    for _ in 1..depth {
        dims.push(r.random_range(1..=max_width));
    }
    dims.push(r.random_range(1..=2));
    let layers = dims
        .windows(2)
        .enumerate()
        .map(|(l, w)| {
            let tern = ternary && l == 0;
            let (lo, hi) = bias_range(w[0], wide);
            let mut layer = Layer::zeros(w[1], w[0], tern);
            for i in 0..w[1] {
                for j in 0..w[0] {
                    let v = if tern {
                        r.random_range(-1i8..=1)
                    } else {
                        r.random_range(0i8..=1)
                    };
                    layer.set_weight(i, j, v);
                }
                // Small bias alphabets make ties (and twins) common.
                layer.set_bias(i, r.random_range(lo.max(-1)..=hi.min(2)));
                layer.set_scale(i, r.random_range(-1i8..=1));
            }
            // Occasionally duplicate a neuron to create twins.
            if w[1] > 1 && r.random_bool(0.3) {
                for j in 0..w[0] {
                    let v = layer.weight(0, j);
                    layer.set_weight(1, j, v);
                }
                let (b, g) = (layer.bias(0), layer.scale(0));
                layer.set_bias(1, b);
                layer.set_scale(1, g);
            }
            layer
        })
        .collect();
    if wide {
        Network::new_wide(layers).unwrap()
    } else {
        Network::new(layers).unwrap()
    }
}

fn shuffle_hidden(net: &Network, r: &mut ChaCha8Rng) -> Network {
    let mut out = net.clone();
    for l in 1..net.depth() {
        let mut perm: Vec<usize> = (0..net.dims()[l]).collect();
        perm.shuffle(r);
        out = out.permute_hidden(l, &perm).unwrap();
    }
    out
}

#[test]
fn five_hundred_networks_round_trip() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for t in 0..500 {
        let d0 = r.random_range(1..=6);
        let depth = r.random_range(1..=4);
        let net = random_net(&mut r, d0, depth, 8, t % 5 == 0, t % 7 == 0);
        let canon = canonicalize(&net).unwrap();
        assert!(codec::is_canonical_order(&canon));
        assert_eq!(
            canon.output_table(Mode::Sequential).unwrap(),
            net.output_table(Mode::Sequential).unwrap()
        );
        assert_eq!(
            canon.truth_table(Mode::Sequential).unwrap(),
            net.truth_table(Mode::Sequential).unwrap()
        );
        for depth_known in [false, true] {
            let bits = encode(&canon, depth_known).unwrap();
            let back = decode(&bits, depth_known.then_some(canon.depth())).unwrap();
            assert_eq!(back, canon, "parameters must survive the round trip");
            let bytes = codec::to_bytes(&bits);
            assert_eq!(codec::from_bytes(&bytes).unwrap(), bits);
        }
        let check = length_bound_check(&net).unwrap();
        assert!(check.within(), "{check:?}");
        worst = worst.max(check.bits as f64 - check.weights as f64);
    }
    println!("largest overhead over w: {worst} bits");
}

#[test]
fn permuted_networks_share_a_canonical_form() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let d0 = r.random_range(1..=5);
        let depth = r.random_range(2..=4);
        let net = random_net(&mut r, d0, depth, 6, false, false);
        let shuffled = shuffle_hidden(&net, &mut r);
        assert_eq!(
            canonicalize(&net).unwrap(),
            canonicalize(&shuffled).unwrap()
        );
    }
}

#[test]
fn already_sorted_single_layer_is_unchanged() {
    let mut r = ChaCha8Rng::seed_from_u64(13);
    let net = random_net(&mut r, 4, 1, 3, false, false);
    assert_eq!(canonicalize(&net).unwrap(), net);
}

#[test]
fn encode_rejects_unsorted_hidden_layers() {
    let mut h = Layer::zeros(2, 2, false);
    h.set_bias(0, 2);
    h.set_bias(1, 0);
    let out = Layer::zeros(1, 2, false);
    let net = Network::new(vec![h, out]).unwrap();
    assert!(encode(&net, false).is_err());
    assert!(encode(&canonicalize(&net).unwrap(), false).is_ok());
}

#[test]
fn branch_flips_at_equal_widths() {
    // A hidden layer as wide as its input uses the multiplicity table.
    let bits_for = |width: usize| {
        let net = Network::zeros(&[4, width, 1], false).unwrap();
        encode(&canonicalize(&net).unwrap(), true).unwrap().len()
    };
    let header = |width: usize| {
        let w = (4 * width + width) as u64;
        let gamma = 2 * (64 - (w + 1).leading_zeros() as usize) - 1;
        7 + gamma + 3 * codec::width_for(w + 1)
    };
    let out_layer = |width: usize| width + codec::width_for(2 * width as u64) + 2;
    // width 3 < 4: per-neuron biases (3 bits for 8 values) and scales.
    assert_eq!(bits_for(3), header(3) + 12 + 3 * (3 + 2) + out_layer(3));
    // width 4 ≥ 4: 8 biases × 3 scalars, each a 3-bit multiplicity.
    assert_eq!(bits_for(4), header(4) + 16 + 24 * 3 + out_layer(4));
}

#[test]
fn multiplicity_branch_rebuilds_sorted_runs() {
    let mut h = Layer::zeros(5, 2, false);
    let pairs = [(-1, 1), (0, -1), (0, -1), (2, 0), (2, 1)];
    for (i, &(b, g)) in pairs.iter().enumerate() {
        h.set_bias(i, b);
        h.set_scale(i, g);
        h.set_weight(i, i % 2, 1);
    }
    let net = Network::new(vec![h, Layer::zeros(1, 5, false)]).unwrap();
    let canon = canonicalize(&net).unwrap();
    let back = decode(&encode(&canon, false).unwrap(), None).unwrap();
    let layer = back.layer(1);
    let got: Vec<(i64, i8)> = (0..5).map(|i| (layer.bias(i), layer.scale(i))).collect();
    assert_eq!(got, pairs);
}

#[test]
fn truncated_streams_fail_with_offsets() {
    let mut r = ChaCha8Rng::seed_from_u64(14);
    let net = canonicalize(&random_net(&mut r, 4, 3, 5, false, false)).unwrap();
    let bits = encode(&net, false).unwrap();
    for cut in [1, 5, bits.len() / 2, bits.len() - 1] {
        match decode(&bits[..cut], None) {
            Err(btnet::Error::Malformed { offset, .. }) => assert!(offset <= cut),
            other => panic!("cut at {cut}: {other:?}"),
        }
    }
}

#[test]
fn bound_overhead_grows_sublinearly() {
    let overhead = |w: usize| length_bound(w) - w as f64;
    assert!(length_bound(1).is_finite());
    for w in [64usize, 256, 1024, 4096] {
        assert!(overhead(2 * w) < 2.0 * overhead(w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn length_ignores_hidden_order(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let d0 = r.random_range(1..=5);
        let net = random_net(&mut r, d0, 3, 6, false, false);
        let a = encode(&canonicalize(&net).unwrap(), false).unwrap().len();
        let b = encode(&canonicalize(&shuffle_hidden(&net, &mut r)).unwrap(), false).unwrap().len();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decode_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        if let Ok(bits) = codec::from_bytes(&bytes) {
            let _ = decode(&bits, None);
            let _ = decode(&bits, Some(2));
        }
    }
}
