use btnet::btn_format::{parse_btn, to_btn_string};
use btnet::network::bias_range;
use btnet::{Bits, Layer, Mode, Network};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(seed: u64, d0: usize, hidden: &[usize], ternary: bool) -> Network {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = vec![d0];
    dims.extend_from_slice(hidden);
    dims.push(1);
    let layers = dims
        .windows(2)
        .enumerate()
        .map(|(l, w)| {
            let t = ternary && l == 0;
            let (lo, hi) = bias_range(w[0], false);
            let mut layer = Layer::zeros(w[1], w[0], t);
            for i in 0..w[1] {
                for j in 0..w[0] {
                    layer.set_weight(
                        i,
                        j,
                        if t {
                            r.random_range(-1..=1)
                        } else {
                            r.random_range(0..=1)
                        },
                    );
                }
                layer.set_bias(i, r.random_range(lo..=hi));
                layer.set_scale(i, r.random_range(-1..=1));
            }
            layer
        })
        .collect();
    Network::new(layers).unwrap()
}

fn table(net: &Network) -> Vec<Bits> {
    net.truth_table(Mode::Sequential).unwrap()
}

fn arb_shape() -> impl Strategy<Value = (u64, usize, Vec<usize>, bool)> {
    (
        any::<u64>(),
        1usize..=6,
        prop::collection::vec(1usize..=5, 0..=3),
        any::<bool>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hidden_permutations_preserve_function((seed, d0, hidden, ternary) in arb_shape(), perm_seed: u64) {
        let net = random_net(seed, d0, &hidden, ternary);
        let mut r = ChaCha8Rng::seed_from_u64(perm_seed);
        let mut permuted = net.clone();
        for (l, &width) in hidden.iter().enumerate() {
            let mut perm: Vec<usize> = (0..width).collect();
            perm.shuffle(&mut r);
            permuted = permuted.permute_hidden(l + 1, &perm).unwrap();
        }
        prop_assert_eq!(table(&net), table(&permuted));
    }

    #[test]
    fn zero_scale_neurons_ignore_their_weights((seed, d0, hidden, ternary) in arb_shape(), noise: u64) {
        let net = random_net(seed, d0, &hidden, ternary);
        let mut r = ChaCha8Rng::seed_from_u64(noise);
        let mut layers = net.clone().into_layers();
        for layer in &mut layers {
            for i in 0..layer.outputs() {
                if layer.scale(i) == 0 {
                    for j in 0..layer.inputs() {
                        let w = if layer.is_ternary() { r.random_range(-1..=1) } else { r.random_range(0..=1) };
                        layer.set_weight(i, j, w);
                    }
                }
            }
        }
        prop_assert_eq!(table(&net), table(&Network::new(layers).unwrap()));
    }

    #[test]
    fn modes_and_batch_agree((seed, d0, hidden, ternary) in arb_shape()) {
        let net = random_net(seed, d0, &hidden, ternary);
        let seq = table(&net);
        prop_assert_eq!(&seq, &net.truth_table(Mode::Parallel).unwrap());
        let inputs: Vec<Bits> = (0..1u64 << d0).map(|x| Bits::from_u64(x, d0)).collect();
        prop_assert_eq!(&seq, &net.evaluate_many(&inputs, Mode::Parallel).unwrap());
        for (x, y) in inputs.iter().zip(&seq) {
            prop_assert_eq!(&net.evaluate(x).unwrap(), y);
        }
    }

    #[test]
    fn text_format_roundtrips((seed, d0, hidden, ternary) in arb_shape()) {
        // A ternary layer without any −1 reads back as binary, so compare the
        // text and the function rather than the storage flag.
        let net = random_net(seed, d0, &hidden, ternary);
        let text = to_btn_string(&net);
        let back = parse_btn(&text).unwrap();
        prop_assert_eq!(to_btn_string(&back), text);
        prop_assert_eq!(table(&back), table(&net));
    }
}

#[test]
fn rejects_out_of_range_bias() {
    let mut l = Layer::zeros(1, 2, false);
    l.set_bias(0, 3);
    assert!(Network::new(vec![l.clone()]).is_err());
    assert!(Network::new_wide(vec![l]).is_ok());
}

#[test]
fn wrong_input_width_is_a_shape_error() {
    let net = random_net(1, 3, &[2], false);
    assert!(matches!(
        net.evaluate(&Bits::zeros(4)),
        Err(btnet::Error::Shape {
            expected: 3,
            got: 4
        })
    ));
}
