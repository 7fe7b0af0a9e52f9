use btnet::field::{field_horner, find_irreducible, is_irreducible, poly_mul, FieldCtx, Poly2};
use proptest::prelude::*;

fn ctx_and_elems(count: usize) -> impl Strategy<Value = (FieldCtx, Vec<u64>)> {
    (1usize..=64, any::<u64>()).prop_flat_map(move |(n, seed)| {
        let ctx = FieldCtx::with_seed(n, seed).unwrap();
        let mask = ctx.mask();
        prop::collection::vec(any::<u64>().prop_map(move |v| v & mask), count)
            .prop_map(move |v| (ctx.clone(), v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms((f, v) in ctx_and_elems(3)) {
        let (a, b, c) = (v[0], v[1], v[2]);
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, b ^ c), f.mul(a, b) ^ f.mul(a, c));
        prop_assert_eq!(f.mul(a, 1), a);
        prop_assert!(f.mul(a, b) <= f.mask());
    }

    #[test]
    fn inverses((f, v) in ctx_and_elems(1)) {
        match f.inv(v[0]) {
            None => prop_assert_eq!(v[0], 0),
            Some(i) => prop_assert_eq!(f.mul(v[0], i), 1),
        }
    }

    #[test]
    fn frobenius_is_repeated_squaring((f, v) in ctx_and_elems(1), m in 0u32..6) {
        let table = f.frobenius_table(m);
        let direct = (0..m).fold(v[0], |z, _| f.square(z));
        prop_assert_eq!(f.frobenius(&table, v[0]), direct);
    }

    #[test]
    fn horner_matches_powers((f, v) in ctx_and_elems(5)) {
        let z = v[4];
        let want = (0..4).fold(0, |acc, i| acc ^ f.mul(v[i], f.pow(z, i as u128)));
        prop_assert_eq!(field_horner(&f, &v[..4], z), want);
    }

    #[test]
    fn products_are_reducible(a in 2u64..1 << 16, b in 2u64..1 << 16) {
        let p = poly_mul(&Poly2::from_u64(a), &Poly2::from_u64(b));
        prop_assert!(!is_irreducible(&p));
    }
}

#[test]
fn multiplicative_group_has_full_order() {
    // x^(2^n − 1) = 1 and the Frobenius has order n on every small field.
    for n in 1..=16 {
        let f = FieldCtx::with_seed(n, 3).unwrap();
        for a in 1..(1u64 << n).min(200) {
            assert_eq!(f.pow(a, (1u128 << n) - 1), 1, "n = {n}, a = {a}");
            assert_eq!(f.pow(a, 1u128 << n), a);
        }
    }
}

#[test]
fn irreducible_search_is_deterministic() {
    for n in [1, 2, 7, 13, 32, 64] {
        let p = find_irreducible(n, 11).unwrap();
        assert_eq!(p, find_irreducible(n, 11).unwrap());
        assert_eq!(p.degree(), Some(n));
        assert!(is_irreducible(&p));
    }
}
