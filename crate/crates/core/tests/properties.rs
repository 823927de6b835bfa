use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use treeshift::hardy::hardy_norm_p_power;
use treeshift::random::{random_function, small_rational, trial_rng, FunctionShape};
use treeshift::shift::{apply_backward, apply_forward, backward_norm, forward_norm};
use treeshift::{materialize, Exponent, LevelTree, Quantity, TreeSpec, VertexId};

fn mixed_tree(seed: u64, max_degree: u64, depth: usize) -> LevelTree {
    let spec = TreeSpec::per_vertex("mixed", move |level, index| {
        let i = u64::try_from(index).unwrap_or(u64::MAX);
        let mut h = seed ^ (level as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ i.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
        h ^= h >> 29;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 32;
        1 + h % max_degree
    });
    materialize(&spec, depth).unwrap()
}

fn brute_descendants(tree: &LevelTree, v: &VertexId, m: usize) -> (BigUint, BigUint) {
    let mut lo = v.index.clone();
    let mut hi = &v.index + 1u32;
    for l in v.level..v.level + m {
        let (a, _) = tree.children(&VertexId::new(l, lo.clone())).unwrap();
        let last = VertexId::new(l, &hi - 1u32);
        let (b, d) = tree.children(&last).unwrap();
        lo = a;
        hi = b + d;
    }
    (lo, hi)
}

fn pow_p(x: &BigRational, p: u32) -> BigRational {
    num_traits::Pow::pow(x.abs(), p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn descendant_map_matches_walk(seed in any::<u64>(), r in 0usize..4, m in 0usize..4, pick in any::<u64>()) {
        let tree = mixed_tree(seed, 3, 7);
        let map = tree.descendant_map(r, m).unwrap();
        let width = tree.gamma(r).unwrap().clone();
        let index = BigUint::from(pick) % &width;
        let v = VertexId::new(r, index.clone());
        let (lo, hi) = brute_descendants(&tree, &v, m);
        prop_assert_eq!(map.eval(&index), lo.clone());
        prop_assert_eq!(map.count(&index), &hi - &lo);
        prop_assert_eq!(tree.gamma_sub(m, &v).unwrap(), &hi - &lo);
        prop_assert_eq!(map.preimage(&lo), index.clone());
        prop_assert_eq!(map.preimage(&(&hi - 1u32)), index);
        prop_assert_eq!(map.eval(&width), tree.gamma(r + m).unwrap().clone());
    }

    #[test]
    fn max_count_is_level_max(seed in any::<u64>(), r in 0usize..4, m in 1usize..4) {
        let tree = mixed_tree(seed, 4, 7);
        let width: u64 = u64::try_from(tree.gamma(r).unwrap()).unwrap();
        let best = (0..width)
            .map(|i| tree.gamma_sub(m, &VertexId::new(r, i)).unwrap())
            .max()
            .unwrap();
        prop_assert_eq!(tree.max_gamma_sub(m, r).unwrap(), best.clone());
        let arg = tree.argmax_gamma_sub(m, r).unwrap();
        prop_assert_eq!(tree.gamma_sub(m, &arg).unwrap(), best);
    }

    #[test]
    fn hardy_norm_is_homogeneous_and_subadditive(seed in any::<u64>(), p in 1u32..4) {
        let tree = mixed_tree(seed, 3, 6);
        let mut rng = trial_rng(seed, 1);
        let shape = FunctionShape { min_level: 0, max_level: 6, max_segments: 4 };
        let f = random_function(&mut rng, &tree, shape);
        let g = random_function(&mut rng, &tree, shape);
        let c = small_rational(&mut rng);
        let e = Exponent::integer(p);
        let (nf, _) = hardy_norm_p_power(&tree, &f, e).unwrap();
        prop_assert!(nf > BigRational::zero());
        let (ncf, _) = hardy_norm_p_power(&tree, &f.scale(&c), e).unwrap();
        prop_assert_eq!(ncf, pow_p(&c, p) * &nf);
        let (zero, _) = hardy_norm_p_power(&tree, &f.sub(&f), e).unwrap();
        prop_assert!(zero.is_zero());
        let (ng, _) = hardy_norm_p_power(&tree, &g, Exponent::integer(1)).unwrap();
        let (n1, _) = hardy_norm_p_power(&tree, &f, Exponent::integer(1)).unwrap();
        let (sum, _) = hardy_norm_p_power(&tree, &f.add(&g), Exponent::integer(1)).unwrap();
        prop_assert!(sum <= n1 + ng);
    }

    #[test]
    fn shifts_respect_norm_formulas(seed in any::<u64>(), m in 1usize..4, p in 1u32..3) {
        let depth = 7;
        let tree = mixed_tree(seed, 3, depth);
        let e = Exponent::integer(p);
        let mut rng = trial_rng(seed, 2);
        let forward = forward_norm(&tree, e, m).unwrap();
        let f = random_function(&mut rng, &tree, FunctionShape { min_level: 0, max_level: depth - m, max_segments: 4 });
        let (nf, _) = hardy_norm_p_power(&tree, &f, e).unwrap();
        let (ns, _) = hardy_norm_p_power(&tree, &apply_forward(&tree, &f, m).unwrap(), e).unwrap();
        let bound = forward.observed_p_power.mul(&Quantity::Exact(nf));
        prop_assert_ne!(Quantity::Exact(ns).compare(&bound), Ordering::Greater);

        let backward = backward_norm(&tree, e, m).unwrap();
        let g = random_function(&mut rng, &tree, FunctionShape { min_level: m, max_level: depth, max_segments: 4 });
        let (ng, _) = hardy_norm_p_power(&tree, &g, e).unwrap();
        let (nb, _) = hardy_norm_p_power(&tree, &apply_backward(&tree, &g, m).unwrap(), e).unwrap();
        let bound = backward.observed_p_power.mul(&Quantity::Exact(ng));
        prop_assert_ne!(Quantity::Exact(nb).compare(&bound), Ordering::Greater);
    }

    #[test]
    fn backward_undoes_forward_up_to_degree(seed in any::<u64>()) {
        // (BSf)(v) = deg(v) f(v)
        let tree = mixed_tree(seed, 3, 5);
        let mut rng = trial_rng(seed, 3);
        let f = random_function(&mut rng, &tree, FunctionShape { min_level: 0, max_level: 4, max_segments: 3 });
        let bsf = apply_backward(&tree, &apply_forward(&tree, &f, 1).unwrap(), 1).unwrap();
        for (v, value) in f.points(10_000).unwrap() {
            let d = BigRational::from_integer(tree.degree(&v).unwrap().into());
            prop_assert_eq!(bsf.get(&v), value * d);
        }
    }
}
