//! Seeded random finitely supported functions and spectral parameters.
//!
//! Every trial draws from its own ChaCha stream, so results do not depend on
//! how trials are scheduled across threads.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::function::{Segment, TreeFunction};
use crate::tree::{LevelTree, VertexId};

/// The generator for trial `stream` under `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `a/b` with `a` in `[-5, 5] \ {0}` and `b` in `[1, 4]`.
pub fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    let mut a: i64 = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        a = -a;
    }
    BigRational::new(BigInt::from(a), BigInt::from(rng.gen_range(1..=4i64)))
}

/// A random vertex at `level`.
pub fn random_vertex<R: Rng>(rng: &mut R, tree: &LevelTree, level: usize) -> VertexId {
    let width = tree.gamma(level).expect("level within depth");
    VertexId::new(level, rng.gen_biguint_below(width))
}

/// Shape of the random functions drawn by [`random_function`].
#[derive(Clone, Copy, Debug)]
pub struct FunctionShape {
    pub min_level: usize,
    pub max_level: usize,
    /// Number of segments is drawn from `1..=max_segments`.
    pub max_segments: usize,
}

/// A nonzero finitely supported rational function on levels
/// `min_level..=max_level`; segments are single vertices or ranges between
/// two random indices.
pub fn random_function<R: Rng>(rng: &mut R, tree: &LevelTree, shape: FunctionShape) -> TreeFunction<BigRational> {
    let top = shape.max_level.min(tree.depth());
    assert!(shape.min_level <= top, "empty level range for random functions");
    loop {
        let count = rng.gen_range(1..=shape.max_segments.max(1));
        let mut levels: Vec<Vec<Segment<BigRational>>> = vec![Vec::new(); top + 1];
        for _ in 0..count {
            let level = rng.gen_range(shape.min_level..=top);
            let width = tree.gamma(level).expect("level within depth");
            let a = rng.gen_biguint_below(width);
            let len = if rng.gen_bool(0.5) {
                BigUint::from(1u32)
            } else {
                let b = rng.gen_biguint_below(width);
                if b >= a {
                    b - &a + 1u32
                } else {
                    levels[level].push(Segment::new(b.clone(), &a - &b + 1u32, small_rational(rng)));
                    continue;
                }
            };
            levels[level].push(Segment::new(a, len, small_rational(rng)));
        }
        let f = TreeFunction::from_level_segments(levels);
        if !f.is_zero() {
            return f;
        }
    }
}

/// A random rational function with `g(root) != 0`.
pub fn random_function_nonzero_root<R: Rng>(
    rng: &mut R,
    tree: &LevelTree,
    shape: FunctionShape,
) -> TreeFunction<BigRational> {
    let f = random_function(rng, tree, FunctionShape { min_level: 0, ..shape });
    let root = VertexId::root();
    let at_root = f.get(&root);
    let bump = loop {
        let c = small_rational(rng);
        if c != -at_root.clone() {
            break c;
        }
    };
    f.add(&TreeFunction::from_points([(root, bump)]))
}

/// Uniform on the disk `|z| < radius`.
pub fn complex_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Uniform modulus in `[lo, hi]` with a uniform argument.
pub fn complex_in_annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// A rational `a/b` of either sign with `lo <= |a/b| <= hi`, `b` in `[1, 8]`.
pub fn rational_in_annulus<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> BigRational {
    loop {
        let b: i64 = rng.gen_range(1..=8);
        let a = rng.gen_range((lo * b as f64).ceil() as i64..=(hi * b as f64).floor() as i64);
        let x = BigRational::new(a.into(), b.into());
        let v = a as f64 / b as f64;
        if v >= lo && v <= hi {
            return if rng.gen_bool(0.5) { -x } else { x };
        }
    }
}
