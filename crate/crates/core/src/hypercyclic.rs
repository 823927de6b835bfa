//! Hypercyclicity of `B` on the little Hardy space, and the right inverses
//! `T_n` that feed the Kitai–Gethner–Shapiro criterion.
//!
//! `(T_n g)(v) = g(u) / γ(n, u)` where `u` is the `n`-parent of `v` and
//! `γ(n, u)` counts the `n`-children of `u`, so that `B^n T_n g = g`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{Segment, TreeFunction};
use crate::gallery::Certificates;
use crate::hardy::hardy_norm_p_power;
use crate::random::{random_function, trial_rng, FunctionShape};
use crate::scalar::{Exponent, Magnitude, Quantity, TreeScalar};
use crate::shift::{apply_backward, forward_orbit_obstruction, Direction, ObstructionReport, OperatorKind};
use crate::tree::{LevelTree, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reason {
    LeafFound {
        vertex: VertexId,
    },
    GammaBounded {
        evidence: String,
    },
    GammaDivergent {
        evidence: String,
    },
    SNever {
        obstruction: Option<ObstructionReport>,
    },
    /// No closed form decides `γ(n) -> ∞`; the observed level sizes are attached.
    DepthLimited {
        #[serde(serialize_with = "crate::tree::serialize_big_vec")]
        gamma_profile: Vec<BigUint>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypercyclicityVerdict {
    pub operator: OperatorKind,
    pub verdict: Verdict,
    pub reason: Reason,
}

/// Decides hypercyclicity on `H^p_0`: never for `S`; for `B` exactly when
/// the tree is leafless and `γ(n) -> ∞`.
pub fn verdict(tree: &LevelTree, which: Direction) -> HypercyclicityVerdict {
    let operator = OperatorKind::new(which, 1).expect("power 1");
    let (verdict, reason) = match which {
        Direction::Forward => {
            let root = VertexId::root();
            let chi = TreeFunction::<BigRational>::indicator(&root);
            let obstruction = forward_orbit_obstruction(tree, &chi, &chi, Exponent::integer(1), tree.depth().min(4))
                .ok()
                .filter(|_| tree.depth() >= 1);
            (Verdict::No, Reason::SNever { obstruction })
        }
        Direction::Backward => backward_verdict(tree),
    };
    HypercyclicityVerdict {
        operator,
        verdict,
        reason,
    }
}

fn backward_verdict(tree: &LevelTree) -> (Verdict, Reason) {
    if let Some(vertex) = tree.first_leaf() {
        return (Verdict::No, Reason::LeafFound { vertex });
    }
    let certs = Certificates::for_spec(tree.spec());
    let limited = || {
        (
            Verdict::Inconclusive,
            Reason::DepthLimited {
                gamma_profile: tree.level_sizes(),
            },
        )
    };
    if certs.leafless() != Some(true) {
        return limited();
    }
    match certs.gamma_diverges() {
        Some(true) => (
            Verdict::Yes,
            Reason::GammaDivergent {
                evidence: format!(
                    "closed form: {}; γ({}) = {}",
                    certs.descriptions().first().cloned().unwrap_or_default(),
                    tree.depth(),
                    tree.gamma(tree.depth()).expect("depth level")
                ),
            },
        ),
        Some(false) => (
            Verdict::No,
            Reason::GammaBounded {
                evidence: "degrees are eventually 1, so γ(n) is eventually constant".into(),
            },
        ),
        None => limited(),
    }
}

/// `γ(n) <= γ(n+1)` for every materialized level.
pub fn gamma_nondecreasing(tree: &LevelTree) -> bool {
    (0..tree.depth()).all(|n| tree.gamma(n).ok() <= tree.gamma(n + 1).ok())
}

/// `T_n g`: each value of `g` at `u` is spread evenly over the `n`-children of `u`.
pub fn kgs_right_inverse<T: TreeScalar>(tree: &LevelTree, g: &TreeFunction<T>, n: usize) -> Result<TreeFunction<T>> {
    g.check_within(tree)?;
    let needed = g.max_support_level() + n;
    if !g.is_zero() && needed > tree.depth() {
        return Err(Error::DepthExceeded {
            needed,
            depth: tree.depth(),
        });
    }
    let mut levels: Vec<Vec<Segment<T>>> = vec![Vec::new(); g.level_count() + n];
    for (s, segs) in g.levels().iter().enumerate() {
        if segs.is_empty() {
            continue;
        }
        let map = tree.descendant_map(s, n)?;
        for seg in segs {
            let end = seg.end();
            for piece in map.pieces_between(&seg.start, &end) {
                let a = (&piece.start).max(&seg.start);
                let b = (&piece.end).min(&end);
                if piece.slope.is_zero() {
                    return Err(Error::LeafEncountered {
                        level: s,
                        index: a.to_string(),
                        generations: n,
                    });
                }
                levels[s + n].push(Segment {
                    start: &piece.image + &piece.slope * (a - &piece.start),
                    len: &piece.slope * (b - a),
                    value: seg.value.clone() / T::from_biguint(&piece.slope),
                });
            }
        }
    }
    Ok(TreeFunction::from_level_segments(levels))
}

/// One sampled `g` and the checks run on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KgsSample {
    pub index: u64,
    pub support_levels: (usize, usize),
    /// `‖g‖^p`.
    pub g_norm_p_power: Quantity,
    /// `B^N g = 0` for `N` past the support.
    pub nullity_holds: bool,
    /// `B^n T_n g = g` exactly for every checked `n`.
    pub identity_holds: bool,
    /// `‖T_n g‖^p <= max_s γ(s)/γ(s+n) ‖g‖^p` over the supported levels `s`.
    pub bound_holds: bool,
    /// `‖T_n g‖^p` for `n = 1..=n_max`.
    pub norms_p_power: Vec<Quantity>,
    pub decreasing: bool,
    /// `‖T_{n_max} g‖ / ‖g‖`.
    pub final_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KgsReport {
    pub verdict: HypercyclicityVerdict,
    pub forced: bool,
    pub p: Exponent,
    pub seed: u64,
    pub samples: u64,
    pub n_max: usize,
    pub identity_passes: u64,
    pub nullity_passes: u64,
    pub bound_passes: u64,
    pub decreasing_passes: u64,
    pub max_final_ratio: f64,
    pub gamma_nondecreasing: bool,
    pub interpretation: String,
    pub details: Vec<KgsSample>,
}

#[derive(Clone, Copy, Debug)]
pub struct KgsOptions {
    pub samples: u64,
    pub n_max: usize,
    pub p: Exponent,
    pub seed: u64,
    /// Run even when the verdict is not `yes`.
    pub force: bool,
}

fn check_sample(tree: &LevelTree, g: &TreeFunction<BigRational>, index: u64, o: &KgsOptions) -> Result<KgsSample> {
    let top = g.max_support_level();
    let low = (0..=top).find(|&l| !g.level(l).is_empty()).unwrap_or(0);
    let nullity_holds = apply_backward(tree, g, top + 1)?.is_zero();
    let (g_norm, _) = hardy_norm_p_power(tree, g, o.p)?;
    let mut identity_holds = true;
    let mut bound_holds = true;
    let mut norms = Vec::with_capacity(o.n_max);
    for n in 1..=o.n_max {
        let h = kgs_right_inverse(tree, g, n)?;
        identity_holds &= apply_backward(tree, &h, n)? == *g;
        let (hn, _) = hardy_norm_p_power(tree, &h, o.p)?;
        let factor = (low..=top)
            .filter(|&s| !g.level(s).is_empty())
            .map(|s| {
                Ok(BigRational::new(
                    tree.gamma(s)?.clone().into(),
                    tree.gamma(s + n)?.clone().into(),
                ))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .expect("g is nonzero");
        bound_holds &= hn <= factor * &g_norm;
        norms.push(hn);
    }
    let decreasing = norms.windows(2).all(|w| w[1] <= w[0]);
    let final_ratio = norms.last().map_or(0.0, |h| (h / &g_norm).to_quantity().root(o.p));
    Ok(KgsSample {
        index,
        support_levels: (low, top),
        g_norm_p_power: g_norm.to_quantity(),
        nullity_holds,
        identity_holds,
        bound_holds,
        norms_p_power: norms.iter().map(Magnitude::to_quantity).collect(),
        decreasing,
        final_ratio,
    })
}

/// Verifies the criterion's ingredients on seeded random rational `g`
/// supported on levels `<= min(depth/2, depth - n_max)`.
pub fn kgs_suite(tree: &LevelTree, options: KgsOptions) -> Result<KgsReport> {
    let v = verdict(tree, Direction::Backward);
    if v.verdict != Verdict::Yes && !options.force {
        return Err(Error::InvalidParameter(format!(
            "B is not certified hypercyclic here (verdict {:?}); force the suite to run anyway",
            v.verdict
        )));
    }
    if options.n_max == 0 || tree.depth() < options.n_max {
        return Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: format!("n_max = {} needs 1 <= n_max <= depth", options.n_max),
        });
    }
    let shape = FunctionShape {
        min_level: 0,
        max_level: (tree.depth() / 2).min(tree.depth() - options.n_max),
        max_segments: 4,
    };
    let details: Vec<KgsSample> = (0..options.samples)
        .into_par_iter()
        .map(|i| {
            let g = random_function(&mut trial_rng(options.seed, i), tree, shape);
            check_sample(tree, &g, i, &options)
        })
        .collect::<Result<_>>()?;
    let count = |f: fn(&KgsSample) -> bool| details.iter().filter(|s| f(s)).count() as u64;
    Ok(KgsReport {
        forced: v.verdict != Verdict::Yes,
        verdict: v,
        p: options.p,
        seed: options.seed,
        samples: options.samples,
        n_max: options.n_max,
        identity_passes: count(|s| s.identity_holds),
        nullity_passes: count(|s| s.nullity_holds),
        bound_passes: count(|s| s.bound_holds),
        decreasing_passes: count(|s| s.decreasing),
        max_final_ratio: details.iter().map(|s| s.final_ratio).fold(0.0, f64::max),
        gamma_nondecreasing: gamma_nondecreasing(tree),
        interpretation: "T_n divides by the number of n-children of the n-parent".into(),
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_inline, defaults};
    use crate::tree::{materialize, TreeSpec};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn tree(name: &str, depth: usize) -> LevelTree {
        materialize(&build_inline(name).unwrap().spec, depth).unwrap()
    }

    #[test]
    fn right_inverse_of_root_indicator() {
        let t = tree("homogeneous?q=3", 6);
        let g = TreeFunction::<BigRational>::indicator(&VertexId::root());
        for n in 1..=4 {
            let h = kgs_right_inverse(&t, &g, n).unwrap();
            assert_eq!(
                h.level(n),
                &[Segment::new(0u32, 3u32.pow(n as u32), q(1, 3i64.pow(n as u32)))]
            );
            assert_eq!(apply_backward(&t, &h, n).unwrap(), g);
        }
        assert!(matches!(kgs_right_inverse(&t, &g, 7), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn right_inverse_splits_over_pieces() {
        let t = tree("ceil_three_halves", 10);
        let g = TreeFunction::from_level_segments(vec![vec![], vec![], vec![Segment::new(0u32, 3u32, q(2, 1))]]);
        for n in 1..=5 {
            let h = kgs_right_inverse(&t, &g, n).unwrap();
            assert_eq!(apply_backward(&t, &h, n).unwrap(), g);
        }
    }

    #[test]
    fn right_inverse_hits_leaf() {
        let spec = TreeSpec::explicit(vec![vec![2], vec![0, 1]], 1);
        let t = materialize(&spec, 4).unwrap();
        let g = TreeFunction::<BigRational>::indicator(&VertexId::new(1, 0u32));
        assert!(matches!(
            kgs_right_inverse(&t, &g, 1),
            Err(Error::LeafEncountered { .. })
        ));
    }

    #[test]
    fn verdicts() {
        for entry in defaults() {
            let t = materialize(&entry.spec, 8).unwrap();
            assert_eq!(verdict(&t, Direction::Forward).verdict, Verdict::No);
        }
        assert_eq!(
            verdict(&tree("homogeneous?q=2", 8), Direction::Backward).verdict,
            Verdict::Yes
        );
        assert_eq!(
            verdict(&tree("homogeneous?q=1", 8), Direction::Backward).verdict,
            Verdict::No
        );
        let leafy = materialize(&TreeSpec::explicit(vec![vec![2], vec![0, 3]], 2), 5).unwrap();
        let v = verdict(&leafy, Direction::Backward);
        assert_eq!(v.verdict, Verdict::No);
        assert_eq!(
            v.reason,
            Reason::LeafFound {
                vertex: VertexId::new(1, 0u32)
            }
        );
        let generic = materialize(&TreeSpec::per_vertex("twos", |_, _| 2), 5).unwrap();
        assert_eq!(verdict(&generic, Direction::Backward).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn suite_on_homogeneous_two() {
        let t = tree("homogeneous?q=2", 24);
        let r = kgs_suite(
            &t,
            KgsOptions {
                samples: 20,
                n_max: 10,
                p: Exponent::integer(1),
                seed: 5,
                force: false,
            },
        )
        .unwrap();
        assert_eq!(r.identity_passes, 20);
        assert_eq!(r.nullity_passes, 20);
        assert_eq!(r.bound_passes, 20);
        assert_eq!(r.decreasing_passes, 20);
        assert!(r.max_final_ratio < 0.05);
        assert!(r.gamma_nondecreasing);
    }
}
