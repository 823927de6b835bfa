//! The level means `M_p(n, f)`, the Hardy norm `sup_n M_p(n, f)` and the
//! little-space diagnostic `M_p(n, f) -> 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::TreeFunction;
use crate::scalar::{Exponent, Magnitude, Quantity, TreeScalar};
use crate::tree::LevelTree;

/// `M_p^p(n, f)`, exact in rational mode.
pub fn mean_p_power<T: TreeScalar>(
    tree: &LevelTree,
    f: &TreeFunction<T>,
    p: Exponent,
    n: usize,
) -> Result<T::Magnitude> {
    let width = tree.gamma(n)?;
    let mut total = <T::Magnitude as num_traits::Zero>::zero();
    for s in f.level(n) {
        let weight = T::Magnitude::from_ratio(&s.len, width);
        total = total + weight * s.value.abs_pow(p)?;
    }
    Ok(total)
}

/// `M_p(n, f)`.
pub fn mean_p<T: TreeScalar>(tree: &LevelTree, f: &TreeFunction<T>, p: Exponent, n: usize) -> Result<f64> {
    Ok(mean_p_power(tree, f, p, n)?.to_quantity().root(p))
}

/// `M_p^p(n, f)` for `n = 0..levels`.
pub fn level_means<T: TreeScalar>(
    tree: &LevelTree,
    f: &TreeFunction<T>,
    p: Exponent,
    levels: usize,
) -> Result<Vec<T::Magnitude>> {
    (0..levels).map(|n| mean_p_power(tree, f, p, n)).collect()
}

/// `sup_n M_p^p(n, f)` and the smallest level attaining it.
pub fn hardy_norm_p_power<T: TreeScalar>(
    tree: &LevelTree,
    f: &TreeFunction<T>,
    p: Exponent,
) -> Result<(T::Magnitude, usize)> {
    f.check_within(tree)?;
    let mut best = <T::Magnitude as num_traits::Zero>::zero();
    let mut at = 0;
    for n in 0..f.level_count() {
        let m = mean_p_power(tree, f, p, n)?;
        if m > best {
            best = m;
            at = n;
        }
    }
    Ok((best, at))
}

/// Hardy norm of a finitely supported function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionNorm {
    pub p: Exponent,
    /// `‖f‖^p`.
    pub value_p_power: Quantity,
    pub value: f64,
    pub attained_level: usize,
    /// `M_p^p(n, f)` for every level up to the last nonzero one.
    pub level_means: Vec<Quantity>,
}

pub fn hardy_norm<T: TreeScalar>(tree: &LevelTree, f: &TreeFunction<T>, p: Exponent) -> Result<FunctionNorm> {
    f.check_within(tree)?;
    let means = level_means(tree, f, p, f.level_count())?;
    let mut at = 0;
    for (n, m) in means.iter().enumerate() {
        if m > &means[at] {
            at = n;
        }
    }
    let value_p_power = means
        .get(at)
        .map_or(Quantity::Exact(num_traits::Zero::zero()), |m| m.to_quantity());
    Ok(FunctionNorm {
        p,
        value: value_p_power.root(p),
        value_p_power,
        attained_level: at,
        level_means: means.iter().map(Magnitude::to_quantity).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LittleSpaceVerdict {
    Vanishing,
    Stationary,
    Inconclusive,
}

/// `M_p^p(n, f)` by level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanProfile {
    pub p: Exponent,
    pub values: Vec<Quantity>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LittleSpaceReport {
    pub profile: MeanProfile,
    pub verdict: LittleSpaceVerdict,
    pub finitely_supported: bool,
    /// Levels `[lo, hi]` inspected by the tail test (rule-generated functions only).
    pub tail_window: Option<(usize, usize)>,
    pub tail_monotone: Option<bool>,
}

const TAIL_TOL: f64 = 1e-12;

/// Classifies whether `M_p(n, f) -> 0`.
///
/// A finitely supported function always vanishes eventually. For a function
/// carrying a horizon the tail `[h/2, h]` is inspected: a constant tail is
/// stationary, a tail whose second half peaks strictly below its first half
/// is vanishing, anything else is inconclusive.
pub fn little_space_profile<T: TreeScalar>(
    tree: &LevelTree,
    f: &TreeFunction<T>,
    p: Exponent,
) -> Result<LittleSpaceReport> {
    match f.horizon() {
        None => {
            let values = level_means(tree, f, p, (f.level_count() + 1).min(tree.depth() + 1))?;
            Ok(LittleSpaceReport {
                profile: MeanProfile {
                    p,
                    values: values.iter().map(Magnitude::to_quantity).collect(),
                },
                verdict: LittleSpaceVerdict::Vanishing,
                finitely_supported: true,
                tail_window: None,
                tail_monotone: None,
            })
        }
        Some(h) => {
            if h > tree.depth() {
                return Err(Error::OutOfDepth {
                    level: h,
                    depth: tree.depth(),
                });
            }
            let values: Vec<Quantity> = level_means(tree, f, p, h + 1)?
                .iter()
                .map(Magnitude::to_quantity)
                .collect();
            let lo = h / 2;
            let tail: Vec<f64> = values[lo..].iter().map(Quantity::to_f64).collect();
            let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + TAIL_TOL));
            let (max, min) = tail
                .iter()
                .fold((f64::MIN, f64::MAX), |(a, b), &x| (a.max(x), b.min(x)));
            let verdict = if tail.len() < 2 {
                LittleSpaceVerdict::Inconclusive
            } else if max - min <= TAIL_TOL * max.abs() {
                if max == 0.0 {
                    LittleSpaceVerdict::Vanishing
                } else {
                    LittleSpaceVerdict::Stationary
                }
            } else {
                let mid = tail.len() / 2;
                let first = tail[..mid].iter().cloned().fold(f64::MIN, f64::max);
                let second = tail[mid..].iter().cloned().fold(f64::MIN, f64::max);
                if second < first * (1.0 - TAIL_TOL) {
                    LittleSpaceVerdict::Vanishing
                } else {
                    LittleSpaceVerdict::Inconclusive
                }
            };
            Ok(LittleSpaceReport {
                profile: MeanProfile { p, values },
                verdict,
                finitely_supported: false,
                tail_window: Some((lo, h)),
                tail_monotone: Some(monotone),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Segment;
    use crate::tree::{materialize, TreeSpec, VertexId};
    use num_bigint::BigUint;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn indicator_of_root() {
        let t = materialize(&TreeSpec::homogeneous(3), 4).unwrap();
        let f = TreeFunction::<BigRational>::indicator(&VertexId::root());
        for p in [1, 2, 5] {
            let p = Exponent::integer(p);
            assert_eq!(mean_p_power(&t, &f, p, 0).unwrap(), q(1, 1));
            assert!(mean_p_power(&t, &f, p, 2).unwrap().is_zero());
            let norm = hardy_norm(&t, &f, p).unwrap();
            assert_eq!(norm.value, 1.0);
            assert_eq!(norm.attained_level, 0);
        }
    }

    #[test]
    fn indicator_of_deep_vertex() {
        let t = materialize(&TreeSpec::homogeneous(2), 6).unwrap();
        let f = TreeFunction::<BigRational>::indicator(&VertexId::new(5, 7u32));
        assert_eq!(mean_p_power(&t, &f, Exponent::integer(3), 5).unwrap(), q(1, 32));
    }

    #[test]
    fn blowup_profile_norm() {
        // f = -1/λ^{n+1} on whole levels, |λ| = 1/2, truncated at level 6.
        let t = materialize(&TreeSpec::homogeneous(2), 6).unwrap();
        let levels = (0..=6)
            .map(|n| {
                let v = -num_traits::pow(q(2, 1), n + 1);
                vec![Segment::new(0u32, BigUint::one() << n, v)]
            })
            .collect();
        let f = TreeFunction::from_level_segments(levels);
        for p in [1, 2] {
            let norm = hardy_norm(&t, &f, Exponent::integer(p)).unwrap();
            assert_eq!(
                norm.value_p_power,
                Quantity::Exact(num_traits::pow(q(128, 1), p as usize))
            );
            assert_eq!(norm.attained_level, 6);
        }
        let norm = hardy_norm(
            &t,
            &f.map_values(crate::scalar::rational_to_f64),
            Exponent::new(1.5).unwrap(),
        )
        .unwrap();
        assert!((norm.value - 128.0).abs() < 1e-9);
    }

    #[test]
    fn finitely_supported_is_vanishing() {
        let t = materialize(&TreeSpec::homogeneous(2), 5).unwrap();
        let f = TreeFunction::<f64>::level_constant(&t, 3, 1.0).unwrap();
        let r = little_space_profile(&t, &f, Exponent::integer(2)).unwrap();
        assert_eq!(r.verdict, LittleSpaceVerdict::Vanishing);
        assert_eq!(r.profile.values.len(), 5);
    }

    #[test]
    fn constant_one_is_stationary() {
        let t = materialize(&TreeSpec::homogeneous(2), 8).unwrap();
        let levels = (0..=8)
            .map(|n| vec![Segment::new(0u32, BigUint::one() << n, 1.0f64)])
            .collect();
        let f = TreeFunction::from_level_segments(levels).with_horizon(Some(8));
        let r = little_space_profile(&t, &f, Exponent::integer(1)).unwrap();
        assert_eq!(r.verdict, LittleSpaceVerdict::Stationary);
    }

    #[test]
    fn out_of_tree_support_is_rejected() {
        let t = materialize(&TreeSpec::homogeneous(2), 3).unwrap();
        let f = TreeFunction::<f64>::indicator(&VertexId::new(2, 9u32));
        assert!(hardy_norm(&t, &f, Exponent::integer(1)).is_err());
        let g = TreeFunction::<f64>::indicator(&VertexId::new(4, 0u32));
        assert!(matches!(
            hardy_norm(&t, &g, Exponent::integer(1)),
            Err(Error::OutOfDepth { .. })
        ));
    }
}
