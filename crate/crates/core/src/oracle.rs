//! Brute-force checks of the norm formulas. Ratios here are computed only
//! by applying the operator and taking Hardy norms.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::TreeFunction;
use crate::hardy::{hardy_norm_p_power, mean_p_power};
use crate::random::{random_function, trial_rng, FunctionShape};
use crate::scalar::{rational_to_f64, Exponent, Magnitude, Quantity, TreeScalar};
use crate::shift::{apply, backward_ratios, forward_ratios, operator_norm, Direction, OperatorKind, RATIO_TOL};
use crate::tree::{LevelTree, VertexId};

/// `‖T f‖^p / ‖f‖^p`, or `None` for the zero function.
fn ratio<T: TreeScalar>(
    tree: &LevelTree,
    op: OperatorKind,
    f: &TreeFunction<T>,
    p: Exponent,
) -> Result<Option<T::Magnitude>> {
    let (den, _) = hardy_norm_p_power(tree, f, p)?;
    if den.is_zero() {
        return Ok(None);
    }
    let (num, _) = hardy_norm_p_power(tree, &apply(tree, op, f)?, p)?;
    Ok(Some(num / den))
}

fn ratio_quantity(
    tree: &LevelTree,
    op: OperatorKind,
    f: &TreeFunction<BigRational>,
    p: Exponent,
) -> Result<Option<Quantity>> {
    if p.as_integer().is_some() {
        Ok(ratio(tree, op, f, p)?.map(|r| r.to_quantity()))
    } else {
        let g = f.map_values(rational_to_f64);
        Ok(ratio(tree, op, &g, p)?.map(|r| r.to_quantity()))
    }
}

/// Levels on which `f` may live so that `T f` stays within the depth.
fn domain_levels(tree: &LevelTree, op: OperatorKind) -> Result<(usize, usize)> {
    let m = op.power();
    match op.which() {
        Direction::Forward if tree.depth() >= m => Ok((0, tree.depth() - m)),
        Direction::Backward if tree.depth() >= m => Ok((m, tree.depth())),
        _ => Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: format!("{op} needs depth >= {m}"),
        }),
    }
}

/// The single-level function whose ratio equals the level-`n` formula ratio.
///
/// For `S^m`: `χ_w` with `w` maximizing the number of `m`-children at level
/// `n - m`. For `B^m`: the indicator of all `m`-children of the maximizing
/// vertex at level `n`.
pub fn extremal_function(tree: &LevelTree, op: OperatorKind, n: usize) -> Result<TreeFunction<BigRational>> {
    let m = op.power();
    match op.which() {
        Direction::Forward => {
            let r = n
                .checked_sub(m)
                .ok_or(Error::InvalidParameter(format!("level {n} < power {m}")))?;
            Ok(TreeFunction::indicator(&tree.argmax_gamma_sub(m, r)?))
        }
        Direction::Backward => {
            let v = tree.argmax_gamma_sub(m, n)?;
            let (lo, hi) = tree.descendant_range(&v, m)?;
            Ok(TreeFunction::from_level_segments(
                (0..=n + m)
                    .map(|l| {
                        if l == n + m {
                            vec![crate::function::Segment::new(lo.clone(), &hi - &lo, BigRational::one())]
                        } else {
                            Vec::new()
                        }
                    })
                    .collect(),
            ))
        }
    }
}

fn formula_levels(tree: &LevelTree, op: OperatorKind) -> Vec<usize> {
    let (m, d) = (op.power(), tree.depth());
    match op.which() {
        Direction::Forward => (m..=d).collect(),
        Direction::Backward => (0..=d.saturating_sub(m)).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundReport {
    pub operator: OperatorKind,
    pub p: Exponent,
    pub depth: usize,
    pub seed: u64,
    pub trials: u64,
    pub extremals: usize,
    /// Largest `‖T f‖^p / ‖f‖^p` among random trials and extremal samples.
    pub best_ratio_p_power: Quantity,
    pub best_ratio: f64,
    /// `trial:<i>` or `extremal:<level>`.
    pub best_sample: String,
    /// The formula value reported by the norm module, side by side.
    pub formula_p_power: Quantity,
    pub formula_value: f64,
    /// Samples whose ratio exceeded the formula value (exact for integer `p`).
    pub exceeding: u64,
}

fn exceeds(a: &Quantity, b: &Quantity) -> bool {
    if a.is_exact() && b.is_exact() {
        a.compare(b) == Ordering::Greater
    } else {
        a.compare_tol(b, RATIO_TOL) == Ordering::Greater
    }
}

/// `max ‖T f‖ / ‖f‖` over seeded random finitely supported `f`, plus the
/// extremal functions at every admissible level.
pub fn randomized_norm_lower_bound(
    tree: &LevelTree,
    op: OperatorKind,
    p: Exponent,
    trials: u64,
    seed: u64,
) -> Result<LowerBoundReport> {
    let (lo, hi) = domain_levels(tree, op)?;
    let formula = operator_norm(tree, op, p)?;
    let shape = FunctionShape {
        min_level: lo,
        max_level: hi,
        max_segments: 4,
    };
    let random: Vec<(String, Option<Quantity>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let f = random_function(&mut trial_rng(seed, i), tree, shape);
            Ok((format!("trial:{i}"), ratio_quantity(tree, op, &f, p)?))
        })
        .collect::<Result<_>>()?;
    let levels = formula_levels(tree, op);
    let extremal: Vec<(String, Option<Quantity>)> = levels
        .par_iter()
        .map(|&n| {
            let f = extremal_function(tree, op, n)?;
            Ok((format!("extremal:{n}"), ratio_quantity(tree, op, &f, p)?))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(String, Quantity)> = None;
    let mut exceeding = 0;
    for (label, r) in random.into_iter().chain(extremal) {
        let Some(r) = r else { continue };
        if exceeds(&r, &formula.value_p_power) {
            exceeding += 1;
        }
        if best.as_ref().is_none_or(|(_, b)| r.compare(b) == Ordering::Greater) {
            best = Some((label, r));
        }
    }
    let (best_sample, best_ratio_p_power) = best.unwrap_or(("none".into(), Quantity::Exact(BigRational::zero())));
    Ok(LowerBoundReport {
        operator: op,
        p,
        depth: tree.depth(),
        seed,
        trials,
        extremals: levels.len(),
        best_ratio: best_ratio_p_power.root(p),
        best_ratio_p_power,
        best_sample,
        formula_value: formula.value,
        formula_p_power: formula.value_p_power,
        exceeding,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttainmentLevel {
    pub level: usize,
    pub vertex: VertexId,
    /// `M_p^p(n, T f) / M_p^p(source level, f)` evaluated directly.
    pub oracle_p_power: Quantity,
    /// The level ratio from the norm formula.
    pub formula_p_power: Quantity,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttainmentReport {
    pub operator: OperatorKind,
    pub p: Exponent,
    pub exact: bool,
    pub levels: Vec<AttainmentLevel>,
    pub all_equal: bool,
}

/// At every admissible level, the extremal function's level ratio equals
/// the formula ratio (exactly for integer `p`).
pub fn extremal_attainment(tree: &LevelTree, op: OperatorKind, p: Exponent) -> Result<AttainmentReport> {
    domain_levels(tree, op)?;
    let m = op.power();
    let formula = match op.which() {
        Direction::Forward => forward_ratios(tree, m)?,
        Direction::Backward => backward_ratios(tree, m, p)?,
    };
    let exact = p.as_integer().is_some();
    let levels = formula
        .par_iter()
        .map(|r| {
            let n = r.level;
            let f = extremal_function(tree, op, n)?;
            let (src, dst) = match op.which() {
                Direction::Forward => (n - m, n),
                Direction::Backward => (n + m, n),
            };
            let tf = apply(tree, op, &f)?;
            let oracle = if exact {
                (mean_p_power(tree, &tf, p, dst)? / mean_p_power(tree, &f, p, src)?).to_quantity()
            } else {
                let (f, tf) = (f.map_values(rational_to_f64), tf.map_values(rational_to_f64));
                (mean_p_power(tree, &tf, p, dst)? / mean_p_power(tree, &f, p, src)?).to_quantity()
            };
            let equal = if exact {
                oracle == r.ratio_p_power
            } else {
                oracle.compare_tol(&r.ratio_p_power, 1e-9) == Ordering::Equal
            };
            let vertex = match op.which() {
                Direction::Forward => tree.argmax_gamma_sub(m, n - m)?,
                Direction::Backward => tree.argmax_gamma_sub(m, n)?,
            };
            Ok(AttainmentLevel {
                level: n,
                vertex,
                oracle_p_power: oracle,
                formula_p_power: r.ratio_p_power.clone(),
                equal,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AttainmentReport {
        operator: op,
        p,
        exact,
        all_equal: levels.iter().all(|l| l.equal),
        levels,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridReport {
    pub operator: OperatorKind,
    pub p: Exponent,
    pub vertices: usize,
    /// Distinct absolute grid values; `|T f| <= T |f|` makes signs irrelevant.
    pub grid: Vec<Quantity>,
    pub evaluated: u64,
    pub best_ratio_p_power: Quantity,
    pub best_ratio: f64,
    /// Formula value over the same truncation.
    pub formula_p_power: Quantity,
    pub observed_formula_p_power: Quantity,
    /// Some grid point exceeded the formula value.
    pub exceeded: bool,
    /// The best grid ratio equals the truncated formula sup.
    pub attained: bool,
}

/// Exhaustive search over grid-valued functions on a tiny tree.
///
/// Only levels where `f` can affect the ratio are enumerated: for `S^m`
/// levels `0..=depth-m`, for `B^m` levels `m..=depth`.
pub fn truncated_finite_support_check(
    tree: &LevelTree,
    op: OperatorKind,
    p: Exponent,
    grid: &[BigRational],
    budget: u64,
) -> Result<GridReport> {
    let (lo, hi) = domain_levels(tree, op)?;
    let mut values: Vec<BigRational> = grid.iter().map(num_traits::Signed::abs).collect();
    values.push(BigRational::zero());
    values.sort();
    values.dedup();
    let mut vertices = Vec::new();
    for l in lo..=hi {
        let width = tree.gamma(l)?;
        let w: u64 = u64::try_from(width).map_err(|_| Error::ResourceLimit {
            what: "grid search vertices".into(),
            cap: budget,
        })?;
        vertices.extend((0..w).map(|i| VertexId::new(l, BigUint::from(i))));
    }
    let total = (values.len() as f64).powi(vertices.len() as i32);
    if total > budget as f64 {
        return Err(Error::ResourceLimit {
            what: format!(
                "grid search over {} vertices with {} values ({total:.3e} points)",
                vertices.len(),
                values.len()
            ),
            cap: budget,
        });
    }
    let total = total as u64;
    let base = values.len() as u64;
    let (best, _) = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut c = code;
            let mut points = Vec::with_capacity(vertices.len());
            for v in &vertices {
                points.push((v.clone(), values[(c % base) as usize].clone()));
                c /= base;
            }
            let f = TreeFunction::from_points(points);
            Ok((ratio_quantity(tree, op, &f, p)?, code))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(r, code)| r.map(|r| (r, code)))
        .fold((None::<Quantity>, 0u64), |(best, bc), (r, code)| match &best {
            Some(b) if r.compare(b) != Ordering::Greater => (best, bc),
            _ => (Some(r), code),
        });
    let mut best = best.unwrap_or(Quantity::Exact(BigRational::zero()));
    for n in formula_levels(tree, op) {
        if let Some(r) = ratio_quantity(tree, op, &extremal_function(tree, op, n)?, p)? {
            if r.compare(&best) == Ordering::Greater {
                best = r;
            }
        }
    }
    let formula = operator_norm(tree, op, p)?;
    Ok(GridReport {
        operator: op,
        p,
        vertices: vertices.len(),
        grid: values.iter().map(|v| Quantity::Exact(v.clone())).collect(),
        evaluated: total,
        best_ratio: best.root(p),
        exceeded: exceeds(&best, &formula.value_p_power),
        attained: best.compare_tol(&formula.observed_p_power, RATIO_TOL) == Ordering::Equal,
        best_ratio_p_power: best,
        formula_p_power: formula.value_p_power,
        observed_formula_p_power: formula.observed_p_power,
    })
}
