//! The forward shift `(Sf)(v) = f(p(v))` and the backward shift
//! `(Bf)(v) = Σ_{w child of v} f(w)`, their powers and their norms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::function::{Segment, TreeFunction};
use crate::gallery::{pow_minus_one, Certificates, NormCertificate};
use crate::hardy::hardy_norm_p_power;
use crate::scalar::{Exponent, Magnitude, Quantity, TreeScalar};
use crate::tree::{LevelTree, VertexId};

/// Relative tolerance for comparing floating ratios.
pub const RATIO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" | "forward" => Ok(Direction::Forward),
            "B" | "b" | "backward" => Ok(Direction::Backward),
            _ => Err(Error::InvalidParameter(format!("operator must be S or B, got `{s}`"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "S",
            Direction::Backward => "B",
        })
    }
}

/// `S^m` or `B^m` with `m >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperatorKind {
    which: Direction,
    power: usize,
}

impl OperatorKind {
    pub fn new(which: Direction, power: usize) -> Result<Self> {
        if power == 0 {
            return Err(Error::InvalidParameter("operator power must be >= 1".into()));
        }
        Ok(OperatorKind { which, power })
    }

    pub fn forward(power: usize) -> Self {
        Self::new(Direction::Forward, power).expect("power >= 1")
    }

    pub fn backward(power: usize) -> Self {
        Self::new(Direction::Backward, power).expect("power >= 1")
    }

    pub fn which(&self) -> Direction {
        self.which
    }

    pub fn power(&self) -> usize {
        self.power
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.power == 1 {
            write!(f, "{}", self.which)
        } else {
            write!(f, "{}^{}", self.which, self.power)
        }
    }
}

impl Serialize for OperatorKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `S^m f`: each level-`n` segment is carried onto the `m`-children of its
/// vertices at level `n + m`.
pub fn apply_forward<T: TreeScalar>(tree: &LevelTree, f: &TreeFunction<T>, m: usize) -> Result<TreeFunction<T>> {
    f.check_within(tree)?;
    if f.is_zero() {
        return Ok(TreeFunction::zero());
    }
    let top = f.max_support_level() + m;
    if top > tree.depth() {
        return Err(Error::DepthExceeded {
            needed: top,
            depth: tree.depth(),
        });
    }
    let mut levels: Vec<Vec<Segment<T>>> = vec![Vec::new(); top + 1];
    for (n, segs) in f.levels().iter().enumerate() {
        if segs.is_empty() {
            continue;
        }
        let map = tree.descendant_map(n, m)?;
        for s in segs {
            let lo = map.eval(&s.start);
            let hi = map.eval(&s.end());
            if hi > lo {
                levels[n + m].push(Segment {
                    len: hi - &lo,
                    start: lo,
                    value: s.value.clone(),
                });
            }
        }
    }
    Ok(TreeFunction::from_level_segments(levels).with_horizon(f.horizon().map(|h| h + m)))
}

/// `B^m f`: every vertex receives the sum of `f` over its `m`-children.
pub fn apply_backward<T: TreeScalar>(tree: &LevelTree, f: &TreeFunction<T>, m: usize) -> Result<TreeFunction<T>> {
    f.check_within(tree)?;
    let count = f.level_count();
    if count <= m {
        return Ok(TreeFunction::zero());
    }
    let mut levels: Vec<Vec<Segment<T>>> = vec![Vec::new(); count - m];
    for (big_l, segs) in f.levels().iter().enumerate().skip(m) {
        if segs.is_empty() {
            continue;
        }
        let n = big_l - m;
        let map = tree.descendant_map(n, m)?;
        let out = &mut levels[n];
        for s in segs {
            let c = &s.value;
            let scaled = |k: &BigUint| T::from_biguint(k) * c.clone();
            let end = s.end();
            let v_lo = map.preimage(&s.start);
            let v_hi = map.preimage(&(&end - 1u32));
            if v_lo == v_hi {
                out.push(Segment::new(v_lo, 1u32, scaled(&s.len)));
                continue;
            }
            let lo_next = &v_lo + 1u32;
            out.push(Segment::new(v_lo, 1u32, scaled(&(map.eval(&lo_next) - &s.start))));
            out.push(Segment::new(v_hi.clone(), 1u32, scaled(&(&end - map.eval(&v_hi)))));
            for piece in map.pieces_between(&lo_next, &v_hi) {
                if piece.slope.is_zero() {
                    continue;
                }
                let a = (&piece.start).max(&lo_next);
                let b = (&piece.end).min(&v_hi);
                if a < b {
                    out.push(Segment {
                        start: a.clone(),
                        len: b - a,
                        value: scaled(&piece.slope),
                    });
                }
            }
        }
    }
    Ok(TreeFunction::from_level_segments(levels).with_horizon(f.horizon().and_then(|h| h.checked_sub(m))))
}

pub fn apply<T: TreeScalar>(tree: &LevelTree, op: OperatorKind, f: &TreeFunction<T>) -> Result<TreeFunction<T>> {
    match op.which {
        Direction::Forward => apply_forward(tree, f, op.power),
        Direction::Backward => apply_backward(tree, f, op.power),
    }
}

/// The level ratio `r_n` of a norm formula (a `p`-th power).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRatio {
    pub level: usize,
    pub ratio_p_power: Quantity,
}

/// `K(m, n-m) γ(n-m) / γ(n)` for `m <= n <= depth`; independent of `p`.
pub fn forward_ratios(tree: &LevelTree, m: usize) -> Result<Vec<LevelRatio>> {
    (m..=tree.depth())
        .map(|n| {
            let k = tree.max_gamma_sub(m, n - m)?;
            Ok(LevelRatio {
                level: n,
                ratio_p_power: Quantity::ratio(&(k * tree.gamma(n - m)?), tree.gamma(n)?),
            })
        })
        .collect()
}

/// `K(m, n)^(p-1) γ(n+m) / γ(n)` for `0 <= n <= depth - m`.
pub fn backward_ratios(tree: &LevelTree, m: usize, p: Exponent) -> Result<Vec<LevelRatio>> {
    (0..=tree.depth().saturating_sub(m))
        .map(|n| {
            let k = tree.max_gamma_sub(m, n)?;
            let growth = Quantity::ratio(tree.gamma(n + m)?, tree.gamma(n)?);
            let ratio = match p {
                Exponent::Integer(_) => pow_minus_one(&k, p).mul(&growth),
                Exponent::Real(_) => Quantity::Approx((pow_minus_one(&k, p).ln() + growth.ln()).exp()),
            };
            Ok(LevelRatio {
                level: n,
                ratio_p_power: ratio,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedVerdict {
    Bounded,
    Unbounded,
    Inconclusive,
}

/// An operator norm evaluated from its level-ratio formula.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub operator: OperatorKind,
    pub p: Exponent,
    pub depth: usize,
    /// `‖T‖^p`: certified when a certificate applies, else the observed sup.
    pub value_p_power: Quantity,
    pub value: f64,
    /// Sup of the level ratios over the materialized range.
    pub observed_p_power: Quantity,
    pub observed_value: f64,
    /// Smallest level attaining the observed sup.
    pub attained_level: usize,
    pub truncated: bool,
    pub bounded_verdict: BoundedVerdict,
    pub certificate: Option<String>,
    /// False when the observed ratios contradict the certificate.
    pub certificate_consistent: Option<bool>,
    pub ratios: Vec<LevelRatio>,
}

fn cmp(a: &Quantity, b: &Quantity) -> Ordering {
    a.compare_tol(b, RATIO_TOL)
}

fn sup_of(ratios: &[LevelRatio]) -> (Quantity, usize) {
    let mut best = 0;
    for (i, r) in ratios.iter().enumerate() {
        if cmp(&r.ratio_p_power, &ratios[best].ratio_p_power) == Ordering::Greater {
            best = i;
        }
    }
    (ratios[best].ratio_p_power.clone(), ratios[best].level)
}

fn assemble(
    tree: &LevelTree,
    operator: OperatorKind,
    p: Exponent,
    ratios: Vec<LevelRatio>,
    certificate: Option<NormCertificate>,
) -> NormReport {
    let (observed, attained) = sup_of(&ratios);
    let last_level = ratios.last().expect("nonempty ratio list").level;
    let still_rising = ratios.len() < 2
        || cmp(
            &ratios[ratios.len() - 1].ratio_p_power,
            &ratios[ratios.len() - 2].ratio_p_power,
        ) != Ordering::Less;
    let near_end = attained + 1 >= last_level;
    let mut report = NormReport {
        operator,
        p,
        depth: tree.depth(),
        value: observed.root(p),
        value_p_power: observed.clone(),
        observed_value: observed.root(p),
        observed_p_power: observed,
        attained_level: attained,
        truncated: near_end && still_rising,
        bounded_verdict: BoundedVerdict::Inconclusive,
        certificate: None,
        certificate_consistent: None,
        ratios,
    };
    let Some(cert) = certificate else {
        return report;
    };
    report.certificate = Some(cert.description().to_string());
    match cert {
        NormCertificate::Supremum { value_p_power, .. } => {
            let ok = cmp(&report.observed_p_power, &value_p_power) != Ordering::Greater;
            report.certificate_consistent = Some(ok);
            if ok {
                report.value = value_p_power.root(p);
                report.value_p_power = value_p_power;
                report.truncated = false;
                report.bounded_verdict = BoundedVerdict::Bounded;
            }
        }
        NormCertificate::EventuallyConstant {
            from_level,
            value_p_power,
            ..
        } => {
            if last_level < from_level {
                report.certificate = Some(format!(
                    "{} (needs depth reaching level {from_level}; not applied)",
                    cert_text(&report)
                ));
                return report;
            }
            let ok = report
                .ratios
                .iter()
                .filter(|r| r.level >= from_level)
                .all(|r| cmp(&r.ratio_p_power, &value_p_power) == Ordering::Equal);
            report.certificate_consistent = Some(ok);
            if ok {
                let value = if cmp(&value_p_power, &report.observed_p_power) == Ordering::Greater {
                    value_p_power
                } else {
                    report.observed_p_power.clone()
                };
                report.value = value.root(p);
                report.value_p_power = value;
                report.truncated = false;
                report.bounded_verdict = BoundedVerdict::Bounded;
            }
        }
        NormCertificate::Divergent { ratio, .. } => {
            let matches = report
                .ratios
                .iter()
                .all(|r| cmp(&r.ratio_p_power, &ratio(r.level)) == Ordering::Equal);
            let tail = &report.ratios[report.ratios.len() / 2..];
            let increasing = tail.len() >= 2
                && tail
                    .windows(2)
                    .all(|w| cmp(&w[1].ratio_p_power, &w[0].ratio_p_power) == Ordering::Greater);
            report.certificate_consistent = Some(matches);
            if matches && increasing {
                report.truncated = true;
                report.bounded_verdict = BoundedVerdict::Unbounded;
            }
        }
    }
    report
}

fn cert_text(r: &NormReport) -> String {
    r.certificate.clone().unwrap_or_default()
}

/// `‖S^m‖` from the level-ratio formula, sup over `m <= n <= depth`.
pub fn forward_norm(tree: &LevelTree, p: Exponent, m: usize) -> Result<NormReport> {
    let op = OperatorKind::new(Direction::Forward, m)?;
    if tree.depth() < m + 1 {
        return Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: format!("‖S^{m}‖ needs depth >= {}", m + 1),
        });
    }
    let ratios = forward_ratios(tree, m)?;
    let cert = Certificates::for_spec(tree.spec()).forward(m, p);
    Ok(assemble(tree, op, p, ratios, cert))
}

/// `‖B^m‖` from the level-ratio formula, sup over `0 <= n <= depth - m`.
pub fn backward_norm(tree: &LevelTree, p: Exponent, m: usize) -> Result<NormReport> {
    let op = OperatorKind::new(Direction::Backward, m)?;
    if tree.depth() < m {
        return Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: format!("‖B^{m}‖ needs depth >= {m}"),
        });
    }
    let ratios = backward_ratios(tree, m, p)?;
    let cert = Certificates::for_spec(tree.spec()).backward(m, p);
    Ok(assemble(tree, op, p, ratios, cert))
}

pub fn operator_norm(tree: &LevelTree, op: OperatorKind, p: Exponent) -> Result<NormReport> {
    match op.which {
        Direction::Forward => forward_norm(tree, p, op.power),
        Direction::Backward => backward_norm(tree, p, op.power),
    }
}

/// Two same-level vertices of different degree, and the norm discrepancy of
/// `χ_w` for the one of larger degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsometryWitness {
    pub level: usize,
    pub u: VertexId,
    pub degree_u: u64,
    pub v: VertexId,
    pub degree_v: u64,
    pub w: VertexId,
    /// `‖χ_w‖^p = 1/γ(|w|)`.
    pub chi_norm_p_power: Quantity,
    /// `‖Sχ_w‖^p = γ(1,w)/γ(|w|+1)`.
    pub shifted_norm_p_power: Quantity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IsometryReport {
    /// Degrees are level-constant up to the depth; `sequence[n]` is the degree at level `n`.
    Isometric {
        sequence: Vec<u64>,
        depth: usize,
    },
    NotIsometric {
        witness: Box<IsometryWitness>,
    },
}

/// `S` is an isometry iff every level is degree-uniform.
pub fn isometry_check(tree: &LevelTree, p: Exponent) -> Result<IsometryReport> {
    if tree.depth() < 2 {
        return Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: "the isometry check needs depth >= 2".into(),
        });
    }
    if let Some(sequence) = tree.level_degrees() {
        return Ok(IsometryReport::Isometric {
            sequence,
            depth: tree.depth(),
        });
    }
    let level = (0..tree.depth())
        .find(|&l| tree.runs(l).is_ok_and(|r| r.len() > 1))
        .expect("some level is not degree-uniform");
    let runs = tree.runs(level)?;
    let (a, b) = (&runs[0], &runs[1]);
    let heavy = runs.iter().max_by_key(|r| r.degree).expect("nonempty");
    let w = VertexId::new(level, heavy.start.clone());
    let chi = TreeFunction::<num_rational::BigRational>::indicator(&w);
    let shifted = apply_forward(tree, &chi, 1)?;
    Ok(IsometryReport::NotIsometric {
        witness: Box::new(IsometryWitness {
            level,
            u: VertexId::new(level, a.start.clone()),
            degree_u: a.degree,
            v: VertexId::new(level, b.start.clone()),
            degree_v: b.degree,
            chi_norm_p_power: hardy_norm_p_power(tree, &chi, p)?.0.to_quantity(),
            shifted_norm_p_power: hardy_norm_p_power(tree, &shifted, p)?.0.to_quantity(),
            w,
        }),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionStep {
    pub n: usize,
    /// `‖S^N f - g‖^p`.
    pub distance_p_power: Quantity,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub p: Exponent,
    /// `|g(root)|^p`.
    pub bound_p_power: Quantity,
    pub steps: Vec<ObstructionStep>,
    pub all_hold: bool,
}

/// Checks `‖S^N f - g‖ >= |g(root)|` for `1 <= N <= n_max`.
pub fn forward_orbit_obstruction<T: TreeScalar>(
    tree: &LevelTree,
    f: &TreeFunction<T>,
    g: &TreeFunction<T>,
    p: Exponent,
    n_max: usize,
) -> Result<ObstructionReport> {
    let g_root = g.get(&VertexId::root());
    if g_root.is_zero() {
        return Err(Error::ZeroAtRoot);
    }
    g.check_within(tree)?;
    let bound = g_root.abs_pow(p)?;
    let mut steps = Vec::with_capacity(n_max);
    let mut orbit = f.clone();
    for n in 1..=n_max {
        orbit = apply_forward(tree, &orbit, 1)?;
        let (d, _) = hardy_norm_p_power(tree, &orbit.sub(g), p)?;
        steps.push(ObstructionStep {
            n,
            holds: d >= bound,
            distance_p_power: d.to_quantity(),
        });
    }
    Ok(ObstructionReport {
        p,
        all_hold: steps.iter().all(|s| s.holds),
        bound_p_power: bound.to_quantity(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::build_inline;
    use crate::tree::{materialize, SequenceTail, TreeSpec};
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn tree(name: &str, depth: usize) -> LevelTree {
        materialize(&build_inline(name).unwrap().spec, depth).unwrap()
    }

    #[test]
    fn forward_of_root_indicator() {
        let t = tree("k_tree?k=3", 4);
        let f = TreeFunction::<Q>::indicator(&VertexId::root());
        let g = apply_forward(&t, &f, 1).unwrap();
        assert_eq!(g.level(1), &[Segment::new(0u32, 3u32, q(1, 1))]);
        assert_eq!(g.get(&VertexId::root()), q(0, 1));
        let g3 = apply_forward(&t, &f, 3).unwrap();
        assert_eq!(g3.support_size(), BigUint::from(7u32));
        assert!(matches!(apply_forward(&t, &f, 5), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn backward_on_homogeneous_level() {
        let t = tree("homogeneous?q=3", 4);
        let f = TreeFunction::<Q>::level_constant(&t, 3, q(1, 1)).unwrap();
        let g = apply_backward(&t, &f, 1).unwrap();
        assert_eq!(g.level(2), &[Segment::new(0u32, 9u32, q(3, 1))]);
        let g2 = apply_backward(&t, &f, 3).unwrap();
        assert_eq!(g2.get(&VertexId::root()), q(27, 1));
        assert!(apply_backward(&t, &TreeFunction::<Q>::indicator(&VertexId::root()), 1)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn backward_splits_partial_blocks() {
        // Level 3 of the ceil tree splits into blocks [0,1 | 2,3 | 4] under level 2.
        let t = tree("ceil_three_halves", 4);
        let f =
            TreeFunction::from_level_segments(vec![vec![], vec![], vec![], vec![Segment::new(1u32, 4u32, q(1, 1))]]);
        let g = apply_backward(&t, &f, 1).unwrap();
        let pts: Vec<Q> = (0..3u32).map(|i| g.get(&VertexId::new(2, i))).collect();
        assert_eq!(pts, vec![q(1, 1), q(2, 1), q(1, 1)]);
        let g2 = apply_backward(&t, &f, 2).unwrap();
        assert_eq!(g2.get(&VertexId::new(1, 0u32)), q(3, 1));
        assert_eq!(g2.get(&VertexId::new(1, 1u32)), q(1, 1));
    }

    #[test]
    fn k_tree_norm_is_k() {
        for k in [2u64, 3, 5] {
            let t = tree(&format!("k_tree?k={k}"), 40);
            for p in [1, 2] {
                let r = forward_norm(&t, Exponent::integer(p), 1).unwrap();
                assert_eq!(r.value_p_power, Quantity::from_integer(&BigUint::from(k)));
                assert!(!r.truncated);
                assert_eq!(r.bounded_verdict, BoundedVerdict::Bounded);
                assert_eq!(r.certificate_consistent, Some(true));
                assert!(r.observed_p_power.compare(&r.value_p_power) == Ordering::Less);
            }
        }
    }

    #[test]
    fn level_sequence_s_is_isometry_and_b_window() {
        let spec = TreeSpec::level_sequence(vec![1, 2, 1, 3], SequenceTail::Cycle).unwrap();
        let t = materialize(&spec, 20).unwrap();
        assert_eq!(forward_norm(&t, Exponent::integer(2), 1).unwrap().value, 1.0);
        let b = backward_norm(&t, Exponent::integer(1), 2).unwrap();
        assert_eq!(b.value_p_power, Quantity::from_integer(&BigUint::from(3u32)));
        assert_eq!(b.observed_p_power, b.value_p_power);
    }

    #[test]
    fn divergence_certificates() {
        let t = tree("quadratic_growth", 30);
        let r = forward_norm(&t, Exponent::integer(1), 1).unwrap();
        assert_eq!(r.bounded_verdict, BoundedVerdict::Unbounded);
        assert_eq!(r.ratios[3].ratio_p_power, Quantity::Exact(q(5 * 7, 11)));
        let f = tree("factorial", 20);
        for p in [1u32, 2] {
            let r = backward_norm(&f, Exponent::integer(p), 1).unwrap();
            assert_eq!(r.bounded_verdict, BoundedVerdict::Unbounded);
            assert_eq!(r.certificate_consistent, Some(true));
            assert_eq!(
                r.ratios[4].ratio_p_power,
                Quantity::Exact(num_traits::pow(q(6, 1), p as usize))
            );
        }
    }

    #[test]
    fn generic_spec_is_inconclusive() {
        let spec = TreeSpec::per_vertex("mod3", |_, i| if (i % 3u32).is_zero() { 2 } else { 1 });
        let t = materialize(&spec, 12).unwrap();
        let r = forward_norm(&t, Exponent::integer(1), 1).unwrap();
        assert_eq!(r.bounded_verdict, BoundedVerdict::Inconclusive);
        assert!(r.value >= 1.0);
        assert!(r.certificate.is_none());
    }

    #[test]
    fn depth_too_small() {
        let t = tree("homogeneous?q=2", 2);
        assert!(matches!(
            forward_norm(&t, Exponent::integer(1), 2),
            Err(Error::DepthTooSmall { .. })
        ));
        assert!(backward_norm(&t, Exponent::integer(1), 2).is_ok());
    }

    #[test]
    fn isometry_classification() {
        let spec = TreeSpec::level_sequence(vec![1, 2, 1, 3], SequenceTail::Cycle).unwrap();
        let t = materialize(&spec, 6).unwrap();
        assert_eq!(
            isometry_check(&t, Exponent::integer(1)).unwrap(),
            IsometryReport::Isometric {
                sequence: vec![1, 2, 1, 3, 1, 2],
                depth: 6
            }
        );
        let k = tree("k_tree?k=2", 5);
        match isometry_check(&k, Exponent::integer(2)).unwrap() {
            IsometryReport::NotIsometric { witness } => {
                assert_eq!(witness.level, 1);
                assert_ne!(witness.degree_u, witness.degree_v);
                assert_eq!(witness.chi_norm_p_power, Quantity::Exact(q(1, 2)));
                assert_eq!(witness.shifted_norm_p_power, Quantity::Exact(q(2, 3)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn obstruction_with_zero_f() {
        let t = tree("homogeneous?q=2", 6);
        let g = TreeFunction::<Q>::indicator(&VertexId::root());
        let r = forward_orbit_obstruction(&t, &TreeFunction::zero(), &g, Exponent::integer(2), 4).unwrap();
        assert!(r.all_hold);
        assert!(r.steps.iter().all(|s| s.distance_p_power == Quantity::Exact(q(1, 1))));
        assert_eq!(
            forward_orbit_obstruction(&t, &g, &TreeFunction::zero(), Exponent::integer(1), 1).unwrap_err(),
            Error::ZeroAtRoot
        );
    }
}
