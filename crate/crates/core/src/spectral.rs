//! Spectral radii from power norms, eigenfunctions of `B`, and the resolvent
//! and non-surjectivity witnesses for `S`.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::{Segment, TreeFunction};
use crate::gallery::{Certificates, RadiusCertificate};
use crate::hardy::mean_p_power;
use crate::scalar::{ln_biguint, Exponent, Magnitude, Quantity, TreeScalar};
use crate::shift::{apply_backward, apply_forward, operator_norm, Direction, NormReport, OperatorKind};
use crate::tree::{LevelTree, VertexId};

/// Relative change below which a radius sequence counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// `M_p^p(n, f)` next to the bound it is expected to respect (or equal).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub level: usize,
    pub mean_p_power: Quantity,
    pub bound: Quantity,
}

/// A constructed function together with the residual of the identity it
/// is meant to satisfy.
#[derive(Clone, Debug)]
pub struct WitnessReport<T> {
    pub witness: TreeFunction<T>,
    pub identity: String,
    /// `sup |lhs - rhs|` over the checked levels.
    pub residual: Quantity,
    pub residual_is_zero: bool,
    /// Levels `lo..=hi` on which the identity was checked.
    pub region: (usize, usize),
    pub profile: Vec<ProfileEntry>,
    /// Whether every profile entry respects its bound (`<=` or `=`, see `identity`).
    pub profile_holds: Option<bool>,
    pub notes: Vec<String>,
}

fn residual_of<T: TreeScalar>(diff: &TreeFunction<T>, levels: std::ops::Range<usize>) -> (Quantity, bool) {
    let r = diff.max_modulus_on(levels);
    let zero = r.is_zero();
    (r.to_quantity(), zero)
}

/// `f(v) = λ^{|v|} / (γ(1, p(v)) ... γ(1, root))`, built level by level
/// through depth; checks `Bf = λf` on every level below the depth.
pub fn eigenfunction_b<T: TreeScalar>(tree: &LevelTree, lambda: &T) -> Result<WitnessReport<T>> {
    let depth = tree.depth();
    if depth < 1 {
        return Err(Error::DepthTooSmall {
            depth,
            requirement: "the eigenfunction check needs depth >= 1".into(),
        });
    }
    let mut levels: Vec<Vec<Segment<T>>> = vec![vec![Segment::new(0u32, 1u32, T::one())]];
    for n in 0..depth {
        let runs = tree.runs(n)?;
        let mut next = Vec::new();
        for s in &levels[n] {
            let end = s.end();
            let from = runs.partition_point(|r| r.end() <= s.start);
            for r in runs[from..].iter().take_while(|r| r.start < end) {
                if r.degree == 0 {
                    continue;
                }
                let a = (&r.start).max(&s.start);
                let b = r.end().min(end.clone());
                let d = T::from_biguint(&r.degree.into());
                next.push(Segment {
                    start: &r.child_start + (a - &r.start) * r.degree,
                    len: (&b - a) * r.degree,
                    value: lambda.clone() * s.value.clone() / d,
                });
            }
        }
        levels.push(next);
    }
    let f = TreeFunction::from_level_segments(levels).with_horizon(Some(depth));
    let bf = apply_backward(tree, &f, 1)?;
    let (residual, residual_is_zero) = residual_of(&bf.sub(&f.scale(lambda)), 0..depth);
    let mut notes = Vec::new();
    if let Some(leaf) = tree.first_leaf() {
        if !lambda.is_zero() {
            notes.push(format!(
                "vertex {leaf} is a leaf: (Bf)(leaf) = 0 while λf(leaf) != 0, so the identity fails there"
            ));
        }
    }
    Ok(WitnessReport {
        witness: f,
        identity: "(Bf)(v) = λ f(v)".into(),
        residual,
        residual_is_zero,
        region: (0, depth - 1),
        profile: Vec::new(),
        profile_holds: None,
        notes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    /// `H^p`: bounded means.
    Hp,
    /// `H^p_0`: vanishing means.
    Hp0,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    MemberWitnessed,
    Boundary,
    NotWitnessed,
}

/// Running minimum of `γ(n)^{1/n}` over a tail window of levels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiminfEstimate {
    pub window: (usize, usize),
    pub estimate: f64,
    /// `(n, γ(n)^{1/n})` over the window.
    pub values: Vec<(usize, f64)>,
}

/// `γ(n)^{1/n}`; on a level-regular tree this is `(s_1...s_n)^{1/n}`.
pub fn level_growth_root(tree: &LevelTree, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    Ok((ln_biguint(tree.gamma(n)?) / n as f64).exp())
}

/// `liminf γ(n)^{1/n}` estimated as a minimum over levels `[start, depth]`;
/// `start` defaults to the second half of the materialized levels.
pub fn liminf_root_estimate(tree: &LevelTree, start: Option<usize>) -> Result<LiminfEstimate> {
    let depth = tree.depth();
    let lo = start.unwrap_or(depth / 2).max(1).min(depth.max(1));
    let values: Vec<(usize, f64)> = (lo..=depth)
        .map(|n| level_growth_root(tree, n).map(|v| (n, v)))
        .collect::<Result<_>>()?;
    let estimate = values.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    Ok(LiminfEstimate {
        window: (lo, depth),
        estimate,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub lambda: (f64, f64),
    pub space: SpaceKind,
    pub verdict: Membership,
    pub test: String,
    pub liminf: Option<LiminfEstimate>,
    /// `sup s_n` on a level-regular tree (the norm of `B`).
    pub max_degree: Option<u64>,
}

const BOUNDARY_TOL: f64 = 1e-12;

/// Is `λ` an eigenvalue of `B`, witnessed by the eigenfunction above?
pub fn point_spectrum_membership_b(tree: &LevelTree, lambda: Complex64, space: SpaceKind) -> Result<MembershipReport> {
    let r = lambda.norm();
    let mut report = MembershipReport {
        lambda: (lambda.re, lambda.im),
        space,
        verdict: Membership::NotWitnessed,
        test: String::new(),
        liminf: None,
        max_degree: None,
    };
    if r == 0.0 {
        report.verdict = Membership::MemberWitnessed;
        report.test = "λ = 0: Bχ_root = 0".into();
        return Ok(report);
    }
    if let Some(leaf) = tree.first_leaf() {
        report.test = format!("the tree has a leaf at {leaf}; the eigenfunction fails there, no claim");
        return Ok(report);
    }
    let on_circle = (r - 1.0).abs() <= BOUNDARY_TOL;
    if r < 1.0 - BOUNDARY_TOL || (on_circle && space == SpaceKind::Hp) {
        report.verdict = Membership::MemberWitnessed;
        report.test = "unit disk: M_p(n, f) <= |λ|^n".into();
        return Ok(report);
    }
    let Some(degrees) = tree.level_degrees() else {
        if on_circle {
            report.verdict = Membership::Boundary;
        }
        report.test = "unit-disk test only; the tree is not level-regular".into();
        return Ok(report);
    };
    let liminf = liminf_root_estimate(tree, None)?;
    let t = liminf.estimate;
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    report.max_degree = Some(max_degree);
    report.test = "level-regular root test: |λ| < liminf (s_1...s_n)^{1/n}".into();
    if r < t * (1.0 - BOUNDARY_TOL) {
        report.verdict = Membership::MemberWitnessed;
    } else if r <= t * (1.0 + BOUNDARY_TOL) || on_circle {
        report.verdict = Membership::Boundary;
    } else if r > max_degree as f64 {
        report.test = "outside the disk of radius ‖B‖ = sup s_n".into();
    }
    report.liminf = Some(liminf);
    Ok(report)
}

/// Power norms `‖T^m‖` for `m = 1..=M` and the radius estimate.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub operator: String,
    pub p: Exponent,
    pub depth: usize,
    pub power_norms: Vec<NormReport>,
    /// `‖T^m‖^{1/m}` from the reported (certified when available) norms.
    pub radius_sequence: Vec<f64>,
    /// `‖T^m‖^{1/m}` from the observed prefix sups only.
    pub observed_radius_sequence: Vec<f64>,
    /// `min_{k <= m} ‖T^k‖^{1/k}` at `m = M`.
    pub radius_estimate: f64,
    pub converged: bool,
    pub any_truncated: bool,
    pub closed_form: Option<RadiusCertificate>,
}

pub fn spectral_radius(tree: &LevelTree, which: Direction, p: Exponent, max_power: usize) -> Result<SpectralReport> {
    if max_power == 0 {
        return Err(Error::InvalidParameter("max power must be >= 1".into()));
    }
    let need = match which {
        Direction::Forward => max_power + 1,
        Direction::Backward => max_power,
    };
    if tree.depth() < need {
        return Err(Error::DepthTooSmall {
            depth: tree.depth(),
            requirement: format!("powers up to {max_power} of {which} need depth >= {need}"),
        });
    }
    // Warm the descendant-map memo serially so the parallel sweep only reads.
    for r in 0..=tree.depth().saturating_sub(max_power) {
        tree.descendant_map(r, max_power)?;
    }
    let power_norms: Vec<NormReport> = (1..=max_power)
        .into_par_iter()
        .map(|m| operator_norm(tree, OperatorKind::new(which, m)?, p))
        .collect::<Result<_>>()?;
    let root = |q: &Quantity, m: usize| (q.ln() / (p.as_f64() * m as f64)).exp();
    let radius_sequence: Vec<f64> = power_norms
        .iter()
        .enumerate()
        .map(|(i, r)| root(&r.value_p_power, i + 1))
        .collect();
    let observed_radius_sequence = power_norms
        .iter()
        .enumerate()
        .map(|(i, r)| root(&r.observed_p_power, i + 1))
        .collect();
    let running: Vec<f64> = radius_sequence
        .iter()
        .scan(f64::INFINITY, |m, &x| {
            *m = m.min(x);
            Some(*m)
        })
        .collect();
    let tail = &running[running.len().saturating_sub(3)..];
    let converged = tail.len() == 3
        && tail
            .windows(2)
            .all(|w| (w[1] - w[0]).abs() <= CONVERGENCE_TOL * w[0].abs());
    Ok(SpectralReport {
        operator: which.to_string(),
        p,
        depth: tree.depth(),
        any_truncated: power_norms.iter().any(|r| r.truncated),
        radius_estimate: *running.last().expect("max_power >= 1"),
        converged,
        closed_form: Certificates::for_spec(tree.spec()).radius(which == Direction::Forward, p),
        power_norms,
        radius_sequence,
        observed_radius_sequence,
    })
}

fn modulus_exceeds_one<T: TreeScalar>(lambda: &T) -> bool {
    lambda.modulus() > <T::Magnitude as One>::one()
}

/// `f_w(v) = -1/λ^{|v|-|w|+1}` on the sector of `w`, stored through level
/// `depth - 1`; checks `(S - λ) f_w = χ_w` below the depth.
pub fn resolvent_witness_s<T: TreeScalar>(
    tree: &LevelTree,
    w: &VertexId,
    lambda: &T,
    p: Exponent,
) -> Result<WitnessReport<T>> {
    if !modulus_exceeds_one(lambda) {
        return Err(Error::InvalidParameter(
            "the resolvent witness needs |λ| > 1 (otherwise it is not in H^p)".into(),
        ));
    }
    tree.descendant_range(w, 0)?;
    let depth = tree.depth();
    if w.level >= depth {
        return Err(Error::DepthTooSmall {
            depth,
            requirement: format!("the witness at {w} needs depth > {}", w.level),
        });
    }
    let inv = T::one() / lambda.clone();
    let mut levels: Vec<Vec<Segment<T>>> = vec![Vec::new(); depth];
    let mut value = -inv.clone();
    for (n, level) in levels.iter_mut().enumerate().skip(w.level) {
        let (lo, hi) = tree.descendant_range(w, n - w.level)?;
        level.push(Segment {
            len: hi - &lo,
            start: lo,
            value: value.clone(),
        });
        value = value * inv.clone();
    }
    let f = TreeFunction::from_level_segments(levels);
    let lhs = apply_forward(tree, &f, 1)?.sub(&f.scale(lambda));
    let (residual, residual_is_zero) = residual_of(&lhs.sub(&TreeFunction::indicator(w)), 0..depth);
    let lam_p = lambda.abs_pow(p)?;
    let mut bound = <T::Magnitude as One>::one() / lam_p.clone();
    let mut profile = Vec::new();
    let mut holds = true;
    for n in w.level..depth {
        let m = mean_p_power(tree, &f, p, n)?;
        holds &= m <= bound;
        profile.push(ProfileEntry {
            level: n,
            mean_p_power: m.to_quantity(),
            bound: bound.to_quantity(),
        });
        bound = bound / lam_p.clone();
    }
    Ok(WitnessReport {
        witness: f,
        identity: "((S - λ) f_w)(v) = χ_w(v); profile M_p^p(n, f_w) <= |λ|^{-p(n-|w|+1)}".into(),
        residual,
        residual_is_zero,
        region: (0, depth - 1),
        profile,
        profile_holds: Some(holds),
        notes: vec![format!("witness truncated at level {}", depth - 1)],
    })
}

/// Outcome of the non-surjectivity construction for `S - λ`.
#[derive(Clone, Debug)]
pub enum BlowupOutcome<T> {
    /// `λ = 0`: `Sf = χ_root` has no solution at all since `(Sf)(root) = 0`.
    NoSolution {
        reason: String,
    },
    Witness(WitnessReport<T>),
}

/// The forced solution `f(v) = -1/λ^{|v|+1}` of `(S - λ) f = χ_root` with
/// `M_p(n, f) = |λ|^{-(n+1)}` unbounded.
pub fn nonsurjectivity_blowup_s<T: TreeScalar>(tree: &LevelTree, lambda: &T, p: Exponent) -> Result<BlowupOutcome<T>> {
    if lambda.is_zero() {
        return Ok(BlowupOutcome::NoSolution {
            reason: "(Sf)(root) = 0 for every f, so Sf = χ_root has no solution".into(),
        });
    }
    if lambda.modulus() >= <T::Magnitude as One>::one() {
        return Err(Error::InvalidParameter("the blowup witness needs 0 < |λ| < 1".into()));
    }
    let depth = tree.depth();
    if depth < 1 {
        return Err(Error::DepthTooSmall {
            depth,
            requirement: "the blowup witness needs depth >= 1".into(),
        });
    }
    let inv = T::one() / lambda.clone();
    let mut value = -inv.clone();
    let mut levels = Vec::with_capacity(depth);
    for n in 0..depth {
        levels.push(vec![Segment {
            start: 0u32.into(),
            len: tree.gamma(n)?.clone(),
            value: value.clone(),
        }]);
        value = value * inv.clone();
    }
    let f = TreeFunction::from_level_segments(levels).with_horizon(Some(depth - 1));
    let lhs = apply_forward(tree, &f, 1)?.sub(&f.scale(lambda));
    let (residual, residual_is_zero) = residual_of(&lhs.sub(&TreeFunction::indicator(&VertexId::root())), 0..depth);
    let inv_p = inv.abs_pow(p)?;
    let mut expected = inv_p.clone();
    let mut profile = Vec::new();
    let mut holds = true;
    for n in 0..depth {
        let m = mean_p_power(tree, &f, p, n)?;
        holds &= m == expected;
        profile.push(ProfileEntry {
            level: n,
            mean_p_power: m.to_quantity(),
            bound: expected.to_quantity(),
        });
        expected = expected * inv_p.clone();
    }
    Ok(BlowupOutcome::Witness(WitnessReport {
        witness: f,
        identity: "((S - λ) f)(v) = χ_root(v); profile M_p^p(n, f) = |λ|^{-p(n+1)}".into(),
        residual,
        residual_is_zero,
        region: (0, depth - 1),
        profile,
        profile_holds: Some(holds),
        notes: vec!["M_p(n, f) grows without bound, so χ_root is not in the range of S - λ".into()],
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PointSpectrumS {
    /// A leaf `w` gives `Sχ_w = 0`.
    ZeroOnly { leaf: VertexId, shifted_is_zero: bool },
    /// No leaf up to the materialized depth.
    Empty { caveat: String },
}

pub fn point_spectrum_s(tree: &LevelTree) -> Result<PointSpectrumS> {
    match tree.first_leaf() {
        Some(leaf) => {
            let chi = TreeFunction::<num_rational::BigRational>::indicator(&leaf);
            let shifted = apply_forward(tree, &chi, 1)?;
            Ok(PointSpectrumS::ZeroOnly {
                leaf,
                shifted_is_zero: shifted.is_zero(),
            })
        }
        None => Ok(PointSpectrumS::Empty {
            caveat: format!("leafless up to the materialized depth {}", tree.depth()),
        }),
    }
}

/// Solves `Sf = λf` level by level from the root (`λ != 0`): the root value
/// is forced to 0 and each level is `(Sf)/λ` of the previous ones.
pub fn forced_s_eigenfunction<T: TreeScalar>(tree: &LevelTree, lambda: &T) -> Result<TreeFunction<T>> {
    if lambda.is_zero() {
        return Err(Error::InvalidParameter(
            "the recursion divides by λ, so λ must be nonzero".into(),
        ));
    }
    let mut f: TreeFunction<T> = TreeFunction::zero();
    for n in 1..=tree.depth() {
        let next = apply_forward(tree, &f.truncate(n), 1)?.truncate(n + 1);
        f = f.add(
            &TreeFunction::from_level_segments(
                next.levels()
                    .iter()
                    .enumerate()
                    .map(|(l, segs)| if l == n { segs.clone() } else { Vec::new() })
                    .collect(),
            )
            .scale(&(T::one() / lambda.clone())),
        );
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::build_inline;
    use crate::tree::{materialize, SequenceTail, TreeSpec};
    use num_bigint::BigUint;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn tree(name: &str, depth: usize) -> LevelTree {
        materialize(&build_inline(name).unwrap().spec, depth).unwrap()
    }

    #[test]
    fn eigenfunction_zero_is_root_indicator() {
        let t = tree("k_tree?k=3", 5);
        let r = eigenfunction_b(&t, &q(0, 1)).unwrap();
        assert_eq!(
            r.witness,
            TreeFunction::indicator(&VertexId::root()).with_horizon(Some(5))
        );
        assert!(r.residual_is_zero);
    }

    #[test]
    fn eigenfunction_on_homogeneous_two() {
        let t = tree("homogeneous?q=2", 6);
        let r = eigenfunction_b(&t, &q(2, 1)).unwrap();
        assert!(r.residual_is_zero);
        for n in 0..=6 {
            assert_eq!(
                r.witness.level(n),
                &[Segment::new(0u32, BigUint::from(1u32) << n, q(1, 1))]
            );
        }
    }

    #[test]
    fn eigenfunction_on_level_sequence() {
        let spec = TreeSpec::level_sequence(vec![2, 3, 1], SequenceTail::Cycle).unwrap();
        let t = materialize(&spec, 7).unwrap();
        let lam = q(-3, 4);
        let r = eigenfunction_b(&t, &lam).unwrap();
        assert!(r.residual_is_zero);
        let s = [2i64, 3, 1, 2, 3, 1, 2];
        let mut expected = q(1, 1);
        for (n, d) in s.iter().enumerate() {
            expected = expected * lam.clone() / q(*d, 1);
            assert_eq!(r.witness.get(&VertexId::new(n + 1, 0u32)), expected);
        }
    }

    #[test]
    fn eigenfunction_fails_at_leaves() {
        let spec = TreeSpec::explicit(vec![vec![2], vec![0, 2]], 1);
        let t = materialize(&spec, 4).unwrap();
        let r = eigenfunction_b(&t, &0.5f64).unwrap();
        assert!(!r.residual_is_zero);
        assert_eq!(r.notes.len(), 1);
    }

    #[test]
    fn complex_eigenfunction_on_ceil_tree() {
        let t = tree("ceil_three_halves", 20);
        let r = eigenfunction_b(&t, &Complex64::new(0.4, -0.7)).unwrap();
        assert!(r.residual.to_f64() < 1e-12);
    }

    #[test]
    fn resolvent_at_root() {
        let t = tree("homogeneous?q=2", 6);
        let r = resolvent_witness_s(&t, &VertexId::root(), &q(2, 1), Exponent::integer(2)).unwrap();
        assert!(r.residual_is_zero);
        assert_eq!(r.witness.get(&VertexId::root()), q(-1, 2));
        assert_eq!(r.witness.get(&VertexId::new(1, 1u32)), q(-1, 4));
        assert_eq!(r.profile_holds, Some(true));
        assert!(resolvent_witness_s(&t, &VertexId::root(), &q(1, 1), Exponent::integer(1)).is_err());
    }

    #[test]
    fn resolvent_off_sector_is_zero() {
        let t = tree("k_tree?k=2", 8);
        let w = VertexId::new(2, 1u32);
        let r = resolvent_witness_s(&t, &w, &Complex64::new(0.0, -1.5), Exponent::new(1.5).unwrap()).unwrap();
        assert!(r.residual.to_f64() < 1e-14);
        assert!(r.witness.get(&VertexId::new(3, 0u32)).is_zero());
        assert!(r.witness.get(&VertexId::root()).is_zero());
        assert_eq!(r.profile_holds, Some(true));
    }

    #[test]
    fn blowup_half() {
        let t = tree("ceil_three_halves", 10);
        for p in [1, 3] {
            match nonsurjectivity_blowup_s(&t, &q(1, 2), Exponent::integer(p)).unwrap() {
                BlowupOutcome::Witness(r) => {
                    assert!(r.residual_is_zero);
                    assert_eq!(r.profile_holds, Some(true));
                    assert_eq!(
                        r.profile[4].mean_p_power,
                        Quantity::Exact(num_traits::pow(q(32, 1), p as usize))
                    );
                }
                BlowupOutcome::NoSolution { .. } => panic!("λ = 1/2 has a witness"),
            }
        }
        assert!(matches!(
            nonsurjectivity_blowup_s(&t, &q(0, 1), Exponent::integer(1)).unwrap(),
            BlowupOutcome::NoSolution { .. }
        ));
        assert!(nonsurjectivity_blowup_s(&t, &q(-1, 1), Exponent::integer(1)).is_err());
    }

    #[test]
    fn point_spectrum_of_s() {
        let spec = TreeSpec::explicit(vec![vec![1], vec![2], vec![0, 1]], 1);
        let t = materialize(&spec, 5).unwrap();
        assert_eq!(
            point_spectrum_s(&t).unwrap(),
            PointSpectrumS::ZeroOnly {
                leaf: VertexId::new(2, 0u32),
                shifted_is_zero: true
            }
        );
        assert!(matches!(
            point_spectrum_s(&tree("homogeneous?q=2", 5)).unwrap(),
            PointSpectrumS::Empty { .. }
        ));
        assert!(forced_s_eigenfunction(&tree("k_tree?k=3", 6), &q(1, 3))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn membership_tests() {
        let t = tree("homogeneous?q=3", 24);
        let m = |l: Complex64, s| point_spectrum_membership_b(&t, l, s).unwrap().verdict;
        assert_eq!(m(Complex64::new(0.5, 0.0), SpaceKind::Hp0), Membership::MemberWitnessed);
        assert_eq!(m(Complex64::new(0.0, 2.9), SpaceKind::Hp0), Membership::MemberWitnessed);
        assert_eq!(m(Complex64::new(3.5, 0.0), SpaceKind::Hp), Membership::NotWitnessed);
        let k = tree("k_tree?k=3", 10);
        let v = point_spectrum_membership_b(&k, Complex64::new(1.0, 0.0), SpaceKind::Hp0).unwrap();
        assert_eq!(v.verdict, Membership::Boundary);
    }

    #[test]
    fn periodic_radius() {
        let t = tree("periodic?q=2,3", 20);
        let r = spectral_radius(&t, Direction::Backward, Exponent::integer(2), 12).unwrap();
        assert!((r.radius_estimate - 6f64.sqrt()).abs() < 1e-12);
        assert!(r.converged);
        assert!((r.closed_form.unwrap().value - 6f64.sqrt()).abs() < 1e-12);
    }
}
