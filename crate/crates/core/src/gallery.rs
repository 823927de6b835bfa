//! Named tree families with closed-form certificates.
//!
//! Every family knows its level counts, its maximal subtree counts and the
//! exact (or divergent) level ratios of the shift norms. The generic modules
//! consult [`Certificates`] to turn a finite prefix into a proven value.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Exponent, Quantity};
use crate::shift::{operator_norm, Direction, OperatorKind};
use crate::spectral::spectral_radius;
use crate::tree::{seq_term, Budget, DegreeRule, Run, SequenceTail, SpecKind, TreeSpec};

/// Registered family names, in listing order.
pub const NAMES: [&str; 8] = [
    "homogeneous",
    "level_sequence",
    "k_tree",
    "quadratic_growth",
    "factorial",
    "ceil_three_halves",
    "periodic",
    "two_three_blocks",
];

pub type Params = BTreeMap<String, String>;

/// A named family instance.
#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: String,
    pub params: Params,
    pub spec: TreeSpec,
}

impl GalleryEntry {
    pub fn certificates(&self) -> Certificates {
        Certificates::for_spec(&self.spec)
    }
}

/// Parses `name?key=value&key=value` (the part after `gallery:`).
pub fn parse_inline(s: &str) -> Result<(String, Params)> {
    let (name, query) = s.split_once('?').unwrap_or((s, ""));
    let mut params = Params::new();
    for pair in query.split('&').filter(|p| !p.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("gallery parameter `{pair}` is not key=value")))?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name.trim().to_string(), params))
}

fn take_u64(params: &Params, key: &str, default: Option<u64>) -> Result<u64> {
    match params.get(key) {
        Some(v) => v
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("`{key}` must be a nonnegative integer, got `{v}`"))),
        None => default.ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{key}`"))),
    }
}

fn take_list(params: &Params, key: &str) -> Result<Vec<u64>> {
    let raw = params
        .get(key)
        .ok_or_else(|| Error::InvalidParameter(format!("missing parameter `{key}`")))?;
    let list: Vec<u64> = raw
        .split(',')
        .map(|x| {
            x.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "`{key}` must be a comma-separated list of integers, got `{raw}`"
                ))
            })
        })
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(Error::InvalidParameter(format!("`{key}` is empty")));
    }
    Ok(list)
}

fn check_keys(name: &str, params: &Params, allowed: &[&str]) -> Result<()> {
    match params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParameter(format!(
            "`{name}` does not take parameter `{k}`"
        ))),
        None => Ok(()),
    }
}

/// Builds a registered family.
pub fn build(name: &str, params: &Params) -> Result<GalleryEntry> {
    let spec = match name {
        "homogeneous" => {
            check_keys(name, params, &["q"])?;
            let q = take_u64(params, "q", Some(2))?;
            if q == 0 {
                return Err(Error::InvalidParameter("homogeneous trees need q >= 1".into()));
            }
            TreeSpec::homogeneous(q)
        }
        "level_sequence" | "periodic" => {
            let key = if name == "periodic" { "q" } else { "s" };
            check_keys(name, params, &[key, "tail"])?;
            let s = take_list(params, key)?;
            if s.contains(&0) {
                return Err(Error::InvalidParameter(format!("`{key}` entries must be >= 1")));
            }
            let tail = match params.get("tail").map(String::as_str) {
                None | Some("cycle") => SequenceTail::Cycle,
                Some("last") if name == "level_sequence" => SequenceTail::Last,
                Some(t) => return Err(Error::InvalidParameter(format!("unknown tail `{t}`"))),
            };
            TreeSpec::level_sequence(s, tail)?
        }
        "k_tree" => {
            check_keys(name, params, &["k"])?;
            let k = take_u64(params, "k", Some(2))?;
            if k < 2 {
                return Err(Error::InvalidParameter("k_tree needs k >= 2".into()));
            }
            gallery_spec(name, params, Family::KTree(k))
        }
        "quadratic_growth" => {
            check_keys(name, params, &[])?;
            gallery_spec(name, params, Family::QuadraticGrowth)
        }
        "factorial" => {
            check_keys(name, params, &[])?;
            gallery_spec(name, params, Family::Factorial)
        }
        "ceil_three_halves" => {
            check_keys(name, params, &[])?;
            gallery_spec(name, params, Family::CeilThreeHalves)
        }
        "two_three_blocks" => {
            check_keys(name, params, &[])?;
            gallery_spec(name, params, Family::TwoThreeBlocks)
        }
        other => return Err(Error::UnknownGallery(other.to_string())),
    };
    Ok(GalleryEntry {
        name: name.to_string(),
        params: params.clone(),
        spec: spec.with_leafless_claim(true),
    })
}

/// Builds from the inline form `name?params`.
pub fn build_inline(s: &str) -> Result<GalleryEntry> {
    let (name, params) = parse_inline(s)?;
    build(&name, &params)
}

/// One default instance of every family, for listings and sweeps.
pub fn defaults() -> Vec<GalleryEntry> {
    let with = |name: &str, kv: &[(&str, &str)]| {
        let params = kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        build(name, &params).expect("default gallery parameters are valid")
    };
    vec![
        with("homogeneous", &[("q", "2")]),
        with("level_sequence", &[("s", "1,2,1,3,2")]),
        with("k_tree", &[("k", "3")]),
        with("quadratic_growth", &[]),
        with("factorial", &[]),
        with("ceil_three_halves", &[]),
        with("periodic", &[("q", "2,3")]),
        with("two_three_blocks", &[]),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct ListedEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub description: &'static str,
}

pub fn list() -> Vec<ListedEntry> {
    let e = |name, params, description| ListedEntry {
        name,
        params,
        description,
    };
    vec![
        e("homogeneous", "q (default 2)", "every vertex has q children"),
        e(
            "level_sequence",
            "s=s1,s2,...; tail=cycle|last",
            "level-n vertices have s_{n+1} children",
        ),
        e(
            "k_tree",
            "k >= 2 (default 2)",
            "one distinguished vertex per level has k children, the rest one",
        ),
        e(
            "quadratic_growth",
            "",
            "the distinguished level-n vertex has n+2 children, the rest one",
        ),
        e("factorial", "", "level-n vertices have n+2 children"),
        e(
            "ceil_three_halves",
            "",
            "the leftmost ceil(a_n/2) vertices of level n have two children, the rest one",
        ),
        e(
            "periodic",
            "q=q1,...,qm",
            "level-n vertices have q_{n mod m + 1} children",
        ),
        e("two_three_blocks", "", "s_n = 3 for k^2+1 <= n <= k^2+k, else 2"),
    ]
}

/// Degree `s_n` (1-based) of the two-three block sequence.
pub fn two_three_term(n: u64) -> u64 {
    if n < 2 {
        return 2;
    }
    let k = (n - 1).isqrt();
    if k >= 1 && n <= k * k + k {
        3
    } else {
        2
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Family {
    Homogeneous(u64),
    LevelSequence { s: Vec<u64>, tail: SequenceTail },
    Explicit { levels: Vec<Vec<u64>>, tail: u64 },
    KTree(u64),
    QuadraticGrowth,
    Factorial,
    CeilThreeHalves,
    TwoThreeBlocks,
    Unknown,
}

impl Family {
    fn of(kind: &SpecKind) -> Family {
        match kind {
            SpecKind::Homogeneous { q } => Family::Homogeneous(*q),
            SpecKind::LevelSequence { s, tail } => Family::LevelSequence {
                s: s.clone(),
                tail: *tail,
            },
            SpecKind::Explicit { levels, tail } => Family::Explicit {
                levels: levels.clone(),
                tail: *tail,
            },
            SpecKind::Gallery { name, params } => match name.as_str() {
                "k_tree" => take_u64(params, "k", Some(2)).map_or(Family::Unknown, Family::KTree),
                "quadratic_growth" => Family::QuadraticGrowth,
                "factorial" => Family::Factorial,
                "ceil_three_halves" => Family::CeilThreeHalves,
                "two_three_blocks" => Family::TwoThreeBlocks,
                _ => Family::Unknown,
            },
            _ => Family::Unknown,
        }
    }

    /// Degree of every level-`level` vertex, for level-regular families.
    fn level_degree(&self, level: usize) -> Option<u64> {
        match self {
            Family::Homogeneous(q) => Some(*q),
            Family::LevelSequence { s, tail } => Some(seq_term(s, *tail, level)),
            Family::Factorial => Some(level as u64 + 2),
            Family::TwoThreeBlocks => Some(two_three_term(level as u64 + 1)),
            _ => None,
        }
    }
}

struct FamilyRule(Family);

impl DegreeRule for FamilyRule {
    fn level_runs(&self, level: usize, width: &BigUint, _: &mut Budget) -> Result<Vec<Run>> {
        if let Some(d) = self.0.level_degree(level) {
            return Ok(vec![Run::new(width.clone(), d)]);
        }
        let rest = || width - 1u32;
        Ok(match &self.0 {
            Family::KTree(k) => vec![Run::new(1u32, *k), Run::new(rest(), 1)],
            Family::QuadraticGrowth => vec![Run::new(1u32, level as u64 + 2), Run::new(rest(), 1)],
            Family::CeilThreeHalves => {
                let two = (width + 1u32) >> 1;
                let one = width - &two;
                vec![Run::new(two, 2), Run::new(one, 1)]
            }
            _ => unreachable!("only gallery families are built from FamilyRule"),
        })
    }
}

fn gallery_spec(name: &str, params: &Params, family: Family) -> TreeSpec {
    TreeSpec::new(
        SpecKind::Gallery {
            name: name.to_string(),
            params: params.clone(),
        },
        Arc::new(FamilyRule(family)),
    )
}

pub type RatioFn = Arc<dyn Fn(usize) -> Quantity + Send + Sync>;

/// What a closed form says about the level ratios `r_n` of a norm formula
/// (all quantities are `p`-th powers).
#[derive(Clone)]
pub enum NormCertificate {
    /// `sup_n r_n` equals `value_p_power`, whether or not it is attained.
    Supremum {
        value_p_power: Quantity,
        description: String,
    },
    /// `r_n = value_p_power` for every `n >= from_level`; the sup is the
    /// larger of that and the ratios below `from_level`.
    EventuallyConstant {
        from_level: usize,
        value_p_power: Quantity,
        description: String,
    },
    /// `r_n` has the given closed form and tends to infinity.
    Divergent { ratio: RatioFn, description: String },
}

impl NormCertificate {
    pub fn description(&self) -> &str {
        match self {
            NormCertificate::Supremum { description, .. }
            | NormCertificate::EventuallyConstant { description, .. }
            | NormCertificate::Divergent { description, .. } => description,
        }
    }
}

impl fmt::Debug for NormCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.description())
    }
}

/// Closed-form spectral radius.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusCertificate {
    pub value: f64,
    pub description: String,
}

/// Closed forms attached to a spec, derived from its kind.
#[derive(Clone, Debug)]
pub struct Certificates {
    family: Family,
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn int_q(n: u64) -> Quantity {
    Quantity::from_integer(&big(n))
}

/// `k^(p-1)`, exact for integer `p`.
pub(crate) fn pow_minus_one(k: &BigUint, p: Exponent) -> Quantity {
    match p {
        Exponent::Integer(e) => Quantity::from_integer(&num_traits::pow(k.clone(), e as usize - 1)),
        Exponent::Real(x) => Quantity::Approx(((x - 1.0) * crate::scalar::ln_biguint(k)).exp()),
    }
}

fn ceil_sequence(n: usize) -> BigUint {
    let mut a = BigUint::one();
    for _ in 0..n {
        a = (&a * 3u32 + 1u32) >> 1;
    }
    a
}

impl Certificates {
    pub fn for_spec(spec: &TreeSpec) -> Self {
        Certificates {
            family: Family::of(spec.kind()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.family == Family::Unknown
    }

    /// Closed-form degree of level `level`, for level-regular families.
    pub fn level_degree(&self, level: usize) -> Option<u64> {
        self.family.level_degree(level)
    }

    fn level_product(&self, from: usize, len: usize) -> Option<BigUint> {
        (from..from + len)
            .map(|l| self.family.level_degree(l).map(big))
            .product()
    }

    /// Closed form of `γ(n)`.
    pub fn gamma(&self, n: usize) -> Option<BigUint> {
        let n64 = n as u64;
        match &self.family {
            Family::KTree(k) => Some(big(n64 * (k - 1) + 1)),
            Family::QuadraticGrowth => Some(big(n64 * (n64 + 1) / 2 + 1)),
            Family::Factorial => Some((1..=n64 + 1).map(big).product()),
            Family::CeilThreeHalves => Some(ceil_sequence(n)),
            Family::Explicit { .. } | Family::Unknown => None,
            _ => self.level_product(0, n),
        }
    }

    /// Closed form of `K(m, r)` where one is known.
    pub fn max_subtree(&self, m: usize, r: usize) -> Option<BigUint> {
        let (m64, r64) = (m as u64, r as u64);
        match &self.family {
            Family::KTree(k) => Some(big(m64 * (k - 1) + 1)),
            Family::QuadraticGrowth => Some(big(1 + m64 * r64 + m64 * (m64 + 1) / 2)),
            Family::CeilThreeHalves => (m >= 1 && m <= r + 1).then(|| BigUint::one() << m),
            Family::Explicit { .. } | Family::Unknown => None,
            _ => self.level_product(r, m),
        }
    }

    /// Level-regular families (and the explicit kind past its listed
    /// levels) make `S` an isometry.
    pub fn level_regular(&self) -> Option<bool> {
        match &self.family {
            Family::Homogeneous(_) | Family::LevelSequence { .. } | Family::Factorial | Family::TwoThreeBlocks => {
                Some(true)
            }
            Family::KTree(_) | Family::QuadraticGrowth | Family::CeilThreeHalves => Some(false),
            _ => None,
        }
    }

    pub fn leafless(&self) -> Option<bool> {
        match &self.family {
            Family::Homogeneous(q) => Some(*q >= 1),
            Family::LevelSequence { s, .. } => Some(s.iter().all(|&d| d >= 1)),
            Family::Explicit { levels, tail } => Some(*tail >= 1 && levels.iter().flatten().all(|&d| d >= 1)),
            Family::Unknown => None,
            _ => Some(true),
        }
    }

    /// Whether `γ(n) -> ∞`, decided from the closed form.
    pub fn gamma_diverges(&self) -> Option<bool> {
        match &self.family {
            Family::Homogeneous(q) => Some(*q >= 2),
            Family::LevelSequence { s, tail } => Some(match tail {
                SequenceTail::Cycle => s.iter().any(|&d| d >= 2),
                SequenceTail::Last => *s.last().expect("non-empty") >= 2,
            }),
            Family::Explicit { tail, .. } => Some(*tail >= 2),
            Family::Unknown => None,
            _ => Some(true),
        }
    }

    fn max_window(&self, s: &[u64], tail: SequenceTail, m: usize) -> BigUint {
        (0..s.len())
            .map(|start| (start..start + m).map(|l| big(seq_term(s, tail, l))).product())
            .max()
            .expect("non-empty sequence")
    }

    /// Certificate for the level ratios of `‖S^m‖^p`.
    pub fn forward(&self, m: usize, _p: Exponent) -> Option<NormCertificate> {
        let m64 = m as u64;
        match &self.family {
            Family::Homogeneous(_) | Family::LevelSequence { .. } | Family::Factorial | Family::TwoThreeBlocks => {
                Some(NormCertificate::EventuallyConstant {
                    from_level: m,
                    value_p_power: int_q(1),
                    description: "level-regular degrees: every ratio K(m,n-m)γ(n-m)/γ(n) equals 1".into(),
                })
            }
            Family::Explicit { levels, .. } => Some(NormCertificate::EventuallyConstant {
                from_level: levels.len() + m,
                value_p_power: int_q(1),
                description: format!(
                    "degrees are level-regular from level {}, so ratios equal 1 from level {}",
                    levels.len(),
                    levels.len() + m
                ),
            }),
            Family::KTree(k) => Some(NormCertificate::Supremum {
                value_p_power: int_q(m64 * (k - 1) + 1),
                description: format!(
                    "k-tree: ratios (m(k-1)+1)γ(n-m)/γ(n) increase to m(k-1)+1 = {}",
                    m64 * (k - 1) + 1
                ),
            }),
            Family::QuadraticGrowth => {
                let this = self.clone();
                Some(NormCertificate::Divergent {
                    ratio: Arc::new(move |n| {
                        let k = this.max_subtree(m, n - m).expect("closed form");
                        Quantity::ratio(
                            &(k * this.gamma(n - m).expect("closed form")),
                            &this.gamma(n).expect("closed form"),
                        )
                    }),
                    description: "quadratic growth: ratio (1+m(n-m)+m(m+1)/2)γ(n-m)/γ(n) with γ(n) = n(n+1)/2+1 grows without bound".into(),
                })
            }
            Family::CeilThreeHalves => Some(NormCertificate::Supremum {
                value_p_power: Quantity::Exact(num_traits::pow(BigRational::new(4.into(), 3.into()), m)),
                description: "ceil(3a/2) tree: ratios 2^m a_{n-m}/a_n stay below and approach (4/3)^m".into(),
            }),
            Family::Unknown => None,
        }
    }

    /// Certificate for the level ratios of `‖B^m‖^p`.
    pub fn backward(&self, m: usize, p: Exponent) -> Option<NormCertificate> {
        let m64 = m as u64;
        let pow = |b: BigUint| Quantity::from_integer(&b).pow(p);
        match &self.family {
            Family::Homogeneous(q) => Some(NormCertificate::EventuallyConstant {
                from_level: 0,
                value_p_power: pow(num_traits::pow(big(*q), m)),
                description: format!("homogeneous: every ratio equals q^(mp) with q = {q}"),
            }),
            Family::LevelSequence { s, tail } => Some(NormCertificate::Supremum {
                value_p_power: pow(self.max_window(s, *tail, m)),
                description: "level sequence: ratios are (s_{n+1}...s_{n+m})^p; sup over one period of windows".into(),
            }),
            Family::Explicit { levels, tail } => Some(NormCertificate::EventuallyConstant {
                from_level: levels.len(),
                value_p_power: pow(num_traits::pow(big(*tail), m)),
                description: format!(
                    "degrees equal {tail} from level {}, so ratios equal {tail}^(mp) from there",
                    levels.len()
                ),
            }),
            Family::KTree(k) => Some(NormCertificate::Supremum {
                value_p_power: pow(big(m64 * (k - 1) + 1)),
                description: "k-tree: ratios decrease from (m(k-1)+1)^p at n = 0".into(),
            }),
            Family::QuadraticGrowth if p == Exponent::Integer(1) => Some(NormCertificate::Supremum {
                value_p_power: Quantity::from_integer(&self.gamma(m).expect("closed form")),
                description: "quadratic growth, p = 1: γ(n+m)/γ(n) <= γ(m)".into(),
            }),
            Family::QuadraticGrowth => {
                let this = self.clone();
                Some(NormCertificate::Divergent {
                    ratio: Arc::new(move |n| {
                        let k = this.max_subtree(m, n).expect("closed form");
                        pow_minus_one(&k, p).mul(&Quantity::ratio(
                            &this.gamma(n + m).expect("closed form"),
                            &this.gamma(n).expect("closed form"),
                        ))
                    }),
                    description: "quadratic growth, p > 1: ratio K(m,n)^(p-1)γ(n+m)/γ(n) with K(m,n) = 1+mn+m(m+1)/2 grows without bound".into(),
                })
            }
            Family::Factorial => Some(NormCertificate::Divergent {
                ratio: Arc::new(move |n| {
                    let k: BigUint = (0..m64).map(|i| big(n as u64 + i + 2)).product();
                    Quantity::from_integer(&k).pow(p)
                }),
                description: "factorial: ratio ((n+2)(n+3)...(n+m+1))^p grows without bound".into(),
            }),
            Family::TwoThreeBlocks => Some(NormCertificate::Supremum {
                value_p_power: pow(num_traits::pow(big(3), m)),
                description: "two-three blocks: every window product is at most 3^m, attained at s_{m^2+1}...s_{m^2+m}"
                    .into(),
            }),
            Family::CeilThreeHalves | Family::Unknown => None,
        }
    }

    /// Closed-form spectral radius of `S` (`forward`) or `B`.
    pub fn radius(&self, forward: bool, p: Exponent) -> Option<RadiusCertificate> {
        let c = |value: f64, description: &str| {
            Some(RadiusCertificate {
                value,
                description: description.to_string(),
            })
        };
        if forward {
            return match &self.family {
                Family::Homogeneous(_) | Family::LevelSequence { .. } | Family::Factorial | Family::TwoThreeBlocks => {
                    c(1.0, "S is an isometry")
                }
                Family::KTree(_) => c(1.0, "(m(k-1)+1)^(1/(mp)) -> 1"),
                Family::CeilThreeHalves => c(
                    (4.0f64 / 3.0).powf(1.0 / p.as_f64()),
                    "‖S^m‖ = (4/3)^(m/p), so r(S) = (4/3)^(1/p)",
                ),
                _ => None,
            };
        }
        match &self.family {
            Family::Homogeneous(q) => c(*q as f64, "‖B^m‖ = q^m"),
            Family::LevelSequence { s, tail } => match tail {
                SequenceTail::Cycle => c(
                    (s.iter().map(|&d| (d as f64).ln()).sum::<f64>() / s.len() as f64).exp(),
                    "periodic degrees: r(B) is the geometric mean over one period",
                ),
                SequenceTail::Last => c(
                    *s.last().expect("non-empty") as f64,
                    "degrees eventually constant: r(B) is the final degree",
                ),
            },
            Family::Explicit { tail, .. } => c(*tail as f64, "degrees eventually constant: r(B) is the final degree"),
            Family::KTree(_) => c(1.0, "(m(k-1)+1)^(1/m) -> 1"),
            Family::TwoThreeBlocks => c(3.0, "‖B^m‖ = 3^m"),
            _ => None,
        }
    }

    /// Human-readable list of the closed forms this spec carries.
    pub fn descriptions(&self) -> Vec<String> {
        let p = Exponent::integer(1);
        let mut out = Vec::new();
        if self.gamma(0).is_some() {
            out.push("closed-form level counts γ(n)".to_string());
        }
        if let Some(c) = self.forward(1, p) {
            out.push(format!("‖S^m‖: {}", c.description()));
        }
        if let Some(c) = self.backward(1, Exponent::integer(2)) {
            out.push(format!("‖B^m‖: {}", c.description()));
        }
        for (forward, name) in [(true, "r(S)"), (false, "r(B)")] {
            if let Some(r) = self.radius(forward, p) {
                out.push(format!("{name}: {}", r.description));
            }
        }
        if let Some(d) = self.gamma_diverges() {
            out.push(format!("γ(n) -> ∞: {d}"));
        }
        out
    }
}

impl Certificates {
    /// Whether a supremum certificate is attained by some level ratio
    /// within `depth`, so the observed sup must equal it.
    fn attained_within(&self, forward: bool, m: usize, depth: usize) -> bool {
        if forward {
            return false;
        }
        match &self.family {
            Family::Homogeneous(_) | Family::KTree(_) => depth >= m,
            Family::LevelSequence { s, .. } => depth + 1 >= s.len() + m,
            Family::TwoThreeBlocks => depth >= m * m + m,
            _ => false,
        }
    }
}

/// One closed form compared with the value computed by the generic modules.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub matches: bool,
}

/// Closed-form radius next to the power-norm estimate; not pass/fail.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusDiagnostic {
    pub operator: String,
    pub p: Exponent,
    pub closed_form: f64,
    pub estimate: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfTestReport {
    pub name: String,
    pub depth: usize,
    pub checks: Vec<CertificateCheck>,
    pub mismatches: usize,
    pub radius: Vec<RadiusDiagnostic>,
}

fn check(
    name: impl Into<String>,
    expected: impl fmt::Display,
    actual: impl fmt::Display,
    matches: bool,
) -> CertificateCheck {
    CertificateCheck {
        name: name.into(),
        expected: expected.to_string(),
        actual: actual.to_string(),
        matches,
    }
}

fn norm_checks(
    c: &Certificates,
    tree: &crate::tree::LevelTree,
    op: OperatorKind,
    p: Exponent,
) -> Result<Vec<CertificateCheck>> {
    let r = operator_norm(tree, op, p)?;
    let mut out = Vec::new();
    let Some(consistent) = r.certificate_consistent else {
        return Ok(out);
    };
    let label = format!("‖{op}‖ (p = {p})");
    out.push(check(
        format!("{label}: ratios consistent with certificate"),
        r.certificate.as_deref().unwrap_or(""),
        format!("observed sup {} at level {}", r.observed_p_power, r.attained_level),
        consistent,
    ));
    let forward = op.which() == Direction::Forward;
    let cert = if forward {
        c.forward(op.power(), p)
    } else {
        c.backward(op.power(), p)
    };
    if let Some(NormCertificate::Supremum { value_p_power, .. }) = cert {
        if c.attained_within(forward, op.power(), tree.depth()) {
            out.push(check(
                format!("{label}: certified sup attained"),
                &value_p_power,
                &r.observed_p_power,
                value_p_power.compare_tol(&r.observed_p_power, crate::shift::RATIO_TOL) == std::cmp::Ordering::Equal,
            ));
        }
    }
    Ok(out)
}

fn ceil_checks(tree: &crate::tree::LevelTree, m_max: usize) -> Result<Vec<CertificateCheck>> {
    let depth = tree.depth();
    let mut out = Vec::new();
    let two_thirds = BigRational::new(2.into(), 3.into());
    let mut pairs = 0;
    let mut failure = None;
    for m in 1..=m_max.min(depth) {
        let bound = num_traits::pow(two_thirds.clone(), m);
        for n in m..=depth {
            pairs += 1;
            let r = BigRational::new(tree.gamma(n - m)?.clone().into(), tree.gamma(n)?.clone().into());
            if r > bound && failure.is_none() {
                failure = Some(format!("a_{}/a_{n} = {r}", n - m));
            }
        }
    }
    out.push(check(
        "a_{n-m}/a_n <= (2/3)^m",
        format!("{pairs} pairs within the bound"),
        failure.clone().unwrap_or_else(|| "all within".into()),
        failure.is_none(),
    ));
    for m in 1..=(depth / 2).saturating_sub(1) {
        let u = crate::tree::VertexId::new(m, 0u32);
        let mut failure = None;
        for k in 0..=m + 1 {
            let got = tree.gamma_sub(k, &u)?;
            if got != BigUint::one() << k && failure.is_none() {
                failure = Some(format!("γ({k}, {u}) = {got}"));
            }
        }
        out.push(check(
            format!("binary subtree of depth {} below {u}", m + 1),
            "2^k k-children",
            failure.clone().unwrap_or_else(|| "2^k k-children".into()),
            failure.is_none(),
        ));
        let lhs = BigUint::one() << (m + 1);
        let rhs = tree.gamma(2 * m + 2)?;
        out.push(check(
            format!("2^{} <= a_{}/2", m + 1, 2 * m + 2),
            format!("{lhs} <= {rhs}/2"),
            rhs,
            &lhs * 2u32 <= *rhs,
        ));
    }
    Ok(out)
}

/// Evaluates every certificate of `entry` against a materialization of
/// depth `depth`. Mismatches are reported, not raised.
pub fn self_test(entry: &GalleryEntry, depth: usize, ps: &[Exponent], m_max: usize) -> Result<SelfTestReport> {
    use rayon::prelude::*;
    let tree = crate::tree::materialize(&entry.spec, depth)?;
    let c = entry.certificates();
    let mut checks = Vec::new();
    for n in 0..=depth {
        if let Some(g) = c.gamma(n) {
            let actual = tree.gamma(n)?;
            checks.push(check(format!("γ({n})"), &g, actual, &g == actual));
        }
    }
    for m in 1..=m_max.min(depth) {
        for r in 0..=depth - m {
            if let Some(k) = c.max_subtree(m, r) {
                let actual = tree.max_gamma_sub(m, r)?;
                checks.push(check(format!("K({m},{r})"), &k, &actual, k == actual));
            }
        }
    }
    if c.level_regular() == Some(true) {
        let degrees = tree.level_degrees();
        let expected: Option<Vec<u64>> = (0..depth).map(|l| c.level_degree(l)).collect();
        if let Some(expected) = expected {
            checks.push(check(
                "level degrees",
                format!("{expected:?}"),
                format!("{degrees:?}"),
                degrees.as_ref() == Some(&expected),
            ));
        }
    }
    if c.leafless() == Some(true) {
        let leaf = tree.first_leaf();
        checks.push(check(
            "leafless",
            "no leaf",
            leaf.as_ref().map_or("no leaf".to_string(), |v| format!("leaf at {v}")),
            leaf.is_none(),
        ));
    }
    let mut jobs = Vec::new();
    for &p in ps {
        for m in 1..=m_max {
            if depth > m {
                jobs.push((OperatorKind::forward(m), p));
            }
            if depth >= m {
                jobs.push((OperatorKind::backward(m), p));
            }
        }
    }
    for r in jobs
        .par_iter()
        .map(|&(op, p)| norm_checks(&c, &tree, op, p))
        .collect::<Result<Vec<_>>>()?
    {
        checks.extend(r);
    }
    if matches!(c.family, Family::CeilThreeHalves) {
        checks.extend(ceil_checks(&tree, m_max)?);
    }
    let mut radius = Vec::new();
    for &p in ps {
        for which in [Direction::Forward, Direction::Backward] {
            let need = if which == Direction::Forward { m_max + 1 } else { m_max };
            if m_max == 0 || depth < need {
                continue;
            }
            if let Some(cf) = c.radius(which == Direction::Forward, p) {
                let r = spectral_radius(&tree, which, p, m_max)?;
                radius.push(RadiusDiagnostic {
                    operator: which.to_string(),
                    p,
                    closed_form: cf.value,
                    estimate: r.radius_estimate,
                    converged: r.converged,
                });
            }
        }
    }
    Ok(SelfTestReport {
        name: entry.name.clone(),
        depth,
        mismatches: checks.iter().filter(|c| !c.matches).count(),
        checks,
        radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::materialize;

    fn sizes(name: &str, depth: usize) -> Vec<u64> {
        let e = build_inline(name).unwrap();
        let t = materialize(&e.spec, depth).unwrap();
        t.level_sizes().iter().map(|n| n.try_into().unwrap()).collect()
    }

    #[test]
    fn level_sizes_of_families() {
        assert_eq!(sizes("k_tree?k=3", 4), vec![1, 3, 5, 7, 9]);
        assert_eq!(sizes("ceil_three_halves", 7), vec![1, 2, 3, 5, 8, 12, 18, 27]);
        assert_eq!(sizes("quadratic_growth", 4), vec![1, 2, 4, 7, 11]);
        assert_eq!(sizes("factorial", 4), vec![1, 2, 6, 24, 120]);
        assert_eq!(sizes("k_tree?k=2", 5)[5], 6);
        assert_eq!(sizes("homogeneous?q=1", 4), vec![1; 5]);
    }

    #[test]
    fn two_three_prefix() {
        let s: Vec<u64> = (1..=6).map(two_three_term).collect();
        assert_eq!(s, vec![2, 3, 2, 2, 3, 3]);
        assert_eq!(two_three_term(10), 3);
        assert_eq!(two_three_term(12), 3);
        assert_eq!(two_three_term(13), 2);
    }

    #[test]
    fn closed_form_gamma_matches() {
        for e in defaults() {
            let c = e.certificates();
            let t = materialize(&e.spec, 20).unwrap();
            for n in 0..=20 {
                if let Some(g) = c.gamma(n) {
                    assert_eq!(&g, t.gamma(n).unwrap(), "{} n={n}", e.name);
                }
            }
        }
    }

    #[test]
    fn parameters_are_validated() {
        assert!(matches!(build_inline("k_tree?k=1"), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_inline("nope"), Err(Error::UnknownGallery(_))));
        assert!(build_inline("periodic?q=2,x").is_err());
        assert!(build_inline("homogeneous?r=2").is_err());
        let (name, params) = parse_inline("periodic?q=2,3").unwrap();
        assert_eq!(name, "periodic");
        assert_eq!(params["q"], "2,3");
    }

    #[test]
    fn self_tests_pass() {
        let ps = [Exponent::integer(1), Exponent::integer(2)];
        for e in defaults() {
            let r = self_test(&e, 24, &ps, 4).unwrap();
            let bad: Vec<_> = r.checks.iter().filter(|c| !c.matches).collect();
            assert!(bad.is_empty(), "{}: {bad:?}", e.name);
        }
        let k3 = build_inline("k_tree?k=3").unwrap();
        let r = self_test(&k3, 40, &[Exponent::integer(1)], 8).unwrap();
        assert_eq!(r.mismatches, 0);
        let periodic = build_inline("periodic?q=2,3").unwrap();
        let r = self_test(&periodic, 12, &[Exponent::integer(1)], 2).unwrap();
        assert!(r
            .checks
            .iter()
            .any(|c| c.name == "‖B^2‖ (p = 1): certified sup attained" && c.actual == "6"));
    }
}
