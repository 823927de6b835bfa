use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A maximal block of consecutive vertices of one level sharing a degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Run {
    pub len: BigUint,
    pub degree: u64,
}

impl Run {
    pub fn new(len: impl Into<BigUint>, degree: u64) -> Self {
        Run {
            len: len.into(),
            degree,
        }
    }
}

/// Counts the work a rule performs while materializing, against a cap.
#[derive(Debug)]
pub struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Budget { used: 0, cap }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn charge(&mut self, amount: &BigUint, what: &str) -> Result<()> {
        let add = amount.to_u64().unwrap_or(u64::MAX);
        match self.used.checked_add(add) {
            Some(total) if total <= self.cap => {
                self.used = total;
                Ok(())
            }
            _ => Err(Error::ResourceLimit {
                what: what.to_string(),
                cap: self.cap,
            }),
        }
    }
}

/// Assigns a children count to every position of a level.
///
/// Rules report a whole level at once as runs (leftmost first) whose lengths
/// sum to the level width; per-vertex rules are expanded vertex by vertex.
pub trait DegreeRule: Send + Sync {
    fn level_runs(&self, level: usize, width: &BigUint, budget: &mut Budget) -> Result<Vec<Run>>;
}

/// How a finite degree list continues past its last entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SequenceTail {
    /// Repeat the whole list periodically.
    #[default]
    Cycle,
    /// Repeat the last entry forever.
    Last,
}

/// What family a spec belongs to; closed-form certificates key off this.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpecKind {
    Homogeneous {
        q: u64,
    },
    /// Every vertex at level `n` has `s[n]` children (`s` is 0-based here,
    /// so `s[0]` is the root degree).
    LevelSequence {
        s: Vec<u64>,
        tail: SequenceTail,
    },
    /// Explicit per-vertex degrees for the first levels, then every vertex has
    /// `tail` children.
    Explicit {
        levels: Vec<Vec<u64>>,
        tail: u64,
    },
    PerVertexRule {
        name: String,
    },
    LevelRegularRule {
        name: String,
    },
    RunRule {
        name: String,
    },
    Gallery {
        name: String,
        params: BTreeMap<String, String>,
    },
}

/// Declaration of an infinite rooted tree by its degree rule.
#[derive(Clone)]
pub struct TreeSpec {
    kind: SpecKind,
    rule: Arc<dyn DegreeRule>,
    leafless_claim: Option<bool>,
}

impl fmt::Debug for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TreeSpec")
            .field("kind", &self.kind)
            .field("leafless_claim", &self.leafless_claim)
            .finish()
    }
}

impl TreeSpec {
    pub fn new(kind: SpecKind, rule: Arc<dyn DegreeRule>) -> Self {
        TreeSpec {
            kind,
            rule,
            leafless_claim: None,
        }
    }

    /// Every vertex has `q` children.
    pub fn homogeneous(q: u64) -> Self {
        TreeSpec::new(SpecKind::Homogeneous { q }, Arc::new(Homogeneous(q)))
    }

    /// Level-regular tree: vertices at level `n` have `seq_term(s, tail, n)` children.
    pub fn level_sequence(s: Vec<u64>, tail: SequenceTail) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter(
                "a level sequence needs at least one term".into(),
            ));
        }
        let rule = LevelSequenceRule { s: s.clone(), tail };
        Ok(TreeSpec::new(SpecKind::LevelSequence { s, tail }, Arc::new(rule)))
    }

    /// Per-vertex degrees for the first `levels.len()` levels, then `tail`.
    pub fn explicit(levels: Vec<Vec<u64>>, tail: u64) -> Self {
        let rule = ExplicitRule {
            levels: levels.clone(),
            tail,
        };
        TreeSpec::new(SpecKind::Explicit { levels, tail }, Arc::new(rule))
    }

    /// Arbitrary rule `(level, index) -> degree`, evaluated vertex by vertex.
    pub fn per_vertex<F>(name: &str, rule: F) -> Self
    where
        F: Fn(usize, &BigUint) -> u64 + Send + Sync + 'static,
    {
        TreeSpec::new(SpecKind::PerVertexRule { name: name.into() }, Arc::new(PerVertex(rule)))
    }

    /// Level-regular tree given by a closure `level -> degree`.
    pub fn level_regular<F>(name: &str, rule: F) -> Self
    where
        F: Fn(usize) -> u64 + Send + Sync + 'static,
    {
        TreeSpec::new(
            SpecKind::LevelRegularRule { name: name.into() },
            Arc::new(LevelRegular(rule)),
        )
    }

    /// Rule producing the runs of a level directly from `(level, width)`.
    pub fn with_runs<F>(name: &str, rule: F) -> Self
    where
        F: Fn(usize, &BigUint) -> Vec<Run> + Send + Sync + 'static,
    {
        TreeSpec::new(SpecKind::RunRule { name: name.into() }, Arc::new(RunsFn(rule)))
    }

    pub fn with_leafless_claim(mut self, claim: bool) -> Self {
        self.leafless_claim = Some(claim);
        self
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    pub fn rule(&self) -> &dyn DegreeRule {
        self.rule.as_ref()
    }

    pub fn leafless_claim(&self) -> Option<bool> {
        self.leafless_claim
    }
}

/// Degree of the level-`level` vertices of a level-sequence tree.
pub fn seq_term(s: &[u64], tail: SequenceTail, level: usize) -> u64 {
    match s.get(level) {
        Some(&d) => d,
        None => match tail {
            SequenceTail::Cycle => s[level % s.len()],
            SequenceTail::Last => *s.last().expect("non-empty sequence"),
        },
    }
}

struct Homogeneous(u64);

impl DegreeRule for Homogeneous {
    fn level_runs(&self, _level: usize, width: &BigUint, _: &mut Budget) -> Result<Vec<Run>> {
        Ok(vec![Run::new(width.clone(), self.0)])
    }
}

struct LevelSequenceRule {
    s: Vec<u64>,
    tail: SequenceTail,
}

impl DegreeRule for LevelSequenceRule {
    fn level_runs(&self, level: usize, width: &BigUint, _: &mut Budget) -> Result<Vec<Run>> {
        Ok(vec![Run::new(width.clone(), seq_term(&self.s, self.tail, level))])
    }
}

struct ExplicitRule {
    levels: Vec<Vec<u64>>,
    tail: u64,
}

impl DegreeRule for ExplicitRule {
    fn level_runs(&self, level: usize, width: &BigUint, budget: &mut Budget) -> Result<Vec<Run>> {
        match self.levels.get(level) {
            Some(degrees) => {
                if BigUint::from(degrees.len()) != *width {
                    return Err(Error::RuleWidthMismatch {
                        level,
                        expected: width.to_string(),
                        got: degrees.len().to_string(),
                    });
                }
                budget.charge(width, "per-vertex degree evaluations")?;
                Ok(degrees.iter().map(|&d| Run::new(1u32, d)).collect())
            }
            None => Ok(vec![Run::new(width.clone(), self.tail)]),
        }
    }
}

struct PerVertex<F>(F);

impl<F> DegreeRule for PerVertex<F>
where
    F: Fn(usize, &BigUint) -> u64 + Send + Sync,
{
    fn level_runs(&self, level: usize, width: &BigUint, budget: &mut Budget) -> Result<Vec<Run>> {
        budget.charge(width, "per-vertex degree evaluations")?;
        let mut runs: Vec<Run> = Vec::new();
        let mut index = BigUint::zero();
        while &index < width {
            let d = (self.0)(level, &index);
            match runs.last_mut() {
                Some(last) if last.degree == d => last.len += 1u32,
                _ => runs.push(Run::new(1u32, d)),
            }
            index += 1u32;
        }
        Ok(runs)
    }
}

struct LevelRegular<F>(F);

impl<F> DegreeRule for LevelRegular<F>
where
    F: Fn(usize) -> u64 + Send + Sync,
{
    fn level_runs(&self, level: usize, width: &BigUint, _: &mut Budget) -> Result<Vec<Run>> {
        Ok(vec![Run::new(width.clone(), (self.0)(level))])
    }
}

struct RunsFn<F>(F);

impl<F> DegreeRule for RunsFn<F>
where
    F: Fn(usize, &BigUint) -> Vec<Run> + Send + Sync,
{
    fn level_runs(&self, level: usize, width: &BigUint, _: &mut Budget) -> Result<Vec<Run>> {
        Ok((self.0)(level, width))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_tails() {
        let s = [1, 2, 3];
        assert_eq!(seq_term(&s, SequenceTail::Cycle, 4), 2);
        assert_eq!(seq_term(&s, SequenceTail::Last, 4), 3);
        assert_eq!(seq_term(&s, SequenceTail::Cycle, 0), 1);
    }

    #[test]
    fn per_vertex_rule_collapses_runs() {
        let spec = TreeSpec::per_vertex("parity", |_, i| if i < &BigUint::from(2u32) { 2 } else { 1 });
        let mut budget = Budget::new(100);
        let runs = spec.rule().level_runs(3, &BigUint::from(5u32), &mut budget).unwrap();
        assert_eq!(runs, vec![Run::new(2u32, 2), Run::new(3u32, 1)]);
        assert_eq!(budget.used(), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let spec = TreeSpec::per_vertex("ones", |_, _| 1);
        let mut budget = Budget::new(3);
        let err = spec
            .rule()
            .level_runs(0, &BigUint::from(5u32), &mut budget)
            .unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }));
    }

    #[test]
    fn explicit_rule_checks_width() {
        let spec = TreeSpec::explicit(vec![vec![2], vec![1]], 1);
        let mut budget = Budget::new(100);
        let err = spec
            .rule()
            .level_runs(1, &BigUint::from(2u32), &mut budget)
            .unwrap_err();
        assert!(matches!(err, Error::RuleWidthMismatch { .. }));
    }
}
