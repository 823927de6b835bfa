use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::descent::{DescendantMap, Piece};
use super::spec::{Budget, TreeSpec};
use crate::error::{Error, Result};

/// Default cap on stored runs plus per-vertex rule evaluations.
pub const DEFAULT_VERTEX_CAP: u64 = 100_000_000;

/// A vertex, addressed by level and breadth-first position within the level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub level: usize,
    pub index: BigUint,
}

impl VertexId {
    pub fn new(level: usize, index: impl Into<BigUint>) -> Self {
        VertexId {
            level,
            index: index.into(),
        }
    }

    pub fn root() -> Self {
        VertexId::new(0, 0u32)
    }

    pub fn is_root(&self) -> bool {
        self.level == 0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.index)
    }
}

impl FromStr for VertexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("vertex must look like `level:index`, got `{s}`"));
        let (l, i) = s.split_once(':').ok_or_else(bad)?;
        Ok(VertexId {
            level: l.trim().parse().map_err(|_| bad())?,
            index: i.trim().parse().map_err(|_| bad())?,
        })
    }
}

/// Serializes a big count as a JSON number when it fits in `u64`, else as a string.
pub fn serialize_big<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match n.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

pub fn serialize_big_vec<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    struct Big<'a>(&'a BigUint);
    impl Serialize for Big<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            serialize_big(self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for n in v {
        seq.serialize_element(&Big(n))?;
    }
    seq.end()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BigRepr {
    Num(u64),
    Str(String),
}

pub fn deserialize_big<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    match BigRepr::deserialize(d)? {
        BigRepr::Num(n) => Ok(BigUint::from(n)),
        BigRepr::Str(s) => s.parse().map_err(serde::de::Error::custom),
    }
}

impl Serialize for VertexId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            level: usize,
            #[serde(serialize_with = "serialize_big")]
            index: &'a BigUint,
        }
        Repr {
            level: self.level,
            index: &self.index,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            level: usize,
            #[serde(deserialize_with = "deserialize_big")]
            index: BigUint,
        }
        let r = Repr::deserialize(d)?;
        Ok(VertexId::new(r.level, r.index))
    }
}

/// Vertices `start..start+len` of a level, each with `degree` children; the
/// children of `start` begin at `child_start` on the next level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunEntry {
    pub start: BigUint,
    pub len: BigUint,
    pub degree: u64,
    pub child_start: BigUint,
}

impl RunEntry {
    pub fn end(&self) -> BigUint {
        &self.start + &self.len
    }
}

#[derive(Clone, Debug)]
struct Level {
    size: BigUint,
    /// Empty for the deepest materialized level.
    runs: Vec<RunEntry>,
}

#[derive(Clone, Copy, Debug)]
pub struct MaterializeOptions {
    /// Cap on stored runs plus per-vertex rule evaluations.
    pub vertex_cap: u64,
}

impl Default for MaterializeOptions {
    fn default() -> Self {
        MaterializeOptions {
            vertex_cap: DEFAULT_VERTEX_CAP,
        }
    }
}

/// A tree materialized to a finite depth.
///
/// Levels are stored as runs of equal-degree vertices, so the storage cost is
/// the number of degree changes rather than the number of vertices. Immutable
/// once built; the memo of descendant maps is internally synchronized.
pub struct LevelTree {
    spec: TreeSpec,
    depth: usize,
    levels: Vec<Level>,
    budget_used: u64,
    maps: RwLock<HashMap<(usize, usize), Arc<DescendantMap>>>,
}

impl fmt::Debug for LevelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelTree")
            .field("spec", &self.spec)
            .field("depth", &self.depth)
            .field("level_sizes", &self.level_sizes())
            .finish()
    }
}

/// Materializes `spec` to `depth` with the default resource cap.
pub fn materialize(spec: &TreeSpec, depth: usize) -> Result<LevelTree> {
    materialize_with(spec, depth, &MaterializeOptions::default())
}

/// Breadth-first, leftmost-first construction of levels `0..=depth`.
pub fn materialize_with(spec: &TreeSpec, depth: usize, options: &MaterializeOptions) -> Result<LevelTree> {
    let mut budget = Budget::new(options.vertex_cap);
    let mut levels: Vec<Level> = Vec::with_capacity(depth + 1);
    let mut width = BigUint::one();
    for level in 0..depth {
        let raw = spec.rule().level_runs(level, &width, &mut budget)?;
        let mut runs: Vec<RunEntry> = Vec::with_capacity(raw.len());
        let mut start = BigUint::zero();
        let mut child = BigUint::zero();
        for run in raw {
            if run.len.is_zero() {
                continue;
            }
            if run.degree == 0 && spec.leafless_claim() == Some(true) {
                return Err(Error::LeaflessContradiction {
                    level,
                    index: start.to_string(),
                });
            }
            let next_start = &start + &run.len;
            let next_child = &child + &run.len * run.degree;
            match runs.last_mut() {
                Some(last) if last.degree == run.degree => last.len += &run.len,
                _ => runs.push(RunEntry {
                    start: start.clone(),
                    len: run.len,
                    degree: run.degree,
                    child_start: child.clone(),
                }),
            }
            start = next_start;
            child = next_child;
        }
        if start != width {
            return Err(Error::RuleWidthMismatch {
                level,
                expected: width.to_string(),
                got: start.to_string(),
            });
        }
        budget.charge(&BigUint::from(runs.len()), "stored runs")?;
        if child.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "every vertex at level {level} is a leaf, so level {} is empty; only infinite trees are supported",
                level + 1
            )));
        }
        levels.push(Level { size: width, runs });
        width = child;
    }
    levels.push(Level {
        size: width,
        runs: Vec::new(),
    });
    Ok(LevelTree {
        spec: spec.clone(),
        depth,
        levels,
        budget_used: budget.used(),
        maps: RwLock::new(HashMap::new()),
    })
}

impl LevelTree {
    pub fn spec(&self) -> &TreeSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Work charged against the resource cap while materializing.
    pub fn budget_used(&self) -> u64 {
        self.budget_used
    }

    pub fn level_sizes(&self) -> Vec<BigUint> {
        self.levels.iter().map(|l| l.size.clone()).collect()
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth {
            Err(Error::OutOfDepth {
                level,
                depth: self.depth,
            })
        } else {
            Ok(())
        }
    }

    /// Levels below the deepest one carry degree information.
    fn check_branching_level(&self, level: usize) -> Result<()> {
        if level >= self.depth {
            Err(Error::OutOfDepth {
                level: level + 1,
                depth: self.depth,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_vertex(&self, v: &VertexId) -> Result<()> {
        self.check_level(v.level)?;
        if v.index >= self.levels[v.level].size {
            return Err(Error::NoSuchVertex {
                level: v.level,
                index: v.index.to_string(),
                width: self.levels[v.level].size.to_string(),
            });
        }
        Ok(())
    }

    /// `γ(n)`: the number of vertices at level `n`.
    pub fn gamma(&self, n: usize) -> Result<&BigUint> {
        self.check_level(n)?;
        Ok(&self.levels[n].size)
    }

    pub fn total_vertices(&self) -> BigUint {
        self.levels.iter().map(|l| &l.size).sum()
    }

    /// Degree runs of a level `< depth`.
    pub fn runs(&self, level: usize) -> Result<&[RunEntry]> {
        self.check_branching_level(level)?;
        Ok(&self.levels[level].runs)
    }

    fn run_of(&self, level: usize, index: &BigUint) -> &RunEntry {
        let runs = &self.levels[level].runs;
        let at = runs.partition_point(|r| &r.start <= index) - 1;
        &runs[at]
    }

    /// `γ(1, v)`, the number of children of `v`.
    pub fn degree(&self, v: &VertexId) -> Result<u64> {
        self.check_vertex(v)?;
        self.check_branching_level(v.level)?;
        Ok(self.run_of(v.level, &v.index).degree)
    }

    /// Index of the first child of vertex `index` of `level`; for
    /// `index == γ(level)` this is `γ(level + 1)`.
    pub fn child_start(&self, level: usize, index: &BigUint) -> BigUint {
        let size = &self.levels[level].size;
        if index >= size {
            return self.levels[level + 1].size.clone();
        }
        let run = self.run_of(level, index);
        &run.child_start + (index - &run.start) * run.degree
    }

    /// Children of `v` as `(first index, count)` on the next level.
    pub fn children(&self, v: &VertexId) -> Result<(BigUint, u64)> {
        self.check_vertex(v)?;
        self.check_branching_level(v.level)?;
        let run = self.run_of(v.level, &v.index);
        Ok((&run.child_start + (&v.index - &run.start) * run.degree, run.degree))
    }

    /// `p(v)`; `None` for the root.
    pub fn parent(&self, v: &VertexId) -> Result<Option<VertexId>> {
        self.check_vertex(v)?;
        if v.level == 0 {
            return Ok(None);
        }
        Ok(Some(VertexId::new(
            v.level - 1,
            self.parent_index(v.level - 1, &v.index),
        )))
    }

    /// Index at `level` of the parent of vertex `child` of `level + 1`.
    pub(crate) fn parent_index(&self, level: usize, child: &BigUint) -> BigUint {
        let runs = &self.levels[level].runs;
        let at = runs.partition_point(|r| &r.child_start <= child) - 1;
        let run = &runs[at];
        debug_assert!(run.degree > 0);
        &run.start + (child - &run.child_start) / run.degree
    }

    /// The `n`-parent of `v`, if `v` has one.
    pub fn ancestor(&self, v: &VertexId, n: usize) -> Result<Option<VertexId>> {
        self.check_vertex(v)?;
        if n > v.level {
            return Ok(None);
        }
        let mut index = v.index.clone();
        for level in (v.level - n..v.level).rev() {
            index = self.parent_index(level, &index);
        }
        Ok(Some(VertexId::new(v.level - n, index)))
    }

    /// First index at `level + m` of the `m`-children of `index`, evaluated
    /// point by point through the child-start maps.
    pub(crate) fn first_descendant(&self, level: usize, index: &BigUint, m: usize) -> BigUint {
        let mut at = index.clone();
        for l in level..level + m {
            at = self.child_start(l, &at);
        }
        at
    }

    /// `m`-children of `v` as a half-open index range at level `|v| + m`.
    pub fn descendant_range(&self, v: &VertexId, m: usize) -> Result<(BigUint, BigUint)> {
        self.check_vertex(v)?;
        self.check_level(v.level + m)?;
        let lo = self.first_descendant(v.level, &v.index, m);
        let hi = self.first_descendant(v.level, &(&v.index + 1u32), m);
        Ok((lo, hi))
    }

    /// `γ(m, v)`: the number of `m`-children of `v`.
    pub fn gamma_sub(&self, m: usize, v: &VertexId) -> Result<BigUint> {
        let (lo, hi) = self.descendant_range(v, m)?;
        Ok(hi - lo)
    }

    /// `K(m, r)`: the largest `γ(m, v)` over vertices `v` at level `r`.
    pub fn max_gamma_sub(&self, m: usize, r: usize) -> Result<BigUint> {
        Ok(self.descendant_map(r, m)?.max_count().0)
    }

    /// A vertex of level `r` attaining `K(m, r)` (smallest index).
    pub fn argmax_gamma_sub(&self, m: usize, r: usize) -> Result<VertexId> {
        Ok(VertexId::new(r, self.descendant_map(r, m)?.max_count().1))
    }

    /// Memoized first-descendant map from level `r` across `m` generations.
    pub fn descendant_map(&self, r: usize, m: usize) -> Result<Arc<DescendantMap>> {
        self.check_level(r + m)?;
        if m == 0 {
            return Ok(Arc::new(DescendantMap::identity(r, &self.levels[r].size)));
        }
        if let Some(map) = self.maps.read().expect("descendant map cache").get(&(r, m)) {
            return Ok(map.clone());
        }
        // C(r, m) = C(r + 1, m - 1) ∘ C(r, 1); build bottom-up so each step reuses the memo.
        let mut map: Option<Arc<DescendantMap>> = None;
        for k in 1..=m {
            let start = r + m - k;
            if let Some(hit) = self.maps.read().expect("descendant map cache").get(&(start, k)) {
                map = Some(hit.clone());
                continue;
            }
            let step = self.one_generation(start);
            let built = match &map {
                None => step,
                Some(deeper) => step.then(deeper),
            };
            let built = Arc::new(built);
            self.maps
                .write()
                .expect("descendant map cache")
                .insert((start, k), built.clone());
            map = Some(built);
        }
        Ok(map.expect("m >= 1"))
    }

    fn one_generation(&self, level: usize) -> DescendantMap {
        let pieces = self.levels[level]
            .runs
            .iter()
            .map(|r| Piece {
                start: r.start.clone(),
                end: r.end(),
                image: r.child_start.clone(),
                slope: BigUint::from(r.degree),
            })
            .collect();
        DescendantMap::from_pieces(
            level,
            1,
            self.levels[level].size.clone(),
            self.levels[level + 1].size.clone(),
            pieces,
        )
    }

    /// True iff every vertex at levels `0..depth` has at least one child.
    pub fn is_leafless_up_to(&self) -> bool {
        self.first_leaf().is_none()
    }

    /// The leftmost leaf of the shallowest level that has one.
    pub fn first_leaf(&self) -> Option<VertexId> {
        self.levels[..self.depth].iter().enumerate().find_map(|(level, l)| {
            l.runs
                .iter()
                .find(|r| r.degree == 0)
                .map(|r| VertexId::new(level, r.start.clone()))
        })
    }

    /// If every level `< depth` is degree-uniform, the degree sequence.
    pub fn level_degrees(&self) -> Option<Vec<u64>> {
        self.levels[..self.depth]
            .iter()
            .map(|l| match l.runs.as_slice() {
                [only] => Some(only.degree),
                _ => None,
            })
            .collect()
    }

    /// Number of vertices of each degree at a level `< depth`.
    pub fn degree_histogram(&self, level: usize) -> Result<BTreeMap<u64, BigUint>> {
        let mut hist: BTreeMap<u64, BigUint> = BTreeMap::new();
        for r in self.runs(level)? {
            *hist.entry(r.degree).or_default() += &r.len;
        }
        Ok(hist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::spec::SequenceTail;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn homogeneous_levels() {
        let t = materialize(&TreeSpec::homogeneous(2), 3).unwrap();
        assert_eq!(t.level_sizes(), vec![big(1), big(2), big(4), big(8)]);
        assert!(t.is_leafless_up_to());
    }

    #[test]
    fn homogeneous_three_beyond_u64() {
        let t = materialize(&TreeSpec::homogeneous(3), 45).unwrap();
        assert_eq!(t.gamma(45).unwrap(), &num_traits::pow(big(3), 45));
        assert!(t.gamma(45).unwrap().to_u64().is_none());
    }

    #[test]
    fn parents_and_children_are_consistent() {
        let spec = TreeSpec::explicit(vec![vec![3], vec![2, 0, 1]], 2);
        let t = materialize(&spec, 4).unwrap();
        assert_eq!(t.level_sizes(), vec![big(1), big(3), big(3), big(6), big(12)]);
        assert_eq!(t.children(&VertexId::new(1, 2u32)).unwrap(), (big(2), 1));
        assert_eq!(t.parent(&VertexId::new(2, 2u32)).unwrap(), Some(VertexId::new(1, 2u32)));
        assert_eq!(t.parent(&VertexId::new(2, 1u32)).unwrap(), Some(VertexId::new(1, 0u32)));
        assert_eq!(t.first_leaf(), Some(VertexId::new(1, 1u32)));
        assert!(!t.is_leafless_up_to());
        assert_eq!(
            t.ancestor(&VertexId::new(4, 11u32), 3).unwrap(),
            Some(VertexId::new(1, 2u32))
        );
        assert_eq!(t.parent(&VertexId::root()).unwrap(), None);
    }

    #[test]
    fn out_of_depth_errors() {
        let t = materialize(&TreeSpec::homogeneous(2), 3).unwrap();
        assert!(matches!(t.gamma(4), Err(Error::OutOfDepth { .. })));
        assert!(t.gamma_sub(2, &VertexId::new(2, 0u32)).is_err());
        assert!(t.max_gamma_sub(1, 3).is_err());
        assert!(matches!(
            t.degree(&VertexId::new(1, 5u32)),
            Err(Error::NoSuchVertex { .. })
        ));
    }

    #[test]
    fn leafless_claim_contradiction() {
        let spec = TreeSpec::explicit(vec![vec![2], vec![1, 0]], 1).with_leafless_claim(true);
        assert!(matches!(
            materialize(&spec, 3),
            Err(Error::LeaflessContradiction { level: 1, .. })
        ));
        // Beyond the materialized depth the claim is not checked.
        assert!(materialize(&spec, 1).is_ok());
    }

    #[test]
    fn run_cap_is_enforced() {
        let spec = TreeSpec::per_vertex("alternating", |_, i| if i.bit(0) { 1 } else { 2 });
        let opts = MaterializeOptions { vertex_cap: 50 };
        assert!(matches!(
            materialize_with(&spec, 10, &opts),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn level_degrees_detects_regularity() {
        let t = materialize(
            &TreeSpec::level_sequence(vec![1, 2, 1, 3], SequenceTail::Cycle).unwrap(),
            6,
        )
        .unwrap();
        assert_eq!(t.level_degrees(), Some(vec![1, 2, 1, 3, 1, 2]));
        let k = materialize(&TreeSpec::explicit(vec![vec![2], vec![2, 1]], 1), 3).unwrap();
        assert_eq!(k.level_degrees(), None);
    }

    #[test]
    fn vertex_id_parsing() {
        let v: VertexId = "3:17".parse().unwrap();
        assert_eq!(v, VertexId::new(3, 17u32));
        assert_eq!(v.to_string(), "3:17");
        assert!("3-17".parse::<VertexId>().is_err());
    }
}
