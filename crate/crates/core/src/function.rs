//! Finitely supported functions on the vertices of a materialized tree.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::TreeScalar;
use crate::tree::{LevelTree, VertexId};

/// Vertices `start..start+len` of one level all take `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment<T> {
    pub start: BigUint,
    pub len: BigUint,
    pub value: T,
}

impl<T> Segment<T> {
    pub fn new(start: impl Into<BigUint>, len: impl Into<BigUint>, value: T) -> Self {
        Segment {
            start: start.into(),
            len: len.into(),
            value,
        }
    }

    pub fn end(&self) -> BigUint {
        &self.start + &self.len
    }

    pub fn contains(&self, index: &BigUint) -> bool {
        &self.start <= index && index < &self.end()
    }
}

/// A function on the vertices, stored per level as sorted, disjoint runs of
/// equal nonzero values. Everything not listed is zero.
///
/// A `horizon` marks a function defined by a rule on the whole tree and
/// stored only through that level; levels past the horizon are unknown
/// rather than zero.
#[derive(Clone, PartialEq)]
pub struct TreeFunction<T> {
    levels: Vec<Vec<Segment<T>>>,
    horizon: Option<usize>,
}

impl<T: fmt::Debug> fmt::Debug for TreeFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (n, segs) in self.levels.iter().enumerate() {
            for s in segs {
                m.entry(&format_args!("{}:{}+{}", n, s.start, s.len), &s.value);
            }
        }
        m.finish()
    }
}

impl<T: TreeScalar> Default for TreeFunction<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: TreeScalar> TreeFunction<T> {
    pub fn zero() -> Self {
        TreeFunction {
            levels: Vec::new(),
            horizon: None,
        }
    }

    /// `χ_v`.
    pub fn indicator(v: &VertexId) -> Self {
        Self::from_points([(v.clone(), T::one())])
    }

    /// Builds a function from point values; repeated vertices are summed.
    pub fn from_points(points: impl IntoIterator<Item = (VertexId, T)>) -> Self {
        let mut by_level: Vec<Vec<Segment<T>>> = Vec::new();
        for (v, value) in points {
            if by_level.len() <= v.level {
                by_level.resize_with(v.level + 1, Vec::new);
            }
            by_level[v.level].push(Segment::new(v.index, 1u32, value));
        }
        Self::from_level_segments(by_level)
    }

    /// Builds a function from per-level segments; overlapping segments are summed.
    pub fn from_level_segments(levels: Vec<Vec<Segment<T>>>) -> Self {
        let mut f = TreeFunction {
            levels: levels.into_iter().map(sum_segments).collect(),
            horizon: None,
        };
        f.trim();
        f
    }

    /// `value` on every vertex of `level`.
    pub fn level_constant(tree: &LevelTree, level: usize, value: T) -> Result<Self> {
        let width = tree.gamma(level)?.clone();
        let mut levels = vec![Vec::new(); level];
        levels.push(vec![Segment::new(BigUint::zero(), width, value)]);
        Ok(Self::from_level_segments(levels))
    }

    pub fn with_horizon(mut self, horizon: Option<usize>) -> Self {
        self.horizon = horizon;
        self
    }

    /// Last stored level of a rule-generated function; `None` when the
    /// function is genuinely finitely supported.
    pub fn horizon(&self) -> Option<usize> {
        self.horizon
    }

    fn trim(&mut self) {
        while self.levels.last().is_some_and(|l| l.is_empty()) {
            self.levels.pop();
        }
    }

    pub fn levels(&self) -> &[Vec<Segment<T>>] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &[Segment<T>] {
        self.levels.get(n).map_or(&[], |l| l.as_slice())
    }

    /// Largest level carrying a nonzero value, 0 for the zero function.
    pub fn max_support_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// One past the last nonzero level, 0 for the zero function.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    pub fn is_zero(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn get(&self, v: &VertexId) -> T {
        let segs = self.level(v.level);
        let at = segs.partition_point(|s| s.start <= v.index);
        match at.checked_sub(1).map(|i| &segs[i]) {
            Some(s) if s.contains(&v.index) => s.value.clone(),
            _ => T::zero(),
        }
    }

    /// Number of vertices carrying a nonzero value.
    pub fn support_size(&self) -> BigUint {
        self.levels.iter().flatten().map(|s| &s.len).sum()
    }

    pub fn segment_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Expands the support into points, refusing supports larger than `limit`.
    pub fn points(&self, limit: u64) -> Result<Vec<(VertexId, T)>> {
        let size = self.support_size();
        if size > BigUint::from(limit) {
            return Err(Error::ResourceLimit {
                what: format!("expanding a support of {size} vertices"),
                cap: limit,
            });
        }
        let mut out = Vec::with_capacity(size.to_usize().unwrap_or(0));
        for (level, segs) in self.levels.iter().enumerate() {
            for s in segs {
                let mut i = s.start.clone();
                let end = s.end();
                while i < end {
                    out.push((VertexId::new(level, i.clone()), s.value.clone()));
                    i += 1u32;
                }
            }
        }
        Ok(out)
    }

    /// Checks that the support lies inside the materialized tree.
    pub fn check_within(&self, tree: &LevelTree) -> Result<()> {
        for (level, segs) in self.levels.iter().enumerate() {
            if level > tree.depth() {
                return Err(Error::OutOfDepth {
                    level,
                    depth: tree.depth(),
                });
            }
            if let Some(last) = segs.last() {
                let width = tree.gamma(level)?;
                if &last.end() > width {
                    return Err(Error::NoSuchVertex {
                        level,
                        index: (last.end() - 1u32).to_string(),
                        width: width.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |b| b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |b| -b.clone())
    }

    fn combine(&self, other: &Self, sign: impl Fn(&T) -> T) -> Self {
        let n = self.levels.len().max(other.levels.len());
        let levels = (0..n)
            .map(|l| {
                let mut segs = self.level(l).to_vec();
                segs.extend(other.level(l).iter().map(|s| Segment {
                    start: s.start.clone(),
                    len: s.len.clone(),
                    value: sign(&s.value),
                }));
                segs
            })
            .collect();
        Self::from_level_segments(levels).with_horizon(min_horizon(self.horizon, other.horizon))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map_values(|v| c.clone() * v.clone()).with_horizon(self.horizon)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    /// Applies `op` to every nonzero value (zero stays zero).
    pub fn map_values<U: TreeScalar>(&self, op: impl Fn(&T) -> U) -> TreeFunction<U> {
        let levels = self
            .levels
            .iter()
            .map(|segs| {
                segs.iter()
                    .map(|s| Segment {
                        start: s.start.clone(),
                        len: s.len.clone(),
                        value: op(&s.value),
                    })
                    .collect()
            })
            .collect();
        TreeFunction::from_level_segments(levels).with_horizon(self.horizon)
    }

    /// `sup_v |f(v)|`.
    pub fn max_modulus(&self) -> T::Magnitude {
        let mut best = <T::Magnitude as Zero>::zero();
        for s in self.levels.iter().flatten() {
            let m = s.value.modulus();
            if m > best {
                best = m;
            }
        }
        best
    }

    /// `sup_v |f(v)|` restricted to the given levels.
    pub fn max_modulus_on(&self, levels: std::ops::Range<usize>) -> T::Magnitude {
        let mut best = <T::Magnitude as Zero>::zero();
        for l in levels {
            for s in self.level(l) {
                let m = s.value.modulus();
                if m > best {
                    best = m;
                }
            }
        }
        best
    }

    /// The restriction to levels `< end`.
    pub fn truncate(&self, end: usize) -> Self {
        let mut f = self.clone();
        f.levels.truncate(end);
        f.trim();
        f
    }
}

fn min_horizon(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sums possibly overlapping segments into sorted, disjoint, merged runs
/// without zeros.
pub(crate) fn sum_segments<T: TreeScalar>(mut segs: Vec<Segment<T>>) -> Vec<Segment<T>> {
    segs.retain(|s| !s.len.is_zero() && !s.value.is_zero());
    if segs.is_empty() {
        return segs;
    }
    segs.sort_by(|a, b| a.start.cmp(&b.start));
    if segs.windows(2).all(|w| w[0].end() <= w[1].start) {
        return merge_adjacent(segs);
    }
    let ends: Vec<BigUint> = segs.iter().map(Segment::end).collect();
    let mut points: Vec<BigUint> = segs
        .iter()
        .map(|s| s.start.clone())
        .chain(ends.iter().cloned())
        .collect();
    points.sort();
    points.dedup();
    let mut out = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut next = 0;
    for w in points.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        active.retain(|&i| &ends[i] > lo);
        while next < segs.len() && &segs[next].start <= lo {
            active.push(next);
            next += 1;
        }
        if active.is_empty() {
            continue;
        }
        let mut value = T::zero();
        for &i in &active {
            value = value + segs[i].value.clone();
        }
        out.push(Segment {
            start: lo.clone(),
            len: hi - lo,
            value,
        });
    }
    merge_adjacent(out)
}

fn merge_adjacent<T: TreeScalar>(segs: Vec<Segment<T>>) -> Vec<Segment<T>> {
    let mut out: Vec<Segment<T>> = Vec::with_capacity(segs.len());
    for s in segs {
        if s.value.is_zero() || s.len.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.value == s.value && last.end() == s.start => last.len += s.len,
            _ => out.push(s),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn overlapping_segments_are_summed() {
        let f = TreeFunction::from_level_segments(vec![vec![
            Segment::new(0u32, 4u32, q(1, 1)),
            Segment::new(2u32, 4u32, q(1, 2)),
            Segment::new(6u32, 1u32, q(3, 2)),
        ]]);
        assert_eq!(
            f.level(0),
            &[
                Segment::new(0u32, 2u32, q(1, 1)),
                Segment::new(2u32, 2u32, q(3, 2)),
                Segment::new(4u32, 2u32, q(1, 2)),
                Segment::new(6u32, 1u32, q(3, 2)),
            ]
        );
        assert_eq!(f.get(&VertexId::new(0, 5u32)), q(1, 2));
        assert_eq!(f.get(&VertexId::new(0, 7u32)), q(0, 1));
    }

    #[test]
    fn cancellation_leaves_no_zeros() {
        let a = TreeFunction::from_points([(VertexId::new(2, 3u32), q(2, 3))]);
        let d = a.sub(&a);
        assert!(d.is_zero());
        assert_eq!(d.max_support_level(), 0);
    }

    #[test]
    fn points_round_trip() {
        let pts = vec![
            (VertexId::new(0, 0u32), q(1, 1)),
            (VertexId::new(3, 1u32), q(-1, 2)),
            (VertexId::new(3, 2u32), q(-1, 2)),
        ];
        let f = TreeFunction::from_points(pts.clone());
        assert_eq!(f.segment_count(), 2);
        assert_eq!(f.points(10).unwrap(), pts);
        assert!(f.points(2).is_err());
        assert_eq!(f.max_support_level(), 3);
    }
}
