//! Descendant maps.
//!
//! Because children occupy contiguous, leftmost-first index ranges, the
//! `m`-children of vertex `v` at level `r` are exactly the indices
//! `[C(v), C(v+1))` at level `r + m`, where `C` is the `m`-fold composition of
//! the "first child index" map. Each such map is continuous, nondecreasing and
//! piecewise linear with integer breakpoints, so it is stored as a short list
//! of pieces whose slope on `[v, v+1]` is `γ(m, v)`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// One linear piece: vertices `start..end` have `slope` descendants each, and
/// the first descendant of `start` is `image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub start: BigUint,
    pub end: BigUint,
    pub image: BigUint,
    pub slope: BigUint,
}

impl Piece {
    fn len(&self) -> BigUint {
        &self.end - &self.start
    }

    fn image_end(&self) -> BigUint {
        &self.image + &self.slope * self.len()
    }
}

/// First-descendant map from level `level` to level `level + generations`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendantMap {
    level: usize,
    generations: usize,
    domain: BigUint,
    codomain: BigUint,
    pieces: Vec<Piece>,
}

impl DescendantMap {
    pub(crate) fn identity(level: usize, width: &BigUint) -> Self {
        DescendantMap {
            level,
            generations: 0,
            domain: width.clone(),
            codomain: width.clone(),
            pieces: vec![Piece {
                start: BigUint::zero(),
                end: width.clone(),
                image: BigUint::zero(),
                slope: BigUint::one(),
            }],
        }
    }

    /// One generation, straight from the degree runs of a level.
    pub(crate) fn from_pieces(
        level: usize,
        generations: usize,
        domain: BigUint,
        codomain: BigUint,
        pieces: Vec<Piece>,
    ) -> Self {
        DescendantMap {
            level,
            generations,
            domain,
            codomain,
            pieces: merge(pieces),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn generations(&self) -> usize {
        self.generations
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Index of the first piece containing `x` (with `x < domain`).
    fn locate(&self, x: &BigUint) -> usize {
        self.pieces.partition_point(|p| &p.start <= x) - 1
    }

    /// `C(x)` for `0 <= x <= domain`.
    pub fn eval(&self, x: &BigUint) -> BigUint {
        if x >= &self.domain {
            debug_assert_eq!(x, &self.domain);
            return self.codomain.clone();
        }
        let p = &self.pieces[self.locate(x)];
        &p.image + &p.slope * (x - &p.start)
    }

    /// `γ(generations, v)`: number of descendants of `v` in the target level.
    pub fn count(&self, v: &BigUint) -> BigUint {
        debug_assert!(v < &self.domain);
        self.pieces[self.locate(v)].slope.clone()
    }

    /// The vertex `v` with `C(v) <= y < C(v + 1)`, i.e. the ancestor of `y`.
    pub fn preimage(&self, y: &BigUint) -> BigUint {
        debug_assert!(y < &self.codomain);
        let at = self.pieces.partition_point(|p| &p.image_end() <= y);
        let p = &self.pieces[at];
        &p.start + (y - &p.image) / &p.slope
    }

    /// Pieces meeting the vertex range `[lo, hi)`.
    pub fn pieces_between(&self, lo: &BigUint, hi: &BigUint) -> &[Piece] {
        let a = self.pieces.partition_point(|p| &p.end <= lo);
        let b = self.pieces.partition_point(|p| &p.start < hi);
        &self.pieces[a..b.max(a)]
    }

    /// Largest descendant count over the level and the first vertex attaining it.
    pub fn max_count(&self) -> (BigUint, BigUint) {
        let mut best: Option<&Piece> = None;
        for p in &self.pieces {
            if best.is_none_or(|b| p.slope > b.slope) {
                best = Some(p);
            }
        }
        match best {
            Some(p) => (p.slope.clone(), p.start.clone()),
            None => (BigUint::zero(), BigUint::zero()),
        }
    }

    /// `outer ∘ self`, where `outer` starts at the level this map lands on.
    pub(crate) fn then(&self, outer: &DescendantMap) -> DescendantMap {
        debug_assert_eq!(self.level + self.generations, outer.level);
        debug_assert_eq!(self.codomain, outer.domain);
        let mut out = Vec::with_capacity(self.pieces.len() + outer.pieces.len());
        let mut cursor = 0usize;
        for p in &self.pieces {
            if p.slope.is_zero() {
                out.push(Piece {
                    start: p.start.clone(),
                    end: p.end.clone(),
                    image: outer.eval(&p.image),
                    slope: BigUint::zero(),
                });
                continue;
            }
            let mut u = p.start.clone();
            while u < p.end {
                let y = &p.image + &p.slope * (&u - &p.start);
                while outer.pieces[cursor].end <= y {
                    cursor += 1;
                }
                let op = &outer.pieces[cursor];
                let fit = (&op.end - &y) / &p.slope;
                let remaining = &p.end - &u;
                let count = if fit < remaining { fit } else { remaining };
                if count.is_zero() {
                    // The child block of `u` straddles a breakpoint of `outer`.
                    let lo = &op.image + &op.slope * (&y - &op.start);
                    let hi = outer.eval(&(&y + &p.slope));
                    let next = &u + 1u32;
                    out.push(Piece {
                        start: u,
                        end: next.clone(),
                        slope: &hi - &lo,
                        image: lo,
                    });
                    u = next;
                } else {
                    let next = &u + &count;
                    out.push(Piece {
                        start: u,
                        end: next.clone(),
                        image: &op.image + &op.slope * (&y - &op.start),
                        slope: &p.slope * &op.slope,
                    });
                    u = next;
                }
            }
        }
        DescendantMap {
            level: self.level,
            generations: self.generations + outer.generations,
            domain: self.domain.clone(),
            codomain: outer.codomain.clone(),
            pieces: merge(out),
        }
    }
}

fn merge(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if p.start == p.end {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.slope == p.slope && last.end == p.start => {
                debug_assert_eq!(last.image_end(), p.image);
                last.end = p.end;
            }
            _ => out.push(p),
        }
    }
    out
}
