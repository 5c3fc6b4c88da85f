//! Exact integer coordinate geometry: points, axis-parallel segments,
//! canonical networks, domination and direction classes.
//!
//! All coordinates are `i64`. Every construction in this crate places
//! vertices on the Hanan grid of integer inputs, so no rational or
//! floating-point arithmetic is ever needed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = i64;

/// A point in `d`-dimensional space.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<Coord>);

impl Point {
    pub fn new(coords: Vec<Coord>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn coord(&self, axis: usize) -> Coord {
        self.0[axis]
    }

    /// Copy of `self` with `axis` set to `value`.
    pub fn with(&self, axis: usize, value: Coord) -> Point {
        let mut c = self.0.clone();
        c[axis] = value;
        Point(c)
    }

    /// Drop the last coordinate (3D terminal to its x-y projection, and so on).
    pub fn project_last(&self) -> Point {
        Point(self.0[..self.0.len() - 1].to_vec())
    }

    /// Append a coordinate.
    pub fn lift(&self, value: Coord) -> Point {
        let mut c = self.0.clone();
        c.push(value);
        Point(c)
    }

    pub fn reflect(&self, reflection: &Reflection) -> Point {
        Point(
            self.0
                .iter()
                .zip(&reflection.negate)
                .map(|(&v, &neg)| if neg { -v } else { v })
                .collect(),
        )
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// Componentwise `<=` without the distinctness requirement.
    pub fn le_all(&self, other: &Point) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl From<Vec<Coord>> for Point {
    fn from(v: Vec<Coord>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[Coord; N]> for Point {
    fn from(v: [Coord; N]) -> Self {
        Point(v.to_vec())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// L1 distance between two points of the same dimension.
pub fn manhattan_distance(p: &Point, q: &Point) -> Result<Coord> {
    p.check_dim(q)?;
    Ok(l1(p, q))
}

/// L1 distance; callers guarantee equal dimension.
pub(crate) fn l1(p: &Point, q: &Point) -> Coord {
    p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs()).sum()
}

/// `t` dominates `t2` when `t <= t2` componentwise and `t != t2`.
pub fn dominates(t: &Point, t2: &Point) -> Result<bool> {
    t.check_dim(t2)?;
    Ok(t != t2 && t.le_all(t2))
}

/// Orientation of a pair in the non-fixed axes, seen from the endpoint with
/// the smaller fixed-axis coordinate. `true` is `+`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DirectionClass {
    pub fixed_axis: usize,
    pub signs: Vec<bool>,
}

impl DirectionClass {
    /// All `2^(d-1)` classes for dimension `d`, the all-`+` class first.
    pub fn all(dim: usize, fixed_axis: usize) -> Vec<DirectionClass> {
        let free = dim - 1;
        (0..1usize << free)
            .map(|mask| DirectionClass {
                fixed_axis,
                signs: (0..free).map(|b| mask & (1 << b) == 0).collect(),
            })
            .collect()
    }

    /// The axis-negation that maps pairs of this class onto the all-`+` class.
    pub fn reflection(&self, dim: usize) -> Reflection {
        let mut negate = vec![false; dim];
        let free = (0..dim).filter(|&a| a != self.fixed_axis);
        for (axis, &sign) in free.zip(&self.signs) {
            negate[axis] = !sign;
        }
        Reflection { negate }
    }

    /// Compass label in 3D (`NE`, `SE`, `NW`, `SW` with fixed z).
    pub fn label(&self) -> String {
        if self.signs.len() == 2 {
            let ns = if self.signs[1] { 'N' } else { 'S' };
            let ew = if self.signs[0] { 'E' } else { 'W' };
            format!("{ns}{ew}")
        } else {
            self.signs.iter().map(|&s| if s { '+' } else { '-' }).collect()
        }
    }
}

/// Classify the pair `(t, t2)` with respect to `fixed_axis`. Zero
/// differences on free axes count as `+`.
pub fn classify_pair(t: &Point, t2: &Point, fixed_axis: usize) -> Result<DirectionClass> {
    t.check_dim(t2)?;
    if fixed_axis >= t.dim() {
        return Err(Error::InvalidParameter(format!(
            "fixed axis {fixed_axis} out of range for dimension {}",
            t.dim()
        )));
    }
    let (lo, hi) = match t.coord(fixed_axis).cmp(&t2.coord(fixed_axis)) {
        std::cmp::Ordering::Less => (t, t2),
        std::cmp::Ordering::Greater => (t2, t),
        std::cmp::Ordering::Equal => {
            return Err(Error::Degenerate(format!(
                "{t} and {t2} share coordinate {fixed_axis}"
            )))
        }
    };
    let signs = (0..t.dim())
        .filter(|&a| a != fixed_axis)
        .map(|a| hi.coord(a) >= lo.coord(a))
        .collect();
    Ok(DirectionClass { fixed_axis, signs })
}

/// Negation of a subset of axes. An isometry of L1 and an involution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Reflection {
    pub negate: Vec<bool>,
}

impl Reflection {
    pub fn identity(dim: usize) -> Self {
        Reflection { negate: vec![false; dim] }
    }

    pub fn all(dim: usize) -> Self {
        Reflection { negate: vec![true; dim] }
    }
}

/// A closed axis-parallel segment with `a < b` along `axis`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Segment {
    a: Point,
    b: Point,
    axis: usize,
}

impl Segment {
    /// Build a segment from two endpoints given in any order.
    pub fn new(p: Point, q: Point) -> Result<Segment> {
        p.check_dim(&q)?;
        let differing: Vec<usize> = (0..p.dim()).filter(|&i| p.coord(i) != q.coord(i)).collect();
        match differing.as_slice() {
            [] => Err(Error::ZeroLengthSegment { a: p, b: q }),
            [axis] => {
                let axis = *axis;
                if p.coord(axis) < q.coord(axis) {
                    Ok(Segment { a: p, b: q, axis })
                } else {
                    Ok(Segment { a: q, b: p, axis })
                }
            }
            _ => Err(Error::NotAxisParallel { a: p, b: q }),
        }
    }

    /// Segment starting at `start` running along `axis` to coordinate `to`.
    pub fn along(start: &Point, axis: usize, to: Coord) -> Result<Segment> {
        Segment::new(start.clone(), start.with(axis, to))
    }

    pub fn a(&self) -> &Point {
        &self.a
    }

    pub fn b(&self) -> &Point {
        &self.b
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn length(&self) -> Coord {
        self.b.coord(self.axis) - self.a.coord(self.axis)
    }

    /// Closed-segment point membership.
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && (0..self.dim()).all(|i| {
                if i == self.axis {
                    self.a.coord(i) <= p.coord(i) && p.coord(i) <= self.b.coord(i)
                } else {
                    p.coord(i) == self.a.coord(i)
                }
            })
    }

    pub fn reflect(&self, r: &Reflection) -> Segment {
        Segment::new(self.a.reflect(r), self.b.reflect(r)).expect("reflection preserves segments")
    }

    /// Coordinates of the supporting line: every coordinate except `axis`.
    pub(crate) fn line_key(&self) -> (usize, Vec<Coord>) {
        let fixed = (0..self.dim())
            .filter(|&i| i != self.axis)
            .map(|i| self.a.coord(i))
            .collect();
        (self.axis, fixed)
    }
}

/// A set of axis-parallel segments in canonical form: no two segments are
/// collinear and overlapping or touching, so the weight is the measure of the
/// union.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Network {
    dim: usize,
    segments: Vec<Segment>,
    weight: Coord,
}

impl Network {
    pub fn empty(dim: usize) -> Self {
        Network { dim, segments: Vec::new(), weight: 0 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn weight(&self) -> Coord {
        self.weight
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn union(&self, other: &Network) -> Network {
        let segs = self.segments.iter().chain(&other.segments).cloned();
        canonicalize(self.dim, segs)
    }

    pub fn union_all<'a>(dim: usize, parts: impl IntoIterator<Item = &'a Network>) -> Network {
        canonicalize(
            dim,
            parts.into_iter().flat_map(|n| n.segments.iter().cloned()),
        )
    }

    pub fn reflect(&self, r: &Reflection) -> Network {
        canonicalize(self.dim, self.segments.iter().map(|s| s.reflect(r)))
    }

    /// Apply a coordinatewise non-decreasing map; segments collapsing to a
    /// point are dropped.
    pub fn map_coords(&self, f: impl Fn(usize, Coord) -> Coord) -> Network {
        let map_point = |p: &Point| {
            Point::new(p.coords().iter().enumerate().map(|(i, &v)| f(i, v)).collect())
        };
        canonicalize(
            self.dim,
            self.segments
                .iter()
                .filter_map(|s| Segment::new(map_point(&s.a), map_point(&s.b)).ok()),
        )
    }

    /// Total length of the segments running along `axis`.
    pub fn axis_weight(&self, axis: usize) -> Coord {
        self.segments.iter().filter(|s| s.axis == axis).map(Segment::length).sum()
    }

    /// Segments along `axis` only.
    pub fn filter_axis(&self, axis: usize) -> Network {
        canonicalize(
            self.dim,
            self.segments.iter().filter(|s| s.axis == axis).cloned(),
        )
    }
}

/// Merge collinear overlapping or abutting segments. The result's weight is
/// the one-dimensional measure of the union of `segments`.
pub fn canonicalize(dim: usize, segments: impl IntoIterator<Item = Segment>) -> Network {
    let mut lines: BTreeMap<(usize, Vec<Coord>), Vec<(Coord, Coord)>> = BTreeMap::new();
    for s in segments {
        debug_assert_eq!(s.dim(), dim);
        let lo = s.a.coord(s.axis);
        let hi = s.b.coord(s.axis);
        lines.entry(s.line_key()).or_default().push((lo, hi));
    }
    let mut out = Vec::new();
    let mut weight = 0;
    for ((axis, fixed), mut intervals) in lines {
        intervals.sort_unstable();
        let mut merged: Vec<(Coord, Coord)> = Vec::new();
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        let base = |v: Coord| {
            let mut c = Vec::with_capacity(dim);
            let mut rest = fixed.iter();
            for i in 0..dim {
                c.push(if i == axis { v } else { *rest.next().unwrap() });
            }
            Point(c)
        };
        for (lo, hi) in merged {
            weight += hi - lo;
            out.push(Segment { a: base(lo), b: base(hi), axis });
        }
    }
    Network { dim, segments: out, weight }
}

/// Total weight of a network.
pub fn weight(n: &Network) -> Coord {
    n.weight()
}

/// Axis-aligned rectangle `R(a, c)` in the plane with `a` its SW corner.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Rectangle {
    pub lo: [Coord; 2],
    pub hi: [Coord; 2],
}

impl Rectangle {
    pub fn new(lo: [Coord; 2], hi: [Coord; 2]) -> Result<Self> {
        if lo[0] > hi[0] || lo[1] > hi[1] {
            return Err(Error::InvalidParameter(format!(
                "rectangle corner {lo:?} is not SW of {hi:?}"
            )));
        }
        Ok(Rectangle { lo, hi })
    }

    pub fn contains(&self, p: [Coord; 2]) -> bool {
        self.lo[0] <= p[0] && p[0] <= self.hi[0] && self.lo[1] <= p[1] && p[1] <= self.hi[1]
    }

    pub fn intersects(&self, other: &Rectangle) -> bool {
        self.lo[0] <= other.hi[0]
            && other.lo[0] <= self.hi[0]
            && self.lo[1] <= other.hi[1]
            && other.lo[1] <= self.hi[1]
    }

    pub fn intersection(&self, other: &Rectangle) -> Option<Rectangle> {
        self.intersects(other).then(|| Rectangle {
            lo: [self.lo[0].max(other.lo[0]), self.lo[1].max(other.lo[1])],
            hi: [self.hi[0].min(other.hi[0]), self.hi[1].min(other.hi[1])],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[Coord]) -> Point {
        Point::new(c.to_vec())
    }

    fn seg(a: &[Coord], b: &[Coord]) -> Segment {
        Segment::new(p(a), p(b)).unwrap()
    }

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan_distance(&p(&[0, 0, 0]), &p(&[1, 2, 3])).unwrap(), 6);
        assert_eq!(manhattan_distance(&p(&[5, 7]), &p(&[5, 7])).unwrap(), 0);
        assert_eq!(manhattan_distance(&p(&[2, 1]), &p(&[0, 0])).unwrap(), 3);
        assert!(matches!(
            manhattan_distance(&p(&[0, 0]), &p(&[0, 0, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dominates_examples() {
        assert!(dominates(&p(&[0, 0, 0]), &p(&[1, 1, 1])).unwrap());
        assert!(!dominates(&p(&[0, 1, 0]), &p(&[1, 0, 1])).unwrap());
        assert!(!dominates(&p(&[3, 3]), &p(&[3, 3])).unwrap());
        assert!(dominates(&p(&[1]), &p(&[1, 2])).is_err());
    }

    #[test]
    fn classify_examples() {
        let ne = classify_pair(&p(&[0, 0, 0]), &p(&[1, 1, 1]), 2).unwrap();
        assert_eq!(ne.signs, vec![true, true]);
        assert_eq!(ne.label(), "NE");
        let se = classify_pair(&p(&[0, 1, 0]), &p(&[1, 0, 1]), 2).unwrap();
        assert_eq!(se.signs, vec![true, false]);
        assert_eq!(se.label(), "SE");
        let tie = classify_pair(&p(&[0, 0, 0]), &p(&[0, 0, 1]), 2).unwrap();
        assert_eq!(tie.signs, vec![true, true]);
        assert!(matches!(
            classify_pair(&p(&[0, 0, 1]), &p(&[1, 1, 1]), 2),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn direction_class_count_and_reflection() {
        for d in 2..=5 {
            let all = DirectionClass::all(d, d - 1);
            assert_eq!(all.len(), 1 << (d - 1));
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
        }
        // Reflecting a SW pair lands it in the NE class.
        let a = p(&[3, 3, 0]);
        let b = p(&[1, 2, 5]);
        let class = classify_pair(&a, &b, 2).unwrap();
        let r = class.reflection(3);
        let moved = classify_pair(&a.reflect(&r), &b.reflect(&r), 2).unwrap();
        assert_eq!(moved.signs, vec![true, true]);
    }

    #[test]
    fn segment_construction() {
        assert!(matches!(
            Segment::new(p(&[1, 1]), p(&[1, 1])),
            Err(Error::ZeroLengthSegment { .. })
        ));
        assert!(matches!(
            Segment::new(p(&[0, 0]), p(&[1, 1])),
            Err(Error::NotAxisParallel { .. })
        ));
        let s = seg(&[4, 1], &[2, 1]);
        assert_eq!(s.a(), &p(&[2, 1]));
        assert_eq!(s.axis(), 0);
        assert_eq!(s.length(), 2);
        assert!(s.contains(&p(&[3, 1])));
        assert!(!s.contains(&p(&[3, 2])));
    }

    #[test]
    fn canonicalize_examples() {
        // Half-unit coordinates scaled by two: [0,1] and [0.5,1.5] become [0,2] and [1,3].
        let n = canonicalize(2, [seg(&[0, 0], &[2, 0]), seg(&[1, 0], &[3, 0])]);
        assert_eq!(n.len(), 1);
        assert_eq!(n.weight(), 3);

        let n = canonicalize(2, [seg(&[0, 0], &[1, 0]), seg(&[0, 5], &[1, 5])]);
        assert_eq!(n.len(), 2);
        assert_eq!(n.weight(), 2);

        let s = seg(&[0, 0], &[0, 4]);
        let n = canonicalize(2, [s.clone(), s]);
        assert_eq!(n.len(), 1);
        assert_eq!(n.weight(), 4);

        // Abutting segments merge.
        let n = canonicalize(2, [seg(&[0, 0], &[1, 0]), seg(&[1, 0], &[2, 0])]);
        assert_eq!(n.len(), 1);
    }

    #[test]
    fn weight_examples() {
        let mut edges = Vec::new();
        for axis in 0..3 {
            for mask in 0..8usize {
                let mut c = [(mask & 1) as Coord, ((mask >> 1) & 1) as Coord, ((mask >> 2) & 1) as Coord];
                if c[axis] == 0 {
                    let a = c;
                    c[axis] = 1;
                    edges.push(seg(&a, &c));
                }
            }
        }
        assert_eq!(edges.len(), 12);
        assert_eq!(weight(&canonicalize(3, edges)), 12);
        assert_eq!(weight(&Network::empty(3)), 0);
    }

    fn arb_point(d: usize) -> impl Strategy<Value = Point> {
        prop::collection::vec(-20i64..20, d).prop_map(Point::new)
    }

    fn arb_segment() -> impl Strategy<Value = Segment> {
        (arb_point(2), 0usize..2, 1i64..8).prop_map(|(p, axis, len)| {
            let q = p.with(axis, p.coord(axis) + len);
            Segment::new(p, q).unwrap()
        })
    }

    proptest! {
        #[test]
        fn l1_metric(a in arb_point(3), b in arb_point(3), c in arb_point(3)) {
            let ab = manhattan_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, manhattan_distance(&b, &a).unwrap());
            prop_assert!(manhattan_distance(&a, &c).unwrap() <= ab + manhattan_distance(&b, &c).unwrap());
            prop_assert_eq!(ab == 0, a == b);
        }

        #[test]
        fn domination_is_strict_order(a in arb_point(2), b in arb_point(2), c in arb_point(2)) {
            prop_assert!(!dominates(&a, &a).unwrap());
            if dominates(&a, &b).unwrap() {
                prop_assert!(!dominates(&b, &a).unwrap());
                if dominates(&b, &c).unwrap() {
                    prop_assert!(dominates(&a, &c).unwrap());
                }
            }
        }

        #[test]
        fn classify_is_order_independent(a in arb_point(3), b in arb_point(3)) {
            prop_assume!(a.coord(2) != b.coord(2));
            prop_assert_eq!(classify_pair(&a, &b, 2).unwrap(), classify_pair(&b, &a, 2).unwrap());
        }

        #[test]
        fn canonical_weight_at_most_raw(segs in prop::collection::vec(arb_segment(), 0..12)) {
            let raw: Coord = segs.iter().map(Segment::length).sum();
            let n = canonicalize(2, segs.clone());
            prop_assert!(n.weight() <= raw);
            // Equality iff no two raw segments share a positive-length piece.
            let overlap = segs.iter().enumerate().any(|(i, s)| segs[i + 1..].iter().any(|t| {
                s.line_key() == t.line_key()
                    && s.a().coord(s.axis()).max(t.a().coord(t.axis()))
                        < s.b().coord(s.axis()).min(t.b().coord(t.axis()))
            }));
            prop_assert_eq!(n.weight() == raw, !overlap);
            // Idempotent.
            prop_assert_eq!(canonicalize(2, n.segments().to_vec()), n);
        }
    }
}
