//! Directional bichromatic rectangle piercing.
//!
//! A red point `r` and a blue point `b` with `r <= b` componentwise span the
//! rectangle `R(r, b)`. [`min_piercing`] finds a smallest point set hitting all
//! of them, [`max_independent_rectangles`] a largest pairwise-disjoint subset.
//! The two sizes always agree, and the solver checks this on every call.
//!
//! Candidate points: if `p` pierces a set of rectangles, so does the point
//! obtained by moving `p` up to the smallest blue x-coordinate `>= x(p)` and
//! the smallest blue y-coordinate `>= y(p)`, since every rectangle has a blue
//! NE corner. So blue-x times blue-y is a complete candidate grid.

use std::collections::BTreeSet;

use crate::connectivity::{build_arrangement_with, verify_mmn, Arrangement};
use crate::error::{Error, Result};
use crate::geometry::{Coord, Network, Point, Rectangle};

pub type P2 = [Coord; 2];

/// One relevant rectangle with the red and blue points spanning it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpannedRect {
    pub red: usize,
    pub blue: usize,
    pub rect: Rectangle,
}

#[derive(Clone, Debug)]
pub struct PiercingInstance {
    pub red: Vec<P2>,
    pub blue: Vec<P2>,
    pub rects: Vec<SpannedRect>,
}

impl PiercingInstance {
    pub fn new(red: Vec<P2>, blue: Vec<P2>) -> Self {
        let rects = relevant_rectangles(&red, &blue);
        PiercingInstance { red, blue, rects }
    }

    pub fn rectangles(&self) -> Vec<Rectangle> {
        self.rects.iter().map(|s| s.rect).collect()
    }

    /// Relevant rectangles containing `p`.
    pub fn pierced_by(&self, p: P2) -> Vec<&SpannedRect> {
        self.rects.iter().filter(|s| s.rect.contains(p)).collect()
    }
}

/// `A_p` together with the terminals fixing its four sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IntersectionRegion {
    pub area: Rectangle,
    pub t_w: P2,
    pub t_s: P2,
    pub t_e: P2,
    pub t_n: P2,
}

pub fn relevant_rectangles(red: &[P2], blue: &[P2]) -> Vec<SpannedRect> {
    let mut out = Vec::new();
    for (i, r) in red.iter().enumerate() {
        for (j, b) in blue.iter().enumerate() {
            if r[0] <= b[0] && r[1] <= b[1] {
                out.push(SpannedRect { red: i, blue: j, rect: Rectangle { lo: *r, hi: *b } });
            }
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    fn and_not(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    fn and_count(&self, o: &Bits) -> usize {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

fn unique_rects(rects: &[Rectangle]) -> Vec<Rectangle> {
    let set: BTreeSet<(P2, P2)> = rects.iter().map(|r| (r.lo, r.hi)).collect();
    set.into_iter().map(|(lo, hi)| Rectangle { lo, hi }).collect()
}

// Rectangles sorted by NE corner, so greedy sweeps behave like interval
// scheduling.
fn ne_order(rects: &[Rectangle]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rects.len()).collect();
    order.sort_by_key(|&i| (rects[i].hi[0] + rects[i].hi[1], rects[i].hi, rects[i].lo));
    order
}

// Disjoint rectangles picked greedily from `live`: a lower bound on the
// piercing number of `live`.
fn greedy_disjoint(rects: &[Rectangle], order: &[usize], live: &Bits) -> Vec<usize> {
    let mut picked: Vec<usize> = Vec::new();
    for &i in order {
        if live.get(i) && picked.iter().all(|&j| !rects[i].intersects(&rects[j])) {
            picked.push(i);
        }
    }
    picked
}

// NE corners chosen greedily until `live` is pierced: an upper bound on the
// independence number of `live`.
fn greedy_pierce_count(rects: &[Rectangle], order: &[usize], live: &Bits) -> usize {
    let mut pts: Vec<P2> = Vec::new();
    for &i in order {
        if live.get(i) && !pts.iter().any(|&p| rects[i].contains(p)) {
            pts.push(rects[i].hi);
        }
    }
    pts.len()
}

struct HittingSet<'a> {
    rects: &'a [Rectangle],
    order: Vec<usize>,
    cands: Vec<P2>,
    hits: Vec<Bits>,
    cover: Vec<Vec<usize>>,
    best: Vec<usize>,
}

impl HittingSet<'_> {
    fn dfs(&mut self, unhit: &Bits, chosen: &mut Vec<usize>) {
        if unhit.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        let lb = chosen.len() + greedy_disjoint(self.rects, &self.order, unhit).len();
        if lb >= self.best.len() {
            return;
        }
        let r = unhit.iter().min_by_key(|&r| (self.cover[r].len(), r)).unwrap();
        let mut options = self.cover[r].clone();
        options.sort_by_key(|&c| (std::cmp::Reverse(self.hits[c].and_count(unhit)), c));
        for c in options {
            chosen.push(c);
            let rest = unhit.and_not(&self.hits[c]);
            self.dfs(&rest, chosen);
            chosen.pop();
        }
    }
}

/// Minimum piercing of an arbitrary rectangle family, without certification.
fn solve_piercing(rects: &[Rectangle]) -> Vec<P2> {
    let rects = unique_rects(rects);
    let m = rects.len();
    if m == 0 {
        return Vec::new();
    }
    let xs: BTreeSet<Coord> = rects.iter().map(|r| r.hi[0]).collect();
    let ys: BTreeSet<Coord> = rects.iter().map(|r| r.hi[1]).collect();
    let mut raw: Vec<(P2, Bits)> = Vec::new();
    for &x in &xs {
        for &y in &ys {
            let mut b = Bits::new(m);
            for (i, r) in rects.iter().enumerate() {
                if r.contains([x, y]) {
                    b.set(i);
                }
            }
            if !b.is_empty() {
                raw.push(([x, y], b));
            }
        }
    }
    // Drop candidates whose hit set is contained in another's; on equal sets
    // keep the lexicographically first.
    let mut cands = Vec::new();
    let mut hits = Vec::new();
    for (i, (p, b)) in raw.iter().enumerate() {
        let dominated = raw.iter().enumerate().any(|(j, (_, o))| {
            j != i && b.subset_of(o) && (b != o || j < i)
        });
        if !dominated {
            cands.push(*p);
            hits.push(b.clone());
        }
    }
    let mut cover = vec![Vec::new(); m];
    for (c, b) in hits.iter().enumerate() {
        for r in b.iter() {
            cover[r].push(c);
        }
    }
    // Greedy incumbent.
    let mut unhit = Bits::full(m);
    let mut greedy = Vec::new();
    while !unhit.is_empty() {
        let c = (0..cands.len()).max_by_key(|&c| (hits[c].and_count(&unhit), std::cmp::Reverse(c))).unwrap();
        greedy.push(c);
        unhit = unhit.and_not(&hits[c]);
    }
    let mut hs = HittingSet { order: ne_order(&rects), rects: &rects, cands, hits, cover, best: greedy };
    hs.dfs(&Bits::full(m), &mut Vec::new());
    let mut pts: Vec<P2> = hs.best.iter().map(|&c| hs.cands[c]).collect();
    pts.sort();
    pts
}

struct Independent<'a> {
    rects: &'a [Rectangle],
    order: Vec<usize>,
    conflict: Vec<Bits>,
    best: Vec<usize>,
}

impl Independent<'_> {
    fn dfs(&mut self, live: &Bits, cur: &mut Vec<usize>) {
        let Some(v) = self.order.iter().copied().find(|&i| live.get(i)) else {
            if cur.len() > self.best.len() {
                self.best = cur.clone();
            }
            return;
        };
        if cur.len() + greedy_pierce_count(self.rects, &self.order, live) <= self.best.len() {
            return;
        }
        cur.push(v);
        let mut with = live.and_not(&self.conflict[v]);
        with.clear(v);
        self.dfs(&with, cur);
        cur.pop();
        let mut without = live.clone();
        without.clear(v);
        self.dfs(&without, cur);
    }
}

/// Maximum set of pairwise disjoint rectangles from an arbitrary family.
pub fn max_independent_of(rects: &[Rectangle]) -> Vec<Rectangle> {
    let rects = unique_rects(rects);
    let m = rects.len();
    if m == 0 {
        return Vec::new();
    }
    let mut conflict = vec![Bits::new(m); m];
    for i in 0..m {
        for j in 0..m {
            if rects[i].intersects(&rects[j]) {
                conflict[i].set(j);
            }
        }
    }
    let order = ne_order(&rects);
    let greedy = greedy_disjoint(&rects, &order, &Bits::full(m));
    let mut s = Independent { rects: &rects, order, conflict, best: greedy };
    s.dfs(&Bits::full(m), &mut Vec::new());
    let mut out: Vec<Rectangle> = s.best.iter().map(|&i| rects[i]).collect();
    out.sort_by_key(|r| (r.lo, r.hi));
    out
}

/// Certified minimum piercing of an arbitrary rectangle family.
pub fn min_piercing_of(rects: &[Rectangle]) -> Result<Vec<P2>> {
    let pts = solve_piercing(rects);
    if let Some(r) = rects.iter().find(|r| !pts.iter().any(|&p| r.contains(p))) {
        return Err(Error::Internal(format!("rectangle {r:?} left unpierced")));
    }
    let dual = max_independent_of(rects).len();
    if dual != pts.len() {
        return Err(Error::Internal(format!(
            "piercing of size {} does not match independent set of size {dual}",
            pts.len()
        )));
    }
    Ok(pts)
}

pub fn min_piercing(inst: &PiercingInstance) -> Result<Vec<P2>> {
    min_piercing_of(&inst.rectangles())
}

pub fn max_independent_rectangles(inst: &PiercingInstance) -> Vec<Rectangle> {
    max_independent_of(&inst.rectangles())
}

/// `A_p` and its bounding terminals, or `None` when `p` pierces nothing.
pub fn intersection_region(inst: &PiercingInstance, p: P2) -> Option<IntersectionRegion> {
    let hit = inst.pierced_by(p);
    let first = hit.first()?;
    let area = hit.iter().fold(first.rect, |acc, s| acc.intersection(&s.rect).unwrap());
    let red = |axis: usize| {
        let s = hit.iter().find(|s| inst.red[s.red][axis] == area.lo[axis]).unwrap();
        inst.red[s.red]
    };
    let blue = |axis: usize| {
        let s = hit.iter().find(|s| inst.blue[s.blue][axis] == area.hi[axis]).unwrap();
        inst.blue[s.blue]
    };
    Some(IntersectionRegion { area, t_w: red(0), t_s: red(1), t_e: blue(0), t_n: blue(1) })
}

fn pt(p: P2) -> Point {
    Point::new(p.to_vec())
}

fn boxes(path: &[Point]) -> Vec<Rectangle> {
    let corner = |p: &Point| [p.coord(0), p.coord(1)];
    if path.len() == 1 {
        let c = corner(&path[0]);
        return vec![Rectangle { lo: c, hi: c }];
    }
    path.windows(2)
        .map(|w| {
            let (a, b) = (corner(&w[0]), corner(&w[1]));
            Rectangle { lo: [a[0].min(b[0]), a[1].min(b[1])], hi: [a[0].max(b[0]), a[1].max(b[1])] }
        })
        .collect()
}

fn is_turn(arr: &Arrangement, p: P2) -> bool {
    arr.node_id(&pt(p)).is_some_and(|v| {
        (0..2).all(|a| arr.neighbor(v, a, false).is_some() || arr.neighbor(v, a, true).is_some())
    })
}

/// Meeting point of the `t_S`--`t_N` and `t_W`--`t_E` M-paths of `arr`
/// inside `A_p`. Junctions of the network are preferred, then other network
/// nodes, then any shared point; ties go to the lexicographically smallest.
fn meeting_point(arr: &Arrangement, region: &IntersectionRegion) -> Result<P2> {
    let path = |a: P2, b: P2| {
        arr.mpath(&pt(a), &pt(b)).ok_or(Error::Unconnected { p: pt(a), q: pt(b) })
    };
    let sn = boxes(&path(region.t_s, region.t_n)?);
    let we = boxes(&path(region.t_w, region.t_e)?);
    let mut shared = Vec::new();
    for a in &sn {
        for b in &we {
            if let Some(c) = a.intersection(b).and_then(|c| c.intersection(&region.area)) {
                shared.push(c);
            }
        }
    }
    let mut nodes: Vec<P2> = arr
        .nodes()
        .iter()
        .map(|n| [n.coord(0), n.coord(1)])
        .filter(|&n| shared.iter().any(|c| c.contains(n)))
        .collect();
    nodes.sort();
    if let Some(&j) = nodes.iter().find(|&&n| is_turn(arr, n)) {
        return Ok(j);
    }
    if let Some(&n) = nodes.first() {
        return Ok(n);
    }
    shared
        .iter()
        .map(|c| c.lo)
        .min()
        .ok_or_else(|| Error::Internal(format!("paths do not meet inside {:?}", region.area)))
}

/// Move every piercing point onto a crossing of two M-paths of `m` inside
/// its `A_p`, so that each relevant pair has an M-path in `m` through a
/// piercing point.
pub fn relocate_piercing(points: &[P2], m: &Network, inst: &PiercingInstance) -> Result<Vec<P2>> {
    let mut terms: Vec<Point> = inst.red.iter().map(|&p| pt(p)).collect();
    terms.extend(inst.blue.iter().map(|&p| pt(p)));
    let nr = inst.red.len();
    let pairs: Vec<(usize, usize)> = inst.rects.iter().map(|s| (s.red, nr + s.blue)).collect();
    if let Some(f) = verify_mmn(m, &terms, Some(&pairs)).unconnected.first() {
        return Err(Error::Unconnected { p: terms[f.i].clone(), q: terms[f.j].clone() });
    }
    let arr = build_arrangement_with(m, &terms);
    points
        .iter()
        .map(|&p| match intersection_region(inst, p) {
            None => Ok(p),
            Some(region) => meeting_point(&arr, &region),
        })
        .collect()
}
