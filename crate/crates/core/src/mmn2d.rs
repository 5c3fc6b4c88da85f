//! Feasible planar M-networks.
//!
//! Up to [`ORACLE_TIER`] distinct terminals the exact oracle is used. Larger
//! sets are split at the median x-coordinate; both halves are solved
//! recursively and cross pairs are joined through a vertical line at the x of
//! the leftmost right-half terminal, reached by horizontal connectors from
//! every terminal. The result is never heavier than the union of per-pair
//! L-paths, which is computed as a fallback.

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, Coord, Network, Point, Segment};
use crate::instances::dedup_terminals;
use crate::oracle::{exact_mmn, DEFAULT_BUDGET};

/// Largest instance solved exactly.
pub const ORACLE_TIER: usize = 8;

pub fn approx_mmn2d(terminals: &[Point]) -> Result<Network> {
    let t = dedup_terminals(terminals);
    if let Some(p) = t.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    if t.len() <= ORACLE_TIER {
        return small(&t);
    }
    let heuristic = split(&t)?;
    let naive = naive_lpaths(&t);
    Ok(if naive.weight() < heuristic.weight() { naive } else { heuristic })
}

fn small(t: &[Point]) -> Result<Network> {
    if t.len() < 2 {
        return Ok(Network::empty(2));
    }
    match exact_mmn(t, DEFAULT_BUDGET) {
        Err(Error::Inconclusive { .. }) => Ok(naive_lpaths(t)),
        other => other,
    }
}

fn split(t: &[Point]) -> Result<Network> {
    if t.len() <= ORACLE_TIER {
        return small(t);
    }
    let mut sorted = t.to_vec();
    sorted.sort_by_key(|p| (p.coord(0), p.coord(1)));
    let (left, right) = sorted.split_at(sorted.len() / 2);
    let (a, b) = rayon::join(|| split(left), || split(right));
    let x0 = right[0].coord(0);
    let mut segs: Vec<Segment> = Vec::new();
    for p in &sorted {
        if p.coord(0) != x0 {
            segs.push(Segment::along(p, 0, x0)?);
        }
    }
    let lo = sorted.iter().map(|p| p.coord(1)).min().unwrap();
    let hi = sorted.iter().map(|p| p.coord(1)).max().unwrap();
    if lo < hi {
        segs.push(Segment::new(Point::new(vec![x0, lo]), Point::new(vec![x0, hi]))?);
    }
    let joint = canonicalize(2, segs);
    Ok(Network::union_all(2, [&a?, &b?, &joint]))
}

/// Union of one L-path per terminal pair, leaving the left point
/// horizontally.
pub fn naive_lpaths(terminals: &[Point]) -> Network {
    let mut segs = Vec::new();
    for (i, p) in terminals.iter().enumerate() {
        for q in &terminals[i + 1..] {
            let (p, q) = if p.coord(0) <= q.coord(0) { (p, q) } else { (q, p) };
            let corner = Point::new(vec![q.coord(0), p.coord(1)]);
            segs.extend(Segment::new(p.clone(), corner.clone()).ok());
            segs.extend(Segment::new(corner, q.clone()).ok());
        }
    }
    canonicalize(2, segs)
}

/// Lift a planar network to the horizontal plane at height `z`.
pub fn lift(n: &Network, z: Coord) -> Network {
    canonicalize(
        3,
        n.segments()
            .iter()
            .map(|s| Segment::new(s.a().lift(z), s.b().lift(z)).unwrap()),
    )
}
