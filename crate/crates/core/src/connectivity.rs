//! M-connectivity of networks under pointwise-containment semantics.
//!
//! A network is split into an [`Arrangement`]: every segment endpoint, every
//! point where two segments touch or cross, and every query point lying on a
//! segment becomes a node; links join consecutive nodes along a segment. An
//! M-path then exists iff the target is reachable by steps that each move
//! toward it without overshooting on the step axis.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{Coord, Network, Point, Segment};

/// Nodes and links of a network, with at most one neighbor per node in each
/// of the `2d` axis directions.
#[derive(Clone, Debug)]
pub struct Arrangement {
    dim: usize,
    nodes: Vec<Point>,
    index: HashMap<Point, usize>,
    // adj[node * 2d + 2 * axis + up]
    adj: Vec<Option<usize>>,
}

impl Arrangement {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        // Each link is stored once in its increasing direction.
        (0..self.nodes.len())
            .map(|v| (0..self.dim).filter(|&a| self.neighbor(v, a, true).is_some()).count())
            .sum()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node_id(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn neighbor(&self, v: usize, axis: usize, up: bool) -> Option<usize> {
        self.adj[v * 2 * self.dim + 2 * axis + up as usize]
    }

    /// All links as segments.
    pub fn links(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for v in 0..self.nodes.len() {
            for a in 0..self.dim {
                if let Some(w) = self.neighbor(v, a, true) {
                    out.push(Segment::new(self.nodes[v].clone(), self.nodes[w].clone()).unwrap());
                }
            }
        }
        out
    }

    /// Monotone reachability from `p` to `q`.
    pub fn has_mpath(&self, p: &Point, q: &Point) -> bool {
        self.mpath(p, q).is_some()
    }

    /// A witness M-path from `p` to `q` as its sequence of arrangement nodes.
    pub fn mpath(&self, p: &Point, q: &Point) -> Option<Vec<Point>> {
        if p == q {
            return Some(vec![p.clone()]);
        }
        let (s, t) = (self.node_id(p)?, self.node_id(q)?);
        let mut parent: HashMap<usize, usize> = HashMap::new();
        parent.insert(s, s);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                let mut path = vec![t];
                let mut cur = t;
                while cur != s {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path.into_iter().map(|i| self.nodes[i].clone()).collect());
            }
            let here = &self.nodes[v];
            for a in 0..self.dim {
                let (h, goal) = (here.coord(a), q.coord(a));
                if h == goal {
                    continue;
                }
                let up = goal > h;
                if let Some(w) = self.neighbor(v, a, up) {
                    let c = self.nodes[w].coord(a);
                    let within = if up { c <= goal } else { c >= goal };
                    if within && !parent.contains_key(&w) {
                        parent.insert(w, v);
                        queue.push_back(w);
                    }
                }
            }
        }
        None
    }
}

/// Split `n` at every touch and crossing point.
pub fn build_arrangement(n: &Network) -> Arrangement {
    build_arrangement_with(n, &[])
}

/// Like [`build_arrangement`], additionally inserting every point of `extra`
/// that lies on the network as a node.
pub fn build_arrangement_with(n: &Network, extra: &[Point]) -> Arrangement {
    let dim = n.dim();
    let segs = n.segments();
    // Points on each segment, by segment index.
    let mut on_seg: Vec<Vec<Coord>> = segs
        .iter()
        .map(|s| vec![s.a().coord(s.axis()), s.b().coord(s.axis())])
        .collect();

    // Segments on each supporting line, for locating points.
    let mut by_line: HashMap<(usize, Vec<Coord>), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        by_line.entry(s.line_key()).or_default().push(i);
    }
    let locate = |p: &Point, axis: usize| -> Option<usize> {
        let key: Vec<Coord> = (0..dim).filter(|&i| i != axis).map(|i| p.coord(i)).collect();
        by_line
            .get(&(axis, key))?
            .iter()
            .copied()
            .find(|&i| segs[i].contains(p))
    };

    // A segment endpoint on another segment's interior, or two segments
    // crossing, yields a node on both. Any touch or crossing point between
    // segments along axes a != b has its a-coordinate fixed by the b-segment
    // and its b-coordinate fixed by the a-segment, so it equals the point on
    // the a-segment obtained by substituting the b-segment's a-coordinate.
    // Group b-segments by their coordinates off axes {a, b}.
    let mut cross_index: HashMap<(usize, usize, Vec<Coord>), Vec<usize>> = HashMap::new();
    for (j, t) in segs.iter().enumerate() {
        let b = t.axis();
        for a in (0..dim).filter(|&a| a != b) {
            let key: Vec<Coord> = (0..dim).filter(|&i| i != a && i != b).map(|i| t.a().coord(i)).collect();
            cross_index.entry((a, b, key)).or_default().push(j);
        }
    }
    for (i, s) in segs.iter().enumerate() {
        let a = s.axis();
        for b in (0..dim).filter(|&b| b != a) {
            let key: Vec<Coord> = (0..dim).filter(|&k| k != a && k != b).map(|k| s.a().coord(k)).collect();
            if let Some(cands) = cross_index.get(&(a, b, key)) {
                for &j in cands {
                    let t = &segs[j];
                    let x = t.a().coord(a);
                    let y = s.a().coord(b);
                    let on_s = s.a().coord(a) <= x && x <= s.b().coord(a);
                    let on_t = t.a().coord(b) <= y && y <= t.b().coord(b);
                    if on_s && on_t {
                        on_seg[i].push(x);
                        on_seg[j].push(y);
                    }
                }
            }
        }
    }
    for p in extra {
        if p.dim() != dim {
            continue;
        }
        for axis in 0..dim {
            if let Some(i) = locate(p, axis) {
                on_seg[i].push(p.coord(axis));
            }
        }
    }

    let mut arr = Arrangement { dim, nodes: Vec::new(), index: HashMap::new(), adj: Vec::new() };
    let intern = |arr: &mut Arrangement, p: Point| -> usize {
        if let Some(&i) = arr.index.get(&p) {
            return i;
        }
        let i = arr.nodes.len();
        arr.nodes.push(p.clone());
        arr.index.insert(p, i);
        arr.adj.extend(std::iter::repeat_n(None, 2 * dim));
        i
    };
    for (i, s) in segs.iter().enumerate() {
        let pts = &mut on_seg[i];
        pts.sort_unstable();
        pts.dedup();
        let axis = s.axis();
        let mut prev: Option<usize> = None;
        for &c in pts.iter() {
            let v = intern(&mut arr, s.a().with(axis, c));
            if let Some(u) = prev {
                arr.adj[u * 2 * dim + 2 * axis + 1] = Some(v);
                arr.adj[v * 2 * dim + 2 * axis] = Some(u);
            }
            prev = Some(v);
        }
    }
    arr
}

/// Whether `n` contains an M-path between `p` and `q`.
pub fn has_mpath(n: &Network, p: &Point, q: &Point) -> bool {
    if p == q {
        return true;
    }
    build_arrangement_with(n, &[p.clone(), q.clone()]).has_mpath(p, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureClass {
    /// One of the endpoints does not lie on the network.
    EndpointOffNetwork,
    /// Both endpoints lie on the network but no monotone path joins them.
    NoMonotonePath,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairFailure {
    pub i: usize,
    pub j: usize,
    pub class: FailureClass,
}

/// Outcome of a feasibility check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checked: usize,
    pub unconnected: Vec<PairFailure>,
}

impl Report {
    pub fn is_feasible(&self) -> bool {
        self.unconnected.is_empty()
    }

    pub fn failing_pairs(&self) -> Vec<(usize, usize)> {
        self.unconnected.iter().map(|f| (f.i, f.j)).collect()
    }
}

/// Check that `n` M-connects every unordered terminal pair, or only the
/// supplied `pairs` (indices into `terminals`).
pub fn verify_mmn(n: &Network, terminals: &[Point], pairs: Option<&[(usize, usize)]>) -> Report {
    let all: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            all = (0..terminals.len())
                .flat_map(|i| (i + 1..terminals.len()).map(move |j| (i, j)))
                .collect();
            &all
        }
    };
    let arr = build_arrangement_with(n, terminals);
    let unconnected = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let (p, q) = (&terminals[i], &terminals[j]);
            if p == q {
                return None;
            }
            if arr.node_id(p).is_none() || arr.node_id(q).is_none() {
                return Some(PairFailure { i, j, class: FailureClass::EndpointOffNetwork });
            }
            (!arr.has_mpath(p, q)).then_some(PairFailure { i, j, class: FailureClass::NoMonotonePath })
        })
        .collect();
    Report { checked: pairs.len(), unconnected }
}

/// Ordered pairs `(i, j)` with `terminals[i]` dominating `terminals[j]`.
pub fn relevant_pairs(terminals: &[Point]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, t) in terminals.iter().enumerate() {
        for (j, u) in terminals.iter().enumerate() {
            if i != j && t != u && t.le_all(u) {
                out.push((i, j));
            }
        }
    }
    out
}
