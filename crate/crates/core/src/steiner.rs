//! Rectilinear Steiner arborescences via directed Steiner trees.
//!
//! An RSA instance (origin below every terminal) becomes a DST instance on
//! the oriented Hanan grid of the terminals and the origin: directed paths
//! are exactly M-paths, so trees and monotone networks correspond with equal
//! cost. DST is solved by the level-`l` recursive greedy: at level 1 it joins
//! the `k` nearest targets by shortest paths, at higher levels it repeatedly
//! adds the subtree (path to some vertex `v` plus a level `l-1` tree from `v`)
//! of least cost per newly covered target. [`dst_exact`] is the
//! Dreyfus-Wagner dynamic program, exponential in the number of targets.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, Coord, Network, Point};
use crate::hanan::{build_hanan, GridGraph};

const INF: Coord = Coord::MAX / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub weight: Coord,
}

#[derive(Clone, Debug)]
pub struct DstInstance {
    pub nodes: usize,
    pub arcs: Vec<Arc>,
    pub root: usize,
    pub targets: Vec<usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl DstInstance {
    pub fn new(nodes: usize, arcs: Vec<Arc>, root: usize, targets: Vec<usize>) -> Result<Self> {
        let mut out = vec![Vec::new(); nodes];
        let mut inc = vec![Vec::new(); nodes];
        for (i, a) in arcs.iter().enumerate() {
            if a.from >= nodes || a.to >= nodes || root >= nodes {
                return Err(Error::InvalidParameter(format!("arc {a:?} leaves the node range")));
            }
            if a.weight < 0 {
                return Err(Error::InvalidParameter(format!("arc {a:?} has negative weight")));
            }
            out[a.from].push(i);
            inc[a.to].push(i);
        }
        if let Some(&t) = targets.iter().find(|&&t| t >= nodes) {
            return Err(Error::InvalidParameter(format!("target {t} out of range")));
        }
        let mut targets = targets;
        targets.sort_unstable();
        targets.dedup();
        Ok(DstInstance { nodes, arcs, root, targets, out, inc })
    }

    pub fn tree_weight(&self, arcs: &[usize]) -> Coord {
        arcs.iter().map(|&a| self.arcs[a].weight).sum()
    }

    /// Dijkstra from `src` along arcs (`forward`) or against them.
    /// Returns distances and the arc used to reach each node.
    fn dijkstra(&self, src: usize, forward: bool) -> (Vec<Coord>, Vec<Option<usize>>) {
        let mut dist = vec![INF; self.nodes];
        let mut via = vec![None; self.nodes];
        let mut heap = BinaryHeap::from([(Reverse(0), src)]);
        dist[src] = 0;
        while let Some((Reverse(d), v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            let adj = if forward { &self.out[v] } else { &self.inc[v] };
            for &ai in adj {
                let a = &self.arcs[ai];
                let w = if forward { a.to } else { a.from };
                let nd = d + a.weight;
                if nd < dist[w] {
                    dist[w] = nd;
                    via[w] = Some(ai);
                    heap.push((Reverse(nd), w));
                }
            }
        }
        (dist, via)
    }

    fn check_reachable(&self) -> Result<Vec<Coord>> {
        let (dist, _) = self.dijkstra(self.root, true);
        match self.targets.iter().find(|&&t| dist[t] >= INF) {
            Some(&t) => Err(Error::Unreachable(t)),
            None => Ok(dist),
        }
    }
}

/// Shortest-path tables shared by the greedy recursion.
struct Greedy<'a> {
    inst: &'a DstInstance,
    /// Per target: distance from every node to it, and the first arc.
    to_target: HashMap<usize, (Vec<Coord>, Vec<Option<usize>>)>,
    from: Mutex<HashMap<usize, (Vec<Coord>, Vec<Option<usize>>)>>,
}

struct Tree {
    arcs: BTreeSet<usize>,
    covered: Vec<usize>,
}

impl Tree {
    fn empty() -> Self {
        Tree { arcs: BTreeSet::new(), covered: Vec::new() }
    }
}

// a/b < c/d for nonnegative costs and positive counts.
fn denser(a: (Coord, usize), b: (Coord, usize)) -> Ordering {
    (a.0 as i128 * b.1 as i128).cmp(&(b.0 as i128 * a.1 as i128))
}

impl Greedy<'_> {
    fn forward(&self, src: usize) -> (Vec<Coord>, Vec<Option<usize>>) {
        if let Some(t) = self.from.lock().unwrap().get(&src) {
            return t.clone();
        }
        let t = self.inst.dijkstra(src, true);
        self.from.lock().unwrap().insert(src, t.clone());
        t
    }

    fn path_to_target(&self, v: usize, x: usize, arcs: &mut BTreeSet<usize>) -> Coord {
        let (_, next) = &self.to_target[&x];
        let mut cur = v;
        let mut added = 0;
        while cur != x {
            let a = next[cur].expect("target reachable");
            if arcs.insert(a) {
                added += self.inst.arcs[a].weight;
            }
            cur = self.inst.arcs[a].to;
        }
        added
    }

    fn path_from(&self, r: usize, v: usize, arcs: &mut BTreeSet<usize>) {
        let (_, via) = self.forward(r);
        let mut cur = v;
        while cur != r {
            let a = via[cur].expect("vertex reachable");
            arcs.insert(a);
            cur = self.inst.arcs[a].from;
        }
    }

    /// Targets of `xs` reachable from `v`, nearest first.
    fn nearest(&self, v: usize, xs: &[usize]) -> Vec<usize> {
        let mut near: Vec<usize> = xs.iter().copied().filter(|x| self.to_target[x].0[v] < INF).collect();
        near.sort_by_key(|x| (self.to_target[x].0[v], *x));
        near
    }

    fn level1(&self, k: usize, r: usize, xs: &[usize]) -> Tree {
        let mut tree = Tree::empty();
        for x in self.nearest(r, xs).into_iter().take(k) {
            self.path_to_target(r, x, &mut tree.arcs);
            tree.covered.push(x);
        }
        tree
    }

    fn run(&self, level: usize, k: usize, r: usize, xs: &[usize]) -> Tree {
        if level <= 1 {
            return self.level1(k, r, xs);
        }
        let (dist_r, _) = self.forward(r);
        let mut tree = Tree::empty();
        let mut left: Vec<usize> = xs.to_vec();
        let mut k = k.min(left.len());
        while k > 0 {
            // (cost, count, weight, v, k')
            let mut best: Option<(Coord, usize, usize, usize)> = None;
            for v in 0..self.inst.nodes {
                if dist_r[v] >= INF {
                    continue;
                }
                let mut consider = |cost: Coord, count: usize, kk: usize| {
                    let better = match best {
                        None => true,
                        Some((bc, bn, bv, _)) => denser((cost, count), (bc, bn))
                            .then(cost.cmp(&bc))
                            .then(v.cmp(&bv))
                            == Ordering::Less,
                    };
                    if better {
                        best = Some((cost, count, v, kk));
                    }
                };
                if level == 2 {
                    let mut arcs = BTreeSet::new();
                    let mut cost = dist_r[v];
                    for (i, x) in self.nearest(v, &left).into_iter().take(k).enumerate() {
                        cost += self.path_to_target(v, x, &mut arcs);
                        consider(cost, i + 1, i + 1);
                    }
                } else {
                    for kk in 1..=k {
                        let sub = self.run(level - 1, kk, v, &left);
                        if sub.covered.is_empty() {
                            break;
                        }
                        let cost = dist_r[v] + self.inst.tree_weight(&sub.arcs.iter().copied().collect::<Vec<_>>());
                        consider(cost, sub.covered.len(), kk);
                        if sub.covered.len() < kk {
                            break;
                        }
                    }
                }
            }
            let Some((_, _, v, kk)) = best else { break };
            let sub = self.run(level - 1, kk, v, &left);
            self.path_from(r, v, &mut tree.arcs);
            tree.arcs.extend(sub.arcs);
            left.retain(|x| !sub.covered.contains(x));
            k = k.saturating_sub(sub.covered.len());
            tree.covered.extend(sub.covered);
        }
        tree
    }
}

/// Shortest-path arborescence of the root inside `arcs`, pruned to the
/// branches that lead to targets.
fn prune(inst: &DstInstance, arcs: &BTreeSet<usize>) -> Vec<usize> {
    let sub = DstInstance::new(
        inst.nodes,
        arcs.iter().map(|&a| inst.arcs[a]).collect(),
        inst.root,
        inst.targets.clone(),
    )
    .unwrap();
    let ids: Vec<usize> = arcs.iter().copied().collect();
    let (_, via) = sub.dijkstra(inst.root, true);
    let mut keep = BTreeSet::new();
    for &t in &inst.targets {
        let mut cur = t;
        while let Some(a) = via[cur] {
            if !keep.insert(ids[a]) {
                break;
            }
            cur = sub.arcs[a].from;
        }
    }
    keep.into_iter().collect()
}

/// Level-`level` recursive greedy. Returns the arc ids of an arborescence
/// rooted at the root that reaches every target.
pub fn dst_recursive_greedy(inst: &DstInstance, level: usize) -> Result<Vec<usize>> {
    if level == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    inst.check_reachable()?;
    let targets: Vec<usize> = inst.targets.iter().copied().filter(|&t| t != inst.root).collect();
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let to_target = targets.iter().map(|&t| (t, inst.dijkstra(t, false))).collect();
    let g = Greedy { inst, to_target, from: Mutex::new(HashMap::new()) };
    let tree = g.run(level, targets.len(), inst.root, &targets);
    if tree.covered.len() != targets.len() {
        return Err(Error::Internal("greedy left targets uncovered".into()));
    }
    Ok(prune(inst, &tree.arcs))
}

/// Optimal tree weight by the Dreyfus-Wagner recursion over target subsets.
pub fn dst_exact(inst: &DstInstance) -> Result<Coord> {
    inst.check_reachable()?;
    let targets: Vec<usize> = inst.targets.iter().copied().filter(|&t| t != inst.root).collect();
    let k = targets.len();
    if k == 0 {
        return Ok(0);
    }
    if k > 16 {
        return Err(Error::InvalidParameter(format!("{k} targets are too many for the exact solver")));
    }
    let n = inst.nodes;
    // dp[mask][v]: cheapest arborescence rooted at v reaching the targets in mask.
    let mut dp = vec![vec![INF; n]; 1 << k];
    for (i, &t) in targets.iter().enumerate() {
        dp[1 << i] = inst.dijkstra(t, false).0;
    }
    for mask in 1usize..1 << k {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut g = vec![INF; n];
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            if sub < mask ^ sub {
                for v in 0..n {
                    let c = dp[sub][v].saturating_add(dp[mask ^ sub][v]);
                    if c < g[v] {
                        g[v] = c;
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        // Extend roots backwards along arcs.
        let mut heap: BinaryHeap<(Reverse<Coord>, usize)> =
            (0..n).filter(|&v| g[v] < INF).map(|v| (Reverse(g[v]), v)).collect();
        while let Some((Reverse(d), v)) = heap.pop() {
            if d > g[v] {
                continue;
            }
            for &ai in &inst.inc[v] {
                let a = &inst.arcs[ai];
                let nd = d + a.weight;
                if nd < g[a.from] {
                    g[a.from] = nd;
                    heap.push((Reverse(nd), a.from));
                }
            }
        }
        dp[mask] = g;
    }
    Ok(dp[(1 << k) - 1][inst.root])
}

/// Origin and terminals, every terminal componentwise at least the origin.
#[derive(Clone, Debug)]
pub struct RsaInstance {
    pub origin: Point,
    pub terminals: Vec<Point>,
}

impl RsaInstance {
    pub fn new(origin: Point, terminals: Vec<Point>) -> Result<Self> {
        for t in &terminals {
            if t.dim() != origin.dim() {
                return Err(Error::DimensionMismatch { expected: origin.dim(), found: t.dim() });
            }
            if !origin.le_all(t) {
                return Err(Error::InvalidParameter(format!("terminal {t} is not above origin {origin}")));
            }
        }
        Ok(RsaInstance { origin, terminals })
    }
}

/// DST instance on the oriented Hanan grid; arc `i` is grid edge
/// `arc_edges[i]` traversed upwards.
#[derive(Clone, Debug)]
pub struct RsaReduction {
    pub grid: GridGraph,
    pub dst: DstInstance,
    pub arc_edges: Vec<usize>,
}

pub fn rsa_to_dst(inst: &RsaInstance) -> Result<RsaReduction> {
    let mut pts = inst.terminals.clone();
    pts.push(inst.origin.clone());
    let grid = build_hanan(&pts)?;
    let mut arcs = Vec::new();
    let mut arc_edges = Vec::new();
    for e in grid.edges() {
        arcs.push(Arc { from: e.lo, to: e.hi, weight: e.length });
        arc_edges.push(e.id);
    }
    let root = grid.locate(&inst.origin).unwrap();
    let targets = inst.terminals.iter().map(|t| grid.locate(t).unwrap()).collect();
    let dst = DstInstance::new(grid.vertex_count(), arcs, root, targets)?;
    Ok(RsaReduction { grid, dst, arc_edges })
}

impl RsaReduction {
    pub fn network(&self, arcs: &[usize]) -> Network {
        let dim = self.grid.dim();
        canonicalize(
            dim,
            arcs.iter().map(|&a| self.grid.edge_segment(&self.grid.edge(self.arc_edges[a]).unwrap())),
        )
    }
}

#[derive(Clone, Debug)]
pub struct RsaSolution {
    pub network: Network,
    /// Total arc weight of the DST tree.
    pub tree_weight: Coord,
}

pub fn solve_rsa(inst: &RsaInstance, level: usize) -> Result<RsaSolution> {
    let dim = inst.origin.dim();
    if inst.terminals.iter().all(|t| *t == inst.origin) {
        return Ok(RsaSolution { network: Network::empty(dim), tree_weight: 0 });
    }
    let red = rsa_to_dst(inst)?;
    let arcs = dst_recursive_greedy(&red.dst, level)?;
    Ok(RsaSolution { network: red.network(&arcs), tree_weight: red.dst.tree_weight(&arcs) })
}

/// Optimal RSA weight through the exact DST solver.
pub fn rsa_exact_weight(inst: &RsaInstance) -> Result<Coord> {
    if inst.terminals.iter().all(|t| *t == inst.origin) {
        return Ok(0);
    }
    dst_exact(&rsa_to_dst(inst)?.dst)
}
