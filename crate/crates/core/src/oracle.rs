//! Exact minimum M-networks for tiny instances, and cheap lower bounds.
//!
//! Some minimum network lies inside the Hanan grid, so the search ranges
//! over subsets of Hanan edges. It is a depth-first branch and bound that
//! fixes one edge per level (in, then out). Each search node is bounded by
//! the linear relaxation of the multi-commodity flow formulation: edge
//! variables `x_e` in `[0, 1]`, and for every pair a unit flow from one
//! terminal to the other along box edges oriented toward the target, with
//! `flow <= x_e`. Decided edges are fixed to 0 or 1 in the relaxation.
//! Incumbents come from greedy path completion and from pruning the support
//! of relaxed solutions.

use microlp::{ComparisonOp, Error as LpError, OptimizationDirection, Problem, Solution, Variable};

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, l1, Coord, Network, Point};
use crate::hanan::{build_hanan, GridGraph};

/// Default node budget of [`exact_mmn`] callers in this crate.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

const FREE: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;
const INF: Coord = Coord::MAX / 4;

/// Result of a completed search.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub network: Network,
    pub nodes: u64,
}

/// Minimum-weight network M-connecting every terminal pair.
pub fn exact_mmn(terminals: &[Point], node_budget: u64) -> Result<Network> {
    exact_mmn_pairs(terminals, None, node_budget).map(|o| o.network)
}

/// Minimum-weight network M-connecting the given index pairs (all pairs when
/// `pairs` is `None`).
pub fn exact_mmn_pairs(
    terminals: &[Point],
    pairs: Option<&[(usize, usize)]>,
    node_budget: u64,
) -> Result<OracleOutcome> {
    let first = terminals.first().ok_or(Error::EmptyInput("terminal set"))?;
    let dim = first.dim();
    let grid = build_hanan(terminals)?;
    let vid: Vec<usize> = terminals.iter().map(|t| grid.locate(t).unwrap()).collect();
    let mut vpairs: Vec<(usize, usize)> = match pairs {
        Some(ps) => ps.iter().map(|&(i, j)| (vid[i], vid[j])).collect(),
        None => (0..vid.len())
            .flat_map(|i| (i + 1..vid.len()).map(move |j| (i, j)))
            .map(|(i, j)| (vid[i], vid[j]))
            .collect(),
    };
    for p in vpairs.iter_mut() {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    vpairs.retain(|(a, b)| a != b);
    vpairs.sort_unstable();
    vpairs.dedup();
    if vpairs.is_empty() {
        return Ok(OracleOutcome { network: Network::empty(dim), nodes: 0 });
    }
    let mut search = Search::new(grid, vpairs, node_budget);
    search.run()?;
    let network = search.best_network();
    Ok(OracleOutcome { network, nodes: search.nodes })
}

/// `max(max pairwise L1 distance, longest bounding-box side)`; never above
/// the optimum.
pub fn lower_bound(terminals: &[Point]) -> Coord {
    if terminals.len() < 2 {
        return 0;
    }
    let dim = terminals[0].dim();
    let mut best = 0;
    for (i, p) in terminals.iter().enumerate() {
        for q in &terminals[i + 1..] {
            best = best.max(l1(p, q));
        }
    }
    let side = (0..dim)
        .map(|a| {
            let lo = terminals.iter().map(|t| t.coord(a)).min().unwrap();
            let hi = terminals.iter().map(|t| t.coord(a)).max().unwrap();
            hi - lo
        })
        .max()
        .unwrap_or(0);
    best.max(side)
}

/// Monotone DP layout of one pair's bounding box.
struct PairBox {
    /// Grid vertices in DP order, starting at the pair's first vertex.
    order: Vec<usize>,
    /// For each local vertex, `(local predecessor, edge id, edge length)`.
    preds: Vec<Vec<(usize, usize, Coord)>>,
}

impl PairBox {
    fn new(grid: &GridGraph, u: usize, v: usize) -> PairBox {
        let d = grid.dim();
        let (iu, iv) = (grid.index_tuple(u), grid.index_tuple(v));
        let ext: Vec<usize> = (0..d).map(|a| iu[a].abs_diff(iv[a]) + 1).collect();
        let up: Vec<bool> = (0..d).map(|a| iv[a] >= iu[a]).collect();
        let total: usize = ext.iter().product();
        let mut lstride = vec![1; d];
        for a in (0..d.saturating_sub(1)).rev() {
            lstride[a] = lstride[a + 1] * ext[a + 1];
        }
        let mut order = Vec::with_capacity(total);
        let mut preds = Vec::with_capacity(total);
        for local in 0..total {
            let off: Vec<usize> = (0..d).map(|a| (local / lstride[a]) % ext[a]).collect();
            let idx: Vec<usize> = (0..d)
                .map(|a| if up[a] { iu[a] + off[a] } else { iu[a] - off[a] })
                .collect();
            let w = grid.vertex_of(&idx);
            order.push(w);
            let mut pr = Vec::new();
            for a in 0..d {
                if off[a] > 0 {
                    let e = grid.edge_at(w, a, !up[a]).expect("box edge");
                    pr.push((local - lstride[a], e.id, e.length));
                }
            }
            preds.push(pr);
        }
        PairBox { order, preds }
    }

    /// Cheapest completion cost, plus the free edges of one optimal
    /// completion path when `want_path`.
    fn completion(&self, state: &[u8], dist: &mut Vec<Coord>, arg: &mut Vec<u32>, want_path: bool) -> (Coord, Vec<usize>) {
        let n = self.order.len();
        dist.clear();
        dist.resize(n, INF);
        arg.clear();
        arg.resize(n, u32::MAX);
        dist[0] = 0;
        for local in 1..n {
            let mut best = INF;
            let mut which = u32::MAX;
            for (k, &(pl, eid, len)) in self.preds[local].iter().enumerate() {
                let c = match state[eid] {
                    IN => 0,
                    OUT => continue,
                    _ => len,
                };
                let cand = dist[pl] + c;
                if cand < best {
                    best = cand;
                    which = k as u32;
                }
            }
            dist[local] = best;
            arg[local] = which;
        }
        let cost = dist[n - 1];
        let mut path = Vec::new();
        if want_path && cost < INF {
            let mut cur = n - 1;
            while cur != 0 {
                let (pl, eid, _) = self.preds[cur][arg[cur] as usize];
                if state[eid] == FREE {
                    path.push(eid);
                }
                cur = pl;
            }
            path.reverse();
        }
        (cost, path)
    }
}

const EPS: f64 = 1e-6;

struct Search {
    grid: GridGraph,
    boxes: Vec<PairBox>,
    /// LP variable of each grid edge id, for edges inside some pair box.
    xvar: Vec<Option<Variable>>,
    lp_edges: Vec<usize>,
    problem: Problem,
    best_weight: Coord,
    best_edges: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
    dist: Vec<Coord>,
    arg: Vec<u32>,
}

impl Search {
    fn new(grid: GridGraph, pairs: Vec<(usize, usize)>, budget: u64) -> Search {
        let boxes: Vec<PairBox> = pairs.iter().map(|&(u, v)| PairBox::new(&grid, u, v)).collect();
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let mut xvar = vec![None; grid.edge_id_bound()];
        let mut lp_edges = Vec::new();
        for b in &boxes {
            for pr in &b.preds {
                for &(_, eid, len) in pr {
                    if xvar[eid].is_none() {
                        xvar[eid] = Some(problem.add_var(len as f64, (0.0, 1.0)));
                        lp_edges.push(eid);
                    }
                }
            }
        }
        for b in &boxes {
            let n = b.order.len();
            // Net outflow per local vertex.
            let mut balance: Vec<Vec<(Variable, f64)>> = vec![Vec::new(); n];
            for (local, pr) in b.preds.iter().enumerate() {
                for &(pl, eid, _) in pr {
                    let f = problem.add_var(0.0, (0.0, 1.0));
                    problem.add_constraint([(f, 1.0), (xvar[eid].unwrap(), -1.0)], ComparisonOp::Le, 0.0);
                    balance[pl].push((f, 1.0));
                    balance[local].push((f, -1.0));
                }
            }
            // The sink row is implied by the others.
            for (local, terms) in balance.iter().enumerate().take(n - 1) {
                let rhs = if local == 0 { 1.0 } else { 0.0 };
                problem.add_constraint(terms.as_slice(), ComparisonOp::Eq, rhs);
            }
        }
        Search {
            grid,
            boxes,
            xvar,
            lp_edges,
            problem,
            best_weight: INF,
            best_edges: None,
            nodes: 0,
            budget,
            dist: Vec::new(),
            arg: Vec::new(),
        }
    }

    fn edge_len(&self, eid: usize) -> Coord {
        self.grid.edge(eid).expect("valid edge id").length
    }

    /// Whether the edge set given by `state` (IN or OUT only) M-connects all pairs.
    fn connects_all(&mut self, state: &[u8]) -> bool {
        let (dist, arg) = (&mut self.dist, &mut self.arg);
        self.boxes.iter().all(|b| b.completion(state, dist, arg, false).0 == 0)
    }

    /// Drop edges of a feasible set while it stays feasible, longest first,
    /// and record it if it beats the incumbent.
    fn offer(&mut self, edges: Vec<usize>) {
        let mut trial = vec![OUT; self.grid.edge_id_bound()];
        for &e in &edges {
            trial[e] = IN;
        }
        if !self.connects_all(&trial) {
            return;
        }
        let mut order = edges;
        order.sort_by_key(|&e| (std::cmp::Reverse(self.edge_len(e)), e));
        for &e in &order {
            trial[e] = OUT;
            if !self.connects_all(&trial) {
                trial[e] = IN;
            }
        }
        let kept: Vec<usize> = order.into_iter().filter(|&e| trial[e] == IN).collect();
        let w: Coord = kept.iter().map(|&e| self.edge_len(e)).sum();
        if w < self.best_weight {
            self.best_weight = w;
            self.best_edges = Some(kept);
        }
    }

    /// Connect pairs one at a time along cheapest completions.
    fn greedy(&mut self) {
        let mut state = vec![FREE; self.grid.edge_id_bound()];
        for k in 0..self.boxes.len() {
            let (_, path) = self.boxes[k].completion(&state, &mut self.dist, &mut self.arg, true);
            for e in path {
                state[e] = IN;
            }
        }
        let edges = (0..state.len()).filter(|&e| state[e] == IN).collect();
        self.offer(edges);
    }

    fn run(&mut self) -> Result<()> {
        self.greedy();
        let root = match self.problem.solve() {
            Ok(outcome) => outcome.into_solution().map_err(|_| lp_failure("root relaxation interrupted"))?,
            Err(e) => return Err(lp_failure(&format!("root relaxation: {e:?}"))),
        };
        self.dfs(root)
    }

    fn dfs(&mut self, sol: Solution) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Inconclusive {
                nodes: self.nodes - 1,
                best: (self.best_weight < INF).then_some(self.best_weight),
            });
        }
        let bound = (sol.objective() - EPS).ceil() as Coord;
        if bound >= self.best_weight {
            return Ok(());
        }
        let values: Vec<(usize, f64)> = self
            .lp_edges
            .iter()
            .map(|&e| (e, sol.var_value_raw(self.xvar[e].unwrap())))
            .collect();
        let support: Vec<usize> = values.iter().filter(|&&(_, x)| x > EPS).map(|&(e, _)| e).collect();
        self.offer(support);
        if bound >= self.best_weight {
            return Ok(());
        }
        // Most fractional edge, weighted by length.
        let branch = values
            .iter()
            .filter(|&&(_, x)| x > EPS && x < 1.0 - EPS)
            .max_by(|a, b| {
                let sa = a.1.min(1.0 - a.1) * self.edge_len(a.0) as f64;
                let sb = b.1.min(1.0 - b.1) * self.edge_len(b.0) as f64;
                sa.total_cmp(&sb).then(b.0.cmp(&a.0))
            })
            .copied();
        let Some((eid, x)) = branch else {
            // Integral relaxation: its support was offered above.
            return Ok(());
        };
        let var = self.xvar[eid].unwrap();
        let order = if x >= 0.5 { [1.0, 0.0] } else { [0.0, 1.0] };
        for val in order {
            match sol.clone().fix_var(var, val) {
                Ok(outcome) => {
                    if let Ok(child) = outcome.into_solution() {
                        self.dfs(child)?;
                    } else {
                        return Err(lp_failure("relaxation interrupted"));
                    }
                }
                Err(LpError::Infeasible) => {}
                Err(e) => return Err(lp_failure(&format!("{e:?}"))),
            }
        }
        Ok(())
    }

    fn best_network(&self) -> Network {
        let edges = self.best_edges.as_deref().unwrap_or(&[]);
        canonicalize(
            self.grid.dim(),
            edges.iter().map(|&e| self.grid.edge_segment(&self.grid.edge(e).unwrap())),
        )
    }
}

fn lp_failure(what: &str) -> Error {
    Error::Internal(format!("linear relaxation failed: {what}"))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::verify_mmn;

    fn pts(v: &[&[Coord]]) -> Vec<Point> {
        v.iter().map(|c| Point::new(c.to_vec())).collect()
    }

    /// Full enumeration over every subset of Hanan edges.
    fn brute_force(terminals: &[Point]) -> Coord {
        let grid = build_hanan(terminals).unwrap();
        let edges: Vec<_> = grid.edges().collect();
        assert!(edges.len() <= 20, "too many edges for enumeration");
        let mut best = INF;
        for mask in 0u32..(1 << edges.len()) {
            let w: Coord = (0..edges.len()).filter(|&i| mask & (1 << i) != 0).map(|i| edges[i].length).sum();
            if w >= best {
                continue;
            }
            let net = canonicalize(
                grid.dim(),
                (0..edges.len()).filter(|&i| mask & (1 << i) != 0).map(|i| grid.edge_segment(&edges[i])),
            );
            if verify_mmn(&net, terminals, None).is_feasible() {
                best = w;
            }
        }
        best
    }

    #[test]
    fn two_terminals_cost_their_distance() {
        let t = pts(&[&[0, 0, 0], &[2, 1, 3]]);
        assert_eq!(exact_mmn(&t, DEFAULT_BUDGET).unwrap().weight(), 6);
    }

    #[test]
    fn frozen_small_2d_optima() {
        let staircase = pts(&[&[0, 0], &[1, 1], &[2, 2]]);
        assert_eq!(brute_force(&staircase), 4);
        assert_eq!(exact_mmn(&staircase, DEFAULT_BUDGET).unwrap().weight(), 4);

        // Enumeration over the 12 Hanan edges: a plus-shaped network
        // through (1,1) of weight 4.
        let tri = pts(&[&[0, 0], &[2, 1], &[1, 2]]);
        assert_eq!(brute_force(&tri), 4);
        let net = exact_mmn(&tri, DEFAULT_BUDGET).unwrap();
        assert_eq!(net.weight(), 4);
        assert!(verify_mmn(&net, &tri, None).is_feasible());
    }

    #[test]
    fn matches_enumeration_on_three_point_sets() {
        let cases = [
            pts(&[&[0, 0], &[3, 1], &[1, 4]]),
            pts(&[&[0, 5], &[2, 0], &[4, 3]]),
            pts(&[&[1, 1], &[5, 2], &[3, 7]]),
            pts(&[&[0, 0], &[4, 4], &[2, 1]]),
        ];
        for t in cases {
            let net = exact_mmn(&t, DEFAULT_BUDGET).unwrap();
            assert_eq!(net.weight(), brute_force(&t), "{t:?}");
            assert!(verify_mmn(&net, &t, None).is_feasible());
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let t = crate::instances::gen_random(7, 3, 0, 28).unwrap().terminals;
        assert!(matches!(exact_mmn(&t, 1), Err(Error::Inconclusive { nodes: 1, .. })));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(&pts(&[&[0, 0, 0], &[1, 2, 3]])), 6);
        assert_eq!(lower_bound(&pts(&[&[4, 4, 4]])), 0);
        let theorem1 = pts(&[&[0, 3, 3], &[1, 2, 2], &[2, 1, 1], &[3, 6, 6], &[4, 5, 5], &[5, 4, 4]]);
        assert!(lower_bound(&theorem1) >= 7);
    }

    #[test]
    fn invariant_under_translation_and_axis_permutation() {
        let t = pts(&[&[0, 2, 1], &[3, 0, 2], &[1, 3, 0], &[2, 1, 3]]);
        let w = exact_mmn(&t, DEFAULT_BUDGET).unwrap().weight();
        let shifted: Vec<Point> = t
            .iter()
            .map(|p| Point::new(vec![p.coord(0) + 7, p.coord(1) - 3, p.coord(2) + 11]))
            .collect();
        let permuted: Vec<Point> = t
            .iter()
            .map(|p| Point::new(vec![p.coord(2), p.coord(0), p.coord(1)]))
            .collect();
        assert_eq!(exact_mmn(&shifted, DEFAULT_BUDGET).unwrap().weight(), w);
        assert_eq!(exact_mmn(&permuted, DEFAULT_BUDGET).unwrap().weight(), w);
        assert!(lower_bound(&t) <= w);
    }
}
