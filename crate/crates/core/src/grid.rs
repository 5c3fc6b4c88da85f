//! The recursive grid algorithm.
//!
//! For one directional class (pairs increasing on every axis) the bounding
//! box is cut on each axis into `c` slabs holding at most `ceil(n/c)`
//! terminals. Full-length lines through the interior grid points form the
//! grid network. Every cuboid that has a non-empty cuboid strictly above it
//! is patched to its upper corner, every cuboid with a non-empty cuboid
//! strictly below to its lower corner, by rectilinear Steiner arborescences.
//! A relevant pair in cuboids that differ on every axis then runs terminal,
//! upper corner, grid lines, lower corner, terminal. Pairs sharing a slab are
//! handled by recursing into every slab.
//!
//! [`solve_mmn`] perturbs the terminals to general position, runs the
//! directional algorithm for each of the `2^(d-1)` classes on reflected
//! copies, and maps the union back.

use rayon::prelude::*;

use crate::connectivity::relevant_pairs;
use crate::error::{Error, Result};
use crate::geometry::{canonicalize, Coord, DirectionClass, Network, Point, Reflection, Segment};
use crate::instances::{dedup_terminals, perturb_general_position};
use crate::oracle::{exact_mmn_pairs, DEFAULT_BUDGET};
use crate::steiner::{solve_rsa, RsaInstance};

#[derive(Clone, Debug)]
pub struct GridOptions {
    pub epsilon: f64,
    /// Level of the recursive greedy used for patching.
    pub level: usize,
    /// Base cases up to this size are solved by the exact oracle.
    pub oracle_base: usize,
    pub budget: u64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { epsilon: 1.0, level: 2, oracle_base: 5, budget: DEFAULT_BUDGET }
    }
}

impl GridOptions {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {} not in (0, 1]", self.epsilon)));
        }
        if self.level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        Ok(())
    }
}

/// `max(2, ceil(d^(1/epsilon)))`, saturating.
pub fn grid_constant(d: usize, epsilon: f64) -> usize {
    let raw = (d as f64).powf(1.0 / epsilon);
    if !raw.is_finite() || raw > 1e9 {
        return 1_000_000_000;
    }
    ((raw - 1e-9).ceil() as usize).max(2)
}

/// Separating planes and slab membership.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub c: usize,
    /// Per axis the `c + 1` plane coordinates, the outer two on the bounding
    /// box.
    pub planes: Vec<Vec<Coord>>,
    /// Per terminal its slab on every axis, i.e. its cuboid index.
    pub cuboid: Vec<Vec<usize>>,
}

impl Partition {
    pub fn dim(&self) -> usize {
        self.planes.len()
    }

    /// Terminal indices of slab `j` on `axis`.
    pub fn slab(&self, axis: usize, j: usize) -> Vec<usize> {
        (0..self.cuboid.len()).filter(|&t| self.cuboid[t][axis] == j).collect()
    }

    pub fn slab_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for a in 0..self.dim() {
            for j in 0..self.c {
                out.push(self.slab(a, j).len());
            }
        }
        out
    }
}

/// Place planes at terminal coordinates so that slab `j` holds the terminals
/// of rank `floor(j n / c) .. floor((j + 1) n / c)` on each axis. A terminal
/// on an interior plane belongs to the slab above it.
pub fn partition(terminals: &[Point], c: usize) -> Result<Partition> {
    if c < 2 {
        return Err(Error::InvalidParameter(format!("need c >= 2, got {c}")));
    }
    let n = terminals.len();
    let d = terminals.first().ok_or(Error::EmptyInput("terminal set"))?.dim();
    let mut planes = Vec::with_capacity(d);
    let mut cuboid = vec![vec![0; d]; n];
    for axis in 0..d {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&t| terminals[t].coord(axis));
        if let Some(w) = order.windows(2).find(|w| terminals[w[0]].coord(axis) == terminals[w[1]].coord(axis)) {
            return Err(Error::Degenerate(format!(
                "{} and {} share coordinate {axis}",
                terminals[w[0]], terminals[w[1]]
            )));
        }
        let start = |m: usize| (m * n / c).min(n - 1);
        let mut p: Vec<Coord> = (0..c).map(|m| terminals[order[start(m)]].coord(axis)).collect();
        p.push(terminals[order[n - 1]].coord(axis));
        for (rank, &t) in order.iter().enumerate() {
            cuboid[t][axis] = (0..c).rev().find(|&m| m * n / c <= rank).unwrap();
        }
        planes.push(p);
    }
    Ok(Partition { c, planes, cuboid })
}

/// Full-length lines through the interior grid points: for every axis `i`
/// and every choice of interior planes on the other axes, one segment across
/// the bounding box. `d (c - 1)^(d - 1)` segments.
pub fn build_grid_segments(p: &Partition) -> Network {
    let d = p.dim();
    let c = p.c;
    let mut segs = Vec::new();
    for axis in 0..d {
        let (lo, hi) = (p.planes[axis][0], p.planes[axis][c]);
        if lo == hi {
            continue;
        }
        let others: Vec<usize> = (0..d).filter(|&a| a != axis).collect();
        let mut idx = vec![1usize; others.len()];
        loop {
            let mut a = vec![0; d];
            for (k, &o) in others.iter().enumerate() {
                a[o] = p.planes[o][idx[k]];
            }
            let mut b = a.clone();
            a[axis] = lo;
            b[axis] = hi;
            segs.push(Segment::new(Point::new(a), Point::new(b)).unwrap());
            // odometer over {1..c-1}^(d-1)
            let mut k = 0;
            while k < idx.len() && idx[k] == c - 1 {
                idx[k] = 1;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
            idx[k] += 1;
        }
    }
    canonicalize(d, segs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchDirection {
    Up,
    Down,
}

fn strictly_below(a: &[usize], b: &[usize]) -> bool {
    a.iter().zip(b).all(|(x, y)| x < y)
}

/// Relevant cuboids for `dir` with their terminals and corner.
pub fn patch_plan(p: &Partition, terminals: &[Point], dir: PatchDirection) -> Vec<(Vec<usize>, Point)> {
    let mut cuboids: Vec<Vec<usize>> = p.cuboid.clone();
    cuboids.sort();
    cuboids.dedup();
    let mut out = Vec::new();
    for cub in &cuboids {
        let relevant = cuboids.iter().any(|o| match dir {
            PatchDirection::Up => strictly_below(cub, o),
            PatchDirection::Down => strictly_below(o, cub),
        });
        if !relevant {
            continue;
        }
        let members: Vec<usize> = (0..terminals.len()).filter(|&t| p.cuboid[t] == *cub).collect();
        let corner = Point::new(
            (0..p.dim())
                .map(|a| match dir {
                    PatchDirection::Up => p.planes[a][cub[a] + 1],
                    PatchDirection::Down => p.planes[a][cub[a]],
                })
                .collect(),
        );
        out.push((members, corner));
    }
    out
}

/// Connect every terminal of every relevant cuboid to its corner.
pub fn patch(p: &Partition, terminals: &[Point], dir: PatchDirection, level: usize) -> Result<Network> {
    let d = p.dim();
    let plan = patch_plan(p, terminals, dir);
    let flip = match dir {
        PatchDirection::Up => Reflection::all(d),
        PatchDirection::Down => Reflection::identity(d),
    };
    let parts: Vec<Network> = plan
        .par_iter()
        .map(|(members, corner)| {
            let inst = RsaInstance::new(
                corner.reflect(&flip),
                members.iter().map(|&t| terminals[t].reflect(&flip)).collect(),
            )?;
            Ok(solve_rsa(&inst, level)?.network.reflect(&flip))
        })
        .collect::<Result<_>>()?;
    Ok(Network::union_all(d, parts.iter()))
}

/// Record of one partition step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTrace {
    pub depth: usize,
    pub n: usize,
    pub c: usize,
    pub slab_sizes: Vec<usize>,
    pub grid_weight: Coord,
    /// Longest side of the bounding box.
    pub ell: Coord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GridTrace {
    pub levels: Vec<LevelTrace>,
    pub base_cases: usize,
    pub max_depth: usize,
}

impl GridTrace {
    fn merge(&mut self, other: GridTrace) {
        self.levels.extend(other.levels);
        self.base_cases += other.base_cases;
        self.max_depth = self.max_depth.max(other.max_depth);
    }

    fn sort(&mut self) {
        self.levels.sort_by(|a, b| (a.depth, std::cmp::Reverse(a.n), &a.slab_sizes).cmp(&(b.depth, std::cmp::Reverse(b.n), &b.slab_sizes)));
    }

    pub fn top(&self) -> Option<&LevelTrace> {
        self.levels.iter().find(|l| l.depth == 0)
    }
}

fn staircase(t: &Point, u: &Point) -> Vec<Segment> {
    let mut cur = t.clone();
    let mut out = Vec::new();
    for a in 0..t.dim() {
        if cur.coord(a) != u.coord(a) {
            let next = cur.with(a, u.coord(a));
            out.push(Segment::new(cur, next.clone()).unwrap());
            cur = next;
        }
    }
    out
}

fn base_case(terminals: &[Point], opts: &GridOptions) -> Result<Network> {
    let d = terminals[0].dim();
    let pairs = relevant_pairs(terminals);
    if pairs.is_empty() {
        return Ok(Network::empty(d));
    }
    if terminals.len() <= opts.oracle_base {
        match exact_mmn_pairs(terminals, Some(&pairs), opts.budget) {
            Ok(o) => return Ok(o.network),
            Err(Error::Inconclusive { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(canonicalize(d, pairs.iter().flat_map(|&(i, j)| staircase(&terminals[i], &terminals[j]))))
}

fn bbox_longest_side(terminals: &[Point]) -> Coord {
    (0..terminals[0].dim())
        .map(|a| {
            let it = terminals.iter().map(|t| t.coord(a));
            it.clone().max().unwrap() - it.min().unwrap()
        })
        .max()
        .unwrap_or(0)
}

fn directional(terminals: &[Point], opts: &GridOptions, c0: usize, depth: usize, parent: usize) -> Result<(Network, GridTrace)> {
    let n = terminals.len();
    let d = terminals.first().map_or(0, Point::dim);
    let mut trace = GridTrace { max_depth: depth, ..Default::default() };
    if n < 2 {
        return Ok((Network::empty(d.max(1)), trace));
    }
    let c = c0.min(n);
    if n <= 4.max(c) || n >= parent {
        trace.base_cases = 1;
        return Ok((base_case(terminals, opts)?, trace));
    }
    let p = partition(terminals, c)?;
    let grid = build_grid_segments(&p);
    trace.levels.push(LevelTrace {
        depth,
        n,
        c,
        slab_sizes: p.slab_sizes(),
        grid_weight: grid.weight(),
        ell: bbox_longest_side(terminals),
    });
    // With n > c every interior plane lies strictly inside the box, so the
    // corners of relevant cuboids are grid points.
    for dir in [PatchDirection::Up, PatchDirection::Down] {
        for (_, corner) in patch_plan(&p, terminals, dir) {
            let inside = (0..d).all(|a| p.planes[a][0] < corner.coord(a) && corner.coord(a) < p.planes[a][c]);
            if !inside {
                return Err(Error::Internal(format!("patch corner {corner} is not an interior grid point")));
            }
        }
    }
    let up = patch(&p, terminals, PatchDirection::Up, opts.level)?;
    let down = patch(&p, terminals, PatchDirection::Down, opts.level)?;
    let slabs: Vec<Vec<Point>> = (0..d)
        .flat_map(|a| (0..c).map(move |j| (a, j)))
        .map(|(a, j)| p.slab(a, j).into_iter().map(|t| terminals[t].clone()).collect())
        .collect();
    let subs: Vec<(Network, GridTrace)> = slabs
        .par_iter()
        .map(|s| directional(s, opts, c0, depth + 1, n))
        .collect::<Result<_>>()?;
    let mut parts = vec![grid, up, down];
    for (net, t) in subs {
        parts.push(net);
        trace.merge(t);
    }
    Ok((Network::union_all(d, parts.iter()), trace))
}

/// M-connect every pair `t <= t'` of general-position terminals.
pub fn solve_grid_directional(terminals: &[Point], opts: &GridOptions) -> Result<(Network, GridTrace)> {
    opts.validate()?;
    let d = terminals.first().ok_or(Error::EmptyInput("terminal set"))?.dim();
    let (net, mut trace) = directional(terminals, opts, grid_constant(d, opts.epsilon), 0, usize::MAX)?;
    trace.sort();
    Ok((net, trace))
}

#[derive(Clone, Debug)]
pub struct GridSolution {
    pub network: Network,
    /// One trace per directional class, in [`DirectionClass::all`] order.
    pub traces: Vec<(DirectionClass, GridTrace)>,
}

/// Feasible M-network for all terminal pairs.
pub fn solve_mmn(terminals: &[Point], opts: &GridOptions) -> Result<GridSolution> {
    opts.validate()?;
    let t = dedup_terminals(terminals);
    let d = t.first().ok_or(Error::EmptyInput("terminal set"))?.dim();
    if let Some(p) = t.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
    }
    if t.len() < 2 {
        return Ok(GridSolution { network: Network::empty(d), traces: Vec::new() });
    }
    let pert = perturb_general_position(&t);
    let classes = DirectionClass::all(d, d - 1);
    let results: Vec<(Network, GridTrace)> = classes
        .par_iter()
        .map(|class| {
            let r = class.reflection(d);
            let pts: Vec<Point> = pert.terminals.iter().map(|p| p.reflect(&r)).collect();
            let (net, trace) = solve_grid_directional(&pts, opts)?;
            Ok((net.reflect(&r), trace))
        })
        .collect::<Result<_>>()?;
    let network = pert.restore(&Network::union_all(d, results.iter().map(|(n, _)| n)));
    let traces = classes.into_iter().zip(results.into_iter().map(|(_, t)| t)).collect();
    Ok(GridSolution { network, traces })
}
