//! Hanan grids and their oriented (coordinate-increasing) digraph form.
//!
//! Vertices are stored implicitly as mixed-radix indices over the per-axis
//! coordinate tables; geometric coordinates are materialized on demand.
//! The edge leaving vertex `v` along `axis` in the increasing direction has
//! id `v * dim + axis`, so edge ids are dense enough for flat state arrays.

use crate::error::{Error, Result};
use crate::geometry::{Coord, Point, Segment};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridGraph {
    axes: Vec<Vec<Coord>>,
    strides: Vec<usize>,
    oriented: bool,
}

/// An edge between two adjacent grid vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridEdge {
    pub id: usize,
    /// The endpoint with the smaller coordinate.
    pub lo: usize,
    pub hi: usize,
    pub axis: usize,
    pub length: Coord,
}

/// Build the Hanan grid of `terminals`.
pub fn build_hanan(terminals: &[Point]) -> Result<GridGraph> {
    let first = terminals.first().ok_or(Error::EmptyInput("terminal set"))?;
    let dim = first.dim();
    for t in terminals {
        if t.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: t.dim() });
        }
    }
    let axes = (0..dim)
        .map(|a| {
            let mut v: Vec<Coord> = terminals.iter().map(|t| t.coord(a)).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    Ok(GridGraph::from_axes(axes))
}

/// Orient every edge from its dominated endpoint to its dominating one.
pub fn orient_hanan(g: &GridGraph) -> GridGraph {
    GridGraph { oriented: true, ..g.clone() }
}

impl GridGraph {
    pub fn from_axes(axes: Vec<Vec<Coord>>) -> Self {
        let mut strides = vec![1; axes.len()];
        for a in (0..axes.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * axes[a + 1].len();
        }
        GridGraph { axes, strides, oriented: false }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn is_oriented(&self) -> bool {
        self.oriented
    }

    pub fn axis_coords(&self, axis: usize) -> &[Coord] {
        &self.axes[axis]
    }

    pub fn axis_len(&self, axis: usize) -> usize {
        self.axes[axis].len()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn vertex_count(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.dim())
            .map(|a| {
                let others: usize = (0..self.dim())
                    .filter(|&b| b != a)
                    .map(|b| self.axes[b].len())
                    .product();
                (self.axes[a].len() - 1) * others
            })
            .sum()
    }

    /// Upper bound (exclusive) on edge ids.
    pub fn edge_id_bound(&self) -> usize {
        self.vertex_count() * self.dim()
    }

    pub fn index_tuple(&self, v: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|a| (v / self.strides[a]) % self.axes[a].len())
            .collect()
    }

    pub fn vertex_of(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn axis_index(&self, v: usize, axis: usize) -> usize {
        (v / self.strides[axis]) % self.axes[axis].len()
    }

    pub fn point(&self, v: usize) -> Point {
        Point::new(
            (0..self.dim())
                .map(|a| self.axes[a][self.axis_index(v, a)])
                .collect(),
        )
    }

    /// Vertex id of a point lying on the grid.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        if p.dim() != self.dim() {
            return None;
        }
        let mut v = 0;
        for a in 0..self.dim() {
            let i = self.axes[a].binary_search(&p.coord(a)).ok()?;
            v += i * self.strides[a];
        }
        Some(v)
    }

    /// Neighbor one step along `axis`, increasing if `up`.
    pub fn step(&self, v: usize, axis: usize, up: bool) -> Option<usize> {
        let i = self.axis_index(v, axis);
        if up {
            (i + 1 < self.axes[axis].len()).then(|| v + self.strides[axis])
        } else {
            (i > 0).then(|| v - self.strides[axis])
        }
    }

    /// The edge between `v` and its neighbor along `axis` (direction `up`).
    pub fn edge_at(&self, v: usize, axis: usize, up: bool) -> Option<GridEdge> {
        let w = self.step(v, axis, up)?;
        let (lo, hi) = if up { (v, w) } else { (w, v) };
        let i = self.axis_index(lo, axis);
        Some(GridEdge {
            id: lo * self.dim() + axis,
            lo,
            hi,
            axis,
            length: self.axes[axis][i + 1] - self.axes[axis][i],
        })
    }

    pub fn edge(&self, id: usize) -> Option<GridEdge> {
        let d = self.dim();
        self.edge_at(id / d, id % d, true)
    }

    pub fn edges(&self) -> impl Iterator<Item = GridEdge> + '_ {
        (0..self.vertex_count())
            .flat_map(move |v| (0..self.dim()).filter_map(move |a| self.edge_at(v, a, true)))
    }

    pub fn edge_segment(&self, e: &GridEdge) -> Segment {
        Segment::new(self.point(e.lo), self.point(e.hi)).expect("grid edges have positive length")
    }

    /// Out-neighbors in the oriented grid, or all neighbors otherwise.
    pub fn successors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.dim());
        for a in 0..self.dim() {
            if let Some(w) = self.step(v, a, true) {
                out.push(w);
            }
            if !self.oriented {
                if let Some(w) = self.step(v, a, false) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Directed reachability in the oriented grid. For an unoriented grid
    /// every pair of vertices is connected.
    pub fn reachable(&self, u: usize, v: usize) -> bool {
        if !self.oriented {
            return true;
        }
        let (iu, iv) = (self.index_tuple(u), self.index_tuple(v));
        iu.iter().zip(&iv).all(|(a, b)| a <= b)
    }

    /// Number of directed `u -> v` paths in the oriented grid.
    pub fn count_directed_paths(&self, u: usize, v: usize) -> u128 {
        if !self.reachable(u, v) {
            return 0;
        }
        // Multinomial coefficient of the per-axis index differences.
        let (iu, iv) = (self.index_tuple(u), self.index_tuple(v));
        let steps: Vec<u128> = iu.iter().zip(&iv).map(|(a, b)| (b - a) as u128).collect();
        let mut total = 0u128;
        let mut result = 1u128;
        for s in steps {
            for k in 1..=s {
                total += 1;
                result = result * total / k;
            }
        }
        result
    }

    /// Shortest directed path length via dynamic programming over the DAG.
    pub fn shortest_directed(&self, u: usize, v: usize) -> Option<Coord> {
        if !self.reachable(u, v) {
            return None;
        }
        let order = self.topological_order();
        let mut dist = vec![Coord::MAX; self.vertex_count()];
        dist[u] = 0;
        for w in order {
            if dist[w] == Coord::MAX {
                continue;
            }
            for a in 0..self.dim() {
                if let Some(e) = self.edge_at(w, a, true) {
                    let nd = dist[w] + e.length;
                    if nd < dist[e.hi] {
                        dist[e.hi] = nd;
                    }
                }
            }
        }
        (dist[v] != Coord::MAX).then_some(dist[v])
    }

    /// Vertices sorted by index sum, a topological order of the oriented grid.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.vertex_count()).collect();
        order.sort_by_key(|&v| (self.index_tuple(v).iter().sum::<usize>(), v));
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::manhattan_distance;

    fn pts(v: &[&[Coord]]) -> Vec<Point> {
        v.iter().map(|c| Point::new(c.to_vec())).collect()
    }

    /// Independent edge count: enumerate every vertex pair differing by one
    /// index step in exactly one axis.
    fn brute_edges(g: &GridGraph) -> usize {
        let n = g.vertex_count();
        let mut count = 0;
        for u in 0..n {
            for v in u + 1..n {
                let (a, b) = (g.index_tuple(u), g.index_tuple(v));
                let diffs: Vec<usize> = (0..g.dim()).map(|i| a[i].abs_diff(b[i])).collect();
                if diffs.iter().sum::<usize>() == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn build_examples() {
        let g = build_hanan(&pts(&[&[0, 0, 0], &[1, 1, 1]])).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 12));
        assert_eq!(brute_edges(&g), 12);

        let g = build_hanan(&pts(&[&[0, 5, 2], &[3, 1, 7], &[8, 4, 4]])).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (27, 54));
        assert_eq!(brute_edges(&g), 54);
        assert_eq!(g.edges().count(), 54);

        let g = build_hanan(&pts(&[&[4, 4]])).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (1, 0));

        assert!(matches!(build_hanan(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn terminals_are_vertices_with_exact_lengths() {
        let t = pts(&[&[0, 5, 2], &[3, 1, 7], &[8, 4, 4]]);
        let g = build_hanan(&t).unwrap();
        for p in &t {
            let v = g.locate(p).unwrap();
            assert_eq!(&g.point(v), p);
        }
        let total: Coord = g.edges().map(|e| e.length).sum();
        let seg_total: Coord = g.edges().map(|e| g.edge_segment(&e).length()).sum();
        assert_eq!(total, seg_total);
    }

    #[test]
    fn oriented_unit_cube() {
        let g = orient_hanan(&build_hanan(&pts(&[&[0, 0, 0], &[1, 1, 1]])).unwrap());
        assert_eq!(g.edges().count(), 12);
        let o = g.locate(&Point::from([0, 0, 0])).unwrap();
        let top = g.locate(&Point::from([1, 1, 1])).unwrap();
        assert_eq!(g.count_directed_paths(o, top), 6);
        assert_eq!(brute_paths(&g, o, top), 6);
        assert!(!g.reachable(top, o));
        assert_eq!(g.shortest_directed(top, o), None);

        let single = orient_hanan(&build_hanan(&pts(&[&[1, 1, 1]])).unwrap());
        assert_eq!(single.edges().count(), 0);
    }

    fn brute_paths(g: &GridGraph, u: usize, v: usize) -> u128 {
        if u == v {
            return 1;
        }
        g.successors(u).into_iter().map(|w| brute_paths(g, w, v)).sum()
    }

    #[test]
    fn general_position_vertex_count_and_distances() {
        let t = pts(&[&[0, 3, 6], &[1, 5, 2], &[4, 0, 3], &[7, 2, 9]]);
        let g = orient_hanan(&build_hanan(&t).unwrap());
        assert_eq!(g.vertex_count(), 4usize.pow(3));
        for u in 0..g.vertex_count() {
            for v in 0..g.vertex_count() {
                let (pu, pv) = (g.point(u), g.point(v));
                if pu.le_all(&pv) {
                    assert_eq!(
                        g.shortest_directed(u, v),
                        Some(manhattan_distance(&pu, &pv).unwrap())
                    );
                    assert_eq!(g.count_directed_paths(u, v), brute_paths(&g, u, v));
                }
            }
        }
        let order = g.topological_order();
        let pos: Vec<usize> = {
            let mut pos = vec![0; order.len()];
            for (i, &v) in order.iter().enumerate() {
                pos[v] = i;
            }
            pos
        };
        for e in g.edges() {
            assert!(pos[e.lo] < pos[e.hi]);
        }
    }
}
