//! Instance generators and general-position perturbation.

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, Coord, Network, Point, Segment};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub terminals: Vec<Point>,
    pub family: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, i64>,
    /// Companion network of the generating-set construction.
    pub network: Option<Network>,
    /// Designated cross pairs `(i, j)`, indices into `terminals`.
    pub pairs: Option<Vec<(usize, usize)>>,
}

impl GeneratedInstance {
    fn new(terminals: Vec<Point>, family: &str, seed: Option<u64>, params: &[(&str, i64)]) -> Self {
        GeneratedInstance {
            terminals,
            family: family.to_string(),
            seed,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            network: None,
            pairs: None,
        }
    }
}

/// `n` random points in `[0, range)^d` with pairwise distinct coordinates on
/// every axis.
pub fn gen_random(n: usize, d: usize, seed: u64, range: usize) -> Result<GeneratedInstance> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("need n >= 1 and d >= 1".into()));
    }
    if range < n {
        return Err(Error::InvalidParameter(format!(
            "coordinate range {range} cannot hold {n} distinct values"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<Coord>> = (0..d)
        .map(|_| sample(&mut rng, range, n).into_iter().map(|v| v as Coord).collect())
        .collect();
    let terminals = (0..n)
        .map(|i| Point::new(columns.iter().map(|c| c[i]).collect()))
        .collect();
    Ok(GeneratedInstance::new(
        terminals,
        "random",
        Some(seed),
        &[("n", n as i64), ("d", d as i64), ("range", range as i64)],
    ))
}

/// `n` 3D terminals on exactly `k` horizontal planes, every plane nonempty,
/// x and y coordinates pairwise distinct.
pub fn gen_kplanes(n: usize, k: usize, seed: u64) -> Result<GeneratedInstance> {
    if k < 2 {
        return Err(Error::InvalidParameter("k-planes instances need k >= 2".into()));
    }
    if n < k {
        return Err(Error::InvalidParameter(format!("n = {n} < k = {k}: some plane would be empty")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = 4 * n;
    let xs = sample(&mut rng, range, n).into_vec();
    let ys = sample(&mut rng, range, n).into_vec();
    let mut zs: Vec<Coord> = sample(&mut rng, 4 * k, k).into_iter().map(|v| v as Coord).collect();
    zs.sort_unstable();
    let terminals = (0..n)
        .map(|i| {
            let plane = if i < k { i } else { rng.gen_range(0..k) };
            Point::new(vec![xs[i] as Coord, ys[i] as Coord, zs[plane]])
        })
        .collect();
    Ok(GeneratedInstance::new(
        terminals,
        "kplanes",
        Some(seed),
        &[("n", n as i64), ("k", k as i64)],
    ))
}

/// The quadratic generating-set construction: `t_i = (i, n/2-i, n/2-i)` and
/// `t'_i = (n/2+i, n-i, n-i)`. Terminals `0..n/2` are `T`, the rest `T'`.
/// The companion network M-connects every pair of `T x T'`.
pub fn gen_generating_set_instance(n: usize) -> Result<GeneratedInstance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n = {n} must be even and at least 4")));
    }
    let h = n as Coord / 2;
    let nn = n as Coord;
    let mut terminals: Vec<Point> = (0..h).map(|i| Point::new(vec![i, h - i, h - i])).collect();
    terminals.extend((0..h).map(|i| Point::new(vec![h + i, nn - i, nn - i])));
    let pairs: Vec<(usize, usize)> = (0..n / 2)
        .flat_map(|i| (0..n / 2).map(move |j| (i, n / 2 + j)))
        .collect();
    let network = generating_set_network(n, &pairs)?;
    let mut inst = GeneratedInstance::new(terminals, "theorem1", None, &[("n", n as i64)]);
    inst.network = Some(network);
    inst.pairs = Some(pairs);
    Ok(inst)
}

/// Companion network for the cross pairs `z` (indices as produced by
/// [`gen_generating_set_instance`]): a three-segment x, y, z path per pair
/// plus the connectors between consecutive terminals of `T` and of `T'`.
pub fn generating_set_network(n: usize, z: &[(usize, usize)]) -> Result<Network> {
    let inst_terms = |i: usize| -> Point {
        let h = n as Coord / 2;
        let nn = n as Coord;
        let i = i as Coord;
        if i < h {
            Point::new(vec![i, h - i, h - i])
        } else {
            let i = i - h;
            Point::new(vec![h + i, nn - i, nn - i])
        }
    };
    let mut segs: Vec<Segment> = Vec::new();
    for &(a, b) in z {
        let (t, u) = (inst_terms(a), inst_terms(b));
        let p1 = t.with(0, u.coord(0));
        let p2 = p1.with(1, u.coord(1));
        segs.push(Segment::new(t, p1.clone())?);
        segs.push(Segment::new(p1, p2.clone())?);
        segs.push(Segment::new(p2, u)?);
    }
    for half in [0, n / 2] {
        for i in half..half + n / 2 - 1 {
            let t = inst_terms(i);
            let a = t.with(2, t.coord(2) - 1);
            let b = a.with(1, a.coord(1) - 1);
            let c = inst_terms(i + 1);
            segs.push(Segment::new(t, a.clone())?);
            segs.push(Segment::new(a, b.clone())?);
            segs.push(Segment::new(b, c)?);
        }
    }
    Ok(canonicalize(3, segs))
}

/// The y-aligned segment used only by the M-path of cross pair `(a, b)`.
pub fn private_y_segment(n: usize, a: usize, b: usize) -> Result<Segment> {
    let h = n as Coord / 2;
    let nn = n as Coord;
    let (i, j) = (a as Coord, b as Coord - h);
    let (ty, tz) = (h - i, h - i);
    let (ux, uy) = (h + j, nn - j);
    Segment::new(Point::new(vec![ux, ty, tz]), Point::new(vec![ux, uy, tz]))
}

/// Remove the part of `network` covered by `seg`.
pub fn remove_segment(network: &Network, seg: &Segment) -> Network {
    let axis = seg.axis();
    let (lo, hi) = (seg.a().coord(axis), seg.b().coord(axis));
    let mut out = Vec::new();
    for s in network.segments() {
        let collinear = s.axis() == axis
            && (0..s.dim()).all(|i| i == axis || s.a().coord(i) == seg.a().coord(i));
        if !collinear {
            out.push(s.clone());
            continue;
        }
        let (a, b) = (s.a().coord(axis), s.b().coord(axis));
        if a < lo {
            if let Ok(part) = Segment::new(s.a().clone(), s.a().with(axis, b.min(lo))) {
                out.push(part);
            }
        }
        if b > hi {
            if let Ok(part) = Segment::new(s.a().with(axis, a.max(hi)), s.b().clone()) {
                out.push(part);
            }
        }
    }
    canonicalize(network.dim(), out)
}

/// Terminals moved to general position, with the per-axis maps back to the
/// original coordinates.
#[derive(Clone, Debug)]
pub struct Perturbation {
    pub terminals: Vec<Point>,
    /// Per axis: perturbed coordinate -> original coordinate.
    pub rank_maps: Vec<HashMap<Coord, Coord>>,
}

impl Perturbation {
    /// Map a network built on the perturbed terminals back to original
    /// coordinates. The map is non-decreasing on every axis, so M-paths
    /// survive; only coordinates of perturbed terminals may appear.
    pub fn restore(&self, network: &Network) -> Network {
        network.map_coords(|axis, v| *self.rank_maps[axis].get(&v).expect("coordinate of a perturbed terminal"))
    }
}

/// Break per-axis coordinate ties. Axes without ties are untouched; on axes
/// with ties each coordinate `v` becomes `v * (n + 1) + r`, where `r` ranks
/// the tied terminals by their full coordinate tuple.
pub fn perturb_general_position(terminals: &[Point]) -> Perturbation {
    let n = terminals.len();
    let dim = terminals.first().map_or(0, Point::dim);
    let mut coords: Vec<Vec<Coord>> = terminals.iter().map(|t| t.coords().to_vec()).collect();
    let mut rank_maps = Vec::with_capacity(dim);
    for axis in 0..dim {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            terminals[i].coord(axis).cmp(&terminals[j].coord(axis)).then_with(|| terminals[i].cmp(&terminals[j])).then(i.cmp(&j))
        });
        let tied = order.windows(2).any(|w| terminals[w[0]].coord(axis) == terminals[w[1]].coord(axis));
        let mut map = HashMap::new();
        if !tied {
            for t in terminals {
                map.insert(t.coord(axis), t.coord(axis));
            }
        } else {
            let scale = n as Coord + 1;
            let mut rank = 0;
            for (k, &i) in order.iter().enumerate() {
                let v = terminals[i].coord(axis);
                if k > 0 && terminals[order[k - 1]].coord(axis) == v {
                    rank += 1;
                } else {
                    rank = 0;
                }
                let nv = v * scale + rank;
                coords[i][axis] = nv;
                map.insert(nv, v);
            }
        }
        rank_maps.push(map);
    }
    Perturbation { terminals: coords.into_iter().map(Point::new).collect(), rank_maps }
}

/// Sort and deduplicate a terminal list.
pub fn dedup_terminals(terminals: &[Point]) -> Vec<Point> {
    let mut t = terminals.to_vec();
    t.sort();
    t.dedup();
    t
}
