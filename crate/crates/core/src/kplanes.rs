//! Terminals on `k` horizontal planes.
//!
//! Phase I copies one planar network `N_xy` of the projected terminals onto
//! every plane. Phase II erects vertical pillars, per directional class: the
//! planes are split where the red/blue piercing instance (red = planes up to
//! `i`, blue = planes above `i`) has the smallest piercing, pillars through
//! the whole current range are placed at the relocated piercing points, and
//! both sides are handled recursively.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{canonicalize, Coord, DirectionClass, Network, Point, Reflection, Segment};
use crate::mmn2d::{approx_mmn2d, lift};
use crate::piercing::{min_piercing, relocate_piercing, PiercingInstance, P2};

/// Terminals grouped by their z-coordinate.
#[derive(Clone, Debug)]
pub struct PlanarLayering {
    /// Plane heights, increasing.
    pub z: Vec<Coord>,
    /// Projected terminals of each plane.
    pub groups: Vec<Vec<P2>>,
}

impl PlanarLayering {
    /// Group 3D terminals by exact z. Fails when more than `max_planes`
    /// planes are found.
    pub fn new(terminals: &[Point], max_planes: Option<usize>) -> Result<Self> {
        if terminals.is_empty() {
            return Err(Error::EmptyInput("terminal set"));
        }
        let mut by_z: BTreeMap<Coord, BTreeSet<P2>> = BTreeMap::new();
        for t in terminals {
            if t.dim() != 3 {
                return Err(Error::DimensionMismatch { expected: 3, found: t.dim() });
            }
            by_z.entry(t.coord(2)).or_default().insert([t.coord(0), t.coord(1)]);
        }
        if let Some(cap) = max_planes {
            if by_z.len() > cap {
                return Err(Error::InvalidParameter(format!(
                    "terminals lie on {} planes, more than the allowed {cap}",
                    by_z.len()
                )));
            }
        }
        Ok(PlanarLayering {
            z: by_z.keys().copied().collect(),
            groups: by_z.into_values().map(|g| g.into_iter().collect()).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.z.len()
    }

    /// Distinct projections of all terminals.
    pub fn projection(&self) -> Vec<Point> {
        let set: BTreeSet<P2> = self.groups.iter().flatten().copied().collect();
        set.into_iter().map(|p| Point::new(p.to_vec())).collect()
    }

    pub fn terminals(&self) -> Vec<Point> {
        self.groups
            .iter()
            .zip(&self.z)
            .flat_map(|(g, &z)| g.iter().map(move |p| Point::new(vec![p[0], p[1], z])))
            .collect()
    }
}

/// Pillars placed by one step of the plane splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PillarLevel {
    /// Plane range `s..=t` spanned by the pillars of this step.
    pub s: usize,
    pub t: usize,
    pub i_star: usize,
    pub points: Vec<P2>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PillarSet {
    pub levels: Vec<PillarLevel>,
}

impl PillarSet {
    pub fn pillar_count(&self) -> usize {
        self.levels.iter().map(|l| l.points.len()).sum()
    }

    pub fn to_network(&self, z: &[Coord]) -> Network {
        canonicalize(
            3,
            self.levels.iter().flat_map(|l| {
                l.points.iter().filter_map(move |p| {
                    Segment::new(Point::new(vec![p[0], p[1], z[l.s]]), Point::new(vec![p[0], p[1], z[l.t]])).ok()
                })
            }),
        )
    }

    fn reflect(&mut self, r: &Reflection) {
        for l in &mut self.levels {
            for p in &mut l.points {
                *p = reflect2(*p, r);
            }
        }
    }
}

fn reflect2(p: P2, r: &Reflection) -> P2 {
    let f = |a: usize| if r.negate[a] { -p[a] } else { p[a] };
    [f(0), f(1)]
}

/// Phase I: `N_xy` copied onto every plane.
pub fn phase1_horizontal(layering: &PlanarLayering) -> Result<Network> {
    let nxy = approx_mmn2d(&layering.projection())?;
    Ok(copy_to_planes(&nxy, &layering.z))
}

fn copy_to_planes(nxy: &Network, z: &[Coord]) -> Network {
    let copies: Vec<Network> = z.iter().map(|&h| lift(nxy, h)).collect();
    Network::union_all(3, copies.iter())
}

fn class_reflection(dir: &DirectionClass) -> Result<Reflection> {
    if dir.fixed_axis != 2 || dir.signs.len() != 2 {
        return Err(Error::InvalidParameter(format!("{dir:?} is not a class of 3D pairs with fixed z")));
    }
    Ok(Reflection { negate: dir.signs.iter().map(|&s| !s).collect() })
}

/// Pillar points for two planes in class `dir`.
pub fn pillars_two_planes(t1: &[P2], t2: &[P2], nxy: &Network, dir: &DirectionClass) -> Result<Vec<P2>> {
    let set = pillars_k_planes(&[t1.to_vec(), t2.to_vec()], nxy, dir)?;
    Ok(set.levels.into_iter().flat_map(|l| l.points).collect())
}

/// Pillars for planes `0..groups.len()` in class `dir`. `nxy` must
/// M-connect every relevant projected pair of the class.
pub fn pillars_k_planes(groups: &[Vec<P2>], nxy: &Network, dir: &DirectionClass) -> Result<PillarSet> {
    let r = class_reflection(dir)?;
    let groups: Vec<Vec<P2>> = groups.iter().map(|g| g.iter().map(|&p| reflect2(p, &r)).collect()).collect();
    let net = nxy.reflect(&r);
    let mut set = PillarSet::default();
    if !groups.is_empty() {
        split_planes(&groups, 0, groups.len() - 1, &net, &mut set)?;
    }
    set.reflect(&r);
    Ok(set)
}

fn colored(groups: &[Vec<P2>], s: usize, i: usize, t: usize) -> PiercingInstance {
    let collect = |range: std::ops::RangeInclusive<usize>| -> Vec<P2> {
        let set: BTreeSet<P2> = groups[range].iter().flatten().copied().collect();
        set.into_iter().collect()
    };
    PiercingInstance::new(collect(s..=i), collect(i + 1..=t))
}

fn split_planes(groups: &[Vec<P2>], s: usize, t: usize, nxy: &Network, out: &mut PillarSet) -> Result<()> {
    if s >= t {
        return Ok(());
    }
    let mut best: Option<(usize, PiercingInstance, Vec<P2>)> = None;
    for i in s..t {
        let inst = colored(groups, s, i, t);
        let p = min_piercing(&inst)?;
        if best.as_ref().is_none_or(|b| p.len() < b.2.len()) {
            best = Some((i, inst, p));
        }
    }
    let (i_star, inst, p) = best.unwrap();
    let points = relocate_piercing(&p, nxy, &inst)?;
    out.levels.push(PillarLevel { s, t, i_star, points });
    split_planes(groups, s, i_star, nxy, out)?;
    split_planes(groups, i_star + 1, t, nxy, out)
}

/// Pillars of one directional class.
#[derive(Clone, Debug)]
pub struct ClassPillars {
    pub class: DirectionClass,
    pub pillars: PillarSet,
    pub network: Network,
}

#[derive(Clone, Debug)]
pub struct KPlanesSolution {
    pub network: Network,
    pub nxy: Network,
    pub horizontal: Network,
    pub classes: Vec<ClassPillars>,
}

/// Phase I plus the pillars of all four classes.
pub fn solve_kplanes(layering: &PlanarLayering) -> Result<KPlanesSolution> {
    let nxy = approx_mmn2d(&layering.projection())?;
    let horizontal = copy_to_planes(&nxy, &layering.z);
    let classes: Vec<ClassPillars> = DirectionClass::all(3, 2)
        .into_par_iter()
        .map(|class| {
            let pillars = pillars_k_planes(&layering.groups, &nxy, &class)?;
            let network = pillars.to_network(&layering.z);
            Ok(ClassPillars { class, pillars, network })
        })
        .collect::<Result<_>>()?;
    let network = Network::union_all(3, std::iter::once(&horizontal).chain(classes.iter().map(|c| &c.network)));
    Ok(KPlanesSolution { network, nxy, horizontal, classes })
}
