use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::extreme_rays;
use crate::normality::is_integrally_closed;
use crate::point::LatticePoint;
use crate::polytope::{scan_box, Facet, LatticePolytope};

/// A quantum jump `P -> Q = conv(P ∪ {z})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jump {
    pub base: LatticePolytope,
    pub point: LatticePoint,
    pub target: LatticePolytope,
    /// Lattice distance of `point` from `base`.
    pub height: BigInt,
    /// `normalized_volume(target) - normalized_volume(base)`.
    pub volume: BigInt,
}

/// One way of removing a lattice point: `base = conv((Q ∩ Z^d) \ {point})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DownStep {
    pub base: LatticePolytope,
    pub point: LatticePoint,
    /// `Q` is a unimodular pyramid over `base`.
    pub pyramid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JumpStats {
    pub height_bound: u64,
    /// Largest height searched (at least `height_bound` for complete enumerations).
    pub searched_to: u64,
    /// Number of candidate points examined at heights `1..=searched_to`.
    pub candidates_per_height: Vec<usize>,
}

fn require_full(p: &LatticePolytope) -> Result<()> {
    if p.is_full_dimensional() {
        Ok(())
    } else {
        Err(Error::NotFullDimensional {
            dim: p.dim(),
            ambient: p.ambient_dim(),
        })
    }
}

/// Lattice points `z` with `min_i (<u_i, z> - b_i) = -j`.
pub fn points_at_distance(p: &LatticePolytope, j: u64) -> Result<Vec<LatticePoint>> {
    require_full(p)?;
    if j == 0 {
        return Err(Error::InvalidArgument("distance must be positive".into()));
    }
    let jb = BigInt::from(j);
    let relaxed: Vec<Facet> = p
        .facets()
        .iter()
        .map(|f| Facet {
            normal: f.normal.clone(),
            offset: &f.offset - &jb,
        })
        .collect();
    let (lo, hi) = bounding_box(&relaxed);
    let target = -jb;
    Ok(scan_box(&relaxed, &lo, &hi)
        .into_iter()
        .map(LatticePoint::new)
        .filter(|z| p.facet_distance(z) == target)
        .collect())
}

/// Integer bounding box of the bounded polyhedron `{x : <u_i, x> >= b_i}`.
fn bounding_box(facets: &[Facet]) -> (Vec<BigInt>, Vec<BigInt>) {
    let d = facets[0].normal.len();
    let mut rows: Vec<Vec<BigInt>> = facets
        .iter()
        .map(|f| {
            let mut r = f.normal.clone();
            r.push(-&f.offset);
            r
        })
        .collect();
    rows.push(LatticePoint::unit(d + 1, d).into_coords());
    let rays = extreme_rays(&rows).expect("full-dimensional polytope");
    let mut lo: Vec<Option<BigInt>> = vec![None; d];
    let mut hi: Vec<Option<BigInt>> = vec![None; d];
    for r in rays {
        let t = &r[d];
        debug_assert!(t.is_positive(), "bounded polyhedron");
        for i in 0..d {
            let a = num_integer::Integer::div_floor(&r[i], t);
            let b = num_integer::Integer::div_ceil(&r[i], t);
            if lo[i].as_ref().is_none_or(|x| &a < x) {
                lo[i] = Some(a);
            }
            if hi[i].as_ref().is_none_or(|x| &b > x) {
                hi[i] = Some(b);
            }
        }
    }
    (
        lo.into_iter().map(Option::unwrap).collect(),
        hi.into_iter().map(Option::unwrap).collect(),
    )
}

/// `1 + (d - 2) * facet_width(P)` for `d >= 2`; `1` for segments.
pub fn height_bound(p: &LatticePolytope) -> Result<u64> {
    require_full(p)?;
    let d = p.dim() as u64;
    if d == 1 {
        return Ok(1);
    }
    let w = p
        .facet_width()?
        .to_u64()
        .ok_or(Error::InvalidArgument("facet width out of range".into()))?;
    Ok(1 + (d - 2) * w)
}

fn try_jump(p: &LatticePolytope, n: usize, z: LatticePoint, height: u64) -> Option<Jump> {
    let q = p.with_point(&z).ok()?;
    if q.lattice_point_count() != n + 1 || !is_integrally_closed(&q) {
        return None;
    }
    let volume = q.normalized_volume() - p.normalized_volume();
    Some(Jump {
        base: p.clone(),
        point: z,
        target: q,
        height: BigInt::from(height),
        volume,
    })
}

/// All quantum jumps up from `P`, sorted by the new point.
pub fn enumerate_jumps_up(p: &LatticePolytope) -> Result<Vec<Jump>> {
    Ok(enumerate_jumps_up_with_stats(p)?.0)
}

pub fn enumerate_jumps_up_with_stats(p: &LatticePolytope) -> Result<(Vec<Jump>, JumpStats)> {
    let h = height_bound(p)?;
    enumerate_jumps_to_height(p, h)
}

/// Jumps of height at most `max_height`. Complete when `max_height` reaches
/// [`height_bound`].
pub fn enumerate_jumps_to_height(p: &LatticePolytope, max_height: u64) -> Result<(Vec<Jump>, JumpStats)> {
    require_full(p)?;
    if !is_integrally_closed(p) {
        return Err(Error::NotIntegrallyClosed);
    }
    let bound = height_bound(p)?;
    let n = p.lattice_point_count();
    let mut jumps = Vec::new();
    let mut per_height = Vec::new();
    for j in 1..=max_height {
        let cands = points_at_distance(p, j)?;
        per_height.push(cands.len());
        let found: Vec<Jump> = cands
            .into_par_iter()
            .filter_map(|z| try_jump(p, n, z, j))
            .collect();
        jumps.extend(found);
    }
    jumps.sort_by(|a, b| a.point.cmp(&b.point));
    Ok((
        jumps,
        JumpStats {
            height_bound: bound,
            searched_to: max_height,
            candidates_per_height: per_height,
        },
    ))
}

/// All ways of removing one lattice point from `Q` while staying integrally
/// closed, sorted by the removed point.
pub fn enumerate_jumps_down(q: &LatticePolytope) -> Result<Vec<DownStep>> {
    if !is_integrally_closed(q) {
        return Err(Error::NotIntegrallyClosed);
    }
    let pts = q.lattice_points();
    let vq = q.normalized_volume();
    let mut out = Vec::new();
    // removing a non-vertex leaves the hull unchanged
    for z in q.vertices() {
        let rest: Vec<LatticePoint> = pts.iter().filter(|x| *x != z).cloned().collect();
        if rest.is_empty() {
            continue;
        }
        let p = LatticePolytope::convex_hull(rest)?;
        if !is_integrally_closed(&p) {
            continue;
        }
        let pyramid = if p.dim() == q.dim() {
            false
        } else {
            let base_volume = if p.dim() == 0 {
                BigInt::one()
            } else {
                p.normalized_volume()
            };
            if base_volume != vq {
                continue;
            }
            true
        };
        out.push(DownStep {
            base: p,
            point: z.clone(),
            pyramid,
        });
    }
    Ok(out)
}

pub fn is_minimal(q: &LatticePolytope) -> Result<bool> {
    Ok(enumerate_jumps_down(q)?.is_empty())
}

/// Lower-dimensional polytopes are never maximal: a unimodular pyramid over
/// them adds exactly one lattice point.
pub fn is_maximal(p: &LatticePolytope) -> Result<bool> {
    if !is_integrally_closed(p) {
        return Err(Error::NotIntegrallyClosed);
    }
    if !p.is_full_dimensional() {
        return Ok(false);
    }
    Ok(enumerate_jumps_up(p)?.is_empty())
}

impl Jump {
    pub fn is_valid(&self) -> bool {
        self.target.lattice_point_count() == self.base.lattice_point_count() + 1
            && self.target.contains(&self.point)
            && !self.base.contains(&self.point)
            && self.height.is_positive()
            && self.volume.is_positive()
            && -self.base.facet_distance(&self.point) == self.height
            && self.target.normalized_volume() - self.base.normalized_volume() == self.volume
            && is_integrally_closed(&self.base)
            && is_integrally_closed(&self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[i64]) -> LatticePoint {
        LatticePoint::from_i64s(x)
    }

    #[test]
    fn strata_of_square_and_triangle() {
        let sq = LatticePolytope::unit_cube(2);
        let ring = points_at_distance(&sq, 1).unwrap();
        assert_eq!(ring.len(), 12);
        assert!(ring.iter().all(|z| z.coords().iter().all(|c| (-1..=2).contains(&c.to_i64().unwrap()))));
        let tri = LatticePolytope::unimodular_simplex(2);
        assert_eq!(points_at_distance(&tri, 1).unwrap().len(), 12);
        assert!(points_at_distance(&sq, 0).is_err());
    }

    #[test]
    fn strata_are_disjoint_on_the_cube() {
        let cube = LatticePolytope::unit_cube(3);
        let a = points_at_distance(&cube, 1).unwrap();
        let b = points_at_distance(&cube, 2).unwrap();
        assert!(a.iter().all(|z| !b.contains(z)));
        assert_eq!(a.len(), 4 * 4 * 4 - 8);
        assert_eq!(b.len(), 6 * 6 * 6 - 4 * 4 * 4);
    }

    #[test]
    fn jumps_from_triangle_and_square() {
        let tri = LatticePolytope::unimodular_simplex(2);
        let up = enumerate_jumps_up(&tri).unwrap();
        let j = up.iter().find(|j| j.point == pt(&[1, 1])).unwrap();
        assert_eq!(j.target, LatticePolytope::unit_cube(2));
        assert_eq!((j.height.clone(), j.volume.clone()), (BigInt::one(), BigInt::one()));
        let sq = LatticePolytope::unit_cube(2);
        let up = enumerate_jumps_up(&sq).unwrap();
        let j = up.iter().find(|j| j.point == pt(&[2, 0])).unwrap();
        assert_eq!(j.target.normalized_volume(), BigInt::from(3));
        assert_eq!(j.volume, BigInt::one());
        assert!(up.iter().all(Jump::is_valid));
        assert!(!is_maximal(&sq).unwrap());
    }

    #[test]
    fn segments_jump_to_longer_segments() {
        let seg = LatticePolytope::from_i64s(&[&[0], &[1]]).unwrap();
        let up = enumerate_jumps_up(&seg).unwrap();
        let pts: Vec<LatticePoint> = up.iter().map(|j| j.point.clone()).collect();
        assert_eq!(pts, vec![pt(&[-1]), pt(&[2])]);
    }

    #[test]
    fn down_steps() {
        let seg = LatticePolytope::from_i64s(&[&[0], &[1]]).unwrap();
        let down = enumerate_jumps_down(&seg).unwrap();
        assert_eq!(down.len(), 2);
        assert!(down.iter().all(|s| s.pyramid && s.base.dim() == 0));
        let tri = LatticePolytope::unimodular_simplex(2);
        let down = enumerate_jumps_down(&tri).unwrap();
        assert_eq!(down.len(), 3);
        assert!(down.iter().all(|s| s.pyramid && s.base.dim() == 1));
        assert!(!is_minimal(&tri).unwrap());
        let sq = LatticePolytope::unit_cube(2);
        let down = enumerate_jumps_down(&sq).unwrap();
        assert_eq!(down.len(), 4);
        assert!(down.iter().all(|s| !s.pyramid && s.base.normalized_volume().is_one()));
        let point = LatticePolytope::from_i64s(&[&[3, 3]]).unwrap();
        assert!(is_minimal(&point).unwrap());
    }

    #[test]
    fn long_segment_does_not_shrink_to_a_point() {
        // [0,2] loses an endpoint and stays one-dimensional
        let seg = LatticePolytope::from_i64s(&[&[0], &[2]]).unwrap();
        let down = enumerate_jumps_down(&seg).unwrap();
        assert_eq!(down.len(), 2);
        assert!(down.iter().all(|s| !s.pyramid));
    }

    #[test]
    fn non_closed_input_is_rejected() {
        let es = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).unwrap();
        assert!(matches!(enumerate_jumps_up(&es), Err(Error::NotIntegrallyClosed)));
        assert!(matches!(enumerate_jumps_down(&es), Err(Error::NotIntegrallyClosed)));
        let seg = LatticePolytope::from_i64s(&[&[0, 0], &[1, 0]]).unwrap();
        assert!(matches!(enumerate_jumps_up(&seg), Err(Error::NotFullDimensional { .. })));
        assert!(!is_maximal(&seg).unwrap());
    }

    #[test]
    fn cube_heights_respect_the_bound() {
        let cube = LatticePolytope::unit_cube(3);
        let (jumps, stats) = enumerate_jumps_up_with_stats(&cube).unwrap();
        assert_eq!(stats.height_bound, 2);
        assert!(!jumps.is_empty());
        assert!(jumps.iter().all(|j| j.height <= BigInt::from(2)));
    }
}
