//! Pointed rational cones, Hilbert bases and monoid membership.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{extreme_rays, pulling_triangulation, rank_of};
use crate::linalg::{solve_rational, to_rational_rows, IntMatrix};
use crate::point::{dot, primitive, LatticePoint};
use crate::polytope::{AffineFrame, Equation, Facet, LatticePolytope};

/// A pointed cone generated by finitely many lattice vectors.
#[derive(Clone, Debug)]
pub struct RationalCone {
    /// Primitive extreme rays, sorted.
    generators: Vec<LatticePoint>,
    frame: AffineFrame,
    equations: Vec<Equation>,
    facets: Vec<Facet>,
    inner_facets: Vec<Vec<BigInt>>,
    inner_gens: Vec<Vec<BigInt>>,
    /// Set when the cone was built over a polytope at height one.
    base: Option<LatticePolytope>,
}

/// The Hilbert basis of a pointed cone, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertBasis {
    pub elements: Vec<LatticePoint>,
    /// Degrees under the cone's grading, aligned with `elements`.
    #[serde(serialize_with = "ser_degrees")]
    pub degrees: Option<Vec<BigInt>>,
}

fn ser_degrees<S: serde::Serializer>(d: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
    match d {
        Some(v) => s.collect_seq(v.iter().map(|x| x.to_string())),
        None => s.serialize_none(),
    }
}

/// Affine hyperplane `<normal, x> = height` containing the Hilbert basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneityWitness {
    pub normal: Vec<BigInt>,
    pub height: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidMembership {
    pub member: bool,
    /// Coefficients aligned with the input generators.
    pub certificate: Option<Vec<BigInt>>,
    /// Degree of `z` under `grading`; bounds every coefficient sum.
    pub degree_bound: BigInt,
    pub grading: Vec<BigInt>,
}

impl RationalCone {
    /// Cone generated by `gens`. Zero vectors are ignored.
    pub fn new(gens: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        let gens: Vec<LatticePoint> = gens.into_iter().collect();
        let d = gens.first().ok_or(Error::Empty("generator set"))?.dim();
        if let Some(bad) = gens.iter().find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        let prim: BTreeSet<LatticePoint> = gens
            .into_iter()
            .filter(|g| !g.is_zero())
            .map(|g| LatticePoint::new(primitive(g.into_coords())))
            .collect();
        if prim.is_empty() {
            return Err(Error::Empty("nonzero generators"));
        }
        let mut pts = vec![LatticePoint::zero(d)];
        pts.extend(prim.iter().cloned());
        let (frame, equations) = AffineFrame::through(&pts);
        let k = frame.dim();
        let inner: Vec<Vec<BigInt>> = prim.iter().map(|g| frame.to_intrinsic(g)).collect();
        let normals = extreme_rays(&inner).ok_or(Error::NotPointed)?;
        if rank_of(&normals, &(0..normals.len()).collect::<Vec<_>>()) < k {
            return Err(Error::NotPointed);
        }
        let mut generators = Vec::new();
        let mut inner_gens = Vec::new();
        for (g, y) in prim.into_iter().zip(inner) {
            let tight: Vec<usize> = (0..normals.len())
                .filter(|&i| dot(&normals[i], &y).is_zero())
                .collect();
            if rank_of(&normals, &tight) == k - 1 {
                generators.push(g);
                inner_gens.push(y);
            }
        }
        let facets = normals
            .iter()
            .map(|w| Facet {
                normal: frame.extend_functional(w),
                offset: BigInt::zero(),
            })
            .collect();
        Ok(RationalCone {
            generators,
            frame,
            equations,
            facets,
            inner_facets: normals,
            inner_gens,
            base: None,
        })
    }

    /// `R_{>=0} (P, 1)`.
    pub fn over(p: &LatticePolytope) -> Self {
        let mut c = Self::new(p.vertices().iter().map(|v| v.lift(BigInt::one())))
            .expect("cone over a polytope is pointed");
        c.base = Some(p.clone());
        c
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.origin.dim()
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    /// Primitive extreme rays, sorted.
    pub fn generators(&self) -> &[LatticePoint] {
        &self.generators
    }

    /// Inward facet normals (`<u, x> >= 0`), primitive on the linear span.
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn is_pointed(&self) -> bool {
        true
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.dim() == self.ambient_dim()
            && self.equations.iter().all(|e| x.dot(&e.normal).is_zero())
            && self.facets.iter().all(|f| !x.dot(&f.normal).is_negative())
    }

    /// An integral functional positive on every nonzero element of the cone.
    /// For cones over polytopes this is the last coordinate.
    pub fn grading(&self) -> Vec<BigInt> {
        if self.base.is_some() {
            return LatticePoint::unit(self.ambient_dim(), self.ambient_dim() - 1).into_coords();
        }
        let k = self.dim();
        let mut w = vec![BigInt::zero(); k];
        for f in &self.inner_facets {
            for (a, b) in w.iter_mut().zip(f) {
                *a += b;
            }
        }
        primitive(self.frame.extend_functional(&w))
    }

    pub fn hilbert_basis(&self) -> HilbertBasis {
        match &self.base {
            Some(p) => self.graded_hilbert_basis(p),
            None => self.triangulated_hilbert_basis(),
        }
    }

    fn degrees_of(&self, elems: &[LatticePoint]) -> Vec<BigInt> {
        let w = self.grading();
        elems.iter().map(|e| e.dot(&w)).collect()
    }

    /// Degree-by-degree search for cones over polytopes, up to degree `max(1, dim P - 1)`.
    fn graded_hilbert_basis(&self, p: &LatticePolytope) -> HilbertBasis {
        let top = p.dim().saturating_sub(1).max(1) as u64;
        let mut found: Vec<(u64, LatticePoint)> = p
            .lattice_points()
            .into_iter()
            .map(|z| (1, z.lift(BigInt::one())))
            .collect();
        for c in 2..=top {
            let cp = p.dilate(c).expect("c > 0");
            let lower = &found;
            let fresh: Vec<(u64, LatticePoint)> = cp
                .lattice_points()
                .into_par_iter()
                .filter_map(|z| {
                    let reducible = lower.iter().any(|(hc, h)| {
                        let rest = &z - &h.drop_last();
                        p.contains_scaled(rest.coords(), &BigInt::from(c - hc))
                    });
                    (!reducible).then(|| (c, z.lift(BigInt::from(c))))
                })
                .collect();
            found.extend(fresh);
        }
        let mut elements: Vec<LatticePoint> = found.into_iter().map(|(_, z)| z).collect();
        elements.sort();
        let degrees = Some(self.degrees_of(&elements));
        HilbertBasis { elements, degrees }
    }

    /// Simplicial subdivision, fundamental parallelepipeds, then a global
    /// irreducibility filter.
    pub fn triangulated_hilbert_basis(&self) -> HilbertBasis {
        let k = self.dim();
        let incidence: Vec<Vec<usize>> = self
            .inner_facets
            .iter()
            .map(|f| {
                (0..self.inner_gens.len())
                    .filter(|&i| dot(f, &self.inner_gens[i]).is_zero())
                    .collect()
            })
            .collect();
        let simplices = if k == 1 {
            vec![vec![0]]
        } else {
            pulling_triangulation(&self.inner_gens, &incidence, k)
        };
        let mut cands: BTreeSet<Vec<BigInt>> = self.inner_gens.iter().cloned().collect();
        for s in &simplices {
            let g: Vec<Vec<BigInt>> = s.iter().map(|&i| self.inner_gens[i].clone()).collect();
            cands.extend(parallelepiped_points(&g));
        }
        let cands: Vec<Vec<BigInt>> = cands.into_iter().collect();
        let inside = |x: &[BigInt]| self.inner_facets.iter().all(|f| !dot(f, x).is_negative());
        let irreducible: Vec<Vec<BigInt>> = cands
            .par_iter()
            .filter(|x| {
                !cands.iter().any(|y| {
                    if y == *x {
                        return false;
                    }
                    let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                    inside(&diff)
                })
            })
            .cloned()
            .collect();
        let mut elements: Vec<LatticePoint> = irreducible
            .iter()
            .map(|y| self.frame.to_ambient(y))
            .collect();
        elements.sort();
        let degrees = Some(self.degrees_of(&elements));
        HilbertBasis { elements, degrees }
    }

    /// Returns a hyperplane off the origin containing the Hilbert basis, if any.
    pub fn is_homogeneous(&self) -> Option<HomogeneityWitness> {
        homogeneity_witness(&self.hilbert_basis().elements)
    }

    /// `Hilb(C) ⊂ R^{d-1} x [0, h]`: every basis element has last coordinate in `[0, h]`.
    pub fn in_height_filtration(&self, h: &BigInt) -> bool {
        let d = self.ambient_dim();
        self.hilbert_basis()
            .elements
            .iter()
            .all(|x| !x[d - 1].is_negative() && &x[d - 1] <= h)
    }

    /// Is `other ⊆ self`?
    pub fn contains_cone(&self, other: &RationalCone) -> bool {
        other.generators.iter().all(|g| self.contains(g))
    }
}

/// Nonzero lattice points of the half-open parallelepiped spanned by the rows
/// of `g` (a basis of `Q^k`).
fn parallelepiped_points(g: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let k = g.len();
    let gt = to_rational_rows(&IntMatrix::from_rows(g.to_vec()).transpose().into_rows());
    // coordinates of e_j in the basis g: solve g^T lambda = e_j
    let steps: Vec<Vec<BigRational>> = (0..k)
        .map(|j| {
            let mut e = vec![BigRational::zero(); k];
            e[j] = BigRational::one();
            solve_rational(&gt, &e).expect("simplicial cone has independent generators")
        })
        .collect();
    let frac = |x: &BigRational| x - x.floor();
    let zero: Vec<BigRational> = vec![BigRational::zero(); k];
    let mut seen: HashSet<Vec<BigRational>> = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(lam) = queue.pop_front() {
        for s in &steps {
            let next: Vec<BigRational> = lam.iter().zip(s).map(|(a, b)| frac(&(a + b))).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter()
        .filter(|lam| lam.iter().any(|x| !x.is_zero()))
        .map(|lam| {
            (0..k)
                .map(|c| {
                    let s: BigRational = lam
                        .iter()
                        .zip(g)
                        .map(|(l, row)| l * BigRational::from_integer(row[c].clone()))
                        .fold(BigRational::zero(), |a, b| a + b);
                    debug_assert!(s.is_integer());
                    s.to_integer()
                })
                .collect()
        })
        .collect()
}

/// `<w, h> = c` with `c > 0` for all `h`, if such a hyperplane exists.
pub fn homogeneity_witness(elems: &[LatticePoint]) -> Option<HomogeneityWitness> {
    let d = elems.first()?.dim();
    let rows: Vec<Vec<BigInt>> = elems
        .iter()
        .map(|h| {
            let mut r = h.coords().to_vec();
            r.push(-BigInt::one());
            r
        })
        .collect();
    let ker = crate::linalg::integer_kernel(&IntMatrix::new(rows, d + 1));
    let v = ker.rows().iter().find(|r| !r[d].is_zero())?;
    let mut v = primitive(v.clone());
    if v[d].is_negative() {
        v.iter_mut().for_each(|x| *x = -&*x);
    }
    let height = v.pop().unwrap();
    Some(HomogeneityWitness { normal: v, height })
}

/// Decides whether `z` is a nonnegative integer combination of `gens`.
///
/// Fails with `NoPositiveGrading` when the generators do not lie in an open
/// halfspace (the search would be unbounded).
pub fn monoid_member(z: &LatticePoint, gens: &[LatticePoint]) -> Result<MonoidMembership> {
    let d = z.dim();
    if let Some(bad) = gens.iter().find(|g| g.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.dim(),
        });
    }
    let live: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].is_zero()).collect();
    if live.is_empty() {
        let member = z.is_zero();
        return Ok(MonoidMembership {
            member,
            certificate: member.then(|| vec![BigInt::zero(); gens.len()]),
            degree_bound: BigInt::zero(),
            grading: vec![BigInt::zero(); d],
        });
    }
    let cone = match RationalCone::new(live.iter().map(|&i| gens[i].clone())) {
        Ok(c) => c,
        Err(Error::NotPointed) => return Err(Error::NoPositiveGrading),
        Err(e) => return Err(e),
    };
    let w = cone.grading();
    let degree_bound = z.dot(&w);
    let miss = MonoidMembership {
        member: false,
        certificate: None,
        degree_bound: degree_bound.clone(),
        grading: w.clone(),
    };
    if !cone.contains(z) {
        return Ok(miss);
    }
    let degs: Vec<BigInt> = live.iter().map(|&i| gens[i].dot(&w)).collect();
    let mut coeffs = vec![BigInt::zero(); live.len()];
    let mut failed = HashSet::new();
    let found = member_dfs(
        0,
        z.clone(),
        &live.iter().map(|&i| gens[i].clone()).collect::<Vec<_>>(),
        &degs,
        &w,
        &cone,
        &mut coeffs,
        &mut failed,
    );
    if !found {
        return Ok(miss);
    }
    let mut certificate = vec![BigInt::zero(); gens.len()];
    for (slot, &i) in live.iter().enumerate() {
        certificate[i] = coeffs[slot].clone();
    }
    Ok(MonoidMembership {
        member: true,
        certificate: Some(certificate),
        degree_bound,
        grading: w,
    })
}

#[allow(clippy::too_many_arguments)]
fn member_dfs(
    i: usize,
    rest: LatticePoint,
    gens: &[LatticePoint],
    degs: &[BigInt],
    w: &[BigInt],
    cone: &RationalCone,
    coeffs: &mut [BigInt],
    failed: &mut HashSet<(usize, LatticePoint)>,
) -> bool {
    if rest.is_zero() {
        coeffs[i..].iter_mut().for_each(|c| *c = BigInt::zero());
        return true;
    }
    if i == gens.len() || failed.contains(&(i, rest.clone())) {
        return false;
    }
    let max = rest.dot(w).div_floor(&degs[i]);
    let mut k = max;
    while !k.is_negative() {
        let next = &rest - &gens[i].scale(&k);
        if cone.contains(&next) {
            coeffs[i] = k.clone();
            if member_dfs(i + 1, next, gens, degs, w, cone, coeffs, failed) {
                return true;
            }
        }
        k -= 1;
    }
    failed.insert((i, rest));
    false
}

/// Single extension step: is `C ∩ Z^d = (D ∩ Z^d) + Z_{>=0} x`?
pub fn is_cone_extension(d: &RationalCone, c: &RationalCone, x: &LatticePoint) -> Result<bool> {
    if !c.contains_cone(d) {
        return Err(Error::NotContained("D is not contained in C"));
    }
    if !c.contains(x) {
        return Err(Error::NotContained("x is not in C"));
    }
    if d.contains(x) {
        return Err(Error::InvalidArgument("x already lies in D".into()));
    }
    let w = c.grading();
    let wx = x.dot(&w);
    Ok(c.hilbert_basis().elements.iter().all(|h| {
        let kmax = h.dot(&w).div_floor(&wx);
        let mut k = BigInt::zero();
        while k <= kmax {
            if d.contains(&(h - &x.scale(&k))) {
                return true;
            }
            k += 1;
        }
        false
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[i64]) -> LatticePoint {
        LatticePoint::from_i64s(x)
    }

    fn cone(gens: &[&[i64]]) -> RationalCone {
        RationalCone::new(gens.iter().map(|g| pt(g))).unwrap()
    }

    #[test]
    fn two_dimensional_examples() {
        let c = cone(&[&[1, 0], &[1, 2]]);
        assert_eq!(c.hilbert_basis().elements, vec![pt(&[1, 0]), pt(&[1, 1]), pt(&[1, 2])]);
        let c3 = cone(&[&[1, 0], &[1, 3]]);
        assert_eq!(c3.hilbert_basis().elements.len(), 4);
        let w = c3.is_homogeneous().unwrap();
        assert_eq!((w.normal, w.height), (vec![BigInt::one(), BigInt::zero()], BigInt::one()));
    }

    #[test]
    fn homogeneity() {
        let c = cone(&[&[0, 1], &[2, 1]]);
        assert_eq!(c.hilbert_basis().elements, vec![pt(&[0, 1]), pt(&[1, 1]), pt(&[2, 1])]);
        assert_eq!(c.is_homogeneous().unwrap().height, BigInt::one());
        let quad = cone(&[&[1, 0], &[1, 2], &[0, 1]]);
        assert_eq!(quad.generators(), &[pt(&[0, 1]), pt(&[1, 0])]);
        let skew = cone(&[&[2, 1], &[1, 3]]);
        assert_eq!(
            skew.hilbert_basis().elements,
            vec![pt(&[1, 1]), pt(&[1, 2]), pt(&[1, 3]), pt(&[2, 1])]
        );
        assert!(skew.is_homogeneous().is_none());
    }

    #[test]
    fn cone_over_square() {
        let c = RationalCone::over(&LatticePolytope::unit_cube(2));
        assert_eq!(c.generators().len(), 4);
        let hb = c.hilbert_basis();
        assert_eq!(hb.elements.len(), 4);
        assert!(hb.degrees.unwrap().iter().all(One::is_one));
        assert_eq!(c.triangulated_hilbert_basis().elements, hb.elements);
    }

    #[test]
    fn cone_over_point_is_a_ray() {
        let p = LatticePolytope::from_i64s(&[&[0, 0]]).unwrap();
        let c = RationalCone::over(&p);
        assert_eq!(c.dim(), 1);
        assert_eq!(c.hilbert_basis().elements, vec![pt(&[0, 0, 1])]);
    }

    #[test]
    fn empty_simplex_cone_has_degree_two_element() {
        let p = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).unwrap();
        let c = RationalCone::over(&p);
        assert_eq!(c.generators().len(), 4);
        let hb = c.hilbert_basis();
        assert!(hb.elements.contains(&pt(&[1, 1, 1, 2])));
        assert_eq!(c.triangulated_hilbert_basis().elements, hb.elements);
        assert!(c.is_homogeneous().is_none());
    }

    #[test]
    fn lines_are_rejected() {
        assert!(matches!(
            RationalCone::new(vec![pt(&[1, 0]), pt(&[-1, 0])]),
            Err(Error::NotPointed)
        ));
    }

    #[test]
    fn membership() {
        let m = monoid_member(&pt(&[2, 2]), &[pt(&[1, 1])]).unwrap();
        assert!(m.member);
        assert_eq!(m.certificate, Some(vec![BigInt::from(2)]));
        assert!(!monoid_member(&pt(&[1, 1]), &[pt(&[1, 0]), pt(&[0, 2])]).unwrap().member);
        let gens = [pt(&[1, 1]), pt(&[1, 2]), pt(&[0, 1])];
        let m = monoid_member(&pt(&[3, 4]), &gens).unwrap();
        assert!(m.member);
        let cert = m.certificate.unwrap();
        let sum = gens
            .iter()
            .zip(&cert)
            .fold(LatticePoint::zero(2), |acc, (g, k)| &acc + &g.scale(k));
        assert_eq!(sum, pt(&[3, 4]));
        assert!(matches!(
            monoid_member(&pt(&[0, 0]), &[pt(&[1, 0]), pt(&[-1, 0])]),
            Err(Error::NoPositiveGrading)
        ));
    }

    #[test]
    fn extensions() {
        let ray = cone(&[&[1, 0]]);
        let quad = cone(&[&[1, 0], &[0, 1]]);
        assert!(is_cone_extension(&ray, &quad, &pt(&[0, 1])).unwrap());
        let d = cone(&[&[1, 0], &[1, 1]]);
        let c = cone(&[&[1, 0], &[1, 2]]);
        assert!(is_cone_extension(&d, &c, &pt(&[1, 2])).unwrap());
        assert!(!is_cone_extension(&ray, &c, &pt(&[1, 2])).unwrap());
        assert!(is_cone_extension(&c, &d, &pt(&[1, 2])).is_err());
        assert!(is_cone_extension(&d, &c, &pt(&[1, 1])).is_err());
    }

    #[test]
    fn height_filtration() {
        let p = LatticePolytope::from_i64s(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).unwrap();
        let c = RationalCone::over(&p);
        assert!(!c.in_height_filtration(&BigInt::one()));
        assert!(c.in_height_filtration(&BigInt::from(2)));
    }
}
