//! Lattice polytopes with an exact, irredundant H-representation.
//!
//! Lower-dimensional polytopes are handled inside their affine hull: the hull
//! carries a saturated lattice basis, facets are computed in those intrinsic
//! coordinates and then lifted to ambient primitive normals, and the affine
//! hull equations are stored next to them.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{extreme_rays, pulling_triangulation, rank_of};
use crate::linalg::{hermite_basis, integer_kernel, smith_form, IntMatrix};
use crate::point::{dot, LatticePoint, RationalPoint};

/// `<normal, x> >= offset`, with a primitive inward normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
}

impl Facet {
    /// `<normal, x> - offset`: zero on the facet, positive inside.
    pub fn slack(&self, x: &[BigInt]) -> BigInt {
        dot(&self.normal, x) - &self.offset
    }
}

/// `<normal, x> = value`; one row of the affine hull description.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub normal: Vec<BigInt>,
    pub value: BigInt,
}

/// Saturated lattice coordinates on an affine subspace through a lattice point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AffineFrame {
    pub origin: LatticePoint,
    /// Rows form a basis of `L ∩ Z^d` for the linear span `L`.
    pub basis: IntMatrix,
    // Smith witnesses of `basis`: p * basis * q = [I | 0].
    p: IntMatrix,
    q: IntMatrix,
}

impl AffineFrame {
    pub fn through(points: &[LatticePoint]) -> (AffineFrame, Vec<Equation>) {
        let origin = points[0].clone();
        let d = origin.dim();
        let diffs: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| (p - &origin).into_coords())
            .collect();
        let eq_normals = integer_kernel(&IntMatrix::new(diffs, d));
        let basis = if eq_normals.nrows() == 0 {
            IntMatrix::identity(d)
        } else {
            integer_kernel(&eq_normals)
        };
        let equations = eq_normals
            .rows()
            .iter()
            .map(|a| Equation {
                value: origin.dot(a),
                normal: a.clone(),
            })
            .collect();
        (Self::with_basis(origin, basis), equations)
    }

    fn with_basis(origin: LatticePoint, basis: IntMatrix) -> AffineFrame {
        let sf = smith_form(&basis);
        debug_assert!(sf.invariant_factors().iter().all(One::is_one));
        AffineFrame {
            origin,
            basis,
            p: sf.p,
            q: sf.q,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Intrinsic coordinates of a lattice point of the affine hull.
    pub fn to_intrinsic(&self, x: &LatticePoint) -> Vec<BigInt> {
        let k = self.dim();
        let v = (x - &self.origin).into_coords();
        let t = self.q.transpose().apply(&v);
        debug_assert!(t[k..].iter().all(Zero::is_zero), "point off the affine hull");
        let head = t[..k].to_vec();
        self.p.transpose().apply(&head)
    }

    /// Intrinsic coordinates of a rational point of the affine hull.
    pub fn to_intrinsic_rational(&self, x: &RationalPoint) -> Vec<BigRational> {
        let l = x.denominator();
        let shifted = &x.scaled_to_integer(&l) - &self.origin.scale(&l);
        let k = self.dim();
        let t = self.q.transpose().apply(shifted.coords());
        self.p
            .transpose()
            .apply(&t[..k])
            .into_iter()
            .map(|v| BigRational::new(v, l.clone()))
            .collect()
    }

    pub fn to_ambient(&self, y: &[BigInt]) -> LatticePoint {
        let mut x = self.origin.coords().to_vec();
        for (yi, row) in y.iter().zip(self.basis.rows()) {
            if yi.is_zero() {
                continue;
            }
            for (xj, bj) in x.iter_mut().zip(row) {
                *xj += yi * bj;
            }
        }
        LatticePoint::new(x)
    }

    /// An ambient integer functional `u` with `<u, b_i> = w_i` on every basis row.
    pub fn extend_functional(&self, w: &[BigInt]) -> Vec<BigInt> {
        let d = self.origin.dim();
        let mut y = self.p.apply(w);
        y.resize(d, BigInt::zero());
        self.q.apply(&y)
    }

    pub fn scaled(&self, c: &BigInt) -> AffineFrame {
        AffineFrame {
            origin: self.origin.scale(c),
            basis: self.basis.clone(),
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }
}

/// A lattice polytope: vertex set plus cached H-representation.
#[derive(Clone, Debug)]
pub struct LatticePolytope {
    vertices: Vec<LatticePoint>,
    dim: usize,
    frame: AffineFrame,
    equations: Vec<Equation>,
    facets: Vec<Facet>,
    /// Facets in intrinsic coordinates, aligned with `facets`.
    inner_facets: Vec<Facet>,
    inner_vertices: Vec<Vec<BigInt>>,
    /// Vertex indices lying on each facet.
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

impl std::hash::Hash for LatticePolytope {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
    }
}

impl PartialOrd for LatticePolytope {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticePolytope {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vertices.cmp(&other.vertices)
    }
}

impl LatticePolytope {
    /// Convex hull of a nonempty set of lattice points.
    pub fn convex_hull<I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = LatticePoint>,
    {
        let pts: BTreeSet<LatticePoint> = points.into_iter().collect();
        let pts: Vec<LatticePoint> = pts.into_iter().collect();
        let first = pts.first().ok_or(Error::Empty("point set"))?;
        let d = first.dim();
        if d == 0 {
            return Err(Error::InvalidArgument("ambient dimension must be at least 1".into()));
        }
        if let Some(bad) = pts.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        let (frame, equations) = AffineFrame::through(&pts);
        let k = frame.dim();
        let inner: Vec<Vec<BigInt>> = pts.iter().map(|p| frame.to_intrinsic(p)).collect();
        if k == 0 {
            return Ok(LatticePolytope {
                vertices: pts,
                dim: 0,
                frame,
                equations,
                facets: Vec::new(),
                inner_facets: Vec::new(),
                inner_vertices: inner,
                incidence: Vec::new(),
            });
        }
        let rows: Vec<Vec<BigInt>> = inner
            .iter()
            .map(|y| {
                let mut r = y.clone();
                r.push(BigInt::one());
                r
            })
            .collect();
        let rays = extreme_rays(&rows).expect("points span their affine hull");
        let mut inner_facets: Vec<Facet> = rays
            .into_iter()
            .map(|mut r| {
                let beta = r.pop().unwrap();
                let g = crate::point::content(&r);
                let normal: Vec<BigInt> = r.iter().map(|x| x / &g).collect();
                debug_assert!(beta.is_multiple_of(&g));
                Facet {
                    normal,
                    offset: -(beta / &g),
                }
            })
            .collect();
        inner_facets.sort();

        // a point is a vertex iff the normals of its tight facets span R^k
        let normals: Vec<Vec<BigInt>> = inner_facets.iter().map(|f| f.normal.clone()).collect();
        let mut keep: Vec<(LatticePoint, Vec<BigInt>)> = Vec::new();
        for (p, y) in pts.into_iter().zip(inner) {
            let tight: Vec<usize> = (0..inner_facets.len())
                .filter(|&i| inner_facets[i].slack(&y).is_zero())
                .collect();
            if rank_of(&normals, &tight) == k {
                keep.push((p, y));
            }
        }
        let (vertices, inner_vertices): (Vec<_>, Vec<_>) = keep.into_iter().unzip();
        Ok(Self::assemble(vertices, inner_vertices, frame, equations, inner_facets))
    }

    fn assemble(
        vertices: Vec<LatticePoint>,
        inner_vertices: Vec<Vec<BigInt>>,
        frame: AffineFrame,
        equations: Vec<Equation>,
        inner_facets: Vec<Facet>,
    ) -> Self {
        let facets = inner_facets
            .iter()
            .map(|f| {
                let normal = frame.extend_functional(&f.normal);
                let offset = &f.offset + frame.origin.dot(&normal);
                Facet { normal, offset }
            })
            .collect();
        let incidence = inner_facets
            .iter()
            .map(|f| {
                (0..inner_vertices.len())
                    .filter(|&i| f.slack(&inner_vertices[i]).is_zero())
                    .collect()
            })
            .collect();
        LatticePolytope {
            dim: frame.dim(),
            vertices,
            frame,
            equations,
            facets,
            inner_facets,
            inner_vertices,
            incidence,
        }
    }

    pub fn from_i64s(points: &[&[i64]]) -> Result<Self> {
        Self::convex_hull(points.iter().map(|p| LatticePoint::from_i64s(p)))
    }

    /// The unit cube `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        let pts = (0..1u64 << d).map(|mask| {
            LatticePoint::new((0..d).map(|i| BigInt::from((mask >> i) & 1)).collect())
        });
        Self::convex_hull(pts).expect("cube")
    }

    /// The standard unimodular simplex `conv(0, e_1, ..., e_d)`.
    pub fn unimodular_simplex(d: usize) -> Self {
        let pts = std::iter::once(LatticePoint::zero(d)).chain((0..d).map(|i| LatticePoint::unit(d, i)));
        Self::convex_hull(pts).expect("simplex")
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.origin.dim()
    }

    /// Affine dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim == self.ambient_dim()
    }

    /// Vertices, sorted lexicographically.
    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Indices into `vertices()` of the vertices on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        &self.incidence[i]
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim + 1
    }

    pub(crate) fn frame(&self) -> &AffineFrame {
        &self.frame
    }

    pub fn contains(&self, x: &LatticePoint) -> bool {
        x.dim() == self.ambient_dim()
            && self.equations.iter().all(|e| x.dot(&e.normal) == e.value)
            && self.facets.iter().all(|f| !f.slack(x.coords()).is_negative())
    }

    /// Membership of `x` in the dilation `c * P`.
    pub fn contains_scaled(&self, x: &[BigInt], c: &BigInt) -> bool {
        self.equations
            .iter()
            .all(|e| dot(x, &e.normal) == &e.value * c)
            && self
                .facets
                .iter()
                .all(|f| dot(&f.normal, x) >= &f.offset * c)
    }

    pub fn contains_rational(&self, x: &RationalPoint) -> bool {
        let l = x.denominator();
        let y = x.scaled_to_integer(&l);
        self.contains_scaled(y.coords(), &l)
    }

    /// Is `x` in the affine hull?
    pub fn in_affine_hull(&self, x: &LatticePoint) -> bool {
        self.equations.iter().all(|e| x.dot(&e.normal) == e.value)
    }

    /// `min_i (<u_i, z> - b_i)` over the facets: `-j` on the stratum at lattice distance `j`.
    pub fn facet_distance(&self, z: &LatticePoint) -> BigInt {
        self.facets
            .iter()
            .map(|f| f.slack(z.coords()))
            .min()
            .unwrap_or_default()
    }

    /// `P ∩ Z^d`, sorted lexicographically.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let mut out: Vec<LatticePoint> = self
            .inner_lattice_points()
            .iter()
            .map(|y| self.frame.to_ambient(y))
            .collect();
        out.sort();
        out
    }

    pub fn lattice_point_count(&self) -> usize {
        self.inner_lattice_points().len()
    }

    /// Number of integer points in the scanned bounding box (intrinsic coordinates).
    pub fn scan_box_size(&self) -> u128 {
        let (lo, hi) = self.inner_box();
        lo.iter()
            .zip(&hi)
            .map(|(a, b)| (b - a + 1u32).to_u128().unwrap_or(u128::MAX))
            .fold(1u128, |acc, x| acc.saturating_mul(x))
    }

    fn inner_box(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let k = self.dim;
        let mut lo = self.inner_vertices[0].clone();
        let mut hi = lo.clone();
        for v in &self.inner_vertices {
            for i in 0..k {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }

    pub(crate) fn inner_lattice_points(&self) -> Vec<Vec<BigInt>> {
        if self.dim == 0 {
            return vec![Vec::new()];
        }
        let (lo, hi) = self.inner_box();
        scan_box(&self.inner_facets, &lo, &hi)
    }

    /// Triangulation by pulling vertices; simplices are sorted vertex-index sets.
    pub fn triangulation(&self) -> Vec<Vec<usize>> {
        if self.dim == 0 {
            return vec![vec![0]];
        }
        let gens: Vec<Vec<BigInt>> = self
            .inner_vertices
            .iter()
            .map(|y| {
                let mut r = y.clone();
                r.push(BigInt::one());
                r
            })
            .collect();
        pulling_triangulation(&gens, &self.incidence, self.dim + 1)
    }

    /// `dim! * vol` inside the affine hull, relative to the induced lattice.
    pub fn normalized_volume(&self) -> BigInt {
        if self.dim == 0 {
            return BigInt::zero();
        }
        self.triangulation()
            .iter()
            .map(|s| self.simplex_volume(s))
            .fold(BigInt::zero(), |a, b| a + b)
    }

    /// Normalized volume of the simplex on the given vertex indices (intrinsic lattice).
    pub(crate) fn simplex_volume(&self, s: &[usize]) -> BigInt {
        let base = &self.inner_vertices[s[0]];
        let rows: Vec<Vec<BigInt>> = s[1..]
            .iter()
            .map(|&i| {
                self.inner_vertices[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        IntMatrix::new(rows, self.dim).determinant().abs()
    }

    /// `c * P`.
    pub fn dilate(&self, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::ZeroDilation);
        }
        let c = BigInt::from(c);
        Ok(LatticePolytope {
            vertices: self.vertices.iter().map(|v| v.scale(&c)).collect(),
            dim: self.dim,
            frame: self.frame.scaled(&c),
            equations: self
                .equations
                .iter()
                .map(|e| Equation {
                    normal: e.normal.clone(),
                    value: &e.value * &c,
                })
                .collect(),
            facets: self
                .facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: &f.offset * &c,
                })
                .collect(),
            inner_facets: self
                .inner_facets
                .iter()
                .map(|f| Facet {
                    normal: f.normal.clone(),
                    offset: &f.offset * &c,
                })
                .collect(),
            inner_vertices: self
                .inner_vertices
                .iter()
                .map(|y| y.iter().map(|x| x * &c).collect())
                .collect(),
            incidence: self.incidence.clone(),
        })
    }

    /// Lattice width with respect to each facet: `max_x <u_i, x> - b_i`.
    pub fn facet_widths(&self) -> Vec<BigInt> {
        self.inner_facets
            .iter()
            .map(|f| {
                self.inner_vertices
                    .iter()
                    .map(|y| f.slack(y))
                    .max()
                    .unwrap_or_default()
            })
            .collect()
    }

    /// Maximum of the facet widths. Lower-dimensional polytopes are measured
    /// inside their affine hull.
    pub fn facet_width(&self) -> Result<BigInt> {
        self.facet_widths().into_iter().max().ok_or(Error::NoFacets)
    }

    /// Pairs of vertex indices spanning an edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let normals: Vec<Vec<BigInt>> = self.inner_facets.iter().map(|f| f.normal.clone()).collect();
        let mut out = Vec::new();
        if self.dim == 0 {
            return out;
        }
        for i in 0..n {
            for j in i + 1..n {
                let common: Vec<usize> = (0..self.incidence.len())
                    .filter(|&f| self.incidence[f].contains(&i) && self.incidence[f].contains(&j))
                    .collect();
                if rank_of(&normals, &common) == self.dim - 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Adds one point: `conv(P ∪ {z})`.
    pub fn with_point(&self, z: &LatticePoint) -> Result<Self> {
        Self::convex_hull(self.vertices.iter().cloned().chain(std::iter::once(z.clone())))
    }

    /// Deduplication key; see [`Fingerprint`].
    pub fn fingerprint(&self) -> Fingerprint {
        let mut widths = self.facet_widths();
        widths.sort();
        let ehrhart = (1..=3u64)
            .map(|c| self.dilate(c).expect("c > 0").lattice_point_count() as u64)
            .collect();
        Fingerprint {
            dim: self.dim,
            lattice_points: self.lattice_point_count() as u64,
            normalized_volume: self.normalized_volume(),
            facet_widths: widths,
            ehrhart,
        }
    }

    /// Applies the affine map `x -> M x + t`.
    pub fn transform(&self, m: &IntMatrix, t: &LatticePoint) -> Result<Self> {
        Self::convex_hull(
            self.vertices
                .iter()
                .map(|v| &LatticePoint::new(m.apply(v.coords())) + t),
        )
    }

    /// Barycenter of the vertex set.
    pub fn barycenter(&self) -> RationalPoint {
        let n = BigInt::from(self.vertices.len());
        let d = self.ambient_dim();
        RationalPoint::new(
            (0..d)
                .map(|i| {
                    let s: BigInt = self.vertices.iter().map(|v| v[i].clone()).sum();
                    BigRational::new(s, n.clone())
                })
                .collect(),
        )
    }

    pub(crate) fn ambient_to_inner(&self, x: &LatticePoint) -> Vec<BigInt> {
        self.frame.to_intrinsic(x)
    }

    /// The H-representation in the exchange schema.
    pub fn h_representation(&self) -> HRepresentation {
        HRepresentation {
            normals: self.facets.iter().map(|f| f.normal.clone()).collect(),
            offsets: self.facets.iter().map(|f| f.offset.clone()).collect(),
            equations: self
                .equations
                .iter()
                .map(|e| EquationRecord {
                    normal: e.normal.clone(),
                    offset: e.value.clone(),
                })
                .collect(),
        }
    }
}

/// Integer points of the box `[lo, hi]` satisfying every `<w, y> >= b`.
///
/// Coordinates are fixed one axis at a time; for each axis the admissible
/// range is cut down to the values for which every inequality can still be
/// met by some completion inside the box.
pub(crate) fn scan_box(facets: &[Facet], lo: &[BigInt], hi: &[BigInt]) -> Vec<Vec<BigInt>> {
    let k = lo.len();
    // rest[f][i] = max over the box of sum_{j >= i} w_j y_j
    let rest: Vec<Vec<BigInt>> = facets
        .iter()
        .map(|f| {
            let mut r = vec![BigInt::zero(); k + 1];
            for i in (0..k).rev() {
                let a = &f.normal[i] * &lo[i];
                let b = &f.normal[i] * &hi[i];
                r[i] = &r[i + 1] + a.max(b);
            }
            r
        })
        .collect();
    let mut out = Vec::new();
    let mut partial = vec![BigInt::zero(); facets.len()];
    let mut y = lo.to_vec();
    scan_axis(0, facets, lo, hi, &rest, &mut partial, &mut y, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_axis(
    i: usize,
    facets: &[Facet],
    lo: &[BigInt],
    hi: &[BigInt],
    rest: &[Vec<BigInt>],
    partial: &mut [BigInt],
    y: &mut Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    if i == lo.len() {
        out.push(y.clone());
        return;
    }
    let mut a = lo[i].clone();
    let mut b = hi[i].clone();
    for (fi, f) in facets.iter().enumerate() {
        let w = &f.normal[i];
        if w.is_zero() {
            if &partial[fi] + &rest[fi][i + 1] < f.offset {
                return;
            }
            continue;
        }
        // need w t >= need
        let need = &f.offset - &partial[fi] - &rest[fi][i + 1];
        if w.is_positive() {
            a = a.max(need.div_ceil(w));
        } else {
            b = b.min(need.div_floor(w));
        }
    }
    let mut t = a;
    while t <= b {
        for (fi, f) in facets.iter().enumerate() {
            partial[fi] += &f.normal[i] * &t;
        }
        y[i] = t.clone();
        scan_axis(i + 1, facets, lo, hi, rest, partial, y, out);
        for (fi, f) in facets.iter().enumerate() {
            partial[fi] -= &f.normal[i] * &t;
        }
        t += 1u32;
    }
}

/// Exchange form of an H-representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HRepresentation {
    #[serde(with = "crate::io::int_matrix")]
    pub normals: Vec<Vec<BigInt>>,
    #[serde(with = "crate::io::int_vec")]
    pub offsets: Vec<BigInt>,
    pub equations: Vec<EquationRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationRecord {
    #[serde(with = "crate::io::int_vec")]
    pub normal: Vec<BigInt>,
    #[serde(with = "crate::io::int_str")]
    pub offset: BigInt,
}

/// Cheap invariant used to group polytopes that might be unimodularly
/// equivalent. Equal fingerprints do not imply equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub lattice_points: u64,
    #[serde(with = "crate::io::int_str")]
    pub normalized_volume: BigInt,
    #[serde(with = "crate::io::int_vec")]
    pub facet_widths: Vec<BigInt>,
    /// `|cP ∩ Z^d|` for `c = 1, 2, 3`.
    pub ehrhart: Vec<u64>,
}

/// A subgroup `Λ ⊆ Z^d`, given by a basis, anchored at a lattice point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSublattice {
    pub origin: LatticePoint,
    /// Hermite-reduced basis rows.
    pub basis: IntMatrix,
    /// Index of `Λ` in `Z^d ∩ span(Λ)`.
    pub index: BigInt,
}

impl AffineSublattice {
    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    /// Index in `Z^d`; `None` (infinite) when `Λ` is not of full rank.
    pub fn index_in_ambient(&self) -> Option<BigInt> {
        (self.rank() == self.origin.dim()).then(|| self.basis.determinant().abs())
    }

    /// Coordinates of `x - origin` in the basis, if it lies in `Λ`.
    pub fn coordinates(&self, x: &LatticePoint) -> Option<Vec<BigInt>> {
        let v = (x - &self.origin).into_coords();
        let r = self.rank();
        if r == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        // basis is in row echelon form: solve column by column through the pivots
        let hf = crate::linalg::hermite_form(&self.basis);
        let mut rem = v;
        let mut coeffs = vec![BigInt::zero(); r];
        for (row, &col) in hf.pivots.iter().enumerate() {
            let b = self.basis.row(row);
            let (q, m) = rem[col].div_mod_floor(&b[col]);
            if !m.is_zero() {
                return None;
            }
            for (x, y) in rem.iter_mut().zip(b) {
                *x -= &q * y;
            }
            coeffs[row] = q;
        }
        rem.iter().all(Zero::is_zero).then_some(coeffs)
    }
}

/// The subgroup generated by differences of lattice points of `P`.
pub fn lambda_subgroup(p: &LatticePolytope) -> Result<AffineSublattice> {
    let pts = p.lattice_points();
    let x0 = pts.first().ok_or(Error::NoLatticePoint)?.clone();
    let d = p.ambient_dim();
    let gens: Vec<Vec<BigInt>> = pts.iter().map(|x| (x - &x0).into_coords()).collect();
    let gm = IntMatrix::new(gens, d);
    let basis = hermite_basis(&gm);
    let index = smith_form(&gm)
        .invariant_factors()
        .iter()
        .fold(BigInt::one(), |a, b| a * b);
    Ok(AffineSublattice {
        origin: x0,
        basis,
        index,
    })
}
