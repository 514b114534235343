//! Integral closure, normality, unimodularity, smoothness, cover and
//! Carathéodory checks.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::linalg::{solve_rational, IntMatrix};
use crate::point::{primitive, LatticePoint, RationalPoint};
use crate::polytope::{lambda_subgroup, LatticePolytope};

/// A lattice point `z` of `cP` together with `c`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub c: u64,
    pub z: LatticePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalityReport {
    pub integrally_closed: bool,
    pub normal_wrt_lambda: bool,
    /// Least `(c, z)` with no decomposition into `c` lattice points of `P`.
    pub integrally_closed_witness: Option<Witness>,
    /// Same, in the coordinates of the lattice `Λ`.
    pub normal_witness: Option<Witness>,
}

/// Both parts of the report.
pub fn check(p: &LatticePolytope) -> NormalityReport {
    let ic = integral_closure_witness(p);
    let nw = normal_witness(p);
    NormalityReport {
        integrally_closed: ic.is_none(),
        normal_wrt_lambda: nw.is_none(),
        integrally_closed_witness: ic,
        normal_witness: nw,
    }
}

pub fn is_integrally_closed(p: &LatticePolytope) -> bool {
    integral_closure_witness(p).is_none()
}

pub fn is_normal(p: &LatticePolytope) -> bool {
    normal_witness(p).is_none()
}

/// Degrees checked by the decomposition test: `2..=max(2, dim - 1)`.
fn degree_range(p: &LatticePolytope) -> std::ops::RangeInclusive<u64> {
    2..=(p.dim().saturating_sub(1).max(2) as u64)
}

/// Decomposes lattice points of `cP` into sums of lattice points of `P`,
/// memoized on `(c, z)`.
pub(crate) struct Decomposer<'a> {
    p: &'a LatticePolytope,
    points: Vec<LatticePoint>,
    point_set: HashSet<LatticePoint>,
    memo: HashMap<(u64, LatticePoint), bool>,
}

impl<'a> Decomposer<'a> {
    pub fn new(p: &'a LatticePolytope) -> Self {
        let points = p.lattice_points();
        let point_set = points.iter().cloned().collect();
        Decomposer {
            p,
            points,
            point_set,
            memo: HashMap::new(),
        }
    }

    /// `z` is assumed to lie in `cP`.
    pub fn decomposes(&mut self, c: u64, z: &LatticePoint) -> bool {
        if c == 1 {
            return self.point_set.contains(z);
        }
        if c == 2 {
            return self.points.iter().any(|x| self.point_set.contains(&(z - x)));
        }
        if let Some(&v) = self.memo.get(&(c, z.clone())) {
            return v;
        }
        let cm1 = BigInt::from(c - 1);
        let mut ok = false;
        for i in 0..self.points.len() {
            let rest = z - &self.points[i];
            if self.p.contains_scaled(rest.coords(), &cm1) && self.decomposes(c - 1, &rest) {
                ok = true;
                break;
            }
        }
        self.memo.insert((c, z.clone()), ok);
        ok
    }

    /// Sum of `c` lattice points of `P` equal to `z`, if one exists.
    pub fn decomposition(&mut self, c: u64, z: &LatticePoint) -> Option<Vec<LatticePoint>> {
        if c == 1 {
            return self.point_set.contains(z).then(|| vec![z.clone()]);
        }
        let cm1 = BigInt::from(c - 1);
        for i in 0..self.points.len() {
            let x = self.points[i].clone();
            let rest = z - &x;
            if self.p.contains_scaled(rest.coords(), &cm1) && self.decomposes(c - 1, &rest) {
                let mut out = self.decomposition(c - 1, &rest)?;
                out.push(x);
                return Some(out);
            }
        }
        None
    }
}

/// `c` lattice points of `P` summing to `z`, if `z ∈ cP` admits such a decomposition.
pub fn decompose(p: &LatticePolytope, c: u64, z: &LatticePoint) -> Option<Vec<LatticePoint>> {
    if c == 0 || !p.contains_scaled(z.coords(), &BigInt::from(c)) {
        return None;
    }
    Decomposer::new(p).decomposition(c, z)
}

/// Least failing `(c, z)` in the checked degree range, or `None` if `P` is integrally closed.
pub fn integral_closure_witness(p: &LatticePolytope) -> Option<Witness> {
    let mut dec = Decomposer::new(p);
    for c in degree_range(p) {
        let cp = p.dilate(c).expect("c > 0");
        for z in cp.lattice_points() {
            if !dec.decomposes(c, &z) {
                return Some(Witness { c, z });
            }
        }
    }
    None
}

/// `P` in the affine coordinates of `Λ`: lattice points of `P` are mapped to
/// their coordinates relative to a basis of `Λ`.
pub fn lambda_coordinates(p: &LatticePolytope) -> LatticePolytope {
    let lam = lambda_subgroup(p).expect("lattice polytopes have lattice points");
    if lam.rank() == 0 {
        return LatticePolytope::convex_hull(vec![LatticePoint::zero(1)]).expect("point");
    }
    LatticePolytope::convex_hull(
        p.vertices()
            .iter()
            .map(|v| LatticePoint::new(lam.coordinates(v).expect("vertices lie in Λ"))),
    )
    .expect("nonempty")
}

/// Least failing `(c, z)` relative to `Λ`, reported in `Λ`-coordinates.
pub fn normal_witness(p: &LatticePolytope) -> Option<Witness> {
    integral_closure_witness(&lambda_coordinates(p))
}

pub fn is_unimodular_simplex(p: &LatticePolytope) -> bool {
    p.is_simplex() && (p.dim() == 0 || p.normalized_volume().is_one())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothnessVerdict {
    pub smooth: bool,
    /// First vertex (lexicographically) that is not simple or whose primitive
    /// edge directions do not form a lattice basis.
    pub offending_vertex: Option<LatticePoint>,
}

pub fn is_smooth(p: &LatticePolytope) -> Result<SmoothnessVerdict> {
    if !p.is_full_dimensional() {
        return Err(Error::NotFullDimensional {
            dim: p.dim(),
            ambient: p.ambient_dim(),
        });
    }
    let d = p.dim();
    let verts = p.vertices();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (i, j) in p.edges() {
        nbrs[i].push(j);
        nbrs[j].push(i);
    }
    for (i, v) in verts.iter().enumerate() {
        let ok = nbrs[i].len() == d && {
            let rows: Vec<Vec<BigInt>> = nbrs[i]
                .iter()
                .map(|&j| primitive((&verts[j] - v).into_coords()))
                .collect();
            IntMatrix::new(rows, d).determinant().abs().is_one()
        };
        if !ok {
            return Ok(SmoothnessVerdict {
                smooth: false,
                offending_vertex: Some(v.clone()),
            });
        }
    }
    Ok(SmoothnessVerdict {
        smooth: true,
        offending_vertex: None,
    })
}

/// Cap on the number of vertex subsets examined when listing unimodular simplices.
pub const UCP_SUBSET_CAP: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UcpOutcome {
    /// A point of `P` covered by no unimodular simplex in `P`.
    pub counterexample: Option<RationalPoint>,
    pub samples_tested: u64,
    pub unimodular_simplices: usize,
}

/// Full-dimensional unimodular simplices with vertices in `P ∩ Z^d`, as
/// intrinsic vertex lists.
fn unimodular_simplices(p: &LatticePolytope) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let k = p.dim();
    let pts: Vec<Vec<BigInt>> = p
        .lattice_points()
        .iter()
        .map(|x| p.ambient_to_inner(x))
        .collect();
    let n = pts.len();
    let subsets = binomial(n as u128, k as u128 + 1);
    if subsets > UCP_SUBSET_CAP {
        return Err(Error::CapExceeded {
            what: "unimodular simplex subsets",
            size: subsets,
            cap: UCP_SUBSET_CAP,
        });
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..=k).collect();
    if n < k + 1 {
        return Ok(out);
    }
    loop {
        let base = &pts[idx[0]];
        let rows: Vec<Vec<BigInt>> = idx[1..]
            .iter()
            .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        if k == 0 || IntMatrix::new(rows, k).determinant().abs().is_one() {
            out.push(idx.iter().map(|&i| pts[i].clone()).collect());
        }
        // next combination
        let mut i = k + 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < n - (k + 1 - i) {
                idx[i] += 1;
                for j in i + 1..=k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn in_simplex(verts: &[Vec<BigInt>], y: &[BigRational]) -> bool {
    let k = y.len();
    if k == 0 {
        return true;
    }
    let base = &verts[0];
    // columns are edge vectors: solve E^T lambda = y - base
    let rows: Vec<Vec<BigRational>> = (0..k)
        .map(|c| {
            verts[1..]
                .iter()
                .map(|v| BigRational::from_integer(&v[c] - &base[c]))
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = y
        .iter()
        .zip(base)
        .map(|(a, b)| a - BigRational::from_integer(b.clone()))
        .collect();
    let lam = solve_rational(&rows, &rhs).expect("unimodular simplex is nondegenerate");
    let total: BigRational = lam.iter().fold(BigRational::zero(), |a, b| a + b);
    lam.iter().all(|x| !x.is_negative()) && total <= BigRational::one()
}

/// Denominators tried after the barycenter, in order.
pub const UCP_DENOMINATORS: [u64; 4] = [2, 3, 5, 7];

/// One-sided falsifier for the unimodular cover property.
///
/// Samples, in order: the barycenter, the points `y/q` for `y ∈ qP ∩ Z^d`
/// with `q` from [`UCP_DENOMINATORS`], then random convex combinations of the
/// vertices drawn from `seed` (8 bits per weight). At most `trials` points are
/// tested. A returned point lies in `P` but in no unimodular simplex of `P`.
pub fn ucp_falsify(
    p: &LatticePolytope,
    trials: u64,
    seed: Option<&mut BitSource>,
) -> Result<UcpOutcome> {
    let simplices = unimodular_simplices(p)?;
    let mut tested = 0u64;
    let probe = |x: RationalPoint, tested: &mut u64| -> Option<RationalPoint> {
        *tested += 1;
        let y = p.frame().to_intrinsic_rational(&x);
        (!simplices.iter().any(|s| in_simplex(s, &y))).then_some(x)
    };
    let finish = |cx: Option<RationalPoint>, tested: u64| UcpOutcome {
        counterexample: cx,
        samples_tested: tested,
        unimodular_simplices: simplices.len(),
    };
    if trials == 0 {
        return Ok(finish(None, 0));
    }
    if let Some(x) = probe(p.barycenter(), &mut tested) {
        return Ok(finish(Some(x), tested));
    }
    for q in UCP_DENOMINATORS {
        let qb = BigInt::from(q);
        for y in p.dilate(q).expect("q > 0").lattice_points() {
            if tested >= trials {
                return Ok(finish(None, tested));
            }
            let x = RationalPoint::new(
                y.coords()
                    .iter()
                    .map(|c| BigRational::new(c.clone(), qb.clone()))
                    .collect(),
            );
            if let Some(x) = probe(x, &mut tested) {
                return Ok(finish(Some(x), tested));
            }
        }
    }
    if let Some(src) = seed {
        let verts = p.vertices();
        while tested < trials {
            let mut weights = Vec::with_capacity(verts.len());
            for _ in verts {
                match src.read_u64(8) {
                    Ok(w) => weights.push(BigInt::from(w)),
                    Err(_) => return Ok(finish(None, tested)),
                }
            }
            let total: BigInt = weights.iter().sum();
            if total.is_zero() {
                continue;
            }
            let x = RationalPoint::new(
                (0..p.ambient_dim())
                    .map(|c| {
                        let s: BigInt = verts.iter().zip(&weights).map(|(v, w)| &v[c] * w).sum();
                        BigRational::new(s, total.clone())
                    })
                    .collect(),
            );
            if let Some(x) = probe(x, &mut tested) {
                return Ok(finish(Some(x), tested));
            }
        }
    }
    Ok(finish(None, tested))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IcpCheck {
    pub r: usize,
    pub c_max: u64,
    pub holds: bool,
    /// Least `(c, z)` needing more than `r` distinct points.
    pub witness: Option<Witness>,
}

/// Searches representations `z = a_1 x_1 + ... + a_r x_r` with
/// `a_1 + ... + a_r = c`, distinct `x_i ∈ P ∩ Z^d` and `a_i ≥ 1`.
struct IcpSearch<'a> {
    p: &'a LatticePolytope,
    points: Vec<LatticePoint>,
    point_set: HashSet<LatticePoint>,
    memo: HashMap<(u64, LatticePoint, usize), bool>,
}

impl<'a> IcpSearch<'a> {
    fn new(p: &'a LatticePolytope) -> Self {
        let points = p.lattice_points();
        let point_set = points.iter().cloned().collect();
        IcpSearch {
            p,
            points,
            point_set,
            memo: HashMap::new(),
        }
    }

    // Repeated points may be chosen in different slots; merging them only
    // lowers the count, so this still decides "at most `slots` distinct points".
    fn representable(&mut self, c: u64, z: &LatticePoint, slots: usize) -> bool {
        if slots == 0 {
            return false;
        }
        let cb = BigInt::from(c);
        if z.coords().iter().all(|x| x.is_multiple_of(&cb)) {
            let q = LatticePoint::new(z.coords().iter().map(|x| x / &cb).collect());
            if self.point_set.contains(&q) {
                return true;
            }
        }
        if slots == 1 {
            return false;
        }
        let key = (c, z.clone(), slots);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut ok = false;
        'outer: for i in 0..self.points.len() {
            for a in 1..c {
                let rest = z - &self.points[i].scale(&BigInt::from(a));
                if self.p.contains_scaled(rest.coords(), &BigInt::from(c - a))
                    && self.representable(c - a, &rest, slots - 1)
                {
                    ok = true;
                    break 'outer;
                }
            }
        }
        self.memo.insert(key, ok);
        ok
    }
}

fn require_integrally_closed(p: &LatticePolytope) -> Result<()> {
    if is_integrally_closed(p) {
        Ok(())
    } else {
        Err(Error::NotIntegrallyClosed)
    }
}

/// Bounded check of the `r`-point Carathéodory property up to degree `c_max`.
pub fn icp_check_bounded(p: &LatticePolytope, r: usize, c_max: u64) -> Result<IcpCheck> {
    require_integrally_closed(p)?;
    icp_check_unchecked(p, r, c_max)
}

fn icp_check_unchecked(p: &LatticePolytope, r: usize, c_max: u64) -> Result<IcpCheck> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if c_max < 2 {
        return Err(Error::InvalidArgument("c_max must be at least 2".into()));
    }
    let mut search = IcpSearch::new(p);
    for c in 1..=c_max {
        for z in p.dilate(c).expect("c > 0").lattice_points() {
            if !search.representable(c, &z, r) {
                return Ok(IcpCheck {
                    r,
                    c_max,
                    holds: false,
                    witness: Some(Witness { c, z }),
                });
            }
        }
    }
    Ok(IcpCheck {
        r,
        c_max,
        holds: true,
        witness: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrCertificate {
    /// `max(dim + 1, searched_minimum)`; a lower bound for the Carathéodory rank.
    pub lower_bound: usize,
    /// Least `r` for which the bounded check holds up to `c_max`.
    pub searched_minimum: usize,
    pub upper_bound_checked: IcpCheck,
    /// A point needing `searched_minimum` points (absent when one point suffices).
    pub witness: Option<Witness>,
    /// `[dim + 1, 2 dim]`.
    pub envelope: (usize, usize),
}

pub fn caratheodory_bounds(p: &LatticePolytope, c_max: u64) -> Result<CrCertificate> {
    require_integrally_closed(p)?;
    let dim = p.dim();
    let mut r = 1;
    let mut last_failure = None;
    let checked = loop {
        let chk = icp_check_unchecked(p, r, c_max)?;
        if chk.holds {
            break chk;
        }
        last_failure = chk.witness;
        r += 1;
    };
    let lower_bound = r.max(dim + 1);
    let upper_bound_checked = if lower_bound == r {
        checked
    } else {
        icp_check_unchecked(p, lower_bound, c_max)?
    };
    Ok(CrCertificate {
        lower_bound,
        searched_minimum: r,
        upper_bound_checked,
        witness: last_failure,
        envelope: (dim + 1, 2 * dim),
    })
}
