//! Rational polytopes, pyramidal extensions, quasi-pyramidal chains and
//! Hausdorff distances, all in exact rational arithmetic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hull::{clear_denominators, extreme_rays};
use crate::io::{rational_point_strings, RationalPolytopeJson};
use crate::linalg::{independent_rows, solve_rational};
use crate::point::{LatticePoint, RationalPoint};
use crate::polytope::LatticePolytope;

/// `<normal, x> >= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFacet {
    pub normal: Vec<BigInt>,
    pub offset: BigRational,
}

impl RationalFacet {
    pub fn slack(&self, x: &RationalPoint) -> BigRational {
        rdot(&self.normal, x.coords()) - &self.offset
    }
}

/// `<normal, x> = value`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalEquation {
    pub normal: Vec<BigInt>,
    pub value: BigRational,
}

fn rdot(a: &[BigInt], x: &[BigRational]) -> BigRational {
    a.iter()
        .zip(x)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, x)| x * a)
        .fold(BigRational::zero(), |s, t| s + t)
}

fn ratio(x: &BigInt, l: &BigInt) -> BigRational {
    BigRational::new(x.clone(), l.clone())
}

/// A polytope with rational vertices, represented through its integral
/// multiple `L * P` where `L` clears all denominators.
#[derive(Clone, Debug)]
pub struct RationalPolytope {
    vertices: Vec<RationalPoint>,
    scale: BigInt,
    lattice: LatticePolytope,
    facets: Vec<RationalFacet>,
    equations: Vec<RationalEquation>,
}

impl PartialEq for RationalPolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for RationalPolytope {}

impl RationalPolytope {
    pub fn new<I: IntoIterator<Item = RationalPoint>>(points: I) -> Result<Self> {
        let pts: Vec<RationalPoint> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::Empty("point set"));
        }
        let scale = pts.iter().fold(BigInt::one(), |l, p| l.lcm(&p.denominator()));
        let lattice = LatticePolytope::convex_hull(pts.iter().map(|p| p.scaled_to_integer(&scale)))?;
        let vertices = lattice
            .vertices()
            .iter()
            .map(|v| RationalPoint::new(v.coords().iter().map(|x| ratio(x, &scale)).collect()))
            .collect();
        let facets = lattice
            .facets()
            .iter()
            .map(|f| RationalFacet {
                normal: f.normal.clone(),
                offset: ratio(&f.offset, &scale),
            })
            .collect();
        let equations = lattice
            .equations()
            .iter()
            .map(|e| RationalEquation {
                normal: e.normal.clone(),
                value: ratio(&e.value, &scale),
            })
            .collect();
        Ok(RationalPolytope {
            vertices,
            scale,
            lattice,
            facets,
            equations,
        })
    }

    pub fn from_lattice(p: &LatticePolytope) -> Self {
        Self::new(p.vertices().iter().map(LatticePoint::to_rational)).expect("nonempty polytope")
    }

    pub fn from_i64s(points: &[&[i64]]) -> Result<Self> {
        Self::new(points.iter().map(|p| LatticePoint::from_i64s(p).to_rational()))
    }

    /// Points given as `(numerator, denominator)` pairs.
    pub fn from_ratios(points: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(points.iter().map(|p| RationalPoint::from_ratios(p)))
    }

    pub fn from_json(j: &RationalPolytopeJson) -> Result<Self> {
        Self::new(j.points()?)
    }

    pub fn to_json(&self) -> RationalPolytopeJson {
        RationalPolytopeJson {
            dim: self.ambient_dim(),
            vertices: self.vertices.iter().map(|v| v.coords().to_vec()).collect(),
        }
    }

    /// Vertex list with `"p/q"` coordinates.
    pub fn vertex_strings(&self) -> Vec<Vec<String>> {
        self.vertices.iter().map(rational_point_strings).collect()
    }

    pub fn vertices(&self) -> &[RationalPoint] {
        &self.vertices
    }

    pub fn ambient_dim(&self) -> usize {
        self.lattice.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn facets(&self) -> &[RationalFacet] {
        &self.facets
    }

    pub fn equations(&self) -> &[RationalEquation] {
        &self.equations
    }

    /// Indices of the vertices on facet `i`.
    pub fn facet_vertices(&self, i: usize) -> &[usize] {
        self.lattice.facet_vertices(i)
    }

    pub fn contains(&self, x: &RationalPoint) -> bool {
        x.dim() == self.ambient_dim()
            && self.equations.iter().all(|e| rdot(&e.normal, x.coords()) == e.value)
            && self.facets.iter().all(|f| !f.slack(x).is_negative())
    }

    pub fn contains_polytope(&self, other: &RationalPolytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    pub fn in_affine_hull(&self, x: &RationalPoint) -> bool {
        self.equations.iter().all(|e| rdot(&e.normal, x.coords()) == e.value)
    }

    /// Volume relative to the lattice of the affine hull, normalized so a
    /// unimodular simplex has volume 1.
    pub fn volume(&self) -> BigRational {
        let den: BigInt = Pow::pow(&self.scale, self.dim() as u32);
        BigRational::new(self.lattice.normalized_volume(), den)
    }

    pub fn with_point(&self, x: &RationalPoint) -> Result<Self> {
        let mut pts = self.vertices.clone();
        pts.push(x.clone());
        Self::new(pts)
    }

    /// Every nonempty face, as a sorted list of vertex indices; the whole
    /// polytope is included.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        faces.insert((0..self.vertices.len()).collect());
        let mut frontier: Vec<Vec<usize>> = (0..self.facets.len())
            .map(|i| self.facet_vertices(i).to_vec())
            .collect();
        let facets = frontier.clone();
        while let Some(f) = frontier.pop() {
            if f.is_empty() || !faces.insert(f.clone()) {
                continue;
            }
            for g in &facets {
                let h: Vec<usize> = f.iter().filter(|i| g.contains(i)).copied().collect();
                if !h.is_empty() && !faces.contains(&h) {
                    frontier.push(h);
                }
            }
        }
        faces.into_iter().collect()
    }
}

impl Serialize for RationalPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertex_strings().serialize(s)
    }
}

/// Orthogonal projection of `x` onto the affine hull of `pts`.
fn project(x: &RationalPoint, pts: &[&RationalPoint]) -> RationalPoint {
    let base = pts[0];
    let diffs: Vec<Vec<BigRational>> = pts[1..]
        .iter()
        .map(|p| p.coords().iter().zip(base.coords()).map(|(a, b)| a - b).collect())
        .collect();
    let ints: Vec<Vec<BigInt>> = diffs.iter().map(|d| clear_denominators(d)).collect();
    let basis: Vec<&Vec<BigRational>> = independent_rows(&ints).into_iter().map(|i| &diffs[i]).collect();
    if basis.is_empty() {
        return base.clone();
    }
    let rel: Vec<BigRational> = x.coords().iter().zip(base.coords()).map(|(a, b)| a - b).collect();
    let inner = |a: &[BigRational], b: &[BigRational]| {
        a.iter()
            .zip(b)
            .map(|(s, t)| s * t)
            .fold(BigRational::zero(), |u, v| u + v)
    };
    let gram: Vec<Vec<BigRational>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| inner(a, b)).collect())
        .collect();
    let rhs: Vec<BigRational> = basis.iter().map(|a| inner(a, &rel)).collect();
    let c = solve_rational(&gram, &rhs).expect("independent vectors have an invertible Gram matrix");
    let mut out = base.coords().to_vec();
    for (ci, b) in c.iter().zip(&basis) {
        for (o, bj) in out.iter_mut().zip(b.iter()) {
            *o += ci * bj;
        }
    }
    RationalPoint::new(out)
}

/// Squared Euclidean distance from `x` to `y` and a nearest point.
pub fn squared_distance_to(x: &RationalPoint, y: &RationalPolytope) -> Result<(BigRational, RationalPoint)> {
    if x.dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: y.ambient_dim(),
            got: x.dim(),
        });
    }
    if y.contains(x) {
        return Ok((BigRational::zero(), x.clone()));
    }
    // the nearest point is the projection onto the affine hull of the face
    // containing it in its relative interior
    let mut best: Option<(BigRational, RationalPoint)> = None;
    for face in y.faces() {
        let pts: Vec<&RationalPoint> = face.iter().map(|&i| &y.vertices[i]).collect();
        let q = project(x, &pts);
        if !y.contains(&q) {
            continue;
        }
        let d = x.squared_distance(&q);
        if best.as_ref().is_none_or(|(b, _)| &d < b) {
            best = Some((d, q));
        }
    }
    Ok(best.expect("some vertex projects into the polytope"))
}

/// A distance known through its exact square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HausdorffDistance {
    pub squared: BigRational,
    /// A pair `(x, y)` realizing the distance, `x` a vertex of one argument.
    pub attained: (RationalPoint, RationalPoint),
}

impl HausdorffDistance {
    /// The distance itself when it is rational.
    pub fn exact(&self) -> Option<BigRational> {
        rational_sqrt(&self.squared)
    }

    /// `lo <= distance <= hi` with `hi - lo <= 10^-digits`.
    pub fn enclosure(&self, digits: u32) -> (BigRational, BigRational) {
        sqrt_enclosure(&self.squared, digits)
    }

    /// Decimal lower bound truncated to `digits` places.
    pub fn to_decimal(&self, digits: u32) -> String {
        decimal(&self.enclosure(digits).0, digits)
    }
}

pub(crate) fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

pub(crate) fn sqrt_enclosure(x: &BigRational, digits: u32) -> (BigRational, BigRational) {
    if let Some(r) = rational_sqrt(x) {
        return (r.clone(), r);
    }
    let ten: BigInt = Pow::pow(BigInt::from(10), digits);
    let y = (x.numer() * &ten * &ten).div_floor(x.denom());
    let s = y.sqrt();
    (BigRational::new(s.clone(), ten.clone()), BigRational::new(s + 1, ten))
}

fn decimal(x: &BigRational, digits: u32) -> String {
    let ten: BigInt = Pow::pow(BigInt::from(10), digits);
    let scaled = (x.numer() * &ten).div_floor(x.denom());
    let (int, frac) = scaled.div_mod_floor(&ten);
    if digits == 0 {
        return int.to_string();
    }
    format!("{int}.{:0>width$}", frac.to_string(), width = digits as usize)
}

fn one_sided(x: &RationalPolytope, y: &RationalPolytope) -> Result<(BigRational, (RationalPoint, RationalPoint))> {
    let mut best = (BigRational::zero(), (x.vertices[0].clone(), x.vertices[0].clone()));
    let mut first = true;
    for v in &x.vertices {
        let (d, q) = squared_distance_to(v, y)?;
        if first || d > best.0 {
            best = (d, (v.clone(), q));
            first = false;
        }
    }
    Ok(best)
}

/// Hausdorff distance; the farthest point of either polytope from the other
/// is a vertex, so only vertices are examined.
pub fn hausdorff_distance(x: &RationalPolytope, y: &RationalPolytope) -> Result<HausdorffDistance> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient_dim(),
            got: y.ambient_dim(),
        });
    }
    let a = one_sided(x, y)?;
    let b = one_sided(y, x)?;
    let (squared, attained) = if b.0 > a.0 { b } else { a };
    Ok(HausdorffDistance { squared, attained })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidWitness {
    pub apex: RationalPoint,
    /// Index of the base facet.
    pub facet: usize,
    pub base: Vec<RationalPoint>,
}

/// An apex `v` with `Q = conv(F, v)` for a facet `F` missing `v`.
pub fn is_pyramid(q: &RationalPolytope) -> Option<PyramidWitness> {
    if q.dim() == 0 {
        return None;
    }
    (0..q.facets.len()).find_map(|i| {
        let on = q.facet_vertices(i);
        let off: Vec<usize> = (0..q.vertices.len()).filter(|j| !on.contains(j)).collect();
        (off.len() == 1).then(|| PyramidWitness {
            apex: q.vertices[off[0]].clone(),
            facet: i,
            base: on.iter().map(|&j| q.vertices[j].clone()).collect(),
        })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionKind {
    /// `Q` is a pyramid over `P`.
    OverP,
    /// `Q` is `P` with a pyramid stacked onto one facet.
    Stacked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionWitness {
    pub kind: ExtensionKind,
    pub apex: RationalPoint,
    /// `Δ ∩ P`: all of `P` for [`ExtensionKind::OverP`], the stacked facet otherwise.
    pub base: Vec<RationalPoint>,
    /// The closure of `Q ∖ P`.
    pub delta: RationalPolytope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionVerdict {
    pub holds: bool,
    pub witness: Option<ExtensionWitness>,
    pub reason: Option<&'static str>,
}

impl ExtensionVerdict {
    fn no(reason: &'static str) -> Self {
        ExtensionVerdict {
            holds: false,
            witness: None,
            reason: Some(reason),
        }
    }
}

/// Decides whether `P ⊂ Q` is a pyramidal extension. Such an extension adds
/// a single vertex `a`, so `Q = conv(P, a)`; the difference is a pyramid
/// meeting `P` in a facet exactly when `a` lies off the affine hull of `P`
/// or beyond exactly one of its facets.
pub fn is_pyramidal_extension(p: &RationalPolytope, q: &RationalPolytope) -> Result<ExtensionVerdict> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_dim(),
            got: q.ambient_dim(),
        });
    }
    if !q.contains_polytope(p) {
        return Err(Error::NotContained("P is not contained in Q"));
    }
    if p == q {
        return Ok(ExtensionVerdict::no("P equals Q"));
    }
    let old: BTreeSet<&RationalPoint> = p.vertices.iter().collect();
    let new: Vec<&RationalPoint> = q.vertices.iter().filter(|v| !old.contains(v)).collect();
    if new.len() != 1 {
        return Ok(ExtensionVerdict::no("difference not a pyramid candidate: more than one new vertex"));
    }
    let apex = new[0].clone();
    if q.dim() == p.dim() + 1 {
        return Ok(ExtensionVerdict {
            holds: true,
            witness: Some(ExtensionWitness {
                kind: ExtensionKind::OverP,
                apex,
                base: p.vertices.clone(),
                delta: q.clone(),
            }),
            reason: None,
        });
    }
    let visible: Vec<usize> = (0..p.facets.len())
        .filter(|&i| p.facets[i].slack(&apex).is_negative())
        .collect();
    if visible.len() != 1 {
        return Ok(ExtensionVerdict::no("difference not a pyramid candidate: several facets visible"));
    }
    let base: Vec<RationalPoint> = p
        .facet_vertices(visible[0])
        .iter()
        .map(|&i| p.vertices[i].clone())
        .collect();
    let mut pts = base.clone();
    pts.push(apex.clone());
    let delta = RationalPolytope::new(pts)?;
    Ok(ExtensionVerdict {
        holds: true,
        witness: Some(ExtensionWitness {
            kind: ExtensionKind::Stacked,
            apex,
            base,
            delta,
        }),
        reason: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    Pyramidal,
    QuasiPyramidal,
}

/// Step data: for quasi-pyramidal chains `prime` is `P'_i` with
/// `P'_i ⊂_Δ P_i`; for pyramidal chains the extension starts at `P_{i-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepWitness {
    pub prime: Option<RationalPolytope>,
    pub kind: ExtensionKind,
    pub apex: RationalPoint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidalChain {
    pub kind: ChainKind,
    /// `P_0 ⊂ P_1 ⊂ ... ⊂ P_n`.
    pub chain: Vec<RationalPolytope>,
    pub witnesses: Vec<StepWitness>,
}

impl PyramidalChain {
    /// Computes witnesses for a chain of pyramidal extensions.
    pub fn pyramidal(chain: Vec<RationalPolytope>) -> Result<Self> {
        let mut witnesses = Vec::new();
        for w in chain.windows(2) {
            let v = extension_of(&w[0], &w[1])?;
            witnesses.push(StepWitness {
                prime: None,
                kind: v.kind,
                apex: v.apex,
            });
        }
        Ok(PyramidalChain {
            kind: ChainKind::Pyramidal,
            chain,
            witnesses,
        })
    }

    /// Computes witnesses for `P'_i ⊂_Δ P_i`, `i = 1..n`.
    pub fn quasi(chain: Vec<RationalPolytope>, primes: Vec<RationalPolytope>) -> Result<Self> {
        if primes.len() + 1 != chain.len() {
            return Err(Error::Malformed("need one P'_i per step".into()));
        }
        let mut witnesses = Vec::new();
        for (prime, target) in primes.into_iter().zip(&chain[1..]) {
            let v = extension_of(&prime, target)?;
            witnesses.push(StepWitness {
                prime: Some(prime),
                kind: v.kind,
                apex: v.apex,
            });
        }
        Ok(PyramidalChain {
            kind: ChainKind::QuasiPyramidal,
            chain,
            witnesses,
        })
    }

    /// The same chain read as quasi-pyramidal with `P'_i = P_{i-1}`.
    pub fn to_quasi(&self) -> Self {
        let mut c = self.clone();
        if c.kind == ChainKind::Pyramidal {
            c.kind = ChainKind::QuasiPyramidal;
            for (w, prev) in c.witnesses.iter_mut().zip(&self.chain) {
                w.prime = Some(prev.clone());
            }
        }
        c
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn concat(&self, other: &PyramidalChain) -> Result<Self> {
        if self.kind != other.kind || self.chain.last() != other.chain.first() {
            return Err(Error::Malformed("chains do not compose".into()));
        }
        let mut c = self.clone();
        c.chain.extend(other.chain[1..].iter().cloned());
        c.witnesses.extend(other.witnesses.iter().cloned());
        Ok(c)
    }

    pub fn start(&self) -> &RationalPolytope {
        &self.chain[0]
    }

    pub fn end(&self) -> &RationalPolytope {
        self.chain.last().expect("nonempty chain")
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "chain": self.chain,
            "witnesses": self.witnesses.iter().map(|w| json!({
                "kind": w.kind,
                "apex": rational_point_strings(&w.apex),
                "prime": w.prime,
            })).collect::<Vec<_>>(),
        })
    }
}

fn extension_of(p: &RationalPolytope, q: &RationalPolytope) -> Result<ExtensionWitness> {
    let v = is_pyramidal_extension(p, q)?;
    v.witness
        .ok_or_else(|| Error::Malformed(format!("step is not a pyramidal extension ({})", v.reason.unwrap_or(""))))
}

/// Checks every inclusion and every witness.
pub fn verify_chain(c: &PyramidalChain) -> Result<bool> {
    if c.chain.is_empty() || c.witnesses.len() + 1 != c.chain.len() {
        return Err(Error::Malformed("chain and witness lengths disagree".into()));
    }
    let quasi = c.kind == ChainKind::QuasiPyramidal;
    if c.witnesses.iter().any(|w| w.prime.is_some() != quasi) {
        return Err(Error::Malformed("witness shape does not match chain kind".into()));
    }
    let p0 = &c.chain[0];
    for (i, w) in c.witnesses.iter().enumerate() {
        let (prev, next) = (&c.chain[i], &c.chain[i + 1]);
        if prev.ambient_dim() != next.ambient_dim() || prev == next || !next.contains_polytope(prev) {
            return Ok(false);
        }
        let from = match &w.prime {
            Some(prime) => {
                if prime.ambient_dim() != p0.ambient_dim()
                    || !prime.contains_polytope(p0)
                    || !prev.contains_polytope(prime)
                {
                    return Ok(false);
                }
                prime
            }
            None => prev,
        };
        if !next.contains_polytope(from) {
            return Ok(false);
        }
        match is_pyramidal_extension(from, next)?.witness {
            Some(x) if x.apex == w.apex && x.kind == w.kind => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDefect {
    /// `d(P'_i, P_i)` per step.
    pub terms: Vec<HausdorffDistance>,
    /// Enclosure of the sum.
    pub lower: BigRational,
    pub upper: BigRational,
    /// The sum, when every term is rational.
    pub exact: Option<BigRational>,
    /// Every `P'_i` is a proper subset of `P_{i-1}`, so the chain competes in
    /// the infimum defining the defect.
    pub admissible: bool,
}

/// `Σ d(P'_i, P_i)` for a verified chain; pyramidal chains are read with
/// `P'_i = P_{i-1}`.
pub fn chain_defect(c: &PyramidalChain, digits: u32) -> Result<ChainDefect> {
    if !verify_chain(c)? {
        return Err(Error::InvalidArgument("chain does not verify".into()));
    }
    let q = c.to_quasi();
    let mut terms = Vec::new();
    let mut admissible = true;
    for (i, w) in q.witnesses.iter().enumerate() {
        let prime = w.prime.as_ref().expect("quasi witnesses carry P'_i");
        admissible &= prime != &q.chain[i];
        terms.push(hausdorff_distance(prime, &q.chain[i + 1])?);
    }
    let mut lower = BigRational::zero();
    let mut upper = BigRational::zero();
    let mut exact = Some(BigRational::zero());
    for t in &terms {
        let (lo, hi) = t.enclosure(digits);
        lower += lo;
        upper += hi;
        exact = match (exact, t.exact()) {
            (Some(s), Some(x)) => Some(s + x),
            _ => None,
        };
    }
    Ok(ChainDefect {
        terms,
        lower,
        upper,
        exact,
        admissible,
    })
}

/// Vertices of `{x : <n_i, x> >= b_i}` for a bounded system.
fn polytope_vertices(rows: &[(Vec<BigInt>, BigRational)]) -> Vec<RationalPoint> {
    let d = rows[0].0.len();
    let mut hom: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|(n, b)| {
            let den = b.denom();
            let mut r: Vec<BigInt> = n.iter().map(|x| x * den).collect();
            r.push(-b.numer());
            r
        })
        .collect();
    hom.push(LatticePoint::unit(d + 1, d).into_coords());
    let Some(rays) = extreme_rays(&hom) else {
        return Vec::new();
    };
    rays.into_iter()
        .filter(|r| r[d].is_positive())
        .map(|r| RationalPoint::new(r[..d].iter().map(|x| ratio(x, &r[d])).collect()))
        .collect()
}

fn constraints_of(q: &RationalPolytope) -> Vec<(Vec<BigInt>, BigRational)> {
    let mut rows: Vec<(Vec<BigInt>, BigRational)> =
        q.facets.iter().map(|f| (f.normal.clone(), f.offset.clone())).collect();
    for e in &q.equations {
        rows.push((e.normal.clone(), e.value.clone()));
        rows.push((e.normal.iter().map(|x| -x).collect(), -&e.value));
    }
    rows
}

/// Apexes that extend `current` by a pyramid inside `q`.
fn candidate_apexes(current: &RationalPolytope, q: &RationalPolytope) -> Vec<RationalPoint> {
    let mut out: BTreeSet<RationalPoint> = BTreeSet::new();
    if current.dim() < q.dim() {
        out.extend(q.vertices.iter().filter(|v| !current.in_affine_hull(v)).cloned());
        return out.into_iter().collect();
    }
    if current.dim() == 0 {
        return Vec::new();
    }
    let base = constraints_of(q);
    for (g, fg) in current.facets.iter().enumerate() {
        // inside q, beyond facet g, beneath every other facet
        let mut rows = base.clone();
        rows.push((fg.normal.iter().map(|x| -x).collect(), -&fg.offset));
        for (h, fh) in current.facets.iter().enumerate() {
            if h != g {
                rows.push((fh.normal.clone(), fh.offset.clone()));
            }
        }
        out.extend(
            polytope_vertices(&rows)
                .into_iter()
                .filter(|v| fg.slack(v).is_negative()),
        );
    }
    out.into_iter().collect()
}

/// Greedy search for a pyramidal chain from `P` to `Q`: each step stacks the
/// candidate pyramid of largest volume, ties broken by the least apex.
/// Returns `None` when no chain is found within `budget` steps; a returned
/// chain has passed [`verify_chain`].
pub fn search_pyramidal_chain(
    p: &RationalPolytope,
    q: &RationalPolytope,
    budget: usize,
) -> Result<Option<PyramidalChain>> {
    if p.ambient_dim() != q.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: p.ambient_dim(),
            got: q.ambient_dim(),
        });
    }
    if !q.contains_polytope(p) {
        return Err(Error::NotContained("P is not contained in Q"));
    }
    let mut chain = vec![p.clone()];
    let mut witnesses = Vec::new();
    while chain.last() != Some(q) {
        if witnesses.len() == budget {
            return Ok(None);
        }
        let current = chain.last().expect("nonempty");
        let cands = candidate_apexes(current, q);
        let steps: Vec<(RationalPolytope, ExtensionWitness)> = cands
            .par_iter()
            .map(|a| -> Result<Option<(RationalPolytope, ExtensionWitness)>> {
                let next = current.with_point(a)?;
                Ok(is_pyramidal_extension(current, &next)?.witness.map(|w| (next, w)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let volumes: Vec<BigRational> = steps.iter().map(|(n, _)| n.volume()).collect();
        // candidates are sorted by apex, so the first maximum has the least apex
        let Some(best) = volumes.iter().max().and_then(|m| volumes.iter().position(|v| v == m)) else {
            return Ok(None);
        };
        let (next, w) = steps.into_iter().nth(best).expect("index in range");
        witnesses.push(StepWitness {
            prime: None,
            kind: w.kind,
            apex: w.apex,
        });
        chain.push(next);
    }
    let c = PyramidalChain {
        kind: ChainKind::Pyramidal,
        chain,
        witnesses,
    };
    Ok(verify_chain(&c)?.then_some(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(pts: &[&[i64]]) -> RationalPolytope {
        RationalPolytope::from_i64s(pts).unwrap()
    }

    fn sq() -> RationalPolytope {
        rp(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_hull() {
        let p = RationalPolytope::from_ratios(&[&[(0, 1), (0, 1)], &[(1, 2), (0, 1)], &[(0, 1), (1, 3)], &[(1, 8), (1, 8)]])
            .unwrap();
        assert_eq!(p.vertices().len(), 3);
        assert_eq!(p.dim(), 2);
        assert!(p.contains(&RationalPoint::from_ratios(&[(1, 4), (1, 6)])));
        assert!(!p.contains(&RationalPoint::from_ratios(&[(1, 4), (1, 5)])));
        // area 1/12, normalized 1/6
        assert_eq!(p.volume(), r(1, 6));
        assert_eq!(sq().volume(), r(2, 1));
    }

    #[test]
    fn faces_of_square_and_point() {
        assert_eq!(sq().faces().len(), 4 + 4 + 1);
        assert_eq!(rp(&[&[1, 1]]).faces(), vec![vec![0]]);
        let cube = RationalPolytope::from_lattice(&LatticePolytope::unit_cube(3));
        assert_eq!(cube.faces().len(), 8 + 12 + 6 + 1);
    }

    #[test]
    fn hausdorff_examples() {
        let d = hausdorff_distance(&sq(), &sq()).unwrap();
        assert!(d.squared.is_zero());
        let big = rp(&[&[0, 0], &[2, 0], &[0, 2], &[2, 2]]);
        let d = hausdorff_distance(&sq(), &big).unwrap();
        assert_eq!(d.squared, r(2, 1));
        assert_eq!(d.exact(), None);
        assert_eq!(d.to_decimal(4), "1.4142");
        let (lo, hi) = d.enclosure(6);
        assert!(&lo * &lo <= d.squared && d.squared <= &hi * &hi);
        let d = hausdorff_distance(&rp(&[&[0]]), &rp(&[&[0], &[1]])).unwrap();
        assert_eq!(d.exact(), Some(r(1, 1)));
    }

    #[test]
    fn distance_to_a_face_interior() {
        let tri = rp(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0]]);
        let x = RationalPoint::from_ratios(&[(1, 2), (1, 2), (3, 1)]);
        let (d, q) = squared_distance_to(&x, &tri).unwrap();
        assert_eq!(d, r(9, 1));
        assert_eq!(q, RationalPoint::from_ratios(&[(1, 2), (1, 2), (0, 1)]));
        let y = RationalPoint::from_ratios(&[(2, 1), (2, 1), (0, 1)]);
        assert_eq!(squared_distance_to(&y, &tri).unwrap().0, r(2, 1));
    }

    #[test]
    fn pyramids() {
        let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert!(is_pyramid(&tri).is_some());
        assert!(is_pyramid(&sq()).is_none());
        let pyr = rp(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[2, 2, 0], &[1, 1, 1]]);
        let w = is_pyramid(&pyr).unwrap();
        assert_eq!(w.apex, RationalPoint::from_ratios(&[(1, 1), (1, 1), (1, 1)]));
        assert_eq!(w.base.len(), 4);
        assert!(is_pyramid(&rp(&[&[3]])).is_none());
    }

    #[test]
    fn extensions() {
        let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]]);
        let v = is_pyramidal_extension(&tri, &sq()).unwrap();
        assert!(v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.kind, ExtensionKind::Stacked);
        assert_eq!(w.delta, rp(&[&[1, 0], &[0, 1], &[1, 1]]));

        let flat = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let tet = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let v = is_pyramidal_extension(&flat, &tet).unwrap();
        assert_eq!(v.witness.unwrap().kind, ExtensionKind::OverP);

        let bigger = rp(&[&[0, 0], &[1, 0], &[0, 1], &[2, 2]]);
        let v = is_pyramidal_extension(&sq(), &bigger).unwrap();
        assert!(!v.holds);
        assert!(v.reason.unwrap().contains("not a pyramid candidate"));

        assert!(is_pyramidal_extension(&bigger, &sq()).is_err());
        assert!(!is_pyramidal_extension(&sq(), &sq()).unwrap().holds);
    }

    #[test]
    fn stacked_chain_and_defect() {
        let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]]);
        let pent = rp(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1], &[2, 1]]);
        let c = PyramidalChain::pyramidal(vec![tri.clone(), sq(), pent.clone()]).unwrap();
        assert!(verify_chain(&c).unwrap());
        let single = PyramidalChain::pyramidal(vec![tri.clone()]).unwrap();
        assert!(verify_chain(&single).unwrap());
        assert!(chain_defect(&single, 3).unwrap().exact.unwrap().is_zero());

        let bad = PyramidalChain {
            kind: ChainKind::Pyramidal,
            chain: vec![sq(), rp(&[&[0, 0], &[1, 0], &[0, 1], &[2, 2]])],
            witnesses: vec![StepWitness {
                prime: None,
                kind: ExtensionKind::Stacked,
                apex: RationalPoint::from_ratios(&[(2, 1), (2, 1)]),
            }],
        };
        assert!(!verify_chain(&bad).unwrap());
        assert!(chain_defect(&bad, 3).is_err());

        let q = c.to_quasi();
        assert!(verify_chain(&q).unwrap());
        let defect = chain_defect(&q, 6).unwrap();
        // d(tri, square) = 1/√2, d(square, pent) = 1
        assert_eq!(defect.terms[0].squared, r(1, 2));
        assert_eq!(defect.terms[1].squared, r(1, 1));
        assert!(defect.exact.is_none());
        assert!(defect.lower > BigRational::zero());
        assert!(!defect.admissible);
    }

    #[test]
    fn quasi_chain_with_proper_primes() {
        // P_0 = segment, P_1 = triangle over it, P_2 = square built on a smaller P'_2
        let seg = rp(&[&[0, 0], &[1, 0]]);
        let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]]);
        let c = PyramidalChain::quasi(vec![seg.clone(), tri.clone(), sq()], vec![seg.clone(), tri.clone()]).unwrap();
        assert!(verify_chain(&c).unwrap());
        // a prime not containing P_0 is rejected
        let mut broken = c.clone();
        broken.witnesses[1].prime = Some(rp(&[&[1, 0], &[0, 1]]));
        assert!(!verify_chain(&broken).unwrap());
        assert!(PyramidalChain::quasi(vec![seg.clone(), tri.clone()], vec![]).is_err());
    }

    #[test]
    fn search_examples() {
        let tri = rp(&[&[0, 0], &[1, 0], &[0, 1]]);
        let c = search_pyramidal_chain(&tri, &tri, 5).unwrap().unwrap();
        assert!(c.is_empty());
        let flat = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0]]);
        let tet = rp(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let c = search_pyramidal_chain(&flat, &tet, 5).unwrap().unwrap();
        assert_eq!(c.len(), 1);

        let inner = rp(&[&[2, 2], &[3, 2], &[2, 3]]);
        let outer = rp(&[&[0, 0], &[9, 0], &[0, 9]]);
        let c = search_pyramidal_chain(&inner, &outer, 50).unwrap().unwrap();
        assert!(verify_chain(&c).unwrap());
        assert_eq!(c.end(), &outer);

        let point = rp(&[&[1, 1]]);
        let c = search_pyramidal_chain(&point, &sq(), 10).unwrap().unwrap();
        assert!(verify_chain(&c).unwrap());
        assert!(search_pyramidal_chain(&outer, &inner, 10).is_err());
    }
}
