//! Random polytope generation from bit streams, the hexagon-type family, and
//! frequency surveys over generated streams.
//!
//! Step `n` of the pipeline takes the next `n·d·v·φ(n)` bits, with
//! `φ(n) = (n·d·v)^c`, reads them as `n`-bit integers, groups those into
//! points of `Z^d_{≥0}`, groups points into `v`-tuples, and takes convex hulls.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitSource;
use crate::error::{Error, Result};
use crate::normality::is_integrally_closed;
use crate::point::LatticePoint;
use crate::polytope::LatticePolytope;
use crate::poset::{is_maximal, is_minimal};

/// Shape of the `n`-th cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterSpec {
    pub n: u64,
    pub d: u64,
    pub v: u64,
    pub c: u32,
    /// `(n·d·v)^c`, the number of polytopes in the cluster.
    pub phi: u64,
}

impl ClusterSpec {
    pub fn new(n: u64, d: u64, v: u64, c: u32) -> Result<Self> {
        if n == 0 || d == 0 || v == 0 {
            return Err(Error::InvalidArgument("n, d and v must be positive".into()));
        }
        let base = n
            .checked_mul(d)
            .and_then(|x| x.checked_mul(v))
            .ok_or_else(|| overflow(n, d, v, c))?;
        let phi = base.checked_pow(c).ok_or_else(|| overflow(n, d, v, c))?;
        let spec = ClusterSpec { n, d, v, c, phi };
        spec.bits_checked().ok_or_else(|| overflow(n, d, v, c))?;
        Ok(spec)
    }

    fn bits_checked(&self) -> Option<u64> {
        self.n.checked_mul(self.d)?.checked_mul(self.v)?.checked_mul(self.phi)
    }

    /// Bits consumed by this cluster: `n·d·v·φ(n)`.
    pub fn bits(&self) -> u64 {
        self.bits_checked().expect("checked at construction")
    }

    /// Bits per polytope: `n·d·v`.
    pub fn bits_per_polytope(&self) -> u64 {
        self.n * self.d * self.v
    }
}

fn overflow(n: u64, d: u64, v: u64, c: u32) -> Error {
    Error::InvalidArgument(format!("cluster size overflows u64 for (n, d, v, c) = ({n}, {d}, {v}, {c})"))
}

/// Total bits consumed by clusters `1..=steps`.
pub fn bits_through(steps: u64, d: u64, v: u64, c: u32) -> Result<u128> {
    let mut total = 0u128;
    for n in 1..=steps {
        total += ClusterSpec::new(n, d, v, c)?.bits() as u128;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedPolytope {
    pub polytope: LatticePolytope,
    /// The `v` points as read, before taking the hull.
    pub points: Vec<LatticePoint>,
    /// Cluster index `n`.
    pub cluster: u64,
    /// Position within the cluster.
    pub index: u64,
    /// Bit offset of the first bit used for this polytope.
    pub offset: u64,
    /// Repeated points in the tuple, or a hull of dimension below `d`.
    pub degenerate: bool,
}

/// Reads one cluster. On insufficient bits nothing is consumed.
pub fn generate_cluster(src: &mut BitSource, spec: ClusterSpec) -> Result<Vec<GeneratedPolytope>> {
    let need = spec.bits();
    if src.remaining() < need {
        return Err(Error::BitsExhausted {
            needed: need,
            available: src.remaining(),
        });
    }
    let (d, v) = (spec.d as usize, spec.v as usize);
    let mut out = Vec::with_capacity(spec.phi as usize);
    for index in 0..spec.phi {
        let offset = src.cursor();
        let mut points = Vec::with_capacity(v);
        for _ in 0..v {
            let mut coords = Vec::with_capacity(d);
            for _ in 0..d {
                coords.push(BigInt::from(src.read_uint(spec.n)?));
            }
            points.push(LatticePoint::new(coords));
        }
        let polytope = LatticePolytope::convex_hull(points.clone())?;
        let distinct = points.iter().collect::<BTreeSet<_>>().len();
        let degenerate = distinct < points.len() || polytope.dim() < d;
        out.push(GeneratedPolytope {
            polytope,
            points,
            cluster: spec.n,
            index,
            offset,
            degenerate,
        });
    }
    Ok(out)
}

/// Clusters `n_start..=n_end` read back to back.
pub fn generate_clusters(
    src: &mut BitSource,
    n_start: u64,
    n_end: u64,
    d: u64,
    v: u64,
    c: u32,
) -> Result<Vec<Vec<GeneratedPolytope>>> {
    (n_start..=n_end)
        .map(|n| generate_cluster(src, ClusterSpec::new(n, d, v, c)?))
        .collect()
}

/// Number of elementary factors used for the hexagon-type family in dimension `d`.
pub fn theta(d: u64) -> u64 {
    36 + (3 * d * d - d) / 2
}

/// Exponents `a_k` and 1-based positions `(i_k, j_k)` of the product
/// `∏ e_{i_k j_k}^{a_k}` of elementary `d × d` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HexagonParams {
    d: usize,
    a: Vec<BigInt>,
    positions: Vec<(usize, usize)>,
}

impl HexagonParams {
    pub fn new(d: usize, a: Vec<BigInt>, positions: Vec<(usize, usize)>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("hexagon parameters need d >= 2".into()));
        }
        let len = theta(d as u64) as usize;
        if a.len() != len || positions.len() != len {
            return Err(Error::Malformed(format!(
                "expected {len} exponents and positions, got {} and {}",
                a.len(),
                positions.len()
            )));
        }
        if let Some(&(i, j)) = positions
            .iter()
            .find(|&&(i, j)| i == j || i == 0 || j == 0 || i > d || j > d)
        {
            return Err(Error::Malformed(format!("bad elementary position ({i}, {j}) for d = {d}")));
        }
        Ok(HexagonParams { d, a, positions })
    }

    pub fn zero(d: usize) -> Result<Self> {
        let len = theta(d as u64) as usize;
        Self::new(d, vec![BigInt::from(0); len], systematic_positions(d, len))
    }

    /// Exponents uniform in `[-bound, bound]` drawn from `src`; positions
    /// either cycle systematically or are drawn from `src` as well.
    pub fn random(d: usize, src: &mut BitSource, bound: u64, systematic: bool) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument("hexagon parameters need d >= 2".into()));
        }
        let len = theta(d as u64) as usize;
        let span = bound
            .checked_mul(2)
            .and_then(|x| x.checked_add(1))
            .ok_or_else(|| Error::InvalidArgument("exponent bound too large".into()))?;
        let mut a = Vec::with_capacity(len);
        for _ in 0..len {
            let x = src.uniform_below(span)?;
            a.push(BigInt::from(x) - BigInt::from(bound));
        }
        let positions = if systematic {
            systematic_positions(d, len)
        } else {
            let mut ps = Vec::with_capacity(len);
            for _ in 0..len {
                let i = src.uniform_below(d as u64)? as usize + 1;
                let mut j = src.uniform_below(d as u64 - 1)? as usize + 1;
                if j >= i {
                    j += 1;
                }
                ps.push((i, j));
            }
            ps
        };
        Self::new(d, a, positions)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.a
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    /// The product matrix; its rows are `z_1, ..., z_d`.
    pub fn z_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = self.d;
        let mut m: Vec<Vec<BigInt>> = (0..d)
            .map(|r| (0..d).map(|c| BigInt::from((r == c) as i64)).collect())
            .collect();
        // right multiplication by I + a·E_ij adds a·(column i) to column j
        for (a, &(i, j)) in self.a.iter().zip(&self.positions) {
            if a == &BigInt::from(0) {
                continue;
            }
            for row in m.iter_mut() {
                let add = a * &row[i - 1];
                row[j - 1] += add;
            }
        }
        m
    }

    /// `0, e_1, ..., e_{d+1}, (z_1, 1), ..., (z_d, 1)` in `Z^{d+1}`.
    pub fn points(&self) -> Vec<LatticePoint> {
        let d = self.d;
        let mut pts = vec![LatticePoint::zero(d + 1)];
        pts.extend((0..=d).map(|i| LatticePoint::unit(d + 1, i)));
        pts.extend(
            self.z_matrix()
                .into_iter()
                .map(|z| LatticePoint::new(z).lift(BigInt::from(1))),
        );
        pts
    }
}

/// Ordered pairs `(i, j)`, `i ≠ j`, in lexicographic order, repeated to length `len`.
pub fn systematic_positions(d: usize, len: usize) -> Vec<(usize, usize)> {
    let pairs: Vec<(usize, usize)> = (1..=d)
        .flat_map(|i| (1..=d).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Vec::new();
    }
    pairs.iter().copied().cycle().take(len).collect()
}

pub fn hexagon_from_params(p: &HexagonParams) -> Result<LatticePolytope> {
    LatticePolytope::convex_hull(p.points())
}

/// Which properties a survey tests. Minimality and maximality are only
/// tested on polytopes that passed the normality test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SurveyChecks {
    pub normal: bool,
    pub minimal: bool,
    pub maximal: bool,
}

impl SurveyChecks {
    pub fn all() -> Self {
        SurveyChecks {
            normal: true,
            minimal: true,
            maximal: true,
        }
    }

    /// Parses names `normal`, `minimal`, `maximal`.
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut c = SurveyChecks::default();
        for n in names {
            match n.trim() {
                "normal" => c.normal = true,
                "minimal" => c.minimal = true,
                "maximal" => c.maximal = true,
                other => return Err(Error::InvalidArgument(format!("unknown check {other:?}"))),
            }
        }
        if c.minimal || c.maximal {
            c.normal = true;
        }
        Ok(c)
    }

    fn is_empty(&self) -> bool {
        !(self.normal || self.minimal || self.maximal)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: u64,
    pub normal: u64,
    pub minimal: u64,
    pub maximal: u64,
    /// Both minimal and maximal.
    pub isolated_candidate: u64,
    pub degenerate: u64,
}

impl Counts {
    fn add(&mut self, v: &Verdict) {
        self.total += 1;
        self.normal += v.normal.unwrap_or(false) as u64;
        self.minimal += v.minimal.unwrap_or(false) as u64;
        self.maximal += v.maximal.unwrap_or(false) as u64;
        self.isolated_candidate += (v.minimal == Some(true) && v.maximal == Some(true)) as u64;
        self.degenerate += v.degenerate as u64;
    }
}

/// Outcome for one polytope; `None` means the check was not run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub cluster: u64,
    pub index: u64,
    pub offset: u64,
    pub degenerate: bool,
    pub normal: Option<bool>,
    pub minimal: Option<bool>,
    pub maximal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterCounts {
    pub cluster: u64,
    #[serde(flatten)]
    pub counts: Counts,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SurveyStats {
    pub counts: Counts,
    /// One entry per cluster, in order of first appearance.
    pub per_cluster: Vec<ClusterCounts>,
    pub log: Vec<Verdict>,
}

fn judge(g: &GeneratedPolytope, checks: SurveyChecks) -> Result<Verdict> {
    let mut v = Verdict {
        cluster: g.cluster,
        index: g.index,
        offset: g.offset,
        degenerate: g.degenerate,
        normal: None,
        minimal: None,
        maximal: None,
    };
    if !checks.normal {
        return Ok(v);
    }
    let normal = is_integrally_closed(&g.polytope);
    v.normal = Some(normal);
    if !normal {
        return Ok(v);
    }
    if checks.minimal {
        v.minimal = Some(is_minimal(&g.polytope)?);
    }
    if checks.maximal {
        v.maximal = Some(is_maximal(&g.polytope)?);
    }
    Ok(v)
}

/// Runs the normal → minimal → maximal pipeline on every polytope. Checks
/// run in parallel on the current rayon pool; results are accumulated in
/// input order.
pub fn survey(stream: &[GeneratedPolytope], checks: SurveyChecks) -> Result<SurveyStats> {
    if checks.is_empty() {
        return Err(Error::InvalidArgument("no survey checks selected".into()));
    }
    let log: Vec<Verdict> = stream
        .par_iter()
        .map(|g| judge(g, checks))
        .collect::<Result<_>>()?;
    let mut stats = SurveyStats::default();
    for v in &log {
        stats.counts.add(v);
        match stats.per_cluster.last_mut() {
            Some(c) if c.cluster == v.cluster => c.counts.add(v),
            _ => {
                let mut counts = Counts::default();
                counts.add(v);
                stats.per_cluster.push(ClusterCounts {
                    cluster: v.cluster,
                    counts,
                });
            }
        }
    }
    stats.log = log;
    Ok(stats)
}

/// Wraps plain polytopes as cluster 0 entries for [`survey`].
pub fn as_stream(polytopes: impl IntoIterator<Item = LatticePolytope>) -> Vec<GeneratedPolytope> {
    polytopes
        .into_iter()
        .enumerate()
        .map(|(i, p)| GeneratedPolytope {
            points: p.vertices().to_vec(),
            degenerate: p.dim() < p.ambient_dim(),
            polytope: p,
            cluster: 0,
            index: i as u64,
            offset: 0,
        })
        .collect()
}
