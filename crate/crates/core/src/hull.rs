//! Double-description enumeration of extreme rays and pulling triangulations.
//!
//! Both routines work on homogeneous data: a polytope is handled through the
//! cone over its points placed at height one.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::linalg::{independent_rows, solve_rational, to_rational_rows, IntMatrix};
use crate::point::{dot, primitive};

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn contains_all(&self, sub: &Bits) -> bool {
        self.0.iter().zip(&sub.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    v: Vec<BigInt>,
    zeros: Bits,
}

/// Primitive extreme rays of `{ y : <a, y> >= 0 for every row a }`.
///
/// The rows must span the ambient space, which makes the cone pointed.
/// Returns `None` if they do not.
pub(crate) fn extreme_rays(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<BigInt>>> {
    let n = rows.first()?.len();
    let rows: Vec<Vec<BigInt>> = {
        let mut seen = BTreeSet::new();
        rows.iter()
            .map(|r| primitive(r.clone()))
            .filter(|r| !r.iter().all(Zero::is_zero) && seen.insert(r.clone()))
            .collect()
    };
    let basis = independent_rows(&rows);
    if basis.len() < n {
        return None;
    }
    let total = rows.len();
    let a0 = to_rational_rows(&basis.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>());
    let mut rays: Vec<Ray> = Vec::with_capacity(n);
    for k in 0..n {
        let mut e = vec![BigRational::zero(); n];
        e[k] = BigRational::one();
        let sol = solve_rational(&a0, &e)?;
        let v = primitive(clear_denominators(&sol));
        let mut zeros = Bits::new(total);
        for (kk, &bi) in basis.iter().enumerate() {
            if kk != k {
                zeros.set(bi);
            }
        }
        rays.push(Ray { v, zeros });
    }
    let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
    for (idx, row) in rows.iter().enumerate() {
        if in_basis.contains(&idx) {
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(row, &r.v)).collect();
        if vals.iter().all(|x| !x.is_negative()) {
            for (r, x) in rays.iter_mut().zip(&vals) {
                if x.is_zero() {
                    r.zeros.set(idx);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zeros.and(&rays[q].zeros);
                if common.count() + 2 < n {
                    continue;
                }
                let blocked = rays
                    .iter()
                    .enumerate()
                    .any(|(i, r)| i != p && i != q && r.zeros.contains_all(&common));
                if blocked {
                    continue;
                }
                let v: Vec<BigInt> = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(a, b)| &vals[p] * a - &vals[q] * b)
                    .collect();
                let mut zeros = common;
                zeros.set(idx);
                fresh.push(Ray {
                    v: primitive(v),
                    zeros,
                });
            }
        }
        let mut kept: Vec<Ray> = Vec::with_capacity(rays.len() + fresh.len());
        for (mut r, x) in rays.into_iter().zip(vals) {
            if x.is_negative() {
                continue;
            }
            if x.is_zero() {
                r.zeros.set(idx);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }
    let mut out: Vec<Vec<BigInt>> = rays.into_iter().map(|r| r.v).collect();
    out.sort();
    out.dedup();
    Some(out)
}

pub(crate) fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v
        .iter()
        .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    v.iter()
        .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Rank of a subset of vectors.
pub(crate) fn rank_of(vectors: &[Vec<BigInt>], subset: &[usize]) -> usize {
    if subset.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<BigInt>> = subset.iter().map(|&i| vectors[i].clone()).collect();
    let cols = rows[0].len();
    IntMatrix::new(rows, cols).rank()
}

/// Pulling triangulation of a pointed cone.
///
/// `gens` are the extreme rays (one generator per ray), `facets` lists the
/// generator indices on each facet, `rank` is the dimension of the cone.
/// Each returned simplex is a sorted list of `rank` generator indices.
pub(crate) fn pulling_triangulation(
    gens: &[Vec<BigInt>],
    facets: &[Vec<usize>],
    rank: usize,
) -> Vec<Vec<usize>> {
    let face: Vec<usize> = (0..gens.len()).collect();
    let mut out = Vec::new();
    pull(gens, facets, &face, rank, &mut Vec::new(), &mut out);
    for s in out.iter_mut() {
        s.sort();
    }
    out.sort();
    out
}

fn pull(
    gens: &[Vec<BigInt>],
    facets: &[Vec<usize>],
    face: &[usize],
    rank: usize,
    apexes: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == rank {
        let mut s = apexes.clone();
        s.extend_from_slice(face);
        out.push(s);
        return;
    }
    let v0 = face[0];
    let mut subfaces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in facets {
        let g: Vec<usize> = face.iter().copied().filter(|i| f.contains(i)).collect();
        if g.is_empty() || g.len() == face.len() || g.contains(&v0) {
            continue;
        }
        if subfaces.contains(&g) {
            continue;
        }
        if rank_of(gens, &g) == rank - 1 {
            subfaces.insert(g);
        }
    }
    apexes.push(v0);
    for g in subfaces {
        pull(gens, facets, &g, rank - 1, apexes, out);
    }
    apexes.pop();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn square_facets_via_homogenized_dual() {
        // rows (y, 1) for the unit square; rays (w, beta) are facets <w,y> >= -beta
        let rows = vec![v(&[0, 0, 1]), v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 1])];
        let rays = extreme_rays(&rows).unwrap();
        assert_eq!(
            rays,
            vec![v(&[-1, 0, 1]), v(&[0, -1, 1]), v(&[0, 1, 0]), v(&[1, 0, 0])]
        );
    }

    #[test]
    fn degenerate_rows_rejected() {
        assert!(extreme_rays(&[v(&[1, 0]), v(&[2, 0])]).is_none());
    }

    #[test]
    fn octahedron_has_eight_facets() {
        let mut rows = Vec::new();
        for i in 0..3 {
            for s in [-1, 1] {
                let mut p = vec![0i64; 4];
                p[i] = s;
                p[3] = 1;
                rows.push(v(&p));
            }
        }
        assert_eq!(extreme_rays(&rows).unwrap().len(), 8);
    }

    #[test]
    fn square_triangulates_into_two() {
        let gens = vec![v(&[0, 0, 1]), v(&[0, 1, 1]), v(&[1, 0, 1]), v(&[1, 1, 1])];
        let facets = vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]];
        let t = pulling_triangulation(&gens, &facets, 3);
        assert_eq!(t, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }
}
