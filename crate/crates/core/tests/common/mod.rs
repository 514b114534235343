//! Brute-force oracles shared by the integration tests. They use small
//! machine integers and exhaustive enumeration, independent of the library's
//! hull, Hilbert basis and enumeration code.

#![allow(dead_code)]

use normwalk::{LatticePoint, LatticePolytope};
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn to_i64(p: &LatticePoint) -> Vec<i64> {
    p.coords().iter().map(|x| x.to_i64().expect("small coordinate")).collect()
}

pub fn pt(x: &[i64]) -> LatticePoint {
    LatticePoint::from_i64s(x)
}

/// Determinant by fraction-free elimination (Bareiss).
pub fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(r) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return 0;
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = *x * pivot[c] - y * f;
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(i: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in i..n {
            cur.push(j);
            go(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Membership in the cone spanned by full-rank `gens`. Facet normals are
/// found by brute force: cofactor normals of every `d - 1` generators that
/// leave all generators on one side.
pub struct ConeOracle {
    normals: Vec<Vec<i128>>,
}

impl ConeOracle {
    pub fn new(gens: &[Vec<i64>]) -> Self {
        let d = gens[0].len();
        let g: Vec<Vec<i128>> = gens.iter().map(|x| x.iter().map(|&c| c as i128).collect()).collect();
        let mut normals = Vec::new();
        for s in subsets(g.len(), d - 1) {
            // normal_k = cofactor of column k in the matrix [rows s; e_k]
            let n: Vec<i128> = (0..d)
                .map(|k| {
                    let mut m: Vec<Vec<i128>> = s.iter().map(|&i| g[i].clone()).collect();
                    m.push((0..d).map(|j| i128::from(j == k)).collect());
                    det(&m)
                })
                .collect();
            if n.iter().all(|&c| c == 0) {
                continue;
            }
            let dots: Vec<i128> = g.iter().map(|x| x.iter().zip(&n).map(|(a, b)| a * b).sum()).collect();
            let n = if dots.iter().all(|&t| t >= 0) {
                n
            } else if dots.iter().all(|&t| t <= 0) {
                n.iter().map(|c| -c).collect()
            } else {
                continue;
            };
            if !normals.contains(&n) {
                normals.push(n);
            }
        }
        ConeOracle { normals }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.normals
            .iter()
            .all(|n| n.iter().zip(x).map(|(a, &b)| a * b as i128).sum::<i128>() >= 0)
    }
}

/// Hilbert basis of a full-dimensional pointed cone: lattice points of the
/// zonotope of the generators, minus every point that splits off another one.
pub fn hilbert_basis_oracle(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = gens[0].len();
    let cone = ConeOracle::new(gens);
    let lo: Vec<i64> = (0..d).map(|i| gens.iter().map(|g| g[i].min(0)).sum()).collect();
    let hi: Vec<i64> = (0..d).map(|i| gens.iter().map(|g| g[i].max(0)).sum()).collect();
    let cands: Vec<Vec<i64>> = box_points(&lo, &hi)
        .into_iter()
        .filter(|x| x.iter().any(|&c| c != 0) && cone.contains(x))
        .collect();
    let mut out: Vec<Vec<i64>> = cands
        .iter()
        .filter(|x| {
            !cands.iter().any(|y| {
                let diff: Vec<i64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
                diff.iter().any(|&c| c != 0) && y != *x && cone.contains(&diff)
            })
        })
        .cloned()
        .collect();
    out.sort();
    out
}

pub fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for (a, b) in lo.iter().zip(hi) {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (*a..=*b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Lattice points of `conv(points)` for a full-dimensional point set,
/// via membership of `(x, 1)` in the cone over the points.
pub fn lattice_points_oracle(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = points[0].len();
    let lifted: Vec<Vec<i64>> = points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(1);
            q
        })
        .collect();
    let cone = ConeOracle::new(&lifted);
    let lo: Vec<i64> = (0..d).map(|i| points.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..d).map(|i| points.iter().map(|p| p[i]).max().unwrap()).collect();
    box_points(&lo, &hi)
        .into_iter()
        .filter(|x| {
            let mut y = x.clone();
            y.push(1);
            cone.contains(&y)
        })
        .collect()
}

/// Integral closure by Minkowski sums: every lattice point of `cP` for
/// `c = 2..=c_max` is a sum of `c` lattice points of `P`.
pub fn ic_oracle(points: &[Vec<i64>], c_max: i64) -> bool {
    use std::collections::BTreeSet;
    let base: BTreeSet<Vec<i64>> = lattice_points_oracle(points).into_iter().collect();
    let mut sums = base.clone();
    for c in 2..=c_max {
        sums = sums
            .iter()
            .flat_map(|s| base.iter().map(move |b| s.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>()))
            .collect();
        let dilated: Vec<Vec<i64>> = points.iter().map(|p| p.iter().map(|x| x * c).collect()).collect();
        if lattice_points_oracle(&dilated).iter().any(|z| !sums.contains(z)) {
            return false;
        }
    }
    true
}

pub fn random_points(r: &mut ChaCha8Rng, n: usize, d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..d).map(|_| r.gen_range(lo..=hi)).collect()).collect()
}

pub fn hull(points: &[Vec<i64>]) -> LatticePolytope {
    LatticePolytope::convex_hull(points.iter().map(|p| pt(p))).expect("nonempty")
}

/// A full-dimensional polytope from `n` random points in `[lo, hi]^d`.
pub fn random_full(r: &mut ChaCha8Rng, n: usize, d: usize, lo: i64, hi: i64) -> LatticePolytope {
    loop {
        let p = hull(&random_points(r, n, d, lo, hi));
        if p.is_full_dimensional() {
            return p;
        }
    }
}

/// A random full-dimensional pointed cone with `n` generators.
pub fn random_cone(r: &mut ChaCha8Rng, d: usize, n: usize, bound: i64) -> Vec<Vec<i64>> {
    loop {
        let gens = random_points(r, n, d, -bound, bound);
        if gens.iter().any(|g| g.iter().all(|&x| x == 0)) || rank(&gens) < d {
            continue;
        }
        if normwalk::cone::RationalCone::new(gens.iter().map(|g| pt(g))).is_ok() {
            return gens;
        }
    }
}

/// Product of `k` random elementary matrices `I ± E_ij`.
pub fn random_unimodular(r: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..k {
        let i = r.gen_range(0..d);
        let j = (i + r.gen_range(1..d)) % d;
        let s = if r.gen_bool(0.5) { 1 } else { -1 };
        for row in m.iter_mut() {
            row[j] += s * row[i];
        }
    }
    m
}

/// Integer box containing `{z : <u_i, z> >= b_i - j}` for the facets of a
/// full-dimensional `P`: floors and ceilings of every feasible intersection
/// of `d` relaxed facet hyperplanes.
pub fn relaxed_box(p: &LatticePolytope, j: i64) -> (Vec<i64>, Vec<i64>) {
    let d = p.ambient_dim();
    let rows: Vec<(Vec<i128>, i128)> = p
        .facets()
        .iter()
        .map(|f| {
            (
                f.normal.iter().map(|x| x.to_i128().unwrap()).collect(),
                f.offset.to_i128().unwrap() - j as i128,
            )
        })
        .collect();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for s in subsets(rows.len(), d) {
        let m: Vec<Vec<i128>> = s.iter().map(|&i| rows[i].0.clone()).collect();
        let dt = det(&m);
        if dt == 0 {
            continue;
        }
        let x: Vec<i128> = (0..d)
            .map(|k| {
                let mk: Vec<Vec<i128>> = s
                    .iter()
                    .map(|&i| {
                        let mut r = rows[i].0.clone();
                        r[k] = rows[i].1;
                        r
                    })
                    .collect();
                det(&mk)
            })
            .collect();
        // feasible: <u, x/dt> >= b for every row
        let feasible = rows.iter().all(|(u, b)| {
            let lhs: i128 = u.iter().zip(&x).map(|(a, c)| a * c).sum();
            if dt > 0 { lhs >= b * dt } else { lhs <= b * dt }
        });
        if feasible {
            for k in 0..d {
                let (num, den) = if dt > 0 { (x[k], dt) } else { (-x[k], -dt) };
                let floor = num.div_euclid(den) as i64;
                let ceil = floor + i64::from(num.rem_euclid(den) != 0);
                lo[k] = lo[k].min(floor);
                hi[k] = hi[k].max(ceil);
            }
        }
    }
    (lo, hi)
}
