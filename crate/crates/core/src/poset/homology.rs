use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::{smith_form, IntMatrix};

/// Integral homology of a simplicial complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Homology {
    /// `betti[k]` is the rank of `H_k`.
    pub betti: Vec<usize>,
    /// Torsion coefficients of `H_k` (invariant factors greater than one).
    #[serde(serialize_with = "ser_torsion")]
    pub torsion: Vec<Vec<BigInt>>,
}

fn ser_torsion<S: serde::Serializer>(t: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(
        t.iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
    )
}

/// Homology of the complex whose `k`-simplices are `simplices[k]`, each a
/// sorted vertex list. The complex must be closed under taking faces.
pub fn homology(simplices: &[Vec<Vec<usize>>]) -> Homology {
    let top = simplices.len();
    let index: Vec<HashMap<&[usize], usize>> = simplices
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect())
        .collect();
    // (rank, invariant factors > 1) of the boundary map C_k -> C_{k-1}
    let mut ranks = vec![0usize; top + 1];
    let mut torsion_of = vec![Vec::new(); top + 1];
    for k in 1..top {
        let cols: Vec<BTreeMap<usize, BigInt>> = simplices[k]
            .iter()
            .map(|s| {
                let mut col = BTreeMap::new();
                for i in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(i);
                    let row = index[k - 1][face.as_slice()];
                    let sign = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    col.insert(row, sign);
                }
                col
            })
            .collect();
        let (r, t) = integer_rank(cols);
        ranks[k] = r;
        torsion_of[k] = t;
    }
    let betti = (0..top)
        .map(|k| simplices[k].len() - ranks[k] - ranks[k + 1])
        .collect();
    let torsion = (0..top).map(|k| torsion_of[k + 1].clone()).collect();
    Homology { betti, torsion }
}

/// Rank and nontrivial invariant factors of a sparse integer matrix given by
/// columns. Unit pivots are eliminated first; whatever remains goes through
/// a dense Smith normal form.
fn integer_rank(mut cols: Vec<BTreeMap<usize, BigInt>>) -> (usize, Vec<BigInt>) {
    let mut rows: HashMap<usize, HashSet<usize>> = HashMap::new();
    for (c, col) in cols.iter().enumerate() {
        for &r in col.keys() {
            rows.entry(r).or_default().insert(c);
        }
    }
    let mut alive: Vec<bool> = vec![true; cols.len()];
    let mut rank = 0;
    let mut progress = true;
    while progress {
        progress = false;
        for c in 0..cols.len() {
            if !alive[c] {
                continue;
            }
            if cols[c].is_empty() {
                alive[c] = false;
                continue;
            }
            let Some((&r, v)) = cols[c].iter().find(|(_, v)| v.abs().is_one()) else {
                continue;
            };
            let v = v.clone();
            let pivot = std::mem::take(&mut cols[c]);
            alive[c] = false;
            for &rr in pivot.keys() {
                if let Some(set) = rows.get_mut(&rr) {
                    set.remove(&c);
                }
            }
            let others: Vec<usize> = rows.get(&r).map(|s| s.iter().copied().collect()).unwrap_or_default();
            for o in others {
                // column o -= (a / v) * pivot, with v = ±1
                let factor = &cols[o][&r] * &v;
                for (rr, pv) in &pivot {
                    let e = cols[o].entry(*rr).or_insert_with(BigInt::zero);
                    *e -= &factor * pv;
                    if e.is_zero() {
                        cols[o].remove(rr);
                        rows.get_mut(rr).expect("row").remove(&o);
                    } else {
                        rows.entry(*rr).or_default().insert(o);
                    }
                }
            }
            // row r now only meets the removed pivot column
            rows.remove(&r);
            rank += 1;
            progress = true;
        }
    }
    let rest: Vec<&BTreeMap<usize, BigInt>> = cols
        .iter()
        .zip(&alive)
        .filter(|(c, a)| **a && !c.is_empty())
        .map(|(c, _)| c)
        .collect();
    if rest.is_empty() {
        return (rank, Vec::new());
    }
    let row_ids: Vec<usize> = {
        let mut v: Vec<usize> = rest.iter().flat_map(|c| c.keys().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let pos: HashMap<usize, usize> = row_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); rest.len()]; row_ids.len()];
    for (j, col) in rest.iter().enumerate() {
        for (r, v) in col.iter() {
            dense[pos[r]][j] = v.clone();
        }
    }
    let sf = smith_form(&IntMatrix::new(dense, rest.len()));
    let factors = sf.invariant_factors();
    let torsion = factors.iter().filter(|f| !f.is_one()).cloned().collect();
    (rank + factors.len(), torsion)
}
