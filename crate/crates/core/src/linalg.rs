//! Exact integer linear algebra: Hermite and Smith normal forms with
//! unimodular witnesses, integer kernels, determinants and ranks.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix stored by rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
    cols: usize,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>, cols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        IntMatrix { rows, cols }
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(rows, cols)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows: vec![vec![BigInt::zero(); cols]; rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = BigInt::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                t.rows[j][i] = x.clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.nrows(), "matrix shapes do not compose");
        let mut out = Self::zeros(self.nrows(), other.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.rows[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.rows[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows.iter().map(|r| crate::point::dot(r, v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, x)| i == j || x.is_zero()))
    }

    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.nrows(), self.cols, "determinant of a non-square matrix");
        bareiss(self.rows.clone(), self.cols).1
    }

    pub fn rank(&self) -> usize {
        bareiss(self.rows.clone(), self.cols).0
    }

    pub fn is_unimodular(&self) -> bool {
        self.nrows() == self.cols && self.determinant().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for r in self.rows.iter_mut() {
            r.swap(a, b);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.rows[i].iter_mut() {
            *x = -&*x;
        }
    }

    /// row[i] -= q * row[k]
    fn row_submul(&mut self, i: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self.rows[k][j] * q;
            self.rows[i][j] -= t;
        }
    }

    /// col[j] -= q * col[k]
    fn col_submul(&mut self, j: usize, k: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in self.rows.iter_mut() {
            let t = &r[k] * q;
            r[j] -= t;
        }
    }

    /// Replaces rows (a, b) by (s*ra + t*rb, u*ra + v*rb).
    fn row_combine(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let ra = self.rows[a][j].clone();
            let rb = self.rows[b][j].clone();
            self.rows[a][j] = s * &ra + t * &rb;
            self.rows[b][j] = u * &ra + v * &rb;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Fraction-free elimination; returns (rank, determinant-if-square-else-0).
fn bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> (usize, BigInt) {
    let m = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for i in rank + 1..m {
            for j in col + 1..cols {
                let v = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    let det = if m == cols && rank == m {
        if m == 0 {
            BigInt::one()
        } else {
            sign * &a[m - 1][m - 1]
        }
    } else {
        BigInt::zero()
    };
    (rank, det)
}

/// Row-style Hermite normal form `H = U * M` with `U` unimodular.
#[derive(Clone, Debug)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub rank: usize,
    /// Pivot column of each nonzero row of `h`.
    pub pivots: Vec<usize>,
}

/// Smith normal form `S = P * M * Q` with `P`, `Q` unimodular.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.s.nrows().min(self.s.ncols()))
            .map(|i| self.s.get(i, i).clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn hermite_form(m: &IntMatrix) -> HermiteForm {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.nrows());
    let nrows = m.nrows();
    let mut r = 0;
    let mut pivots = Vec::new();
    for j in 0..m.ncols() {
        if r == nrows {
            break;
        }
        for i in r + 1..nrows {
            if h.rows[i][j].is_zero() {
                continue;
            }
            let a = h.rows[r][j].clone();
            let b = h.rows[i][j].clone();
            if a.is_zero() {
                h.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let eg = a.extended_gcd(&b);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let ua = -(&b / &g);
            let va = &a / &g;
            h.row_combine(r, i, &s, &t, &ua, &va);
            u.row_combine(r, i, &s, &t, &ua, &va);
        }
        if h.rows[r][j].is_zero() {
            continue;
        }
        if h.rows[r][j].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h.rows[r][j].clone();
        for i in 0..r {
            let q = h.rows[i][j].div_floor(&pivot);
            h.row_submul(i, r, &q);
            u.row_submul(i, r, &q);
        }
        pivots.push(j);
        r += 1;
    }
    HermiteForm {
        h,
        u,
        rank: r,
        pivots,
    }
}

pub fn smith_form(m: &IntMatrix) -> SmithForm {
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut s = m.clone();
    let mut p = IntMatrix::identity(nr);
    let mut q = IntMatrix::identity(nc);
    for t in 0..nr.min(nc) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    let x = &s.rows[i][j];
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < s.rows[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_smith(s, p, q);
            };
            s.swap_rows(t, bi);
            p.swap_rows(t, bi);
            s.swap_cols(t, bj);
            q.swap_cols(t, bj);
            let mut dirty = false;
            for i in t + 1..nr {
                if s.rows[i][t].is_zero() {
                    continue;
                }
                let quo = s.rows[i][t].div_floor(&s.rows[t][t]);
                s.row_submul(i, t, &quo);
                p.row_submul(i, t, &quo);
                dirty |= !s.rows[i][t].is_zero();
            }
            for j in t + 1..nc {
                if s.rows[t][j].is_zero() {
                    continue;
                }
                let quo = s.rows[t][j].div_floor(&s.rows[t][t]);
                s.col_submul(j, t, &quo);
                q.col_submul(j, t, &quo);
                dirty |= !s.rows[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // enforce the divisibility chain
            let pivot = s.rows[t][t].clone();
            let offender = (t + 1..nr).find(|&i| {
                (t + 1..nc).any(|j| !s.rows[i][j].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => {
                    // row t += row i, then re-reduce
                    let neg_one = -BigInt::one();
                    s.row_submul(t, i, &neg_one);
                    p.row_submul(t, i, &neg_one);
                }
                None => break,
            }
        }
        if s.rows[t][t].is_negative() {
            s.negate_row(t);
            p.negate_row(t);
        }
    }
    finish_smith(s, p, q)
}

fn finish_smith(mut s: IntMatrix, mut p: IntMatrix, q: IntMatrix) -> SmithForm {
    for t in 0..s.nrows().min(s.ncols()) {
        if s.rows[t][t].is_negative() {
            s.negate_row(t);
            p.negate_row(t);
        }
    }
    SmithForm { s, p, q }
}

/// A Z-basis (as rows) of `{x in Z^n : M x = 0}`, in Hermite normal form.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let n = m.ncols();
    if m.nrows() == 0 {
        return IntMatrix::identity(n);
    }
    let hf = hermite_form(&m.transpose());
    let rows: Vec<Vec<BigInt>> = hf.u.rows[hf.rank..].to_vec();
    if rows.is_empty() {
        return IntMatrix::new(Vec::new(), n);
    }
    hermite_basis(&IntMatrix::new(rows, n))
}

/// The nonzero rows of the Hermite form: a canonical basis of the row lattice.
pub fn hermite_basis(m: &IntMatrix) -> IntMatrix {
    let hf = hermite_form(m);
    IntMatrix::new(hf.h.rows[..hf.rank].to_vec(), m.ncols())
}

/// Solves `A x = b` over the rationals for square nonsingular `A`.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(p, col);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= p * &f;
                }
            }
        }
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Indices of a maximal linearly independent subset of `rows`, chosen greedily in order.
pub fn independent_rows(rows: &[Vec<BigInt>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial = basis.clone();
        trial.push(r.clone());
        let cols = r.len();
        if bareiss(trial.clone(), cols).0 == trial.len() {
            basis = trial;
            chosen.push(i);
        }
    }
    chosen
}

pub fn to_rational_rows(rows: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn check_smith(a: &IntMatrix) -> SmithForm {
        let sf = smith_form(a);
        assert!(sf.p.is_unimodular());
        assert!(sf.q.is_unimodular());
        assert_eq!(sf.p.mul(a).mul(&sf.q), sf.s);
        assert!(sf.s.is_diagonal());
        let d = sf.invariant_factors();
        for w in d.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken: {d:?}");
        }
        assert!(d.iter().all(|x| x.is_positive()));
        sf
    }

    #[test]
    fn smith_of_identity_and_zero() {
        let id = IntMatrix::identity(3);
        assert_eq!(check_smith(&id).s, id);
        let z = IntMatrix::zeros(2, 3);
        assert!(check_smith(&z).s.is_zero());
        assert!(hermite_form(&z).h.is_zero());
    }

    #[test]
    fn smith_of_diag_2_3_is_1_6() {
        let sf = check_smith(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(sf.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn hermite_witness_multiplies_back() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let hf = hermite_form(&a);
        assert!(hf.u.is_unimodular());
        assert_eq!(hf.u.mul(&a), hf.h);
        // pivots positive, entries above them reduced
        for (r, &c) in hf.pivots.iter().enumerate() {
            let p = hf.h.get(r, c);
            assert!(p.is_positive());
            for i in 0..r {
                let x = hf.h.get(i, c);
                assert!(!x.is_negative() && x < p);
            }
        }
        assert_eq!(a.determinant().abs(), hf.h.determinant().abs());
    }

    #[test]
    fn kernel_of_simplex_edges() {
        // rows are edge vectors of conv(0, e1, e2, (1,1,2)); full rank => trivial kernel
        let a = m(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]);
        assert_eq!(integer_kernel(&a).nrows(), 0);
        let b = m(&[&[1, 1, 0]]);
        let k = integer_kernel(&b);
        assert_eq!(k.nrows(), 2);
        for r in k.rows() {
            assert!(b.apply(r).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn determinant_and_rank() {
        assert_eq!(m(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]).determinant(), BigInt::from(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), BigInt::from(-1));
    }

    proptest::proptest! {
        #[test]
        fn smith_and_hermite_witnesses(entries in proptest::collection::vec(-9i64..=9, 12), rows in 1usize..=4) {
            let cols = 12 / rows.max(1);
            let cols = cols.min(4);
            let data: Vec<Vec<BigInt>> = (0..rows)
                .map(|i| (0..cols).map(|j| BigInt::from(entries[i * cols + j])).collect())
                .collect();
            let a = IntMatrix::new(data, cols);
            let sf = check_smith(&a);
            let hf = hermite_form(&a);
            proptest::prop_assert_eq!(hf.u.mul(&a), hf.h);
            proptest::prop_assert_eq!(sf.rank(), a.rank());
            proptest::prop_assert_eq!(hf.rank, a.rank());
        }
    }
}
