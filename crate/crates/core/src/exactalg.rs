//! Exact rational scalars and dense matrices.
//!
//! Everything downstream (matrix forms, cone read-off, Smith normal form) runs
//! on [`Rational`] entries; there is no floating point in this module.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: &Rational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Converts an integral rational to `i64`, if it fits.
pub fn to_i64(x: &Rational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Shape(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    ncols
                )));
            }
            data.extend(row);
        }
        Ok(RatMatrix {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds a matrix from integer rows. Panics on ragged input; meant for
    /// literals in code and tests.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| rat_vec(r.as_ref())).collect();
        Self::from_rows(rows).expect("ragged integer matrix literal")
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != nrows {
                return Err(Error::Shape(format!("column {} has wrong length", j + 1)));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Rational::is_integer)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    /// Submatrix on the given row and column index lists (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} ", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                write!(f, " {:>width$}", cells[i * self.cols + j], width = width)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Exact determinant by fraction-carrying Gaussian elimination.
pub fn mat_det(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let pivot = a[(c, c)].clone();
        det *= &pivot;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let factor = &a[(i, c)] / &pivot;
            for j in c..n {
                let delta = &factor * &a[(c, j)];
                a[(i, j)] -= delta;
            }
        }
    }
    Ok(det)
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn mat_inverse(m: &RatMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "inverse of non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = RatMatrix::identity(n);
    for c in 0..n {
        let p = (c..n).find(|&i| !a[(i, c)].is_zero()).ok_or(Error::Singular)?;
        a.swap_rows(p, c);
        inv.swap_rows(p, c);
        let pivot = a[(c, c)].clone();
        for j in 0..n {
            a[(c, j)] /= &pivot;
            inv[(c, j)] /= &pivot;
        }
        for i in 0..n {
            if i == c || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in 0..n {
                let da = &factor * &a[(c, j)];
                a[(i, j)] -= da;
                let di = &factor * &inv[(c, j)];
                inv[(i, j)] -= di;
            }
        }
    }
    Ok(inv)
}

/// Gaussian column elimination with `m[pivot_row, pivot_col]` as the pivot:
/// every other column `s` loses `m[pivot_row, s] / pivot` times the pivot column.
pub fn column_pivot_eliminate(
    m: &RatMatrix,
    pivot_row: usize,
    pivot_col: usize,
) -> Result<RatMatrix> {
    let mut out = m.clone();
    let cols: Vec<usize> = (0..m.cols).collect();
    eliminate_columns(&mut out, pivot_row, pivot_col, &cols)?;
    Ok(out)
}

/// In-place column elimination restricted to `cols` (the pivot column is skipped
/// if present). Only rows where the pivot column is nonzero are touched.
pub(crate) fn eliminate_columns(
    m: &mut RatMatrix,
    pivot_row: usize,
    pivot_col: usize,
    cols: &[usize],
) -> Result<()> {
    if pivot_row >= m.rows || pivot_col >= m.cols {
        return Err(Error::Shape(format!(
            "pivot ({}, {}) outside {}x{} matrix",
            pivot_row + 1,
            pivot_col + 1,
            m.rows,
            m.cols
        )));
    }
    let pivot = m[(pivot_row, pivot_col)].clone();
    if pivot.is_zero() {
        return Err(Error::ZeroPivot {
            row: pivot_row + 1,
            col: pivot_col + 1,
        });
    }
    let support: Vec<(usize, Rational)> = (0..m.rows)
        .filter(|&i| !m[(i, pivot_col)].is_zero())
        .map(|i| (i, m[(i, pivot_col)].clone()))
        .collect();
    for &s in cols {
        if s == pivot_col || m[(pivot_row, s)].is_zero() {
            continue;
        }
        let factor = &m[(pivot_row, s)] / &pivot;
        for (i, x) in &support {
            if *i == pivot_row {
                m[(*i, s)] = Rational::zero();
            } else {
                let delta = &factor * x;
                m[(*i, s)] -= delta;
            }
        }
    }
    Ok(())
}

/// Exact rank over the rationals.
pub fn mat_rank(m: &RatMatrix) -> usize {
    let mut a = m.clone();
    let mut rank = 0;
    for c in 0..a.cols {
        if rank == a.rows {
            break;
        }
        let Some(p) = (rank..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, rank);
        let pivot = a[(rank, c)].clone();
        for i in rank + 1..a.rows {
            if a[(i, c)].is_zero() {
                continue;
            }
            let factor = &a[(i, c)] / &pivot;
            for j in c..a.cols {
                let delta = &factor * &a[(rank, j)];
                a[(i, j)] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Smith normal form `U·A₁·V = H` of a nonsingular integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: RatMatrix,
    pub h: RatMatrix,
    pub v: RatMatrix,
}

impl SnfResult {
    /// Diagonal entries `h₁ | h₂ | … | h_r`.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.h.rows())
            .map(|i| self.h[(i, i)].to_integer())
            .collect()
    }
}

struct IntMat {
    n: usize,
    a: Vec<Vec<BigInt>>,
}

impl IntMat {
    fn identity(n: usize) -> Self {
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        IntMat { n, a }
    }

    // row_dst += k * row_src
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.n {
            let delta = &self.a[src][j] * k;
            self.a[dst][j] += delta;
        }
    }

    // col_dst += k * col_src
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.n {
            let delta = &self.a[i][src] * k;
            self.a[i][dst] += delta;
        }
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        for row in &mut self.a {
            row.swap(x, y);
        }
    }

    fn to_rat(&self) -> RatMatrix {
        RatMatrix::from_rows(
            self.a
                .iter()
                .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
                .collect(),
        )
        .expect("square integer matrix")
    }
}

/// Smith normal form by repeated gcd reduction: move a minimal nonzero entry to
/// the pivot, clear its row and column, then restore divisibility by folding a
/// non-divisible row into the pivot row.
pub fn smith_normal_form(a1: &RatMatrix) -> Result<SnfResult> {
    if !a1.is_square() {
        return Err(Error::Shape(format!(
            "Smith normal form of non-square {}x{} matrix",
            a1.rows(),
            a1.cols()
        )));
    }
    if !a1.is_integral() {
        return Err(Error::Domain("Smith normal form needs integer entries".into()));
    }
    if mat_det(a1)?.is_zero() {
        return Err(Error::Domain("Smith normal form of a singular matrix".into()));
    }
    let n = a1.rows();
    let mut h = IntMat {
        n,
        a: (0..n)
            .map(|i| a1.row(i).iter().map(Rational::to_integer).collect())
            .collect(),
    };
    let mut u = IntMat::identity(n);
    let mut v = IntMat::identity(n);

    for t in 0..n {
        loop {
            // minimal |entry| in the trailing block
            let (mut pi, mut pj) = (t, t);
            let mut best: Option<BigInt> = None;
            for i in t..n {
                for j in t..n {
                    let x = h.a[i][j].abs();
                    if !x.is_zero() && best.as_ref().is_none_or(|b| &x < b) {
                        best = Some(x);
                        pi = i;
                        pj = j;
                    }
                }
            }
            if best.is_none() {
                return Err(Error::Invariant("singular block during SNF".into()));
            }
            h.a.swap(t, pi);
            u.a.swap(t, pi);
            h.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..n {
                if h.a[i][t].is_zero() {
                    continue;
                }
                let q = h.a[i][t].div_floor(&h.a[t][t]);
                let k = -q;
                h.add_row(i, t, &k);
                u.add_row(i, t, &k);
                if !h.a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if h.a[t][j].is_zero() {
                    continue;
                }
                let q = h.a[t][j].div_floor(&h.a[t][t]);
                let k = -q;
                h.add_col(j, t, &k);
                v.add_col(j, t, &k);
                if !h.a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = h.a[t][t].clone();
            let bad = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !h.a[i][j].is_multiple_of(&pivot));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    h.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if h.a[t][t].is_negative() {
            for j in 0..n {
                h.a[t][j] = -h.a[t][j].clone();
                u.a[t][j] = -u.a[t][j].clone();
            }
        }
    }

    Ok(SnfResult {
        u: u.to_rat(),
        h: h.to_rat(),
        v: v.to_rat(),
    })
}
