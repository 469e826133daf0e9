//! Matrix forms `M_k⟨I;J⟩`: the working state of constant-term elimination.
//!
//! A form is the `(n+r)×(n+1)` matrix whose first `n` columns encode the
//! denominator factors `1 − (y,Λ)^{γ_j}` and whose last column encodes the
//! numerator monomial. Eliminating `λ_i` through column `j` is a Gaussian column
//! operation with the `(n+i, j)` entry as pivot, after which row `n+i` and column
//! `j` are retired.
//!
//! Row indices `i` passed to this module are 0-based λ indices (`0..r`), column
//! indices `j` are 0-based variable indices (`0..n`).

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{eliminate_columns, mat_rank, signum, RatMatrix, Rational};

/// Orientation of the iterated Laurent series field.
///
/// `Forward` is the field `G` with variable order `[y₁,…,y_n,λ₁,…,λ_r]`.
/// `Reversed` is its mirror `Ḡ`, where every monomial that is small in `G`
/// is large, and vice versa.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Field {
    #[default]
    Forward,
    Reversed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smallness {
    Small,
    Large,
    Zero,
}

/// Classifies the monomial `y^v` by the sign of its first nonzero exponent,
/// scanning coordinates in `var_order`.
pub fn monomial_smallness(v: &[Rational], var_order: &[usize]) -> Smallness {
    for &k in var_order {
        let x = &v[k];
        if x.is_positive() {
            return Smallness::Small;
        }
        if x.is_negative() {
            return Smallness::Large;
        }
    }
    Smallness::Zero
}

/// [`monomial_smallness`] in the natural variable order.
pub fn smallness(v: &[Rational]) -> Smallness {
    let order: Vec<usize> = (0..v.len()).collect();
    monomial_smallness(v, &order)
}

/// Smallness of `y^v` in the given field.
pub fn smallness_in(v: &[Rational], field: Field) -> Smallness {
    match (smallness(v), field) {
        (Smallness::Small, Field::Reversed) => Smallness::Large,
        (Smallness::Large, Field::Reversed) => Smallness::Small,
        (s, _) => s,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnClass {
    NotContributing,
    Contributing,
    DuallyContributing,
}

/// Which extraction formula to apply when eliminating one `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Contributing,
    Dual,
}

impl Formula {
    fn name(self) -> &'static str {
        match self {
            Formula::Contributing => "contributing",
            Formula::Dual => "dual",
        }
    }
}

/// A column count that becomes infinite when its formula does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(usize),
    Infinite,
}

impl Count {
    pub fn is_finite(self) -> bool {
        matches!(self, Count::Finite(_))
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Infinite => write!(f, "∞"),
        }
    }
}

/// Number of contributing (`c`) and dually contributing (`d`) columns for one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountPair {
    pub c: Count,
    pub d: Count,
}

impl CountPair {
    pub fn min(self) -> Count {
        self.c.min(self.d)
    }
}

#[derive(Clone)]
pub struct MatrixForm {
    n: usize,
    r: usize,
    entries: RatMatrix,
    ignored_rows: BTreeSet<usize>,
    ignored_cols: BTreeSet<usize>,
    field: Field,
}

/// Builds `[[id_n, 0], [A, −b]]` with nothing ignored.
pub fn build_initial(a: &RatMatrix, b: &[Rational]) -> Result<MatrixForm> {
    let (r, n) = (a.rows(), a.cols());
    if b.len() != r {
        return Err(Error::Shape(format!(
            "right-hand side has length {}, expected {}",
            b.len(),
            r
        )));
    }
    if !a.is_integral() || !b.iter().all(Rational::is_integer) {
        return Err(Error::Domain("system must have integer entries".into()));
    }
    let rank = mat_rank(a);
    if rank != r {
        return Err(Error::RankDeficient {
            found: rank,
            expected: r,
        });
    }
    let mut m = RatMatrix::zeros(n + r, n + 1);
    for j in 0..n {
        m[(j, j)] = Rational::from_integer(1.into());
    }
    for i in 0..r {
        for j in 0..n {
            m[(n + i, j)] = a[(i, j)].clone();
        }
        m[(n + i, n)] = -b[i].clone();
    }
    Ok(MatrixForm {
        n,
        r,
        entries: m,
        ignored_rows: BTreeSet::new(),
        ignored_cols: BTreeSet::new(),
        field: Field::Forward,
    })
}

/// Turns `A′α′ ≥ b` into `(A′, −id_r)·(α′, s) = b` with slack variables `s`.
pub fn from_inequalities(a_prime: &RatMatrix, b: &[Rational]) -> (RatMatrix, Vec<Rational>) {
    let (r, n) = (a_prime.rows(), a_prime.cols());
    let mut a = RatMatrix::zeros(r, n + r);
    for i in 0..r {
        for j in 0..n {
            a[(i, j)] = a_prime[(i, j)].clone();
        }
        a[(i, n + i)] = -Rational::from_integer(1.into());
    }
    (a, b.to_vec())
}

impl MatrixForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.ignored_rows.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    pub fn entries(&self) -> &RatMatrix {
        &self.entries
    }

    pub fn ignored_rows(&self) -> &BTreeSet<usize> {
        &self.ignored_rows
    }

    pub fn ignored_cols(&self) -> &BTreeSet<usize> {
        &self.ignored_cols
    }

    pub fn is_terminal(&self) -> bool {
        self.k() == self.r
    }

    pub fn active_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.r).filter(|i| !self.ignored_rows.contains(i))
    }

    pub fn active_cols(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|j| !self.ignored_cols.contains(j))
    }

    /// Entry in λ-row `i` (matrix row `n+i`) and column `j`.
    pub fn lambda_entry(&self, i: usize, j: usize) -> &Rational {
        &self.entries[(self.n + i, j)]
    }

    /// The numerator exponent of `λ_i`, i.e. entry `(n+i, n+1)`.
    pub fn lambda_constant(&self, i: usize) -> &Rational {
        &self.entries[(self.n + i, self.n)]
    }

    /// Matrix with ignored rows and columns removed (the last column is kept).
    pub fn visible(&self) -> RatMatrix {
        let rows: Vec<usize> = (0..self.n).chain(self.active_rows().map(|i| self.n + i)).collect();
        let cols: Vec<usize> = self.active_cols().chain(std::iter::once(self.n)).collect();
        self.entries.select(&rows, &cols)
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.r {
            return Err(Error::Shape(format!("λ index {} out of range", i + 1)));
        }
        if self.ignored_rows.contains(&i) {
            return Err(Error::Precondition(format!(
                "λ_{} has already been eliminated",
                i + 1
            )));
        }
        Ok(())
    }

    /// Degree and pole order of the Erat form in `λ_i`.
    pub fn degree_order(&self, i: usize) -> Result<(Rational, Rational)> {
        self.check_row(i)?;
        let b0 = self.lambda_constant(i).clone();
        let mut deg = b0.clone();
        let mut ord = -b0;
        for j in self.active_cols() {
            let bj = self.lambda_entry(i, j);
            if bj.is_positive() {
                deg -= bj;
            } else if bj.is_negative() {
                ord += bj;
            }
        }
        Ok((deg, ord))
    }

    /// Classification of every non-ignored column with respect to `λ_i`.
    pub fn classify_columns(&self, i: usize) -> Result<Vec<(usize, ColumnClass)>> {
        self.check_row(i)?;
        Ok(self
            .active_cols()
            .map(|j| (j, self.classify(i, j)))
            .collect())
    }

    fn classify(&self, i: usize, j: usize) -> ColumnClass {
        let p = signum(self.lambda_entry(i, j));
        if p == 0 {
            return ColumnClass::NotContributing;
        }
        // the column's own y-row carries a 1, so the first nonzero entry is
        // always among the y-rows
        let col = self.entries.column(j);
        let small = smallness_in(&col, self.field);
        match (small, p > 0) {
            (Smallness::Small, true) | (Smallness::Large, false) => ColumnClass::Contributing,
            (Smallness::Large, true) | (Smallness::Small, false) => {
                ColumnClass::DuallyContributing
            }
            (Smallness::Zero, _) => ColumnClass::NotContributing,
        }
    }

    pub fn counts(&self, i: usize) -> Result<CountPair> {
        let classes = self.classify_columns(i)?;
        let c = classes
            .iter()
            .filter(|(_, k)| *k == ColumnClass::Contributing)
            .count();
        let d = classes
            .iter()
            .filter(|(_, k)| *k == ColumnClass::DuallyContributing)
            .count();
        let (deg, ord) = self.degree_order(i)?;
        let pair = CountPair {
            c: if deg.is_negative() {
                Count::Finite(c)
            } else {
                Count::Infinite
            },
            d: if ord.is_negative() {
                Count::Finite(d)
            } else {
                Count::Infinite
            },
        };
        if pair.c == Count::Infinite && pair.d == Count::Infinite {
            return Err(Error::Invariant(format!(
                "both formulas invalid for λ_{} (deg = {deg}, ord = {ord})",
                i + 1
            )));
        }
        Ok(pair)
    }

    /// Whether `formula` may be applied to `λ_i` (`deg < 0` for contributing,
    /// `ord < 0` for dual).
    pub fn formula_valid(&self, i: usize, formula: Formula) -> Result<bool> {
        let (deg, ord) = self.degree_order(i)?;
        Ok(match formula {
            Formula::Contributing => deg.is_negative(),
            Formula::Dual => ord.is_negative(),
        })
    }

    /// Pivots on `(n+i, j)` and retires row `n+i` and column `j`. Returns the
    /// sign of the pivot item together with the new form.
    pub fn eliminate(&self, i: usize, j: usize) -> Result<(i32, MatrixForm)> {
        self.check_row(i)?;
        if j >= self.n || self.ignored_cols.contains(&j) {
            return Err(Error::Precondition(format!(
                "column {} is not available for elimination",
                j + 1
            )));
        }
        let sign = signum(self.lambda_entry(i, j));
        let mut out = self.clone();
        // ignored columns keep their stored entries
        let cols: Vec<usize> = self.active_cols().chain(std::iter::once(self.n)).collect();
        eliminate_columns(&mut out.entries, self.n + i, j, &cols)?;
        out.ignored_rows.insert(i);
        out.ignored_cols.insert(j);
        Ok((sign, out))
    }

    /// Eliminates every remaining λ through the columns `cols`, giving the form
    /// with `J ∪ cols` retired. Each row takes the first column of `cols` with a
    /// nonzero pivot; the result does not depend on this pairing. Returns the
    /// product of the pivot signs.
    pub fn eliminate_onto(&self, cols: &[usize]) -> Result<(i32, MatrixForm)> {
        if cols.len() != self.r - self.k() {
            return Err(Error::Shape(format!(
                "{} columns given for {} remaining λ",
                cols.len(),
                self.r - self.k()
            )));
        }
        let mut sign = 1;
        let mut form = self.clone();
        let rows: Vec<usize> = self.active_rows().collect();
        for i in rows {
            let j = cols
                .iter()
                .copied()
                .find(|&j| {
                    !form.ignored_cols.contains(&j) && !form.lambda_entry(i, j).is_zero()
                })
                .ok_or_else(|| Error::Domain("column block is singular".into()))?;
            let (s, next) = form.eliminate(i, j)?;
            sign *= s;
            form = next;
        }
        Ok((sign, form))
    }

    /// One application of the contributing or dual formula: the signed list of
    /// forms whose sum is the constant term in `λ_i`.
    pub fn expand(&self, i: usize, formula: Formula) -> Result<Vec<(i32, MatrixForm)>> {
        let (deg, ord) = self.degree_order(i)?;
        let valid = match formula {
            Formula::Contributing => deg.is_negative(),
            Formula::Dual => ord.is_negative(),
        };
        if !valid {
            return Err(Error::FormulaInvalid {
                formula: formula.name(),
                deg: Box::new(deg),
                ord: Box::new(ord),
            });
        }
        let wanted = match formula {
            Formula::Contributing => ColumnClass::Contributing,
            Formula::Dual => ColumnClass::DuallyContributing,
        };
        let mut out = Vec::new();
        for (j, class) in self.classify_columns(i)? {
            if class != wanted {
                continue;
            }
            let (sign, form) = self.eliminate(i, j)?;
            let sign = match formula {
                Formula::Contributing => sign,
                Formula::Dual => -sign,
            };
            out.push((sign, form));
        }
        Ok(out)
    }

    /// True if the active part of λ-row `i` has both a positive and a negative entry.
    pub fn row_has_both_signs(&self, i: usize) -> bool {
        let mut pos = false;
        let mut neg = false;
        for j in self.active_cols() {
            let x = self.lambda_entry(i, j);
            pos |= x.is_positive();
            neg |= x.is_negative();
        }
        pos && neg
    }

    /// Checks the structural invariants of a matrix form.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.ignored_rows.len() != self.ignored_cols.len() || self.k() > self.r {
            return Err(Error::Invariant("|I| and |J| disagree".into()));
        }
        for &i in &self.ignored_rows {
            let zero_active = self.active_cols().all(|j| self.lambda_entry(i, j).is_zero());
            if !zero_active || !self.lambda_constant(i).is_zero() {
                return Err(Error::Invariant(format!(
                    "retired row λ_{} is not cleared",
                    i + 1
                )));
            }
        }
        let active: Vec<usize> = self.active_cols().collect();
        for &j in &active {
            for &row in &active {
                let want = if row == j { 1 } else { 0 };
                if self.entries[(row, j)] != Rational::from_integer(want.into()) {
                    return Err(Error::Invariant(format!(
                        "identity block broken at ({}, {})",
                        row + 1,
                        j + 1
                    )));
                }
            }
            if !self.entries[(j, n)].is_zero() {
                return Err(Error::Invariant(format!(
                    "numerator column nonzero at free row {}",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}

impl PartialEq for MatrixForm {
    /// Forms are equal when their ignored sets agree and every non-ignored cell
    /// matches.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.r == other.r
            && self.ignored_rows == other.ignored_rows
            && self.ignored_cols == other.ignored_cols
            && self.visible() == other.visible()
    }
}

impl Eq for MatrixForm {}

impl fmt::Debug for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MatrixForm {{ n: {}, r: {}, I: {:?}, J: {:?}, entries: {} }}",
            self.n,
            self.r,
            self.ignored_rows.iter().map(|i| i + 1).collect::<Vec<_>>(),
            self.ignored_cols.iter().map(|j| j + 1).collect::<Vec<_>>(),
            self.entries
        )
    }
}
