//! Independent checks of decompositions: brute-force enumeration of the
//! solution set, coefficientwise comparison, agreement across strategies,
//! branch relations and reciprocity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conegf::{
    coefficient, cone_of, cone_sum_value, lattice_points, series_reading, zy_rational, ConeTerm,
    EvalPoints, RationalGF,
};
use crate::decompose::{complete, decompose, decompose_in, Decomposition, Strategy, TermState};
use crate::error::{Error, Result};
use crate::exactalg::{mat_rank, RatMatrix, Rational};
use crate::matform::{ColumnClass, Field, MatrixForm};

/// The region `[−B,B]ⁿ` (signed checks) or `[0,B]ⁿ` (solution enumeration).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Box {
    pub bound: u32,
}

impl Default for Box {
    fn default() -> Self {
        Box { bound: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub at: Vec<Rational>,
    pub expected: Rational,
    pub got: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub checked_points: u64,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl VerifyReport {
    fn new(checked_points: u64, failures: Vec<Failure>) -> Self {
        VerifyReport {
            checked_points,
            passed: failures.is_empty(),
            failures,
        }
    }
}

fn int_matrix(a: &RatMatrix) -> Result<Vec<Vec<i64>>> {
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .map(|x| {
                    x.is_integer()
                        .then(|| x.to_integer().to_i64())
                        .flatten()
                        .ok_or_else(|| Error::Domain("system must have small integer entries".into()))
                })
                .collect()
        })
        .collect()
}

fn int_vec(b: &[Rational]) -> Result<Vec<i64>> {
    b.iter()
        .map(|x| {
            x.is_integer()
                .then(|| x.to_integer().to_i64())
                .flatten()
                .ok_or_else(|| Error::Domain("right-hand side must be small integers".into()))
        })
        .collect()
}

/// Depth-first search over `[0,B]ⁿ`, pruning a branch as soon as some row can
/// no longer reach its target. Stops early once `limit` solutions are found.
fn enumerate(a: &[Vec<i64>], b: &[i64], n: usize, bound: i64, limit: usize) -> BTreeSet<Vec<i64>> {
    let r = a.len();
    // reach[j][i] = (min, max) of Σ_{k ≥ j} a_ik·α_k over the box
    let mut reach = vec![vec![(0i64, 0i64); r]; n + 1];
    for j in (0..n).rev() {
        for i in 0..r {
            let t = a[i][j] * bound;
            let (lo, hi) = reach[j + 1][i];
            reach[j][i] = (lo + t.min(0), hi + t.max(0));
        }
    }
    let mut out = BTreeSet::new();
    let mut alpha = vec![0i64; n];
    let mut res: Vec<i64> = b.to_vec();
    #[allow(clippy::too_many_arguments)]
    fn go(
        j: usize,
        a: &[Vec<i64>],
        reach: &[Vec<(i64, i64)>],
        bound: i64,
        limit: usize,
        alpha: &mut Vec<i64>,
        res: &mut Vec<i64>,
        out: &mut BTreeSet<Vec<i64>>,
    ) {
        if out.len() >= limit {
            return;
        }
        if res.iter().zip(&reach[j]).any(|(x, (lo, hi))| x < lo || x > hi) {
            return;
        }
        if j == alpha.len() {
            out.insert(alpha.clone());
            return;
        }
        for v in 0..=bound {
            alpha[j] = v;
            for (i, row) in a.iter().enumerate() {
                res[i] -= row[j] * v;
            }
            go(j + 1, a, reach, bound, limit, alpha, res, out);
            for (i, row) in a.iter().enumerate() {
                res[i] += row[j] * v;
            }
        }
        alpha[j] = 0;
    }
    go(0, a, &reach, bound, limit, &mut alpha, &mut res, &mut out);
    out
}

/// All `α ∈ ℕⁿ ∩ [0,B]ⁿ` with `Aα = b`.
pub fn brute_force_points(a: &RatMatrix, b: &[Rational], bx: Box) -> Result<BTreeSet<Vec<i64>>> {
    let ai = int_matrix(a)?;
    let bi = int_vec(b)?;
    if bi.len() != a.rows() {
        return Err(Error::Shape("b length differs from row count".into()));
    }
    Ok(enumerate(&ai, &bi, a.cols(), bx.bound as i64, usize::MAX))
}

/// A solution of `Aα = 0` with every `α_j ∈ [1, K]`, if one exists.
pub fn positive_solution(a: &RatMatrix, k: u32) -> Result<Option<Vec<i64>>> {
    let ai = int_matrix(a)?;
    // α = 1 + β with β ∈ [0, K−1]ⁿ and Aβ = −A·1
    let shift: Vec<i64> = ai.iter().map(|row| -row.iter().sum::<i64>()).collect();
    let found = enumerate(&ai, &shift, a.cols(), k.saturating_sub(1) as i64, 1);
    Ok(found
        .into_iter()
        .next()
        .map(|beta| beta.into_iter().map(|x| x + 1).collect()))
}

/// Compares the decomposition's signed lattice-point count with the indicator
/// of `P(A,b)` at every `α ∈ [−B,B]ⁿ`.
///
/// Only points where either side can be nonzero are visited: the union of the
/// cones' lattice points in the box and the brute-force solutions.
pub fn pointwise_check(dec: &Decomposition, bx: Box) -> Result<VerifyReport> {
    if dec.field != Field::Forward {
        return Err(Error::Precondition(
            "pointwise check reads cones in the forward field".into(),
        ));
    }
    let n = dec.a.cols();
    let bound = bx.bound as i64;
    let readings = dec
        .terms
        .iter()
        .map(|t| {
            let c = cone_of(t)?;
            Ok((c.weight.clone(), series_reading(&c)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut claimed: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
    for (w, rd) in &readings {
        for alpha in lattice_points(rd, bound) {
            *claimed.entry(alpha).or_insert_with(Rational::zero) +=
                w * Rational::from_integer(rd.sign.into());
        }
    }
    let truth = brute_force_points(&dec.a, &dec.b, bx)?;
    let mut failures = Vec::new();
    let keys: BTreeSet<&Vec<i64>> = claimed.keys().chain(truth.iter()).collect();
    for alpha in keys {
        let got = claimed.get(alpha).cloned().unwrap_or_else(Rational::zero);
        let expected = if truth.contains(alpha) {
            Rational::one()
        } else {
            Rational::zero()
        };
        if got != expected {
            failures.push(Failure {
                at: alpha.iter().map(|&x| Rational::from_integer(x.into())).collect(),
                expected,
                got,
            });
        }
    }
    let checked = (2 * bx.bound as u64 + 1).checked_pow(n as u32).unwrap_or(u64::MAX);
    Ok(VerifyReport::new(checked, failures))
}

/// Coefficient of `y^α` in the decomposition, summed over its terms.
pub fn decomposition_coefficient(dec: &Decomposition, alpha: &[i64]) -> Result<Rational> {
    let mut acc = Rational::zero();
    for t in &dec.terms {
        let c = cone_of(t)?;
        let rd = series_reading(&c)?;
        acc += &c.weight * Rational::from_integer(coefficient(&rd, alpha).into());
    }
    Ok(acc)
}

/// Cones of the merged terms with their generating functions.
pub fn decomposition_gf(dec: &Decomposition) -> Result<Vec<(ConeTerm, RationalGF)>> {
    terms_gf(&dec.merged_terms())
}

fn terms_gf(terms: &[TermState]) -> Result<Vec<(ConeTerm, RationalGF)>> {
    terms
        .iter()
        .map(|t| {
            let c = cone_of(t)?;
            let g = zy_rational(&c)?;
            Ok((c, g))
        })
        .collect()
}

/// Evaluates every strategy's generating function at seeded points and
/// compares them exactly with the first strategy's value.
pub fn cross_strategy_check(
    a: &RatMatrix,
    b: &[Rational],
    strategies: &[Strategy],
    n_points: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let gfs = strategies
        .iter()
        .map(|s| decomposition_gf(&decompose(a, b, s)?))
        .collect::<Result<Vec<_>>>()?;
    let mut pts = EvalPoints::new(a.cols(), seed);
    let mut failures = Vec::new();
    for _ in 0..n_points {
        let (p, vals) = pts.next_admissible(|p| {
            gfs.iter()
                .map(|g| cone_sum_value(g, p))
                .collect::<Result<Vec<_>>>()
        })?;
        for v in &vals[1..] {
            if *v != vals[0] {
                failures.push(Failure {
                    at: p.clone(),
                    expected: vals[0].clone(),
                    got: v.clone(),
                });
            }
        }
    }
    Ok(VerifyReport::new(n_points as u64, failures))
}

/// A box containing `P(A,b)`, found from rows whose entries all share one sign.
/// `None` when this simple argument does not bound every coordinate.
pub fn polytope_bound(a: &RatMatrix, b: &[Rational]) -> Option<u32> {
    let n = a.cols();
    let mut best: Vec<Option<Rational>> = vec![None; n];
    for i in 0..a.rows() {
        let row = a.row(i);
        let sign = if row.iter().all(|x| !x.is_negative()) {
            Rational::one()
        } else if row.iter().all(|x| !x.is_positive()) {
            -Rational::one()
        } else {
            continue;
        };
        let rhs = &b[i] * &sign;
        for j in 0..n {
            let c = &row[j] * &sign;
            if c.is_positive() {
                let ub = (&rhs / &c).floor();
                if best[j].as_ref().is_none_or(|x| ub < *x) {
                    best[j] = Some(ub);
                }
            }
        }
    }
    let mut m = 0u32;
    for x in best {
        let x = x?;
        m = m.max(x.to_integer().to_u32().unwrap_or(0));
    }
    Some(m)
}

/// For a bounded `P(A,b)`, compares `Σ_{α ∈ P} point^α` with the
/// decomposition's generating function at seeded points.
pub fn polytope_check(dec: &Decomposition, n_points: usize, seed: u64) -> Result<Option<VerifyReport>> {
    let Some(bound) = polytope_bound(&dec.a, &dec.b) else {
        return Ok(None);
    };
    let pts_set = brute_force_points(&dec.a, &dec.b, Box { bound })?;
    let gfs = decomposition_gf(dec)?;
    let mut pts = EvalPoints::new(dec.a.cols(), seed);
    let mut failures = Vec::new();
    for _ in 0..n_points {
        let (p, got) = pts.next_admissible(|p| cone_sum_value(&gfs, p))?;
        let expected = pts_set.iter().fold(Rational::zero(), |acc, alpha| {
            acc + alpha
                .iter()
                .zip(&p)
                .fold(Rational::one(), |m, (&e, x)| m * num_traits::pow(x.clone(), e as usize))
        });
        if got != expected {
            failures.push(Failure {
                at: p,
                expected,
                got,
            });
        }
    }
    Ok(Some(VerifyReport::new(n_points as u64, failures)))
}

/// Sums `sgn(p_j)·GF(branch_j)` over every contributing and dually
/// contributing column of λ-row `i`; each branch is completed with
/// `strategy`. The sum must vanish.
pub fn relation_check(
    f: &MatrixForm,
    i: usize,
    strategy: &Strategy,
    n_points: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let n = f.n();
    if f.active_rows().any(|k| !f.lambda_constant(k).is_zero()) {
        return Err(Error::Precondition("relation check needs a homogeneous form".into()));
    }
    if !f.row_has_both_signs(i) {
        return Err(Error::Precondition(format!(
            "row λ_{} needs entries of both signs",
            i + 1
        )));
    }
    let mut branches = Vec::new();
    for (j, class) in f.classify_columns(i)? {
        if class == ColumnClass::NotContributing {
            continue;
        }
        let (sign, form) = f.eliminate(i, j)?;
        let mut t = TermState::root(form);
        t.weight = Rational::from_integer(sign.into());
        t.path.push((i, j));
        branches.push(t);
    }
    let (terms, _) = complete(branches, strategy, true)?;
    let gfs = terms_gf(&terms)?;
    let mut pts = EvalPoints::new(n, seed);
    let mut failures = Vec::new();
    for _ in 0..n_points {
        let (p, got) = pts.next_admissible(|p| cone_sum_value(&gfs, p))?;
        if !got.is_zero() {
            failures.push(Failure {
                at: p,
                expected: Rational::zero(),
                got,
            });
        }
    }
    Ok(VerifyReport::new(n_points as u64, failures))
}

/// Checks `GF_A = (−1)^r·GF_{−A}` at seeded points, the right side computed
/// in the reversed series field.
pub fn reciprocity_check(
    a: &RatMatrix,
    forward: &Strategy,
    reversed: &Strategy,
    n_points: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let r = a.rows();
    let zero = vec![Rational::zero(); r];
    let lhs = decomposition_gf(&decompose(a, &zero, forward)?)?;
    let rhs = decomposition_gf(&decompose_in(&a.neg(), &zero, reversed, Field::Reversed)?)?;
    let sign = if r.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    };
    let mut pts = EvalPoints::new(a.cols(), seed);
    let mut failures = Vec::new();
    for _ in 0..n_points {
        let (p, (x, y)) =
            pts.next_admissible(|p| Ok((cone_sum_value(&lhs, p)?, cone_sum_value(&rhs, p)?)))?;
        let y = &sign * y;
        if x != y {
            failures.push(Failure {
                at: p,
                expected: x,
                got: y,
            });
        }
    }
    Ok(VerifyReport::new(n_points as u64, failures))
}

/// A random full-rank system with `r ≤ 3`, `n ≤ 7`, entries in `[−5,5]` and
/// `b` in `[−6,6]` (`b = 0` when `homogeneous`). Systems with `b = 0` are kept
/// only if `Aα = 0` has a solution in `[1,4]ⁿ`.
pub fn random_system(rng: &mut ChaCha8Rng, homogeneous: bool) -> (RatMatrix, Vec<Rational>) {
    loop {
        let r = rng.gen_range(1..=3);
        let n = rng.gen_range(r + 1..=7);
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
            .collect();
        let a = RatMatrix::from_ints(&rows);
        if mat_rank(&a) != r {
            continue;
        }
        let b: Vec<Rational> = if homogeneous {
            vec![Rational::zero(); r]
        } else {
            (0..r)
                .map(|_| Rational::from_integer(rng.gen_range(-6..=6).into()))
                .collect()
        };
        // b = 0 needs a positive solution whichever way it was drawn
        if b.iter().all(Zero::is_zero) && !matches!(positive_solution(&a, 4), Ok(Some(_))) {
            continue;
        }
        return (a, b);
    }
}

/// `count` random systems from a fixed seed.
pub fn random_corpus(count: usize, homogeneous: bool, seed: u64) -> Vec<(RatMatrix, Vec<Rational>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_system(&mut rng, homogeneous)).collect()
}
