//! Smith-normal-form pipeline toward unimodular decompositions.
//!
//! For a cone term with retired columns `J`, the columns are renamed so that
//! `J = [r]`; then `A = (A₁, A₂)` and `U·A₁·V = H` is the Smith normal form of
//! the pivot block. The hat form `[[id, 0], [H, U·A₂, −U·b]]` has pivot items
//! `h₁, …, h_r`, and its terminal form is the original one with the first `r`
//! coordinates transformed by `V⁻¹`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::conegf::RationalGF;
use crate::error::{Error, Result};
use crate::exactalg::{mat_det, mat_inverse, smith_normal_form, RatMatrix, Rational, SnfResult};
use crate::matform::{build_initial, MatrixForm};

#[derive(Clone, Debug)]
pub struct HatForm {
    pub base: MatrixForm,
    pub snf: SnfResult,
    pub v: RatMatrix,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
    /// `A` with columns reordered by `perm`.
    pub a_perm: RatMatrix,
    pub b: Vec<Rational>,
}

/// Column order putting `j` first, the remaining columns after it in order.
fn column_order(n: usize, j: &[usize]) -> Vec<usize> {
    let mut perm = j.to_vec();
    perm.extend((0..n).filter(|c| !j.contains(c)));
    perm
}

pub fn build_hat(a: &RatMatrix, b: &[Rational], j: &[usize]) -> Result<HatForm> {
    let (r, n) = (a.rows(), a.cols());
    if j.len() != r || j.iter().any(|&c| c >= n) {
        return Err(Error::Shape(format!("need {r} distinct columns below {n}")));
    }
    let mut sorted = j.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != r {
        return Err(Error::Shape("repeated column in J".into()));
    }
    let perm = column_order(n, j);
    let all_rows: Vec<usize> = (0..r).collect();
    let a_perm = a.select(&all_rows, &perm);
    let a1 = a_perm.select(&all_rows, &(0..r).collect::<Vec<_>>());
    let a2 = a_perm.select(&all_rows, &(r..n).collect::<Vec<_>>());
    if mat_det(&a1)?.is_zero() {
        return Err(Error::Domain("pivot block A₁ is singular".into()));
    }
    let snf = smith_normal_form(&a1)?;
    let ua2 = snf.u.mul(&a2)?;
    let ub = snf.u.mul_vec(b)?;
    let mut hat = RatMatrix::zeros(r, n);
    for i in 0..r {
        hat[(i, i)] = snf.h[(i, i)].clone();
        for c in 0..n - r {
            hat[(i, r + c)] = ua2[(i, c)].clone();
        }
    }
    let base = build_initial(&hat, &ub)?;
    Ok(HatForm {
        base,
        v: snf.v.clone(),
        snf,
        perm,
        a_perm,
        b: b.to_vec(),
    })
}

impl HatForm {
    pub fn r(&self) -> usize {
        self.a_perm.rows()
    }

    pub fn n(&self) -> usize {
        self.a_perm.cols()
    }

    /// `h₁, …, h_r`.
    pub fn pivot_items(&self) -> Vec<BigInt> {
        self.snf.invariants()
    }

    /// `M̂_r⟨[r]⟩`, pivoting on `(n+i, i)` in order.
    pub fn pivoted(&self) -> Result<MatrixForm> {
        let mut f = self.base.clone();
        for i in 0..self.r() {
            f = f.eliminate(i, i)?.1;
        }
        Ok(f)
    }

    /// `M_r⟨[r]⟩` of the column-renamed original system.
    pub fn original_terminal(&self) -> Result<MatrixForm> {
        let m = build_initial(&self.a_perm, &self.b)?;
        let cols: Vec<usize> = (0..self.r()).collect();
        Ok(m.eliminate_onto(&cols)?.1)
    }

    /// `diag(V, id_{n−r})`.
    pub fn w(&self) -> RatMatrix {
        self.v.block_diag(&RatMatrix::identity(self.n() - self.r()))
    }

    /// Checks `M̂_r⟨[r]⟩ = diag(V⁻¹, id)·M_r⟨[r]⟩` on the visible cells.
    pub fn identity_holds(&self) -> Result<bool> {
        let hat = self.pivoted()?.visible();
        let orig = self.original_terminal()?.visible();
        let vinv = mat_inverse(&self.v)?.block_diag(&RatMatrix::identity(self.n() - self.r()));
        Ok(vinv.mul(&orig)? == hat)
    }
}

/// Replaces every exponent vector `e` of `g` by `W·e`.
pub fn monomial_action(w: &RatMatrix, g: &RationalGF) -> Result<RationalGF> {
    if !w.is_square() {
        return Err(Error::Shape("substitution matrix must be square".into()));
    }
    if !w.is_integral() {
        return Err(Error::Domain("substitution matrix must be integral".into()));
    }
    if mat_det(w)?.is_zero() {
        return Err(Error::Domain("substitution matrix is singular".into()));
    }
    let n = w.rows();
    let wi: Vec<Vec<i128>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    w[(i, j)]
                        .to_integer()
                        .to_i128()
                        .ok_or_else(|| Error::Domain("entry too large".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let apply = |e: &[i64]| -> Result<Vec<i64>> {
        if e.len() != n {
            return Err(Error::Shape("exponent length differs from matrix size".into()));
        }
        (0..n)
            .map(|i| {
                let s: i128 = (0..n).map(|j| wi[i][j] * e[j] as i128).sum();
                i64::try_from(s).map_err(|_| Error::Domain("exponent overflow".into()))
            })
            .collect()
    };
    let mut out = RationalGF::default();
    for (e, c) in &g.numerator {
        out.add_term(apply(e)?, c.clone());
    }
    out.denominator = g
        .denominator
        .iter()
        .map(|d| apply(d))
        .collect::<Result<_>>()?;
    Ok(out)
}

/// Input for an external denumerant solver: the successive constant terms in
/// `λ₁, …, λ_r` of the hat form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenumerantTask {
    /// `(h_i, label)` in elimination order; the label names the variable
    /// whose column carries the pivot.
    pub stages: Vec<(BigInt, String)>,
    /// Columns of `U·A₂`, labelled by their variables.
    pub residual_exponents: Vec<(String, Vec<BigInt>)>,
    pub shift: Vec<BigInt>,
}

fn var_label(col: usize) -> String {
    format!("y{}", col + 1)
}

/// Flags whether only the last stage is a genuine denumerant constant term
/// (`h_i = 1` for all `i < r`) and packages every stage.
pub fn denumerant_task(h: &HatForm) -> (bool, DenumerantTask) {
    let r = h.r();
    let hs = h.pivot_items();
    let is_denumerant = hs.iter().take(r.saturating_sub(1)).all(One::is_one);
    let stages = hs
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), var_label(h.perm[i])))
        .collect();
    let e = h.base.entries();
    let n = h.n();
    let residual_exponents = (r..n)
        .map(|c| {
            (
                var_label(h.perm[c]),
                (0..r).map(|i| e[(n + i, c)].to_integer()).collect(),
            )
        })
        .collect();
    let shift = (0..r).map(|i| -e[(n + i, n)].to_integer()).collect();
    (
        is_denumerant,
        DenumerantTask {
            stages,
            residual_exponents,
            shift,
        },
    )
}

impl fmt::Display for DenumerantTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(f, "denumerant-task v1")?;
        writeln!(f, "stages {}", self.stages.len())?;
        for (h, label) in &self.stages {
            writeln!(f, "stage {h} {label}")?;
        }
        writeln!(f, "residual {}", self.residual_exponents.len())?;
        for (label, col) in &self.residual_exponents {
            writeln!(f, "column {label} {}", join(col))?;
        }
        writeln!(f, "shift {}", join(&self.shift))?;
        writeln!(f, "end")
    }
}

impl FromStr for DenumerantTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut next = |what: &str| lines.next().ok_or_else(|| perr(0, &format!("missing {what}")));
        let ints = |line: usize, toks: &[&str]| -> Result<Vec<BigInt>> {
            toks.iter()
                .map(|t| t.parse::<BigInt>().map_err(|_| perr(line, &format!("bad integer `{t}`"))))
                .collect()
        };
        let count = |line: usize, l: &str, key: &str| -> Result<usize> {
            l.strip_prefix(key)
                .and_then(|x| x.trim().parse().ok())
                .ok_or_else(|| perr(line, &format!("expected `{key} <count>`")))
        };

        let (ln, l) = next("header")?;
        if l != "denumerant-task v1" {
            return Err(perr(ln, "expected `denumerant-task v1`"));
        }
        let (ln, l) = next("stages")?;
        let ns = count(ln, l, "stages")?;
        let mut stages = Vec::with_capacity(ns);
        for _ in 0..ns {
            let (ln, l) = next("stage")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "stage" {
                return Err(perr(ln, "expected `stage <h> <label>`"));
            }
            let h = ints(ln, &toks[1..2])?.remove(0);
            stages.push((h, toks[2].to_string()));
        }
        let (ln, l) = next("residual")?;
        let nr = count(ln, l, "residual")?;
        let mut residual_exponents = Vec::with_capacity(nr);
        for _ in 0..nr {
            let (ln, l) = next("column")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() < 2 || toks[0] != "column" {
                return Err(perr(ln, "expected `column <label> <ints>`"));
            }
            let col = ints(ln, &toks[2..])?;
            if col.len() != ns {
                return Err(perr(ln, "column length differs from stage count"));
            }
            residual_exponents.push((toks[1].to_string(), col));
        }
        let (ln, l) = next("shift")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&"shift") {
            return Err(perr(ln, "expected `shift <ints>`"));
        }
        let shift = ints(ln, &toks[1..])?;
        if shift.len() != ns {
            return Err(perr(ln, "shift length differs from stage count"));
        }
        let (ln, l) = next("end")?;
        if l != "end" {
            return Err(perr(ln, "expected `end`"));
        }
        Ok(DenumerantTask {
            stages,
            residual_exponents,
            shift,
        })
    }
}

/// `A = (Bᵗ, −id_d)` and the expected generator block `[(B⁻¹)ᵗ; id_d]` of
/// `M_d⟨[d]⟩`.
pub fn homogenize_cone(b: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    if !b.is_square() {
        return Err(Error::Shape("cone matrix must be square".into()));
    }
    if !b.is_integral() {
        return Err(Error::Domain("cone matrix must be integral".into()));
    }
    let d = b.rows();
    let binv = mat_inverse(b)?;
    let bt = b.transpose();
    let mut a = RatMatrix::zeros(d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = bt[(i, j)].clone();
        }
        a[(i, d + i)] = -Rational::one();
    }
    let top = binv.transpose();
    let mut md = RatMatrix::zeros(2 * d, d);
    for i in 0..d {
        for j in 0..d {
            md[(i, j)] = top[(i, j)].clone();
        }
        md[(d + i, i)] = Rational::one();
    }
    Ok((a, md))
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnityEvalReport {
    pub term_count: u64,
    pub value: Complex64,
    pub truncation_value: Complex64,
    pub abs_error: f64,
}

/// Default truncation per free coordinate.
pub const DEFAULT_TRUNCATION: u32 = 60;

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn cpow(z: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        z.powi(k as i32)
    } else {
        z.inv().powi((-k) as i32)
    }
}

/// Evaluates the cone of `M_r⟨[r]⟩` (column-renamed system) at `point` through
/// the roots-of-unity formula on the hat form, and compares with the sum of
/// `point^α` over its lattice points with free coordinates up to `n_trunc`.
///
/// `point` is indexed by the renamed variables.
pub fn unity_root_eval(h: &HatForm, point: &[Complex64], n_trunc: u32) -> Result<UnityEvalReport> {
    let (r, n) = (h.r(), h.n());
    if point.len() != n {
        return Err(Error::Shape(format!("point has {} coordinates, expected {n}", point.len())));
    }
    if point.iter().any(|z| z.norm() == 0.0 || z.norm() >= 1.0) {
        return Err(Error::EvaluationPoint);
    }
    let hs: Vec<u64> = h
        .pivot_items()
        .iter()
        .map(|x| x.to_u64().ok_or_else(|| Error::Domain("invariant factor too large".into())))
        .collect::<Result<_>>()?;
    let term_count = hs.iter().product::<u64>();

    // q_i = point^{W e_i} with W = diag(V, id)
    let w = h.w();
    let q: Vec<Complex64> = (0..n)
        .map(|i| {
            (0..n).fold(Complex64::one(), |acc, k| {
                let e = w[(k, i)].to_integer().to_i64().unwrap_or(0);
                acc * cpow(point[k], e)
            })
        })
        .collect();
    let s: Vec<Complex64> = (0..r).map(|i| q[i].powf(1.0 / hs[i] as f64)).collect();
    let e = h.base.entries();
    let alpha: Vec<Vec<i64>> = (r..n)
        .map(|c| {
            (0..r)
                .map(|i| e[(n + i, c)].to_integer().to_i64().unwrap_or(0))
                .collect()
        })
        .collect();
    let ub: Vec<i64> = (0..r)
        .map(|i| (-e[(n + i, n)].to_integer()).to_i64().unwrap_or(0))
        .collect();

    let mut value = Complex64::zero();
    let mut tuple = vec![0u64; r];
    loop {
        let z: Vec<Complex64> = (0..r)
            .map(|i| {
                let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * tuple[i] as f64 / hs[i] as f64);
                s[i] * zeta
            })
            .collect();
        let mut term = (0..r).fold(Complex64::one(), |acc, i| acc * cpow(z[i], ub[i]));
        for (t, col) in alpha.iter().enumerate() {
            let x = (0..r).fold(q[r + t], |acc, i| acc * cpow(z[i], -col[i]));
            let den = Complex64::one() - x;
            if den.norm() < 1e-12 || x.norm() >= 1.0 {
                return Err(Error::EvaluationPoint);
            }
            term /= den;
        }
        value += term;
        let mut i = 0;
        loop {
            if i == r {
                break;
            }
            tuple[i] += 1;
            if tuple[i] < hs[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
        if i == r {
            break;
        }
    }
    value /= term_count as f64;

    let truncation_value = truncated_sum(&h.original_terminal()?, point, n_trunc)?;
    Ok(UnityEvalReport {
        term_count,
        value,
        truncation_value,
        abs_error: (value - truncation_value).norm(),
    })
}

/// `Σ point^α` over the lattice points `vertex + Σ k_t·γ_t`, `0 ≤ k_t ≤ n_trunc`.
fn truncated_sum(form: &MatrixForm, point: &[Complex64], n_trunc: u32) -> Result<Complex64> {
    let n = form.n();
    let e = form.entries();
    let gens: Vec<Vec<Rational>> = form
        .active_cols()
        .map(|j| (0..n).map(|i| e[(i, j)].clone()).collect())
        .collect();
    let vertex: Vec<Rational> = (0..n).map(|i| e[(i, n)].clone()).collect();
    let m = gens.len();
    let logs: Vec<Complex64> = point.iter().map(|z| z.ln()).collect();
    let mut k = vec![0u32; m];
    let mut acc = vertex.clone();
    let mut total = Complex64::zero();
    loop {
        if acc.iter().all(Rational::is_integer) {
            let mut lg = Complex64::zero();
            for i in 0..n {
                lg += logs[i] * to_f64(&acc[i]);
            }
            total += lg.exp();
        }
        let mut t = 0;
        loop {
            if t == m {
                return Ok(total);
            }
            if k[t] < n_trunc {
                k[t] += 1;
                for i in 0..n {
                    acc[i] += &gens[t][i];
                }
                break;
            }
            let back = Rational::from_integer(k[t].into());
            for i in 0..n {
                acc[i] -= &gens[t][i] * &back;
            }
            k[t] = 0;
            t += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conegf::{cone_of, gf_evaluate, zy_rational, EvalPoints};
    use crate::decompose::TermState;
    use crate::exactalg::{rat, rat_vec, ratio};
    use proptest::prelude::*;

    fn gf(num: &[(&[i64], i64)], den: &[&[i64]]) -> RationalGF {
        let mut g = RationalGF::default();
        for (e, c) in num {
            g.add_term(e.to_vec(), BigInt::from(*c));
        }
        g.denominator = den.iter().map(|d| d.to_vec()).collect();
        g
    }

    fn inv_big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn unimodular_block_gives_identity_snf() {
        let a = RatMatrix::from_ints(&[[1, 0, 2], [0, 1, -3]]);
        let h = build_hat(&a, &rat_vec(&[1, 2]), &[0, 1]).unwrap();
        assert_eq!(h.snf.h, RatMatrix::identity(2));
        assert_eq!(h.snf.u, RatMatrix::identity(2));
        assert_eq!(h.snf.v, RatMatrix::identity(2));
        assert_eq!(h.base, build_initial(&a, &rat_vec(&[1, 2])).unwrap());
        assert!(h.identity_holds().unwrap());
    }

    #[test]
    fn hat_of_small_system() {
        let a = RatMatrix::from_ints(&[[2, 4, 1], [6, 8, 1]]);
        let h = build_hat(&a, &rat_vec(&[0, 0]), &[0, 1]).unwrap();
        assert_eq!(h.pivot_items(), inv_big(&[2, 4]));
        let e = h.base.entries();
        assert_eq!((e[(3, 0)].clone(), e[(3, 1)].clone()), (rat(2), rat(0)));
        assert_eq!((e[(4, 0)].clone(), e[(4, 1)].clone()), (rat(0), rat(4)));
        assert!(h.identity_holds().unwrap());
    }

    #[test]
    fn identity_on_inhomogeneous_example() {
        let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
        let b = rat_vec(&[1, -3]);
        let h = build_hat(&a, &b, &[0, 1]).unwrap();
        // computed directly: diag(V⁻¹, id₄)·M_2⟨[2]⟩ against the pivoted hat form
        let hat = h.pivoted().unwrap().visible();
        let orig = h.original_terminal().unwrap().visible();
        let vinv = mat_inverse(&h.v).unwrap().block_diag(&RatMatrix::identity(4));
        assert_eq!(vinv.mul(&orig).unwrap(), hat);
        let invariants = h.pivot_items();
        assert_eq!(invariants.iter().product::<BigInt>(), BigInt::from(5));
    }

    #[test]
    fn renamed_columns() {
        let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
        let h = build_hat(&a, &rat_vec(&[1, -3]), &[5, 0]).unwrap();
        assert_eq!(h.perm, vec![5, 0, 1, 2, 3, 4]);
        assert!(h.identity_holds().unwrap());
        let singular = RatMatrix::from_ints(&[[1, 2, 1], [2, 4, 1]]);
        assert!(matches!(
            build_hat(&singular, &rat_vec(&[0, 0]), &[0, 1]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monomial_action_examples() {
        let g = gf(&[(&[1, 0], 1)], &[&[1, 2]]);
        assert_eq!(monomial_action(&RatMatrix::identity(2), &g).unwrap(), g);
        let g1 = gf(&[(&[0], 1)], &[&[1]]);
        assert_eq!(
            monomial_action(&RatMatrix::from_ints(&[[2]]), &g1).unwrap(),
            gf(&[(&[0], 1)], &[&[2]])
        );
        let swap = RatMatrix::from_ints(&[[0, 1], [1, 0]]);
        // y₁/(1 − y₁y₂²): exponents (1,0) and (1,2) map to (0,1) and (2,1)
        assert_eq!(
            monomial_action(&swap, &g).unwrap(),
            gf(&[(&[0, 1], 1)], &[&[2, 1]])
        );
        let half = RatMatrix::from_rows(vec![vec![ratio(1, 2)]]).unwrap();
        assert!(matches!(monomial_action(&half, &g1), Err(Error::Domain(_))));
    }

    #[test]
    fn denumerant_flags() {
        let id = build_hat(&RatMatrix::from_ints(&[[1, 0, 1], [0, 1, 1]]), &rat_vec(&[0, 0]), &[0, 1]).unwrap();
        let (flag, task) = denumerant_task(&id);
        assert!(flag);
        assert!(task.stages.iter().all(|(h, _)| h.is_one()));

        let a = RatMatrix::from_ints(&[[1, 0, 0, 1], [0, 1, 0, 1], [0, 0, 6, 1]]);
        let (flag, task) = denumerant_task(&build_hat(&a, &rat_vec(&[0, 0, 0]), &[0, 1, 2]).unwrap());
        assert!(flag);
        let hs: Vec<BigInt> = task.stages.iter().map(|s| s.0.clone()).collect();
        assert_eq!(hs, inv_big(&[1, 1, 6]));

        let a = RatMatrix::from_ints(&[[2, 4, 1], [6, 8, 1]]);
        let (flag, task) = denumerant_task(&build_hat(&a, &rat_vec(&[0, 0]), &[0, 1]).unwrap());
        assert!(!flag);
        assert_eq!(task.stages.len(), 2);
    }

    #[test]
    fn task_record_round_trip() {
        let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
        let (_, task) = denumerant_task(&build_hat(&a, &rat_vec(&[1, -3]), &[0, 5]).unwrap());
        let text = task.to_string();
        assert!(text.starts_with("denumerant-task v1\nstages 2\n"));
        assert_eq!(text.parse::<DenumerantTask>().unwrap(), task);
        assert!("denumerant-task v1\nstages 1\nstage x y1\n".parse::<DenumerantTask>().is_err());
    }

    #[test]
    fn homogenization_examples() {
        let (a, md) = homogenize_cone(&RatMatrix::identity(2)).unwrap();
        assert_eq!(a, RatMatrix::from_ints(&[[1, 0, -1, 0], [0, 1, 0, -1]]));
        assert_eq!(md, RatMatrix::from_ints(&[[1, 0], [0, 1], [1, 0], [0, 1]]));

        let (a, md) = homogenize_cone(&RatMatrix::from_ints(&[[2]])).unwrap();
        assert_eq!(a, RatMatrix::from_ints(&[[2, -1]]));
        assert_eq!(md, RatMatrix::from_rows(vec![vec![ratio(1, 2)], vec![rat(1)]]).unwrap());

        let (_, md) = homogenize_cone(&RatMatrix::from_ints(&[[2, 0], [1, 3]])).unwrap();
        assert_eq!(
            md.select(&[0, 1], &[0, 1]),
            RatMatrix::from_rows(vec![vec![ratio(1, 2), ratio(-1, 6)], vec![rat(0), ratio(1, 3)]])
                .unwrap()
        );
        assert!(homogenize_cone(&RatMatrix::from_ints(&[[1, 2], [2, 4]])).is_err());
    }

    #[test]
    fn homogenized_elimination_reproduces_block() {
        for b in [
            RatMatrix::from_ints(&[[2]]),
            RatMatrix::from_ints(&[[2, 0], [1, 3]]),
            RatMatrix::from_ints(&[[3, 1], [0, 4]]),
        ] {
            let d = b.rows();
            let (a, md) = homogenize_cone(&b).unwrap();
            let m = build_initial(&a, &vec![rat(0); d]).unwrap();
            let (_, f) = m.eliminate_onto(&(0..d).collect::<Vec<_>>()).unwrap();
            let vis = f.visible();
            let gens = vis.select(&(0..2 * d).collect::<Vec<_>>(), &(0..d).collect::<Vec<_>>());
            assert_eq!(gens, md);
        }
    }

    fn point(mags: &[f64]) -> Vec<Complex64> {
        mags.iter()
            .enumerate()
            .map(|(i, &m)| Complex64::from_polar(m, 0.3 + 0.7 * i as f64))
            .collect()
    }

    #[test]
    fn unity_eval_unimodular() {
        let (a, _) = homogenize_cone(&RatMatrix::identity(2)).unwrap();
        let h = build_hat(&a, &rat_vec(&[0, 0]), &[0, 1]).unwrap();
        let p = point(&[0.3, 0.25, 0.3, 0.2]);
        let rep = unity_root_eval(&h, &p, DEFAULT_TRUNCATION).unwrap();
        assert_eq!(rep.term_count, 1);
        // single term: 1/((1 − y1·y3)(1 − y2·y4))
        let direct = Complex64::one() / ((Complex64::one() - p[0] * p[2]) * (Complex64::one() - p[1] * p[3]));
        assert!((rep.value - direct).norm() < 1e-12);
        assert!(rep.abs_error < 1e-6);
    }

    #[test]
    fn unity_eval_against_truncation() {
        // truncated lattice sums by independent enumeration of the cone points
        for (b, det) in [
            (RatMatrix::from_ints(&[[2]]), 2u64),
            (RatMatrix::from_ints(&[[2, 0], [1, 3]]), 6),
            (RatMatrix::from_ints(&[[3, 1], [0, 4]]), 12),
        ] {
            let d = b.rows();
            let (a, _) = homogenize_cone(&b).unwrap();
            let h = build_hat(&a, &vec![rat(0); d], &(0..d).collect::<Vec<_>>()).unwrap();
            let mags: Vec<f64> = (0..2 * d).map(|i| 0.33 - 0.02 * i as f64).collect();
            let rep = unity_root_eval(&h, &point(&mags), DEFAULT_TRUNCATION).unwrap();
            assert_eq!(rep.term_count, det);
            assert!(rep.abs_error < 1e-6, "{:?}", rep);
        }
    }

    #[test]
    fn unity_eval_one_dimensional_closed_form() {
        // B = [[2]]: points (k/2, k) with k even, so Σ_m (y1·y2²)^m
        let (a, _) = homogenize_cone(&RatMatrix::from_ints(&[[2]])).unwrap();
        let h = build_hat(&a, &rat_vec(&[0]), &[0]).unwrap();
        let p = point(&[0.3, 0.25]);
        let rep = unity_root_eval(&h, &p, DEFAULT_TRUNCATION).unwrap();
        let closed = Complex64::one() / (Complex64::one() - p[0] * p[1] * p[1]);
        assert!((rep.value - closed).norm() < 1e-9);
    }

    fn arb_system() -> impl proptest::strategy::Strategy<Value = (usize, Vec<Vec<i64>>, Vec<i64>)> {
        use proptest::strategy::Strategy as _;
        (1usize..=3, 1usize..=3).prop_flat_map(|(r, extra)| {
            (
                Just(r),
                prop::collection::vec(prop::collection::vec(-5i64..=5, r + extra), r),
                prop::collection::vec(-6i64..=6, r),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn hat_identity_on_random_systems((r, rows, b) in arb_system()) {
            let a = RatMatrix::from_ints(&rows);
            let n = a.cols();
            let j: Vec<usize> = (0..r).collect();
            let a1 = a.select(&j, &j);
            prop_assume!(!mat_det(&a1).unwrap().is_zero());
            let h = build_hat(&a, &rat_vec(&b), &j).unwrap();
            let snf = &h.snf;
            prop_assert_eq!(snf.u.mul(&a1).unwrap().mul(&snf.v).unwrap(), snf.h.clone());
            prop_assert!(h.identity_holds().unwrap());
            // the cone of the original terminal form is the W-image of the hat one
            let t = |f: MatrixForm| TermState::root(f);
            let zh = zy_rational(&cone_of(&t(h.pivoted().unwrap())).unwrap()).unwrap();
            let zo = zy_rational(&cone_of(&t(h.original_terminal().unwrap())).unwrap()).unwrap();
            let acted = monomial_action(&h.w(), &zh).unwrap();
            let mut pts = EvalPoints::new(n, 9);
            let (_, same) = pts.next_admissible(|p| Ok(gf_evaluate(&acted, p)? == gf_evaluate(&zo, p)?)).unwrap();
            prop_assert!(same);
        }

        #[test]
        fn action_composes(w1 in unimodular(3), w2 in unimodular(3), e in prop::collection::vec(-4i64..=4, 3), d in prop::collection::vec(-3i64..=3, 3)) {
            prop_assume!(d.iter().any(|&x| x != 0));
            let g = gf(&[(&e, 2), (&[0, 0, 0], -1)], &[&d]);
            let lhs = monomial_action(&w2, &monomial_action(&w1, &g).unwrap()).unwrap();
            let rhs = monomial_action(&w2.mul(&w1).unwrap(), &g).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            // substitution coherence: value at p of W∘g is g at q_i = p^{W e_i}
            let acted = monomial_action(&w1, &g).unwrap();
            let mut pts = EvalPoints::new(3, 4);
            let (_, ok) = pts.next_admissible(|p| {
                let q: Vec<Rational> = (0..3).map(|i| {
                    (0..3).fold(Rational::one(), |acc, k| {
                        let ex = w1[(k, i)].to_integer().to_i32().unwrap();
                        acc * num_traits::pow::Pow::pow(&p[k], ex)
                    })
                }).collect();
                Ok(gf_evaluate(&acted, p)? == gf_evaluate(&g, &q)?)
            }).unwrap();
            prop_assert!(ok);
        }
    }

    // products of elementary integer matrices
    fn unimodular(n: usize) -> impl proptest::strategy::Strategy<Value = RatMatrix> {
        use proptest::strategy::Strategy as _;
        prop::collection::vec((0..n, 0..n, -2i64..=2), 0..6).prop_map(move |ops| {
            let mut m = RatMatrix::identity(n);
            for (i, j, c) in ops {
                if i != j {
                    for k in 0..n {
                        let x = &m[(j, k)] * rat(c);
                        m[(i, k)] += x;
                    }
                }
            }
            m
        })
    }
}
