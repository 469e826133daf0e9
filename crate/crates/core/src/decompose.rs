//! The branching elimination driver SimpCone[S].
//!
//! Starting from `M = [[id_n, 0], [A, −b]]`, every round picks one λ per active
//! term (through a [`Strategy`]) and replaces the term by the signed branches of
//! the contributing or dual formula. After `r` rounds each term is a terminal
//! form `M_r⟨J⟩`, i.e. a signed shifted simplicial cone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{RatMatrix, Rational};
use crate::matform::{build_initial, Count, Field, Formula, MatrixForm};

/// User supplied row/formula chooser. Receives the form and the 1-based round.
pub type Chooser = dyn Fn(&MatrixForm, usize) -> Result<(usize, Formula)> + Send + Sync;

#[derive(Clone)]
pub enum Strategy {
    /// Eliminate λ₁, λ₂, … in order; contributing iff `c ≥ d` when both apply.
    S0,
    /// Eliminate λ_r, …, λ₁; dual iff the numerator exponent is `≥ 0`.
    S1,
    /// Greedy: the row and formula with the fewest branches.
    S2,
    Custom {
        name: String,
        chooser: Arc<Chooser>,
    },
}

impl Strategy {
    pub fn custom<F>(name: impl Into<String>, chooser: F) -> Self
    where
        F: Fn(&MatrixForm, usize) -> Result<(usize, Formula)> + Send + Sync + 'static,
    {
        Strategy::Custom {
            name: name.into(),
            chooser: Arc::new(chooser),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Strategy::S0 => "s0",
            Strategy::S1 => "s1",
            Strategy::S2 => "s2",
            Strategy::Custom { name, .. } => name,
        }
    }
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s0" => Ok(Strategy::S0),
            "s1" => Ok(Strategy::S1),
            "s2" => Ok(Strategy::S2),
            other => Err(Error::Domain(format!("unknown strategy `{other}`"))),
        }
    }
}

fn first_valid(form: &MatrixForm, k0: usize, prefer: Formula) -> Result<(usize, Formula)> {
    let other = match prefer {
        Formula::Contributing => Formula::Dual,
        Formula::Dual => Formula::Contributing,
    };
    if form.formula_valid(k0, prefer)? {
        Ok((k0, prefer))
    } else if form.formula_valid(k0, other)? {
        Ok((k0, other))
    } else {
        Err(Error::Invariant(format!(
            "no valid formula for λ_{}",
            k0 + 1
        )))
    }
}

/// Picks the λ row (0-based) and formula for the next elimination.
///
/// `round` is 1-based and counts eliminations already performed plus one.
pub fn choose(strategy: &Strategy, form: &MatrixForm, round: usize) -> Result<(usize, Formula)> {
    if form.is_terminal() {
        return Err(Error::Precondition("form has no λ left to eliminate".into()));
    }
    let r = form.r();
    let picked = match strategy {
        Strategy::S0 => {
            // from the initial form this is λ_round
            let k0 = form.active_rows().next().expect("non-terminal");
            let pair = form.counts(k0)?;
            // the published S0 run keeps the contributing formula whenever it has
            // at least as many branches as the dual one
            let f = match (pair.c, pair.d) {
                (Count::Finite(c), Count::Finite(d)) if c >= d => Formula::Contributing,
                (Count::Finite(_), Count::Finite(_)) => Formula::Dual,
                (Count::Finite(_), Count::Infinite) => Formula::Contributing,
                _ => Formula::Dual,
            };
            (k0, f)
        }
        Strategy::S1 => {
            // from the initial form this is λ_{r+1−round}
            let k0 = form.active_rows().last().expect("non-terminal");
            let prefer = if form.lambda_constant(k0) >= &Rational::zero() {
                Formula::Dual
            } else {
                Formula::Contributing
            };
            first_valid(form, k0, prefer)?
        }
        Strategy::S2 => {
            let mut best: Option<(Count, usize, Formula)> = None;
            for i in form.active_rows() {
                let pair = form.counts(i)?;
                let m = pair.min();
                if best.as_ref().is_none_or(|(b, _, _)| m < *b) {
                    // a tie between c and d goes to the dual formula
                    let f = if pair.c == m && pair.d != m {
                        Formula::Contributing
                    } else {
                        Formula::Dual
                    };
                    best = Some((m, i, f));
                }
            }
            let (_, k0, f) = best.expect("non-terminal form has an active row");
            (k0, f)
        }
        Strategy::Custom { chooser, .. } => chooser(form, round)?,
    };
    let (k0, f) = picked;
    if k0 >= r || form.ignored_rows().contains(&k0) {
        return Err(Error::Invariant(format!(
            "strategy {strategy} chose unavailable λ_{}",
            k0 + 1
        )));
    }
    if !form.formula_valid(k0, f)? {
        let (deg, ord) = form.degree_order(k0)?;
        return Err(Error::FormulaInvalid {
            formula: match f {
                Formula::Contributing => "contributing",
                Formula::Dual => "dual",
            },
            deg: Box::new(deg),
            ord: Box::new(ord),
        });
    }
    Ok((k0, f))
}

/// A signed matrix form together with the pivots that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermState {
    pub weight: Rational,
    pub form: MatrixForm,
    /// 0-based `(λ row, column)` pivots, in elimination order.
    pub path: Vec<(usize, usize)>,
}

impl TermState {
    pub fn root(form: MatrixForm) -> Self {
        TermState {
            weight: Rational::from_integer(1.into()),
            form,
            path: Vec::new(),
        }
    }

    /// Ignored columns as a sorted 0-based list.
    pub fn j_set(&self) -> Vec<usize> {
        self.form.ignored_cols().iter().copied().collect()
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub a: RatMatrix,
    pub b: Vec<Rational>,
    pub strategy: Strategy,
    pub field: Field,
    pub terms: Vec<TermState>,
    pub homogeneous: bool,
    /// Number of live terms after each round.
    pub per_round_counts: Vec<usize>,
}

impl Decomposition {
    /// Combines terms with the same `J` (they carry the same cone), summing
    /// weights and dropping those that cancel. Sorted by `J`.
    pub fn merged_terms(&self) -> Vec<TermState> {
        let mut out: Vec<TermState> = Vec::new();
        for t in &self.terms {
            match out.last_mut() {
                Some(last) if last.j_set() == t.j_set() => last.weight += &t.weight,
                _ => out.push(t.clone()),
            }
        }
        out.retain(|t| !t.weight.is_zero());
        out
    }
}

fn check_both_signs(form: &MatrixForm) -> Result<()> {
    for i in form.active_rows() {
        if !form.row_has_both_signs(i) {
            return Err(Error::Precondition(format!(
                "row λ_{} lost its positive or negative entries; Aα = 0 has no positive solution",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Runs rounds of elimination on `start` until every term is terminal.
/// Returns the terminal terms (unsorted) and the live-term count per round.
pub fn complete(
    start: Vec<TermState>,
    strategy: &Strategy,
    homogeneous: bool,
) -> Result<(Vec<TermState>, Vec<usize>)> {
    let mut done = Vec::new();
    let mut live = Vec::new();
    for t in start {
        if t.form.is_terminal() {
            done.push(t);
        } else {
            live.push(t);
        }
    }
    let mut per_round = Vec::new();
    while !live.is_empty() {
        let mut next = Vec::new();
        for term in live {
            if homogeneous {
                check_both_signs(&term.form)?;
            }
            let round = term.form.k() + 1;
            let (k0, formula) = choose(strategy, &term.form, round)?;
            for (sign, form) in term.form.expand(k0, formula)? {
                let j = *form
                    .ignored_cols()
                    .difference(term.form.ignored_cols())
                    .next()
                    .expect("expansion retires one column");
                let mut path = term.path.clone();
                path.push((k0, j));
                let t = TermState {
                    weight: &term.weight * Rational::from_integer(sign.into()),
                    form,
                    path,
                };
                if t.form.is_terminal() {
                    done.push(t);
                } else {
                    next.push(t);
                }
            }
        }
        per_round.push(done.len() + next.len());
        live = next;
    }
    Ok((done, per_round))
}

fn sort_terms(terms: &mut [TermState]) {
    terms.sort_by(|x, y| x.j_set().cmp(&y.j_set()).then_with(|| x.path.cmp(&y.path)));
}

/// SimpCone[S] in the forward field.
pub fn decompose(a: &RatMatrix, b: &[Rational], strategy: &Strategy) -> Result<Decomposition> {
    decompose_in(a, b, strategy, Field::Forward)
}

/// SimpCone[S] with the series field chosen explicitly.
pub fn decompose_in(
    a: &RatMatrix,
    b: &[Rational],
    strategy: &Strategy,
    field: Field,
) -> Result<Decomposition> {
    let form = build_initial(a, b)?.with_field(field);
    let homogeneous = b.iter().all(Zero::is_zero);
    let (mut terms, per_round_counts) =
        complete(vec![TermState::root(form)], strategy, homogeneous)?;
    sort_terms(&mut terms);
    for t in &terms {
        t.form.validate()?;
    }
    Ok(Decomposition {
        a: a.clone(),
        b: b.to_vec(),
        strategy: strategy.clone(),
        field,
        terms,
        homogeneous,
        per_round_counts,
    })
}

/// Number of distinct cones (after [`Decomposition::merged_terms`]) and the
/// live-term counts per round.
pub fn decompose_counts(
    a: &RatMatrix,
    b: &[Rational],
    strategy: &Strategy,
) -> Result<(usize, Vec<usize>)> {
    let d = decompose(a, b, strategy)?;
    Ok((d.merged_terms().len(), d.per_round_counts))
}
