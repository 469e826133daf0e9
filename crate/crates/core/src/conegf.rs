//! Shifted simplicial cones read off terminal matrix forms, their series
//! readings and their rational generating functions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::TermState;
use crate::error::{Error, Result};
use crate::exactalg::{RatMatrix, Rational};
use crate::matform::{smallness, Smallness};

/// The shifted cone `vertex + ℝ≥0·generators`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTerm {
    pub weight: Rational,
    /// Retired columns (0-based).
    pub j: Vec<usize>,
    /// For each generator, the coordinate where it carries the identity entry.
    pub free: Vec<usize>,
    pub generators: Vec<Vec<Rational>>,
    pub vertex: Vec<Rational>,
}

impl ConeTerm {
    /// Builds a cone from explicit data. Each generator must have a `1` at a
    /// coordinate where every other generator and the vertex vanish.
    pub fn new(
        weight: Rational,
        generators: Vec<Vec<Rational>>,
        vertex: Vec<Rational>,
    ) -> Result<Self> {
        let n = vertex.len();
        let mut free = Vec::with_capacity(generators.len());
        for (t, g) in generators.iter().enumerate() {
            if g.len() != n {
                return Err(Error::Shape("generator length differs from vertex".into()));
            }
            let f = (0..n).find(|&i| {
                g[i].is_one()
                    && vertex[i].is_zero()
                    && generators
                        .iter()
                        .enumerate()
                        .all(|(s, h)| s == t || h[i].is_zero())
            });
            match f {
                Some(f) => free.push(f),
                None => {
                    return Err(Error::Invariant(format!(
                        "generator {} has no identity coordinate",
                        t + 1
                    )))
                }
            }
        }
        let j = (0..n).filter(|i| !free.contains(i)).collect();
        Ok(ConeTerm {
            weight,
            j,
            free,
            generators,
            vertex,
        })
    }

    pub fn dim(&self) -> usize {
        self.vertex.len()
    }
}

/// Reads the cone `K°(M_r⟨J⟩)` off a terminal term.
pub fn cone_of(term: &TermState) -> Result<ConeTerm> {
    let f = &term.form;
    if !f.is_terminal() {
        return Err(Error::Precondition(format!(
            "form has {} of {} λ eliminated",
            f.k(),
            f.r()
        )));
    }
    f.validate()?;
    let n = f.n();
    let e = f.entries();
    let free: Vec<usize> = f.active_cols().collect();
    let generators = free
        .iter()
        .map(|&j| (0..n).map(|i| e[(i, j)].clone()).collect())
        .collect();
    let vertex = (0..n).map(|i| e[(i, n)].clone()).collect();
    Ok(ConeTerm {
        weight: term.weight.clone(),
        j: f.ignored_cols().iter().copied().collect(),
        free,
        generators,
        vertex,
    })
}

/// Forward expansion of a cone term: every generator is small, Large ones
/// having been flipped through `1/(1−x) = −x⁻¹/(1−x⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesReading {
    pub sign: i32,
    pub free: Vec<usize>,
    pub fgens: Vec<Vec<Rational>>,
    pub fvertex: Vec<Rational>,
    pub flipped: Vec<bool>,
}

pub fn series_reading(c: &ConeTerm) -> Result<SeriesReading> {
    let mut sign = 1;
    let mut fvertex = c.vertex.clone();
    let mut fgens = Vec::with_capacity(c.generators.len());
    let mut flipped = Vec::with_capacity(c.generators.len());
    for g in &c.generators {
        match smallness(g) {
            Smallness::Zero => return Err(Error::DegenerateCone),
            Smallness::Small => {
                fgens.push(g.clone());
                flipped.push(false);
            }
            Smallness::Large => {
                sign = -sign;
                let neg: Vec<Rational> = g.iter().map(|x| -x).collect();
                for (v, x) in fvertex.iter_mut().zip(&neg) {
                    *v += x;
                }
                fgens.push(neg);
                flipped.push(true);
            }
        }
    }
    Ok(SeriesReading {
        sign,
        free: c.free.clone(),
        fgens,
        fvertex,
        flipped,
    })
}

impl SeriesReading {
    /// Undoes the flips, recovering `(generators, vertex)`.
    pub fn unflip(&self) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        let mut vertex = self.fvertex.clone();
        let mut gens = Vec::with_capacity(self.fgens.len());
        for (g, &f) in self.fgens.iter().zip(&self.flipped) {
            if f {
                for (v, x) in vertex.iter_mut().zip(g) {
                    *v -= x;
                }
                gens.push(g.iter().map(|x| -x).collect());
            } else {
                gens.push(g.clone());
            }
        }
        (gens, vertex)
    }
}

/// Coefficient of `y^α` in the reading: `sign` if `α` is in the shifted
/// semigroup, else 0.
pub fn coefficient(rd: &SeriesReading, alpha: &[i64]) -> i32 {
    let n = rd.fvertex.len();
    if alpha.len() != n {
        return 0;
    }
    let mut ks = Vec::with_capacity(rd.fgens.len());
    for (g, &f) in rd.fgens.iter().zip(&rd.free) {
        let k = (Rational::from_integer(alpha[f].into()) - &rd.fvertex[f]) / &g[f];
        if !k.is_integer() || k.is_negative() {
            return 0;
        }
        ks.push(k);
    }
    for i in 0..n {
        let mut x = rd.fvertex[i].clone();
        for (g, k) in rd.fgens.iter().zip(&ks) {
            x += &g[i] * k;
        }
        if x != Rational::from_integer(alpha[i].into()) {
            return 0;
        }
    }
    rd.sign
}

fn lcm_of_denoms<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// `x·l` as an `i64`, if it is an integer in range.
fn scaled(x: &Rational, l: &BigInt) -> Option<i64> {
    let y = x * Rational::from_integer(l.clone());
    if y.is_integer() {
        y.to_integer().to_i64()
    } else {
        None
    }
}

/// Integer-valued candidate range for `k_t` from the box on its free row.
fn k_range(rd: &SeriesReading, t: usize, bound: i64) -> Option<(i64, i64)> {
    let f = rd.free[t];
    let v = rd.fvertex[f].to_integer().to_i64()?;
    if !rd.fvertex[f].is_integer() {
        return None;
    }
    let s = rd.fgens[t][f].to_integer().to_i64()?;
    // α_f = v + s·k with s = ±1
    let (lo, hi) = if s > 0 {
        (-bound - v, bound - v)
    } else {
        (v - bound, v + bound)
    };
    let lo = lo.max(0);
    (lo <= hi).then_some((lo, hi))
}

/// All `α ∈ [−B,B]ⁿ` with nonzero coefficient in the reading.
pub fn lattice_points(rd: &SeriesReading, bound: i64) -> Vec<Vec<i64>> {
    let n = rd.fvertex.len();
    let m = rd.fgens.len();
    let mut ranges = Vec::with_capacity(m);
    for t in 0..m {
        match k_range(rd, t, bound) {
            Some(r) => ranges.push(r),
            None => return Vec::new(),
        }
    }
    let l = lcm_of_denoms(rd.fvertex.iter().chain(rd.fgens.iter().flatten()));
    let fast = l.to_i64().and_then(|l64| {
        let v: Option<Vec<i64>> = rd.fvertex.iter().map(|x| scaled(x, &l)).collect();
        let g: Option<Vec<Vec<i64>>> = rd
            .fgens
            .iter()
            .map(|g| g.iter().map(|x| scaled(x, &l)).collect())
            .collect();
        Some((l64, v?, g?))
    });
    let mut out = Vec::new();
    let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    match fast {
        Some((l, v, g)) => {
            let l = l as i128;
            let b = bound as i128;
            let mut acc: Vec<i128> = (0..n)
                .map(|i| v[i] as i128 + (0..m).map(|t| k[t] as i128 * g[t][i] as i128).sum::<i128>())
                .collect();
            loop {
                if acc.iter().all(|&x| x % l == 0 && (x / l).abs() <= b) {
                    out.push(acc.iter().map(|&x| (x / l) as i64).collect());
                }
                // odometer
                let mut t = 0;
                loop {
                    if t == m {
                        return out;
                    }
                    if k[t] < ranges[t].1 {
                        k[t] += 1;
                        for i in 0..n {
                            acc[i] += g[t][i] as i128;
                        }
                        break;
                    }
                    let back = (k[t] - ranges[t].0) as i128;
                    for i in 0..n {
                        acc[i] -= back * g[t][i] as i128;
                    }
                    k[t] = ranges[t].0;
                    t += 1;
                }
            }
        }
        None => loop {
            let mut alpha = Vec::with_capacity(n);
            let mut ok = true;
            for i in 0..n {
                let mut x = rd.fvertex[i].clone();
                for t in 0..m {
                    x += &rd.fgens[t][i] * Rational::from_integer(k[t].into());
                }
                match (x.is_integer(), x.to_integer().to_i64()) {
                    (true, Some(a)) if a.abs() <= bound => alpha.push(a),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                out.push(alpha);
            }
            let mut t = 0;
            loop {
                if t == m {
                    return out;
                }
                if k[t] < ranges[t].1 {
                    k[t] += 1;
                    break;
                }
                k[t] = ranges[t].0;
                t += 1;
            }
        },
    }
}

/// `numerator / ∏ (1 − y^d)` with integer exponents throughout.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RationalGF {
    pub numerator: BTreeMap<Vec<i64>, BigInt>,
    pub denominator: Vec<Vec<i64>>,
}

impl RationalGF {
    pub fn monomial(e: Vec<i64>) -> Self {
        let mut numerator = BTreeMap::new();
        numerator.insert(e, BigInt::one());
        RationalGF {
            numerator,
            denominator: Vec::new(),
        }
    }

    pub fn with_denominator(mut self, d: Vec<i64>) -> Self {
        self.denominator.push(d);
        self
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        let slot = self.numerator.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.numerator.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        gf_evaluate(self, point)
    }
}

fn int_vec(v: &[Rational]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.is_integer()
                .then(|| x.to_integer().to_i64())
                .flatten()
                .ok_or_else(|| Error::Domain(format!("exponent {x} is not a machine integer")))
        })
        .collect()
}

/// Every `t ∈ ∏[0, p_j)` as a flat list of combos, along with the sums of the
/// scaled generators.
fn half_sums(gens: &[Vec<i128>], ps: &[u64], n: usize) -> Vec<Vec<i128>> {
    let mut out = vec![vec![0i128; n]];
    for (g, &p) in gens.iter().zip(ps) {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for base in &out {
            let mut cur = base.clone();
            for _ in 0..p {
                next.push(cur.clone());
                for i in 0..n {
                    cur[i] += g[i];
                }
            }
        }
        out = next;
    }
    out
}

/// `Z_y` of the cone's Elliott-rational function.
///
/// With `p_j` the least positive integer making `p_j·γ_j` integral, the result
/// is the integer-exponent part of `y^v ∏_j Σ_{t<p_j} y^{t·γ_j}` over
/// `∏_j (1 − y^{p_j γ_j})`.
pub fn zy_rational(c: &ConeTerm) -> Result<RationalGF> {
    let n = c.dim();
    let mut ps = Vec::with_capacity(c.generators.len());
    let mut denominator = Vec::with_capacity(c.generators.len());
    for g in &c.generators {
        let p = lcm_of_denoms(g);
        let pg: Vec<Rational> = g.iter().map(|x| x * Rational::from_integer(p.clone())).collect();
        denominator.push(int_vec(&pg)?);
        ps.push(
            p.to_u64()
                .ok_or_else(|| Error::Domain("generator denominator too large".into()))?,
        );
    }
    let l = lcm_of_denoms(c.vertex.iter().chain(c.generators.iter().flatten()));
    let l64 = l
        .to_i64()
        .ok_or_else(|| Error::Domain("denominator too large".into()))? as i128;
    let sc = |x: &Rational| -> Result<i128> {
        scaled(x, &l)
            .map(i128::from)
            .ok_or_else(|| Error::Domain("entry too large".into()))
    };
    let v: Vec<i128> = c.vertex.iter().map(sc).collect::<Result<_>>()?;
    let g: Vec<Vec<i128>> = c
        .generators
        .iter()
        .map(|g| g.iter().map(sc).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    // split generators into two halves of similar expansion size
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&j| std::cmp::Reverse(ps[j]));
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let (mut pl, mut pr) = (1u128, 1u128);
    for j in order {
        if pl <= pr {
            pl = pl.saturating_mul(ps[j] as u128);
            left.push(j);
        } else {
            pr = pr.saturating_mul(ps[j] as u128);
            right.push(j);
        }
    }
    let pick = |idx: &[usize]| -> (Vec<Vec<i128>>, Vec<u64>) {
        (idx.iter().map(|&j| g[j].clone()).collect(), idx.iter().map(|&j| ps[j]).collect())
    };
    let (gl, psl) = pick(&left);
    let (gr, psr) = pick(&right);
    let residue = |x: &[i128]| -> Vec<i128> { x.iter().map(|a| a.rem_euclid(l64)).collect() };

    let mut table: HashMap<Vec<i128>, Vec<Vec<i128>>> = HashMap::new();
    for s in half_sums(&gr, &psr, n) {
        table.entry(residue(&s)).or_default().push(s);
    }
    let mut numerator = BTreeMap::new();
    for mut s in half_sums(&gl, &psl, n) {
        for i in 0..n {
            s[i] += v[i];
        }
        let need: Vec<i128> = s.iter().map(|a| (-a).rem_euclid(l64)).collect();
        if let Some(rs) = table.get(&need) {
            for r in rs {
                let e: Vec<i64> = (0..n).map(|i| ((s[i] + r[i]) / l64) as i64).collect();
                numerator.insert(e, BigInt::one());
            }
        }
    }
    Ok(RationalGF {
        numerator,
        denominator,
    })
}

/// `Σ weight·Z_y(cone)` evaluated at `point`.
pub fn gf_evaluate(g: &RationalGF, point: &[Rational]) -> Result<Rational> {
    if point.iter().any(Zero::is_zero) {
        return Err(Error::Domain("evaluation point has a zero coordinate".into()));
    }
    let mut den = Rational::one();
    for d in &g.denominator {
        let f = Rational::one() - monomial_value(point, d);
        if f.is_zero() {
            return Err(Error::EvaluationPoint);
        }
        den *= f;
    }
    Ok(numerator_value(g, point) / den)
}

fn monomial_value(point: &[Rational], e: &[i64]) -> Rational {
    let mut x = Rational::one();
    for (p, &k) in point.iter().zip(e) {
        if k != 0 {
            x *= num_traits::pow::Pow::pow(p, k as i32);
        }
    }
    x
}

/// Sums the numerator over a common denominator: with `y_i = a_i/b_i` and
/// exponents ranging over `[lo_i, hi_i]`, every monomial is
/// `∏ a_i^{lo_i} b_i^{−hi_i} · ∏ a_i^{e_i−lo_i} b_i^{hi_i−e_i}`.
fn numerator_value(g: &RationalGF, point: &[Rational]) -> Rational {
    if g.numerator.is_empty() {
        return Rational::zero();
    }
    let n = point.len();
    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for e in g.numerator.keys() {
        for i in 0..n {
            lo[i] = lo[i].min(e[i]);
            hi[i] = hi[i].max(e[i]);
        }
    }
    let powers = |base: &BigInt, upto: i64| -> Vec<BigInt> {
        let mut v = Vec::with_capacity(upto as usize + 1);
        let mut x = BigInt::one();
        for _ in 0..=upto {
            v.push(x.clone());
            x *= base;
        }
        v
    };
    let apow: Vec<Vec<BigInt>> = (0..n).map(|i| powers(point[i].numer(), hi[i] - lo[i])).collect();
    let bpow: Vec<Vec<BigInt>> = (0..n).map(|i| powers(point[i].denom(), hi[i] - lo[i])).collect();
    // sorted keys: nested Horner sums, one level per coordinate
    let terms: Vec<(&Vec<i64>, &BigInt)> = g.numerator.iter().collect();
    fn nested(
        level: usize,
        terms: &[(&Vec<i64>, &BigInt)],
        lo: &[i64],
        hi: &[i64],
        apow: &[Vec<BigInt>],
        bpow: &[Vec<BigInt>],
    ) -> BigInt {
        if level == lo.len() {
            return terms.iter().map(|(_, c)| (*c).clone()).sum();
        }
        // groups (x_k, inner_k) in increasing x, last one x_K:
        // T_k = inner_k·b^{x_K − x_k} + T_{k+1}·a^{x_{k+1} − x_k}
        let mut groups: Vec<(i64, BigInt)> = Vec::new();
        let mut start = 0;
        while start < terms.len() {
            let x = terms[start].0[level];
            let end = start + terms[start..].partition_point(|t| t.0[level] == x);
            groups.push((x, nested(level + 1, &terms[start..end], lo, hi, apow, bpow)));
            start = end;
        }
        let (first, last) = (groups[0].0, groups[groups.len() - 1].0);
        let mut it = groups.into_iter().rev();
        let (mut x_next, mut t) = it.next().expect("nonempty group");
        for (x, inner) in it {
            t = inner * &bpow[level][(last - x) as usize] + t * &apow[level][(x_next - x) as usize];
            x_next = x;
        }
        let up = (first - lo[level]) as usize;
        let down = (hi[level] - last) as usize;
        if up > 0 {
            t *= &apow[level][up];
        }
        if down > 0 {
            t *= &bpow[level][down];
        }
        t
    }
    let sum = nested(0, &terms, &lo, &hi, &apow, &bpow);
    let mut scale = Rational::one();
    for i in 0..n {
        let a = Rational::from_integer(point[i].numer().clone());
        let b = Rational::from_integer(point[i].denom().clone());
        scale *= num_traits::pow::Pow::pow(&a, lo[i] as i32);
        scale *= num_traits::pow::Pow::pow(&b, -hi[i] as i32);
    }
    Rational::from_integer(sum) * scale
}

/// Weighted sum of the cones' generating functions at `point`.
pub fn cone_sum_value(cones: &[(ConeTerm, RationalGF)], point: &[Rational]) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (c, g) in cones {
        acc += &c.weight * gf_evaluate(g, point)?;
    }
    Ok(acc)
}

fn primes_from(count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 2i64;
    while out.len() < count {
        if (2..).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            out.push(k);
        }
        k += 1;
    }
    out
}

/// Maximum number of fresh points tried when a denominator vanishes.
pub const MAX_POINT_RETRIES: usize = 16;

/// Seeded rational evaluation points.
///
/// Attempt `t` uses the coordinates `(1 + o_i)/q_{i+t}`, where `q_k` is the k-th
/// prime and `o_i ∈ [0, q − 2]` is drawn from the seeded generator.
#[derive(Clone, Debug)]
pub struct EvalPoints {
    rng: ChaCha8Rng,
    dim: usize,
    attempt: usize,
    primes: Vec<i64>,
}

impl EvalPoints {
    pub fn new(dim: usize, seed: u64) -> Self {
        EvalPoints {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            attempt: 0,
            primes: Vec::new(),
        }
    }

    fn raw_next(&mut self) -> Vec<Rational> {
        let t = self.attempt;
        self.attempt += 1;
        if self.primes.len() < self.dim + t {
            self.primes = primes_from(self.dim + t + 8);
        }
        (0..self.dim)
            .map(|i| {
                let q = self.primes[i + t];
                let o = if q > 2 { self.rng.gen_range(0..=q - 2) } else { 0 };
                Rational::new((1 + o).into(), q.into())
            })
            .collect()
    }

    /// Next point at which `eval` succeeds, retrying on vanishing denominators.
    pub fn next_admissible<T>(
        &mut self,
        mut eval: impl FnMut(&[Rational]) -> Result<T>,
    ) -> Result<(Vec<Rational>, T)> {
        for _ in 0..=MAX_POINT_RETRIES {
            let p = self.raw_next();
            match eval(&p) {
                Ok(v) => return Ok((p, v)),
                Err(Error::EvaluationPoint) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::PointsExhausted(MAX_POINT_RETRIES))
    }
}

/// Generator matrix with the generators as columns.
pub fn generator_matrix(c: &ConeTerm) -> Result<RatMatrix> {
    RatMatrix::from_columns(&c.generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose, Strategy};
    use crate::exactalg::{rat, rat_vec, ratio};
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn homog_terms() -> Vec<ConeTerm> {
        let a = RatMatrix::from_ints(&[[1, -2, 1, -1], [-1, 2, 3, -1]]);
        let m = crate::matform::build_initial(&a, &rat_vec(&[0, 0])).unwrap();
        let mut out = Vec::new();
        for j0 in 0..4 {
            for j1 in j0 + 1..4 {
                for (c0, c1) in [(j0, j1), (j1, j0)] {
                    let Ok((s0, f)) = m.eliminate(0, c0) else { continue };
                    let Ok((s1, f)) = f.eliminate(1, c1) else { continue };
                    let t = TermState {
                        weight: rat((s0 * s1).into()),
                        form: f,
                        path: vec![(0, c0), (1, c1)],
                    };
                    out.push(cone_of(&t).unwrap());
                    break;
                }
            }
        }
        out
    }

    fn by_j(cones: &[ConeTerm], j: &[usize]) -> ConeTerm {
        cones.iter().find(|c| c.j == j).unwrap().clone()
    }

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn gf(num: &[(&[i64], i64)], den: &[&[i64]]) -> RationalGF {
        let mut g = RationalGF::default();
        for (e, c) in num {
            g.add_term(e.to_vec(), BigInt::from(*c));
        }
        g.denominator = den.iter().map(|d| d.to_vec()).collect();
        g
    }

    // semigroup points of a reading by direct enumeration of k
    fn oracle_points(rd: &SeriesReading, kmax: i64, bound: i64) -> Vec<Vec<i64>> {
        let m = rd.fgens.len();
        let mut out = Vec::new();
        let mut k = vec![0i64; m];
        loop {
            let mut alpha = Vec::new();
            let mut ok = true;
            for i in 0..rd.fvertex.len() {
                let mut x = rd.fvertex[i].clone();
                for t in 0..m {
                    x += &rd.fgens[t][i] * rat(k[t]);
                }
                if !x.is_integer() || x.abs() > rat(bound) {
                    ok = false;
                    break;
                }
                alpha.push(x.to_integer().to_i64().unwrap());
            }
            if ok {
                out.push(alpha);
            }
            let mut t = 0;
            loop {
                if t == m {
                    out.sort();
                    return out;
                }
                if k[t] < kmax {
                    k[t] += 1;
                    break;
                }
                k[t] = 0;
                t += 1;
            }
        }
    }

    #[test]
    fn cones_of_homogeneous_terms() {
        let cones = homog_terms();
        let c14 = by_j(&cones, &[0, 3]);
        assert_eq!(c14.generators, vec![rat_vec(&[2, 1, 0, 0]), rat_vec(&[1, 0, 1, 2])]);
        assert_eq!(c14.vertex, rat_vec(&[0, 0, 0, 0]));
        let c24 = by_j(&cones, &[1, 3]);
        assert_eq!(
            c24.generators,
            vec![
                vec![rat(1), ratio(1, 2), rat(0), rat(0)],
                vec![rat(0), ratio(-1, 2), rat(1), rat(2)]
            ]
        );
    }

    #[test]
    fn cone_of_inhomogeneous_term() {
        let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
        let d = decompose(&a, &rat_vec(&[1, -3]), &Strategy::S2).unwrap();
        let c = cone_of(&d.terms[1]).unwrap();
        assert_eq!(c.j, vec![0, 5]);
        assert_eq!(
            c.vertex,
            vec![ratio(1, 3), rat(0), rat(0), rat(0), rat(0), ratio(11, 3)]
        );
        assert_eq!(
            c.generators[0],
            vec![q("-1/3"), rat(1), rat(0), rat(0), rat(0), q("-5/3")]
        );
        assert_eq!(c.free, vec![1, 2, 3, 4]);
    }

    #[test]
    fn readings() {
        let c14 = ConeTerm::new(
            rat(1),
            vec![rat_vec(&[2, 1, 0, 0]), rat_vec(&[1, 0, 1, 2])],
            rat_vec(&[0, 0, 0, 0]),
        )
        .unwrap();
        let rd = series_reading(&c14).unwrap();
        assert_eq!(rd.sign, 1);
        assert_eq!(rd.fgens, c14.generators);

        let c24 = ConeTerm::new(
            rat(1),
            vec![
                vec![rat(1), ratio(1, 2), rat(0), rat(0)],
                vec![rat(0), ratio(-1, 2), rat(1), rat(2)],
            ],
            rat_vec(&[0, 0, 0, 0]),
        )
        .unwrap();
        let rd = series_reading(&c24).unwrap();
        assert_eq!(rd.sign, -1);
        assert_eq!(rd.fgens[1], vec![rat(0), ratio(1, 2), rat(-1), rat(-2)]);
        assert_eq!(rd.fvertex, vec![rat(0), ratio(1, 2), rat(-1), rat(-2)]);
        assert_eq!(rd.unflip(), (c24.generators.clone(), c24.vertex.clone()));

        let c34 = ConeTerm::new(
            rat(1),
            vec![rat_vec(&[1, 0, 1, 2]), rat_vec(&[0, 1, -2, -4])],
            rat_vec(&[0, 0, 0, 0]),
        )
        .unwrap();
        let rd = series_reading(&c34).unwrap();
        assert_eq!((rd.sign, &rd.fgens), (1, &c34.generators));
    }

    #[test]
    fn zero_generator_is_degenerate() {
        let c = ConeTerm {
            weight: rat(1),
            j: vec![0],
            free: vec![1],
            generators: vec![rat_vec(&[0, 0])],
            vertex: rat_vec(&[0, 0]),
        };
        assert!(matches!(series_reading(&c), Err(Error::DegenerateCone)));
    }

    #[test]
    fn coefficient_examples() {
        let cones = homog_terms();
        let rd14 = series_reading(&by_j(&cones, &[0, 3])).unwrap();
        assert_eq!(coefficient(&rd14, &[3, 1, 1, 2]), 1);
        assert_eq!(coefficient(&rd14, &[0, 0, 0, 0]), 1);
        assert_eq!(coefficient(&rd14, &[1, 1, 1, 2]), 0);
        let rd24 = series_reading(&by_j(&cones, &[1, 3])).unwrap();
        assert_eq!(coefficient(&rd24, &[0, 0, 0, 0]), 0);
        // brute force: 0 is not among the semigroup points of the reading
        assert!(!oracle_points(&rd24, 8, 20).contains(&vec![0, 0, 0, 0]));
    }

    #[test]
    fn lattice_points_examples() {
        let cones = homog_terms();
        let rd14 = series_reading(&by_j(&cones, &[0, 3])).unwrap();
        let mut pts = lattice_points(&rd14, 2);
        pts.sort();
        assert_eq!(pts, vec![vec![0, 0, 0, 0], vec![1, 0, 1, 2], vec![2, 1, 0, 0]]);
        assert_eq!(pts, oracle_points(&rd14, 4, 2));

        // vertex outside the box in a coordinate that only grows
        let c = ConeTerm::new(rat(1), vec![rat_vec(&[1, 1])], rat_vec(&[0, 5])).unwrap();
        assert!(lattice_points(&series_reading(&c).unwrap(), 4).is_empty());
    }

    #[test]
    fn lattice_points_match_pointwise_coefficients() {
        let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
        let d = decompose(&a, &rat_vec(&[1, -3]), &Strategy::S2).unwrap();
        let rd = series_reading(&cone_of(&d.terms[1]).unwrap()).unwrap();
        let b = 4i64;
        let mut expect = Vec::new();
        let mut alpha = vec![-b; 6];
        'outer: loop {
            if coefficient(&rd, &alpha) != 0 {
                expect.push(alpha.clone());
            }
            let mut i = 0;
            loop {
                if i == 6 {
                    break 'outer;
                }
                if alpha[i] < b {
                    alpha[i] += 1;
                    break;
                }
                alpha[i] = -b;
                i += 1;
            }
        }
        let mut got = lattice_points(&rd, b);
        got.sort();
        expect.sort();
        assert_eq!(got, expect);
    }

    #[test]
    fn zy_of_homogeneous_cones() {
        let cones = homog_terms();
        assert_eq!(
            zy_rational(&by_j(&cones, &[0, 3])).unwrap(),
            gf(&[(&[0, 0, 0, 0], 1)], &[&[2, 1, 0, 0], &[1, 0, 1, 2]])
        );
        assert_eq!(
            zy_rational(&by_j(&cones, &[1, 3])).unwrap(),
            gf(
                &[(&[0, 0, 0, 0], 1), (&[1, 0, 1, 2], 1)],
                &[&[2, 1, 0, 0], &[0, -1, 2, 4]]
            )
        );
        assert_eq!(
            zy_rational(&by_j(&cones, &[2, 3])).unwrap(),
            gf(&[(&[0, 0, 0, 0], 1)], &[&[1, 0, 1, 2], &[0, 1, -2, -4]])
        );
    }

    #[test]
    fn zy_keeps_non_primitive_scaled_generator() {
        // γ = (2/3, 4/3) style entries: p = 3 and 3γ has gcd 2
        let c = ConeTerm::new(
            rat(1),
            vec![vec![rat(1), ratio(2, 3), ratio(4, 3)]],
            rat_vec(&[0, 0, 0]),
        )
        .unwrap();
        let g = zy_rational(&c).unwrap();
        assert_eq!(g.denominator, vec![vec![3, 2, 4]]);
        assert_eq!(g.numerator.len(), 1);
    }

    #[test]
    fn evaluation_examples() {
        let g = gf(&[(&[0], 1)], &[&[1]]);
        assert_eq!(gf_evaluate(&g, &[ratio(1, 2)]).unwrap(), rat(2));
        let g14 = gf(&[(&[0, 0, 0, 0], 1)], &[&[2, 1, 0, 0], &[1, 0, 1, 2]]);
        let p = vec![ratio(1, 2), ratio(1, 3), ratio(1, 5), ratio(1, 7)];
        assert_eq!(gf_evaluate(&g14, &p).unwrap(), ratio(5880, 5379));
        let one = gf(&[(&[0], 1)], &[&[1]]);
        assert!(matches!(gf_evaluate(&one, &[rat(1)]), Err(Error::EvaluationPoint)));
    }

    #[test]
    fn numerator_with_negative_exponents() {
        let g = gf(&[(&[-2, 1], 3), (&[1, -1], -1), (&[0, 0], 2)], &[]);
        let p = vec![ratio(2, 3), ratio(-5, 7)];
        let direct = rat(3) * monomial_value(&p, &[-2, 1]) - monomial_value(&p, &[1, -1]) + rat(2);
        assert_eq!(gf_evaluate(&g, &p).unwrap(), direct);
    }

    #[test]
    fn homogeneous_sum_identity() {
        let cones = homog_terms();
        let g14 = zy_rational(&by_j(&cones, &[0, 3])).unwrap();
        let g24 = zy_rational(&by_j(&cones, &[1, 3])).unwrap();
        let g34 = zy_rational(&by_j(&cones, &[2, 3])).unwrap();
        let mut pts = EvalPoints::new(4, 11);
        for _ in 0..5 {
            let (p, lhs) = pts
                .next_admissible(|p| Ok(gf_evaluate(&g24, p)? + gf_evaluate(&g34, p)?))
                .unwrap();
            assert_eq!(lhs, gf_evaluate(&g14, &p).unwrap());
        }
    }

    #[test]
    fn eval_points_are_seeded() {
        let mut a = EvalPoints::new(3, 5);
        let mut b = EvalPoints::new(3, 5);
        let pa = a.next_admissible(|p| Ok(p.to_vec())).unwrap().0;
        let pb = b.next_admissible(|p| Ok(p.to_vec())).unwrap().0;
        assert_eq!(pa, pb);
        assert_eq!(*pa[0].denom(), BigInt::from(2));
        assert_eq!(*pa[2].denom(), BigInt::from(5));
        let mut c = EvalPoints::new(1, 0);
        assert!(matches!(
            c.next_admissible(|_| -> Result<()> { Err(Error::EvaluationPoint) }),
            Err(Error::PointsExhausted(_))
        ));
    }

    // expanded numerator by the plain product over t, as an independent check
    fn zy_naive(c: &ConeTerm) -> BTreeMap<Vec<i64>, BigInt> {
        let ps: Vec<i64> = c
            .generators
            .iter()
            .map(|g| lcm_of_denoms(g).to_i64().unwrap())
            .collect();
        let mut out = BTreeMap::new();
        let mut t = vec![0i64; ps.len()];
        loop {
            let mut x = c.vertex.clone();
            for (g, &k) in c.generators.iter().zip(&t) {
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi += gi * rat(k);
                }
            }
            if x.iter().all(|v| v.is_integer()) {
                out.insert(
                    x.iter().map(|v| v.to_integer().to_i64().unwrap()).collect(),
                    BigInt::one(),
                );
            }
            let mut s = 0;
            loop {
                if s == ps.len() {
                    return out;
                }
                if t[s] + 1 < ps[s] {
                    t[s] += 1;
                    break;
                }
                t[s] = 0;
                s += 1;
            }
        }
    }

    fn arb_system() -> impl proptest::strategy::Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
        (1usize..=2, 3usize..=5).prop_flat_map(|(r, n)| {
            (
                prop::collection::vec(prop::collection::vec(-5i64..=5, n), r),
                prop::collection::vec(-6i64..=6, r),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn zy_matches_plain_expansion((rows, b) in arb_system()) {
            let a = RatMatrix::from_ints(&rows);
            prop_assume!(crate::exactalg::mat_rank(&a) == rows.len());
            let d = decompose(&a, &rat_vec(&b), &crate::decompose::Strategy::S2);
            prop_assume!(!matches!(d, Err(Error::Precondition(_))));
            let d = d.unwrap();
            for t in &d.terms {
                let c = cone_of(t).unwrap();
                let g = zy_rational(&c).unwrap();
                prop_assert_eq!(&g.numerator, &zy_naive(&c));
                // integral cones: one monomial at the vertex, generators as is
                if c.generators.iter().flatten().chain(&c.vertex).all(|x| x.is_integer()) {
                    prop_assert_eq!(g.numerator.len(), 1);
                    let gens: Vec<Vec<i64>> = c.generators.iter().map(|v| int_vec(v).unwrap()).collect();
                    prop_assert_eq!(&g.denominator, &gens);
                }
                let rd = series_reading(&c).unwrap();
                prop_assert!(rd.fgens.iter().all(|v| smallness(v) == Smallness::Small));
                prop_assert_eq!(rd.unflip(), (c.generators.clone(), c.vertex.clone()));
                let mut lp = lattice_points(&rd, 3);
                lp.sort();
                prop_assert_eq!(lp, oracle_points(&rd, 5, 3));
            }
        }

        #[test]
        fn reading_and_cone_have_same_gf((rows, b) in arb_system()) {
            let a = RatMatrix::from_ints(&rows);
            prop_assume!(crate::exactalg::mat_rank(&a) == rows.len());
            let d = decompose(&a, &rat_vec(&b), &crate::decompose::Strategy::S2);
            prop_assume!(!matches!(d, Err(Error::Precondition(_))));
            let d = d.unwrap();
            for t in &d.terms {
                let c = cone_of(t).unwrap();
                let rd = series_reading(&c).unwrap();
                let flipped = ConeTerm::new(rat(rd.sign.into()), rd.fgens.clone(), rd.fvertex.clone());
                // vertex of a flipped reading is nonzero at free rows, so build by hand
                let flipped = flipped.unwrap_or(ConeTerm {
                    weight: rat(rd.sign.into()),
                    j: c.j.clone(),
                    free: rd.free.clone(),
                    generators: rd.fgens.clone(),
                    vertex: rd.fvertex.clone(),
                });
                let g0 = zy_rational(&c).unwrap();
                let g1 = zy_rational(&flipped).unwrap();
                let mut pts = EvalPoints::new(c.dim(), 3);
                let (_, ok) = pts.next_admissible(|p| {
                    Ok(gf_evaluate(&g0, p)? == rat(rd.sign.into()) * gf_evaluate(&g1, p)?)
                }).unwrap();
                prop_assert!(ok);
            }
        }
    }
}
