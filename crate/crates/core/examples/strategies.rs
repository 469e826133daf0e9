//! Cone counts of the built-in strategies and of a user-defined one.

use simpcone::decompose::{decompose, decompose_counts, Strategy};
use simpcone::exactalg::{rat_vec, RatMatrix};
use simpcone::matform::Formula;

fn main() -> simpcone::Result<()> {
    let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
    let b = rat_vec(&[1, -3]);

    // always the first active λ, always the dual formula when allowed
    let dual_first = Strategy::custom("dual-first", |form, _round| {
        let i = form.active_rows().next().expect("called on non-terminal forms");
        if form.formula_valid(i, Formula::Dual)? {
            Ok((i, Formula::Dual))
        } else {
            Ok((i, Formula::Contributing))
        }
    });

    for s in [Strategy::S0, Strategy::S1, Strategy::S2, dual_first] {
        let (cones, rounds) = decompose_counts(&a, &b, &s)?;
        let raw = decompose(&a, &b, &s)?.terms.len();
        println!("{s:>10}: {cones} cones ({raw} raw terms), live terms per round {rounds:?}");
    }
    Ok(())
}
