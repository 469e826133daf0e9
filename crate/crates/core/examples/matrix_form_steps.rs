//! One elimination step by hand: counts, formula validity and branches.

use simpcone::exactalg::{rat_vec, RatMatrix};
use simpcone::matform::{build_initial, Formula};

fn main() -> simpcone::Result<()> {
    let a = RatMatrix::from_ints(&[[1, -2, 1, -1], [-1, 2, 3, -1]]);
    let m = build_initial(&a, &rat_vec(&[0, 0]))?;
    println!("{m:?}");
    for i in 0..2 {
        let cp = m.counts(i)?;
        let (deg, ord) = m.degree_order(i)?;
        println!("λ{}: c = {}, d = {}, deg = {deg}, ord = {ord}", i + 1, cp.c, cp.d);
    }
    for (sign, form) in m.expand(0, Formula::Dual)? {
        let j: Vec<usize> = form.ignored_cols().iter().map(|x| x + 1).collect();
        println!("\nbranch {sign:+} with J = {j:?}\n{:?}", form.visible());
    }
    Ok(())
}
