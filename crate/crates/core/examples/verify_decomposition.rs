//! Brute-force and cross-strategy checks of a decomposition.

use simpcone::decompose::{decompose, Strategy};
use simpcone::exactalg::{rat_vec, RatMatrix};
use simpcone::verify::{brute_force_points, cross_strategy_check, pointwise_check, Box};

fn main() -> simpcone::Result<()> {
    let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
    let b = rat_vec(&[1, -3]);
    let sols = brute_force_points(&a, &b, Box { bound: 5 })?;
    println!("{} solutions in [0,5]^6, e.g. {:?}", sols.len(), sols.iter().next());
    for s in [Strategy::S0, Strategy::S1, Strategy::S2] {
        let rep = pointwise_check(&decompose(&a, &b, &s)?, Box { bound: 5 })?;
        println!("{s}: pointwise {} over {} points", if rep.passed { "ok" } else { "FAILED" }, rep.checked_points);
    }
    let rep = cross_strategy_check(&a, &b, &[Strategy::S0, Strategy::S1, Strategy::S2], 5, 42)?;
    println!("cross-strategy agreement at {} points: {}", rep.checked_points, rep.passed);
    Ok(())
}
