//! Smith normal form of a pivot block, the hat form and the denumerant task.

use simpcone::exactalg::{rat_vec, RatMatrix};
use simpcone::unimod::{build_hat, denumerant_task};

fn main() -> simpcone::Result<()> {
    let a = RatMatrix::from_ints(&[[3, 1, -4, -9, -1, 0], [2, -1, 1, -3, 0, -1]]);
    let hat = build_hat(&a, &rat_vec(&[1, -3]), &[0, 5])?;
    println!("U = {:?}\nH = {:?}\nV = {:?}", hat.snf.u, hat.snf.h, hat.snf.v);
    println!("hat form\n{:?}", hat.base);
    println!("terminal forms related by diag(V⁻¹, id): {}", hat.identity_holds()?);
    let (single, task) = denumerant_task(&hat);
    println!("single denumerant constant term: {single}\n{task}");
    Ok(())
}
