//! Exact rational matrices: determinant, inverse, rank and Smith normal form.

use simpcone::exactalg::{mat_det, mat_inverse, mat_rank, smith_normal_form, RatMatrix};

fn main() -> simpcone::Result<()> {
    let m = RatMatrix::from_ints(&[[2, 4, 4], [-6, 6, 12], [10, -4, -16]]);
    println!("det = {}", mat_det(&m)?);
    println!("rank = {}", mat_rank(&m));
    println!("inverse = {:?}", mat_inverse(&m)?);
    let snf = smith_normal_form(&m)?;
    let inv: Vec<String> = snf.invariants().iter().map(ToString::to_string).collect();
    println!("invariant factors {}", inv.join(", "));
    assert_eq!(snf.u.mul(&m)?.mul(&snf.v)?, snf.h);
    Ok(())
}
