//! GF(A) against (−1)^r·GF(−A) computed in the reversed series field.

use simpcone::decompose::Strategy;
use simpcone::exactalg::RatMatrix;
use simpcone::verify::reciprocity_check;

fn main() -> simpcone::Result<()> {
    for a in [
        RatMatrix::from_ints(&[[1, -1]]),
        RatMatrix::from_ints(&[[1, 1, -1]]),
        RatMatrix::from_ints(&[[1, -2, 1, -1], [-1, 2, 3, -1]]),
    ] {
        let rep = reciprocity_check(&a, &Strategy::S2, &Strategy::S2, 5, 7)?;
        println!("{}×{}: {}", a.rows(), a.cols(), if rep.passed { "holds" } else { "FAILS" });
    }
    Ok(())
}
