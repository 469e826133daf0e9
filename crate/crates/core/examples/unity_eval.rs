//! Roots-of-unity evaluation of a full-dimensional cone against a truncated
//! lattice-point sum.

use num_complex::Complex64;
use simpcone::exactalg::{rat_vec, RatMatrix};
use simpcone::unimod::{build_hat, homogenize_cone, unity_root_eval, DEFAULT_TRUNCATION};

fn main() -> simpcone::Result<()> {
    let b = RatMatrix::from_ints(&[[3, 1], [0, 4]]);
    let (a, md) = homogenize_cone(&b)?;
    println!("homogenized system {a:?}\nexpected generator block {md:?}");
    let hat = build_hat(&a, &rat_vec(&[0, 0]), &[0, 1])?;
    let point: Vec<Complex64> = [0.3, 0.28, 0.25, 0.22]
        .iter()
        .enumerate()
        .map(|(i, &m)| Complex64::from_polar(m, 0.4 * i as f64))
        .collect();
    let rep = unity_root_eval(&hat, &point, DEFAULT_TRUNCATION)?;
    println!("{} root-of-unity terms", rep.term_count);
    println!("formula   {:.12}\ntruncated {:.12}\nerror     {:e}", rep.value, rep.truncation_value, rep.abs_error);
    Ok(())
}
