//! Rational generating functions of the cones of a homogeneous decomposition,
//! evaluated exactly at a seeded point.

use simpcone::conegf::{cone_of, cone_sum_value, zy_rational, EvalPoints};
use simpcone::decompose::{decompose, Strategy};
use simpcone::exactalg::{rat_vec, RatMatrix};

fn main() -> simpcone::Result<()> {
    let a = RatMatrix::from_ints(&[[1, -2, 1, -1], [-1, 2, 3, -1]]);
    let mut values = Vec::new();
    for s in [Strategy::S0, Strategy::S2] {
        let dec = decompose(&a, &rat_vec(&[0, 0]), &s)?;
        let mut cones = Vec::new();
        for t in dec.merged_terms() {
            let c = cone_of(&t)?;
            let g = zy_rational(&c)?;
            println!("{s}: {} · ({} numerator terms) / ∏(1 − y^d), d ∈ {:?}", t.weight, g.numerator.len(), g.denominator);
            cones.push((c, g));
        }
        let mut pts = EvalPoints::new(4, 1);
        let (p, v) = pts.next_admissible(|p| cone_sum_value(&cones, p))?;
        let p: Vec<String> = p.iter().map(ToString::to_string).collect();
        println!("{s}: value at ({}) = {v}\n", p.join(", "));
        values.push(v);
    }
    assert_eq!(values[0], values[1]);
    Ok(())
}
