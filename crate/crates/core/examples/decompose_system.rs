//! Decomposes a system file (default: the 2×6 system in `data/`) into signed
//! shifted simplicial cones.

use simpcone::cli::parse_system;
use simpcone::conegf::cone_of;
use simpcone::decompose::{decompose, Strategy};

fn main() -> simpcone::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/inhomogeneous_2x6.txt").to_string());
    let (a, b) = parse_system(&std::fs::read_to_string(path)?)?.system();
    let dec = decompose(&a, &b, &Strategy::S2)?;
    for t in dec.merged_terms() {
        let c = cone_of(&t)?;
        let j: Vec<usize> = c.j.iter().map(|x| x + 1).collect();
        println!("weight {} J {:?}", t.weight, j);
        println!("{:?}", t.form.visible());
        let v: Vec<String> = c.vertex.iter().map(ToString::to_string).collect();
        println!("vertex ({})\n", v.join(", "));
    }
    Ok(())
}
