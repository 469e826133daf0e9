//! Drives the command-line front end in-process.

fn main() {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/inhomogeneous_2x6.txt");
    let commands: [&[&str]; 4] = [
        &["simpcone", "decompose", "--strategy", "s2", "--input", data, "--json"],
        &["simpcone", "verify", "--input", data, "--strategy", "s1", "--box", "5"],
        &["simpcone", "cross", "--input", data, "--strategies", "s0,s1,s2", "--points", "3", "--seed", "1"],
        &["simpcone", "snf", "--input", data, "--cols", "1,6"],
    ];
    for args in commands {
        println!("$ {}", args[1..].join(" "));
        let code = simpcone::cli::run(args.iter().copied(), &mut std::io::stdout(), &mut std::io::stderr());
        println!("(exit {code})\n");
    }
}
