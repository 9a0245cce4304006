//! The classic 3x3 rank-2 demonstration: depending on which entries are
//! hidden, a partial symmetric matrix has a unique completion, finitely
//! many, or a continuum. Run with `cargo run --example worked_3x3`.

use completability::pattern::{GramPattern, Pattern};
use completability::verdict::{test_global, test_local, TestConfig};

fn mask(missing: &[(usize, usize)]) -> Pattern {
    let mut edges = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            if !missing.contains(&(i + 1, j + 1)) {
                edges.push((i, j));
            }
        }
    }
    Pattern::Gram(GramPattern::new(3, edges).expect("valid pattern"))
}

fn main() {
    let cfg = TestConfig::default();
    let cases = [
        ("missing (3,3): unique completion", mask(&[(3, 3)])),
        ("missing (1,3): two completions", mask(&[(1, 3)])),
        ("missing (2,2) and (3,3): a continuum", mask(&[(2, 2), (3, 3)])),
    ];

    for (label, pattern) in &cases {
        let local = test_local(pattern, 2, &cfg).expect("test runs");
        let global = test_global(pattern, 2, &cfg).expect("test runs");
        println!("{label}");
        println!(
            "  m = {}, locally completable: {}, globally completable: {}",
            local.m, local.completable, global.completable
        );
        if !local.flags.is_empty() || !global.flags.is_empty() {
            println!("  flags: local {:?}, global {:?}", local.flags, global.flags);
        }
    }

    println!();
    println!("The left pattern is locally completable (the missing diagonal");
    println!("entry is forced), the middle one admits exactly two completions");
    println!("(locally but not globally completable), and the right one has a");
    println!("one-parameter family (rejected by the entry count alone).");
}
