//! Peel a tree into root paths (tubes), round by round, and watch the
//! potential that bounds the total work shrink.

use mast::oracle::random_tree;
use mast::rake::{phi_potential, rake_decomposition};

fn main() {
    let t = random_tree(40, 3, 7);
    println!("tree with {} leaves, phi = {:.2}", t.n_leaves(), phi_potential(&t));

    let dec = rake_decomposition(&t);
    for (r, tubes) in dec.rounds.iter().enumerate() {
        let total: usize = tubes.iter().map(|tb| tb.len()).sum();
        println!("round {r}: {} tubes covering {} vertices", tubes.len(), total);
    }
    let covered: usize = dec.rounds.iter().flatten().map(|tb| tb.len()).sum();
    assert_eq!(covered, t.len(), "every vertex lands in exactly one tube");
    println!("{}", dec.to_json());
}
