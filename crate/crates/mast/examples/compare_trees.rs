//! Parse two Newick trees, compute their maximum agreement subtree size and
//! a witness leaf set, and double check the witness.

use mast::mast::{mast_leafset, mast_size, unify_labels, Config};
use mast::oracle::check_agreement;
use mast::tree::parse_newick;

fn main() {
    let (t1, idx1) = parse_newick("((a,b),((c,d),(e,(f,g))));", false).unwrap();
    let (t2, idx2) = parse_newick("((a,(b,c)),((d,e),(g,f)));", false).unwrap();
    let (u1, u2, union) = unify_labels(&t1, &idx1, &t2, &idx2);

    let (size, counters) = mast_size(&u1, &u2, &Config::default());
    println!("agreement size: {size}");
    println!("core calls: {}, evaluated pairs: {}", counters.one_one_calls, counters.pairs_geb);

    let labels = mast_leafset(&u1, &u2);
    let names: Vec<&str> = labels.iter().map(|&l| union.name(l)).collect();
    println!("witness leaves: {}", names.join(","));
    assert_eq!(labels.len() as u64, size);
    assert!(check_agreement(&u1, &u2, &labels));
    println!("witness checks out");
}
