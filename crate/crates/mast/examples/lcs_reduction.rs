//! Longest common subsequence as an agreement-subtree instance: two
//! sequences over distinct symbols become caterpillars sharing a bottom
//! cherry of sentinels, and the agreement size is the LCS length plus two.

use mast::mast::{mast_size, Config};
use mast::oracle::{lcs_caterpillar, lcs_dp, random_distinct_seq};

fn main() {
    let alphabet = 12;
    let s1 = random_distinct_seq(9, alphabet, 11);
    let s2 = random_distinct_seq(9, alphabet, 22);
    println!("s1 = {s1:?}");
    println!("s2 = {s2:?}");

    let lcs = lcs_dp(&s1, &s2);
    let t1 = lcs_caterpillar(&s1, alphabet);
    let t2 = lcs_caterpillar(&s2, alphabet);
    let (size, _) = mast_size(&t1, &t2, &Config::default());
    println!("lcs = {lcs}, agreement size = {size}");
    assert_eq!(size, lcs as u64 + 2);
}
