//! Cross-check the path-contraction solver against the quadratic reference
//! table on a batch of random trees, with structural validation switched on.

use mast::mast::{mast_size, Config};
use mast::oracle::{random_tree, rr_bruteforce};

fn main() {
    let cfg = Config { validate: true };
    let mut checks = 0u64;
    for seed in 0..40u64 {
        let n = 5 + (seed as usize * 13) % 46;
        let d = 2 + (seed as usize) % 5;
        let t1 = random_tree(n, d, 9000 + seed);
        let t2 = random_tree(n, d, 9100 + seed);
        let want = rr_bruteforce(&t1, &t2);
        let (got, counters) = mast_size(&t1, &t2, &cfg);
        assert_eq!(got, want, "n={n} d={d} seed={seed}");
        assert_eq!(counters.validation_failures, 0);
        checks += counters.validation_checks;
    }
    println!("40 instances agree with the reference; {checks} structural checks passed");
}
