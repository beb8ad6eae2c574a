//! Randomized invariants of the public API.

use proptest::prelude::*;

use mast::condensed::{joint, CondensedForm, JointTree, Query};
use mast::mast::{mast_leafset, mast_size, zero_zero, Config};
use mast::oracle::{check_agreement, random_tree};
use mast::rake::{phi_potential, rake_decomposition};
use mast::tree::{parse_newick, restrict, to_newick, LabelIndex, Lca};

fn tree_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..40, 2usize..6, any::<u64>())
}

fn numeric_index(n: usize) -> LabelIndex {
    let width = n.saturating_sub(1).to_string().len();
    LabelIndex::from_names((0..n).map(|i| format!("t{i:0width$}")).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn newick_roundtrip_preserves_agreement((n, d, seed) in tree_params()) {
        let t = random_tree(n, d, seed);
        let idx = numeric_index(n);
        let text = to_newick(&t, &idx);
        let (back, idx2) = parse_newick(&text, false).unwrap();
        prop_assert_eq!(idx2.names(), idx.names());
        prop_assert_eq!(back.n_leaves(), n);
        // a faithful roundtrip must agree with the original on every leaf
        let (size, _) = zero_zero(&t, &back, &Config::default());
        prop_assert_eq!(size, n as u64);
    }

    #[test]
    fn agreement_size_is_symmetric((n, d, s) in tree_params(), s2 in any::<u64>()) {
        let t1 = random_tree(n, d, s);
        let t2 = random_tree(n, d, s2);
        let cfg = Config::default();
        prop_assert_eq!(mast_size(&t1, &t2, &cfg).0, mast_size(&t2, &t1, &cfg).0);
    }

    #[test]
    fn restriction_never_grows_agreement((n, d, s) in tree_params(), s2 in any::<u64>(), keep in 1usize..40) {
        let t1 = random_tree(n, d, s);
        let t2 = random_tree(n, d, s2);
        let cfg = Config::default();
        let full = mast_size(&t1, &t2, &cfg).0;
        let labels: Vec<usize> = (0..keep.min(n)).collect();
        let r1 = restrict(&t1, &Lca::new(&t1), &labels);
        let r2 = restrict(&t2, &Lca::new(&t2), &labels);
        let part = mast_size(&r1.tree, &r2.tree, &cfg).0;
        prop_assert!(part <= full);
        prop_assert!(full <= n as u64);
    }

    #[test]
    fn witness_agrees_and_matches_size((n, d, s) in tree_params(), s2 in any::<u64>()) {
        let t1 = random_tree(n, d, s);
        let t2 = random_tree(n, d, s2);
        let labels = mast_leafset(&t1, &t2);
        prop_assert!(check_agreement(&t1, &t2, &labels));
        prop_assert_eq!(labels.len() as u64, mast_size(&t1, &t2, &Config::default()).0);
    }

    #[test]
    fn rake_partitions_vertices_in_few_rounds((n, d, seed) in tree_params()) {
        let t = random_tree(n, d, seed);
        let dec = rake_decomposition(&t);
        let mut seen = vec![false; t.len()];
        for tube in dec.rounds.iter().flatten() {
            for &v in &tube.vertices {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(seen.iter().all(|&x| x));
        prop_assert!(dec.n_rounds() as f64 <= (n as f64).log2() + 1.0);
        prop_assert!(phi_potential(&t) <= 2.0 * n as f64 * (1.0 + (n as f64).log2()) + 1e-9);
    }

    #[test]
    fn condensed_roundtrip_and_joint(seqs in prop::collection::vec(prop::collection::vec(0u64..50, 12), 1..6)) {
        let sorted: Vec<Vec<u64>> = seqs
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.sort_unstable_by(|a, b| b.cmp(a));
                s
            })
            .collect();
        let forms: Vec<CondensedForm> =
            sorted.iter().map(|s| CondensedForm::from_seq(s).unwrap()).collect();
        for (f, s) in forms.iter().zip(&sorted) {
            prop_assert_eq!(&f.decode(), s);
        }
        let refs: Vec<&CondensedForm> = forms.iter().collect();
        let j = joint(&refs);
        let want: Vec<u64> =
            (0..12).map(|i| sorted.iter().map(|s| s[i]).max().unwrap()).collect();
        prop_assert_eq!(j.decode(), want);

        let tree = JointTree::new(&forms);
        for lo in 1..=forms.len() {
            for hi in lo..=forms.len() {
                for pos in 1..=12 {
                    let naive =
                        sorted[lo - 1..hi].iter().map(|s| s[pos - 1]).max().unwrap();
                    prop_assert_eq!(tree.query(Query { lo, hi, j: pos }), naive);
                }
            }
        }
    }
}
