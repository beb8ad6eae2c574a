//! Independent reference implementations used to cross-check the fast solver:
//! a quadratic dynamic program for agreement subtree size, an agreement
//! checker, the reduction from longest common subsequence, and deterministic
//! tree generators.

use crate::matching::{mm, BipartiteGraph};
use crate::tree::{restrict, EvoTree, Label, Lca};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size of the maximum agreement subtree of `t1^u` and `t2^v` for every
/// vertex pair, by the classic quadratic dynamic program:
/// the best either matches the two roots and pairs up their child subtrees
/// with a maximum weight matching, or descends into one child on either side.
/// Works directly on trees with different label sets (only shared labels can
/// agree).
pub fn rr_table(t1: &EvoTree, t2: &EvoTree) -> Vec<Vec<u64>> {
    let n1 = t1.len();
    let n2 = t2.len();
    let mut dp = vec![vec![0u64; n2]; n1];
    let post1: Vec<usize> = t1.preorder().into_iter().rev().collect();
    let post2: Vec<usize> = t2.preorder().into_iter().rev().collect();
    for &u in &post1 {
        for &v in &post2 {
            let val = if t1.is_leaf(u) && t2.is_leaf(v) {
                (t1.label(u) == t2.label(v)) as u64
            } else if t1.is_leaf(u) {
                t2.children(v).iter().map(|&c| dp[u][c]).max().unwrap()
            } else if t2.is_leaf(v) {
                t1.children(u).iter().map(|&c| dp[c][v]).max().unwrap()
            } else {
                let down1 = t1.children(u).iter().map(|&c| dp[c][v]).max().unwrap();
                let down2 = t2.children(v).iter().map(|&c| dp[u][c]).max().unwrap();
                let mut g = BipartiteGraph::new(t1.children(u).len(), t2.children(v).len());
                for (i, &c1) in t1.children(u).iter().enumerate() {
                    for (j, &c2) in t2.children(v).iter().enumerate() {
                        if dp[c1][c2] > 0 {
                            g.add_edge(i, j, dp[c1][c2]);
                        }
                    }
                }
                down1.max(down2).max(mm(&g))
            };
            dp[u][v] = val;
        }
    }
    dp
}

/// Agreement subtree size of the two whole trees.
pub fn rr_bruteforce(t1: &EvoTree, t2: &EvoTree) -> u64 {
    if t1.is_empty() || t2.is_empty() {
        return 0;
    }
    rr_table(t1, t2)[t1.root().unwrap()][t2.root().unwrap()]
}

/// True iff restricting both trees to `labels` yields the same tree up to
/// isomorphism (matching leaf labels, children unordered). Labels absent from
/// either tree fail the check.
pub fn check_agreement(t1: &EvoTree, t2: &EvoTree, labels: &[Label]) -> bool {
    if labels.is_empty() {
        return true;
    }
    for &l in labels {
        if l >= t1.nlabels()
            || l >= t2.nlabels()
            || t1.leaf_of_label(l).is_none()
            || t2.leaf_of_label(l).is_none()
        {
            return false;
        }
    }
    let r1 = restrict(t1, &Lca::new(t1), labels);
    let r2 = restrict(t2, &Lca::new(t2), labels);
    isomorphic(&r1.tree, &r2.tree)
}

/// Isomorphism of labeled trees: children are canonically ordered by the
/// minimum label in their subtree (a valid key, since subtree label sets
/// partition the leaves), then compared pairwise.
fn isomorphic(a: &EvoTree, b: &EvoTree) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let min_label = |t: &EvoTree| {
        let mut m = vec![usize::MAX; t.len()];
        for &v in t.preorder().iter().rev() {
            m[v] = match t.label(v) {
                Some(l) => l,
                None => t.children(v).iter().map(|&c| m[c]).min().unwrap(),
            };
        }
        m
    };
    let ma = min_label(a);
    let mb = min_label(b);
    let mut stack = vec![(a.root().unwrap(), b.root().unwrap())];
    while let Some((u, v)) = stack.pop() {
        match (a.label(u), b.label(v)) {
            (Some(x), Some(y)) => {
                if x != y {
                    return false;
                }
            }
            (None, None) => {
                if a.children(u).len() != b.children(v).len() {
                    return false;
                }
                let mut cu: Vec<usize> = a.children(u).to_vec();
                let mut cv: Vec<usize> = b.children(v).to_vec();
                cu.sort_unstable_by_key(|&c| ma[c]);
                cv.sort_unstable_by_key(|&c| mb[c]);
                stack.extend(cu.into_iter().zip(cv));
            }
            _ => return false,
        }
    }
    true
}

/// Longest common subsequence length of two symbol sequences.
pub fn lcs_dp(a: &[usize], b: &[usize]) -> usize {
    let mut dp = vec![0usize; b.len() + 1];
    for &x in a {
        let mut diag = 0usize;
        for (j, &y) in b.iter().enumerate() {
            let up = dp[j + 1];
            dp[j + 1] = if x == y { diag + 1 } else { up.max(dp[j]) };
            diag = up;
        }
    }
    dp[b.len()]
}

/// Encodes a sequence of distinct symbols as a caterpillar tree: the left
/// spine carries the sequence top to bottom, and two shared sentinel leaves
/// sit at the bottom so that an agreement subtree always keeps the whole
/// spine order. For sequences s, t of distinct symbols,
/// mast(cat(s), cat(t)) = lcs(s, t) + 2.
///
/// Labels: symbol k maps to label k; sentinels use labels `nsymbols` and
/// `nsymbols + 1`.
pub fn lcs_caterpillar(seq: &[usize], nsymbols: usize) -> EvoTree {
    let nlabels = nsymbols + 2;
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut labels: Vec<Option<Label>> = Vec::new();
    // bottom cherry of the two sentinels
    let add = |children: &mut Vec<Vec<usize>>, labels: &mut Vec<Option<Label>>, l| {
        children.push(Vec::new());
        labels.push(l);
        children.len() - 1
    };
    let s1 = add(&mut children, &mut labels, Some(nsymbols));
    let s2 = add(&mut children, &mut labels, Some(nsymbols + 1));
    let cherry = {
        children.push(vec![s1, s2]);
        labels.push(None);
        children.len() - 1
    };
    let mut below = cherry;
    for &sym in seq.iter().rev() {
        assert!(sym < nsymbols);
        let leaf = add(&mut children, &mut labels, Some(sym));
        children.push(vec![leaf, below]);
        labels.push(None);
        below = children.len() - 1;
    }
    EvoTree::new(below, children, labels, nlabels).unwrap()
}

/// Deterministic random evolutionary tree with `n` leaves labeled `0..n` and
/// every internal vertex of degree between 2 and `max_degree`.
pub fn random_tree(n: usize, max_degree: usize, seed: u64) -> EvoTree {
    assert!(n >= 1);
    assert!(max_degree >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Label> = (0..n).collect();
    // random permutation so sibling groups are not label-contiguous
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        labels.swap(i, j);
    }
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut leaf_label: Vec<Option<Label>> = Vec::new();
    // build recursively over label slices with an explicit stack:
    // (slice start, slice end, parent vertex or none)
    let mut root = 0usize;
    let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(0, n, None)];
    while let Some((lo, hi, parent)) = stack.pop() {
        let v = children.len();
        children.push(Vec::new());
        leaf_label.push(None);
        match parent {
            Some(p) => children[p].push(v),
            None => root = v,
        }
        let size = hi - lo;
        if size == 1 {
            leaf_label[v] = Some(labels[lo]);
            continue;
        }
        let k = rng.gen_range(2..=max_degree.min(size));
        // random split of the slice into k nonempty parts
        let mut cuts: Vec<usize> = Vec::with_capacity(k + 1);
        cuts.push(lo);
        cuts.push(hi);
        let mut used = std::collections::HashSet::new();
        while used.len() < k - 1 {
            let c = rng.gen_range(lo + 1..hi);
            if used.insert(c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        // push in reverse so children end up in slice order
        for w in cuts.windows(2).rev() {
            stack.push((w[0], w[1], Some(v)));
        }
    }
    EvoTree::new(root, children, leaf_label, n).unwrap()
}

/// Caterpillar tree over labels `0..n`: label 0 deepest.
pub fn caterpillar(n: usize) -> EvoTree {
    assert!(n >= 1);
    if n == 1 {
        return EvoTree::new(0, vec![vec![]], vec![Some(0)], 1).unwrap();
    }
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut labels: Vec<Option<Label>> = Vec::new();
    children.push(Vec::new());
    labels.push(Some(0));
    let mut below = 0;
    for l in 1..n {
        children.push(Vec::new());
        labels.push(Some(l));
        let leaf = children.len() - 1;
        children.push(vec![below, leaf]);
        labels.push(None);
        below = children.len() - 1;
    }
    EvoTree::new(below, children, labels, n).unwrap()
}

/// Star tree over labels `0..n` (n >= 2).
pub fn star(n: usize) -> EvoTree {
    assert!(n >= 2);
    let mut children = vec![(1..=n).collect::<Vec<_>>()];
    let mut labels = vec![None];
    for l in 0..n {
        children.push(Vec::new());
        labels.push(Some(l));
    }
    EvoTree::new(0, children, labels, n).unwrap()
}

/// Random sequence of `len` distinct symbols drawn from `0..alphabet`.
pub fn random_distinct_seq(len: usize, alphabet: usize, seed: u64) -> Vec<usize> {
    assert!(len <= alphabet);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..alphabet).collect();
    for i in 0..len {
        let j = rng.gen_range(i..alphabet);
        pool.swap(i, j);
    }
    pool.truncate(len);
    pool
}
