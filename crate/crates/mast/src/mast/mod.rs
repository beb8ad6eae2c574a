//! Agreement-subtree sizes via repeated path contraction.
//!
//! The solver rakes the second tree into root paths, round by round, and
//! reduces each rectangle of one path against the other tree down to the
//! two-path core in `one_one`. Value maps flow upward: after the last round,
//! the map at the root of the second tree holds rr(T1, T2), the number of
//! leaves in a maximum agreement subtree.
//!
//! All value maps are keyed by vertex ids of the outermost trees, so no
//! translation is needed when instances are restricted recursively: a
//! restriction of a restriction still names its vertices by the original
//! ids, and the stored values are unchanged by further restriction.

mod one_one;

use rustc_hash::FxHashMap as HashMap;
use std::rc::Rc;

use serde::Serialize;

use crate::matching::{mm_assignment, BipartiteGraph};
use crate::oracle::rr_table;
use crate::rake::{rake_decomposition, Tube};
use crate::tree::{restrict, restrict_many, EvoTree, Label, LabelIndex, Lca, Restricted};

use one_one::{one_one, Side};

/// Values keyed by outer-tree vertex ids.
pub(crate) type ValMap = HashMap<usize, u64>;

/// Solver options.
#[derive(Debug, Clone, Default)]
pub struct Config {
    /// Check structural invariants while solving (predecessor distances,
    /// empty rectangles, regular partitions, condensed-form consistency)
    /// and count them in the returned counters. Slower; meant for tests.
    pub validate: bool,
}

/// Work and validation counters accumulated over a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Counters {
    /// rake rounds of the top-level decomposition of the second tree
    pub rake_rounds: u64,
    /// invocations of the two-path core
    pub one_one_calls: u64,
    /// evaluated table pairs, summed over all core calls
    pub pairs_geb: u64,
    /// shared-label cells, summed over all core calls
    pub intersecting: u64,
    /// leaves of the bisection trees
    pub psi_leaves: u64,
    /// weighted matchings solved
    pub matching_calls: u64,
    pub validation_checks: u64,
    pub validation_failures: u64,
}

/// A tree plus the mapping of its vertex ids back to the outermost tree.
pub(crate) struct Inst {
    pub tree: EvoTree,
    pub orig: Vec<usize>,
}

impl Inst {
    fn identity(t: &EvoTree) -> Inst {
        Inst { tree: t.clone(), orig: (0..t.len()).collect() }
    }

    fn compose(&self, r: Restricted) -> Inst {
        let orig = r.orig.iter().map(|&z| self.orig[z]).collect();
        Inst { tree: r.tree, orig }
    }
}

/// Number of leaves in a maximum agreement subtree of two trees over the
/// same label universe. Labels present in only one tree are ignored.
pub fn mast_size(t1: &EvoTree, t2: &EvoTree, cfg: &Config) -> (u64, Counters) {
    let common: Vec<Label> =
        t1.labels().into_iter().filter(|&l| t2.leaf_of_label(l).is_some()).collect();
    if common.is_empty() {
        return (0, Counters::default());
    }
    let r1 = restrict(t1, &Lca::new(t1), &common);
    let r2 = restrict(t2, &Lca::new(t2), &common);
    zero_zero(&r1.tree, &r2.tree, cfg)
}

/// Core entry point: both trees must have exactly the same label set.
pub fn zero_zero(t1: &EvoTree, t2: &EvoTree, cfg: &Config) -> (u64, Counters) {
    let mut counters = Counters::default();
    if t1.is_empty() || t2.is_empty() {
        return (0, counters);
    }
    debug_assert_eq!(sorted(t1.labels()), sorted(t2.labels()));
    let i1 = Inst::identity(t1);
    let i2 = Inst::identity(t2);
    let dec = rake_decomposition(t2);
    counters.rake_rounds = dec.n_rounds() as u64;
    let mut ra_store: HashMap<usize, Rc<ValMap>> = HashMap::with_capacity_and_hasher(t2.len(), Default::default());
    for tube in &dec.rounds[0] {
        let v = tube.head();
        debug_assert!(tube.len() == 1 && t2.is_leaf(v));
        let l = t2.label(v).expect("leaf");
        let x = t1.leaf_of_label(l).expect("equal label sets");
        ra_store.insert(v, Rc::new(HashMap::from_iter([(x, 1)])));
    }
    for round in &dec.rounds[1..] {
        for (h, m) in zero_many(&i1, &i2, round, &mut ra_store, cfg, &mut counters) {
            ra_store.insert(h, m);
        }
    }
    let root_map = &ra_store[&t2.root().expect("nonempty")];
    (root_map[&t1.root().expect("nonempty")], counters)
}

fn sorted(mut v: Vec<Label>) -> Vec<Label> {
    v.sort_unstable();
    v
}

/// One rake round of t2: solves every tube of the round against t1
/// restricted to the tube subtree's labels, and returns the value map of
/// each tube head (rr of t1's restriction against every vertex of the tube
/// subtree, keyed by outer t1 ids).
fn zero_many(
    t1: &Inst,
    t2: &Inst,
    tubes: &[Tube],
    ra_store: &mut HashMap<usize, Rc<ValMap>>,
    cfg: &Config,
    counters: &mut Counters,
) -> Vec<(usize, Rc<ValMap>)> {
    let lca1 = Lca::new(&t1.tree);
    let parts: Vec<Vec<Label>> =
        tubes.iter().map(|tb| t2.tree.subtree_labels(tb.head())).collect();
    let r1s = restrict_many(&t1.tree, &lca1, &parts).expect("tube subtrees are disjoint");
    let mut out = Vec::with_capacity(tubes.len());
    for (tube, r1) in tubes.iter().zip(r1s) {
        let h = tube.head();
        let r2 = t2.tree.subtree(h);
        let path2: Vec<usize> =
            tube.vertices.iter().map(|&v| r2.inv[&v]).collect();
        // a subtree's map is consulted exactly once, by its parent's tube
        let maps2 = path_kid_maps(&r2, &path2, |orig| ra_store.remove(&orig).expect("kid map"));
        let t2i = t2.compose(r2);
        let t1i = t1.compose(r1);
        let ra = zero_one(&t1i, &t2i, &path2, &maps2, cfg, counters);
        out.push((h, Rc::new(ra)));
    }
    out
}

/// Collects, for every off-path child of a path vertex, the stored value map
/// of the subtree hanging there. `fetch` resolves by pre-restriction id.
fn path_kid_maps(
    r: &Restricted,
    path: &[usize],
    mut fetch: impl FnMut(usize) -> Rc<ValMap>,
) -> HashMap<usize, Rc<ValMap>> {
    let mut on_path = vec![false; r.tree.len()];
    for &v in path {
        on_path[v] = true;
    }
    let mut maps = HashMap::default();
    for &v in path {
        for &c in r.tree.children(v) {
            if !on_path[c] {
                maps.insert(c, fetch(r.orig[c]));
            }
        }
    }
    maps
}

/// Solves one tube of t2 against all of t1: rakes t1 and runs the rounds
/// bottom-up, keeping per-head value maps, until the map at t1's root is
/// known for every vertex of interest. Returns rr(t2, t1^x) keyed by outer
/// t1 ids, over all vertices of t1.
fn zero_one(
    t1: &Inst,
    t2: &Inst,
    path2: &[usize],
    maps2: &HashMap<usize, Rc<ValMap>>,
    cfg: &Config,
    counters: &mut Counters,
) -> ValMap {
    let dec = rake_decomposition(&t1.tree);
    let mut ra_out: ValMap = HashMap::with_capacity_and_hasher(t1.tree.len(), Default::default());
    let mut store_p: HashMap<usize, Rc<ValMap>> = HashMap::with_capacity_and_hasher(t1.tree.len(), Default::default());
    for tube in &dec.rounds[0] {
        let u = tube.head();
        debug_assert!(tube.len() == 1 && t1.tree.is_leaf(u));
        let l = t1.tree.label(u).expect("leaf");
        let y = t2.tree.leaf_of_label(l).expect("equal label sets");
        ra_out.insert(t1.orig[u], 1);
        store_p.insert(u, Rc::new(HashMap::from_iter([(t2.orig[y], 1)])));
    }
    for round in &dec.rounds[1..] {
        let (heads, rp21) =
            many_one(t1, t2, round, path2, maps2, &mut store_p, cfg, counters);
        for (h, m) in heads {
            store_p.insert(h, m);
        }
        for (k, v) in rp21 {
            ra_out.insert(k, v);
        }
    }
    ra_out
}

/// One rake round of t1 inside a tube computation on t2. For each tube,
/// restricts t2 to the tube subtree's labels; if no t2-path vertex survives
/// the answer is read directly from the stored map of the enclosing t2
/// subtree, otherwise the two-path core runs. Returns the per-head maps
/// (keyed by outer t2 ids) and the values of rr(t2, t1^x) for all x in this
/// round's tubes and their off-tube children (keyed by outer t1 ids).
#[allow(clippy::too_many_arguments)]
fn many_one(
    t1: &Inst,
    t2: &Inst,
    tubes: &[Tube],
    path2: &[usize],
    maps2: &HashMap<usize, Rc<ValMap>>,
    store_p: &mut HashMap<usize, Rc<ValMap>>,
    cfg: &Config,
    counters: &mut Counters,
) -> (Vec<(usize, Rc<ValMap>)>, ValMap) {
    let lca2 = Lca::new(&t2.tree);
    let mut on_path2 = vec![false; t2.tree.len()];
    for &v in path2 {
        on_path2[v] = true;
    }
    // highest off-path ancestor of every off-path vertex
    let mut top2 = vec![None; t2.tree.len()];
    for v in t2.tree.preorder() {
        if on_path2[v] {
            continue;
        }
        let p = t2.tree.parent(v).expect("path starts at the root");
        top2[v] = if on_path2[p] { Some(v) } else { top2[p] };
    }
    let parts: Vec<Vec<Label>> =
        tubes.iter().map(|tb| t1.tree.subtree_labels(tb.head())).collect();
    let r2s = restrict_many(&t2.tree, &lca2, &parts).expect("tube subtrees are disjoint");
    let mut heads = Vec::with_capacity(tubes.len());
    let mut rp21: ValMap = HashMap::default();
    for (tube, r2) in tubes.iter().zip(r2s) {
        let h = tube.head();
        let r1 = t1.tree.subtree(h);
        let path1k: Vec<usize> =
            tube.vertices.iter().map(|&v| r1.inv[&v]).collect();
        let q_k: Vec<usize> = path2.iter().filter_map(|&v| r2.inv.get(&v).copied()).collect();
        if q_k.is_empty() {
            // the whole tube subtree shares labels with a single subtree off
            // the t2 path; its stored map already answers everything here
            let root2 = r2.tree.root().expect("tubes share labels with t2");
            let v = top2[r2.orig[root2]].expect("no path vertex survives");
            let map = &maps2[&v];
            let val = |x: usize| -> u64 {
                *map.get(&t1.orig[x]).unwrap_or_else(|| panic!("map missing t1 vertex"))
            };
            heads.push((h, Rc::new(HashMap::from_iter([(t2.orig[r2.orig[root2]], val(h))]))));
            let on_tube: rustc_hash::FxHashSet<usize> =
                tube.vertices.iter().copied().collect();
            for &x in &tube.vertices {
                rp21.insert(t1.orig[x], val(x));
                for &c in t1.tree.children(x) {
                    if !on_tube.contains(&c) {
                        rp21.insert(t1.orig[c], val(c));
                        store_p.remove(&c); // superseded by the direct copy
                    }
                }
            }
        } else {
            let maps1k = path_kid_maps(&r1, &path1k, |orig| {
                store_p.remove(&orig).expect("kid map")
            });
            let maps2k = path_kid_maps(&r2, &q_k, |orig| {
                maps2[&top2[orig].expect("kid off the t2 path")].clone()
            });
            let t1k = t1.compose(r1);
            let t2k = t2.compose(r2);
            let (rp12, rp21k) = one_one(
                Side { inst: &t1k, path: &path1k, kid_maps: &maps1k },
                Side { inst: &t2k, path: &q_k, kid_maps: &maps2k },
                cfg,
                counters,
            );
            heads.push((h, Rc::new(rp12)));
            rp21.extend(rp21k);
        }
    }
    (heads, rp21)
}

/// Leaf labels of one maximum agreement subtree, extracted from the full
/// quadratic table. Quadratic time and space; intended for witnesses and
/// verification, not for large inputs.
pub fn mast_leafset(t1: &EvoTree, t2: &EvoTree) -> Vec<Label> {
    let (Some(r1), Some(r2)) = (t1.root(), t2.root()) else {
        return Vec::new();
    };
    let dp = rr_table(t1, t2);
    let mut out = Vec::new();
    extract_witness(t1, t2, &dp, r1, r2, &mut out);
    out.sort_unstable();
    out
}

fn extract_witness(
    t1: &EvoTree,
    t2: &EvoTree,
    dp: &[Vec<u64>],
    u: usize,
    v: usize,
    out: &mut Vec<Label>,
) {
    let target = dp[u][v];
    if target == 0 {
        return;
    }
    match (t1.is_leaf(u), t2.is_leaf(v)) {
        (true, true) => out.push(t1.label(u).expect("leaf")),
        (true, false) => {
            let c = *t2.children(v).iter().max_by_key(|&&c| dp[u][c]).expect("internal");
            extract_witness(t1, t2, dp, u, c, out);
        }
        (false, true) => {
            let c = *t1.children(u).iter().max_by_key(|&&c| dp[c][v]).expect("internal");
            extract_witness(t1, t2, dp, c, v, out);
        }
        (false, false) => {
            let cu = t1.children(u);
            let cv = t2.children(v);
            let mut g = BipartiteGraph::new(cu.len(), cv.len());
            for (a, &x) in cu.iter().enumerate() {
                for (b, &y) in cv.iter().enumerate() {
                    if dp[x][y] > 0 {
                        g.add_edge(a, b, dp[x][y]);
                    }
                }
            }
            let (val, picked) = mm_assignment(&g);
            if val == target {
                for (a, b, _) in picked {
                    extract_witness(t1, t2, dp, cu[a], cv[b], out);
                }
            } else if let Some(&c) = cu.iter().find(|&&c| dp[c][v] == target) {
                extract_witness(t1, t2, dp, c, v, out);
            } else {
                let c = *cv.iter().find(|&&c| dp[u][c] == target).expect("some case attains dp");
                extract_witness(t1, t2, dp, u, c, out);
            }
        }
    }
}

/// Rebuilds two independently parsed trees over the union of their label
/// names, so their labels become comparable.
pub fn unify_labels(
    t1: &EvoTree,
    idx1: &LabelIndex,
    t2: &EvoTree,
    idx2: &LabelIndex,
) -> (EvoTree, EvoTree, LabelIndex) {
    let mut names: Vec<String> = idx1.names().to_vec();
    names.extend_from_slice(idx2.names());
    names.sort_unstable();
    names.dedup();
    let union = LabelIndex::from_names(names);
    let relabel = |t: &EvoTree, idx: &LabelIndex| -> EvoTree {
        if t.is_empty() {
            return EvoTree::empty(union.len());
        }
        let children: Vec<Vec<usize>> = (0..t.len()).map(|v| t.children(v).to_vec()).collect();
        let labels: Vec<Option<Label>> = (0..t.len())
            .map(|v| t.label(v).map(|l| union.id(idx.name(l)).expect("name in union")))
            .collect();
        EvoTree::new(t.root().expect("nonempty"), children, labels, union.len())
            .expect("relabeling preserves shape")
    };
    (relabel(t1, idx1), relabel(t2, idx2), union)
}
