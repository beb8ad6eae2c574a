//! Core routine for two trees that each come with a root path.
//!
//! Given trees with equal label sets, root paths P (length p) and Q (length
//! q) without leaves, and the root-to-path value maps of every subtree
//! hanging off the paths, this computes the value maps of the whole trees.
//! Instead of filling the p*q table of subtree agreement sizes, it pads both
//! paths to power-of-two-plus-one lengths, locates the table cells where
//! values can change (the pair set G, E, B below), and evaluates only those,
//! reading everything else from condensed forms of the per-column and
//! per-row maxima.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::rc::Rc;

use crate::condensed::{is_regular, joint, CondensedForm, JointTree, Query};
use crate::matching::{mm, BipartiteGraph};
use crate::tree::{restrict_many, EvoTree, Lca};

use super::{Config, Counters, Inst, ValMap};

/// One side of the instance: a tree with a root path and, for every subtree
/// hanging off the path, its value map keyed by vertex ids of the outer
/// tree on the opposite side.
pub(crate) struct Side<'a> {
    pub inst: &'a Inst,
    /// root path, head first, inst vertex ids; contains no leaves
    pub path: &'a [usize],
    pub kid_maps: &'a HashMap<usize, Rc<ValMap>>,
}

/// Path-relative coordinates of every vertex.
struct PathInfo {
    /// 1-based path index, for path vertices only
    pos: Vec<Option<usize>>,
    /// index of the deepest path ancestor (a path vertex maps to itself)
    attach: Vec<usize>,
    /// highest off-path ancestor (the path child whose subtree contains v)
    top: Vec<Option<usize>>,
    /// all off-path children of path vertices, with their attachment index
    kids: Vec<(usize, usize)>,
}

fn path_info(t: &EvoTree, path: &[usize]) -> PathInfo {
    let n = t.len();
    let mut pos = vec![None; n];
    for (k, &v) in path.iter().enumerate() {
        pos[v] = Some(k + 1);
    }
    debug_assert_eq!(path.first().copied(), t.root(), "path must start at the root");
    let mut attach = vec![0usize; n];
    let mut top = vec![None; n];
    let mut kids = Vec::new();
    for v in t.preorder() {
        if let Some(i) = pos[v] {
            attach[v] = i;
        } else {
            let p = t.parent(v).expect("off-path root");
            attach[v] = attach[p];
            if pos[p].is_some() {
                top[v] = Some(v);
                kids.push((v, attach[p]));
            } else {
                top[v] = top[p];
            }
        }
    }
    PathInfo { pos, attach, top, kids }
}

/// Condensed value sequences of one side's subtrees along the other side's
/// path.
struct Family {
    /// kid vertex -> condensed form of j -> rr(subtree at kid, other^{path_j})
    per_kid: HashMap<usize, CondensedForm>,
    /// attachment index i (1-based) -> joint of per_kid over kids at i
    per_index: Vec<CondensedForm>,
    /// kid vertex -> value of its map at the root of the opposite restriction
    roots: HashMap<usize, u64>,
}

/// Builds the condensed sequences for the subtrees hanging off `src`'s path,
/// by restricting `host` to each subtree's labels and reading the surviving
/// host-path vertices and their off-path children out of the kid's value
/// map. Also emits, once per nonzero subtree-vs-subtree value, an edge
/// (src kid, host kid, value) grouped by attachment cell.
#[allow(clippy::too_many_arguments)]
fn build_family(
    host: &Inst,
    host_lca: &Lca,
    host_info: &PathInfo,
    src: &Inst,
    src_kids: &[(usize, usize)],
    kid_maps: &HashMap<usize, Rc<ValMap>>,
    seq_len: usize,
    n_index: usize,
    mut z_edges: Option<&mut HashMap<(u32, u32), Vec<(usize, usize, u64)>>>,
    cfg: &Config,
    counters: &mut Counters,
) -> Family {
    let parts: Vec<Vec<usize>> =
        src_kids.iter().map(|&(u, _)| src.tree.subtree_labels(u)).collect();
    let rs = restrict_many(&host.tree, host_lca, &parts).expect("kid label sets are disjoint");
    let mut per_kid = HashMap::with_capacity_and_hasher(src_kids.len(), Default::default());
    let mut roots = HashMap::with_capacity_and_hasher(src_kids.len(), Default::default());
    for (&(u, iu), r) in src_kids.iter().zip(&rs) {
        let map = kid_maps.get(&u).expect("missing kid map");
        let root = r.tree.root().expect("kid shares no labels with the other tree");
        let value = |z: usize| -> u64 {
            let outer = host.orig[r.orig[z]];
            *map.get(&outer).unwrap_or_else(|| panic!("kid map missing vertex {outer}"))
        };
        roots.insert(u, value(root));
        let mut pairs: Vec<(usize, u64)> = Vec::new();
        let mut deepest: Option<(usize, usize)> = None; // (path index, r vertex)
        for z in 0..r.tree.len() {
            if let Some(j) = host_info.pos[r.orig[z]] {
                pairs.push((j, value(z)));
                if deepest.map_or(true, |(dj, _)| j > dj) {
                    deepest = Some((j, z));
                }
            }
        }
        match deepest {
            None => {
                // the whole overlap sits inside one subtree off the host path
                let s = host_info.attach[r.orig[root]];
                pairs.push((s, value(root)));
                if let Some(edges) = z_edges.as_deref_mut() {
                    let v = host_info.top[r.orig[root]].expect("root off path");
                    edges
                        .entry((iu as u32, s as u32))
                        .or_default()
                        .push((u, v, value(root)));
                }
            }
            Some((jk, zk)) => {
                // children of surviving path vertices are the off-path kids;
                // at most one child of the deepest one reaches below index jk
                let mut far: Option<(usize, usize)> = None;
                for z in 0..r.tree.len() {
                    let Some(jz) = host_info.pos[r.orig[z]] else { continue };
                    for &c in r.tree.children(z) {
                        let hc = r.orig[c];
                        if host_info.pos[hc].is_some() {
                            continue;
                        }
                        let s = host_info.attach[hc];
                        if cfg.validate {
                            counters.validation_checks += 1;
                            let ok = if z == zk { s >= jz } else { s == jz };
                            if !ok {
                                counters.validation_failures += 1;
                            }
                        }
                        if z == zk && s > jk {
                            if cfg.validate {
                                counters.validation_checks += 1;
                                if far.is_some() {
                                    counters.validation_failures += 1;
                                }
                            }
                            if far.is_none() {
                                far = Some((s, c));
                            }
                        }
                        if let Some(edges) = z_edges.as_deref_mut() {
                            let v = host_info.top[hc].expect("kid off path");
                            edges
                                .entry((iu as u32, s as u32))
                                .or_default()
                                .push((u, v, value(c)));
                        }
                    }
                }
                if let Some((s, c)) = far {
                    pairs.push((s, value(c)));
                }
            }
        }
        let form = if cfg.validate {
            counters.validation_checks += 1;
            CondensedForm::from_pairs(seq_len, &pairs).unwrap_or_else(|_| {
                counters.validation_failures += 1;
                CondensedForm::from_raw_pairs(seq_len, &pairs)
            })
        } else {
            CondensedForm::from_raw_pairs(seq_len, &pairs)
        };
        per_kid.insert(u, form);
    }
    let mut by_index: Vec<Vec<&CondensedForm>> = vec![Vec::new(); n_index + 1];
    for &(u, iu) in src_kids {
        by_index[iu].push(&per_kid[&u]);
    }
    let per_index = by_index[1..]
        .iter()
        .map(|fs| if fs.is_empty() { CondensedForm::zero(seq_len) } else { joint(fs) })
        .collect();
    Family { per_kid, per_index, roots }
}

/// Recursive construction of the bisection tree over regular path-interval
/// pairs. Leaves are single cells holding a shared label, or rectangles
/// holding none. Corners of the leaves are pushed into `e`. With validation
/// on, single-column subtrees return their descendant-leaf ceilings so the
/// regular-partition property can be checked at every single-column node.
#[allow(clippy::too_many_arguments)]
fn build_psi(
    i1: usize,
    i2: usize,
    j1: usize,
    j2: usize,
    pts: Vec<(u32, u32)>,
    e: &mut Vec<(u32, u32)>,
    counters: &mut Counters,
    validate: bool,
) -> Option<Vec<usize>> {
    if pts.is_empty() || (i1 == i2 && j1 == j2) {
        counters.psi_leaves += 1;
        e.push((i1 as u32, j1 as u32));
        e.push(((i2 + 1) as u32, j1 as u32));
        e.push((i1 as u32, (j2 + 1) as u32));
        e.push(((i2 + 1) as u32, (j2 + 1) as u32));
        if validate && j1 == j2 {
            let c = vec![i1];
            counters.validation_checks += 1;
            if !regularly_partitions(&c, i1, i2) {
                counters.validation_failures += 1;
            }
            return Some(c);
        }
        return None;
    }
    if j1 == j2 {
        let mid = (i1 + i2 - 1) / 2;
        let (lo, hi): (Vec<_>, Vec<_>) = pts.into_iter().partition(|&(i, _)| (i as usize) <= mid);
        let ca = build_psi(i1, mid, j1, j2, lo, e, counters, validate);
        let cb = build_psi(mid + 1, i2, j1, j2, hi, e, counters, validate);
        if validate {
            let mut c = ca.unwrap_or_default();
            c.extend(cb.unwrap_or_default());
            counters.validation_checks += 1;
            if !regularly_partitions(&c, i1, i2) {
                counters.validation_failures += 1;
            }
            return Some(c);
        }
        return None;
    }
    assert!(i1 < i2, "column split on a single-row rectangle");
    let mi = (i1 + i2 - 1) / 2;
    let mj = (j1 + j2 - 1) / 2;
    let mut quads: [Vec<(u32, u32)>; 4] = Default::default();
    for pt in pts {
        let a = ((pt.0 as usize) > mi) as usize;
        let b = ((pt.1 as usize) > mj) as usize;
        quads[2 * a + b].push(pt);
    }
    let [q00, q01, q10, q11] = quads;
    build_psi(i1, mi, j1, mj, q00, e, counters, validate);
    build_psi(i1, mi, mj + 1, j2, q01, e, counters, validate);
    build_psi(mi + 1, i2, j1, mj, q10, e, counters, validate);
    build_psi(mi + 1, i2, mj + 1, j2, q11, e, counters, validate);
    None
}

/// True iff the ascending indices `h` split [i1,i2] into regular intervals
/// with the first one starting at i1.
fn regularly_partitions(h: &[usize], i1: usize, i2: usize) -> bool {
    if h.first() != Some(&i1) {
        return false;
    }
    for w in h.windows(2) {
        if !is_regular(w[0], w[1] - 1) {
            return false;
        }
    }
    is_regular(*h.last().unwrap(), i2)
}

/// Smallest a >= 1 with 2^a >= x.
fn pad_exponent(x: usize) -> usize {
    let mut a = 1usize;
    while (1usize << a) < x {
        a += 1;
    }
    a
}

pub(crate) fn one_one(
    s1: Side,
    s2: Side,
    cfg: &Config,
    counters: &mut Counters,
) -> (ValMap, ValMap) {
    if s1.path.len() >= s2.path.len() {
        one_one_core(s1, s2, cfg, counters)
    } else {
        let (a, b) = one_one_core(s2, s1, cfg, counters);
        (b, a)
    }
}

fn one_one_core(
    s1: Side,
    s2: Side,
    cfg: &Config,
    counters: &mut Counters,
) -> (ValMap, ValMap) {
    counters.one_one_calls += 1;
    let t1 = &s1.inst.tree;
    let t2 = &s2.inst.tree;
    let p = s1.path.len();
    let q = s2.path.len();
    debug_assert!(p >= q && q >= 1);
    let pp = (1usize << pad_exponent(p)) + 1;
    let qq = (1usize << pad_exponent(q)) + 1;

    let info1 = path_info(t1, s1.path);
    let info2 = path_info(t2, s2.path);
    let lca1 = Lca::new(t1);
    let lca2 = Lca::new(t2);

    // shared labels, located by the attachment cell of their two leaves
    let mut ipts: Vec<(u32, u32)> = t1
        .labels()
        .into_iter()
        .map(|l| {
            let u = t1.leaf_of_label(l).expect("label in t1");
            let v = t2.leaf_of_label(l).expect("equal label sets");
            (info1.attach[u] as u32, info2.attach[v] as u32)
        })
        .collect();
    ipts.sort_unstable();
    ipts.dedup();
    let iset: HashSet<(u32, u32)> = ipts.iter().copied().collect();
    counters.intersecting += ipts.len() as u64;

    // value sequences of off-path subtrees along the opposite path, plus the
    // nonzero subtree-vs-subtree values grouped by cell
    let mut z_edges: HashMap<(u32, u32), Vec<(usize, usize, u64)>> = HashMap::default();
    let fam_a = build_family(
        s2.inst, &lca2, &info2, s1.inst, &info1.kids, s1.kid_maps, qq, pp,
        Some(&mut z_edges), cfg, counters,
    );
    let fam_b = build_family(
        s1.inst, &lca1, &info1, s2.inst, &info2.kids, s2.kid_maps, pp, qq, None, cfg, counters,
    );
    let atree = JointTree::new(&fam_a.per_index);
    let btree = JointTree::new(&fam_b.per_index);
    let mut kids1_at: Vec<Vec<usize>> = vec![Vec::new(); pp + 1];
    for &(u, i) in &info1.kids {
        kids1_at[i].push(u);
    }
    let mut kids2_at: Vec<Vec<usize>> = vec![Vec::new(); qq + 1];
    for &(v, j) in &info2.kids {
        kids2_at[j].push(v);
    }

    // the pair set: leaf corners of the bisection tree, both border lines of
    // the padding, and the full first row and column
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    build_psi(1, pp - 1, 1, qq - 1, ipts.clone(), &mut pairs, counters, cfg.validate);
    for i in 1..=pp {
        pairs.push((i as u32, 1));
        pairs.push((i as u32, qq as u32));
    }
    for j in 1..=qq {
        pairs.push((1, j as u32));
        pairs.push((pp as u32, j as u32));
    }
    pairs.sort_unstable();
    pairs.dedup();
    counters.pairs_geb += pairs.len() as u64;

    let in_pairs: HashSet<(u32, u32)> = pairs.iter().copied().collect();
    let mut rows: HashMap<u32, Vec<u32>> = HashMap::default();
    let mut cols: HashMap<u32, Vec<u32>> = HashMap::default();
    for &(i, j) in &pairs {
        rows.entry(j).or_default().push(i);
        cols.entry(i).or_default().push(j);
    }
    // `pairs` is sorted, so every row and column list is already ascending
    let next_after = |list: &[u32], x: u32| -> u32 {
        let k = list.partition_point(|&y| y <= x);
        list[k]
    };

    let mut order = pairs.clone();
    order.sort_unstable_by_key(|&(i, j)| std::cmp::Reverse((i + j, i)));
    let mut rr: HashMap<(u32, u32), u64> = HashMap::with_capacity_and_hasher(order.len(), Default::default());
    for &(i, j) in &order {
        let iu = i as usize;
        let ju = j as usize;
        let val = if iu == pp || ju == qq {
            // padded subtrees on the two sides share no labels
            0
        } else if iset.contains(&(i, j)) {
            if cfg.validate {
                for pred in [(i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    counters.validation_checks += 1;
                    if !in_pairs.contains(&pred) {
                        counters.validation_failures += 1;
                    }
                }
            }
            let (mm_ij, mmb_ij) = cell_matchings(
                i, j, &z_edges, &kids1_at[iu], &kids2_at[ju], &fam_a, &fam_b, counters,
            );
            let rr_pq = rr[&(i + 1, j + 1)];
            let rr_p = rr[&(i + 1, j)];
            let rr_q = rr[&(i, j + 1)];
            let a_ij = fam_a.per_index[iu - 1].value_at(ju);
            let b_ji = fam_b.per_index[ju - 1].value_at(iu);
            (mm_ij + rr_pq).max(mmb_ij).max(rr_q).max(b_ji).max(rr_p).max(a_ij)
        } else if ju == 1 {
            let js = next_after(&cols[&i], 1) as usize;
            if cfg.validate {
                counters.validation_checks += 1;
                if ipts.iter().any(|&(a, b)| a as usize == iu && (b as usize) < js) {
                    counters.validation_failures += 1;
                }
            }
            let grow = fam_a.per_index[iu - 1].value_at(js)
                + btree.query(Query { lo: 1, hi: js - 1, j: iu + 1 });
            rr[&(i, js as u32)].max(rr[&(i + 1, 1)]).max(grow)
        } else if iu == 1 {
            let is = next_after(&rows[&j], 1) as usize;
            if cfg.validate {
                counters.validation_checks += 1;
                if ipts.iter().any(|&(a, b)| b as usize == ju && (a as usize) < is) {
                    counters.validation_failures += 1;
                }
            }
            let grow = fam_b.per_index[ju - 1].value_at(is)
                + atree.query(Query { lo: 1, hi: is - 1, j: ju + 1 });
            rr[&(is as u32, j)].max(rr[&(1, j + 1)]).max(grow)
        } else {
            // a corner of an empty rectangle: jump straight to the next
            // evaluated pair in its row and column
            let is = next_after(&rows[&j], i) as usize;
            let js = next_after(&cols[&i], j) as usize;
            if cfg.validate {
                counters.validation_checks += 1;
                if ipts
                    .iter()
                    .any(|&(a, b)| iu <= a as usize && (a as usize) < is && ju <= b as usize && (b as usize) < js)
                {
                    counters.validation_failures += 1;
                }
            }
            let grow = btree.query(Query { lo: ju, hi: js - 1, j: is })
                + atree.query(Query { lo: iu, hi: is - 1, j: js });
            rr[&(is as u32, j)].max(rr[&(i, js as u32)]).max(grow)
        };
        rr.insert((i, j), val);
    }

    // read off the outputs: the whole first column and row give the values
    // along the two paths, and each off-path subtree keeps the value its own
    // map assigns to the root of the opposite restriction
    let mut rp12: ValMap = HashMap::default();
    for (k, &y) in s2.path.iter().enumerate() {
        rp12.insert(s2.inst.orig[y], rr[&(1, (k + 1) as u32)]);
    }
    for &(v, _) in &info2.kids {
        rp12.insert(s2.inst.orig[v], fam_b.roots[&v]);
    }
    let mut rp21: ValMap = HashMap::default();
    for (k, &x) in s1.path.iter().enumerate() {
        rp21.insert(s1.inst.orig[x], rr[&((k + 1) as u32, 1)]);
    }
    for &(u, _) in &info1.kids {
        rp21.insert(s1.inst.orig[u], fam_a.roots[&u]);
    }
    (rp12, rp21)
}

/// Maximum matching of the cell (X_i, Y_j), and of the cell extended by the
/// next path vertex on each side (without the edge joining the two path
/// vertices). Weights come from the nonzero cell edges and from the kid
/// sequences evaluated one step down each path.
#[allow(clippy::too_many_arguments)]
fn cell_matchings(
    i: u32,
    j: u32,
    z_edges: &HashMap<(u32, u32), Vec<(usize, usize, u64)>>,
    kids1: &[usize],
    kids2: &[usize],
    fam_a: &Family,
    fam_b: &Family,
    counters: &mut Counters,
) -> (u64, u64) {
    static EMPTY: Vec<(usize, usize, u64)> = Vec::new();
    let edges = z_edges.get(&(i, j)).unwrap_or(&EMPTY);
    counters.matching_calls += 2;

    let iu = i as usize;
    let ju = j as usize;
    let a_next: Vec<u64> = kids1.iter().map(|u| fam_a.per_kid[u].value_at(ju + 1)).collect();
    let b_next: Vec<u64> = kids2.iter().map(|v| fam_b.per_kid[v].value_at(iu + 1)).collect();
    let keep1: Vec<usize> = kids1
        .iter()
        .enumerate()
        .filter(|&(k, u)| a_next[k] > 0 || edges.iter().any(|&(a, _, _)| a == *u))
        .map(|(_, &u)| u)
        .collect();
    let keep2: Vec<usize> = kids2
        .iter()
        .enumerate()
        .filter(|&(k, v)| b_next[k] > 0 || edges.iter().any(|&(_, b, _)| b == *v))
        .map(|(_, &v)| v)
        .collect();
    let pos1 = |u: usize| keep1.iter().position(|&x| x == u).expect("edge endpoint kept");
    let pos2 = |v: usize| keep2.iter().position(|&x| x == v).expect("edge endpoint kept");

    let mut g = BipartiteGraph::new(keep1.len(), keep2.len());
    for &(u, v, w) in edges {
        g.add_edge(pos1(u), pos2(v), w);
    }
    let mm_ij = mm(&g);

    // extended graph: extra column for the next Q vertex, extra row for the
    // next P vertex, no edge between the two extras
    let mut h = BipartiteGraph::new(keep1.len() + 1, keep2.len() + 1);
    for &(u, v, w) in edges {
        h.add_edge(pos1(u), pos2(v), w);
    }
    for (k, &u) in kids1.iter().enumerate() {
        if a_next[k] > 0 {
            h.add_edge(pos1(u), keep2.len(), a_next[k]);
        }
    }
    for (k, &v) in kids2.iter().enumerate() {
        if b_next[k] > 0 {
            h.add_edge(keep1.len(), pos2(v), b_next[k]);
        }
    }
    (mm_ij, mm(&h))
}
