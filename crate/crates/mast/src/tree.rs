//! Rooted evolutionary trees with distinctly labeled leaves.
//!
//! Trees are stored as flat arenas indexed by `usize` vertex ids. Labels are
//! dense integers in `0..nlabels`; the mapping to external leaf names lives in
//! [`LabelIndex`]. An *evolutionary* tree has every internal vertex with at
//! least two children; [`EvoTree`] can also hold intermediate trees with unary
//! vertices, which [`homeomorphic_version`] contracts away.

use rustc_hash::FxHashMap as HashMap;
use std::fmt::Write as _;
use thiserror::Error;

pub type Label = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("newick syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),
    #[error("unary internal vertex (pass contract=true to splice it out)")]
    UnaryInternal,
    #[error("empty tree")]
    Empty,
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("restriction parts share label {0}")]
    OverlappingParts(Label),
}

/// Rooted ordered tree; leaves carry dense labels in `0..nlabels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvoTree {
    root: Option<usize>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    leaf_label: Vec<Option<Label>>,
    nlabels: usize,
    leaf_of_label: HashMap<Label, usize>,
}

impl EvoTree {
    /// Tree with no vertices over a label universe of size `nlabels`.
    pub fn empty(nlabels: usize) -> Self {
        EvoTree {
            root: None,
            children: Vec::new(),
            parent: Vec::new(),
            leaf_label: Vec::new(),
            nlabels,
            leaf_of_label: HashMap::default(),
        }
    }

    /// Builds a tree from adjacency lists. Checks connectivity, acyclicity and
    /// label distinctness, but permits unary internal vertices.
    pub fn new(
        root: usize,
        children: Vec<Vec<usize>>,
        leaf_label: Vec<Option<Label>>,
        nlabels: usize,
    ) -> Result<Self, TreeError> {
        let n = children.len();
        if leaf_label.len() != n {
            return Err(TreeError::Malformed("children/label length mismatch".into()));
        }
        if root >= n {
            return Err(TreeError::Malformed("root out of range".into()));
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        let mut count = 0usize;
        while let Some(v) = stack.pop() {
            count += 1;
            for &c in &children[v] {
                if c >= n || seen[c] {
                    return Err(TreeError::Malformed("cycle or repeated child".into()));
                }
                seen[c] = true;
                parent[c] = Some(v);
                stack.push(c);
            }
        }
        if count != n {
            return Err(TreeError::Malformed("unreachable vertices".into()));
        }
        let mut leaf_of_label = HashMap::default();
        for v in 0..n {
            match leaf_label[v] {
                Some(l) => {
                    if !children[v].is_empty() {
                        return Err(TreeError::Malformed("labeled internal vertex".into()));
                    }
                    if l >= nlabels {
                        return Err(TreeError::Malformed("label out of range".into()));
                    }
                    if leaf_of_label.insert(l, v).is_some() {
                        return Err(TreeError::DuplicateLabel(l.to_string()));
                    }
                }
                None => {
                    if children[v].is_empty() {
                        return Err(TreeError::Malformed("unlabeled leaf".into()));
                    }
                }
            }
        }
        Ok(EvoTree { root: Some(root), children, parent, leaf_label, nlabels, leaf_of_label })
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn label(&self, v: usize) -> Option<Label> {
        self.leaf_label[v]
    }

    pub fn leaf_of_label(&self, l: Label) -> Option<usize> {
        self.leaf_of_label.get(&l).copied()
    }

    pub fn nlabels(&self) -> usize {
        self.nlabels
    }

    pub fn n_leaves(&self) -> usize {
        (0..self.len()).filter(|&v| self.is_leaf(v)).count()
    }

    pub fn max_degree(&self) -> usize {
        self.children.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Labels present in this tree, ascending. Linear in the tree size, not
    /// in the label universe, so restrictions stay cheap to inspect.
    pub fn labels(&self) -> Vec<Label> {
        let mut out: Vec<Label> = self.leaf_label.iter().filter_map(|&l| l).collect();
        out.sort_unstable();
        out
    }

    /// Vertices in preorder (children visited in list order). Iterative, safe
    /// on deep chains.
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let Some(r) = self.root else { return out };
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            out.push(v);
            for &c in self.children[v].iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Labels of leaves under `v`, ascending.
    pub fn subtree_labels(&self, v: usize) -> Vec<Label> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if let Some(l) = self.leaf_label[u] {
                out.push(l);
            }
            stack.extend_from_slice(&self.children[u]);
        }
        out.sort_unstable();
        out
    }

    /// Rebuilds the subtree rooted at `v` as a standalone tree over the same
    /// label universe, with a map back to source vertex ids.
    pub fn subtree(&self, v: usize) -> Restricted {
        let mut orig = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            orig.push(u);
            for &c in self.children[u].iter().rev() {
                stack.push(c);
            }
        }
        let inv: HashMap<usize, usize> =
            orig.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let mut children = vec![Vec::new(); orig.len()];
        let mut leaf_label = vec![None; orig.len()];
        for (i, &u) in orig.iter().enumerate() {
            children[i] = self.children[u].iter().map(|&c| inv[&c]).collect();
            leaf_label[i] = self.leaf_label[u];
        }
        let tree = EvoTree::new(0, children, leaf_label, self.nlabels).expect("subtree rebuild");
        Restricted { tree, orig, inv }
    }

    /// True iff every internal vertex has at least two children.
    pub fn is_evolutionary(&self) -> bool {
        (0..self.len()).all(|v| self.children[v].len() != 1)
    }
}

/// A tree derived from another, with vertex-id maps in both directions.
#[derive(Debug, Clone)]
pub struct Restricted {
    pub tree: EvoTree,
    /// new vertex id -> source vertex id
    pub orig: Vec<usize>,
    /// source vertex id -> new vertex id; sparse, so restrictions of a huge
    /// tree to many small parts stay linear in the part sizes
    pub inv: HashMap<usize, usize>,
}

/// Maps dense labels to external leaf names. Names are sorted, so equal name
/// sets get equal label assignments.
#[derive(Debug, Clone)]
pub struct LabelIndex {
    names: Vec<String>,
}

impl LabelIndex {
    pub fn from_names(mut names: Vec<String>) -> Self {
        names.sort_unstable();
        LabelIndex { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<Label> {
        self.names.binary_search_by(|x| x.as_str().cmp(name)).ok()
    }

    pub fn name(&self, l: Label) -> &str {
        &self.names[l]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Tab-separated `label<TAB>name` lines, one per label.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", i, name);
        }
        out
    }
}

/// Constant-time ancestor tests and O(1) LCA queries after O(n log n) setup.
#[derive(Debug)]
pub struct Lca {
    first: Vec<usize>,
    pre: Vec<usize>,
    post: Vec<usize>,
    depth: Vec<usize>,
    /// sparse table over euler tour entries: (depth, vertex)
    table: Vec<Vec<(usize, usize)>>,
}

impl Lca {
    pub fn new(t: &EvoTree) -> Self {
        let n = t.len();
        let r = t.root().expect("lca on empty tree");
        let mut euler: Vec<(usize, usize)> = Vec::with_capacity(2 * n);
        let mut first = vec![usize::MAX; n];
        let mut pre = vec![0usize; n];
        let mut post = vec![0usize; n];
        let mut depth = vec![0usize; n];
        // iterative euler tour: (vertex, next child slot)
        let mut stack: Vec<(usize, usize)> = vec![(r, 0)];
        let mut clock = 0usize;
        while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
            if *slot == 0 {
                pre[v] = clock;
                clock += 1;
                first[v] = euler.len();
                euler.push((depth[v], v));
            }
            if *slot < t.children(v).len() {
                let c = t.children(v)[*slot];
                *slot += 1;
                depth[c] = depth[v] + 1;
                stack.push((c, 0));
            } else {
                post[v] = clock;
                clock += 1;
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    euler.push((depth[p], p));
                }
            }
        }
        let m = euler.len();
        let levels = if m <= 1 { 1 } else { 64 - (m as u64).leading_zeros() as usize };
        let mut table = Vec::with_capacity(levels);
        table.push(euler);
        let mut k = 1usize;
        while (1 << k) <= m {
            let prev = &table[k - 1];
            let half = 1usize << (k - 1);
            let row: Vec<(usize, usize)> =
                (0..=m - (1 << k)).map(|i| prev[i].min(prev[i + half])).collect();
            table.push(row);
            k += 1;
        }
        Lca { first, pre, post, depth, table }
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        let (mut a, mut b) = (self.first[u], self.first[v]);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let len = b - a + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        self.table[k][a].min(self.table[k][b + 1 - (1 << k)]).1
    }

    /// True iff `u` is an ancestor of `v` (inclusive).
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        self.pre[u] <= self.pre[v] && self.post[v] <= self.post[u]
    }

    pub fn pre(&self, v: usize) -> usize {
        self.pre[v]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }
}

/// Contracts unary vertices: keeps exactly the vertices with zero or at least
/// two children, reattaching each to its nearest kept ancestor.
pub fn homeomorphic_version(t: &EvoTree) -> Restricted {
    assert!(!t.is_empty(), "homeomorphic version of empty tree");
    let order = t.preorder();
    let mut inv = vec![None; t.len()];
    let mut orig = Vec::new();
    for &v in &order {
        if t.children(v).len() != 1 {
            inv[v] = Some(orig.len());
            orig.push(v);
        }
    }
    let mut children = vec![Vec::new(); orig.len()];
    let mut leaf_label = vec![None; orig.len()];
    // nearest kept ancestor, walking the preorder with a parent chain
    let mut kept_anc = vec![None; t.len()];
    let mut root_new = None;
    for &v in &order {
        let above = match t.parent(v) {
            Some(p) => match inv[p] {
                Some(np) => Some(np),
                None => kept_anc[p],
            },
            None => None,
        };
        kept_anc[v] = above;
        if let Some(nv) = inv[v] {
            match above {
                Some(np) => children[np].push(nv),
                None => root_new = Some(nv),
            }
            leaf_label[nv] = t.label(v);
        }
    }
    let tree = EvoTree::new(root_new.expect("kept root"), children, leaf_label, t.nlabels())
        .expect("homeomorphic rebuild");
    let inv = inv.iter().enumerate().filter_map(|(v, nv)| nv.map(|nv| (v, nv))).collect();
    Restricted { tree, orig, inv }
}

/// Restriction of `t` to each label set in `parts`. Parts must be pairwise
/// disjoint; labels absent from `t` are ignored. Each output is the
/// homeomorphic version of the subtree spanned by the surviving leaves, with
/// children kept in preorder of `t`.
pub fn restrict_many(
    t: &EvoTree,
    lca: &Lca,
    parts: &[Vec<Label>],
) -> Result<Vec<Restricted>, TreeError> {
    let mut seen = rustc_hash::FxHashSet::default();
    for part in parts {
        for &l in part {
            if l < t.nlabels() && !seen.insert(l) {
                return Err(TreeError::OverlappingParts(l));
            }
        }
    }
    Ok(parts.iter().map(|part| restrict_part(t, lca, part)).collect())
}

/// Restriction of `t` to one label set.
pub fn restrict(t: &EvoTree, lca: &Lca, labels: &[Label]) -> Restricted {
    restrict_part(t, lca, labels)
}

fn restrict_part(t: &EvoTree, lca: &Lca, labels: &[Label]) -> Restricted {
    let mut leaves: Vec<usize> = labels
        .iter()
        .filter(|&&l| l < t.nlabels())
        .filter_map(|&l| t.leaf_of_label(l))
        .collect();
    leaves.sort_unstable_by_key(|&v| lca.pre(v));
    if leaves.is_empty() {
        return Restricted {
            tree: EvoTree::empty(t.nlabels()),
            orig: Vec::new(),
            inv: HashMap::default(),
        };
    }
    let mut verts = leaves.clone();
    for w in leaves.windows(2) {
        verts.push(lca.lca(w[0], w[1]));
    }
    verts.sort_unstable_by_key(|&v| lca.pre(v));
    verts.dedup();
    // stack build: preorder over surviving vertices, nearest surviving
    // ancestor is on the stack top
    let mut inv: HashMap<usize, usize> = HashMap::with_capacity_and_hasher(verts.len(), Default::default());
    let mut orig = Vec::with_capacity(verts.len());
    let mut children = vec![Vec::new(); verts.len()];
    let mut leaf_label = vec![None; verts.len()];
    let mut stack: Vec<usize> = Vec::new();
    for &v in &verts {
        let nv = orig.len();
        inv.insert(v, nv);
        orig.push(v);
        while let Some(&top) = stack.last() {
            if lca.is_ancestor(top, v) {
                break;
            }
            stack.pop();
        }
        if let Some(&top) = stack.last() {
            children[inv[&top]].push(nv);
        }
        if t.is_leaf(v) {
            leaf_label[nv] = t.label(v);
        }
        stack.push(v);
    }
    let tree =
        EvoTree::new(0, children, leaf_label, t.nlabels()).expect("restriction rebuild");
    Restricted { tree, orig, inv }
}

/// Sub-path of `path` (source vertex ids, root end first) surviving in a
/// restriction of the same source tree. Survivors keep their relative order.
pub fn restrict_path(path: &[usize], r: &Restricted) -> Vec<usize> {
    path.iter().filter_map(|&v| r.inv.get(&v).copied()).collect()
}

/// Parses a Newick string. Branch lengths and internal vertex names are
/// ignored. With `contract`, unary internal vertices are spliced out instead
/// of rejected. Returns the tree plus a name index for its dense labels.
pub fn parse_newick(input: &str, contract: bool) -> Result<(EvoTree, LabelIndex), TreeError> {
    let b = input.as_bytes();
    let mut pos = 0usize;
    let skip_ws = |pos: &mut usize| {
        while *pos < b.len() && b[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut names: Vec<Option<String>> = Vec::new();
    // stack of open internal vertices
    let mut open: Vec<usize> = Vec::new();
    let mut have_item = false;
    let read_name = |pos: &mut usize| -> String {
        let start = *pos;
        while *pos < b.len() {
            match b[*pos] {
                b'(' | b')' | b',' | b':' | b';' => break,
                c if c.is_ascii_whitespace() => break,
                _ => *pos += 1,
            }
        }
        input[start..*pos].to_string()
    };
    let skip_length = |pos: &mut usize| -> Result<(), TreeError> {
        if *pos < b.len() && b[*pos] == b':' {
            *pos += 1;
            let start = *pos;
            while *pos < b.len()
                && (b[*pos].is_ascii_digit()
                    || matches!(b[*pos], b'.' | b'-' | b'+' | b'e' | b'E'))
            {
                *pos += 1;
            }
            if *pos == start {
                return Err(TreeError::Syntax { pos: *pos, msg: "expected branch length".into() });
            }
        }
        Ok(())
    };
    skip_ws(&mut pos);
    if pos >= b.len() || b[pos] == b';' {
        return Err(TreeError::Empty);
    }
    loop {
        skip_ws(&mut pos);
        if pos >= b.len() {
            return Err(TreeError::Syntax { pos, msg: "unexpected end of input".into() });
        }
        match b[pos] {
            b'(' => {
                pos += 1;
                let v = children.len();
                children.push(Vec::new());
                names.push(None);
                if let Some(&p) = open.last() {
                    children[p].push(v);
                }
                open.push(v);
                have_item = false;
            }
            b')' => {
                pos += 1;
                let _v =
                    open.pop().ok_or(TreeError::Syntax { pos, msg: "unmatched ')'".into() })?;
                if !have_item {
                    return Err(TreeError::Syntax { pos, msg: "empty group".into() });
                }
                skip_ws(&mut pos);
                // internal name, ignored
                let _ = read_name(&mut pos);
                skip_length(&mut pos)?;
                have_item = true;
            }
            b',' => {
                pos += 1;
                if open.is_empty() {
                    return Err(TreeError::Syntax { pos, msg: "',' outside group".into() });
                }
                if !have_item {
                    return Err(TreeError::Syntax { pos, msg: "missing subtree before ','".into() });
                }
                have_item = false;
            }
            b';' => {
                pos += 1;
                break;
            }
            _ => {
                let name = read_name(&mut pos);
                if name.is_empty() {
                    return Err(TreeError::Syntax { pos, msg: "expected leaf name".into() });
                }
                skip_length(&mut pos)?;
                let v = children.len();
                children.push(Vec::new());
                names.push(Some(name));
                if let Some(&p) = open.last() {
                    children[p].push(v);
                }
                have_item = true;
            }
        }
        skip_ws(&mut pos);
        if open.is_empty() {
            if pos < b.len() && b[pos] == b';' {
                pos += 1;
            }
            break;
        }
    }
    if !open.is_empty() {
        return Err(TreeError::Syntax { pos, msg: "unclosed '('".into() });
    }
    skip_ws(&mut pos);
    if pos < b.len() {
        return Err(TreeError::Syntax { pos, msg: "trailing input".into() });
    }
    let root = 0;
    // collect and index leaf names
    let mut leaf_names: Vec<String> = Vec::new();
    for (v, name) in names.iter().enumerate() {
        if children[v].is_empty() {
            match name {
                Some(n) => leaf_names.push(n.clone()),
                None => {
                    return Err(TreeError::Syntax { pos: 0, msg: format!("unnamed leaf {v}") })
                }
            }
        }
    }
    {
        let mut sorted = leaf_names.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(TreeError::DuplicateLabel(w[0].clone()));
            }
        }
    }
    let index = LabelIndex::from_names(leaf_names);
    let leaf_label: Vec<Option<Label>> = names
        .iter()
        .enumerate()
        .map(|(v, n)| {
            if children[v].is_empty() {
                Some(index.id(n.as_ref().unwrap()).unwrap())
            } else {
                None
            }
        })
        .collect();
    let nlabels = index.len();
    let tree = EvoTree::new(root, children, leaf_label, nlabels)?;
    if tree.is_evolutionary() {
        Ok((tree, index))
    } else if contract {
        Ok((homeomorphic_version(&tree).tree, index))
    } else {
        Err(TreeError::UnaryInternal)
    }
}

/// Serializes a tree to Newick with names from `idx`.
pub fn to_newick(t: &EvoTree, idx: &LabelIndex) -> String {
    let mut out = String::new();
    let Some(r) = t.root() else {
        out.push(';');
        return out;
    };
    // explicit stack: Enter(v) / Exit(v)
    enum F {
        Enter(usize, bool),
        Exit,
    }
    let mut stack = vec![F::Enter(r, false)];
    while let Some(f) = stack.pop() {
        match f {
            F::Enter(v, comma) => {
                if comma {
                    out.push(',');
                }
                if let Some(l) = t.label(v) {
                    out.push_str(idx.name(l));
                } else {
                    out.push('(');
                    stack.push(F::Exit);
                    for (i, &c) in t.children(v).iter().enumerate().rev() {
                        stack.push(F::Enter(c, i > 0));
                    }
                }
            }
            F::Exit => out.push(')'),
        }
    }
    out.push(';');
    out
}
