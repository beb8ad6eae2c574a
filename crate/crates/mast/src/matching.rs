//! Maximum weight bipartite matching on small graphs, via the Hungarian
//! algorithm on a zero-padded square matrix. Matchings here never have to be
//! perfect: leaving a vertex unmatched is the same as matching it to a
//! zero-weight dummy.

/// Weighted bipartite graph with sides `0..nu` and `0..nv`.
#[derive(Debug, Clone, Default)]
pub struct BipartiteGraph {
    pub nu: usize,
    pub nv: usize,
    edges: Vec<(usize, usize, u64)>,
}

impl BipartiteGraph {
    pub fn new(nu: usize, nv: usize) -> Self {
        BipartiteGraph { nu, nv, edges: Vec::new() }
    }

    /// Adds an edge; duplicate endpoints are a caller bug.
    pub fn add_edge(&mut self, u: usize, v: usize, w: u64) {
        debug_assert!(u < self.nu && v < self.nv);
        debug_assert!(!self.edges.iter().any(|&(a, b, _)| a == u && b == v), "duplicate edge");
        self.edges.push((u, v, w));
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Maximum total weight over all matchings.
pub fn mm(g: &BipartiteGraph) -> u64 {
    match g.edges.len() {
        0 => return 0,
        1 => return g.edges[0].2,
        _ => {}
    }
    // mask DP over the narrower side; the solver calls this millions of
    // times on graphs bounded by the trees' degree, so the O(s^3) machinery
    // below is reserved for genuinely wide graphs
    let flip = g.nv > g.nu;
    let k = g.nu.min(g.nv);
    if k <= 8 {
        let nu = g.nu.max(g.nv);
        let mut by_u: Vec<Vec<(usize, u64)>> = vec![Vec::new(); nu];
        for &(a, b, w) in &g.edges {
            if w > 0 {
                let (u, v) = if flip { (b, a) } else { (a, b) };
                by_u[u].push((v, w));
            }
        }
        let mut dp = vec![0u64; 1 << k];
        for ue in &by_u {
            if ue.is_empty() {
                continue;
            }
            // descending masks: every write targets a larger mask, so this
            // vertex is matched at most once
            for mask in (0..1usize << k).rev() {
                let base = dp[mask];
                for &(v, w) in ue {
                    if mask & (1 << v) == 0 && base + w > dp[mask | (1 << v)] {
                        dp[mask | (1 << v)] = base + w;
                    }
                }
            }
        }
        return dp.into_iter().max().unwrap_or(0);
    }
    mm_assignment(g).0
}

/// Maximum matching weight plus one optimal matching, listing only its
/// positive-weight edges. Deterministic for a fixed edge list.
pub fn mm_assignment(g: &BipartiteGraph) -> (u64, Vec<(usize, usize, u64)>) {
    if g.edges.is_empty() {
        return (0, Vec::new());
    }
    let s = g.nu.max(g.nv);
    let maxw = g.edges.iter().map(|e| e.2).max().unwrap() as i64;
    // cost matrix for minimization: cost = maxw - weight, zero-padded cells
    // cost maxw
    let mut cost = vec![maxw; s * s];
    for &(u, v, w) in &g.edges {
        cost[u * s + v] = maxw - w as i64;
    }
    let assign = hungarian_min(&cost, s);
    let mut picked = Vec::new();
    let mut total = 0u64;
    for &(u, v, w) in &g.edges {
        if w > 0 && assign[u] == v {
            picked.push((u, v, w));
            total += w;
        }
    }
    picked.sort_unstable();
    (total, picked)
}

/// Maximum matching weight after deleting the edge (u, v), if present.
pub fn mmb(g: &BipartiteGraph, u: usize, v: usize) -> u64 {
    let mut h = BipartiteGraph::new(g.nu, g.nv);
    for &(a, b, w) in &g.edges {
        if (a, b) != (u, v) {
            h.add_edge(a, b, w);
        }
    }
    mm(&h)
}

/// Classic O(s^3) Hungarian algorithm for the square min-cost assignment
/// problem. `cost` is row-major s x s. Returns the column assigned to each
/// row.
fn hungarian_min(cost: &[i64], s: usize) -> Vec<usize> {
    const INF: i64 = i64::MAX / 4;
    // 1-based potentials over rows (u) and columns (v)
    let mut u = vec![0i64; s + 1];
    let mut v = vec![0i64; s + 1];
    let mut p = vec![0usize; s + 1]; // column -> row (0 = free)
    let mut way = vec![0usize; s + 1];
    for i in 1..=s {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; s + 1];
        let mut used = vec![false; s + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=s {
                if !used[j] {
                    let cur = cost[(i0 - 1) * s + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=s {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; s];
    for j in 1..=s {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Exhaustive maximum matching by recursion over rows.
    fn mm_brute(g: &BipartiteGraph) -> u64 {
        let mut adj = vec![Vec::new(); g.nu];
        for &(u, v, w) in g.edges() {
            adj[u].push((v, w));
        }
        fn go(adj: &[Vec<(usize, u64)>], row: usize, used: u64) -> u64 {
            if row == adj.len() {
                return 0;
            }
            let mut best = go(adj, row + 1, used);
            for &(v, w) in &adj[row] {
                if used & (1 << v) == 0 {
                    best = best.max(w + go(adj, row + 1, used | (1 << v)));
                }
            }
            best
        }
        go(&adj, 0, 0)
    }

    #[test]
    fn empty_and_single() {
        let g = BipartiteGraph::new(3, 2);
        assert_eq!(mm(&g), 0);
        let mut g = BipartiteGraph::new(1, 1);
        g.add_edge(0, 0, 7);
        assert_eq!(mm(&g), 7);
        assert_eq!(mmb(&g, 0, 0), 0);
    }

    #[test]
    fn crossing_pair() {
        // picking both diagonal edges (3 + 3) beats the single heavy edge (5)
        let mut g = BipartiteGraph::new(2, 2);
        g.add_edge(0, 0, 5);
        g.add_edge(0, 1, 3);
        g.add_edge(1, 0, 3);
        assert_eq!(mm(&g), 6);
        assert_eq!(mmb(&g, 0, 1), 5);
        assert_eq!(mmb(&g, 0, 0), 6);
    }

    #[test]
    fn assignment_is_a_matching_with_right_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let nu = rng.gen_range(1..7);
            let nv = rng.gen_range(1..7);
            let mut g = BipartiteGraph::new(nu, nv);
            for u in 0..nu {
                for v in 0..nv {
                    if rng.gen_bool(0.6) {
                        g.add_edge(u, v, rng.gen_range(0..20));
                    }
                }
            }
            let (w, picked) = mm_assignment(&g);
            assert_eq!(w, mm_brute(&g), "graph {:?}", g);
            assert_eq!(w, picked.iter().map(|e| e.2).sum::<u64>());
            let mut us: Vec<_> = picked.iter().map(|e| e.0).collect();
            let mut vs: Vec<_> = picked.iter().map(|e| e.1).collect();
            us.sort_unstable();
            us.dedup();
            vs.sort_unstable();
            vs.dedup();
            assert_eq!(us.len(), picked.len());
            assert_eq!(vs.len(), picked.len());
        }
    }

    #[test]
    fn mmb_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let nu = rng.gen_range(1..6);
            let nv = rng.gen_range(1..6);
            let mut g = BipartiteGraph::new(nu, nv);
            for u in 0..nu {
                for v in 0..nv {
                    if rng.gen_bool(0.5) {
                        g.add_edge(u, v, rng.gen_range(0..15));
                    }
                }
            }
            for &(u, v, _) in g.edges().to_vec().iter() {
                let mut h = BipartiteGraph::new(nu, nv);
                for &(a, b, w) in g.edges() {
                    if (a, b) != (u, v) {
                        h.add_edge(a, b, w);
                    }
                }
                assert_eq!(mmb(&g, u, v), mm_brute(&h));
            }
        }
    }
}
