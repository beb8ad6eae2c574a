//! Condensed forms of normal sequences and batched interval-max queries.
//!
//! A normal sequence is a nonincreasing sequence of nonnegative values,
//! indexed 1..=len. Its minimal condensed form keeps one pair (j, v) per
//! distinct nonzero value v, where j is the last index attaining v. Interval
//! queries `max of f_i(j) over i in [lo,hi]` are answered by precomputing
//! joints over the dyadic (regular) intervals of the family index range and
//! splitting each query into O(log k) regular pieces.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CondensedError {
    #[error("pair index {0} outside 1..={1}")]
    IndexOutOfRange(usize, usize),
    #[error("pair ({0}, {1}) inconsistent with a nonincreasing sequence")]
    NotMonotonic(usize, u64),
}

/// Minimal condensed form: pairs sorted by ascending index with strictly
/// decreasing nonzero values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CondensedForm {
    len: usize,
    pairs: Vec<(usize, u64)>,
}

impl CondensedForm {
    /// All-zero sequence of the given length.
    pub fn zero(len: usize) -> Self {
        CondensedForm { len, pairs: Vec::new() }
    }

    /// Builds from an arbitrary condensed form (any set of (index, value)
    /// pairs), validating that some normal sequence matches every pair, and
    /// minimalizing.
    pub fn from_pairs(len: usize, pairs: &[(usize, u64)]) -> Result<Self, CondensedError> {
        for &(j, _) in pairs {
            if j < 1 || j > len {
                return Err(CondensedError::IndexOutOfRange(j, len));
            }
        }
        let minimal = minimalize(pairs);
        let form = CondensedForm { len, pairs: minimal };
        // every input pair must decode back to its own value
        for &(j, v) in pairs {
            if form.value_at(j) != v {
                return Err(CondensedError::NotMonotonic(j, v));
            }
        }
        Ok(form)
    }

    /// Minimal condensed form of an explicit normal sequence.
    pub fn from_seq(seq: &[u64]) -> Result<Self, CondensedError> {
        for (i, w) in seq.windows(2).enumerate() {
            if w[0] < w[1] {
                return Err(CondensedError::NotMonotonic(i + 2, w[1]));
            }
        }
        let mut pairs = Vec::new();
        for (i, &v) in seq.iter().enumerate() {
            let j = i + 1;
            let last = j == seq.len() || seq[j] != v;
            if v != 0 && last {
                pairs.push((j, v));
            }
        }
        Ok(CondensedForm { len: seq.len(), pairs })
    }

    /// Fast path for internal callers that already guarantee consistency.
    pub(crate) fn from_raw_pairs(len: usize, pairs: &[(usize, u64)]) -> Self {
        debug_assert!(pairs.iter().all(|&(j, _)| j >= 1 && j <= len));
        CondensedForm { len, pairs: minimalize(pairs) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pairs(&self) -> &[(usize, u64)] {
        &self.pairs
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    /// f(j) = max value over pairs with index >= j, or 0.
    pub fn value_at(&self, j: usize) -> u64 {
        debug_assert!(j >= 1 && j <= self.len);
        // pairs are ascending by index with strictly decreasing values, so
        // the first pair at or after j holds the max
        match self.pairs.binary_search_by_key(&j, |p| p.0) {
            Ok(i) => self.pairs[i].1,
            Err(i) if i < self.pairs.len() => self.pairs[i].1,
            Err(_) => 0,
        }
    }

    /// The full sequence.
    pub fn decode(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.len];
        let mut next = 0usize; // pair cursor
        for j in 1..=self.len {
            while next < self.pairs.len() && self.pairs[next].0 < j {
                next += 1;
            }
            if next < self.pairs.len() {
                out[j - 1] = self.pairs[next].1;
            }
        }
        out
    }
}

/// Sorts pairs and keeps the right-to-left strict maxima, which is exactly
/// the minimal condensed form of the pointwise max of the pairs.
fn minimalize(pairs: &[(usize, u64)]) -> Vec<(usize, u64)> {
    let mut sorted: Vec<(usize, u64)> = pairs.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::with_capacity(sorted.len());
    let mut running = 0u64;
    for &(j, v) in sorted.iter().rev() {
        if v > running {
            out.push((j, v));
            running = v;
        }
    }
    out.reverse();
    out
}

/// Minimal condensed form of the pointwise max of several sequences.
pub fn joint(forms: &[&CondensedForm]) -> CondensedForm {
    let len = forms.iter().map(|f| f.len).max().unwrap_or(0);
    debug_assert!(forms.iter().all(|f| f.len == len));
    let mut pairs = Vec::with_capacity(forms.iter().map(|f| f.size()).sum());
    for f in forms {
        pairs.extend_from_slice(&f.pairs);
    }
    CondensedForm { len, pairs: minimalize(&pairs) }
}

/// True iff [k1,k2] arises from halving [1, 2^a]: power-of-two length and
/// aligned start.
pub fn is_regular(k1: usize, k2: usize) -> bool {
    if k1 < 1 || k2 < k1 {
        return false;
    }
    let len = k2 - k1 + 1;
    len.is_power_of_two() && (k1 - 1) % len == 0
}

/// Partition of [k1,k2] into maximal regular intervals, left to right.
/// At most 2*log2(k2) + O(1) parts.
pub fn regular_partition(k1: usize, k2: usize) -> Vec<(usize, usize)> {
    assert!(1 <= k1 && k1 <= k2);
    let mut out = Vec::new();
    let mut a = k1;
    while a <= k2 {
        // largest aligned power-of-two block starting at a that fits
        let align = if a == 1 { usize::MAX } else { 1 << (a - 1).trailing_zeros() };
        let mut len = 1usize;
        while len * 2 <= align && a + len * 2 - 1 <= k2 {
            len *= 2;
        }
        if len > align {
            len = align;
        }
        while a + len - 1 > k2 {
            len /= 2;
        }
        out.push((a, a + len - 1));
        a += len;
    }
    out
}

/// An interval-max query: max of f_i(j) over i in lo..=hi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub lo: usize,
    pub hi: usize,
    pub j: usize,
}

/// Precomputed joints over all regular intervals of a padded family,
/// answering interval queries in O(log k * log s).
pub struct JointTree {
    k: usize,
    /// levels[m][b] = joint of forms in block [b*2^m + 1, (b+1)*2^m]
    levels: Vec<Vec<CondensedForm>>,
}

impl JointTree {
    pub fn new(forms: &[CondensedForm]) -> Self {
        let k = forms.len();
        let padded = k.max(1).next_power_of_two();
        let len = forms.iter().map(|f| f.len).max().unwrap_or(0);
        let mut base: Vec<CondensedForm> = forms.to_vec();
        base.resize(padded, CondensedForm::zero(len));
        let mut levels = vec![base];
        while levels.last().unwrap().len() > 1 {
            let prev = levels.last().unwrap();
            let next: Vec<CondensedForm> =
                prev.chunks(2).map(|c| joint(&[&c[0], &c[1]])).collect();
            levels.push(next);
        }
        JointTree { k, levels }
    }

    /// Value of one query; `lo..=hi` must sit inside the original family.
    pub fn query(&self, q: Query) -> u64 {
        assert!(1 <= q.lo && q.lo <= q.hi && q.hi <= self.k, "query {:?} out of range", q);
        let mut best = 0u64;
        for (a, b) in regular_partition(q.lo, q.hi) {
            let m = (b - a + 1).trailing_zeros() as usize;
            let block = (a - 1) >> m;
            best = best.max(self.levels[m][block].value_at(q.j));
        }
        best
    }
}

/// Evaluates a batch of interval queries against a family of sequences given
/// by condensed forms. `forms[i]` is f_{i+1}; query indices are 1-based.
pub fn eval_queries(forms: &[CondensedForm], queries: &[Query]) -> Vec<u64> {
    let tree = JointTree::new(forms);
    queries.iter().map(|&q| tree.query(q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn worked_family() -> Vec<CondensedForm> {
        vec![
            CondensedForm::from_seq(&[5, 4, 4, 3, 2]).unwrap(),
            CondensedForm::from_seq(&[8, 7, 4, 2, 0]).unwrap(),
            CondensedForm::from_seq(&[9, 9, 5, 0, 0]).unwrap(),
        ]
    }

    #[test]
    fn minimal_form_of_worked_family() {
        let f = worked_family();
        assert_eq!(f[2].pairs(), &[(2, 9), (3, 5)]);
        assert_eq!(f[2].size(), 2);
        assert_eq!(f[0].pairs(), &[(1, 5), (3, 4), (4, 3), (5, 2)]);
        // a non-minimal form of f3 minimalizes to the same thing
        let g = CondensedForm::from_pairs(5, &[(1, 9), (2, 9), (3, 5), (5, 0)]).unwrap();
        assert_eq!(g, f[2]);
        assert_eq!(g.decode(), vec![9, 9, 5, 0, 0]);
    }

    #[test]
    fn from_pairs_rejects_inconsistency() {
        assert_eq!(
            CondensedForm::from_pairs(5, &[(6, 1)]),
            Err(CondensedError::IndexOutOfRange(6, 5))
        );
        // (1,5) claims f(1)=5 but (3,7) forces f(1)>=7
        assert_eq!(
            CondensedForm::from_pairs(5, &[(1, 5), (3, 7)]),
            Err(CondensedError::NotMonotonic(1, 5))
        );
        assert!(CondensedForm::from_seq(&[1, 2]).is_err());
    }

    #[test]
    fn joint_of_worked_family() {
        let f = worked_family();
        let j = joint(&[&f[0], &f[1], &f[2]]);
        assert_eq!(j.decode(), vec![9, 9, 5, 3, 2]);
    }

    #[test]
    fn worked_queries() {
        let f = worked_family();
        let vals = eval_queries(
            &f,
            &[
                Query { lo: 1, hi: 3, j: 2 },
                Query { lo: 1, hi: 1, j: 3 },
                Query { lo: 1, hi: 2, j: 2 },
            ],
        );
        assert_eq!(vals, vec![9, 4, 7]);
    }

    #[test]
    fn regular_intervals() {
        assert!(is_regular(1, 8));
        assert!(is_regular(5, 8));
        assert!(is_regular(3, 4));
        assert!(is_regular(7, 7));
        assert!(!is_regular(2, 3));
        assert!(!is_regular(1, 3));
        assert!(!is_regular(3, 6));
        // every partition piece is regular, pieces tile the interval
        for k1 in 1..40usize {
            for k2 in k1..40usize {
                let parts = regular_partition(k1, k2);
                assert_eq!(parts[0].0, k1);
                assert_eq!(parts.last().unwrap().1, k2);
                for w in parts.windows(2) {
                    assert_eq!(w[0].1 + 1, w[1].0);
                }
                for &(a, b) in &parts {
                    assert!(is_regular(a, b), "[{},{}] in partition of [{},{}]", a, b, k1, k2);
                }
                let bound = 2 * (usize::BITS - (k2 - k1 + 1).leading_zeros()) as usize;
                assert!(parts.len() <= bound);
            }
        }
    }

    #[test]
    fn queries_match_naive_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let k = rng.gen_range(1..20);
            let l = rng.gen_range(1..20);
            let seqs: Vec<Vec<u64>> = (0..k)
                .map(|_| {
                    let mut s: Vec<u64> = (0..l).map(|_| rng.gen_range(0..30)).collect();
                    s.sort_unstable_by(|a, b| b.cmp(a));
                    s
                })
                .collect();
            let forms: Vec<CondensedForm> =
                seqs.iter().map(|s| CondensedForm::from_seq(s).unwrap()).collect();
            for (f, s) in forms.iter().zip(&seqs) {
                assert_eq!(&f.decode(), s);
                for j in 1..=l {
                    assert_eq!(f.value_at(j), s[j - 1]);
                }
            }
            let queries: Vec<Query> = (0..50)
                .map(|_| {
                    let lo = rng.gen_range(1..=k);
                    let hi = rng.gen_range(lo..=k);
                    Query { lo, hi, j: rng.gen_range(1..=l) }
                })
                .collect();
            let got = eval_queries(&forms, &queries);
            for (q, v) in queries.iter().zip(got) {
                let naive =
                    (q.lo..=q.hi).map(|i| seqs[i - 1][q.j - 1]).max().unwrap();
                assert_eq!(v, naive, "{:?}", q);
            }
        }
    }
}
