//! Maximum agreement subtree (MAST) of two rooted evolutionary trees.
//!
//! The solver runs in near-linear time for bounded-degree trees. It works by
//! repeatedly raking leaf chains off one tree and reducing root-path versus
//! root-path subproblems to range queries over condensed (compressed
//! nonincreasing) sequences, combined through small bipartite matchings.
//!
//! Entry points: [`mast::mast_size`], [`mast::mast_leafset`] for trees parsed
//! with [`tree::parse_newick`]; the [`oracle`] module holds independent
//! reference implementations used for cross-checking.

pub mod condensed;
pub mod matching;
pub mod mast;
pub mod oracle;
pub mod rake;
pub mod tree;
