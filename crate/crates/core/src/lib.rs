//! MAP inference for pairwise MRFs on planar graphs by dual decomposition
//! into a covering tree and binary planar subproblems solved exactly with
//! perfect matching.

pub mod covering_tree;
pub mod dualdec;
pub mod embedding;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod planar_ising;
pub mod repair;
