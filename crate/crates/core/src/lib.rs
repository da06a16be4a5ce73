//! Betweenness centrality by maximal-frontier sparse matrix products over
//! path-counting monoids, with a communication simulator and cost model for
//! distributed sparse multiplication.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cli;
pub mod costmodel;
pub mod decomp;
pub mod graphgen;
pub mod io;
pub mod mfbc;
pub mod oracle;
pub mod spmat;
