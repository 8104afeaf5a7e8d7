//! Graph automorphism groups and isomorphism testing for graphs of bounded
//! eigenvalue multiplicity.
//!
//! The pipeline decomposes the adjacency matrix into eigenspaces, encodes the
//! graph as a point set, projects it into each eigenspace, lists the
//! geometric automorphisms of every projection, and glues them together with a
//! dynamic program over cosets of a colored hypergraph. Every generator that
//! comes out is checked exactly against the adjacency matrix.

pub mod permgroup;
pub mod graph;
pub mod spectral;
pub mod fixtures;
pub mod format;
pub mod geomaut;
pub mod hypaut;
pub mod oracle;
pub mod pipeline;
pub mod pointset;
pub mod selfcheck;
