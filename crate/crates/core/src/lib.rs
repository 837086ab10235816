//! Reduced graph powers, their minimum cycle bases, and reversibility of
//! chains of indistinguishable automata.
//!
//! ```
//! use redpow::{build_reduced_power, theorem1_basis, Graph};
//!
//! let g = Graph::cycle(5);
//! let rp = build_reduced_power(&g, 2).unwrap();
//! assert_eq!((rp.graph().vertex_count(), rp.graph().edge_count()), (15, 25));
//! let t1 = theorem1_basis(&g, 2).unwrap();
//! assert_eq!(t1.basis.total_length(), 45);
//! assert!(t1.certified);
//! ```

pub mod ctmc;
pub mod cycles;
pub mod error;
pub mod graph;
pub mod monomial;
pub mod power;
pub mod squares;

pub use cycles::{greedy_mcb, BasisKind, Cycle, CycleBasis, EdgeVector, Provenance};
pub use error::{Error, Result};
pub use graph::{betti, bfs_spanning_tree, fundamental_cycles, Graph, GraphJson, RootedTree};
pub use monomial::Monomial;
pub use power::{build_reduced_power, ReducedPowerGraph};
pub use squares::{theorem1_basis, theorem1_basis_with, verify_square_space, Theorem1Basis};
