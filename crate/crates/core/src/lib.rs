//! Causal networks and their diagram calculus.
//!
//! The crate implements, end to end:
//!
//! * finite DAG **causal networks**, directed paths, and functors between
//!   their path categories ([`graph`], [`functor`]), with a bridge to finite
//!   posets ([`poset`]);
//! * the six **elementary moves** (relabel, add vertex, add edge, subdivide,
//!   merge parallel edges, shrink a vertex subset) and the decomposition of
//!   an arbitrary functor into a move sequence ([`moves`]);
//! * a strict **symmetric monoidal category** interface with three
//!   instances: exact rational matrices, word bijections, and free string
//!   diagrams ([`smc`]);
//! * **causal diagrams** — a polarization ordering each vertex's in- and
//!   out-edges plus an SMC valuation — with witness-certified gauge
//!   equivalence ([`diagram`]);
//! * string-diagram **evaluation** of the sub-diagram induced by a vertex
//!   subset ([`eval`]);
//! * **transport** of diagrams along moves and along arbitrary functors via
//!   decomposition ([`nerve`]);
//! * JSON and DOT **serialization** for every artifact ([`io`]).
//!
//! All values are immutable after construction and every operation is a pure
//! function, so everything here is safe to share across threads.

pub mod diagram;
pub mod eval;
pub mod functor;
pub mod graph;
pub mod ids;
pub mod io;
pub mod moves;
pub mod nerve;
pub mod poset;
pub mod smc;

pub use diagram::{CausalDiagram, DiagramError, GaugeWitness, Polarization, Valuation};
pub use eval::{induced_boundary, total_value, value, BoundaryOrder, InducedBoundary};
pub use functor::{compose_functors, identity_functor, PathFunctor};
pub use graph::{validate_network, CausalNetwork, GraphError, Path};
pub use ids::{EdgeId, VertexId};
pub use moves::{apply_move, apply_moves, decompose, verify_decomposition, ElementaryMove, MoveError};
pub use nerve::{nerve_apply, nerve_move, transport_witness};
pub use poset::{network_to_poset, poset_to_network, Poset};
pub use smc::{
    perm_to_symmetry, FreeSmc, MatQ, PermCat, Permutation, RatMatrix, SmcError, SymmetricMonoidal,
};
