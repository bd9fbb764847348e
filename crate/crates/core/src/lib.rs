//! Local protocol complexes for locally checkable labelings (LCLs) on rings.
//!
//! The crate decides whether an LCL task is solvable in `t` rounds of the
//! LOCAL model by building constant-size chromatic complexes (input, output
//! and protocol complexes over a star of the graph) and searching for a
//! name-preserving, name-independent simplicial map between them. Witness
//! maps are turned into executable algorithm tables and checked by a ring
//! simulator. The [`reduction`] module implements the set-family functor
//! used to peel one round off a ring-coloring algorithm, together with the
//! tower / iterated-logarithm arithmetic of the resulting lower bound.
//!
//! Module map:
//!
//! - [`complex`]: chromatic complexes stored by facets, simplicial maps.
//! - [`task`]: LCL task definitions, task files, input/output complexes.
//! - [`protocol`]: ring views, mutual compatibility, protocol complexes.
//! - [`search`]: exact map search, brute-force oracle, algorithm tables.
//! - [`sim`]: synchronous ring simulator and cross-validation.
//! - [`reduction`]: set families, the gluing map, round reduction, bounds.

pub mod complex;
pub mod protocol;
pub mod reduction;
pub mod search;
pub mod sim;
pub mod task;

pub use complex::{
    make_complex, Complex, ComplexError, Facet, Label, MapTable, ProcessName, Value, ValueTag,
    Vertex,
};
pub use protocol::{build_protocol_complex, enumerate_views, IdMode, NodeState, RingView};
pub use search::{solve, solve_skeleton, AlgorithmTable, SolveOptions, SolveResult, Verdict};
pub use task::{parse_task, LclTask};
