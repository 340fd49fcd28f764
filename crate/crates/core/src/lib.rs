//! Exact computation of the modular group's action on the ambiguous numbers
//! of Q*(√n): orbit partitions by two independent methods, closed paths and
//! circuits, stabilizer words, residue-class G-subsets, and a harness that
//! checks orbit-count claims for `n = 2^l p^k`.

pub mod arith;
pub mod cf;
pub mod classify;
pub mod diagram;
pub mod element;
pub mod enumeration;
pub mod error;
pub mod harness;
pub mod report;
pub mod words;

mod serde_int;
mod union_find;

pub use cf::{cf_expand, partition_cf, psl_equivalent, Expansion};
pub use classify::{class_mod8, class_mod_p, invariance_audit, legendre, Classifier, ResidueClass};
pub use diagram::{
    closed_path, export_dot, orbit_members, partition_graph, successor, ClosedPath, Method, Orbit,
    OrbitPartition, StepType,
};
pub use element::{Element, Generator};
pub use enumeration::{enumerate_ambiguous, AmbiguousSet, Limits};
pub use error::{Error, Result};
pub use harness::{
    check_paper_examples, predict, resolve_rep, sweep, verify_case, TheoremCase, TheoremId,
    VerdictReport,
};
pub use report::{serialize_report, Format, Report};
pub use words::{
    check_word_fixes, circuit_from_path, parse_word, stabilizer_word, word_to_matrix, Circuit,
    Mat2, Word,
};
