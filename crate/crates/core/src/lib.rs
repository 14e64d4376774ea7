//! Two-module speculative SAT modulo SAT solving with modular DRUP proofs,
//! proof trimming and proof-based interpolation.

pub mod bench;
pub mod error;
pub mod formula;
pub mod guidance;
pub mod orchestrator;
pub mod proof;
pub mod solver;

pub use error::{Error, Result};
pub use formula::{Clause, Lit, ModuleId, PartitionedFormula, Var};
