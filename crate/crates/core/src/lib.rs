//! Exact computations with graded modules over the subalgebra A(1) of the
//! mod 2 Steenrod algebra.

pub mod algebra;
pub mod davismahowald;
pub mod exec;
pub mod f2linalg;
pub mod margolis;
pub mod module;
pub mod resolution;
pub mod structure;

pub use algebra::{Algebra, Sq, Word};
pub use exec::Execution;
pub use f2linalg::{BitMatrix, BitVec, Subspace};
pub use module::{A1Module, DualModule, Element, GradedMap, GradedSpace, ModuleBuilder, ModuleError};
