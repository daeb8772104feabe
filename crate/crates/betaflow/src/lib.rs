//! Exact computation with sofic beta-shifts.

pub mod arith;
pub mod covers;
pub mod decide;
pub mod invariants;
pub mod moves;
pub mod reduce;
mod poly;
pub mod seq;

pub use arith::{beta_expansion_of_one, beta_from_generating, entropy, AlgebraicNumber};
pub use covers::{covering_multiplicity, standard_loop_graph, FiberProductCover, FischerCover, LabeledGraph};
pub use invariants::{bowen_franks, determinant, smith_normal_form, verify_closed_forms, IntMatrix};
pub use seq::{Digit, EventuallyPeriodicSeq, GeneratingSequence, ShiftClass, Word};
