//! Weighted translation semigroups on a discretized half-line: symbols,
//! an exact shift-term operator algebra, commuting tuples with their defect
//! operators and Cauchy duals, the reproducing-kernel analytic model, and
//! spectral bounds.

pub mod cli;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod symbol;
pub mod rkhs;
pub mod spectrum;
pub mod tuple;

pub use error::{Error, Result};
pub use grid::{GridFunction, GridSpec, OperatorExpr, ShiftTerm, C64};
pub use lattice::MultiIndex;
pub use symbol::{SymbolKind, SymbolSpec};
