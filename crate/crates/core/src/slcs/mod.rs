//! Spatial logic over closure models: formula trees, text syntax,
//! desugaring, the set-valued model checker, and a brute-force oracle used to
//! validate it.

mod ast;
mod eval;
pub mod gen;
mod oracle;
mod parse;

pub use ast::Formula;
pub use eval::{check, sat};
pub use oracle::{oracle_sat, oracle_sat_bounded, OracleTooLarge, DEFAULT_ORACLE_BOUND};
pub use parse::{parse, ParseError};
