//! Analytic expressions in `(u, v)`: parsing, printing and jet evaluation.

mod ast;
mod eval;
pub mod jet;
mod parser;

pub use ast::{BinOp, Expr, Func, Var};
pub use eval::{constant_value, eval_f64, eval_grid, eval_jet, eval_scalar, EvalError, EvalErrorKind};
pub use jet::{seed3, Dual, Jet1, Jet2, Scalar};
pub use parser::{parse, ParseError};
