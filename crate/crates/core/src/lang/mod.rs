//! The restricted C dialect: one function over a single integer list.
//!
//! Surface form (canonical layout, 4-space indent, one statement per line):
//!
//! ```c
//! int * func_1(int a[])
//! {
//!     int p_0 = 2;
//!     for (p_0 = 2; p_0 >= 1; p_0--)
//!     {
//!         a[p_0] = 3;
//!         if (a[p_0])
//!             break;
//!     }
//!     return a;
//! }
//! ```
//!
//! Constraints baked into the grammar: arithmetic is `+`/`-` only with at
//! most two operations per expression, `for` limits are literals inside
//! `[0, L-1]`, and the only loop form is `for`. Conditions are C-truthy
//! (nonzero) or a single relational comparison.

mod ast;
mod interp;
mod lexer;
mod parser;
mod printer;
mod vocab;

pub use ast::{
    classify_control_flow, contains_for, AddOp, Cond, ControlFlowClass, Decl, Expr, ForCmp,
    ForLoop, ForStep, IncDecOp, Index, LValue, Program, RelOp, Stmt, Term, VarId,
};
pub use interp::{interpret, MachineState, RunError, DEFAULT_STEP_BUDGET};
pub use lexer::{detokenize, tokenize, LexError};
pub use parser::{parse, ParseError};
pub use printer::{pretty_print, program_tokens};
pub use vocab::{Vocab, BOS, EOS, PAD};
