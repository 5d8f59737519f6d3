//! Horner-scheme selection for large multivariate polynomials.
//!
//! An [`Expression`] is rewritten in nested Horner form for a variable
//! ordering ([`Scheme`]), common subexpressions are then shared in a DAG, and
//! the resulting operation count is what Monte Carlo tree search minimizes
//! over the space of orderings.
//!
//! ```
//! use horner_mcts::{simplify, Expression, Scheme};
//!
//! let e = Expression::parse("x^3*y^2 + x^2*y + x^3*z").unwrap();
//! let s = Scheme::parse("x,y", &e).unwrap();
//! let r = simplify(&e, &s).unwrap();
//! assert_eq!((r.ops.mul, r.ops.add), (4, 2));
//! ```

pub mod benchgen;
pub mod cse;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod horner;
pub mod mcts;
pub mod modp;

pub use cse::{build_dag, eliminate_pairs, simplify, Dag, SimplifyResult};
pub use error::{Error, ParseError, Result};
pub use expr::{AtomId, AtomTable, Expression, OpCount, Term};
pub use horner::{apply_scheme, Direction, ExprTree, Scheme};
pub use mcts::{repeat_search, search, Criterion, Schedule, SearchParams, SearchResult};
pub use modp::{Assignment, P31};
