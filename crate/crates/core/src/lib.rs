//! Memoisation of nondeterministic computations that terminates on left
//! recursion, with recognizer combinators built on top.
//!
//! The engine ([`nondet`]) runs continuation-passing computations off an
//! explicit agenda. The tabling layer ([`memo`]) suspends repeated calls as
//! consumers of a shared answer table, which turns top-down recognizers
//! ([`combinators`]) into an Earley-style chart recognizer whose memo tables
//! are the chart.

pub mod bench;
pub mod combinators;
pub mod dsl;
pub mod grammars;
pub mod memo;
pub mod nondet;

pub use combinators::{accepts, alt, epsilon, seq, term, Pos, Recognizer, Tokens};
pub use memo::{Chart, Memo, MemoFn, Rec};
pub use nondet::{choice, fail, pure, run, sum, then, Agenda, Comp, Consumer, Policy, Session};
