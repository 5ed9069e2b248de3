//! Exact toolkit for finite decision problems stated as syntactic
//! choice programs over a propositional test language.
//!
//! A problem declares primitive tests, a theory (tests held
//! axiomatically true), primitive choices, compound choice programs
//! (`if t then a else b`, rational mixtures), and a partial weak
//! preference relation over the named programs. The toolkit then
//! answers, exactly and deterministically:
//!
//! - which worlds (atoms, or nonstandard truth assignments) are
//!   consistent with the theory ([`logic`]);
//! - what each program means — its table of per-world outcome
//!   distributions — and which programs the theory makes equivalent
//!   ([`choice`]);
//! - whether the declared preferences satisfy the cancellation axiom
//!   family, completeness, and the objective-outcome axioms, with
//!   machine-checkable certificates for every failure ([`axioms`],
//!   powered by the exact cone geometry in [`geometry`]);
//! - a subjective expected-utility representation — states, outcomes,
//!   probabilities, utilities — constructed from the data whenever the
//!   axioms hold, plus an independent verifier ([`represent`]);
//! - how preferences and representations update on new test
//!   information or new comparisons ([`updating`]).
//!
//! Everything is exact rational arithmetic: no floats, no tolerances,
//! no randomness. Identical inputs produce bit-identical outputs.
//!
//! The problem-file format and command surface live in [`problem`] and
//! the companion CLI crate. The `book/` directory of the repository
//! walks through the concepts chapter by chapter; its code snippets
//! compile as doc-tests via the [`guide`] module.

pub mod rational;

mod lexer;

pub mod axioms;
pub mod choice;
pub mod geometry;
pub mod logic;
pub mod problem;
pub mod represent;
pub mod updating;

pub mod guide;

pub use lexer::SyntaxError;
pub use rational::Rational;
