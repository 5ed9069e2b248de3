//! The book's code snippets, compiled as doc-tests.
//!
//! Each chapter of the guide in `book/src/` is included here verbatim,
//! so `cargo test --doc` runs every fenced Rust snippet the book
//! shows. If a snippet drifts from the library, the build breaks.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/tests-and-worlds.md")]
pub mod tests_and_worlds {}

#[doc = include_str!("../../../book/src/choice-programs.md")]
pub mod choice_programs {}

#[doc = include_str!("../../../book/src/preferences-and-cancellation.md")]
pub mod preferences_and_cancellation {}

#[doc = include_str!("../../../book/src/cones-and-duality.md")]
pub mod cones_and_duality {}

#[doc = include_str!("../../../book/src/representations.md")]
pub mod representations {}

#[doc = include_str!("../../../book/src/updating.md")]
pub mod updating_beliefs {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
