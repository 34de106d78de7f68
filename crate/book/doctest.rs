// mdbook cannot link snippets against a workspace crate, so each chapter is
// pulled in as module docs and `cargo test` runs the code blocks.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("src/hamiltonians.md")]
pub mod hamiltonians {}
#[doc = include_str!("src/pauli.md")]
pub mod pauli {}
#[doc = include_str!("src/excitations.md")]
pub mod excitations {}
#[doc = include_str!("src/adapt.md")]
pub mod adapt {}
#[doc = include_str!("src/overlap.md")]
pub mod overlap {}
#[doc = include_str!("src/ci.md")]
pub mod ci {}
#[doc = include_str!("src/cli.md")]
pub mod cli {}
