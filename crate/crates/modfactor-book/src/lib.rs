//! Doc-test shim for the book: each module's documentation is one
//! chapter of `book/src`, so `cargo test -p modfactor-book --doc` runs
//! every code snippet the book shows.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}

#[doc = include_str!("../../../book/src/modules.md")]
pub mod modules {}

#[doc = include_str!("../../../book/src/complete-positivity.md")]
pub mod complete_positivity {}

#[doc = include_str!("../../../book/src/gns.md")]
pub mod gns {}

#[doc = include_str!("../../../book/src/factorization.md")]
pub mod factorization {}

#[doc = include_str!("../../../book/src/stinespring.md")]
pub mod stinespring {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
