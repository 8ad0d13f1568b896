//! The guide's chapters, compiled so that `cargo test --doc` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/scalars.md")]
pub mod scalars {}

#[doc = include_str!("../../../book/src/root-data.md")]
pub mod root_data {}

#[doc = include_str!("../../../book/src/quantum-group.md")]
pub mod quantum_group {}

#[doc = include_str!("../../../book/src/coinvariants.md")]
pub mod coinvariants {}

#[doc = include_str!("../../../book/src/degree-one.md")]
pub mod degree_one {}

#[doc = include_str!("../../../book/src/higher-degrees.md")]
pub mod higher_degrees {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
