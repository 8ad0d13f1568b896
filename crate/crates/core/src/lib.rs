//! Exact computation of quantized enveloping algebras `U_q` of root data and
//! of the graded braided Hopf algebra `B` obtained by deleting the nodes
//! `D = I \ iota(J)` of a sub-root datum.
//!
//! The crate is organised bottom-up:
//!
//! - [`qfield`]: exact scalars in `Q(q)` and q-combinatorics.
//! - [`rootdata`]: root data, sub-root data, validation, lattice maps.
//! - [`words`]: canonical coordinates for the free parts `U^-` and `U^+`.
//! - [`uq`]: elements of `U_q`, the Hopf structure, adjoint action, pairing.
//! - [`braided`]: the coinvariant algebra `B`, its bases, braiding,
//!   relations, primitives and the Nichols checks.
//! - [`report`]: the structured report emitted by the command-line tool.

pub mod error;
pub mod linalg;
pub mod qfield;
pub mod report;
pub mod rootdata;
pub mod selftest;
pub mod braided;
pub mod snf;
pub mod uq;
pub mod words;

pub use error::{Error, Result};
pub use qfield::{q_binom, q_int, LaurentQ, RatQ};
pub use rootdata::{RootDatum, SubRootDatum, ValidationReport};
pub use uq::{Engine, EngineConfig, UElement};
