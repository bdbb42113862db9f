//! Measures of uniform-distribution quality for point sequences on the
//! s-dimensional torus.
//!
//! The crate provides three layers that build on one another:
//!
//! * **Digit machinery** — positional digit vectors with blockwise carry
//!   arithmetic ([`digits`]), and b-adic integers with the Monna map, its
//!   pseudoinverse, and the continuous characters built from them
//!   ([`padic`]).
//! * **Function systems and measures** — Walsh, b-adic, trigonometric and
//!   mixed product systems evaluated against weighted index sets, driving a
//!   spectral test with exact termination and an L^α diaphony ([`measures`],
//!   [`weights`]).
//! * **Applications** — rank-1 lattice figures of merit ([`lattice`]),
//!   b-adic interval discrepancy with exact small-case oracles
//!   ([`discrepancy`]), and classical low-discrepancy generators
//!   ([`sequences`]).
//!
//! Everything here is deterministic: floating-point reductions use fixed
//! chunk boundaries and compensated summation, so results do not depend on
//! how work is scheduled across threads (see [`exec`]).
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature only
//! adds `std::error::Error` impls for the error types.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod digits;
pub mod discrepancy;
pub mod error;
pub mod exec;
pub mod lattice;
pub mod measures;
pub mod padic;
pub mod points;
pub mod sequences;
pub mod weights;

pub use error::Error;
pub use points::{Coord, Point};
